//! Command-line front end. [`run`] parses arguments, dispatches, and maps outcomes to
//! exit codes: 0 on success, 1 for user errors (bad arguments, bad files, invalid
//! parameters) and 2 for internal failures.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::apps::{
    accuracy, compress, decompress, extract_features, kmeans, nmi, psnr, ClassifierModel,
    CompressedArchive, Layout,
};
use crate::decomp::{double_filter, svd, truncate, Factor};
use crate::error::{Error, Result};
use crate::io::{read_idx, read_tensor, write_tensor, SyntheticKind, SyntheticSpec};
use crate::products::ProductKind;
use crate::tensor::DenseTensor;

/// Column order of every CSV this tool writes.
pub const CSV_HEADER: &str = "method,shape,k,l,seconds,bytes,psnr,frob_error";

#[derive(Parser, Debug)]
#[command(name = "tcsvd", version, about = "Tensor products, tensor SVDs and low-rank compression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    T,
    Tc,
}

impl From<KindArg> for ProductKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::T => ProductKind::T,
            KindArg::Tc => ProductKind::Tc,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindsArg {
    T,
    Tc,
    Both,
}

impl KindsArg {
    fn kinds(self) -> Vec<ProductKind> {
        match self {
            KindsArg::T => vec![ProductKind::T],
            KindsArg::Tc => vec![ProductKind::Tc],
            KindsArg::Both => ProductKind::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LayoutArg {
    Sfd,
    Smd,
}

impl From<LayoutArg> for Layout {
    fn from(l: LayoutArg) -> Self {
        match l {
            LayoutArg::Sfd => Layout::Sfd,
            LayoutArg::Smd => Layout::Smd,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DistArg {
    Gaussian,
    Lowrank,
    Blobs,
}

#[derive(clap::Args, Debug)]
struct DecompArgs {
    /// Input tensor file.
    input: PathBuf,
    /// Truncation rank (default: full).
    #[arg(short = 'k', long = "rank")]
    k: Option<usize>,
    /// Print a CSV row instead of a summary.
    #[arg(long)]
    csv: bool,
    /// Write factors to PREFIX.u.tnsr, PREFIX.s.tnsr and PREFIX.v.tnsr.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// ⋆c-SVD (reflective boundary) of a tensor file.
    Tcsvd(DecompArgs),
    /// t-SVD (periodic boundary) of a tensor file.
    Tsvd(DecompArgs),
    /// Compress a tensor by double filtering.
    Compress {
        input: PathBuf,
        #[arg(short = 'k', long = "rank")]
        k: usize,
        /// Frequency cutoff along each middle mode.
        #[arg(short = 'l', long = "freq")]
        l: usize,
        #[arg(long, value_enum, default_value = "tc")]
        kind: KindArg,
        #[arg(long, value_enum, default_value = "sfd")]
        layout: LayoutArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        csv: bool,
    },
    /// Rebuild a tensor from an archive.
    Decompress {
        archive: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// PSNR in dB between two tensor files.
    Psnr {
        reference: PathBuf,
        test: PathBuf,
        /// Peak value (default: largest magnitude in the reference).
        #[arg(long)]
        max: Option<f64>,
    },
    /// Train and evaluate the subspace classifier on IDX files.
    Classify {
        #[arg(long)]
        train_images: PathBuf,
        #[arg(long)]
        train_labels: PathBuf,
        #[arg(long)]
        test_images: PathBuf,
        #[arg(long)]
        test_labels: PathBuf,
        #[arg(short = 'k', long = "rank")]
        k: usize,
        #[arg(long, value_enum, default_value = "both")]
        kind: KindsArg,
        #[arg(long)]
        csv: bool,
    },
    /// Cluster the samples (last mode) of a tensor file via projected features.
    Cluster {
        input: PathBuf,
        /// Number of clusters.
        #[arg(short = 'c', long)]
        clusters: usize,
        #[arg(short = 'k', long = "rank")]
        k: usize,
        #[arg(short = 'l', long = "freq")]
        l: Option<usize>,
        #[arg(long, value_enum, default_value = "tc")]
        kind: KindArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ground-truth labels (one per line) to score with NMI.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Write assigned labels, one per line.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a seeded synthetic tensor.
    Gen {
        /// Mode lengths, e.g. 100x40x100.
        #[arg(long)]
        shape: String,
        #[arg(long, value_enum, default_value = "gaussian")]
        dist: DistArg,
        /// Tubal rank for --dist lowrank.
        #[arg(long)]
        rank: Option<usize>,
        /// Cluster count for --dist blobs.
        #[arg(long, default_value_t = 2)]
        clusters: usize,
        /// Center spread for --dist blobs, in units of the noise deviation.
        #[arg(long, default_value_t = 5.0)]
        separation: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Where to write blob labels (one per line).
        #[arg(long)]
        labels_out: Option<PathBuf>,
    },
    /// Time decompositions on a seeded Gaussian tensor and emit CSV rows.
    Bench {
        #[arg(long)]
        shape: String,
        #[arg(long, value_enum, default_value = "both")]
        kind: KindsArg,
        #[arg(short = 'k', long = "rank")]
        k: usize,
        #[arg(short = 'l', long = "freq")]
        l: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Timed runs (after one warm-up); the median is reported.
        #[arg(long, default_value_t = 5)]
        runs: usize,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// One line of the benchmark CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub method: String,
    pub shape: Vec<usize>,
    pub k: usize,
    pub l: usize,
    pub seconds: f64,
    pub bytes: usize,
    pub psnr: f64,
    pub frob_error: f64,
}

impl CsvRow {
    pub fn to_csv(&self) -> String {
        let shape = self.shape.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("x");
        format!(
            "{},{},{},{},{:.6},{},{:.4},{:.6e}",
            self.method, shape, self.k, self.l, self.seconds, self.bytes, self.psnr, self.frob_error
        )
    }
}

/// Parses `AxBxC` mode lengths.
pub fn parse_shape(s: &str) -> Result<Vec<usize>> {
    let dims: std::result::Result<Vec<usize>, _> =
        s.split(['x', 'X', ',']).map(|p| p.trim().parse::<usize>()).collect();
    match dims {
        Ok(d) if !d.is_empty() && !d.contains(&0) => Ok(d),
        _ => Err(Error::InvalidArgument(format!(
            "bad shape '{s}' (expected positive lengths like 100x40x100)"
        ))),
    }
}

fn peak(t: &DenseTensor) -> f64 {
    let m = t.max_abs();
    if m > 0.0 {
        m
    } else {
        1.0
    }
}

fn max_middle(shape: &[usize]) -> usize {
    if shape.len() <= 2 {
        1
    } else {
        shape[1..shape.len() - 1].iter().copied().max().unwrap_or(1)
    }
}

fn read_labels(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .parse::<usize>()
                .map_err(|_| Error::Format(format!("bad label '{l}' in {}", path.display())))
        })
        .collect()
}

fn write_labels(path: &Path, labels: &[usize]) -> Result<()> {
    let mut s = String::new();
    for l in labels {
        writeln!(s, "{l}").expect("writing to a string");
    }
    fs::write(path, s)?;
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    xs[xs.len() / 2]
}

fn decomp_cmd(kind: ProductKind, args: &DecompArgs, out: &mut dyn Write) -> Result<()> {
    let a = read_tensor(&args.input)?;
    if a.order() < 2 {
        return Err(Error::InvalidArgument("decompositions need a tensor of order ≥ 2".into()));
    }
    let shape = a.shape().to_vec();
    let kmax = shape[0].min(shape[shape.len() - 1]);
    let k = args.k.unwrap_or(kmax);
    let start = Instant::now();
    let f = truncate(&svd(kind, &a)?, k)?;
    let seconds = start.elapsed().as_secs_f64();
    let r = f.reconstruct()?;
    let l = max_middle(&shape);
    let row = CsvRow {
        method: format!("{kind}svd"),
        shape: shape.clone(),
        k,
        l,
        seconds,
        bytes: compress::header_bytes(shape.len())
            + 8 * compress::payload_values(kind, Layout::Sfd, &shape, l, k),
        psnr: psnr(&a, &r, peak(&a))?,
        frob_error: r.rel_error(&a)?,
    };
    if let Some(prefix) = &args.out {
        for (name, fac) in [("u", f.u()), ("s", f.s()), ("v", f.v())] {
            let t = match fac {
                Factor::Spatial(t) => t.clone(),
                Factor::Transform(s) => s.inverse()?,
            };
            write_tensor(with_suffix(prefix, &format!(".{name}.tnsr")), &t)?;
        }
    }
    if args.csv {
        writeln!(out, "{CSV_HEADER}")?;
        writeln!(out, "{}", row.to_csv())?;
    } else {
        writeln!(out, "{}-SVD of {:?}", kind, shape)?;
        writeln!(out, "rank: {k}")?;
        writeln!(out, "relative error: {:.6e}", row.frob_error)?;
        writeln!(out, "seconds: {:.6}", row.seconds)?;
    }
    Ok(())
}

fn bench_rows(
    a: &DenseTensor,
    kinds: &[ProductKind],
    k: usize,
    l: usize,
    runs: usize,
) -> Result<Vec<CsvRow>> {
    let mut rows = Vec::new();
    for &kind in kinds {
        double_filter(kind, a, l, k)?;
        let mut times = Vec::with_capacity(runs);
        for _ in 0..runs.max(1) {
            let start = Instant::now();
            let f = double_filter(kind, a, l, k)?;
            times.push(start.elapsed().as_secs_f64());
            drop(f);
        }
        let f = double_filter(kind, a, l, k)?;
        let r = f.reconstruct()?;
        rows.push(CsvRow {
            method: format!("{kind}svd"),
            shape: a.shape().to_vec(),
            k,
            l,
            seconds: median(times),
            bytes: compress::header_bytes(a.order())
                + 8 * compress::payload_values(kind, Layout::Sfd, a.shape(), l, k),
            psnr: psnr(a, &r, peak(a))?,
            frob_error: r.rel_error(a)?,
        });
    }
    Ok(rows)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Tcsvd(args) => decomp_cmd(ProductKind::Tc, &args, out),
        Command::Tsvd(args) => decomp_cmd(ProductKind::T, &args, out),
        Command::Compress {
            input,
            k,
            l,
            kind,
            layout,
            out: path,
            csv,
        } => {
            let a = read_tensor(&input)?;
            let kind = ProductKind::from(kind);
            let start = Instant::now();
            let ar = compress(&a, kind, layout.into(), l, k)?;
            let seconds = start.elapsed().as_secs_f64();
            ar.write(&path)?;
            if csv {
                let r = decompress(&ar)?;
                writeln!(out, "{CSV_HEADER}")?;
                let row = CsvRow {
                    method: format!("{kind}-{}", ar.layout()),
                    shape: a.shape().to_vec(),
                    k,
                    l,
                    seconds,
                    bytes: ar.byte_count(),
                    psnr: psnr(&a, &r, peak(&a))?,
                    frob_error: r.rel_error(&a)?,
                };
                writeln!(out, "{}", row.to_csv())?;
            } else {
                writeln!(
                    out,
                    "wrote {} ({} bytes: {} header + {} payload; original {} bytes)",
                    path.display(),
                    ar.byte_count(),
                    ar.header_bytes(),
                    ar.payload_bytes(),
                    8 * a.len()
                )?;
            }
            Ok(())
        }
        Command::Decompress { archive, out: path } => {
            let ar = CompressedArchive::read(&archive)?;
            let t = decompress(&ar)?;
            write_tensor(&path, &t)?;
            writeln!(out, "wrote {} with shape {:?}", path.display(), t.shape())?;
            Ok(())
        }
        Command::Psnr {
            reference,
            test,
            max,
        } => {
            let a = read_tensor(&reference)?;
            let b = read_tensor(&test)?;
            let db = psnr(&a, &b, max.unwrap_or_else(|| peak(&a)))?;
            if db.is_infinite() {
                writeln!(out, "inf")?;
            } else {
                writeln!(out, "{db:.4}")?;
            }
            Ok(())
        }
        Command::Classify {
            train_images,
            train_labels,
            test_images,
            test_labels,
            k,
            kind,
            csv,
        } => {
            let (xtr, ytr) = read_idx(&train_images, &train_labels)?;
            let (xte, yte) = read_idx(&test_images, &test_labels)?;
            if csv {
                writeln!(out, "method,k,train,test,accuracy,seconds")?;
            }
            for kind in kind.kinds() {
                let start = Instant::now();
                let model = ClassifierModel::fit(kind, &xtr, &ytr, k)?;
                let acc = accuracy(&model.predict(&xte)?, &yte);
                let seconds = start.elapsed().as_secs_f64();
                if csv {
                    writeln!(
                        out,
                        "{kind},{k},{},{},{acc:.6},{seconds:.6}",
                        ytr.len(),
                        yte.len()
                    )?;
                } else {
                    writeln!(out, "{kind}: accuracy {acc:.4} (k = {k}, {seconds:.3} s)")?;
                }
            }
            Ok(())
        }
        Command::Cluster {
            input,
            clusters,
            k,
            l,
            kind,
            seed,
            truth,
            out: path,
        } => {
            let a = read_tensor(&input)?;
            let f = extract_features(kind.into(), &a, k, l)?;
            let labels = kmeans(&f.rows, clusters, seed)?;
            if let Some(p) = &path {
                write_labels(p, &labels)?;
            }
            let sizes: Vec<usize> = (0..clusters)
                .map(|c| labels.iter().filter(|&&x| x == c).count())
                .collect();
            writeln!(
                out,
                "{} samples, {} features, cluster sizes {:?}",
                f.rows.nrows(),
                f.rows.ncols(),
                sizes
            )?;
            if let Some(t) = &truth {
                let y = read_labels(t)?;
                writeln!(out, "nmi: {:.6}", nmi(&labels, &y)?)?;
            }
            Ok(())
        }
        Command::Gen {
            shape,
            dist,
            rank,
            clusters,
            separation,
            seed,
            out: path,
            labels_out,
        } => {
            let shape = parse_shape(&shape)?;
            let kind = match dist {
                DistArg::Gaussian => SyntheticKind::Gaussian,
                DistArg::Lowrank => SyntheticKind::LowTubalRank {
                    r: rank.ok_or_else(|| {
                        Error::InvalidArgument("--dist lowrank needs --rank".into())
                    })?,
                },
                DistArg::Blobs => SyntheticKind::Blobs {
                    c: clusters,
                    separation,
                },
            };
            let (t, labels) = SyntheticSpec::new(&shape, kind, seed).generate()?;
            write_tensor(&path, &t)?;
            if let (Some(p), Some(y)) = (&labels_out, &labels) {
                write_labels(p, y)?;
            }
            writeln!(out, "wrote {} with shape {:?}", path.display(), t.shape())?;
            Ok(())
        }
        Command::Bench {
            shape,
            kind,
            k,
            l,
            seed,
            runs,
            out: path,
        } => {
            let shape = parse_shape(&shape)?;
            let a = SyntheticSpec::new(&shape, SyntheticKind::Gaussian, seed)
                .generate()?
                .0;
            let l = l.unwrap_or_else(|| max_middle(&shape));
            let rows = bench_rows(&a, &kind.kinds(), k, l, runs)?;
            let mut text = format!("{CSV_HEADER}\n");
            for r in &rows {
                text.push_str(&r.to_csv());
                text.push('\n');
            }
            match path {
                Some(p) => {
                    fs::write(&p, text)?;
                    writeln!(out, "wrote {} rows to {}", rows.len(), p.display())?;
                }
                None => out.write_all(text.as_bytes())?,
            }
            Ok(())
        }
    }
}

/// Runs the tool with `argv` (including the program name), writing normal output
/// to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    let result = catch_unwind(AssertUnwindSafe(|| dispatch(cli, out)));
    match result {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            let _ = writeln!(err, "internal error: {msg}");
            2
        }
    }
}

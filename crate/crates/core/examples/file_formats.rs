//! Round-trips tensors, IDX images and compressed archives through files.
//!
//! ```bash
//! cargo run --example file_formats
//! ```

use tcsvd::apps::{compress, decompress, CompressedArchive, Layout};
use tcsvd::io::idx::{read_idx, write_idx_images, write_idx_labels};
use tcsvd::io::synthetic::low_tubal_rank;
use tcsvd::io::tensor_file::{read_tensor, write_tensor};
use tcsvd::ProductKind;

pub fn run() -> tcsvd::Result<()> {
    let dir = std::env::temp_dir().join(format!("tcsvd-formats-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;

    let a = low_tubal_rank(&[6, 5, 4, 7], 2, 3)?;
    write_tensor(dir.join("a.tnsr"), &a)?;
    let back = read_tensor(dir.join("a.tnsr"))?;
    println!("tensor file: shape {:?}, max diff {:.1e}", back.shape(), back.max_abs_diff(&a)?);

    let ar = compress(&a, ProductKind::Tc, Layout::Sfd, 5, 2)?;
    ar.write(dir.join("a.tcsf"))?;
    let ar = CompressedArchive::read(dir.join("a.tcsf"))?;
    println!(
        "archive: {} header + {} payload bytes, error {:.1e}",
        ar.header_bytes(),
        ar.payload_bytes(),
        decompress(&ar)?.rel_error(&a)?
    );

    // Two 2x3 images with bytes 0..=11.
    let images: Vec<Vec<u8>> = (0..2).map(|s| (0..6).map(|p| (s * 6 + p) as u8 * 20).collect()).collect();
    write_idx_images(dir.join("img.idx"), 2, 3, &images)?;
    write_idx_labels(dir.join("lbl.idx"), &[3, 9])?;
    let (x, y) = read_idx(dir.join("img.idx"), dir.join("lbl.idx"))?;
    println!("idx: images {:?}, labels {y:?}, top-left of sample 2 = {:.3}", x.shape(), x.get(&[1, 1, 2])?);

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

fn main() -> tcsvd::Result<()> {
    run()
}

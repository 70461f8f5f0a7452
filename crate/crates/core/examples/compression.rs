//! PSNR against archive size for a smooth synthetic volume, as CSV.
//!
//! ```bash
//! cargo run --release --example compression > psnr.csv
//! ```

use tcsvd::apps::{compress, decompress, psnr, Layout};
use tcsvd::{DenseTensor, ProductKind};

/// A smooth field plus a little texture, like a slowly varying image stack.
fn volume(n: usize) -> tcsvd::Result<DenseTensor> {
    let f = n as f64;
    DenseTensor::from_fn(&[n, n, n], |i| {
        let (x, y, z) = (i[0] as f64 / f, i[1] as f64 / f, i[2] as f64 / f);
        (3.0 * x + y).sin() * (2.0 * z).cos() + 0.5 * (x * y * z * 9.0).cos() + 0.05 * ((i[0] * 7 + i[2] * 3) % 5) as f64
    })
}

pub fn run() -> tcsvd::Result<()> {
    let a = volume(32)?;
    let peak = a.max_abs();
    let raw = 8 * a.len();
    println!("kind,layout,l,k,bytes,ratio,psnr");
    for kind in ProductKind::ALL {
        for layout in [Layout::Sfd, Layout::Smd] {
            for (l, k) in [(4, 2), (8, 4), (16, 4), (16, 8), (32, 16)] {
                let ar = compress(&a, kind, layout, l, k)?;
                let db = psnr(&a, &decompress(&ar)?, peak)?;
                let bytes = ar.byte_count();
                println!("{kind},{layout},{l},{k},{bytes},{:.4},{db:.2}", bytes as f64 / raw as f64);
            }
        }
    }
    Ok(())
}

fn main() -> tcsvd::Result<()> {
    run()
}

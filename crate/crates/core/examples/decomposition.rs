//! Full and truncated decompositions, exact at full rank and at the tubal rank.
//!
//! ```bash
//! cargo run --example decomposition
//! ```

use tcsvd::decomp::svd_transform;
use tcsvd::io::synthetic::{gaussian, low_tubal_rank};
use tcsvd::{double_filter, truncate, ProductKind};

pub fn run() -> tcsvd::Result<()> {
    let a = gaussian(&[20, 12, 16], 1)?;
    println!("kind  k   rel_error");
    for kind in ProductKind::ALL {
        let full = svd_transform(kind, &a)?;
        for k in [1, 4, 8, 12, 16] {
            let err = truncate(&full, k)?.reconstruct()?.rel_error(&a)?;
            println!("{:<5} {k:<3} {err:.3e}", kind.name());
        }
    }

    // Built with rank-5 cosine slices, so rank 5 is exact for the ⋆c-SVD.
    let low = low_tubal_rank(&[20, 12, 16], 5, 2)?;
    let f = tcsvd::tcsvd(&low)?;
    for k in [4, 5] {
        println!("tubal rank 5, k={k}: {:.3e}", truncate(&f, k)?.reconstruct()?.rel_error(&low)?);
    }

    let leading: Vec<String> = f.singular_values()?[0].iter().take(6).map(|s| format!("{s:.3}")).collect();
    println!("first slice singular values: {}", leading.join(" "));

    // Dropping high-frequency slices as well as small singular values.
    for kind in ProductKind::ALL {
        let g = double_filter(kind, &a, 6, 8)?;
        println!("{} double filter l=6 k=8: {:.3e}", kind.name(), g.reconstruct()?.rel_error(&a)?);
    }
    Ok(())
}

fn main() -> tcsvd::Result<()> {
    run()
}

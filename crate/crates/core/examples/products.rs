//! Periodic (t) and reflective (⋆c) tensor products side by side.
//!
//! ```bash
//! cargo run --example products
//! ```

use tcsvd::io::synthetic::gaussian;
use tcsvd::{identity_tensor, ProductKind};

pub fn run() -> tcsvd::Result<()> {
    let a = gaussian(&[3, 4, 2], 1)?;
    let x = gaussian(&[2, 4, 5], 2)?;
    let y = gaussian(&[3, 4, 5], 3)?;

    for kind in ProductKind::ALL {
        let ax = kind.product(&a, &x)?;
        println!("{kind}: {:?} * {:?} -> {:?}, |A*X| = {:.4}", a.shape(), x.shape(), ax.shape(), ax.frobenius_norm());

        // The identity leaves X untouched.
        let e = identity_tensor(kind, 2, &[4])?;
        println!("  |E*X - X|          = {:.2e}", kind.product(&e, &x)?.max_abs_diff(&x)?);

        // The transpose is the adjoint under the Frobenius inner product.
        let lhs = ax.inner(&y)?;
        let rhs = x.inner(&kind.product(&kind.transpose(&a)?, &y)?)?;
        println!("  <A*X,Y> - <X,A'*Y> = {:.2e}", lhs - rhs);
    }

    let gap = tcsvd::tproduct(&a, &x)?.rel_error(&tcsvd::tcproduct(&a, &x)?)?;
    println!("the two products differ by {gap:.3} relative: the boundary condition matters");
    Ok(())
}

fn main() -> tcsvd::Result<()> {
    run()
}

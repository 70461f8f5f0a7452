//! The transforms behind the fast products.
//!
//! A Toeplitz-plus-Hankel matrix is diagonalized by the scaled cosine basis, and
//! a circulant one by the DFT. Both are checked against explicit matrices.
//!
//! ```bash
//! cargo run --example diagonalization
//! ```

use nalgebra::DVector;
use tcsvd::io::synthetic::gaussian;
use tcsvd::oracle::{block_circulant_product, build_th};
use tcsvd::{dct_basis, tproduct, GammaOperator};

pub fn run() -> tcsvd::Result<()> {
    let a = [1.0, 2.0, 3.0];
    let b = dct_basis(3)?;
    let th = build_th(&a)?.th.dense;
    let lam = b.c() * &th * b.cinv();
    println!("Th(1,2,3) =\n{th:.3}");
    println!("C Th C^-1 =\n{lam:.3}");

    // The eigenvalues come straight from the kernel: C Γ a.
    let ga = GammaOperator::new(3)?.apply(&a)?;
    let eig = b.c() * DVector::from_vec(ga);
    println!("C Γ a = {:.3}", eig.transpose());

    for n in [4, 8, 16, 32] {
        let k = gaussian(&[n], n as u64)?.into_data();
        let bn = dct_basis(n)?;
        let l = bn.c() * build_th(&k)?.th.dense * bn.cinv();
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| l[(i, j)].abs())
            .fold(0.0, f64::max);
        println!("n={n:>2}: largest off-diagonal entry {off:.2e}");
    }

    let x = gaussian(&[3, 5, 2], 7)?;
    let y = gaussian(&[2, 5, 4], 8)?;
    let err = block_circulant_product(&x, &y)?.rel_error(&tproduct(&x, &y)?)?;
    println!("block-circulant matrix vs FFT t-product: {err:.2e}");
    Ok(())
}

fn main() -> tcsvd::Result<()> {
    run()
}

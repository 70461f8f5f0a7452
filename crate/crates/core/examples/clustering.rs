//! Cluster samples through projected transform-domain features and score with NMI.
//!
//! ```bash
//! cargo run --example clustering
//! ```

use tcsvd::apps::{extract_features, kmeans, nmi};
use tcsvd::io::synthetic::blobs;
use tcsvd::ProductKind;

pub fn run() -> tcsvd::Result<()> {
    let (a, truth) = blobs(&[8, 6, 90], 3, 3.0, 5)?;
    println!("{} samples of shape {:?}", truth.len(), &a.shape()[..2]);
    for kind in ProductKind::ALL {
        for (k, l) in [(2, Some(1)), (4, Some(3)), (8, None)] {
            let f = extract_features(kind, &a, k, l)?;
            let labels = kmeans(&f.rows, 3, 0)?;
            let cutoff = l.map_or("all".to_string(), |l| l.to_string());
            println!(
                "{:<3} k={k} l={cutoff:<3} features={:<3} NMI={:.3}",
                kind.name(),
                f.rows.ncols(),
                nmi(&labels, &truth)?
            );
        }
    }
    Ok(())
}

fn main() -> tcsvd::Result<()> {
    run()
}

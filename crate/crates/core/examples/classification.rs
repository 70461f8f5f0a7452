//! Subspace classification of 8x8 handwritten digits stored as IDX files.
//!
//! ```bash
//! cargo run --release --example classification
//! ```

use std::path::Path;

use tcsvd::apps::{accuracy, nearest_labels, sample_rows, ClassifierModel};
use tcsvd::io::idx::read_idx;
use tcsvd::ProductKind;

pub fn run() -> tcsvd::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let (train, labels) = read_idx(dir.join("digits-train-images.idx"), dir.join("digits-train-labels.idx"))?;
    let (test, truth) = read_idx(dir.join("digits-test-images.idx"), dir.join("digits-test-labels.idx"))?;
    println!("train {:?}, test {:?}", train.shape(), test.shape());

    println!("k  t      tc");
    for k in [1, 2, 4, 8] {
        let acc: Vec<f64> = ProductKind::ALL
            .iter()
            .map(|&kind| {
                let model = ClassifierModel::fit(kind, &train, &labels, k)?;
                Ok(accuracy(&model.predict(&test)?, &truth))
            })
            .collect::<tcsvd::Result<_>>()?;
        println!("{k:<2} {:.3}  {:.3}", acc[0], acc[1]);
    }

    let baseline = nearest_labels(&sample_rows(&train), &labels, &sample_rows(&test));
    println!("1-NN on raw pixels: {:.3}", accuracy(&baseline, &truth));
    Ok(())
}

fn main() -> tcsvd::Result<()> {
    run()
}

//! Loads the committed scanline-MNIST subset end to end, checking the
//! shapes, normalization, and label range the training pipeline relies
//! on. Skips silently when the data directory has been stripped.

use std::path::Path;

use eigenrnn::data::load_mnist_idx;

#[test]
fn the_committed_mini_subset_loads_cleanly() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/mnist-mini");
    if !dir.exists() {
        eprintln!("data/mnist-mini missing; skipping file check");
        return;
    }
    let train = load_mnist_idx::<f64>(
        &dir.join("train-images-idx3-ubyte"),
        &dir.join("train-labels-idx1-ubyte"),
    )
    .unwrap();
    let test = load_mnist_idx::<f64>(
        &dir.join("t10k-images-idx3-ubyte"),
        &dir.join("t10k-labels-idx1-ubyte"),
    )
    .unwrap();

    assert_eq!(train.len(), 12000);
    assert_eq!(test.len(), 2000);
    for set in [&train, &test] {
        assert_eq!(set.input_dim(), 28);
        assert!(set.sequences().iter().all(|s| s.len() == 28));
        assert!(set
            .sequences()
            .iter()
            .all(|s| s.steps.as_slice().iter().all(|&v| (0.0..=1.0).contains(&v))));
    }

    // Every digit should appear a healthy number of times in both splits.
    for (set, floor) in [(&train, 900), (&test, 150)] {
        let mut counts = [0usize; 10];
        for s in set.sequences() {
            match s.label {
                eigenrnn::data::Label::Class(c) => counts[c] += 1,
                _ => panic!("classification labels expected"),
            }
        }
        assert!(counts.iter().all(|&c| c >= floor), "{counts:?}");
    }
}

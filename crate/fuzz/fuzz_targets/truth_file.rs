#![no_main]

use libfuzzer_sys::fuzz_target;
use nalgebra::{DMatrix, DVector};
use sosel::io::TruthFile;
use sosel::{standardize, Dataset, Parametrization};

fuzz_target!(|text: &str| {
    let Ok(truth) = TruthFile::from_json_str(text) else {
        return;
    };
    let x = DMatrix::from_fn(6, 4, |i, j| ((i * 7 + j * 3) % 5) as f64 + (i * j) as f64);
    let y = DVector::from_fn(6, |i, _| i as f64);
    let d = standardize(&Dataset::new(x, y).unwrap(), Parametrization::Formal).unwrap();
    if let Ok(spec) = truth.truth_spec(&d) {
        assert!(spec.support().iter().all(|j| j < 4));
    }
});

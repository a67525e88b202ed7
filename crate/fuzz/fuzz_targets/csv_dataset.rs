#![no_main]

use libfuzzer_sys::fuzz_target;
use sosel::io::{read_dataset, CsvOptions, ResponseColumn};
use sosel::{standardize, Parametrization};

// First byte picks the reader options, the rest is the file.
fuzz_target!(|data: &[u8]| {
    let Some((&ctl, body)) = data.split_first() else {
        return;
    };
    let response = match ctl >> 1 & 3 {
        0 => None,
        1 => Some(ResponseColumn::Index(1 + (ctl >> 3) as usize)),
        _ => Some(ResponseColumn::Name("y".into())),
    };
    let opts = CsvOptions {
        has_header: ctl & 1 == 0,
        response,
    };
    let Ok(named) = read_dataset(body, &opts) else {
        return;
    };
    let d = &named.data;
    assert_eq!(named.predictor_names.len(), d.x().ncols());
    assert_eq!(d.x().nrows(), d.y().len());
    assert!(d.x().iter().chain(d.y().iter()).all(|v| v.is_finite()));
    if d.x().len() <= 4096 {
        for mode in [Parametrization::Practical, Parametrization::Formal] {
            if let Ok(sd) = standardize(d, mode) {
                assert_eq!(sd.p(), d.x().ncols());
            }
        }
    }
});

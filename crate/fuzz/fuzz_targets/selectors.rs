#![no_main]

use libfuzzer_sys::fuzz_target;
use sosel::io::ResponseColumn;
use sosel::Parametrization;

fuzz_target!(|text: &str| {
    if let Ok(ResponseColumn::Index(i)) = text.parse::<ResponseColumn>() {
        assert!(i >= 1);
    }
    let _ = text.parse::<Parametrization>();
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use sosel::bounds::{evaluate_all, BoundInput, BoundLedger};

fuzz_target!(|text: &str| {
    let Ok(input) = serde_json::from_str::<BoundInput>(text) else {
        return;
    };
    let Ok(ledger) = evaluate_all(&input) else {
        return;
    };
    for b in ledger.results() {
        assert!((0.0..=1.0).contains(&b.value), "{} = {}", b.name, b.value);
    }
    let json = serde_json::to_string(&ledger).unwrap();
    let back: BoundLedger = serde_json::from_str(&json).unwrap();
    assert_eq!(back.results().len(), ledger.results().len());
});

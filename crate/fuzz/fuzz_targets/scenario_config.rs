#![no_main]

use libfuzzer_sys::fuzz_target;
use sosel::simlab::ScenarioConfig;

fuzz_target!(|text: &str| {
    let Ok(cfg) = ScenarioConfig::from_json_str(text) else {
        return;
    };
    let again = serde_json::to_string(&cfg).unwrap();
    assert_eq!(ScenarioConfig::from_json_str(&again).unwrap(), cfg);
    let _ = cfg.penalties();
});

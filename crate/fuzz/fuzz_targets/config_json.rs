#![no_main]

use agrlab::cli::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(cfg) = serde_json::from_slice::<ExperimentConfig>(data) else { return };
    let text = serde_json::to_string(&cfg).unwrap();
    assert_eq!(serde_json::from_str::<ExperimentConfig>(&text).unwrap(), cfg);
    if let Ok(r) = cfg.resolve() {
        let echo = cfg.normalized(&r);
        assert!(echo.resolve().is_ok());
    }
});

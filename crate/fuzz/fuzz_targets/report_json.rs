#![no_main]

use agrlab::cli::ReportEnvelope;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(env) = serde_json::from_slice::<ReportEnvelope>(data) else { return };
    let text = serde_json::to_string_pretty(&env).unwrap();
    assert_eq!(serde_json::from_str::<ReportEnvelope>(&text).unwrap(), env);
});

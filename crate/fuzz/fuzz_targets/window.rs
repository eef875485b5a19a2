#![no_main]

use agrlab::agr::StepWindow;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(w) = data.parse::<StepWindow>() {
        assert!(w.start <= w.end);
        assert_eq!(w.to_string().parse::<StepWindow>().unwrap(), w);
    }
});

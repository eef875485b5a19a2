#![no_main]

use agrlab::exactnum::{parse_rational, Rational};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(x) = parse_rational(data) {
        let back: Rational = x.to_string().parse().expect("display output parses");
        assert_eq!(back, x);
    }
});

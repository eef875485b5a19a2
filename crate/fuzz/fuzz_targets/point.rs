#![no_main]

use agrlab::cli::parse_point;
use agrlab::exactnum::{parse_coord, Prime};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(c) = parse_coord(data) {
        assert_eq!(parse_coord(&c.to_string()).unwrap(), c);
    }
    if let Ok((x, y)) = parse_point(data) {
        let p = Prime::new(101).unwrap();
        let _ = (x.to_pfp(p), y.to_pfp(p));
    }
});

#![no_main]

use agrlab::maps::{parse_param_list, FamilyKind, MapFamily};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let (kind, list) = data.split_once(':').unwrap_or(("hv", data));
    let Ok(kind) = kind.parse::<FamilyKind>() else { return };
    let Ok(params) = parse_param_list(list) else { return };
    if let Ok(fam) = MapFamily::from_params(kind, &params) {
        let canon = fam.params().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        assert_eq!(MapFamily::from_params(kind, &canon).expect("canonical params parse"), fam);
    }
});

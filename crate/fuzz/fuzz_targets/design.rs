#![no_main]

use gdc::artifact::{design_to_json, parse_design};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(design) = parse_design(text) {
        let back = parse_design(&design_to_json(&design)).expect("emitted design parses");
        assert_eq!(design_to_json(&back), design_to_json(&design));
    }
});

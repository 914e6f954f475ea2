#![no_main]

use gdc::artifact::parse_bitstring;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(bits) = parse_bitstring(text) {
            assert_eq!(bits.len(), text.len());
            assert!(bits.iter().all(|&b| b <= 1));
        }
    }
});

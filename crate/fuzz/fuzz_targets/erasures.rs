#![no_main]

use gdc::artifact::{format_erasures, parse_erasures};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    let n = n as usize;
    if let Ok(pattern) = parse_erasures(text, n) {
        assert!(pattern.positions().all(|p| p < n));
        let again =
            parse_erasures(&format_erasures(&pattern), n).expect("formatted pattern parses");
        assert_eq!(again, pattern);
    }
});

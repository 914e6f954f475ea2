#![no_main]

use std::sync::OnceLock;

use gdc::artifact::parse_codeword;
use gdc::{GdcCode, SynthesisConfig};
use libfuzzer_sys::fuzz_target;

fn code() -> &'static GdcCode {
    static CODE: OnceLock<GdcCode> = OnceLock::new();
    CODE.get_or_init(|| GdcCode::build(2, 3, 3, 2, &SynthesisConfig::default()).unwrap())
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let code = code();
    let Ok(have) = parse_codeword(text, code) else {
        return;
    };
    let _ = code.decode_global(&have);
    if let Ok(full) = code.fill_erasures(&have) {
        assert_eq!(full.len(), code.n());
    }
    for bucket in 0..code.design().params().t {
        let _ = code.group_decode(bucket, &have);
    }
});

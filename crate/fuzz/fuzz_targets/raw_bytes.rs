#![no_main]

use std::sync::OnceLock;

use gdc::artifact::{bytes_to_symbols, symbols_to_bytes};
use gdc::FieldSpec;
use libfuzzer_sys::fuzz_target;

fn fields() -> &'static [FieldSpec; 2] {
    static FIELDS: OnceLock<[FieldSpec; 2]> = OnceLock::new();
    FIELDS.get_or_init(|| [8, 16].map(|m| FieldSpec::canonical(m).unwrap()))
}

fuzz_target!(|data: &[u8]| {
    let Some((&sel, rest)) = data.split_first() else {
        return;
    };
    let field = &fields()[usize::from(sel & 1)];
    if let Ok(xs) = bytes_to_symbols(field, rest) {
        assert_eq!(symbols_to_bytes(field, &xs).unwrap(), rest);
    }
});

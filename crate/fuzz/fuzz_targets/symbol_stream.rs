#![no_main]

use std::sync::OnceLock;

use gdc::artifact::{format_symbol_stream, parse_symbol_stream};
use gdc::FieldSpec;
use libfuzzer_sys::fuzz_target;

fn fields() -> &'static [FieldSpec] {
    static FIELDS: OnceLock<Vec<FieldSpec>> = OnceLock::new();
    FIELDS.get_or_init(|| (1..=30).map(|m| FieldSpec::canonical(m).unwrap()).collect())
}

fuzz_target!(|data: &[u8]| {
    let Some((&m, rest)) = data.split_first() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    let field = &fields()[usize::from(m) % 30];
    if let Ok(xs) = parse_symbol_stream(field, text) {
        assert!(xs.iter().all(|&x| field.contains(x)));
        let again = parse_symbol_stream(field, &format_symbol_stream(field, &xs)).unwrap();
        assert_eq!(again, xs);
    }
});

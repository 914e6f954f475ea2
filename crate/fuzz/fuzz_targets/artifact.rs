#![no_main]

use gdc::artifact::CodeArtifactFile;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(file) = CodeArtifactFile::parse(text) else {
        return;
    };
    // anything that loads must survive a save/load round trip unchanged
    if let Ok(code) = file.load() {
        let again = CodeArtifactFile::from_code(&code, file.seed);
        let reloaded = CodeArtifactFile::parse(&again.to_json())
            .and_then(|f| f.load())
            .expect("saved artifact reloads");
        assert_eq!(reloaded.generator(), code.generator());
        assert_eq!(reloaded.distance(), code.distance());
    }
});

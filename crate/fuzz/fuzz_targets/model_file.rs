#![no_main]

use libfuzzer_sys::fuzz_target;
use relnodes::io::ModelFile;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(file) = ModelFile::from_json(text) else { return };
    let reparsed = ModelFile::from_json(&file.to_json()).expect("serialized model file parses");
    assert_eq!(reparsed.to_json(), file.to_json());
    let _ = file.load();
});

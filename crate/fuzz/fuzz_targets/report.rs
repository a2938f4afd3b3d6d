#![no_main]

use libfuzzer_sys::fuzz_target;
use relnodes::io::ReportDocument;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = ReportDocument::from_json(text) {
        let _ = ReportDocument::from_json(&doc.to_json()).expect("serialized report parses");
    }
});

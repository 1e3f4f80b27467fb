#![no_main]

use infer_align::io::{read_records_json, render_records, Format};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(records) = read_records_json(text) else { return };
    if records.is_empty() {
        return;
    }
    let bytes = render_records(&records, Format::Json).expect("nonempty");
    let back = read_records_json(std::str::from_utf8(&bytes).unwrap()).expect("rendered json reparses");
    assert_eq!(back.len(), records.len());
});

#![no_main]

use infer_align::io::{read_records_csv, render_records, Format};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(mut records) = read_records_csv(text) else { return };
    if records.is_empty() || records.iter().any(|r| !r.regret.is_finite()) {
        return;
    }
    infer_align::io::sort_records(&mut records);
    let bytes = render_records(&records, Format::Csv).expect("nonempty");
    let back = read_records_csv(std::str::from_utf8(&bytes).unwrap()).expect("rendered csv reparses");
    assert_eq!(back.len(), records.len());
});

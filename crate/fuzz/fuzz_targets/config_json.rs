#![no_main]

use std::path::Path;

use infer_align::io::parse_config_str;
use libfuzzer_sys::fuzz_target;

// Paths resolve against a directory that holds no instance files, so the
// target exercises the grammar and field checks.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = parse_config_str(text, Path::new("/nonexistent"), "fuzz");
});

#![no_main]

use infer_align::io::{parse_instance_str, render_instance};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(inst) = parse_instance_str(text, "fuzz") {
        let again = parse_instance_str(&render_instance(&inst), "fuzz").expect("rendered instance reparses");
        assert_eq!(inst, again);
    }
});

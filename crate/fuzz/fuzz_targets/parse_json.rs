#![no_main]

use bell_recycle::table::{parse_json, Format};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = parse_json(text) {
        if let Ok(out) = table.to_string(Format::Json) {
            assert_eq!(parse_json(&out).expect("re-parse of written json"), table);
        }
    }
});

#![no_main]

use bell_recycle::table::{parse_csv, Format};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(table) = parse_csv(text) {
        // Anything accepted must survive a write and re-read.
        if let Ok(out) = table.to_string(Format::Csv) {
            let again = parse_csv(&out).expect("re-parse of written csv");
            assert_eq!(again.columns, table.columns);
            assert_eq!(again.meta, table.meta);
        }
    }
});

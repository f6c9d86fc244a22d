#![no_main]

use bell_recycle::cli::{parse_cases, parse_finite, parse_pair, parse_settings};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(x) = parse_finite(s) {
        assert!(x.is_finite());
    }
    if let Ok(cases) = parse_cases(s) {
        assert!(!cases.is_empty());
    }
    if let Ok((a, b)) = parse_pair(s) {
        assert_ne!(a, b);
    }
    if let Ok((a, b)) = parse_settings(s) {
        assert!(a.is_finite() && b.is_finite());
    }
});

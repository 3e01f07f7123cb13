#![no_main]

use isograss::io::parse_space;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(spec) = std::str::from_utf8(data) {
        let _ = parse_space(spec);
    }
});

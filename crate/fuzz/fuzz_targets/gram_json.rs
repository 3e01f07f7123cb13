#![no_main]

use isograss::io::parse_gram;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(space) = parse_gram(text) {
            assert_eq!(space.gram().len(), space.dim());
        }
    }
});

#![no_main]

use isograss::io::{multivector_to_json, parse_multivector, LabelKind};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(omega) = parse_multivector(text) {
        // Accepted input must survive a round trip.
        let again = parse_multivector(&multivector_to_json(&omega, LabelKind::Plain))
            .expect("serialized form parses");
        assert_eq!(again, omega);
    }
});

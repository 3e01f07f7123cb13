#![no_main]

use isograss::ideal_lab::quadric_rank;
use isograss::io::parse_quadrics;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(quadrics) = parse_quadrics(text) {
        for (q, _) in quadrics.iter().take(4) {
            let _ = quadric_rank(q);
        }
    }
});

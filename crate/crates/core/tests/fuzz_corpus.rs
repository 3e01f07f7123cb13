//! Runs the checked-in fuzz corpus through the same entry points as the fuzz targets.

use std::fs;
use std::path::Path;

use isograss::ideal_lab::quadric_rank;
use isograss::io::{self, LabelKind};

fn corpus(target: &str) -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            (path.display().to_string(), fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "empty corpus for {target}");
    out
}

#[test]
fn multivector_seeds_round_trip() {
    let mut parsed = 0;
    for (name, text) in corpus("multivector_json") {
        if let Ok(omega) = io::parse_multivector(&text) {
            let again = io::parse_multivector(&io::multivector_to_json(&omega, LabelKind::Plain)).unwrap();
            assert_eq!(again, omega, "{name}");
            parsed += 1;
        }
    }
    assert!(parsed >= 2);
}

#[test]
fn gram_seeds_parse() {
    for (name, text) in corpus("gram_json") {
        let space = io::parse_gram(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(space.gram().len(), space.dim());
    }
}

#[test]
fn quadric_seeds_parse() {
    for (name, text) in corpus("quadric_json") {
        let quadrics = io::parse_quadrics(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        for (q, claimed) in quadrics {
            if let Some(r) = claimed {
                assert_eq!(quadric_rank(&q), r, "{name}");
            }
        }
    }
}

#[test]
fn space_seeds() {
    let results: Vec<bool> = corpus("space_spec").iter().map(|(_, s)| io::parse_space(s).is_ok()).collect();
    assert!(results.contains(&true) && results.contains(&false));
}

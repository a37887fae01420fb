#![no_main]

use libfuzzer_sys::fuzz_target;

// The parser must reject garbage gracefully, and anything it accepts must
// survive a serialize/parse round trip unchanged.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(h) = berge::parse_hypergraph(text) {
        let out = berge::serialize_hypergraph(&h);
        let back = berge::parse_hypergraph(&out).expect("serialized output parses");
        assert_eq!(back, h);
    }
});

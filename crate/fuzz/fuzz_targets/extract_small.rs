#![no_main]

use libfuzzer_sys::fuzz_target;

// Any parsed hypergraph small enough to bound the work must either be
// rejected with a precondition error or produce an outcome; internal
// defects and panics are bugs. Outcomes are verified by the extractor
// itself before it returns.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(h) = berge::parse_hypergraph(text) else {
        return;
    };
    if h.n() > 16 || h.m() > 64 {
        return;
    }
    for v in 0..h.n() {
        match berge::extract(&h, berge::hypergraph::VertexId(v)) {
            Ok(_) => {}
            Err(e) => assert!(e.is_precondition(), "defect on valid input: {e}"),
        }
    }
    if let Err(e) = berge::extract_theorem2(&h) {
        assert!(e.is_precondition(), "defect on valid input: {e}");
    }
});

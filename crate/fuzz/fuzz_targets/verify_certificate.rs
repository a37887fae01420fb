#![no_main]

use libfuzzer_sys::fuzz_target;

// Input is a hypergraph file and a certificate file separated by a zero
// byte; the verifier must decide (accept or reject) without panicking on
// any combination.
fuzz_target!(|data: &[u8]| {
    let Some(split) = data.iter().position(|&b| b == 0) else {
        return;
    };
    let (Ok(h_text), Ok(c_text)) = (
        std::str::from_utf8(&data[..split]),
        std::str::from_utf8(&data[split + 1..]),
    ) else {
        return;
    };
    let Ok(h) = berge::parse_hypergraph(h_text) else {
        return;
    };
    let Ok(file) = berge::CertificateFile::from_json(c_text) else {
        return;
    };
    if let Ok(outcome) = file.to_outcome(&h) {
        match outcome {
            berge::Outcome::Path(p) => {
                let _ = berge::verify_path(&h, &p);
            }
            berge::Outcome::Cycle(c) => {
                let _ = berge::verify_cycle(&h, &c);
            }
        }
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(file) = berge::CertificateFile::from_json(text) {
        // Re-serialization of anything we accepted must not panic.
        let _ = file.to_json();
    }
});

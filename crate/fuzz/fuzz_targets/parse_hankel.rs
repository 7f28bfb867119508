#![no_main]
use hankel_spectra::schema::{emit, parse_hankel, HankelDoc};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(doc) = parse_hankel(s) else { return };
    if let Ok(h) = doc.to_matrix() {
        let again = parse_hankel(&emit(&HankelDoc::from_matrix(&h))).unwrap();
        assert_eq!(again.n, h.size());
    }
});

#![no_main]
use hankel_spectra::clark::clark_measure;
use hankel_spectra::schema::parse_blaschke;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(Ok(b)) = parse_blaschke(s).map(|doc| doc.to_product()) else { return };
    // root finding is cubic in the degree
    if b.degree() <= 32 {
        let _ = clark_measure(&b);
    }
});

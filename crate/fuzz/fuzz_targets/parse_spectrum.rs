#![no_main]
use hankel_spectra::schema::{emit, parse_spectrum, SpectrumDoc};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(doc) = parse_spectrum(s) else { return };
    // anything that validates must survive a trip through the emitter
    if let Ok(d) = doc.to_data() {
        let again = parse_spectrum(&emit(&SpectrumDoc::from_data(&d))).expect("emitted spectrum parses");
        assert_eq!(again.to_data().expect("emitted spectrum validates"), d);
    }
});

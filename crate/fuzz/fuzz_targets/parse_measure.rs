#![no_main]
use hankel_spectra::schema::{emit, parse_measure, MeasureDoc};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(Ok(m)) = parse_measure(s).map(|doc| doc.to_measure()) else { return };
    assert!(m.total_mass().is_finite());
    let again = parse_measure(&emit(&MeasureDoc::from_measure(&m))).unwrap();
    assert_eq!(again.to_measure().unwrap(), m);
});

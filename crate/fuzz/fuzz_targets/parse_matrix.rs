#![no_main]
use hankel_spectra::hankel::{HankelMatrix, HANKEL_TOL};
use hankel_spectra::schema::parse_matrix;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(Ok(m)) = parse_matrix(s).map(|doc| doc.to_matrix()) else { return };
    if m.nrows() <= 64 {
        let _ = HankelMatrix::from_dense(&m, HANKEL_TOL);
    }
});

#![no_main]
use hankel_spectra::schema::{decode_matrix, encode_matrix};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = decode_matrix(data) {
        assert_eq!(encode_matrix(&m), data);
    }
});

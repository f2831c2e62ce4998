#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(w) = hilbert_lab::group::parse_word(text) {
            let again =
                hilbert_lab::group::parse_word(&w.to_string()).expect("display output parses");
            assert_eq!(again, w);
        }
    }
});

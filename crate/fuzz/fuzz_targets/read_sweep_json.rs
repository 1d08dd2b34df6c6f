#![no_main]

use libfuzzer_sys::fuzz_target;
use skyrme_kink::io::{read_sweep_json, write_sweep_json};

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(doc) = read_sweep_json(s) {
        let text = write_sweep_json(&doc).unwrap();
        assert_eq!(read_sweep_json(&text).unwrap(), doc);
    }
});

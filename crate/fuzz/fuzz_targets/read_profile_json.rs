#![no_main]

use libfuzzer_sys::fuzz_target;
use skyrme_kink::io::{read_profile_json, write_profile_json};

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(doc) = read_profile_json(s) {
            let _ = doc.params();
            if let Ok(text) = write_profile_json(&doc) {
                assert_eq!(read_profile_json(&text).unwrap(), doc);
            }
        }
    }
});

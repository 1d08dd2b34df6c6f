#![no_main]

use libfuzzer_sys::fuzz_target;
use skyrme_kink::io::{read_sweep_csv, write_sweep_csv};

fuzz_target!(|data: &str| {
    if let Ok(rows) = read_sweep_csv(data) {
        let text = write_sweep_csv(&rows).unwrap();
        let again = read_sweep_csv(&text).unwrap();
        assert_eq!(rows.len(), again.len());
    }
});

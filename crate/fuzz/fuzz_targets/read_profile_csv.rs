#![no_main]

use libfuzzer_sys::fuzz_target;
use skyrme_kink::io::{read_profile_csv, write_profile_csv};

fuzz_target!(|data: &str| {
    if let Ok(rows) = read_profile_csv(data) {
        let text = write_profile_csv(&rows).unwrap();
        let again = read_profile_csv(&text).unwrap();
        assert_eq!(rows.len(), again.len());
        for (a, b) in rows.iter().zip(&again) {
            let bits = |r: &skyrme_kink::io::ProfileRow| {
                [r.x, r.alpha, r.dalpha, r.energy_density, r.charge_density, r.bps_residual]
                    .map(f64::to_bits)
            };
            assert_eq!(bits(a), bits(b));
        }
    }
});

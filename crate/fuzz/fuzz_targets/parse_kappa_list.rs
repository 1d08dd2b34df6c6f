#![no_main]

use libfuzzer_sys::fuzz_target;
use skyrme_kink::io::parse_kappa_list;

fuzz_target!(|data: &str| {
    if let Ok(kappas) = parse_kappa_list(data) {
        assert!(kappas.iter().all(|k| k.is_finite() && *k > 0.0));
        // re-serialized values parse back to the same list
        let text: String = kappas.iter().map(|k| format!("{k:?}\n")).collect();
        assert_eq!(parse_kappa_list(&text).unwrap(), kappas);
    }
});

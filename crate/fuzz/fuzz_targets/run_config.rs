#![no_main]

use libfuzzer_sys::fuzz_target;
use zeta_ladders::config::parse_run_config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = parse_run_config(text) {
        assert!((1..=1024).contains(&cfg.threads));
        assert!(cfg.epsilon > 0.0 && cfg.epsilon <= 0.2);
        assert!((1..=8).contains(&cfg.k));
    }
});

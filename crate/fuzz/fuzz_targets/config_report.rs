#![no_main]

use libfuzzer_sys::fuzz_target;
use zeta_ladders::report::parse_config_report;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rep) = parse_config_report(text) {
        assert_eq!(rep.alphas.len(), rep.k);
        let rendered = rep.to_json().expect("report renders");
        let again = parse_config_report(&rendered).expect("rendered report parses");
        assert_eq!(again.to_json().unwrap(), rendered);
    }
});

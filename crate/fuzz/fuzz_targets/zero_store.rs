#![no_main]

use libfuzzer_sys::fuzz_target;
use zeta_ladders::zeros::parse_zero_store;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(store) = parse_zero_store(text) {
        let ords = store.ordinates();
        assert!(ords.windows(2).all(|w| w[0] < w[1]));
        assert!(ords.last().is_none_or(|&g| g <= store.verified_to()));
        let again = parse_zero_store(&store.to_text()).expect("rendered store parses");
        assert_eq!(again.len(), store.len());
    }
});

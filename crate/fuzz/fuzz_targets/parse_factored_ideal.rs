#![no_main]

use libfuzzer_sys::fuzz_target;

use freycond::conductor::FactoredIdeal;

fuzz_target!(|data: &[u8]| {
    if let Ok(ideal) = serde_json::from_slice::<FactoredIdeal>(data) {
        let _ = ideal.to_string();
        let again = serde_json::to_string(&ideal).unwrap();
        assert_eq!(serde_json::from_str::<FactoredIdeal>(&again).unwrap(), ideal);
    }
});

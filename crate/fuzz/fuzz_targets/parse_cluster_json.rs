#![no_main]

use libfuzzer_sys::fuzz_target;

use freycond::cluster::{parse_cluster_json, render_ascii, to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(pic) = parse_cluster_json(text) {
        // anything accepted must render and survive a second trip
        let _ = render_ascii(&pic);
        let again = serde_json::to_string(&to_json(&pic)).unwrap();
        assert_eq!(parse_cluster_json(&again).unwrap(), pic);
    }
});

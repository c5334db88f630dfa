#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = webometrics::io::csvio::read_fixture_records(data);
});

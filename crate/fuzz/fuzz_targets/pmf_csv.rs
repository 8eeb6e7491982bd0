#![no_main]

use chenstein::discrete_dist::IntegerPmf;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(p) = IntegerPmf::from_csv(text) {
            let back = IntegerPmf::from_csv(&p.to_csv()).expect("emitted CSV parses");
            assert_eq!(back.support(), p.support());
        }
    }
});

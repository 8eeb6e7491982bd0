#![no_main]

use chenstein::pointproc::{BoxWindow, Intensity, PointPattern};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&pick, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let d = usize::from(pick % 3) + 1;
    let window = BoxWindow::unit_cube(d).expect("unit cube");
    let intensity = Intensity::Poisson { t: 1.0 };
    if let Ok(p) = PointPattern::from_csv(text, window.clone(), intensity) {
        let back = PointPattern::from_csv(&p.to_csv(), window, intensity).expect("emitted CSV parses");
        assert_eq!(back, p);
    }
});

#![no_main]

use grover_opt::algorithms::Algorithm;
use grover_opt::bench::Mode;
use grover_opt::localopt::Routine;
use grover_opt::testbed::TestFunction;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(f) = s.parse::<TestFunction>() {
        assert_eq!(f.name(), s);
    }
    if let Ok(a) = s.parse::<Algorithm>() {
        assert_eq!(a.name(), s);
    }
    if let Ok(r) = s.parse::<Routine>() {
        assert_eq!(r.name(), s);
    }
    if let Ok(m) = s.parse::<Mode>() {
        assert_eq!(m.name(), s);
    }
});

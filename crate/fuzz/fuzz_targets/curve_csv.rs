#![no_main]

use grover_opt::bench::read_curve_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = read_curve_csv(data);
});

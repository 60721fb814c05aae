#![no_main]

use grover_opt::bench::read_table_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = read_table_csv(data);
});

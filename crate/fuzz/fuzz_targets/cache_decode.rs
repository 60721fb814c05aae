#![no_main]

use grover_opt::grid::GridSpec;
use grover_opt::oracle::cache::{decode, encode};
use grover_opt::oracle::DiscretizedObjective;
use grover_opt::testbed::BoxDomain;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(image) = decode(data) else { return };
    // Anything accepted must re-encode to the same bytes.
    let domain = BoxDomain::cube(image.dim, 0.0, 1.0).unwrap();
    let grid = GridSpec::new(domain, image.points_per_axis).unwrap();
    let d = DiscretizedObjective::from_cache(grid, image).unwrap();
    assert_eq!(encode(&d), data);
});

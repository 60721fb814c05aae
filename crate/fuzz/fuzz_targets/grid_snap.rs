#![no_main]

use grover_opt::grid::GridSpec;
use grover_opt::testbed::BoxDomain;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&p, rest)) = data.split_first() else { return };
    let coords: Vec<f64> = rest
        .chunks_exact(8)
        .take(3)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if coords.is_empty() {
        return;
    }
    let domain = BoxDomain::cube(coords.len(), -40.0, 40.0).unwrap();
    let grid = GridSpec::new(domain, usize::from(p).max(2)).unwrap();
    if let Ok(i) = grid.point_to_index(&coords) {
        assert!(i < grid.len());
        let snapped = grid.index_to_point(i).unwrap();
        assert_eq!(grid.point_to_index(&snapped).unwrap(), i);
    }
});

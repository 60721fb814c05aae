//! On-disk cache of value tables.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! b"GOPT1"            magic "GOPT" + format version '1'
//! n        u64        number of variables
//! P        u64        points per axis
//! values   N x f64    N = P^n, values[i] at grid index i
//! perm     N x u64    indices sorted ascending by value, ties by index
//! ```
//!
//! Files are keyed by `(function, n, P)` and live in the directory named by
//! [`CACHE_DIR_ENV`].

use std::fs;
use std::path::{Path, PathBuf};

use super::{DiscretizedObjective, MAX_POINTS};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::testbed::TestFunction;

pub const MAGIC: &[u8; 4] = b"GOPT";
pub const VERSION: u8 = b'1';
pub const HEADER_LEN: usize = 5 + 8 + 8;
pub const CACHE_DIR_ENV: &str = "GROVER_OPT_CACHE_DIR";

/// Decoded cache contents, validated but not yet tied to a function.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheImage {
    pub dim: usize,
    pub points_per_axis: usize,
    pub values: Vec<f64>,
    pub sorted_perm: Vec<usize>,
}

pub fn encode(d: &DiscretizedObjective) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * d.len());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(d.grid().dim() as u64).to_le_bytes());
    out.extend_from_slice(&(d.grid().points_per_axis() as u64).to_le_bytes());
    for v in d.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for &i in d.sorted_perm() {
        out.extend_from_slice(&(i as u64).to_le_bytes());
    }
    out
}

fn read_u64(bytes: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8-byte slice"))
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::Cache(msg.into())
}

/// Parses and validates a cache image. Never panics on arbitrary input.
pub fn decode(bytes: &[u8]) -> Result<CacheImage> {
    if bytes.len() < HEADER_LEN {
        return Err(malformed(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(malformed("bad magic"));
    }
    if bytes[4] != VERSION {
        return Err(malformed(format!("unsupported version byte {:#04x}", bytes[4])));
    }
    let dim = read_u64(bytes, 5);
    let p = read_u64(bytes, 13);
    if dim == 0 {
        return Err(malformed("n must be at least 1"));
    }
    if p < 2 {
        return Err(malformed("P must be at least 2"));
    }
    let len = u32::try_from(dim)
        .ok()
        .and_then(|d| p.checked_pow(d))
        .filter(|&len| len <= MAX_POINTS as u64)
        .ok_or_else(|| malformed(format!("P^n = {p}^{dim} exceeds {MAX_POINTS} points")))?
        as usize;
    let body = &bytes[HEADER_LEN..];
    if body.len() != 16 * len {
        return Err(malformed(format!(
            "expected {} body bytes for {len} points, found {}",
            16 * len,
            body.len()
        )));
    }
    let values: Vec<f64> = body[..8 * len]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    if values.iter().any(|v| v.is_nan()) {
        return Err(malformed("NaN in value table"));
    }
    let mut seen = vec![false; len];
    let mut sorted_perm = Vec::with_capacity(len);
    for c in body[8 * len..].chunks_exact(8) {
        let i = u64::from_le_bytes(c.try_into().expect("8-byte chunk"));
        if i >= len as u64 || seen[i as usize] {
            return Err(malformed(format!("permutation entry {i} repeated or out of range")));
        }
        seen[i as usize] = true;
        sorted_perm.push(i as usize);
    }
    for w in sorted_perm.windows(2) {
        let order = values[w[0]].total_cmp(&values[w[1]]).then(w[0].cmp(&w[1]));
        if order.is_gt() {
            return Err(malformed(format!("permutation not sorted at indices {} {}", w[0], w[1])));
        }
    }
    Ok(CacheImage {
        dim: dim as usize,
        points_per_axis: p as usize,
        values,
        sorted_perm,
    })
}

impl DiscretizedObjective {
    /// Rehydrates a decoded image against the grid it is supposed to cover.
    pub fn from_cache(grid: GridSpec, image: CacheImage) -> Result<Self> {
        if image.dim != grid.dim() || image.points_per_axis != grid.points_per_axis() {
            return Err(malformed(format!(
                "image is for n={} P={}, grid is n={} P={}",
                image.dim,
                image.points_per_axis,
                grid.dim(),
                grid.points_per_axis()
            )));
        }
        let sorted_values = image.sorted_perm.iter().map(|&i| image.values[i]).collect();
        Ok(Self {
            grid,
            values: image.values,
            sorted_perm: image.sorted_perm,
            sorted_values,
        })
    }
}

pub fn cache_path(dir: &Path, f: &TestFunction, grid: &GridSpec) -> PathBuf {
    dir.join(format!(
        "{}-n{}-p{}.gopt",
        f.name(),
        grid.dim(),
        grid.points_per_axis()
    ))
}

/// Builds the objective, reusing a cached table from `dir` when one exists.
///
/// Only registry functions with default parameters are cached, since the
/// key does not capture custom coefficients. A malformed cache file is
/// rebuilt and overwritten.
pub fn load_or_build(f: &TestFunction, grid: GridSpec, dir: Option<&Path>) -> Result<DiscretizedObjective> {
    let cacheable = f.name().parse::<TestFunction>().is_ok_and(|default| &default == f);
    let Some(dir) = dir.filter(|_| cacheable) else {
        return DiscretizedObjective::build(f, grid);
    };
    let path = cache_path(dir, f, &grid);
    if let Ok(bytes) = fs::read(&path) {
        if let Ok(d) = decode(&bytes).and_then(|img| DiscretizedObjective::from_cache(grid.clone(), img)) {
            return Ok(d);
        }
    }
    let d = DiscretizedObjective::build(f, grid)?;
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension("gopt.tmp");
    fs::write(&tmp, encode(&d))?;
    fs::rename(&tmp, &path)?;
    Ok(d)
}

/// Cache directory from the environment, if set and non-empty.
pub fn cache_dir_from_env() -> Option<PathBuf> {
    std::env::var_os(CACHE_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testbed::BoxDomain;

    fn small() -> DiscretizedObjective {
        let f = TestFunction::Rastrigin;
        let grid = GridSpec::new(f.domain_for(2).unwrap(), 9).unwrap();
        DiscretizedObjective::build(&f, grid).unwrap()
    }

    #[test]
    fn layout_is_exact() {
        let grid = GridSpec::new(BoxDomain::cube(1, -1.0, 1.0).unwrap(), 3).unwrap();
        let d = DiscretizedObjective::build(&TestFunction::Dejong, grid).unwrap();
        let bytes = encode(&d);
        let mut expected = b"GOPT1".to_vec();
        expected.extend_from_slice(&1u64.to_le_bytes());
        expected.extend_from_slice(&3u64.to_le_bytes());
        for v in [1.0f64, 0.0, 1.0] {
            expected.extend_from_slice(&v.to_le_bytes());
        }
        for i in [1u64, 0, 2] {
            expected.extend_from_slice(&i.to_le_bytes());
        }
        assert_eq!(bytes, expected);
    }

    #[test]
    fn decode_round_trip() {
        let d = small();
        let img = decode(&encode(&d)).unwrap();
        assert_eq!(img.values, d.values());
        assert_eq!(img.sorted_perm, d.sorted_perm());
        let back = DiscretizedObjective::from_cache(d.grid().clone(), img).unwrap();
        assert_eq!(back.count_below(5.0), d.count_below(5.0));
    }

    #[test]
    fn rejects_corruption() {
        let good = encode(&small());
        assert!(decode(&good[..10]).is_err());
        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(decode(&bad).is_err());
        let mut bad = good.clone();
        bad[4] = b'2';
        assert!(decode(&bad).is_err());
        let mut bad = good.clone();
        bad.pop();
        assert!(decode(&bad).is_err());
        // Swap two permutation entries.
        let mut bad = good.clone();
        let at = HEADER_LEN + 8 * 81;
        let (a, b) = (bad[at..at + 8].to_vec(), bad[at + 8..at + 16].to_vec());
        bad[at..at + 8].copy_from_slice(&b);
        bad[at + 8..at + 16].copy_from_slice(&a);
        assert!(decode(&bad).is_err());
        // Absurd dimensions must not allocate.
        let mut bad = good[..HEADER_LEN].to_vec();
        bad[5..13].copy_from_slice(&u64::MAX.to_le_bytes());
        assert!(decode(&bad).is_err());
    }

    #[test]
    fn grid_mismatch_rejected() {
        let d = small();
        let img = decode(&encode(&d)).unwrap();
        let other = GridSpec::new(TestFunction::Rastrigin.domain_for(2).unwrap(), 8).unwrap();
        assert!(DiscretizedObjective::from_cache(other, img).is_err());
    }

    #[test]
    fn load_or_build_writes_and_reuses() {
        let dir = tempfile::tempdir().unwrap();
        let f = TestFunction::Griewank;
        let grid = GridSpec::new(f.domain_for(1).unwrap(), 128).unwrap();
        let a = load_or_build(&f, grid.clone(), Some(dir.path())).unwrap();
        let path = cache_path(dir.path(), &f, &grid);
        assert!(path.exists());
        let b = load_or_build(&f, grid.clone(), Some(dir.path())).unwrap();
        assert_eq!(a.values(), b.values());
        fs::write(&path, b"garbage").unwrap();
        let c = load_or_build(&f, grid, Some(dir.path())).unwrap();
        assert_eq!(a.sorted_perm(), c.sorted_perm());
        assert_eq!(fs::read(&path).unwrap(), encode(&a));
    }
}

//! Exact harmonic numbers `H_n = 1 + 1/2 + ... + 1/n`, memoized process-wide.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

fn table() -> &'static RwLock<Vec<BigRational>> {
    static TABLE: OnceLock<RwLock<Vec<BigRational>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![BigRational::zero()]))
}

/// Returns `H_n` exactly, with `H_0 = 0`.
///
/// The cache is append-only; readers never block each other once the
/// table already covers `n`.
pub fn harmonic(n: usize) -> BigRational {
    {
        let t = table().read().expect("harmonic table poisoned");
        if let Some(h) = t.get(n) {
            return h.clone();
        }
    }
    let mut t = table().write().expect("harmonic table poisoned");
    while t.len() <= n {
        let k = t.len();
        let next = &t[k - 1] + BigRational::new(BigInt::from(1), BigInt::from(k));
        t.push(next);
    }
    t[n].clone()
}

//! Self-contained numerical kernels: adaptive quadrature, small dense linear
//! algebra (determinants, symmetric eigenproblems), and a deterministic RNG.
//!
//! Everything here is `no_std`-clean and calls `libm` for transcendentals so
//! results do not depend on the enabled feature set.

pub mod linalg;
pub mod quad;

use alloc::vec::Vec;

/// `count` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let step = (hi - lo) / (count - 1) as f64;
            (0..count).map(|i| lo + step * i as f64).collect()
        }
    }
}

/// `count` geometrically spaced values from `lo` to `hi` inclusive; both
/// endpoints must be positive.
pub fn geomspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    debug_assert!(lo > 0.0 && hi > 0.0);
    match count {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let (la, lb) = (libm::log(lo), libm::log(hi));
            let step = (lb - la) / (count - 1) as f64;
            (0..count)
                .map(|i| libm::exp(la + step * i as f64))
                .collect()
        }
    }
}

/// xorshift64* pseudo-random generator; used only to seed iterative solvers
/// with a reproducible start vector.
#[derive(Clone, Debug)]
pub struct XorShift64 {
    state: u64,
}

impl XorShift64 {
    pub fn new(seed: u64) -> Self {
        // A zero state would be a fixed point; remap it.
        XorShift64 {
            state: if seed == 0 {
                0x9E37_79B9_7F4A_7C15
            } else {
                seed
            },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform double in (-1, 1), never exactly 0.
    pub fn next_symmetric(&mut self) -> f64 {
        let u = self.next_u64() >> 11; // 53 significant bits
        let v = (u as f64) / ((1u64 << 53) as f64); // [0, 1)
        2.0 * v - 1.0 + 1.0e-12
    }
}

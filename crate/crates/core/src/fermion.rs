//! Exact ground-state correlators of the XY ring via free fermions.
//!
//! A Jordan–Wigner transformation maps the chain onto free fermions with
//! one-particle energies
//!
//! ```text
//! eps_k   = 2 (1 - lambda cos k)
//! delta_k = 2 lambda gamma sin k
//! Lam_k   = sqrt(eps_k^2 + delta_k^2)
//! ```
//!
//! and Bogoliubov angle `cos(theta_k) = eps_k / Lam_k`,
//! `sin(theta_k) = delta_k / Lam_k`. Every physical correlator reduces to the
//! ground-state contraction
//!
//! ```text
//! G(n) = -(1/N) sum_k [ cos(k n) cos(theta_k) - sin(k n) sin(theta_k) ]
//! ```
//!
//! (momentum integral for the infinite chain), from which
//! `<sz> = -G(0)`, `<sx_i sx_{i+r}>` and `<sy_i sy_{i+r}>` are r x r
//! Toeplitz determinants in G, and `<sz_i sz_{i+r}> = G(0)^2 - G(r) G(-r)`.
//!
//! On a finite odd ring the fermion number parity splits the spectrum into
//! two momentum grids: antiperiodic `k = (2m+1) pi / N` (even parity) and
//! periodic `k = 2 pi m / N` (odd parity, with the k = 0 mode forcibly
//! occupied to make the occupation count odd). Both sector energies are
//! evaluated and the lower one selected; nothing here is taken on faith —
//! the `oracle` module certifies every convention on small rings.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::model::{Axis, ModelParams, Size};
use crate::numeric::linalg::det;
use crate::numeric::quad::{integrate, NoConvergence};

/// Default absolute tolerance of the infinite-chain quadrature.
pub const QUAD_TOL: f64 = 1e-11;

/// The momentum integrand has a derivative kink at k = 0 when lambda = 1;
/// pre-splitting the interval keeps the adaptive bisection shallow there.
const QUAD_SPLIT: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FermionError {
    /// r_max must satisfy 1 <= r_max, and r_max < N/2 on a finite ring so
    /// that separations stay on the short arc.
    RMaxTooLarge { r_max: u32, n: Option<u32> },
    /// The G window does not cover a separation required by the requested
    /// correlator.
    MissingGEntry { n: i32 },
    /// The infinite-chain quadrature failed to meet its tolerance.
    Quadrature(NoConvergence),
}

impl fmt::Display for FermionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FermionError::RMaxTooLarge { r_max, n: Some(n) } => {
                write!(
                    f,
                    "r_max = {r_max} too large for ring of {n} sites (need r_max < N/2)"
                )
            }
            FermionError::RMaxTooLarge { r_max, n: None } => {
                write!(f, "r_max = {r_max} must be at least 1")
            }
            FermionError::MissingGEntry { n } => {
                write!(f, "G window does not contain separation n = {n}")
            }
            FermionError::Quadrature(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for FermionError {}

impl From<NoConvergence> for FermionError {
    fn from(e: NoConvergence) -> Self {
        FermionError::Quadrature(e)
    }
}

/// Fermion-number parity sector of a finite ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    /// Even fermion number; antiperiodic momenta (2m+1) pi / N.
    Even,
    /// Odd fermion number; periodic momenta 2 pi m / N with k = 0 occupied.
    Odd,
}

/// How a [`GFunction`] was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GSource {
    /// Momentum sum over the ground parity sector of a finite ring.
    FiniteSum { n: u32, parity: Parity },
    /// Adaptive quadrature on the infinite chain.
    Quadrature,
}

/// The contraction G(n) tabulated on a symmetric separation window.
#[derive(Clone, Debug)]
pub struct GFunction {
    min_n: i32,
    values: Vec<f64>,
    pub source: GSource,
}

impl GFunction {
    pub fn get(&self, n: i32) -> Result<f64, FermionError> {
        let idx = n - self.min_n;
        if idx < 0 || idx as usize >= self.values.len() {
            return Err(FermionError::MissingGEntry { n });
        }
        Ok(self.values[idx as usize])
    }

    /// Covered separation window (inclusive).
    pub fn window(&self) -> (i32, i32) {
        (self.min_n, self.min_n + self.values.len() as i32 - 1)
    }
}

fn momenta(n: u32, parity: Parity) -> impl Iterator<Item = f64> {
    let nn = f64::from(n);
    (0..n).map(move |m| match parity {
        Parity::Even => (2.0 * f64::from(m) + 1.0) * PI / nn,
        Parity::Odd => 2.0 * f64::from(m) * PI / nn,
    })
}

/// cos(theta_k) and sin(theta_k) for one momentum, including the forced
/// occupation of the periodic k = 0 mode (whose "angle" is pinned to pi so
/// that the mode counts as occupied regardless of the sign of eps_0).
fn bogoliubov(k: f64, gamma: f64, lambda: f64, parity: Parity, is_k0: bool) -> (f64, f64) {
    if is_k0 && parity == Parity::Odd {
        return (-1.0, 0.0);
    }
    let eps = 2.0 * (1.0 - lambda * libm::cos(k));
    let delta = 2.0 * lambda * gamma * libm::sin(k);
    let lam = libm::sqrt(eps * eps + delta * delta);
    if lam == 0.0 {
        // Only reachable in the antiperiodic sector exactly at a gap-closing
        // momentum; the angle is immaterial there (measure zero) but must be
        // deterministic.
        (1.0, 0.0)
    } else {
        (eps / lam, delta / lam)
    }
}

/// Ground energy of one parity sector.
pub fn sector_energy(n: u32, gamma: f64, lambda: f64, parity: Parity) -> f64 {
    let mut e = -f64::from(n);
    for (m, k) in momenta(n, parity).enumerate() {
        if k > 1e-9 && k < PI - 1e-9 {
            let eps = 2.0 * (1.0 - lambda * libm::cos(k));
            let delta = 2.0 * lambda * gamma * libm::sin(k);
            let lam = libm::sqrt(eps * eps + delta * delta);
            e += eps - lam;
        }
        if m == 0 && parity == Parity::Odd {
            // Forced occupation of k = 0 costs its one-particle energy.
            e += 2.0 * (1.0 - lambda);
        }
    }
    e
}

/// Both sector energies; the ground sector is the lower one (ties go to even).
pub fn ground_sector(n: u32, gamma: f64, lambda: f64) -> (Parity, f64) {
    let even = sector_energy(n, gamma, lambda, Parity::Even);
    let odd = sector_energy(n, gamma, lambda, Parity::Odd);
    if even <= odd {
        (Parity::Even, even)
    } else {
        (Parity::Odd, odd)
    }
}

/// Ground-state energy of a finite ring (minimum over parity sectors).
pub fn ground_energy(n: u32, gamma: f64, lambda: f64) -> f64 {
    ground_sector(n, gamma, lambda).1
}

/// Single G(n) value on a finite ring (momentum sum over the ground sector).
pub fn finite_g(params: &ModelParams, n_sep: i32) -> f64 {
    let n = match params.size() {
        Size::FiniteOdd(n) => n,
        Size::Infinite => unreachable!("finite_g requires a finite ring"),
    };
    let (parity, _) = ground_sector(n, params.gamma(), params.lambda());
    let mut s = 0.0;
    for (m, k) in momenta(n, parity).enumerate() {
        let (ct, st) = bogoliubov(k, params.gamma(), params.lambda(), parity, m == 0);
        s += libm::cos(k * n_sep as f64) * ct - libm::sin(k * n_sep as f64) * st;
    }
    -s / f64::from(n)
}

/// Single G(n) value on the infinite chain, to absolute tolerance `abs_tol`.
pub fn infinite_g_with_tol(
    gamma: f64,
    lambda: f64,
    n_sep: i32,
    abs_tol: f64,
) -> Result<f64, NoConvergence> {
    let f = |k: f64| {
        let eps = 2.0 * (1.0 - lambda * libm::cos(k));
        let delta = 2.0 * lambda * gamma * libm::sin(k);
        let lam = libm::sqrt(eps * eps + delta * delta);
        if lam == 0.0 {
            return 0.0;
        }
        (libm::cos(k * n_sep as f64) * eps - libm::sin(k * n_sep as f64) * delta) / lam
    };
    let half = 0.5 * abs_tol;
    let head = integrate(&f, 0.0, QUAD_SPLIT, half)?;
    let tail = integrate(&f, QUAD_SPLIT, PI, half)?;
    Ok(-(head + tail) / PI)
}

/// Single G(n) value on the infinite chain at the default tolerance.
pub fn infinite_g(gamma: f64, lambda: f64, n_sep: i32) -> Result<f64, NoConvergence> {
    infinite_g_with_tol(gamma, lambda, n_sep, QUAD_TOL)
}

/// Tabulates G over the window [-r_max-1, r_max+1], wide enough for every
/// correlator with separation up to r_max.
pub fn g_function(params: &ModelParams, r_max: u32) -> Result<GFunction, FermionError> {
    validate_r_max(params, r_max)?;
    let lo = -(r_max as i32) - 1;
    let hi = r_max as i32 + 1;
    let len = (hi - lo + 1) as usize;
    match params.size() {
        Size::FiniteOdd(n) => {
            let (parity, _) = ground_sector(n, params.gamma(), params.lambda());
            let mut values = vec![0.0; len];
            for (m, k) in momenta(n, parity).enumerate() {
                let (ct, st) = bogoliubov(k, params.gamma(), params.lambda(), parity, m == 0);
                // March cos(k n), sin(k n) across the window by angle
                // addition: one cos/sin pair per momentum instead of one
                // per (momentum, separation).
                let (ck, sk) = (libm::cos(k), libm::sin(k));
                let mut c = libm::cos(k * lo as f64);
                let mut s = libm::sin(k * lo as f64);
                for slot in values.iter_mut() {
                    *slot += c * ct - s * st;
                    let c2 = c * ck - s * sk;
                    s = s * ck + c * sk;
                    c = c2;
                }
            }
            for v in &mut values {
                *v = -*v / f64::from(n);
            }
            Ok(GFunction {
                min_n: lo,
                values,
                source: GSource::FiniteSum { n, parity },
            })
        }
        Size::Infinite => {
            let mut values = vec![0.0; len];
            for (i, slot) in values.iter_mut().enumerate() {
                *slot = infinite_g(params.gamma(), params.lambda(), lo + i as i32)?;
            }
            Ok(GFunction {
                min_n: lo,
                values,
                source: GSource::Quadrature,
            })
        }
    }
}

fn validate_r_max(params: &ModelParams, r_max: u32) -> Result<(), FermionError> {
    if r_max < 1 {
        return Err(FermionError::RMaxTooLarge { r_max, n: None });
    }
    if let Size::FiniteOdd(n) = params.size() {
        if 2 * r_max >= n {
            return Err(FermionError::RMaxTooLarge { r_max, n: Some(n) });
        }
    }
    Ok(())
}

/// Starting separation window for range searches. Weaker anisotropy pushes
/// entanglement to longer range (roughly like 1/gamma), so the window grows
/// accordingly; callers that need certainty about the far tail widen it
/// adaptively from here.
pub fn default_r_max(gamma: f64) -> u32 {
    let scaled = libm::ceil(2.0 / gamma) as u32 + 2;
    scaled.max(3)
}

/// Transverse magnetization `<sz> = -G(0)`.
pub fn magnetization(g: &GFunction) -> Result<f64, FermionError> {
    Ok(-g.get(0)?)
}

/// Two-point function `<sa_i sa_{i+r}>` from a tabulated G.
///
/// x and y are r x r Toeplitz determinants with entries `G(i - j - 1)` and
/// `G(i - j + 1)` respectively; z is the two-contraction formula.
pub fn two_point(g: &GFunction, axis: Axis, r: u32) -> Result<f64, FermionError> {
    let r = r as i32;
    if r < 1 {
        return Err(FermionError::MissingGEntry { n: r });
    }
    match axis {
        Axis::Z => {
            let g0 = g.get(0)?;
            Ok(g0 * g0 - g.get(r)? * g.get(-r)?)
        }
        Axis::X | Axis::Y => {
            let shift = if axis == Axis::X { -1 } else { 1 };
            let n = r as usize;
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    m[i * n + j] = g.get(i as i32 - j as i32 + shift)?;
                }
            }
            Ok(det(&m, n))
        }
    }
}

/// Magnetization plus the three diagonal two-point functions for all
/// separations r = 1..=r_max, computed from a single shared G evaluation.
#[derive(Clone, Debug)]
pub struct CorrelatorSet {
    pub params: ModelParams,
    pub r_max: u32,
    pub mz: f64,
    gxx: Vec<f64>,
    gyy: Vec<f64>,
    gzz: Vec<f64>,
}

impl CorrelatorSet {
    pub fn gxx(&self, r: u32) -> f64 {
        self.gxx[(r - 1) as usize]
    }
    pub fn gyy(&self, r: u32) -> f64 {
        self.gyy[(r - 1) as usize]
    }
    pub fn gzz(&self, r: u32) -> f64 {
        self.gzz[(r - 1) as usize]
    }
}

/// Bundles [`magnetization`] and [`two_point`] over r = 1..=r_max.
pub fn correlators(params: &ModelParams, r_max: u32) -> Result<CorrelatorSet, FermionError> {
    let g = g_function(params, r_max)?;
    let mz = magnetization(&g)?;
    let mut gxx = Vec::with_capacity(r_max as usize);
    let mut gyy = Vec::with_capacity(r_max as usize);
    let mut gzz = Vec::with_capacity(r_max as usize);
    for r in 1..=r_max {
        gxx.push(two_point(&g, Axis::X, r)?);
        gyy.push(two_point(&g, Axis::Y, r)?);
        gzz.push(two_point(&g, Axis::Z, r)?);
    }
    Ok(CorrelatorSet {
        params: *params,
        r_max,
        mz,
        gxx,
        gyy,
        gzz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;

    #[test]
    fn field_only_limit_all_sizes() {
        // lambda = 0: fully polarized along z, independent of size.
        for params in [
            ModelParams::finite(11, 1.0, 0.0).unwrap(),
            ModelParams::finite(41, 0.25, 0.0).unwrap(),
            ModelParams::infinite(0.5, 0.0).unwrap(),
        ] {
            let set = correlators(&params, 3).unwrap();
            assert!((set.mz - 1.0).abs() < 1e-12, "mz = {}", set.mz);
            for r in 1..=3 {
                assert!((set.gzz(r) - 1.0).abs() < 1e-12);
                assert!(set.gxx(r).abs() < 1e-12);
                assert!(set.gyy(r).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn critical_ising_closed_forms() {
        // gamma = 1, lambda = 1, infinite chain: G(n) = 2 / (pi (2n - 1)).
        for n in [-3, -2, -1, 0, 1, 2, 3, 4] {
            let want = 2.0 / (PI * (2.0 * n as f64 - 1.0));
            let got = infinite_g(1.0, 1.0, n).unwrap();
            assert!((got - want).abs() < 1e-10, "G({n}) = {got}, want {want}");
        }
        let params = ModelParams::infinite(1.0, 1.0).unwrap();
        let set = correlators(&params, 2).unwrap();
        assert!((set.mz - 2.0 / PI).abs() < 1e-10);
        assert!((set.gyy(1) - 2.0 / PI).abs() < 1e-10);
        assert!((set.gxx(1) + 2.0 / (3.0 * PI)).abs() < 1e-10);
        assert!((set.gzz(1) - 16.0 / (3.0 * PI * PI)).abs() < 1e-10);
    }

    #[test]
    fn chosen_sector_energy_is_lower_everywhere() {
        for n in [3u32, 7, 11, 41] {
            for gamma in [0.25, 0.5, 1.0] {
                for lambda in [0.0, 0.5, 0.9, 1.0, 1.1, 2.0] {
                    let (parity, e) = ground_sector(n, gamma, lambda);
                    let other = match parity {
                        Parity::Even => sector_energy(n, gamma, lambda, Parity::Odd),
                        Parity::Odd => sector_energy(n, gamma, lambda, Parity::Even),
                    };
                    assert!(e <= other + 1e-12, "N={n} gamma={gamma} lambda={lambda}");
                }
            }
        }
    }

    #[test]
    fn finite_g_converges_to_infinite_g() {
        // Off criticality the finite-size error decays like exp(-N/xi); at
        // lambda = 0.95 the correlation length is long enough that the decay
        // is visible across the size ladder before hitting machine noise.
        let want = infinite_g(1.0, 0.95, 1).unwrap();
        let mut prev = f64::INFINITY;
        for n in [101u32, 401, 1601] {
            let params = ModelParams::finite(n, 1.0, 0.95).unwrap();
            let diff = (finite_g(&params, 1) - want).abs();
            assert!(diff < prev, "|G_{n}(1) - G_inf(1)| = {diff} not decreasing");
            prev = diff;
        }
        // At lambda = 0.5 the ring has converged to far better than 1e-6
        // by N = 401.
        let want_half = infinite_g(1.0, 0.5, 1).unwrap();
        let params = ModelParams::finite(401, 1.0, 0.5).unwrap();
        assert!((finite_g(&params, 1) - want_half).abs() < 1e-6);
    }

    #[test]
    fn large_ring_matches_quadrature_away_from_criticality() {
        // Frozen from an independent quadrature implementation.
        let want = 0.019_694_887_529_105;
        let got = infinite_g(0.5, 2.0, 3).unwrap();
        assert!((got - want).abs() < 1e-10, "infinite: {got}");
        let params = ModelParams::finite(2701, 0.5, 2.0).unwrap();
        assert!((finite_g(&params, 3) - got).abs() < 1e-8);
        // All correlators at r <= 3 agree to 1e-7 for lambda in {0.5, 2}.
        for lambda in [0.5, 2.0] {
            let fin = correlators(&ModelParams::finite(2701, 0.5, lambda).unwrap(), 3).unwrap();
            let inf = correlators(&ModelParams::infinite(0.5, lambda).unwrap(), 3).unwrap();
            assert!((fin.mz - inf.mz).abs() < 1e-7);
            for r in 1..=3 {
                assert!((fin.gxx(r) - inf.gxx(r)).abs() < 1e-7);
                assert!((fin.gyy(r) - inf.gyy(r)).abs() < 1e-7);
                assert!((fin.gzz(r) - inf.gzz(r)).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn magnetization_stays_nonzero_at_strong_coupling() {
        // Frozen from an independent quadrature implementation.
        let g = g_function(&ModelParams::infinite(1.0, 5.0).unwrap(), 1).unwrap();
        let mz = magnetization(&g).unwrap();
        assert!((mz - 0.100_507_660_184_555).abs() < 1e-9);
        assert!(mz > 0.0 && mz < 1.0);
    }

    #[test]
    fn zz_correlator_clusters_at_long_distance() {
        // Off criticality <sz sz>(r) -> <sz>^2; r = 50 is deep in the tail.
        let params = ModelParams::infinite(1.0, 1.2).unwrap();
        let g = g_function(&params, 50).unwrap();
        let mz = magnetization(&g).unwrap();
        let zz = two_point(&g, Axis::Z, 50).unwrap();
        assert!((zz - mz * mz).abs() < 1e-3);
        // The approach is far tighter than the contractual tolerance.
        assert!((zz - mz * mz).abs() < 1e-9);
    }

    #[test]
    fn quadrature_tolerance_halving_is_consistent() {
        for n in [0, 1, 3] {
            let coarse = infinite_g_with_tol(0.75, 1.05, n, 1e-11).unwrap();
            let fine = infinite_g_with_tol(0.75, 1.05, n, 5e-12).unwrap();
            assert!((coarse - fine).abs() < 1e-11);
        }
    }

    #[test]
    fn g_window_and_missing_entries() {
        let params = ModelParams::finite(41, 1.0, 1.0).unwrap();
        let g = g_function(&params, 2).unwrap();
        assert_eq!(g.window(), (-3, 3));
        assert!(two_point(&g, Axis::X, 3).is_ok()); // window is one wider than r_max
        assert_eq!(
            two_point(&g, Axis::X, 5),
            Err(FermionError::MissingGEntry { n: -4 })
        );
        assert_eq!(
            two_point(&g, Axis::Z, 4),
            Err(FermionError::MissingGEntry { n: 4 })
        );
    }

    #[test]
    fn r_max_guards() {
        let params = ModelParams::finite(11, 1.0, 1.0).unwrap();
        assert!(matches!(
            correlators(&params, 6),
            Err(FermionError::RMaxTooLarge {
                r_max: 6,
                n: Some(11)
            })
        ));
        assert!(matches!(
            correlators(&params, 0),
            Err(FermionError::RMaxTooLarge { r_max: 0, n: None })
        ));
        assert!(correlators(&params, 5).is_ok());
    }

    #[test]
    fn g_function_matches_pointwise_finite_g() {
        // The windowed angle-addition march must agree with direct sums.
        let params = ModelParams::finite(41, 0.5, 1.1).unwrap();
        let g = g_function(&params, 3).unwrap();
        for n in -4..=4 {
            assert!((g.get(n).unwrap() - finite_g(&params, n)).abs() < 1e-13);
        }
    }

    #[test]
    fn energy_density_matches_correlator_identity() {
        // Differentiating the ground energy in the couplings ties the energy
        // density to the bond correlators and the magnetization:
        //   e = -lambda [ (1-gamma)/2 gxx(1) + (1+gamma)/2 gyy(1) ] - mz.
        // At gamma = 1, lambda = 1 this is exactly -4/pi.
        let e_critical = ground_energy(2701, 1.0, 1.0) / 2701.0;
        assert!((e_critical + 4.0 / PI).abs() < 1e-6);
        for (gamma, lambda) in [(1.0, 0.7), (0.5, 1.3), (0.25, 1.0)] {
            let n = 1601u32;
            let e = ground_energy(n, gamma, lambda) / f64::from(n);
            let set = correlators(&ModelParams::finite(n, gamma, lambda).unwrap(), 1).unwrap();
            let e_corr = -lambda
                * (0.5 * (1.0 - gamma) * set.gxx(1) + 0.5 * (1.0 + gamma) * set.gyy(1))
                - set.mz;
            assert!(
                (e - e_corr).abs() < 1e-5,
                "gamma={gamma} lambda={lambda}: {e} vs {e_corr}"
            );
        }
    }
}

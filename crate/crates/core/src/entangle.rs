//! Two-site reduced density matrices and Wootters concurrence.
//!
//! Reality and parity conservation of the Hamiltonian, together with
//! translation invariance, force the two-site reduced density matrix into a
//! real symmetric "X" structure in the ordered basis
//! {up-up, up-down, down-up, down-down}:
//!
//! ```text
//!         | r11   0    0   r14 |
//!   rho = |  0   r22  r23   0  |        r22 = r33
//!         |  0   r23  r33   0  |
//!         | r14   0    0   r44 |
//! ```
//!
//! with entries fixed by the magnetization and the three diagonal two-point
//! functions. The concurrence is computed from the spectrum of
//! `rho * rho_tilde` (spin-flipped partner) through the symmetrized product
//! `sqrt(rho_tilde) rho sqrt(rho_tilde)`, which has the same eigenvalues but
//! is manifestly symmetric positive semidefinite; a closed form valid for
//! this structure is provided as an independent cross-check.

use alloc::vec::Vec;
use core::fmt;

use crate::fermion::{self, CorrelatorSet, FermionError};
use crate::model::{ModelParams, ParamError, Size};
use crate::numeric::linalg::sym_eigen;

/// A reduced density matrix below this eigenvalue floor signals inconsistent
/// correlator input rather than numerical noise.
const PSD_GATE: f64 = -1e-8;

/// Eigenvalues of the flip product below this floor are a numerical
/// inconsistency; magnitudes at or above it are clipped to zero.
const SPECTRUM_GATE: f64 = -1e-10;

/// Tolerance for the structural zero pattern and the `r22 = r33` equality.
const STRUCTURE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EntangleError {
    /// Trace differs from 1 by more than 1e-12.
    TraceNotOne { trace: f64 },
    /// An entry pair violates symmetry by more than 1e-12.
    NotSymmetric { row: usize, col: usize },
    /// An entry required to vanish by parity/reality exceeds the tolerance,
    /// or the two antiparallel diagonal entries differ.
    StructureViolation { row: usize, col: usize },
    /// An eigenvalue is below the -1e-8 gate: the input correlators are not
    /// a consistent quantum state.
    NotPositive { eigenvalue: f64 },
    /// An eigenvalue of the flip product fell below -1e-10.
    SpectrumInconsistent { eigenvalue: f64 },
    /// Correlator evaluation failed.
    Fermion(FermionError),
    /// A grid coupling violates the model's parameter constraints.
    Param(ParamError),
    /// Lambda grid must be strictly increasing.
    GridNotIncreasing { index: usize },
}

impl fmt::Display for EntangleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntangleError::TraceNotOne { trace } => {
                write!(f, "density matrix trace {trace} differs from 1")
            }
            EntangleError::NotSymmetric { row, col } => {
                write!(f, "density matrix not symmetric at ({row}, {col})")
            }
            EntangleError::StructureViolation { row, col } => {
                write!(
                    f,
                    "density matrix violates the X structure at ({row}, {col})"
                )
            }
            EntangleError::NotPositive { eigenvalue } => {
                write!(
                    f,
                    "density matrix eigenvalue {eigenvalue:e} below the PSD gate"
                )
            }
            EntangleError::SpectrumInconsistent { eigenvalue } => {
                write!(f, "flip-product eigenvalue {eigenvalue:e} below -1e-10")
            }
            EntangleError::Fermion(e) => write!(f, "{e}"),
            EntangleError::Param(e) => write!(f, "{e}"),
            EntangleError::GridNotIncreasing { index } => {
                write!(f, "lambda grid not strictly increasing at index {index}")
            }
        }
    }
}

impl core::error::Error for EntangleError {}

impl From<FermionError> for EntangleError {
    fn from(e: FermionError) -> Self {
        EntangleError::Fermion(e)
    }
}

impl From<ParamError> for EntangleError {
    fn from(e: ParamError) -> Self {
        EntangleError::Param(e)
    }
}

/// Validated two-site reduced density matrix (row-major 4x4, basis
/// {up-up, up-down, down-up, down-down}).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoSiteState {
    rho: [f64; 16],
}

impl TwoSiteState {
    /// Validates trace, symmetry, the X zero pattern, `r22 = r33`, and
    /// positive semidefiniteness (to the -1e-8 gate).
    pub fn new(rho: [f64; 16]) -> Result<Self, EntangleError> {
        let trace = rho[0] + rho[5] + rho[10] + rho[15];
        if libm::fabs(trace - 1.0) > 1e-12 {
            return Err(EntangleError::TraceNotOne { trace });
        }
        for r in 0..4 {
            for c in r + 1..4 {
                if libm::fabs(rho[r * 4 + c] - rho[c * 4 + r]) > 1e-12 {
                    return Err(EntangleError::NotSymmetric { row: r, col: c });
                }
            }
        }
        // Everything off the diagonal and off the two X couplings must vanish.
        for (r, c) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
            if libm::fabs(rho[r * 4 + c]) > STRUCTURE_TOL {
                return Err(EntangleError::StructureViolation { row: r, col: c });
            }
        }
        if libm::fabs(rho[5] - rho[10]) > STRUCTURE_TOL {
            return Err(EntangleError::StructureViolation { row: 1, col: 1 });
        }
        let (vals, _) = sym_eigen(&rho, 4);
        if vals[0] < PSD_GATE {
            return Err(EntangleError::NotPositive {
                eigenvalue: vals[0],
            });
        }
        Ok(TwoSiteState { rho })
    }

    pub fn matrix(&self) -> &[f64; 16] {
        &self.rho
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.rho[row * 4 + col]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let (vals, _) = sym_eigen(&self.rho, 4);
        [vals[0], vals[1], vals[2], vals[3]]
    }
}

/// Builds the two-site state at separation r from a correlator bundle:
///
/// ```text
/// r11 = (1 + 2 mz + gzz)/4      r44 = (1 - 2 mz + gzz)/4
/// r22 = r33 = (1 - gzz)/4
/// r23 = (gxx + gyy)/4           r14 = (gxx - gyy)/4
/// ```
pub fn assemble_rdm(corr: &CorrelatorSet, r: u32) -> Result<TwoSiteState, EntangleError> {
    assemble_parts(corr.mz, corr.gxx(r), corr.gyy(r), corr.gzz(r))
}

/// [`assemble_rdm`] from bare correlator values.
pub fn assemble_parts(
    mz: f64,
    gxx: f64,
    gyy: f64,
    gzz: f64,
) -> Result<TwoSiteState, EntangleError> {
    let mut rho = [0.0; 16];
    rho[0] = (1.0 + 2.0 * mz + gzz) / 4.0;
    rho[15] = (1.0 - 2.0 * mz + gzz) / 4.0;
    rho[5] = (1.0 - gzz) / 4.0;
    rho[10] = rho[5];
    rho[6] = (gxx + gyy) / 4.0;
    rho[9] = rho[6];
    rho[3] = (gxx - gyy) / 4.0;
    rho[12] = rho[3];
    TwoSiteState::new(rho)
}

/// Spin-flipped partner `(sy ⊗ sy) rho* (sy ⊗ sy)`; for a real rho the
/// conjugation is trivial and the operation permutes entries with signs:
/// `rho_tilde[i][j] = s_i s_j rho[3-i][3-j]` with `s = (-1, 1, 1, -1)`.
pub fn spin_flip(state: &TwoSiteState) -> [f64; 16] {
    flip_matrix(state.matrix())
}

fn flip_matrix(rho: &[f64; 16]) -> [f64; 16] {
    const S: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];
    let mut out = [0.0; 16];
    for i in 0..4 {
        for j in 0..4 {
            out[i * 4 + j] = S[i] * S[j] * rho[(3 - i) * 4 + (3 - j)];
        }
    }
    out
}

/// Wootters concurrence `max(0, r1 - r2 - r3 - r4)` with `r_i` the descending
/// square roots of the eigenvalues of `rho * rho_tilde`.
///
/// The eigenvalues are obtained from the symmetric equivalent
/// `sqrt(rho_tilde) rho sqrt(rho_tilde)`; they are mathematically guaranteed
/// real and non-negative, so magnitudes below 1e-10 are clipped and anything
/// more negative is reported as an inconsistency.
pub fn concurrence(state: &TwoSiteState) -> Result<f64, EntangleError> {
    let tilde = spin_flip(state);
    // sqrt(rho_tilde) via eigendecomposition, clipping the tiny negative
    // eigenvalues a valid state is allowed to carry.
    let (tvals, tvecs) = sym_eigen(&tilde, 4);
    let mut sqrt_tilde = [0.0; 16];
    for k in 0..4 {
        let w = libm::sqrt(tvals[k].max(0.0));
        for i in 0..4 {
            for j in 0..4 {
                sqrt_tilde[i * 4 + j] += tvecs[i * 4 + k] * w * tvecs[j * 4 + k];
            }
        }
    }
    let prod = mat4_mul(&mat4_mul(&sqrt_tilde, state.matrix()), &sqrt_tilde);
    // Symmetrize away the last bits of rounding before the eigensolve.
    let mut sym = [0.0; 16];
    for i in 0..4 {
        for j in 0..4 {
            sym[i * 4 + j] = 0.5 * (prod[i * 4 + j] + prod[j * 4 + i]);
        }
    }
    let (vals, _) = sym_eigen(&sym, 4);
    if vals[0] < SPECTRUM_GATE {
        return Err(EntangleError::SpectrumInconsistent {
            eigenvalue: vals[0],
        });
    }
    let mut roots = [0.0; 4];
    for (slot, v) in roots.iter_mut().zip(&vals) {
        *slot = libm::sqrt(v.max(0.0));
    }
    // Ascending from the eigensolver: the largest root is the last.
    let c = roots[3] - roots[2] - roots[1] - roots[0];
    Ok(if c > 0.0 { c } else { 0.0 })
}

/// Closed-form concurrence for the X structure:
/// `2 max(0, |r14| - sqrt(r22 r33), |r23| - sqrt(r11 r44))`.
///
/// Exact for every state this crate assembles; kept as an independent route
/// to cross-check the spectral computation.
pub fn concurrence_x_structure(state: &TwoSiteState) -> f64 {
    let rho = state.matrix();
    let a = libm::fabs(rho[3]) - libm::sqrt((rho[5] * rho[10]).max(0.0));
    let b = libm::fabs(rho[6]) - libm::sqrt((rho[0] * rho[15]).max(0.0));
    2.0 * a.max(b).max(0.0)
}

fn mat4_mul(a: &[f64; 16], b: &[f64; 16]) -> [f64; 16] {
    let mut out = [0.0; 16];
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i * 4 + k];
            if aik != 0.0 {
                for j in 0..4 {
                    out[i * 4 + j] += aik * b[k * 4 + j];
                }
            }
        }
    }
    out
}

/// Concurrence as a function of separation and coupling for one (size, gamma).
#[derive(Clone, Debug)]
pub struct ConcurrenceCurve {
    pub size: Size,
    pub gamma: f64,
    pub lambda_grid: Vec<f64>,
    /// `values[r - 1][grid_index]` = C(r) at `lambda_grid[grid_index]`.
    values: Vec<Vec<f64>>,
}

impl ConcurrenceCurve {
    pub fn r_max(&self) -> u32 {
        self.values.len() as u32
    }

    /// C(r) across the grid.
    pub fn c(&self, r: u32) -> &[f64] {
        &self.values[(r - 1) as usize]
    }
}

/// C(r) for r = 1..=r_max at every grid coupling; each grid point is an
/// independent exact evaluation.
pub fn concurrence_profile(
    params: &ModelParams,
    r_max: u32,
    lambda_grid: &[f64],
) -> Result<ConcurrenceCurve, EntangleError> {
    for (i, w) in lambda_grid.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(EntangleError::GridNotIncreasing { index: i + 1 });
        }
    }
    let mut values = alloc::vec![Vec::with_capacity(lambda_grid.len()); r_max as usize];
    for &lambda in lambda_grid {
        let point = params.with_lambda(lambda)?;
        let corr = fermion::correlators(&point, r_max)?;
        for r in 1..=r_max {
            let c = concurrence(&assemble_rdm(&corr, r)?)?;
            values[(r - 1) as usize].push(c);
        }
    }
    Ok(ConcurrenceCurve {
        size: params.size(),
        gamma: params.gamma(),
        lambda_grid: lambda_grid.to_vec(),
        values,
    })
}

/// Largest separation at which the concurrence exceeds `threshold` anywhere
/// on the grid; 0 when even nearest neighbors stay below it.
///
/// The probe window starts at the default r_max for the anisotropy and is
/// widened until the largest probed separation is conclusively dead, so the
/// reported range is never an artifact of a too-small window.
pub fn entanglement_range(
    params: &ModelParams,
    lambda_grid: &[f64],
    threshold: f64,
) -> Result<u32, EntangleError> {
    let cap = range_cap(params);
    let mut r_max = fermion::default_r_max(params.gamma()).min(cap);
    loop {
        let curve = concurrence_profile(params, r_max, lambda_grid)?;
        let mut range = 0;
        for r in 1..=r_max {
            let peak = curve.c(r).iter().cloned().fold(0.0, f64::max);
            if peak > threshold {
                range = r;
            }
        }
        if range < r_max || r_max == cap {
            return Ok(range);
        }
        r_max = (2 * r_max).min(cap);
    }
}

/// Default numerical zero for "concurrence different from zero": far above
/// quadrature and derivative noise, far below any published nonzero value.
pub const RANGE_THRESHOLD: f64 = 1e-8;

fn range_cap(params: &ModelParams) -> u32 {
    match params.size() {
        Size::FiniteOdd(n) => (n - 1) / 2,
        Size::Infinite => 64,
    }
}

/// Total concurrence stored in the chain at one coupling: sum of C(r) until
/// the tail is conclusively zero (three consecutive exact zeros; beyond the
/// entanglement range the clipped concurrence vanishes identically, so the
/// neglected tail contributes nothing).
pub fn total_concurrence(params: &ModelParams, lambda: f64) -> Result<f64, EntangleError> {
    let point = params.with_lambda(lambda)?;
    let cap = range_cap(&point);
    let mut total = 0.0;
    let mut consecutive_zero = 0u32;
    let mut r = 1u32;
    // One correlator bundle sized generously up front, regrown on demand.
    let mut r_max = fermion::default_r_max(point.gamma()).min(cap);
    let mut corr = fermion::correlators(&point, r_max)?;
    while r <= cap {
        if r > r_max {
            r_max = (2 * r_max).min(cap);
            corr = fermion::correlators(&point, r_max)?;
        }
        let c = concurrence(&assemble_rdm(&corr, r)?)?;
        total += c;
        if c == 0.0 {
            consecutive_zero += 1;
            if consecutive_zero >= 3 {
                break;
            }
        } else {
            consecutive_zero = 0;
        }
        r += 1;
    }
    Ok(total)
}

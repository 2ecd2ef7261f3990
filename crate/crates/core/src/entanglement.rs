//! Entanglement diagnostics for two-qubit kets and rank-2 projectors.
//!
//! Separability of two-qubit operators is decided by the positivity of the
//! partial transpose, which is exact in `2 ⊗ 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, norm, partial_transpose, Ket2, Mat4};
use crate::states::{coefficient_matrix, BipartiteKet, OrthonormalBasis};

/// Concurrence below this value counts as a product state.
pub const PRODUCT_TOL: f64 = 1e-9;
/// A partial-transpose eigenvalue at or above `-SEPARABILITY_TOL` counts as non-negative.
pub const SEPARABILITY_TOL: f64 = 1e-9;
/// Most negative eigenvalue tolerated for a PSD input.
pub const PSD_TOL: f64 = 1e-10;

/// `C(ψ) = |det Ψ|` for `|ψ> = (I ⊗ Ψ)|φ+>`.
pub fn concurrence(k: &BipartiteKet) -> f64 {
    coefficient_matrix(k).det().norm().min(1.0)
}

pub fn is_product(k: &BipartiteKet) -> bool {
    concurrence(k) < PRODUCT_TOL
}

/// Conditional decomposition `|ψ> = n0 |0>|η0> + n1 |1>|η1>` along Alice's
/// computational basis.
#[derive(Debug, Clone, Copy)]
pub struct ProductDecomposition {
    pub eta0: Ket2,
    pub eta1: Ket2,
    pub n0: f64,
    pub n1: f64,
    /// `|<η0|η1>|`, or 1 when one branch vanishes.
    pub overlap: f64,
    pub is_product: bool,
}

impl ProductDecomposition {
    pub fn reconstruct(&self) -> [crate::linalg::C64; 4] {
        let e0 = self.eta0.amplitudes();
        let e1 = self.eta1.amplitudes();
        [
            e0[0] * self.n0,
            e0[1] * self.n0,
            e1[0] * self.n1,
            e1[1] * self.n1,
        ]
    }
}

const BRANCH_TOL: f64 = 1e-9;

pub fn product_decomposition(k: &BipartiteKet) -> ProductDecomposition {
    let c = k.amplitudes();
    let b0 = [c[0], c[1]];
    let b1 = [c[2], c[3]];
    let n0 = norm(&b0);
    let n1 = norm(&b1);
    let eta = |b: [crate::linalg::C64; 2], n: f64| {
        if n < 1e-300 {
            Ket2::zero()
        } else {
            Ket2::normalized(b[0], b[1]).unwrap_or_else(|_| Ket2::zero())
        }
    };
    let eta0 = eta(b0, n0);
    let eta1 = eta(b1, n1);
    let vanishing = n0 < BRANCH_TOL || n1 < BRANCH_TOL;
    let overlap = if vanishing {
        1.0
    } else {
        eta0.inner(&eta1).norm()
    };
    ProductDecomposition {
        eta0,
        eta1,
        n0,
        n1,
        overlap,
        is_product: vanishing || overlap > 1.0 - BRANCH_TOL,
    }
}

/// Which of the two complementary rank-2 projectors to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectorSide {
    /// `P_ij = |ψi><ψi| + |ψj><ψj|`
    Span,
    /// `I - P_ij`
    Complement,
}

pub fn pair_projector(
    b: &OrthonormalBasis,
    i: usize,
    j: usize,
    side: ProjectorSide,
) -> Result<Mat4> {
    if i == j || i > 3 || j > 3 {
        return Err(Error::InvalidPair { i, j });
    }
    let p = b.state(i).projector() + b.state(j).projector();
    Ok(match side {
        ProjectorSide::Span => p,
        ProjectorSide::Complement => Mat4::identity() - p,
    })
}

/// PPT verdict for a two-qubit PSD operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityCertificate {
    pub min_pt_eigenvalue: f64,
    pub is_separable: bool,
    pub tolerance: f64,
}

impl SeparabilityCertificate {
    /// Negative eigenvalue within a decade either side of the tolerance, where the
    /// verdict depends on rounding. Exact zeros (typical for separable
    /// projectors) are not flagged.
    pub fn near_boundary(&self) -> bool {
        self.min_pt_eigenvalue < -0.1 * self.tolerance
            && self.min_pt_eigenvalue >= -10.0 * self.tolerance
    }
}

pub fn separability_certificate(m: &Mat4) -> Result<SeparabilityCertificate> {
    let spectrum = hermitian_eigenvalues(m)?;
    if spectrum[0] < -PSD_TOL {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: spectrum[0],
        });
    }
    let min_pt_eigenvalue = hermitian_eigenvalues(&partial_transpose(m))?[0];
    Ok(SeparabilityCertificate {
        min_pt_eigenvalue,
        is_separable: min_pt_eigenvalue >= -SEPARABILITY_TOL,
        tolerance: SEPARABILITY_TOL,
    })
}

/// Closed-form partial-transpose spectrum `(e1, e2, e3, e4)` of `P_12` (and `P_34`)
/// for `A_γ^[α,β]`; independent of `γ`.
pub fn pt_spectrum_p12_closed(alpha: f64, beta: f64) -> [f64; 4] {
    let d = (4.0 * alpha).cos() - (4.0 * beta).cos();
    let r1 = std::f64::consts::SQRT_2 * (2.0 + d).max(0.0).sqrt();
    let r3 = std::f64::consts::SQRT_2 * (2.0 - d).max(0.0).sqrt();
    [
        0.25 * (2.0 - r1),
        0.25 * (2.0 + r1),
        0.25 * (2.0 - r3),
        0.25 * (2.0 + r3),
    ]
}

/// Closed-form partial-transpose spectrum `(e1, e2, e3, e4)` shared by the cross
/// projectors `P_13, P_14, P_23, P_24` of `A_{π/4}^[α,β]`. Only valid at `γ = π/4`.
pub fn pt_spectrum_cross_closed(alpha: f64, beta: f64) -> [f64; 4] {
    let (s2a, s2b) = ((2.0 * alpha).sin(), (2.0 * beta).sin());
    let sum = s2a + s2b;
    let bracket = sum * sum * (18.0 - 12.0 * s2a * s2b - (4.0 * alpha).cos() - (4.0 * beta).cos());
    let inner = 2.0 * std::f64::consts::SQRT_2 * bracket.max(0.0).sqrt();
    let lo = (16.0 - inner).max(0.0).sqrt();
    let hi = (16.0 + inner).sqrt();
    [
        (4.0 - lo) / 8.0,
        (4.0 + lo) / 8.0,
        (4.0 - hi) / 8.0,
        (4.0 + hi) / 8.0,
    ]
}

//! Dense complex linear algebra for dimensions 2 and 4.
//!
//! Two-qubit amplitudes use the index convention `c[2i + j]` for `|i>_A |j>_B`,
//! so `|00>, |01>, |10>, |11>` map to indices 0, 1, 2, 3. Every routine in the
//! crate relies on this ordering.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::BipartiteKet;

pub type C64 = Complex<f64>;

/// Maximum `|M - M^dagger|` entry accepted by the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Amplitudes at or below this modulus are skipped when fixing the global phase.
pub const PHASE_THRESHOLD: f64 = 1e-9;
const NORM_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 64;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn norm<const N: usize>(v: &[C64; N]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<u|v>`, antilinear in the first argument.
pub fn inner<const N: usize>(u: &[C64; N], v: &[C64; N]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Raw Kronecker product of two 2-vectors; bilinear, no normalization.
pub fn kron2(a: &[C64; 2], b: &[C64; 2]) -> [C64; 4] {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

/// Phase of the first amplitude whose modulus exceeds [`PHASE_THRESHOLD`].
pub fn leading_phase(v: &[C64]) -> f64 {
    v.iter()
        .find(|z| z.norm() > PHASE_THRESHOLD)
        .map(|z| z.arg())
        .unwrap_or(0.0)
}

/// Rotates `v` so its leading amplitude is real and positive; returns the removed phase.
pub fn canonicalize_phase(v: &mut [C64]) -> f64 {
    let phase = leading_phase(v);
    if phase != 0.0 {
        let rot = C64::from_polar(1.0, -phase);
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
    phase
}

/// Normalized single-qubit ket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket2([C64; 2]);

impl Ket2 {
    /// Accepts amplitudes that are already normalized.
    pub fn new(a: C64, b: C64) -> Result<Self> {
        let n = norm(&[a, b]);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(Ket2([a / n, b / n]))
    }

    pub fn normalized(a: C64, b: C64) -> Result<Self> {
        let n = norm(&[a, b]);
        if n < 1e-15 {
            return Err(Error::ZeroVector);
        }
        Ok(Ket2([a / n, b / n]))
    }

    pub fn zero() -> Self {
        Ket2([real(1.0), real(0.0)])
    }

    pub fn one() -> Self {
        Ket2([real(0.0), real(1.0)])
    }

    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Ket2([real(h), real(h)])
    }

    pub fn minus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Ket2([real(h), real(-h)])
    }

    /// Ket with Bloch vector `r` (need not be normalized; the zero vector maps to `|0>`).
    pub fn from_bloch(r: [f64; 3]) -> Self {
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if len < 1e-300 {
            return Ket2::zero();
        }
        let cos_t = (r[2] / len).clamp(-1.0, 1.0);
        let half = 0.5 * cos_t.acos();
        let phi = r[1].atan2(r[0]);
        Ket2([real(half.cos()), C64::from_polar(half.sin(), phi)])
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        self.0
    }

    pub fn inner(&self, other: &Ket2) -> C64 {
        inner(&self.0, &other.0)
    }

    /// The orthonormal partner `(-b*, a*)`.
    pub fn orthogonal(&self) -> Ket2 {
        Ket2([-self.0[1].conj(), self.0[0].conj()])
    }
}

/// 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([[real(1.0), real(0.0)], [real(0.0), real(1.0)]])
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn transpose(&self) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn conj(&self) -> Mat2 {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[0][1].conj()],
            [m[1][0].conj(), m[1][1].conj()],
        ])
    }

    pub fn scale(&self, s: C64) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    /// `None` when `|det| < 1e-14`.
    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d.norm() < 1e-14 {
            return None;
        }
        let m = &self.0;
        Some(Mat2([
            [m[1][1] / d, -m[0][1] / d],
            [-m[1][0] / d, m[0][0] / d],
        ]))
    }

    /// Both eigenvalues from the characteristic quadratic.
    pub fn eigenvalues(&self) -> [C64; 2] {
        let half_tr = self.trace() * 0.5;
        let disc = (half_tr * half_tr - self.det()).sqrt();
        [half_tr + disc, half_tr - disc]
    }

    pub fn apply(&self, v: &[C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let mut out = [[C64::default(); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = self.0[r][0] * rhs.0[0][c] + self.0[r][1] * rhs.0[1][c];
            }
        }
        Mat2(out)
    }
}

/// 4x4 complex matrix, row-major, rows and columns indexed by `2i + j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4(pub [[C64; 4]; 4]);

impl Mat4 {
    pub fn zeros() -> Self {
        Mat4([[C64::default(); 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for k in 0..4 {
            m.0[k][k] = real(1.0);
        }
        m
    }

    pub fn diag(d: [f64; 4]) -> Self {
        let mut m = Self::zeros();
        for (k, x) in d.into_iter().enumerate() {
            m.0[k][k] = real(x);
        }
        m
    }

    /// `|u><v|`.
    pub fn outer(u: &[C64; 4], v: &[C64; 4]) -> Self {
        Mat4(u.map(|ur| v.map(|vc| ur * vc.conj())))
    }

    pub fn projector(v: &[C64; 4]) -> Self {
        Self::outer(v, v)
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[r][c]
    }

    pub fn adjoint(&self) -> Mat4 {
        let mut m = Self::zeros();
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] = self.0[c][r].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Mat4 {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|z| *z *= s);
        m
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|k| self.0[k][k]).sum()
    }

    pub fn apply(&self, v: &[C64; 4]) -> [C64; 4] {
        let mut out = [C64::default(); 4];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|c| self.0[r][c] * v[c]).sum();
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Mat4) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() < HERMITIAN_TOL
    }
}

impl Add for Mat4 {
    type Output = Mat4;
    fn add(mut self, rhs: Mat4) -> Mat4 {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a += b;
        }
        self
    }
}

impl Sub for Mat4 {
    type Output = Mat4;
    fn sub(mut self, rhs: Mat4) -> Mat4 {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a -= b;
        }
        self
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        let mut out = Mat4::zeros();
        for r in 0..4 {
            for c in 0..4 {
                out.0[r][c] = (0..4).map(|k| self.0[r][k] * rhs.0[k][c]).sum();
            }
        }
        out
    }
}

/// `a ⊗ b` as a normalized two-qubit ket.
pub fn tensor(a: &Ket2, b: &Ket2) -> BipartiteKet {
    BipartiteKet::from_raw(kron2(&a.0, &b.0))
}

/// Transpose on the second (B) tensor factor: `((i,j),(k,l)) -> ((i,l),(k,j))`.
pub fn partial_transpose(m: &Mat4) -> Mat4 {
    let mut out = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.0[2 * i + l][2 * k + j] = m.0[2 * i + j][2 * k + l];
                }
            }
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian 4x4 matrix.
#[derive(Debug, Clone, Copy)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: [f64; 4],
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: Mat4,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> [C64; 4] {
        [
            self.vectors.0[0][k],
            self.vectors.0[1][k],
            self.vectors.0[2][k],
            self.vectors.0[3][k],
        ]
    }
}

/// Cyclic complex Jacobi diagonalization.
///
/// Each rotation first removes the phase of `a[p][q]` with a diagonal unitary and
/// then applies the classical real Jacobi rotation that zeroes it.
pub fn hermitian_eigen(m: &Mat4) -> Result<HermitianEigen> {
    let deviation = m.hermitian_deviation();
    if deviation >= HERMITIAN_TOL || m.0.iter().flatten().any(|z| !z.is_finite()) {
        return Err(Error::NotHermitian { deviation });
    }
    let mut a = (*m + m.adjoint()).scale(real(0.5));
    let mut v = Mat4::identity();
    let scale =
        a.0.iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
    let target = 1e-15 * scale.max(1e-300);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..4)
            .flat_map(|p| ((p + 1)..4).map(move |q| (p, q)))
            .map(|(p, q)| a.0[p][q].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..4 {
            for q in (p + 1)..4 {
                let apq = a.0[p][q];
                let g = apq.norm();
                if g <= target * 1e-3 {
                    continue;
                }
                let phase = C64::from_polar(1.0, -apq.arg());
                let app = a.0[p][p].re;
                let aqq = a.0[q][q].re;
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let mut j = Mat4::identity();
                j.0[p][p] = real(c);
                j.0[p][q] = real(s);
                j.0[q][p] = phase * (-s);
                j.0[q][q] = phase * c;
                a = j.adjoint() * a * j;
                a.0[p][q] = C64::default();
                a.0[q][p] = C64::default();
                v = v * j;
            }
        }
        for k in 0..4 {
            a.0[k][k].im = 0.0;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&x, &y| a.0[x][x].re.total_cmp(&a.0[y][y].re));
    let mut values = [0.0; 4];
    let mut vectors = Mat4::zeros();
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = a.0[src][src].re;
        for r in 0..4 {
            vectors.0[r][dst] = v.0[r][src];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Ascending real eigenvalues of a Hermitian 4x4 matrix.
pub fn hermitian_eigenvalues(m: &Mat4) -> Result<[f64; 4]> {
    hermitian_eigen(m).map(|e| e.values)
}

/// Serialized form of a [`Ket2`]: two `[re, im]` pairs.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(transparent)]
pub(crate) struct Ket2Repr(pub [[f64; 2]; 2]);

impl Serialize for Ket2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Ket2Repr([[self.0[0].re, self.0[0].im], [self.0[1].re, self.0[1].im]]).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ket2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let Ket2Repr(r) = Ket2Repr::deserialize(d)?;
        Ket2::new(c64(r[0][0], r[0][1]), c64(r[1][0], r[1][1])).map_err(serde::de::Error::custom)
    }
}

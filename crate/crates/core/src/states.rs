//! Two-qubit kets, orthonormal bases and the two parametric basis families.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, canonicalize_phase, inner, norm, real, Mat2, Mat4, C64};

const NORM_TOL: f64 = 1e-10;
/// Maximum `|<psi_i|psi_j> - delta_ij|` accepted by [`validate_basis`].
pub const ORTHONORMAL_TOL: f64 = 1e-10;
/// Slack allowed beyond `[0, pi/2]` before an angle is rejected; in-slack values are clamped.
const ANGLE_SLACK: f64 = 1e-9;

/// Normalized two-qubit pure state stored with a canonical global phase.
///
/// The first amplitude with modulus above `1e-9` is real and positive. The phase
/// removed during canonicalization is kept in `phase`, so
/// `raw = e^{i phase} * amplitudes`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BipartiteKet {
    amps: [C64; 4],
    phase: f64,
}

impl BipartiteKet {
    /// Accepts amplitudes whose norm is 1 within `1e-10`.
    pub fn new(amps: [C64; 4]) -> Result<Self> {
        let n = norm(&amps);
        if (n - 1.0).abs() > NORM_TOL || !n.is_finite() {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(Self::from_raw(amps))
    }

    pub fn normalized(amps: [C64; 4]) -> Result<Self> {
        let n = norm(&amps);
        if n < 1e-15 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self::from_raw(amps))
    }

    /// Renormalizes and canonicalizes; the caller guarantees a nonzero finite vector.
    pub(crate) fn from_raw(mut amps: [C64; 4]) -> Self {
        let n = norm(&amps);
        amps.iter_mut().for_each(|z| *z /= n);
        let phase = canonicalize_phase(&mut amps);
        BipartiteKet { amps, phase }
    }

    pub fn from_real(amps: [f64; 4]) -> Result<Self> {
        Self::new(amps.map(real))
    }

    /// Computational basis state `|i j>` with `index = 2i + j`.
    pub fn computational(index: usize) -> Self {
        let mut amps = [C64::default(); 4];
        amps[index] = real(1.0);
        BipartiteKet { amps, phase: 0.0 }
    }

    /// Canonical-phase amplitudes.
    pub fn amplitudes(&self) -> [C64; 4] {
        self.amps
    }

    /// Global phase removed during canonicalization.
    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// Amplitudes with the recorded global phase restored.
    pub fn raw_amplitudes(&self) -> [C64; 4] {
        let rot = C64::from_polar(1.0, self.phase);
        self.amps.map(|z| z * rot)
    }

    pub fn inner(&self, other: &BipartiteKet) -> C64 {
        inner(&self.amps, &other.amps)
    }

    pub fn projector(&self) -> Mat4 {
        Mat4::projector(&self.amps)
    }

    /// Amplitude matrix `M[i][j] = c[2i + j]` (rows: Alice, columns: Bob).
    pub fn amplitude_matrix(&self) -> Mat2 {
        let c = &self.amps;
        Mat2([[c[0], c[1]], [c[2], c[3]]])
    }

    /// `(U_A ⊗ U_B)|k>`.
    pub fn apply_local(&self, ua: &Mat2, ub: &Mat2) -> BipartiteKet {
        let m = *ua * self.amplitude_matrix() * ub.transpose();
        Self::from_raw(
            [m.0[0][0], m.0[0][1], m.0[1][0], m.0[1][1]]
                .map(|z| z * C64::from_polar(1.0, self.phase)),
        )
    }

    /// Equality of canonical amplitudes within `tol` (max entrywise modulus).
    pub fn approx_eq(&self, other: &BipartiteKet, tol: f64) -> bool {
        self.amps
            .iter()
            .zip(&other.amps)
            .all(|(a, b)| (a - b).norm() <= tol)
    }
}

/// Coefficient matrix `Ψ` with `|k> = (I ⊗ Ψ)|φ+>`, i.e. `Ψ[j][i] = √2 c[2i+j]`.
pub fn coefficient_matrix(k: &BipartiteKet) -> Mat2 {
    k.amplitude_matrix().transpose().scale(real(SQRT_2))
}

/// Inverse of [`coefficient_matrix`]: amplitudes of `(I ⊗ Ψ)|φ+>`.
pub fn from_coefficient_matrix(psi: &Mat2) -> [C64; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let m = &psi.0;
    [m[0][0] * s, m[1][0] * s, m[0][1] * s, m[1][1] * s]
}

/// Four pairwise orthonormal two-qubit kets; the ensemble under uniform priors.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    states: [BipartiteKet; 4],
    label: String,
}

impl OrthonormalBasis {
    pub fn states(&self) -> &[BipartiteKet; 4] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &BipartiteKet {
        &self.states[i]
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Max `|<psi_i|psi_j> - delta_ij|` over all pairs.
    pub fn gram_deviation(&self) -> f64 {
        gram_worst(&self.states).2
    }

    /// Basis whose `k`-th state is `self.state(perm[k])`.
    pub fn permuted(&self, perm: [usize; 4]) -> OrthonormalBasis {
        OrthonormalBasis {
            states: perm.map(|p| self.states[p]),
            label: format!("{}|perm{:?}", self.label, perm),
        }
    }

    /// Applies `U_A ⊗ U_B` to every state.
    pub fn apply_local(&self, ua: &Mat2, ub: &Mat2) -> OrthonormalBasis {
        OrthonormalBasis {
            states: self.states.map(|k| k.apply_local(ua, ub)),
            label: format!("{}|local", self.label),
        }
    }

    pub fn to_document(&self) -> BasisDocument {
        BasisDocument {
            schema: BASIS_SCHEMA.to_string(),
            label: self.label.clone(),
            states: self
                .states
                .map(|k| k.raw_amplitudes().map(|z| [z.re, z.im])),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("basis document serializes")
    }

    /// Parses a `basis.v1` document, or a bare 4x4 array of `[re, im]` pairs.
    pub fn from_json(text: &str) -> Result<OrthonormalBasis> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Input {
            Doc(BasisDocument),
            Bare([[[f64; 2]; 4]; 4]),
        }
        let (label, states) = match serde_json::from_str::<Input>(text)? {
            Input::Doc(doc) => {
                if doc.schema != BASIS_SCHEMA {
                    return Err(Error::Schema(format!(
                        "expected schema {BASIS_SCHEMA}, found {}",
                        doc.schema
                    )));
                }
                (doc.label, doc.states)
            }
            Input::Bare(states) => ("basis-file".to_string(), states),
        };
        let mut kets = [BipartiteKet::computational(0); 4];
        for (ket, amps) in kets.iter_mut().zip(states) {
            *ket = BipartiteKet::new(amps.map(|[re, im]| c64(re, im)))?;
        }
        validate_basis(kets, label)
    }
}

pub const BASIS_SCHEMA: &str = "basis.v1";

/// `basis.v1`: `{"schema": "basis.v1", "label": ..., "states": [4][4][re, im]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisDocument {
    pub schema: String,
    #[serde(default)]
    pub label: String,
    pub states: [[[f64; 2]; 4]; 4],
}

fn gram_worst(states: &[BipartiteKet; 4]) -> (usize, usize, f64) {
    let mut worst = (0, 0, 0.0);
    for i in 0..4 {
        for j in i..4 {
            let target = if i == j { real(1.0) } else { C64::default() };
            let dev = (states[i].inner(&states[j]) - target).norm();
            if dev > worst.2 {
                worst = (i, j, dev);
            }
        }
    }
    worst
}

/// Accepts four kets whose Gram matrix is the identity within [`ORTHONORMAL_TOL`].
///
/// On failure reports the first offending pair in row-major order.
pub fn validate_basis(
    kets: [BipartiteKet; 4],
    label: impl Into<String>,
) -> Result<OrthonormalBasis> {
    for i in 0..4 {
        for j in i..4 {
            let target = if i == j { real(1.0) } else { C64::default() };
            let deviation = (kets[i].inner(&kets[j]) - target).norm();
            if deviation >= ORTHONORMAL_TOL {
                return Err(Error::NotOrthonormal { i, j, deviation });
            }
        }
    }
    Ok(OrthonormalBasis {
        states: kets,
        label: label.into(),
    })
}

pub fn computational_basis() -> OrthonormalBasis {
    OrthonormalBasis {
        states: [0, 1, 2, 3].map(BipartiteKet::computational),
        label: "computational".to_string(),
    }
}

fn check_angle(name: &'static str, value: f64) -> Result<f64> {
    if !(-ANGLE_SLACK..=FRAC_PI_2 + ANGLE_SLACK).contains(&value) {
        return Err(Error::AngleOutOfRange { name, value });
    }
    Ok(value.clamp(0.0, FRAC_PI_2))
}

/// Angles `(alpha, beta, gamma)` of the `A_gamma^[alpha, beta]` family, each in `[0, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl FamilyParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        Ok(FamilyParams {
            alpha: check_angle("alpha", alpha)?,
            beta: check_angle("beta", beta)?,
            gamma: check_angle("gamma", gamma)?,
        })
    }
}

fn raw_phi_plus(t: f64) -> [C64; 4] {
    [real(t.sin()), real(0.0), real(0.0), real(t.cos())]
}

fn raw_phi_minus(t: f64) -> [C64; 4] {
    [real(t.cos()), real(0.0), real(0.0), real(-t.sin())]
}

fn raw_psi_plus(t: f64) -> [C64; 4] {
    [real(0.0), real(t.sin()), real(t.cos()), real(0.0)]
}

fn raw_psi_minus(t: f64) -> [C64; 4] {
    [real(0.0), real(t.cos()), real(-t.sin()), real(0.0)]
}

/// `B^[theta]`: `(φ+_θ, φ-_θ, ψ+_θ, ψ-_θ)` with
/// `φ±_θ = S|00> + C|11>, C|00> - S|11>` and `ψ±_θ = S|01> + C|10>, C|01> - S|10>`.
pub fn theta_basis(theta: f64) -> Result<OrthonormalBasis> {
    let t = check_angle("theta", theta)?;
    Ok(OrthonormalBasis {
        states: [
            raw_phi_plus(t),
            raw_phi_minus(t),
            raw_psi_plus(t),
            raw_psi_minus(t),
        ]
        .map(BipartiteKet::from_raw),
        label: format!("B[theta={t}]"),
    })
}

/// `A_γ^[α,β]`: `a1 = φ-_α`, `a2 = ψ-_β`, `a3 = S_γ φ+_α + C_γ ψ+_β`,
/// `a4 = C_γ φ+_α - S_γ ψ+_β`.
pub fn a_basis(p: &FamilyParams) -> OrthonormalBasis {
    let (sg, cg) = p.gamma.sin_cos();
    let pp = raw_phi_plus(p.alpha);
    let sp = raw_psi_plus(p.beta);
    let mut a3 = [C64::default(); 4];
    let mut a4 = [C64::default(); 4];
    for k in 0..4 {
        a3[k] = pp[k] * sg + sp[k] * cg;
        a4[k] = pp[k] * cg - sp[k] * sg;
    }
    OrthonormalBasis {
        states: [raw_phi_minus(p.alpha), raw_psi_minus(p.beta), a3, a4].map(BipartiteKet::from_raw),
        label: format!("A[alpha={},beta={},gamma={}]", p.alpha, p.beta, p.gamma),
    }
}

/// Random states, bases and local unitaries for property tests and sweeps.
pub mod random {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn gaussian(rng: &mut impl Rng) -> f64 {
        rng.sample(StandardNormal)
    }

    fn gaussian_c64(rng: &mut impl Rng) -> C64 {
        c64(gaussian(rng), gaussian(rng))
    }

    /// Haar-random two-qubit ket.
    pub fn ket(rng: &mut impl Rng) -> BipartiteKet {
        let v = [(); 4].map(|_| gaussian_c64(rng));
        BipartiteKet::from_raw(v)
    }

    pub fn qubit(rng: &mut impl Rng) -> [C64; 2] {
        let v = [gaussian_c64(rng), gaussian_c64(rng)];
        let n = norm(&v);
        v.map(|z| z / n)
    }

    pub fn product_ket(rng: &mut impl Rng) -> BipartiteKet {
        BipartiteKet::from_raw(crate::linalg::kron2(&qubit(rng), &qubit(rng)))
    }

    /// Haar-random single-qubit unitary.
    pub fn unitary2(rng: &mut impl Rng) -> Mat2 {
        let u = qubit(rng);
        let ph = C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        Mat2([[u[0], -u[1].conj() * ph], [u[1], u[0].conj() * ph]])
    }

    /// Gram-Schmidt on `seed` followed by random completion.
    pub fn complete_basis(
        rng: &mut impl Rng,
        seed: &[BipartiteKet],
        label: impl Into<String>,
    ) -> OrthonormalBasis {
        let mut out: Vec<[C64; 4]> = Vec::with_capacity(4);
        let mut candidates = seed.iter().map(|k| k.amplitudes()).collect::<Vec<_>>();
        candidates.reverse();
        while out.len() < 4 {
            let mut v = candidates
                .pop()
                .unwrap_or_else(|| [(); 4].map(|_| gaussian_c64(rng)));
            // two passes of Gram-Schmidt for numerical orthogonality
            for _ in 0..2 {
                for u in &out {
                    let ov = inner(u, &v);
                    for k in 0..4 {
                        v[k] -= u[k] * ov;
                    }
                }
            }
            let n = norm(&v);
            if n > 1e-6 {
                out.push(v.map(|z| z / n));
            }
        }
        let states = [out[0], out[1], out[2], out[3]].map(BipartiteKet::from_raw);
        OrthonormalBasis {
            states,
            label: label.into(),
        }
    }

    /// Haar-random orthonormal basis.
    pub fn basis(rng: &mut impl Rng) -> OrthonormalBasis {
        complete_basis(rng, &[], "random")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::concurrence;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn theta_zero_is_a_product_basis_in_fixed_order() {
        let b = theta_basis(0.0).unwrap();
        let expected = [3, 0, 2, 1].map(BipartiteKet::computational);
        for (k, e) in b.states().iter().zip(&expected) {
            assert!(k.approx_eq(e, 1e-15), "{k:?}");
        }
    }

    #[test]
    fn theta_quarter_pi_is_the_bell_basis() {
        let b = theta_basis(FRAC_PI_4).unwrap();
        for k in b.states() {
            assert!((concurrence(k) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn family_bases_are_orthonormal_everywhere() {
        let n = 20;
        let grid = |k: usize| FRAC_PI_2 * k as f64 / (n - 1) as f64;
        for i in 0..n {
            let t = theta_basis(grid(i)).unwrap();
            assert!(t.gram_deviation() < 1e-12);
            for j in 0..n {
                for k in 0..n {
                    let p = FamilyParams::new(grid(i), grid(j), grid(k)).unwrap();
                    let b = a_basis(&p);
                    assert!(b.gram_deviation() < 1e-12, "{p:?}");
                    assert!(b.state(2).inner(b.state(3)).norm() < 1e-15);
                    validate_basis(*b.states(), "grid").unwrap();
                }
            }
        }
    }

    #[test]
    fn out_of_range_angles_are_rejected() {
        assert!(matches!(
            theta_basis(1.6),
            Err(Error::AngleOutOfRange { name: "theta", .. })
        ));
        assert!(FamilyParams::new(0.3, -0.1, 0.2).is_err());
        assert!(FamilyParams::new(0.3, 0.2, f64::NAN).is_err());
        // values within rounding of pi/2 are clamped
        let p = FamilyParams::new(FRAC_PI_2 + 2e-10, 0.2, 0.2).unwrap();
        assert_eq!(p.alpha, FRAC_PI_2);
    }

    #[test]
    fn a3_and_a4_are_product_when_alpha_equals_beta_at_quarter_pi() {
        let p = FamilyParams::new(1.0471975511965976, 1.0471975511965976, FRAC_PI_4).unwrap();
        let b = a_basis(&p);
        assert!(concurrence(b.state(2)) < 1e-12);
        assert!(concurrence(b.state(3)) < 1e-12);
    }

    #[test]
    fn gamma_half_pi_gives_phi_plus_and_psi_plus_up_to_phase() {
        let p = FamilyParams::new(0.3, 0.9, FRAC_PI_2).unwrap();
        let b = a_basis(&p);
        let phi = BipartiteKet::from_raw(raw_phi_plus(0.3));
        let psi = BipartiteKet::from_raw(raw_psi_plus(0.9));
        assert!(b.state(2).approx_eq(&phi, 1e-15));
        assert!(b.state(3).approx_eq(&psi, 1e-15));
        // a4 = -psi+ before canonicalization
        assert!((b.state(3).phase().abs() - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn generic_family_member_is_fully_entangled() {
        let b = a_basis(&FamilyParams::new(0.3, 0.9, FRAC_PI_4).unwrap());
        for k in b.states() {
            assert!(concurrence(k) > 1e-9);
        }
    }

    #[test]
    fn coefficient_matrices_match_closed_forms() {
        let (al, be, ga) = (0.3_f64, 0.9_f64, 0.7_f64);
        let b = a_basis(&FamilyParams::new(al, be, ga).unwrap());
        let r2 = SQRT_2;
        let a1 = Mat2([
            [real(r2 * al.cos()), real(0.0)],
            [real(0.0), real(-r2 * al.sin())],
        ]);
        let a3 = Mat2([
            [
                real(r2 * ga.sin() * al.sin()),
                real(r2 * ga.cos() * be.cos()),
            ],
            [
                real(r2 * ga.cos() * be.sin()),
                real(r2 * ga.sin() * al.cos()),
            ],
        ]);
        assert!(coefficient_matrix(b.state(0)).max_abs_diff(&a1) < 1e-15);
        assert!(coefficient_matrix(b.state(2)).max_abs_diff(&a3) < 1e-15);
        let back = from_coefficient_matrix(&a3);
        for (x, y) in back.iter().zip(b.state(2).amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let phi_plus = BipartiteKet::from_real([h, 0.0, 0.0, h]).unwrap();
        assert!(coefficient_matrix(&phi_plus).max_abs_diff(&Mat2::identity()) < 1e-15);
    }

    #[test]
    fn coefficient_matrix_round_trips_random_kets() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..1000 {
            let k = random::ket(&mut rng);
            let psi = coefficient_matrix(&k);
            assert!((psi.frobenius_norm() - SQRT_2).abs() < 1e-12);
            let back = from_coefficient_matrix(&psi);
            for (x, y) in back.iter().zip(k.amplitudes()) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn validate_basis_reports_first_offending_pair() {
        validate_basis(*computational_basis().states(), "comp").unwrap();
        let c = BipartiteKet::computational;
        match validate_basis([c(0), c(0), c(1), c(2)], "dup") {
            Err(Error::NotOrthonormal { i, j, deviation }) => {
                assert_eq!((i, j), (0, 1));
                assert!((deviation - 1.0).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
        validate_basis(*theta_basis(0.7).unwrap().states(), "t").unwrap();
    }

    #[test]
    fn random_bases_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            assert!(random::basis(&mut rng).gram_deviation() < 1e-12);
        }
    }

    #[test]
    fn basis_json_round_trip_preserves_states_and_phase() {
        let b = a_basis(&FamilyParams::new(0.3, 0.9, FRAC_PI_2).unwrap());
        let back = OrthonormalBasis::from_json(&b.to_json()).unwrap();
        for (x, y) in b.states().iter().zip(back.states()) {
            assert!(x.approx_eq(y, 1e-15));
            assert!((x.phase() - y.phase()).abs() < 1e-12);
        }
        assert_eq!(back.label(), b.label());
    }

    #[test]
    fn malformed_basis_json_is_rejected() {
        assert!(OrthonormalBasis::from_json("{\"schema\":\"basis.v1\"}").is_err());
        let dup = r#"[[[1,0],[0,0],[0,0],[0,0]],[[1,0],[0,0],[0,0],[0,0]],
                      [[0,0],[1,0],[0,0],[0,0]],[[0,0],[0,0],[1,0],[0,0]]]"#;
        assert!(matches!(
            OrthonormalBasis::from_json(dup),
            Err(Error::NotOrthonormal { i: 0, j: 1, .. })
        ));
        let wrong = r#"{"schema":"basis.v9","label":"x","states":[[[1,0],[0,0],[0,0],[0,0]],
            [[0,0],[1,0],[0,0],[0,0]],[[0,0],[0,0],[1,0],[0,0]],[[0,0],[0,0],[0,0],[1,0]]]}"#;
        assert!(matches!(
            OrthonormalBasis::from_json(wrong),
            Err(Error::Schema(_))
        ));
    }
}

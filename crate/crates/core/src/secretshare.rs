//! Secret sharing demonstrations built on multi-copy local indistinguishability.
//!
//! The (2,6) scheme hands three identical copies of `ψ_m` to six parties
//! `A1 B1 A2 B2 A3 B3`; all six together run the three-copy tournament across
//! the A|B cut. The strong (1,2) scheme uses two mixed states supported on
//! complementary pair subspaces, secure when both support projectors are NPT.

use serde::Serialize;
use serde_json::{json, Value};

use crate::classify::min_copies_adaptive_locc;
use crate::entanglement::{
    pair_projector, separability_certificate, ProjectorSide, SeparabilityCertificate,
};
use crate::error::{Error, Result};
use crate::linalg::{real, Mat4, C64};
use crate::protocols::{conclusion_distribution, elimination_tournament};
use crate::states::{BipartiteKet, OrthonormalBasis};

pub const SHARES_SCHEMA: &str = "shares.v1";
pub const PARTY_ASSIGNMENT: [&str; 6] = ["A1", "B1", "A2", "B2", "A3", "B3"];
pub const WEAK_BASIS_WARNING: &str = "two-copy distinguishable basis weakens the scheme";
const COPY_EQUALITY_TOL: f64 = 1e-12;
const DECODE_TOL: f64 = 1e-9;
const ORTHOGONAL_SUPPORT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ShareSet {
    pub message: u8,
    /// Copy `k` is held jointly by `A{k+1}` and `B{k+1}`.
    pub copies: [BipartiteKet; 3],
    pub basis_label: String,
    pub warnings: Vec<String>,
}

pub fn encode_2bit(message: u8, b: &OrthonormalBasis) -> Result<ShareSet> {
    if message > 3 {
        return Err(Error::MessageOutOfRange(message));
    }
    let mut warnings = Vec::new();
    if min_copies_adaptive_locc(b)? < 3 {
        warnings.push(WEAK_BASIS_WARNING.to_string());
    }
    let k = *b.state(usize::from(message));
    Ok(ShareSet {
        message,
        copies: [k; 3],
        basis_label: b.label().to_string(),
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decoded {
    pub message: u8,
    pub probability: f64,
}

/// All six parties collaborate: exact evaluation of the three-copy tournament.
pub fn decode_full_collaboration(s: &ShareSet, b: &OrthonormalBasis) -> Result<Decoded> {
    for (k, c) in s.copies.iter().enumerate().skip(1) {
        if !c.approx_eq(&s.copies[0], COPY_EQUALITY_TOL) {
            return Err(Error::Integrity(format!("copy {k} differs from copy 0")));
        }
    }
    let t = elimination_tournament(b, 3)?;
    let dist = conclusion_distribution(&t, &s.copies)?;
    let (idx, &p) = dist
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("four outcomes");
    if p < 1.0 - DECODE_TOL {
        return Err(Error::Integrity(format!(
            "shares do not encode a state of this basis (best outcome probability {p:.6})"
        )));
    }
    Ok(Decoded {
        message: idx as u8,
        probability: p,
    })
}

/// `σ(λ) = λ|ψi><ψi| + (1-λ)|ψj><ψj|` and `σ⊥(μ)` on the complementary pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedShare {
    pub pair: (usize, usize),
    pub complement: (usize, usize),
    pub lambda: f64,
    pub mu: f64,
    pub sigma: Mat4,
    pub sigma_perp: Mat4,
    pub span_certificate: SeparabilityCertificate,
    pub complement_certificate: SeparabilityCertificate,
    /// `|tr(σ σ⊥)|`
    pub support_overlap: f64,
}

impl MixedShare {
    pub fn globally_distinguishable(&self) -> bool {
        self.support_overlap < ORTHOGONAL_SUPPORT_TOL
    }

    /// Both support projectors NPT.
    pub fn security_pass(&self) -> bool {
        !self.span_certificate.is_separable && !self.complement_certificate.is_separable
    }

    pub fn to_json(&self) -> String {
        let doc = json!({
            "schema": SHARES_SCHEMA,
            "kind": "mixed_share",
            "pair": [self.pair.0, self.pair.1],
            "complement": [self.complement.0, self.complement.1],
            "lambda": self.lambda,
            "mu": self.mu,
            "sigma": mat_json(&self.sigma),
            "sigma_perp": mat_json(&self.sigma_perp),
            "span_certificate": self.span_certificate,
            "complement_certificate": self.complement_certificate,
            "support_overlap": self.support_overlap,
            "globally_distinguishable": self.globally_distinguishable(),
            "security": if self.security_pass() { "PASS" } else { "FAIL" },
            "notes": [
                "security certificate covers LOCC indistinguishability of the two mixed shares",
                "the claim that no four of six parties can decode the (2,6) scheme is not tested",
            ],
        });
        serde_json::to_string_pretty(&doc).expect("json value serializes")
    }
}

fn weight(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err(Error::WeightOutOfRange { name, value })
    }
}

pub fn strong_pair_shares(
    b: &OrthonormalBasis,
    i: usize,
    j: usize,
    lambda: f64,
    mu: f64,
) -> Result<MixedShare> {
    if i == j || i > 3 || j > 3 {
        return Err(Error::InvalidPair { i, j });
    }
    let lambda = weight("lambda", lambda)?;
    let mu = weight("mu", mu)?;
    let rest: Vec<usize> = (0..4).filter(|&k| k != i && k != j).collect();
    let (k, l) = (rest[0], rest[1]);
    let mix = |x: usize, y: usize, w: f64| {
        b.state(x).projector().scale(real(w)) + b.state(y).projector().scale(real(1.0 - w))
    };
    let sigma = mix(i, j, lambda);
    let sigma_perp = mix(k, l, mu);
    let span_certificate =
        separability_certificate(&pair_projector(b, i, j, ProjectorSide::Span)?)?;
    let complement_certificate =
        separability_certificate(&pair_projector(b, i, j, ProjectorSide::Complement)?)?;
    let support_overlap = (sigma * sigma_perp).trace().norm();
    Ok(MixedShare {
        pair: (i, j),
        complement: (k, l),
        lambda,
        mu,
        sigma,
        sigma_perp,
        span_certificate,
        complement_certificate,
        support_overlap,
    })
}

fn ket_json(k: &BipartiteKet) -> Value {
    json!(k.amplitudes().map(|z: C64| [z.re, z.im]))
}

fn mat_json(m: &Mat4) -> Value {
    json!(m.0.map(|row| row.map(|z| [z.re, z.im])))
}

impl ShareSet {
    pub fn to_json(&self) -> String {
        let shares: Vec<Value> = self
            .copies
            .iter()
            .enumerate()
            .map(|(k, c)| {
                json!({
                    "copy": k,
                    "holders": [PARTY_ASSIGNMENT[2 * k], PARTY_ASSIGNMENT[2 * k + 1]],
                    "state": ket_json(c),
                })
            })
            .collect();
        let doc = json!({
            "schema": SHARES_SCHEMA,
            "kind": "share_set",
            "basis": self.basis_label,
            "message": self.message,
            "party_assignment": PARTY_ASSIGNMENT,
            "shares": shares,
            "warnings": self.warnings,
        });
        serde_json::to_string_pretty(&doc).expect("json value serializes")
    }
}

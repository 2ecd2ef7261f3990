//! Minimum-copy classification of two-qubit orthonormal bases under adaptive
//! LOCC and adaptive SEP.
//!
//! Two copies suffice under adaptive LOCC exactly when the first copy can
//! (i) discriminate outright, (ii) split off one state so that at most one
//! entangled state remains, or (iii) split the basis into two pairs whose
//! support projectors are both separable. Otherwise three copies are needed,
//! and three always suffice (see [`crate::protocols::elimination_tournament`]).
//!
//! Under adaptive SEP the pair split is unchanged, and the 1-vs-3 route needs
//! the remaining triple to be SEP-distinguishable, which is decided by
//! [`duan_three_state_sep`].

use serde::{Deserialize, Serialize};

use crate::entanglement::{
    concurrence, pair_projector, separability_certificate, ProjectorSide, SeparabilityCertificate,
    PRODUCT_TOL,
};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::states::{coefficient_matrix, BipartiteKet, FamilyParams, OrthonormalBasis};

/// `|Im(λ1/λ2)|` below this counts as real.
pub const ANTIPARALLEL_TOL: f64 = 1e-8;
/// `|Σ C(ψ_i) - C(φ)|` below this satisfies the concurrence-sum condition.
pub const DUAN_SUM_TOL: f64 = 1e-9;
/// `|tan²γ - ratio|` below this puts a family point on a region boundary.
pub const REGION_TOL: f64 = 1e-9;

pub const REPORT_SCHEMA: &str = "report.v1";

/// The six index pairs in lexicographic order; pair `k` and pair `5 - k` are complementary.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Which two-copy route (if any) works under adaptive LOCC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum LoccCategory {
    OneCopy,
    /// First copy separates `ψ_l` from the rest; the rest hold at most one entangled state.
    TwoCopyElimination {
        l: usize,
    },
    /// First copy separates `{ψ_i, ψ_j}` from its complement; both projectors separable.
    TwoCopyPairSplit {
        i: usize,
        j: usize,
    },
    ThreeCopy,
}

impl LoccCategory {
    pub fn min_copies(&self) -> u8 {
        match self {
            LoccCategory::OneCopy => 1,
            LoccCategory::TwoCopyElimination { .. } | LoccCategory::TwoCopyPairSplit { .. } => 2,
            LoccCategory::ThreeCopy => 3,
        }
    }
}

/// Witness for the adaptive SEP copy count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SepRoute {
    SingleCopy,
    PairSplit {
        i: usize,
        j: usize,
    },
    /// Split off `ψ_l`, then discriminate the remaining triple by SEP.
    Elimination {
        l: usize,
    },
    ThreeCopy,
}

impl SepRoute {
    pub fn min_copies(&self) -> u8 {
        match self {
            SepRoute::SingleCopy => 1,
            SepRoute::PairSplit { .. } | SepRoute::Elimination { .. } => 2,
            SepRoute::ThreeCopy => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryKind {
    /// `tan²γ = sin2β / sin2α`
    A3Product,
    /// `tan²γ = sin2α / sin2β`
    A4Product,
    Both,
}

/// Partition of the `A_γ^[α,β]` parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Region {
    #[serde(rename = "R_I")]
    RI,
    #[serde(rename = "R_II")]
    RII,
    #[serde(rename = "R_III")]
    RIII,
    #[serde(rename = "R_IV")]
    RIV,
    Boundary {
        which: BoundaryKind,
    },
}

impl Region {
    pub fn name(&self) -> &'static str {
        match self {
            Region::RI => "R_I",
            Region::RII => "R_II",
            Region::RIII => "R_III",
            Region::RIV => "R_IV",
            Region::Boundary {
                which: BoundaryKind::A3Product,
            } => "boundary_a3",
            Region::Boundary {
                which: BoundaryKind::A4Product,
            } => "boundary_a4",
            Region::Boundary {
                which: BoundaryKind::Both,
            } => "boundary_both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairCertificate {
    pub i: usize,
    pub j: usize,
    #[serde(flatten)]
    pub certificate: SeparabilityCertificate,
}

/// PPT certificates of the six pair projectors, in [`PAIRS`] order.
pub fn pair_certificates(b: &OrthonormalBasis) -> Result<[PairCertificate; 6]> {
    let mut out = [PairCertificate {
        i: 0,
        j: 0,
        certificate: SeparabilityCertificate {
            min_pt_eigenvalue: 0.0,
            is_separable: true,
            tolerance: 0.0,
        },
    }; 6];
    for (slot, &(i, j)) in out.iter_mut().zip(PAIRS.iter()) {
        let p = pair_projector(b, i, j, ProjectorSide::Span)?;
        *slot = PairCertificate {
            i,
            j,
            certificate: separability_certificate(&p)?,
        };
    }
    Ok(out)
}

fn entangled_flags(b: &OrthonormalBasis) -> [bool; 4] {
    b.states().map(|k| concurrence(&k) >= PRODUCT_TOL)
}

fn first_pair_split(certs: &[PairCertificate; 6]) -> Option<(usize, usize)> {
    (0..6)
        .find(|&k| certs[k].certificate.is_separable && certs[5 - k].certificate.is_separable)
        .map(|k| PAIRS[k])
}

fn category_from(entangled: &[bool; 4], certs: &[PairCertificate; 6]) -> LoccCategory {
    let count = entangled.iter().filter(|&&e| e).count();
    if count == 0 {
        return LoccCategory::OneCopy;
    }
    if let Some(l) = (0..4).find(|&l| count - usize::from(entangled[l]) <= 1) {
        return LoccCategory::TwoCopyElimination { l };
    }
    match first_pair_split(certs) {
        Some((i, j)) => LoccCategory::TwoCopyPairSplit { i, j },
        None => LoccCategory::ThreeCopy,
    }
}

pub fn locc_category(b: &OrthonormalBasis) -> Result<LoccCategory> {
    Ok(category_from(&entangled_flags(b), &pair_certificates(b)?))
}

pub fn min_copies_adaptive_locc(b: &OrthonormalBasis) -> Result<u8> {
    locc_category(b).map(|c| c.min_copies())
}

/// `λ1/λ2` for the eigenvalues of `Ψ Φ⁻¹`; `None` when `Φ` or `Ψ` is singular.
pub fn eigenvalue_ratio(psi: &BipartiteKet, phi: &BipartiteKet) -> Option<C64> {
    let inv = coefficient_matrix(phi).inverse()?;
    let [l1, l2] = (coefficient_matrix(psi) * inv).eigenvalues();
    if l2.norm() < 1e-14 {
        return None;
    }
    Some(l1 / l2)
}

fn is_antiparallel(ratio: C64) -> bool {
    ratio.im.abs() < ANTIPARALLEL_TOL && ratio.re < 0.0
}

/// SEP distinguishability of three orthonormal kets whose orthogonal complement is `complement`.
///
/// True iff every entangled `ψ_k` gives `Ψ_k Φ⁻¹` two anti-parallel eigenvalues and
/// `Σ C(ψ_k) = C(φ)`. With a product complement this reduces to all three being product.
pub fn duan_three_state_sep(states: &[BipartiteKet; 3], complement: &BipartiteKet) -> bool {
    let c_phi = concurrence(complement);
    if c_phi < PRODUCT_TOL {
        return states.iter().all(|k| concurrence(k) < PRODUCT_TOL);
    }
    let antiparallel = states.iter().all(|k| {
        concurrence(k) < PRODUCT_TOL || eigenvalue_ratio(k, complement).is_some_and(is_antiparallel)
    });
    let sum: f64 = states.iter().map(concurrence).sum();
    antiparallel && (sum - c_phi).abs() < DUAN_SUM_TOL
}

/// `G_l^C` and `ψ_l` for the 1-vs-3 split at `l`.
pub fn elimination_split(b: &OrthonormalBasis, l: usize) -> ([BipartiteKet; 3], BipartiteKet) {
    let s = b.states();
    let mut rest = [s[0]; 3];
    for (slot, k) in rest.iter_mut().zip((0..4).filter(|&k| k != l)) {
        *slot = s[k];
    }
    (rest, s[l])
}

fn duan_flags(b: &OrthonormalBasis) -> [bool; 4] {
    [0, 1, 2, 3].map(|l| {
        let (rest, comp) = elimination_split(b, l);
        duan_three_state_sep(&rest, &comp)
    })
}

fn sep_route_from(
    entangled: &[bool; 4],
    certs: &[PairCertificate; 6],
    duan: &[bool; 4],
) -> SepRoute {
    if entangled.iter().all(|&e| !e) {
        return SepRoute::SingleCopy;
    }
    if let Some((i, j)) = first_pair_split(certs) {
        return SepRoute::PairSplit { i, j };
    }
    match (0..4).find(|&l| duan[l]) {
        Some(l) => SepRoute::Elimination { l },
        None => SepRoute::ThreeCopy,
    }
}

pub fn sep_route(b: &OrthonormalBasis) -> Result<SepRoute> {
    Ok(sep_route_from(
        &entangled_flags(b),
        &pair_certificates(b)?,
        &duan_flags(b),
    ))
}

pub fn min_copies_adaptive_sep(b: &OrthonormalBasis) -> Result<u8> {
    sep_route(b).map(|r| r.min_copies())
}

fn nondegenerate(alpha: f64, beta: f64) -> Result<(f64, f64)> {
    let (s2a, s2b) = ((2.0 * alpha).sin(), (2.0 * beta).sin());
    if s2a < 1e-12 || s2b < 1e-12 {
        return Err(Error::DegenerateFamily { alpha, beta });
    }
    Ok((s2a, s2b))
}

pub fn region(p: &FamilyParams) -> Result<Region> {
    let (s2a, s2b) = nondegenerate(p.alpha, p.beta)?;
    let t = p.gamma.tan().powi(2);
    let r3 = s2b / s2a;
    let r4 = s2a / s2b;
    let on3 = (t - r3).abs() < REGION_TOL;
    let on4 = (t - r4).abs() < REGION_TOL;
    Ok(match (on3, on4) {
        (true, true) => Region::Boundary {
            which: BoundaryKind::Both,
        },
        (true, false) => Region::Boundary {
            which: BoundaryKind::A3Product,
        },
        (false, true) => Region::Boundary {
            which: BoundaryKind::A4Product,
        },
        _ if r3 >= t && t >= r4 => Region::RI,
        _ if r4 >= t && t >= r3 => Region::RII,
        _ if t >= r3.max(r4) => Region::RIII,
        _ => Region::RIV,
    })
}

/// `γ* = arctan √(sin2α / sin2β)`, the angle at which `a4` is a product state.
pub fn gamma_star(alpha: f64, beta: f64) -> Result<f64> {
    let (s2a, s2b) = nondegenerate(alpha, beta)?;
    Ok((s2a / s2b).sqrt().atan())
}

/// Everything the classifier knows about one basis (`report.v1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub schema: String,
    pub label: String,
    pub family: Option<FamilyParams>,
    pub concurrences: [f64; 4],
    pub entangled: [bool; 4],
    pub entangled_count: usize,
    pub locc_category: LoccCategory,
    pub min_copies_locc: u8,
    pub min_copies_sep: u8,
    pub sep_route: SepRoute,
    /// `duan_three_state_sep(G_l^C, ψ_l)` for each `l`.
    pub sep_elimination: [bool; 4],
    pub region: Option<Region>,
    pub certificates: [PairCertificate; 6],
    pub assumptions: Vec<String>,
    pub boundary_warnings: Vec<String>,
}

const ASSUME_LOCC_SPLIT: &str =
    "a 1-vs-3 elimination split on the first copy is achievable by LOCC for every l";
const ASSUME_SEP_SPLIT: &str =
    "the 1-vs-3 split preceding SEP discrimination of the remaining triple is achievable for every l";

fn in_band(value: f64, tol: f64) -> bool {
    value >= 0.1 * tol && value < 10.0 * tol
}

pub fn analyze(b: &OrthonormalBasis, p: Option<&FamilyParams>) -> Result<ClassificationReport> {
    let concurrences = b.states().map(|k| concurrence(&k));
    let entangled = concurrences.map(|c| c >= PRODUCT_TOL);
    let certificates = pair_certificates(b)?;
    let sep_elimination = duan_flags(b);
    let locc = category_from(&entangled, &certificates);
    let sep = sep_route_from(&entangled, &certificates, &sep_elimination);

    let mut warnings = Vec::new();
    for (k, &c) in concurrences.iter().enumerate() {
        if in_band(c, PRODUCT_TOL) {
            warnings.push(format!(
                "state {k}: concurrence {c:e} is near the product threshold"
            ));
        }
    }
    for pc in &certificates {
        if pc.certificate.near_boundary() {
            warnings.push(format!(
                "pair ({}, {}): min partial-transpose eigenvalue {:e} is near the separability threshold",
                pc.i, pc.j, pc.certificate.min_pt_eigenvalue
            ));
        }
    }
    for l in 0..4 {
        let (rest, comp) = elimination_split(b, l);
        let c_phi = concurrence(&comp);
        if c_phi < PRODUCT_TOL {
            continue;
        }
        let gap = (rest.iter().map(concurrence).sum::<f64>() - c_phi).abs();
        if in_band(gap, DUAN_SUM_TOL) {
            warnings.push(format!(
                "split at {l}: concurrence-sum gap {gap:e} is near tolerance"
            ));
        }
        for k in rest.iter().filter(|k| concurrence(k) >= PRODUCT_TOL) {
            if let Some(r) = eigenvalue_ratio(k, &comp) {
                if in_band(r.im.abs(), ANTIPARALLEL_TOL) {
                    warnings.push(format!(
                        "split at {l}: eigenvalue ratio imaginary part {:e} is near tolerance",
                        r.im.abs()
                    ));
                }
            }
        }
    }

    let region = match p {
        Some(params) => match region(params) {
            Ok(r) => {
                let (s2a, s2b) = ((2.0 * params.alpha).sin(), (2.0 * params.beta).sin());
                let t = params.gamma.tan().powi(2);
                let gap = (t - s2b / s2a).abs().min((t - s2a / s2b).abs());
                if !matches!(r, Region::Boundary { .. }) && gap < 10.0 * REGION_TOL {
                    warnings.push(format!(
                        "region: tan²γ is within {gap:e} of a boundary surface"
                    ));
                }
                Some(r)
            }
            Err(Error::DegenerateFamily { .. }) => {
                warnings.push("region undefined: alpha or beta at 0 or pi/2".to_string());
                None
            }
            Err(e) => return Err(e),
        },
        None => None,
    };

    let mut assumptions = Vec::new();
    if matches!(locc, LoccCategory::TwoCopyElimination { .. }) {
        assumptions.push(ASSUME_LOCC_SPLIT.to_string());
    }
    if matches!(sep, SepRoute::Elimination { .. }) {
        assumptions.push(ASSUME_SEP_SPLIT.to_string());
    }

    Ok(ClassificationReport {
        schema: REPORT_SCHEMA.to_string(),
        label: b.label().to_string(),
        family: p.copied(),
        concurrences,
        entangled,
        entangled_count: entangled.iter().filter(|&&e| e).count(),
        min_copies_locc: locc.min_copies(),
        min_copies_sep: sep.min_copies(),
        locc_category: locc,
        sep_route: sep,
        sep_elimination,
        region,
        certificates,
        assumptions,
        boundary_warnings: warnings,
    })
}

//! Parameter-grid scans over the two basis families, emitted as CSV.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{
    min_copies_adaptive_locc, min_copies_adaptive_sep, pair_certificates, region,
};
use crate::entanglement::{concurrence, pt_spectrum_p12_closed};
use crate::error::{Error, Result};
use crate::states::{a_basis, theta_basis, FamilyParams, OrthonormalBasis};

pub const CSV_VERSION: &str = "scan.v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanFamily {
    Theta,
    A,
}

/// `steps` evenly spaced values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisRange {
    pub fn new(min: f64, max: f64, steps: usize) -> Self {
        AxisRange { min, max, steps }
    }

    pub fn fixed(value: f64) -> Self {
        AxisRange::new(value, value, 1)
    }

    fn check(&self, name: &str) -> Result<()> {
        let half_pi = std::f64::consts::FRAC_PI_2;
        if !(self.min >= 0.0 && self.max <= half_pi + 1e-9 && self.min <= self.max) {
            return Err(Error::InvalidScan(format!(
                "{name} range [{}, {}] must satisfy 0 <= min <= max <= pi/2",
                self.min, self.max
            )));
        }
        let single = self.steps == 1 && self.min == self.max;
        if self.steps < 2 && !single {
            return Err(Error::InvalidScan(format!(
                "{name} needs at least 2 steps (or min = max with 1 step)"
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let h = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.max
                } else {
                    self.min + h * k as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub family: ScanFamily,
    pub theta: AxisRange,
    pub alpha: AxisRange,
    pub beta: AxisRange,
    pub gamma: AxisRange,
    /// Subset of [`columns`] to emit, in the given order; `None` emits all.
    pub outputs: Option<Vec<String>>,
}

impl ScanSpec {
    pub fn family_a(alpha: AxisRange, beta: AxisRange, gamma: AxisRange) -> Self {
        ScanSpec {
            family: ScanFamily::A,
            theta: AxisRange::fixed(0.0),
            alpha,
            beta,
            gamma,
            outputs: None,
        }
    }

    pub fn family_theta(theta: AxisRange) -> Self {
        ScanSpec {
            family: ScanFamily::Theta,
            theta,
            alpha: AxisRange::fixed(0.0),
            beta: AxisRange::fixed(0.0),
            gamma: AxisRange::fixed(0.0),
            outputs: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.family {
            ScanFamily::Theta => self.theta.check("theta")?,
            ScanFamily::A => {
                self.alpha.check("alpha")?;
                self.beta.check("beta")?;
                self.gamma.check("gamma")?;
            }
        }
        if let Some(cols) = &self.outputs {
            let all = columns(self.family);
            if let Some(bad) = cols.iter().find(|c| !all.contains(&c.as_str())) {
                return Err(Error::InvalidScan(format!("unknown column {bad:?}")));
            }
        }
        Ok(())
    }

    /// Grid points in row-major order (alpha outermost, gamma innermost).
    pub fn points(&self) -> Vec<[f64; 3]> {
        match self.family {
            ScanFamily::Theta => self
                .theta
                .values()
                .into_iter()
                .map(|t| [t, 0.0, 0.0])
                .collect(),
            ScanFamily::A => {
                let (a, b, g) = (self.alpha.values(), self.beta.values(), self.gamma.values());
                let mut out = Vec::with_capacity(a.len() * b.len() * g.len());
                for &x in &a {
                    for &y in &b {
                        for &z in &g {
                            out.push([x, y, z]);
                        }
                    }
                }
                out
            }
        }
    }
}

const PT_COLUMNS: [&str; 6] = [
    "pt_min_01",
    "pt_min_02",
    "pt_min_03",
    "pt_min_12",
    "pt_min_13",
    "pt_min_23",
];

/// Frozen column order for each family.
pub fn columns(family: ScanFamily) -> Vec<&'static str> {
    let mut cols = match family {
        ScanFamily::Theta => vec!["theta"],
        ScanFamily::A => vec!["alpha", "beta", "gamma"],
    };
    cols.extend(["c1", "c2", "c3", "c4"]);
    if family == ScanFamily::A {
        cols.extend(["region", "e1", "e2", "e3", "e4"]);
    }
    cols.extend(PT_COLUMNS);
    cols.extend(["min_copies_locc", "min_copies_sep"]);
    cols
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    /// `[theta, _, _]` or `[alpha, beta, gamma]`.
    pub params: [f64; 3],
    pub concurrences: [f64; 4],
    /// `None` for the theta family; `"undefined"` for degenerate A points.
    pub region: Option<String>,
    pub e: Option<[f64; 4]>,
    pub pt_min: [f64; 6],
    pub min_copies_locc: u8,
    pub min_copies_sep: u8,
}

/// Twelve significant digits, identical on every platform.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

impl ScanRow {
    fn field(&self, family: ScanFamily, col: &str) -> String {
        let pt = |k: usize| fmt_float(self.pt_min[k]);
        match col {
            "theta" => fmt_float(self.params[0]),
            "alpha" => fmt_float(self.params[0]),
            "beta" => fmt_float(self.params[1]),
            "gamma" => fmt_float(self.params[2]),
            "c1" | "c2" | "c3" | "c4" => {
                fmt_float(self.concurrences[col[1..].parse::<usize>().unwrap() - 1])
            }
            "region" => self.region.clone().unwrap_or_default(),
            "e1" | "e2" | "e3" | "e4" => {
                let k = col[1..].parse::<usize>().unwrap() - 1;
                self.e.map(|e| fmt_float(e[k])).unwrap_or_default()
            }
            "min_copies_locc" => self.min_copies_locc.to_string(),
            "min_copies_sep" => self.min_copies_sep.to_string(),
            other => match PT_COLUMNS.iter().position(|c| *c == other) {
                Some(k) => pt(k),
                None => unreachable!("column {other} not in {family:?} layout"),
            },
        }
    }
}

fn row_for(family: ScanFamily, p: [f64; 3]) -> Result<ScanRow> {
    let (b, params): (OrthonormalBasis, Option<FamilyParams>) = match family {
        ScanFamily::Theta => (theta_basis(p[0])?, None),
        ScanFamily::A => {
            let fp = FamilyParams::new(p[0], p[1], p[2])?;
            (a_basis(&fp), Some(fp))
        }
    };
    let certs = pair_certificates(&b)?;
    let region_name = params
        .map(|fp| region(&fp).map_or_else(|_| "undefined".to_string(), |r| r.name().to_string()));
    Ok(ScanRow {
        params: p,
        concurrences: b.states().map(|k| concurrence(&k)),
        region: region_name,
        e: params.map(|fp| pt_spectrum_p12_closed(fp.alpha, fp.beta)),
        pt_min: certs.map(|c| c.certificate.min_pt_eigenvalue),
        min_copies_locc: min_copies_adaptive_locc(&b)?,
        min_copies_sep: min_copies_adaptive_sep(&b)?,
    })
}

/// Evaluates every grid point in parallel; rows come back in grid order.
pub fn run_scan(spec: &ScanSpec) -> Result<Vec<ScanRow>> {
    spec.validate()?;
    spec.points()
        .par_iter()
        .map(|&p| row_for(spec.family, p))
        .collect()
}

pub fn to_csv(spec: &ScanSpec, rows: &[ScanRow]) -> String {
    let cols: Vec<String> = match &spec.outputs {
        Some(c) => c.clone(),
        None => columns(spec.family).iter().map(|s| s.to_string()).collect(),
    };
    let family = match spec.family {
        ScanFamily::Theta => "theta",
        ScanFamily::A => "A",
    };
    let mut out = format!("# {CSV_VERSION} family={family}\n{}\n", cols.join(","));
    for r in rows {
        let fields: Vec<String> = cols.iter().map(|c| r.field(spec.family, c)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

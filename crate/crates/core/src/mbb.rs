//! Numerical Movable Bend-and-Break: splitting a nef class into two nef classes
//! of degree ≥ 2, possibly joined by a line in an E5 divisor.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{enumerate_lattice_points, LatticeVector};
use crate::models::FanoThreefoldModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BreakingKind {
    FreePair,
    E5Chain,
}

/// `α = β + γ` (free pair) or `α = β + ℓ + γ` (E5 chain), with `β ≤ γ` in (degree, coordinates) order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Breaking {
    pub kind: BreakingKind,
    pub beta: LatticeVector,
    pub gamma: LatticeVector,
    /// Label of the E5 divisor whose line joins the two parts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line_class: Option<LatticeVector>,
    /// Both parts of degree ≤ 4, `E·α = 0` and `−K·α ≤ 9`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exceptional_profile: Option<bool>,
}

impl Breaking {
    pub fn total(&self) -> LatticeVector {
        let s = &self.beta + &self.gamma;
        match &self.line_class {
            Some(l) => &s + l,
            None => s,
        }
    }
}

fn ordered(m: &FanoThreefoldModel, a: LatticeVector, b: LatticeVector) -> (LatticeVector, LatticeVector) {
    let ka = (m.degree(a.coords()), a.coords().to_vec());
    let kb = (m.degree(b.coords()), b.coords().to_vec());
    if ka <= kb {
        (a, b)
    } else {
        (b, a)
    }
}

fn require_nef(m: &FanoThreefoldModel, alpha: &LatticeVector) -> Result<()> {
    m.check_curve(alpha)?;
    if !m.is_nef(alpha.coords()) {
        return Err(Error::Input(format!("class {alpha} is not nef")));
    }
    Ok(())
}

/// Nef classes of degree in `[2, max_degree]`, sorted by (degree, coordinates).
fn parts_up_to(m: &FanoThreefoldModel, max_degree: i64) -> Result<Vec<LatticeVector>> {
    let deg = LatticeVector::divisor(m.degree_functional());
    Ok(enumerate_lattice_points(&m.nef_curve_cone, &deg, max_degree)?
        .into_iter()
        .filter(|p| m.degree(p.coords()) >= 2)
        .collect())
}

fn free_from(m: &FanoThreefoldModel, alpha: &LatticeVector, parts: &[LatticeVector]) -> Vec<Breaking> {
    let d = m.degree(alpha.coords());
    let mut out: Vec<Breaking> = parts
        .iter()
        .take_while(|b| m.degree(b.coords()) <= d - 2)
        .filter_map(|b| {
            let g = alpha - b;
            if !m.is_nef(g.coords()) {
                return None;
            }
            let (beta, gamma) = ordered(m, b.clone(), g);
            (beta == *b).then_some(Breaking {
                kind: BreakingKind::FreePair,
                beta,
                gamma,
                line: None,
                line_class: None,
                exceptional_profile: None,
            })
        })
        .collect();
    out.sort();
    out
}

/// Every unordered `{β, γ}` of nef classes with `β + γ = α` and both degrees ≥ 2.
pub fn free_breakings(m: &FanoThreefoldModel, alpha: &LatticeVector) -> Result<Vec<Breaking>> {
    require_nef(m, alpha)?;
    let parts = parts_up_to(m, m.degree(alpha.coords()) - 2)?;
    Ok(free_from(m, alpha, &parts))
}

fn chains_from(m: &FanoThreefoldModel, alpha: &LatticeVector, parts: &[LatticeVector]) -> Vec<Breaking> {
    let d = m.degree(alpha.coords());
    let mut out = Vec::new();
    for div in m.e5_divisors() {
        let Some(line) = &div.line_class else { continue };
        let rest = alpha - line;
        let rest_deg = d - m.degree(line.coords());
        let meets_e = m.intersect(div.divisor_class.coords(), alpha.coords());
        for b in parts.iter().take_while(|b| m.degree(b.coords()) <= rest_deg - 2) {
            let g = &rest - b;
            if !m.is_nef(g.coords()) {
                continue;
            }
            let (beta, gamma) = ordered(m, b.clone(), g);
            if beta != *b {
                continue;
            }
            let profile =
                m.degree(beta.coords()) <= 4 && m.degree(gamma.coords()) <= 4 && meets_e == 0 && d <= 9;
            out.push(Breaking {
                kind: BreakingKind::E5Chain,
                beta,
                gamma,
                line: Some(div.label.clone()),
                line_class: Some(line.clone()),
                exceptional_profile: Some(profile),
            });
        }
    }
    out.sort();
    out
}

/// Every `(β, ℓ, γ)` with `ℓ` an E5 line class, `β + ℓ + γ = α`, `β, γ` nef of degree ≥ 2.
pub fn e5_chain_breakings(m: &FanoThreefoldModel, alpha: &LatticeVector) -> Result<Vec<Breaking>> {
    require_nef(m, alpha)?;
    if !m.has_e5() {
        return Ok(vec![]);
    }
    let parts = parts_up_to(m, m.degree(alpha.coords()) - 3)?;
    Ok(chains_from(m, alpha, &parts))
}

/// Degree from which every nef class is expected to break freely: 5, or 6 with an E5 divisor.
pub fn mbb_threshold(m: &FanoThreefoldModel) -> i64 {
    if m.has_e5() {
        6
    } else {
        5
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Degree5Exception {
    pub class: LatticeVector,
    pub chain_breakings: Vec<Breaking>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MBBReport {
    pub model: String,
    pub threshold: i64,
    pub d_max: i64,
    pub classes_checked: usize,
    /// Nef classes of degree in `[threshold, d_max]` with no free breaking.
    pub violations: Vec<LatticeVector>,
    /// Nef classes of degree 5 with no free breaking.
    pub degree5_exceptions: Vec<Degree5Exception>,
}

impl MBBReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every nef class of degree in `[mbb_threshold, d_max]` breaks freely.
pub fn verify_mbb(m: &FanoThreefoldModel, d_max: i64) -> Result<MBBReport> {
    let threshold = mbb_threshold(m);
    if d_max < threshold {
        return Err(Error::Input(format!("d_max = {d_max} is below the threshold {threshold}")));
    }
    let parts = parts_up_to(m, d_max)?;
    let targets: Vec<&LatticeVector> = parts.iter().filter(|p| m.degree(p.coords()) >= threshold).collect();
    let mut violations: Vec<LatticeVector> = targets
        .par_iter()
        .filter(|a| free_from(m, a, &parts).is_empty())
        .map(|a| (*a).clone())
        .collect();
    violations.sort_by_key(|v| (m.degree(v.coords()), v.coords().to_vec()));

    let degree5_exceptions = parts
        .iter()
        .filter(|p| m.degree(p.coords()) == 5 && free_from(m, p, &parts).is_empty())
        .map(|p| Degree5Exception { class: p.clone(), chain_breakings: chains_from(m, p, &parts) })
        .collect();
    Ok(MBBReport {
        model: m.name.clone(),
        threshold,
        d_max,
        classes_checked: targets.len(),
        violations,
        degree5_exceptions,
    })
}

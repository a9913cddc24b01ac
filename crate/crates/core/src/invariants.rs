//! Fujita invariant `a(X, L)` and the b-invariant of a nef divisor class.
//!
//! For nef `L`, `tL + K` is pseudo-effective iff it pairs nonnegatively with
//! every nef curve ray `r`, i.e. `t·(L·r) ≥ −K·r`. Hence
//! `a = max_r (−K·r)/(L·r)`, and `a = ∞` exactly when some nef ray has
//! `L·r = 0`; that ray is the separating functional.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::linalg::rank_i64;
use crate::lattice::LatticeVector;
use crate::models::FanoThreefoldModel;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AValue {
    Finite(Rational),
    Infinite,
}

impl AValue {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            AValue::Finite(r) => Some(r),
            AValue::Infinite => None,
        }
    }
}

impl std::fmt::Display for AValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AValue::Finite(r) => write!(f, "{}", r.to_exact_string()),
            AValue::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for AValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ACertificate {
    /// `a·L + K = Σ coefficients[i]·rays[i]` with all coefficients ≥ 0.
    Decomposition { rays: Vec<LatticeVector>, coefficients: Vec<Rational> },
    /// A curve class `w`, nonnegative on the pseudo-effective cone, with `w·L ≤ 0` and `w·K < 0`.
    Separating { functional: LatticeVector },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AInvariantResult {
    pub value: AValue,
    pub certificate: ACertificate,
}

impl AInvariantResult {
    /// Re-checks the certificate against the model with exact arithmetic.
    pub fn verify(&self, m: &FanoThreefoldModel, l: &LatticeVector) -> bool {
        let k: Vec<i64> = m.anticanonical.coords().iter().map(|x| -x).collect();
        match (&self.value, &self.certificate) {
            (AValue::Finite(a), ACertificate::Decomposition { rays, coefficients }) => {
                if rays.len() != coefficients.len() || coefficients.iter().any(Rational::is_negative) {
                    return false;
                }
                let target: Vec<Rational> = l
                    .coords()
                    .iter()
                    .zip(&k)
                    .map(|(&li, &ki)| a * Rational::integer(li) + Rational::integer(ki))
                    .collect();
                let mut sum = vec![Rational::zero(); m.rank];
                for (r, c) in rays.iter().zip(coefficients) {
                    if !m.pseff_divisor_cone.contains(r) {
                        return false;
                    }
                    for (s, &x) in sum.iter_mut().zip(r.coords()) {
                        *s += c * Rational::integer(x);
                    }
                }
                sum == target
            }
            (AValue::Infinite, ACertificate::Separating { functional }) => {
                let w = functional.coords();
                m.pseff_divisor_cone.rays().iter().all(|r| m.intersect(r.coords(), w) >= 0)
                    && m.intersect(l.coords(), w) <= 0
                    && m.intersect(&k, w) < 0
            }
            _ => false,
        }
    }
}

fn require_nef(m: &FanoThreefoldModel, l: &LatticeVector) -> Result<()> {
    m.check_divisor(l)?;
    if let Some(r) = m.nef_curve_cone.rays().iter().find(|r| m.intersect(l.coords(), r.coords()) < 0) {
        return Err(Error::UnsupportedInput(format!("L = {l} is negative on the nef ray {r}")));
    }
    Ok(())
}

/// `a(X, L) = inf { t : tL + K_X pseudo-effective }`, with a certificate.
pub fn a_invariant(m: &FanoThreefoldModel, l: &LatticeVector) -> Result<AInvariantResult> {
    require_nef(m, l)?;
    let mut best: Option<Rational> = None;
    for r in m.nef_curve_cone.rays() {
        let lr = m.intersect(l.coords(), r.coords());
        if lr == 0 {
            return Ok(AInvariantResult {
                value: AValue::Infinite,
                certificate: ACertificate::Separating { functional: r.clone() },
            });
        }
        let t = Rational::new(m.degree(r.coords()), lr)?;
        if best.as_ref().is_none_or(|b| t > *b) {
            best = Some(t);
        }
    }
    let a = best.ok_or_else(|| Error::Model("nef cone has no rays".into()))?;
    let target: Vec<Rational> = l
        .coords()
        .iter()
        .zip(m.anticanonical.coords())
        .map(|(&li, &ak)| &a * Rational::integer(li) - Rational::integer(ak))
        .collect();
    let coefficients = m.pseff_divisor_cone.decompose(&target).ok_or_else(|| {
        Error::Model("a·L + K is not a combination of the pseudo-effective rays; cones are inconsistent".into())
    })?;
    Ok(AInvariantResult {
        value: AValue::Finite(a),
        certificate: ACertificate::Decomposition { rays: m.pseff_divisor_cone.rays().to_vec(), coefficients },
    })
}

/// Nef curve rays on the face where `K + a(X, L)·L` vanishes.
pub fn b_face(m: &FanoThreefoldModel, l: &LatticeVector) -> Result<Vec<LatticeVector>> {
    let res = a_invariant(m, l)?;
    let a = res
        .value
        .finite()
        .ok_or_else(|| Error::UndefinedInvariant(format!("b-invariant of {l}: a-invariant is infinite")))?;
    Ok(m.nef_curve_cone
        .rays()
        .iter()
        .filter(|r| {
            let v = a * Rational::integer(m.intersect(l.coords(), r.coords())) - Rational::integer(m.degree(r.coords()));
            v.is_zero()
        })
        .cloned()
        .collect())
}

/// Dimension of the span of the face of the nef cone annihilated by `K + a·L`.
pub fn b_invariant(m: &FanoThreefoldModel, l: &LatticeVector) -> Result<usize> {
    let face: Vec<Vec<i64>> = b_face(m, l)?.iter().map(|r| r.coords().to_vec()).collect();
    Ok(rank_i64(&face))
}

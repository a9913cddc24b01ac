//! The Manin counting function `N(X, −K_X, q, d)`, the constant `α(X, −K_X)`,
//! the predicted asymptotic and polynomial growth checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::enumerate::{for_each_point, points_per_degree};
use crate::lattice::{LatticeVector, RationalPolytope, Space};
use crate::models::{minimal_degree, FanoThreefoldModel, RuleKind};
use crate::rational::Rational;

/// `W[k] = Σ C_α` over nef integral `α` of degree `k`, for `k ≤ max_degree`;
/// entries below the rule's minimal degree are zero.
pub fn degree_weights(m: &FanoThreefoldModel, max_degree: i64) -> Result<Vec<u64>> {
    let deg = m.degree_functional();
    let min = m.component_rule.min_degree;
    let mut w = match m.component_rule.kind {
        RuleKind::UniquePerNefClass => points_per_degree(&m.nef_curve_cone, &deg, max_degree)?,
        RuleKind::ExplicitTable => {
            let mut w = vec![0u64; usize::try_from(max_degree.max(0)).unwrap_or(0) + 1];
            let mut missing: Option<Error> = None;
            for_each_point(&m.nef_curve_cone, &deg, max_degree, |p| {
                let k = crate::lattice::dot(&deg, p);
                if k < min || missing.is_some() {
                    return;
                }
                match m.component_rule.count(p) {
                    Ok(c) => w[k as usize] += c,
                    Err(e) => missing = Some(e),
                }
            })?;
            if let Some(e) = missing {
                return Err(e);
            }
            w
        }
    };
    for (k, x) in w.iter_mut().enumerate() {
        if (k as i64) < min {
            *x = 0;
        }
    }
    Ok(w)
}

fn check_q_positive(q: &Rational) -> Result<()> {
    if !q.is_positive() {
        return Err(Error::Input(format!("q must be positive, got {q}")));
    }
    Ok(())
}

/// Running sums `Σ_{k ≤ K} W[k]·q^k` for every `K` in `0..weights.len()`.
fn weighted_prefix_sums(weights: &[u64], q: &Rational) -> Vec<Rational> {
    let mut out = Vec::with_capacity(weights.len());
    let mut acc = Rational::zero();
    let mut power = Rational::one();
    for &w in weights {
        if w != 0 {
            acc += &power * Rational::integer(w as i64);
        }
        out.push(acc.clone());
        power = &power * q;
    }
    out
}

/// `N(X, −K_X, q, d) = Σ C_α·q^(−K·α)` over nef `α` with `min_degree ≤ −K·α ≤ d·r`.
pub fn count_exact(m: &FanoThreefoldModel, q: &Rational, d: i64) -> Result<Rational> {
    check_q_positive(q)?;
    if d < 1 {
        return Err(Error::Input(format!("d must be at least 1, got {d}")));
    }
    let top = d * minimal_degree(m)?;
    let w = degree_weights(m, top)?;
    Ok(weighted_prefix_sums(&w, q).pop().expect("nonempty"))
}

/// The slice `{α nef : −K·α ≤ r}` with vertices `0` and `r·ρ_i/deg ρ_i` over the nef rays.
pub fn alpha_slice(m: &FanoThreefoldModel) -> Result<RationalPolytope> {
    let r = minimal_degree(m)?;
    let mut vertices = vec![vec![Rational::zero(); m.rank]];
    for ray in m.nef_curve_cone.rays() {
        let deg = m.degree(ray.coords());
        if deg <= 0 {
            return Err(Error::Grading(format!("anticanonical degree {deg} on nef ray {ray}")));
        }
        let scale = Rational::new(r, deg)?;
        vertices.push(ray.coords().iter().map(|&x| &scale * Rational::integer(x)).collect());
    }
    RationalPolytope::new(Space::CurveSpace, vertices)
}

/// `α(X, −K_X) = ρ·vol(slice)`, triangulating from the origin.
pub fn alpha_constant(m: &FanoThreefoldModel) -> Result<Rational> {
    alpha_constant_with_apex(m, 0)
}

/// Same constant, triangulating from the slice vertex with index `apex`
/// (0 is the origin, `i ≥ 1` the scaled `i`-th nef ray).
pub fn alpha_constant_with_apex(m: &FanoThreefoldModel, apex: usize) -> Result<Rational> {
    let slice = alpha_slice(m)?;
    Ok(Rational::integer(m.rank as i64) * slice.volume_from(apex)?)
}

/// `q^(dim X − 3)·α/(1 − q^(−r))·q^(d·r)·d^(ρ−1)` with `dim X = 3`.
pub fn predicted(m: &FanoThreefoldModel, q: &Rational, d: i64) -> Result<Rational> {
    predicted_with_alpha(m, q, d, &alpha_constant(m)?)
}

fn predicted_with_alpha(m: &FanoThreefoldModel, q: &Rational, d: i64, alpha: &Rational) -> Result<Rational> {
    if *q <= Rational::one() {
        return Err(Error::DivergentPrediction(format!("q = {q} must exceed 1")));
    }
    if d < 1 {
        return Err(Error::Input(format!("d must be at least 1, got {d}")));
    }
    let r = minimal_degree(m)?;
    let denom = Rational::one() - q.pow(-r)?;
    let rho = m.rank as i64;
    Ok(alpha / denom * q.pow(d * r)? * Rational::integer(d).pow(rho - 1)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountingReport {
    pub model: String,
    pub q: Rational,
    pub d_max: i64,
    pub stride: i64,
    pub alpha: Rational,
    pub r: i64,
    pub exact_values: Vec<(i64, Rational)>,
    pub predicted: Vec<(i64, Rational)>,
    pub ratios: Vec<(i64, Rational)>,
}

/// Exact and predicted counts with their ratios at `d = stride, 2·stride, … ≤ d_max`.
/// Only `d` whose range `d·r` reaches the minimal counted degree are listed.
pub fn convergence_report(m: &FanoThreefoldModel, q: &Rational, d_max: i64, stride: i64) -> Result<CountingReport> {
    if *q <= Rational::one() {
        return Err(Error::DivergentPrediction(format!("q = {q} must exceed 1")));
    }
    if stride < 1 {
        return Err(Error::Input(format!("stride must be positive, got {stride}")));
    }
    let r = minimal_degree(m)?;
    let alpha = alpha_constant(m)?;
    let top = d_max.max(0) * r;
    let sums = weighted_prefix_sums(&degree_weights(m, top)?, q);
    let mut report = CountingReport {
        model: m.name.clone(),
        q: q.clone(),
        d_max,
        stride,
        alpha: alpha.clone(),
        r,
        exact_values: vec![],
        predicted: vec![],
        ratios: vec![],
    };
    let mut d = stride;
    while d <= d_max {
        if d * r >= m.component_rule.min_degree {
            let exact = sums[(d * r) as usize].clone();
            let pred = predicted_with_alpha(m, q, d, &alpha)?;
            report.ratios.push((d, &exact / &pred));
            report.exact_values.push((d, exact));
            report.predicted.push((d, pred));
        }
        d += stride;
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthReport {
    pub model: String,
    pub rho: usize,
    /// `(d, number of (class, component) pairs of degree ≤ d)` for `d = 1..=d_max`.
    pub counts: Vec<(i64, u64)>,
    /// Least integer `c` with `count(d) ≤ c·d^ρ` on the whole range.
    pub c: u64,
    /// `(d, count(2d)/count(d))` whenever `2d ≤ d_max` and `count(d) > 0`.
    pub doubling_ratios: Vec<(i64, Rational)>,
}

impl GrowthReport {
    pub fn count(&self, d: i64) -> Option<u64> {
        self.counts.iter().find(|(x, _)| *x == d).map(|(_, c)| *c)
    }

    pub fn doubling_ratio(&self, d: i64) -> Option<&Rational> {
        self.doubling_ratios.iter().find(|(x, _)| *x == d).map(|(_, r)| r)
    }
}

/// Counts Manin classes by degree and fits the bound `count(d) ≤ c·d^ρ`.
pub fn growth_bound_check(m: &FanoThreefoldModel, d_max: i64) -> Result<GrowthReport> {
    let w = degree_weights(m, d_max.max(0))?;
    let rho = m.rank;
    let mut counts = Vec::new();
    let mut running = 0u64;
    let mut c = 0u64;
    for d in 1..=d_max.max(0) {
        running += w[d as usize];
        counts.push((d, running));
        let scale = (d as u128).pow(rho as u32);
        let need = (running as u128).div_ceil(scale) as u64;
        c = c.max(need);
    }
    let mut doubling_ratios = Vec::new();
    for d in 1..=d_max / 2 {
        let a = counts[(d - 1) as usize].1;
        let b = counts[(2 * d - 1) as usize].1;
        if a > 0 {
            doubling_ratios.push((d, Rational::new(b as i64, a as i64)?));
        }
    }
    Ok(GrowthReport { model: m.name.clone(), rho, counts, c, doubling_ratios })
}

/// Nef integral classes counted by `count_exact`, with their component counts.
pub fn counted_classes(m: &FanoThreefoldModel, max_degree: i64) -> Result<Vec<(LatticeVector, u64)>> {
    let deg = LatticeVector::divisor(m.degree_functional());
    let min = m.component_rule.min_degree;
    crate::lattice::enumerate_lattice_points(&m.nef_curve_cone, &deg, max_degree)?
        .into_iter()
        .filter(|p| m.degree(p.coords()) >= min)
        .map(|p| {
            let c = m.component_rule.count(p.coords())?;
            Ok((p, c))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::builtin;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn quartic_small_values() {
        let m = builtin("quartic").unwrap();
        assert_eq!(count_exact(&m, &r(2, 1), 4).unwrap(), r(28, 1));
        for d in 1..10 {
            assert_eq!(count_exact(&m, &Rational::one(), d).unwrap(), r(d - 1, 1));
        }
    }

    #[test]
    fn two_e5_class_count() {
        let m = builtin("two_e5").unwrap();
        assert_eq!(count_exact(&m, &Rational::one(), 5).unwrap(), r(8, 1));
    }

    #[test]
    fn alpha_values() {
        assert_eq!(alpha_constant(&builtin("quartic").unwrap()).unwrap(), Rational::one());
        assert_eq!(alpha_constant(&builtin("two_e5").unwrap()).unwrap(), r(1, 15));
        assert_eq!(alpha_constant(&builtin("p_o_o2").unwrap()).unwrap(), r(1, 10));
    }

    #[test]
    fn predicted_values() {
        let q = r(2, 1);
        assert_eq!(predicted(&builtin("quartic").unwrap(), &q, 10).unwrap(), r(2048, 1));
        assert_eq!(predicted(&builtin("two_e5").unwrap(), &q, 10).unwrap(), r(40960, 3));
        assert!(matches!(
            predicted(&builtin("quartic").unwrap(), &Rational::one(), 10),
            Err(Error::DivergentPrediction(_))
        ));
    }

    #[test]
    fn report_below_min_degree_is_empty() {
        let m = builtin("quartic").unwrap();
        let rep = convergence_report(&m, &r(2, 1), 1, 1).unwrap();
        assert!(rep.exact_values.is_empty());
        let rep = convergence_report(&m, &r(2, 1), 30, 30).unwrap();
        let expect = r(1, 1) - Rational::one() / Rational::integer(2).pow(29).unwrap();
        assert_eq!(rep.ratios, vec![(30, expect)]);
    }

    #[test]
    fn quartic_growth() {
        let g = growth_bound_check(&builtin("quartic").unwrap(), 40).unwrap();
        assert_eq!(g.c, 1);
        assert_eq!(g.count(1), Some(0));
        assert_eq!(g.count(40), Some(39));
        assert_eq!(g.doubling_ratio(20), Some(&r(39, 19)));
        let g = growth_bound_check(&builtin("quartic").unwrap(), 1).unwrap();
        assert_eq!(g.counts, vec![(1, 0)]);
    }
}

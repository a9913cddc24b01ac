use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::FanoThreefoldModel;
use super::EType;
use crate::lattice::dual_cone;

/// Outcome of one named consistency check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub model: String,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: impl Into<String>, failures: Vec<String>) {
        let passed = failures.is_empty();
        let detail = if passed { "ok".to_string() } else { failures.join("; ") };
        self.checks.push(CheckResult { name: name.into(), passed, detail });
    }
}

/// Model-specific facts declared in the metadata map.
#[derive(Debug, Default, Deserialize)]
struct Annotations {
    #[serde(default)]
    named_divisors: BTreeMap<String, Vec<i64>>,
    #[serde(default)]
    named_curves: BTreeMap<String, Vec<i64>>,
    #[serde(default)]
    divisor_identities: Vec<Identity>,
    #[serde(default)]
    curve_identities: Vec<Identity>,
    #[serde(default)]
    pairing_profiles: Vec<Profile>,
    #[serde(default)]
    curve_degrees: BTreeMap<String, i64>,
    #[serde(default)]
    identity_pairing_assumed: Option<bool>,
}

#[derive(Debug, Deserialize)]
struct Identity {
    name: String,
    lhs: BTreeMap<String, i64>,
    rhs: BTreeMap<String, i64>,
}

#[derive(Debug, Deserialize)]
struct Profile {
    divisor: BTreeMap<String, i64>,
    expect: BTreeMap<String, String>,
}

fn combine(names: &BTreeMap<String, Vec<i64>>, combo: &BTreeMap<String, i64>, rank: usize) -> Result<Vec<i64>, String> {
    let mut out = vec![0i64; rank];
    for (name, coeff) in combo {
        let v = names.get(name).ok_or_else(|| format!("unknown name {name:?}"))?;
        if v.len() != rank {
            return Err(format!("{name} has rank {}", v.len()));
        }
        for (o, x) in out.iter_mut().zip(v) {
            *o += coeff * x;
        }
    }
    Ok(out)
}

/// Renders a combination as `E0 - Einf + 2H` (terms in name order).
fn format_combo(combo: &BTreeMap<String, i64>) -> String {
    let mut out = String::new();
    for (n, &c) in combo.iter().filter(|(_, &c)| c != 0) {
        let sign = if c < 0 { "-" } else { "+" };
        if out.is_empty() {
            if c < 0 {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        if c.abs() != 1 {
            out.push_str(&c.abs().to_string());
        }
        out.push_str(n);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Parses `"=n"`, `">n"`, `"<n"`, `">=n"`, `"<=n"` or a bare integer, and tests `value`.
fn meets(expect: &str, value: i64) -> Result<bool, String> {
    let e = expect.trim();
    let (op, rest) = if let Some(r) = e.strip_prefix(">=") {
        (">=", r)
    } else if let Some(r) = e.strip_prefix("<=") {
        ("<=", r)
    } else if let Some(r) = e.strip_prefix('>') {
        (">", r)
    } else if let Some(r) = e.strip_prefix('<') {
        ("<", r)
    } else if let Some(r) = e.strip_prefix('=') {
        ("=", r)
    } else {
        ("=", e)
    };
    let n: i64 = rest.trim().parse().map_err(|_| format!("bad expectation {expect:?}"))?;
    Ok(match op {
        ">=" => value >= n,
        "<=" => value <= n,
        ">" => value > n,
        "<" => value < n,
        _ => value == n,
    })
}

/// Runs every consistency check on `m`. Never fails; problems are report entries.
pub fn validate_model(m: &FanoThreefoldModel) -> ValidationReport {
    let mut report = ValidationReport { model: m.name.clone(), checks: Vec::new() };
    let rays: Vec<Vec<i64>> = m.nef_curve_cone.ray_coords();

    let mut names = m.divisor_basis.clone();
    names.sort();
    names.dedup();
    report.push(
        "divisor basis names distinct",
        if names.len() == m.rank { vec![] } else { vec!["repeated basis name".into()] },
    );

    let mut f = Vec::new();
    if let Err(e) = m.pseff_divisor_cone.check_invariants() {
        f.push(format!("pseudo-effective cone: {e}"));
    }
    if let Err(e) = m.nef_curve_cone.check_invariants() {
        f.push(format!("nef cone: {e}"));
    }
    report.push("cone invariants", f);

    let f = match dual_cone(&m.pseff_divisor_cone, &m.pairing) {
        Ok(d) if d.same_as(&m.nef_curve_cone) => vec![],
        Ok(d) => vec![format!("declared nef rays {:?}, dual of pseudo-effective cone {:?}", rays, d.ray_coords())],
        Err(e) => vec![format!("dual cone failed: {e}")],
    };
    report.push("nef cone dual", f);

    let f = rays
        .iter()
        .filter(|r| m.degree(r) <= 0)
        .map(|r| format!("-K·{r:?} = {} is not positive", m.degree(r)))
        .collect();
    report.push("fano", f);

    let f = m
        .line_classes
        .iter()
        .filter(|l| m.degree(l.class.coords()) != 1)
        .map(|l| format!("{} has degree {}", l.label, m.degree(l.class.coords())))
        .collect();
    report.push("line degrees", f);
    let f = m
        .conic_classes
        .iter()
        .filter(|l| m.degree(l.class.coords()) != 2)
        .map(|l| format!("{} has degree {}", l.label, m.degree(l.class.coords())))
        .collect();
    report.push("conic degrees", f);

    let mut f = Vec::new();
    for d in m.e5_divisors() {
        match &d.line_class {
            None => f.push(format!("E5 divisor {} has no line class", d.label)),
            Some(l) => {
                let dl = m.intersect(d.divisor_class.coords(), l.coords());
                if dl != -2 {
                    f.push(format!("{}·line = {dl}, expected -2", d.label));
                }
                let deg = m.degree(l.coords());
                if deg != 1 {
                    f.push(format!("line of {} has degree {deg}", d.label));
                }
            }
        }
    }
    report.push("E5 records", f);

    let f = m
        .contractible_divisors
        .iter()
        .filter(|d| !m.pseff_divisor_cone.contains(&d.divisor_class))
        .map(|d| format!("{} is not pseudo-effective", d.label))
        .collect();
    report.push("contractible divisors pseudo-effective", f);

    let mut f = Vec::new();
    for fib in &m.fibrations {
        for c in &fib.contracted_face {
            if !m.is_nef(c.coords()) {
                f.push(format!("{}: contracted class {c} is not nef", fib.label));
            }
            let v = m.intersect(fib.pullback.coords(), c.coords());
            if v != 0 {
                f.push(format!("{}: pullback·{c} = {v}", fib.label));
            }
        }
    }
    report.push("fibrations", f);

    let f = m
        .component_rule
        .table
        .keys()
        .filter(|c| c.len() != m.rank || !m.is_nef(c))
        .map(|c| format!("table class {c:?} is not nef"))
        .collect();
    report.push("component rule", f);

    let ann: Annotations = match serde_json::from_value(serde_json::Value::Object(
        m.metadata.clone().into_iter().collect(),
    )) {
        Ok(a) => {
            report.push("metadata annotations", vec![]);
            a
        }
        Err(e) => {
            report.push("metadata annotations", vec![e.to_string()]);
            return report;
        }
    };

    if let Some(flag) = ann.identity_pairing_assumed {
        let ok = !flag || m.pairing.is_identity();
        report.push(
            "identity pairing flag",
            if ok { vec![] } else { vec!["flag set but pairing is not the identity".into()] },
        );
    }

    let mut divisors: BTreeMap<String, Vec<i64>> = BTreeMap::new();
    for (i, n) in m.divisor_basis.iter().enumerate() {
        let mut e = vec![0; m.rank];
        e[i] = 1;
        divisors.insert(n.clone(), e);
    }
    divisors.insert("-K".into(), m.anticanonical.coords().to_vec());
    for d in &m.contractible_divisors {
        divisors.entry(d.label.clone()).or_insert_with(|| d.divisor_class.coords().to_vec());
    }
    for (n, v) in &ann.named_divisors {
        divisors.entry(n.clone()).or_insert_with(|| v.clone());
    }
    let mut curves: BTreeMap<String, Vec<i64>> = ann.named_curves.clone();
    for l in m.line_classes.iter().chain(&m.conic_classes) {
        curves.entry(l.label.clone()).or_insert_with(|| l.class.coords().to_vec());
    }

    let mut check_identities = |kind: &str, ids: &[Identity], table: &BTreeMap<String, Vec<i64>>| {
        for id in ids {
            let f = match (combine(table, &id.lhs, m.rank), combine(table, &id.rhs, m.rank)) {
                (Ok(l), Ok(r)) if l == r => vec![],
                (Ok(l), Ok(r)) => vec![format!("{l:?} != {r:?}")],
                (Err(e), _) | (_, Err(e)) => vec![e],
            };
            report.push(format!("{kind} identity: {}", id.name), f);
        }
    };
    check_identities("divisor", &ann.divisor_identities, &divisors);
    check_identities("curve", &ann.curve_identities, &curves);

    for p in &ann.pairing_profiles {
        let name = format!("pairing profile: {}", format_combo(&p.divisor));
        let f = match combine(&divisors, &p.divisor, m.rank) {
            Err(e) => vec![e],
            Ok(d) => {
                let mut f = Vec::new();
                for (curve, expect) in &p.expect {
                    match curves.get(curve) {
                        None => f.push(format!("unknown curve {curve:?}")),
                        Some(c) => {
                            let v = m.intersect(&d, c);
                            match meets(expect, v) {
                                Ok(true) => {}
                                Ok(false) => f.push(format!("on {curve}: {v}, expected {expect}")),
                                Err(e) => f.push(e),
                            }
                        }
                    }
                }
                f
            }
        };
        report.push(name, f);
    }

    if !ann.curve_degrees.is_empty() {
        let mut f = Vec::new();
        for (curve, &deg) in &ann.curve_degrees {
            match curves.get(curve) {
                None => f.push(format!("unknown curve {curve:?}")),
                Some(c) if m.degree(c) != deg => f.push(format!("{curve} has degree {}, expected {deg}", m.degree(c))),
                Some(_) => {}
            }
        }
        report.push("curve degrees", f);
    }

    // Contractions of type E1 contract lines that meet the divisor negatively.
    let f = m
        .contractible_divisors
        .iter()
        .filter(|d| d.etype == EType::E1)
        .filter_map(|d| d.line_class.as_ref().map(|l| (d, l)))
        .filter(|(d, l)| m.intersect(d.divisor_class.coords(), l.coords()) != -1)
        .map(|(d, _)| format!("{}: fiber does not meet the divisor with multiplicity -1", d.label))
        .collect();
    report.push("E1 fibers", f);

    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{builtin, builtin_models, FanoThreefoldModel};

    #[test]
    fn builtins_pass() {
        for m in builtin_models() {
            let r = validate_model(&m);
            let failed: Vec<_> = r.failures().collect();
            assert!(failed.is_empty(), "{}: {failed:?}", m.name);
        }
    }

    #[test]
    fn two_e5_checks_declared_facts() {
        let r = validate_model(&builtin("two_e5").unwrap());
        for name in [
            "divisor identity: E = E0 - Einf + 2H",
            "divisor identity: E + E' = 4H",
            "divisor identity: -K = 3H + E0 + Einf",
            "curve identity: R1 + R5 + R6 = R3 + R4",
            "curve identity: R3 = 2R1 + l0",
            "pairing profile: E0 - Einf + H",
            "curve degrees",
        ] {
            assert!(r.check(name).is_some_and(|c| c.passed), "{name}");
        }
    }

    #[test]
    fn corrupted_nef_ray_fails_dual_check() {
        let mut spec = builtin("two_e5").unwrap().spec().clone();
        spec.nef_curve_rays = Some(vec![vec![0, 1, 1], vec![1, 0, 0], vec![1, 0, 3], vec![1, 2, 0]]);
        let m = FanoThreefoldModel::from_spec(spec).unwrap();
        let r = validate_model(&m);
        assert!(!r.passed());
        assert!(!r.check("nef cone dual").unwrap().passed);
    }

    #[test]
    fn wrong_identity_reported() {
        let mut spec = builtin("p_o_o2").unwrap().spec().clone();
        spec.anticanonical = vec![4, 2];
        let m = FanoThreefoldModel::from_spec(spec).unwrap();
        let r = validate_model(&m);
        assert!(!r.check("divisor identity: -K = 2E0 + 5H").unwrap().passed);
        assert!(!r.check("E5 records").unwrap().passed);
    }

    #[test]
    fn expectation_syntax() {
        assert!(meets(">0", 3).unwrap());
        assert!(!meets("=-1", 0).unwrap());
        assert!(meets("-1", -1).unwrap());
        assert!(meets("<=2", 2).unwrap());
        assert!(meets("x", 0).is_err());
    }

    #[test]
    fn combination_rendering() {
        let c: BTreeMap<String, i64> = [("H".to_string(), 2), ("E0".to_string(), -1)].into_iter().collect();
        assert_eq!(format_combo(&c), "-E0 + 2H");
    }
}

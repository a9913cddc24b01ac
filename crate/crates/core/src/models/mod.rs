//! Numerical packages of Fano threefolds: file format, loader, built-ins and validation.

mod file;
mod validate;

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

pub use file::{
    ComponentRuleSpec, ContractibleDivisorSpec, CountEntry, FibrationSpec, LabeledClass, ModelSpec,
};
pub use validate::{validate_model, CheckResult, ValidationReport};

use crate::error::{Error, Result};
use crate::lattice::linalg::rank_i64;
use crate::lattice::{dual_cone, LatticeVector, Pairing, RationalPolyhedralCone, Space};

/// Mori's five types of divisorial contractions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, serde::Deserialize)]
pub enum EType {
    E1,
    E2,
    E3,
    E4,
    E5,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub enum FibrationKind {
    DelPezzoFibration,
    ConicBundle,
    P1Bundle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub enum RuleKind {
    UniquePerNefClass,
    ExplicitTable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContractibleDivisor {
    pub label: String,
    pub divisor_class: LatticeVector,
    pub etype: EType,
    pub flags: Vec<String>,
    /// For E5 the line class in the exceptional plane; for E1 a fiber of the ruling.
    pub line_class: Option<LatticeVector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fibration {
    pub label: String,
    pub kind: FibrationKind,
    pub base_dimension: u8,
    /// Divisor pulled back from the base; vanishes on the contracted face.
    pub pullback: LatticeVector,
    pub contracted_face: Vec<LatticeVector>,
}

/// Number of Manin components `C_α` per nef class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentCountRule {
    pub kind: RuleKind,
    pub table: BTreeMap<Vec<i64>, u64>,
    pub min_degree: i64,
}

impl ComponentCountRule {
    /// `C_α` for a nef class `α` of degree at least `min_degree`.
    pub fn count(&self, alpha: &[i64]) -> Result<u64> {
        match self.kind {
            RuleKind::UniquePerNefClass => Ok(1),
            RuleKind::ExplicitTable => self.table.get(alpha).copied().ok_or_else(|| {
                Error::IncompleteRule(format!("no component count recorded for class {alpha:?}"))
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NamedClass {
    pub label: String,
    pub class: LatticeVector,
}

/// A Fano threefold's complete numerical package.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanoThreefoldModel {
    pub name: String,
    pub rank: usize,
    pub divisor_basis: Vec<String>,
    pub pairing: Pairing,
    pub anticanonical: LatticeVector,
    pub pseff_divisor_cone: RationalPolyhedralCone,
    pub nef_curve_cone: RationalPolyhedralCone,
    pub contractible_divisors: Vec<ContractibleDivisor>,
    pub fibrations: Vec<Fibration>,
    pub line_classes: Vec<NamedClass>,
    pub conic_classes: Vec<NamedClass>,
    pub component_rule: ComponentCountRule,
    pub metadata: BTreeMap<String, serde_json::Value>,
    spec: ModelSpec,
}

fn vector(space: Space, rank: usize, v: &[i64], what: &str) -> Result<LatticeVector> {
    if v.len() != rank {
        return Err(Error::Model(format!("{what} {v:?} does not have rank {rank}")));
    }
    LatticeVector::new(space, v.to_vec())
}

impl FanoThreefoldModel {
    /// Builds the model from its file form. Structural problems (wrong lengths,
    /// degenerate pairing, non-pointed cones) are errors; mathematical
    /// inconsistencies are left for [`validate_model`].
    pub fn from_spec(spec: ModelSpec) -> Result<Self> {
        let rank = spec.rank;
        if rank == 0 {
            return Err(Error::Model("rank must be positive".into()));
        }
        if spec.divisor_basis.len() != rank {
            return Err(Error::Model(format!(
                "{} basis names for rank {rank}",
                spec.divisor_basis.len()
            )));
        }
        let pairing = match &spec.pairing {
            Some(m) => {
                if m.len() != rank {
                    return Err(Error::Model("pairing matrix size differs from rank".into()));
                }
                Pairing::new(m.clone()).map_err(|e| Error::Model(e.to_string()))?
            }
            None => Pairing::identity(rank),
        };
        let div = |v: &[i64], what: &str| vector(Space::DivisorSpace, rank, v, what);
        let cur = |v: &[i64], what: &str| vector(Space::CurveSpace, rank, v, what);

        let anticanonical = div(&spec.anticanonical, "anticanonical class")?;
        for r in &spec.pseff_divisor_rays {
            div(r, "pseudo-effective ray")?;
        }
        let pseff = RationalPolyhedralCone::from_rays(Space::DivisorSpace, spec.pseff_divisor_rays.clone())
            .map_err(|e| Error::Model(format!("pseudo-effective cone: {e}")))?;
        let nef = match &spec.nef_curve_rays {
            Some(rays) => {
                for r in rays {
                    cur(r, "nef ray")?;
                }
                RationalPolyhedralCone::from_rays(Space::CurveSpace, rays.clone())
                    .map_err(|e| Error::Model(format!("nef cone: {e}")))?
            }
            None => dual_cone(&pseff, &pairing)?,
        };

        let mut contractible = Vec::new();
        for c in &spec.contractible_divisors {
            contractible.push(ContractibleDivisor {
                label: c.label.clone(),
                divisor_class: div(&c.divisor_class, "contractible divisor")?,
                etype: c.etype,
                flags: c.flags.clone(),
                line_class: c.line_class.as_deref().map(|l| cur(l, "line class")).transpose()?,
            });
        }
        let mut fibrations = Vec::new();
        for f in &spec.fibrations {
            if !(1..=2).contains(&f.base_dimension) {
                return Err(Error::Model(format!("fibration {} has base dimension {}", f.label, f.base_dimension)));
            }
            fibrations.push(Fibration {
                label: f.label.clone(),
                kind: f.kind,
                base_dimension: f.base_dimension,
                pullback: div(&f.pullback, "fibration pullback")?,
                contracted_face: f
                    .contracted_face
                    .iter()
                    .map(|v| cur(v, "contracted class"))
                    .collect::<Result<_>>()?,
            });
        }
        let named = |list: &[LabeledClass]| -> Result<Vec<NamedClass>> {
            list.iter()
                .map(|l| Ok(NamedClass { label: l.label.clone(), class: cur(&l.class, &l.label)? }))
                .collect()
        };
        let line_classes = named(&spec.line_classes)?;
        let conic_classes = named(&spec.conic_classes)?;

        let rule = &spec.component_rule;
        let mut table = BTreeMap::new();
        if let Some(entries) = &rule.table {
            for e in entries {
                cur(&e.class, "component table class")?;
                if table.insert(e.class.clone(), e.count).is_some() {
                    return Err(Error::Model(format!("class {:?} listed twice in component table", e.class)));
                }
            }
        }
        if rule.kind == RuleKind::ExplicitTable && rule.table.is_none() {
            return Err(Error::Model("ExplicitTable rule without a table".into()));
        }
        let component_rule = ComponentCountRule { kind: rule.kind, table, min_degree: rule.min_degree };

        Ok(FanoThreefoldModel {
            name: spec.name.clone(),
            rank,
            divisor_basis: spec.divisor_basis.clone(),
            pairing,
            anticanonical,
            pseff_divisor_cone: pseff,
            nef_curve_cone: nef,
            contractible_divisors: contractible,
            fibrations,
            line_classes,
            conic_classes,
            component_rule,
            metadata: spec.metadata.clone(),
            spec,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ModelSpec = serde_json::from_str(text)?;
        Self::from_spec(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// The file form this model was built from.
    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.spec).expect("model spec serializes")
    }

    /// Covector on curve coordinates computing the anticanonical degree.
    pub fn degree_functional(&self) -> Vec<i64> {
        self.pairing.divisor_functional(self.anticanonical.coords())
    }

    /// Anticanonical degree `−K·α`.
    pub fn degree(&self, alpha: &[i64]) -> i64 {
        crate::lattice::dot(&self.degree_functional(), alpha)
    }

    /// Intersection number of a divisor with a curve, both given in coordinates.
    pub fn intersect(&self, d: &[i64], c: &[i64]) -> i64 {
        crate::lattice::dot(&self.pairing.divisor_functional(d), c)
    }

    pub fn is_nef(&self, alpha: &[i64]) -> bool {
        alpha.len() == self.rank && self.nef_curve_cone.contains_coords(alpha)
    }

    pub fn e5_divisors(&self) -> impl Iterator<Item = &ContractibleDivisor> {
        self.contractible_divisors.iter().filter(|c| c.etype == EType::E5)
    }

    pub fn has_e5(&self) -> bool {
        self.e5_divisors().next().is_some()
    }

    pub(crate) fn check_curve(&self, alpha: &LatticeVector) -> Result<()> {
        if alpha.space() != Space::CurveSpace || alpha.rank() != self.rank {
            return Err(Error::Input(format!(
                "expected a curve class of rank {}, got {alpha:?}",
                self.rank
            )));
        }
        Ok(())
    }

    pub(crate) fn check_divisor(&self, d: &LatticeVector) -> Result<()> {
        if d.space() != Space::DivisorSpace || d.rank() != self.rank {
            return Err(Error::Input(format!(
                "expected a divisor class of rank {}, got {d:?}",
                self.rank
            )));
        }
        Ok(())
    }
}

/// Smallest positive anticanonical degree of an integral curve class.
pub fn minimal_degree(m: &FanoThreefoldModel) -> Result<i64> {
    let g = crate::lattice::content(&m.degree_functional());
    if g == 0 {
        return Err(Error::Model("anticanonical functional vanishes identically".into()));
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub class: LatticeVector,
    pub degree: i64,
    pub nef: bool,
    /// Values of the nef-cone facet normals on the class.
    pub facet_profile: Vec<i64>,
    pub matches: Vec<String>,
    pub fibration_contracted: bool,
    pub good_class: bool,
}

/// Numerical profile of a curve class: degree, nefness, distinguished-class matches
/// and whether it passes the good-component filter (nef, degree ≥ 3, not contracted).
pub fn classify_class(m: &FanoThreefoldModel, alpha: &LatticeVector) -> Result<ClassReport> {
    m.check_curve(alpha)?;
    let a = alpha.coords();
    let degree = m.degree(a);
    let nef = m.is_nef(a);
    let mut matches = Vec::new();
    for l in &m.line_classes {
        if l.class == *alpha {
            matches.push(format!("line: {}", l.label));
        }
    }
    for c in &m.conic_classes {
        if c.class == *alpha {
            matches.push(format!("conic: {}", c.label));
        }
    }
    for d in m.e5_divisors() {
        if d.line_class.as_ref() == Some(alpha) {
            matches.push(format!("E5 line of {}", d.label));
        }
    }
    let mut fibration_contracted = false;
    for f in &m.fibrations {
        if f.contracted_face.contains(alpha) {
            matches.push(format!("fiber of {}", f.label));
        }
        let face: Vec<Vec<i64>> = f.contracted_face.iter().map(|c| c.coords().to_vec()).collect();
        let mut with = face.clone();
        with.push(a.to_vec());
        if !alpha.is_zero() && rank_i64(&with) == rank_i64(&face) {
            fibration_contracted = true;
        }
    }
    Ok(ClassReport {
        class: alpha.clone(),
        degree,
        nef,
        facet_profile: m.nef_curve_cone.facet_profile(a),
        matches,
        fibration_contracted,
        good_class: nef && degree >= 3 && !fibration_contracted,
    })
}

const QUARTIC: &str = include_str!("../../models/quartic.json");
const P_O_O2: &str = include_str!("../../models/p_o_o2.json");
const TWO_E5: &str = include_str!("../../models/two_e5.json");

/// Names of the embedded models, in a fixed order.
pub const BUILTIN_NAMES: [&str; 3] = ["quartic", "p_o_o2", "two_e5"];

/// Embedded source text of a built-in model.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    match name {
        "quartic" => Some(QUARTIC),
        "p_o_o2" => Some(P_O_O2),
        "two_e5" => Some(TWO_E5),
        _ => None,
    }
}

pub fn builtin(name: &str) -> Result<FanoThreefoldModel> {
    let text = builtin_source(name).ok_or_else(|| Error::Input(format!("unknown built-in model {name:?}")))?;
    FanoThreefoldModel::from_json(text)
}

pub fn builtin_models() -> Vec<FanoThreefoldModel> {
    BUILTIN_NAMES.iter().map(|n| builtin(n).expect("built-in models parse")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: &[i64]) -> LatticeVector {
        LatticeVector::curve(v.to_vec())
    }

    #[test]
    fn builtins_load() {
        for m in builtin_models() {
            assert_eq!(m.divisor_basis.len(), m.rank);
        }
    }

    #[test]
    fn minimal_degrees() {
        for name in BUILTIN_NAMES {
            assert_eq!(minimal_degree(&builtin(name).unwrap()).unwrap(), 1);
        }
    }

    #[test]
    fn nef_cone_from_dual_when_rays_absent() {
        let mut spec = builtin("two_e5").unwrap().spec().clone();
        spec.nef_curve_rays = None;
        let m = FanoThreefoldModel::from_spec(spec).unwrap();
        assert!(m.nef_curve_cone.same_as(&builtin("two_e5").unwrap().nef_curve_cone));
        let p = builtin("p_o_o2").unwrap();
        assert_eq!(p.nef_curve_cone.ray_coords(), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn classify_two_e5() {
        let m = builtin("two_e5").unwrap();
        let r1 = classify_class(&m, &c(&[0, 1, 1])).unwrap();
        assert!(r1.nef);
        assert_eq!(r1.degree, 2);
        assert!(r1.fibration_contracted);
        assert!(!r1.good_class);
        assert!(r1.matches.iter().any(|s| s == "fiber of p"));

        let r2 = classify_class(&m, &c(&[1, 0, 0])).unwrap();
        assert!(r2.nef && r2.good_class);
        assert_eq!(r2.degree, 3);

        let l0 = classify_class(&m, &c(&[1, -2, 0])).unwrap();
        assert!(!l0.nef);
        assert_eq!(l0.degree, 1);
        assert!(l0.matches.iter().any(|s| s == "E5 line of E0"));

        assert!(classify_class(&m, &c(&[1, 0])).is_err());
    }

    #[test]
    fn strict_parsing_rejects_unknown_fields() {
        let text = QUARTIC.replacen("\"rank\"", "\"rnak\": 1, \"rank\"", 1);
        assert!(FanoThreefoldModel::from_json(&text).is_err());
    }

    #[test]
    fn explicit_table_rule() {
        let rule = ComponentCountRule {
            kind: RuleKind::ExplicitTable,
            table: [(vec![2], 3)].into_iter().collect(),
            min_degree: 2,
        };
        assert_eq!(rule.count(&[2]).unwrap(), 3);
        assert!(matches!(rule.count(&[3]), Err(Error::IncompleteRule(_))));
    }
}

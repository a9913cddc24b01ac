//! Finitely presented graded commutative monoids with a class map to a curve lattice.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::linalg::{solve, to_rational};
use crate::rational::Rational;

/// Exponent vector over the generators.
pub type Word = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Relation {
    pub lhs: Word,
    pub rhs: Word,
}

/// File form of a presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    pub generators: Vec<String>,
    pub degrees: Vec<i64>,
    /// Row `i` is the curve class of generator `i`.
    pub class_map: Vec<Vec<i64>>,
    pub relations: Vec<Relation>,
}

/// Graded commutative monoid `⟨generators | relations⟩` with its class homomorphism.
///
/// Invariants: degrees are positive, every relation is homogeneous and maps
/// to an identity of classes, and some linear functional `g` on the curve
/// lattice satisfies `g·class_i = degree_i` for all generators.
#[derive(Clone, Debug, PartialEq)]
pub struct PresentedCommutativeMonoid {
    spec: PresentationSpec,
    grading: Vec<Rational>,
}

const BUILTIN: [(&str, &str); 3] = [
    ("quartic", include_str!("../presentations/quartic.json")),
    ("p_o_o2", include_str!("../presentations/p_o_o2.json")),
    ("two_e5", include_str!("../presentations/two_e5.json")),
];

pub fn builtin_presentation(name: &str) -> Result<PresentedCommutativeMonoid> {
    let (_, text) = BUILTIN
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Input(format!("no built-in presentation for {name:?}")))?;
    PresentedCommutativeMonoid::from_json(text)
}

impl PresentedCommutativeMonoid {
    pub fn new(spec: PresentationSpec) -> Result<Self> {
        let k = spec.generators.len();
        if k == 0 {
            return Err(Error::Input("presentation without generators".into()));
        }
        if spec.degrees.len() != k || spec.class_map.len() != k {
            return Err(Error::Input("degrees and class_map must have one entry per generator".into()));
        }
        if let Some(d) = spec.degrees.iter().find(|&&d| d <= 0) {
            return Err(Error::Grading(format!("generator degree {d} is not positive")));
        }
        let rho = spec.class_map[0].len();
        if rho == 0 || spec.class_map.iter().any(|c| c.len() != rho) {
            return Err(Error::Input("class_map rows must share a positive rank".into()));
        }
        let grading = solve(&to_rational(&spec.class_map), &to_rational(std::slice::from_ref(&spec.degrees))[0])
            .ok_or_else(|| Error::Grading("degrees are not induced by a linear functional on classes".into()))?;
        let m = PresentedCommutativeMonoid { spec, grading };
        for (i, rel) in m.spec.relations.iter().enumerate() {
            if rel.lhs.len() != k || rel.rhs.len() != k {
                return Err(Error::Input(format!("relation {i} has the wrong length")));
            }
            if m.degree(&rel.lhs) != m.degree(&rel.rhs) {
                return Err(Error::Input(format!("relation {i} is not homogeneous")));
            }
            if m.class_of(&rel.lhs) != m.class_of(&rel.rhs) {
                return Err(Error::Input(format!("relation {i} does not preserve classes")));
            }
        }
        Ok(m)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::new(serde_json::from_str(text)?)
    }

    pub fn spec(&self) -> &PresentationSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn generators(&self) -> &[String] {
        &self.spec.generators
    }

    pub fn relations(&self) -> &[Relation] {
        &self.spec.relations
    }

    pub fn num_generators(&self) -> usize {
        self.spec.generators.len()
    }

    pub fn rank(&self) -> usize {
        self.spec.class_map[0].len()
    }

    /// Copy with relation `index` removed.
    pub fn without_relation(&self, index: usize) -> Result<Self> {
        let mut spec = self.spec.clone();
        if index >= spec.relations.len() {
            return Err(Error::Input(format!("no relation {index}")));
        }
        spec.relations.remove(index);
        Self::new(spec)
    }

    pub fn degree(&self, w: &[u32]) -> i64 {
        w.iter().zip(&self.spec.degrees).map(|(&e, &d)| i64::from(e) * d).sum()
    }

    pub fn class_of(&self, w: &[u32]) -> Vec<i64> {
        let mut out = vec![0i64; self.rank()];
        for (&e, row) in w.iter().zip(&self.spec.class_map) {
            for (o, &x) in out.iter_mut().zip(row) {
                *o += i64::from(e) * x;
            }
        }
        out
    }

    /// Degree of a class under the induced grading, when it is a nonnegative integer.
    pub fn class_degree(&self, alpha: &[i64]) -> Option<i64> {
        if alpha.len() != self.rank() {
            return None;
        }
        let d: Rational = self.grading.iter().zip(alpha).map(|(g, &a)| g * Rational::integer(a)).sum();
        d.to_i64().filter(|&x| x >= 0)
    }

    /// Words reachable from `w` by one relation application in either direction.
    fn neighbours(&self, w: &[u32]) -> Vec<Word> {
        let mut out = Vec::new();
        for rel in &self.spec.relations {
            for (from, to) in [(&rel.lhs, &rel.rhs), (&rel.rhs, &rel.lhs)] {
                if w.iter().zip(from).all(|(a, b)| a >= b) {
                    out.push(w.iter().zip(from).zip(to).map(|((a, f), t)| a - f + t).collect());
                }
            }
        }
        out
    }

    /// The congruence class of `w` (finite, since all its words share one degree).
    pub fn congruence_class(&self, w: &[u32]) -> HashSet<Word> {
        let mut seen: HashSet<Word> = HashSet::from([w.to_vec()]);
        let mut queue: VecDeque<Word> = VecDeque::from([w.to_vec()]);
        while let Some(x) = queue.pop_front() {
            for y in self.neighbours(&x) {
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// Every word of degree exactly `d`, in lexicographic order.
    pub fn words_of_degree(&self, d: i64) -> Vec<Word> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.num_generators()];
        self.fill_words(0, d, &mut cur, &mut |w: &[u32]| out.push(w.to_vec()));
        out.sort();
        out
    }

    fn fill_words<F: FnMut(&[u32])>(&self, i: usize, remaining: i64, cur: &mut Word, f: &mut F) {
        if i == cur.len() {
            if remaining == 0 {
                f(cur);
            }
            return;
        }
        let d = self.spec.degrees[i];
        let mut e = 0u32;
        while i64::from(e) * d <= remaining {
            cur[i] = e;
            self.fill_words(i + 1, remaining - i64::from(e) * d, cur, f);
            e += 1;
        }
        cur[i] = 0;
    }
}

/// Whether `v` is obtained from `u` by relation substitutions in either direction.
pub fn congruent(m: &PresentedCommutativeMonoid, u: &[u32], v: &[u32]) -> bool {
    if u.len() != m.num_generators() || v.len() != m.num_generators() {
        return false;
    }
    if m.degree(u) != m.degree(v) || m.class_of(u) != m.class_of(v) {
        return false;
    }
    if u == v {
        return true;
    }
    let mut seen: HashSet<Word> = HashSet::from([u.to_vec()]);
    let mut queue: VecDeque<Word> = VecDeque::from([u.to_vec()]);
    while let Some(x) = queue.pop_front() {
        for y in m.neighbours(&x) {
            if y == v {
                return true;
            }
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    false
}

/// Memo of canonical representatives (least word of each congruence class).
/// Past `cap` entries new classes are recomputed rather than stored.
#[derive(Debug)]
pub struct CongruenceCache {
    cap: usize,
    canonical: HashMap<Word, Word>,
}

impl CongruenceCache {
    pub fn new(cap: usize) -> Self {
        CongruenceCache { cap, canonical: HashMap::new() }
    }

    pub fn len(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.canonical.is_empty()
    }

    pub fn representative(&mut self, m: &PresentedCommutativeMonoid, w: &[u32]) -> Word {
        if let Some(r) = self.canonical.get(w) {
            return r.clone();
        }
        let class = m.congruence_class(w);
        let rep = class.iter().min().expect("class contains w").clone();
        if self.canonical.len() + class.len() <= self.cap {
            for x in class {
                self.canonical.insert(x, rep.clone());
            }
        }
        rep
    }

    pub fn congruent(&mut self, m: &PresentedCommutativeMonoid, u: &[u32], v: &[u32]) -> bool {
        m.degree(u) == m.degree(v) && self.representative(m, u) == self.representative(m, v)
    }
}

/// All words mapping to `alpha`, sorted lexicographically.
pub fn factorizations(m: &PresentedCommutativeMonoid, alpha: &[i64]) -> Vec<Word> {
    let Some(d) = m.class_degree(alpha) else { return vec![] };
    if d == 0 {
        return if alpha.iter().all(|&x| x == 0) { vec![vec![0; m.num_generators()]] } else { vec![] };
    }
    m.words_of_degree(d).into_iter().filter(|w| m.class_of(w) == alpha).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct PresentationViolation {
    pub degree: i64,
    pub class: Vec<i64>,
    pub kind: ViolationKind,
    pub u: Word,
    pub v: Word,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Two factorizations of one class that no sequence of relations connects.
    Incongruent,
    /// A rewrite step changed the class.
    ClassChanged,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PresentationReport {
    pub presentation: String,
    pub d_max: i64,
    pub classes_checked: usize,
    pub words_checked: usize,
    /// `(degree, number of congruence classes, number of distinct classes)`.
    pub per_degree: Vec<(i64, usize, usize)>,
    pub random_walks: usize,
    pub violations: Vec<PresentationViolation>,
}

impl PresentationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

const WALKS: usize = 1000;
const WALK_STEPS: usize = 25;
const WALK_SEED: u64 = 0x006d_616e_696e;

/// Checks that each class of degree ≤ `d_max` has exactly one congruence class of
/// factorizations, and re-checks class preservation along seeded random rewrite walks.
pub fn verify_presentation(m: &PresentedCommutativeMonoid, d_max: i64) -> PresentationReport {
    let degrees: Vec<i64> = (1..=d_max.max(0)).collect();
    let per_degree: Vec<(i64, Vec<PresentationViolation>, usize, usize, usize)> = degrees
        .par_iter()
        .map(|&d| {
            let mut by_class: BTreeMap<Vec<i64>, Vec<Word>> = BTreeMap::new();
            let words = m.words_of_degree(d);
            let nwords = words.len();
            for w in words {
                by_class.entry(m.class_of(&w)).or_default().push(w);
            }
            let mut violations = Vec::new();
            let mut components = 0usize;
            for (class, facts) in &by_class {
                let mut unreached: Vec<&Word> = facts.iter().collect();
                let first = unreached[0].clone();
                while let Some(start) = unreached.first().copied() {
                    components += 1;
                    let reach = m.congruence_class(start);
                    if start != &first {
                        violations.push(PresentationViolation {
                            degree: d,
                            class: class.clone(),
                            kind: ViolationKind::Incongruent,
                            u: first.clone(),
                            v: start.clone(),
                        });
                    }
                    unreached.retain(|w| !reach.contains(*w));
                }
            }
            (d, violations, by_class.len(), components, nwords)
        })
        .collect();

    let mut report = PresentationReport {
        presentation: m.name().to_string(),
        d_max,
        classes_checked: 0,
        words_checked: 0,
        per_degree: vec![],
        random_walks: 0,
        violations: vec![],
    };
    for (d, v, classes, components, nwords) in per_degree {
        report.classes_checked += classes;
        report.words_checked += nwords;
        if nwords > 0 {
            report.per_degree.push((d, components, classes));
        }
        report.violations.extend(v);
    }

    let starts: Vec<Word> = (1..=d_max.max(0)).flat_map(|d| m.words_of_degree(d)).collect();
    if !starts.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(WALK_SEED);
        for _ in 0..WALKS {
            let mut w = starts[rng.gen_range(0..starts.len())].clone();
            let class = m.class_of(&w);
            for _ in 0..WALK_STEPS {
                let next = m.neighbours(&w);
                if next.is_empty() {
                    break;
                }
                let n = next[rng.gen_range(0..next.len())].clone();
                if m.class_of(&n) != class {
                    report.violations.push(PresentationViolation {
                        degree: m.degree(&w),
                        class: class.clone(),
                        kind: ViolationKind::ClassChanged,
                        u: w.clone(),
                        v: n,
                    });
                    break;
                }
                w = n;
            }
        }
        report.random_walks = WALKS;
    }
    report.violations.sort();
    report.violations.dedup();
    report
}

//! End-to-end acceptance checks. Every criterion prints one PASS/FAIL line with its runtime.
//!
//! Tolerances: the quartic count is a finite geometric sum, so its relative error
//! against the leading term is exactly `q^(1-d)`, and the bound `2·q^(1-d)` leaves a
//! factor of two. For two_e5 the Ehrhart-type error term is `O(1/d)`; at `q = 2` the
//! ratio is about 1.008 at `d = 200`, so a 0.10 window is comfortable.

use std::collections::{BTreeSet, HashSet};
use std::io::Write;
use std::time::{Duration, Instant};

use manin_core::classification::{derive_e_cubed, ClassificationDb, Table};
use manin_core::counting::{alpha_constant, alpha_constant_with_apex, count_exact, convergence_report, growth_bound_check, predicted};
use manin_core::invariants::{a_invariant, b_invariant, AValue};
use manin_core::lattice::{enumerate_lattice_points, hilbert_basis, LatticeVector};
use manin_core::mbb::{e5_chain_breakings, verify_mbb};
use manin_core::models::{builtin, builtin_models, FanoThreefoldModel};
use manin_core::monoid::{builtin_presentation, verify_presentation};
use manin_core::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c(v: &[i64]) -> LatticeVector {
    LatticeVector::curve(v.to_vec())
}

fn quartic_closed_form() -> Outcome {
    let m = builtin("quartic").map_err(|e| e.to_string())?;
    for q in [r(2, 1), r(3, 1), r(7, 2)] {
        for d in 1..=100 {
            let got = count_exact(&m, &q, d).map_err(|e| e.to_string())?;
            let want = (q.pow(d + 1).unwrap() - q.pow(2).unwrap()) / (&q - &Rational::one());
            ensure(got == want, || format!("q = {q}, d = {d}: {got} != {want}"))?;
        }
    }
    Ok(())
}

fn quartic_asymptotic() -> Outcome {
    let m = builtin("quartic").map_err(|e| e.to_string())?;
    let q = r(2, 1);
    for d in 5..=100 {
        let exact = count_exact(&m, &q, d).map_err(|e| e.to_string())?;
        let pred = predicted(&m, &q, d).map_err(|e| e.to_string())?;
        let err = (exact / pred - Rational::one()).abs();
        let tol = r(2, 1) * q.pow(1 - d).unwrap();
        ensure(err <= tol, || format!("d = {d}: |ratio - 1| = {err} exceeds {tol}"))?;
    }
    Ok(())
}

fn two_e5_hilbert_basis() -> Outcome {
    let m = builtin("two_e5").map_err(|e| e.to_string())?;
    let deg = LatticeVector::divisor(m.degree_functional());
    let basis = hilbert_basis(&m.nef_curve_cone, &deg, 20).map_err(|e| e.to_string())?;
    let got: BTreeSet<Vec<i64>> = basis.iter().map(|v| v.coords().to_vec()).collect();
    let want: BTreeSet<Vec<i64>> =
        [[0, 1, 1], [1, 0, 0], [1, 0, 2], [1, 2, 0], [1, 0, 1], [1, 1, 0]].iter().map(|v| v.to_vec()).collect();
    ensure(got == want && basis.len() == 6, || format!("basis {got:?}"))?;

    // independent check: reachable sums of basis elements cover every nef point of degree ≤ 20
    let mut reachable: HashSet<Vec<i64>> = HashSet::from([vec![0, 0, 0]]);
    let mut frontier: Vec<Vec<i64>> = vec![vec![0, 0, 0]];
    while let Some(p) = frontier.pop() {
        for h in &want {
            let s: Vec<i64> = p.iter().zip(h).map(|(a, b)| a + b).collect();
            if m.degree(&s) <= 20 && reachable.insert(s.clone()) {
                frontier.push(s);
            }
        }
    }
    let points = enumerate_lattice_points(&m.nef_curve_cone, &deg, 20).map_err(|e| e.to_string())?;
    ensure(!points.is_empty(), || "no nef points".into())?;
    for p in points {
        ensure(reachable.contains(p.coords()), || format!("{p} is not a sum of basis elements"))?;
    }
    Ok(())
}

fn monoid_presentation() -> Outcome {
    let p = builtin_presentation("two_e5").map_err(|e| e.to_string())?;
    let rep = verify_presentation(&p, 30);
    ensure(rep.passed(), || format!("{} violations, first {:?}", rep.violations.len(), rep.violations.first()))?;
    // each deleted relation is missed exactly from its own degree on; three of them live in degree 8
    let mut caught_by_8 = 0;
    for (i, rel) in p.relations().iter().enumerate() {
        let d = p.degree(&rel.lhs);
        let mutated = p.without_relation(i).map_err(|e| e.to_string())?;
        let first = verify_presentation(&mutated, d).violations.iter().map(|v| v.degree).min();
        ensure(first == Some(d), || format!("deleting relation {i} (degree {d}): first violation at {first:?}"))?;
        if d <= 8 {
            caught_by_8 += 1;
        }
    }
    ensure(caught_by_8 >= 1, || "no deletion is detected by degree 8".into())
}

fn alpha_constants() -> Outcome {
    for (name, want) in [("quartic", r(1, 1)), ("two_e5", r(1, 15)), ("p_o_o2", r(1, 10))] {
        let m = builtin(name).map_err(|e| e.to_string())?;
        let a = alpha_constant(&m).map_err(|e| e.to_string())?;
        ensure(a == want, || format!("{name}: alpha = {a}, want {want}"))?;
        let slice = manin_core::counting::alpha_slice(&m).map_err(|e| e.to_string())?;
        let last = slice.vertices().len() - 1;
        let other = alpha_constant_with_apex(&m, last).map_err(|e| e.to_string())?;
        ensure(other == a, || format!("{name}: triangulations disagree, {a} vs {other}"))?;
    }
    Ok(())
}

fn two_e5_asymptotic() -> Outcome {
    let m = builtin("two_e5").map_err(|e| e.to_string())?;
    let rep = convergence_report(&m, &r(2, 1), 200, 100).map_err(|e| e.to_string())?;
    let ratio = |d: i64| rep.ratios.iter().find(|(x, _)| *x == d).map(|(_, v)| v.clone());
    let (r100, r200) = (ratio(100).ok_or("no ratio at 100")?, ratio(200).ok_or("no ratio at 200")?);
    let (e100, e200) = ((r100.clone() - Rational::one()).abs(), (r200.clone() - Rational::one()).abs());
    ensure(e200 <= r(1, 10), || format!("ratio at d = 200 is {:.6}", r200.to_f64()))?;
    ensure(e200 < e100, || format!("ratio did not improve: {:.6} at 100, {:.6} at 200", r100.to_f64(), r200.to_f64()))
}

fn mbb_shadow() -> Outcome {
    let expected: [(&str, Vec<LatticeVector>); 3] =
        [("two_e5", vec![c(&[1, 0, 2]), c(&[1, 2, 0])]), ("p_o_o2", vec![c(&[1, 0])]), ("quartic", vec![])];
    for (name, exceptions) in expected {
        let m = builtin(name).map_err(|e| e.to_string())?;
        let rep = verify_mbb(&m, 40).map_err(|e| e.to_string())?;
        ensure(rep.passed(), || format!("{name}: violations {:?}", rep.violations))?;
        let got: Vec<LatticeVector> = rep.degree5_exceptions.iter().map(|e| e.class.clone()).collect();
        ensure(got == exceptions, || format!("{name}: degree-5 exceptions {got:?}"))?;
    }
    let m = builtin("two_e5").map_err(|e| e.to_string())?;
    let r1 = c(&[0, 1, 1]);
    for (target, line) in [(c(&[1, 0, 2]), c(&[1, -2, 0])), (c(&[1, 2, 0]), c(&[1, 0, -2]))] {
        let chains = e5_chain_breakings(&m, &target).map_err(|e| e.to_string())?;
        ensure(
            chains.iter().any(|b| b.beta == r1 && b.gamma == r1 && b.line_class.as_ref() == Some(&line)),
            || format!("no chain {target} = 2 R1 + {line}"),
        )?;
    }
    Ok(())
}

fn random_nef(m: &FanoThreefoldModel, rng: &mut ChaCha8Rng) -> LatticeVector {
    loop {
        let v: Vec<i64> = (0..m.rank).map(|_| rng.gen_range(-4..=8)).collect();
        let l = LatticeVector::divisor(v);
        if !l.is_zero() && m.nef_curve_cone.rays().iter().all(|r| m.intersect(l.coords(), r.coords()) >= 0) {
            return l;
        }
    }
}

fn invariants() -> Outcome {
    for m in builtin_models() {
        let res = a_invariant(&m, &m.anticanonical).map_err(|e| e.to_string())?;
        ensure(res.value == AValue::Finite(Rational::one()), || format!("{}: a(-K) = {}", m.name, res.value))?;
        let b = b_invariant(&m, &m.anticanonical).map_err(|e| e.to_string())?;
        ensure(b == m.rank, || format!("{}: b(-K) = {b}", m.name))?;
    }
    let m = builtin("two_e5").map_err(|e| e.to_string())?;
    let h = LatticeVector::divisor(vec![1, 0, 0]);
    let res = a_invariant(&m, &h).map_err(|e| e.to_string())?;
    ensure(res.value == AValue::Infinite && res.verify(&m, &h), || format!("a(H) = {}", res.value))?;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for m in builtin_models() {
        for _ in 0..20 {
            let l = random_nef(&m, &mut rng);
            let base = a_invariant(&m, &l).map_err(|e| e.to_string())?;
            ensure(base.verify(&m, &l), || format!("{}: certificate for {l} rejected", m.name))?;
            for k in [2, 3, 5] {
                let scaled = a_invariant(&m, &l.scaled(k)).map_err(|e| e.to_string())?.value;
                let want = match &base.value {
                    AValue::Finite(a) => AValue::Finite(a / &Rational::integer(k)),
                    AValue::Infinite => AValue::Infinite,
                };
                ensure(scaled == want, || format!("{}: a({k}·{l}) = {scaled}, want {want}", m.name))?;
            }
        }
    }
    Ok(())
}

fn growth_bound() -> Outcome {
    let m = builtin("two_e5").map_err(|e| e.to_string())?;
    let rep = growth_bound_check(&m, 200).map_err(|e| e.to_string())?;
    let ratio = rep.doubling_ratio(100).ok_or("no doubling ratio at d = 100")?;
    let err = (ratio.clone() / Rational::integer(8) - Rational::one()).abs();
    ensure(err <= r(15, 100), || format!("count(200)/count(100) = {:.4}", ratio.to_f64()))
}

fn data_integrity() -> Outcome {
    let db = ClassificationDb::embedded();
    let rows: Vec<_> = db.singularity_rows().collect();
    let count = |t: Table| rows.iter().filter(|s| s.table == t).count();
    ensure(
        (count(Table::T1), count(Table::T2), count(Table::T3)) == (28, 13, 8),
        || format!("table sizes {} {} {}", count(Table::T1), count(Table::T2), count(Table::T3)),
    )?;
    let t1_types: BTreeSet<&str> = rows.iter().filter(|s| s.table == Table::T1).map(|s| s.sing_type.as_str()).collect();
    for t in t1_types {
        for col in ["a=1", "a>1"] {
            ensure(
                rows.iter().any(|s| s.table == Table::T1 && s.sing_type == t && s.column.as_deref() == Some(col)),
                || format!("T1 cell {t} {col} missing"),
            )?;
        }
    }
    for s in rows.iter().filter(|s| s.table == Table::T3) {
        let e3 = derive_e_cubed(s).map_err(|e| e.to_string())?;
        ensure(e3.is_positive(), || format!("E^3 = {e3}"))?;
    }
    let counts: Vec<u32> = db.e5_threefolds().map(|e| e.e5_contraction_count).collect();
    ensure(counts == vec![1, 1, 1, 1, 1, 2], || format!("E5 contraction counts {counts:?}"))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("quartic closed form", quartic_closed_form, Duration::from_secs(1)),
        ("quartic asymptotic", quartic_asymptotic, Duration::from_secs(1)),
        ("two_e5 Hilbert basis", two_e5_hilbert_basis, Duration::from_secs(10)),
        ("monoid presentation", monoid_presentation, Duration::from_secs(120)),
        ("alpha constants", alpha_constants, Duration::from_secs(1)),
        ("two_e5 asymptotic", two_e5_asymptotic, Duration::from_secs(120)),
        ("MBB shadow", mbb_shadow, Duration::from_secs(60)),
        ("invariants", invariants, Duration::MAX),
        ("growth bound", growth_bound, Duration::MAX),
        ("data integrity", data_integrity, Duration::MAX),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = check();
        let elapsed = start.elapsed();
        if outcome.is_ok() && elapsed > *limit {
            outcome = Err(format!("took {elapsed:.2?}, limit {limit:?}"));
        }
        let line = match &outcome {
            Ok(()) => format!("PASS {:>2} {name} ({elapsed:.2?})", i + 1),
            Err(e) => format!("FAIL {:>2} {name} ({elapsed:.2?}): {e}", i + 1),
        };
        writeln!(err, "{line}").unwrap();
        if outcome.is_err() {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

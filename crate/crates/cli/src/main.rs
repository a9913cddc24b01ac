use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use manin_core::classification::{ClassificationDb, Predicate};
use manin_core::counting::{alpha_constant, alpha_constant_with_apex, alpha_slice, convergence_report, count_exact, growth_bound_check};
use manin_core::invariants::{a_invariant, b_face, b_invariant};
use manin_core::lattice::{enumerate_lattice_points, hilbert_basis, LatticeVector};
use manin_core::mbb::{e5_chain_breakings, free_breakings, verify_mbb};
use manin_core::models::{builtin, classify_class, minimal_degree, validate_model, FanoThreefoldModel, BUILTIN_NAMES};
use manin_core::monoid::{builtin_presentation, verify_presentation, PresentedCommutativeMonoid};
use manin_core::Rational;
use serde::Serialize;
use serde_json::json;

mod output;

use output::{cell, vector, Format, Report};

/// Exact computations on curve classes of Fano threefolds.
#[derive(Parser, Debug)]
#[command(name = "manin", version, about)]
struct Cli {
    /// Output format; json carries the complete report.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for parallel verification (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ModelArg {
    /// Built-in model name, a name found on MANIN_MODEL_PATH, or a path to a model file.
    #[arg(long)]
    model: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Inspect and check model files.
    #[command(subcommand)]
    Models(ModelsCmd),
    /// List nef curve classes up to a degree.
    Enumerate {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        degree: i64,
    },
    /// Hilbert basis of the nef curve monoid.
    Hilbert {
        #[command(flatten)]
        model: ModelArg,
        /// Decompose every nef point up to this degree over the basis.
        #[arg(long, default_value_t = 20)]
        check_bound: i64,
    },
    /// Exact weighted count of Manin components.
    Count {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, value_parser = parse_rational)]
        q: Rational,
        #[arg(long)]
        degree: i64,
    },
    /// Volume constant of the nef slice.
    Alpha {
        #[command(flatten)]
        model: ModelArg,
        /// Triangulate from this vertex of the slice instead of the first.
        #[arg(long)]
        apex: Option<usize>,
    },
    /// Compare exact counts with the predicted leading term, or check polynomial growth.
    Asymptotic {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, value_parser = parse_rational, default_value = "2")]
        q: Rational,
        #[arg(long)]
        degree: i64,
        #[arg(long, default_value_t = 10)]
        stride: i64,
        /// Report class counts by degree and their doubling ratios instead.
        #[arg(long)]
        growth: bool,
    },
    /// Presentations of the nef monoid.
    #[command(subcommand)]
    Monoid(MonoidCmd),
    /// Numerical bend-and-break.
    #[command(subcommand)]
    Mbb(MbbCmd),
    /// Fujita a- and b-invariants of a nef divisor.
    #[command(subcommand)]
    Invariants(InvariantsCmd),
    /// Classification tables.
    #[command(subcommand)]
    Db(DbCmd),
}

#[derive(Subcommand, Debug)]
enum ModelsCmd {
    List,
    Show {
        #[command(flatten)]
        model: ModelArg,
    },
    Validate {
        #[command(flatten)]
        model: ModelArg,
    },
    /// Degree, nefness and named-class matches of one curve class.
    Classify {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        class: Vec<i64>,
    },
}

#[derive(Subcommand, Debug)]
enum MonoidCmd {
    Verify {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        degree: i64,
        /// Presentation file; defaults to the built-in presentation of the model.
        #[arg(long)]
        presentation: Option<PathBuf>,
        /// Remove this relation (0-based) before verifying.
        #[arg(long)]
        drop_relation: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum MbbCmd {
    Verify {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        degree: i64,
    },
    /// All free and E5-chain breakings of one nef class.
    Decompose {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        class: Vec<i64>,
    },
}

#[derive(Subcommand, Debug)]
enum InvariantsCmd {
    A {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        divisor: Vec<i64>,
    },
    B {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        divisor: Vec<i64>,
    },
}

#[derive(Subcommand, Debug)]
enum DbCmd {
    /// Records matching every `field=value` predicate.
    Query { predicates: Vec<String> },
    /// The full table in its JSON form.
    Dump,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    if s.contains(['.', 'e', 'E']) {
        return Err(format!("{s:?}: decimals are not accepted, write p/q"));
    }
    s.parse().map_err(|e: manin_core::Error| e.to_string())
}

fn load_model(arg: &ModelArg) -> anyhow::Result<FanoThreefoldModel> {
    let name = arg.model.as_str();
    let direct = Path::new(name);
    if direct.is_file() {
        return FanoThreefoldModel::load(direct).with_context(|| format!("loading {name}"));
    }
    let mut searched = Vec::new();
    if let Some(paths) = std::env::var_os("MANIN_MODEL_PATH") {
        for dir in std::env::split_paths(&paths) {
            let candidate = dir.join(format!("{name}.json"));
            if candidate.is_file() {
                return FanoThreefoldModel::load(&candidate)
                    .with_context(|| format!("loading {}", candidate.display()));
            }
            searched.push(dir.display().to_string());
        }
    }
    if BUILTIN_NAMES.contains(&name) {
        return Ok(builtin(name)?);
    }
    searched.push("<built-in>".into());
    bail!("model {name:?} not found (searched {})", searched.join(", "))
}

fn curve(m: &FanoThreefoldModel, coords: &[i64]) -> anyhow::Result<LatticeVector> {
    if coords.len() != m.rank {
        bail!("class {} has {} coordinates, model {} has rank {}", vector(coords), coords.len(), m.name, m.rank);
    }
    Ok(LatticeVector::curve(coords.to_vec()))
}

fn divisor(m: &FanoThreefoldModel, coords: &[i64]) -> anyhow::Result<LatticeVector> {
    if coords.len() != m.rank {
        bail!("divisor {} has {} coordinates, model {} has rank {}", vector(coords), coords.len(), m.name, m.rank);
    }
    Ok(LatticeVector::divisor(coords.to_vec()))
}

fn models_cmd(cmd: ModelsCmd) -> anyhow::Result<Report> {
    match cmd {
        ModelsCmd::List => {
            #[derive(Serialize)]
            struct Entry {
                name: String,
                rank: usize,
                e5_divisors: usize,
                minimal_degree: i64,
            }
            let mut entries = Vec::new();
            for name in BUILTIN_NAMES {
                let m = builtin(name)?;
                entries.push(Entry {
                    name: m.name.clone(),
                    rank: m.rank,
                    e5_divisors: m.e5_divisors().count(),
                    minimal_degree: minimal_degree(&m)?,
                });
            }
            let mut rep = Report::new(&entries, &["name", "rank", "e5_divisors", "minimal_degree"])?;
            for e in &entries {
                rep.row([e.name.clone(), e.rank.to_string(), e.e5_divisors.to_string(), e.minimal_degree.to_string()]);
            }
            Ok(rep)
        }
        ModelsCmd::Show { model } => {
            let m = load_model(&model)?;
            let spec = serde_json::to_value(m.spec())?;
            let mut rep = Report::new(&spec, &["field", "value"])?;
            if let Some(obj) = spec.as_object() {
                for (k, v) in obj {
                    rep.row([k.clone(), cell(v)]);
                }
            }
            let rays: Vec<String> = m.nef_curve_cone.rays().iter().map(ToString::to_string).collect();
            rep.row(["nef_curve_cone".to_string(), rays.join(" ")]);
            Ok(rep)
        }
        ModelsCmd::Validate { model } => {
            let m = load_model(&model)?;
            let v = validate_model(&m);
            let mut rep = Report::new(&v, &["check", "passed", "detail"])?;
            for c in &v.checks {
                rep.row([c.name.clone(), c.passed.to_string(), c.detail.clone()]);
            }
            Ok(rep.passed(v.passed()))
        }
        ModelsCmd::Classify { model, class } => {
            let m = load_model(&model)?;
            let c = classify_class(&m, &curve(&m, &class)?)?;
            let mut rep = Report::new(&c, &["class", "degree", "nef", "matches", "fibration_contracted", "good_class"])?;
            rep.row([
                c.class.to_string(),
                c.degree.to_string(),
                c.nef.to_string(),
                c.matches.join("; "),
                c.fibration_contracted.to_string(),
                c.good_class.to_string(),
            ]);
            Ok(rep)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Report> {
    match cli.command {
        Command::Models(cmd) => models_cmd(cmd),
        Command::Enumerate { model, degree } => {
            let m = load_model(&model)?;
            let deg = LatticeVector::divisor(m.degree_functional());
            let points = enumerate_lattice_points(&m.nef_curve_cone, &deg, degree)?;
            let listed: Vec<_> = points.iter().map(|p| json!({"class": p, "degree": m.degree(p.coords())})).collect();
            let mut rep = Report::new(&json!({"model": m.name, "degree": degree, "classes": listed}), &["class", "degree"])?;
            for p in &points {
                rep.row([p.to_string(), m.degree(p.coords()).to_string()]);
            }
            Ok(rep)
        }
        Command::Hilbert { model, check_bound } => {
            let m = load_model(&model)?;
            let deg = LatticeVector::divisor(m.degree_functional());
            let basis = hilbert_basis(&m.nef_curve_cone, &deg, check_bound)?;
            let value = json!({"model": m.name, "check_bound": check_bound, "basis": basis});
            let mut rep = Report::new(&value, &["class", "degree"])?;
            for b in &basis {
                rep.row([b.to_string(), m.degree(b.coords()).to_string()]);
            }
            Ok(rep)
        }
        Command::Count { model, q, degree } => {
            let m = load_model(&model)?;
            let n = count_exact(&m, &q, degree)?;
            let value = json!({"model": m.name, "q": q, "degree": degree, "count": n});
            let mut rep = Report::new(&value, &["model", "q", "degree", "count"])?;
            rep.row([m.name.clone(), q.to_exact_string(), degree.to_string(), n.to_exact_string()]);
            Ok(rep)
        }
        Command::Alpha { model, apex } => {
            let m = load_model(&model)?;
            let alpha = match apex {
                Some(i) => alpha_constant_with_apex(&m, i)?,
                None => alpha_constant(&m)?,
            };
            let slice = alpha_slice(&m)?;
            let r = minimal_degree(&m)?;
            let value = json!({
                "model": m.name,
                "alpha": alpha,
                "rank": m.rank,
                "r": r,
                "slice_vertices": slice.vertices(),
                "slice_volume": slice.volume(),
            });
            let mut rep = Report::new(&value, &["model", "alpha", "rank", "r", "slice_volume"])?;
            rep.row([m.name.clone(), alpha.to_exact_string(), m.rank.to_string(), r.to_string(), slice.volume().to_exact_string()]);
            Ok(rep)
        }
        Command::Asymptotic { model, q, degree, stride, growth } => {
            let m = load_model(&model)?;
            if growth {
                let g = growth_bound_check(&m, degree)?;
                let mut rep = Report::new(&g, &["d", "count", "doubling_ratio"])?;
                for &(d, c) in g.counts.iter().filter(|(d, _)| d % stride == 0) {
                    let ratio = g.doubling_ratio(d).map(Rational::to_exact_string).unwrap_or_default();
                    rep.row([d.to_string(), c.to_string(), ratio]);
                }
                return Ok(rep);
            }
            let c = convergence_report(&m, &q, degree, stride)?;
            let mut rep = Report::new(&c, &["d", "exact", "predicted", "ratio"])?;
            for ((d, e), ((_, p), (_, r))) in c.exact_values.iter().zip(c.predicted.iter().zip(&c.ratios)) {
                rep.row([d.to_string(), e.to_exact_string(), p.to_exact_string(), r.to_exact_string()]);
            }
            Ok(rep)
        }
        Command::Monoid(MonoidCmd::Verify { model, degree, presentation, drop_relation }) => {
            let mut p = match presentation {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    PresentedCommutativeMonoid::from_json(&text)?
                }
                None => builtin_presentation(&model.model)?,
            };
            if let Some(i) = drop_relation {
                p = p.without_relation(i)?;
            }
            if degree < 1 {
                bail!("degree must be at least 1, got {degree}");
            }
            let r = verify_presentation(&p, degree);
            let mut rep = Report::new(&r, &["degree", "class", "kind", "u", "v"])?;
            for v in &r.violations {
                let kind = cell(&serde_json::to_value(v.kind)?);
                let word = |w: &[u32]| vector(&w.iter().map(|&x| i64::from(x)).collect::<Vec<_>>());
                rep.row([v.degree.to_string(), vector(&v.class), kind, word(&v.u), word(&v.v)]);
            }
            let passed = r.passed();
            Ok(rep.passed(passed))
        }
        Command::Mbb(MbbCmd::Verify { model, degree }) => {
            let m = load_model(&model)?;
            let r = verify_mbb(&m, degree)?;
            let mut rep = Report::new(&r, &["kind", "class", "degree"])?;
            for v in &r.violations {
                rep.row(["violation".to_string(), v.to_string(), m.degree(v.coords()).to_string()]);
            }
            for e in &r.degree5_exceptions {
                rep.row(["degree5_exception".to_string(), e.class.to_string(), "5".to_string()]);
            }
            let passed = r.passed();
            Ok(rep.passed(passed))
        }
        Command::Mbb(MbbCmd::Decompose { model, class }) => {
            let m = load_model(&model)?;
            let alpha = curve(&m, &class)?;
            let mut all = free_breakings(&m, &alpha)?;
            all.extend(e5_chain_breakings(&m, &alpha)?);
            let value = json!({"model": m.name, "class": alpha, "breakings": all});
            let mut rep = Report::new(&value, &["kind", "beta", "line", "gamma", "exceptional_profile"])?;
            for b in &all {
                rep.row([
                    cell(&serde_json::to_value(b.kind)?),
                    b.beta.to_string(),
                    b.line_class.as_ref().map(ToString::to_string).unwrap_or_default(),
                    b.gamma.to_string(),
                    b.exceptional_profile.map(|x| x.to_string()).unwrap_or_default(),
                ]);
            }
            Ok(rep)
        }
        Command::Invariants(InvariantsCmd::A { model, divisor: d }) => {
            let m = load_model(&model)?;
            let l = divisor(&m, &d)?;
            let res = a_invariant(&m, &l)?;
            let verified = res.verify(&m, &l);
            let value = json!({"model": m.name, "divisor": l, "a": res.value, "certificate": res.certificate, "certificate_verified": verified});
            let mut rep = Report::new(&value, &["model", "divisor", "a", "certificate", "certificate_verified"])?;
            rep.row([m.name.clone(), l.to_string(), res.value.to_string(), cell(&value["certificate"]), verified.to_string()]);
            if !verified {
                return Err(anyhow!("certificate for a({l}) failed re-verification"));
            }
            Ok(rep)
        }
        Command::Invariants(InvariantsCmd::B { model, divisor: d }) => {
            let m = load_model(&model)?;
            let l = divisor(&m, &d)?;
            let b = b_invariant(&m, &l)?;
            let face = b_face(&m, &l)?;
            let a = a_invariant(&m, &l)?.value;
            let value = json!({"model": m.name, "divisor": l, "a": a, "b": b, "face": face});
            let mut rep = Report::new(&value, &["model", "divisor", "a", "b", "face"])?;
            let face_text: Vec<String> = face.iter().map(ToString::to_string).collect();
            rep.row([m.name.clone(), l.to_string(), a.to_string(), b.to_string(), face_text.join(" ")]);
            Ok(rep)
        }
        Command::Db(cmd) => {
            let db = ClassificationDb::embedded();
            let (records, value) = match cmd {
                DbCmd::Query { predicates } => {
                    let preds = predicates.iter().map(|p| p.parse()).collect::<Result<Vec<Predicate>, _>>()?;
                    let hits = db.query(&preds)?;
                    let value = serde_json::to_value(&hits)?;
                    (value.as_array().cloned().unwrap_or_default(), value)
                }
                DbCmd::Dump => {
                    let value: serde_json::Value = serde_json::from_str(&db.dump())?;
                    (value["records"].as_array().cloned().unwrap_or_default(), value)
                }
            };
            // columns: the record kind, then the union of record fields in order of first appearance
            let mut columns: Vec<String> = vec!["kind".to_string()];
            for r in &records {
                for k in r.as_object().into_iter().flat_map(|o| o.keys()) {
                    if !columns.contains(k) {
                        columns.push(k.clone());
                    }
                }
            }
            let mut rep = Report::new(&value, &[])?;
            rep.columns = columns.clone();
            for r in &records {
                rep.row(columns.iter().map(|c| cell(r.get(c).unwrap_or(&serde_json::Value::Null))));
            }
            Ok(rep)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let format = cli.format;
    let report = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let text = match report.render(format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let mut out = std::io::stdout().lock();
    if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
        return ExitCode::from(2);
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

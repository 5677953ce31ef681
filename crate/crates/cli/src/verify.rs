use crate::{CliError, Context, Format, VerifyArgs};
use clap::ValueEnum;
use dlct_core::functions::{build, gcd, Construction};
use dlct_core::kloosterman::{
    congruence_violations, extrema_closed_form, verify_value_surjectivity, KloostermanProfile, UnitCircleContext,
};
use dlct_core::tables::{self, full_scan_ops, ReproduceOptions, TABLE_IDS};
use dlct_core::theorems::{self, kasami_hypotheses, TheoremReport, Verdict};
use dlct_core::Field;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::collections::BTreeSet;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Kloosterman,
    UnitCircle,
    CubicBound,
    CubicQuadraticBound,
    DillonFormula,
    InverseFormula,
    ModifiedInverse,
    ModifiedKasami,
    PointModification,
    LowerBound,
    Tables,
    All,
}

impl Suite {
    fn default_degrees(self) -> Vec<u32> {
        match self {
            Suite::Kloosterman => (3..=12).collect(),
            Suite::UnitCircle => vec![4, 6, 8, 10],
            Suite::CubicBound | Suite::CubicQuadraticBound => (3..=10).collect(),
            Suite::DillonFormula | Suite::InverseFormula | Suite::ModifiedInverse => vec![4, 6, 8],
            Suite::ModifiedKasami => vec![5, 7, 11],
            Suite::PointModification => vec![6, 7, 8],
            Suite::LowerBound => (3..=12).collect(),
            Suite::Tables | Suite::All => Vec::new(),
        }
    }

    /// Rough operation count of one degree-`n` instance.
    fn cost(self, n: u32) -> u128 {
        match self {
            Suite::Kloosterman | Suite::UnitCircle => (1u128 << n) * n as u128,
            Suite::CubicBound => (1u128 << n) * (n as u128).pow(3),
            _ => full_scan_ops(n),
        }
    }
}

const ALL: [Suite; 11] = [
    Suite::Kloosterman,
    Suite::UnitCircle,
    Suite::CubicBound,
    Suite::CubicQuadraticBound,
    Suite::DillonFormula,
    Suite::InverseFormula,
    Suite::ModifiedInverse,
    Suite::ModifiedKasami,
    Suite::PointModification,
    Suite::LowerBound,
    Suite::Tables,
];

/// Parses `3..12` (inclusive), `4,6,8` or a single degree.
pub fn parse_degrees(s: &str) -> Result<Vec<u32>, CliError> {
    let bad = |e: String| CliError::Usage(format!("--n `{s}`: {e}"));
    let num = |t: &str| t.trim().parse::<u32>().map_err(|e| bad(e.to_string()));
    let degrees: Vec<u32> = if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        (num(a)?..=num(b)?).collect()
    } else {
        s.split(',').map(num).collect::<Result<_, _>>()?
    };
    if degrees.is_empty() || degrees.iter().any(|&n| n == 0 || n > 20) {
        return Err(bad("degrees must lie in 1..=20".into()));
    }
    Ok(degrees)
}

fn field(n: u32) -> Result<Arc<Field>, CliError> {
    Ok(Arc::new(Field::conway(n)?))
}

fn exact(
    theorem: &str,
    params: serde_json::Value,
    predicted: i64,
    measured: i64,
    failure: Option<String>,
) -> TheoremReport {
    let failure =
        failure.or_else(|| (predicted != measured).then(|| format!("predicted {predicted}, measured {measured}")));
    TheoremReport {
        theorem: theorem.into(),
        params,
        predicted,
        measured,
        verdict: if failure.is_some() { Verdict::Violated } else { Verdict::Tight },
        witnesses: Vec::new(),
        counterexample: failure,
    }
}

fn kloosterman(n: u32) -> Result<Vec<TheoremReport>, CliError> {
    let f = field(n)?;
    let p = KloostermanProfile::compute(&f);
    let params = json!({ "n": n });
    let (kmax, kmin) = extrema_closed_form(n);
    let violations = congruence_violations(&f, &p);
    let s = verify_value_surjectivity(&p);
    let missing = (!s.holds()).then(|| format!("missing {:?}, unexpected {:?}", s.missing, s.unexpected));
    Ok(vec![
        exact("kloosterman-zero", params.clone(), 0, p.get(0), None),
        exact(
            "kloosterman-congruence",
            params.clone(),
            0,
            violations.len() as i64,
            violations.first().map(|g| format!("gamma={g:#x} K={}", p.get(*g))),
        ),
        exact("kloosterman-max", params.clone(), kmax, p.k_max, None),
        exact("kloosterman-min", params.clone(), kmin, p.k_min, None),
        exact("kloosterman-values", params, s.permitted.len() as i64, s.attained.len() as i64, missing),
    ])
}

fn unit_circle(n: u32) -> Result<Vec<TheoremReport>, CliError> {
    let f = field(n)?;
    let ctx = UnitCircleContext::new(&f)?;
    let mut failure = None;
    for g in f.nonzero() {
        let (lhs, rhs) = ctx.unit_circle_identity(&f, g)?;
        if lhs != rhs {
            failure = Some(format!("gamma={g:#x}: {lhs} vs {rhs}"));
            break;
        }
    }
    let total = f.size() as i64 - 1;
    let measured = if failure.is_some() { 0 } else { total };
    Ok(vec![exact("unit-circle-sum", json!({ "n": n }), total, measured, failure)])
}

fn run_suite(suite: Suite, degrees: &[u32], seed: u64, t: usize, long: bool) -> Result<Vec<TheoremReport>, CliError> {
    let mut reports = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &n in degrees {
        match suite {
            Suite::Kloosterman => reports.extend(kloosterman(n)?),
            Suite::UnitCircle if n % 2 == 0 => reports.extend(unit_circle(n)?),
            Suite::CubicBound => {
                let f = field(n)?;
                for k in 1..n.max(2) {
                    reports.push(theorems::check_cubic_bound(&f, k)?);
                }
            }
            Suite::CubicQuadraticBound => {
                let f = field(n)?;
                let Construction::CubicPlusQuadratic { terms, .. } = Construction::x7_plus_wx3(&f) else {
                    unreachable!()
                };
                for k in 1..n.max(2) {
                    reports.push(theorems::check_cubic_plus_quadratic_bound(&f, k, &terms)?);
                }
            }
            Suite::DillonFormula if n % 2 == 0 => {
                let f = field(n)?;
                let m = n / 2;
                for l in (1..(1u64 << n)).filter(|&l| gcd(l, (1 << m) + 1) == 1) {
                    reports.push(theorems::check_dillon(&f, l)?);
                }
            }
            Suite::InverseFormula => reports.push(theorems::check_inverse(&field(n)?)?),
            Suite::ModifiedInverse if n % 2 == 0 => {
                let f = field(n)?;
                let xis: Vec<u32> = if n <= 6 { f.elements().collect() } else { vec![0, 1, f.generator()] };
                for xi in xis {
                    let w = f.generator();
                    let a = if w == f.inv(xi) { f.square(w) } else { w };
                    reports.push(theorems::check_modified_inverse(&f, xi, a)?);
                }
            }
            Suite::ModifiedKasami => {
                let f = field(n)?;
                for k in (1..n).filter(|&k| kasami_hypotheses(n, k).is_ok()) {
                    reports.push(theorems::check_modified_kasami(&f, k, 0, f.generator())?);
                }
            }
            Suite::PointModification => {
                let f = field(n)?;
                let bases = [
                    Construction::Inverse,
                    Construction::Power { d: 7 },
                    Construction::Random { seed: seed ^ n as u64, permutation: false },
                ];
                for c in bases {
                    let base = build(&f, &c)?;
                    let mut xs = BTreeSet::new();
                    while xs.len() < t.min(f.size()) {
                        xs.insert(rng.gen_range(0..f.size() as u32));
                    }
                    let mods: Vec<(u32, u32)> =
                        xs.into_iter().map(|x| (x, rng.gen_range(0..f.size() as u32))).collect();
                    reports.push(theorems::check_point_modification(&base, &mods)?);
                }
            }
            Suite::LowerBound => {
                let f = field(n)?;
                for c in [Construction::Inverse, Construction::Power { d: 7 }] {
                    reports.push(theorems::check_lower_bound(&build(&f, &c)?)?);
                }
            }
            _ => {}
        }
    }
    if suite == Suite::Tables {
        for id in TABLE_IDS {
            let o = tables::reproduce(id, ReproduceOptions { long })?;
            let bad: Vec<String> =
                o.mismatches().map(|r| format!("{}: expected {} measured {}", r.key, r.expected, r.measured)).collect();
            let failure = (!bad.is_empty()).then(|| bad.join("; "));
            let params = json!({ "table": id, "skipped": o.skipped });
            reports.push(exact("table", params, o.rows.len() as i64, (o.rows.len() - bad.len()) as i64, failure));
        }
    }
    Ok(reports)
}

fn line(r: &TheoremReport) -> String {
    let verdict = format!("{:?}", r.verdict).to_lowercase();
    let mut s = format!("[{verdict}] {} {}: measured {}, predicted {}", r.theorem, r.params, r.measured, r.predicted);
    if let Some(c) = &r.counterexample {
        s.push_str(&format!(" -- counterexample: {c}"));
    }
    s
}

pub fn run(ctx: &Context, args: &VerifyArgs) -> Result<(), CliError> {
    let suites: Vec<Suite> = if args.suite == Suite::All { ALL.to_vec() } else { vec![args.suite] };
    let mut reports = Vec::new();
    for suite in suites {
        let degrees = match &args.n {
            Some(s) if args.suite != Suite::All => parse_degrees(s)?,
            _ => suite.default_degrees(),
        };
        for &n in &degrees {
            ctx.guard(&format!("{suite:?} at n={n}"), suite.cost(n))?;
        }
        reports.extend(run_suite(suite, &degrees, args.seed, args.t, ctx.long)?);
    }
    let text = match ctx.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&reports).expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv => reports.iter().map(|r| line(r) + "\n").collect(),
    };
    ctx.emit(&text)?;
    let violated = reports.iter().filter(|r| !r.passed()).count();
    eprintln!("{} reports, {violated} violated", reports.len());
    if violated > 0 {
        return Err(CliError::Failed(format!("{violated} verdicts violated")));
    }
    Ok(())
}

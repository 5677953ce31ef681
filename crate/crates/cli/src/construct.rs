use crate::CliError;
use clap::Args;
use dlct_core::functions::{build_with_warnings, CosetBranch, QuadraticTerm};
use dlct_core::theorems::canonical_kasami_k;
use dlct_core::{Construction, Field, FieldInfo, FunctionTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;

pub fn parse_hex(s: &str) -> Result<u32, String> {
    let digits = s.trim().trim_start_matches("0x").trim_start_matches("0X");
    u32::from_str_radix(digits, 16).map_err(|e| format!("bad hex value `{s}`: {e}"))
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    /// Field degree n.
    #[arg(long)]
    pub n: Option<u32>,
    /// Reduction polynomial (hex, including the x^n bit).
    #[arg(long, value_parser = parse_hex)]
    pub poly: Option<u32>,
    /// Primitive element w (hex).
    #[arg(long, value_parser = parse_hex)]
    pub generator: Option<u32>,
    /// Field description file with `n=`, `poly=` and `generator=` lines.
    #[arg(long)]
    pub field_spec: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConstructionArgs {
    /// power, cubic, kasami, dillon, inverse, quadratic, cubic-plus-quadratic,
    /// x7-plus-wx3, modified-inverse, cyclotomic, subfield-branch-inverse, random.
    #[arg(long)]
    pub construction: Option<String>,
    /// Exponent for `power`, subgroup index for `cyclotomic`.
    #[arg(long)]
    pub d: Option<u64>,
    /// Frobenius parameter for `cubic`, `kasami` and `cubic-plus-quadratic`.
    #[arg(long)]
    pub k: Option<u32>,
    /// Multiplier for `dillon`.
    #[arg(long)]
    pub l: Option<u64>,
    /// Modify this many random points (seeded) on top of the construction.
    #[arg(long)]
    pub t: Option<usize>,
    /// Explicit modifications `xi:a,...` in hex.
    #[arg(long)]
    pub points: Option<String>,
    /// `i:j:coeff,...` for quadratic terms or `coset:coeff:exponent,...` for `cyclotomic` (coefficients in hex).
    #[arg(long)]
    pub coeffs: Option<String>,
    /// Seed for random tables and random modifications.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Make `random` a permutation.
    #[arg(long)]
    pub permutation: bool,
    /// Import an S-box file (`n=<n>` then one hex value per line).
    #[arg(long)]
    pub sbox: Option<PathBuf>,
}

/// Recorded alongside every emitted artifact.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub field: FieldInfo,
    pub construction: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Provenance {
    pub fn new(field: &Field, construction: impl Into<String>, seed: u64) -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            field: field.info(),
            construction: construction.into(),
            seed,
            warnings: Vec::new(),
        }
    }

    /// `#`-prefixed header lines for CSV artifacts.
    pub fn csv_header(&self) -> String {
        let mut out = format!(
            "# {} {}\n# n={} poly={:#x} generator={:#x}\n# construction={}\n# seed={}\n",
            self.tool, self.version, self.field.n, self.field.poly, self.field.generator, self.construction, self.seed
        );
        for w in &self.warnings {
            out.push_str(&format!("# warning: {w}\n"));
        }
        out
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Field from `--field-spec`, or `--n` with optional `--poly`/`--generator`.
/// `fallback_n` supplies the degree when the S-box header fixes it.
pub fn resolve_field(args: &FieldArgs, fallback_n: Option<u32>) -> Result<Option<Arc<Field>>, CliError> {
    if let Some(path) = &args.field_spec {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let field = Field::from_spec_text(&text)?;
        if args.n.is_some_and(|n| n != field.degree()) {
            return Err(usage("--n disagrees with the field spec file"));
        }
        return Ok(Some(Arc::new(field)));
    }
    let Some(n) = args.n.or(fallback_n) else {
        return Ok(None);
    };
    if args.poly.is_none() && args.generator.is_none() {
        return Ok(Some(Arc::new(Field::conway(n)?)));
    }
    let defaults = Field::conway(n)?;
    let poly = args.poly.unwrap_or(defaults.poly());
    let generator = args.generator.unwrap_or(defaults.generator());
    Ok(Some(Arc::new(Field::new(n, poly, generator)?)))
}

fn parse_triples(s: &str) -> Result<Vec<[String; 3]>, CliError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|part| match part.trim().split(':').collect::<Vec<_>>()[..] {
            [a, b, c] => Ok([a.to_string(), b.to_string(), c.to_string()]),
            _ => Err(usage(format!("`{part}`: expected three `:`-separated fields"))),
        })
        .collect()
}

fn parse_int<T: std::str::FromStr>(s: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    s.trim().parse().map_err(|e| usage(format!("`{s}`: {e}")))
}

fn parse_points(s: &str) -> Result<Vec<(u32, u32)>, CliError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|part| {
            let (x, a) = part.trim().split_once(':').ok_or_else(|| usage(format!("`{part}`: expected xi:a")))?;
            Ok((parse_hex(x).map_err(usage)?, parse_hex(a).map_err(usage)?))
        })
        .collect()
}

fn quadratic_terms(args: &ConstructionArgs) -> Result<Option<Vec<QuadraticTerm>>, CliError> {
    let Some(s) = &args.coeffs else { return Ok(None) };
    parse_triples(s)?
        .iter()
        .map(|[i, j, c]| {
            let (i, j): (u32, u32) = (parse_int(i)?, parse_int(j)?);
            Ok(QuadraticTerm { i: i.min(j), j: i.max(j), coeff: parse_hex(c).map_err(usage)? })
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

/// Maps the construction flags to a [`Construction`].
pub fn construction(field: &Field, args: &ConstructionArgs) -> Result<Construction, CliError> {
    let name = args.construction.as_deref().ok_or_else(|| usage("--construction or --sbox is required"))?;
    let k = |default: Option<u32>| args.k.or(default).ok_or_else(|| usage(format!("{name} needs --k")));
    let base = match name {
        "power" => Construction::Power { d: args.d.ok_or_else(|| usage("power needs --d"))? },
        "cubic" => Construction::CubicGold { k: k(Some(1))? },
        "kasami" => Construction::Kasami { k: k(canonical_kasami_k(field.degree()))? },
        "dillon" => Construction::Dillon { l: args.l.unwrap_or(1) },
        "inverse" => Construction::Inverse,
        "quadratic" => Construction::Quadratic {
            terms: quadratic_terms(args)?.ok_or_else(|| usage("quadratic needs --coeffs i:j:coeff,..."))?,
        },
        "cubic-plus-quadratic" => match quadratic_terms(args)? {
            Some(terms) => Construction::CubicPlusQuadratic { k: k(Some(1))?, terms },
            None => Construction::x7_plus_wx3(field),
        },
        "x7-plus-wx3" => Construction::x7_plus_wx3(field),
        "modified-inverse" => Construction::modified_inverse_at_zero(field),
        "cyclotomic" => {
            let index = args.d.ok_or_else(|| usage("cyclotomic needs --d <index>"))?;
            let spec =
                args.coeffs.as_deref().ok_or_else(|| usage("cyclotomic needs --coeffs coset:coeff:exponent,..."))?;
            let branches = parse_triples(spec)?
                .iter()
                .map(|[coset, c, e]| {
                    Ok(CosetBranch {
                        coset: parse_int(coset)?,
                        coefficient: parse_hex(c).map_err(usage)?,
                        exponent: parse_int(e)?,
                    })
                })
                .collect::<Result<_, CliError>>()?;
            Construction::GeneralizedCyclotomic { index, branches }
        }
        "subfield-branch-inverse" => Construction::SubfieldBranchInverse { scale: None },
        "random" => Construction::Random { seed: args.seed, permutation: args.permutation },
        other => return Err(usage(format!("unknown construction `{other}`"))),
    };
    let mut points = match &args.points {
        Some(s) => parse_points(s)?,
        None => Vec::new(),
    };
    if let Some(t) = args.t {
        if t > field.size() {
            return Err(usage(format!("--t {t} exceeds the field size")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        let taken: BTreeSet<u32> = points.iter().map(|p| p.0).collect();
        let mut chosen = BTreeSet::new();
        while chosen.len() < t {
            let x = rng.gen_range(0..field.size() as u32);
            if !taken.contains(&x) && chosen.insert(x) {
                points.push((x, rng.gen_range(0..field.size() as u32)));
            }
        }
    }
    Ok(if points.is_empty() { base } else { Construction::PointModified { base: Box::new(base), points } })
}

/// Builds the requested table and its provenance record.
pub fn resolve(field_args: &FieldArgs, args: &ConstructionArgs) -> Result<(FunctionTable, Provenance), CliError> {
    if let Some(path) = &args.sbox {
        if args.construction.is_some() {
            return Err(usage("--sbox and --construction are mutually exclusive"));
        }
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let header_n = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .find(|l| !l.is_empty())
            .and_then(|l| l.strip_prefix("n="))
            .and_then(|n| n.trim().parse().ok());
        let field = resolve_field(field_args, header_n)?;
        let table = FunctionTable::from_text(&text, field)?;
        let label = format!("sbox {}", path.display());
        let prov = Provenance::new(table.field(), &label, args.seed);
        return Ok((table.with_label(label), prov));
    }
    let field = resolve_field(field_args, None)?.ok_or_else(|| usage("--n, --field-spec or --sbox is required"))?;
    let c = construction(&field, args)?;
    let (table, warnings) = build_with_warnings(&field, &c)?;
    let mut prov = Provenance::new(&field, table.label(), args.seed);
    prov.warnings = warnings;
    Ok((table, prov))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(name: &str) -> ConstructionArgs {
        ConstructionArgs {
            construction: Some(name.into()),
            d: None,
            k: None,
            l: None,
            t: None,
            points: None,
            coeffs: None,
            seed: 0,
            permutation: false,
            sbox: None,
        }
    }

    #[test]
    fn hex_and_points() {
        assert_eq!(parse_hex("0x1f"), Ok(31));
        assert_eq!(parse_hex("1F"), Ok(31));
        assert!(parse_hex("zz").is_err());
        assert_eq!(parse_points("0:2, 5:a").unwrap(), vec![(0, 2), (5, 10)]);
        assert!(parse_points("3").is_err());
    }

    #[test]
    fn names_map_to_constructions() {
        let f = Field::conway(7).unwrap();
        assert_eq!(construction(&f, &args("kasami")).unwrap(), Construction::Kasami { k: 2 });
        assert_eq!(construction(&f, &args("cubic-plus-quadratic")).unwrap(), Construction::x7_plus_wx3(&f));
        let mut q = args("quadratic");
        q.coeffs = Some("1:0:3".into());
        assert_eq!(
            construction(&f, &q).unwrap(),
            Construction::Quadratic { terms: vec![QuadraticTerm { i: 0, j: 1, coeff: 3 }] }
        );
        let mut c = args("cyclotomic");
        c.d = Some(1);
        c.coeffs = Some("0:1:126".into());
        assert!(matches!(construction(&f, &c).unwrap(), Construction::GeneralizedCyclotomic { index: 1, .. }));
        assert!(construction(&f, &args("power")).is_err());
        assert!(construction(&f, &args("unknown")).is_err());
    }

    #[test]
    fn random_points_avoid_explicit_ones() {
        let f = Field::conway(4).unwrap();
        let mut a = args("inverse");
        a.points = Some("0:1".into());
        a.t = Some(15);
        let Construction::PointModified { points, .. } = construction(&f, &a).unwrap() else { panic!() };
        let xs: BTreeSet<u32> = points.iter().map(|p| p.0).collect();
        assert_eq!(xs.len(), 16);
        a.t = Some(17);
        assert!(construction(&f, &a).is_err());
    }
}

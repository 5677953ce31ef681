use crate::construct::{resolve, resolve_field, Provenance};
use crate::output::{csv_rows, envelope};
use crate::{AnalyzeArgs, CliError, Context, Format, MethodArg, Quantity};
use dlct_core::kloosterman::KloostermanProfile;
use dlct_core::spectra::{self, Method};
use dlct_core::tables::{self, full_scan_ops, row_one_ops, ReproduceOptions, TABLE_IDS};
use serde_json::json;

fn method(m: MethodArg) -> Method {
    match m {
        MethodArg::Naive => Method::Naive,
        MethodArg::Transform => Method::Transform,
        MethodArg::Auto => Method::Auto,
    }
}

fn cube(n: u32) -> u128 {
    1u128 << (3 * n)
}

pub fn run(ctx: &Context, args: &AnalyzeArgs) -> Result<(), CliError> {
    if args.quantity == Quantity::Kloosterman {
        return kloosterman(ctx, args);
    }
    let (f, prov) = resolve(&args.field, &args.construction)?;
    let n = f.degree();
    let method = method(args.method);
    let scan = match (f.power_exponent().is_some(), method) {
        (_, Method::Naive) => cube(n),
        (true, _) => row_one_ops(n),
        (false, _) => full_scan_ops(n),
    };
    let quantity = format!("{:?}", args.quantity).to_lowercase();
    match args.quantity {
        Quantity::Dlu => {
            ctx.guard("DLU scan", scan)?;
            let d = spectra::dlu(&f, method);
            let bound = spectra::dlu_lower_bound(n, n).ok().map(|b| b.integer_bound());
            let result = json!({ "dlu": d.value, "u": d.u, "v": d.v, "entry": d.entry, "lower_bound": bound });
            emit(ctx, &prov, &quantity, result)
        }
        Quantity::Spectrum => {
            ctx.guard("DLCT spectrum", scan)?;
            let h = spectra::dlct_spectrum(&f, method);
            let stat = json!({ "dlu": h.max_abs() });
            emit_histogram(ctx, &prov, &quantity, &h, stat)
        }
        Quantity::Ddt => {
            ctx.guard("DDT", 1u128 << (2 * n))?;
            let du = spectra::ddt_uniformity(&f);
            emit_histogram(
                ctx,
                &prov,
                &quantity,
                &spectra::ddt_spectrum(&f),
                json!({ "differential_uniformity": du.value }),
            )
        }
        Quantity::Lat => {
            ctx.guard("Walsh spectrum", full_scan_ops(n))?;
            let stat = json!({ "nonlinearity": spectra::nonlinearity(&f) });
            emit_histogram(ctx, &prov, &quantity, &spectra::lat_spectrum(&f), stat)
        }
        Quantity::Bct => {
            ctx.guard("BCT", cube(n))?;
            if f.is_permutation() {
                let bu = spectra::boomerang_uniformity(&f)?;
                let h = spectra::bct_spectrum(&f)?;
                emit_histogram(ctx, &prov, &quantity, &h, json!({ "boomerang_uniformity": bu.value }))
            } else {
                let bu = spectra::boomerang_system_uniformity(&f);
                let result =
                    json!({ "boomerang_uniformity": bu.value, "u": bu.u, "v": bu.v, "definition": "boomerang-system" });
                emit(ctx, &prov, &quantity, result)
            }
        }
        Quantity::Properties => {
            ctx.guard("property scan", cube(n))?;
            let result = json!({
                "nonlinearity": spectra::nonlinearity(&f),
                "differential_uniformity": spectra::ddt_uniformity(&f).value,
                "boomerang_uniformity": spectra::boomerang_system_uniformity(&f).value,
                "dlu": spectra::dlu(&f, Method::Transform).value,
                "permutation": f.is_permutation(),
            });
            emit(ctx, &prov, &quantity, result)
        }
        Quantity::Kloosterman => unreachable!(),
    }
}

fn kloosterman(ctx: &Context, args: &AnalyzeArgs) -> Result<(), CliError> {
    let field = resolve_field(&args.field, None)?.ok_or_else(|| CliError::Usage("kloosterman needs --n".into()))?;
    let prov = Provenance::new(&field, "kloosterman", args.construction.seed);
    if let Some(g) = args.gamma {
        field.check(g as u64)?;
        let k = dlct_core::kloosterman::kloosterman(&field, g);
        return emit(ctx, &prov, "kloosterman", json!({ "gamma": g, "K": k }));
    }
    ctx.guard("Kloosterman profile", row_one_ops(field.degree()))?;
    let p = KloostermanProfile::compute(&field);
    match ctx.format {
        Format::Json => ctx.emit(&envelope(&prov, "kloosterman", p.summary_json())),
        Format::Csv => ctx.emit(&format!("{}# k_max={} k_min={}\n{}", prov.csv_header(), p.k_max, p.k_min, p.to_csv())),
    }
}

fn emit(ctx: &Context, prov: &Provenance, quantity: &str, result: serde_json::Value) -> Result<(), CliError> {
    match ctx.format {
        Format::Json => ctx.emit(&envelope(prov, quantity, result)),
        Format::Csv => ctx.emit(&format!("{}{}", prov.csv_header(), csv_rows(&result))),
    }
}

fn emit_histogram(
    ctx: &Context,
    prov: &Provenance,
    quantity: &str,
    h: &spectra::SpectrumHistogram,
    stat: serde_json::Value,
) -> Result<(), CliError> {
    match ctx.format {
        Format::Json => {
            let counts: serde_json::Map<String, serde_json::Value> =
                h.counts.iter().map(|(v, c)| (v.to_string(), json!(c))).collect();
            let result = json!({ "statistics": stat, "population": h.population, "spectrum": counts });
            ctx.emit(&envelope(prov, quantity, result))
        }
        Format::Csv => {
            let stats: String = stat.as_object().into_iter().flatten().map(|(k, v)| format!("# {k}={v}\n")).collect();
            ctx.emit(&format!("{}{stats}{}", prov.csv_header(), h.to_csv()))
        }
    }
}

pub fn reproduce(ctx: &Context, id: &str) -> Result<(), CliError> {
    if id == "list" {
        return ctx.emit(&TABLE_IDS.iter().map(|t| format!("{t}\n")).collect::<String>());
    }
    let outcome = tables::reproduce(id, ReproduceOptions { long: ctx.long })?;
    let text = match ctx.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json!({
                "tool": env!("CARGO_PKG_NAME"),
                "version": env!("CARGO_PKG_VERSION"),
                "table": outcome,
            }))
            .expect("serializable");
            s.push('\n');
            s
        }
        Format::Csv => outcome.to_csv(),
    };
    ctx.emit(&text)?;
    let total = outcome.rows.len();
    let bad: Vec<String> = outcome.mismatches().map(|r| r.key.clone()).collect();
    if !outcome.skipped.is_empty() {
        eprintln!("{id}: skipped {} (pass --long)", outcome.skipped.join(" "));
    }
    if bad.is_empty() {
        eprintln!("{id}: {total} rows match");
        Ok(())
    } else {
        Err(CliError::Failed(format!("{id}: mismatch at {}", bad.join(", "))))
    }
}

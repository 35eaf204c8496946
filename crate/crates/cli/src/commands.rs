use serde_json::{json, Value};
use zetaforge::analysis::{
    decay_certificate, decay_table, denominator_report, doubled_lcm_decay, lcm_growth, sup_ratio,
};
use zetaforge::cache::{CacheEntry, FormCache};
use zetaforge::hp::HpReal;
use zetaforge::numeric::{eval_form, mc_integral};
use zetaforge::reducer::{compute_form, Family, FamilySpec};
use zetaforge::series::SeriesError;
use zetaforge::zeta_form::{FormRecord, ZetaForm};

use crate::manifest::{document, RunManifest};
use crate::render::{pretty, tabular, Outcome};
use crate::{CacheAction, Cli, CliError, Command, Format, EXIT_MISMATCH};

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Form { family, n, n_ceiling } => form(cli, *family, *n, *n_ceiling),
        Command::VerifyPaper => crate::verify::verify(cli),
        Command::Bounds => bounds(cli),
        Command::Lcm { nmax, exact_upto } => lcm(cli, *nmax, *exact_upto),
        Command::Denoms { family, nmax } => denoms(cli, *family, *nmax),
        Command::Decay { family, nmax } => decay(cli, *family, *nmax),
        Command::Mc { family, n, samples, seed } => mc(cli, *family, *n, *samples, *seed),
        Command::Cache { action } => cache(cli, action),
    }
}

fn defect(e: impl std::fmt::Display) -> CliError {
    CliError::Defect(e.to_string())
}

/// Exact form, or a defect report carrying the divergence ledger.
pub fn exact_form(spec: FamilySpec) -> Result<zetaforge::reducer::ComputedForm, CliError> {
    compute_form(spec).map_err(|e| match e {
        SeriesError::NonCancellingDivergence(ledger) => CliError::Defect(format!(
            "divergence did not cancel for {spec}; ledger: harmonic coefficient {}, polynomial part {}",
            ledger.divergent_harmonic, ledger.divergent_poly
        )),
        other => defect(other),
    })
}

fn form_document(spec: FamilySpec, digits: u32) -> Result<Value, CliError> {
    let computed = exact_form(spec)?;
    let value = eval_form(&computed.form, digits).map_err(defect)?;
    let cert = sup_ratio(spec.family).map_err(defect)?;
    let base = eval_form(&exact_form(FamilySpec::new(spec.family, 0))?.form, digits).map_err(defect)?;
    let bound = &base.abs() * &cert.closed_form_value.powi(spec.n as usize);
    let holds = !value.is_negative() && !value.is_zero() && value.abs() <= bound;
    let payload = json!({
        "form": FormRecord::new(spec.family.name(), spec.n, &computed.form),
        "structural": computed.report,
        "value": value.round_to(digits),
        "bound": {
            "base_integral": base.round_to(digits),
            "sup_constant": cert.closed_form_value.round_to(digits),
            "bound": bound.round_to(digits),
            "holds": holds,
        },
    });
    let manifest = RunManifest::new("form", digits)
        .param("family", spec.family.name())
        .param("n", spec.n)
        .seal(&payload);
    Ok(document(&manifest, payload))
}

fn form(cli: &Cli, family: Family, n: u32, ceiling: u32) -> Result<Outcome, CliError> {
    if n > ceiling {
        return Err(CliError::Usage(format!("n = {n} exceeds the ceiling {ceiling}; raise --n-ceiling to proceed")));
    }
    let spec = FamilySpec::new(family, n);
    let cache = FormCache::resolve(cli.cache_dir.as_deref());
    let bytes = match cache.load(spec).map_err(defect)? {
        Some((bytes, _)) => bytes,
        None => {
            let bytes = pretty(&form_document(spec, cli.digits)?);
            cache.store(spec, &bytes).map_err(defect)?;
            bytes
        }
    };
    let doc: Value = serde_json::from_slice(&bytes).map_err(defect)?;
    let entry: CacheEntry = serde_json::from_value(doc.clone()).map_err(defect)?;
    let form = entry.form.to_form().map_err(defect)?;
    let stdout = match cli.format {
        Format::Json => String::from_utf8(bytes.clone()).map_err(defect)?,
        Format::Text => form_text(spec, &form, &doc),
        Format::Csv => {
            let mut headers = vec!["family".to_string(), "n".into(), "rational".into()];
            let mut row = vec![family.name().to_string(), n.to_string(), entry.form.rational.clone()];
            for (k, v) in &entry.form.zeta {
                headers.push(k.clone());
                row.push(v.clone());
            }
            headers.push("value".into());
            row.push(doc["value"]["value"].as_str().unwrap_or("").to_string());
            let headers: Vec<&str> = headers.iter().map(String::as_str).collect();
            crate::render::csv_table(&headers, &[row])
        }
    };
    Ok(Outcome { stdout, document: bytes, exit: 0 })
}

fn form_text(spec: FamilySpec, form: &ZetaForm, doc: &Value) -> String {
    let support: Vec<String> = form.support().iter().map(|a| format!("ζ({a})")).collect();
    let bound = &doc["bound"];
    format!(
        "{spec}: {form}\nzeta values present: {}\nvalue: {}\nbound |I_0|·C^n: {} ({})\n",
        if support.is_empty() { "none".to_string() } else { support.join(", ") },
        doc["value"]["value"].as_str().unwrap_or("?"),
        bound["bound"]["value"].as_str().unwrap_or("?"),
        if bound["holds"].as_bool() == Some(true) { "holds" } else { "VIOLATED" },
    )
}

fn bounds(cli: &Cli) -> Result<Outcome, CliError> {
    let mut certs = Vec::new();
    let mut doubled = Vec::new();
    let mut rows = Vec::new();
    for family in Family::ALL {
        let c = decay_certificate(family).map_err(defect)?;
        let d = doubled_lcm_decay(family);
        rows.push(vec![
            family.name().to_string(),
            c.closed_form.clone(),
            c.closed_form_value.to_sci(15),
            c.numeric_sup.to_sci(15),
            format!("{:?}", c.argmax.iter().map(|v| format!("{v:.10}")).collect::<Vec<_>>()),
            format!("e^{}", c.exponent),
            c.decay_product.to_fixed(6),
            c.satisfied.to_string(),
            format!("e^{} -> {}", d.exponent, d.product.to_fixed(4)),
        ]);
        certs.push(c);
        doubled.push(d);
    }
    let all = certs.iter().all(|c| c.satisfied);
    let payload = json!({ "certificates": certs, "doubled_lcm": doubled, "all_satisfied": all });
    let manifest = RunManifest::new("bounds", cli.digits);
    Ok(tabular(
        cli.format,
        manifest,
        payload,
        "Sup constants and decay certificates",
        &["family", "closed form", "value", "numeric sup", "argmax", "growth", "product", "< 1", "lcm(1..2n) variant"],
        &rows,
        if all { "\nall certificates satisfied\n" } else { "\nsome certificate FAILED\n" },
        if all { 0 } else { EXIT_MISMATCH },
    ))
}

fn lcm(cli: &Cli, nmax: u64, exact_upto: u64) -> Result<Outcome, CliError> {
    if exact_upto > nmax {
        return Err(CliError::Usage(format!("--exact-upto {exact_upto} exceeds --nmax {nmax}")));
    }
    let rep = lcm_growth(nmax, exact_upto, cli.digits).map_err(defect)?;
    let rows: Vec<Vec<String>> =
        rep.rows.iter().map(|r| vec![r.n.to_string(), r.psi.to_sci(20), format!("{:.8}", r.ratio)]).collect();
    let footer = format!(
        "\nexact lcm agreement up to {}: {}\nmax psi(n)/n over [10, {}]: {}\npsi(n)/n < 1.0025 from n = {}\n",
        rep.exact_upto,
        rep.exact_match,
        rep.n_max,
        rep.max_ratio.map(|(n, r)| format!("{r:.8} at n = {n}")).unwrap_or_else(|| "n/a".into()),
        rep.threshold_1_0025.map(|n| n.to_string()).unwrap_or_else(|| "not reached".into()),
    );
    let exit = if rep.exact_match { 0 } else { EXIT_MISMATCH };
    let manifest = RunManifest::new("lcm", cli.digits).param("nmax", nmax).param("exact_upto", exact_upto);
    let payload = serde_json::to_value(&rep).map_err(defect)?;
    Ok(tabular(cli.format, manifest, payload, "psi(n) = log lcm(1..n)", &["n", "psi(n)", "psi(n)/n"], &rows, &footer, exit))
}

fn forms_upto(family: Family, nmax: u32) -> Result<Vec<(u32, ZetaForm)>, CliError> {
    (0..=nmax).map(|n| Ok((n, exact_form(FamilySpec::new(family, n))?.form))).collect()
}

fn denoms(cli: &Cli, family: Family, nmax: u32) -> Result<Outcome, CliError> {
    let rep = denominator_report(family, &forms_upto(family, nmax)?);
    let k = rep.power;
    let rows: Vec<Vec<String>> = rep
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.den_rational.to_string(),
                r.den_zeta.to_string(),
                r.lcm_n_pow.to_string(),
                yes_no(r.divides_lcm_n_pow),
                r.lcm_2n_pow.to_string(),
                yes_no(r.divides_lcm_2n_pow),
            ]
        })
        .collect();
    let lcm_n = format!("lcm(1..n)^{k}");
    let lcm_2n = format!("lcm(1..2n)^{k}");
    let manifest = RunManifest::new("denoms", cli.digits).param("family", family.name()).param("nmax", nmax);
    let payload = serde_json::to_value(&rep).map_err(defect)?;
    Ok(tabular(
        cli.format,
        manifest,
        payload,
        &format!("Denominators of the {family} forms"),
        &["n", "den(R)", "den(S)", &lcm_n, "divides", &lcm_2n, "divides"],
        &rows,
        "",
        0,
    ))
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

fn decay(cli: &Cli, family: Family, nmax: u32) -> Result<Outcome, CliError> {
    let table = decay_table(family, &forms_upto(family, nmax)?, cli.digits).map_err(defect)?;
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.value.to_sci(12),
                r.bound.to_sci(6),
                yes_no(r.positive && r.within_bound),
                r.scale.to_string(),
                r.scaled_residual.to_sci(8),
            ]
        })
        .collect();
    let ok = table.rows.iter().all(|r| r.positive && r.within_bound);
    let manifest = RunManifest::new("decay", cli.digits).param("family", family.name()).param("nmax", nmax);
    let payload = serde_json::to_value(&table).map_err(defect)?;
    Ok(tabular(
        cli.format,
        manifest,
        payload,
        &format!("|I_n| for {family} against |I_0|·C^n"),
        &["n", "|I_n|", "bound", "0 < |I_n| <= bound", "T", "T·|I_n|"],
        &rows,
        "",
        if ok { 0 } else { EXIT_MISMATCH },
    ))
}

fn mc(cli: &Cli, family: Family, n: u32, samples: u64, seed: u64) -> Result<Outcome, CliError> {
    let spec = FamilySpec::new(family, n);
    let est = mc_integral(spec, samples, seed).map_err(|e| CliError::Usage(e.to_string()))?;
    let exact = eval_form(&exact_form(spec)?.form, cli.digits).map_err(defect)?.to_f64();
    let z = (est.mean - exact) / est.std_error;
    let rows = vec![vec![
        family.name().to_string(),
        n.to_string(),
        samples.to_string(),
        seed.to_string(),
        format!("{:.10e}", est.mean),
        format!("{:.3e}", est.std_error),
        format!("{exact:.10e}"),
        format!("{z:.2}"),
    ]];
    let payload = json!({ "estimate": est, "exact": HpReal::from_f64(exact, 16).round_to(16), "z_score": z });
    let manifest = RunManifest::new("mc", cli.digits)
        .param("family", family.name())
        .param("n", n)
        .param("samples", samples)
        .seed(seed);
    Ok(tabular(
        cli.format,
        manifest,
        payload,
        "Monte Carlo on the unreduced integrand",
        &["family", "n", "samples", "seed", "mean", "std error", "exact", "z"],
        &rows,
        "",
        0,
    ))
}

fn cache(cli: &Cli, action: &CacheAction) -> Result<Outcome, CliError> {
    let cache = FormCache::resolve(cli.cache_dir.as_deref());
    let entries = || -> Result<Vec<FamilySpec>, CliError> { Ok(crate::verify::cached_specs(&cache)) };
    let manifest = RunManifest::new("cache", cli.digits).param("dir", cache.dir().display().to_string());
    match action {
        CacheAction::Path => {
            let payload = json!({ "dir": cache.dir().display().to_string() });
            let doc = pretty(&document(&manifest.seal(&payload), payload));
            let stdout = match cli.format {
                Format::Json => String::from_utf8(doc.clone()).map_err(defect)?,
                _ => format!("{}\n", cache.dir().display()),
            };
            Ok(Outcome { stdout, document: doc, exit: 0 })
        }
        CacheAction::List => {
            let rows: Vec<Vec<String>> = entries()?
                .iter()
                .map(|s| vec![s.family.name().to_string(), s.n.to_string(), cache.path(*s).display().to_string()])
                .collect();
            let payload = json!({ "entries": rows });
            Ok(tabular(cli.format, manifest, payload, "Cached forms", &["family", "n", "path"], &rows, "", 0))
        }
        CacheAction::Verify => {
            let mut rows = Vec::new();
            let mut ok = true;
            for spec in entries()? {
                let fresh = FormRecord::new(spec.family.name(), spec.n, &exact_form(spec)?.form);
                let verdict = match cache.verify(spec, &fresh).map_err(defect)? {
                    None => "identical".to_string(),
                    Some(diff) => {
                        ok = false;
                        format!("DIFFERS: {diff}")
                    }
                };
                rows.push(vec![spec.family.name().to_string(), spec.n.to_string(), verdict]);
            }
            let payload = json!({ "entries": rows, "all_identical": ok });
            Ok(tabular(
                cli.format,
                manifest,
                payload,
                "Cache against recomputation",
                &["family", "n", "verdict"],
                &rows,
                "",
                if ok { 0 } else { EXIT_MISMATCH },
            ))
        }
    }
}

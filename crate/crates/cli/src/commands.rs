//! Subcommand pipelines. Each returns an [`Outcome`] holding both renderings
//! and the exit code; printing is left to the caller.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use curvscan_core::catalog::{self, Params, NAMES};
use curvscan_core::classify::classify_geometry;
use curvscan_core::criterion::{check_theorem_criterion, search_null_congruence, CriterionReport, CriterionVerdict, VectorField};
use curvscan_core::invariants::{
    detect_phantom_functions, evaluate_invariants, standard_invariant_set, InvariantRecipe, InvariantReport,
};
use curvscan_core::probe::{discriminate_with_torsion, probe_invariant_set, torsional_bundle, Ansatz, Verdict};
use curvscan_core::symbolic::{parse, Expr, KernelError, SymbolTable};
use curvscan_core::{CurvatureBundle, Metric};
use serde_json::{json, Map, Value};

use crate::error::{CliError, EXIT_INCONCLUSIVE, EXIT_OK};
use crate::metric_file::MetricFile;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub exit: i32,
}

const TEXT_LIMIT: usize = 400;

fn clip(s: &str) -> String {
    if s.chars().count() <= TEXT_LIMIT {
        return s.to_string();
    }
    let head: String = s.chars().take(TEXT_LIMIT).collect();
    format!("{head}... ({} characters in total, see --json)", s.chars().count())
}

fn metric_json(g: &Metric) -> Value {
    json!({
        "coordinates": g.chart().coords(),
        "signature": g.signature().to_string(),
    })
}

fn invariants_json(report: &InvariantReport, recipes: &[InvariantRecipe]) -> Value {
    let mut m = Map::new();
    for (v, r) in report.values.iter().zip(recipes) {
        m.insert(
            v.name.clone(),
            json!({
                "value": v.value.to_string(),
                "zero": v.zero,
                "order": v.order,
                "parity_odd": r.parity_odd(),
            }),
        );
    }
    Value::Object(m)
}

fn invariants_text(out: &mut String, report: &InvariantReport) {
    let width = report.values.iter().map(|v| v.name.len()).max().unwrap_or(0);
    for v in &report.values {
        let _ = writeln!(out, "  {:width$} = {}", v.name, clip(&v.value.to_string()));
    }
}

fn set_json(s: &BTreeSet<String>) -> Value {
    Value::Array(s.iter().map(|x| Value::String(x.clone())).collect())
}

pub fn cmd_invariants(file: &MetricFile, order: usize) -> Result<Outcome, CliError> {
    let g = Arc::new(file.to_metric()?);
    let n = g.dim();
    let (bundle, recipes, connection) = match &file.torsion {
        None => (CurvatureBundle::new(g.clone(), order)?, standard_invariant_set(order, n), "levi-civita".to_string()),
        Some(t) => {
            let tests = file.test_functions()?;
            (
                torsional_bundle(&g, t.ansatz, &tests, order)?,
                probe_invariant_set(order, n),
                format!("torsion:{}", t.ansatz.name()),
            )
        }
    };
    let report = evaluate_invariants(&recipes, &bundle)?;
    let phantoms = detect_phantom_functions(&g, &report);
    let all_zero = report.all_zero();

    let mut text = String::new();
    let _ = writeln!(text, "invariants up to derivative order {order} ({connection} connection)");
    invariants_text(&mut text, &report);
    if all_zero {
        let _ = writeln!(text, "all invariants vanish");
    }
    if !phantoms.is_empty() {
        let list: Vec<&str> = phantoms.iter().map(|s| s.as_str()).collect();
        let _ = writeln!(
            text,
            "warning: metric functions absent from every invariant up to order {order}: {}",
            list.join(", ")
        );
    }
    let json = json!({
        "command": "invariants",
        "schema_version": SCHEMA_VERSION,
        "metric": metric_json(&g),
        "order": order,
        "connection": connection,
        "invariants": invariants_json(&report, &recipes),
        "all_zero": all_zero,
        "metric_functions": set_json(&g.free_functions()),
        "phantoms": set_json(&phantoms),
    });
    Ok(Outcome { text, json, exit: EXIT_OK })
}

/// Parses "e1, e2, …" into a vector field on the file's chart.
pub fn parse_field(file: &MetricFile, spec: &str) -> Result<VectorField, CliError> {
    let mut table = SymbolTable::new();
    for c in &file.coordinates {
        table.add_symbol(c);
    }
    for p in &file.parameters {
        table.add_symbol(p);
    }
    for (f, args) in &file.functions {
        let args: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
        table.add_function(f, &args);
    }
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in spec.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push((start, &spec[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push((start, &spec[start..]));
    let n = file.coordinates.len();
    if parts.len() != n {
        return Err(CliError::Input(format!("--field needs {n} components, got {}", parts.len())));
    }
    let comps = parts
        .iter()
        .map(|(off, p)| {
            parse(p, &table).map_err(|e| match e {
                KernelError::Parse { message, offset } => {
                    CliError::Input(format!("--field column {}: {message}", spec[..off + offset].chars().count() + 1))
                }
                other => CliError::Input(format!("--field: {other}")),
            })
        })
        .collect::<Result<Vec<Expr>, _>>()?;
    Ok(VectorField::new(file.chart()?, comps)?)
}

fn criterion_json(field: &VectorField, r: &CriterionReport) -> Value {
    json!({
        "field": field.to_string(),
        "components": field.components().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "null": r.null,
        "normal": r.normal,
        "nondiverging": r.nondiverging,
        "geodesic": {
            "strict": r.geodesic.strict,
            "projective": r.geodesic.projective,
            "lambda": r.geodesic.lambda.as_ref().map(|l| l.to_string()),
        },
        "annihilation": r.annihilation.map(|(holds, order)| json!({"holds": holds, "order": order})),
        "verdict": r.verdict.to_string(),
    })
}

fn criterion_text(out: &mut String, field: &VectorField, r: &CriterionReport) {
    let yn = |b: bool| if b { "yes" } else { "no" };
    let _ = writeln!(out, "field {field}");
    let _ = writeln!(out, "  null          {}", yn(r.null));
    let _ = writeln!(out, "  normal        {}", yn(r.normal));
    let _ = writeln!(out, "  non-diverging {}", yn(r.nondiverging));
    let geo = if r.geodesic.strict {
        "affinely parametrized".to_string()
    } else if r.geodesic.projective {
        format!("pregeodesic, λ = {}", r.geodesic.lambda.as_ref().map(|l| clip(&l.to_string())).unwrap_or_default())
    } else {
        "no".to_string()
    };
    let _ = writeln!(out, "  geodesic      {geo}");
    if let Some((holds, order)) = r.annihilation {
        let _ = writeln!(out, "  annihilates invariants up to order {order}: {}", yn(holds));
    }
    let _ = writeln!(out, "  verdict       {}", r.verdict);
}

pub fn cmd_criterion(file: &MetricFile, field: Option<&str>, order: Option<usize>) -> Result<Outcome, CliError> {
    let g = Arc::new(file.to_metric()?);
    let explicit = match field {
        Some(spec) => Some(parse_field(file, spec)?),
        None => None,
    };
    let invariants = match order {
        Some(k) => {
            let b = CurvatureBundle::new(g.clone(), k)?;
            Some(evaluate_invariants(&standard_invariant_set(k, g.dim()), &b)?)
        }
        None => None,
    };
    let fields = match &explicit {
        Some(f) => vec![f.clone()],
        None => search_null_congruence(&g)?,
    };
    let mut text = String::new();
    let mut reports = Vec::new();
    let mut verdict = CriterionVerdict::Negative;
    if explicit.is_none() {
        let _ = writeln!(text, "null congruence search: {} candidate(s)", fields.len());
    }
    for f in &fields {
        let r = check_theorem_criterion(&g, f, invariants.as_ref())?;
        if r.verdict == CriterionVerdict::CandidateDegenerate {
            verdict = CriterionVerdict::CandidateDegenerate;
        }
        criterion_text(&mut text, f, &r);
        reports.push(criterion_json(f, &r));
    }
    let _ = writeln!(text, "verdict: {verdict}");
    let json = json!({
        "command": "criterion",
        "schema_version": SCHEMA_VERSION,
        "metric": metric_json(&g),
        "searched": explicit.is_none(),
        "fields": reports,
        "verdict": verdict.to_string(),
    });
    Ok(Outcome { text, json, exit: EXIT_OK })
}

pub fn cmd_classify(file: &MetricFile, order: usize) -> Result<Outcome, CliError> {
    let g = Arc::new(file.to_metric()?);
    let rep = classify_geometry(&g, order)?;
    let mut text = String::new();
    let _ = writeln!(text, "step 1: {} null, normal, non-diverging candidate(s)", rep.candidates.len());
    for c in &rep.candidates {
        let _ = writeln!(text, "  {c}");
    }
    let recipes = standard_invariant_set(order, g.dim());
    match &rep.invariants {
        Some(inv) => {
            let _ = writeln!(text, "step 2: invariants up to order {order}");
            invariants_text(&mut text, inv);
            if rep.phantoms.is_empty() {
                let _ = writeln!(text, "every metric function appears in some invariant");
            } else {
                let list: Vec<&str> = rep.phantoms.iter().map(|s| s.as_str()).collect();
                let _ = writeln!(text, "phantoms up to order {order}: {}", list.join(", "));
            }
        }
        None => {
            let _ = writeln!(text, "step 2 skipped: no candidate field");
        }
    }
    let _ = writeln!(text, "verdict: {}", rep.verdict);
    let json = json!({
        "command": "classify",
        "schema_version": SCHEMA_VERSION,
        "metric": metric_json(&g),
        "order": order,
        "candidates": rep.candidates.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "invariants": rep.invariants.as_ref().map(|r| invariants_json(r, &recipes)),
        "phantoms": set_json(&rep.phantoms),
        "verdict": rep.verdict.to_string(),
    });
    Ok(Outcome { text, json, exit: EXIT_OK })
}

pub fn cmd_probe(first: &MetricFile, second: &MetricFile, ansatz: Ansatz, order: usize) -> Result<Outcome, CliError> {
    let g1 = Arc::new(first.to_metric()?);
    let g2 = Arc::new(second.to_metric()?);
    let rep = discriminate_with_torsion(&g1, &g2, ansatz, order)?;
    let recipes = probe_invariant_set(order, g1.dim());
    let mut text = String::new();
    let _ = writeln!(
        text,
        "torsion probe, {} ansatz, order {order}, test function(s) {}",
        ansatz.name(),
        rep.test_functions.join(", ")
    );
    let width = rep.first.values.iter().map(|v| v.name.len()).max().unwrap_or(0);
    let z = |b: bool| if b { "zero" } else { "nonzero" };
    let _ = writeln!(text, "  {:width$}   first     second", "");
    for (a, b) in rep.first.values.iter().zip(&rep.second.values) {
        let row = format!("  {:width$}   {:8}  {:8}", a.name, z(a.zero), z(b.zero));
        let mark = if a.zero != b.zero { "  <- split" } else { "" };
        let _ = writeln!(text, "{}{mark}", if mark.is_empty() { row.trim_end() } else { &row });
    }
    let _ = writeln!(text, "verdict: {}", rep.verdict);
    let exit = match rep.verdict {
        Verdict::Distinguished => EXIT_OK,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    };
    let json = json!({
        "command": "probe",
        "schema_version": SCHEMA_VERSION,
        "ansatz": ansatz.name(),
        "order": order,
        "test_functions": rep.test_functions,
        "first": { "metric": metric_json(&g1), "invariants": invariants_json(&rep.first, &recipes) },
        "second": { "metric": metric_json(&g2), "invariants": invariants_json(&rep.second, &recipes) },
        "splits": rep.splits,
        "verdict": rep.verdict.to_string(),
    });
    Ok(Outcome { text, json, exit })
}

pub fn cmd_catalog_list() -> Result<Outcome, CliError> {
    let mut text = String::new();
    let mut entries = Vec::new();
    for name in NAMES {
        let e = catalog::get(name, &Params::new())?;
        let _ = writeln!(text, "{:16} {}", e.name, e.description);
        let p = e.properties;
        entries.push(json!({
            "name": e.name,
            "description": e.description,
            "dimension": e.metric.dim(),
            "parameters": e.parameters,
            "functions": e.functions.iter().map(|(f, a)| format!("{f}({})", a.join(","))).collect::<Vec<_>>(),
            "properties": { "flat": p.flat, "vacuum": p.vacuum, "vsi": p.vsi, "kundt": p.kundt },
        }));
    }
    let json = json!({
        "command": "catalog",
        "schema_version": SCHEMA_VERSION,
        "entries": entries,
    });
    Ok(Outcome { text, json, exit: EXIT_OK })
}

/// The entry as metric file text; `alternate` selects its second chart.
pub fn cmd_catalog_export(name: &str, params: &Params, alternate: bool) -> Result<String, CliError> {
    let e = catalog::get(name, params)?;
    let file = MetricFile::from_entry(&e, alternate);
    let title = if alternate {
        format!("{} (alternate chart)", e.description)
    } else {
        e.description.clone()
    };
    Ok(file.to_text(Some(&title)))
}

/// Parses `key=value` catalog parameters.
pub fn parse_params(items: &[String]) -> Result<Params, CliError> {
    let mut p = Params::new();
    for it in items {
        let (k, v) = it
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("parameter '{it}' should be key=value")))?;
        p.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(p)
}

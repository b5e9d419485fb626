use std::path::PathBuf;
use std::time::Instant;

use serde_json::{json, Value};
use symsq_core::cache::{cache_gc, Cache};
use symsq_core::hecke::{dimension, HeckeEigenform};
use symsq_core::identities::run_all;
use symsq_core::lfun::{bessel_average_check, central_value, l_one_symsq, petersson_check};
use symsq_core::mollifier::{optimal_y, predictions, v_coeff};
use symsq_core::moments::{
    default_prime_bound, first_moment_empirical, first_moment_main, mollified_ratio, second_moment_empirical,
    second_moment_leading, Family, MomentReport,
};
use symsq_core::report::{fmt_param, moment_report, Report};

use crate::config::{Command, RunConfig};
use crate::{CliError, Outcome};

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Eigenforms => eigenforms(cfg),
        Command::Lvalues => lvalues(cfg),
        Command::Identities => identities(cfg),
        Command::TraceCheck => trace_check(cfg),
        Command::BesselCheck => bessel_check(cfg),
        Command::Mollifier => mollifier(cfg),
        Command::Moments => moments(cfg),
        Command::Ratio => ratio(cfg),
        Command::CacheGc => gc(cfg),
    }
}

fn new_report(cfg: &RunConfig, experiment: &str) -> Report {
    Report::new(experiment, cfg.embedded())
}

fn emit(cfg: &RunConfig, report: &Report, out: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let (j, c) = report.emit(&cfg.out_dir)?;
    out.push(j);
    out.push(c);
    Ok(())
}

fn forms_of_weight(cfg: &RunConfig, cache: &Cache, prime_bound: u64) -> Result<Vec<HeckeEigenform>, CliError> {
    let k = cfg.weight;
    if dimension(k) == 0 {
        return Err(CliError::Config(format!("there are no cusp forms of weight {k}")));
    }
    let bound = cfg.prime_bound.unwrap_or(prime_bound);
    Ok(cache.eigenforms(&[k], bound)?.pop().map(|(_, f)| f).unwrap_or_default())
}

fn eigenforms(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cache = Cache::open(&cfg.cache_dir)?;
    let forms = forms_of_weight(cfg, &cache, 1000)?;
    let primes = [2u64, 3, 5, 7, 11, 13];
    let mut cols = vec!["index", "prime_bound"];
    let names: Vec<String> = primes.iter().map(|p| format!("a_{p}")).collect();
    cols.extend(names.iter().map(String::as_str));
    let mut report = new_report(cfg, "eigenforms").name_part("k", cfg.weight).with_columns(&cols);
    for f in &forms {
        let mut row = vec![json!(f.index), json!(f.prime_bound)];
        for &p in &primes {
            row.push(json!(f.a_p(p)?));
        }
        report.push_row(row)?;
    }
    report.set_summary("dimension", forms.len());
    report.set_summary("cache_file", cache.path_for(cfg.weight).file_name().and_then(|n| n.to_str()));
    let mut reports = Vec::new();
    emit(cfg, &report, &mut reports)?;
    Ok(Outcome { reports, summary: json!({ "weight": cfg.weight, "dimension": forms.len() }), violation: None })
}

fn lvalues(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cache = Cache::open(&cfg.cache_dir)?;
    let k = cfg.weight;
    let mut forms = forms_of_weight(cfg, &cache, (12 * k as u64).max(1000))?;
    let mut central = Vec::with_capacity(forms.len());
    for f in forms.iter_mut() {
        if f.l1_symsq.is_none() {
            f.l1_symsq = Some(l_one_symsq(f)?);
        }
        central.push(central_value(f, cfg.tolerance)?);
    }
    if let Some(mut doc) = cache.load(k)? {
        doc.append_values(&forms, &central, cfg.tolerance);
        cache.store(&doc)?;
    }
    let mut report = new_report(cfg, "lvalues").name_part("k", k).with_columns(&[
        "index",
        "central_value",
        "truncation",
        "truncation_error",
        "l1_symsq",
    ]);
    for (f, c) in forms.iter().zip(&central) {
        report.push_row(vec![
            json!(f.index),
            json!(c.value),
            json!(c.truncation),
            json!(c.truncation_error),
            json!(f.l1_symsq),
        ])?;
    }
    let negative = central.iter().filter(|c| c.value < -c.truncation_error).count();
    report.set_summary("negative_central_values", negative);
    let mut reports = Vec::new();
    emit(cfg, &report, &mut reports)?;
    let violation = (negative > 0).then(|| format!("{negative} central values are negative beyond their error bound"));
    Ok(Outcome { reports, summary: json!({ "weight": k, "forms": forms.len() }), violation })
}

fn identities(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let outcomes = run_all(cfg.identity_size);
    let size = format!("{:?}", cfg.identity_size).to_lowercase();
    let mut report = new_report(cfg, "identities").name_part("", &size).with_columns(&[
        "family",
        "checks",
        "failures",
        "max_error",
        "tolerance",
        "first_failure",
    ]);
    for o in &outcomes {
        report.push_row(vec![
            json!(o.family),
            json!(o.checks),
            json!(o.failures),
            json!(o.max_error),
            json!(o.tolerance),
            json!(o.first_failure),
        ])?;
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.family).collect();
    let mut reports = Vec::new();
    emit(cfg, &report, &mut reports)?;
    let summary = json!({
        "passed": outcomes.iter().filter(|o| o.passed()).map(|o| o.family).collect::<Vec<_>>(),
        "failed": failed,
    });
    let violation = (!failed.is_empty()).then(|| format!("identity families failed: {}", failed.join(", ")));
    Ok(Outcome { reports, summary, violation })
}

fn trace_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cache = Cache::open(&cfg.cache_dir)?;
    let forms = forms_of_weight(cfg, &cache, cfg.n.max(cfg.m).max(1000))?;
    let check = petersson_check(&forms, cfg.n, cfg.m, cfg.c_max)?;
    let mut report = new_report(cfg, "trace-check")
        .name_part("k", cfg.weight)
        .name_part("n", cfg.n)
        .name_part("m", cfg.m)
        .name_part("c", cfg.c_max)
        .with_columns(&["k", "n", "m", "c_max", "lhs", "rhs", "defect", "tail_bound"]);
    report.push_row(vec![
        json!(check.weight),
        json!(check.n),
        json!(check.m),
        json!(check.c_max),
        json!(check.lhs),
        json!(check.rhs),
        json!(check.defect),
        json!(check.tail_bound),
    ])?;
    let mut reports = Vec::new();
    emit(cfg, &report, &mut reports)?;
    let violation = (check.defect > cfg.trace_threshold)
        .then(|| format!("trace formula defect {:e} exceeds {:e}", check.defect, cfg.trace_threshold));
    Ok(Outcome { reports, summary: json!({ "defect": check.defect }), violation })
}

fn bessel_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for &k in &cfg.k_scales {
        let mut report = new_report(cfg, "bessel-check")
            .name_part("K", fmt_param(k))
            .name_part("", cfg.h.identifier())
            .with_columns(&["K", "t", "lhs", "main_term", "error_budget", "slack", "within_budget"]);
        for &t in &cfg.bessel_t {
            let b = bessel_average_check(k, t, &cfg.h)?;
            if !b.within_budget {
                failures.push(format!("K={k} t={t}"));
            }
            report.push_row(vec![
                json!(b.k_scale),
                json!(b.t),
                json!(b.lhs),
                json!(b.main_term),
                json!(b.error_budget),
                json!(b.slack),
                json!(b.within_budget),
            ])?;
        }
        emit(cfg, &report, &mut reports)?;
    }
    let violation = (!failures.is_empty()).then(|| format!("outside the error budget: {}", failures.join(", ")));
    Ok(Outcome { reports, summary: json!({ "outside_budget": failures }), violation })
}

fn mollifier(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut reports = Vec::new();
    let mut lengths = Vec::new();
    for &k in &cfg.k_scales {
        let spec = optimal_y(k, cfg.a, &cfg.h)?;
        let pred = predictions(k, cfg.a, &cfg.h)?;
        let mut report = new_report(cfg, "mollifier")
            .name_part("K", fmt_param(k))
            .name_part("a", fmt_param(cfg.a))
            .name_part("", cfg.h.identifier())
            .with_columns(&["j", "v_j", "y_j", "x_j"]);
        for (&j, &y) in &spec.y {
            report.push_row(vec![json!(j), json!(v_coeff(j)?), json!(y), json!(spec.x.get(&j).copied().unwrap_or(0.0))])?;
        }
        report.set_summary("M", spec.length);
        report.set_summary("predictions", &pred);
        report.set_summary("spec", &spec);
        emit(cfg, &report, &mut reports)?;
        let spec_path = cfg.out_dir.join(format!("{}.spec.json", report.file_stem()));
        let mut text = spec.to_json()?;
        text.push('\n');
        symsq_core::cache::write_file_atomic(&spec_path, text.as_bytes())?;
        reports.push(spec_path);
        lengths.push(spec.length);
    }
    Ok(Outcome { reports, summary: json!({ "M": lengths }), violation: None })
}

fn family(cfg: &RunConfig, cache: &Cache, k: f64) -> Result<Family, CliError> {
    let bound = cfg.prime_bound.unwrap_or_else(|| default_prime_bound(k));
    Ok(cache.family(k, &cfg.h, bound, cfg.tolerance)?)
}

fn moments(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cache = Cache::open(&cfg.cache_dir)?;
    let mut cells = Vec::new();
    let mut violations = Vec::new();
    for &k in &cfg.k_scales {
        let start = Instant::now();
        let fam = family(cfg, &cache, k)?;
        let build = start.elapsed().as_secs_f64();
        for &r in &cfg.twists {
            let t = Instant::now();
            let main = first_moment_main(k, r, &cfg.h)?;
            let mut cell = MomentReport::new("first", &fam, None, r, first_moment_empirical(&fam, r)?, main);
            cell.runtime_seconds = build + t.elapsed().as_secs_f64();
            if cell.relative_deviation > cfg.first_moment_threshold {
                violations.push(format!("K={k} r={r}: first-moment deviation {:.3e}", cell.relative_deviation));
            }
            cells.push(cell);
            if (r * r) as f64 <= k {
                let t = Instant::now();
                let lead = second_moment_leading(k, r, &cfg.h)?;
                let mut cell = MomentReport::new("second", &fam, None, r, second_moment_empirical(&fam, r)?, lead);
                cell.runtime_seconds = build + t.elapsed().as_secs_f64();
                cells.push(cell);
            }
        }
    }
    let report = moment_report("moments", &cells, cfg.embedded(), cfg.timing)?;
    let mut reports = Vec::new();
    emit(cfg, &report, &mut reports)?;
    let summary = json!({
        "cells": cells.len(),
        "runtime_seconds": cells.iter().map(|c| (c.experiment.clone(), c.k_scale, c.r, c.runtime_seconds)).collect::<Vec<_>>(),
    });
    let violation = (!violations.is_empty()).then(|| violations.join("; "));
    Ok(Outcome { reports, summary, violation })
}

fn ratio(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cache = Cache::open(&cfg.cache_dir)?;
    let mut report = new_report(cfg, "ratio")
        .name_part("K", cfg.k_scales.iter().map(|&k| fmt_param(k)).collect::<Vec<_>>().join("-"))
        .name_part("a", fmt_param(cfg.a))
        .name_part("", cfg.h.identifier())
        .with_columns(&["K", "a", "M", "m1", "m2", "ratio", "family_count", "predicted", "ratio_over_predicted"]);
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for &k in &cfg.k_scales {
        let fam = family(cfg, &cache, k)?;
        let spec = optimal_y(k, cfg.a, &cfg.h)?;
        let r = mollified_ratio(&fam, &spec)?;
        if r.ratio > r.family_count * (1.0 + 1e-12) {
            violations.push(format!("K={k}: ratio {} exceeds the family count {}", r.ratio, r.family_count));
        }
        report.push_row(vec![
            json!(k),
            json!(cfg.a),
            json!(spec.length),
            json!(r.m1),
            json!(r.m2),
            json!(r.ratio),
            json!(r.family_count),
            json!(r.predicted),
            json!(r.ratio / r.predicted),
        ])?;
        rows.push(json!({ "K": k, "ratio_over_predicted": r.ratio / r.predicted }));
    }
    let mut reports = Vec::new();
    emit(cfg, &report, &mut reports)?;
    let violation = (!violations.is_empty()).then(|| violations.join("; "));
    Ok(Outcome { reports, summary: Value::Array(rows), violation })
}

fn gc(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if !cfg.cache_dir.is_dir() {
        return Err(CliError::Io { path: Some(cfg.cache_dir.clone()), message: "cache directory does not exist".into() });
    }
    let s = cache_gc(&cfg.cache_dir, cfg.keep)?;
    let summary = serde_json::to_value(&s).expect("gc summary serializes");
    Ok(Outcome { reports: Vec::new(), summary, violation: None })
}

use std::fs;
use std::io::Write;
use std::path::Path;

use favardlab::estimators::{estimate_curve, estimate_expected_favard};
use favardlab::fractal::enumerate_disks;
use favardlab::io::{self as fio, CurveTable};
use favardlab::projection::{projection_set, Engine};
use favardlab::rng::sample_word;
use favardlab::verification::{
    fit_decay_series, induction_constant, mattila_ratio, overlap_integral, verify_induction,
    verify_induction_series, verify_theta_invariance,
};
use favardlab::{CurveReport, IntervalSet, SeedSpec, VERSION};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::svg;
use crate::{Check, Failure, Outcome};

fn meta(cfg: &RunConfig) -> Value {
    json!({
        "tool": "favardlab",
        "version": VERSION,
        "seed": cfg.seed,
        "config": cfg.to_json(),
    })
}

fn config_line(cfg: &RunConfig) -> String {
    serde_json::to_string(&cfg.to_json()).expect("config serializes")
}

fn json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json serializes");
    s.push('\n');
    s
}

/// Writes to `--out` when given, stdout otherwise.
fn emit(cfg: &RunConfig, text: &str) -> Result<(), Failure> {
    match &cfg.out {
        Some(path) => write_file(path, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::Io(format!("stdout: {e}")))
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn read_table(cfg: &RunConfig) -> Result<CurveTable, Failure> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| Failure::Input("--input <curve.csv> is required".into()))?;
    let file = fs::File::open(path)
        .map_err(|e| Failure::Io(format!("cannot open {}: {e}", path.display())))?;
    fio::read_curve_csv(file).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn source_json(table: &CurveTable) -> Value {
    json!({
        "tool": table.header.tool,
        "spec": table.header.spec,
        "seed": table.header.seed.map(|s| s.master_seed),
        "engine": table.header.engine,
        "config": table.header.config.as_deref().and_then(|c| serde_json::from_str::<Value>(c).ok()),
    })
}

fn run_curve(cfg: &RunConfig) -> Result<CurveReport, Failure> {
    let spec = cfg.spec()?;
    let theta = cfg.single_theta()?;
    Ok(estimate_curve(
        &spec,
        theta,
        cfg.samples,
        SeedSpec::new(cfg.seed),
        cfg.sampling(),
    )?)
}

pub fn sample(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let dir = cfg
        .out
        .as_ref()
        .ok_or_else(|| Failure::Input("sample needs --out <directory>".into()))?;
    let spec = cfg.spec()?;
    let word = sample_word(&spec, SeedSpec::new(cfg.seed), 0)?;
    let disks = enumerate_disks(&spec, &word, cfg.max_intervals)?;
    let projections = cfg
        .theta
        .iter()
        .map(|&theta| {
            let set = projection_set(&spec, &word, theta, cfg.max_intervals)?;
            Ok(json!({
                "theta": theta,
                "measure": set.measure(),
                "intervals": fio::interval_set_to_json(&set)?,
            }))
        })
        .collect::<Result<Vec<_>, favardlab::Error>>()?;

    fs::create_dir_all(dir)
        .map_err(|e| Failure::Io(format!("cannot create {}: {e}", dir.display())))?;
    let disks_doc = json!({
        "meta": meta(cfg),
        "word": word.angles(),
        "disks": fio::disks_to_json(&disks)?,
    });
    let proj_doc = json!({
        "meta": meta(cfg),
        "engine": Engine::for_mode(spec.mode()).name(),
        "projections": projections,
    });
    write_file(&dir.join("disks.json"), &json_text(&disks_doc))?;
    write_file(&dir.join("projection.json"), &json_text(&proj_doc))?;
    Ok(Outcome::Done)
}

pub fn curve(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let report = run_curve(cfg)?;
    emit(
        cfg,
        &fio::curve_csv_string(&report, Some(&config_line(cfg)))?,
    )?;
    Ok(Outcome::Done)
}

pub fn favard(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let spec = cfg.spec()?;
    let seed = SeedSpec::new(cfg.seed);
    let records = (1..=spec.generations())
        .map(|k| {
            estimate_expected_favard(
                &spec.with_generations(k),
                cfg.samples,
                cfg.ntheta,
                seed,
                cfg.sampling(),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let report = CurveReport {
        spec,
        seed,
        engine: format!("favard-{}", Engine::for_mode(spec.mode()).name()),
        records,
        elapsed: None,
    };
    emit(
        cfg,
        &fio::curve_csv_string(&report, Some(&config_line(cfg)))?,
    )?;
    Ok(Outcome::Done)
}

fn verdict(cfg: &RunConfig, check: &str, pass: bool, report: Value) -> Result<Outcome, Failure> {
    let doc = json!({
        "meta": meta(cfg),
        "check": check,
        "pass": pass,
        "report": report,
    });
    emit(cfg, &json_text(&doc))?;
    Ok(if pass {
        Outcome::Done
    } else {
        Outcome::VerificationFailed
    })
}

pub fn verify(cfg: &RunConfig, which: Check) -> Result<Outcome, Failure> {
    match which {
        Check::Overlap => {
            let set = match &cfg.interval {
                Some(raw) => IntervalSet::from_raw(raw.iter().map(|p| (p[0], p[1])))?,
                None => IntervalSet::single(-cfg.a, cfg.a)?,
            };
            let report = overlap_integral(&set, cfg.a, cfg.quad_points)?;
            verdict(
                cfg,
                "overlap",
                report.passed(),
                serde_json::to_value(&report)?,
            )
        }
        Check::Induction => {
            let (report, source) = match &cfg.input {
                Some(_) => {
                    let table = read_table(cfg)?;
                    let source = source_json(&table);
                    if table.header.spec.is_some() && table.header.seed.is_some() {
                        let curve = table.into_report()?;
                        let c = cfg
                            .c
                            .unwrap_or_else(|| induction_constant(curve.spec.degree()));
                        (verify_induction(&curve, c)?, source)
                    } else {
                        let c = cfg.c.unwrap_or_else(|| induction_constant(cfg.degree));
                        let means: Vec<f64> = table.records.iter().map(|r| r.mean).collect();
                        let stderrs: Vec<f64> = table.records.iter().map(|r| r.stderr).collect();
                        (verify_induction_series(&means, &stderrs, c)?, source)
                    }
                }
                None => {
                    let curve = run_curve(cfg)?;
                    let c = cfg.c.unwrap_or_else(|| induction_constant(cfg.degree));
                    (verify_induction(&curve, c)?, Value::Null)
                }
            };
            let mut value = serde_json::to_value(&report)?;
            value["source"] = source;
            verdict(cfg, "induction", report.pass, value)
        }
        Check::Theta => {
            let spec = cfg.spec()?;
            let k = cfg.k.unwrap_or(spec.generations());
            let report = verify_theta_invariance(
                &spec,
                k,
                &cfg.theta,
                cfg.samples,
                SeedSpec::new(cfg.seed),
                cfg.sampling(),
            )?;
            verdict(cfg, "theta", report.pass, serde_json::to_value(&report)?)
        }
        Check::Mattila => {
            let (points, source) = match &cfg.input {
                Some(_) => {
                    let table = read_table(cfg)?;
                    (table.points(), source_json(&table))
                }
                None => {
                    let curve = run_curve(cfg)?;
                    (
                        curve.records.iter().map(|r| (r.k, r.mean)).collect(),
                        Value::Null,
                    )
                }
            };
            let report = mattila_ratio(&points)?;
            let mut value = serde_json::to_value(&report)?;
            value["source"] = source;
            verdict(cfg, "mattila", report.pass, value)
        }
    }
}

pub fn fit(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let table = read_table(cfg)?;
    let fit = fit_decay_series(&table.points())?;
    let doc = json!({
        "meta": meta(cfg),
        "source": source_json(&table),
        "fit": fit,
    });
    emit(cfg, &json_text(&doc))?;
    Ok(Outcome::Done)
}

pub fn plot(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let table = read_table(cfg)?;
    if let Some(r) = table.records.iter().find(|r| r.mean.is_nan() || r.mean <= 0.0) {
        return Err(Failure::Input(format!(
            "log–log plot needs positive means; k = {} has {}",
            r.k, r.mean
        )));
    }
    let mut records = table.records.clone();
    records.sort_by_key(|r| r.k);
    let title = match table.header.spec {
        Some(spec) => format!("E_k decay, d = {}, {} mode", spec.degree(), spec.mode()),
        None => "E_k decay".to_string(),
    };
    let metadata = serde_json::to_string(&json!({
        "meta": meta(cfg),
        "source": source_json(&table),
    }))?;
    emit(cfg, &svg::decay_plot(&records, &title, &metadata))?;
    Ok(Outcome::Done)
}

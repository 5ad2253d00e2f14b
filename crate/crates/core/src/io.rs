//! CSV and JSON encodings of curves, disks and interval sets.
//!
//! Curve CSV files start with `#` comment lines carrying the tool version,
//! an optional run configuration, the figure spec, the seed and the engine,
//! followed by the columns `k,mean,stderr,samples,theta`. Floats are written
//! with 17 significant digits so a file reads back to the same bits.

use std::io::{BufRead, BufReader, Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{CurveReport, EstimateRecord};
use crate::fractal::{Disk, FractalSpec};
use crate::interval::IntervalSet;
use crate::rng::SeedSpec;
use crate::scalar::Real;

pub const CURVE_COLUMNS: [&str; 5] = ["k", "mean", "stderr", "samples", "theta"];

const TOOL_KEY: &str = "tool";
const CONFIG_KEY: &str = "config";
const SPEC_KEY: &str = "spec";
const SEED_KEY: &str = "seed";
const ENGINE_KEY: &str = "engine";

/// `{:.16e}`: 17 significant digits, `.` decimal separator.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Comment metadata found above a curve table. Every field is optional so
/// hand-written tables can be fitted and plotted.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CurveHeader {
    pub tool: Option<String>,
    pub config: Option<String>,
    pub spec: Option<FractalSpec>,
    pub seed: Option<SeedSpec>,
    pub engine: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveTable {
    pub header: CurveHeader,
    pub records: Vec<EstimateRecord>,
}

impl CurveTable {
    /// Rebuilds the report; fails if the header lacks the spec or seed.
    pub fn into_report(self) -> Result<CurveReport> {
        let spec = self
            .header
            .spec
            .ok_or_else(|| Error::Data("curve CSV has no `# spec:` header".into()))?;
        let seed = self
            .header
            .seed
            .ok_or_else(|| Error::Data("curve CSV has no `# seed:` header".into()))?;
        Ok(CurveReport {
            spec,
            seed,
            engine: self.header.engine.unwrap_or_default(),
            records: self.records,
            elapsed: None,
        })
    }

    pub fn points(&self) -> Vec<(u32, f64)> {
        self.records.iter().map(|r| (r.k, r.mean)).collect()
    }
}

/// Writes `report` as a commented CSV table. `config` is embedded verbatim
/// on one line and must not contain a newline.
pub fn write_curve_csv<W: Write>(
    mut out: W,
    report: &CurveReport,
    config: Option<&str>,
) -> Result<()> {
    writeln!(out, "# {TOOL_KEY}: favardlab {}", crate::VERSION)?;
    if let Some(cfg) = config {
        if cfg.contains('\n') {
            return Err(Error::InvalidInput(
                "embedded config must be a single line".into(),
            ));
        }
        writeln!(out, "# {CONFIG_KEY}: {cfg}")?;
    }
    writeln!(
        out,
        "# {SPEC_KEY}: {}",
        serde_json::to_string(&report.spec)?
    )?;
    writeln!(out, "# {SEED_KEY}: {}", report.seed.master_seed)?;
    writeln!(out, "# {ENGINE_KEY}: {}", report.engine)?;

    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_COLUMNS)?;
    for r in &report.records {
        w.write_record([
            r.k.to_string(),
            format_f64(r.mean),
            format_f64(r.stderr),
            r.samples.to_string(),
            r.theta.map(format_f64).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn curve_csv_string(report: &CurveReport, config: Option<&str>) -> Result<String> {
    let mut buf = Vec::new();
    write_curve_csv(&mut buf, report, config)?;
    String::from_utf8(buf).map_err(|e| Error::Data(e.to_string()))
}

fn parse_header_line(header: &mut CurveHeader, line: &str) -> Result<()> {
    let body = line.trim_start_matches('#').trim();
    let Some((key, value)) = body.split_once(':') else {
        return Ok(());
    };
    let value = value.trim();
    match key.trim() {
        TOOL_KEY => header.tool = Some(value.to_string()),
        CONFIG_KEY => header.config = Some(value.to_string()),
        SPEC_KEY => {
            header.spec = Some(
                serde_json::from_str(value)
                    .map_err(|e| Error::Data(format!("bad spec header: {e}")))?,
            )
        }
        SEED_KEY => {
            header.seed =
                Some(SeedSpec::new(value.parse().map_err(|e| {
                    Error::Data(format!("bad seed header `{value}`: {e}"))
                })?))
        }
        ENGINE_KEY => header.engine = Some(value.to_string()),
        _ => {}
    }
    Ok(())
}

fn parse_field<T: std::str::FromStr>(field: &str, column: &str, row: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    field.trim().parse().map_err(|e| {
        Error::Data(format!(
            "row {row}, column `{column}`: cannot parse `{field}`: {e}"
        ))
    })
}

/// Reads a curve table. Rejects files without data rows, with missing or
/// reordered columns, or with unparsable or non-finite values.
pub fn read_curve_csv<R: Read>(input: R) -> Result<CurveTable> {
    let mut reader = BufReader::new(input);
    let mut header = CurveHeader::default();
    let mut body = String::new();
    let mut line = String::new();
    let mut in_header = true;
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        if in_header && line.starts_with('#') {
            parse_header_line(&mut header, line.trim_end())?;
            continue;
        }
        if in_header && line.trim().is_empty() {
            continue;
        }
        in_header = false;
        body.push_str(&line);
    }

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let columns = rdr.headers()?.clone();
    if columns.iter().collect::<Vec<_>>() != CURVE_COLUMNS {
        return Err(Error::Data(format!(
            "expected columns {}, found `{}`",
            CURVE_COLUMNS.join(","),
            columns.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let n = i + 1;
        if row.len() != CURVE_COLUMNS.len() {
            return Err(Error::Data(format!("row {n} has {} fields", row.len())));
        }
        let theta_field = row[4].trim();
        let rec = EstimateRecord {
            k: parse_field(&row[0], "k", n)?,
            mean: parse_field(&row[1], "mean", n)?,
            stderr: parse_field(&row[2], "stderr", n)?,
            samples: parse_field(&row[3], "samples", n)?,
            theta: if theta_field.is_empty() {
                None
            } else {
                Some(parse_field(theta_field, "theta", n)?)
            },
        };
        if !rec.mean.is_finite() || !rec.stderr.is_finite() || rec.stderr < 0.0 {
            return Err(Error::Data(format!(
                "row {n}: mean and stderr must be finite, stderr ≥ 0"
            )));
        }
        records.push(rec);
    }
    if records.is_empty() {
        return Err(Error::Data("curve CSV has no data rows".into()));
    }
    Ok(CurveTable { header, records })
}

/// JSON value `[{cx, cy, r}, …]`.
pub fn disks_to_json<T: Real + Serialize>(disks: &[Disk<T>]) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(disks)?)
}

pub fn disks_from_json<T: Real + serde::de::DeserializeOwned>(
    value: &serde_json::Value,
) -> Result<Vec<Disk<T>>> {
    Ok(serde_json::from_value(value.clone())?)
}

/// JSON value `[[lo, hi], …]`.
pub fn interval_set_to_json<T: Real + Serialize>(
    set: &IntervalSet<T>,
) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(set)?)
}

pub fn interval_set_from_json<T: Real + serde::de::DeserializeOwned>(
    value: &serde_json::Value,
) -> Result<IntervalSet<T>> {
    Ok(serde_json::from_value(value.clone())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fractal::RotationMode;

    fn report() -> CurveReport {
        CurveReport {
            spec: FractalSpec::new(4, 3, RotationMode::SharedRotation).unwrap(),
            seed: SeedSpec::new(99),
            engine: "recursive".into(),
            records: vec![
                EstimateRecord {
                    k: 1,
                    mean: 1.6,
                    stderr: 0.01,
                    samples: 10,
                    theta: Some(0.0),
                },
                EstimateRecord {
                    k: 2,
                    mean: 0.1 + 0.2,
                    stderr: 1e-17,
                    samples: 10,
                    theta: Some(0.3),
                },
                EstimateRecord {
                    k: 3,
                    mean: 1.0 / 3.0,
                    stderr: 0.0,
                    samples: 10,
                    theta: None,
                },
            ],
            elapsed: None,
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let r = report();
        let text = curve_csv_string(&r, Some(r#"{"degree":4}"#)).unwrap();
        assert!(text.starts_with("# tool: favardlab "));
        assert!(text.contains("\nk,mean,stderr,samples,theta\n"));
        assert!(text.contains("3.0000000000000004e-1"));
        let back = read_curve_csv(text.as_bytes()).unwrap();
        assert_eq!(back.header.config.as_deref(), Some(r#"{"degree":4}"#));
        assert_eq!(back.records, r.records);
        assert_eq!(back.into_report().unwrap(), r);
    }

    #[test]
    fn bare_table_reads_without_header() {
        let t =
            read_curve_csv("k,mean,stderr,samples,theta\n1,2.0,0.0,5,\n2,1.0,0.0,5,\n".as_bytes())
                .unwrap();
        assert_eq!(t.points(), vec![(1, 2.0), (2, 1.0)]);
        assert!(t.into_report().is_err());
    }

    #[test]
    fn malformed_tables() {
        let bad = [
            "",
            "# tool: x\n",
            "k,mean,stderr,samples,theta\n",
            "k,mean\n1,2\n",
            "k,mean,stderr,samples,theta\n1,abc,0,5,\n",
            "k,mean,stderr,samples,theta\n1,1.0,0,5\n",
            "k,mean,stderr,samples,theta\n1,NaN,0,5,\n",
            "# spec: {nope\nk,mean,stderr,samples,theta\n1,1.0,0,5,\n",
        ];
        for text in bad {
            assert!(read_curve_csv(text.as_bytes()).is_err(), "{text:?}");
        }
    }

    #[test]
    fn disk_and_set_json() {
        let disks = vec![Disk {
            cx: 0.75,
            cy: 0.0,
            r: 0.25,
        }];
        let v = disks_to_json(&disks).unwrap();
        assert_eq!(v.to_string(), r#"[{"cx":0.75,"cy":0.0,"r":0.25}]"#);
        assert_eq!(disks_from_json::<f64>(&v).unwrap(), disks);
        let set = IntervalSet::from_raw([(-1.0, -0.5), (0.5, 1.0)]).unwrap();
        let v = interval_set_to_json(&set).unwrap();
        assert_eq!(v.to_string(), "[[-1.0,-0.5],[0.5,1.0]]");
        assert_eq!(interval_set_from_json::<f64>(&v).unwrap(), set);
    }
}

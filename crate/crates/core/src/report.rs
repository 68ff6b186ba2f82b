//! CSV encoding of reports and final states.
//!
//! Metadata goes on leading `# key=value` lines, followed by a header row.
//! Floating-point columns use 17 significant digits so that a parsed file
//! reproduces the written values bit for bit.

use std::collections::BTreeMap;

use crate::analysis::{ConvergenceReport, Metric, Refined, ReportMetadata, ReportRow};
use crate::error::{Error, Result};
use crate::mesh::GridFunction;

pub const STUDY_HEADER: [&str; 3] = ["refine_param", "error", "order"];
pub const SINGLE_HEADER: [&str; 3] = ["x", "u_final", "w_final"];
pub const STABILITY_HEADER: [&str; 2] = ["epsilon", "amplification"];

/// `{:.16e}`: 17 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_error(e: impl std::fmt::Display) -> Error {
    Error::Config(format!("malformed CSV: {e}"))
}

fn write_comments(out: &mut String, meta: &[(&str, String)]) {
    for (k, v) in meta {
        out.push_str("# ");
        out.push_str(k);
        out.push('=');
        out.push_str(v);
        out.push('\n');
    }
}

fn write_rows<const K: usize>(out: &mut String, header: [&str; K], rows: &[[String; K]]) {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    let bytes = w.into_inner().expect("in-memory flush");
    out.push_str(std::str::from_utf8(&bytes).expect("ascii output"));
}

fn metadata_pairs(md: &ReportMetadata) -> Vec<(&'static str, String)> {
    vec![
        ("problem", md.problem.clone()),
        ("alpha", md.alpha.to_string()),
        ("mu1", md.mu1.to_string()),
        ("mu2", md.mu2.to_string()),
        ("lambda", md.lambda.to_string()),
        ("refined", md.refined.refined_name().to_string()),
        ("fixed", md.refined.fixed_name().to_string()),
        ("fixed_value", md.fixed_value.to_string()),
        ("metric", md.metric.name().to_string()),
    ]
}

/// Serializes a study report.
pub fn report_to_csv(report: &ConvergenceReport) -> String {
    let mut out = String::new();
    write_comments(&mut out, &metadata_pairs(&report.metadata));
    let rows: Vec<[String; 3]> = report
        .rows
        .iter()
        .map(|r| {
            [
                r.param.to_string(),
                format_float(r.error),
                r.order.map(format_float).unwrap_or_default(),
            ]
        })
        .collect();
    write_rows(&mut out, STUDY_HEADER, &rows);
    out
}

fn split_comments(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|l| l.strip_prefix('#'))
        .filter_map(|l| l.trim().split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect()
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(text.as_bytes())
}

fn parse_field<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| csv_error(format!("cannot parse {what} from `{s}`")))
}

/// Parses the output of [`report_to_csv`].
pub fn report_from_csv(text: &str) -> Result<ConvergenceReport> {
    let meta = split_comments(text);
    let get = |k: &str| {
        meta.get(k)
            .map(String::as_str)
            .ok_or_else(|| csv_error(format!("missing metadata `{k}`")))
    };
    let refined = match get("refined")? {
        "N" => Refined::Time,
        "M" => Refined::Space,
        other => return Err(csv_error(format!("unknown refined parameter `{other}`"))),
    };
    let metric = Metric::from_name(get("metric")?)
        .ok_or_else(|| csv_error(format!("unknown metric `{}`", meta["metric"])))?;
    let metadata = ReportMetadata {
        problem: get("problem")?.to_string(),
        alpha: parse_field(get("alpha")?, "alpha")?,
        mu1: parse_field(get("mu1")?, "mu1")?,
        mu2: parse_field(get("mu2")?, "mu2")?,
        lambda: parse_field(get("lambda")?, "lambda")?,
        refined,
        fixed_value: parse_field(get("fixed_value")?, "fixed_value")?,
        metric,
    };

    let mut rdr = reader(text);
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.iter().ne(STUDY_HEADER) {
        return Err(csv_error(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let order = match rec.get(2).unwrap_or("") {
            "" => None,
            s => Some(parse_field(s, "order")?),
        };
        rows.push(ReportRow {
            param: parse_field(&rec[0], "refine_param")?,
            error: parse_field(&rec[1], "error")?,
            order,
        });
    }
    Ok(ConvergenceReport { metadata, rows })
}

/// Serializes a final state as `x,u_final,w_final` rows, one per node.
pub fn final_state_to_csv(meta: &[(&str, String)], u: &GridFunction, w: &GridFunction) -> String {
    let mut out = String::new();
    write_comments(&mut out, meta);
    let grid = *u.grid();
    let rows: Vec<[String; 3]> = grid
        .nodes()
        .enumerate()
        .map(|(i, x)| [format_float(x), format_float(u[i]), format_float(w[i])])
        .collect();
    write_rows(&mut out, SINGLE_HEADER, &rows);
    out
}

/// Parses the rows of [`final_state_to_csv`] into `(x, u, w)` triples.
pub fn final_state_from_csv(text: &str) -> Result<Vec<(f64, f64, f64)>> {
    let mut rdr = reader(text);
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.iter().ne(SINGLE_HEADER) {
        return Err(csv_error(format!("unexpected header {header:?}")));
    }
    rdr.records()
        .map(|rec| {
            let rec = rec.map_err(csv_error)?;
            Ok((
                parse_field(&rec[0], "x")?,
                parse_field(&rec[1], "u_final")?,
                parse_field(&rec[2], "w_final")?,
            ))
        })
        .collect()
}

/// Serializes `(epsilon, amplification)` rows.
pub fn stability_to_csv(meta: &[(&str, String)], rows: &[(f64, f64)]) -> String {
    let mut out = String::new();
    write_comments(&mut out, meta);
    let rows: Vec<[String; 2]> = rows
        .iter()
        .map(|&(e, a)| [format_float(e), format_float(a)])
        .collect();
    write_rows(&mut out, STABILITY_HEADER, &rows);
    out
}

//! Report emission: one JSON report per run plus one CSV per check.
//!
//! Reports are reproducibility artifacts, so the writer is deliberately
//! boring and fully deterministic: keys appear in fixed order, every float is
//! printed with `{:.16e}` (17 significant digits, enough to round-trip any
//! `f64`), all text is ASCII, and the bytes are assembled in memory and
//! written in one call.  Two runs with identical inputs produce
//! byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::outcome::{aggregate_verdict, CheckOutcome};

/// Canonical float formatting: 17 significant digits, scientific notation.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// A float as a JSON token (JSON has no NaN/inf; those become `null`).
fn json_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 || !c.is_ascii() => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

/// Render the run report as a JSON string.
pub fn render_json(outcomes: &[CheckOutcome]) -> String {
    let mut s = String::new();
    s.push_str("{\n");
    s.push_str("  \"tool\": \"distpair\",\n");
    let _ = writeln!(s, "  \"version\": \"{}\",", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "  \"verdict\": \"{}\",", aggregate_verdict(outcomes).as_str());
    s.push_str("  \"checks\": [\n");
    for (i, o) in outcomes.iter().enumerate() {
        s.push_str("    {\n");
        let _ = writeln!(s, "      \"name\": \"{}\",", json_escape(&o.name));
        let _ = writeln!(s, "      \"verdict\": \"{}\",", o.verdict.as_str());
        let _ = writeln!(s, "      \"residual\": {},", json_num(o.residual));
        let _ = writeln!(s, "      \"tolerance\": {},", json_num(o.tolerance));
        let _ = writeln!(s, "      \"inputs_digest\": \"{}\",", json_escape(&o.inputs_digest));
        s.push_str("      \"details\": [\n");
        for (j, row) in o.details.iter().enumerate() {
            s.push_str("        { ");
            let _ = write!(s, "\"label\": \"{}\"", json_escape(&row.label));
            for (k, v) in &row.values {
                let _ = write!(s, ", \"{}\": {}", json_escape(k), json_num(*v));
            }
            s.push_str(" }");
            s.push_str(if j + 1 < o.details.len() { ",\n" } else { "\n" });
        }
        s.push_str("      ]\n");
        s.push_str("    }");
        s.push_str(if i + 1 < outcomes.len() { ",\n" } else { "\n" });
    }
    s.push_str("  ]\n");
    s.push_str("}\n");
    s
}

/// Render one check as CSV (header from the first row's column names).
pub fn render_csv(outcome: &CheckOutcome) -> String {
    let mut s = String::new();
    let cols: Vec<&'static str> = outcome
        .details
        .first()
        .map(|r| r.values.iter().map(|(k, _)| *k).collect())
        .unwrap_or_default();
    s.push_str("label");
    for c in &cols {
        s.push(',');
        s.push_str(c);
    }
    s.push('\n');
    for row in &outcome.details {
        debug_assert!(
            row.values.iter().map(|(k, _)| *k).eq(cols.iter().copied()),
            "heterogeneous detail rows in check '{}'",
            outcome.name
        );
        // Labels are ASCII without commas by construction; quote defensively
        // if one ever contains a comma.
        if row.label.contains(',') || row.label.contains('"') {
            s.push('"');
            s.push_str(&row.label.replace('"', "\"\""));
            s.push('"');
        } else {
            s.push_str(&row.label);
        }
        for (_, v) in &row.values {
            s.push(',');
            s.push_str(&fmt_f64(*v));
        }
        s.push('\n');
    }
    s
}

/// Write `report.json` plus one `<check-name>.csv` per check into `out_dir`.
pub fn emit_report(outcomes: &[CheckOutcome], out_dir: &Path) -> io::Result<()> {
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("report.json"), render_json(outcomes))?;
    for o in outcomes {
        let fname = format!("{}.csv", o.name.replace([' ', '/'], "_"));
        fs::write(out_dir.join(fname), render_csv(o))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outcome::{DetailRow, Verdict};

    fn sample() -> Vec<CheckOutcome> {
        vec![CheckOutcome {
            name: "demo_check".into(),
            verdict: Verdict::Pass,
            residual: 1.25e-9,
            tolerance: 1e-6,
            inputs_digest: "abcd".into(),
            details: vec![
                DetailRow::new("row1", vec![("value", 1.0), ("err", 2.5e-10)]),
                DetailRow::new("row2", vec![("value", -3.5), ("err", 1.0e-11)]),
            ],
        }]
    }

    #[test]
    fn float_formatting_round_trips() {
        for &x in &[1.0, -2.5e-17, std::f64::consts::PI, 6.02e23, -0.0] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(f64::NAN), "nan");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }

    #[test]
    fn json_is_deterministic_and_ascii() {
        let a = render_json(&sample());
        let b = render_json(&sample());
        assert_eq!(a, b);
        assert!(a.is_ascii());
        assert!(a.contains("\"verdict\": \"PASS\""));
        assert!(a.contains("\"residual\": 1.2500000000000000e-9"));
    }

    #[test]
    fn csv_layout() {
        let csv = render_csv(&sample()[0]);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "label,value,err");
        assert!(lines.next().unwrap().starts_with("row1,1.0000000000000000e0,"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn emit_writes_expected_files() {
        let dir = std::env::temp_dir().join(format!("distpair-report-test-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        emit_report(&sample(), &dir).unwrap();
        let json = std::fs::read_to_string(dir.join("report.json")).unwrap();
        assert!(json.contains("demo_check"));
        assert!(dir.join("demo_check.csv").exists());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}

//! JSON, CSV and plain-table renderings of a report.

use std::fmt::Write as _;

use super::{OutputFormat, ReportEnvelope, RunResults};
use crate::agr::{RecoveryResult, WirePoint};
use crate::error::{Error, Result};

pub fn render(env: &ReportEnvelope, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(env).map_err(|e| Error::Parse(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        OutputFormat::Csv => csv_of(env),
        OutputFormat::Table => Ok(table_of(env)),
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn xy(v: Option<WirePoint>) -> [String; 2] {
    match v {
        Some((x, y)) => [x.to_string(), y.to_string()],
        None => [String::new(), String::new()],
    }
}

fn result_row(prime: u64, r: &RecoveryResult) -> Vec<String> {
    let [vx, vy] = xy(r.recovered_value);
    let [cx, cy] = xy(r.closed_form.map(|c| c.value));
    vec![
        prime.to_string(),
        r.step_index.to_string(),
        r.residue_point.0.to_string(),
        r.residue_point.1.to_string(),
        opt(r.matched_case),
        serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
        opt(r.minimal_m),
        vx,
        vy,
        opt(r.closed_form.map(|c| c.expected_m)),
        cx,
        cy,
    ]
}

const RESULT_HEADER: [&str; 12] =
    ["prime", "n", "x", "y", "case", "status", "minimal_m", "value_x", "value_y", "expected_m", "closed_x", "closed_y"];

fn csv_of(env: &ReportEnvelope) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Parse(e.to_string());
    match &env.results {
        RunResults::Verify(reps) => {
            w.write_record(RESULT_HEADER).map_err(err)?;
            for rep in reps {
                for r in &rep.singular_results {
                    w.write_record(result_row(rep.prime.get(), r)).map_err(err)?;
                }
            }
        }
        RunResults::Recover(runs) => {
            w.write_record(RESULT_HEADER).map_err(err)?;
            for run in runs {
                for r in &run.results {
                    w.write_record(result_row(run.prime.get(), r)).map_err(err)?;
                }
            }
        }
        RunResults::Portrait(ps) => {
            w.write_record(["prime", "histogram", "key", "count"]).map_err(err)?;
            for ph in ps {
                let p = ph.prime.get().to_string();
                let hists = [
                    ("cycle_length", ph.cycle_length_histogram.as_ref()),
                    ("transient_length", ph.transient_length_histogram.as_ref()),
                    ("trail_length", ph.trail_length_histogram.as_ref()),
                ];
                for (name, h) in hists {
                    for (k, c) in h.into_iter().flatten() {
                        w.write_record([p.as_str(), name, &k.to_string(), &c.to_string()]).map_err(err)?;
                    }
                }
                for (m, c) in &ph.recovery_m_histogram {
                    w.write_record([p.as_str(), "recovery_m", &m.to_string(), &c.to_string()]).map_err(err)?;
                }
            }
        }
        RunResults::ParamsCheck(reps) => {
            w.write_record(["prime", "kind", "message"]).map_err(err)?;
            for rep in reps {
                let p = rep.prime.get().to_string();
                for v in &rep.violations {
                    w.write_record([p.as_str(), "violation", v]).map_err(err)?;
                }
                for v in &rep.warnings {
                    w.write_record([p.as_str(), "warning", v]).map_err(err)?;
                }
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn hist<K: std::fmt::Display, V: std::fmt::Display>(h: impl IntoIterator<Item = (K, V)>) -> String {
    h.into_iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(" ")
}

fn table_of(env: &ReportEnvelope) -> String {
    let mut s = String::new();
    let c = &env.config;
    let params = c.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",");
    let _ = writeln!(s, "{} {} | {} {}", env.tool, env.version, c.family, params);
    match &env.results {
        RunResults::Verify(reps) => {
            for rep in reps {
                let _ = writeln!(
                    s,
                    "p={} n={} points={} violations={} witnesses={} {}",
                    rep.prime,
                    rep.n_window,
                    rep.points_scanned,
                    rep.violations.len(),
                    rep.failure_witnesses.len(),
                    if rep.passed() { "PASS" } else { "FAIL" }
                );
                let _ = writeln!(s, "  cases: {}", hist(rep.case_counts.iter()));
                let _ = writeln!(s, "  minimal m: {}", hist(rep.m_histogram.iter()));
                for w in &rep.validation.warnings {
                    let _ = writeln!(s, "  warning: {w}");
                }
                for v in &rep.violations {
                    let _ = writeln!(s, "  violation n={} ({}, {}) {}", v.n, v.point.0, v.point.1, serde_json::to_string(&v.kind).unwrap_or_default());
                }
            }
        }
        RunResults::Recover(runs) => {
            for run in runs {
                for r in &run.results {
                    let [vx, vy] = xy(r.recovered_value);
                    let _ = writeln!(
                        s,
                        "p={} n={} ({}, {}) case={} m={} value=({vx}, {vy}) lift_independent={}",
                        run.prime,
                        r.step_index,
                        r.residue_point.0,
                        r.residue_point.1,
                        opt(r.matched_case),
                        r.minimal_m.map_or("none".to_string(), |m| m.to_string()),
                        r.lift_independent
                    );
                }
            }
        }
        RunResults::Portrait(ps) => {
            for ph in ps {
                let _ = writeln!(
                    s,
                    "p={} points={} cycle_points={} transient_points={} truncated={} singular={} unrecoverable={} left_domain={}",
                    ph.prime,
                    ph.points,
                    ph.cycle_points,
                    ph.transient_points,
                    ph.truncated,
                    ph.singular_entries,
                    ph.unrecoverable,
                    ph.left_domain
                );
                if let Some(h) = &ph.cycle_length_histogram {
                    let _ = writeln!(s, "  cycles: {}", hist(h.iter()));
                }
                if let Some(h) = &ph.transient_length_histogram {
                    let _ = writeln!(s, "  transients: {}", hist(h.iter()));
                }
                if let Some(h) = &ph.trail_length_histogram {
                    let _ = writeln!(s, "  trails: {}", hist(h.iter()));
                }
                let _ = writeln!(s, "  recovery m: {}", hist(ph.recovery_m_histogram.iter()));
            }
        }
        RunResults::ParamsCheck(reps) => {
            for rep in reps {
                let _ = writeln!(s, "p={} {}", rep.prime, if rep.passed() { "ok" } else { "FAIL" });
                for v in &rep.violations {
                    let _ = writeln!(s, "  violation: {v}");
                }
                for v in &rep.warnings {
                    let _ = writeln!(s, "  warning: {v}");
                }
            }
        }
    }
    if let Some(ms) = env.duration_ms {
        let _ = writeln!(s, "duration: {ms} ms");
    }
    s
}

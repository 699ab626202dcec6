//! Deterministic serialization: CSV and JSON emitters with 17 significant
//! digits (so floats round-trip exactly), parsers for curve files, and an
//! atomic file writer.  None of the emitters include timestamps or other
//! run-dependent data; identical inputs produce identical bytes.

use crate::diagnostics::{SequenceReport, SpectrumReport};
use crate::error::{Error, Result};
use crate::finitedim::GrowthReport;
use crate::loopspace::LoopCurve;
use crate::optimizer::DescentTrace;
use crate::secondorder::Classification;
use nalgebra::Vector2;
use std::fmt::Write as _;
use std::path::Path;

/// Shortest-exact decimal for a float: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// `{"n": N, "points": [[x, y], …]}`.
pub fn curve_to_json(c: &LoopCurve) -> String {
    let mut s = String::new();
    let _ = write!(s, "{{\"n\": {}, \"points\": [", c.n());
    for (j, p) in c.points().iter().enumerate() {
        if j > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "[{}, {}]", fmt_f64(p.x), fmt_f64(p.y));
    }
    s.push_str("]}");
    s
}

pub fn curve_from_json(text: &str) -> Result<LoopCurve> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let n = v
        .get("n")
        .and_then(|x| x.as_u64())
        .ok_or_else(|| Error::Parse("missing integer field `n`".into()))? as usize;
    let points = v
        .get("points")
        .and_then(|x| x.as_array())
        .ok_or_else(|| Error::Parse("missing array field `points`".into()))?;
    if points.len() != n {
        return Err(Error::Parse(format!(
            "`n` = {n} but {} points given",
            points.len()
        )));
    }
    let mut out = Vec::with_capacity(n);
    for p in points {
        let pair = p
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::Parse("each point must be a [x, y] pair".into()))?;
        let x = pair[0]
            .as_f64()
            .ok_or_else(|| Error::Parse("point coordinates must be numbers".into()))?;
        let y = pair[1]
            .as_f64()
            .ok_or_else(|| Error::Parse("point coordinates must be numbers".into()))?;
        out.push(Vector2::new(x, y));
    }
    LoopCurve::new(out)
}

/// CSV with header `theta,x,y`.
pub fn curve_to_csv(c: &LoopCurve) -> String {
    let mut s = String::from("theta,x,y\n");
    for (j, p) in c.points().iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{},{}",
            fmt_f64(c.theta(j)),
            fmt_f64(p.x),
            fmt_f64(p.y)
        );
    }
    s
}

pub fn curve_from_csv(text: &str) -> Result<LoopCurve> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line.trim() != "theta,x,y" {
                return Err(Error::Parse(format!(
                    "expected header `theta,x,y`, got `{line}`"
                )));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::Parse(format!("line {}: need 3 columns", i + 1)));
        }
        let x: f64 = cols[1]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad x", i + 1)))?;
        let y: f64 = cols[2]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: bad y", i + 1)))?;
        out.push(Vector2::new(x, y));
    }
    LoopCurve::new(out)
}

/// CSV with header `iter,f,grad_norm,alpha,decrease,halvings`; the last
/// row is the terminal row (alpha and decrease zero).
pub fn trace_to_csv(trace: &DescentTrace) -> String {
    let mut s = String::from("iter,f,grad_norm,alpha,decrease,halvings\n");
    for (k, r) in trace.records.iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            k,
            fmt_f64(r.f_value),
            fmt_f64(r.grad_norm),
            fmt_f64(r.alpha),
            fmt_f64(r.decrease),
            r.halvings
        );
    }
    s
}

/// CSV with header `k,curve_norm,grad_gap`; the gap column holds the
/// distance between the gradients at `k` and `k+1` and is empty on the
/// final row.
pub fn sequence_to_csv(rep: &SequenceReport) -> String {
    let mut s = String::from("k,curve_norm,grad_gap\n");
    for (i, k) in rep.ks.iter().enumerate() {
        let gap = rep
            .gradient_gaps
            .get(i)
            .map(|g| fmt_f64(*g))
            .unwrap_or_default();
        let _ = writeln!(s, "{},{},{}", k, fmt_f64(rep.curve_norms[i]), gap);
    }
    s
}

/// CSV with header `k,curve_mag,grad_mag,smoothing_mag`.
pub fn spectrum_to_csv(rep: &SpectrumReport) -> String {
    let mut s = String::from("k,curve_mag,grad_mag,smoothing_mag\n");
    for (i, k) in rep.wavenumbers.iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            k,
            fmt_f64(rep.curve_mags[i]),
            fmt_f64(rep.gradient_mags[i]),
            fmt_f64(rep.smoothing_mags[i])
        );
    }
    s
}

/// CSV with header `d,max_gamma`.
pub fn growth_to_csv(rep: &GrowthReport) -> String {
    let mut s = String::from("d,max_gamma\n");
    for (d, g) in rep.dims.iter().zip(&rep.max_gamma) {
        let _ = writeln!(s, "{},{}", d, fmt_f64(*g));
    }
    s
}

pub fn growth_to_json(rep: &GrowthReport) -> String {
    let mut s = String::from("{\"dims\": [");
    for (i, d) in rep.dims.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{d}");
    }
    s.push_str("], \"max_gamma\": [");
    for (i, g) in rep.max_gamma.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{}", fmt_f64(*g));
    }
    s.push_str("], \"gram_conditions\": [");
    for (i, g) in rep.gram_conditions.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let _ = write!(s, "{}", fmt_f64(*g));
    }
    s.push_str("]}");
    s
}

pub fn classification_to_json(cls: &Classification) -> String {
    let mu = cls
        .mu_hat
        .map(|m| fmt_f64(m))
        .unwrap_or_else(|| "null".into());
    format!(
        "{{\"class\": \"{}\", \"grad_norm\": {}, \"mu_hat\": {}, \"probes\": {}, \"seed\": {}}}",
        cls.class.name(),
        fmt_f64(cls.grad_norm),
        mu,
        cls.probes,
        cls.seed
    )
}

/// Write via a sibling temp file and rename, so readers never observe a
/// half-written file.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidInput, "no file name"))?;
    let tmp = path.with_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}

//! Empirical report assembly and the JSON / CSV / text emitters.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::rational::{self, to_f64, Rational};
use crate::recplot::{self, BoundaryPolicy};
use crate::rqa::{self, RQAReport};
use crate::substitution::Substitution;

/// Finite-`n` report of the `m`-embedded fixed point at threshold `2^-h`.
pub fn empirical_report(
    s: &Substitution,
    n: usize,
    m: usize,
    l: usize,
    h: usize,
    policy: BoundaryPolicy,
) -> Result<RQAReport> {
    let h_eff = recplot::embedded_h(m, h);
    let x = s.normalize().0.fixed_point_prefix(n + h_eff + l + 1)?;
    let hist = recplot::histogram(&x, n, h_eff, l)?;
    let mut report = rqa::measures_from_histogram_with(&hist, l, policy)?;
    report.corsum = Some(match policy {
        BoundaryPolicy::IncludeAll => rqa::correlation_sum(&x, n, l, h_eff)?,
        BoundaryPolicy::ExcludeNBoundary => rqa::corsum_main_term(&hist, l, policy),
    });
    Ok(report.with_embedding(m, h))
}

/// Quantities available for convergence sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Rr,
    Det,
    Lavg,
    Ent,
    Corsum,
    Linedens,
}

impl Quantity {
    pub fn of(self, r: &RQAReport) -> Option<f64> {
        match self {
            Quantity::Rr => Some(to_f64(&r.rr)),
            Quantity::Det => r.det.as_ref().map(to_f64),
            Quantity::Lavg => r.lavg.as_ref().map(|v| v.to_f64()),
            Quantity::Ent => r.ent,
            Quantity::Corsum => r.corsum.as_ref().map(to_f64),
            Quantity::Linedens => Some(to_f64(&r.line_dens)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub empirical: Option<f64>,
    pub asymptotic: Option<f64>,
    pub gap: Option<f64>,
}

impl ConvergenceRow {
    pub fn new(n: usize, empirical: Option<f64>, asymptotic: Option<f64>) -> Self {
        let gap = match (empirical, asymptotic) {
            (Some(a), Some(b)) if a.is_finite() && b.is_finite() => Some((a - b).abs()),
            _ => None,
        };
        ConvergenceRow {
            n,
            empirical,
            asymptotic,
            gap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetRow {
    pub h: usize,
    #[serde(with = "rational::serde_rational")]
    pub det: Rational,
}

pub fn write_csv<T: Serialize>(rows: &[T], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| std::io::Error::other(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_det_csv(rows: &[DetRow], out: impl Write) -> Result<()> {
    let flat: Vec<(usize, String, f64)> = rows
        .iter()
        .map(|r| (r.h, r.det.to_string(), to_f64(&r.det)))
        .collect();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["h", "det", "det_approx"])
        .map_err(|e| std::io::Error::other(e.to_string()))?;
    for row in flat {
        w.serialize(row).map_err(|e| std::io::Error::other(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Entropy in the requested log base; prints `k log 2` when the natural-log
/// value is an integer multiple of `ln 2` to within `1e-12`.
pub fn format_entropy(ent: f64, log_base: f64) -> String {
    let ln2 = std::f64::consts::LN_2;
    let k = (ent / ln2).round();
    let symbolic = k >= 1.0 && (ent - k * ln2).abs() < 1e-12;
    if log_base == std::f64::consts::E {
        if symbolic {
            format!("{k} log 2 ({ent:.12})")
        } else {
            format!("{ent:.12}")
        }
    } else {
        let v = ent / log_base.ln();
        if symbolic && log_base == 2.0 {
            format!("{k}")
        } else {
            format!("{v:.12}")
        }
    }
}

fn fmt_rational(r: &Rational) -> String {
    format!("{r} ({:.12})", to_f64(r))
}

pub fn format_report(r: &RQAReport, log_base: f64) -> String {
    let mut s = String::new();
    let n = r.n.map_or("inf".to_string(), |n| n.to_string());
    let _ = writeln!(
        s,
        "{:?} report: n = {n}, m = {}, h = {}, l = {}",
        r.provenance, r.m, r.h, r.l_min
    );
    if r.policy == BoundaryPolicy::ExcludeNBoundary {
        let _ = writeln!(s, "  (n-boundary lines excluded)");
    }
    let _ = writeln!(s, "  RR      = {}", fmt_rational(&r.rr));
    let _ = writeln!(
        s,
        "  DET     = {}",
        r.det.as_ref().map_or("undefined".into(), fmt_rational)
    );
    let _ = writeln!(
        s,
        "  L_avg   = {}",
        r.lavg.as_ref().map_or("undefined".into(), |v| match v {
            rational::ExtRational::Finite(q) => fmt_rational(q),
            rational::ExtRational::Infinite => "inf".into(),
        })
    );
    let _ = writeln!(
        s,
        "  ENT     = {}",
        r.ent.map_or("undefined".into(), |e| format_entropy(e, log_base))
    );
    let _ = writeln!(s, "  lineDens= {}", fmt_rational(&r.line_dens));
    if let Some(c) = &r.corsum {
        let _ = writeln!(s, "  C       = {}", fmt_rational(c));
    }
    for note in &r.notes {
        let _ = writeln!(s, "  note: {note}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_formatting() {
        let e = 2.0 * std::f64::consts::LN_2;
        assert!(format_entropy(e, std::f64::consts::E).starts_with("2 log 2"));
        assert_eq!(format_entropy(e, 2.0), "2");
        assert!(!format_entropy(0.3, std::f64::consts::E).contains("log"));
    }

    #[test]
    fn empirical_report_on_thue_morse() {
        let tm = Substitution::thue_morse();
        let r = empirical_report(&tm, 1024, 1, 1, 1, BoundaryPolicy::IncludeAll).unwrap();
        assert!((to_f64(&r.rr) - 0.5).abs() < 0.01);
        assert_eq!(r.det, Some(crate::rational::ratio(1, 1)));
        let r2 = empirical_report(&tm, 512, 2, 1, 1, BoundaryPolicy::IncludeAll).unwrap();
        assert_eq!((r2.m, r2.h), (2, 1));
    }

    #[test]
    fn csv_rows() {
        let rows = vec![ConvergenceRow::new(16, Some(0.5), Some(0.25))];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "n,empirical,asymptotic,gap\n16,0.5,0.25,0.25\n");
    }
}

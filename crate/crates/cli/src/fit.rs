//! Log-log rate fits over trace windows.

use uaf_core::trace::TraceRecord;
use uaf_core::{Error, Result};

/// Gaps at or below this are at the precision floor and carry no rate
/// information.
pub const GAP_FLOOR: f64 = 1e-15;

/// Least-squares slope of `log(gap)` against `log(iter)` over records with
/// `lo <= iter <= hi`.
///
/// A gap at the floor (or missing) inside the window is an error unless
/// `shrink` is set, in which case the window ends just before the first
/// such record.
pub fn fit_rate(trace: &[TraceRecord], window: (usize, usize), shrink: bool) -> Result<f64> {
    let (lo, hi) = window;
    if lo == 0 || lo > hi {
        return Err(Error::Fit(format!("invalid window [{lo}, {hi}]")));
    }
    let mut pts = Vec::new();
    for r in trace.iter().filter(|r| r.iter >= lo && r.iter <= hi) {
        match r.gap_vs_ref {
            Some(g) if g > GAP_FLOOR => pts.push(((r.iter as f64).ln(), g.ln())),
            _ if shrink => break,
            _ => {
                return Err(Error::Fit(format!(
                    "gap at iteration {} is missing or below {GAP_FLOOR:e}",
                    r.iter
                )))
            }
        }
    }
    if pts.len() < 3 {
        return Err(Error::Fit(format!("only {} usable points in the window", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(gap: impl Fn(f64) -> f64, n: usize) -> Vec<TraceRecord> {
        (1..=n)
            .map(|k| TraceRecord {
                iter: k,
                f_value: 0.0,
                gap_vs_ref: Some(gap(k as f64)),
                omega: 0.5,
                lambda: 1.0,
                a_total: k as f64,
                displacement: 1.0,
                wall_seconds: 0.0,
            })
            .collect()
    }

    #[test]
    fn exact_power_laws() {
        let s3 = fit_rate(&trace(|k| 7.0 / k.powi(3), 100), (1, 100), false).unwrap();
        assert!((s3 + 3.0).abs() < 0.01);
        let s35 = fit_rate(&trace(|k| 0.2 / k.powf(3.5), 100), (10, 60), false).unwrap();
        assert!((s35 + 3.5).abs() < 0.01);
    }

    #[test]
    fn floor_inside_window() {
        let t = trace(|k| (1e3 / k.powi(8)).max(1e-16), 200);
        // 1e3 / k^8 reaches 1e-15 near k = 75
        assert!(matches!(fit_rate(&t, (1, 200), false), Err(Error::Fit(_))));
        let s = fit_rate(&t, (1, 200), true).unwrap();
        assert!((s + 8.0).abs() < 1e-6);
    }

    #[test]
    fn too_few_points() {
        let t = trace(|k| 1.0 / k, 10);
        assert!(fit_rate(&t, (3, 4), false).is_err());
        assert!(fit_rate(&t, (5, 4), false).is_err());
    }
}

use serde::Serialize;

use super::BenchReport;
use crate::overlay::{OverlayMask, Technique};
use crate::{Error, Result};

/// Least-squares line through the per-count median frame times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub technique: Technique,
    /// Milliseconds.
    pub intercept: f64,
    /// Milliseconds per overlay.
    pub slope: f64,
    pub residual_rms: f64,
}

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of nothing");
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Fits `ms = intercept + slope · overlays` per technique, in the order the
/// techniques first appear in the report.
pub fn fit_slopes(report: &BenchReport) -> Result<Vec<SlopeFit>> {
    let mut fits = Vec::new();
    for technique in report.techniques() {
        let points: Vec<(f64, f64)> = report
            .counts(technique)
            .into_iter()
            .map(|n| (n as f64, report.median_ms(technique, n).expect("count present")))
            .collect();
        if points.len() < 3 {
            return Err(Error::InsufficientData(points.len()));
        }
        let k = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
        let my = points.iter().map(|p| p.1).sum::<f64>() / k;
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let residual_rms = (points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / k).sqrt();
        fits.push(SlopeFit { technique, intercept, slope, residual_rms });
    }
    Ok(fits)
}

/// Aligned text table of slope fits.
pub fn format_slope_table(fits: &[SlopeFit]) -> String {
    let mut out = format!("{:<10}{:>16}{:>18}{:>16}\n", "technique", "intercept_ms", "slope_ms_per_ovl", "residual_rms");
    for f in fits {
        out += &format!("{:<10}{:>16.4}{:>18.5}{:>16.4}\n", f.technique.name(), f.intercept, f.slope, f.residual_rms);
    }
    out
}

/// Writes slope fits as CSV.
pub fn write_slopes_csv<W: std::io::Write>(fits: &[SlopeFit], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["technique", "intercept_ms", "slope_ms_per_overlay", "residual_rms"])?;
    for f in fits {
        w.write_record([f.technique.name().to_string(), f.intercept.to_string(), f.slope.to_string(), f.residual_rms.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Intersection over union of the covered (id > 0) pixel sets.
pub fn mask_iou(a: &OverlayMask, b: &OverlayMask) -> Result<f64> {
    if (a.width, a.height) != (b.width, b.height) {
        return Err(Error::DimensionMismatch(a.width, a.height, b.width, b.height));
    }
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.ids.iter().zip(&b.ids) {
        inter += usize::from(x > 0 && y > 0);
        union += usize::from(x > 0 || y > 0);
    }
    Ok(if union == 0 { 1.0 } else { inter as f64 / union as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{BenchEnvironment, BenchRow};

    fn report(f: impl Fn(usize) -> f64) -> BenchReport {
        let mut rows = Vec::new();
        for t in [Technique::Pps, Technique::Csg] {
            for n in [1, 2, 4, 8] {
                for frame in 0..5 {
                    rows.push(BenchRow { technique: t, overlays: n, frame, ms: f(n) });
                }
            }
        }
        BenchReport { rows, environment: BenchEnvironment::default(), pps_fetches: vec![] }
    }

    #[test]
    fn exact_line() {
        let fits = fit_slopes(&report(|n| 2.0 + 3.0 * n as f64)).unwrap();
        assert_eq!(fits[0].technique, Technique::Pps);
        for f in fits {
            assert!((f.intercept - 2.0).abs() < 1e-12 && (f.slope - 3.0).abs() < 1e-12 && f.residual_rms < 1e-12);
        }
    }

    #[test]
    fn constant_rows() {
        for f in fit_slopes(&report(|_| 5.0)).unwrap() {
            assert_eq!(f.slope, 0.0);
        }
    }

    #[test]
    fn too_few_counts() {
        let mut r = report(|_| 1.0);
        r.rows.retain(|row| row.overlays < 4);
        assert!(matches!(fit_slopes(&r), Err(Error::InsufficientData(2))));
    }

    #[test]
    fn iou_cases() {
        let m = |ids: Vec<u32>| OverlayMask::new(4, 1, ids);
        assert_eq!(mask_iou(&m(vec![1, 1, 0, 0]), &m(vec![1, 1, 0, 0])).unwrap(), 1.0);
        assert_eq!(mask_iou(&m(vec![1, 1, 0, 0]), &m(vec![0, 0, 2, 2])).unwrap(), 0.0);
        assert_eq!(mask_iou(&m(vec![0; 4]), &m(vec![0; 4])).unwrap(), 1.0);
        // two unit squares overlapping by half
        let a = OverlayMask::new(3, 2, vec![1, 1, 0, 1, 1, 0]);
        let b = OverlayMask::new(3, 2, vec![0, 1, 1, 0, 1, 1]);
        assert!((mask_iou(&a, &b).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(mask_iou(&a, &m(vec![0; 4])).is_err());
    }

    #[test]
    fn median_even_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}

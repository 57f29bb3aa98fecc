//! CSV emission and locale-independent number formatting.

use std::f64::consts::PI;
use std::fmt::Write;

use serde::Serialize;

use crate::correlation::{model_correlation, Angle, CorrelationModel, SpinConvention};
use crate::error::{Error, Result};

pub const CURVE_HEADER: &str = "delta,e_classical,e_quantum_half,e_quantum_photon";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub delta: f64,
    pub e_classical: f64,
    pub e_quantum_half: f64,
    pub e_quantum_photon: f64,
}

impl CurveRow {
    pub fn at(delta: f64) -> Self {
        let e = |m: &CorrelationModel| model_correlation(m, Angle(delta), Angle(0.0));
        CurveRow {
            delta,
            e_classical: e(&CorrelationModel::ClassicalLinear),
            e_quantum_half: e(&CorrelationModel::Quantum(SpinConvention::Half)),
            e_quantum_photon: e(&CorrelationModel::Quantum(SpinConvention::Photon)),
        }
    }
}

/// `steps + 1` rows evenly spaced over `Δ ∈ [0, π]`.
pub fn curve_rows(steps: usize) -> Result<Vec<CurveRow>> {
    if steps < 2 {
        return Err(Error::domain(format!("curve needs at least 2 steps, got {steps}")));
    }
    Ok((0..=steps).map(|i| CurveRow::at(PI * i as f64 / steps as f64)).collect())
}

/// The curve as CSV. Grid points are written exactly (shortest round-trip form),
/// correlations to 9 significant digits.
pub fn emit_curve(steps: usize) -> Result<String> {
    let mut out = String::new();
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for r in curve_rows(steps)? {
        writeln!(
            out,
            "{},{},{},{}",
            r.delta,
            format_significant(r.e_classical, 9),
            format_significant(r.e_quantum_half, 9),
            format_significant(r.e_quantum_photon, 9)
        )
        .expect("writing to a String cannot fail");
    }
    Ok(out)
}

/// `%g`-style formatting with `digits` significant digits and trailing zeros
/// removed; scientific notation outside `1e-5 ≤ |x| < 10^digits`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(-0.70710678118654752, 9), "-0.707106781");
        assert_eq!(format_significant(-0.5, 9), "-0.5");
        assert_eq!(format_significant(1.0, 9), "1");
        assert_eq!(format_significant(0.0, 9), "0");
        assert_eq!(format_significant(9.9999999999, 9), "10");
        assert_eq!(format_significant(1.5e-17, 9), "1.5e-17");
        assert_eq!(format_significant(123456.789123, 9), "123456.789");
        assert_eq!(format_significant(0.00012345678912, 9), "0.000123456789");
        assert_eq!(format_significant(1234567891234.0, 9), "1.23456789e12");
    }

    #[test]
    fn curve_shape() {
        let csv = emit_curve(180).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CURVE_HEADER);
        assert_eq!(lines.len(), 182);
        assert!(csv.ends_with('\n') && !csv.contains('\r'));
        assert!(lines[1].starts_with("0,-1,-1,"));
        assert!(curve_rows(1).is_err());
    }

    #[test]
    fn curve_rows_at_landmarks() {
        let rows = curve_rows(4).unwrap();
        assert_eq!(rows[0].e_classical, -1.0);
        assert_eq!(rows[0].e_quantum_half, -1.0);
        assert!(rows[2].e_classical.abs() < 1e-15 && rows[2].e_quantum_half.abs() < 1e-15);
        assert!((rows[1].e_classical + 0.5).abs() < 1e-15);
        assert!((rows[1].e_quantum_half + 0.707106781).abs() < 1e-9);
        assert!((rows[4].e_classical - 1.0).abs() < 1e-15 && (rows[4].e_quantum_half - 1.0).abs() < 1e-15);
    }
}

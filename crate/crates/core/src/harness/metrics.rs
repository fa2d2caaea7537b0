use std::ops::RangeInclusive;

use crate::error::{CcboError, Result};
use crate::solver::DecayTrace;

/// `(1/sqrt(d)) |v - vstar|_2`.
pub fn distance_d(v: &[f64], vstar: &[f64]) -> Result<f64> {
    if v.len() != vstar.len() || v.is_empty() {
        return Err(CcboError::Metric(format!("vectors have lengths {} and {}", v.len(), vstar.len())));
    }
    let sq: f64 = v.iter().zip(vstar).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((sq / v.len() as f64).sqrt())
}

/// `|e - e_star| / e_star`.
pub fn relative_error(e: f64, e_star: f64) -> Result<f64> {
    if e_star == 0.0 {
        return Err(CcboError::Metric("relative error against a zero reference".into()));
    }
    Ok(((e - e_star) / e_star).abs())
}

/// Least-squares line through `(k gamma, ln V_hat_k)` over the steps in
/// `window`. Returns `(slope per unit time, r^2)`.
pub fn fit_decay_rate(trace: &DecayTrace, window: RangeInclusive<u64>, gamma: f64) -> Result<(f64, f64)> {
    let mut pts = Vec::new();
    for r in trace.records.iter().filter(|r| window.contains(&r.step)) {
        match r.v_hat {
            Some(v) if v > 0.0 && v.is_finite() => pts.push((r.step as f64 * gamma, v.ln())),
            Some(v) => return Err(CcboError::Fit(format!("V_hat = {v} at step {}", r.step))),
            None => return Err(CcboError::Fit(format!("V_hat missing at step {}", r.step))),
        }
    }
    if pts.len() < 2 {
        return Err(CcboError::Fit(format!("window holds {} points", pts.len())));
    }
    if pts.iter().all(|p| p.1 == pts[0].1) {
        return Ok((0.0, 1.0));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sty: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if stt == 0.0 {
        return Err(CcboError::Fit("window spans a single time".into()));
    }
    let slope = sty / stt;
    let r2 = (sty * sty) / (stt * syy);
    Ok((slope, r2))
}

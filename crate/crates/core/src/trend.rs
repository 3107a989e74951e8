//! Finite-prefix surrogates for asymptotic statements. Every threshold is a
//! named constant so reports can quote it.

use serde::{Deserialize, Serialize};

/// Number of trailing values inspected by the window tests.
pub const TREND_WINDOW: usize = 5;
/// Growth factor over the window that counts as unbounded.
pub const TREND_FACTOR: f64 = 1.5;
/// Consecutive ratios below this count as geometric decay.
pub const GEOMETRIC_RATIO: f64 = 0.95;
/// Final value at most this fraction of the maximum counts as tending to zero.
pub const ZERO_FRACTION: f64 = 0.01;
/// Median Bertrand statistic above this counts as summable.
pub const BERTRAND_THRESHOLD: f64 = 1.0;

/// False when the sequence shows growth: the trailing window increases
/// monotonically by more than `TREND_FACTOR`, or the last quarter exceeds
/// the earlier maximum by that factor.
pub fn bounded_trend(values: &[f64]) -> bool {
    bounded_trend_with(values, TREND_WINDOW, TREND_FACTOR)
}

pub fn bounded_trend_with(values: &[f64], window: usize, factor: f64) -> bool {
    if values.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let n = values.len();
    if window >= 2 && n >= window {
        let w = &values[n - window..];
        let monotone = w.windows(2).all(|p| p[1] >= p[0]);
        if monotone && w[0] > 0.0 && w[window - 1] / w[0] > factor {
            return false;
        }
        if monotone && w[0] == 0.0 && w[window - 1] > 0.0 {
            return false;
        }
    }
    if n >= 4 {
        let cut = n - n / 4;
        let early = values[..cut].iter().copied().fold(0.0, f64::max);
        let late = values[cut..].iter().copied().fold(0.0, f64::max);
        if late > factor * early {
            return false;
        }
    }
    true
}

/// Trailing window strictly decreasing and ending far below the maximum.
pub fn tends_to_zero(values: &[f64]) -> bool {
    let n = values.len();
    if n < TREND_WINDOW {
        return false;
    }
    let max = values.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return true;
    }
    let w = &values[n - TREND_WINDOW..];
    w.windows(2).all(|p| p[1] < p[0]) && w[TREND_WINDOW - 1] <= ZERO_FRACTION * max
}

/// Every consecutive ratio in the trailing window is below `GEOMETRIC_RATIO`.
/// An identically zero tail passes.
pub fn geometric_tail(values: &[f64]) -> bool {
    let n = values.len();
    if n < TREND_WINDOW + 1 {
        return false;
    }
    values[n - TREND_WINDOW - 1..].windows(2).all(|p| {
        if p[0] == 0.0 {
            p[1] == 0.0
        } else {
            p[1] / p[0] < GEOMETRIC_RATIO
        }
    })
}

/// Bertrand statistics ln(n+1)·(n(a_k/a_{k+1} − 1) − 1) with n = k+1.
/// Limits above 1 indicate convergence, below 1 divergence.
pub fn bertrand_statistics(values: &[f64]) -> Vec<f64> {
    values
        .windows(2)
        .enumerate()
        .map(|(k, p)| {
            let n = (k + 1) as f64;
            (n + 1.0).ln() * (n * (p[0] / p[1] - 1.0) - 1.0)
        })
        .collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Median Bertrand statistic over the second half of the sequence.
pub fn bertrand_median(values: &[f64]) -> Option<f64> {
    let stats = bertrand_statistics(values);
    if stats.len() < 4 || values.iter().any(|v| !(*v > 0.0)) {
        return None;
    }
    Some(median(stats[stats.len() / 2..].to_vec()))
}

/// Summability surrogate: geometric decay, or a Bertrand statistic that
/// settles above 1 (which catches 1/(k ln²k)-type decay).
pub fn summable_trend(values: &[f64]) -> bool {
    if values.is_empty() || values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return false;
    }
    geometric_tail(values) || bertrand_median(values).is_some_and(|b| b > BERTRAND_THRESHOLD)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r2: f64,
}

/// Least-squares line through (ln x, ln y).
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Option<Fit> {
    if xs.len() != ys.len() || xs.len() < 3 || xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (sse / (n - 2.0) / sxx).sqrt();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Some(Fit { slope, intercept, stderr, r2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundedness() {
        assert!(bounded_trend(&[1.0; 20]));
        let converging: Vec<f64> = (1..30).map(|k| 2.0 - 1.0 / k as f64).collect();
        assert!(bounded_trend(&converging));
        let growing: Vec<f64> = (0..20).map(|k| 2f64.powi(k)).collect();
        assert!(!bounded_trend(&growing));
        let mut spike = vec![1.0; 20];
        spike[18] = 3.0;
        assert!(!bounded_trend(&spike));
        assert!(!bounded_trend(&[1.0, f64::INFINITY]));
    }

    #[test]
    fn decay_to_zero() {
        let v: Vec<f64> = (0..20).map(|k| 0.5f64.powi(k)).collect();
        assert!(tends_to_zero(&v));
        assert!(!tends_to_zero(&[1.0; 20]));
        assert!(tends_to_zero(&[0.0; 6]));
    }

    #[test]
    fn summability_separates_classic_profiles() {
        let harmonic: Vec<f64> = (0..40).map(|k| 1.0 / (k + 1) as f64).collect();
        assert!(!summable_trend(&harmonic));
        let bertrand: Vec<f64> =
            (0..40).map(|k| 1.0 / ((k + 2) as f64 * ((k + 2) as f64).ln().powi(2))).collect();
        assert!(summable_trend(&bertrand));
        let geometric: Vec<f64> = (0..40).map(|k| 0.9f64.powi(k)).collect();
        assert!(summable_trend(&geometric));
        assert!(!summable_trend(&[1.0; 40]));
        assert!(summable_trend(&[0.0; 40]));
    }

    #[test]
    fn exact_power_law_fit() {
        let xs = [8.0, 16.0, 32.0, 64.0, 128.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(0.4)).collect();
        let f = loglog_fit(&xs, &ys).unwrap();
        assert!((f.slope - 0.4).abs() < 1e-12);
        assert!(f.r2 > 1.0 - 1e-12 && f.stderr < 1e-10);
    }
}

//! Small sample statistics used to check the sampler.

use rayon::prelude::*;

/// Kendall's tau with its asymptotic standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauEstimate {
    pub tau: f64,
    pub se: f64,
}

/// Empirical Kendall's tau of two equally long samples, with the standard
/// error of the U-statistic, `2 sd(h_i) / sqrt(n)` where `h_i` is the mean
/// concordance of observation `i` with all others.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> TauEstimate {
    assert_eq!(x.len(), y.len(), "kendall_tau needs samples of equal length");
    let n = x.len();
    if n < 2 {
        return TauEstimate { tau: f64::NAN, se: f64::NAN };
    }
    let h: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut s = 0.0;
            for j in 0..n {
                if j != i {
                    s += ((x[i] - x[j]) * (y[i] - y[j])).signum();
                }
            }
            s / (n - 1) as f64
        })
        .collect();
    let tau = h.iter().sum::<f64>() / n as f64;
    let var_h = h.iter().map(|v| (v - tau).powi(2)).sum::<f64>() / (n - 1) as f64;
    TauEstimate {
        tau,
        se: 2.0 * var_h.sqrt() / (n as f64).sqrt(),
    }
}

/// Kolmogorov-Smirnov statistic against Uniform(0,1) and its asymptotic
/// p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

pub fn ks_uniform(sample: &[f64]) -> KsResult {
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let lo = x - i as f64 / n;
        let hi = (i as f64 + 1.0) / n - x;
        d = d.max(lo).max(hi);
    }
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    KsResult {
        statistic: d,
        p_value: kolmogorov_q(lambda),
    }
}

/// `P(K > lambda)` for the Kolmogorov distribution.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Mean and standard error of a sample.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_extremes() {
        let x: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((kendall_tau(&x, &x).tau - 1.0).abs() < 1e-15);
        assert!((kendall_tau(&x, &y).tau + 1.0).abs() < 1e-15);
    }

    #[test]
    fn tau_small_example() {
        // Pairs: (1,1), (2,3), (3,2): one discordant of three.
        let t = kendall_tau(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]);
        assert!((t.tau - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ks_on_grid_passes() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let r = ks_uniform(&xs);
        assert!(r.statistic <= 0.0005 + 1e-12);
        assert!(r.p_value > 0.99);
        let skewed: Vec<f64> = xs.iter().map(|x| x * x).collect();
        assert!(ks_uniform(&skewed).p_value < 1e-6);
    }

    #[test]
    fn kolmogorov_reference_value() {
        // P(K > 1.3581) = 0.05
        assert!((kolmogorov_q(1.3581) - 0.05).abs() < 1e-4);
    }
}

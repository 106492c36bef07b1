//! Small statistical helpers shared by the estimators and the test suites:
//! chi-square goodness-of-fit, two-sample chi-square, and Kolmogorov-Smirnov.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Chi-square statistic and p-value against given expected counts.
/// Cells with zero expectation must have zero observations.
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> (f64, f64) {
    assert_eq!(observed.len(), expected.len());
    let mut stat = 0.0;
    let mut dof = 0usize;
    for (&o, &e) in observed.iter().zip(expected) {
        if e == 0.0 {
            assert_eq!(o, 0, "observation in zero-probability cell");
            continue;
        }
        let d = o as f64 - e;
        stat += d * d / e;
        dof += 1;
    }
    assert!(dof >= 2, "need at least two cells");
    (stat, chi_square_p(stat, dof - 1))
}

/// Two-sample chi-square test for identical category distributions.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> (f64, f64) {
    assert_eq!(a.len(), b.len());
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let (na, nb) = (na as f64, nb as f64);
    let mut stat = 0.0;
    let mut dof = 0usize;
    for (&oa, &ob) in a.iter().zip(b) {
        let tot = (oa + ob) as f64;
        if tot == 0.0 {
            continue;
        }
        let ea = tot * na / (na + nb);
        let eb = tot * nb / (na + nb);
        let da = oa as f64 - ea;
        let db = ob as f64 - eb;
        stat += da * da / ea + db * db / eb;
        dof += 1;
    }
    assert!(dof >= 2);
    (stat, chi_square_p(stat, dof - 1))
}

fn chi_square_p(stat: f64, dof: usize) -> f64 {
    let dist = ChiSquared::new(dof as f64).expect("positive dof");
    1.0 - dist.cdf(stat)
}

/// One-sample Kolmogorov-Smirnov statistic against a CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        let hi = (i as f64 + 1.0) / n - f;
        let lo = f - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    d
}

/// Asymptotic KS p-value with the Stephens small-sample correction.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let n = n as f64;
    let lambda = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    kolmogorov_survival(lambda)
}

/// `Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 1e-8 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=101 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-14 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Mean and standard error of a sample.
pub fn mean_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    assert!(n >= 2.0);
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Mean and standard error of a Bernoulli proportion from counts.
pub fn proportion_se(successes: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0);
    let p = successes as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_square_uniform_ok() {
        let observed = [250u64, 240, 260, 250];
        let expected = [250.0; 4];
        let (_, p) = chi_square_gof(&observed, &expected);
        assert!(p > 0.5, "p = {p}");
    }

    #[test]
    fn chi_square_detects_bias() {
        let observed = [900u64, 50, 25, 25];
        let expected = [250.0; 4];
        let (_, p) = chi_square_gof(&observed, &expected);
        assert!(p < 1e-6);
    }

    #[test]
    fn ks_uniform_self_test() {
        // deterministic uniform grid has a tiny KS distance to U[0,1]
        let mut xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let d = ks_statistic(&mut xs, |x| x.clamp(0.0, 1.0));
        assert!(d < 0.002);
        assert!(ks_p_value(d, 1000) > 0.99);
    }

    #[test]
    fn ks_detects_wrong_cdf() {
        let mut xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let d = ks_statistic(&mut xs, |x| x * x);
        assert!(ks_p_value(d, 1000) < 1e-6);
    }

    #[test]
    fn kolmogorov_survival_reference_points() {
        // Q(0.5) ~ 0.9639, Q(1.0) ~ 0.2700, Q(1.5) ~ 0.0222 (classical table)
        assert!((kolmogorov_survival(0.5) - 0.9639).abs() < 2e-3);
        assert!((kolmogorov_survival(1.0) - 0.2700).abs() < 2e-3);
        assert!((kolmogorov_survival(1.5) - 0.0222).abs() < 2e-3);
    }
}

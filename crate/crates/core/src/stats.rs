//! Confidence intervals and hypothesis tests for drop counts.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// Multiplier for a two-sided 99.7% interval.
pub const Z_997: f64 = 3.0;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// `z` standard deviations of a binomial proportion with true value `p`.
pub fn binomial_radius(p: f64, trials: u64, z: f64) -> f64 {
    if trials == 0 {
        return f64::INFINITY;
    }
    z * (p * (1.0 - p) / trials as f64).sqrt()
}

/// Whether an observed proportion lies within `z` binomial standard
/// deviations of the predicted `p`.
pub fn within_binomial_radius(observed: f64, p: f64, trials: u64, z: f64) -> bool {
    (observed - p).abs() <= binomial_radius(p, trials, z)
}

/// Two-sided p-value of the pooled two-proportion z-test.
pub fn two_proportion_p_value(x1: u64, n1: u64, x2: u64, n2: u64) -> f64 {
    if n1 == 0 || n2 == 0 {
        return 1.0;
    }
    let (a, b) = (x1 as f64 / n1 as f64, x2 as f64 / n2 as f64);
    let pooled = (x1 + x2) as f64 / (n1 + n2) as f64;
    let se = (pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    if se == 0.0 {
        return if a == b { 1.0 } else { 0.0 };
    }
    let z = (a - b).abs() / se;
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    2.0 * (1.0 - normal.cdf(z))
}

/// p-value of the chi-square homogeneity test over groups of `(events, trials)`.
///
/// Returns 1 when fewer than two groups carry trials or no group has events.
pub fn chi_square_homogeneity(groups: &[(u64, u64)]) -> f64 {
    let groups: Vec<(u64, u64)> = groups.iter().copied().filter(|g| g.1 > 0).collect();
    if groups.len() < 2 {
        return 1.0;
    }
    let events: u64 = groups.iter().map(|g| g.0).sum();
    let trials: u64 = groups.iter().map(|g| g.1).sum();
    if events == 0 || events == trials {
        return 1.0;
    }
    let p = events as f64 / trials as f64;
    let stat: f64 = groups
        .iter()
        .map(|&(x, n)| {
            let e1 = n as f64 * p;
            let e0 = n as f64 * (1.0 - p);
            let o1 = x as f64;
            let o0 = (n - x) as f64;
            (o1 - e1).powi(2) / e1 + (o0 - e0).powi(2) / e0
        })
        .sum();
    let dist = ChiSquared::new((groups.len() - 1) as f64).expect("positive degrees of freedom");
    1.0 - dist.cdf(stat)
}

//! Kolmogorov–Smirnov statistics with asymptotic critical values.

/// `c(α) = sqrt(−ln(α/2) / 2)`, the asymptotic Kolmogorov quantile
/// (≈ 1.628 at α = 0.01).
pub fn kolmogorov_quantile(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// Asymptotic one-sample critical value `c(α)/√n`.
pub fn one_sample_critical_value(alpha: f64, n: usize) -> f64 {
    kolmogorov_quantile(alpha) / (n as f64).sqrt()
}

/// Asymptotic two-sample critical value `c(α)·sqrt((n+m)/(n·m))`.
pub fn two_sample_critical_value(alpha: f64, n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    kolmogorov_quantile(alpha) * ((n + m) / (n * m)).sqrt()
}

/// Asymptotic survival function of the Kolmogorov distribution,
/// `Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²λ²}`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Exact one-sample statistic `sup_x |F_n(x) − F(x)|` for a continuous `F`.
pub fn one_sample_statistic<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (((i + 1) as f64 / n) - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// One-sample statistic against Uniform[0, 1].
pub fn uniform_statistic(values: &[f64]) -> f64 {
    one_sample_statistic(values, |x| x.clamp(0.0, 1.0))
}

/// Exact two-sample statistic `sup_x |F_n(x) − G_m(x)|`, ties handled by
/// advancing through equal values in both samples before comparing.
pub fn two_sample_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_at_one_percent() {
        assert!((kolmogorov_quantile(0.01) - 1.627_624).abs() < 1e-6);
        // the critical value really is the α-quantile of the limit law
        assert!((kolmogorov_survival(kolmogorov_quantile(0.01)) - 0.01).abs() < 1e-6);
        assert!((kolmogorov_survival(kolmogorov_quantile(0.05)) - 0.05).abs() < 1e-4);
    }

    #[test]
    fn one_sample_by_hand() {
        // F_n jumps at 0.1, 0.5, 0.9; largest gap is 2/3 − 0.5 or 0.1 − 0 ...
        let d = uniform_statistic(&[0.1, 0.5, 0.9]);
        let want: f64 = [1.0 / 3.0 - 0.1, 0.1, 2.0 / 3.0 - 0.5, 0.5 - 1.0 / 3.0, 1.0 - 0.9, 0.9 - 2.0 / 3.0]
            .into_iter()
            .fold(0.0, f64::max);
        assert!((d - want).abs() < 1e-15);
        assert_eq!(uniform_statistic(&[0.5]), 0.5);
    }

    #[test]
    fn two_sample_by_hand() {
        assert_eq!(two_sample_statistic(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert_eq!(two_sample_statistic(&[1.0, 2.0], &[3.0, 4.0]), 1.0);
        assert!((two_sample_statistic(&[1.0, 3.0], &[2.0, 4.0]) - 0.5).abs() < 1e-15);
        // ties across samples
        assert!((two_sample_statistic(&[1.0, 1.0, 2.0], &[1.0, 2.0, 2.0]) - 1.0 / 3.0).abs() < 1e-15);
    }
}

//! Kolmogorov-Smirnov goodness-of-fit against a model CDF, plus small
//! Monte Carlo summaries.

/// One-sample KS statistic `sup_y |F_N(y) - F(y)|` for a continuous model
/// CDF. Sorts the sample in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &mut [f64], cdf: F) -> f64 {
    ks_statistic_mixed(sample, &cdf, &cdf)
}

/// KS statistic against a model CDF that may carry atoms. `cdf_left` must
/// evaluate the left limit `P(X < y)`; tied sample values are compared as a
/// block, so an atom matched by the right tie mass contributes nothing. The
/// classical threshold stays valid (conservative) for mixed distributions.
pub fn ks_statistic_mixed<F, G>(sample: &mut [f64], cdf: &F, cdf_left: &G) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    sample.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sample.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sample.len() {
        let v = sample[i];
        let mut j = i + 1;
        while j < sample.len() && sample[j] == v {
            j += 1;
        }
        // F_N jumps from i/n to j/n at v; F jumps from cdf_left(v) to cdf(v)
        d = d.max((cdf_left(v) - i as f64 / n).abs());
        d = d.max((cdf(v) - j as f64 / n).abs());
        i = j;
    }
    d
}

/// Asymptotic KS critical value at level `alpha`:
/// `sqrt(-ln(alpha/2) / 2) / sqrt(n)` (1.63/sqrt(n) at the 1% level).
pub fn ks_threshold(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// Sample mean and its standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Median (average of middle pair for even length).
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Interquartile range endpoints (type-7 interpolation).
pub fn quartiles(xs: &[f64]) -> (f64, f64) {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = |p: f64| -> f64 {
        let pos = p * (v.len() - 1) as f64;
        let k = pos.floor() as usize;
        let w = pos - k as f64;
        if k + 1 < v.len() {
            v[k] * (1.0 - w) + v[k + 1] * w
        } else {
            v[k]
        }
    };
    (q(0.25), q(0.75))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_matches_tabulated_value() {
        // c(0.01) = 1.6276 at the 1% level
        let t = ks_threshold(100_000, 0.01);
        assert!((t * (100_000.0_f64).sqrt() - 1.6276236307187293).abs() < 1e-12);
    }

    #[test]
    fn tied_block_matching_an_atom_contributes_nothing() {
        // model: mass 1/2 at 0, uniform on (0, 1/2] otherwise
        let cdf = |y: f64| {
            if y < 0.0 {
                0.0
            } else {
                (0.5 + y).min(1.0)
            }
        };
        let cdf_left = |y: f64| if y <= 0.0 { 0.0 } else { (0.5 + y).min(1.0) };
        let mut xs: Vec<f64> = Vec::new();
        for i in 0..500 {
            xs.push(0.0);
            xs.push((i as f64 + 0.5) / 1000.0);
        }
        let d = ks_statistic_mixed(&mut xs, &cdf, &cdf_left);
        assert!(d < 0.002, "{d}");
    }

    #[test]
    fn ks_detects_shift() {
        // deterministic uniform grid vs the uniform CDF: tiny statistic
        let mut xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let d = ks_statistic(&mut xs, |x| x.clamp(0.0, 1.0));
        assert!(d <= 0.0006);
        // versus a shifted CDF: large statistic
        let d = ks_statistic(&mut xs, |x| (x - 0.2).clamp(0.0, 1.0));
        assert!(d > 0.19);
    }

    #[test]
    fn summaries() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let (m, se) = mean_se(&xs);
        assert_eq!(m, 2.5);
        assert!((se - (5.0 / 3.0_f64 / 4.0).sqrt()).abs() < 1e-12);
        assert_eq!(median(&xs), 2.5);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        let (q1, q3) = quartiles(&xs);
        assert!((q1 - 1.75).abs() < 1e-12);
        assert!((q3 - 3.25).abs() < 1e-12);
    }
}

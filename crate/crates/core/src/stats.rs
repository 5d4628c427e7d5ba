//! Empirical distributions of `TTC_min` and their comparison.

/// Right-continuous empirical CDF: `F(x)` is the fraction of samples `<= x`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    values: Vec<f64>,
}

impl EmpiricalCdf {
    /// NaN samples are dropped.
    pub fn new(samples: &[f64]) -> Self {
        let mut values: Vec<f64> = samples.iter().copied().filter(|v| !v.is_nan()).collect();
        values.sort_by(f64::total_cmp);
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        let below = self.values.partition_point(|&v| v <= x);
        below as f64 / self.values.len() as f64
    }

    /// `(value, F(value))` at every distinct sample value.
    pub fn steps(&self) -> Vec<(f64, f64)> {
        let n = self.values.len() as f64;
        let mut steps: Vec<(f64, f64)> = Vec::new();
        for (i, &v) in self.values.iter().enumerate() {
            let height = (i + 1) as f64 / n;
            match steps.last_mut() {
                Some(last) if last.0 == v => last.1 = height,
                _ => steps.push((v, height)),
            }
        }
        steps
    }
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a - F_b|`; `None` when
/// either sample is empty.
pub fn ks_d_statistic(a: &[f64], b: &[f64]) -> Option<f64> {
    let (fa, fb) = (EmpiricalCdf::new(a), EmpiricalCdf::new(b));
    if fa.is_empty() || fb.is_empty() {
        return None;
    }
    let (xs, ys) = (fa.values(), fb.values());
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    // Both CDFs only jump at sample points; walk the pooled values in order.
    while i < xs.len() || j < ys.len() {
        let x = match (xs.get(i), ys.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Some(d)
}

/// Middle order statistic, averaging the two middle values for even sizes.
pub fn median(samples: &[f64]) -> Option<f64> {
    let cdf = EmpiricalCdf::new(samples);
    let v = cdf.values();
    let n = v.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(v[n / 2]),
        _ => Some((v[n / 2 - 1] + v[n / 2]) / 2.0),
    }
}

/// Default half-width, seconds, of the agreement band around the reference
/// median.
pub const MEDIAN_BAND: f64 = 0.5;

pub fn within_band(method_median: f64, reference_median: f64, band: f64) -> bool {
    (method_median - reference_median).abs() <= band
}

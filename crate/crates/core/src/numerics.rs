//! Small numerical building blocks shared by the exact and Monte Carlo paths.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn scale(&mut self, factor: f64) {
        self.sum *= factor;
        self.comp *= factor;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Streaming `log Σ exp(x_i)` with a running maximum shift.
///
/// An empty accumulator represents `log 0 = -∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSumExp {
    shift: f64,
    sum: CompensatedSum,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self {
            shift: f64::NEG_INFINITY,
            sum: CompensatedSum::new(),
        }
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        if x > self.shift {
            if self.shift.is_finite() {
                self.sum.scale((self.shift - x).exp());
            }
            self.shift = x;
        }
        self.sum.add((x - self.shift).exp());
    }

    pub fn merge(&mut self, other: &LogSumExp) {
        if !other.shift.is_finite() {
            return;
        }
        if !self.shift.is_finite() {
            *self = *other;
            return;
        }
        let mut incoming = other.sum;
        if other.shift > self.shift {
            self.sum.scale((self.shift - other.shift).exp());
            self.shift = other.shift;
        } else {
            incoming.scale((other.shift - self.shift).exp());
        }
        self.sum.merge(&incoming);
    }

    pub fn is_empty(&self) -> bool {
        !self.shift.is_finite()
    }

    pub fn value(&self) -> f64 {
        if self.is_empty() {
            f64::NEG_INFINITY
        } else {
            self.shift + self.sum.value().ln()
        }
    }
}

/// `log Σ exp(x_i)` over a slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let mut acc = LogSumExp::new();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending in the node.
pub fn gauss_legendre(count: usize) -> Vec<(f64, f64)> {
    let n = count;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let step = p / d;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        out.push((z, 2.0 / ((1.0 - z * z) * dp * dp)));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lse_matches_naive_and_survives_overflow() {
        let xs = [0.1, -2.0, 3.5, 0.0];
        let naive = xs.iter().map(|x: &f64| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&xs) - naive).abs() < 1e-14);
        let big = [1000.0, 1000.0];
        assert!((log_sum_exp(&big) - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn lse_merge_is_order_insensitive_up_to_rounding() {
        let mut a = LogSumExp::new();
        let mut b = LogSumExp::new();
        for i in 0..50 {
            let x = (i as f64 * 0.37).sin() * 40.0;
            if i % 2 == 0 {
                a.add(x)
            } else {
                b.add(x)
            }
        }
        let mut ab = a;
        ab.merge(&b);
        let mut ba = b;
        ba.merge(&a);
        assert!((ab.value() - ba.value()).abs() < 1e-12);
        let mut empty = LogSumExp::new();
        empty.merge(&a);
        assert_eq!(empty.value(), a.value());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [2usize, 5, 16, 32] {
            let rule = gauss_legendre(n);
            let wsum: f64 = rule.iter().map(|(_, w)| w).sum();
            assert!((wsum - 2.0).abs() < 1e-13, "n={n} weight sum {wsum}");
            // degree 2n-1 is exact
            let deg = 2 * n - 2;
            let integral: f64 = rule.iter().map(|(x, w)| w * x.powi(deg as i32)).sum();
            let exact = 2.0 / (deg as f64 + 1.0);
            assert!((integral - exact).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1.0);
        for _ in 0..1000 {
            s.add(1e-16);
        }
        assert!((s.value() - (1.0 + 1e-13)).abs() < 1e-17);
    }
}

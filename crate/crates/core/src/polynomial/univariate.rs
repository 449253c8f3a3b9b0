/// Dense univariate polynomial with `f64` coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<f64>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        UniPoly { coeffs }
    }

    pub fn monomial(c: f64, k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        UniPoly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() == 1 {
            return UniPoly::new(vec![0.0]);
        }
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Upper bound on `|p'|` over `[lo, hi]` from the Taylor expansion at the midpoint.
    pub fn derivative_bound(&self, lo: f64, hi: f64) -> f64 {
        let m = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo).abs();
        // Taylor coefficients of p about m: t_k = p^{(k)}(m)/k!
        let n = self.coeffs.len();
        let mut buf = [0.0; 32];
        let mut heap;
        let shifted: &mut [f64] = if n <= buf.len() {
            buf[..n].copy_from_slice(&self.coeffs);
            &mut buf[..n]
        } else {
            heap = self.coeffs.clone();
            &mut heap
        };
        for i in 0..n {
            for j in (i..n - 1).rev() {
                shifted[j] += m * shifted[j + 1];
            }
        }
        // p'(m+s) = Σ_{k≥1} k t_k s^{k-1}
        let mut bound = 0.0;
        let mut hp = 1.0;
        for (k, &t) in shifted.iter().enumerate().skip(1) {
            bound += k as f64 * t.abs() * hp;
            hp *= h;
        }
        bound
    }

    /// Real roots in `(lo, hi)`, located by sign changes on a uniform grid
    /// refined by bisection.
    pub fn roots_in(&self, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
        let mut roots = Vec::new();
        if self.degree() == 0 {
            return roots;
        }
        let step = (hi - lo) / samples as f64;
        let mut x0 = lo;
        let mut f0 = self.eval(x0);
        for i in 1..=samples {
            let x1 = lo + step * i as f64;
            let f1 = self.eval(x1);
            if f1 == 0.0 && i < samples {
                roots.push(x1);
            } else if f0 * f1 < 0.0 {
                let (mut a, mut b, mut fa) = (x0, x1, f0);
                for _ in 0..200 {
                    let c = 0.5 * (a + b);
                    let fc = self.eval(c);
                    if fc == 0.0 || (b - a) < 1e-15 * (1.0 + c.abs()) {
                        a = c;
                        b = c;
                        break;
                    }
                    if fa * fc < 0.0 {
                        b = c;
                    } else {
                        a = c;
                        fa = fc;
                    }
                }
                roots.push(0.5 * (a + b));
            }
            x0 = x1;
            f0 = f1;
        }
        roots
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_and_derivative() {
        let p = UniPoly::new(vec![1.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(p.eval(2.0), 17.0);
        assert_eq!(p.derivative().eval(2.0), 32.0);
        assert_eq!(p.degree(), 4);
    }

    #[test]
    fn derivative_bound_dominates_samples() {
        let p = UniPoly::new(vec![0.3, -2.0, 0.5, 1.0, -0.25]);
        let dp = p.derivative();
        for &(lo, hi) in &[(-2.0, -1.0), (-0.1, 0.3), (0.9, 2.0)] {
            let b = p.derivative_bound(lo, hi);
            for i in 0..=100 {
                let x = lo + (hi - lo) * i as f64 / 100.0;
                assert!(dp.eval(x).abs() <= b * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn roots() {
        let p = UniPoly::new(vec![1.0, 0.0, 0.0, 1.0]); // 1 + v^3
        let r = p.roots_in(-1.5, 1.5, 300);
        assert_eq!(r.len(), 1);
        assert!((r[0] + 1.0).abs() < 1e-12);
    }
}

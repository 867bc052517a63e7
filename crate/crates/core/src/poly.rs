//! Small dense polynomials and their roots.

use std::ops::{Add, Mul, Sub};

use nalgebra::{Complex, DMatrix};

/// Polynomial with real coefficients stored in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn new(ascending: Vec<f64>) -> Self {
        Poly(ascending)
    }

    pub fn from_descending(desc: &[f64]) -> Self {
        Poly(desc.iter().rev().copied().collect())
    }

    pub fn descending(&self) -> Vec<f64> {
        self.0.iter().rev().copied().collect()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![0.0]);
        }
        Poly(self.0.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect())
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Complex roots from the eigenvalues of the companion matrix. Leading
    /// coefficients that are negligible relative to the largest one are
    /// dropped first.
    pub fn complex_roots(&self) -> Vec<Complex<f64>> {
        let scale = self.max_abs();
        if scale == 0.0 {
            return Vec::new();
        }
        let mut c: Vec<f64> = self.0.iter().map(|x| x / scale).collect();
        while c.len() > 1 && c.last().unwrap().abs() < 1e-14 {
            c.pop();
        }
        let deg = c.len() - 1;
        if deg == 0 {
            return Vec::new();
        }
        let lead = c[deg];
        let mut m = DMatrix::<f64>::zeros(deg, deg);
        for k in 0..deg {
            m[(0, k)] = -c[deg - 1 - k] / lead;
        }
        for k in 1..deg {
            m[(k, k - 1)] = 1.0;
        }
        m.complex_eigenvalues().iter().copied().collect()
    }

    /// Newton iteration from `x`, keeping only steps that reduce `|p|`.
    pub fn polish(&self, mut x: f64) -> f64 {
        let d = self.derivative();
        let mut fx = self.eval(x).abs();
        for _ in 0..50 {
            let slope = d.eval(x);
            if slope == 0.0 || fx == 0.0 {
                break;
            }
            let next = x - self.eval(x) / slope;
            let fnext = self.eval(next).abs();
            if !(fnext < fx) {
                break;
            }
            x = next;
            fx = fnext;
        }
        x
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let len = self.0.len().max(rhs.0.len());
        Poly(
            (0..len)
                .map(|k| self.0.get(k).copied().unwrap_or(0.0) + rhs.0.get(k).copied().unwrap_or(0.0))
                .collect(),
        )
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &rhs.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }
}

/// Discriminant of `a x^4 + b x^3 + c x^2 + d x + e` after scaling the
/// coefficients to max-abs 1.
pub fn quartic_discriminant_normalized(desc: [f64; 5]) -> f64 {
    let scale = desc.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let [a, b, c, d, e] = desc.map(|x| x / scale);
    256.0 * a.powi(3) * e.powi(3) - 192.0 * a * a * b * d * e * e - 128.0 * a * a * c * c * e * e
        + 144.0 * a * a * c * d * d * e
        - 27.0 * a * a * d.powi(4)
        + 144.0 * a * b * b * c * e * e
        - 6.0 * a * b * b * d * d * e
        - 80.0 * a * b * c * c * d * e
        + 18.0 * a * b * c * d.powi(3)
        + 16.0 * a * c.powi(4) * e
        - 4.0 * a * c.powi(3) * d * d
        - 27.0 * b.powi(4) * e * e
        + 18.0 * b.powi(3) * c * d * e
        - 4.0 * b.powi(3) * d.powi(3)
        - 4.0 * b * b * c.powi(3) * e
        + b * b * c * c * d * d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(roots: &[f64]) -> Poly {
        roots.iter().fold(Poly(vec![1.0]), |p, &r| &p * &Poly(vec![-r, 1.0]))
    }

    #[test]
    fn roots_of_product() {
        let p = from_roots(&[-1.5, 0.25, 2.0, 3.0]);
        let mut re: Vec<f64> = p.complex_roots().iter().map(|z| p.polish(z.re)).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in re.iter().zip([-1.5, 0.25, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn discriminant_vanishes_for_double_root() {
        let p = from_roots(&[0.3, 0.3, -1.0, 2.0]);
        let desc: [f64; 5] = p.descending().try_into().unwrap();
        assert!(quartic_discriminant_normalized(desc).abs() < 1e-14);
        let q = from_roots(&[0.3, 0.4, -1.0, 2.0]);
        let desc: [f64; 5] = q.descending().try_into().unwrap();
        assert!(quartic_discriminant_normalized(desc).abs() > 1e-6);
    }

    #[test]
    fn degree_drop() {
        let p = Poly(vec![-2.0, 1.0, 0.0, 1e-18]);
        let roots = p.complex_roots();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_and_eval() {
        let p = Poly(vec![1.0, -3.0, 0.0, 2.0]);
        assert_eq!(p.eval(2.0), 1.0 - 6.0 + 16.0);
        assert_eq!(p.derivative().0, vec![-3.0, 0.0, 6.0]);
    }
}

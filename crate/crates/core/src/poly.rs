//! Dense univariate polynomials over the rationals.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::series::{rat_to_f64, Coefficient};

/// Coefficients from the constant term upwards; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(Vec<Coefficient>);

impl Poly {
    pub fn new(mut c: Vec<Coefficient>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly(c)
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&x| Coefficient::from_integer(BigInt::from(x))).collect())
    }

    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn coeffs(&self) -> &[Coefficient] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial has none.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Coefficient {
        self.0.last().cloned().unwrap_or_else(Coefficient::zero)
    }

    pub fn eval(&self, x: &Coefficient) -> Coefficient {
        self.0
            .iter()
            .rev()
            .fold(Coefficient::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_c64(&self, z: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + rat_to_f64(c))
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Coefficient::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new(
            (0..n)
                .map(|i| {
                    self.0.get(i).cloned().unwrap_or_default()
                        - o.0.get(i).cloned().unwrap_or_default()
                })
                .collect(),
        )
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Coefficient::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    pub fn scale(&self, k: &Coefficient) -> Poly {
        Poly::new(self.0.iter().map(|c| c * k).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.lead().recip())
    }

    /// Euclidean division.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Coefficient::zero(); r.len() - dd];
        let inv = d.lead().recip();
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &inv;
            if !c.is_zero() {
                for (i, dc) in d.0.iter().enumerate() {
                    r[k + i] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's square-free decomposition: `(factor, multiplicity)` pairs with
    /// pairwise coprime monic square-free factors.
    pub fn squarefree(&self) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        if self.degree().is_none_or(|d| d == 0) {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let mut a = f.gcd(&df);
        let mut b = f.div_rem(&a).0;
        let mut c = df.div_rem(&a).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree().is_some_and(|x| x > 0) {
            a = b.gcd(&d);
            if a.degree().is_some_and(|x| x > 0) {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// All complex roots of a square-free polynomial, from companion-matrix
    /// eigenvalues polished by Newton steps.
    pub fn numeric_roots(&self) -> Vec<Complex64> {
        let Some(n) = self.degree() else {
            return Vec::new();
        };
        if n == 0 {
            return Vec::new();
        }
        let m = self.monic();
        let c: Vec<f64> = m.0.iter().map(rat_to_f64).collect();
        let mut comp = DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            comp[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            comp[(i, n - 1)] = -c[i];
        }
        let eig = comp.complex_eigenvalues();
        let d = m.derivative();
        eig.iter()
            .map(|&z0| {
                let mut z = z0;
                for _ in 0..50 {
                    let fz = m.eval_c64(z);
                    let dz = d.eval_c64(z);
                    if dz.norm() == 0.0 {
                        break;
                    }
                    let step = fz / dz;
                    z -= step;
                    if step.norm() <= 1e-16 * z.norm().max(1.0) {
                        break;
                    }
                }
                z
            })
            .collect()
    }

    /// Exact rational roots with multiplicity, and the remaining factor
    /// (monic) holding the irrational and complex roots.
    pub fn rational_roots(&self) -> (Vec<(Coefficient, usize)>, Vec<(Poly, usize)>) {
        let mut found = Vec::new();
        let mut rest = Vec::new();
        for (factor, mult) in self.squarefree() {
            if factor.degree() == Some(1) {
                found.push((-&factor.0[0] / &factor.0[1], mult));
                continue;
            }
            let mut f = factor;
            // clear denominators: integer polynomial with leading coefficient L
            let den = f
                .0
                .iter()
                .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            let lead = (f.lead() * Coefficient::from_integer(den.clone())).to_integer().abs();
            for z in f.numeric_roots() {
                if z.im.abs() > 1e-7 * z.norm().max(1.0) {
                    continue;
                }
                if let Some(cand) = rational_root_near(&f, z.re, &lead) {
                    let lin = Poly::new(vec![-cand.clone(), Coefficient::one()]);
                    f = f.div_rem(&lin).0;
                    found.push((cand, mult));
                }
            }
            if f.degree().is_some_and(|d| d > 0) {
                rest.push((f, mult));
            }
        }
        found.sort_by(|a, b| a.0.cmp(&b.0));
        (found, rest)
    }
}

fn round_to(x: &Coefficient, scale: &BigInt) -> BigInt {
    (x * Coefficient::from_integer(scale.clone())).round().to_integer()
}

/// A rational root of `f` with denominator dividing `lead`, searched near
/// the numeric root `z`. Newton steps run in exact arithmetic at doubling
/// dyadic precision until `lead * z` rounds unambiguously.
fn rational_root_near(f: &Poly, z: f64, lead: &BigInt) -> Option<Coefficient> {
    let mut x = Coefficient::from_float(z)?;
    let df = f.derivative();
    let need = lead.bits() + z.abs().max(1.0).log2().ceil() as u64 + 64;
    let mut prec = 48u64;
    for _ in 0..64 {
        let fx = f.eval(&x);
        if fx.is_zero() {
            break;
        }
        let dx = df.eval(&x);
        if dx.is_zero() {
            return None;
        }
        x = &x - fx / dx;
        let scale = BigInt::one() << prec;
        x = Coefficient::new(round_to(&x, &scale), scale);
        if prec >= need {
            break;
        }
        prec = (2 * prec).min(need);
    }
    let cand = Coefficient::new(round_to(&x, lead), lead.clone());
    f.eval(&cand).is_zero().then_some(cand)
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn bareiss_det(mut m: Vec<Vec<Coefficient>>) -> Coefficient {
    let n = m.len();
    if n == 0 {
        return Coefficient::one();
    }
    let mut sign = Coefficient::one();
    let mut prev = Coefficient::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Coefficient::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Resultant via the Sylvester determinant.
pub fn resultant(a: &Poly, b: &Poly) -> Coefficient {
    let (Some(m), Some(n)) = (a.degree(), b.degree()) else {
        return Coefficient::zero();
    };
    let size = m + n;
    if size == 0 {
        return Coefficient::one();
    }
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut r = vec![Coefficient::zero(); size];
        for (k, c) in a.0.iter().rev().enumerate() {
            r[i + k] = c.clone();
        }
        rows.push(r);
    }
    for i in 0..m {
        let mut r = vec![Coefficient::zero(); size];
        for (k, c) in b.0.iter().rev().enumerate() {
            r[i + k] = c.clone();
        }
        rows.push(r);
    }
    bareiss_det(rows)
}

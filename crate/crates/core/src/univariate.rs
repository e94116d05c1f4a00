//! Univariate truncated power series with explicit precision.

use crate::field::Field;
use crate::series::{Series2, Truncation};

/// `sum c[i] s^i + O(s^prec)`; `prec == None` marks an exact polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct USeries<F: Field> {
    c: Vec<F>,
    prec: Option<usize>,
}

fn min_prec(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

fn add_prec(p: Option<usize>, k: usize) -> Option<usize> {
    p.map(|p| p.saturating_add(k))
}

impl<F: Field> USeries<F> {
    pub fn exact(c: Vec<F>) -> Self {
        let mut s = USeries { c, prec: None };
        s.trim();
        s
    }

    pub fn with_prec(c: Vec<F>, prec: usize) -> Self {
        let mut s = USeries {
            c,
            prec: Some(prec),
        };
        s.trim();
        s
    }

    pub fn zero() -> Self {
        USeries::exact(Vec::new())
    }

    pub fn one() -> Self {
        USeries::exact(vec![F::one()])
    }

    /// `c * s^k`, exact.
    pub fn monomial(c: F, k: usize) -> Self {
        let mut v = vec![F::zero(); k + 1];
        v[k] = c;
        USeries::exact(v)
    }

    fn trim(&mut self) {
        if let Some(p) = self.prec {
            self.c.truncate(p);
        }
        while self.c.last().is_some_and(|x| x.is_zero()) {
            self.c.pop();
        }
    }

    pub fn prec(&self) -> Option<usize> {
        self.prec
    }

    pub fn coeffs(&self) -> &[F] {
        &self.c
    }

    /// Coefficient of `s^i`; `None` when beyond the precision.
    pub fn coeff(&self, i: usize) -> Option<F> {
        if self.prec.is_some_and(|p| i >= p) {
            return None;
        }
        Some(self.c.get(i).cloned().unwrap_or_else(F::zero))
    }

    /// Lowest exponent with a nonzero known coefficient.
    pub fn order(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero())
    }

    /// Order, or the precision if nothing is known to be nonzero.
    fn order_bound(&self) -> Option<usize> {
        self.order().or(self.prec)
    }

    pub fn is_known_zero(&self) -> bool {
        self.prec.is_none() && self.order().is_none()
    }

    pub fn truncate(&self, prec: usize) -> Self {
        USeries::with_prec(self.c.clone(), self.prec.map_or(prec, |p| p.min(prec)))
    }

    pub fn add(&self, o: &Self) -> Self {
        let prec = min_prec(self.prec, o.prec);
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| {
                let a = self.c.get(i).cloned().unwrap_or_else(F::zero);
                let b = o.c.get(i).cloned().unwrap_or_else(F::zero);
                a + b
            })
            .collect();
        USeries { c, prec }.trimmed()
    }

    pub fn neg(&self) -> Self {
        USeries {
            c: self.c.iter().map(|x| -x.clone()).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &F) -> Self {
        USeries {
            c: self.c.iter().map(|x| x.clone() * k.clone()).collect(),
            prec: self.prec,
        }
        .trimmed()
    }

    fn trimmed(mut self) -> Self {
        self.trim();
        self
    }

    pub fn mul(&self, o: &Self) -> Self {
        // a zero exact factor makes the product exactly zero
        if self.is_known_zero() || o.is_known_zero() {
            return USeries::zero();
        }
        let prec = min_prec(
            add_prec(self.prec, o.order_bound().unwrap_or(0)),
            add_prec(o.prec, self.order_bound().unwrap_or(0)),
        );
        let len = self.c.len() + o.c.len();
        let len = prec.map_or(len, |p| p.min(len));
        let mut c = vec![F::zero(); len];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                c[i + j] = c[i + j].clone() + a.clone() * b.clone();
            }
        }
        USeries { c, prec }.trimmed()
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = USeries::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Inverse of a series with nonzero constant term.
    pub fn inverse(&self) -> Option<Self> {
        let c0 = self.coeff(0)?;
        if c0.is_zero() {
            return None;
        }
        let prec = self.prec?;
        let inv0 = F::one() / c0;
        let mut out = vec![F::zero(); prec];
        out[0] = inv0.clone();
        for n in 1..prec {
            let mut acc = F::zero();
            for k in 1..=n {
                if let Some(a) = self.c.get(k) {
                    acc = acc + a.clone() * out[n - k].clone();
                }
            }
            out[n] = -(acc * inv0.clone());
        }
        Some(USeries::with_prec(out, prec))
    }

    /// `self(inner)` for `inner` without constant term.
    pub fn compose(&self, inner: &Self) -> Self {
        debug_assert!(inner.coeff(0).is_none_or(|c| c.is_zero()));
        let mut acc = USeries::zero();
        let ord_in = inner.order_bound().unwrap_or(usize::MAX).max(1);
        for c in self.c.iter().rev() {
            acc = acc.mul(inner).add(&USeries::exact(vec![c.clone()]));
        }
        // unknown tail of self contributes at order prec * ord(inner)
        if let Some(p) = self.prec {
            let bound = p.saturating_mul(ord_in);
            acc = acc.truncate(bound);
        }
        acc
    }

    /// `(1 + w)^(1/q)` for `w` without constant term.
    pub fn one_plus_root(w: &Self, q: u32) -> Self {
        let r = F::one() / F::from_i64(q as i64);
        // binomial coefficients binom(r, k)
        let ord = w.order_bound().unwrap_or(usize::MAX).max(1);
        let terms = w.prec.map_or(64, |p| p / ord + 1).min(256);
        let mut acc = USeries::one();
        let mut wk = USeries::one();
        let mut binom = F::one();
        for k in 1..=terms {
            wk = wk.mul(w);
            if wk.is_known_zero() {
                break;
            }
            binom = binom * (r.clone() - F::from_i64(k as i64 - 1)) / F::from_i64(k as i64);
            acc = acc.add(&wk.scale(&binom));
        }
        acc
    }

    /// Given `self = s * unit(s)`, returns `s` as a series in the value of
    /// `self`.
    pub fn revert(&self) -> Option<Self> {
        let c1 = self.coeff(1)?;
        if c1.is_zero() || !self.coeff(0)?.is_zero() {
            return None;
        }
        let prec = self.prec.unwrap_or(self.c.len() + 1);
        let v = USeries::with_prec(vec![F::zero(), F::one()], prec);
        // s = v / unit(s), iterated; each pass fixes one more coefficient
        let unit = USeries::with_prec(self.c.iter().skip(1).cloned().collect(), prec - 1);
        let unit_inv_prec = prec;
        let mut s = v.scale(&(F::one() / c1));
        for _ in 0..prec {
            let u = unit.compose(&s).truncate(unit_inv_prec);
            let next = v.mul(&u.inverse()?).truncate(prec);
            if next == s {
                break;
            }
            s = next;
        }
        Some(s)
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> USeries<G> {
        let mut s = USeries {
            c: self.c.iter().map(f).collect(),
            prec: self.prec,
        };
        s.trim();
        s
    }
}

/// Evaluates a bivariate series at `(xi(s), t(s))`, accounting for the
/// unknown monomials beyond its truncation bound.
pub fn eval_series2<F: Field>(f: &Series2, xi: &USeries<F>, t: &USeries<F>) -> USeries<F> {
    let ox = xi.order_bound().unwrap_or(usize::MAX).max(1);
    let ot = t.order_bound().unwrap_or(usize::MAX).max(1);
    let max_i = f.terms().map(|(m, _)| m.xi).max().unwrap_or(0) as usize;
    let max_j = f.terms().map(|(m, _)| m.t).max().unwrap_or(0) as usize;
    let mut xp = vec![USeries::one()];
    for k in 0..max_i {
        let next = xp[k].mul(xi);
        xp.push(next);
    }
    let mut tp = vec![USeries::one()];
    for k in 0..max_j {
        let next = tp[k].mul(t);
        tp.push(next);
    }
    let mut acc = USeries::zero();
    for (m, c) in f.terms() {
        let term = xp[m.xi as usize]
            .mul(&tp[m.t as usize])
            .scale(&F::from_rat(c));
        acc = acc.add(&term);
    }
    // lowest possible order of a monomial outside the bound
    let unknown = match f.truncation() {
        Truncation::TotalDegree(n) => (n as usize + 1).saturating_mul(ox.min(ot)),
        Truncation::Weighted(w, n) => {
            let per_unit = (ox as f64 / w.a as f64).min(ot as f64 / w.b as f64);
            ((n as f64 + 1.0) * per_unit).ceil() as usize
        }
    };
    acc.truncate(unknown)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{int, rat, Coefficient};

    type S = USeries<Coefficient>;

    fn ex(v: &[i64]) -> S {
        S::exact(v.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn mul_tracks_precision() {
        let a = S::with_prec(vec![int(0), int(1)], 5);
        let b = S::with_prec(vec![int(0), int(0), int(1)], 4);
        let p = a.mul(&b);
        // a = s + O(s^5), b = s^2 + O(s^4): product known below s^5
        assert_eq!(p.prec(), Some(5));
        assert_eq!(p.coeff(3), Some(int(1)));
    }

    #[test]
    fn inverse_and_revert() {
        let u = S::with_prec(vec![int(1), int(1)], 6);
        let inv = u.inverse().unwrap();
        assert_eq!(inv.coeffs(), &[int(1), int(-1), int(1), int(-1), int(1), int(-1)]);
        // x = s + s^2  =>  s = x - x^2 + 2x^3 - 5x^4 + ...
        let x = S::with_prec(vec![int(0), int(1), int(1)], 6);
        let r = x.revert().unwrap();
        assert_eq!(r.coeffs(), &[int(0), int(1), int(-1), int(2), int(-5), int(14)]);
    }

    #[test]
    fn root_series() {
        let w = S::with_prec(vec![int(0), int(1)], 4);
        let r = S::one_plus_root(&w, 2);
        assert_eq!(r.coeffs(), &[int(1), rat(1, 2), rat(-1, 8), rat(1, 16)]);
        let sq = r.mul(&r);
        assert_eq!(sq.coeffs(), &[int(1), int(1)]);
    }

    #[test]
    fn compose_exact() {
        let f = ex(&[0, 1, 1]);
        let g = ex(&[0, 2]);
        assert_eq!(f.compose(&g), ex(&[0, 2, 4]));
    }

    #[test]
    fn eval_bivariate_precision() {
        let f = Series2::from_ints(&[(1, 2, 1)], Truncation::TotalDegree(4));
        let xi = ex(&[0, 1]);
        let t = ex(&[0, 2]);
        let v = eval_series2(&f, &xi, &t);
        assert_eq!(v.coeff(3), Some(int(4)));
        assert_eq!(v.prec(), Some(5));
    }
}

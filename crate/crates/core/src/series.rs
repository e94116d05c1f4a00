//! Exact truncated power series in the two source variables `xi` and `t`.
//!
//! Every [`Series2`] carries its own truncation bound. Binary operations
//! refuse to mix bounds; use [`Series2::retruncate`] to convert explicitly.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::SeriesError;

/// Exact rational coefficient, always in lowest terms with positive denominator.
pub type Coefficient = BigRational;

/// Default total-degree truncation for parsed families.
pub const DEFAULT_TRUNCATION: u32 = 16;

pub fn rat(n: i64, d: i64) -> Coefficient {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Coefficient {
    BigRational::from_integer(BigInt::from(n))
}

/// Renders a rational as `p` or `p/q`.
pub fn rat_to_string(r: &Coefficient) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_from_str(s: &str) -> Option<Coefficient> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

pub(crate) fn ser_rat<S: serde::Serializer>(r: &Coefficient, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rat_to_string(r))
}

pub(crate) fn ser_rat_vec<S: serde::Serializer>(v: &[Coefficient], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for r in v {
        seq.serialize_element(&rat_to_string(r))?;
    }
    seq.end()
}

pub fn rat_to_f64(r: &Coefficient) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator and denominator both overflow f64
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
        let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Quasihomogeneous weights: `deg(xi) = a`, `deg(t) = b`, with `gcd(a, b) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Weighting {
    pub a: u32,
    pub b: u32,
}

impl Weighting {
    pub fn new(a: u32, b: u32) -> Result<Self, SeriesError> {
        if a == 0 || b == 0 || a.gcd(&b) != 1 {
            return Err(SeriesError::InvalidWeighting(a, b));
        }
        Ok(Weighting { a, b })
    }

    pub fn degree(&self, m: Mono) -> u32 {
        self.a * m.xi + self.b * m.t
    }
}

/// Exponent pair `xi^xi * t^t`.
///
/// Ordered graded-lexicographically: by total degree, then higher `xi`
/// power first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mono {
    pub xi: u32,
    pub t: u32,
}

impl Mono {
    pub const ONE: Mono = Mono { xi: 0, t: 0 };

    pub const fn new(xi: u32, t: u32) -> Self {
        Mono { xi, t }
    }

    pub fn degree(&self) -> u32 {
        self.xi + self.t
    }

    pub fn mul(self, other: Mono) -> Mono {
        Mono::new(self.xi + other.xi, self.t + other.t)
    }

    /// `t^2*xi`, `xi^3`, `1`.
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        match self.t {
            0 => {}
            1 => parts.push("t".to_string()),
            e => parts.push(format!("t^{e}")),
        }
        match self.xi {
            0 => {}
            1 => parts.push("xi".to_string()),
            e => parts.push(format!("xi^{e}")),
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.xi.cmp(&self.xi))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Truncation bound of a [`Series2`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Truncation {
    /// Keeps monomials with `i + j <= N`.
    TotalDegree(u32),
    /// Keeps monomials with `a*i + b*j <= N`.
    Weighted(Weighting, u32),
}

impl Truncation {
    pub fn admits(&self, m: Mono) -> bool {
        match *self {
            Truncation::TotalDegree(n) => m.degree() <= n,
            Truncation::Weighted(w, n) => w.degree(m) <= n,
        }
    }

    /// Degree of `m` in this filtration.
    pub fn degree_of(&self, m: Mono) -> u32 {
        match *self {
            Truncation::TotalDegree(_) => m.degree(),
            Truncation::Weighted(w, _) => w.degree(m),
        }
    }

    pub fn bound(&self) -> u32 {
        match *self {
            Truncation::TotalDegree(n) | Truncation::Weighted(_, n) => n,
        }
    }

    pub fn with_bound(&self, n: u32) -> Truncation {
        match *self {
            Truncation::TotalDegree(_) => Truncation::TotalDegree(n),
            Truncation::Weighted(w, _) => Truncation::Weighted(w, n),
        }
    }

    /// Weight of the variable in this filtration.
    pub fn var_weight(&self, var: Var) -> u32 {
        match (*self, var) {
            (Truncation::TotalDegree(_), _) => 1,
            (Truncation::Weighted(w, _), Var::Xi) => w.a,
            (Truncation::Weighted(w, _), Var::T) => w.b,
        }
    }

    /// True if every monomial admitted by `self` is admitted by `other`.
    pub fn is_within(&self, other: &Truncation) -> bool {
        // a monomial lattice region is covered iff its extreme points are
        let extremes: Vec<Mono> = match *self {
            Truncation::TotalDegree(n) => vec![Mono::new(n, 0), Mono::new(0, n)],
            Truncation::Weighted(w, n) => vec![Mono::new(n / w.a, 0), Mono::new(0, n / w.b)],
        };
        match *other {
            Truncation::TotalDegree(_) | Truncation::Weighted(..) => {
                // both regions are down-closed triangles; check all monomials on
                // the boundary of self
                let (mx, mt) = (extremes[0].xi, extremes[1].t);
                (0..=mx).all(|i| {
                    let top = (0..=mt).rev().find(|&j| self.admits(Mono::new(i, j)));
                    top.is_none_or(|j| other.admits(Mono::new(i, j)))
                })
            }
        }
    }

    /// Monomials admitted by the bound, in graded-lex order.
    pub fn monomials(&self) -> Vec<Mono> {
        let n = self.bound();
        let mut out: Vec<Mono> = (0..=n)
            .flat_map(|i| (0..=n).map(move |j| Mono::new(i, j)))
            .filter(|m| self.admits(*m))
            .collect();
        out.sort();
        out
    }
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truncation::TotalDegree(n) => write!(f, "total degree {n}"),
            Truncation::Weighted(w, n) => write!(f, "weighted ({},{}) degree {n}", w.a, w.b),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Var {
    Xi,
    T,
}

/// Exact truncated bivariate power series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series2 {
    terms: BTreeMap<Mono, Coefficient>,
    trunc: Truncation,
}

impl Series2 {
    pub fn zero(trunc: Truncation) -> Self {
        Series2 {
            terms: BTreeMap::new(),
            trunc,
        }
    }

    pub fn constant(c: Coefficient, trunc: Truncation) -> Self {
        Self::from_terms([(Mono::ONE, c)], trunc)
    }

    pub fn one(trunc: Truncation) -> Self {
        Self::constant(Coefficient::one(), trunc)
    }

    pub fn xi(trunc: Truncation) -> Self {
        Self::monomial(Mono::new(1, 0), Coefficient::one(), trunc)
    }

    pub fn t(trunc: Truncation) -> Self {
        Self::monomial(Mono::new(0, 1), Coefficient::one(), trunc)
    }

    pub fn monomial(m: Mono, c: Coefficient, trunc: Truncation) -> Self {
        Self::from_terms([(m, c)], trunc)
    }

    /// Builds a series, summing repeated monomials and dropping anything
    /// outside the bound.
    pub fn from_terms<I>(terms: I, trunc: Truncation) -> Self
    where
        I: IntoIterator<Item = (Mono, Coefficient)>,
    {
        let mut s = Series2::zero(trunc);
        for (m, c) in terms {
            s.add_term(m, c);
        }
        s
    }

    /// Integer-coefficient shorthand used by tests and the catalog:
    /// `[(xi_exp, t_exp, coeff)]`.
    pub fn from_ints(terms: &[(u32, u32, i64)], trunc: Truncation) -> Self {
        Self::from_terms(
            terms.iter().map(|&(i, j, c)| (Mono::new(i, j), int(c))),
            trunc,
        )
    }

    pub(crate) fn add_term(&mut self, m: Mono, c: Coefficient) {
        if c.is_zero() || !self.trunc.admits(m) {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Coefficient::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Mono) -> Coefficient {
        self.terms.get(&m).cloned().unwrap_or_else(Coefficient::zero)
    }

    pub fn coeff_ij(&self, xi: u32, t: u32) -> Coefficient {
        self.coeff(Mono::new(xi, t))
    }

    /// Terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (Mono, &Coefficient)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn constant_term(&self) -> Coefficient {
        self.coeff(Mono::ONE)
    }

    /// Lowest degree (in the series' own filtration) of a nonzero term.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|m| self.trunc.degree_of(*m)).min()
    }

    /// Lowest `t` exponent, if any term is present.
    pub fn t_order(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.t).min()
    }

    fn check_same(&self, other: &Series2) -> Result<(), SeriesError> {
        if self.trunc != other.trunc {
            return Err(SeriesError::TruncationMismatch(self.trunc, other.trunc));
        }
        Ok(())
    }

    pub fn add(&self, other: &Series2) -> Result<Series2, SeriesError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Series2) -> Result<Series2, SeriesError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Series2 {
        self.scale(&-Coefficient::one())
    }

    pub fn scale(&self, c: &Coefficient) -> Series2 {
        if c.is_zero() {
            return Series2::zero(self.trunc);
        }
        Series2 {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
            trunc: self.trunc,
        }
    }

    /// Cauchy product truncated to the shared bound.
    pub fn mul(&self, other: &Series2) -> Result<Series2, SeriesError> {
        self.check_same(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Series2) -> Series2 {
        if self.terms.is_empty() || other.terms.is_empty() {
            return Series2::zero(self.trunc);
        }
        // integer numerators over one common denominator per operand
        let (na, da) = common_denominator(&self.terms);
        let (nb, db) = common_denominator(&other.terms);
        let bound = self.trunc.bound() as usize;
        let stride = bound + 1;
        let mut acc: Vec<BigInt> = vec![BigInt::zero(); stride * stride];
        let mut used = vec![false; stride * stride];
        for (ma, ca) in &na {
            for (mb, cb) in &nb {
                let m = ma.mul(*mb);
                if !self.trunc.admits(m) {
                    continue;
                }
                let idx = m.xi as usize * stride + m.t as usize;
                acc[idx] += ca * cb;
                used[idx] = true;
            }
        }
        let den = da * db;
        let mut terms = BTreeMap::new();
        for (idx, num) in acc.into_iter().enumerate() {
            if !used[idx] || num.is_zero() {
                continue;
            }
            let m = Mono::new((idx / stride) as u32, (idx % stride) as u32);
            terms.insert(m, BigRational::new(num, den.clone()));
        }
        Series2 {
            terms,
            trunc: self.trunc,
        }
    }

    pub fn pow(&self, e: u32) -> Series2 {
        let mut result = Series2::one(self.trunc);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        result
    }

    /// Multiplicative inverse of a series with nonzero constant term.
    pub fn inverse_unit(&self) -> Result<Series2, SeriesError> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(SeriesError::NotUnit);
        }
        let one = Series2::one(self.trunc);
        let two = Series2::constant(int(2), self.trunc);
        let mut y = Series2::constant(c0.recip(), self.trunc);
        // Newton steps double the number of correct degrees
        let mut correct = 1u32;
        while correct <= self.trunc.bound() {
            let uy = self.mul_unchecked(&y);
            if uy == one {
                break;
            }
            y = y.mul_unchecked(&two.sub(&uy)?);
            correct *= 2;
        }
        Ok(y)
    }

    /// Formal partial derivative; the bound drops by the variable's weight.
    pub fn diff(&self, var: Var) -> Series2 {
        let w = self.trunc.var_weight(var);
        let trunc = self.trunc.with_bound(self.trunc.bound().saturating_sub(w));
        let mut out = Series2::zero(trunc);
        if self.trunc.bound() < w {
            return out;
        }
        for (m, c) in &self.terms {
            let (e, dm) = match var {
                Var::Xi if m.xi > 0 => (m.xi, Mono::new(m.xi - 1, m.t)),
                Var::T if m.t > 0 => (m.t, Mono::new(m.xi, m.t - 1)),
                _ => continue,
            };
            out.add_term(dm, c * int(e as i64));
        }
        out
    }

    /// Divides by `t^k`; fails unless `t^k` divides every term.
    pub fn div_t_pow(&self, k: u32) -> Result<Series2, SeriesError> {
        let w = self.trunc.var_weight(Var::T) * k;
        let trunc = self
            .trunc
            .with_bound(self.trunc.bound().checked_sub(w).ok_or(SeriesError::NotDivisible)?);
        let mut out = Series2::zero(trunc);
        for (m, c) in &self.terms {
            if m.t < k {
                return Err(SeriesError::NotDivisible);
            }
            out.add_term(Mono::new(m.xi, m.t - k), c.clone());
        }
        Ok(out)
    }

    /// Multiplies by `t^k` within the same bound.
    pub fn mul_t_pow(&self, k: u32) -> Series2 {
        let mut out = Series2::zero(self.trunc);
        for (m, c) in &self.terms {
            out.add_term(Mono::new(m.xi, m.t + k), c.clone());
        }
        out
    }

    /// `a(u, v)` for `u`, `v` without constant term, all sharing one bound.
    pub fn substitute(&self, u: &Series2, v: &Series2) -> Result<Series2, SeriesError> {
        self.check_same(u)?;
        self.check_same(v)?;
        if !u.constant_term().is_zero() || !v.constant_term().is_zero() {
            return Err(SeriesError::NonZeroConstant);
        }
        Ok(self.compose(u, v))
    }

    /// `a(u, v)` computed in the truncation of `u` (and `v`), ignoring the
    /// bound of `self`. Exact when `u` and `v` have order at least the
    /// weights of `xi` and `t` in that truncation.
    pub fn compose(&self, u: &Series2, v: &Series2) -> Series2 {
        let trunc = u.trunc;
        if self.is_zero() {
            return Series2::zero(trunc);
        }
        let max_xi = self.terms.keys().map(|m| m.xi).max().unwrap_or(0);
        let max_t = self.terms.keys().map(|m| m.t).max().unwrap_or(0);
        let mut vpows = Vec::with_capacity(max_t as usize + 1);
        vpows.push(Series2::one(trunc));
        for k in 1..=max_t as usize {
            let next = vpows[k - 1].mul_unchecked(v);
            vpows.push(next);
        }
        let vpows: Vec<_> = vpows.iter().map(|p| common_denominator(&p.terms)).collect();
        // Horner in u over the xi exponent
        let mut acc = Series2::zero(trunc);
        for i in (0..=max_xi).rev() {
            acc = acc.mul_unchecked(u);
            let row: Vec<(&Coefficient, &(Vec<(Mono, BigInt)>, BigInt))> = self
                .terms
                .iter()
                .filter(|(m, _)| m.xi == i)
                .map(|(m, c)| (c, &vpows[m.t as usize]))
                .collect();
            if !row.is_empty() {
                let part = lincomb(&row, trunc);
                acc = acc.add(&part).expect("same truncation");
            }
        }
        acc
    }

    /// Keeps exactly the terms with `a*i + b*j <= d`.
    pub fn weighted_jet(&self, w: Weighting, d: u32) -> Series2 {
        Series2 {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| w.degree(**m) <= d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
            trunc: self.trunc,
        }
    }

    /// Terms of exact degree `d` in the filtration of `trunc`.
    pub fn homogeneous_part(&self, d: u32) -> Series2 {
        Series2 {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| self.trunc.degree_of(**m) == d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
            trunc: self.trunc,
        }
    }

    /// Changes the truncation bound. Fails when the new bound admits a
    /// monomial that the current bound does not, since its coefficient is
    /// unknown.
    pub fn retruncate(&self, trunc: Truncation) -> Result<Series2, SeriesError> {
        if !trunc.is_within(&self.trunc) {
            return Err(SeriesError::TruncationMismatch(self.trunc, trunc));
        }
        Ok(self.retruncate_unchecked(trunc))
    }

    /// Changes the bound without the coverage check; polynomial inputs
    /// are treated as exact.
    pub fn retruncate_unchecked(&self, trunc: Truncation) -> Series2 {
        Series2::from_terms(
            self.terms.iter().map(|(m, c)| (*m, c.clone())),
            trunc,
        )
    }

    /// Restriction `t = 0`, as a series in `xi` (stored with `t` exponent 0).
    pub fn at_t_zero(&self) -> Series2 {
        Series2 {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.t == 0)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
            trunc: self.trunc,
        }
    }

    /// Restriction `xi = 0`.
    pub fn at_xi_zero(&self) -> Series2 {
        Series2 {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.xi == 0)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
            trunc: self.trunc,
        }
    }

    pub fn eval_f64(&self, xi: f64, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| rat_to_f64(c) * xi.powi(m.xi as i32) * t.powi(m.t as i32))
            .sum()
    }

    /// Numeric version of the polynomial for fast repeated evaluation.
    pub fn to_f64_terms(&self) -> Vec<(u32, u32, f64)> {
        self.terms
            .iter()
            .map(|(m, c)| (m.xi, m.t, rat_to_f64(c)))
            .collect()
    }

    pub fn newton_support(&self) -> Result<NewtonSupport, SeriesError> {
        NewtonSupport::of(self)
    }
}

impl fmt::Display for Series2 {
    /// Canonical text: `t^2*xi + t^4 - 1/2*t^5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if *m == Mono::ONE {
                write!(f, "{}", rat_to_string(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", m.render())?;
            } else {
                write!(f, "{}*{}", rat_to_string(&abs), m.render())?;
            }
        }
        Ok(())
    }
}

fn common_denominator(terms: &BTreeMap<Mono, Coefficient>) -> (Vec<(Mono, BigInt)>, BigInt) {
    let den = terms
        .values()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let nums = terms
        .iter()
        .map(|(m, c)| (*m, c.numer() * (&den / c.denom())))
        .collect();
    (nums, den)
}

/// `sum c_k * s_k` with each `s_k` given as integer numerators over a
/// denominator.
fn lincomb(parts: &[(&Coefficient, &(Vec<(Mono, BigInt)>, BigInt))], trunc: Truncation) -> Series2 {
    let big_d = parts
        .iter()
        .fold(BigInt::one(), |acc, (c, (_, d))| acc.lcm(&(d * c.denom())));
    let mut acc: BTreeMap<Mono, BigInt> = BTreeMap::new();
    for (c, (nums, d)) in parts {
        let factor = c.numer() * (&big_d / (d * c.denom()));
        for (m, n) in nums {
            *acc.entry(*m).or_insert_with(BigInt::zero) += &factor * n;
        }
    }
    Series2 {
        terms: acc
            .into_iter()
            .filter(|(m, n)| !n.is_zero() && trunc.admits(*m))
            .map(|(m, n)| (m, BigRational::new(n, big_d.clone())))
            .collect(),
        trunc,
    }
}

/// Segment of the lower-left Newton boundary, between two support points
/// given as `(xi exponent, t exponent)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonSegment {
    pub start: (u32, u32),
    pub end: (u32, u32),
    /// `dt/dxi` of the segment in the exponent plane (negative).
    #[serde(serialize_with = "ser_rat")]
    pub slope: Coefficient,
    /// Number of lattice steps along the segment.
    pub lattice_length: u32,
}

/// Support and lower-left convex hull of a nonzero series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonSupport {
    pub points: Vec<(u32, u32)>,
    pub vertices: Vec<(u32, u32)>,
    /// Ordered by decreasing slope.
    pub segments: Vec<NewtonSegment>,
}

impl NewtonSupport {
    pub fn of(s: &Series2) -> Result<Self, SeriesError> {
        if s.is_zero() {
            return Err(SeriesError::EmptySupport);
        }
        let mut points: Vec<(u32, u32)> = s.terms.keys().map(|m| (m.xi, m.t)).collect();
        points.sort();
        let vertices = lower_left_hull(&points);
        let mut segments: Vec<NewtonSegment> = vertices
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let di = (b.0 - a.0) as i64;
                let dj = a.1 as i64 - b.1 as i64;
                NewtonSegment {
                    start: a,
                    end: b,
                    slope: rat(-dj, di),
                    lattice_length: (di as u64).gcd(&(dj as u64)) as u32,
                }
            })
            .collect();
        segments.sort_by(|x, y| y.slope.cmp(&x.slope).then(x.start.1.cmp(&y.start.1)));
        Ok(NewtonSupport {
            points,
            vertices,
            segments,
        })
    }
}

/// Vertices of the compact faces of `conv(points + R_{>=0}^2)`, from the
/// vertex with least first coordinate to the one with least second.
pub(crate) fn lower_left_hull(points: &[(u32, u32)]) -> Vec<(u32, u32)> {
    let mut best: BTreeMap<u32, u32> = BTreeMap::new();
    for &(i, j) in points {
        best.entry(i).and_modify(|v| *v = (*v).min(j)).or_insert(j);
    }
    // keep only points strictly decreasing in j as i grows
    let mut staircase: Vec<(u32, u32)> = Vec::new();
    for (i, j) in best {
        if staircase.last().is_none_or(|&(_, pj)| j < pj) {
            staircase.push((i, j));
        }
    }
    let cross = |o: (u32, u32), a: (u32, u32), b: (u32, u32)| -> i64 {
        (a.0 as i64 - o.0 as i64) * (b.1 as i64 - o.1 as i64)
            - (a.1 as i64 - o.1 as i64) * (b.0 as i64 - o.0 as i64)
    };
    let mut hull: Vec<(u32, u32)> = Vec::new();
    for p in staircase {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull
}

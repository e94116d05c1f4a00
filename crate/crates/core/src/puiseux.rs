//! Newton–Puiseux branches `t = t(xi)` of a truncated bivariate series and
//! order invariants of parameterized plane branches.
//!
//! A branch is returned in parametric form `xi = scale * s^Q`,
//! `t = sum c_k s^k`. Coefficients stay exact while every edge polynomial
//! root met along the way is rational; otherwise the branch continues in
//! complex floating point and is flagged `numeric`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::PuiseuxError;
use crate::field::{Field, NUMERIC_ZERO};
use crate::poly::Poly;
use crate::series::{lower_left_hull, rat_to_string, Coefficient, NewtonSegment, Series2, Truncation};
use crate::univariate::USeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchField {
    Real,
    Complex,
}

/// A branch coefficient.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Coefficient),
    Numeric(Complex64),
}

impl Value {
    pub fn to_c64(&self) -> Complex64 {
        match self {
            Value::Exact(r) => r.to_c64(),
            Value::Numeric(z) => *z,
        }
    }

    pub fn exact(&self) -> Option<&Coefficient> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Numeric(_) => None,
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Exact(r) => s.serialize_str(&rat_to_string(r)),
            Value::Numeric(z) => [z.re, z.im].serialize(s),
        }
    }
}

trait SolverField: Field {
    fn value(&self) -> Value;
    fn edge_roots(e: &[Self], field: BranchField) -> Vec<EdgeRoot<Self>>;
    fn to_complex(&self) -> Complex64;
    fn magnitude(&self) -> f64;
}

enum EdgeRoot<F> {
    InField(F, u32),
    Numeric(Complex64, u32),
    Unresolved(String, u32),
}

impl SolverField for Coefficient {
    fn value(&self) -> Value {
        Value::Exact(self.clone())
    }

    fn edge_roots(e: &[Self], field: BranchField) -> Vec<EdgeRoot<Self>> {
        let poly = Poly::new(e.to_vec());
        let (rational, rest) = poly.rational_roots();
        let mut out: Vec<EdgeRoot<Self>> = rational
            .into_iter()
            .map(|(w, m)| EdgeRoot::InField(w, m as u32))
            .collect();
        for (factor, m) in rest {
            let mut roots = factor.numeric_roots();
            roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
            for z in roots {
                let real = z.im.abs() <= 1e-9 * z.norm().max(1.0);
                match (real, field) {
                    (true, _) => out.push(EdgeRoot::Numeric(Complex64::new(z.re, 0.0), m as u32)),
                    (false, BranchField::Complex) => out.push(EdgeRoot::Numeric(z, m as u32)),
                    (false, BranchField::Real) if z.im > 0.0 => {
                        out.push(EdgeRoot::Unresolved(poly_text(&factor), m as u32))
                    }
                    _ => {}
                }
            }
        }
        dedup_unresolved(out)
    }

    fn to_complex(&self) -> Complex64 {
        self.to_c64()
    }

    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }
}

fn dedup_unresolved<F>(v: Vec<EdgeRoot<F>>) -> Vec<EdgeRoot<F>> {
    let mut seen: Vec<String> = Vec::new();
    v.into_iter()
        .filter(|r| match r {
            EdgeRoot::Unresolved(s, _) => {
                if seen.contains(s) {
                    false
                } else {
                    seen.push(s.clone());
                    true
                }
            }
            _ => true,
        })
        .collect()
}

impl SolverField for Complex64 {
    fn value(&self) -> Value {
        Value::Numeric(*self)
    }

    fn edge_roots(e: &[Self], field: BranchField) -> Vec<EdgeRoot<Self>> {
        let roots = complex_poly_roots(e);
        // cluster numerically coincident roots
        let mut clusters: Vec<(Complex64, u32)> = Vec::new();
        for z in roots {
            match clusters
                .iter_mut()
                .find(|(c, _)| (*c - z).norm() <= 1e-6 * z.norm().max(1.0))
            {
                Some(c) => {
                    c.0 = (c.0 * c.1 as f64 + z) / (c.1 as f64 + 1.0);
                    c.1 += 1;
                }
                None => clusters.push((z, 1)),
            }
        }
        clusters.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
        let mut out = Vec::new();
        for (z, m) in clusters {
            let real = z.im.abs() <= 1e-8 * z.norm().max(1.0);
            match (real, field) {
                (true, _) => out.push(EdgeRoot::InField(Complex64::new(z.re, 0.0), m)),
                (false, BranchField::Complex) => out.push(EdgeRoot::InField(z, m)),
                (false, BranchField::Real) if z.im > 0.0 => {
                    out.push(EdgeRoot::Unresolved(format!("complex pair {:.6}±{:.6}i", z.re, z.im), m))
                }
                _ => {}
            }
        }
        out
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Roots of `sum e[k] w^k` via the complex Schur form of the companion matrix.
fn complex_poly_roots(e: &[Complex64]) -> Vec<Complex64> {
    let n = e.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = e[n];
    let mut comp = nalgebra::DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -e[i] / lead;
    }
    let schur = nalgebra::linalg::Schur::new(comp);
    let (_, t) = schur.unpack();
    let eval = |z: Complex64| e.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c);
    let deval = |z: Complex64| {
        e.iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (k, c)| acc * z + c * k as f64)
    };
    (0..n)
        .map(|i| {
            let mut z = t[(i, i)];
            for _ in 0..50 {
                let d = deval(z);
                if d.norm() == 0.0 {
                    break;
                }
                let step = eval(z) / d;
                z -= step;
                if step.norm() <= 1e-16 * z.norm().max(1.0) {
                    break;
                }
            }
            z
        })
        .collect()
}

fn poly_text(p: &Poly) -> String {
    let mut parts = Vec::new();
    for (k, c) in p.coeffs().iter().enumerate().rev() {
        if Zero::is_zero(c) {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => "w".to_string(),
            _ => format!("w^{k}"),
        };
        parts.push(match (mono.is_empty(), c == &Coefficient::from_integer(1.into())) {
            (true, _) => rat_to_string(c),
            (false, true) => mono,
            (false, false) => format!("{}*{}", rat_to_string(c), mono),
        });
    }
    parts.join(" + ").replace("+ -", "- ")
}

/// One branch, or cluster of branches, of `g = 0` through the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxBranch {
    /// `Q` in `xi = scale * s^Q`.
    pub ramification: u32,
    pub scale: Value,
    /// `(k, c_k)` with `t = sum c_k s^k`, increasing `k`.
    pub terms: Vec<(u32, Value)>,
    /// Terms with exponent at most this (in `s`) are exact.
    pub trunc_order: Rational64,
    /// Number of coincident roots `t(xi)` represented; more than one means
    /// the cluster did not separate within the truncation.
    pub multiplicity: u32,
    pub field: BranchField,
    pub numeric: bool,
    /// Irreducible factor whose complex roots continue this branch; set for
    /// conjugate pairs over the reals.
    pub unresolved: Option<String>,
    /// `g(xi(s), t(s))` computed from the stored terms has `s`-order at
    /// least this.
    pub vanishing_order: u32,
}

impl Serialize for PuiseuxBranch {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            exp: String,
            coeff: &'a Value,
        }
        let q = self.ramification as i64;
        let terms: Vec<Term> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let e = Rational64::new(*k as i64, q);
                Term {
                    exp: if e.is_integer() {
                        e.numer().to_string()
                    } else {
                        format!("{}/{}", e.numer(), e.denom())
                    },
                    coeff: c,
                }
            })
            .collect();
        let mut st = s.serialize_struct("PuiseuxBranch", 8)?;
        st.serialize_field("ramification", &self.ramification)?;
        st.serialize_field("scale", &self.scale)?;
        st.serialize_field("terms", &terms)?;
        st.serialize_field(
            "truncOrder",
            &format!("{}/{}", self.trunc_order.numer(), self.trunc_order.denom()),
        )?;
        st.serialize_field("multiplicity", &self.multiplicity)?;
        st.serialize_field("field", &self.field)?;
        st.serialize_field("numeric", &self.numeric)?;
        st.serialize_field("unresolved", &self.unresolved)?;
        st.end()
    }
}

impl PuiseuxBranch {
    pub fn is_exact(&self) -> bool {
        !self.numeric && self.unresolved.is_none()
    }

    /// Leading exponent of `t` as a power of `xi`, if any term is known.
    pub fn leading_exponent(&self) -> Option<Rational64> {
        self.terms
            .first()
            .map(|(k, _)| Rational64::new(*k as i64, self.ramification as i64))
    }

    /// Highest `s`-exponent whose coefficient is exact.
    pub fn exact_through(&self) -> u32 {
        self.trunc_order.floor().to_integer().max(0) as u32
    }

    fn param<F: Field>(&self, conv: impl Fn(&Value) -> F) -> (USeries<F>, USeries<F>) {
        let prec = self.exact_through() as usize + 1;
        let q = self.ramification as usize;
        let xi = USeries::monomial(conv(&self.scale), q);
        let mut c = vec![F::zero(); prec];
        for (k, v) in &self.terms {
            if (*k as usize) < prec {
                c[*k as usize] = conv(v);
            }
        }
        (xi, USeries::with_prec(c, prec))
    }

    /// `(xi(s), t(s))` over the rationals; fails for numeric branches.
    pub fn exact_param(&self) -> Result<(USeries<Coefficient>, USeries<Coefficient>), PuiseuxError> {
        if !self.is_exact() {
            return Err(PuiseuxError::NotExact);
        }
        Ok(self.param(|v| v.exact().cloned().unwrap_or_default()))
    }

    pub fn numeric_param(&self) -> (USeries<Complex64>, USeries<Complex64>) {
        self.param(|v| v.to_c64())
    }
}

/// Result of [`branches`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchSet {
    pub branches: Vec<PuiseuxBranch>,
    /// Set when part of the branch structure lies beyond the truncation.
    pub incomplete: bool,
}

impl BranchSet {
    /// Number of roots `t(xi)` accounted for, counting conjugates.
    pub fn total_multiplicity(&self) -> u32 {
        self.branches
            .iter()
            .map(|b| b.multiplicity * b.ramification * if b.unresolved.is_some() { 2 } else { 1 })
            .sum()
    }
}

#[derive(Clone, Debug)]
struct Work<F> {
    g: BTreeMap<(u32, u32), F>,
    /// Monomials with `wi*i + wj*j >= u` are unknown.
    wi: u64,
    wj: u64,
    u: u64,
    q_total: u32,
    scale: F,
    prefix: Vec<(u32, F)>,
    kappa: F,
    m: u32,
    n_total: u32,
    numeric: bool,
}

struct Ctx {
    max_terms: usize,
    field: BranchField,
}

impl<F: SolverField> Work<F> {
    fn convert<G: SolverField>(&self, f: impl Fn(&F) -> G) -> Work<G> {
        Work {
            g: self.g.iter().map(|(k, v)| (*k, f(v))).collect(),
            wi: self.wi,
            wj: self.wj,
            u: self.u,
            q_total: self.q_total,
            scale: f(&self.scale),
            prefix: self.prefix.iter().map(|(k, v)| (*k, f(v))).collect(),
            kappa: f(&self.kappa),
            m: self.m,
            n_total: self.n_total,
            numeric: true,
        }
    }

    fn clean(&mut self) {
        if F::EXACT {
            self.g.retain(|_, v| !v.is_zero());
            return;
        }
        let max = self.g.values().map(|v| v.magnitude()).fold(0.0, f64::max);
        let tol = (max * 1e-9).max(NUMERIC_ZERO);
        self.g.retain(|_, v| v.magnitude() > tol);
    }

    fn emit(&self, ctx: &Ctx, mult: u32, trunc: Rational64, vanishing: u32, unresolved: Option<String>) -> PuiseuxBranch {
        PuiseuxBranch {
            ramification: self.q_total,
            scale: self.scale.value(),
            terms: self.prefix.iter().map(|(k, v)| (*k, v.value())).collect(),
            trunc_order: trunc,
            multiplicity: mult,
            field: ctx.field,
            numeric: self.numeric,
            unresolved,
            vanishing_order: vanishing,
        }
    }
}

/// Relative size below which a numerically summed coefficient counts as
/// cancelled.
const CANCEL_TOL: f64 = 1e-9;

fn binom(n: u32, k: u32) -> i64 {
    let mut r: i64 = 1;
    for i in 0..k as i64 {
        r = r * (n as i64 - i) / (i + 1);
    }
    r
}

/// Smallest `b >= 1` with `b*q = 1 (mod p)` and `a = (b*q - 1)/p`.
fn bezout(p: u32, q: u32) -> (i64, i64) {
    let b = (1..=p).find(|b| (b * q) % p == 1 % p).expect("p, q coprime");
    let a = (b as i64 * q as i64 - 1) / p as i64;
    (a, b as i64)
}

fn solve<F: SolverField>(mut w: Work<F>, ctx: &Ctx, out: &mut Vec<PuiseuxBranch>, incomplete: &mut bool) {
    w.clean();
    let m_rat = Rational64::from_integer(w.m as i64);
    if w.g.is_empty() {
        // nothing known: the branch continues beyond the truncation
        *incomplete = true;
        out.push(w.emit(ctx, 0, m_rat, w.n_total, None));
        return;
    }
    let jmin = w.g.keys().map(|k| k.1).min().unwrap();
    if jmin > 0 {
        let i_v = w.g.keys().filter(|k| k.1 == jmin).map(|k| k.0).min().unwrap();
        let u_over = Rational64::new(w.u as i64, w.wi as i64);
        let tail = (u_over - Rational64::from_integer(i_v as i64)) / Rational64::from_integer(jmin as i64);
        let trunc = m_rat + tail.max(Rational64::zero());
        let vanish = w.n_total + u_over.ceil().to_integer().max(0) as u32;
        out.push(w.emit(ctx, jmin, trunc, vanish, None));
    }
    let points: Vec<(u32, u32)> = w.g.keys().copied().collect();
    let hull = lower_left_hull(&points);
    if hull[0].0 > 0 && w.wj > 0 {
        *incomplete = true;
    }
    for pair in hull.windows(2) {
        let ((i1, j1), (i2, j2)) = (pair[0], pair[1]);
        let (di, dj) = (i2 - i1, j1 - j2);
        let l = di.gcd(&dj);
        let (p, q) = (di / l, dj / l);
        let big_m = (q as u64) * i1 as u64 + (p as u64) * j1 as u64;
        // lowest edge value reachable by an unknown monomial
        let mut u_eff = Rational64::from_integer(i64::MAX / 4);
        if w.wi > 0 {
            u_eff = u_eff.min(Rational64::new((w.u * q as u64) as i64, w.wi as i64));
        }
        if w.wj > 0 {
            u_eff = u_eff.min(Rational64::new((w.u * p as u64) as i64, w.wj as i64));
        }
        let big_m_r = Rational64::from_integer(big_m as i64);
        if big_m_r >= u_eff {
            *incomplete = true;
            out.push(w.emit(ctx, dj, m_rat, w.n_total, None));
            continue;
        }
        let new_u = (u_eff - big_m_r).ceil().to_integer() as u64;
        let e: Vec<F> = (0..=l)
            .map(|k| {
                w.g.get(&(i2 - p * k, j2 + q * k))
                    .cloned()
                    .unwrap_or_else(F::zero)
            })
            .collect();
        for root in F::edge_roots(&e, ctx.field) {
            match root {
                EdgeRoot::InField(z, mult) => {
                    descend(&w, ctx, (p, q, big_m as u32, new_u), z, mult, out, incomplete)
                }
                EdgeRoot::Numeric(z, mult) => {
                    let wc = w.convert(|v| v.to_complex());
                    descend(&wc, ctx, (p, q, big_m as u32, new_u), z, mult, out, incomplete)
                }
                EdgeRoot::Unresolved(factor, mult) => {
                    out.push(w.emit(ctx, mult, m_rat, w.n_total, Some(factor)));
                }
            }
        }
    }
}

fn descend<F: SolverField>(
    w: &Work<F>,
    ctx: &Ctx,
    edge: (u32, u32, u32, u64),
    z: F,
    mult: u32,
    out: &mut Vec<PuiseuxBranch>,
    incomplete: &mut bool,
) {
    let (p, q, big_m, new_u) = edge;
    let (a, b) = bezout(p, q);
    let lam = z.pow_i(a);
    let mu = z.pow_i(b);
    // G'(u, t') = u^-M G(lam u^q, u^p (mu + t'))
    let mut g: BTreeMap<(u32, u32), F> = BTreeMap::new();
    let mut mu_pows = vec![F::one()];
    let max_j = w.g.keys().map(|k| k.1).max().unwrap_or(0);
    for k in 1..=max_j as usize {
        let next = mu_pows[k - 1].clone() * mu.clone();
        mu_pows.push(next);
    }
    // largest contribution per slot, to recognise numeric cancellation
    let mut scale: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for (&(i, j), c) in &w.g {
        let e = q as u64 * i as u64 + p as u64 * j as u64 - big_m as u64;
        if e >= new_u {
            continue;
        }
        let factor = c.clone() * lam.pow_i(i as i64);
        for l in 0..=j {
            let coeff = factor.clone() * F::from_i64(binom(j, l)) * mu_pows[(j - l) as usize].clone();
            if !F::EXACT {
                let s = scale.entry((e as u32, l)).or_insert(0.0);
                *s = s.max(coeff.magnitude());
            }
            let slot = g.entry((e as u32, l)).or_insert_with(F::zero);
            *slot = slot.clone() + coeff;
        }
    }
    if !F::EXACT {
        g.retain(|k, v| v.magnitude() > CANCEL_TOL * scale[k]);
    }
    let mut prefix: Vec<(u32, F)> = w
        .prefix
        .iter()
        .map(|(k, c)| (k * q, c.clone() * lam.pow_i(*k as i64)))
        .collect();
    let kappa = w.kappa.clone() * lam.pow_i(w.m as i64);
    let m = q * w.m + p;
    prefix.push((m, kappa.clone() * mu));
    let next = Work {
        g,
        wi: 1,
        wj: 0,
        u: new_u,
        q_total: w.q_total * q,
        scale: w.scale.clone() * lam.pow_i(w.q_total as i64),
        prefix,
        kappa,
        m,
        n_total: w.n_total * q + big_m,
        numeric: w.numeric,
    };
    if next.prefix.len() >= ctx.max_terms {
        let v = next.n_total + 1;
        out.push(next.emit(ctx, mult, Rational64::from_integer(m as i64), v, None));
        return;
    }
    solve(next, ctx, out, incomplete);
}

/// Segments of the lower-left Newton boundary of `g`.
pub fn newton_polygon(g: &Series2) -> Result<Vec<NewtonSegment>, PuiseuxError> {
    if g.is_zero() {
        return Err(PuiseuxError::ZeroInput);
    }
    Ok(g.newton_support()?.segments)
}

/// All branches `t = t(xi)` of `g = 0` through the origin.
pub fn branches(g: &Series2, max_terms: usize, field: BranchField) -> Result<BranchSet, PuiseuxError> {
    if g.is_zero() {
        return Err(PuiseuxError::ZeroInput);
    }
    if !Zero::is_zero(&g.constant_term()) {
        return Err(PuiseuxError::NotAtOrigin);
    }
    let (wi, wj, u) = match g.truncation() {
        Truncation::TotalDegree(n) => (1, 1, n as u64 + 1),
        Truncation::Weighted(w, n) => (w.a as u64, w.b as u64, n as u64 + 1),
    };
    let work = Work {
        g: g.terms().map(|(m, c)| ((m.xi, m.t), c.clone())).collect(),
        wi,
        wj,
        u,
        q_total: 1,
        scale: Coefficient::from_integer(1.into()),
        prefix: Vec::new(),
        kappa: Coefficient::from_integer(1.into()),
        m: 0,
        n_total: 0,
        numeric: false,
    };
    let ctx = Ctx {
        max_terms: max_terms.max(1),
        field,
    };
    let mut out = Vec::new();
    let mut incomplete = false;
    solve(work, &ctx, &mut out, &mut incomplete);
    Ok(BranchSet {
        branches: out,
        incomplete,
    })
}

/// Parameterized plane branch `s -> (X(s), Y(s))`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneBranch<F: Field> {
    pub x: USeries<F>,
    pub y: USeries<F>,
}

/// Position of a branch relative to the support `y = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    OneSide(i8),
    BothSides,
}

/// Divides out a common exponent gcd; only meaningful when both
/// coordinates are known exactly.
fn content_reduce<F: Field>(b: &PlaneBranch<F>) -> PlaneBranch<F> {
    if b.x.prec().is_some() || b.y.prec().is_some() {
        return b.clone();
    }
    let exps = b
        .x
        .coeffs()
        .iter()
        .enumerate()
        .chain(b.y.coeffs().iter().enumerate())
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, _)| k)
        .fold(0usize, |g, k| g.gcd(&k));
    if exps <= 1 {
        return b.clone();
    }
    let squeeze = |s: &USeries<F>| USeries::exact(s.coeffs().iter().step_by(exps).cloned().collect());
    PlaneBranch {
        x: squeeze(&b.x),
        y: squeeze(&b.y),
    }
}

fn limit<F: Field>(s: &USeries<F>) -> u32 {
    s.prec().unwrap_or(usize::MAX).min(u32::MAX as usize) as u32
}

/// Singularity order `(p, q)`: `q` is the lowest vanishing order after
/// content reduction, `p` the first exponent of the other coordinate not
/// divisible by `q` once the first is brought to the form `c*v^q`.
/// `(1, 1)` means the branch is immersed.
pub fn param_branch_order<F: Field>(b: &PlaneBranch<F>) -> Result<(u32, u32), PuiseuxError> {
    if b.x.is_known_zero() && b.y.is_known_zero() {
        return Err(PuiseuxError::ZeroBranch);
    }
    let b = content_reduce(b);
    let (ox, oy) = (b.x.order(), b.y.order());
    let (a, other) = match (ox, oy) {
        (Some(x), Some(y)) if x <= y => (&b.x, &b.y),
        (Some(_), Some(_)) => (&b.y, &b.x),
        (Some(_), None) if b.y.is_known_zero() => (&b.x, &b.y),
        (None, Some(_)) if b.x.is_known_zero() => (&b.y, &b.x),
        (Some(_), None) => return Err(PuiseuxError::Inconclusive(limit(&b.y))),
        (None, _) => return Err(PuiseuxError::Inconclusive(limit(&b.x))),
    };
    let q = a.order().unwrap();
    if q == 1 {
        return Ok((1, 1));
    }
    if other.is_known_zero() {
        return Err(PuiseuxError::Inconclusive(limit(a)));
    }
    // a = c s^q (1 + w): v = s (1 + w)^(1/q) gives a = c v^q
    let c = a.coeff(q).unwrap();
    let full = a.prec().unwrap_or(a.coeffs().len() + 64);
    // exact coefficients grow fast under reversion, so widen the window
    // only as far as needed
    let mut prec = (other.order().unwrap_or(0) + 2 * q + 2).min(full);
    loop {
        let unit_c: Vec<F> = a.coeffs()[q..].iter().take(prec - q).map(|x| x.clone() / c.clone()).collect();
        let w = USeries::with_prec(unit_c, prec - q).sub(&USeries::one());
        let root = USeries::one_plus_root(&w, q as u32);
        let v_of_s = USeries::monomial(F::one(), 1).mul(&root);
        let s_of_v = v_of_s.revert().ok_or(PuiseuxError::Inconclusive(prec as u32))?;
        let other_v = other.compose(&s_of_v);
        for (k, coeff) in other_v.coeffs().iter().enumerate() {
            if !coeff.is_zero() && k % q != 0 {
                return Ok((k as u32, q as u32));
            }
        }
        if prec >= full {
            return Err(PuiseuxError::Inconclusive(limit(&other_v)));
        }
        prec = (2 * prec).min(full);
    }
}

/// Contact with the support `y = 0`: `ord Y / ord X - 1`, which for a
/// smooth branch graphed over `x` is the vanishing order of `Y(x)` minus 1.
pub fn contact_order<F: Field>(b: &PlaneBranch<F>) -> Result<Rational64, PuiseuxError> {
    if b.y.is_known_zero() {
        return Err(PuiseuxError::InsideSupport);
    }
    let oy = b.y.order().ok_or(PuiseuxError::Inconclusive(limit(&b.y)))?;
    if b.x.is_known_zero() {
        return Ok(Rational64::zero());
    }
    let ox = b.x.order().ok_or(PuiseuxError::Inconclusive(limit(&b.x)))?;
    Ok(Rational64::new(oy as i64, ox as i64) - 1)
}

/// Whether the real branch stays on one side of the support.
pub fn branch_side<F: Field>(b: &PlaneBranch<F>) -> Result<Side, PuiseuxError> {
    if b.y.is_known_zero() {
        return Err(PuiseuxError::InsideSupport);
    }
    let oy = b.y.order().ok_or(PuiseuxError::Inconclusive(limit(&b.y)))?;
    let lead = b.y.coeff(oy).unwrap().to_c64();
    if lead.re.abs() <= 1e-9 * lead.norm() {
        return Err(PuiseuxError::NotExact);
    }
    if oy % 2 == 0 {
        Ok(Side::OneSide(if lead.re > 0.0 { 1 } else { -1 }))
    } else {
        Ok(Side::BothSides)
    }
}

impl<F: Field> PlaneBranch<F> {
    pub fn order(&self) -> Result<(u32, u32), PuiseuxError> {
        param_branch_order(self)
    }
}

impl Side {
    pub fn label(&self) -> String {
        match self {
            Side::OneSide(s) if *s > 0 => "one side (+)".into(),
            Side::OneSide(_) => "one side (-)".into(),
            Side::BothSides => "both sides".into(),
        }
    }
}

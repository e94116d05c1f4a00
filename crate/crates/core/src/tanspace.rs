//! Finite-jet tangent spaces of map germs: codimension, tangential
//! codimension, miniversal complements and reduced tangent space checks.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::TanspaceError;
use crate::germ::MapGerm;
use crate::linalg::{greedy_complement, unit, Echelon, SparseVec};
use crate::series::{Coefficient, Mono, Series2, Truncation, Var, Weighting};

pub const DEFAULT_DEGREE: u32 = 14;
pub const MAX_DEGREE: u32 = 20;

/// A monomial placed in one component of the plane, zero in the other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VectorMono {
    pub mono: Mono,
    /// 0 for the first component, 1 for the second.
    pub component: u8,
}

impl VectorMono {
    pub fn first(mono: Mono) -> Self {
        VectorMono { mono, component: 0 }
    }

    pub fn second(mono: Mono) -> Self {
        VectorMono { mono, component: 1 }
    }

    pub fn is_tangential(&self) -> bool {
        self.component == 1 && self.mono.t >= 2
    }
}

impl fmt::Display for VectorMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.mono.render();
        let m = if m.is_empty() { "1".to_string() } else { m };
        match self.component {
            0 => write!(f, "({m}, 0)"),
            _ => write!(f, "(0, {m})"),
        }
    }
}

impl Serialize for VectorMono {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// All vector monomials within a truncation, in graded-lex order.
#[derive(Clone, Debug)]
pub struct JetVectorSpace {
    trunc: Truncation,
    basis: Vec<VectorMono>,
    index: BTreeMap<VectorMono, usize>,
}

impl JetVectorSpace {
    pub fn new(trunc: Truncation) -> Self {
        let mut basis: Vec<VectorMono> = trunc
            .monomials()
            .into_iter()
            .flat_map(|m| [VectorMono::first(m), VectorMono::second(m)])
            .collect();
        basis.sort();
        let index = basis.iter().enumerate().map(|(k, v)| (*v, k)).collect();
        JetVectorSpace { trunc, basis, index }
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[VectorMono] {
        &self.basis
    }

    pub fn index_of(&self, v: VectorMono) -> Option<usize> {
        self.index.get(&v).copied()
    }

    /// Coordinates of `(a, b)`, dropping monomials outside the space.
    pub fn vector(&self, a: &Series2, b: &Series2) -> SparseVec {
        let mut out = SparseVec::new();
        for (comp, s) in [(0u8, a), (1u8, b)] {
            for (m, c) in s.terms() {
                if let Some(k) = self.index_of(VectorMono { mono: m, component: comp }) {
                    out.insert(k, c.clone());
                }
            }
        }
        out
    }
}

/// Span of generator rows inside a [`JetVectorSpace`].
#[derive(Clone, Debug)]
pub struct LinearSubspace {
    ambient: JetVectorSpace,
    generators: Vec<SparseVec>,
    echelon: Echelon,
}

impl LinearSubspace {
    pub fn new(ambient: JetVectorSpace) -> Self {
        LinearSubspace {
            ambient,
            generators: Vec::new(),
            echelon: Echelon::new(),
        }
    }

    pub fn push(&mut self, v: SparseVec) {
        if v.is_empty() {
            return;
        }
        self.echelon.insert(v.clone());
        self.generators.push(v);
    }

    pub fn ambient(&self) -> &JetVectorSpace {
        &self.ambient
    }

    pub fn generators(&self) -> &[SparseVec] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.echelon.rank()
    }

    /// Rank recomputed from the stored generators.
    pub fn recompute_rank(&self) -> usize {
        crate::linalg::rank(&self.generators)
    }

    pub fn codim(&self) -> usize {
        self.ambient.dim() - self.rank()
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.echelon.contains(v)
    }

    pub fn contains_mono(&self, v: VectorMono) -> bool {
        self.ambient
            .index_of(v)
            .is_some_and(|k| self.contains(&unit(k)))
    }

    /// Rank after adjoining extra vector monomials.
    pub fn rank_with(&self, extra: &[VectorMono]) -> usize {
        let mut e = self.echelon.clone();
        for v in extra {
            if let Some(k) = self.ambient.index_of(*v) {
                e.insert(unit(k));
            }
        }
        e.rank()
    }

    /// Greedy complement among `candidates`, in order.
    pub fn complement(&self, candidates: &[VectorMono]) -> Vec<VectorMono> {
        let idx: Vec<usize> = candidates.iter().filter_map(|v| self.ambient.index_of(*v)).collect();
        greedy_complement(&self.echelon, &idx)
            .into_iter()
            .map(|k| self.ambient.basis[k])
            .collect()
    }

    pub fn to_csv(&self) -> String {
        crate::linalg::to_csv(&self.generators, self.ambient.dim())
    }
}

fn check_total(f: &MapGerm, need: u32) -> Result<(), TanspaceError> {
    let have = f.truncation().bound();
    match f.truncation() {
        Truncation::TotalDegree(_) if have >= need => Ok(()),
        Truncation::TotalDegree(_) => Err(TanspaceError::TruncationShortfall { needed: need, have }),
        Truncation::Weighted(w, _) => {
            let deg = have / w.a.max(w.b);
            if deg >= need {
                Ok(())
            } else {
                Err(TanspaceError::TruncationShortfall { needed: need, have: deg })
            }
        }
    }
}

fn powers(s: &Series2, n: u32) -> Vec<Series2> {
    let mut out = vec![Series2::one(s.truncation())];
    for k in 0..n as usize {
        let next = out[k].mul_unchecked(s);
        out.push(next);
    }
    out
}

/// `Tf` at total degree `n`: `m * df/dxi`, `m * df/dt` and
/// `(x^i y^j o f) e_k`, all truncated to degree `n`.
pub fn tangent_space(f: &MapGerm, n: u32) -> Result<LinearSubspace, TanspaceError> {
    check_total(f, n + 1)?;
    let tr = Truncation::TotalDegree(n);
    let up = Truncation::TotalDegree(n + 1);
    let p = f.p.retruncate_unchecked(up);
    let q = f.q.retruncate_unchecked(up);
    let amb = JetVectorSpace::new(tr);
    let mut space = LinearSubspace::new(amb.clone());
    let derivs = [
        (p.diff(Var::Xi).retruncate_unchecked(tr), q.diff(Var::Xi).retruncate_unchecked(tr)),
        (p.diff(Var::T).retruncate_unchecked(tr), q.diff(Var::T).retruncate_unchecked(tr)),
    ];
    for m in tr.monomials() {
        for (a, b) in &derivs {
            let mm = Series2::monomial(m, Coefficient::from_integer(1.into()), tr);
            space.push(amb.vector(&mm.mul_unchecked(a), &mm.mul_unchecked(b)));
        }
    }
    let pp = powers(&p.retruncate_unchecked(tr), n);
    let qp = powers(&q.retruncate_unchecked(tr), n);
    let zero = Series2::zero(tr);
    for d in 0..=n {
        for i in (0..=d).rev() {
            let j = d - i;
            let c = pp[i as usize].mul_unchecked(&qp[j as usize]);
            space.push(amb.vector(&c, &zero));
            space.push(amb.vector(&zero, &c));
        }
    }
    Ok(space)
}

/// `dim E / Tf` at degree `n`, with a stability flag comparing against
/// degree `n + 2` (false when the truncation does not reach that far).
pub fn codimension(f: &MapGerm, n: u32) -> Result<(u32, bool), TanspaceError> {
    let c = tangent_space(f, n)?.codim() as u32;
    let stable = match tangent_space(f, n + 2) {
        Ok(s) => s.codim() as u32 == c,
        Err(TanspaceError::TruncationShortfall { .. }) => false,
        Err(e) => return Err(e),
    };
    Ok((c, stable))
}

fn check_prenormal(f: &MapGerm) -> Result<(), TanspaceError> {
    let tr = f.truncation();
    let xt = Series2::xi(tr).add(&Series2::t(tr))?;
    if f.p != xt || f.q.terms().any(|(m, _)| m.t < 2) {
        return Err(TanspaceError::NotPrenormal);
    }
    Ok(())
}

fn tangential_monos(tr: Truncation) -> Vec<VectorMono> {
    let mut v: Vec<VectorMono> = tr
        .monomials()
        .into_iter()
        .filter(|m| m.t >= 2)
        .map(VectorMono::second)
        .collect();
    v.sort();
    v
}

fn tau_at(f: &MapGerm, n: u32) -> Result<u32, TanspaceError> {
    let s = tangent_space(f, n)?;
    let vt = tangential_monos(s.ambient().truncation());
    Ok((s.rank_with(&vt) - s.rank()) as u32)
}

/// `dim (V_tan + Tf) / Tf` at degree `n`, `V_tan` spanned by `(0, t^2 m)`.
pub fn tangential_codimension(f: &MapGerm, n: u32) -> Result<(u32, bool), TanspaceError> {
    check_prenormal(f)?;
    let tau = tau_at(f, n)?;
    let stable = match tau_at(f, n + 2) {
        Ok(t) => t == tau,
        Err(TanspaceError::TruncationShortfall { .. }) => false,
        Err(e) => return Err(e),
    };
    Ok((tau, stable))
}

/// First degree in `DEFAULT_DEGREE..=MAX_DEGREE` (even steps) at which the
/// codimension is stable.
pub fn stable_codimension(f: &MapGerm) -> Result<(u32, u32), TanspaceError> {
    let mut n = DEFAULT_DEGREE;
    loop {
        let (c, stable) = codimension(f, n)?;
        if stable {
            return Ok((c, n));
        }
        n += 2;
        if n > MAX_DEGREE {
            return Err(TanspaceError::Unstable(n - 2));
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MiniversalBasis {
    pub degree: u32,
    /// Complement of `Tf`: tangential monomials first, then the rest.
    pub full: Vec<VectorMono>,
    /// The part of `full` of the form `(0, t^2 m)`.
    pub tangential: Vec<VectorMono>,
}

/// Greedy monomial complement of `Tf` at degree `n`, preferring
/// tangential directions.
pub fn miniversal_basis(f: &MapGerm, n: u32) -> Result<MiniversalBasis, TanspaceError> {
    let (_, stable) = codimension(f, n)?;
    if !stable {
        return Err(TanspaceError::Unstable(n));
    }
    let s = tangent_space(f, n)?;
    let tr = s.ambient().truncation();
    let mut candidates = tangential_monos(tr);
    candidates.extend(s.ambient().basis().iter().filter(|v| !v.is_tangential()));
    let full = s.complement(&candidates);
    let tangential = full.iter().copied().filter(|v| v.is_tangential()).collect();
    Ok(MiniversalBasis {
        degree: n,
        full,
        tangential,
    })
}

/// Whether `Tf + span(extra)` fills the whole jet space at degree `n`.
pub fn spans_with(f: &MapGerm, n: u32, extra: &[VectorMono]) -> Result<bool, TanspaceError> {
    let s = tangent_space(f, n)?;
    Ok(s.rank_with(extra) == s.ambient().dim())
}

/// Whether the tangential directions `dirs` span `(V_tan + Tf) / Tf`.
pub fn spans_tangential(f: &MapGerm, n: u32, dirs: &[VectorMono]) -> Result<bool, TanspaceError> {
    check_prenormal(f)?;
    let s = tangent_space(f, n)?;
    let vt = tangential_monos(s.ambient().truncation());
    Ok(dirs.iter().all(|d| d.is_tangential()) && s.rank_with(dirs) == s.rank_with(&vt))
}

pub fn default_slack(w: Weighting) -> u32 {
    (2 * w.a.max(w.b)).max(4)
}

/// Whether `T_r f` contains every vector monomial of `m^p x m^q` (weighted)
/// in the window up to `max(p, q) + slack`, modulo weighted degree above
/// `max(p, q) + 2 slack`.
///
/// `T_r f` is spanned by `m d/dxi f` and `m d/dt f` for positive-weight
/// fields, `(A o f, 0)` for `A` in `m^2 + (y)` and `(0, B o f)` for `B` in
/// `m^2 + (x)`.
pub fn reduced_tangent_space_contains(f: &MapGerm, w: Weighting, p: u32, q: u32) -> Result<bool, TanspaceError> {
    reduced_tangent_space_contains_with(f, w, p, q, default_slack(w))
}

pub fn reduced_tangent_space_contains_with(
    f: &MapGerm,
    w: Weighting,
    p: u32,
    q: u32,
    slack: u32,
) -> Result<bool, TanspaceError> {
    let k = p.max(q) + 2 * slack;
    let tr = Truncation::Weighted(w, k);
    let up = Truncation::Weighted(w, k + w.a.max(w.b));
    if !up.is_within(&f.truncation()) {
        return Err(TanspaceError::TruncationShortfall {
            needed: k + w.a.max(w.b),
            have: f.truncation().bound(),
        });
    }
    let fp = f.p.retruncate_unchecked(up);
    let fq = f.q.retruncate_unchecked(up);
    let amb = JetVectorSpace::new(tr);
    let mut space = LinearSubspace::new(amb.clone());
    let one = Coefficient::from_integer(1.into());
    let dxi = (fp.diff(Var::Xi).retruncate_unchecked(tr), fq.diff(Var::Xi).retruncate_unchecked(tr));
    let dt = (fp.diff(Var::T).retruncate_unchecked(tr), fq.diff(Var::T).retruncate_unchecked(tr));
    for m in tr.monomials() {
        let wd = w.degree(m);
        let mm = Series2::monomial(m, one.clone(), tr);
        if wd > w.a {
            space.push(amb.vector(&mm.mul_unchecked(&dxi.0), &mm.mul_unchecked(&dxi.1)));
        }
        if wd > w.b {
            space.push(amb.vector(&mm.mul_unchecked(&dt.0), &mm.mul_unchecked(&dt.1)));
        }
    }
    let x = fp.retruncate_unchecked(tr);
    let y = fq.retruncate_unchecked(tr);
    let zero = Series2::zero(tr);
    // f has positive order, so powers beyond k vanish in the window
    let xp = powers(&x, k);
    let yp = powers(&y, k);
    for d in 2..=k {
        for i in (0..=d).rev() {
            let c = xp[i as usize].mul_unchecked(&yp[(d - i) as usize]);
            if c.is_zero() {
                continue;
            }
            space.push(amb.vector(&c, &zero));
            space.push(amb.vector(&zero, &c));
        }
    }
    space.push(amb.vector(&y, &zero));
    space.push(amb.vector(&zero, &x));
    let top = k - slack;
    for v in amb.basis() {
        let wd = w.degree(v.mono);
        let lower = if v.component == 0 { p } else { q };
        if wd >= lower && wd <= top && !space.contains_mono(*v) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Truncation;

    fn germ(p: &[(u32, u32, i64)], q: &[(u32, u32, i64)], n: u32) -> MapGerm {
        let tr = Truncation::TotalDegree(n);
        MapGerm::new(Series2::from_ints(p, tr), Series2::from_ints(q, tr)).unwrap()
    }

    fn pre(q: &[(u32, u32, i64)], n: u32) -> MapGerm {
        germ(&[(1, 0, 1), (0, 1, 1)], q, n)
    }

    #[test]
    fn ambient_order() {
        let a = JetVectorSpace::new(Truncation::TotalDegree(1));
        assert_eq!(a.dim(), 6);
        assert_eq!(a.basis()[0], VectorMono::first(Mono::ONE));
        assert_eq!(a.basis()[1], VectorMono::second(Mono::ONE));
    }

    #[test]
    fn fold_is_stable() {
        assert_eq!(codimension(&pre(&[(0, 2, 1)], 10), 6).unwrap(), (0, true));
        assert_eq!(codimension(&pre(&[(1, 2, 1)], 12), 8).unwrap(), (1, true));
    }

    #[test]
    fn quotient_bases() {
        // (xi, t^4 + t^2 xi + t^5)
        let f = germ(&[(1, 0, 1)], &[(0, 4, 1), (1, 2, 1), (0, 5, 1)], 14);
        let s = tangent_space(&f, 10).unwrap();
        assert_eq!(s.codim(), 2);
        let t = |k| VectorMono::second(Mono::new(0, k));
        assert_eq!(s.rank_with(&[t(1), t(3)]), s.ambient().dim());
        // (xi, t^3 + t^2 xi^2)
        let f = germ(&[(1, 0, 1)], &[(0, 3, 1), (2, 2, 1)], 14);
        let s = tangent_space(&f, 10).unwrap();
        assert_eq!(s.codim(), 3);
        let extra = [
            VectorMono::second(Mono::new(0, 1)),
            VectorMono::second(Mono::new(1, 1)),
            VectorMono::second(Mono::new(0, 2)),
        ];
        assert_eq!(s.rank_with(&extra), s.ambient().dim());
    }

    #[test]
    fn tangential_needs_prenormal() {
        let f = germ(&[(1, 0, 1)], &[(0, 2, 1)], 10);
        assert_eq!(tangential_codimension(&f, 6), Err(TanspaceError::NotPrenormal));
        assert!(matches!(
            tangent_space(&pre(&[(0, 2, 1)], 6), 6),
            Err(TanspaceError::TruncationShortfall { .. })
        ));
    }

    #[test]
    fn recomputed_rank_agrees() {
        let s = tangent_space(&pre(&[(0, 3, 1), (1, 2, 1), (0, 4, 1)], 10), 8).unwrap();
        assert_eq!(s.rank(), s.recompute_rank());
        assert!(!s.to_csv().is_empty());
    }

    #[test]
    fn reduced_space_inclusions() {
        let w = Weighting::new(3, 1).unwrap();
        let g = germ(&[(1, 0, 1)], &[(0, 5, 1), (1, 2, 1)], 40);
        assert!(reduced_tangent_space_contains(&g, w, 8, 10).unwrap());
        assert!(!reduced_tangent_space_contains(&g, w, 1, 1).unwrap());
        let w = Weighting::new(2, 1).unwrap();
        let f1 = germ(&[(1, 0, 1)], &[(0, 4, 1), (1, 2, 1), (0, 5, 1)], 40);
        assert!(reduced_tangent_space_contains(&f1, w, 4, 6).unwrap());
    }
}

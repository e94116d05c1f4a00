//! The decision procedure: prenormal invariants, subindices of the `S`
//! family by graded reduction, the cross ratio of `U` germs.

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::catalog::{Sign, SingularityClass};
use crate::envelope::envelope_branches;
use crate::error::{ClassifyError, EnvelopeError, PuiseuxError};
use crate::germ::{to_prenormal, PrenormalForm, TangentialFamily};
use crate::linalg::{greedy_complement, unit, Echelon, SparseVec};
use crate::series::{
    rat_to_f64, ser_rat, ser_rat_vec, Coefficient, Mono, Series2, Truncation, Weighting,
};

/// Branch terms requested from the solver when computing envelope orders.
pub const ENVELOPE_TERMS: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeOrder {
    pub order: Option<(u32, u32)>,
    pub contact: Option<String>,
    pub side: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrossRatio {
    pub value: Complex64,
    pub degenerate: bool,
}

impl Serialize for CrossRatio {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CrossRatio", 2)?;
        st.serialize_field("value", &[self.value.re, self.value.im])?;
        st.serialize_field("degenerate", &self.degenerate)?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Moduli {
    /// Square of the modulus `a` of the `U` family.
    #[serde(serialize_with = "ser_rat")]
    pub a_squared: Coefficient,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassificationReport {
    pub class: SingularityClass,
    #[serde(serialize_with = "ser_rat")]
    pub alpha: Coefficient,
    #[serde(serialize_with = "ser_rat_vec")]
    pub k: Vec<Coefficient>,
    /// Reduction coefficients of the `S1` normal form, up to the first
    /// nonzero one; frame dependent beyond that index.
    #[serde(serialize_with = "ser_rat_vec")]
    pub b: Vec<Coefficient>,
    pub cross_ratio: Option<CrossRatio>,
    pub envelope_orders: Vec<EnvelopeOrder>,
    pub certified_to_jet: u32,
    pub moduli: Option<Moduli>,
    pub prenormal: String,
}

fn jet_of(tr: Truncation) -> u32 {
    match tr {
        Truncation::TotalDegree(n) => n,
        Truncation::Weighted(w, n) => n / w.a.max(w.b),
    }
}

/// Restricts a prenormal form to total degree `jet`.
fn at_jet(pf: &PrenormalForm, jet: u32) -> Result<PrenormalForm, ClassifyError> {
    let tr = Truncation::TotalDegree(jet);
    let phi = pf.phi().retruncate(tr)?;
    Ok(PrenormalForm::from_phi(phi)?)
}

/// Classifies a validated family using jets up to `max_jet`.
pub fn classify(tf: &TangentialFamily, max_jet: u32) -> Result<ClassificationReport, ClassifyError> {
    let pf = to_prenormal(tf)?;
    classify_prenormal(&pf, max_jet)
}

pub fn classify_prenormal(pf: &PrenormalForm, max_jet: u32) -> Result<ClassificationReport, ClassifyError> {
    let jet = max_jet.min(jet_of(pf.truncation()));
    if jet < 3 {
        return Err(ClassifyError::Inconclusive(jet));
    }
    let pf = at_jet(pf, jet)?;
    let (alpha, k0, k1) = (pf.alpha().clone(), pf.k_at(0), pf.k_at(1));
    let mut b = Vec::new();
    let mut cross_ratio = None;
    let mut moduli = None;
    let class = if !k0.is_zero() {
        SingularityClass::I
    } else if !k1.is_zero() && k1 != alpha {
        SingularityClass::II
    } else if !alpha.is_zero() && k1 == alpha {
        match s_index(&pf, jet) {
            None => SingularityClass::SInf,
            Some(1) => {
                let s1 = s1_subindex(&pf)?;
                b = s1.b;
                match s1.n {
                    Some(n) => SingularityClass::S1(n),
                    None => SingularityClass::S1Inf,
                }
            }
            Some(2) => s2_suborbit(&pf)?,
            Some(n) => SingularityClass::Sge3(n),
        }
    } else if !alpha.is_zero() {
        match (2..=jet.saturating_sub(2) as usize).find(|&i| !pf.k_at(i).is_zero()) {
            Some(i) => SingularityClass::T(i as u32 - 1),
            None => SingularityClass::TInf,
        }
    } else {
        if let Some((cr, a2)) = u_invariants(&pf) {
            cross_ratio = cr;
            moduli = Some(Moduli { a_squared: a2 });
        }
        SingularityClass::U
    };
    let envelope_orders = match class {
        SingularityClass::U | SingularityClass::SInf | SingularityClass::TInf => Vec::new(),
        _ => envelope_orders(&pf)?,
    };
    let kmax = jet.saturating_sub(2) as usize;
    Ok(ClassificationReport {
        class,
        alpha,
        k: pf.k().iter().take(kmax + 1).cloned().collect(),
        b,
        cross_ratio,
        envelope_orders,
        certified_to_jet: jet,
        moduli,
        prenormal: pf.phi().to_string(),
    })
}

fn envelope_orders(pf: &PrenormalForm) -> Result<Vec<EnvelopeOrder>, ClassifyError> {
    let rep = match envelope_branches(pf, ENVELOPE_TERMS) {
        Ok(r) => r,
        Err(EnvelopeError::Puiseux(e)) => return Err(e.into()),
        Err(e) => return Err(ClassifyError::Inconsistent(e.to_string())),
    };
    Ok(rep
        .other
        .iter()
        .map(|b| EnvelopeOrder {
            order: b.order,
            contact: b.contact.map(|c| {
                if c.is_integer() {
                    c.numer().to_string()
                } else {
                    format!("{}/{}", c.numer(), c.denom())
                }
            }),
            side: b.side.map(|s| s.label()),
        })
        .collect())
}

/// `n` with `phi(-t, t)` of order `n + 3`; `None` if it vanishes through
/// the jet.
fn s_index(pf: &PrenormalForm, jet: u32) -> Option<u32> {
    (4..=jet).find(|&d| !diagonal_coeff(pf.phi(), d).is_zero()).map(|d| d - 3)
}

fn diagonal_coeff(phi: &Series2, d: u32) -> Coefficient {
    phi.terms()
        .filter(|(m, _)| m.xi + m.t == d)
        .map(|(m, c)| if m.xi % 2 == 0 { c.clone() } else { -c.clone() })
        .fold(Coefficient::zero(), |a, b| a + b)
}

/// Quasihomogeneous model `(xi, g2)` with target weights `(w.a, wy)`.
struct Model {
    w: Weighting,
    wy: u32,
    g2: Series2,
}

/// Normal-form coefficients found at one filtration step.
#[derive(Clone, Debug)]
struct Step {
    k: u32,
    complement: Vec<(Mono, u8, Coefficient)>,
}

fn monos_of_weight(w: Weighting, d: u32) -> Vec<Mono> {
    let mut v = Vec::new();
    for i in 0..=d / w.a {
        let rest = d - i * w.a;
        if rest.is_multiple_of(w.b) {
            v.push(Mono::new(i, rest / w.b));
        }
    }
    v
}

/// `x^i y^j` with `a i + wy j = d`.
fn target_monos(a: u32, wy: u32, d: u32) -> Vec<(u32, u32)> {
    let mut v = Vec::new();
    for j in 0..=d / wy {
        let rest = d - j * wy;
        if rest.is_multiple_of(a) {
            v.push((rest / a, j));
        }
    }
    v
}

/// Graded reduction of `(xi, f2)` against the model, one weighted
/// filtration step at a time, applying each coordinate change exactly.
/// `stop` ends the loop once a step returns true.
fn graded_reduction(
    model: &Model,
    f2: &Series2,
    k_max: u32,
    mut stop: impl FnMut(&Step) -> bool,
) -> Result<Vec<Step>, ClassifyError> {
    let tr = f2.truncation();
    let d_max = tr.bound();
    let w = model.w;
    let one = Coefficient::one();
    let g2 = model.g2.retruncate_unchecked(tr);
    let dg_xi = g2.diff(crate::series::Var::Xi).retruncate_unchecked(tr);
    let dg_t = g2.diff(crate::series::Var::T).retruncate_unchecked(tr);
    let g1 = Series2::xi(tr);
    let mut f = (Series2::xi(tr), f2.clone());
    let mut steps = Vec::new();
    for k in 1..=k_max {
        let (d1, d2) = (w.a + k, model.wy + k);
        if d2 > d_max {
            break;
        }
        // graded coordinates: first component at weight d1, second at d2
        let first = monos_of_weight(w, d1);
        let second = monos_of_weight(w, d2);
        let idx = |comp: u8, m: Mono| -> Option<usize> {
            match comp {
                0 => first.iter().position(|x| *x == m),
                _ => second.iter().position(|x| *x == m).map(|p| p + first.len()),
            }
        };
        let vec_of = |a: &Series2, b: &Series2| -> SparseVec {
            let mut v = SparseVec::new();
            for (m, c) in a.terms() {
                if w.degree(m) == d1 {
                    v.insert(idx(0, m).unwrap(), c.clone());
                }
            }
            for (m, c) in b.terms() {
                if w.degree(m) == d2 {
                    v.insert(idx(1, m).unwrap(), c.clone());
                }
            }
            v
        };
        let zero = Series2::zero(tr);
        // generators, with the change they stand for
        enum Gen {
            Zeta1(Mono),
            Zeta2(Mono),
            Eta1(u32, u32),
            Eta2(u32, u32),
        }
        let mut gens: Vec<(Gen, SparseVec)> = Vec::new();
        for m in monos_of_weight(w, d1) {
            let mm = Series2::monomial(m, one.clone(), tr);
            gens.push((Gen::Zeta1(m), vec_of(&mm, &mm.mul_unchecked(&dg_xi))));
        }
        for m in monos_of_weight(w, w.b + k) {
            let mm = Series2::monomial(m, one.clone(), tr);
            gens.push((Gen::Zeta2(m), vec_of(&zero, &mm.mul_unchecked(&dg_t))));
        }
        let comp = |i: u32, j: u32| g1.pow(i).mul_unchecked(&g2.pow(j));
        for (i, j) in target_monos(w.a, model.wy, d1) {
            gens.push((Gen::Eta1(i, j), vec_of(&comp(i, j), &zero)));
        }
        for (i, j) in target_monos(w.a, model.wy, d2) {
            gens.push((Gen::Eta2(i, j), vec_of(&zero, &comp(i, j))));
        }
        let mut ech = Echelon::tracking();
        for (_, v) in &gens {
            ech.insert(v.clone());
        }
        // complement, preferring pure powers of t in the second component
        let mut cands: Vec<(u8, Mono)> = Vec::new();
        let pure = Mono::new(0, d2 / w.b);
        if d2 % w.b == 0 {
            cands.push((1, pure));
        }
        cands.extend(second.iter().filter(|m| **m != pure).map(|m| (1, *m)));
        cands.extend(first.iter().map(|m| (0, *m)));
        let cand_idx: Vec<usize> = cands.iter().map(|(c, m)| idx(*c, *m).unwrap()).collect();
        let chosen = greedy_complement(&ech, &cand_idx);
        for &c in &chosen {
            ech.insert(unit(c));
        }
        let target = vec_of(&f.0, &f.1);
        let combo = ech
            .solve(&target)
            .ok_or_else(|| ClassifyError::Inconsistent(format!("graded part at step {k} not spanned")))?;
        let mut zeta = (zero.clone(), zero.clone());
        let mut eta = (zero.clone(), zero.clone());
        let mut complement = Vec::new();
        for (g, c) in combo {
            if g >= gens.len() {
                let col = chosen[g - gens.len()];
                let (comp_id, m) = if col < first.len() { (0, first[col]) } else { (1, second[col - first.len()]) };
                complement.push((m, comp_id, c));
                continue;
            }
            match &gens[g].0 {
                Gen::Zeta1(m) => zeta.0 = zeta.0.add(&Series2::monomial(*m, c, tr))?,
                Gen::Zeta2(m) => zeta.1 = zeta.1.add(&Series2::monomial(*m, c, tr))?,
                Gen::Eta1(i, j) => eta.0 = eta.0.add(&Series2::monomial(Mono::new(*i, *j), c, tr))?,
                Gen::Eta2(i, j) => eta.1 = eta.1.add(&Series2::monomial(Mono::new(*i, *j), c, tr))?,
            }
        }
        complement.sort_by_key(|a| (a.1, a.0));
        // F <- Psi o F o Phi, Phi = id - zeta, Psi = id - eta
        let u = Series2::xi(tr).sub(&zeta.0)?;
        let v = Series2::t(tr).sub(&zeta.1)?;
        let a = f.0.compose(&u, &v);
        let b = f.1.compose(&u, &v);
        let a2 = a.sub(&eta.0.compose(&a, &b))?;
        let b2 = b.sub(&eta.1.compose(&a, &b))?;
        f = (a2, b2);
        // the graded part must now be the complement alone
        let mut expect = SparseVec::new();
        for (m, c, v) in &complement {
            expect.insert(idx(*c, *m).unwrap(), v.clone());
        }
        if vec_of(&f.0, &f.1) != expect {
            return Err(ClassifyError::Inconsistent(format!("reduction step {k} did not normalize")));
        }
        let step = Step { k, complement };
        let done = stop(&step);
        steps.push(step);
        if done {
            break;
        }
    }
    Ok(steps)
}

/// `rho * psi(nu xi, t)` with the weight-`wy` part scaled to `t^wy + t^2 xi`.
fn normalized_psi(pf: &PrenormalForm, w: Weighting, wy: u32) -> Result<Series2, ClassifyError> {
    let psi = pf.psi();
    let n = psi.truncation().bound();
    let tr = Truncation::Weighted(w, n);
    let psi = psi.retruncate(tr)?;
    let c = psi.coeff_ij(0, wy);
    let k1 = psi.coeff_ij(1, 2);
    if c.is_zero() || k1.is_zero() {
        return Err(ClassifyError::Inconsistent("degenerate quasihomogeneous part".into()));
    }
    let rho = c.recip();
    let nu = &c / &k1;
    Ok(psi.compose(&Series2::xi(tr).scale(&nu), &Series2::t(tr)).scale(&rho))
}

#[derive(Clone, Debug, PartialEq)]
pub struct S1Subindex {
    /// `None` when no cusp was found through the truncation.
    pub n: Option<u32>,
    pub b: Vec<Coefficient>,
    pub envelope_order: Option<(u32, u32)>,
    pub reduction_n: Option<u32>,
}

/// Outcome of one route: a value, or a bound `L` with `n > L`.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Route {
    Found(u32),
    Beyond(u32),
}

fn envelope_route(pf: &PrenormalForm) -> Result<(Route, Option<(u32, u32)>), ClassifyError> {
    let rep = envelope_branches(pf, ENVELOPE_TERMS).map_err(|e| match e {
        EnvelopeError::Puiseux(p) => ClassifyError::Puiseux(p),
        other => ClassifyError::Inconsistent(other.to_string()),
    })?;
    let Some(br) = rep.other.iter().find(|b| b.criminant.multiplicity == 1) else {
        return Err(ClassifyError::Inconsistent("no second envelope branch".into()));
    };
    let Some(plane) = &br.plane else {
        return Err(ClassifyError::Inconsistent("second branch is not exact".into()));
    };
    match crate::puiseux::param_branch_order(plane) {
        Ok((p, 2)) if p % 2 == 1 && p >= 5 => Ok((Route::Found((p - 3) / 2), Some((p, 2)))),
        Ok(o) => Err(ClassifyError::Inconsistent(format!("second branch order {o:?} is not a cusp"))),
        // 2n + 3 >= P
        Err(PuiseuxError::Inconclusive(prec)) => Ok((Route::Beyond((prec.saturating_sub(2)) / 2), None)),
        Err(e) => Err(e.into()),
    }
}

/// Subindex `n` of an `S1` germ: cusp order `(2n+3, 2)` of the second
/// envelope branch, cross-checked against the first nonzero `b_n` of the
/// graded reduction to `(xi, t^4 + t^2 xi) + sum b_i (0, t^(2i+3))`.
pub fn s1_subindex(pf: &PrenormalForm) -> Result<S1Subindex, ClassifyError> {
    let w = Weighting::new(2, 1)?;
    let f2 = normalized_psi(pf, w, 4)?;
    let model = Model {
        w,
        wy: 4,
        g2: Series2::from_ints(&[(0, 4, 1), (1, 2, 1)], f2.truncation()),
    };
    let d = f2.truncation().bound();
    let mut b = Vec::new();
    let mut found = None;
    let steps = graded_reduction(&model, &f2, d.saturating_sub(4), |s| {
        s.complement.iter().any(|(_, _, c)| !c.is_zero())
    })?;
    for s in &steps {
        if s.k % 2 == 1 {
            let c = s
                .complement
                .iter()
                .find(|(m, comp, _)| *comp == 1 && m.xi == 0)
                .map(|x| x.2.clone())
                .unwrap_or_default();
            b.push(c.clone());
            if !c.is_zero() {
                found = Some(s.k.div_ceil(2));
            }
        }
        if s.complement.iter().any(|(m, comp, c)| !c.is_zero() && !(*comp == 1 && m.xi == 0 && s.k % 2 == 1)) {
            return Err(ClassifyError::Inconsistent(format!("unexpected normal-form term at step {}", s.k)));
        }
    }
    let reduction = match found {
        Some(n) => Route::Found(n),
        None => Route::Beyond(steps.iter().filter(|s| s.k % 2 == 1).count() as u32),
    };
    let (envelope, order) = envelope_route(pf)?;
    let n = match (envelope, reduction) {
        (Route::Found(a), Route::Found(b)) if a == b => Some(a),
        (Route::Found(a), Route::Beyond(l)) | (Route::Beyond(l), Route::Found(a)) if a > l => Some(a),
        (Route::Beyond(_), Route::Beyond(_)) => None,
        (e, r) => {
            return Err(ClassifyError::Inconsistent(format!(
                "envelope route {e:?} disagrees with reduction route {r:?}"
            )))
        }
    };
    Ok(S1Subindex {
        n,
        b,
        envelope_order: order,
        reduction_n: found,
    })
}

/// Orbit of an `S2` germ from the weights-(3,1) reduction against
/// `(xi, t^5 + t^2 xi)` through weighted degree 9.
pub fn s2_suborbit(pf: &PrenormalForm) -> Result<SingularityClass, ClassifyError> {
    let w = Weighting::new(3, 1)?;
    if pf.truncation().bound() < 9 {
        return Err(ClassifyError::Inconclusive(pf.truncation().bound()));
    }
    let f2 = normalized_psi(pf, w, 5)?;
    let model = Model {
        w,
        wy: 5,
        g2: Series2::from_ints(&[(0, 5, 1), (1, 2, 1)], f2.truncation()),
    };
    let steps = graded_reduction(&model, &f2, 4, |s| {
        s.k == 1 && s.complement.iter().any(|(_, _, c)| !c.is_zero())
    })?;
    let coeff = |k: u32, d: u32| -> Coefficient {
        steps
            .iter()
            .find(|s| s.k == k)
            .and_then(|s| s.complement.iter().find(|(m, c, _)| *c == 1 && *m == Mono::new(0, d)))
            .map(|x| x.2.clone())
            .unwrap_or_default()
    };
    if !coeff(1, 6).is_zero() {
        return Ok(SingularityClass::S2_2);
    }
    for s in &steps {
        if s.k > 1 && s.k < 4 && s.complement.iter().any(|(_, _, c)| !c.is_zero()) {
            return Err(ClassifyError::Inconsistent(format!("unexpected normal-form term at step {}", s.k)));
        }
    }
    let c9 = coeff(4, 9);
    Ok(if c9.is_zero() {
        SingularityClass::S2_4
    } else if c9.is_positive() {
        SingularityClass::S2_3(Sign::Plus)
    } else {
        SingularityClass::S2_3(Sign::Minus)
    })
}

/// Cross ratio of the vertical direction, the support and the two other
/// criminant directions of a `U` germ, with `a^2`.
fn u_invariants(pf: &PrenormalForm) -> Option<(Option<CrossRatio>, Coefficient)> {
    let psi = pf.psi();
    let (c04, c13, c22) = (psi.coeff_ij(0, 4), psi.coeff_ij(1, 3), psi.coeff_ij(2, 2));
    if c04.is_zero() || c22.is_zero() {
        return None;
    }
    let a2 = Coefficient::from_integer(9.into()) * &c13 * &c13
        / (Coefficient::from_integer(32.into()) * &c04 * &c22);
    Some((cross_ratio_of(&c04, &c13, &c22), a2))
}

fn cross_ratio_of(c04: &Coefficient, c13: &Coefficient, c22: &Coefficient) -> Option<CrossRatio> {
    // slopes z of t = z xi: 4 c04 z^2 + 3 c13 z + 2 c22 = 0
    let (a, b, c) = (4.0 * rat_to_f64(c04), 3.0 * rat_to_f64(c13), 2.0 * rat_to_f64(c22));
    let disc_exact = Coefficient::from_integer(9.into()) * c13 * c13
        - Coefficient::from_integer(32.into()) * c04 * c22;
    if disc_exact.is_zero() {
        return Some(CrossRatio {
            value: Complex64::new(1.0, 0.0),
            degenerate: true,
        });
    }
    let sq = Complex64::new(b * b - 4.0 * a * c, 0.0).sqrt();
    let z3 = (-b + sq) / (2.0 * a);
    let z4 = (-b - sq) / (2.0 * a);
    // CR(inf, 0, z3, z4) = z4 / z3; pick the representative with |CR| > 1,
    // or Im >= 0 on the unit circle
    let mut cr = z4 / z3;
    let m = cr.norm();
    if (m - 1.0).abs() <= 1e-12 {
        if cr.im < 0.0 {
            cr = cr.conj();
        }
    } else if m < 1.0 {
        cr = cr.inv();
    }
    Some(CrossRatio {
        value: cr,
        degenerate: false,
    })
}

/// Cross ratio for a `U` germ; `None` when a criminant direction meets
/// the support or the vertical.
pub fn cross_ratio(pf: &PrenormalForm) -> Option<CrossRatio> {
    u_invariants(pf).and_then(|x| x.0)
}

//! Map germs of the plane, tangential-family validation and reduction to
//! the prenormal presentation `(xi + t, phi)` with `t^2 | phi`.

use num_traits::Zero;
use serde::Serialize;

use crate::error::GermError;
use crate::series::{ser_rat, ser_rat_vec, Coefficient, Mono, Series2, Truncation, Var};
use crate::univariate::USeries;

/// Map germ `(xi, t) -> (x, y) = (p, q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapGerm {
    pub p: Series2,
    pub q: Series2,
}

impl MapGerm {
    pub fn new(p: Series2, q: Series2) -> Result<Self, GermError> {
        if p.truncation() != q.truncation() {
            return Err(crate::error::SeriesError::TruncationMismatch(p.truncation(), q.truncation()).into());
        }
        if !p.constant_term().is_zero() || !q.constant_term().is_zero() {
            return Err(GermError::NotAtOrigin);
        }
        Ok(MapGerm { p, q })
    }

    /// `(xi + t, phi)`.
    pub fn prenormal(phi: &Series2) -> Self {
        let tr = phi.truncation();
        MapGerm {
            p: Series2::xi(tr).add(&Series2::t(tr)).expect("same truncation"),
            q: phi.clone(),
        }
    }

    /// Converts the presentation `(xi, psi)` used for quasihomogeneous
    /// models into the family `(xi + t, psi(xi + t, t))`.
    pub fn from_xi_psi(psi: &Series2) -> Self {
        let tr = psi.truncation();
        let u = Series2::xi(tr).add(&Series2::t(tr)).expect("same truncation");
        let phi = psi.compose(&u, &Series2::t(tr));
        MapGerm::prenormal(&phi)
    }

    pub fn truncation(&self) -> Truncation {
        self.p.truncation()
    }

    /// Left action: `(x, y) -> (a(x, y), b(x, y))` applied after `self`.
    pub fn compose_left(&self, a: &Series2, b: &Series2) -> MapGerm {
        MapGerm {
            p: a.compose(&self.p, &self.q),
            q: b.compose(&self.p, &self.q),
        }
    }

    /// Right action: `self` precomposed with `(xi, t) -> (u, v)`.
    pub fn compose_right(&self, u: &Series2, v: &Series2) -> MapGerm {
        MapGerm {
            p: self.p.compose(u, v),
            q: self.q.compose(u, v),
        }
    }
}

/// A map germ certified to satisfy the tangential-family axioms through
/// `validated_to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentialFamily {
    f: MapGerm,
    validated_to: u32,
}

impl TangentialFamily {
    pub fn germ(&self) -> &MapGerm {
        &self.f
    }

    pub fn validated_to(&self) -> u32 {
        self.validated_to
    }
}

fn xi_coeffs(s: &Series2, t_exp: u32, upto: u32) -> Vec<Coefficient> {
    (0..=upto).map(|i| s.coeff_ij(i, t_exp)).collect()
}

/// Checks the tangential-family axioms through xi-order `order`.
pub fn validate_tangential(f: &MapGerm, order: u32) -> Result<TangentialFamily, GermError> {
    let n = f.truncation().bound();
    if order < 2 || order >= n {
        return Err(GermError::TruncationTooLow {
            needed: order + 1,
            have: n,
        });
    }
    let (p, q) = (&f.p, &f.q);
    if p.coeff_ij(1, 0).is_zero() && q.coeff_ij(1, 0).is_zero() {
        return Err(GermError::SingularSupport);
    }
    // fiber direction: first nonzero t-jet at the base point
    let k = (1..=n)
        .find(|&k| !p.coeff_ij(0, k).is_zero() || !q.coeff_ij(0, k).is_zero())
        .ok_or(GermError::NotImmersedFiber)?;
    // wedge(d_k(xi), gamma'(xi)) as a series in xi
    let upto = order.min(n - k);
    let pk = xi_coeffs(p, k, upto);
    let qk = xi_coeffs(q, k, upto);
    let dp: Vec<Coefficient> = (0..=upto)
        .map(|i| p.coeff_ij(i + 1, 0) * Coefficient::from_integer((i as i64 + 1).into()))
        .collect();
    let dq: Vec<Coefficient> = (0..=upto)
        .map(|i| q.coeff_ij(i + 1, 0) * Coefficient::from_integer((i as i64 + 1).into()))
        .collect();
    for d in 0..=upto as usize {
        let mut w = Coefficient::zero();
        for i in 0..=d {
            w += &pk[i] * &dq[d - i] - &qk[i] * &dp[d - i];
        }
        if !w.is_zero() {
            return Err(GermError::TangencyViolated(d as u32));
        }
    }
    if k > 1 {
        return Err(GermError::NotImmersedFiber);
    }
    Ok(TangentialFamily {
        f: f.clone(),
        validated_to: order,
    })
}

/// Family `(xi + t, phi)` with `t^2 | phi`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrenormalForm {
    #[serde(serialize_with = "ser_display")]
    phi: Series2,
    /// Coefficient of `t^3`.
    #[serde(serialize_with = "ser_rat")]
    alpha: Coefficient,
    /// `k[i]` is the coefficient of `t^2 xi^i`.
    #[serde(serialize_with = "ser_rat_vec")]
    k: Vec<Coefficient>,
    truncation: u32,
}

fn ser_display<S: serde::Serializer>(s: &Series2, ser: S) -> Result<S::Ok, S::Error> {
    ser.serialize_str(&s.to_string())
}

impl PrenormalForm {
    pub fn from_phi(phi: Series2) -> Result<Self, GermError> {
        if phi.terms().any(|(m, _)| m.t < 2) {
            let d = phi.terms().filter(|(m, _)| m.t < 2).map(|(m, _)| m.xi).min().unwrap_or(0);
            return Err(GermError::TangencyViolated(d));
        }
        let n = phi.truncation().bound();
        let alpha = phi.coeff_ij(0, 3);
        let k = (0..=n.saturating_sub(2)).map(|i| phi.coeff_ij(i, 2)).collect();
        Ok(PrenormalForm {
            phi,
            alpha,
            k,
            truncation: n,
        })
    }

    pub fn phi(&self) -> &Series2 {
        &self.phi
    }

    pub fn alpha(&self) -> &Coefficient {
        &self.alpha
    }

    pub fn k(&self) -> &[Coefficient] {
        &self.k
    }

    pub fn k_at(&self, i: usize) -> Coefficient {
        self.k.get(i).cloned().unwrap_or_else(Coefficient::zero)
    }

    pub fn truncation(&self) -> Truncation {
        self.phi.truncation()
    }

    pub fn map_germ(&self) -> MapGerm {
        MapGerm::prenormal(&self.phi)
    }

    /// `psi(xi, t) = phi(xi - t, t)`, the second component in the
    /// presentation `(xi, psi)`.
    pub fn psi(&self) -> Series2 {
        let tr = self.truncation();
        let u = Series2::xi(tr).sub(&Series2::t(tr)).expect("same truncation");
        self.phi.compose(&u, &Series2::t(tr))
    }
}

fn univariate_of(s: &Series2) -> USeries<Coefficient> {
    let n = s.truncation().bound() as usize;
    USeries::with_prec((0..=n as u32).map(|i| s.coeff_ij(i, 0)).collect(), n + 1)
}

fn series_of(u: &USeries<Coefficient>, trunc: Truncation) -> Series2 {
    Series2::from_terms(
        u.coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| (Mono::new(i as u32, 0), c.clone())),
        trunc,
    )
}

/// Reduces a validated family to prenormal form: a left change straightens
/// the support to `y = 0`, then a fiber-preserving right change makes the
/// first component `xi + t`.
pub fn to_prenormal(tf: &TangentialFamily) -> Result<PrenormalForm, GermError> {
    let f = &tf.f;
    let tr = f.truncation();
    let n = tr.bound();
    if n < 3 {
        return Err(GermError::TruncationTooLow { needed: 3, have: n });
    }
    let x = Series2::xi(tr);
    let t = Series2::t(tr);
    // already prenormal: nothing to do
    if f.p == x.add(&t)? && f.q.terms().all(|(m, _)| m.t >= 2) {
        return PrenormalForm::from_phi(f.q.clone());
    }
    // quarter turn when the support is vertical
    let (p, q) = if f.p.coeff_ij(1, 0).is_zero() {
        (f.q.clone(), f.p.neg())
    } else {
        (f.p.clone(), f.q.clone())
    };
    // y -> y - s(x), s = gamma2 o gamma1^-1
    let g1 = univariate_of(&p.at_t_zero());
    let g2 = univariate_of(&q.at_t_zero());
    let g1_inv = g1.revert().ok_or(GermError::SingularSupport)?;
    let s = series_of(&g2.compose(&g1_inv), tr);
    let q1 = q.sub(&s.compose(&p, &t))?;
    // right change (xi, t) -> (X, T) = (p(xi, 0), p(xi, t) - p(xi, 0))
    let xi_of_x = series_of(&g1_inv, tr);
    let q2 = q1.compose(&xi_of_x, &t);
    let r = p.compose(&xi_of_x, &t).sub(&x)?;
    let c = r.coeff_ij(0, 1);
    if c.is_zero() {
        return Err(GermError::NotImmersedFiber);
    }
    // solve r(X, t) = T for t by Newton iteration, doubling the working
    // degree each step
    let r_t = r.diff(Var::T).retruncate_unchecked(tr);
    let mut sol = t.scale(&c.recip());
    let mut correct = 1u32;
    let mut steps = 0;
    loop {
        let d = (2 * correct + 1).min(n);
        let td = tr.with_bound(d);
        let (xd, tt, sd) = (Series2::xi(td), Series2::t(td), sol.retruncate_unchecked(td));
        let resid = r.retruncate_unchecked(td).compose(&xd, &sd).sub(&tt)?;
        if resid.is_zero() && d == n {
            sol = sd;
            break;
        }
        steps += 1;
        if steps > 2 * n + 2 {
            return Err(GermError::TruncationTooLow {
                needed: n + 1,
                have: n,
            });
        }
        let slope = r_t.retruncate_unchecked(td).compose(&xd, &sd).inverse_unit()?;
        sol = sd.sub(&resid.mul(&slope)?)?;
        correct = d;
    }
    let phi = q2.compose(&x, &sol);
    PrenormalForm::from_phi(phi)
}

/// `dp/dxi * dq/dt - dp/dt * dq/dxi`.
pub fn jacobian_det(f: &MapGerm) -> Series2 {
    let a = f.p.diff(Var::Xi).mul_unchecked(&f.q.diff(Var::T));
    let b = f.p.diff(Var::T).mul_unchecked(&f.q.diff(Var::Xi));
    a.sub(&b).expect("same truncation")
}

/// Criminant equation `g = dphi/dt - dphi/dxi` and its cofactor `h = g / t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Criminant {
    pub g: Series2,
    pub h: Series2,
}

pub fn criminant_equation(pf: &PrenormalForm) -> Criminant {
    let g = pf.phi.diff(Var::T).sub(&pf.phi.diff(Var::Xi)).expect("same truncation");
    let h = g.div_t_pow(1).expect("t divides the criminant of a prenormal form");
    Criminant { g, h }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{int, Truncation};

    const N: Truncation = Truncation::TotalDegree(12);

    fn s(terms: &[(u32, u32, i64)]) -> Series2 {
        Series2::from_ints(terms, N)
    }

    fn xt() -> Series2 {
        s(&[(1, 0, 1), (0, 1, 1)])
    }

    #[test]
    fn validate_examples() {
        let f = MapGerm::new(xt(), s(&[(0, 2, 1)])).unwrap();
        assert!(validate_tangential(&f, 8).is_ok());
        let f = MapGerm::new(s(&[(1, 0, 1)]), s(&[(0, 2, 1)])).unwrap();
        assert_eq!(validate_tangential(&f, 8), Err(GermError::TangencyViolated(0)));
        // t^3 + t^2 (t + xi)^2
        let phi = s(&[(0, 3, 1)])
            .add(&s(&[(0, 2, 1)]).mul(&xt().pow(2)).unwrap())
            .unwrap();
        let f = MapGerm::new(xt(), phi).unwrap();
        assert!(validate_tangential(&f, 8).is_ok());
        let f = MapGerm::new(s(&[(0, 1, 1)]), s(&[(0, 2, 1)])).unwrap();
        assert_eq!(validate_tangential(&f, 8), Err(GermError::SingularSupport));
        let f = MapGerm::new(s(&[(1, 0, 1), (0, 2, 1)]), s(&[(0, 3, 1)])).unwrap();
        assert_eq!(validate_tangential(&f, 8), Err(GermError::NotImmersedFiber));
    }

    #[test]
    fn prenormal_examples() {
        let f = MapGerm::new(xt(), s(&[(1, 2, 1)])).unwrap();
        let pf = to_prenormal(&validate_tangential(&f, 8).unwrap()).unwrap();
        assert_eq!(pf.phi(), &s(&[(1, 2, 1)]));
        assert!(pf.alpha().is_zero());
        assert_eq!(pf.k_at(1), int(1));
        assert!(pf.k_at(0).is_zero());

        let phi = s(&[(0, 2, 1)]).mul(&xt()).unwrap().add(&s(&[(0, 4, 1), (0, 5, 1)])).unwrap();
        let pf = PrenormalForm::from_phi(phi).unwrap();
        assert_eq!(pf.alpha(), &int(1));
        assert_eq!(pf.k_at(1), int(1));
    }

    #[test]
    fn straightens_a_bent_support() {
        // (x, y) -> (x, y + x^2) applied to (xi + t, t^2)
        let f = MapGerm::new(xt(), s(&[(0, 2, 1)])).unwrap();
        let bent = f.compose_left(&s(&[(1, 0, 1)]), &s(&[(0, 1, 1), (2, 0, 1)]));
        let pf = to_prenormal(&validate_tangential(&bent, 8).unwrap()).unwrap();
        assert!(!pf.k_at(0).is_zero());
        let again = to_prenormal(&validate_tangential(&pf.map_germ(), 8).unwrap()).unwrap();
        assert_eq!(again, pf);
    }

    #[test]
    fn vertical_support_is_rotated() {
        let f = MapGerm::new(s(&[(0, 2, 1)]), xt().neg()).unwrap();
        let tf = validate_tangential(&f, 8).unwrap();
        let pf = to_prenormal(&tf).unwrap();
        assert!(!pf.k_at(0).is_zero());
    }

    #[test]
    fn jacobian_and_criminant() {
        let phi = s(&[(1, 2, 1)]);
        let f = MapGerm::prenormal(&phi);
        let j = jacobian_det(&f);
        let expected = phi.diff(Var::T).sub(&phi.diff(Var::Xi)).unwrap();
        assert_eq!(j, expected);
        let c = criminant_equation(&PrenormalForm::from_phi(phi).unwrap());
        assert_eq!(c.h, Series2::from_ints(&[(1, 0, 2), (0, 1, -1)], Truncation::TotalDegree(10)));
        let c = criminant_equation(&PrenormalForm::from_phi(s(&[(0, 2, 1)])).unwrap());
        assert_eq!(c.h, Series2::from_ints(&[(0, 0, 2)], Truncation::TotalDegree(10)));
        let f = MapGerm::new(s(&[(1, 0, 1)]), s(&[(0, 3, 1)])).unwrap();
        assert_eq!(jacobian_det(&f), Series2::from_ints(&[(0, 2, 3)], Truncation::TotalDegree(11)));
    }

    #[test]
    fn xi_psi_conversion() {
        let psi = s(&[(1, 2, 1), (0, 4, 1)]);
        let f = MapGerm::from_xi_psi(&psi);
        let pf = PrenormalForm::from_phi(f.q.clone()).unwrap();
        assert_eq!(pf.psi(), psi);
    }
}

//! Miniversal tangential deformations, swallowtail discriminants of the
//! `Q_lambda` family and bifurcation grids.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::catalog::SingularityClass;
use crate::classify::classify_prenormal;
use crate::envelope::{trace_numeric, EnvelopeSketch, TraceBox};
use crate::error::{ClassifyError, DeformError};
use crate::germ::PrenormalForm;
use crate::poly::{resultant, Poly};
use crate::series::{rat_from_str, rat_to_string, ser_rat_vec, Coefficient, Mono, Series2, Truncation};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DeformationSpec {
    pub for_class: SingularityClass,
    #[serde(serialize_with = "ser_monos")]
    pub directions: Vec<Mono>,
    pub param_names: Vec<String>,
}

fn ser_monos<S: serde::Serializer>(v: &[Mono], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|m| m.render()))
}

impl DeformationSpec {
    pub fn tau(&self) -> usize {
        self.directions.len()
    }
}

pub fn miniversal_spec(class: SingularityClass) -> Result<DeformationSpec, DeformError> {
    let directions = class
        .miniversal_directions()
        .ok_or_else(|| DeformError::NoFiniteSpec(class.name()))?;
    let param_names = (1..=directions.len()).map(|i| format!("l{i}")).collect();
    Ok(DeformationSpec {
        for_class: class,
        directions,
        param_names,
    })
}

/// `phi + sum lambda_i e_i`, revalidated as a prenormal form.
pub fn apply(pf: &PrenormalForm, spec: &DeformationSpec, lambda: &[Coefficient]) -> Result<PrenormalForm, DeformError> {
    if lambda.len() != spec.tau() {
        return Err(DeformError::ParamCount {
            expected: spec.tau(),
            got: lambda.len(),
        });
    }
    let tr = pf.truncation();
    let mut phi = pf.phi().clone();
    for (e, l) in spec.directions.iter().zip(lambda) {
        if e.t < 2 {
            return Err(DeformError::NotTangential(e.render()));
        }
        if !l.is_zero() {
            phi = phi.add(&Series2::monomial(*e, l.clone(), tr))?;
        }
    }
    Ok(PrenormalForm::from_phi(phi)?)
}

/// Deformation terms in the form taken by the numeric tracer.
pub fn directions_with(spec: &DeformationSpec, lambda: &[Coefficient], tr: Truncation) -> Vec<(Series2, Coefficient)> {
    spec.directions
        .iter()
        .zip(lambda)
        .map(|(e, l)| (Series2::monomial(*e, Coefficient::one(), tr), l.clone()))
        .collect()
}

/// `Q(x) = x^(n+1) + l_n x^(n-1) + ... + l_1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QFamily {
    pub n: usize,
    #[serde(serialize_with = "ser_rat_vec")]
    pub lambda: Vec<Coefficient>,
}

impl QFamily {
    pub fn new(lambda: Vec<Coefficient>) -> Self {
        QFamily { n: lambda.len(), lambda }
    }

    pub fn poly(&self) -> Poly {
        let mut c = self.lambda.clone();
        c.resize(self.n, Coefficient::zero());
        c.push(Coefficient::zero());
        c.push(Coefficient::one());
        Poly::new(c)
    }
}

/// `resultant(Q, Q')` with monic `Q`; vanishes exactly when `Q` has a
/// multiple root.
pub fn q_discriminant(qf: &QFamily) -> Coefficient {
    let q = qf.poly();
    resultant(&q, &q.derivative())
}

/// One axis of a parameter grid: `count` evenly spaced rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub name: String,
    pub start: Coefficient,
    pub end: Coefficient,
    pub count: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<Coefficient> {
        if self.count == 1 {
            return vec![self.start.clone()];
        }
        let step = (&self.end - &self.start) / Coefficient::from_integer((self.count as i64 - 1).into());
        (0..self.count)
            .map(|i| &self.start + &step * Coefficient::from_integer((i as i64).into()))
            .collect()
    }
}

/// Parses `l1=a:b:n,l2=v,...`; a bare value is a single-point axis.
pub fn parse_grid(spec: &str) -> Result<Vec<Axis>, DeformError> {
    let bad = |m: &str| DeformError::BadGrid(m.to_string());
    let mut axes: Vec<Axis> = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, range) = part.split_once('=').ok_or_else(|| bad(part))?;
        let name = name.trim().to_string();
        if axes.iter().any(|a| a.name == name) {
            return Err(bad(&format!("axis {name} given twice")));
        }
        let fields: Vec<&str> = range.split(':').collect();
        let num = |s: &str| rat_from_str(s).ok_or_else(|| bad(s));
        let axis = match fields.as_slice() {
            [v] => Axis {
                name,
                start: num(v)?,
                end: num(v)?,
                count: 1,
            },
            [a, b, n] => {
                let count: usize = n.trim().parse().map_err(|_| bad(n))?;
                if count == 0 {
                    return Err(bad("axis count must be positive"));
                }
                Axis {
                    name,
                    start: num(a)?,
                    end: num(b)?,
                    count,
                }
            }
            _ => return Err(bad(part)),
        };
        axes.push(axis);
    }
    Ok(axes)
}

/// Parses `l1=v,...` into a full parameter vector; unnamed parameters are 0.
pub fn parse_lambda(spec: &str, names: &[String]) -> Result<Vec<Coefficient>, DeformError> {
    let axes = parse_grid(spec)?;
    let mut out = vec![Coefficient::zero(); names.len()];
    for a in axes {
        if a.count != 1 {
            return Err(DeformError::BadGrid(format!("{} must be a single value", a.name)));
        }
        let i = names
            .iter()
            .position(|n| *n == a.name)
            .ok_or_else(|| DeformError::BadGrid(format!("unknown parameter {}", a.name)))?;
        out[i] = a.start;
    }
    Ok(out)
}

/// All grid points in row-major order, the first parameter slowest.
/// Parameters without an axis are held at 0.
pub fn grid_points(axes: &[Axis], names: &[String]) -> Result<Vec<Vec<Coefficient>>, DeformError> {
    for a in axes {
        if !names.contains(&a.name) {
            return Err(DeformError::BadGrid(format!("unknown parameter {}", a.name)));
        }
    }
    let values: Vec<Vec<Coefficient>> = names
        .iter()
        .map(|n| match axes.iter().find(|a| a.name == *n) {
            Some(a) => a.values(),
            None => vec![Coefficient::zero()],
        })
        .collect();
    let mut points = vec![Vec::new()];
    for vs in &values {
        points = points
            .into_iter()
            .flat_map(|p| {
                vs.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(v.clone());
                    q
                })
            })
            .collect();
    }
    Ok(points)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GridPoint {
    #[serde(serialize_with = "ser_rat_vec")]
    pub lambda: Vec<Coefficient>,
    /// Class name, or `Inconclusive` / `Error: ...`.
    pub class: String,
    #[serde(skip)]
    pub parsed: Option<SingularityClass>,
    pub certified_to_jet: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub self_tangency: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BifurcationMap {
    pub class: SingularityClass,
    pub param_names: Vec<String>,
    pub points: Vec<GridPoint>,
}

impl BifurcationMap {
    pub fn to_csv(&self) -> String {
        let mut s = self.param_names.join(",");
        s.push_str(",class,certifiedToJet\n");
        for p in &self.points {
            for l in &p.lambda {
                s.push_str(&rat_to_string(l));
                s.push(',');
            }
            s.push_str(&p.class.replace(',', ""));
            s.push(',');
            if let Some(j) = p.certified_to_jet {
                s.push_str(&j.to_string());
            }
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct BifurcationOptions {
    pub max_jet: u32,
    pub truncation: Truncation,
    /// Trace box and resolution for the numeric self-tangency check.
    pub tangency: Option<(TraceBox, usize)>,
}

impl Default for BifurcationOptions {
    fn default() -> Self {
        BifurcationOptions {
            max_jet: crate::series::DEFAULT_TRUNCATION,
            truncation: Truncation::TotalDegree(crate::series::DEFAULT_TRUNCATION),
            tangency: None,
        }
    }
}

/// Classifies the miniversal deformation of `class`'s normal form at every
/// grid point.
pub fn bifurcation_grid(class: SingularityClass, axes: &[Axis], opts: &BifurcationOptions) -> Result<BifurcationMap, DeformError> {
    let spec = miniversal_spec(class)?;
    let phi = class
        .normal_form(opts.truncation)
        .ok_or_else(|| DeformError::NoFiniteSpec(class.name()))?;
    let pf = PrenormalForm::from_phi(phi)?;
    let points = grid_points(axes, &spec.param_names)?
        .into_iter()
        .map(|lambda| {
            let deformed = apply(&pf, &spec, &lambda);
            let (name, parsed, cert) = match deformed.as_ref().map_err(|e| e.to_string()).and_then(|d| {
                classify_prenormal(d, opts.max_jet).map_err(|e| match e {
                    ClassifyError::Inconclusive(_) => "Inconclusive".to_string(),
                    other => format!("Error: {other}"),
                })
            }) {
                Ok(rep) => (rep.class.name(), Some(rep.class), Some(rep.certified_to_jet)),
                Err(m) => (m, None, None),
            };
            let self_tangency = opts.tangency.map(|(bbox, res)| {
                trace_numeric(&pf, &directions_with(&spec, &lambda, opts.truncation), bbox, res)
                    .map(|sk| near_self_tangency(&sk, 2.0 * bbox.diagonal() / res as f64))
                    .unwrap_or(false)
            });
            GridPoint {
                lambda,
                class: name,
                parsed,
                certified_to_jet: cert,
                self_tangency,
            }
        })
        .collect();
    Ok(BifurcationMap {
        class,
        param_names: spec.param_names,
        points,
    })
}

/// Expected class on the `S1,n` grid: the first nonzero `l_i` multiplies
/// `t^(2i+1)` and leaves `S1,(i-1)`, read as `II` when `i = 1`.
pub fn flag_rule(n: u32, lambda: &[Coefficient]) -> SingularityClass {
    match lambda.iter().position(|l| !l.is_zero()) {
        Some(0) => SingularityClass::II,
        Some(i) => SingularityClass::S1(i as u32),
        None => SingularityClass::S1(n),
    }
}

/// True when two parts of a non-support polyline, well apart along the
/// curve, come within `eps` with nearly parallel tangents.
pub fn near_self_tangency(sketch: &EnvelopeSketch, eps: f64) -> bool {
    const PARALLEL: f64 = 0.1;
    let tangent = |pl: &[(f64, f64)], i: usize| {
        let (a, b) = (pl[i.saturating_sub(1)], pl[(i + 1).min(pl.len() - 1)]);
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let n = dx.hypot(dy);
        if n == 0.0 {
            (0.0, 0.0)
        } else {
            (dx / n, dy / n)
        }
    };
    let curves: Vec<&Vec<(f64, f64)>> = sketch.polylines.iter().skip(1).collect();
    for (ci, a) in curves.iter().enumerate() {
        for b in &curves[ci..] {
            let same = std::ptr::eq(*a, *b);
            for i in 0..a.len() {
                for j in 0..b.len() {
                    if same {
                        // skip neighbours along the curve itself
                        let arc: f64 = a[i.min(j)..=i.max(j)].windows(2).map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1)).sum();
                        if j <= i || arc < 4.0 * eps {
                            continue;
                        }
                    }
                    let (p, q) = (a[i], b[j]);
                    if (p.0 - q.0).hypot(p.1 - q.1) > eps {
                        continue;
                    }
                    let (u, v) = (tangent(a, i), tangent(b, j));
                    if (u.0 * v.1 - u.1 * v.0).abs() < PARALLEL {
                        return true;
                    }
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{int, rat};

    const N: Truncation = Truncation::TotalDegree(16);

    fn nf(c: SingularityClass) -> PrenormalForm {
        PrenormalForm::from_phi(c.normal_form(N).unwrap()).unwrap()
    }

    #[test]
    fn table_specs() {
        let s = miniversal_spec(SingularityClass::S1(2)).unwrap();
        assert_eq!(s.directions, vec![Mono::new(0, 3), Mono::new(0, 5)]);
        let s = miniversal_spec(SingularityClass::T(3)).unwrap();
        assert_eq!(s.directions, vec![Mono::new(0, 2), Mono::new(1, 2), Mono::new(2, 2)]);
        assert_eq!(miniversal_spec(SingularityClass::II).unwrap().tau(), 0);
        assert!(matches!(miniversal_spec(SingularityClass::U), Err(DeformError::NoFiniteSpec(_))));
    }

    #[test]
    fn apply_and_reclassify() {
        let c = |pf: &PrenormalForm| classify_prenormal(pf, 16).unwrap().class;
        let s11 = SingularityClass::S1(1);
        let spec = miniversal_spec(s11).unwrap();
        assert_eq!(apply(&nf(s11), &spec, &[int(0)]).unwrap(), nf(s11));
        assert_eq!(c(&apply(&nf(s11), &spec, &[rat(1, 10)]).unwrap()), SingularityClass::II);
        let t1 = SingularityClass::T(1);
        let spec = miniversal_spec(t1).unwrap();
        assert_eq!(c(&apply(&nf(t1), &spec, &[rat(-1, 3)]).unwrap()), SingularityClass::I);
        assert!(matches!(apply(&nf(t1), &spec, &[]), Err(DeformError::ParamCount { expected: 1, got: 0 })));
        let bad = DeformationSpec {
            for_class: t1,
            directions: vec![Mono::new(1, 1)],
            param_names: vec!["l1".into()],
        };
        assert!(matches!(apply(&nf(t1), &bad, &[int(1)]), Err(DeformError::NotTangential(_))));
    }

    #[test]
    fn cubic_discriminant() {
        // resultant(x^3 + p x + q, 3x^2 + p) = 4p^3 + 27q^2
        for (p, q) in [(1, 2), (-3, 2), (0, 5), (-7, 3)] {
            let d = q_discriminant(&QFamily::new(vec![int(q), int(p)]));
            assert_eq!(d, int(4 * p * p * p + 27 * q * q));
        }
        assert!(q_discriminant(&QFamily::new(vec![int(0)])).is_zero());
        assert!(!q_discriminant(&QFamily::new(vec![int(1)])).is_zero());
    }

    #[test]
    fn grids() {
        let axes = parse_grid("l1=-1:1:3, l2=1/2").unwrap();
        assert_eq!(axes[0].values(), vec![int(-1), int(0), int(1)]);
        let names: Vec<String> = vec!["l1".into(), "l2".into(), "l3".into()];
        let pts = grid_points(&axes, &names).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[2], vec![int(1), rat(1, 2), int(0)]);
        assert!(parse_grid("l1=1:2").is_err());
        assert!(parse_grid("l1=0:1:0").is_err());
        assert!(grid_points(&parse_grid("q=1").unwrap(), &names).is_err());
        assert_eq!(parse_lambda("l2=3", &names).unwrap(), vec![int(0), int(3), int(0)]);
    }

    #[test]
    fn s1_2_grid_follows_flag() {
        let axes = parse_grid("l1=-1:1:3,l2=-1:1:3").unwrap();
        let map = bifurcation_grid(SingularityClass::S1(2), &axes, &BifurcationOptions::default()).unwrap();
        assert_eq!(map.points.len(), 9);
        for p in &map.points {
            assert_eq!(p.parsed, Some(flag_rule(2, &p.lambda)), "{:?}", p.lambda);
        }
        assert!(map.to_csv().starts_with("l1,l2,class,certifiedToJet\n"));
    }

    #[test]
    fn t2_axis_lands_below() {
        // l2 on t^2 xi makes k1 nonzero at the origin: II, below T2 via T1
        let axes = parse_grid("l2=1/2").unwrap();
        let map = bifurcation_grid(SingularityClass::T(2), &axes, &BifurcationOptions::default()).unwrap();
        let got = map.points[0].parsed.unwrap();
        assert_eq!(got, SingularityClass::II);
        assert!(crate::catalog::adjacency(SingularityClass::T(2), got));
    }
}

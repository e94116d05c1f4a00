//! Envelopes: exact criminant branches pushed through the family map, and a
//! floating-point contour tracer for plots.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::error::{EnvelopeError, PuiseuxError};
use crate::field::Field;
use crate::germ::{criminant_equation, PrenormalForm};
use crate::puiseux::{
    branch_side, branches, contact_order, param_branch_order, BranchField, PlaneBranch, PuiseuxBranch, Side,
};
use crate::series::{rat_to_string, Coefficient, Series2};
use crate::univariate::{eval_series2, USeries};

fn ser_opt_ratio<S: Serializer>(r: &Option<Rational64>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) if r.is_integer() => s.serialize_some(&r.numer().to_string()),
        Some(r) => s.serialize_some(&format!("{}/{}", r.numer(), r.denom())),
        None => s.serialize_none(),
    }
}

/// One envelope branch besides the support.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeBranch {
    pub criminant: PuiseuxBranch,
    /// Image `(X(s), Y(s))` rendered as series in the branch parameter.
    pub x: String,
    pub y: String,
    pub order: Option<(u32, u32)>,
    #[serde(serialize_with = "ser_opt_ratio")]
    pub contact: Option<Rational64>,
    pub side: Option<Side>,
    pub note: Option<String>,
    #[serde(skip)]
    pub plane: Option<PlaneBranch<Coefficient>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeReport {
    /// The support `y = 0`, parameterized as `(s, 0)`.
    #[serde(skip)]
    pub support: PlaneBranch<Coefficient>,
    pub other: Vec<EnvelopeBranch>,
    pub incomplete: bool,
}

fn render_series<F: Field>(s: &USeries<F>, coeff: impl Fn(&F) -> String) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (k, c) in s.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => "s".to_string(),
            _ => format!("s^{k}"),
        };
        let cs = coeff(c);
        parts.push(match (mono.is_empty(), cs.as_str()) {
            (true, _) => cs,
            (false, "1") => mono,
            (false, "-1") => format!("-{mono}"),
            _ => format!("{cs}*{mono}"),
        });
    }
    let mut out = if parts.is_empty() { "0".to_string() } else { parts.join(" + ").replace("+ -", "- ") };
    if let Some(p) = s.prec() {
        let _ = write!(out, " + O(s^{p})");
    }
    out
}

fn c64_text(z: &Complex64) -> String {
    if z.im == 0.0 {
        format!("{:.6}", z.re)
    } else {
        format!("({:.6}{:+.6}i)", z.re, z.im)
    }
}

fn invariants<F: Field>(pb: &PlaneBranch<F>, br: &mut EnvelopeBranch) {
    let mut notes = Vec::new();
    match param_branch_order(pb) {
        Ok(o) => br.order = Some(o),
        Err(e) => notes.push(format!("order: {e}")),
    }
    match contact_order(pb) {
        Ok(c) => br.contact = Some(c),
        Err(e) => notes.push(format!("contact: {e}")),
    }
    match branch_side(pb) {
        Ok(s) => br.side = Some(s),
        Err(e) => notes.push(format!("side: {e}")),
    }
    if !notes.is_empty() {
        br.note = Some(notes.join("; "));
    }
}

fn map_branch(phi: &Series2, b: PuiseuxBranch) -> EnvelopeBranch {
    let mut out = EnvelopeBranch {
        criminant: b.clone(),
        x: String::new(),
        y: String::new(),
        order: None,
        contact: None,
        side: None,
        note: None,
        plane: None,
    };
    if b.unresolved.is_some() {
        out.note = Some("complex conjugate pair".into());
        return out;
    }
    if b.multiplicity != 1 {
        out.note = Some(format!("cluster of multiplicity {} not separated", b.multiplicity));
        return out;
    }
    if b.is_exact() {
        let (xi, t) = b.exact_param().expect("exact branch");
        let pb = PlaneBranch {
            x: xi.add(&t),
            y: eval_series2(phi, &xi, &t),
        };
        out.x = render_series(&pb.x, rat_to_string);
        out.y = render_series(&pb.y, rat_to_string);
        invariants(&pb, &mut out);
        out.plane = Some(pb);
    } else {
        let (xi, t) = b.numeric_param();
        let pb = PlaneBranch {
            x: xi.add(&t),
            y: eval_series2(phi, &xi, &t),
        };
        out.x = render_series(&pb.x, c64_text);
        out.y = render_series(&pb.y, c64_text);
        invariants(&pb, &mut out);
    }
    out
}

/// Envelope branches of `(xi + t, phi)`: the support plus the images of the
/// branches of the criminant cofactor `h`.
pub fn envelope_branches(pf: &PrenormalForm, max_terms: usize) -> Result<EnvelopeReport, EnvelopeError> {
    let crim = criminant_equation(pf);
    let support = PlaneBranch {
        x: USeries::monomial(Coefficient::from_integer(1.into()), 1),
        y: USeries::zero(),
    };
    let mut other = Vec::new();
    let mut incomplete = false;
    if crim.h.is_zero() {
        incomplete = true;
    } else if Zero::is_zero(&crim.h.constant_term()) {
        let set = match branches(&crim.h, max_terms, BranchField::Real) {
            Ok(s) => s,
            Err(PuiseuxError::NotAtOrigin) => unreachable!("constant term checked"),
            Err(e) => return Err(e.into()),
        };
        incomplete = set.incomplete;
        for b in set.branches {
            other.push(map_branch(pf.phi(), b));
        }
    }
    Ok(EnvelopeReport {
        support,
        other,
        incomplete,
    })
}

/// Source rectangle `[xi0, xi1] x [t0, t1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceBox {
    pub xi: (f64, f64),
    pub t: (f64, f64),
}

impl TraceBox {
    pub fn square(r: f64) -> Self {
        TraceBox {
            xi: (-r, r),
            t: (-r, r),
        }
    }

    pub fn diagonal(&self) -> f64 {
        (self.xi.1 - self.xi.0).hypot(self.t.1 - self.t.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SketchMeta {
    pub family: String,
    pub lambda: Vec<String>,
    #[serde(rename = "box")]
    pub bbox: TraceBox,
    pub res: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeSketch {
    /// Target-plane polylines; the first is the support when the box meets
    /// `t = 0`.
    pub polylines: Vec<Vec<(f64, f64)>>,
    /// Source points `(xi, t)` matching `polylines`.
    #[serde(skip)]
    pub preimages: Vec<Vec<(f64, f64)>>,
    pub meta: SketchMeta,
}

/// Joins marching-squares segments, keyed by grid edge, into polylines.
fn join_segments(segs: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, &(a, b)) in segs.iter().enumerate() {
        adj.entry(a).or_default().push(k);
        adj.entry(b).or_default().push(k);
    }
    let mut used = vec![false; segs.len()];
    let mut out = Vec::new();
    let walk = |start: usize, used: &mut Vec<bool>| -> Option<Vec<usize>> {
        let mut chain = vec![start];
        let mut cur = start;
        loop {
            let next = adj[&cur].iter().copied().find(|&k| !used[k]);
            let Some(k) = next else { break };
            used[k] = true;
            let (a, b) = segs[k];
            cur = if a == cur { b } else { a };
            chain.push(cur);
        }
        (chain.len() > 1).then_some(chain)
    };
    // open chains first, from their lower end, then closed loops
    let ends: Vec<usize> = adj.iter().filter(|(_, v)| v.len() == 1).map(|(k, _)| *k).collect();
    for e in ends {
        if let Some(c) = walk(e, &mut used) {
            out.push(c);
        }
    }
    let all: Vec<usize> = adj.keys().copied().collect();
    for e in all {
        if let Some(c) = walk(e, &mut used) {
            out.push(c);
        }
    }
    out
}

/// Marching-squares trace of the criminant of `phi + sum lambda_i e_i` over
/// `bbox`, mapped through `(xi + t, phi)`.
///
/// The support is added as its own polyline; the remaining polylines
/// contour the cofactor `h = g / t`.
pub fn trace_numeric(
    pf: &PrenormalForm,
    deformation: &[(Series2, Coefficient)],
    bbox: TraceBox,
    res: usize,
) -> Result<EnvelopeSketch, EnvelopeError> {
    if res < 16 {
        return Err(EnvelopeError::ResolutionTooLow(res));
    }
    if !(bbox.xi.1 > bbox.xi.0 && bbox.t.1 > bbox.t.0) {
        return Err(EnvelopeError::EmptyBox);
    }
    let mut phi = pf.phi().clone();
    for (e, l) in deformation {
        phi = phi.add(&e.scale(l))?;
    }
    let deformed = PrenormalForm::from_phi(phi.clone()).map_err(|_| {
        EnvelopeError::Series(crate::error::SeriesError::NotDivisible)
    })?;
    let h = criminant_equation(&deformed).h;
    let h_terms = h.to_f64_terms();
    let phi_terms = phi.to_f64_terms();
    let eval = |terms: &[(u32, u32, f64)], x: f64, t: f64| {
        terms.iter().map(|&(i, j, c)| c * x.powi(i as i32) * t.powi(j as i32)).sum::<f64>()
    };
    let n = res;
    let dx = (bbox.xi.1 - bbox.xi.0) / n as f64;
    let dt = (bbox.t.1 - bbox.t.0) / n as f64;
    let px = |i: usize| bbox.xi.0 + i as f64 * dx;
    let pt = |j: usize| bbox.t.0 + j as f64 * dt;
    let vals: Vec<f64> = (0..=n)
        .flat_map(|j| (0..=n).map(move |i| (i, j)))
        .map(|(i, j)| eval(&h_terms, px(i), pt(j)))
        .collect();
    let v = |i: usize, j: usize| vals[j * (n + 1) + i];
    // edge ids: 2*(j*(n+1)+i) horizontal from (i,j), +1 vertical from (i,j)
    let hid = |i: usize, j: usize| 2 * (j * (n + 1) + i);
    let vid = |i: usize, j: usize| 2 * (j * (n + 1) + i) + 1;
    let mut segs: Vec<(usize, usize)> = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let c = [v(i, j), v(i + 1, j), v(i + 1, j + 1), v(i, j + 1)];
            let pos: Vec<bool> = c.iter().map(|&x| x >= 0.0).collect();
            let case = pos.iter().enumerate().fold(0u8, |acc, (k, &p)| acc | ((p as u8) << k));
            // edges: bottom, right, top, left
            let e = [hid(i, j), vid(i + 1, j), hid(i, j + 1), vid(i, j)];
            let centre_pos = c.iter().sum::<f64>() >= 0.0;
            let pairs: &[(usize, usize)] = match case {
                0 | 15 => &[],
                1 | 14 => &[(3, 0)],
                2 | 13 => &[(0, 1)],
                3 | 12 => &[(3, 1)],
                4 | 11 => &[(1, 2)],
                6 | 9 => &[(0, 2)],
                7 | 8 => &[(3, 2)],
                5 => {
                    if centre_pos {
                        &[(3, 2), (0, 1)]
                    } else {
                        &[(3, 0), (1, 2)]
                    }
                }
                10 => {
                    if centre_pos {
                        &[(3, 0), (1, 2)]
                    } else {
                        &[(3, 2), (0, 1)]
                    }
                }
                _ => unreachable!(),
            };
            for &(a, b) in pairs {
                segs.push((e[a], e[b]));
            }
        }
    }
    let crossing = |id: usize| -> (f64, f64) {
        let node = id / 2;
        let (i, j) = (node % (n + 1), node / (n + 1));
        let (i2, j2) = if id.is_multiple_of(2) { (i + 1, j) } else { (i, j + 1) };
        let (a, b) = (v(i, j), v(i2, j2));
        let s = if a == b { 0.5 } else { a / (a - b) };
        let s = s.clamp(0.0, 1.0);
        (px(i) + s * (px(i2) - px(i)), pt(j) + s * (pt(j2) - pt(j)))
    };
    let mut pre: Vec<Vec<(f64, f64)>> = Vec::new();
    if bbox.t.0 <= 0.0 && bbox.t.1 >= 0.0 {
        pre.push((0..=n).map(|i| (px(i), 0.0)).collect());
    }
    for chain in join_segments(&segs) {
        pre.push(chain.into_iter().map(crossing).collect());
    }
    let polylines = pre
        .iter()
        .map(|pl| pl.iter().map(|&(x, t)| (x + t, eval(&phi_terms, x, t))).collect())
        .collect();
    Ok(EnvelopeSketch {
        polylines,
        preimages: pre,
        meta: SketchMeta {
            family: phi.to_string(),
            lambda: deformation.iter().map(|(_, l)| rat_to_string(l)).collect(),
            bbox,
            res,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Svg,
    Csv,
}

fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

pub fn emit(sketch: &EnvelopeSketch, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => {
            let mut out = String::from("polyline,x,y\n");
            for (k, pl) in sketch.polylines.iter().enumerate() {
                for &(x, y) in pl {
                    // shortest round-trip text; +0 so that -0 prints as 0
                    let _ = writeln!(out, "{k},{},{}", x + 0.0, y + 0.0);
                }
            }
            out.into_bytes()
        }
        Format::Svg => {
            let pts = sketch.polylines.iter().flatten();
            let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
            for &(x, y) in pts {
                x0 = x0.min(x);
                x1 = x1.max(x);
                y0 = y0.min(-y);
                y1 = y1.max(-y);
            }
            if !x0.is_finite() {
                (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
            }
            // keep a flat picture visible
            let span = (x1 - x0).max(y1 - y0).max(1e-9);
            let (w, h) = ((x1 - x0).max(span * 0.01), (y1 - y0).max(span * 0.01));
            let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
            let (x0, y0) = (cx - w / 2.0, cy - h / 2.0);
            let stroke = 0.005 * w.hypot(h);
            let mut out = String::new();
            out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
            let _ = writeln!(
                out,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\">",
                num(x0),
                num(y0),
                num(w),
                num(h)
            );
            for pl in &sketch.polylines {
                let mut d = String::new();
                for (k, &(x, y)) in pl.iter().enumerate() {
                    let _ = write!(d, "{}{} {}", if k == 0 { "M" } else { " L" }, num(x), num(-y));
                }
                let _ = writeln!(
                    out,
                    "<path d=\"{d}\" fill=\"none\" stroke=\"black\" stroke-width=\"{}\"/>",
                    num(stroke)
                );
            }
            out.push_str("</svg>\n");
            out.into_bytes()
        }
    }
}

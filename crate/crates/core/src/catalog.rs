//! Singularity classes: names, codimensions, normal forms, miniversal
//! directions and the adjacency graph.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::ClassifyError;
use crate::germ::MapGerm;
use crate::series::{rat, Coefficient, Mono, Series2, Truncation};
use crate::tanspace::VectorMono;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn symbol(&self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    fn value(&self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SingularityClass {
    I,
    II,
    S1(u32),
    T(u32),
    S2_2,
    S2_3(Sign),
    S2_4,
    /// `S_n` with `n >= 3`.
    Sge3(u32),
    S1Inf,
    TInf,
    SInf,
    U,
}

/// Codimension value: finite, infinite, or not tabulated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Codim {
    Finite(u32),
    Infinite,
    Unknown,
}

impl Serialize for Codim {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Codim::Finite(n) => s.serialize_u32(*n),
            Codim::Infinite => s.serialize_str("infinite"),
            Codim::Unknown => s.serialize_none(),
        }
    }
}

use SingularityClass as C;

impl SingularityClass {
    /// `(c, tau)`.
    pub fn codims(&self) -> (Codim, Codim) {
        use Codim::*;
        match self {
            C::I => (Finite(0), Finite(0)),
            C::II => (Finite(1), Finite(0)),
            C::S1(n) => (Finite(n + 1), Finite(*n)),
            C::T(n) => (Finite(2 * n + 1), Finite(*n)),
            C::S2_2 => (Finite(3), Finite(2)),
            C::S2_3(_) => (Finite(4), Finite(3)),
            C::S2_4 => (Finite(5), Finite(4)),
            C::S1Inf | C::TInf | C::SInf => (Infinite, Infinite),
            C::Sge3(_) | C::U => (Unknown, Unknown),
        }
    }

    pub fn codim(&self) -> Codim {
        self.codims().0
    }

    pub fn tang_codim(&self) -> Codim {
        self.codims().1
    }

    /// Rows of the simple-germ table.
    pub fn simple(&self) -> bool {
        matches!(self, C::I | C::II | C::S1(_) | C::T(_) | C::S2_2 | C::S2_3(_) | C::S2_4)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, C::S1Inf | C::TInf | C::SInf)
    }

    pub fn name(&self) -> String {
        match self {
            C::I => "I".into(),
            C::II => "II".into(),
            C::S1(n) => format!("S1,{n}"),
            C::T(n) => format!("T{n}"),
            C::S2_2 => "S2,2".into(),
            C::S2_3(s) => format!("S2,3{}", s.symbol()),
            C::S2_4 => "S2,4".into(),
            C::Sge3(n) => format!("S{n}"),
            C::S1Inf => "S1,inf".into(),
            C::TInf => "Tinf".into(),
            C::SInf => "Sinf".into(),
            C::U => "U".into(),
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            C::I => "I",
            C::II => "II",
            C::S1(_) => "S1",
            C::T(_) => "T",
            C::S2_2 => "S2_2",
            C::S2_3(_) => "S2_3",
            C::S2_4 => "S2_4",
            C::Sge3(_) => "S_ge3",
            C::S1Inf => "S1_INF",
            C::TInf => "T_INF",
            C::SInf => "S_INF",
            C::U => "U",
        }
    }

    fn index(&self) -> Option<u32> {
        match self {
            C::S1(n) | C::T(n) | C::Sge3(n) => Some(*n),
            _ => None,
        }
    }

    /// Second component `phi` of the normal form `(xi + t, phi)`.
    pub fn normal_form(&self, trunc: Truncation) -> Option<Series2> {
        let s = |terms: &[(u32, u32, i64)]| Series2::from_ints(terms, trunc);
        // t^2 (t + xi)
        let base = [(0, 3, 1), (1, 2, 1)];
        let with = |extra: &[(u32, u32, i64)]| {
            let mut v = base.to_vec();
            v.extend_from_slice(extra);
            s(&v)
        };
        Some(match self {
            C::I => s(&[(0, 2, 1)]),
            C::II => s(&[(1, 2, 1)]),
            C::S1(n) => with(&[(0, 4, 1), (0, 2 * n + 3, 1)]),
            C::T(n) => {
                let xt = s(&[(1, 0, 1), (0, 1, 1)]);
                s(&[(0, 3, 1)]).add(&xt.pow(n + 1).mul_t_pow(2)).ok()?
            }
            C::S2_2 => with(&[(0, 5, 1), (0, 6, 1)]),
            C::S2_3(sign) => with(&[(0, 5, 1), (0, 9, sign.value())]),
            C::S2_4 => with(&[(0, 5, 1)]),
            C::Sge3(n) => with(&[(0, n + 3, 1), (0, n + 4, 1)]),
            C::S1Inf => with(&[(0, 4, 1)]),
            C::TInf => s(&[(0, 3, 1)]),
            C::SInf => with(&[]),
            C::U => return Some(u_family(&rat(2, 1), trunc).q),
        })
    }

    /// Factored text of `phi` as printed by `normal-form`; `None` for `U`,
    /// whose representative is given in expanded form.
    pub fn normal_form_text(&self) -> Option<String> {
        let base = "t^2*(t+xi)";
        Some(match self {
            C::I => "t^2".into(),
            C::II => "t^2*xi".into(),
            C::S1(n) => format!("{base} + t^4 + t^{}", 2 * n + 3),
            C::T(n) => format!("t^3 + t^2*(t+xi)^{}", n + 1),
            C::S2_2 => format!("{base} + t^5 + t^6"),
            C::S2_3(sign) => format!("{base} + t^5 {} t^9", sign.symbol()),
            C::S2_4 => format!("{base} + t^5"),
            C::Sge3(n) => format!("{base} + t^{} + t^{}", n + 3, n + 4),
            C::S1Inf => format!("{base} + t^4"),
            C::TInf => "t^3".into(),
            C::SInf => base.into(),
            C::U => return None,
        })
    }

    pub fn normal_form_germ(&self, trunc: Truncation) -> Option<MapGerm> {
        self.normal_form(trunc).map(|phi| MapGerm::prenormal(&phi))
    }

    /// Tangential miniversal directions `e_i`, added to `phi` as `lambda_i e_i`.
    pub fn miniversal_directions(&self) -> Option<Vec<Mono>> {
        let t = |k| Mono::new(0, k);
        Some(match self {
            C::I | C::II => vec![],
            C::S1(n) => (1..=*n).map(|i| t(2 * i + 1)).collect(),
            C::T(n) => (0..*n).map(|i| Mono::new(i, 2)).collect(),
            C::S2_2 => vec![t(3), t(4)],
            C::S2_3(_) => vec![t(3), t(4), t(6)],
            C::S2_4 => vec![t(3), t(4), t(6), t(9)],
            _ => return None,
        })
    }

    /// Non-tangential vectors completing the table directions to a
    /// complement of the tangent space.
    pub fn extra_directions(&self) -> Vec<VectorMono> {
        match self {
            C::T(n) => (0..=*n).map(|j| VectorMono::second(Mono::new(j, 1))).collect(),
            C::I => vec![],
            _ => vec![VectorMono::second(Mono::new(0, 1))],
        }
    }

    /// Classes this one is directly adjacent to. `bound` caps the index of
    /// the infinite families of targets.
    pub fn adjacent(&self, bound: u32) -> Vec<SingularityClass> {
        match *self {
            C::I => vec![],
            C::II => vec![C::I],
            C::T(1) => vec![C::II],
            C::T(n) => vec![C::T(n - 1)],
            C::S1(1) => vec![C::II],
            C::S1(n) => vec![C::S1(n - 1)],
            C::S2_2 => vec![C::S1(1)],
            C::S2_3(_) => vec![C::S2_2],
            C::S2_4 => vec![C::S2_3(Sign::Plus), C::S2_3(Sign::Minus)],
            C::Sge3(n) => {
                let mut v = vec![if n == 3 { C::S2_4 } else { C::Sge3(n - 1) }];
                v.extend((1..=bound).map(C::S1));
                v
            }
            C::SInf => (3..=bound.max(3)).map(C::Sge3).collect(),
            C::S1Inf => (1..=bound).map(C::S1).collect(),
            C::TInf => (1..=bound).map(C::T).collect(),
            C::U => vec![C::SInf, C::S1Inf, C::TInf],
        }
    }
}

impl fmt::Display for SingularityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for SingularityClass {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let raw = s.trim();
        let norm: String = raw.chars().filter(|c| !c.is_whitespace() && *c != '_').collect();
        let bad = || ClassifyError::UnknownClass(raw.to_string());
        let idx = |x: &str| x.parse::<u32>().ok().filter(|n| *n >= 1).ok_or_else(bad);
        Ok(match norm.as_str() {
            "I" => C::I,
            "II" => C::II,
            "S2,2" => C::S2_2,
            "S2,3+" => C::S2_3(Sign::Plus),
            "S2,3-" => C::S2_3(Sign::Minus),
            "S2,4" => C::S2_4,
            "S1,inf" | "S1,INF" => C::S1Inf,
            "Tinf" | "TINF" => C::TInf,
            "Sinf" | "SINF" => C::SInf,
            "U" => C::U,
            x if x.starts_with("S1,") => C::S1(idx(&x[3..])?),
            x if x.starts_with('T') => C::T(idx(&x[1..])?),
            x if x.starts_with('S') => {
                let n = idx(&x[1..])?;
                if n < 3 {
                    return Err(bad());
                }
                C::Sge3(n)
            }
            _ => return Err(bad()),
        })
    }
}

impl Serialize for SingularityClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (c, tau) = self.codims();
        let mut st = s.serialize_struct("SingularityClass", 7)?;
        st.serialize_field("name", &self.name())?;
        st.serialize_field("tag", self.tag())?;
        st.serialize_field("n", &self.index())?;
        st.serialize_field(
            "sign",
            &match self {
                C::S2_3(sg) => Some(sg.symbol().to_string()),
                _ => None,
            },
        )?;
        st.serialize_field("codim", &c)?;
        st.serialize_field("tangCodim", &tau)?;
        st.serialize_field("simple", &self.simple())?;
        st.end()
    }
}

/// Transitive closure of adjacency from `class`, excluding itself.
pub fn adjacency_closure(class: SingularityClass, bound: u32) -> Vec<SingularityClass> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([class]);
    while let Some(c) = queue.pop_front() {
        for d in c.adjacent(bound) {
            if seen.insert(d) {
                queue.push_back(d);
            }
        }
    }
    seen.remove(&class);
    seen.into_iter().collect()
}

fn max_index(c: &SingularityClass) -> u32 {
    c.index().unwrap_or(0)
}

/// Whether `from` deforms into `to` through a chain of adjacencies.
pub fn adjacency(from: SingularityClass, to: SingularityClass) -> bool {
    let bound = max_index(&from).max(max_index(&to)).max(3) + 1;
    adjacency_closure(from, bound).contains(&to)
}

/// `(xi, t^4/4 + 2a t^3 xi/3 + t^2 xi^2/2)` in the family presentation.
pub fn u_family(a: &Coefficient, trunc: Truncation) -> MapGerm {
    let psi = Series2::from_terms(
        [
            (Mono::new(0, 4), rat(1, 4)),
            (Mono::new(1, 3), a * rat(2, 3)),
            (Mono::new(2, 2), rat(1, 2)),
        ],
        trunc,
    );
    MapGerm::from_xi_psi(&psi)
}

/// Catalog classes with finite table entries up to index `n`.
pub fn finite_classes(n: u32) -> Vec<SingularityClass> {
    let mut v = vec![C::I, C::II];
    v.extend((1..=n).map(C::S1));
    v.extend((1..=n).map(C::T));
    v.extend([C::S2_2, C::S2_3(Sign::Plus), C::S2_3(Sign::Minus), C::S2_4]);
    v
}

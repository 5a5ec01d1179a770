//! Single-edge link-prediction heuristics averaged over a simplex's vertices.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::complex::ComplexSnapshot;
use crate::error::{Error, Result};
use crate::simplex::{Simplex, VertexId};

/// Scoring method for a `(σ, ṽ)` candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ours,
    Aa,
    Jc,
    Pa,
}

impl Method {
    pub const BASELINES: [Method; 3] = [Method::Aa, Method::Jc, Method::Pa];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ours => "ours",
            Method::Aa => "aa",
            Method::Jc => "jc",
            Method::Pa => "pa",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ours" => Ok(Method::Ours),
            "aa" => Ok(Method::Aa),
            "jc" => Ok(Method::Jc),
            "pa" => Ok(Method::Pa),
            _ => Err(Error::Parse(format!("unknown method {s:?}, expected ours|aa|jc|pa"))),
        }
    }
}

/// Sum of `1 / ln deg(w)` over common neighbours `w`, skipping degree-1 vertices.
pub fn adamic_adar(c: &ComplexSnapshot, u: VertexId, v: VertexId) -> f64 {
    let (Some(nu), Some(nv)) = (c.neighbor_set(u), c.neighbor_set(v)) else {
        return 0.0;
    };
    nu.intersection(nv)
        .map(|&w| c.degree(w))
        .filter(|&deg| deg > 1)
        .map(|deg| 1.0 / (deg as f64).ln())
        .sum()
}

/// `|N(u) ∩ N(v)| / |N(u) ∪ N(v)|`, 0 when both neighbourhoods are empty.
pub fn jaccard(c: &ComplexSnapshot, u: VertexId, v: VertexId) -> f64 {
    let empty = Default::default();
    let nu = c.neighbor_set(u).unwrap_or(&empty);
    let nv = c.neighbor_set(v).unwrap_or(&empty);
    let inter = nu.intersection(nv).count();
    let union = nu.len() + nv.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

pub fn preferential_attachment(c: &ComplexSnapshot, u: VertexId, v: VertexId) -> f64 {
    (c.degree(u) * c.degree(v)) as f64
}

/// Mean of the pair score between each vertex of `s` and `v`.
///
/// Panics if called with [`Method::Ours`], which is not a pair heuristic.
pub fn baseline_score(method: Method, c: &ComplexSnapshot, s: &Simplex, v: VertexId) -> f64 {
    let pair: fn(&ComplexSnapshot, VertexId, VertexId) -> f64 = match method {
        Method::Aa => adamic_adar,
        Method::Jc => jaccard,
        Method::Pa => preferential_attachment,
        Method::Ours => panic!("baseline_score called with Method::Ours"),
    };
    let total: f64 = s.vertices().iter().map(|&u| pair(c, u, v)).sum();
    total / s.len() as f64
}

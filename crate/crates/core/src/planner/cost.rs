//! Closed-form path cardinality model.
//!
//! With |V| entity nodes, |E| topology edges, densification constant `c`
//! and `p = (|E| - |V|) / |V|`, a path of length `l` between `s` sources
//! and `o` targets is estimated as
//!
//! ```text
//! |R| = s · o · Σ_{i=1..l} |V|^((1 - ln c)·i) · B(l, p)
//! B(l, p) = Σ_{j=1..l} C(l, j) · p^j · (1 - p)^(l - j)
//! ```
//!
//! `B` does not depend on the outer index. `p` is clamped into a
//! probability first and the result is capped at |V|², the number of
//! distinct pairs.

use std::fmt;

use serde::Serialize;

use crate::error::CostError;
use crate::store::{StoreCatalog, DEFAULT_DENSIFICATION};

pub const DEFAULT_L_MAX: u32 = 6;

/// How the out-of-range edge-density ratio is forced into [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PClampPolicy {
    /// Clamp to [0, 1]; p ≥ 1 makes `B(l, p) = 1`.
    ClampToOne,
    /// Clamp to [0, max].
    ClampTo(f64),
}

impl PClampPolicy {
    pub fn upper(self) -> f64 {
        match self {
            PClampPolicy::ClampToOne => 1.0,
            PClampPolicy::ClampTo(m) => m,
        }
    }

    pub fn apply(self, p: f64) -> f64 {
        p.clamp(0.0, self.upper())
    }
}

impl fmt::Display for PClampPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PClampPolicy::ClampToOne => f.write_str("clamp-to-one"),
            PClampPolicy::ClampTo(m) => write!(f, "clamp-to-{m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostModelParams {
    /// Densification constant, 1 < c ≤ 2.
    pub c: f64,
    /// Length assumed for `*` and `+`.
    pub l_max: u32,
    pub p_policy: PClampPolicy,
}

impl Default for CostModelParams {
    fn default() -> Self {
        CostModelParams {
            c: DEFAULT_DENSIFICATION,
            l_max: DEFAULT_L_MAX,
            p_policy: PClampPolicy::ClampToOne,
        }
    }
}

impl CostModelParams {
    pub fn new(c: f64, l_max: u32, p_policy: PClampPolicy) -> Result<Self, CostError> {
        if !(c > 1.0 && c <= 2.0) {
            return Err(CostError::Densification(c));
        }
        if l_max < 1 {
            return Err(CostError::PathLength(l_max));
        }
        if let PClampPolicy::ClampTo(m) = p_policy {
            if !(m > 0.0 && m <= 1.0) {
                return Err(CostError::Clamp(m));
            }
        }
        Ok(CostModelParams { c, l_max, p_policy })
    }

    /// Defaults with `c` taken from the store catalog.
    pub fn for_catalog(catalog: &StoreCatalog) -> Self {
        let c = catalog.densification;
        CostModelParams {
            c: if c > 1.0 && c <= 2.0 { c } else { DEFAULT_DENSIFICATION },
            ..Self::default()
        }
    }
}

/// Estimated output size and work of an operator.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct CostEstimate {
    pub cardinality: f64,
    pub cpu: f64,
}

/// `(|E| - |V|) / |V|`, or 0 for an empty graph.
pub fn raw_p(catalog: &StoreCatalog) -> f64 {
    let v = catalog.n_entity_nodes as f64;
    if v == 0.0 {
        0.0
    } else {
        (catalog.n_topology_edges as f64 - v) / v
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// `B(l, p) = Σ_{j=1..l} C(l, j) p^j (1 - p)^(l - j)`.
pub fn binomial_mass(l: u32, p: f64) -> f64 {
    (1..=l)
        .map(|j| binomial(l, j) * p.powi(j as i32) * (1.0 - p).powi((l - j) as i32))
        .sum()
}

/// The uncapped formula with every input explicit. `c` is not range-checked
/// here so degenerate values such as `c = e` can be evaluated.
pub fn path_cardinality_raw(s: f64, o: f64, l: u32, v: f64, c: f64, p_eff: f64) -> Result<f64, CostError> {
    if l < 1 {
        return Err(CostError::PathLength(l));
    }
    if s <= 0.0 || o <= 0.0 {
        return Ok(0.0);
    }
    let exponent = 1.0 - c.ln();
    let b = binomial_mass(l, p_eff);
    let growth: f64 = (1..=l).map(|i| v.powf(exponent * f64::from(i))).sum();
    Ok(s * o * growth * b)
}

/// Estimated number of (source, target) pairs for a path of length `l`
/// between `s` sources and `o` targets.
pub fn estimate_path_cardinality(
    s: f64,
    o: f64,
    l: u32,
    catalog: &StoreCatalog,
    params: &CostModelParams,
) -> Result<f64, CostError> {
    let v = catalog.n_entity_nodes as f64;
    let p_eff = params.p_policy.apply(raw_p(catalog));
    let raw = path_cardinality_raw(s, o, l, v, params.c, p_eff)?;
    Ok(raw.min(v * v))
}

//! Seeded synthetic social graphs written as N-Triples.
//!
//! Edge endpoints are drawn uniformly at random. Self-loops and repeated
//! (subject, predicate, object) edges are rejected, so `n_nodes = 1` yields
//! no edges at all.

use std::collections::HashSet;
use std::io::{self, Write};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ingest::RDF_TYPE;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SynthGraphSpec {
    pub n_nodes: u64,
    /// Average topology out-degree per entity.
    pub target_out_degree: f64,
    pub n_topology_predicates: u32,
    /// One `rdf:type` triple plus literal-valued triples.
    pub attribute_triples_per_entity: u32,
    pub seed: u64,
}

impl Default for SynthGraphSpec {
    fn default() -> Self {
        SynthGraphSpec {
            n_nodes: 1000,
            target_out_degree: 3.0,
            n_topology_predicates: 1,
            attribute_triples_per_entity: 9,
            seed: 42,
        }
    }
}

impl SynthGraphSpec {
    /// Topology share 3.5 / (3.5 + 10) ≈ 26%, the social-network proportion.
    pub fn social(n_nodes: u64, seed: u64) -> Self {
        SynthGraphSpec {
            n_nodes,
            target_out_degree: 3.5,
            n_topology_predicates: 1,
            attribute_triples_per_entity: 10,
            seed,
        }
    }

    /// Topology share 3 / (3 + 9) = 25%, the bibliographic proportion.
    pub fn bibliographic(n_nodes: u64, seed: u64) -> Self {
        SynthGraphSpec {
            n_nodes,
            target_out_degree: 3.0,
            n_topology_predicates: 1,
            attribute_triples_per_entity: 9,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.n_nodes < 1 {
            return Err("nNodes must be at least 1".into());
        }
        if !(self.target_out_degree >= 0.0 && self.target_out_degree.is_finite()) {
            return Err(format!("targetOutDegree must be a finite non-negative number, got {}", self.target_out_degree));
        }
        if self.n_topology_predicates < 1 {
            return Err("nTopologyPredicates must be at least 1".into());
        }
        Ok(())
    }

    /// Number of edges the generator aims for, capped by the simple-graph limit.
    pub fn edge_target(&self) -> u64 {
        let n = self.n_nodes;
        let possible = n * n.saturating_sub(1) * u64::from(self.n_topology_predicates);
        ((n as f64 * self.target_out_degree).round() as u64).min(possible)
    }

    /// Designed |T_G| / |T_OSN| for this spec.
    pub fn design_ratio(&self) -> f64 {
        let e = self.edge_target() as f64;
        let a = (self.n_nodes * u64::from(self.attribute_triples_per_entity)) as f64;
        if e + a == 0.0 {
            0.0
        } else {
            e / (e + a)
        }
    }
}

pub fn node_iri(i: u64) -> String {
    format!("ex:n{i}")
}

/// `ex:knows` first, then `ex:rel1`, `ex:rel2`, ...
pub fn predicate_iri(k: u32) -> String {
    if k == 0 {
        "ex:knows".to_string()
    } else {
        format!("ex:rel{k}")
    }
}

/// Counts of what [`generate`] wrote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SynthSummary {
    pub topology_triples: u64,
    pub attribute_triples: u64,
}

/// Writes the graph for `spec` to `out`, preceded by the spec as comments.
pub fn generate(spec: &SynthGraphSpec, mut out: impl Write) -> io::Result<SynthSummary> {
    spec.validate().map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    writeln!(out, "# synthetic graph")?;
    writeln!(out, "# nNodes {}", spec.n_nodes)?;
    writeln!(out, "# targetOutDegree {}", spec.target_out_degree)?;
    writeln!(out, "# nTopologyPredicates {}", spec.n_topology_predicates)?;
    writeln!(out, "# attributeTriplesPerEntity {}", spec.attribute_triples_per_entity)?;
    writeln!(out, "# seed {}", spec.seed)?;

    let n = spec.n_nodes;
    let target = spec.edge_target();
    let mut seen = HashSet::with_capacity(target as usize);
    let mut summary = SynthSummary::default();
    while summary.topology_triples < target {
        let s = rng.gen_range(0..n);
        let o = rng.gen_range(0..n);
        let k = rng.gen_range(0..spec.n_topology_predicates);
        if s == o || !seen.insert((s, k, o)) {
            continue;
        }
        writeln!(out, "<{}> <{}> <{}> .", node_iri(s), predicate_iri(k), node_iri(o))?;
        summary.topology_triples += 1;
    }

    for i in 0..n {
        let subject = node_iri(i);
        for a in 0..spec.attribute_triples_per_entity {
            if a == 0 {
                writeln!(out, "<{subject}> <{RDF_TYPE}> <ex:Person> .")?;
            } else {
                let v: u32 = rng.gen_range(0..1_000_000);
                writeln!(out, "<{subject}> <ex:attr{a}> \"v{v}\" .")?;
            }
            summary.attribute_triples += 1;
        }
    }
    Ok(summary)
}

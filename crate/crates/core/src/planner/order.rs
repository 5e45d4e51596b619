//! Operator cost estimates, greedy join ordering and plan rendering.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use super::cost::{estimate_path_cardinality, raw_p, CostEstimate, CostModelParams};
use super::plan::{PathLeaf, Plan};
use crate::store::{estimate_pattern, PatternTerm, StoreCatalog};

/// Join ordering strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum OrderMode {
    /// Greedy by estimated cardinality, paths priced by the closed-form model.
    #[default]
    CostBased,
    /// Same greedy order, but every path operand is treated as the most
    /// expensive and goes last.
    NoCE,
}

/// Upper bound on distinct values per variable.
type Distinct = BTreeMap<String, f64>;

#[derive(Debug, Clone)]
struct Est {
    cost: CostEstimate,
    dv: Distinct,
}

/// Estimates for one catalog and parameter set.
pub struct Estimator<'a> {
    catalog: &'a StoreCatalog,
    params: &'a CostModelParams,
}

/// How the endpoints of a path operand were sized.
struct PathSizing {
    s: f64,
    o: f64,
    /// Size of the set a traversal starts from.
    start: f64,
    l: u32,
    p_eff: f64,
    pushed: Option<&'static str>,
}

impl<'a> Estimator<'a> {
    pub fn new(catalog: &'a StoreCatalog, params: &'a CostModelParams) -> Self {
        Estimator { catalog, params }
    }

    fn v(&self) -> f64 {
        self.catalog.n_entity_nodes as f64
    }

    /// `ctx` holds variables already bound to the left of this operator,
    /// which a path operand receives as its start set.
    fn path_sizing(&self, leaf: &PathLeaf, ctx: &Distinct) -> PathSizing {
        let v = self.v();
        let side = |t: &PatternTerm| match t {
            PatternTerm::Bound(_) => (1.0, true),
            PatternTerm::Var(name) => match ctx.get(name) {
                Some(d) => (d.min(v), true),
                None => (v, false),
            },
        };
        let (s, s_bound) = side(&leaf.subject);
        let (o, o_bound) = side(&leaf.object);
        let var_pushed = |t: &PatternTerm| t.var().is_some_and(|n| ctx.contains_key(n));
        PathSizing {
            s,
            o,
            start: if s_bound {
                s
            } else if o_bound {
                o
            } else {
                v
            },
            l: leaf.path.cost_length(self.params.l_max),
            p_eff: self.params.p_policy.apply(raw_p(self.catalog)),
            pushed: if var_pushed(&leaf.subject) {
                Some("subject")
            } else if var_pushed(&leaf.object) {
                Some("object")
            } else {
                None
            },
        }
    }

    fn path(&self, leaf: &PathLeaf, ctx: &Distinct) -> Est {
        let mut dv = Distinct::new();
        if leaf.empty {
            for t in [&leaf.subject, &leaf.object] {
                if let Some(n) = t.var() {
                    dv.insert(n.to_string(), 0.0);
                }
            }
            return Est {
                cost: CostEstimate::default(),
                dv,
            };
        }
        let sz = self.path_sizing(leaf, ctx);
        let card = estimate_path_cardinality(sz.s, sz.o, sz.l, self.catalog, self.params)
            .expect("path cost length is at least 1");
        let cpu = sz.start * (self.v() + self.catalog.n_topology_edges as f64);
        if let Some(n) = leaf.subject.var() {
            dv.insert(n.to_string(), sz.s.min(card));
        }
        if let Some(n) = leaf.object.var() {
            let d = sz.o.min(card);
            dv.entry(n.to_string()).and_modify(|x| *x = x.min(d)).or_insert(d);
        }
        Est {
            cost: CostEstimate { cardinality: card, cpu },
            dv,
        }
    }

    fn estimate_in(&self, plan: &Plan, ctx: &Distinct) -> Est {
        match plan {
            Plan::Triple(t) => {
                let card = if t.empty {
                    0.0
                } else {
                    estimate_pattern(self.catalog, &t.pattern)
                };
                let dv = plan.vars().into_iter().map(|v| (v, card)).collect();
                Est {
                    cost: CostEstimate { cardinality: card, cpu: card },
                    dv,
                }
            }
            Plan::Path(p) => self.path(p, ctx),
            Plan::Join(l, r) => {
                let left = self.estimate_in(l, ctx);
                let mut inner = ctx.clone();
                inner.extend(left.dv.iter().map(|(k, v)| (k.clone(), *v)));
                let right = self.estimate_in(r, &inner);
                join_estimate(&left, &right)
            }
            Plan::Union(branches) => {
                let mut cost = CostEstimate::default();
                let mut dv = Distinct::new();
                for b in branches {
                    let e = self.estimate_in(b, &Distinct::new());
                    cost.cardinality += e.cost.cardinality;
                    cost.cpu += e.cost.cpu;
                    for (k, v) in e.dv {
                        *dv.entry(k).or_default() += v;
                    }
                }
                cap(&mut dv, cost.cardinality);
                Est { cost, dv }
            }
            Plan::Distinct(c) => self.estimate_in(c, ctx),
            Plan::Project(vars, c) => {
                let mut e = self.estimate_in(c, ctx);
                e.dv.retain(|k, _| vars.contains(k));
                e
            }
        }
    }

    /// Estimate of `plan` evaluated on its own.
    pub fn estimate(&self, plan: &Plan) -> CostEstimate {
        self.estimate_in(plan, &Distinct::new()).cost
    }

    /// Reorders every join tree in `plan` greedily (left-deep).
    pub fn order(&self, plan: &Plan, mode: OrderMode) -> Plan {
        match plan {
            Plan::Triple(_) => plan.clone(),
            Plan::Path(p) => Plan::Path(PathLeaf {
                cost_overridden: mode == OrderMode::NoCE,
                ..p.clone()
            }),
            Plan::Union(bs) => Plan::Union(bs.iter().map(|b| self.order(b, mode)).collect()),
            Plan::Distinct(c) => Plan::Distinct(Box::new(self.order(c, mode))),
            Plan::Project(vs, c) => Plan::Project(vs.clone(), Box::new(self.order(c, mode))),
            Plan::Join(..) => {
                let operands: Vec<Plan> = plan.join_operands().into_iter().map(|p| self.order(p, mode)).collect();
                let input = left_deep(operands.clone());
                let greedy = self.greedy(operands, mode);
                if mode == OrderMode::CostBased && self.estimate(&greedy).cpu > self.estimate(&input).cpu {
                    input
                } else {
                    greedy
                }
            }
        }
    }

    fn greedy(&self, operands: Vec<Plan>, mode: OrderMode) -> Plan {
        let noce = mode == OrderMode::NoCE;
        let alone: Vec<f64> = operands.iter().map(|p| self.estimate(p).cardinality).collect();
        let is_path: Vec<bool> = operands.iter().map(|p| matches!(p, Plan::Path(_))).collect();
        let mut remaining: Vec<usize> = (0..operands.len()).collect();
        let first = *remaining
            .iter()
            .min_by(|&&a, &&b| {
                (noce && is_path[a])
                    .cmp(&(noce && is_path[b]))
                    .then(cmp_f64(alone[a], alone[b]))
                    .then(a.cmp(&b))
            })
            .expect("join has operands");
        remaining.retain(|&i| i != first);
        let mut current = operands[first].clone();
        while !remaining.is_empty() {
            let bound = current.var_set();
            let keyed: Vec<(usize, bool, f64)> = remaining
                .iter()
                .map(|&i| {
                    let connected = operands[i].vars().iter().any(|v| bound.contains(v));
                    let card = self.estimate(&Plan::join(current.clone(), operands[i].clone())).cardinality;
                    (i, connected, card)
                })
                .collect();
            let &(next, _, _) = keyed
                .iter()
                .min_by(|a, b| {
                    (noce && is_path[a.0])
                        .cmp(&(noce && is_path[b.0]))
                        .then((!a.1).cmp(&!b.1))
                        .then(cmp_f64(a.2, b.2))
                        .then(a.0.cmp(&b.0))
                })
                .expect("remaining is non-empty");
            remaining.retain(|&i| i != next);
            current = Plan::join(current, operands[next].clone());
        }
        current
    }

    /// Indented operator tree, one line per operator:
    /// `<OpName> [card=<float> cpu=<float>] <details>`.
    pub fn explain(&self, plan: &Plan) -> String {
        let mut out = String::new();
        self.explain_in(plan, &Distinct::new(), 0, &mut out);
        out
    }

    fn explain_in(&self, plan: &Plan, ctx: &Distinct, depth: usize, out: &mut String) {
        let est = self.estimate_in(plan, ctx);
        let details = match plan {
            Plan::Triple(t) => {
                let mut d = t.text.clone();
                if t.empty {
                    d.push_str(" empty");
                }
                d
            }
            Plan::Path(p) => {
                let sz = self.path_sizing(p, ctx);
                let mut d = format!(
                    "{} l={} s={} o={} p={} ({})",
                    p.text,
                    sz.l,
                    num(sz.s),
                    num(sz.o),
                    num(sz.p_eff),
                    self.params.p_policy
                );
                if let Some(side) = sz.pushed {
                    let _ = write!(d, " bound-from-left={side}");
                }
                if p.empty {
                    d.push_str(" empty");
                }
                if p.cost_overridden {
                    d.push_str(" cost-overridden");
                }
                d
            }
            Plan::Join(l, r) => {
                let right = r.var_set();
                let shared: Vec<String> = l.vars().into_iter().filter(|v| right.contains(v)).map(|v| format!("?{v}")).collect();
                if shared.is_empty() {
                    "cartesian".to_string()
                } else {
                    format!("on {}", shared.join(" "))
                }
            }
            Plan::Union(bs) => format!("{} branches", bs.len()),
            Plan::Distinct(_) => String::new(),
            Plan::Project(vs, _) => vs.iter().map(|v| format!("?{v}")).collect::<Vec<_>>().join(" "),
        };
        let _ = write!(
            out,
            "{:indent$}{} [card={} cpu={}]",
            "",
            plan.name(),
            num(est.cost.cardinality),
            num(est.cost.cpu),
            indent = depth * 2
        );
        if !details.is_empty() {
            let _ = write!(out, " {details}");
        }
        out.push('\n');
        match plan {
            Plan::Triple(_) | Plan::Path(_) => {}
            Plan::Join(l, r) => {
                self.explain_in(l, ctx, depth + 1, out);
                let mut inner = ctx.clone();
                inner.extend(self.estimate_in(l, ctx).dv);
                self.explain_in(r, &inner, depth + 1, out);
            }
            Plan::Union(bs) => bs.iter().for_each(|b| self.explain_in(b, &Distinct::new(), depth + 1, out)),
            Plan::Distinct(c) | Plan::Project(_, c) => self.explain_in(c, ctx, depth + 1, out),
        }
    }
}

fn join_estimate(left: &Est, right: &Est) -> Est {
    let (l, r) = (left.cost.cardinality, right.cost.cardinality);
    let shared: Vec<&String> = left.dv.keys().filter(|k| right.dv.contains_key(*k)).collect();
    let card = if l == 0.0 || r == 0.0 {
        0.0
    } else if shared.is_empty() {
        l * r
    } else {
        let denom = shared
            .iter()
            .map(|k| left.dv[*k].max(right.dv[*k]))
            .fold(1.0f64, f64::max);
        (l * r / denom).max(1.0)
    };
    let mut dv = left.dv.clone();
    for (k, v) in &right.dv {
        dv.entry(k.clone()).and_modify(|x| *x = x.min(*v)).or_insert(*v);
    }
    cap(&mut dv, card);
    Est {
        cost: CostEstimate {
            cardinality: card,
            cpu: left.cost.cpu + right.cost.cpu + card,
        },
        dv,
    }
}

fn cap(dv: &mut Distinct, card: f64) {
    for v in dv.values_mut() {
        *v = v.min(card);
    }
}

fn cmp_f64(a: f64, b: f64) -> Ordering {
    a.total_cmp(&b)
}

fn left_deep(items: Vec<Plan>) -> Plan {
    let mut it = items.into_iter();
    let first = it.next().expect("join has operands");
    it.fold(first, Plan::join)
}

/// Fixed-width-free rendering that is stable across runs.
fn num(x: f64) -> String {
    if x.is_finite() && x.abs() < 1e9 {
        format!("{x:.2}")
    } else {
        format!("{x:.4e}")
    }
}

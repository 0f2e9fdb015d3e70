//! Closed-form and Chow-ring invariants: dimensions, degrees, classes and
//! emptiness of Spohn varieties and their graphical restrictions.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::Result;
use crate::game::GameFormat;
use crate::graph::{label_set, ClusterStructure, Graph};
use crate::model_degree::model_dim;
use crate::polyring::{binomial, RingPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarietyKind {
    Spohn,
    NashCi,
    SpohnCi,
}

impl VarietyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            VarietyKind::Spohn => "Spohn",
            VarietyKind::NashCi => "NashCI",
            VarietyKind::SpohnCi => "SpohnCI",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarietyStatus {
    Empty,
    NonEmpty,
    Unknown,
}

impl VarietyStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            VarietyStatus::Empty => "empty",
            VarietyStatus::NonEmpty => "nonempty",
            VarietyStatus::Unknown => "unknown",
        }
    }
}

/// Invariants of one variety for a generic game of a given format.
#[derive(Clone, Debug, PartialEq)]
pub struct VarietyReport {
    pub kind: VarietyKind,
    pub status: VarietyStatus,
    pub dimension: Option<i64>,
    pub degree: Option<BigInt>,
    pub chow_class: Option<String>,
    pub certificate: Vec<String>,
}

impl VarietyReport {
    pub fn to_json(&self) -> Value {
        // Degrees are big integers, so they are always strings.
        let degree = self.degree.as_ref().map_or(Value::Null, |d| json!(d.to_string()));
        json!({
            "kind": self.kind.as_str(),
            "status": self.status.as_str(),
            "dimension": self.dimension,
            "degree": degree,
            "chow_class": self.chow_class,
            "certificate": self.certificate,
        })
    }

    /// One-line summary such as "dim 1, degree 1, nonempty".
    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        if let Some(d) = self.dimension {
            parts.push(format!("dim {d}"));
        }
        if let Some(d) = &self.degree {
            parts.push(format!("degree {d}"));
        }
        parts.push(self.status.as_str().to_string());
        parts.join(", ")
    }
}

impl fmt::Display for VarietyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.kind.as_str(), self.summary())?;
        if let Some(c) = &self.chow_class {
            writeln!(f, "class: {c}")?;
        }
        for line in &self.certificate {
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// Codimension `sum(d) - n` and degree `prod(d)` of the Spohn variety of a generic game.
pub fn spohn_codim_degree(format: &GameFormat) -> (u64, BigInt) {
    let codim = format.dims().iter().map(|&d| d as u64 - 1).sum();
    let degree = format.dims().iter().fold(BigInt::from(1), |acc, &d| acc * BigInt::from(d));
    (codim, degree)
}

/// Expected dimension of the Spohn variety restricted to the graphical model;
/// negative means empty for generic games.
pub fn spohn_ci_dimension(format: &GameFormat, g: &Graph) -> Result<i64> {
    let (codim, _) = spohn_codim_degree(format);
    Ok(model_dim(g, format)? as i64 - codim as i64)
}

/// `sum D_i - sum S_i + n - k` over the cluster components.
pub fn nash_ci_dimension(format: &GameFormat, g: &Graph) -> Result<i64> {
    let cs = g.cluster_structure(format)?;
    Ok(dimension_of(&cs))
}

fn dimension_of(cs: &ClusterStructure) -> i64 {
    let n: usize = cs.components.iter().map(|c| c.size()).sum();
    let big_d: u64 = cs.components.iter().map(|c| c.d_product).sum();
    let big_s: u64 = cs.components.iter().map(|c| c.d_sum).sum();
    big_d as i64 - big_s as i64 + n as i64 - cs.components.len() as i64
}

fn caps_of(cs: &ClusterStructure) -> Vec<u32> {
    cs.components.iter().map(|c| c.d_product as u32).collect()
}

/// Class in `Z[x_1..x_k] / <x_i^{D_i}>`, one variable per component.
pub fn chow_class(format: &GameFormat, g: &Graph) -> Result<RingPoly> {
    let cs = g.cluster_structure(format)?;
    Ok(class_of(format, &cs))
}

fn class_of(format: &GameFormat, cs: &ClusterStructure) -> RingPoly {
    let k = cs.components.len();
    let caps = Some(caps_of(cs));
    let total = RingPoly::sum_of_vars(k, caps.clone());
    let mut class = RingPoly::one(k, caps.clone());
    for (c, comp) in cs.components.iter().enumerate() {
        let xc = RingPoly::var(k, caps.clone(), c);
        if comp.is_isolated_vertex() {
            let hat = total.sub(&xc);
            class = class.mul(&hat.pow(format.d(comp.vertices[0]) as u64 - 1));
        } else {
            for &v in &comp.vertices {
                let e = format.d(v) as u64 - 1;
                let mut factor = RingPoly::zero(k, caps.clone());
                for l in 0..=e {
                    factor = factor.add(&xc.pow(l).mul(&total.pow(e - l)));
                }
                class = class.mul(&factor);
            }
        }
        if class.is_zero() {
            break;
        }
    }
    class
}

/// Degree of the Nash CI variety of a cluster graph: the coefficient of
/// `prod x_i^{D_i - 1}` in `class * (sum x)^dim`.
pub fn nash_ci_degree(format: &GameFormat, g: &Graph) -> Result<BigInt> {
    let cs = g.cluster_structure(format)?;
    Ok(degree_of(format, &cs))
}

fn degree_of(format: &GameFormat, cs: &ClusterStructure) -> BigInt {
    let class = class_of(format, cs);
    if class.is_zero() {
        return BigInt::zero();
    }
    let k = cs.components.len();
    let dim = dimension_of(cs);
    let hyper = RingPoly::sum_of_vars(k, Some(caps_of(cs))).pow(dim as u64);
    let top: Vec<u32> = caps_of(cs).iter().map(|d| d - 1).collect();
    class.mul(&hyper).coefficient(&top)
}

/// Closed form for three players where only players 2 and 3 are joined.
pub fn one_edge_3player_degree(d1: u64, d2: u64, d3: u64) -> BigInt {
    let c = |a: i64| binomial(a, d1 as i64 + 1);
    let (d2, d3) = (d2 as i64, d3 as i64);
    c(d2 * d3 + 1) - c(d2 * d3 - d2 + 1) - c(d2 * d3 - d3 + 1) + c(d2 * d3 - d2 - d3 + 1)
}

/// Failing isolated players: those with `2 d_i - 2 > sum_l (D_l - 1)`.
fn emptiness_violations(format: &GameFormat, cs: &ClusterStructure) -> Vec<(usize, u64, u64)> {
    let budget: u64 = cs.components.iter().map(|c| c.d_product - 1).sum();
    cs.isolated()
        .into_iter()
        .filter_map(|v| {
            let need = 2 * format.d(v) as u64 - 2;
            (need > budget).then_some((v, need, budget))
        })
        .collect()
}

/// Emptiness for generic games on a cluster graph.
pub fn is_empty_cluster(format: &GameFormat, g: &Graph) -> Result<bool> {
    let cs = g.cluster_structure(format)?;
    Ok(!emptiness_violations(format, &cs).is_empty())
}

/// Totally mixed Nash equilibria exist generically iff `d_i <= 2 - n + sum_{j != i} d_j`.
pub fn nash_no_edge_nonempty(format: &GameFormat) -> bool {
    let n = format.players() as i64;
    let total: i64 = format.dims().iter().map(|&d| d as i64).sum();
    format.dims().iter().all(|&d| d as i64 <= 2 - n + total - d as i64)
}

fn describe_cluster(format: &GameFormat, g: &Graph) -> String {
    let cs = g.cluster_structure(format).expect("cluster graph");
    let parts: Vec<String> =
        cs.components.iter().map(|c| format!("{} D={} S={}", label_set(&c.vertices), c.d_product, c.d_sum)).collect();
    parts.join(", ")
}

fn cluster_verdict_lines(format: &GameFormat, g: &Graph) -> (bool, Vec<String>) {
    let cs = g.cluster_structure(format).expect("cluster graph");
    let violations = emptiness_violations(format, &cs);
    let budget: u64 = cs.components.iter().map(|c| c.d_product - 1).sum();
    let mut lines = vec![format!("components: {}", describe_cluster(format, g))];
    if violations.is_empty() {
        lines.push(format!("every isolated player satisfies 2*d - 2 <= sum(D - 1) = {budget}"));
    } else {
        for (v, need, budget) in &violations {
            lines.push(format!("isolated player {}: 2*d - 2 = {need} > sum(D - 1) = {budget}", v + 1));
        }
    }
    (!violations.is_empty(), lines)
}

/// Emptiness for an arbitrary graph by comparison with cluster graphs: a nonempty
/// cluster subgraph proves nonemptiness, an empty cluster supergraph proves emptiness.
pub fn general_graph_emptiness(format: &GameFormat, g: &Graph) -> Result<(VarietyStatus, Vec<String>)> {
    g.check_format(format)?;
    if g.is_cluster() {
        let (empty, mut lines) = cluster_verdict_lines(format, g);
        lines.insert(0, "graph is a cluster graph".to_string());
        return Ok((if empty { VarietyStatus::Empty } else { VarietyStatus::NonEmpty }, lines));
    }
    let max_d = format.dims().iter().copied().max().unwrap_or(1);
    let hub = (0..g.n()).find(|&v| format.d(v) == max_d && !g.is_isolated(v));
    if let Some(a) = hub {
        let b = g.neighbors(a)[0];
        let witness = Graph::with_edges(g.n(), &[(a, b)])?;
        let (empty, mut lines) = cluster_verdict_lines(format, &witness);
        if !empty {
            let mut head = vec![format!(
                "player {} has the most strategies and is not isolated; cluster subgraph with edge {{{},{}}} is nonempty",
                a + 1,
                a + 1,
                b + 1
            )];
            head.append(&mut lines);
            return Ok((VarietyStatus::NonEmpty, head));
        }
    }
    let sub = g.cluster_subgraph(format)?;
    let (sub_empty, sub_lines) = cluster_verdict_lines(format, &sub);
    if !sub_empty {
        let mut lines = vec!["greedy cluster subgraph is nonempty".to_string()];
        lines.extend(sub_lines);
        return Ok((VarietyStatus::NonEmpty, lines));
    }
    let sup = g.cluster_supergraph();
    let (sup_empty, sup_lines) = cluster_verdict_lines(format, &sup);
    if sup_empty {
        let mut lines = vec!["cluster supergraph is empty".to_string()];
        lines.extend(sup_lines);
        return Ok((VarietyStatus::Empty, lines));
    }
    let mut lines = vec!["greedy cluster subgraph is empty".to_string()];
    lines.extend(sub_lines);
    lines.push("cluster supergraph is nonempty".to_string());
    lines.extend(sup_lines);
    Ok((VarietyStatus::Unknown, lines))
}

pub fn spohn_report(format: &GameFormat) -> VarietyReport {
    let (codim, degree) = spohn_codim_degree(format);
    let ambient = format.num_states() as i64 - 1;
    VarietyReport {
        kind: VarietyKind::Spohn,
        status: VarietyStatus::NonEmpty,
        dimension: Some(ambient - codim as i64),
        degree: Some(degree),
        chow_class: None,
        certificate: vec![format!("complete intersection of codimension {codim} in P^{ambient}")],
    }
}

/// Report for the Nash CI variety. Cluster graphs get the full Chow-ring treatment;
/// other graphs get an emptiness verdict only.
pub fn nash_ci_report(format: &GameFormat, g: &Graph) -> Result<VarietyReport> {
    g.check_format(format)?;
    if !g.is_cluster() {
        let (status, certificate) = general_graph_emptiness(format, g)?;
        return Ok(VarietyReport {
            kind: VarietyKind::NashCi,
            status,
            dimension: None,
            degree: None,
            chow_class: None,
            certificate,
        });
    }
    let cs = g.cluster_structure(format)?;
    let class = class_of(format, &cs);
    let (empty, certificate) = cluster_verdict_lines(format, g);
    debug_assert_eq!(empty, class.is_zero());
    if empty {
        return Ok(VarietyReport {
            kind: VarietyKind::NashCi,
            status: VarietyStatus::Empty,
            dimension: None,
            degree: None,
            chow_class: Some(class.to_string()),
            certificate,
        });
    }
    Ok(VarietyReport {
        kind: VarietyKind::NashCi,
        status: VarietyStatus::NonEmpty,
        dimension: Some(dimension_of(&cs)),
        degree: Some(degree_of(format, &cs)),
        chow_class: Some(class.to_string()),
        certificate,
    })
}

/// Report for the Spohn CI variety: the expected dimension, with emptiness decided
/// by the cluster criterion or, for other graphs, by comparison with cluster graphs.
pub fn spohn_ci_report(format: &GameFormat, g: &Graph) -> Result<VarietyReport> {
    g.check_format(format)?;
    let dim = spohn_ci_dimension(format, g)?;
    let model = model_dim(g, format)?;
    let (codim, _) = spohn_codim_degree(format);
    let (status, mut certificate) = if dim < 0 {
        (VarietyStatus::Empty, Vec::new())
    } else if g.is_cluster() {
        let (empty, lines) = cluster_verdict_lines(format, g);
        (if empty { VarietyStatus::Empty } else { VarietyStatus::NonEmpty }, lines)
    } else {
        general_graph_emptiness(format, g)?
    };
    certificate.insert(0, format!("model dimension {model} minus Spohn codimension {codim}"));
    Ok(VarietyReport {
        kind: VarietyKind::SpohnCi,
        status,
        dimension: (status != VarietyStatus::Empty).then_some(dim),
        degree: None,
        chow_class: None,
        certificate,
    })
}

//! Dimension and degree of the graphical model of a graph: exact rank of the
//! parametrization matrix, and the degree recursion over disjoint unions and
//! joins with cliques.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Pow};

use crate::error::{Error, Result};
use crate::game::GameFormat;
use crate::graph::{label_set, Graph};
use crate::linalg::integer_rank;
use crate::polyring::{binomial, multinomial};

/// Projective dimension of the model: rank of the parametrization matrix minus one.
pub fn model_dim(g: &Graph, format: &GameFormat) -> Result<usize> {
    let a = g.parametrization_matrix(format)?;
    let rows: Vec<Vec<i64>> = a.entries.iter().map(|r| r.iter().map(|&e| e as i64).collect()).collect();
    Ok(integer_rank(&rows) - 1)
}

/// How a graph is built from complete graphs. Vertices are those of the input graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompositionTree {
    BaseComplete { vertices: Vec<usize> },
    DisjointUnion(Vec<DecompositionTree>),
    CliquePeel { peel: Vec<usize>, rest: Box<DecompositionTree> },
    NotDecomposable { vertices: Vec<usize> },
}

/// Split disconnected graphs into components, otherwise peel all universal vertices.
pub fn decompose(g: &Graph) -> DecompositionTree {
    decompose_on(g, (0..g.n()).collect())
}

fn decompose_on(g: &Graph, vs: Vec<usize>) -> DecompositionTree {
    let h = g.induced(&vs).expect("nonempty vertex subset");
    let comps = h.components();
    if comps.len() > 1 {
        return DecompositionTree::DisjointUnion(
            comps.into_iter().map(|c| decompose_on(g, c.iter().map(|&i| vs[i]).collect())).collect(),
        );
    }
    match h.universal_clique_peel() {
        Some((_, rest)) if rest.is_empty() => DecompositionTree::BaseComplete { vertices: vs },
        Some((peel, rest)) => DecompositionTree::CliquePeel {
            peel: peel.iter().map(|&i| vs[i]).collect(),
            rest: Box::new(decompose_on(g, rest.iter().map(|&i| vs[i]).collect())),
        },
        None => DecompositionTree::NotDecomposable { vertices: vs },
    }
}

fn states(format: &GameFormat, vs: &[usize]) -> u64 {
    vs.iter().map(|&v| format.d(v) as u64).product()
}

impl DecompositionTree {
    pub fn is_decomposable(&self) -> bool {
        match self {
            DecompositionTree::BaseComplete { .. } => true,
            DecompositionTree::DisjointUnion(cs) => cs.iter().all(Self::is_decomposable),
            DecompositionTree::CliquePeel { rest, .. } => rest.is_decomposable(),
            DecompositionTree::NotDecomposable { .. } => false,
        }
    }

    pub fn vertices(&self) -> Vec<usize> {
        let mut out = match self {
            DecompositionTree::BaseComplete { vertices } | DecompositionTree::NotDecomposable { vertices } => {
                vertices.clone()
            }
            DecompositionTree::DisjointUnion(cs) => cs.iter().flat_map(Self::vertices).collect(),
            DecompositionTree::CliquePeel { peel, rest } => peel.iter().copied().chain(rest.vertices()).collect(),
        };
        out.sort_unstable();
        out
    }

    /// Dimension from the recursion; `None` below a non-decomposable node.
    pub fn dim(&self, format: &GameFormat) -> Option<u64> {
        match self {
            DecompositionTree::BaseComplete { vertices } => Some(states(format, vertices) - 1),
            DecompositionTree::DisjointUnion(cs) => cs.iter().map(|c| c.dim(format)).sum(),
            DecompositionTree::CliquePeel { peel, rest } => Some(states(format, peel) * (rest.dim(format)? + 1) - 1),
            DecompositionTree::NotDecomposable { .. } => None,
        }
    }

    pub fn degree(&self, format: &GameFormat) -> Result<BigInt> {
        match self {
            DecompositionTree::BaseComplete { .. } => Ok(BigInt::one()),
            DecompositionTree::DisjointUnion(cs) => {
                let dims = cs
                    .iter()
                    .map(|c| c.dim(format).ok_or_else(|| self.not_decomposable()))
                    .collect::<Result<Vec<_>>>()?;
                let mut deg = multinomial(&dims);
                for c in cs {
                    deg *= c.degree(format)?;
                }
                Ok(deg)
            }
            DecompositionTree::CliquePeel { peel, rest } => Ok(Pow::pow(rest.degree(format)?, states(format, peel))),
            DecompositionTree::NotDecomposable { vertices } => {
                Err(Error::NotDecomposable(format!("induced subgraph on {}", label_set(vertices))))
            }
        }
    }

    fn not_decomposable(&self) -> Error {
        Error::NotDecomposable(format!("induced subgraph on {}", label_set(&self.vertices())))
    }
}

impl fmt::Display for DecompositionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn inner(t: &DecompositionTree, f: &mut fmt::Formatter<'_>, nested: bool) -> fmt::Result {
            match t {
                DecompositionTree::BaseComplete { vertices } => write!(f, "K{}", vertices.len()),
                DecompositionTree::NotDecomposable { vertices } => write!(f, "N{}", label_set(vertices)),
                DecompositionTree::DisjointUnion(cs) => {
                    if nested {
                        write!(f, "(")?;
                    }
                    for (i, c) in cs.iter().enumerate() {
                        if i > 0 {
                            write!(f, " ⊎ ")?;
                        }
                        inner(c, f, true)?;
                    }
                    if nested {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
                DecompositionTree::CliquePeel { peel, rest } => {
                    if nested {
                        write!(f, "(")?;
                    }
                    write!(f, "K{} ∨ ", peel.len())?;
                    inner(rest, f, true)?;
                    if nested {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
            }
        }
        inner(self, f, false)
    }
}

/// Degree of the graphical model, defined for graphs that decompose fully.
pub fn model_degree(g: &Graph, format: &GameFormat) -> Result<BigInt> {
    g.check_format(format)?;
    decompose(g).degree(format)
}

/// Closed form for the star with the given center:
/// `multinomial(d_l - 1 over leaves) ^ d_center`.
pub fn star_degree(format: &GameFormat, center: usize) -> BigInt {
    let leaves: Vec<u64> = (0..format.players()).filter(|&v| v != center).map(|v| format.d(v) as u64 - 1).collect();
    Pow::pow(multinomial(&leaves), format.d(center) as u64)
}

/// Degree of the Segre product of two embedded varieties.
pub fn product_degree(dim1: u64, deg1: &BigInt, dim2: u64, deg2: &BigInt) -> BigInt {
    binomial((dim1 + dim2) as i64, dim1 as i64) * deg1 * deg2
}

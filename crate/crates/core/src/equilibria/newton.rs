use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::solve::{profile_of, Method, SolveResult, SolveStatus};
use super::verify::{verify_ci_equilibrium, VerificationReport, DEFAULT_TOL};
use crate::equations::{EquationSystem, SparsePoly};
use crate::error::Result;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonOptions {
    pub starts: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { starts: 64, seed: 7, tol: DEFAULT_TOL, max_iter: 100 }
    }
}

const MAX_HALVINGS: usize = 30;
const DEDUP_RADIUS: f64 = 1e-6;

/// A polynomial with float coefficients, ready for repeated evaluation.
struct Compiled {
    terms: Vec<(f64, Vec<(usize, u32)>)>,
}

impl Compiled {
    fn new(p: &SparsePoly, scale: f64) -> Self {
        let terms = p
            .terms()
            .into_iter()
            .map(|(m, c)| (c.to_f64() * scale, m.iter().map(|&(v, e)| (v as usize, e)).collect()))
            .collect();
        Compiled { terms }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(c, m)| m.iter().fold(*c, |acc, &(v, e)| acc * x[v].powi(e as i32))).sum()
    }
}

struct System {
    equations: Vec<Compiled>,
    /// Sparse Jacobian: per equation, (variable, derivative).
    jacobian: Vec<Vec<(usize, Compiled)>>,
    nvars: usize,
}

impl System {
    fn new(polys: &[SparsePoly], nvars: usize) -> Self {
        let mut equations = Vec::new();
        let mut jacobian = Vec::new();
        for p in polys {
            let max = p.terms().iter().map(|(_, c)| c.to_f64().abs()).fold(0.0, f64::max);
            let scale = if max > 0.0 { 1.0 / max } else { 1.0 };
            equations.push(Compiled::new(p, scale));
            jacobian.push(
                p.variables().into_iter().map(|v| (v as usize, Compiled::new(&p.derivative(v), scale))).collect(),
            );
        }
        System { equations, jacobian, nvars }
    }

    fn residual(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.equations.len(), self.equations.iter().map(|e| e.eval(x)))
    }

    fn jac(&self, x: &[f64]) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(self.equations.len(), self.nvars);
        for (r, row) in self.jacobian.iter().enumerate() {
            for (v, d) in row {
                j[(r, *v)] = d.eval(x);
            }
        }
        j
    }

    /// Damped Gauss-Newton with minimum-norm steps from a truncated SVD, which
    /// discards directions belonging to redundant equations.
    fn run(&self, start: Vec<f64>, opts: &NewtonOptions) -> Option<Vec<f64>> {
        let mut x = start;
        let mut f = self.residual(&x);
        let mut norm = f.amax();
        for _ in 0..opts.max_iter {
            if norm <= opts.tol * 1e-3 {
                break;
            }
            let svd = self.jac(&x).svd(true, true);
            let smax = svd.singular_values.max();
            let step = svd.solve(&(-&f), (smax * 1e-10).max(1e-300)).ok()?;
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..=MAX_HALVINGS {
                let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a + lambda * s).collect();
                let ft = self.residual(&trial);
                let nt = ft.amax();
                if nt.is_finite() && nt < norm {
                    x = trial;
                    f = ft;
                    norm = nt;
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !accepted || step.amax() * lambda < 1e-16 {
                break;
            }
        }
        (norm <= opts.tol).then_some(x)
    }
}

/// Random point in the product of simplices, one simplex per clique.
fn random_start(system: &EquationSystem, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x = vec![0.0; system.space.num_vars()];
    for c in 0..system.space.cliques.len() {
        let range = system.space.clique_vars(c);
        let draws: Vec<f64> = range.clone().map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let total: f64 = draws.iter().sum();
        for (i, d) in range.zip(draws) {
            x[i] = d / total;
        }
    }
    x
}

/// Multi-start Newton on the generators plus the clique normalizations. Starts are
/// drawn uniformly from the product of simplices; converged points that are totally
/// mixed (every σ above 1e-6) and pass verification are sorted, then deduplicated
/// within 1e-6 in the max norm.
pub fn newton_solve(system: &EquationSystem, opts: &NewtonOptions) -> Result<SolveResult<f64>> {
    let mut polys = system.polys();
    polys.extend(system.normalizations());
    let compiled = System::new(&polys, system.space.num_vars());
    let mut master = ChaCha8Rng::seed_from_u64(opts.seed);
    let seeds: Vec<u64> = (0..opts.starts).map(|_| master.random()).collect();
    let game = system.game.to_f64();
    let converged: Vec<Option<Vec<f64>>> = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            compiled.run(random_start(system, &mut rng), opts)
        })
        .collect();
    let mut candidates: Vec<(Vec<f64>, VerificationReport)> = Vec::new();
    for x in converged.into_iter().flatten() {
        // Points within the dedup radius of a coordinate hyperplane count as boundary points.
        if x.iter().any(|&v| v <= DEDUP_RADIUS) {
            continue;
        }
        let report = verify_ci_equilibrium(&game, &system.graph, &profile_of(&system.space, &x), opts.tol)?;
        if report.dependency && report.ci == Some(true) {
            candidates.push((x, report));
        }
    }
    candidates.sort_by(|a, b| {
        a.0.iter().zip(&b.0).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut kept: Vec<(Vec<f64>, VerificationReport)> = Vec::new();
    for (x, r) in candidates {
        let dup = kept.iter().any(|(y, _)| x.iter().zip(y).all(|(a, b)| (a - b).abs() <= DEDUP_RADIUS));
        if !dup {
            kept.push((x, r));
        }
    }
    let status = if kept.is_empty() { SolveStatus::NoSolution } else { SolveStatus::SolverCandidates };
    let notes =
        vec![format!("{} starts, seed {}, {} distinct totally mixed candidates", opts.starts, opts.seed, kept.len())];
    let (points, verifications) = kept.into_iter().unzip();
    Ok(SolveResult {
        status,
        method: Method::Newton,
        space: system.space.clone(),
        points,
        family: None,
        verifications,
        notes,
    })
}

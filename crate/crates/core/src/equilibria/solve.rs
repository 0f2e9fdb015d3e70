use serde_json::{json, Value};

use super::verify::{verify_ci_equilibrium, VerificationReport};
use crate::equations::{monomial_map_all, SigmaSpace, SigmaVar};
use crate::error::{Error, Result};
use crate::game::{Game, MixedProfile};
use crate::graph::Graph;
use crate::linalg::solve_affine;
use crate::scalar::{format_rational, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    UniquePoint,
    AffineFamily,
    /// Isolated points found numerically; completeness is not claimed.
    SolverCandidates,
    NoSolution,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::UniquePoint => "unique-point",
            SolveStatus::AffineFamily => "affine-family",
            SolveStatus::SolverCandidates => "solver-candidates",
            SolveStatus::NoSolution => "no-solution",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    TwoStageLinear,
    Newton,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::TwoStageLinear => "two-stage-linear",
            Method::Newton => "newton",
        }
    }
}

/// `base + sum_i t_i directions[i]` in σ coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineFamily<T> {
    pub base: Vec<T>,
    pub directions: Vec<Vec<T>>,
    /// σ index acting as parameter for each direction.
    pub free: Vec<usize>,
    /// Open parameter interval keeping every coordinate positive (one-parameter families).
    pub interval: Option<(T, T)>,
}

impl<T: Scalar> AffineFamily<T> {
    pub fn at(&self, t: &[T]) -> Vec<T> {
        let mut out = self.base.clone();
        for (dir, ti) in self.directions.iter().zip(t) {
            for (o, d) in out.iter_mut().zip(dir) {
                *o = o.clone() + d.clone() * ti.clone();
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult<T> {
    pub status: SolveStatus,
    pub method: Method,
    pub space: SigmaSpace,
    pub points: Vec<Vec<T>>,
    pub family: Option<AffineFamily<T>>,
    pub verifications: Vec<VerificationReport>,
    pub notes: Vec<String>,
}

pub(crate) fn render<T: Scalar + 'static>(v: &T) -> Value {
    if let Some(r) = (v as &dyn std::any::Any).downcast_ref::<Rational>() {
        json!(format_rational(r))
    } else {
        json!(v.to_f64())
    }
}

pub(crate) fn render_text<T: Scalar + 'static>(v: &T) -> String {
    if let Some(r) = (v as &dyn std::any::Any).downcast_ref::<Rational>() {
        format_rational(r)
    } else {
        // Values that round to zero print without a sign.
        let x = v.to_f64();
        format!("{:.12}", if x.abs() < 5e-13 { 0.0 } else { x })
    }
}

impl<T: Scalar + 'static> SolveResult<T> {
    pub fn to_json(&self) -> Value {
        let names = self.space.names();
        let vec_json = |v: &[T]| Value::Array(v.iter().map(render).collect());
        let family = self.family.as_ref().map(|f| {
            json!({
                "base": vec_json(&f.base),
                "directions": f.directions.iter().map(|d| vec_json(d)).collect::<Vec<_>>(),
                "parameters": f.free.iter().map(|&i| names[i].clone()).collect::<Vec<_>>(),
                "interval": f.interval.as_ref().map(|(a, b)| json!([render(a), render(b)])),
            })
        });
        json!({
            "status": self.status.as_str(),
            "method": self.method.as_str(),
            "variables": names,
            "points": self.points.iter().map(|p| vec_json(p)).collect::<Vec<_>>(),
            "family": family,
            "verifications": self.verifications.iter().map(VerificationReport::to_json).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }

    pub fn to_text(&self) -> String {
        let names = self.space.names();
        let mut out = format!("status: {}\nmethod: {}\n", self.status.as_str(), self.method.as_str());
        for (i, p) in self.points.iter().enumerate() {
            out.push_str(&format!("point {}:\n", i + 1));
            for (n, v) in names.iter().zip(p) {
                out.push_str(&format!("  {n} = {}\n", render_text(v)));
            }
        }
        if let Some(f) = &self.family {
            let params: Vec<&str> = f.free.iter().map(|&i| names[i].as_str()).collect();
            out.push_str(&format!("family in parameters {}:\n", params.join(", ")));
            for (i, n) in names.iter().enumerate() {
                let mut line = render_text(&f.base[i]);
                for (d, p) in f.directions.iter().zip(&params) {
                    if !d[i].is_zero() {
                        line.push_str(&format!(" + ({})*{p}", render_text(&d[i])));
                    }
                }
                out.push_str(&format!("  {n} = {line}\n"));
            }
            if let Some((a, b)) = &f.interval {
                out.push_str(&format!("  interior for {} in ({}, {})\n", params[0], render_text(a), render_text(b)));
            }
        }
        for (i, v) in self.verifications.iter().enumerate() {
            out.push_str(&format!(
                "check {}: dependency={} ci={} max residual={}\n",
                i + 1,
                v.dependency,
                v.ci.map_or("undefined".to_string(), |b| b.to_string()),
                super::verify::number(v.max_spohn_residual().max(v.max_ci_residual()))
            ));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}

/// Joint distribution of a σ point under the monomial map.
pub fn profile_of<T: Scalar>(space: &SigmaSpace, sigma: &[T]) -> MixedProfile<T> {
    let p = monomial_map_all(space).iter().map(|m| m.eval(sigma)).collect();
    MixedProfile { format: space.format.clone(), p }
}

/// Result of the two-stage solver in the chosen backend.
#[derive(Clone, Debug)]
pub enum Solved {
    Exact(SolveResult<Rational>),
    Float(SolveResult<f64>),
}

impl Solved {
    pub fn status(&self) -> SolveStatus {
        match self {
            Solved::Exact(r) => r.status,
            Solved::Float(r) => r.status,
        }
    }

    pub fn verifications(&self) -> &[VerificationReport] {
        match self {
            Solved::Exact(r) => &r.verifications,
            Solved::Float(r) => &r.verifications,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Solved::Exact(r) => r.to_json(),
            Solved::Float(r) => r.to_json(),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Solved::Exact(r) => r.to_text(),
            Solved::Float(r) => r.to_text(),
        }
    }
}

/// Solution for three players where only `edge` is joined and the isolated player's
/// strategy count equals the number of joint states on the edge.
///
/// The isolated player's equations are linear in the edge parameters and fix them;
/// the edge players' equations are then linear in the isolated player's parameters.
pub fn solve_one_edge_3player(
    game: &Game<Rational>,
    edge: (usize, usize),
    backend: Backend,
    tol: f64,
) -> Result<Solved> {
    Ok(match backend {
        Backend::Exact => Solved::Exact(solve_one_edge_exact(game, edge, tol)?),
        Backend::Float => Solved::Float(solve_one_edge_f64(game, edge, tol)?),
    })
}

pub fn solve_one_edge_exact(game: &Game<Rational>, edge: (usize, usize), tol: f64) -> Result<SolveResult<Rational>> {
    solve_generic(game, game, edge, tol)
}

pub fn solve_one_edge_f64(game: &Game<Rational>, edge: (usize, usize), tol: f64) -> Result<SolveResult<f64>> {
    solve_generic(game, &game.to_f64(), edge, tol)
}

fn solve_generic<T: Scalar>(
    exact_game: &Game<Rational>,
    game: &Game<T>,
    edge: (usize, usize),
    tol: f64,
) -> Result<SolveResult<T>> {
    let format = &game.format;
    if format.players() != 3 {
        return Err(Error::WrongShape(format!("{} players, expected 3", format.players())));
    }
    let (a, b) = if edge.0 < edge.1 { edge } else { (edge.1, edge.0) };
    if a == b || b >= 3 {
        return Err(Error::WrongShape(format!("bad edge {}-{}", edge.0 + 1, edge.1 + 1)));
    }
    let iso = 3 - a - b;
    let g = Graph::with_edges(3, &[(a, b)])?;
    let space = SigmaSpace::new(&exact_game.format, &g)?;
    let edge_clique = space.cliques.iter().position(|c| c == &vec![a, b]).expect("edge clique");
    let iso_clique = space.cliques.iter().position(|c| c == &vec![iso]).expect("isolated clique");
    let (da, db, di) = (format.d(a), format.d(b), format.d(iso));
    let big_d = da * db;
    if di != big_d {
        return Err(Error::WrongShape(format!(
            "isolated player {} has {di} strategies but the edge has {big_d} joint states",
            iso + 1
        )));
    }
    let state = |i: usize, x: usize, y: usize| {
        let mut s = [0; 3];
        s[iso] = i;
        s[a] = x;
        s[b] = y;
        format.flatten(&s)
    };

    // Stage 1: the isolated player's conditional payoffs agree; unknowns σ^{ab}_{xy}.
    let xi = game.payoff(iso);
    let mut rows = Vec::with_capacity(big_d);
    let mut rhs = Vec::with_capacity(big_d);
    for i in 1..di {
        rows.push(
            (0..da)
                .flat_map(|x| (0..db).map(move |y| (x, y)))
                .map(|(x, y)| xi[state(i, x, y)].clone() - xi[state(0, x, y)].clone())
                .collect::<Vec<T>>(),
        );
        rhs.push(T::zero());
    }
    rows.push(vec![T::one(); big_d]);
    rhs.push(T::one());
    let stage1 = solve_affine(&rows, &rhs, tol).ok_or(Error::SingularLinearStage)?;
    if !stage1.free.is_empty() {
        return Err(Error::SingularLinearStage);
    }
    let edge_sigma = stage1.particular;

    // Stage 2: with the edge parameters fixed, the edge players' minors are linear in σ^{iso}.
    let mut rows2: Vec<Vec<T>> = Vec::new();
    for (k, dk) in [(a, da), (b, db)] {
        let xk = game.payoff(k);
        let slot = |x: usize, y: usize| if k == a { x } else { y };
        let mut l = vec![T::zero(); dk];
        let mut gcoef = vec![vec![T::zero(); di]; dk];
        for x in 0..da {
            for y in 0..db {
                let s = edge_sigma[x * db + y].clone();
                let r = slot(x, y);
                l[r] = l[r].clone() + s.clone();
                for (i, c) in gcoef[r].iter_mut().enumerate() {
                    *c = c.clone() + xk[state(i, x, y)].clone() * s.clone();
                }
            }
        }
        for r in 0..dk {
            for t in r + 1..dk {
                rows2.push(
                    (0..di).map(|i| l[r].clone() * gcoef[t][i].clone() - l[t].clone() * gcoef[r][i].clone()).collect(),
                );
            }
        }
    }
    rows2.push(vec![T::one(); di]);
    let mut rhs2 = vec![T::zero(); rows2.len()];
    *rhs2.last_mut().unwrap() = T::one();

    let iso_range = space.clique_vars(iso_clique);
    let edge_range = space.clique_vars(edge_clique);
    let embed = |iso_part: &[T], edge_part: &[T]| {
        let mut v = vec![T::zero(); space.num_vars()];
        for (o, x) in iso_range.clone().zip(iso_part) {
            v[o] = x.clone();
        }
        for (o, x) in edge_range.clone().zip(edge_part) {
            v[o] = x.clone();
        }
        v
    };

    let mut notes = vec![format!("edge parameters fixed by player {}'s linear equations", iso + 1)];
    let positive = |v: &[T]| v.iter().all(|x| *x > T::zero() && !x.is_negligible(if T::EXACT { 0.0 } else { tol }));
    if !positive(&edge_sigma) {
        notes.push("edge parameters are not all positive; no totally mixed solution".to_string());
        return Ok(SolveResult {
            status: SolveStatus::NoSolution,
            method: Method::TwoStageLinear,
            space,
            points: Vec::new(),
            family: None,
            verifications: Vec::new(),
            notes,
        });
    }
    let Some(stage2) = solve_affine(&rows2, &rhs2, tol) else {
        notes.push("second linear stage is inconsistent".to_string());
        return Ok(SolveResult {
            status: SolveStatus::NoSolution,
            method: Method::TwoStageLinear,
            space,
            points: Vec::new(),
            family: None,
            verifications: Vec::new(),
            notes,
        });
    };
    let g_check = g.clone();
    let verify_at = |sigma: &[T]| verify_ci_equilibrium(game, &g_check, &profile_of(&space, sigma), tol);

    if stage2.free.is_empty() {
        let point = embed(&stage2.particular, &edge_sigma);
        if !positive(&stage2.particular) {
            notes.push("unique solution is not totally mixed".to_string());
            return Ok(SolveResult {
                status: SolveStatus::NoSolution,
                method: Method::TwoStageLinear,
                space,
                points: vec![point],
                family: None,
                verifications: Vec::new(),
                notes,
            });
        }
        let report = verify_at(&point)?;
        return Ok(SolveResult {
            status: SolveStatus::UniquePoint,
            method: Method::TwoStageLinear,
            space,
            points: vec![point],
            family: None,
            verifications: vec![report],
            notes,
        });
    }

    let zero_edge = vec![T::zero(); big_d];
    let family = AffineFamily {
        base: embed(&stage2.particular, &edge_sigma),
        directions: stage2.directions.iter().map(|d| embed(d, &zero_edge)).collect(),
        free: stage2.free.iter().map(|&f| iso_range.start + f).collect(),
        interval: None,
    };
    if family.directions.len() > 1 {
        notes.push(format!("{}-parameter family; interior not certified by an interval", family.directions.len()));
        return Ok(SolveResult {
            status: SolveStatus::AffineFamily,
            method: Method::TwoStageLinear,
            space,
            points: Vec::new(),
            family: Some(family),
            verifications: Vec::new(),
            notes,
        });
    }
    // One parameter: intersect the half-lines where each coordinate stays positive.
    let mut lo: Option<T> = None;
    let mut hi: Option<T> = None;
    let mut feasible = true;
    for (c, v) in family.base.iter().zip(&family.directions[0]) {
        if v.is_negligible(if T::EXACT { 0.0 } else { tol }) {
            feasible &= *c > T::zero();
        } else {
            let root = -c.clone() / v.clone();
            if *v > T::zero() {
                lo = Some(match lo {
                    Some(l) if l > root => l,
                    _ => root,
                });
            } else {
                hi = Some(match hi {
                    Some(h) if h < root => h,
                    _ => root,
                });
            }
        }
    }
    let interval = match (lo, hi) {
        (Some(l), Some(h)) if feasible && l < h => Some((l, h)),
        _ => None,
    };
    let Some((l, h)) = interval else {
        notes.push("the line of solutions misses the open simplex".to_string());
        return Ok(SolveResult {
            status: SolveStatus::NoSolution,
            method: Method::TwoStageLinear,
            space,
            points: Vec::new(),
            family: Some(family),
            verifications: Vec::new(),
            notes,
        });
    };
    let mid = (l.clone() + h.clone()) / T::from_i64(2);
    let report = verify_at(&family.at(&[mid]))?;
    notes.push("verification at the midpoint of the interval".to_string());
    Ok(SolveResult {
        status: SolveStatus::AffineFamily,
        method: Method::TwoStageLinear,
        space,
        points: Vec::new(),
        family: Some(AffineFamily { interval: Some((l, h)), ..family }),
        verifications: vec![report],
        notes,
    })
}

/// Index of `σ^{C}_{state}` for a clique given by its vertex list.
pub fn sigma_index(space: &SigmaSpace, clique: &[usize], state: &[usize]) -> Option<usize> {
    let c = space.cliques.iter().position(|x| x == clique)?;
    Some(space.index(&SigmaVar { clique: c, state: state.to_vec() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::fixture;
    use crate::scalar::ratio;

    #[test]
    fn four_by_two_by_two_line() {
        let fx = fixture("beats-nash-4-2-2").unwrap();
        let r = solve_one_edge_exact(&fx.game, (1, 2), 1e-9).unwrap();
        assert_eq!(r.status, SolveStatus::AffineFamily);
        let f = r.family.as_ref().unwrap();
        let s1: Vec<_> = r.space.clique_vars(0).map(|i| f.base[i].clone()).collect();
        assert_eq!(s1, vec![ratio(913, 5933), ratio(3290, 5933), ratio(1730, 5933), ratio(0, 1)]);
        let dir: Vec<_> = r.space.clique_vars(0).map(|i| f.directions[0][i].clone()).collect();
        assert_eq!(dir, vec![ratio(-106095, 47464), ratio(27635, 47464), ratio(7749, 11866), ratio(1, 1)]);
        let s2: Vec<_> = r.space.clique_vars(1).map(|i| f.base[i].clone()).collect();
        assert_eq!(s2, vec![ratio(8, 21), ratio(1, 7), ratio(1, 3), ratio(1, 7)]);
        assert_eq!(f.interval, Some((ratio(0, 1), ratio(664, 9645))));
        assert!(r.verifications[0].dependency);
        assert_eq!(r.verifications[0].ci, Some(true));
    }

    #[test]
    fn float_backend_agrees() {
        let fx = fixture("beats-nash-4-2-2").unwrap();
        let r = solve_one_edge_f64(&fx.game, (1, 2), 1e-9).unwrap();
        let (lo, hi) = r.family.unwrap().interval.unwrap();
        assert!(lo.abs() < 1e-12);
        assert!((hi - 664.0 / 9645.0).abs() < 1e-12);
    }

    #[test]
    fn shape_errors() {
        let f = crate::game::GameFormat::new(vec![3, 2, 2]).unwrap();
        let g = crate::game::random_game(&f, 2, -5..=5);
        assert!(matches!(solve_one_edge_3player(&g, (1, 2), Backend::Exact, 1e-9), Err(Error::WrongShape(_))));
        let f4 = crate::game::GameFormat::new(vec![4, 2, 2]).unwrap();
        let zero = Game::new(f4.clone(), vec![vec![Rational::from_i64(0); 16]; 3]).unwrap();
        assert_eq!(
            solve_one_edge_3player(&zero, (1, 2), Backend::Exact, 1e-9).unwrap_err(),
            Error::SingularLinearStage
        );
    }
}

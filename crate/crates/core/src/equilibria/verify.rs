use serde_json::{json, Value};

use crate::equations::{ci_minors_p, p_names};
use crate::error::Result;
use crate::game::{player_marginal, spohn_matrix, Game, MixedProfile};
use crate::graph::Graph;
use crate::scalar::Scalar;

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub label: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub tol: f64,
    pub exact: bool,
    pub is_distribution: bool,
    pub totally_mixed: bool,
    pub spohn_residuals: Vec<Residual>,
    pub ci_residuals: Vec<Residual>,
    /// Largest deviation of `p` from the product of its player marginals.
    pub independence_residual: f64,
    /// Per player: expected payoff minus the best pure deviation payoff.
    pub best_response_slack: Vec<f64>,
    pub dependency: bool,
    /// `None` when the verdict is undefined (boundary point, non-chordal graph).
    pub ci: Option<bool>,
    pub nash: bool,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn max_spohn_residual(&self) -> f64 {
        self.spohn_residuals.iter().map(|r| r.value).fold(0.0, f64::max)
    }

    pub fn max_ci_residual(&self) -> f64 {
        self.ci_residuals.iter().map(|r| r.value).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        let res = |rs: &[Residual]| rs.iter().map(|r| json!({"label": r.label, "value": r.value})).collect::<Vec<_>>();
        json!({
            "tol": self.tol,
            "exact": self.exact,
            "is_distribution": self.is_distribution,
            "totally_mixed": self.totally_mixed,
            "max_spohn_residual": self.max_spohn_residual(),
            "max_ci_residual": self.max_ci_residual(),
            "independence_residual": self.independence_residual,
            "best_response_slack": self.best_response_slack,
            "verdicts": {"dependency": self.dependency, "ci": self.ci, "nash": self.nash},
            "spohn_residuals": res(&self.spohn_residuals),
            "ci_residuals": res(&self.ci_residuals),
            "notes": self.notes,
        })
    }

    pub fn to_text(&self) -> String {
        let ci = match self.ci {
            Some(b) => b.to_string(),
            None => "undefined".to_string(),
        };
        let mut out = format!(
            "dependency equilibrium: {}\nci equilibrium: {}\nnash equilibrium: {}\n",
            self.dependency, ci, self.nash
        );
        out.push_str(&format!(
            "totally mixed: {}\nmax spohn residual: {}\nmax ci residual: {}\nindependence residual: {}\n",
            self.totally_mixed,
            number(self.max_spohn_residual()),
            number(self.max_ci_residual()),
            number(self.independence_residual)
        ));
        let slack: Vec<String> = self.best_response_slack.iter().map(|&s| number(s)).collect();
        out.push_str(&format!("best-response slack: {}\n", slack.join(" ")));
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}

/// Plain decimals for moderate magnitudes, scientific notation for tiny ones.
pub(crate) fn number(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if x.abs() >= 1e-3 && x.abs() < 1e6 {
        format!("{}", (x * 1e9).round() / 1e9 + 0.0)
    } else {
        format!("{x:.3e}")
    }
}

fn passes<T: Scalar>(v: &T, tol: f64) -> bool {
    v.is_negligible(tol)
}

struct Core {
    is_distribution: bool,
    totally_mixed: bool,
    independence_residual: f64,
    independent: bool,
    slack: Vec<f64>,
    best_responding: bool,
}

fn nash_core<T: Scalar>(game: &Game<T>, p: &MixedProfile<T>, tol: f64) -> Result<Core> {
    let format = &p.format;
    let margs: Vec<Vec<T>> = (0..format.players()).map(|k| player_marginal(p, k)).collect();
    let mut independence_residual = 0.0f64;
    let mut independent = true;
    for (flat, s) in format.states().enumerate() {
        let prod = s.iter().enumerate().fold(T::one(), |acc, (k, &i)| acc * margs[k][i].clone());
        let diff = p.p[flat].clone() - prod;
        independence_residual = independence_residual.max(diff.to_f64().abs());
        independent &= passes(&diff, tol);
    }
    let mut slack = Vec::with_capacity(format.players());
    let mut best_responding = true;
    for k in 0..format.players() {
        let x = game.payoff(k);
        let current = p.p.iter().zip(x).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
        // Deviation payoffs against the others' joint marginal.
        let mut dev = vec![T::zero(); format.d(k)];
        for (flat, s) in format.states().enumerate() {
            let mut t = s.clone();
            for (i, d) in dev.iter_mut().enumerate() {
                t[k] = i;
                *d = d.clone() + p.p[flat].clone() * x[format.flatten(&t)].clone();
            }
        }
        let best = dev.into_iter().reduce(|a, b| if b > a { b } else { a }).expect("at least one strategy");
        let s = current - best;
        best_responding &= s >= T::zero() || passes(&s, tol);
        slack.push(s.to_f64());
    }
    Ok(Core {
        is_distribution: p.is_distribution(tol),
        totally_mixed: p.is_totally_mixed(),
        independence_residual,
        independent,
        slack,
        best_responding,
    })
}

/// Checks whether `p` is a dependency equilibrium, a conditional-independence
/// equilibrium for `g`, and a Nash equilibrium, all at tolerance `tol`.
pub fn verify_ci_equilibrium<T: Scalar>(
    game: &Game<T>,
    g: &Graph,
    p: &MixedProfile<T>,
    tol: f64,
) -> Result<VerificationReport> {
    g.check_format(&p.format)?;
    let core = nash_core(game, p, tol)?;
    let mut spohn_ok = true;
    let mut spohn_residuals = Vec::new();
    for k in 0..p.format.players() {
        for ((a, b), v) in spohn_matrix(game, p, k)?.minors() {
            spohn_ok &= passes(&v, tol);
            spohn_residuals.push(Residual {
                label: format!("player {} rows ({},{})", k + 1, a + 1, b + 1),
                value: v.to_f64().abs(),
            });
        }
    }
    let mut ci_ok = true;
    let mut ci_residuals = Vec::new();
    let names = p_names(&p.format);
    for (st, minor) in ci_minors_p(&p.format, g)? {
        let v: T = minor.eval(&p.p);
        ci_ok &= passes(&v, tol);
        let label = format!("{st}: {}", minor.to_string_with(&names));
        ci_residuals.push(Residual { label, value: v.to_f64().abs() });
    }
    let mut notes = Vec::new();
    if !core.is_distribution {
        notes.push("p is not a probability distribution".to_string());
    }
    if !core.totally_mixed {
        notes.push("p is not totally mixed; dependency and CI verdicts require a totally mixed profile".to_string());
    }
    let dependency = core.is_distribution && core.totally_mixed && spohn_ok;
    let ci = if !core.totally_mixed && !g.is_chordal() {
        notes.push("boundary semantics undefined: p has zeros and the graph is not chordal".to_string());
        None
    } else {
        Some(dependency && ci_ok)
    };
    Ok(VerificationReport {
        tol,
        exact: T::EXACT,
        is_distribution: core.is_distribution,
        totally_mixed: core.totally_mixed,
        spohn_residuals,
        ci_residuals,
        independence_residual: core.independence_residual,
        best_response_slack: core.slack,
        dependency,
        ci,
        nash: core.is_distribution && core.independent && core.best_responding,
        notes,
    })
}

/// Nash check: product form plus no profitable pure deviation.
pub fn verify_nash<T: Scalar>(game: &Game<T>, p: &MixedProfile<T>, tol: f64) -> Result<VerificationReport> {
    let empty = Graph::empty(p.format.players())?;
    verify_ci_equilibrium(game, &empty, p, tol)
}

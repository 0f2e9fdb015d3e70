use std::error::Error as StdError;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use serde_json::{json, Value};

use ciequil_core::equations::{equation_system, Dialect};
use ciequil_core::equilibria::{
    fixture, fixtures, newton_solve, solve_one_edge_3player, verify_ci_equilibrium, Backend, NewtonOptions,
};
use ciequil_core::invariants::{nash_ci_report, spohn_ci_report, spohn_report};
use ciequil_core::model_degree::{decompose, model_degree, model_dim};
use ciequil_core::scalar::parse_rational;
use ciequil_core::{Error, Game, GameFormat, Graph, MixedProfile, Rational, VarietyStatus, VerificationReport};

use crate::{
    BackendArg, Cli, Command, EquationsArgs, ExportArg, GameSource, InvariantsArgs, ModelArgs, SolveArgs, VerdictArg,
    VerifyArgs,
};

// A closed pipe (e.g. `| head`) is not an error worth a panic.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! outln {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

type CmdResult = Result<Outcome, Box<dyn StdError>>;

/// Exit status of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Positive,
    Negative,
}

impl From<Outcome> for ExitCode {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Positive => ExitCode::SUCCESS,
            Outcome::Negative => ExitCode::from(1),
        }
    }
}

fn outcome(ok: bool) -> Outcome {
    if ok {
        Outcome::Positive
    } else {
        Outcome::Negative
    }
}

pub fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Invariants(a) => invariants(a, cli.json),
        Command::Equations(a) => equations(a, cli.json),
        Command::Verify(a) => verify(a, cli.json),
        Command::Solve(a) => solve(a, cli.json),
        Command::Model(a) => model(a, cli.json),
        Command::Fixtures => list_fixtures(cli.json),
    }
}

fn read(path: &Path) -> Result<String, Box<dyn StdError>> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

/// Inline syntax, or a JSON file when the argument names an existing file.
fn load_graph(spec: &str, n: usize) -> Result<Graph, Box<dyn StdError>> {
    let path = Path::new(spec);
    let g = if path.is_file() { Graph::from_json_str(&read(path)?)? } else { Graph::parse_inline(spec, n)? };
    if g.n() != n {
        return Err(Error::FormatMismatch(format!("graph has {} vertices, game has {n} players", g.n())).into());
    }
    Ok(g)
}

fn graph_label(g: &Graph) -> String {
    if g.edges().is_empty() {
        return "empty".to_string();
    }
    let edges: Vec<String> = g.edges().iter().map(|(a, b)| format!("{}-{}", a + 1, b + 1)).collect();
    format!("edges:{}", edges.join(","))
}

fn load_game(
    src: &GameSource,
) -> Result<(Game<Rational>, Option<ciequil_core::equilibria::Fixture>), Box<dyn StdError>> {
    match (&src.game, &src.fixture) {
        (Some(path), None) => Ok((Game::from_json_str(&read(path)?)?, None)),
        (None, Some(id)) => {
            let fx = fixture(id)?;
            Ok((fx.game.clone(), Some(fx)))
        }
        _ => Err("pass exactly one of --game or --fixture".into()),
    }
}

fn print_json(v: &Value) {
    outln!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn invariants(a: &InvariantsArgs, as_json: bool) -> CmdResult {
    let format = GameFormat::parse(&a.format)?;
    let g = load_graph(&a.graph, format.players())?;
    let second = if g.is_cluster() { nash_ci_report(&format, &g)? } else { spohn_ci_report(&format, &g)? };
    let reports = [spohn_report(&format), second];
    let empty = reports.iter().any(|r| r.status == VarietyStatus::Empty);
    if as_json {
        print_json(&json!({
            "format": format.dims(),
            "graph": g.to_json(),
            "cluster": g.is_cluster(),
            "reports": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        }));
    } else {
        outln!("format: {}", format.to_string_list());
        outln!("graph: {}{}", graph_label(&g), if g.is_cluster() { " (cluster)" } else { "" });
        for r in &reports {
            out!("{r}");
        }
    }
    Ok(outcome(!empty))
}

fn equations(a: &EquationsArgs, as_json: bool) -> CmdResult {
    let (game, _) = load_game(&a.source)?;
    let g = load_graph(&a.graph, game.format.players())?;
    let system = equation_system(&game, &g)?;
    let names = system.space.names();
    let text = if as_json {
        let gens: Vec<Value> = system
            .generators
            .iter()
            .map(|gen| {
                json!({
                    "player": gen.player + 1,
                    "rows": [gen.rows.0 + 1, gen.rows.1 + 1],
                    "multidegree": gen.multidegree,
                    "removed_factor": gen.removed_factor,
                    "poly": gen.poly.to_string_with(&names),
                })
            })
            .collect();
        let v = json!({
            "variables": names,
            "cliques": system.space.cliques.iter().map(|c| c.iter().map(|v| v + 1).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "multihomogeneous": system.is_multihomogeneous(),
            "generators": gens,
        });
        format!("{}\n", serde_json::to_string_pretty(&v)?)
    } else {
        let dialect = match a.export {
            ExportArg::Plain => Dialect::Plain,
            ExportArg::M2 => Dialect::M2,
        };
        system.export(dialect)
    };
    match &a.output {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?,
        None => out!("{text}"),
    }
    Ok(Outcome::Positive)
}

fn parse_params(s: &str) -> Result<Vec<Rational>, Box<dyn StdError>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| Ok(parse_rational(t.trim())?)).collect()
}

fn verify(a: &VerifyArgs, as_json: bool) -> CmdResult {
    let (game, fx) = load_game(&a.source)?;
    let n = game.format.players();
    let (profile, family_graph): (ProfileInput, Option<Graph>) = match (&a.profile, &a.family) {
        (Some(path), None) => (ProfileInput::Exact(MixedProfile::from_json_str(&read(path)?)?), None),
        (None, Some(label)) => {
            let fx = fx.ok_or("--family needs --fixture")?;
            let fam = fx.family(label)?;
            let params = parse_params(a.param.as_deref().unwrap_or(""))?;
            let p = if fam.is_exact() {
                ProfileInput::Exact(fam.eval_exact(&game.format, &params)?)
            } else {
                let xs: Vec<f64> = params.iter().map(ciequil_core::Scalar::to_f64).collect();
                ProfileInput::Float(fam.eval_f64(&game.format, &xs)?)
            };
            (p, Some(fam.graph.clone()))
        }
        _ => return Err("pass exactly one of --profile or --family".into()),
    };
    let g = match (&a.graph, family_graph) {
        (Some(spec), _) => load_graph(spec, n)?,
        (None, Some(g)) => g,
        (None, None) => return Err("--graph is required".into()),
    };
    let report: VerificationReport = match (profile, a.backend) {
        (ProfileInput::Exact(p), BackendArg::Rational) => verify_ci_equilibrium(&game, &g, &p, a.tol)?,
        (ProfileInput::Exact(p), BackendArg::Double) => {
            verify_ci_equilibrium(&game.to_f64(), &g, &p.map(ciequil_core::Scalar::to_f64), a.tol)?
        }
        (ProfileInput::Float(p), _) => verify_ci_equilibrium(&game.to_f64(), &g, &p, a.tol)?,
    };
    let verdict = match a.require {
        VerdictArg::Dependency => report.dependency,
        VerdictArg::Ci => report.ci == Some(true),
        VerdictArg::Nash => report.nash,
    };
    if as_json {
        let mut v = report.to_json();
        v["graph"] = g.to_json();
        print_json(&v);
    } else {
        outln!("graph: {}", graph_label(&g));
        out!("{}", report.to_text());
    }
    Ok(outcome(verdict))
}

enum ProfileInput {
    Exact(MixedProfile<Rational>),
    Float(MixedProfile<f64>),
}

fn solve(a: &SolveArgs, as_json: bool) -> CmdResult {
    let (game, fx) = load_game(&a.source)?;
    let n = game.format.players();
    let g = match (&a.graph, &fx) {
        (Some(spec), _) => load_graph(spec, n)?,
        (None, Some(fx)) => fx
            .families
            .iter()
            .find(|f| f.graph.edges().len() == 1)
            .map(|f| f.graph.clone())
            .ok_or("fixture has no one-edge family; pass --graph")?,
        (None, None) => return Err("--graph is required".into()),
    };
    let mut notices = Vec::new();
    let edges = g.edges();
    if !a.newton && n == 3 && edges.len() == 1 {
        let backend = match a.backend {
            BackendArg::Rational => Backend::Exact,
            BackendArg::Double => Backend::Float,
        };
        match solve_one_edge_3player(&game, edges[0], backend, a.tol) {
            Ok(solved) => {
                let found = solved.status() != ciequil_core::equilibria::SolveStatus::NoSolution;
                emit_solution(&g, &notices, solved.to_json(), solved.to_text(), as_json);
                return Ok(outcome(found));
            }
            Err(Error::WrongShape(msg)) => {
                notices.push(format!("two-stage solver not applicable ({msg}); using Newton"));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let system = equation_system(&game, &g)?;
    let opts = NewtonOptions { starts: a.starts, seed: a.seed, tol: a.tol, max_iter: a.max_iter };
    let result = newton_solve(&system, &opts)?;
    let found = !result.points.is_empty();
    emit_solution(&g, &notices, result.to_json(), result.to_text(), as_json);
    Ok(outcome(found))
}

fn emit_solution(g: &Graph, notices: &[String], mut v: Value, text: String, as_json: bool) {
    if as_json {
        v["graph"] = g.to_json();
        v["notices"] = json!(notices);
        print_json(&v);
    } else {
        for n in notices {
            outln!("notice: {n}");
        }
        outln!("graph: {}", graph_label(g));
        out!("{text}");
    }
}

fn model(a: &ModelArgs, as_json: bool) -> CmdResult {
    let format = GameFormat::parse(&a.format)?;
    let g = load_graph(&a.graph, format.players())?;
    let all = !(a.degree || a.dim || a.decompose);
    let tree = decompose(&g);
    let dim = (all || a.dim).then(|| model_dim(&g, &format)).transpose()?;
    let degree = (all || a.degree).then(|| model_degree(&g, &format));
    let mut ok = true;
    if as_json {
        let mut v = json!({ "format": format.dims(), "graph": g.to_json() });
        if let Some(d) = dim {
            v["dim"] = json!(d);
        }
        if let Some(deg) = &degree {
            v["degree"] = match deg {
                Ok(d) => json!(d.to_string()),
                Err(_) => Value::Null,
            };
        }
        if all || a.decompose {
            v["decomposition"] = json!(tree.to_string());
            v["decomposable"] = json!(tree.is_decomposable());
        }
        ok = !matches!(degree, Some(Err(_)));
        print_json(&v);
    } else {
        outln!("format: {}", format.to_string_list());
        outln!("graph: {}", graph_label(&g));
        if let Some(d) = dim {
            outln!("dim: {d}");
        }
        match degree {
            Some(Ok(d)) => outln!("degree: {d}"),
            Some(Err(e)) => {
                outln!("degree: unavailable ({e})");
                ok = false;
            }
            None => {}
        }
        if all || a.decompose {
            outln!("decomposition: {tree}");
        }
    }
    Ok(outcome(ok))
}

fn list_fixtures(as_json: bool) -> CmdResult {
    let all = fixtures();
    if as_json {
        let v: Vec<Value> = all
            .iter()
            .map(|fx| {
                json!({
                    "id": fx.id,
                    "description": fx.description,
                    "format": fx.game.format.dims(),
                    "families": fx.families.iter().map(|f| json!({
                        "label": f.label,
                        "graph": f.graph.to_json(),
                        "parameters": f.params,
                        "region": f.region(),
                        "exact": f.is_exact(),
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        print_json(&Value::Array(v));
    } else {
        for fx in &all {
            outln!("{} [{}]: {}", fx.id, fx.game.format.to_string_list(), fx.description);
            for f in &fx.families {
                outln!("  {} on {}: {}", f.label, graph_label(&f.graph), f.region());
            }
        }
    }
    Ok(Outcome::Positive)
}

//! Hard-coded games with known equilibrium families. Families are evaluated on
//! either backend; the two El Farol no-edge points involve `1/sqrt(2)` and only
//! exist in floating point.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::game::{Game, GameFormat, MixedProfile};
use crate::graph::Graph;
use crate::scalar::{format_rational, int, ratio, Rational, Scalar};

pub const FIXTURE_IDS: [&str; 7] = [
    "prisoners-dilemma",
    "coordination-2-2-2",
    "el-farol-1/2",
    "el-farol-3/4",
    "cournot-fishers",
    "beats-nash-4-2-2",
    "pareto-2-2-2",
];

/// Probability of a 0-based state given the parameters.
type Formula<T> = fn(&[T], &[usize]) -> T;

#[derive(Clone, Debug)]
pub struct Family {
    pub label: &'static str,
    pub graph: Graph,
    pub params: Vec<&'static str>,
    /// Box containing the region, one interval per parameter.
    pub bounds: Vec<(Rational, Rational)>,
    /// Whether the printed region includes the endpoints of `bounds`.
    pub closed: bool,
    exact: Option<Formula<Rational>>,
    float: Formula<f64>,
    /// Extra constraints beyond the box.
    inside: fn(&[Rational]) -> bool,
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub id: &'static str,
    pub description: &'static str,
    pub game: Game<Rational>,
    pub families: Vec<Family>,
}

impl Fixture {
    pub fn family(&self, label: &str) -> Result<&Family> {
        self.families
            .iter()
            .find(|f| f.label == label)
            .ok_or_else(|| Error::UnknownFixture(format!("{} has no family {label}", self.id)))
    }
}

fn r<T: Scalar>(n: i64, d: i64) -> T {
    T::from_i64(n) / T::from_i64(d)
}

fn c<T: Scalar>(n: i64) -> T {
    T::from_i64(n)
}

/// `i - 3/2` for a 0-based strategy `i` of a binary player: `-1/2` or `1/2`.
fn centered<T: Scalar>(i: usize) -> T {
    r::<T>(2 * i as i64 - 1, 2)
}

/// Van der Corput radical inverse of `i` in base `b`, as an exact fraction.
fn radical_inverse(mut i: u64, b: u64) -> Rational {
    let mut num = 0u64;
    let mut den = 1u64;
    while i > 0 {
        num = num * b + i % b;
        den *= b;
        i /= b;
    }
    // Digits were accumulated in reverse, which is exactly the radical inverse.
    ratio(num as i64, den as i64)
}

const HALTON_BASES: [u64; 4] = [2, 3, 5, 7];

impl Family {
    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.params.len()
            && x.iter().zip(&self.bounds).all(
                |(v, (lo, hi))| {
                    if self.closed {
                        lo <= v && v <= hi
                    } else {
                        lo < v && v < hi
                    }
                },
            )
            && (self.inside)(x)
    }

    fn check(&self, x: &[Rational]) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            let shown: Vec<String> = x.iter().map(format_rational).collect();
            Err(Error::ParameterOutOfRange(format!("{} at ({}): {}", self.label, shown.join(", "), self.region())))
        }
    }

    pub fn eval_exact(&self, format: &GameFormat, x: &[Rational]) -> Result<MixedProfile<Rational>> {
        self.check(x)?;
        let f = self
            .exact
            .ok_or_else(|| Error::InvalidFormat(format!("family {} has irrational coordinates", self.label)))?;
        MixedProfile::new(format.clone(), format.states().map(|s| f(x, &s)).collect())
    }

    pub fn eval_f64(&self, format: &GameFormat, x: &[f64]) -> Result<MixedProfile<f64>> {
        let exact: Vec<Rational> = x
            .iter()
            .map(|v| Rational::from_float(*v).ok_or_else(|| Error::ParameterOutOfRange(format!("{v}"))))
            .collect::<Result<_>>()?;
        self.check(&exact)?;
        MixedProfile::new(format.clone(), format.states().map(|s| (self.float)(x, &s)).collect())
    }

    /// `count` deterministic interior parameter points: an even grid on one-parameter
    /// families, a Halton sequence filtered by the region otherwise.
    pub fn samples(&self, count: usize) -> Vec<Vec<Rational>> {
        match self.params.len() {
            0 => vec![Vec::new()],
            1 => {
                let (lo, hi) = &self.bounds[0];
                (1..=count)
                    .map(|k| vec![lo + (hi - lo) * ratio(k as i64, count as i64 + 1)])
                    .filter(|x| self.contains(x))
                    .collect()
            }
            n => (1..100_000u64)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let (lo, hi) = &self.bounds[j];
                            lo + (hi - lo) * radical_inverse(i, HALTON_BASES[j])
                        })
                        .collect::<Vec<_>>()
                })
                .filter(|x| self.contains(x) && x.iter().zip(&self.bounds).all(|(v, (lo, hi))| lo < v && v < hi))
                .take(count)
                .collect(),
        }
    }

    /// Human-readable region, e.g. `0 < t < 1/2`.
    pub fn region(&self) -> String {
        if self.params.is_empty() {
            return "single point".to_string();
        }
        let op = if self.closed { "<=" } else { "<" };
        let parts: Vec<String> = self
            .params
            .iter()
            .zip(&self.bounds)
            .map(|(p, (lo, hi))| format!("{} {op} {p} {op} {}", format_rational(lo), format_rational(hi)))
            .collect();
        let extra = match (self.label, self.params.len()) {
            (_, 1) => "",
            ("G2", _) => ", u3 = u2/(2(u1+u2)) - u2 > 0, u1+u2+u3 < 1/2",
            _ => ", with the remaining inequalities of the family",
        };
        format!("{}{extra}", parts.join(", "))
    }
}

fn always(_: &[Rational]) -> bool {
    true
}

fn family(
    label: &'static str,
    graph: Graph,
    params: Vec<&'static str>,
    bounds: Vec<(Rational, Rational)>,
    exact: Formula<Rational>,
    float: Formula<f64>,
) -> Family {
    Family { label, graph, params, bounds, closed: false, exact: Some(exact), float, inside: always }
}

fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
    Graph::from_edges_1based(n, edges).expect("fixture graph")
}

fn binary3() -> GameFormat {
    GameFormat::new(vec![2, 2, 2]).expect("binary format")
}

fn table(format: GameFormat, tables: [&[i64]; 3]) -> Game<Rational> {
    Game::new(format, tables.iter().map(|t| t.iter().map(|&v| int(v)).collect()).collect()).expect("payoff table")
}

// Prisoner's dilemma: two dependency-equilibrium components on the complete graph.

fn pd_first<T: Scalar>(x: &[T], s: &[usize]) -> T {
    let t = x[0].clone();
    let two = c::<T>(2);
    match (s[0], s[1]) {
        (0, 0) => t.clone() * (T::one() + t) / two,
        (1, 1) => (T::one() - t.clone()) * (two.clone() - t) / two,
        _ => t.clone() * (T::one() - t) / two,
    }
}

fn pd_second<T: Scalar>(x: &[T], s: &[usize]) -> T {
    let t = x[0].clone();
    let eight = c::<T>(8);
    let three = c::<T>(3);
    match (s[0], s[1]) {
        (0, 1) => (T::one() - t.clone()) * (T::one() - three * t) / eight,
        (1, 0) => (T::one() + t.clone()) * (T::one() + three * t) / eight,
        _ => three * (T::one() - t.clone() * t) / eight,
    }
}

fn prisoners_dilemma() -> Fixture {
    let format = GameFormat::new(vec![2, 2]).expect("format");
    let game =
        Game::new(format, vec![[0, -2, 1, -1].map(int).to_vec(), [0, 1, -2, -1].map(int).to_vec()]).expect("payoffs");
    let k2 = Graph::complete(2).expect("graph");
    let mut first = family("first", k2.clone(), vec!["t"], vec![(int(0), int(1))], pd_first, pd_first);
    first.closed = true;
    let mut second = family("second", k2, vec!["t"], vec![(ratio(-1, 3), ratio(1, 3))], pd_second, pd_second);
    second.closed = true;
    Fixture {
        id: "prisoners-dilemma",
        description: "prisoner's dilemma; dependency equilibria on the complete graph",
        game,
        families: vec![first, second],
    }
}

// Coordination game: every player gets 1 when all three choices agree.

fn uniform8<T: Scalar>(_: &[T], _: &[usize]) -> T {
    r(1, 8)
}

fn coord_g1<T: Scalar>(x: &[T], s: &[usize]) -> T {
    let t = x[0].clone();
    if s[1] == s[2] {
        t / c(2)
    } else {
        (T::one() - c::<T>(2) * t) / c(4)
    }
}

/// Index of the coordinate that disagrees with the other two, if any.
fn odd_one_out(s: &[usize]) -> Option<usize> {
    if s[0] == s[1] && s[1] == s[2] {
        None
    } else if s[1] == s[2] {
        Some(0)
    } else if s[0] == s[2] {
        Some(1)
    } else {
        Some(2)
    }
}

fn coord_g2_u3<T: Scalar>(u1: &T, u2: &T) -> T {
    u2.clone() / (c::<T>(2) * (u2.clone() + u1.clone())) - u2.clone()
}

fn coord_g2<T: Scalar>(x: &[T], s: &[usize]) -> T {
    let u = [x[0].clone(), x[1].clone(), coord_g2_u3(&x[0], &x[1])];
    match odd_one_out(s) {
        None => r::<T>(1, 2) - u[0].clone() - u[1].clone() - u[2].clone(),
        Some(k) => u[k].clone(),
    }
}

fn coord_g2_inside(x: &[Rational]) -> bool {
    let u3 = coord_g2_u3(&x[0], &x[1]);
    u3 > Rational::zero() && &x[0] + &x[1] + u3 < ratio(1, 2)
}

fn coord_g3<T: Scalar>(x: &[T], s: &[usize]) -> T {
    let su = x[0].clone() + x[1].clone() + x[2].clone();
    let delta = x[3].clone();
    // The majority value decides the sign of the shift.
    let major = if s[0] == s[1] || s[0] == s[2] { s[0] } else { s[1] };
    let e = delta * centered::<T>(major);
    match odd_one_out(s) {
        None => (r::<T>(1, 2) - su.clone()) * (T::one() + e / su),
        Some(k) => x[k].clone() + e,
    }
}

fn coord_g3_inside(x: &[Rational]) -> bool {
    let half_delta = x[3].clone().abs_val() / int(2);
    &x[0] + &x[1] + &x[2] < ratio(1, 2) && x[..3].iter().all(|u| *u > half_delta)
}

fn coordination() -> Fixture {
    let same = |_: usize, s: &[usize]| if s[0] == s[1] && s[1] == s[2] { int(1) } else { int(0) };
    let game = Game::from_fn(binary3(), same);
    let half = (int(0), ratio(1, 2));
    let mut g2 = family(
        "G2",
        graph(3, &[(1, 2), (2, 3)]),
        vec!["u1", "u2"],
        vec![half.clone(), half.clone()],
        coord_g2,
        coord_g2,
    );
    g2.inside = coord_g2_inside;
    let mut g3 = family(
        "G3",
        Graph::complete(3).expect("graph"),
        vec!["u1", "u2", "u3", "delta"],
        vec![half.clone(), half.clone(), half.clone(), (int(-1), int(1))],
        coord_g3,
        coord_g3,
    );
    g3.inside = coord_g3_inside;
    Fixture {
        id: "coordination-2-2-2",
        description: "three players, payoff 1 to everyone when all choices agree",
        game,
        families: vec![
            family("G0", Graph::empty(3).expect("graph"), vec![], vec![], uniform8, uniform8),
            family("G1", graph(3, &[(2, 3)]), vec!["t"], vec![half], coord_g1, coord_g1),
            g2,
            g3,
        ],
    }
}

// El Farol bar: strategy 2 goes to the bar, paying 1 unless the bar is overcrowded.

fn el_farol_game(a: Rational) -> Game<Rational> {
    Game::from_fn(binary3(), move |k, s| {
        if s[k] == 0 {
            int(0)
        } else {
            let going: usize = s.iter().sum();
            if int(going as i64) <= &a * int(3) {
                int(1)
            } else {
                int(-1)
            }
        }
    })
}

/// The totally mixed Nash point `(1/sqrt 2)^y (1 - 1/sqrt 2)^z`, where `y` counts
/// entries equal to `heavy` and `z` the others.
fn sqrt_point(s: &[usize], heavy: usize) -> f64 {
    let w = std::f64::consts::FRAC_1_SQRT_2;
    s.iter().map(|&i| if i == heavy { w } else { 1.0 - w }).product()
}

fn farol_half_g0(_: &[f64], s: &[usize]) -> f64 {
    sqrt_point(s, 0)
}

fn farol_three_quarters_g0(_: &[f64], s: &[usize]) -> f64 {
    sqrt_point(s, 1)
}

fn farol_half_g1<T: Scalar>(x: &[T], s: &[usize]) -> T {
    let y = x[0].clone();
    let eight_y = c::<T>(8) * y.clone();
    let low = T::one() - c::<T>(2) * y.clone();
    let high = c::<T>(6) * y.clone() - T::one();
    let tail = T::one() - c::<T>(4) * y;
    let lead = if s[0] == 0 { low } else { high };
    match (s[1], s[2]) {
        (0, 0) => lead / eight_y,
        (1, 1) => lead * tail / eight_y,
        _ => lead / c(4),
    }
}

fn farol_half_g3<T: Scalar>(x: &[T], s: &[usize]) -> T {
    let (u, xx) = ([x[0].clone(), x[1].clone(), x[2].clone()], x[3].clone());
    let su = u[0].clone() + u[1].clone() + u[2].clone();
    match s.iter().sum::<usize>() {
        3 => xx,
        0 => T::one() + xx / c(2) - r::<T>(3, 2) * su,
        1 => u[s.iter().position(|&i| i == 1).expect("one goer")].clone(),
        _ => {
            let k = s.iter().position(|&i| i == 0).expect("one stayer");
            (su - c::<T>(2) * u[k].clone() - xx) / c(2)
        }
    }
}

fn farol_half_g3_inside(x: &[Rational]) -> bool {
    let su = &x[0] + &x[1] + &x[2];
    (0..3).all(|i| &x[i] + &x[3] < &su - &x[i]) && su < (int(2) + &x[3]) / int(3)
}

/// Corrected one-edge family: player 1's factor is `1/2 + (2i - 3) x`, which
/// satisfies the indifference equations of players 2 and 3.
fn farol_three_quarters_g1<T: Scalar>(x: &[T], s: &[usize]) -> T {
    let x = x[0].clone();
    let f = r::<T>(1, 2) + c::<T>(2) * centered::<T>(s[0]) * x.clone();
    match (s[1], s[2]) {
        (0, 0) => (r::<T>(1, 2) - c::<T>(2) * x) * f,
        (1, 1) => f / c(2),
        _ => x * f,
    }
}

fn farol_three_quarters_g3<T: Scalar>(x: &[T], s: &[usize]) -> T {
    let (u, xx) = ([x[0].clone(), x[1].clone(), x[2].clone()], x[3].clone());
    let su = u[0].clone() + u[1].clone() + u[2].clone();
    match s.iter().sum::<usize>() {
        3 => xx,
        0 => T::one() + su - c::<T>(4) * xx,
        2 => u[s.iter().position(|&i| i == 0).expect("one stayer")].clone(),
        _ => {
            let k = s.iter().position(|&i| i == 1).expect("one goer");
            xx - (su - u[k].clone())
        }
    }
}

fn farol_three_quarters_g3_inside(x: &[Rational]) -> bool {
    let su = &x[0] + &x[1] + &x[2];
    let pairs_ok = (0..3).all(|k| &su - &x[k] < x[3]);
    pairs_ok && x[3] < (int(1) + su) / int(4)
}

fn float_point(label: &'static str, graph: Graph, f: Formula<f64>) -> Family {
    Family { label, graph, params: vec![], bounds: vec![], closed: false, exact: None, float: f, inside: always }
}

fn el_farol_half() -> Fixture {
    let mut g3 = family(
        "G3",
        Graph::complete(3).expect("graph"),
        vec!["u1", "u2", "u3", "x"],
        // 2 u_i < sum(u) < 1 and 3x < sum(u), so the region sits in this box.
        vec![(int(0), ratio(1, 2)), (int(0), ratio(1, 2)), (int(0), ratio(1, 2)), (int(0), ratio(1, 4))],
        farol_half_g3,
        farol_half_g3,
    );
    g3.inside = farol_half_g3_inside;
    Fixture {
        id: "el-farol-1/2",
        description: "El Farol bar, three players, overcrowded once two go",
        game: el_farol_game(ratio(1, 2)),
        families: vec![
            float_point("G0", Graph::empty(3).expect("graph"), farol_half_g0),
            family(
                "G1",
                graph(3, &[(2, 3)]),
                vec!["y"],
                vec![(ratio(1, 6), ratio(1, 4))],
                farol_half_g1,
                farol_half_g1,
            ),
            g3,
        ],
    }
}

fn el_farol_three_quarters() -> Fixture {
    let mut g3 = family(
        "G3",
        Graph::complete(3).expect("graph"),
        vec!["u1", "u2", "u3", "x"],
        vec![(int(0), ratio(1, 4)), (int(0), ratio(1, 4)), (int(0), ratio(1, 4)), (int(0), ratio(1, 2))],
        farol_three_quarters_g3,
        farol_three_quarters_g3,
    );
    g3.inside = farol_three_quarters_g3_inside;
    Fixture {
        id: "el-farol-3/4",
        description: "El Farol bar, three players, overcrowded only when all go",
        game: el_farol_game(ratio(3, 4)),
        families: vec![
            float_point("G0", Graph::empty(3).expect("graph"), farol_three_quarters_g0),
            family(
                "G1",
                graph(3, &[(2, 3)]),
                vec!["x"],
                vec![(int(0), ratio(1, 4))],
                farol_three_quarters_g1,
                farol_three_quarters_g1,
            ),
            g3,
        ],
    }
}

// Cournot-style fishers: price max(0, 6 - total catch), each catches 1 or 2.

fn fishers_g1<T: Scalar>(x: &[T], s: &[usize]) -> T {
    let x = x[0].clone();
    let six_x = c::<T>(6) * x.clone();
    let same = s[1] == s[2];
    match (s[0], same) {
        (0, true) => x * (six_x - T::one()),
        (0, false) => (r::<T>(1, 2) - x) * (six_x - T::one()),
        (_, true) => x * (c::<T>(2) - six_x),
        (_, false) => (T::one() - c::<T>(2) * x.clone()) * (T::one() - c::<T>(3) * x),
    }
}

fn cournot() -> Fixture {
    let game = Game::from_fn(binary3(), |k, s| {
        let total: i64 = s.iter().map(|&i| i as i64 + 1).sum();
        int((s[k] as i64 + 1) * (6 - total).max(0))
    });
    Fixture {
        id: "cournot-fishers",
        description: "three fishers catching one or two fish, price max(0, 6 - total)",
        game,
        families: vec![
            family("G0", Graph::empty(3).expect("graph"), vec![], vec![], uniform8, uniform8),
            family("G1", graph(3, &[(2, 3)]), vec!["x"], vec![(ratio(1, 6), ratio(1, 3))], fishers_g1, fishers_g1),
        ],
    }
}

// A 4x2x2 game whose one-edge CI equilibria form a segment while it has no totally
// mixed Nash equilibrium.

fn beats_nash_sigma1<T: Scalar>(t: &T) -> [T; 4] {
    [
        r::<T>(913, 5933) - r::<T>(106095, 47464) * t.clone(),
        r::<T>(3290, 5933) + r::<T>(27635, 47464) * t.clone(),
        r::<T>(1730, 5933) + r::<T>(7749, 11866) * t.clone(),
        t.clone(),
    ]
}

fn beats_nash_line<T: Scalar>(x: &[T], s: &[usize]) -> T {
    let sigma2 = [r::<T>(8, 21), r::<T>(1, 7), r::<T>(1, 3), r::<T>(1, 7)];
    beats_nash_sigma1(&x[0])[s[0]].clone() * sigma2[2 * s[1] + s[2]].clone()
}

fn beats_nash() -> Fixture {
    let format = GameFormat::new(vec![4, 2, 2]).expect("format");
    let game = table(
        format,
        [
            &[1, 0, 1, 15, 0, 0, 0, 20, -1, 7, 2, 11, 0, 2, 0, 18],
            &[1, 0, 0, 0, 1, 3, 0, 2, 9, 1, 0, 30, 4, 4, 0, 5],
            &[1, 0, 1, 0, 1, 0, 0, 10, 9, 0, 10, 3, 4, 0, 0, 5],
        ],
    );
    Fixture {
        id: "beats-nash-4-2-2",
        description: "4x2x2 game with a segment of one-edge CI equilibria and no totally mixed Nash equilibrium",
        game,
        families: vec![family(
            "G1",
            graph(3, &[(2, 3)]),
            vec!["t"],
            vec![(int(0), ratio(664, 9645))],
            beats_nash_line,
            beats_nash_line,
        )],
    }
}

// Binary game whose one-edge CI equilibria pay strictly more than its pure Nash equilibrium.

fn pareto_sigma<T: Scalar>(t: &T) -> ([T; 2], [T; 4]) {
    let den = c::<T>(4) * t.clone() - T::one();
    let s1 = [(c::<T>(10) * t.clone() - c(3)) / den.clone(), (c::<T>(2) - c::<T>(6) * t.clone()) / den];
    let s2 = [t.clone(), t.clone(), T::one() - c::<T>(3) * t.clone(), t.clone()];
    (s1, s2)
}

fn pareto_g1<T: Scalar>(x: &[T], s: &[usize]) -> T {
    let (s1, s2) = pareto_sigma(&x[0]);
    s1[s[0]].clone() * s2[2 * s[1] + s[2]].clone()
}

fn pareto() -> Fixture {
    let game = table(binary3(), [&[0, 4, 0, 0, 3, 0, 0, 1], &[2, 0, 3, 1, 3, -1, 4, 0], &[2, 3, 0, 1, 3, 4, -1, 0]]);
    Fixture {
        id: "pareto-2-2-2",
        description: "binary game whose one-edge CI equilibria pay (4t, 1, 2), above the pure Nash payoffs (1, 0, 0)",
        game,
        families: vec![family(
            "G1",
            graph(3, &[(2, 3)]),
            vec!["t"],
            vec![(ratio(3, 10), ratio(1, 3))],
            pareto_g1,
            pareto_g1,
        )],
    }
}

pub fn fixture(id: &str) -> Result<Fixture> {
    match id {
        "prisoners-dilemma" => Ok(prisoners_dilemma()),
        "coordination-2-2-2" => Ok(coordination()),
        "el-farol-1/2" => Ok(el_farol_half()),
        "el-farol-3/4" => Ok(el_farol_three_quarters()),
        "cournot-fishers" => Ok(cournot()),
        "beats-nash-4-2-2" => Ok(beats_nash()),
        "pareto-2-2-2" => Ok(pareto()),
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

pub fn fixtures() -> Vec<Fixture> {
    FIXTURE_IDS.iter().map(|id| fixture(id).expect("known fixture id")).collect()
}

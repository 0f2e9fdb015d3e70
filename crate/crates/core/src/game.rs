//! Normal-form games, joint distributions over pure states and the Spohn
//! matrices built from them.
//!
//! States are stored flat with the last player's index varying fastest and
//! 0-based strategy indices. Labels shown to users are 1-based.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, rational_from_json, Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GameFormat {
    dims: Vec<usize>,
}

impl GameFormat {
    pub const MAX_STATES: u128 = 1_000_000;

    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidFormat("at least one player is required".into()));
        }
        if let Some(k) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidFormat(format!("player {} has no strategies", k + 1)));
        }
        let states = dims.iter().fold(1u128, |acc, &d| acc.saturating_mul(d as u128));
        if states > Self::MAX_STATES {
            return Err(Error::TooLarge { states, limit: Self::MAX_STATES });
        }
        Ok(GameFormat { dims })
    }

    /// Parses "4,2,2".
    pub fn parse(s: &str) -> Result<Self> {
        let mut pos = 0;
        let mut dims = Vec::new();
        for t in s.split(',') {
            let d = t
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad format entry {t:?} at column {}", pos + 1)))?;
            dims.push(d);
            pos += t.len() + 1;
        }
        Self::new(dims)
    }

    pub fn players(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn d(&self, k: usize) -> usize {
        self.dims[k]
    }

    pub fn num_states(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.dims).fold(0, |acc, (&i, &d)| acc * d + i)
    }

    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            idx[k] = flat % self.dims[k];
            flat /= self.dims[k];
        }
        idx
    }

    /// All states in flat order.
    pub fn states(&self) -> StateIter {
        StateIter::new(self.dims.clone())
    }

    /// The restriction of the format to a subset of players, in the given order.
    pub fn sub(&self, players: &[usize]) -> Vec<usize> {
        players.iter().map(|&k| self.dims[k]).collect()
    }

    /// 1-based state label such as "121"; entries are comma-separated when some player has
    /// more than nine strategies.
    pub fn state_label(&self, idx: &[usize]) -> String {
        state_label(&self.sub(&(0..idx.len()).collect::<Vec<_>>()), idx)
    }

    pub fn to_string_list(&self) -> String {
        self.dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
    }
}

pub(crate) fn state_label(dims: &[usize], idx: &[usize]) -> String {
    let wide = dims.iter().any(|&d| d > 9);
    let parts: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
    if wide {
        parts.join(",")
    } else {
        parts.concat()
    }
}

/// Odometer over a product of ranges, last index fastest.
#[derive(Clone, Debug)]
pub struct StateIter {
    dims: Vec<usize>,
    cur: Vec<usize>,
    done: bool,
}

impl StateIter {
    pub fn new(dims: Vec<usize>) -> Self {
        let done = dims.contains(&0);
        let cur = vec![0; dims.len()];
        StateIter { dims, cur, done }
    }
}

impl Iterator for StateIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let mut k = self.dims.len();
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.cur[k] += 1;
            if self.cur[k] < self.dims[k] {
                break;
            }
            self.cur[k] = 0;
        }
        Some(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PayoffTensor<T> {
    pub values: Vec<T>,
}

impl<T: Scalar> PayoffTensor<T> {
    pub fn get(&self, format: &GameFormat, idx: &[usize]) -> &T {
        &self.values[format.flatten(idx)]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Game<T> {
    pub format: GameFormat,
    pub payoffs: Vec<PayoffTensor<T>>,
}

impl<T: Scalar> Game<T> {
    pub fn new(format: GameFormat, payoffs: Vec<Vec<T>>) -> Result<Self> {
        if payoffs.len() != format.players() {
            return Err(Error::FormatMismatch(format!(
                "{} payoff tensors for {} players",
                payoffs.len(),
                format.players()
            )));
        }
        let states = format.num_states();
        if let Some(k) = payoffs.iter().position(|x| x.len() != states) {
            return Err(Error::FormatMismatch(format!(
                "payoff tensor of player {} has {} entries, expected {}",
                k + 1,
                payoffs[k].len(),
                states
            )));
        }
        Ok(Game { format, payoffs: payoffs.into_iter().map(|values| PayoffTensor { values }).collect() })
    }

    /// Builds a game from closures `payoff(k, state)` with 0-based indices.
    pub fn from_fn(format: GameFormat, mut payoff: impl FnMut(usize, &[usize]) -> T) -> Self {
        let payoffs = (0..format.players())
            .map(|k| PayoffTensor { values: format.states().map(|s| payoff(k, &s)).collect() })
            .collect();
        Game { format, payoffs }
    }

    pub fn payoff(&self, k: usize) -> &[T] {
        &self.payoffs[k].values
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Game<U> {
        Game {
            format: self.format.clone(),
            payoffs: self.payoffs.iter().map(|t| PayoffTensor { values: t.values.iter().map(&f).collect() }).collect(),
        }
    }
}

impl Game<Rational> {
    pub fn to_f64(&self) -> Game<f64> {
        self.map(f64::from_rational)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let format = format_from_json(v)?;
        let payoffs = v
            .get("payoffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing \"payoffs\" array".into()))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| Error::Parse("payoff tensor must be an array".into()))?
                    .iter()
                    .map(rational_from_json)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Game::new(format, payoffs)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "format": self.format.dims(),
            "payoffs": self.payoffs.iter().map(|t| t.values.iter().map(rational_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

fn format_from_json(v: &Value) -> Result<GameFormat> {
    let dims = v
        .get("format")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing \"format\" array".into()))?
        .iter()
        .map(|d| d.as_u64().map(|d| d as usize).ok_or_else(|| Error::Parse(format!("bad format entry {d}"))))
        .collect::<Result<Vec<_>>>()?;
    GameFormat::new(dims)
}

pub(crate) fn rational_json(r: &Rational) -> Value {
    if r.is_integer() {
        if let Ok(n) = r.numer().to_string().parse::<i64>() {
            return json!(n);
        }
    }
    Value::String(format_rational(r))
}

/// A joint distribution over pure states.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedProfile<T> {
    pub format: GameFormat,
    pub p: Vec<T>,
}

impl<T: Scalar> MixedProfile<T> {
    pub fn new(format: GameFormat, p: Vec<T>) -> Result<Self> {
        if p.len() != format.num_states() {
            return Err(Error::FormatMismatch(format!(
                "profile has {} entries, format has {} states",
                p.len(),
                format.num_states()
            )));
        }
        Ok(MixedProfile { format, p })
    }

    pub fn uniform(format: GameFormat) -> Self {
        let n = format.num_states();
        let v = T::one() / T::from_i64(n as i64);
        MixedProfile { format, p: vec![v; n] }
    }

    /// Product of independent per-player distributions.
    pub fn product(format: GameFormat, factors: &[Vec<T>]) -> Result<Self> {
        if factors.len() != format.players() || factors.iter().zip(format.dims()).any(|(f, &d)| f.len() != d) {
            return Err(Error::FormatMismatch("factor lengths do not match the format".into()));
        }
        let p = format
            .states()
            .map(|s| s.iter().enumerate().fold(T::one(), |acc, (k, &i)| acc * factors[k][i].clone()))
            .collect();
        Ok(MixedProfile { format, p })
    }

    pub fn total(&self) -> T {
        self.p.iter().cloned().fold(T::zero(), |a, b| a + b)
    }

    pub fn is_totally_mixed(&self) -> bool {
        self.p.iter().all(|x| *x > T::zero())
    }

    /// Nonnegative and summing to one (exactly, or within `tol` for floats).
    pub fn is_distribution(&self, tol: f64) -> bool {
        let neg = self.p.iter().any(|x| *x < T::zero() && !(-x.clone()).is_negligible(tol));
        !neg && (self.total() - T::one()).is_negligible(tol)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> MixedProfile<U> {
        MixedProfile { format: self.format.clone(), p: self.p.iter().map(f).collect() }
    }
}

impl MixedProfile<Rational> {
    pub fn from_json(v: &Value) -> Result<Self> {
        let format = format_from_json(v)?;
        let p = v
            .get("p")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing \"p\" array".into()))?
            .iter()
            .map(rational_from_json)
            .collect::<Result<Vec<_>>>()?;
        MixedProfile::new(format, p)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Value {
        json!({ "format": self.format.dims(), "p": self.p.iter().map(rational_json).collect::<Vec<_>>() })
    }
}

/// Marginal distribution of a subset of players; `format` lists their strategy counts in
/// the order of `players`.
#[derive(Clone, Debug, PartialEq)]
pub struct Marginal<T> {
    pub players: Vec<usize>,
    pub dims: Vec<usize>,
    pub values: Vec<T>,
}

pub fn marginal<T: Scalar>(p: &MixedProfile<T>, players: &[usize]) -> Result<Marginal<T>> {
    let n = p.format.players();
    let mut seen = vec![false; n];
    for &k in players {
        if k >= n || seen[k] {
            return Err(Error::InvalidFormat(format!("bad player subset {players:?}")));
        }
        seen[k] = true;
    }
    let dims = p.format.sub(players);
    let size: usize = dims.iter().product();
    let mut values = vec![T::zero(); size];
    for (flat, s) in p.format.states().enumerate() {
        let j = players.iter().zip(&dims).fold(0, |acc, (&k, &d)| acc * d + s[k]);
        values[j] = values[j].clone() + p.p[flat].clone();
    }
    Ok(Marginal { players: players.to_vec(), dims, values })
}

/// Marginal of a single player: `p_{+..i..+}`.
pub fn player_marginal<T: Scalar>(p: &MixedProfile<T>, k: usize) -> Vec<T> {
    let mut out = vec![T::zero(); p.format.d(k)];
    for (flat, s) in p.format.states().enumerate() {
        out[s[k]] = out[s[k]].clone() + p.p[flat].clone();
    }
    out
}

/// `(p ._k X)_i`: payoff-weighted sums over the states where player `k` plays `i`.
pub fn contract<T: Scalar>(p: &MixedProfile<T>, x: &[T], k: usize) -> Result<Vec<T>> {
    if x.len() != p.p.len() {
        return Err(Error::FormatMismatch("payoff tensor and profile differ in size".into()));
    }
    let mut out = vec![T::zero(); p.format.d(k)];
    for (flat, s) in p.format.states().enumerate() {
        out[s[k]] = out[s[k]].clone() + p.p[flat].clone() * x[flat].clone();
    }
    Ok(out)
}

/// Expected payoff of player `k` conditioned on each of their pure strategies.
pub fn conditional_payoffs<T: Scalar>(game: &Game<T>, p: &MixedProfile<T>, k: usize) -> Result<Vec<T>> {
    check_same_format(game, p)?;
    let marg = player_marginal(p, k);
    let num = contract(p, game.payoff(k), k)?;
    marg.into_iter()
        .zip(num)
        .enumerate()
        .map(
            |(i, (m, c))| {
                if m.is_zero() {
                    Err(Error::ZeroMarginal { player: k + 1, strategy: i + 1 })
                } else {
                    Ok(c / m)
                }
            },
        )
        .collect()
}

pub fn expected_payoff<T: Scalar>(game: &Game<T>, p: &MixedProfile<T>, k: usize) -> Result<T> {
    check_same_format(game, p)?;
    Ok(p.p.iter().zip(game.payoff(k)).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
}

fn check_same_format<T: Scalar>(game: &Game<T>, p: &MixedProfile<T>) -> Result<()> {
    if game.format != p.format {
        return Err(Error::FormatMismatch(format!(
            "game format [{}] vs profile format [{}]",
            game.format.to_string_list(),
            p.format.to_string_list()
        )));
    }
    Ok(())
}

/// The `d_k x 2` matrix with rows `(p_{+..i..+}, (p ._k X^(k))_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpohnMatrix<T> {
    pub player: usize,
    pub rows: Vec<[T; 2]>,
}

impl<T: Scalar> SpohnMatrix<T> {
    pub fn minor(&self, a: usize, b: usize) -> T {
        self.rows[a][0].clone() * self.rows[b][1].clone() - self.rows[b][0].clone() * self.rows[a][1].clone()
    }

    /// All 2x2 minors `(a, b)` with `a < b`, in lexicographic order.
    pub fn minors(&self) -> Vec<((usize, usize), T)> {
        let d = self.rows.len();
        let mut out = Vec::with_capacity(d * d.saturating_sub(1) / 2);
        for a in 0..d {
            for b in a + 1..d {
                out.push(((a, b), self.minor(a, b)));
            }
        }
        out
    }
}

pub fn spohn_matrix<T: Scalar>(game: &Game<T>, p: &MixedProfile<T>, k: usize) -> Result<SpohnMatrix<T>> {
    check_same_format(game, p)?;
    let marg = player_marginal(p, k);
    let num = contract(p, game.payoff(k), k)?;
    Ok(SpohnMatrix { player: k, rows: marg.into_iter().zip(num).map(|(m, c)| [m, c]).collect() })
}

/// A game with integer payoffs drawn uniformly from `range`, reproducible from `seed`.
pub fn random_game(format: &GameFormat, seed: u64, range: std::ops::RangeInclusive<i64>) -> Game<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let payoffs = (0..format.players())
        .map(|_| (0..format.num_states()).map(|_| Rational::from_i64(rng.random_range(range.clone()))).collect())
        .collect();
    Game::new(format.clone(), payoffs).expect("sizes match by construction")
}

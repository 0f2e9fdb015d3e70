//! Explicit polynomial systems: Spohn minors and conditional-independence minors
//! in joint-probability coordinates, and their pullbacks to clique parameters
//! `σ^(C)_{j_C}` through the monomial map of the graphical model.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::game::{state_label, Game, GameFormat, StateIter};
use crate::graph::{label_set, CiStatement, Graph};
use crate::scalar::{format_rational, Rational, Scalar};

/// `(variable, exponent)` pairs sorted by variable, exponents positive.
pub type Monomial = Vec<(u32, u32)>;

/// Sparse polynomial with rational coefficients over numbered variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparsePoly {
    terms: BTreeMap<Monomial, Rational>,
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&(va, ea)), Some(&(vb, eb))) if va == vb => {
                out.push((va, ea + eb));
                i += 1;
                j += 1;
            }
            (Some(&(va, ea)), Some(&(vb, _))) if va < vb => {
                out.push((va, ea));
                i += 1;
            }
            (Some(&(va, ea)), None) => {
                out.push((va, ea));
                i += 1;
            }
            (_, Some(&(vb, eb))) => {
                out.push((vb, eb));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// `a / b` when `b` divides `a`.
fn mono_div(a: &Monomial, b: &Monomial) -> Option<Monomial> {
    let mut out = Vec::with_capacity(a.len());
    let mut j = 0;
    for &(v, e) in a {
        if j < b.len() && b[j].0 < v {
            return None;
        }
        if j < b.len() && b[j].0 == v {
            if b[j].1 > e {
                return None;
            }
            if e > b[j].1 {
                out.push((v, e - b[j].1));
            }
            j += 1;
        } else {
            out.push((v, e));
        }
    }
    (j == b.len()).then_some(out)
}

fn mono_degree(m: &Monomial) -> u32 {
    m.iter().map(|&(_, e)| e).sum()
}

/// Lexicographic order with variable 0 largest.
fn lex_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if x.0 != y.0 {
            return if x.0 < y.0 { Ordering::Greater } else { Ordering::Less };
        }
        if x.1 != y.1 {
            return x.1.cmp(&y.1);
        }
    }
    a.len().cmp(&b.len())
}

fn grlex_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    mono_degree(a).cmp(&mono_degree(b)).then_with(|| lex_cmp(a, b))
}

impl SparsePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn var(v: u32) -> Self {
        Self::monomial(vec![(v, 1)], Rational::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in descending graded-lexicographic order.
    pub fn terms(&self) -> Vec<(&Monomial, &Rational)> {
        let mut out: Vec<_> = self.terms.iter().collect();
        out.sort_by(|a, b| grlex_cmp(b.0, a.0));
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        SparsePoly { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(mono_mul(m1, m2), c1 * c2);
            }
        }
        out
    }

    /// Leading term in lexicographic order.
    fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| lex_cmp(a.0, b.0))
    }

    /// Exact quotient, or `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let (lm, lc) = divisor.leading()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((m, c)) = rem.leading() {
            let t = mono_div(m, &lm)?;
            let coef = c / &lc;
            let step = Self::monomial(t, coef);
            rem = rem.sub(&step.mul(divisor));
            quot = quot.add(&step);
        }
        Some(quot)
    }

    /// Substitutes `images[v]` for each variable `v`.
    pub fn compose(&self, images: &[SparsePoly]) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut term = Self::constant(c.clone());
            for &(v, e) in m {
                for _ in 0..e {
                    term = term.mul(&images[v as usize]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    pub fn derivative(&self, v: u32) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if let Some(pos) = m.iter().position(|&(x, _)| x == v) {
                let e = m[pos].1;
                let mut dm = m.clone();
                if e == 1 {
                    dm.remove(pos);
                } else {
                    dm[pos].1 = e - 1;
                }
                out.add_term(dm, c * Rational::from_i64(e as i64));
            }
        }
        out
    }

    pub fn eval<T: Scalar>(&self, point: &[T]) -> T {
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = T::from_rational(c);
            for &(v, e) in m {
                for _ in 0..e {
                    t = t * point[v as usize].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Degree in the variables selected by `in_group`, when all terms agree.
    pub fn group_degree(&self, in_group: impl Fn(u32) -> bool) -> Option<u32> {
        let mut degs = self.terms.keys().map(|m| m.iter().filter(|(v, _)| in_group(*v)).map(|(_, e)| e).sum());
        let first = degs.next()?;
        degs.all(|d: u32| d == first).then_some(first)
    }

    pub fn variables(&self) -> Vec<u32> {
        let mut vs: Vec<u32> = self.terms.keys().flat_map(|m| m.iter().map(|&(v, _)| v)).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        let terms = self.terms();
        if terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in terms.into_iter().enumerate() {
            let mag = c.abs();
            if idx == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            let vars: Vec<String> = m
                .iter()
                .map(|&(v, e)| if e == 1 { names[v as usize].clone() } else { format!("{}^{}", names[v as usize], e) })
                .collect();
            match (vars.is_empty(), mag.is_one()) {
                (true, _) => out.push_str(&format_rational(&mag)),
                (false, true) => out.push_str(&vars.join("*")),
                (false, false) => {
                    let _ = write!(out, "{}*{}", format_rational(&mag), vars.join("*"));
                }
            }
        }
        out
    }
}

/// One clique parameter `σ^(C)_{j_C}`: clique index and 0-based clique state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SigmaVar {
    pub clique: usize,
    pub state: Vec<usize>,
}

/// The clique parameters of a graph and format, numbered clique by clique with
/// clique states in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaSpace {
    pub format: GameFormat,
    pub cliques: Vec<Vec<usize>>,
    offsets: Vec<usize>,
    sizes: Vec<usize>,
}

impl SigmaSpace {
    pub fn new(format: &GameFormat, g: &Graph) -> Result<Self> {
        g.check_format(format)?;
        let cliques = g.maximal_cliques()?;
        let sizes: Vec<usize> = cliques.iter().map(|c| c.iter().map(|&v| format.d(v)).product()).collect();
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut acc = 0;
        for s in &sizes {
            offsets.push(acc);
            acc += s;
        }
        Ok(SigmaSpace { format: format.clone(), cliques, offsets, sizes })
    }

    pub fn num_vars(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn clique_dims(&self, c: usize) -> Vec<usize> {
        self.format.sub(&self.cliques[c])
    }

    pub fn clique_size(&self, c: usize) -> usize {
        self.sizes[c]
    }

    /// Variable range of clique `c`.
    pub fn clique_vars(&self, c: usize) -> std::ops::Range<usize> {
        self.offsets[c]..self.offsets[c] + self.sizes[c]
    }

    pub fn clique_of_var(&self, v: usize) -> usize {
        self.offsets.partition_point(|&o| o <= v) - 1
    }

    pub fn index(&self, var: &SigmaVar) -> usize {
        let dims = self.clique_dims(var.clique);
        self.offsets[var.clique] + var.state.iter().zip(&dims).fold(0, |acc, (&s, &d)| acc * d + s)
    }

    pub fn var(&self, v: usize) -> SigmaVar {
        let c = self.clique_of_var(v);
        let dims = self.clique_dims(c);
        let mut rest = v - self.offsets[c];
        let mut state = vec![0; dims.len()];
        for i in (0..dims.len()).rev() {
            state[i] = rest % dims[i];
            rest /= dims[i];
        }
        SigmaVar { clique: c, state }
    }

    /// Variable of clique `c` at the restriction of the global state `s`.
    fn var_at(&self, c: usize, s: &[usize]) -> u32 {
        let state: Vec<usize> = self.cliques[c].iter().map(|&v| s[v]).collect();
        self.index(&SigmaVar { clique: c, state }) as u32
    }

    /// Variable names `s{clique}_{state}` with 1-based clique index and state digits.
    pub fn names(&self) -> Vec<String> {
        (0..self.num_vars())
            .map(|v| {
                let var = self.var(v);
                let label = state_label(&self.clique_dims(var.clique), &var.state).replace(',', "_");
                format!("s{}_{}", var.clique + 1, label)
            })
            .collect()
    }

    /// Pretty name `σ^(C)_{j}` for reports.
    pub fn pretty(&self, v: usize) -> String {
        let var = self.var(v);
        format!("σ^{}_{}", label_set(&self.cliques[var.clique]), state_label(&self.clique_dims(var.clique), &var.state))
    }

    /// Product over cliques whose index satisfies `keep` of `σ^(C)_{s_C}`.
    fn product_at(&self, s: &[usize], keep: impl Fn(usize) -> bool) -> SparsePoly {
        let mut m: Monomial = (0..self.cliques.len()).filter(|&c| keep(c)).map(|c| (self.var_at(c, s), 1)).collect();
        m.sort_unstable();
        SparsePoly::monomial(m, Rational::one())
    }
}

/// Names `p{state}` for joint-probability coordinates.
pub fn p_names(format: &GameFormat) -> Vec<String> {
    format.states().map(|s| format!("p{}", format.state_label(&s).replace(',', "_"))).collect()
}

/// `p_j = prod_C σ^(C)_{j_C}`.
pub fn monomial_map(space: &SigmaSpace, state: &[usize]) -> SparsePoly {
    space.product_at(state, |_| true)
}

/// Images of all `p_j` in flat state order.
pub fn monomial_map_all(space: &SigmaSpace) -> Vec<SparsePoly> {
    space.format.states().map(|s| monomial_map(space, &s)).collect()
}

fn component_of(g: &Graph, k: usize) -> Vec<usize> {
    g.components().into_iter().find(|c| c.contains(&k)).expect("vertex in a component")
}

fn cliques_within(space: &SigmaSpace, comp: &[usize]) -> Vec<bool> {
    space.cliques.iter().map(|c| c.iter().all(|v| comp.contains(v))).collect()
}

/// Sum over the states of `vertices` with player `fixed.0` at `fixed.1` (if given) of the
/// product of clique parameters over the cliques selected by `inside`.
fn summed_products(
    space: &SigmaSpace,
    vertices: &[usize],
    fixed: Option<(usize, usize)>,
    inside: &[bool],
) -> SparsePoly {
    let dims: Vec<usize> =
        vertices.iter().map(|&v| if fixed.is_some_and(|(k, _)| k == v) { 1 } else { space.format.d(v) }).collect();
    let mut s = vec![0; space.format.players()];
    let mut out = SparsePoly::zero();
    for local in StateIter::new(dims) {
        for (&v, &x) in vertices.iter().zip(&local) {
            s[v] = x;
        }
        if let Some((k, a)) = fixed {
            s[k] = a;
        }
        out = out.add(&space.product_at(&s, |c| inside[c]));
    }
    out
}

/// `L_a = sum over the states of k's component with k at a` of the clique product over
/// cliques of that component. Only defined for non-isolated `k`.
pub fn l_poly(space: &SigmaSpace, g: &Graph, k: usize, a: usize) -> Result<SparsePoly> {
    if g.is_isolated(k) {
        return Err(Error::IsolatedVertex(k + 1));
    }
    let comp = component_of(g, k);
    Ok(summed_products(space, &comp, Some((k, a)), &cliques_within(space, &comp)))
}

/// The `d_k x 2` matrix whose minors generate the pulled-back Spohn equations of
/// player `k`, with the factors removed from the pulled-back Spohn matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct PullbackMatrix {
    pub player: usize,
    pub rows: Vec<[SparsePoly; 2]>,
    /// Removed from the first column: the sum of clique products outside k's component.
    pub column_factor: SparsePoly,
    /// For isolated players, `σ^({k})_a` removed from row `a`.
    pub row_factors: Option<Vec<SparsePoly>>,
}

impl PullbackMatrix {
    pub fn minor(&self, a: usize, b: usize) -> SparsePoly {
        self.rows[a][0].mul(&self.rows[b][1]).sub(&self.rows[b][0].mul(&self.rows[a][1]))
    }

    /// The factor by which the pulled-back Spohn minor `(a, b)` exceeds `minor(a, b)`.
    pub fn removed_factor(&self, a: usize, b: usize) -> SparsePoly {
        match &self.row_factors {
            Some(r) => self.column_factor.mul(&r[a]).mul(&r[b]),
            None => self.column_factor.clone(),
        }
    }
}

pub fn pullback_matrix(game: &Game<Rational>, g: &Graph, space: &SigmaSpace, k: usize) -> Result<PullbackMatrix> {
    g.check_format(&game.format)?;
    let format = &game.format;
    let comp = component_of(g, k);
    let inside = cliques_within(space, &comp);
    let outside_vertices: Vec<usize> = (0..format.players()).filter(|v| !comp.contains(v)).collect();
    let outside: Vec<bool> = inside.iter().map(|b| !b).collect();
    let column_factor = summed_products(space, &outside_vertices, None, &outside);
    let isolated = g.is_isolated(k);
    let own_clique = if isolated { space.cliques.iter().position(|c| c == &vec![k]) } else { None };
    let x = game.payoff(k);
    let mut second: Vec<SparsePoly> = vec![SparsePoly::zero(); format.d(k)];
    for (flat, s) in format.states().enumerate() {
        if x[flat].is_zero() {
            continue;
        }
        let mono = space.product_at(&s, |c| Some(c) != own_clique);
        second[s[k]] = second[s[k]].add(&mono.scale(&x[flat]));
    }
    let rows = (0..format.d(k))
        .map(|a| {
            let first = if isolated { Ok(SparsePoly::one()) } else { l_poly(space, g, k, a) }?;
            Ok([first, std::mem::take(&mut second[a])])
        })
        .collect::<Result<Vec<_>>>()?;
    let row_factors = own_clique.map(|c| {
        (0..format.d(k)).map(|a| SparsePoly::var(space.index(&SigmaVar { clique: c, state: vec![a] }) as u32)).collect()
    });
    Ok(PullbackMatrix { player: k, rows, column_factor, row_factors })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemKind {
    /// Cluster graph: the system cuts out the Nash CI variety.
    Cluster,
    /// Any other graph: the system cuts out the Spohn variety on the model.
    General,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub poly: SparsePoly,
    /// Expected degree in each clique's parameters.
    pub multidegree: Vec<u32>,
    pub player: usize,
    pub rows: (usize, usize),
    /// The factor removed from the pulled-back Spohn minor, in σ names.
    pub removed_factor: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquationSystem {
    pub kind: SystemKind,
    pub game: Game<Rational>,
    pub graph: Graph,
    pub space: SigmaSpace,
    pub generators: Vec<Generator>,
}

impl EquationSystem {
    /// Checks each generator's multidegree; zero generators pass vacuously.
    pub fn is_multihomogeneous(&self) -> bool {
        self.generators.iter().all(|gen| {
            gen.poly.is_zero()
                || (0..self.space.cliques.len()).all(|c| {
                    let range = self.space.clique_vars(c);
                    gen.poly.group_degree(|v| range.contains(&(v as usize))) == Some(gen.multidegree[c])
                })
        })
    }

    /// Linear normalizations `sum σ^(C) - 1`, one per clique.
    pub fn normalizations(&self) -> Vec<SparsePoly> {
        (0..self.space.cliques.len())
            .map(|c| {
                self.space
                    .clique_vars(c)
                    .fold(SparsePoly::constant(-Rational::one()), |acc, v| acc.add(&SparsePoly::var(v as u32)))
            })
            .collect()
    }

    pub fn polys(&self) -> Vec<SparsePoly> {
        self.generators.iter().map(|g| g.poly.clone()).collect()
    }

    pub fn export(&self, dialect: Dialect) -> String {
        export_ideal(&self.space.names(), &self.polys(), dialect)
    }
}

/// Generators of the pulled-back system: for isolated players the minors `(1, b)`,
/// which span the others, and for the rest every minor `(a, b)` with `a < b`.
pub fn equation_system(game: &Game<Rational>, g: &Graph) -> Result<EquationSystem> {
    let space = SigmaSpace::new(&game.format, g)?;
    let names = space.names();
    let mut generators = Vec::new();
    for k in 0..game.format.players() {
        let m = pullback_matrix(game, g, &space, k)?;
        let comp = component_of(g, k);
        let inside = cliques_within(&space, &comp);
        let isolated = g.is_isolated(k);
        let multidegree: Vec<u32> = space
            .cliques
            .iter()
            .enumerate()
            .map(|(c, clique)| {
                if isolated {
                    u32::from(clique != &vec![k])
                } else if inside[c] {
                    2
                } else {
                    1
                }
            })
            .collect();
        let d = game.format.d(k);
        let pairs: Vec<(usize, usize)> = if isolated {
            (1..d).map(|b| (0, b)).collect()
        } else {
            (0..d).flat_map(|a| (a + 1..d).map(move |b| (a, b))).collect()
        };
        for (a, b) in pairs {
            generators.push(Generator {
                poly: m.minor(a, b),
                multidegree: multidegree.clone(),
                player: k,
                rows: (a, b),
                removed_factor: m.removed_factor(a, b).to_string_with(&names),
            });
        }
    }
    let kind = if g.is_cluster() { SystemKind::Cluster } else { SystemKind::General };
    Ok(EquationSystem { kind, game: game.clone(), graph: g.clone(), space, generators })
}

/// Spohn minors `(k, a, b)` in the joint-probability variables, `a < b`.
pub fn spohn_minors_p(game: &Game<Rational>) -> Vec<((usize, usize, usize), SparsePoly)> {
    let format = &game.format;
    let mut out = Vec::new();
    for k in 0..format.players() {
        let mut marg = vec![SparsePoly::zero(); format.d(k)];
        let mut contr = vec![SparsePoly::zero(); format.d(k)];
        for (flat, s) in format.states().enumerate() {
            let p = SparsePoly::var(flat as u32);
            marg[s[k]] = marg[s[k]].add(&p);
            contr[s[k]] = contr[s[k]].add(&p.scale(&game.payoff(k)[flat]));
        }
        for a in 0..format.d(k) {
            for b in a + 1..format.d(k) {
                let minor = marg[a].mul(&contr[b]).sub(&marg[b].mul(&contr[a]));
                out.push(((k, a, b), minor));
            }
        }
    }
    out
}

/// CI minors `p_{iA iB iC} p_{jA jB iC} - p_{iA jB iC} p_{jA iB iC}` for every pairwise
/// Markov statement, conditioning state and pair of rows and columns.
pub fn ci_minors_p(format: &GameFormat, g: &Graph) -> Result<Vec<(CiStatement, SparsePoly)>> {
    g.check_format(format)?;
    let mut out = Vec::new();
    for st in g.pairwise_markov_statements() {
        for rest_state in StateIter::new(format.sub(&st.rest)) {
            let at = |x: usize, y: usize| {
                let mut s = vec![0; format.players()];
                s[st.i] = x;
                s[st.j] = y;
                for (&v, &r) in st.rest.iter().zip(&rest_state) {
                    s[v] = r;
                }
                SparsePoly::var(format.flatten(&s) as u32)
            };
            for ia in 0..format.d(st.i) {
                for ja in ia + 1..format.d(st.i) {
                    for ib in 0..format.d(st.j) {
                        for jb in ib + 1..format.d(st.j) {
                            let m = at(ia, ib).mul(&at(ja, jb)).sub(&at(ia, jb).mul(&at(ja, ib)));
                            out.push((st.clone(), m));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Checks that every pulled-back Spohn minor equals its removed factor times the
/// corresponding minor of the pullback matrix, by exact division.
pub fn pullback_consistency(game: &Game<Rational>, g: &Graph) -> Result<bool> {
    let space = SigmaSpace::new(&game.format, g)?;
    let images = monomial_map_all(&space);
    let mats = (0..game.format.players()).map(|k| pullback_matrix(game, g, &space, k)).collect::<Result<Vec<_>>>()?;
    for ((k, a, b), minor) in spohn_minors_p(game) {
        let pulled = minor.compose(&images);
        let factor = mats[k].removed_factor(a, b);
        let expected = mats[k].minor(a, b);
        match pulled.div_exact(&factor) {
            Some(q) if q == expected => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dialect {
    Plain,
    M2,
}

impl std::str::FromStr for Dialect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Dialect::Plain),
            "m2" => Ok(Dialect::M2),
            other => Err(Error::UnknownDialect(other.to_string())),
        }
    }
}

/// Text export of an ideal. Plain: a `vars:` line, then one polynomial per line.
/// M2: a ring declaration over QQ and an `ideal(...)` assignment.
pub fn export_ideal(names: &[String], polys: &[SparsePoly], dialect: Dialect) -> String {
    let rendered: Vec<String> = polys.iter().map(|p| p.to_string_with(names)).collect();
    let mut out = String::new();
    match dialect {
        Dialect::Plain => {
            let _ = writeln!(out, "vars: {}", names.join(" "));
            for r in rendered {
                let _ = writeln!(out, "{r}");
            }
        }
        Dialect::M2 => {
            let _ = writeln!(out, "R = QQ[{}];", names.join(","));
            if rendered.is_empty() {
                let _ = writeln!(out, "I = ideal(map(R^1, R^0, 0));");
            } else {
                let _ = writeln!(out, "I = ideal(");
                let last = rendered.len() - 1;
                for (i, r) in rendered.iter().enumerate() {
                    let _ = writeln!(out, "  {r}{}", if i < last { "," } else { "" });
                }
                let _ = writeln!(out, ");");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};
    use proptest::prelude::*;

    fn coordination_game() -> Game<Rational> {
        let f = GameFormat::new(vec![2, 2, 2]).unwrap();
        let x1 = [0, 4, 0, 0, 3, 0, 0, 1];
        let x2 = [2, 0, 3, 1, 3, -1, 4, 0];
        let x3 = [2, 3, 0, 1, 3, 4, -1, 0];
        Game::new(f, vec![x1.map(int).to_vec(), x2.map(int).to_vec(), x3.map(int).to_vec()]).unwrap()
    }

    fn edge23() -> Graph {
        Graph::from_edges_1based(3, &[(2, 3)]).unwrap()
    }

    fn render(space: &SigmaSpace, p: &SparsePoly) -> String {
        p.to_string_with(&space.names())
    }

    #[test]
    fn sigma_names_and_indexing() {
        let f = GameFormat::new(vec![2, 2, 2]).unwrap();
        let s = SigmaSpace::new(&f, &edge23()).unwrap();
        assert_eq!(s.names(), vec!["s1_1", "s1_2", "s2_11", "s2_12", "s2_21", "s2_22"]);
        for v in 0..s.num_vars() {
            assert_eq!(s.index(&s.var(v)), v);
        }
        assert_eq!(s.pretty(3), "σ^{2,3}_12");
    }

    #[test]
    fn monomial_map_of_a_state() {
        let f = GameFormat::new(vec![2, 2, 2]).unwrap();
        let s = SigmaSpace::new(&f, &edge23()).unwrap();
        assert_eq!(render(&s, &monomial_map(&s, &[1, 0, 1])), "s1_2*s2_12");
    }

    #[test]
    fn l_poly_on_a_path() {
        let f = GameFormat::new(vec![2, 2, 2]).unwrap();
        let g = Graph::from_edges_1based(3, &[(1, 2), (2, 3)]).unwrap();
        let s = SigmaSpace::new(&f, &g).unwrap();
        let l = l_poly(&s, &g, 1, 0).unwrap();
        assert_eq!(l.len(), 4);
        assert_eq!(render(&s, &l), "s1_11*s2_11 + s1_11*s2_12 + s1_21*s2_11 + s1_21*s2_12");
        let e = SigmaSpace::new(&f, &edge23()).unwrap();
        assert_eq!(l_poly(&e, &edge23(), 0, 0), Err(Error::IsolatedVertex(1)));
    }

    #[test]
    fn pullback_matrices_of_the_coordination_example() {
        let game = coordination_game();
        let g = edge23();
        let s = SigmaSpace::new(&game.format, &g).unwrap();
        let m2 = pullback_matrix(&game, &g, &s, 1).unwrap();
        assert_eq!(render(&s, &m2.rows[0][0]), "s2_11 + s2_12");
        assert_eq!(render(&s, &m2.rows[0][1]), "2*s1_1*s2_11 + 3*s1_2*s2_11 - s1_2*s2_12");
        assert_eq!(render(&s, &m2.rows[1][0]), "s2_21 + s2_22");
        assert_eq!(render(&s, &m2.rows[1][1]), "3*s1_1*s2_21 + s1_1*s2_22 + 4*s1_2*s2_21");
        let m3 = pullback_matrix(&game, &g, &s, 2).unwrap();
        assert_eq!(render(&s, &m3.rows[0][0]), "s2_11 + s2_21");
        assert_eq!(render(&s, &m3.rows[0][1]), "2*s1_1*s2_11 + 3*s1_2*s2_11 - s1_2*s2_21");
        let m1 = pullback_matrix(&game, &g, &s, 0).unwrap();
        assert_eq!(render(&s, &m1.rows[0][1]), "4*s2_12");
        assert_eq!(render(&s, &m1.rows[1][1]), "3*s2_11 + s2_22");
        assert!(m1.rows.iter().all(|r| r[0] == SparsePoly::one()));
    }

    #[test]
    fn generator_counts_and_multidegrees() {
        let f = GameFormat::new(vec![4, 2, 2]).unwrap();
        let game = crate::game::random_game(&f, 3, -9..=9);
        let sys = equation_system(&game, &edge23()).unwrap();
        let degs: Vec<Vec<u32>> = sys.generators.iter().map(|g| g.multidegree.clone()).collect();
        assert_eq!(degs, vec![vec![0, 1], vec![0, 1], vec![0, 1], vec![1, 2], vec![1, 2]]);
        assert!(sys.is_multihomogeneous());
        assert_eq!(sys.kind, SystemKind::Cluster);

        let b = GameFormat::new(vec![2, 2, 2]).unwrap();
        let sys0 = equation_system(&crate::game::random_game(&b, 5, -9..=9), &Graph::empty(3).unwrap()).unwrap();
        let degs0: Vec<Vec<u32>> = sys0.generators.iter().map(|g| g.multidegree.clone()).collect();
        assert_eq!(degs0, vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
    }

    #[test]
    fn ci_minor_counts() {
        let f = GameFormat::new(vec![2, 2, 2]).unwrap();
        assert_eq!(ci_minors_p(&f, &edge23()).unwrap().len(), 4);
        assert!(ci_minors_p(&f, &Graph::complete(3).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn exports() {
        let names: Vec<String> = vec!["a".into(), "b".into()];
        let p = SparsePoly::var(0).mul(&SparsePoly::var(1)).scale(&ratio(3, 4)).sub(&SparsePoly::var(1));
        assert_eq!(export_ideal(&names, std::slice::from_ref(&p), Dialect::Plain), "vars: a b\n3/4*a*b - b\n");
        assert_eq!(export_ideal(&names, &[p], Dialect::M2), "R = QQ[a,b];\nI = ideal(\n  3/4*a*b - b\n);\n");
        assert!(export_ideal(&names, &[], Dialect::M2).contains("map(R^1, R^0, 0)"));
        assert_eq!("macaulay".parse::<Dialect>(), Err(Error::UnknownDialect("macaulay".into())));
    }

    #[test]
    fn pullback_consistency_on_examples() {
        assert!(pullback_consistency(&coordination_game(), &edge23()).unwrap());
        let f = GameFormat::new(vec![4, 2, 2]).unwrap();
        assert!(pullback_consistency(&crate::game::random_game(&f, 11, -20..=20), &edge23()).unwrap());
    }

    fn arb_poly() -> impl Strategy<Value = SparsePoly> {
        prop::collection::vec((prop::collection::vec((0u32..3, 1u32..3), 0..3), -4i64..=4), 0..4).prop_map(|ts| {
            let mut p = SparsePoly::zero();
            for (vars, c) in ts {
                let mut m = SparsePoly::constant(int(c));
                for (v, e) in vars {
                    for _ in 0..e {
                        m = m.mul(&SparsePoly::var(v));
                    }
                }
                p = p.add(&m);
            }
            p
        })
    }

    proptest! {
        #[test]
        fn exact_division_recovers_factor(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!b.is_zero());
            let prod = a.mul(&b);
            prop_assert_eq!(prod.div_exact(&b), Some(a));
        }

        #[test]
        fn evaluation_is_a_ring_map(a in arb_poly(), b in arb_poly(), x in prop::collection::vec(-3i64..=3, 3)) {
            let pt: Vec<Rational> = x.iter().map(|&v| int(v)).collect();
            prop_assert_eq!(a.mul(&b).eval(&pt), a.eval(&pt) * b.eval(&pt));
            prop_assert_eq!(a.add(&b).eval(&pt), a.eval(&pt) + b.eval(&pt));
        }
    }
}

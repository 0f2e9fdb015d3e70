//! Sparse integer polynomials in `x1..xk`, optionally truncated by the ideal
//! `<x_i^{cap_i}>`. This is the arithmetic behind Chow-ring computations.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingPoly {
    nvars: usize,
    caps: Option<Vec<u32>>,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl RingPoly {
    pub fn zero(nvars: usize, caps: Option<Vec<u32>>) -> Self {
        if let Some(c) = &caps {
            assert_eq!(c.len(), nvars, "one cap per variable");
        }
        RingPoly { nvars, caps, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, caps: Option<Vec<u32>>, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(nvars, caps);
        p.add_term(vec![0; nvars], c.into());
        p
    }

    pub fn one(nvars: usize, caps: Option<Vec<u32>>) -> Self {
        Self::constant(nvars, caps, 1)
    }

    /// The variable `x_{i+1}` (0-based `i`).
    pub fn var(nvars: usize, caps: Option<Vec<u32>>, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars, caps);
        p.add_term(e, BigInt::one());
        p
    }

    /// `x_1 + ... + x_k`.
    pub fn sum_of_vars(nvars: usize, caps: Option<Vec<u32>>) -> Self {
        let mut p = Self::zero(nvars, caps.clone());
        for i in 0..nvars {
            p = p.add(&Self::var(nvars, caps.clone(), i));
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn caps(&self) -> Option<&[u32]> {
        self.caps.as_deref()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn survives(&self, e: &[u32]) -> bool {
        match &self.caps {
            Some(c) => e.iter().zip(c).all(|(a, b)| a < b),
            None => true,
        }
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigInt) {
        if c.is_zero() || !self.survives(&e) {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.nvars, other.nvars, "polynomials live in different rings");
        assert_eq!(self.caps, other.caps, "polynomials live in different quotient rings");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut out = Self::zero(self.nvars, self.caps.clone());
        if !c.is_zero() {
            for (e, v) in &self.terms {
                out.terms.insert(e.clone(), v * c);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut acc: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                if self.survives(&e) {
                    *acc.entry(e).or_insert_with(BigInt::zero) += c1 * c2;
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        RingPoly { nvars: self.nvars, caps: self.caps.clone(), terms: acc }
    }

    /// Power by repeated squaring; truncation applies after every product.
    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut out = Self::one(self.nvars, self.caps.clone());
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    pub fn coefficient(&self, e: &[u32]) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Terms in descending graded-lexicographic order.
    pub fn terms(&self) -> Vec<(Vec<u32>, BigInt)> {
        let mut out: Vec<_> = self.terms.iter().map(|(e, c)| (e.clone(), c.clone())).collect();
        out.sort_by(|a, b| grlex(&b.0, &a.0));
        out
    }

    /// Total degree when all terms share it.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }
}

fn grlex(a: &[u32], b: &[u32]) -> Ordering {
    let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
    da.cmp(&db).then_with(|| a.cmp(b))
}

impl fmt::Display for RingPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in terms.iter().enumerate() {
            let mag = c.abs();
            if idx == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if c.is_negative() { " - " } else { " + " })?;
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| if p == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, p) })
                .collect();
            match (mono.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{}", mono.join("*"))?,
                (false, false) => write!(f, "{mag}*{}", mono.join("*"))?,
            }
        }
        Ok(())
    }
}

pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `(k_1 + ... + k_m)! / (k_1! ... k_m!)`.
pub fn multinomial(ks: &[u64]) -> BigInt {
    let mut total = 0i64;
    let mut acc = BigInt::one();
    for &k in ks {
        total += k as i64;
        acc *= binomial(total, k as i64);
    }
    acc
}

/// Determinant of the `l x l` tridiagonal matrix with `a + b` on the diagonal, `a` above
/// and `b` below it, expanded by the Leibniz formula over its nonzero permutations.
pub fn tridiag_det(a: &RingPoly, b: &RingPoly, l: usize) -> RingPoly {
    let diag = a.add(b);
    let entry = |i: usize, j: usize| -> Option<&RingPoly> {
        if i == j {
            Some(&diag)
        } else if j == i + 1 {
            Some(a)
        } else if i == j + 1 {
            Some(b)
        } else {
            None
        }
    };
    fn expand<'a>(
        row: usize,
        l: usize,
        used: &mut Vec<bool>,
        perm: &mut Vec<usize>,
        entry: &dyn Fn(usize, usize) -> Option<&'a RingPoly>,
        acc: &mut RingPoly,
    ) {
        if row == l {
            let mut term = RingPoly::one(acc.nvars(), acc.caps().map(|c| c.to_vec()));
            for (i, &j) in perm.iter().enumerate() {
                term = term.mul(entry(i, j).unwrap());
            }
            let inversions =
                (0..l).flat_map(|i| (i + 1..l).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
            *acc = if inversions % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            return;
        }
        for j in row.saturating_sub(1)..(row + 2).min(l) {
            if !used[j] && entry(row, j).is_some() {
                used[j] = true;
                perm.push(j);
                expand(row + 1, l, used, perm, entry, acc);
                perm.pop();
                used[j] = false;
            }
        }
    }
    let mut acc = RingPoly::zero(a.nvars(), a.caps().map(|c| c.to_vec()));
    if l == 0 {
        return RingPoly::one(a.nvars(), a.caps().map(|c| c.to_vec()));
    }
    expand(0, l, &mut vec![false; l], &mut Vec::new(), &entry, &mut acc);
    acc
}

/// `sum_{i=0}^{l} a^i b^{l-i}`.
pub fn geometric_sum(a: &RingPoly, b: &RingPoly, l: usize) -> RingPoly {
    let mut acc = RingPoly::zero(a.nvars(), a.caps().map(|c| c.to_vec()));
    for i in 0..=l {
        acc = acc.add(&a.pow(i as u64).mul(&b.pow((l - i) as u64)));
    }
    acc
}

/// Checks `det N_l = sum_{i=0}^{l} a^i b^{l-i}` and returns both sides.
pub fn tridiag_det_identity(a: &RingPoly, b: &RingPoly, l: usize) -> (bool, RingPoly, RingPoly) {
    let det = tridiag_det(a, b, l);
    let sum = geometric_sum(a, b, l);
    (det == sum, det, sum)
}

//! Exact and floating linear algebra used by the model-degree and solver code.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::scalar::Scalar;

/// Rank over the rationals of an integer matrix by fraction-free elimination on
/// sparse rows. Each reduced row is divided by the gcd of its entries, so
/// intermediate values stay small for 0/1 inputs.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let mut pivots: BTreeMap<usize, Vec<(usize, BigInt)>> = BTreeMap::new();
    for row in rows {
        let mut r: Vec<(usize, BigInt)> =
            row.iter().enumerate().filter(|(_, v)| **v != 0).map(|(j, v)| (j, BigInt::from(*v))).collect();
        while let Some((lead, _)) = r.first() {
            match pivots.get(lead) {
                Some(p) => r = eliminate(&r, p),
                None => {
                    pivots.insert(*lead, r);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// `p_lead * r - r_lead * p`, made primitive. Both rows share the leading column.
fn eliminate(r: &[(usize, BigInt)], p: &[(usize, BigInt)]) -> Vec<(usize, BigInt)> {
    let (a, b) = (&p[0].1, &r[0].1);
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (1, 1);
    while i < r.len() || j < p.len() {
        let (col, v) = match (r.get(i), p.get(j)) {
            (Some((cr, vr)), Some((cp, vp))) if cr == cp => {
                i += 1;
                j += 1;
                (*cr, a * vr - b * vp)
            }
            (Some((cr, vr)), Some((cp, _))) if cr < cp => {
                i += 1;
                (*cr, a * vr)
            }
            (Some((cr, vr)), None) => {
                i += 1;
                (*cr, a * vr)
            }
            (_, Some((cp, vp))) => {
                j += 1;
                (*cp, -(b * vp))
            }
            (None, None) => unreachable!(),
        };
        if !v.is_zero() {
            out.push((col, v));
        }
    }
    let g = out.iter().fold(BigInt::zero(), |g, (_, v)| g.gcd(v));
    if !g.is_zero() && g != BigInt::from(1) {
        for (_, v) in out.iter_mut() {
            *v /= &g;
        }
    }
    out
}

/// Dense Bareiss elimination; returns the rank.
pub fn bareiss_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(piv) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, piv);
        let p = m[rank][col].clone();
        let (top, rest) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in rest.iter_mut() {
            let f = row[col].clone();
            for c in col..ncols {
                row[c] = (&p * &row[c] - &f * &pivot_row[c]) / &prev;
            }
        }
        prev = p;
        rank += 1;
    }
    rank
}

/// Reduced row echelon form with the pivot column of each nonzero row.
#[derive(Clone, Debug)]
pub struct Rref<T> {
    pub rows: Vec<Vec<T>>,
    pub pivots: Vec<usize>,
}

/// Gauss-Jordan elimination. Exact backends pivot on the first nonzero entry,
/// floating ones on the largest, treating entries below `tol` as zero.
pub fn rref<T: Scalar>(mut m: Vec<Vec<T>>, tol: f64) -> Rref<T> {
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let candidate = if T::EXACT {
            (r..nrows).find(|&i| !m[i][c].is_zero())
        } else {
            (r..nrows)
                .filter(|&i| !m[i][c].is_negligible(tol))
                .max_by(|&i, &j| m[i][c].to_f64().abs().total_cmp(&m[j][c].to_f64().abs()))
        };
        let Some(p) = candidate else {
            if !T::EXACT {
                for row in m.iter_mut().skip(r) {
                    row[c] = T::zero();
                }
            }
            continue;
        };
        m.swap(r, p);
        let inv = T::one() / m[r][c].clone();
        for v in m[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref { rows: m, pivots }
}

/// Solution set of `A x = b` as a particular solution plus a basis of the kernel.
/// Each kernel vector has a 1 in one free coordinate and 0 in the others.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSolution<T> {
    pub particular: Vec<T>,
    pub directions: Vec<Vec<T>>,
    pub free: Vec<usize>,
}

/// Returns `None` when the system is inconsistent.
pub fn solve_affine<T: Scalar>(a: &[Vec<T>], b: &[T], tol: f64) -> Option<AffineSolution<T>> {
    let n = a.first().map_or(0, Vec::len);
    let aug: Vec<Vec<T>> =
        a.iter().zip(b).map(|(row, rhs)| row.iter().cloned().chain(std::iter::once(rhs.clone())).collect()).collect();
    let red = rref(aug, tol);
    if red.pivots.contains(&n) {
        return None;
    }
    let free: Vec<usize> = (0..n).filter(|c| !red.pivots.contains(c)).collect();
    let mut particular = vec![T::zero(); n];
    for (r, &c) in red.pivots.iter().enumerate() {
        particular[c] = red.rows[r][n].clone();
    }
    let directions = free
        .iter()
        .map(|&f| {
            let mut v = vec![T::zero(); n];
            v[f] = T::one();
            for (r, &c) in red.pivots.iter().enumerate() {
                v[c] = -red.rows[r][f].clone();
            }
            v
        })
        .collect();
    Some(AffineSolution { particular, directions, free })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio, Rational};
    use proptest::prelude::*;

    #[test]
    fn ranks_of_small_matrices() {
        let m = vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]];
        assert_eq!(integer_rank(&m), 2);
        assert_eq!(bareiss_rank(&m), 2);
        assert_eq!(integer_rank(&[]), 0);
        assert_eq!(integer_rank(&[vec![0, 0]]), 0);
    }

    #[test]
    fn affine_solution_of_a_line() {
        let a = vec![vec![int(1), int(1), int(0)], vec![int(0), int(1), int(-1)]];
        let b = vec![int(1), int(0)];
        let s = solve_affine(&a, &b, 0.0).unwrap();
        assert_eq!(s.free, vec![2]);
        assert_eq!(s.particular, vec![int(1), int(0), int(0)]);
        assert_eq!(s.directions, vec![vec![int(-1), int(1), int(1)]]);
        let inconsistent = solve_affine(&[vec![int(0)]], &[ratio(1, 2)], 0.0);
        assert!(inconsistent.is_none());
    }

    proptest! {
        #[test]
        fn sparse_rank_matches_bareiss(m in prop::collection::vec(prop::collection::vec(-3i64..=3, 5), 0..7)) {
            prop_assert_eq!(integer_rank(&m), bareiss_rank(&m));
        }

        #[test]
        fn rational_rref_rank_matches(m in prop::collection::vec(prop::collection::vec(-3i64..=3, 4), 1..6)) {
            let q: Vec<Vec<Rational>> = m.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect();
            prop_assert_eq!(rref(q, 0.0).pivots.len(), bareiss_rank(&m));
        }

        #[test]
        fn float_rref_rank_matches(m in prop::collection::vec(prop::collection::vec(-3i64..=3, 4), 1..6)) {
            let q: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
            prop_assert_eq!(rref(q, 1e-9).pivots.len(), bareiss_rank(&m));
        }
    }
}

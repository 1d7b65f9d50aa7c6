//! Exact linear algebra over Q and Z.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::Q;

pub fn to_q(v: &[BigInt]) -> Vec<Q> {
    v.iter().map(|x| Q::from_integer(x.clone())).collect()
}

pub fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Primitive integer vector on the same ray, together with the divided-out gcd.
pub fn primitive(v: &[BigInt]) -> (Vec<BigInt>, BigInt) {
    let g = gcd_all(v);
    if g.is_zero() {
        return (v.to_vec(), g);
    }
    (v.iter().map(|x| x / &g).collect(), g)
}

/// Primitive integer vector on the ray through a nonzero rational vector.
pub fn clear_denominators(v: &[Q]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    primitive(&ints).0
}

/// Row echelon form in place; returns the pivot columns.
fn echelon(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for j in c..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let delta = &f * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank_q(rows: &[Vec<Q>]) -> usize {
    let mut m = rows.to_vec();
    echelon(&mut m).len()
}

pub fn det_q(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Q::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let delta = &f * &a[c][j];
                a[i][j] -= delta;
            }
        }
    }
    det
}

pub fn inverse_q(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut aug: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    let pivots = echelon(&mut aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solve `m x = rhs` for square nonsingular `m`.
pub fn solve_q(m: &[Vec<Q>], rhs: &[Q]) -> Option<Vec<Q>> {
    let inv = inverse_q(m)?;
    Some(inv.iter().map(|row| row.iter().zip(rhs).map(|(a, b)| a * b).sum()).collect())
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Generator of the kernel of `k-1` independent rows in `Q^k`, by signed
/// maximal minors. Zero when the rows are dependent.
pub fn kernel_vector(rows: &[Vec<Q>]) -> Vec<Q> {
    let k = rows.len() + 1;
    (0..k)
        .map(|j| {
            let minor: Vec<Vec<Q>> = rows
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let d = if minor.is_empty() { Q::one() } else { det_q(&minor) };
            if j % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

/// Nonzero invariant factors of an integer matrix (Smith normal form diagonal).
pub fn smith_invariants(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let mut a = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block as pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            let q = a[i][t].div_floor(&a[t][t]);
            if !q.is_zero() {
                for j in t..cols {
                    let delta = &q * &a[t][j];
                    a[i][j] -= delta;
                }
            }
            clean &= a[i][t].is_zero();
        }
        for j in t + 1..cols {
            let q = a[t][j].div_floor(&a[t][t]);
            if !q.is_zero() {
                for row in a.iter_mut().skip(t) {
                    let delta = &q * &row[t];
                    row[j] -= delta;
                }
            }
            clean &= a[t][j].is_zero();
        }
        if !clean {
            continue;
        }
        // pivot must divide the rest of the block
        let bad = (t + 1..rows)
            .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
            .find(|&(i, j)| !a[i][j].is_multiple_of(&a[t][t]));
        if let Some((i, _)) = bad {
            for j in t..cols {
                let v = a[i][j].clone();
                a[t][j] += v;
            }
            continue;
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

/// Unimodular integer matrix whose first row is the primitive covector `u`.
///
/// For `y` with `<u, y> = 0` the remaining coordinates of `W y` are
/// coordinates with respect to a basis of the sublattice `u^perp ∩ Z^k`.
pub fn unimodular_with_first_row(u: &[BigInt]) -> Vec<Vec<BigInt>> {
    let k = u.len();
    // column operations C with u C = e_0; then W = C^{-1}
    let mut row = u.to_vec();
    let mut c: Vec<Vec<BigInt>> =
        (0..k).map(|i| (0..k).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let col_op = |c: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, f: &BigInt| {
        for r in c.iter_mut() {
            let v = &r[src] * f;
            r[dst] -= v;
        }
    };
    loop {
        let nz: Vec<usize> = (0..k).filter(|&j| !row[j].is_zero()).collect();
        if nz.len() <= 1 {
            break;
        }
        let p = *nz.iter().min_by_key(|&&j| row[j].abs()).unwrap();
        for &j in &nz {
            if j != p {
                let q = row[j].div_floor(&row[p]);
                let delta = &q * &row[p];
                row[j] -= delta;
                col_op(&mut c, j, p, &q);
            }
        }
    }
    let p = (0..k).find(|&j| !row[j].is_zero()).expect("nonzero covector");
    assert!(row[p].abs().is_one(), "covector is not primitive");
    if p != 0 {
        row.swap(0, p);
        for r in c.iter_mut() {
            r.swap(0, p);
        }
    }
    if row[0].is_negative() {
        for r in c.iter_mut() {
            r[0] = -r[0].clone();
        }
    }
    let cq: Vec<Vec<Q>> = c.iter().map(|r| to_q(r)).collect();
    inverse_q(&cq)
        .expect("unimodular")
        .into_iter()
        .map(|r| r.into_iter().map(|x| x.to_integer()).collect())
        .collect()
}

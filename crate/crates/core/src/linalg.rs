//! Dense exact linear algebra over the rationals.
//!
//! Matrices are plain row vectors (`Vec<Vec<Q>>`); every routine is
//! fraction-exact and deterministic.

use num_traits::{One, Zero};

use crate::rational::Q;

pub type Mat = Vec<Vec<Q>>;

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[Vec<Q>], ncols: usize) -> (Mat, Vec<usize>) {
    let mut m: Mat = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        if !inv.is_one() {
            for x in m[r][c..].iter_mut() {
                *x *= &inv;
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vec<Q>], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of `{x : A x = 0}`, one vector per free column, in column order.
pub fn null_space(rows: &[Vec<Q>], ncols: usize) -> Mat {
    let (r, pivots) = rref(rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Q::zero(); ncols];
        v[free] = Q::one();
        for (row, &p) in r.iter().zip(&pivots) {
            if !row[free].is_zero() {
                v[p] = -row[free].clone();
            }
        }
        basis.push(v);
    }
    basis
}

/// One solution of `A x = b` with all free variables set to zero, or `None`
/// when the system is inconsistent.
pub fn solve(rows: &[Vec<Q>], b: &[Q], ncols: usize) -> Option<Vec<Q>> {
    let aug: Mat = rows
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![Q::zero(); ncols];
    for (row, &p) in r.iter().zip(&pivots) {
        x[p] = row[ncols].clone();
    }
    Some(x)
}

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Q::one() } else { Q::zero() })
                .collect()
        })
        .collect()
}

pub fn inverse(m: &Mat) -> Option<Mat> {
    let n = m.len();
    let aug: Mat = m
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    let (r, pivots) = rref(&aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn det(m: &Mat) -> Q {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let pivot = a[c].clone();
        for row in a.iter_mut().skip(c + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] / &pivot[c];
            for (x, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                *x -= &f * p;
            }
        }
    }
    d
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(Q::zero(), |acc, k| {
                        if row[k].is_zero() {
                            acc
                        } else {
                            acc + &row[k] * &b[k][j]
                        }
                    })
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Mat, v: &[Q]) -> Vec<Q> {
    a.iter()
        .map(|row| {
            row.iter().zip(v).fold(Q::zero(), |acc, (x, y)| {
                if x.is_zero() || y.is_zero() {
                    acc
                } else {
                    acc + x * y
                }
            })
        })
        .collect()
}

pub fn transpose(a: &Mat, ncols: usize) -> Mat {
    (0..ncols)
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| {
        if x.is_zero() || y.is_zero() {
            acc
        } else {
            acc + x * y
        }
    })
}

/// LLL reduction (δ = 3/4) of linearly independent rows, exact arithmetic.
/// Integer rows stay integer and span the same lattice.
pub fn lll(rows: &[Vec<Q>]) -> Mat {
    let mut b: Mat = rows.to_vec();
    let n = b.len();
    if n < 2 {
        return b;
    }
    let delta = Q::new(3.into(), 4.into());
    let gram_schmidt = |b: &Mat| -> (Mat, Mat, Vec<Q>) {
        let mut star: Mat = Vec::with_capacity(b.len());
        let mut mu = vec![vec![Q::zero(); b.len()]; b.len()];
        let mut norms = Vec::with_capacity(b.len());
        for i in 0..b.len() {
            let mut v = b[i].clone();
            for j in 0..i {
                mu[i][j] = if norms[j] == Q::zero() {
                    Q::zero()
                } else {
                    dot(&b[i], &star[j]) / &norms[j]
                };
                for (x, y) in v.iter_mut().zip(&star[j]) {
                    *x -= &mu[i][j] * y;
                }
            }
            norms.push(dot(&v, &v));
            star.push(v);
        }
        (star, mu, norms)
    };
    let (_, mut mu, mut norms) = gram_schmidt(&b);
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let r = mu[k][j].round();
            if r != Q::zero() {
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= &r * y;
                }
                let (_, m2, n2) = gram_schmidt(&b);
                mu = m2;
                norms = n2;
            }
        }
        let lhs = &norms[k];
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            let (_, m2, n2) = gram_schmidt(&b);
            mu = m2;
            norms = n2;
            k = (k - 1).max(1);
        }
    }
    b
}

/// Basis of the saturated lattice `span_Q(rows) ∩ ℤᵈ`, LLL-reduced.
/// Computed as the integer kernel of the annihilator equations via LLL on
/// `[I | N·Aᵀ]`.
pub fn saturated_lattice(rows: &[Vec<Q>], d: usize) -> Mat {
    let k = rank(rows, d);
    if k == 0 {
        return Vec::new();
    }
    let ann = null_space(&rref(rows, d).0, d);
    if ann.is_empty() {
        return identity(d);
    }
    let scale_row = |r: &Vec<Q>| -> Vec<Q> {
        let den = Q::from_integer(crate::rational::common_denominator(r.iter()));
        r.iter().map(|c| c * &den).collect()
    };
    let a: Mat = ann.iter().map(scale_row).collect();
    let big = a
        .iter()
        .flatten()
        .fold(Q::one(), |m, x| { let ax = crate::rational::abs(x); if ax > m { ax } else { m } });
    let weight = big * Q::from_integer((1i64 << 20).into()) * Q::from_integer((d as i64 + 1).into());
    let aug: Mat = (0..d)
        .map(|i| {
            let mut row: Vec<Q> = (0..d).map(|j| if i == j { Q::one() } else { Q::zero() }).collect();
            row.extend(a.iter().map(|ar| &ar[i] * &weight));
            row
        })
        .collect();
    let red = lll(&aug);
    let kernel: Mat = red
        .into_iter()
        .filter(|r| r[d..].iter().all(Zero::is_zero))
        .map(|r| r[..d].to_vec())
        .collect();
    debug_assert_eq!(kernel.len(), k);
    lll(&kernel)
}

/// Integer coefficient vectors `x` with `‖Σ xᵢ bᵢ‖² ≤ bound`, excluding 0 and
/// keeping one of `±x`, for linearly independent rows `b` (Fincke–Pohst,
/// floating-point bounds). Stops after `cap` vectors.
pub fn short_vectors(b: &[Vec<Q>], bound: f64, cap: usize) -> Vec<Vec<i64>> {
    let k = b.len();
    let bf: Vec<Vec<f64>> = b.iter().map(|r| r.iter().map(crate::rational::to_f64).collect()).collect();
    let dotf = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let mut star: Vec<Vec<f64>> = Vec::new();
    let mut mu = vec![vec![0.0; k]; k];
    let mut norms = Vec::new();
    for i in 0..k {
        let mut v = bf[i].clone();
        for j in 0..i {
            mu[i][j] = dotf(&bf[i], &star[j]) / norms[j];
            for (x, y) in v.iter_mut().zip(&star[j]) {
                *x -= mu[i][j] * y;
            }
        }
        norms.push(dotf(&v, &v));
        star.push(v);
    }
    let mut out = Vec::new();
    let mut x = vec![0i64; k];
    fn rec(
        i: usize,
        rest: f64,
        x: &mut Vec<i64>,
        mu: &[Vec<f64>],
        norms: &[f64],
        out: &mut Vec<Vec<i64>>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        let k = x.len();
        let center: f64 = -(i + 1..k).map(|j| x[j] as f64 * mu[j][i]).sum::<f64>();
        let radius = (rest.max(0.0) / norms[i]).sqrt();
        let lo = (center - radius - 1e-9).ceil() as i64;
        let hi = (center + radius + 1e-9).floor() as i64;
        for xi in lo..=hi {
            x[i] = xi;
            let used = (xi as f64 - center).powi(2) * norms[i];
            if used > rest + 1e-9 {
                continue;
            }
            if i == 0 {
                // canonical sign: first nonzero coordinate from the top positive
                if let Some(top) = x.iter().rev().find(|&&c| c != 0) {
                    if *top > 0 {
                        out.push(x.clone());
                    }
                }
                if out.len() >= cap {
                    break;
                }
            } else {
                rec(i - 1, rest - used, x, mu, norms, out, cap);
            }
        }
        x[i] = 0;
    }
    if k > 0 {
        rec(k - 1, bound, &mut x, &mu, &norms, &mut out, cap);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn m(rows: &[&[i64]]) -> Mat {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn rref_and_null_space() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a, 3), 2);
        let ns = null_space(&a, 3);
        assert_eq!(ns.len(), 1);
        assert!(mat_vec(&a, &ns[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn solve_consistent_and_not() {
        let a = m(&[&[1, 1], &[1, -1]]);
        assert_eq!(solve(&a, &[q(3), q(1)], 2).unwrap(), vec![q(2), q(1)]);
        let b = m(&[&[1, 1], &[2, 2]]);
        assert!(solve(&b, &[q(1), q(3)], 2).is_none());
    }

    #[test]
    fn inverse_and_det() {
        let a = m(&[&[2, 1], &[5, 3]]);
        assert_eq!(det(&a), q(1));
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
        assert_eq!(det(&m(&[&[0, 1], &[1, 0]])), q(-1));
    }

    #[test]
    fn lll_shortens_a_skewed_basis() {
        let rows = vec![
            vec![q(1), q(0), q(0)],
            vec![q(7), q(1), q(0)],
            vec![q(13), q(5), q(1)],
        ];
        let red = lll(&rows);
        assert_eq!(rank(&red, 3), 3);
        assert!(det(&red) == q(1) || det(&red) == q(-1));
        assert!(red.iter().all(|r| dot(r, r) <= q(2)));
    }

    #[test]
    fn saturation_recovers_primitive_vectors() {
        // rows span a plane whose scaled echelon basis has index 2
        let rows = vec![vec![q(2), q(0), q(2)], vec![q(0), q(1), q(1)], vec![q(1), q(1), q(2)]];
        let sat = saturated_lattice(&rows, 3);
        assert_eq!(sat.len(), 2);
        // (1, 0, 1) is in the lattice: solvable with integer coefficients
        let target = vec![q(1), q(0), q(1)];
        let coeffs = solve(&transpose(&sat, 3), &target, 2).unwrap();
        assert!(coeffs.iter().all(|c| c.is_integer()));
    }

    #[test]
    fn short_vectors_of_square_lattice() {
        let b = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
        let vs = short_vectors(&b, 2.0, 100);
        // ±(1,0), ±(0,1), ±(1,1), ±(1,−1) up to sign
        assert_eq!(vs.len(), 4);
    }
}

//! Exact dense/sparse linear algebra over the coefficient fields.
//!
//! Backs the center computation, trace-form space, Gram non-degeneracy
//! checks and the quotient-dimension oracle. Everything is plain Gaussian
//! elimination with exact scalars; no pivoting heuristics are needed at
//! desk scale.

use crate::scalar::{Ring, Scalar, ScalarError};
use num::BigInt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinAlgError {
    #[error("dimension mismatch: matrix is {rows}x{cols}, rhs has {rhs}")]
    DimensionMismatch { rows: usize, cols: usize, rhs: usize },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

pub type Matrix = Vec<Vec<Scalar>>;

/// Result of `solve`: a particular solution when the system is consistent,
/// plus a basis of the homogeneous solution space, plus the matrix rank.
#[derive(Debug, Clone)]
pub struct Solution {
    pub particular: Option<Vec<Scalar>>,
    pub nullspace: Vec<Vec<Scalar>>,
    pub rank: usize,
}

/// Reduced row echelon form in place; returns (rank, pivot columns).
pub fn rref(mat: &mut Matrix, ring: Ring) -> (usize, Vec<usize>) {
    let rows = mat.len();
    let cols = mat.first().map_or(0, |r| r.len());
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(pr) = (row..rows).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(row, pr);
        let inv = mat[row][col].inv().expect("pivot nonzero");
        for c in col..cols {
            mat[row][c] = mat[row][c].times(&inv);
        }
        for r in 0..rows {
            if r != row && !mat[r][col].is_zero() {
                let factor = mat[r][col].clone();
                for c in col..cols {
                    let delta = factor.times(&mat[row][c]);
                    mat[r][c] = mat[r][c].minus(&delta);
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    let _ = ring;
    (row, pivot_cols)
}

/// Exact solve of A x = b with full solution-space description.
pub fn solve(a: &Matrix, b: &[Scalar], ring: Ring) -> Result<Solution, LinAlgError> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    if b.len() != rows {
        return Err(LinAlgError::DimensionMismatch { rows, cols, rhs: b.len() });
    }
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let (_, aug_pivots) = rref(&mut aug, ring);
    let inconsistent = aug_pivots.contains(&cols);
    let pivots: Vec<usize> = aug_pivots.iter().copied().filter(|&c| c < cols).collect();
    let rank = pivots.len();
    let nullspace = nullspace_from_rref(&aug, &pivots, cols, ring);
    let particular = if inconsistent {
        None
    } else {
        let mut x = vec![ring.zero(); cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = aug[i][cols].clone();
        }
        Some(x)
    };
    Ok(Solution { particular, nullspace, rank })
}

/// Basis of the null space of A.
pub fn nullspace(a: &Matrix, ring: Ring) -> Vec<Vec<Scalar>> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut m = a.clone();
    let (_, pivots) = rref(&mut m, ring);
    nullspace_from_rref(&m, &pivots, cols, ring)
}

fn nullspace_from_rref(m: &Matrix, pivots: &[usize], cols: usize, ring: Ring) -> Vec<Vec<Scalar>> {
    let mut basis = Vec::new();
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![ring.zero(); cols];
        v[free] = ring.one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = m[i][free].neg();
        }
        basis.push(v);
    }
    basis
}

pub fn rank(a: &Matrix, ring: Ring) -> usize {
    let mut m = a.clone();
    rref(&mut m, ring).0
}

pub fn mat_vec(a: &Matrix, x: &[Scalar], ring: Ring) -> Vec<Scalar> {
    a.iter()
        .map(|row| {
            let mut acc = ring.zero();
            for (c, v) in row.iter().zip(x) {
                if !c.is_zero() && !v.is_zero() {
                    acc = acc.plus(&c.times(v));
                }
            }
            acc
        })
        .collect()
}

/// Integer determinant by fraction-free Bareiss elimination.
pub fn integer_determinant(entries: &[Vec<i64>]) -> BigInt {
    let n = entries.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut m: Vec<Vec<BigInt>> = entries
        .iter()
        .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = 1i64;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k] == BigInt::from(0) {
            let Some(swap) = (k + 1..n).find(|&r| m[r][k] != BigInt::from(0)) else {
                return BigInt::from(0);
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Incremental row reducer keeping pivot rows in echelon form. Rows may be
/// fed one at a time; rank is the number of retained pivots.
pub struct RowReducer {
    ring: Ring,
    // pivot column -> normalized row (dense)
    pivots: std::collections::BTreeMap<usize, Vec<Scalar>>,
    width: usize,
}

impl RowReducer {
    pub fn new(ring: Ring, width: usize) -> Self {
        RowReducer { ring, pivots: Default::default(), width }
    }

    /// Reduces `row` against the current pivots; inserts it if nonzero.
    /// Returns true when the row added a new pivot.
    pub fn offer(&mut self, mut row: Vec<Scalar>) -> bool {
        assert_eq!(row.len(), self.width);
        loop {
            let Some(lead) = row.iter().position(|v| !v.is_zero()) else {
                return false;
            };
            match self.pivots.get(&lead) {
                Some(pivot_row) => {
                    let factor = row[lead].clone();
                    for (c, p) in row.iter_mut().zip(pivot_row) {
                        if !p.is_zero() {
                            *c = c.minus(&factor.times(p));
                        }
                    }
                }
                None => {
                    let inv = row[lead].inv().expect("lead nonzero");
                    for v in row.iter_mut() {
                        if !v.is_zero() {
                            *v = v.times(&inv);
                        }
                    }
                    self.pivots.insert(lead, row);
                    return true;
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Ring::Rationals.from_integer(n)
    }

    #[test]
    fn identity_solve_is_unique() {
        let a = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
        let sol = solve(&a, &[q(1), q(2)], Ring::Rationals).unwrap();
        assert_eq!(sol.particular.unwrap(), vec![q(1), q(2)]);
        assert!(sol.nullspace.is_empty());
        assert_eq!(sol.rank, 2);
    }

    #[test]
    fn zero_matrix_has_full_solution_space() {
        let a = vec![vec![q(0)]];
        let sol = solve(&a, &[q(0)], Ring::Rationals).unwrap();
        assert_eq!(sol.nullspace.len(), 1);
        assert_eq!(sol.rank, 0);
    }

    #[test]
    fn f2_nullspace_dimension() {
        let f2 = Ring::prime_field(2).unwrap();
        let one = f2.one();
        let a = vec![vec![one.clone(), one.clone()], vec![one.clone(), one]];
        assert_eq!(nullspace(&a, f2).len(), 1);
    }

    #[test]
    fn inconsistent_system_detected() {
        let a = vec![vec![q(1), q(1)], vec![q(1), q(1)]];
        let sol = solve(&a, &[q(1), q(2)], Ring::Rationals).unwrap();
        assert!(sol.particular.is_none());
    }

    #[test]
    fn solutions_verify_exactly() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..25 {
            let rows = rng.gen_range(1..5);
            let cols = rng.gen_range(1..5);
            let a: Matrix = (0..rows)
                .map(|_| (0..cols).map(|_| q(rng.gen_range(-4..5))).collect())
                .collect();
            let x0: Vec<Scalar> = (0..cols).map(|_| q(rng.gen_range(-4..5))).collect();
            let b = mat_vec(&a, &x0, Ring::Rationals);
            let sol = solve(&a, &b, Ring::Rationals).unwrap();
            let x = sol.particular.expect("consistent by construction");
            assert_eq!(mat_vec(&a, &x, Ring::Rationals), b);
            for n in &sol.nullspace {
                let zero = vec![Ring::Rationals.zero(); rows];
                assert_eq!(mat_vec(&a, n, Ring::Rationals), zero);
            }
        }
    }

    #[test]
    fn bareiss_determinant() {
        let m = vec![vec![6, 3, 3], vec![3, 6, 3], vec![3, 3, 6]];
        assert_eq!(integer_determinant(&m), BigInt::from(108));
        let singular = vec![vec![1, 2], vec![2, 4]];
        assert_eq!(integer_determinant(&singular), BigInt::from(0));
    }

    #[test]
    fn row_reducer_matches_rank() {
        let a = vec![
            vec![q(1), q(2), q(3)],
            vec![q(2), q(4), q(6)],
            vec![q(0), q(1), q(1)],
        ];
        let mut red = RowReducer::new(Ring::Rationals, 3);
        for row in &a {
            red.offer(row.clone());
        }
        assert_eq!(red.rank(), rank(&a, Ring::Rationals));
    }
}

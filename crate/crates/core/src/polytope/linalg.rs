//! Exact Gaussian elimination over the rationals. Systems here are at most 4×4.

use num_traits::{One, Zero};

use crate::polynomial::Rational;

/// Solves the square system `rows · x = rhs`; `None` when singular.
pub fn solve(mut rows: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = rows.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !rows[r][col].is_zero())?;
        rows.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = Rational::one() / &rows[col][col];
        for j in col..n {
            rows[col][j] = &rows[col][j] * &inv;
        }
        rhs[col] = &rhs[col] * &inv;
        for r in 0..n {
            if r == col || rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone();
            for j in col..n {
                let delta = &factor * &rows[col][j];
                rows[r][j] -= delta;
            }
            let delta = &factor * &rhs[col];
            rhs[r] -= delta;
        }
    }
    Some(rhs)
}

/// Rank of a set of row vectors.
pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r == rank || rows[r][col].is_zero() {
                continue;
            }
            let factor = &rows[r][col] / &rows[rank][col];
            for j in col..cols {
                let delta = &factor * &rows[rank][j];
                rows[r][j] -= delta;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::{rat, rat_int};

    #[test]
    fn solves_small_system() {
        let rows = vec![vec![rat_int(4), rat_int(0)], vec![rat_int(2), rat_int(2)]];
        let x = solve(rows, vec![rat_int(1), rat_int(1)]).unwrap();
        assert_eq!(x, vec![rat(1, 4), rat(1, 4)]);
    }

    #[test]
    fn singular_is_none() {
        let rows = vec![vec![rat_int(1), rat_int(2)], vec![rat_int(2), rat_int(4)]];
        assert!(solve(rows.clone(), vec![rat_int(1), rat_int(1)]).is_none());
        assert_eq!(rank(rows), 1);
    }
}

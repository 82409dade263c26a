//! Small exact linear algebra over the rationals.

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Rank of a set of row vectors, by fraction-exact Gaussian elimination.
pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = m.iter().map(Vec::len).max().unwrap_or(0);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| c < m[r].len() && !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = BigRational::one() / &m[rank][c];
        for r in 0..m.len() {
            if r == rank || c >= m[r].len() || m[r][c].is_zero() {
                continue;
            }
            let factor = &m[r][c] * &inv;
            for j in c..cols.min(m[r].len()) {
                let delta = &factor * &m[rank][j];
                m[r][j] -= delta;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

/// Rank of integer vectors.
pub fn rank_i64(rows: &[Vec<i64>]) -> usize {
    let rows: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect())
        .collect();
    rank(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_dependent_rows() {
        assert_eq!(rank_i64(&[vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]), 2);
        assert_eq!(rank_i64(&[vec![0, 0], vec![0, 0]]), 0);
        assert_eq!(rank_i64(&[]), 0);
        assert_eq!(rank_i64(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]), 3);
    }
}

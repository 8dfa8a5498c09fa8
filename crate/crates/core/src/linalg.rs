//! Matrix rank over exact fields and over floating-point complex numbers.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, Zero};

/// Relative singular-value cut-off for floating-point ranks.
pub const RANK_TOLERANCE: f64 = 1e-9;

/// Rank by Gaussian elimination over any exact field.
pub fn exact_rank<T: Clone + Num>(mut rows: Vec<Vec<T>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let head = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone() / head[col].clone();
            for c in col..cols {
                let delta = factor.clone() * head[c].clone();
                row[c] = row[c].clone() - delta;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Rank of a complex rational matrix, staying in ℚ when every entry is real.
pub fn complex_rational_rank(rows: Vec<Vec<Complex<BigRational>>>) -> usize {
    if rows.iter().flatten().all(|z| z.im.is_zero()) {
        exact_rank(
            rows.into_iter()
                .map(|r| r.into_iter().map(|z| z.re).collect())
                .collect(),
        )
    } else {
        exact_rank(rows)
    }
}

/// Numerical rank: singular values above `RANK_TOLERANCE · σ_max`.
pub fn float_rank(m: &DMatrix<Complex<f64>>) -> usize {
    float_rank_with(m, RANK_TOLERANCE)
}

/// Numerical rank with a caller-chosen relative cut-off.
pub fn float_rank_with(m: &DMatrix<Complex<f64>>, tolerance: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0_f64, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tolerance * max).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn rational_rank() {
        let m = vec![
            vec![q(1), q(2), q(3)],
            vec![q(2), q(4), q(6)],
            vec![q(0), q(1), q(1)],
        ];
        assert_eq!(exact_rank(m), 2);
        assert_eq!(exact_rank::<BigRational>(vec![]), 0);
        assert_eq!(exact_rank(vec![vec![q(0), q(0)]]), 0);
    }

    #[test]
    fn gaussian_rank_matches_svd() {
        let i = Complex::new(q(0), q(1));
        let one = Complex::new(q(1), q(0));
        // Second row is i times the first.
        let rows = vec![
            vec![one.clone(), i.clone()],
            vec![i.clone(), -one.clone()],
        ];
        assert_eq!(complex_rational_rank(rows), 1);
        let f = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex::new(1.0, 0.0),
                Complex::new(0.0, 1.0),
                Complex::new(0.0, 1.0),
                Complex::new(-1.0, 0.0),
            ],
        );
        assert_eq!(float_rank(&f), 1);
    }
}

//! Exact ranks of small dense matrices over prime fields and over ℚ.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Coefficient field for homology and rank computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    /// `GF(p)` for a prime `p < 2^31`.
    Prime(u64),
    Rational,
}

impl Field {
    pub const DEFAULT: Field = Field::Prime(32003);

    pub fn characteristic(self) -> u64 {
        match self {
            Field::Prime(p) => p,
            Field::Rational => 0,
        }
    }

    /// `0` selects ℚ.
    pub fn from_characteristic(p: u64) -> Option<Field> {
        match p {
            0 => Some(Field::Rational),
            p if p < (1 << 31) && is_prime(p) => Some(Field::Prime(p)),
            _ => None,
        }
    }

    /// Rank of an integer matrix given as rows.
    pub fn rank(self, rows: &[Vec<i64>]) -> usize {
        match self {
            Field::Prime(p) => {
                let mut m: Vec<Vec<u64>> = rows
                    .iter()
                    .map(|r| r.iter().map(|&v| v.rem_euclid(p as i64) as u64).collect())
                    .collect();
                rank_mod_p(&mut m, p)
            }
            Field::Rational => rank_rational(rows),
        }
    }
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Field::Prime(p) => write!(f, "GF({p})"),
            Field::Rational => write!(f, "QQ"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Rank by Gaussian elimination; destroys `m`. Entries must be reduced.
pub fn rank_mod_p(m: &mut [Vec<u64>], p: u64) -> usize {
    let nrows = m.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = m[0].len();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..nrows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = inv_mod(m[rank][col], p);
        for v in m[rank][col..].iter_mut() {
            *v = *v * inv % p;
        }
        let (top, bottom) = m.split_at_mut(rank + 1);
        let prow = &top[rank];
        for row in bottom.iter_mut() {
            let f = row[col];
            if f == 0 {
                continue;
            }
            for (c, v) in row[col..].iter_mut().enumerate() {
                *v = (*v + p - f * prow[col + c] % p) % p;
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

fn rank_rational(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&v| BigRational::from_integer(BigInt::from(v)))
                .collect()
        })
        .collect();
    let nrows = m.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = m[0].len();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = BigRational::one() / &m[rank][col];
        for v in m[rank][col..].iter_mut() {
            *v = &*v * &inv;
        }
        for r in rank + 1..nrows {
            let f = m[r][col].clone();
            if f.is_zero() {
                continue;
            }
            for c in col..ncols {
                let delta = &f * &m[rank][c];
                m[r][c] -= delta;
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_agree_across_fields() {
        let m = vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]];
        assert_eq!(Field::Prime(32003).rank(&m), 2);
        assert_eq!(Field::Rational.rank(&m), 2);
        // Mod 2 the middle row vanishes and the others coincide.
        assert_eq!(Field::Prime(2).rank(&m), 1);
    }

    #[test]
    fn characteristic_matters() {
        // det = 2: full rank over ℚ, rank 1 over GF(2).
        let m = vec![vec![1, 1], vec![1, -1]];
        assert_eq!(Field::Rational.rank(&m), 2);
        assert_eq!(Field::Prime(2).rank(&m), 1);
    }

    #[test]
    fn field_parsing() {
        assert_eq!(Field::from_characteristic(0), Some(Field::Rational));
        assert_eq!(Field::from_characteristic(2), Some(Field::Prime(2)));
        assert_eq!(Field::from_characteristic(4), None);
        assert_eq!(Field::from_characteristic(1), None);
    }

    #[test]
    fn empty_matrices() {
        assert_eq!(Field::DEFAULT.rank(&[]), 0);
        assert_eq!(Field::DEFAULT.rank(&[vec![], vec![]]), 0);
    }
}

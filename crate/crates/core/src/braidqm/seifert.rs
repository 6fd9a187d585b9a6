use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::braids::BraidWord;

/// Seifert matrix of the closed braid for its Bennequin surface: one disk
/// per strand, one band per letter.
///
/// The homology basis has one loop per pair of consecutive letters with the
/// same generator index; `loops[k]` holds the two letter positions.
/// Entries are `v[a][b] = lk(a⁺, b)` with `a⁺` pushed off along the positive
/// normal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeifertData {
    pub loops: Vec<(usize, usize)>,
    /// Row-major `loops.len()²` integer matrix.
    pub v: Vec<Vec<i64>>,
}

impl SeifertData {
    pub fn rank(&self) -> usize {
        self.loops.len()
    }

    /// `V + Vᵀ`.
    pub fn symmetrized(&self) -> Vec<Vec<i64>> {
        let m = self.rank();
        (0..m).map(|i| (0..m).map(|j| self.v[i][j] + self.v[j][i]).collect()).collect()
    }
}

/// For each letter, the position of the next letter with the same index.
fn next_same(letters: &[i32]) -> Vec<Option<usize>> {
    (0..letters.len()).map(|i| (i + 1..letters.len()).find(|&j| letters[j].abs() == letters[i].abs())).collect()
}

pub fn seifert_matrix(b: &BraidWord) -> SeifertData {
    let x = &b.letters;
    let h = next_same(x);
    let loops: Vec<(usize, usize)> = h.iter().enumerate().filter_map(|(i, hi)| hi.map(|hi| (i, hi))).collect();
    let m = loops.len();
    let mut v = vec![vec![0i64; m]; m];
    for (a, &(i, hi)) in loops.iter().enumerate() {
        v[a][a] = -((x[i].signum() + x[hi].signum()) / 2) as i64;
        for (c, &(j, hj)) in loops.iter().enumerate().skip(a + 1) {
            if j == hi {
                if x[j] > 0 {
                    v[a][c] = 1;
                } else {
                    v[c][a] = -1;
                }
            } else if j < hi && hi < hj {
                let (gi, gj) = (x[i].abs(), x[j].abs());
                if gi - gj == 1 {
                    v[c][a] = 1;
                } else if gj - gi == 1 {
                    v[a][c] = -1;
                }
            }
        }
    }
    SeifertData { loops, v }
}

/// Signature of a symmetric integer matrix by rational congruence
/// diagonalization.
pub fn symmetric_signature(s: &[Vec<i64>]) -> i64 {
    let mut a: Vec<Vec<BigRational>> =
        s.iter().map(|row| row.iter().map(|&e| BigRational::from_integer(BigInt::from(e))).collect()).collect();
    let mut sig = 0i64;
    while !a.is_empty() {
        let n = a.len();
        let pivot = match (0..n).find(|&k| !a[k][k].is_zero()) {
            Some(k) => k,
            None => {
                let Some((i, j)) = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero())
                else {
                    break;
                };
                // Row and column i += row and column j makes a[i][i] = 2 a[i][j].
                let row_j = a[j].clone();
                for (x, t) in a[i].iter_mut().zip(row_j) {
                    *x += t;
                }
                for row in a.iter_mut() {
                    let t = row[j].clone();
                    row[i] += t;
                }
                i
            }
        };
        let p = a[pivot][pivot].clone();
        sig += if p.is_positive() { 1 } else { -1 };
        let row = a[pivot].clone();
        let mut next = Vec::with_capacity(n - 1);
        for i in (0..n).filter(|&i| i != pivot) {
            let f = &a[i][pivot] / &p;
            next.push((0..n).filter(|&j| j != pivot).map(|j| &a[i][j] - &f * &row[j]).collect());
        }
        a = next;
    }
    sig
}

/// Signature of the closure of `b`, from `V + Vᵀ`.
pub fn signature(b: &BraidWord) -> i64 {
    symmetric_signature(&seifert_matrix(b).symmetrized())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(n: usize, l: &[i32]) -> BraidWord {
        BraidWord::new(n, l.to_vec()).unwrap()
    }

    #[test]
    fn torus_links() {
        assert_eq!(signature(&word(2, &[1, 1])), -1);
        assert_eq!(signature(&word(2, &[1, 1, 1])), -2);
        for k in 1..=4 {
            assert_eq!(signature(&word(2, &vec![1; 2 * k])), -(2 * k as i64 - 1));
            assert_eq!(signature(&word(2, &vec![-1; 2 * k])), 2 * k as i64 - 1);
        }
    }

    #[test]
    fn empty_word_has_rank_zero() {
        let s = seifert_matrix(&BraidWord::identity(3));
        assert_eq!(s.rank(), 0);
        assert_eq!(signature(&BraidWord::identity(3)), 0);
    }

    #[test]
    fn basis_size_is_length_minus_distinct_indices() {
        let s = seifert_matrix(&word(4, &[1, 2, -1, 3, 2, 2, -3]));
        assert_eq!(s.rank(), 7 - 3);
    }

    #[test]
    fn signature_of_diagonal_and_hyperbolic_forms() {
        assert_eq!(symmetric_signature(&[vec![2, 0], vec![0, -3]]), 0);
        assert_eq!(symmetric_signature(&[vec![0, 1], vec![1, 0]]), 0);
        assert_eq!(symmetric_signature(&[vec![-2, 1], vec![1, -2]]), -2);
        assert_eq!(symmetric_signature(&[vec![0, 0], vec![0, 0]]), 0);
        assert_eq!(symmetric_signature(&[vec![0, 2, 0], vec![2, 0, 1], vec![0, 1, 5]]), 1);
    }

    #[test]
    fn figure_eight_is_amphichiral() {
        assert_eq!(signature(&word(3, &[1, -2, 1, -2])), 0);
    }
}

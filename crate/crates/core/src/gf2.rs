//! Bit-packed Gaussian elimination over GF(2).

use crate::bits::{words_for, WORD_BITS};

/// A dense GF(2) matrix with bit-packed rows.
pub struct BitMatrix {
    pub rows: usize,
    pub cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = words_for(cols);
        BitMatrix { rows, cols, words, data: vec![0; rows * words] }
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let idx = r * self.words + c / WORD_BITS;
        let m = 1u64 << (c % WORD_BITS);
        if v {
            self.data[idx] |= m;
        } else {
            self.data[idx] &= !m;
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.data[r * self.words + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.words..(r + 1) * self.words]
    }

    /// Rank by forward elimination. Destroys the matrix contents.
    pub fn rank(&mut self) -> usize {
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            rank += self.eliminate_column(col, rank) as usize;
        }
        rank
    }

    /// Number of pivots among every prefix of the column order: entry `c` is
    /// the rank of the submatrix made of columns `0..=c`. Destructive.
    pub fn prefix_ranks(&mut self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.cols);
        let mut rank = 0;
        for col in 0..self.cols {
            if rank < self.rows {
                rank += self.eliminate_column(col, rank) as usize;
            }
            out.push(rank);
        }
        out
    }

    /// Eliminate `col` using rows `pivot_row..`; returns true if a pivot was found.
    fn eliminate_column(&mut self, col: usize, pivot_row: usize) -> bool {
        let w = col / WORD_BITS;
        let b = col % WORD_BITS;
        let stride = self.words;
        let Some(found) = (pivot_row..self.rows)
            .find(|&r| (self.data[r * stride + w] >> b) & 1 == 1)
        else {
            return false;
        };
        if found != pivot_row {
            for k in w..stride {
                self.data.swap(found * stride + k, pivot_row * stride + k);
            }
        }
        // clear the column below the pivot; earlier words are already zero there
        let (head, tail) = self.data.split_at_mut((pivot_row + 1) * stride);
        let pivot = &head[pivot_row * stride + w..pivot_row * stride + stride];
        for r in pivot_row + 1..self.rows {
            let off = (r - pivot_row - 1) * stride;
            let row = &mut tail[off + w..off + stride];
            if (row[0] >> b) & 1 == 1 {
                for (a, p) in row.iter_mut().zip(pivot) {
                    *a ^= p;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive_rank(mut m: Vec<Vec<bool>>, cols: usize) -> usize {
        let mut rank = 0;
        for c in 0..cols {
            if let Some(p) = (rank..m.len()).find(|&r| m[r][c]) {
                m.swap(p, rank);
                let pivot = m[rank].clone();
                for (r, row) in m.iter_mut().enumerate() {
                    if r != rank && row[c] {
                        for (a, b) in row.iter_mut().zip(&pivot) {
                            *a ^= b;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn rank_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let rows = rng.random_range(1..40);
            let cols = rng.random_range(1..90);
            let mut m = BitMatrix::zeros(rows, cols);
            let mut dense = vec![vec![false; cols]; rows];
            for r in 0..rows {
                for c in 0..cols {
                    let v = rng.random::<bool>();
                    m.set(r, c, v);
                    dense[r][c] = v;
                }
            }
            assert_eq!(m.rank(), naive_rank(dense, cols));
        }
    }

    #[test]
    fn prefix_ranks_match_individual_ranks() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rows = 24;
        let cols = 70;
        let bits: Vec<Vec<bool>> =
            (0..rows).map(|_| (0..cols).map(|_| rng.random()).collect()).collect();
        let build = |ncols: usize| {
            let mut m = BitMatrix::zeros(rows, ncols);
            for r in 0..rows {
                for c in 0..ncols {
                    m.set(r, c, bits[r][c]);
                }
            }
            m
        };
        let prefix = build(cols).prefix_ranks();
        for c in [0usize, 1, 13, 37, 63, 64, 69] {
            assert_eq!(prefix[c], build(c + 1).rank(), "prefix {c}");
        }
    }
}

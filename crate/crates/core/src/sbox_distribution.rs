//! Class-transition counts through a layer of four parallel S-boxes.
//!
//! For every 4-tuple `(x1, x2, x3, x4)` the input class is
//! `X = x1 ^ x2 ^ x3 ^ x4` and the output class is
//! `Y = S(x1) ^ S(x2) ^ S(x3) ^ S(x4)`. The count matrix tallies `(X, Y)`.
//!
//! Two independent routes produce it:
//!
//! * [`compute_counts_naive`] walks all `2^(4n)` tuples.
//! * [`xor_convolve_square`] squares the two-byte [`PairTable`] under XOR
//!   convolution with a Walsh-Hadamard transform over the `2n`-bit index
//!   `(X << n) | Y`.
//!
//! Everything is generic over the S-box width `n` (2 to 8 bits) so the two
//! routes can also be compared on small toy S-boxes.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::aes::{INV_SBOX, SBOX};
use crate::{Error, Result};

/// A bijective `n`-bit S-box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sbox {
    bits: u32,
    table: Vec<u8>,
}

impl Sbox {
    pub fn new(bits: u32, table: Vec<u8>) -> Result<Self> {
        if !(2..=8).contains(&bits) || table.len() != 1 << bits {
            return Err(Error::BadTableSize {
                bits,
                len: table.len(),
            });
        }
        let mut seen = vec![false; table.len()];
        for &v in &table {
            let slot = seen
                .get_mut(v as usize)
                .ok_or(Error::NotBijective { value: v })?;
            if *slot {
                return Err(Error::NotBijective { value: v });
            }
            *slot = true;
        }
        Ok(Sbox { bits, table })
    }

    pub fn aes() -> Self {
        Sbox {
            bits: 8,
            table: SBOX.to_vec(),
        }
    }

    pub fn aes_inverse() -> Self {
        Sbox {
            bits: 8,
            table: INV_SBOX.to_vec(),
        }
    }

    pub fn identity(bits: u32) -> Result<Self> {
        Sbox::new(bits, (0..1u32 << bits).map(|v| v as u8).collect())
    }

    pub fn inverse(&self) -> Sbox {
        let mut inv = vec![0u8; self.table.len()];
        for (x, &y) in self.table.iter().enumerate() {
            inv[y as usize] = x as u8;
        }
        Sbox {
            bits: self.bits,
            table: inv,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Number of S-box inputs, `2^bits`.
    pub fn size(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, x: u8) -> u8 {
        self.table[x as usize]
    }
}

/// A square grid of 64-bit counters indexed `[row][col]`.
#[derive(Clone, PartialEq, Eq)]
pub struct CountsMatrix {
    dim: usize,
    cells: Vec<u64>,
}

/// `n2[a][b]`: byte pairs with input XOR `a` and output XOR `b`.
pub type PairTable = CountsMatrix;

impl core::fmt::Debug for CountsMatrix {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("CountsMatrix")
            .field("dim", &self.dim)
            .field("total", &self.total())
            .finish_non_exhaustive()
    }
}

impl CountsMatrix {
    pub fn zeros(dim: usize) -> Self {
        CountsMatrix {
            dim,
            cells: vec![0; dim * dim],
        }
    }

    /// Build from row-major cells; `cells.len()` must be a perfect square.
    pub fn from_cells(cells: Vec<u64>) -> Result<Self> {
        let dim = (0..=cells.len())
            .find(|d| d * d >= cells.len())
            .unwrap_or(0);
        if dim * dim != cells.len() {
            return Err(Error::DimensionMismatch {
                left: cells.len(),
                right: dim * dim,
            });
        }
        Ok(CountsMatrix { dim, cells })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.cells[row * self.dim + col]
    }

    pub fn row(&self, row: usize) -> &[u64] {
        &self.cells[row * self.dim..(row + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.cells.chunks_exact(self.dim.max(1))
    }

    pub fn cells(&self) -> &[u64] {
        &self.cells
    }

    pub fn row_sum(&self, row: usize) -> u64 {
        self.row(row).iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().sum()
    }

    /// Cell-wise addition of a partial count.
    pub fn merge(&mut self, other: &CountsMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            *a += b;
        }
        Ok(())
    }

    /// Check every row sums to `expected`.
    pub fn check_row_sums(&self, expected: u64) -> Result<()> {
        for row in 0..self.dim {
            let sum = self.row_sum(row);
            if sum != expected {
                return Err(Error::RowSum { row, sum, expected });
            }
        }
        Ok(())
    }

    pub fn transpose(&self) -> CountsMatrix {
        let mut out = CountsMatrix::zeros(self.dim);
        for x in 0..self.dim {
            for y in 0..self.dim {
                out.cells[y * self.dim + x] = self.get(x, y);
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|x| (0..x).all(|y| self.get(x, y) == self.get(y, x)))
    }

    /// First cell where `self` and `other` differ, if any.
    pub fn first_difference(&self, other: &CountsMatrix) -> Option<(usize, usize)> {
        if self.dim != other.dim {
            return Some((0, 0));
        }
        self.cells
            .iter()
            .zip(&other.cells)
            .position(|(a, b)| a != b)
            .map(|i| (i / self.dim, i % self.dim))
    }
}

/// Expected row sum of a count matrix for an `n`-bit S-box: `2^(3n)`.
pub fn expected_row_sum(sbox: &Sbox) -> u64 {
    1u64 << (3 * sbox.bits)
}

/// Counts for all tuples whose first element is `x1`.
///
/// The full count is the merge of `naive_partial(sbox, x1)` over every `x1`;
/// partials can be produced on separate threads in any order.
pub fn naive_partial(sbox: &Sbox, x1: usize) -> CountsMatrix {
    if sbox.bits == 8 {
        naive_partial_byte(sbox, x1)
    } else {
        naive_partial_generic(sbox, x1)
    }
}

fn naive_partial_generic(sbox: &Sbox, x1: usize) -> CountsMatrix {
    let n = sbox.size();
    let s = sbox.table();
    let mut out = CountsMatrix::zeros(n);
    for x2 in 0..n {
        for x3 in 0..n {
            for x4 in 0..n {
                let x = x1 ^ x2 ^ x3 ^ x4;
                let y = s[x1] ^ s[x2] ^ s[x3] ^ s[x4];
                out.cells[x * n + y as usize] += 1;
            }
        }
    }
    out
}

fn naive_partial_byte(sbox: &Sbox, x1: usize) -> CountsMatrix {
    // One x1 slice has 2^24 tuples, so no cell can exceed u32.
    let mut acc: Box<[u32; 1 << 16]> = vec![0u32; 1 << 16]
        .into_boxed_slice()
        .try_into()
        .expect("length is 2^16");
    let mut s = [0u8; 256];
    s.copy_from_slice(sbox.table());
    let y1 = s[x1];
    for x2 in 0..256usize {
        let y12 = y1 ^ s[x2];
        for x3 in 0..256usize {
            let x123 = (x1 ^ x2 ^ x3) as u8;
            let y123 = y12 ^ s[x3];
            for (x4, &y4) in s.iter().enumerate() {
                let x = x123 ^ x4 as u8;
                let y = y123 ^ y4;
                acc[((x as u16) << 8 | y as u16) as usize] += 1;
            }
        }
    }
    CountsMatrix {
        dim: 256,
        cells: acc.iter().map(|&c| c as u64).collect(),
    }
}

/// Exhaust all `2^(4n)` input tuples.
pub fn compute_counts_naive(sbox: &Sbox) -> CountsMatrix {
    let mut total = CountsMatrix::zeros(sbox.size());
    for x1 in 0..sbox.size() {
        total
            .merge(&naive_partial(sbox, x1))
            .expect("partials share the S-box dimension");
    }
    total
}

/// Tally all `2^(2n)` ordered pairs `(x1, x2)`.
pub fn compute_pair_table(sbox: &Sbox) -> PairTable {
    let n = sbox.size();
    let s = sbox.table();
    let mut out = CountsMatrix::zeros(n);
    for x1 in 0..n {
        for x2 in 0..n {
            let b = (s[x1] ^ s[x2]) as usize;
            out.cells[(x1 ^ x2) * n + b] += 1;
        }
    }
    out
}

/// In-place unnormalised Walsh-Hadamard transform. Length must be a power of two.
pub fn fwht(data: &mut [i64]) {
    assert!(
        data.len().is_power_of_two(),
        "WHT length must be a power of two"
    );
    let mut h = 1;
    while h < data.len() {
        for block in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*a, *b);
                *a = u + v;
                *b = u - v;
            }
        }
        h *= 2;
    }
}

/// XOR self-convolution of a pair table, giving the 4-tuple count matrix.
///
/// Magnitudes stay below `2^(6n)` (at most `2^48` for bytes) so `i64` is exact.
pub fn xor_convolve_square(t: &PairTable) -> Result<CountsMatrix> {
    let len = t.cells.len();
    let mut v: Vec<i64> = t.cells.iter().map(|&c| c as i64).collect();
    fwht(&mut v);
    for c in v.iter_mut() {
        *c *= *c;
    }
    fwht(&mut v);
    let norm = len as i64;
    let mut cells = Vec::with_capacity(len);
    for (index, &raw) in v.iter().enumerate() {
        if raw < 0 || raw % norm != 0 {
            return Err(Error::Convolution { index, raw });
        }
        cells.push((raw / norm) as u64);
    }
    Ok(CountsMatrix { dim: t.dim, cells })
}

/// Fast route: pair table, then XOR self-convolution.
pub fn compute_counts_fast(sbox: &Sbox) -> Result<CountsMatrix> {
    xor_convolve_square(&compute_pair_table(sbox))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowStats {
    pub row: usize,
    pub max: u64,
    pub argmax: usize,
    pub min: u64,
    pub argmin: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountsStats {
    pub rows: Vec<RowStats>,
    pub total: u64,
    /// Mean cell value, `total / dim^2`.
    pub expected_cell: u64,
}

/// The four numbers that summarise the row-0 concentration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Headline {
    /// Row 0 maximum.
    pub row0_max: u64,
    pub row0_argmax: usize,
    /// Largest maximum over rows `1..`.
    pub other_max: u64,
    /// Row 0 minimum.
    pub row0_min: u64,
    /// Smallest minimum over rows `1..`.
    pub other_min: u64,
}

impl CountsStats {
    pub fn headline(&self) -> Headline {
        let row0 = self.rows[0];
        let others = &self.rows[1..];
        Headline {
            row0_max: row0.max,
            row0_argmax: row0.argmax,
            other_max: others.iter().map(|r| r.max).max().unwrap_or(0),
            row0_min: row0.min,
            other_min: others.iter().map(|r| r.min).min().unwrap_or(0),
        }
    }
}

/// Per-row extrema (first index on ties) and the grand total.
pub fn counts_stats(c: &CountsMatrix) -> CountsStats {
    let rows = c
        .rows()
        .enumerate()
        .map(|(row, cells)| {
            let mut st = RowStats {
                row,
                max: cells[0],
                argmax: 0,
                min: cells[0],
                argmin: 0,
            };
            for (i, &v) in cells.iter().enumerate() {
                if v > st.max {
                    st.max = v;
                    st.argmax = i;
                }
                if v < st.min {
                    st.min = v;
                    st.argmin = i;
                }
            }
            st
        })
        .collect();
    let total = c.total();
    let cells = (c.dim * c.dim) as u64;
    CountsStats {
        rows,
        total,
        expected_cell: total.checked_div(cells).unwrap_or(0),
    }
}

/// Row-stochastic distribution with a shared power-of-two denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistMatrix {
    counts: CountsMatrix,
    denominator: u64,
}

impl DistMatrix {
    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn numerator(&self, x: usize, y: usize) -> u64 {
        self.counts.get(x, y)
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.counts.get(x, y) as f64 / self.denominator as f64
    }

    pub fn dim(&self) -> usize {
        self.counts.dim
    }
}

/// Normalise each row by its common sum `2^(3n)`, where `dim = 2^n`.
pub fn dist_from_counts(c: &CountsMatrix) -> Result<DistMatrix> {
    let denominator = (c.dim as u64).pow(3);
    c.check_row_sums(denominator)?;
    Ok(DistMatrix {
        counts: c.clone(),
        denominator,
    })
}

/// `p[x][y] == invp[y][x]` for every cell.
pub fn transpose_check(p: &CountsMatrix, invp: &CountsMatrix) -> bool {
    p.dim == invp.dim && (0..p.dim).all(|x| (0..p.dim).all(|y| p.get(x, y) == invp.get(y, x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_sbox(bits: u32, seed: u64) -> Sbox {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t: Vec<u8> = (0..1u32 << bits).map(|v| v as u8).collect();
        t.shuffle(&mut rng);
        Sbox::new(bits, t).unwrap()
    }

    // Flat four-deep loop straight off the definition, for small widths.
    fn brute_force(sbox: &Sbox) -> Vec<u64> {
        let n = sbox.size();
        let mut out = vec![0u64; n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let x = a ^ b ^ c ^ d;
                        let y = sbox.apply(a as u8)
                            ^ sbox.apply(b as u8)
                            ^ sbox.apply(c as u8)
                            ^ sbox.apply(d as u8);
                        out[x * n + y as usize] += 1;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn sbox_validation() {
        assert_eq!(
            Sbox::new(4, vec![0; 16]),
            Err(Error::NotBijective { value: 0 })
        );
        assert!(matches!(
            Sbox::new(4, vec![0; 15]),
            Err(Error::BadTableSize { .. })
        ));
        assert!(matches!(
            Sbox::new(4, (0..16).map(|v| v + 1).collect()),
            Err(Error::NotBijective { value: 16 })
        ));
        assert!(Sbox::new(9, vec![]).is_err());
        assert_eq!(Sbox::aes().inverse(), Sbox::aes_inverse());
    }

    #[test]
    fn pair_table_basics() {
        for sbox in [Sbox::aes(), Sbox::aes_inverse(), random_sbox(8, 1)] {
            let t = compute_pair_table(&sbox);
            assert_eq!(t.get(0, 0), 256);
            assert_eq!(t.row_sum(0), 256);
            assert!((1..256).all(|b| t.get(0, b) == 0));
            assert_eq!(t.total(), 1 << 16);
        }
        let id = compute_pair_table(&Sbox::identity(8).unwrap());
        for a in 0..256 {
            for b in 0..256 {
                assert_eq!(id.get(a, b), if a == b { 256 } else { 0 });
            }
        }
    }

    #[test]
    fn fwht_is_self_inverse_up_to_scale() {
        let mut v: Vec<i64> = (0..16).map(|i| (i * 7 % 5) as i64 - 2).collect();
        let orig = v.clone();
        fwht(&mut v);
        fwht(&mut v);
        assert_eq!(v, orig.iter().map(|x| x * 16).collect::<Vec<_>>());
    }

    #[test]
    fn single_pair_squares_to_origin() {
        let mut cells = vec![0u64; 16];
        cells[5] = 1;
        let t = CountsMatrix::from_cells(cells).unwrap();
        let sq = xor_convolve_square(&t).unwrap();
        assert_eq!(sq.get(0, 0), 1);
        assert_eq!(sq.total(), 1);
    }

    #[test]
    fn fast_matches_brute_force_on_toy_sboxes() {
        for seed in 0..4 {
            let sbox = random_sbox(4, seed);
            let want = brute_force(&sbox);
            assert_eq!(compute_counts_fast(&sbox).unwrap().cells(), &want[..]);
            assert_eq!(compute_counts_naive(&sbox).cells(), &want[..]);
        }
        let id = Sbox::identity(4).unwrap();
        assert_eq!(
            compute_counts_fast(&id).unwrap().cells(),
            &brute_force(&id)[..]
        );
    }

    #[test]
    fn identity_sbox_counts_are_diagonal() {
        let c = compute_counts_fast(&Sbox::identity(8).unwrap()).unwrap();
        for x in 0..256 {
            for y in 0..256 {
                assert_eq!(c.get(x, y), if x == y { 1 << 24 } else { 0 });
            }
        }
        let stats = counts_stats(&c);
        assert!(stats
            .rows
            .iter()
            .all(|r| r.max == 1 << 24 && r.argmax == r.row));
        let d = dist_from_counts(&c).unwrap();
        assert_eq!(d.prob(5, 5), 1.0);
        assert_eq!(d.prob(5, 6), 0.0);
        assert!(transpose_check(&c, &c));
    }

    #[test]
    fn aes_fast_counts() {
        let p = compute_counts_fast(&Sbox::aes()).unwrap();
        p.check_row_sums(1 << 24).unwrap();
        assert_eq!(p.total(), 1 << 32);
        let h = counts_stats(&p).headline();
        assert_eq!(h.row0_max, 198_136);
        assert_eq!(h.row0_argmax, 0);
        assert_eq!(h.other_max, 68_392);
        assert_eq!(h.row0_min, 65_016);
        assert_eq!(h.other_min, 64_128);

        let invp = compute_counts_fast(&Sbox::aes_inverse()).unwrap();
        assert!(transpose_check(&p, &invp));

        let d = dist_from_counts(&p).unwrap();
        assert_eq!(d.denominator(), 1 << 24);
        assert_eq!(d.prob(0, 0), 198_136.0 / 16_777_216.0);
        assert!((d.prob(0, 0) - 0.011_81).abs() < 1e-5);
        for x in 0..256 {
            assert_eq!(
                (0..256).map(|y| d.numerator(x, y)).sum::<u64>(),
                d.denominator()
            );
        }
    }

    #[test]
    fn dist_rejects_bad_rows() {
        let c = CountsMatrix::from_cells(vec![1, 0, 0, 0]).unwrap();
        assert_eq!(
            dist_from_counts(&c),
            Err(Error::RowSum {
                row: 0,
                sum: 1,
                expected: 8
            })
        );
    }

    #[test]
    fn transpose_relation_toy() {
        let s = random_sbox(4, 9);
        let p = compute_counts_naive(&s);
        let invp = compute_counts_naive(&s.inverse());
        assert!(transpose_check(&p, &invp));
        assert_eq!(p.transpose(), invp);
    }

    #[test]
    fn merge_dimension_mismatch() {
        let mut a = CountsMatrix::zeros(4);
        assert!(a.merge(&CountsMatrix::zeros(2)).is_err());
        assert!(CountsMatrix::from_cells(vec![0; 5]).is_err());
    }
}

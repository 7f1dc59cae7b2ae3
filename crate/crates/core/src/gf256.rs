//! Arithmetic in GF(2^8) modulo `x^8 + x^4 + x^3 + x + 1`.

use alloc::boxed::Box;
use alloc::vec;
use core::fmt;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul};

/// The AES reduction polynomial `x^8 + x^4 + x^3 + x + 1`.
pub const AES_MODULUS: u16 = 0x11B;

/// An element of GF(2^8), stored as its coefficient bit pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[repr(transparent)]
pub struct GfByte(pub u8);

impl GfByte {
    pub const ZERO: GfByte = GfByte(0);
    pub const ONE: GfByte = GfByte(1);

    #[inline]
    pub const fn new(v: u8) -> Self {
        GfByte(v)
    }

    #[inline]
    pub const fn value(self) -> u8 {
        self.0
    }
}

impl From<u8> for GfByte {
    fn from(v: u8) -> Self {
        GfByte(v)
    }
}

impl From<GfByte> for u8 {
    fn from(v: GfByte) -> Self {
        v.0
    }
}

impl fmt::LowerHex for GfByte {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

impl Add for GfByte {
    type Output = GfByte;
    #[inline]
    fn add(self, rhs: GfByte) -> GfByte {
        gf_add(self, rhs)
    }
}

impl AddAssign for GfByte {
    #[inline]
    fn add_assign(&mut self, rhs: GfByte) {
        *self = gf_add(*self, rhs);
    }
}

impl Mul for GfByte {
    type Output = GfByte;
    #[inline]
    fn mul(self, rhs: GfByte) -> GfByte {
        gf_mul(self, rhs)
    }
}

impl core::iter::Sum for GfByte {
    fn sum<I: Iterator<Item = GfByte>>(iter: I) -> GfByte {
        iter.fold(GfByte::ZERO, Add::add)
    }
}

/// Field addition: bitwise XOR.
#[inline]
pub const fn gf_add(a: GfByte, b: GfByte) -> GfByte {
    GfByte(a.0 ^ b.0)
}

/// Multiply by `x`, reducing once if the degree reaches 8.
#[inline]
pub const fn xtime(a: u8) -> u8 {
    let shifted = (a as u16) << 1;
    if shifted & 0x100 != 0 {
        (shifted ^ AES_MODULUS) as u8
    } else {
        shifted as u8
    }
}

/// Raw byte multiply: shift-and-add with conditional reduction.
#[inline]
pub const fn mul_u8(a: u8, b: u8) -> u8 {
    let mut acc = 0u8;
    let mut x = a;
    let mut y = b;
    while y != 0 {
        if y & 1 != 0 {
            acc ^= x;
        }
        x = xtime(x);
        y >>= 1;
    }
    acc
}

/// Field multiplication.
#[inline]
pub const fn gf_mul(a: GfByte, b: GfByte) -> GfByte {
    GfByte(mul_u8(a.0, b.0))
}

/// Precomputed 256x256 product table for hot loops.
///
/// Built once and read-only afterwards, so it can be shared between threads.
pub struct MulTable {
    products: Box<[u8]>,
}

impl MulTable {
    pub fn new() -> Self {
        let mut products = vec![0u8; 256 * 256].into_boxed_slice();
        for a in 0..256usize {
            for b in 0..256usize {
                products[(a << 8) | b] = mul_u8(a as u8, b as u8);
            }
        }
        MulTable { products }
    }

    #[inline]
    pub fn mul(&self, a: GfByte, b: GfByte) -> GfByte {
        GfByte(self.products[((a.0 as usize) << 8) | b.0 as usize])
    }

    /// The row of products `a * b` for all `b`.
    #[inline]
    pub fn row(&self, a: GfByte) -> &[u8] {
        let start = (a.0 as usize) << 8;
        &self.products[start..start + 256]
    }
}

impl Default for MulTable {
    fn default() -> Self {
        Self::new()
    }
}

/// Four class values `(Q1, Q2, Q3, Q4)`, one per logical column.
///
/// Displays as 8 lowercase hex digits, `Q1` first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ClassVector(pub [GfByte; 4]);

impl ClassVector {
    pub const ZERO: ClassVector = ClassVector([GfByte::ZERO; 4]);

    pub const fn from_bytes(b: [u8; 4]) -> Self {
        ClassVector([GfByte(b[0]), GfByte(b[1]), GfByte(b[2]), GfByte(b[3])])
    }

    pub const fn to_bytes(self) -> [u8; 4] {
        [self.0[0].0, self.0[1].0, self.0[2].0, self.0[3].0]
    }

    /// Pack as a big-endian `u32` with `Q1` in the top byte.
    pub const fn to_u32(self) -> u32 {
        u32::from_be_bytes(self.to_bytes())
    }

    pub const fn from_u32(v: u32) -> Self {
        Self::from_bytes(v.to_be_bytes())
    }
}

impl Index<usize> for ClassVector {
    type Output = GfByte;
    fn index(&self, i: usize) -> &GfByte {
        &self.0[i]
    }
}

impl IndexMut<usize> for ClassVector {
    fn index_mut(&mut self, i: usize) -> &mut GfByte {
        &mut self.0[i]
    }
}

impl Add for ClassVector {
    type Output = ClassVector;
    fn add(self, rhs: ClassVector) -> ClassVector {
        let mut out = self;
        for (o, r) in out.0.iter_mut().zip(rhs.0) {
            *o += r;
        }
        out
    }
}

impl fmt::Display for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08x}", self.to_u32())
    }
}

/// A 4x4 matrix over GF(2^8) acting on [`ClassVector`]s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClassMatrix(pub [[GfByte; 4]; 4]);

impl ClassMatrix {
    pub const IDENTITY: ClassMatrix =
        ClassMatrix::from_rows([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);

    pub const fn from_rows(rows: [[u8; 4]; 4]) -> Self {
        let mut m = [[GfByte::ZERO; 4]; 4];
        let mut i = 0;
        while i < 4 {
            let mut j = 0;
            while j < 4 {
                m[i][j] = GfByte(rows[i][j]);
                j += 1;
            }
            i += 1;
        }
        ClassMatrix(m)
    }

    /// Circulant matrix whose row `i` is `first_row` rotated right by `i`.
    pub const fn circulant(first_row: [u8; 4]) -> Self {
        let mut rows = [[0u8; 4]; 4];
        let mut i = 0;
        while i < 4 {
            let mut j = 0;
            while j < 4 {
                rows[i][j] = first_row[(j + 4 - i) % 4];
                j += 1;
            }
            i += 1;
        }
        Self::from_rows(rows)
    }

    pub const fn rows(&self) -> [[u8; 4]; 4] {
        let mut rows = [[0u8; 4]; 4];
        let mut i = 0;
        while i < 4 {
            let mut j = 0;
            while j < 4 {
                rows[i][j] = self.0[i][j].0;
                j += 1;
            }
            i += 1;
        }
        rows
    }

    pub fn entry(&self, row: usize, col: usize) -> GfByte {
        self.0[row][col]
    }

    pub fn apply(&self, v: ClassVector) -> ClassVector {
        gf_matrix_mul(self, v)
    }

    pub fn compose(&self, rhs: &ClassMatrix) -> ClassMatrix {
        gf_matrix_compose(self, rhs)
    }
}

/// `m * v` over GF(2^8).
pub fn gf_matrix_mul(m: &ClassMatrix, v: ClassVector) -> ClassVector {
    let mut out = ClassVector::ZERO;
    for (i, row) in m.0.iter().enumerate() {
        out[i] = row.iter().zip(v.0).map(|(&a, b)| a * b).sum();
    }
    out
}

/// Matrix product `a * b`, so that `(a * b) v = a (b v)`.
pub fn gf_matrix_compose(a: &ClassMatrix, b: &ClassMatrix) -> ClassMatrix {
    let mut out = [[GfByte::ZERO; 4]; 4];
    for (i, out_row) in out.iter_mut().enumerate() {
        for (j, cell) in out_row.iter_mut().enumerate() {
            *cell = (0..4).map(|t| a.0[i][t] * b.0[t][j]).sum();
        }
    }
    ClassMatrix(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Carry-less product followed by polynomial long division; shares no
    // code with `mul_u8`.
    fn clmul_reduce(a: u8, b: u8) -> u8 {
        let mut prod: u16 = 0;
        for bit in 0..8 {
            if (b >> bit) & 1 == 1 {
                prod ^= (a as u16) << bit;
            }
        }
        for deg in (8..15).rev() {
            if (prod >> deg) & 1 == 1 {
                prod ^= AES_MODULUS << (deg - 8);
            }
        }
        prod as u8
    }

    #[test]
    fn add_examples() {
        assert_eq!(gf_add(GfByte(0x00), GfByte(0x57)), GfByte(0x57));
        assert_eq!(gf_add(GfByte(0x57), GfByte(0x57)), GfByte(0x00));
        assert_eq!(gf_add(GfByte(0x0E), GfByte(0x09)), GfByte(0x07));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(gf_mul(GfByte(0x01), GfByte(0xAB)), GfByte(0xAB));
        assert_eq!(gf_mul(GfByte(0x02), GfByte(0x80)), GfByte(0x1B));
        assert_eq!(clmul_reduce(0x53, 0xCA), 0x01);
        assert_eq!(gf_mul(GfByte(0x53), GfByte(0xCA)), GfByte(0x01));
    }

    #[test]
    fn mul_matches_long_division_oracle() {
        for a in 0..=255u8 {
            for b in 0..=255u8 {
                assert_eq!(mul_u8(a, b), clmul_reduce(a, b), "{a:#x} * {b:#x}");
            }
        }
    }

    #[test]
    fn mul_table_agrees() {
        let t = MulTable::new();
        for a in 0..=255u8 {
            for b in 0..=255u8 {
                assert_eq!(t.mul(GfByte(a), GfByte(b)), gf_mul(GfByte(a), GfByte(b)));
            }
            assert_eq!(t.row(GfByte(a))[3], mul_u8(a, 3));
        }
    }

    #[test]
    fn times_three_is_times_two_plus_one() {
        for a in 0..=255u8 {
            assert_eq!(mul_u8(a, 3), mul_u8(a, 2) ^ a);
        }
    }

    #[test]
    fn mix_column_coefficients_fold_to_one() {
        let fold = |c: [u8; 4]| c.iter().fold(0, |a, b| a ^ b);
        assert_eq!(fold([2, 3, 1, 1]), 1);
        assert_eq!(fold([14, 11, 13, 9]), 1);
    }

    #[test]
    fn matrix_vector_examples() {
        let v = ClassVector::from_bytes([0x12, 0x34, 0x56, 0x78]);
        assert_eq!(gf_matrix_mul(&ClassMatrix::IDENTITY, v), v);

        let mc = ClassMatrix::circulant([2, 3, 1, 1]);
        assert_eq!(gf_matrix_mul(&mc, ClassVector::ZERO), ClassVector::ZERO);
        assert_eq!(
            gf_matrix_mul(&mc, ClassVector::from_bytes([1, 0, 0, 0])),
            ClassVector::from_bytes([2, 1, 1, 3])
        );
    }

    #[test]
    fn circulant_layout() {
        assert_eq!(
            ClassMatrix::circulant([2, 3, 1, 1]).rows(),
            [[2, 3, 1, 1], [1, 2, 3, 1], [1, 1, 2, 3], [3, 1, 1, 2]]
        );
    }

    #[test]
    fn compose_examples() {
        let mc = ClassMatrix::circulant([2, 3, 1, 1]);
        let imc = ClassMatrix::circulant([14, 11, 13, 9]);
        assert_eq!(gf_matrix_compose(&ClassMatrix::IDENTITY, &mc), mc);
        assert_eq!(gf_matrix_compose(&mc, &imc), ClassMatrix::IDENTITY);

        let two_shift =
            ClassMatrix::from_rows([[3, 0, 2, 0], [0, 3, 0, 2], [2, 0, 3, 0], [0, 2, 0, 3]]);
        assert_eq!(mul_u8(3, 3) ^ mul_u8(2, 2), 1);
        assert_eq!(mul_u8(3, 2) ^ mul_u8(2, 3), 0);
        assert_eq!(
            gf_matrix_compose(&two_shift, &two_shift),
            ClassMatrix::IDENTITY
        );
    }

    #[test]
    fn class_vector_hex() {
        let v = ClassVector::from_bytes([0x0e, 0x09, 0x0d, 0x0b]);
        assert_eq!(alloc::format!("{v}"), "0e090d0b");
        assert_eq!(ClassVector::from_u32(v.to_u32()), v);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100_000))]

            #[test]
            fn commutative_and_distributive(a: u8, b: u8, c: u8) {
                let (a, b, c) = (GfByte(a), GfByte(b), GfByte(c));
                prop_assert_eq!(a * b, b * a);
                prop_assert_eq!(a * (b + c), a * b + a * c);
            }
        }

        proptest! {
            #[test]
            fn compose_is_associative_on_vectors(
                a in proptest::array::uniform4(proptest::array::uniform4(any::<u8>())),
                b in proptest::array::uniform4(proptest::array::uniform4(any::<u8>())),
                v: [u8; 4],
            ) {
                let (a, b) = (ClassMatrix::from_rows(a), ClassMatrix::from_rows(b));
                let v = ClassVector::from_bytes(v);
                prop_assert_eq!(a.compose(&b).apply(v), a.apply(b.apply(v)));
            }
        }
    }
}

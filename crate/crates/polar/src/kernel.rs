//! Polar transform, bit-reversal permutation, dense GF(2) generator
//! oracle, and the M-way block decomposition of the transform.
//!
//! The fast path is the butterfly encoder [`polar_encode`]; the dense
//! [`generator_matrix`] exists as a test oracle and is capped at small
//! block sizes. [`build_layout`] and [`block_transform`] realise the
//! decomposition of one length-`N` code into `M` component codes of
//! length `N/M` whose input words are position-wise GF(2) combinations
//! of an interleaved permutation of the original input.

use crate::word::BitWord;
use crate::{Error, Result};

/// Largest transform order accepted by the dense generator oracle.
pub const DENSE_GENERATOR_MAX_ORDER: usize = 12;
/// Largest transform order accepted by [`bit_reversal_perm`].
pub const BIT_REVERSAL_MAX_ORDER: usize = 30;

/// Reverses the low `n` bits of `value`.
#[inline]
pub fn bit_reverse(value: usize, n: usize) -> usize {
    let mut out = 0usize;
    for i in 0..n {
        out |= ((value >> i) & 1) << (n - 1 - i);
    }
    out
}

/// Bit-reversal permutation on `{0 .. 2^n - 1}`.
///
/// `output[i]` is the integer whose `n`-bit representation is the
/// reversal of `i`'s. The permutation is an involution.
pub fn bit_reversal_perm(n: usize) -> Vec<usize> {
    assert!(
        n <= BIT_REVERSAL_MAX_ORDER,
        "bit-reversal order {n} exceeds limit {BIT_REVERSAL_MAX_ORDER}"
    );
    (0..1usize << n).map(|i| bit_reverse(i, n)).collect()
}

/// Dense matrix over GF(2), row-major `{0,1}` entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<u8>,
}

impl Gf2Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![0u8; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// The 2x2 polarisation kernel `[[1,0],[1,1]]`.
    pub fn polar_kernel() -> Self {
        Self {
            rows: 2,
            cols: 2,
            entries: vec![1, 0, 1, 1],
        }
    }

    /// `n`-th Kronecker power of the polar kernel; the identity for n=0.
    pub fn kernel_power(n: usize) -> Self {
        let mut acc = Self::identity(1);
        for _ in 0..n {
            acc = Self::polar_kernel().kronecker(&acc);
        }
        acc
    }

    /// Permutation matrix of the bit-reversal on `2^n` indices.
    pub fn bit_reversal_matrix(n: usize) -> Self {
        let size = 1usize << n;
        let mut m = Self::zero(size, size);
        for (i, j) in bit_reversal_perm(n).into_iter().enumerate() {
            m.set(i, j, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        debug_assert!(value <= 1);
        self.entries[row * self.cols + col] = value & 1;
    }

    fn row(&self, row: usize) -> &[u8] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, rhs: &Gf2Matrix) -> Result<Gf2Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                actual: rhs.rows,
            });
        }
        let mut out = Gf2Matrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) == 1 {
                    let (dst, src) = (i * out.cols, k * rhs.cols);
                    for j in 0..rhs.cols {
                        out.entries[dst + j] ^= rhs.entries[src + j];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kronecker(&self, rhs: &Gf2Matrix) -> Gf2Matrix {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut out = Gf2Matrix::zero(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) == 1 {
                    for r in 0..rhs.rows {
                        for c in 0..rhs.cols {
                            out.set(i * rhs.rows + r, j * rhs.cols + c, rhs.get(r, c));
                        }
                    }
                }
            }
        }
        out
    }

    /// Row-vector product `v * self` over GF(2).
    pub fn mul_vec(&self, v: &[u8]) -> Result<Vec<u8>> {
        if v.len() != self.rows {
            return Err(Error::LengthMismatch {
                expected: self.rows,
                actual: v.len(),
            });
        }
        let mut out = vec![0u8; self.cols];
        for (i, &bit) in v.iter().enumerate() {
            if bit == 1 {
                for (o, &e) in out.iter_mut().zip(self.row(i)) {
                    *o ^= e;
                }
            }
        }
        Ok(out)
    }
}

/// Dense generator matrix `B_N * F^{⊗n}` of the length-`2^n` code.
///
/// Test oracle only; the production encoder is the butterfly in
/// [`polar_encode`]. Capped at `n <= `[`DENSE_GENERATOR_MAX_ORDER`].
pub fn generator_matrix(n: usize) -> Result<Gf2Matrix> {
    if n > DENSE_GENERATOR_MAX_ORDER {
        return Err(Error::SizeLimit {
            n,
            limit: DENSE_GENERATOR_MAX_ORDER,
        });
    }
    Gf2Matrix::bit_reversal_matrix(n).mul(&Gf2Matrix::kernel_power(n))
}

/// In-place butterfly computing `bits <- bits * F^{⊗n}`.
///
/// `bits.len()` must be a power of two.
pub fn polar_transform_in_place(bits: &mut [u8]) {
    let len = bits.len();
    debug_assert!(len.is_power_of_two() || len == 0);
    let mut step = 1;
    while step < len {
        let mut base = 0;
        while base < len {
            for i in base..base + step {
                bits[i] ^= bits[i + step];
            }
            base += 2 * step;
        }
        step *= 2;
    }
}

/// Polar encoder: `x = u * B_N * F^{⊗n}` via bit-reversal permutation
/// followed by the `O(N log N)` butterfly.
pub fn polar_encode(u: &BitWord) -> Result<BitWord> {
    let len = u.len();
    if !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { len });
    }
    let n = len.trailing_zeros() as usize;
    let mut bits = vec![0u8; len];
    for (i, b) in bits.iter_mut().enumerate() {
        *b = u.bit(bit_reverse(i, n));
    }
    polar_transform_in_place(&mut bits);
    BitWord::from_bits(bits)
}

/// Index bookkeeping for an `M`-component decomposition of a
/// length-`N` code.
///
/// The interleaved word `v` satisfies
/// `u * B_N = [v_block_0 * B_{N/M} | ... | v_block_{M-1} * B_{N/M}]`,
/// and block `j` of `v` holds the `u` indices congruent to
/// `bit_reverse(j, m)` modulo `M`, in increasing order. Positions
/// `(v_i, v_{i+N/M}, ..., v_{i+(M-1)N/M})` form joint group `i`; they
/// map to the `M` consecutive `u` indices starting at `M*i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelLayout {
    m: usize,
    log_m: usize,
    code_len: usize,
    block_len: usize,
    u_to_v: Vec<usize>,
    v_to_u: Vec<usize>,
}

impl ParallelLayout {
    /// Number of component blocks `M`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// `log2(M)`.
    pub fn log_m(&self) -> usize {
        self.log_m
    }

    pub fn code_len(&self) -> usize {
        self.code_len
    }

    /// Component block length `N/M`.
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    /// Permutation taking a `u` index to its position in `v`.
    pub fn u_to_v_map(&self) -> &[usize] {
        &self.u_to_v
    }

    /// Inverse permutation: `u` index stored at a given `v` position.
    pub fn v_to_u_map(&self) -> &[usize] {
        &self.v_to_u
    }

    /// `v` index of offset `i` within component block `j`.
    pub fn v_index(&self, block: usize, offset: usize) -> usize {
        debug_assert!(block < self.m && offset < self.block_len);
        block * self.block_len + offset
    }

    /// `u` index feeding component `block` at joint step `offset`.
    pub fn u_index(&self, block: usize, offset: usize) -> usize {
        self.v_to_u[self.v_index(block, offset)]
    }

    /// The `M` v-positions decided together at joint step `i`.
    pub fn joint_group(&self, i: usize) -> Vec<usize> {
        (0..self.m).map(|j| self.v_index(j, i)).collect()
    }

    /// All `N/M` joint groups, in step order.
    pub fn joint_groups(&self) -> Vec<Vec<usize>> {
        (0..self.block_len).map(|i| self.joint_group(i)).collect()
    }

    /// Splits `u` into the `M` interleaved component input words.
    pub fn split_v_blocks(&self, u: &BitWord) -> Result<Vec<BitWord>> {
        if u.len() != self.code_len {
            return Err(Error::LengthMismatch {
                expected: self.code_len,
                actual: u.len(),
            });
        }
        Ok((0..self.m)
            .map(|j| BitWord::from_fn(self.block_len, |i| u.bit(self.u_index(j, i))))
            .collect())
    }
}

fn validate_component_count(m: usize) -> Result<usize> {
    match m {
        2 => Ok(1),
        4 => Ok(2),
        8 => Ok(3),
        _ => Err(Error::InvalidComponentCount {
            m,
            allowed: "2, 4, 8",
        }),
    }
}

/// Builds the `M`-component layout for a length-`code_len` code.
///
/// Requires `code_len` a power of two and `M <= code_len`.
pub fn build_layout(code_len: usize, m: usize) -> Result<ParallelLayout> {
    let log_m = validate_component_count(m)?;
    if !code_len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { len: code_len });
    }
    if m > code_len {
        return Err(Error::InvalidParameter(format!(
            "M={m} exceeds block length {code_len}"
        )));
    }
    let block_len = code_len / m;
    let mut u_to_v = vec![0usize; code_len];
    let mut v_to_u = vec![0usize; code_len];
    for (q, slot) in u_to_v.iter_mut().enumerate() {
        let v = bit_reverse(q % m, log_m) * block_len + q / m;
        *slot = v;
        v_to_u[v] = q;
    }
    Ok(ParallelLayout {
        m,
        log_m,
        code_len,
        block_len,
        u_to_v,
        v_to_u,
    })
}

/// Position-wise component combination: maps the `M`-tuple
/// `(v_i, v_{i+N/M}, ...)` to the component bits `(a_i, b_i, ...)` by
/// multiplying with `F^{⊗m}`.
///
/// `F^{⊗m}` is self-inverse over GF(2), so this is also the inverse
/// map; see [`inverse_block_transform`].
pub fn component_bits(v_bits: &[u8]) -> Vec<u8> {
    debug_assert!(v_bits.len().is_power_of_two());
    let mut out = v_bits.to_vec();
    polar_transform_in_place(&mut out);
    out
}

/// Recovers the `M`-tuple of `v` bits from decided component bits.
pub fn inverse_block_transform(component_bits_in: &[u8]) -> Vec<u8> {
    component_bits(component_bits_in)
}

/// Maps the `M` interleaved blocks of `v` to the `M` component input
/// words, position by position.
pub fn block_transform(v_blocks: &[BitWord]) -> Result<Vec<BitWord>> {
    let m = v_blocks.len();
    validate_component_count(m)?;
    let block_len = v_blocks[0].len();
    for b in v_blocks {
        if b.len() != block_len {
            return Err(Error::LengthMismatch {
                expected: block_len,
                actual: b.len(),
            });
        }
    }
    let mut out = vec![BitWord::zeros(block_len); m];
    let mut tuple = vec![0u8; m];
    for i in 0..block_len {
        for j in 0..m {
            tuple[j] = v_blocks[j].bit(i);
        }
        let combined = component_bits(&tuple);
        for j in 0..m {
            out[j].set(i, combined[j]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn random_word(len: usize, rng: &mut impl Rng) -> BitWord {
        BitWord::from_fn(len, |_| rng.random_range(0..=1u8))
    }

    #[test]
    fn bit_reversal_small_orders() {
        assert_eq!(bit_reversal_perm(0), vec![0]);
        assert_eq!(bit_reversal_perm(1), vec![0, 1]);
        assert_eq!(bit_reversal_perm(2), vec![0, 2, 1, 3]);
        assert_eq!(bit_reversal_perm(3), vec![0, 4, 2, 6, 1, 5, 3, 7]);
    }

    #[test]
    fn bit_reversal_is_involution() {
        for n in 0..=8 {
            let p = bit_reversal_perm(n);
            for (i, &j) in p.iter().enumerate() {
                assert_eq!(p[j], i);
            }
        }
    }

    #[test]
    fn generator_matrix_small() {
        assert_eq!(generator_matrix(0).unwrap(), Gf2Matrix::identity(1));
        assert_eq!(generator_matrix(1).unwrap(), Gf2Matrix::polar_kernel());
        let g4 = generator_matrix(2).unwrap();
        let expected = [
            [1, 0, 0, 0],
            [1, 0, 1, 0],
            [1, 1, 0, 0],
            [1, 1, 1, 1],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                assert_eq!(g4.get(i, j), e, "G_4[{i}][{j}]");
            }
        }
    }

    #[test]
    fn generator_matrix_rejects_large_order() {
        assert!(matches!(
            generator_matrix(13),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn kernel_power_is_self_inverse() {
        for m in 1..=3 {
            let f = Gf2Matrix::kernel_power(m);
            assert_eq!(f.mul(&f).unwrap(), Gf2Matrix::identity(1 << m));
        }
    }

    #[test]
    fn encode_examples() {
        let zero = BitWord::zeros(4);
        assert_eq!(polar_encode(&zero).unwrap(), zero);

        let u = BitWord::from_bits(vec![1, 0]).unwrap();
        assert_eq!(
            polar_encode(&u).unwrap(),
            BitWord::from_bits(vec![1, 0]).unwrap()
        );

        // Unit vector picks out one generator row.
        let u = BitWord::from_bits(vec![0, 0, 0, 1]).unwrap();
        assert_eq!(
            polar_encode(&u).unwrap(),
            BitWord::from_bits(vec![1, 1, 1, 1]).unwrap()
        );
    }

    #[test]
    fn encode_rejects_non_power_of_two() {
        let u = BitWord::zeros(6);
        assert!(matches!(
            polar_encode(&u),
            Err(Error::NotPowerOfTwo { len: 6 })
        ));
    }

    #[test]
    fn encode_matches_dense_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for n in 0..=8 {
            let g = generator_matrix(n).unwrap();
            for _ in 0..50 {
                let u = random_word(1 << n, &mut rng);
                let by_matrix = g.mul_vec(u.as_slice()).unwrap();
                assert_eq!(polar_encode(&u).unwrap().as_slice(), &by_matrix[..]);
            }
        }
    }

    #[test]
    fn layout_examples() {
        // N=4, M=2: v = (u0, u2, u1, u3).
        let l = build_layout(4, 2).unwrap();
        assert_eq!(l.v_to_u_map(), &[0, 2, 1, 3]);

        // N=8, M=2: first block draws the even u indices in order.
        let l = build_layout(8, 2).unwrap();
        let u = BitWord::from_fn(8, |i| (i % 2) as u8);
        let blocks = l.split_v_blocks(&u).unwrap();
        assert_eq!(blocks[0], BitWord::zeros(4));
        assert_eq!(blocks[1], BitWord::from_bits(vec![1, 1, 1, 1]).unwrap());

        // N=8, M=8: a single joint group covering everything.
        let l = build_layout(8, 8).unwrap();
        assert_eq!(l.block_len(), 1);
        assert_eq!(l.joint_groups(), vec![vec![0, 1, 2, 3, 4, 5, 6, 7]]);
    }

    #[test]
    fn layout_rejects_bad_m() {
        assert!(build_layout(16, 3).is_err());
        assert!(build_layout(16, 16).is_err());
        assert!(build_layout(8, 8).is_ok());
        assert!(build_layout(4, 8).is_err());
    }

    #[test]
    fn layout_map_is_bijection() {
        for &(n, m) in &[(8, 2), (16, 4), (64, 8)] {
            let l = build_layout(n, m).unwrap();
            let mut seen = vec![false; n];
            for &v in l.u_to_v_map() {
                assert!(!seen[v]);
                seen[v] = true;
            }
            for q in 0..n {
                assert_eq!(l.v_to_u_map()[l.u_to_v_map()[q]], q);
            }
        }
    }

    /// The layout is defined by the identity
    /// `u*B_N = [block_0*B_{N/M} | ... | block_{M-1}*B_{N/M}]`; check it
    /// against the dense matrices for every supported M.
    #[test]
    fn layout_satisfies_interleave_identity() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for n in 2..=8usize {
            let code_len = 1usize << n;
            let b_full = Gf2Matrix::bit_reversal_matrix(n);
            for &m in &[2usize, 4, 8] {
                if m > code_len {
                    continue;
                }
                let layout = build_layout(code_len, m).unwrap();
                let b_half = Gf2Matrix::bit_reversal_matrix(n - layout.log_m());
                for _ in 0..20 {
                    let u = random_word(code_len, &mut rng);
                    let lhs = b_full.mul_vec(u.as_slice()).unwrap();
                    let blocks = layout.split_v_blocks(&u).unwrap();
                    let rhs: Vec<u8> = blocks
                        .iter()
                        .flat_map(|b| b_half.mul_vec(b.as_slice()).unwrap())
                        .collect();
                    assert_eq!(lhs, rhs, "identity failed at N={code_len}, M={m}");
                }
            }
        }
    }

    #[test]
    fn block_transform_examples() {
        // M=2: a = v0 ^ v1, b = v1.
        let v = vec![
            BitWord::from_bits(vec![1]).unwrap(),
            BitWord::from_bits(vec![1]).unwrap(),
        ];
        let out = block_transform(&v).unwrap();
        assert_eq!(out[0], BitWord::from_bits(vec![0]).unwrap());
        assert_eq!(out[1], BitWord::from_bits(vec![1]).unwrap());

        // M=4 tuple (1,1,0,0) -> (0,1,0,0).
        assert_eq!(component_bits(&[1, 1, 0, 0]), vec![0, 1, 0, 0]);

        // All-zero input stays zero.
        let v: Vec<BitWord> = (0..8).map(|_| BitWord::zeros(4)).collect();
        for b in block_transform(&v).unwrap() {
            assert_eq!(b, BitWord::zeros(4));
        }
    }

    #[test]
    fn component_bits_match_explicit_xor_forms() {
        // M=2: (a, b) = (v0 ^ v1, v1).
        for x in 0..4u8 {
            let v = [(x >> 1) & 1, x & 1];
            assert_eq!(component_bits(&v), vec![v[0] ^ v[1], v[1]]);
        }
        // M=4: a = v0^v1^v2^v3, b = v1^v3, c = v2^v3, d = v3.
        for x in 0..16u8 {
            let v = [(x >> 3) & 1, (x >> 2) & 1, (x >> 1) & 1, x & 1];
            let expected = vec![
                v[0] ^ v[1] ^ v[2] ^ v[3],
                v[1] ^ v[3],
                v[2] ^ v[3],
                v[3],
            ];
            assert_eq!(component_bits(&v), expected, "tuple {v:?}");
        }
        // M=8: each output XORs the blocks selected by the kernel power.
        for x in 0..256u32 {
            let v: Vec<u8> = (0..8).map(|j| ((x >> (7 - j)) & 1) as u8).collect();
            let expected = vec![
                v[0] ^ v[1] ^ v[2] ^ v[3] ^ v[4] ^ v[5] ^ v[6] ^ v[7],
                v[1] ^ v[3] ^ v[5] ^ v[7],
                v[2] ^ v[3] ^ v[6] ^ v[7],
                v[3] ^ v[7],
                v[4] ^ v[5] ^ v[6] ^ v[7],
                v[5] ^ v[7],
                v[6] ^ v[7],
                v[7],
            ];
            assert_eq!(component_bits(&v), expected, "tuple {v:?}");
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inverse_block_transform(&[0, 1]), vec![1, 1]);
        assert_eq!(inverse_block_transform(&[0, 0, 0, 0]), vec![0, 0, 0, 0]);
        assert_eq!(inverse_block_transform(&[1, 0, 0, 0]), vec![1, 0, 0, 0]);
    }

    #[test]
    fn transform_round_trip_exhaustive() {
        for m in [2usize, 4, 8] {
            for x in 0..1u32 << m {
                let v: Vec<u8> = (0..m).map(|j| ((x >> (m - 1 - j)) & 1) as u8).collect();
                assert_eq!(inverse_block_transform(&component_bits(&v)), v);
            }
        }
    }

    /// Component-wise encoding of the transformed blocks reproduces the
    /// full codeword.
    #[test]
    fn decomposition_identity_spot_check() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for &(code_len, m) in &[(8usize, 2usize), (16, 4), (32, 8), (64, 2)] {
            let layout = build_layout(code_len, m).unwrap();
            for _ in 0..25 {
                let u = random_word(code_len, &mut rng);
                let blocks = layout.split_v_blocks(&u).unwrap();
                let words = block_transform(&blocks).unwrap();
                let mut concat = Vec::with_capacity(code_len);
                for w in &words {
                    concat.extend_from_slice(polar_encode(w).unwrap().as_slice());
                }
                assert_eq!(concat, polar_encode(&u).unwrap().as_slice());
            }
        }
    }

    proptest! {
        #[test]
        fn encode_matches_oracle_prop(n in 0usize..=6, seed in any::<u64>()) {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let u = random_word(1 << n, &mut rng);
            let g = generator_matrix(n).unwrap();
            let encoded = polar_encode(&u).unwrap();
            prop_assert_eq!(encoded.as_slice(), &g.mul_vec(u.as_slice()).unwrap()[..]);
        }

        #[test]
        fn transform_round_trip_prop(bits in proptest::collection::vec(0u8..=1, 8)) {
            prop_assert_eq!(inverse_block_transform(&component_bits(&bits)), bits);
        }
    }
}

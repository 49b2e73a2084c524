//! Fingerprinting-state arithmetic.
//!
//! A d-bit string `x` is encoded as the state `(1/sqrt d) sum_j (-1)^{x_j} |j>`.
//! All overlaps the protocol needs reduce to Hamming distances, so the
//! functions here work on bit strings and return exact rationals. The
//! `dense_*` functions build the actual amplitude vectors and serve as an
//! independent oracle for small dimensions.

use num_rational::Ratio;
use rand::Rng;

use crate::{Error, Result};

/// Largest dimension for which dense amplitude vectors are built.
pub const DENSE_MAX_DIM: usize = 1 << 20;
/// Largest hidden-block length for the brute-force verification vector.
pub const DENSE_MAX_HIDDEN: usize = 20;

/// Fixed-length bit string, packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl std::fmt::Debug for BitString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitString(")?;
        for i in 0..self.len.min(128) {
            write!(f, "{}", self.get(i) as u8)?;
        }
        if self.len > 128 {
            write!(f, "...[{}]", self.len)?;
        }
        write!(f, ")")
    }
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = Self::zeros(len);
        for i in 0..len {
            s.set(i, true);
        }
        s
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % 64 == 0 {
                words.push(0);
            }
            if b {
                words[len / 64] |= 1 << (len % 64);
            }
            len += 1;
        }
        BitString { words, len }
    }

    /// Parses a string of `'0'`/`'1'` characters.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::param(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::from_bits)
    }

    /// Builds the `len`-bit string whose bit `j` is bit `j` of `value`.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        Self::from_bits((0..len).map(|j| value >> j & 1 == 1))
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut words: Vec<u64> = (0..len.div_ceil(64)).map(|_| rng.random()).collect();
        if len % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        BitString { words, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        if value {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn complement(&self) -> Self {
        Self::from_bits(self.iter().map(|b| !b))
    }

    pub fn hamming_distance(&self, other: &BitString) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::dim(format!(
                "bit strings of length {} and {}",
                self.len, other.len
            )));
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Substring at the positions of `indices`, in increasing index order.
    pub fn restrict(&self, indices: &IndexSet) -> Result<BitString> {
        if indices.dim() != self.len {
            return Err(Error::dim(format!(
                "index set over [0, {}) applied to a string of length {}",
                indices.dim(),
                self.len
            )));
        }
        Ok(Self::from_bits(indices.iter().map(|i| self.get(i))))
    }
}

impl std::fmt::Display for BitString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Strictly increasing set of indices in `[0, d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexSet {
    indices: Vec<usize>,
    dim: usize,
}

impl IndexSet {
    pub fn new(indices: Vec<usize>, dim: usize) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("index set must be strictly increasing"));
        }
        if indices.last().is_some_and(|&i| i >= dim) {
            return Err(Error::param(format!(
                "index set element out of range [0, {dim})"
            )));
        }
        Ok(IndexSet { indices, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// `[0, d)` minus this set, increasing.
    pub fn complement(&self) -> IndexSet {
        let mut out = Vec::with_capacity(self.dim - self.indices.len());
        let mut next = self.indices.iter().peekable();
        for i in 0..self.dim {
            if next.peek() == Some(&&i) {
                next.next();
            } else {
                out.push(i);
            }
        }
        IndexSet {
            indices: out,
            dim: self.dim,
        }
    }
}

/// Block of hidden positions used to sign symbol `s`:
/// `{s(d-l), ..., (s+1)(d-l)-1}` where `l` is the number of revealed positions.
pub fn index_set(s: usize, d: usize, revealed: usize) -> Result<IndexSet> {
    let hidden = hidden_len(d, revealed)?;
    let alphabet = d / hidden;
    if s >= alphabet {
        return Err(Error::param(format!(
            "symbol {s} outside alphabet of size {alphabet}"
        )));
    }
    Ok(IndexSet {
        indices: (s * hidden..(s + 1) * hidden).collect(),
        dim: d,
    })
}

fn hidden_len(d: usize, revealed: usize) -> Result<usize> {
    if revealed >= d {
        return Err(Error::param(format!(
            "revealed length {revealed} must be smaller than d = {d}"
        )));
    }
    let hidden = d - revealed;
    if d % hidden != 0 {
        return Err(Error::param(format!(
            "hidden block length {hidden} does not divide d = {d}; S must be an integer dividing d"
        )));
    }
    Ok(hidden)
}

/// `<mu(y)|mu(x)> = 1 - 2|x xor y|/d`, as an exact rational.
pub fn inner_product_exact(x: &BitString, y: &BitString) -> Result<Ratio<i128>> {
    let dist = x.hamming_distance(y)? as i128;
    let d = x.len() as i128;
    if d == 0 {
        return Err(Error::dim("empty bit strings"));
    }
    Ok(Ratio::new(d - 2 * dist, d))
}

pub fn inner_product(x: &BitString, y: &BitString) -> Result<f64> {
    inner_product_exact(x, y).map(|r| ratio_i128_to_f64(&r))
}

/// Probability that projecting `|mu(k)>` onto the verification vector built
/// from `(hidden, revealed)` succeeds: `(l - 2W)^2 / (l d)` where `W` is the
/// Hamming distance between `revealed` and `k` outside `hidden`.
pub fn accept_probability_exact(
    key: &BitString,
    hidden: &IndexSet,
    revealed: &BitString,
) -> Result<Ratio<u128>> {
    let d = key.len();
    if hidden.dim() != d {
        return Err(Error::dim(format!(
            "index set over [0, {}) for a key of length {d}",
            hidden.dim()
        )));
    }
    let ell = d - hidden.len();
    if revealed.len() != ell {
        return Err(Error::dim(format!(
            "revealed substring has length {}, expected {ell}",
            revealed.len()
        )));
    }
    let w = key
        .restrict(&hidden.complement())?
        .hamming_distance(revealed)?;
    accept_probability_from_distance(ell, d, w)
}

pub fn accept_probability(key: &BitString, hidden: &IndexSet, revealed: &BitString) -> Result<f64> {
    accept_probability_exact(key, hidden, revealed).map(|r| ratio_u128_to_f64(&r))
}

/// `(l - 2w)^2 / (l d)` for `w` mismatches among `l` revealed positions.
pub fn accept_probability_from_distance(
    revealed: usize,
    d: usize,
    w: usize,
) -> Result<Ratio<u128>> {
    if revealed == 0 || revealed > d {
        return Err(Error::dim(format!(
            "revealed length {revealed} invalid for d = {d}"
        )));
    }
    if w > revealed {
        return Err(Error::dim(format!(
            "distance {w} exceeds revealed length {revealed}"
        )));
    }
    let overlap = (revealed as i128 - 2 * w as i128).unsigned_abs();
    Ok(Ratio::new(overlap * overlap, revealed as u128 * d as u128))
}

pub(crate) fn ratio_u128_to_f64(r: &Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn ratio_i128_to_f64(r: &Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Real amplitude vector of a pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector(pub Vec<f64>);

impl AmplitudeVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum()
    }

    pub fn dot(&self, other: &AmplitudeVector) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::dim(format!(
                "vectors of length {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }
}

/// Dense fingerprinting state of `x`.
pub fn dense_mu(x: &BitString) -> Result<AmplitudeVector> {
    let d = x.len();
    if d == 0 {
        return Err(Error::dim("empty bit string"));
    }
    if d > DENSE_MAX_DIM {
        return Err(Error::Resource(format!(
            "dense vector of dimension {d} exceeds {DENSE_MAX_DIM}"
        )));
    }
    let amp = 1.0 / (d as f64).sqrt();
    Ok(AmplitudeVector(
        x.iter().map(|b| if b { -amp } else { amp }).collect(),
    ))
}

/// Verification vector computed by brute force: the normalized sum of the
/// fingerprinting states of all `k` that agree with `revealed` outside `hidden`.
pub fn dense_psi(hidden: &IndexSet, revealed: &BitString, d: usize) -> Result<AmplitudeVector> {
    check_psi_dims(hidden, revealed, d)?;
    let h = hidden.len();
    if h > DENSE_MAX_HIDDEN || d > DENSE_MAX_DIM {
        return Err(Error::Resource(format!(
            "brute-force sum over 2^{h} strings of dimension {d} exceeds oracle limits"
        )));
    }
    let open = hidden.complement();
    let mut key = BitString::zeros(d);
    for (pos, bit) in open.iter().zip(revealed.iter()) {
        key.set(pos, bit);
    }
    let mut acc = vec![0.0; d];
    for a in 0..1u64 << h {
        for (j, pos) in hidden.iter().enumerate() {
            key.set(pos, a >> j & 1 == 1);
        }
        for (slot, amp) in acc.iter_mut().zip(dense_mu(&key)?.0) {
            *slot += amp;
        }
    }
    let norm = acc.iter().map(|a| a * a).sum::<f64>().sqrt();
    Ok(AmplitudeVector(acc.into_iter().map(|a| a / norm).collect()))
}

/// Verification vector from its closed form: `(1/sqrt l) sum_j (-1)^{revealed_j}`
/// on the j-th position outside `hidden`, zero on `hidden`.
pub fn psi_closed_form(
    hidden: &IndexSet,
    revealed: &BitString,
    d: usize,
) -> Result<AmplitudeVector> {
    check_psi_dims(hidden, revealed, d)?;
    if d > DENSE_MAX_DIM {
        return Err(Error::Resource(format!(
            "dense vector of dimension {d} exceeds {DENSE_MAX_DIM}"
        )));
    }
    let amp = 1.0 / (revealed.len() as f64).sqrt();
    let mut out = vec![0.0; d];
    for (pos, bit) in hidden.complement().iter().zip(revealed.iter()) {
        out[pos] = if bit { -amp } else { amp };
    }
    Ok(AmplitudeVector(out))
}

fn check_psi_dims(hidden: &IndexSet, revealed: &BitString, d: usize) -> Result<()> {
    if hidden.dim() != d {
        return Err(Error::dim(format!(
            "index set over [0, {}) for d = {d}",
            hidden.dim()
        )));
    }
    if revealed.len() + hidden.len() != d {
        return Err(Error::dim(format!(
            "revealed length {} plus hidden length {} differs from d = {d}",
            revealed.len(),
            hidden.len()
        )));
    }
    if revealed.is_empty() {
        return Err(Error::dim("nothing revealed"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{
        any, prop_assert, prop_assert_eq, prop_oneof, proptest, Just, Strategy,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bits(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    #[test]
    fn inner_product_cases() {
        let x = bits("0110");
        assert_eq!(inner_product(&x, &x).unwrap(), 1.0);
        assert_eq!(inner_product(&x, &x.complement()).unwrap(), -1.0);
        assert_eq!(inner_product(&bits("0000"), &bits("0100")).unwrap(), 0.5);
        assert!(matches!(
            inner_product(&bits("000"), &bits("0000")),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn index_set_blocks() {
        assert_eq!(index_set(0, 8, 6).unwrap().as_slice(), &[0, 1]);
        assert_eq!(index_set(3, 8, 6).unwrap().as_slice(), &[6, 7]);
        assert_eq!(index_set(1, 8, 4).unwrap().as_slice(), &[4, 5, 6, 7]);
        assert_eq!(
            index_set(3, 8, 6).unwrap().complement().as_slice(),
            &[0, 1, 2, 3, 4, 5]
        );
        assert!(matches!(index_set(0, 8, 5), Err(Error::Parameter(_))));
        assert!(matches!(index_set(4, 8, 6), Err(Error::Parameter(_))));
    }

    #[test]
    fn index_sets_partition() {
        for (d, ell) in [(8, 6), (8, 4), (12, 9), (30, 25), (1024, 768)] {
            let alphabet = d / (d - ell);
            let mut seen = vec![false; d];
            for s in 0..alphabet {
                let set = index_set(s, d, ell).unwrap();
                assert_eq!(set.len(), d - ell);
                for i in set.iter() {
                    assert!(!seen[i]);
                    seen[i] = true;
                }
            }
            assert!(seen.iter().all(|&b| b));
            assert_eq!(
                index_set(alphabet - 1, d, ell)
                    .unwrap()
                    .complement()
                    .as_slice(),
                (0..ell).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn accept_probability_cases() {
        let key = bits("10110010");
        let hidden = index_set(0, 8, 6).unwrap();
        let honest = key.restrict(&hidden.complement()).unwrap();
        assert_eq!(
            accept_probability_exact(&key, &hidden, &honest).unwrap(),
            Ratio::new(3, 4)
        );
        let mut one_off = honest.clone();
        one_off.flip(2);
        assert_eq!(
            accept_probability_exact(&key, &hidden, &one_off).unwrap(),
            Ratio::new(1, 3)
        );
        let mut half = honest.clone();
        for i in 0..3 {
            half.flip(i);
        }
        assert_eq!(accept_probability(&key, &hidden, &half).unwrap(), 0.0);
        assert!(matches!(
            accept_probability(&key, &hidden, &bits("00000")),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn dense_examples() {
        assert_eq!(dense_mu(&bits("0000")).unwrap().0, vec![0.5; 4]);
        assert_eq!(dense_mu(&bits("1111")).unwrap().0, vec![-0.5; 4]);
        let hidden = IndexSet::new(vec![2, 3], 4).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let psi = dense_psi(&hidden, &bits("00"), 4).unwrap();
        for (a, b) in psi.0.iter().zip([r, r, 0.0, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let psi = dense_psi(&hidden, &bits("01"), 4).unwrap();
        for (a, b) in psi.0.iter().zip([r, -r, 0.0, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_limits() {
        let hidden = IndexSet::new((0..21).collect(), 22).unwrap();
        assert!(matches!(
            dense_psi(&hidden, &bits("0"), 22),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn honest_overlap_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let key = BitString::random(8, &mut rng);
            let s = rng.random_range(0..4);
            let hidden = index_set(s, 8, 6).unwrap();
            let psi = dense_psi(&hidden, &key.restrict(&hidden.complement()).unwrap(), 8).unwrap();
            let overlap = dense_mu(&key).unwrap().dot(&psi).unwrap();
            assert!((overlap * overlap - 0.75).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_inner_product_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let x = BitString::random(16, &mut rng);
            let y = BitString::random(16, &mut rng);
            let dense = dense_mu(&x).unwrap().dot(&dense_mu(&y).unwrap()).unwrap();
            assert!((dense - inner_product(&x, &y).unwrap()).abs() < 1e-12);
        }
    }

    fn arb_bits(len: usize) -> impl Strategy<Value = BitString> {
        proptest::collection::vec(any::<bool>(), len).prop_map(BitString::from_bits)
    }

    proptest! {
        #[test]
        fn inner_product_symmetric(x in arb_bits(37), y in arb_bits(37)) {
            prop_assert_eq!(inner_product(&x, &y).unwrap(), inner_product(&y, &x).unwrap());
            prop_assert_eq!(inner_product(&x, &x).unwrap(), 1.0);
            prop_assert_eq!(inner_product(&x, &x.complement()).unwrap(), -1.0);
        }

        #[test]
        fn accept_probability_matches_oracle(
            (d, s, key, revealed_seed) in prop_oneof![Just(4usize), Just(8), Just(16)]
                .prop_flat_map(|d| (Just(d), 0..2usize, arb_bits(d), any::<u64>()))
        ) {
            // S = 2 everywhere keeps the brute-force sum at 2^{d/2} terms.
            let ell = d / 2;
            let hidden = index_set(s, d, ell).unwrap();
            let revealed = BitString::from_u64(revealed_seed, ell);
            let p = accept_probability(&key, &hidden, &revealed).unwrap();
            prop_assert!((0.0..=ell as f64 / d as f64).contains(&p));
            let psi = dense_psi(&hidden, &revealed, d).unwrap();
            let overlap = dense_mu(&key).unwrap().dot(&psi).unwrap();
            prop_assert!((overlap * overlap - p).abs() < 1e-12);
        }

        #[test]
        fn restrict_keeps_order(key in arb_bits(20), mask in any::<u32>()) {
            let idx: Vec<usize> = (0..20).filter(|i| mask >> i & 1 == 1).collect();
            let set = IndexSet::new(idx.clone(), 20).unwrap();
            let sub = key.restrict(&set).unwrap();
            prop_assert_eq!(sub.len(), idx.len());
            for (j, &i) in idx.iter().enumerate() {
                prop_assert_eq!(sub.get(j), key.get(i));
            }
        }
    }
}

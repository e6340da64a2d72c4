//! Packed stochastic bitstreams and the combinational gates that operate on them.
//!
//! A [`Bitstream`] encodes a number in `[0, 1]` as the density of ones in a
//! fixed-length bit sequence. Bits are packed little-endian into `u64` words;
//! bit `i` lives in word `i / 64` at position `i % 64`. Storage past `len` is
//! always zero, so word-level popcounts never need a correction.
//!
//! Gate semantics are bit-serial: bit `i` of a gate output depends only on bit
//! `i` of each input. The word-parallel implementations here are bit-identical
//! to that definition.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// A real number constrained to `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::invalid(format!("probability {value} outside [0, 1]")))
        }
    }

    /// Clamp an arbitrary real into `[0, 1]`. NaN maps to 0.
    pub fn saturating(value: f64) -> Self {
        if value.is_nan() {
            Probability(0.0)
        } else {
            Probability(value.clamp(0.0, 1.0))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Probability::new(value)
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Fixed-length packed bit sequence. Length is always at least one.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bitstream {
    words: Vec<u64>,
    len: usize,
}

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// Mask of valid bits in the final word.
#[inline]
fn tail_mask(len: usize) -> u64 {
    match len % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

fn check_len(len: usize) -> Result<()> {
    if len == 0 {
        Err(Error::invalid("bitstream length must be at least 1"))
    } else {
        Ok(())
    }
}

impl Bitstream {
    pub fn zeros(len: usize) -> Result<Self> {
        check_len(len)?;
        Ok(Bitstream {
            words: vec![0; words_for(len)],
            len,
        })
    }

    pub fn ones(len: usize) -> Result<Self> {
        check_len(len)?;
        let mut words = vec![u64::MAX; words_for(len)];
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        Ok(Bitstream { words, len })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        Self::from_fn(bits.len(), |i| bits[i])
    }

    /// Build a stream by evaluating `f` for bit indices `0..len` in order.
    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Result<Self> {
        check_len(len)?;
        let mut words = vec![0u64; words_for(len)];
        for i in 0..len {
            if f(i) {
                words[i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
            }
        }
        Ok(Bitstream { words, len })
    }

    /// Wrap pre-packed words. Bits beyond `len` are cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Result<Self> {
        check_len(len)?;
        if words.len() != words_for(len) {
            return Err(Error::invalid(format!(
                "{} words cannot hold exactly {len} bits",
                words.len()
            )));
        }
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        Ok(Bitstream { words, len })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; a bitstream holds at least one bit.
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    #[inline]
    pub fn popcount(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Fraction of ones, `popcount / len`.
    #[inline]
    pub fn estimate(&self) -> Probability {
        Probability(self.popcount() as f64 / self.len as f64)
    }

    /// First `k` bits as a new stream.
    pub fn prefix(&self, k: usize) -> Result<Self> {
        if k > self.len {
            return Err(Error::invalid(format!(
                "prefix of {k} bits exceeds stream length {}",
                self.len
            )));
        }
        check_len(k)?;
        Bitstream::from_words(self.words[..words_for(k)].to_vec(), k)
    }

    /// Bitwise NOT; the density becomes `1 - p`.
    pub fn complement(&self) -> Self {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(self.len);
        }
        Bitstream {
            words,
            len: self.len,
        }
    }

    fn zip_words(&self, other: &Bitstream, op: impl Fn(u64, u64) -> u64) -> Result<Self> {
        same_len(self, other)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(Bitstream {
            words,
            len: self.len,
        })
    }
}

fn same_len(a: &Bitstream, b: &Bitstream) -> Result<()> {
    if a.len == b.len {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "bitstream length mismatch: {} vs {}",
            a.len, b.len
        )))
    }
}

impl fmt::Debug for Bitstream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 64 {
            write!(f, "Bitstream(\"{self}\")")
        } else {
            write!(
                f,
                "Bitstream {{ len: {}, popcount: {} }}",
                self.len,
                self.popcount()
            )
        }
    }
}

/// Bits in index order, e.g. `011`.
impl fmt::Display for Bitstream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.iter() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bitstream {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(format!("'{other}' is not a bit"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Bitstream::from_bits(&bits)
    }
}

/// Decoded value of a stream: `popcount / len`.
pub fn estimate(bs: &Bitstream) -> Probability {
    bs.estimate()
}

/// Stochastic multiplication. For independent inputs the output density
/// approximates `p1 * p2`.
pub fn and_gate(a: &Bitstream, b: &Bitstream) -> Result<Bitstream> {
    a.zip_words(b, |x, y| x & y)
}

/// Scaled addition. Bit `i` of the output is `a[i]` when `sel[i] = 1` and
/// `b[i]` otherwise, so for independent inputs the density approximates
/// `pa * ps + pb * (1 - ps)`.
pub fn mux_gate(a: &Bitstream, b: &Bitstream, sel: &Bitstream) -> Result<Bitstream> {
    same_len(a, b)?;
    same_len(a, sel)?;
    let words = a
        .words
        .iter()
        .zip(&b.words)
        .zip(&sel.words)
        .map(|((&x, &y), &s)| (x & s) | (y & !s))
        .collect();
    Ok(Bitstream { words, len: a.len })
}

/// Pearson correlation of two streams viewed as 0/1 sequences.
///
/// Returns 0 when either stream is constant (all zeros or all ones), where
/// the coefficient is otherwise undefined.
pub fn correlation(a: &Bitstream, b: &Bitstream) -> Result<f64> {
    same_len(a, b)?;
    if a.len < 2 {
        return Err(Error::invalid("correlation needs at least 2 bits"));
    }
    let n = a.len as f64;
    let pa = a.popcount() as f64 / n;
    let pb = b.popcount() as f64 / n;
    let pab = a.zip_words(b, |x, y| x & y)?.popcount() as f64 / n;
    // written so that swapping a and b gives a bit-identical result
    let var = (pa * (1.0 - pa)) * (pb * (1.0 - pb));
    if var <= 0.0 {
        return Ok(0.0);
    }
    Ok(((pab - pa * pb) / var.sqrt()).clamp(-1.0, 1.0))
}

/// Arithmetic mean of `|target - measured|`.
pub fn mean_abs_error(pairs: &[(Probability, Probability)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::invalid("mean_abs_error needs at least one pair"));
    }
    let total: f64 = pairs
        .iter()
        .map(|(t, m)| (t.value() - m.value()).abs())
        .sum();
    Ok(total / pairs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bernoulli(p: f64, len: usize, seed: u64) -> Bitstream {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Bitstream::from_fn(len, |_| rng.random::<f64>() < p).unwrap()
    }

    fn bs(s: &str) -> Bitstream {
        s.parse().unwrap()
    }

    #[test]
    fn estimate_of_011() {
        assert!((bs("011").estimate().value() - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn saturated_streams() {
        assert_eq!(Bitstream::ones(64).unwrap().estimate().value(), 1.0);
        assert_eq!(Bitstream::zeros(256).unwrap().estimate().value(), 0.0);
        // tail padding must not be counted
        assert_eq!(Bitstream::ones(70).unwrap().popcount(), 70);
        assert_eq!(Bitstream::ones(70).unwrap().complement().popcount(), 0);
    }

    #[test]
    fn zero_length_rejected() {
        assert!(matches!(Bitstream::zeros(0), Err(Error::InvalidInput(_))));
        assert!(Bitstream::from_bits(&[]).is_err());
        assert!("".parse::<Bitstream>().is_err());
    }

    #[test]
    fn from_words_masks_padding() {
        let b = Bitstream::from_words(vec![u64::MAX], 3).unwrap();
        assert_eq!(b.popcount(), 3);
        assert!(Bitstream::from_words(vec![0, 0], 3).is_err());
    }

    #[test]
    fn and_examples() {
        assert_eq!(and_gate(&bs("1111"), &bs("0000")).unwrap(), bs("0000"));
        let out = and_gate(&bs("1010"), &bs("1100")).unwrap();
        assert_eq!(out, bs("1000"));
        assert_eq!(out.estimate().value(), 0.25);
        assert!(matches!(
            and_gate(&bs("10"), &bs("100")),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn and_independent_half_streams() {
        // sigma = sqrt(0.25 * 0.75 / 4096) ~ 0.0068; 3 sigma ~ 0.02
        let a = bernoulli(0.5, 4096, 1);
        let b = bernoulli(0.5, 4096, 2);
        let p = and_gate(&a, &b).unwrap().estimate().value();
        assert!((p - 0.25).abs() <= 0.02, "p = {p}");
    }

    #[test]
    fn shuffled_complement_multiplies_to_zero() {
        // A stream and its one-bit shift are maximally correlated.
        let sb1 = bs("10101010");
        let sb2 = bs("01010101");
        assert_eq!(and_gate(&sb1, &sb2).unwrap().estimate().value(), 0.0);
    }

    #[test]
    fn mux_examples() {
        let a = bs("10110");
        let b = bs("01101");
        assert_eq!(mux_gate(&a, &b, &Bitstream::ones(5).unwrap()).unwrap(), a);
        assert_eq!(mux_gate(&a, &b, &Bitstream::zeros(5).unwrap()).unwrap(), b);
        assert!(mux_gate(&a, &b, &bs("1")).is_err());
    }

    #[test]
    fn mux_scaled_addition() {
        // 0.8 * 0.5 + 0.2 * 0.5 = 0.5; sigma at p = 0.5, N = 4096 is ~0.0078
        let a = bernoulli(0.8, 4096, 10);
        let b = bernoulli(0.2, 4096, 11);
        let s = bernoulli(0.5, 4096, 12);
        let p = mux_gate(&a, &b, &s).unwrap().estimate().value();
        assert!((p - 0.5).abs() <= 0.024, "p = {p}");
    }

    #[test]
    fn correlation_examples() {
        let a = bs("1010101011");
        assert!((correlation(&a, &a).unwrap() - 1.0).abs() < 1e-12);
        assert!((correlation(&a, &a.complement()).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(correlation(&a, &Bitstream::ones(10).unwrap()).unwrap(), 0.0);
        assert!(correlation(&bs("1"), &bs("1")).is_err());
        assert!(correlation(&bs("10"), &bs("101")).is_err());
    }

    #[test]
    fn mean_abs_error_examples() {
        let p = |x| Probability::new(x).unwrap();
        assert_eq!(mean_abs_error(&[(p(0.5), p(0.5))]).unwrap(), 0.0);
        let e = mean_abs_error(&[(p(0.2), p(0.25)), (p(0.8), p(0.75))]).unwrap();
        assert!((e - 0.05).abs() < 1e-12);
        assert!(mean_abs_error(&[]).is_err());
    }

    #[test]
    fn probability_range() {
        assert!(Probability::new(1.5).is_err());
        assert!(Probability::new(-0.1).is_err());
        assert!(Probability::new(f64::NAN).is_err());
        assert_eq!(Probability::saturating(2.0).value(), 1.0);
    }

    fn arb_pair() -> impl Strategy<Value = (Vec<bool>, Vec<bool>, Vec<bool>)> {
        (1usize..300).prop_flat_map(|n| {
            (
                prop::collection::vec(any::<bool>(), n),
                prop::collection::vec(any::<bool>(), n),
                prop::collection::vec(any::<bool>(), n),
            )
        })
    }

    proptest! {
        #[test]
        fn packed_gates_match_bit_serial((a, b, s) in arb_pair()) {
            let (pa, pb, ps) = (
                Bitstream::from_bits(&a).unwrap(),
                Bitstream::from_bits(&b).unwrap(),
                Bitstream::from_bits(&s).unwrap(),
            );
            let and = and_gate(&pa, &pb).unwrap();
            let mux = mux_gate(&pa, &pb, &ps).unwrap();
            for i in 0..a.len() {
                prop_assert_eq!(and.get(i), a[i] && b[i]);
                prop_assert_eq!(mux.get(i), if s[i] { a[i] } else { b[i] });
            }
            prop_assert!(and.estimate() <= pa.estimate().min_with(pb.estimate()));
            let via_sel = and_gate(&pa, &ps).unwrap().popcount()
                + and_gate(&pb, &ps.complement()).unwrap().popcount();
            prop_assert_eq!(mux.popcount(), via_sel);
            let c = pa.complement().estimate().value();
            prop_assert!((c - (1.0 - pa.estimate().value())).abs() < 1e-12);
        }

        #[test]
        fn correlation_symmetric_and_bounded((a, b, _s) in arb_pair()) {
            prop_assume!(a.len() >= 2);
            let (pa, pb) = (Bitstream::from_bits(&a).unwrap(), Bitstream::from_bits(&b).unwrap());
            let r = correlation(&pa, &pb).unwrap();
            prop_assert!((-1.0..=1.0).contains(&r));
            prop_assert_eq!(r, correlation(&pb, &pa).unwrap());
        }

        #[test]
        fn prefix_is_leading_bits(bits in prop::collection::vec(any::<bool>(), 1..200), k in 1usize..200) {
            let k = k.min(bits.len());
            let full = Bitstream::from_bits(&bits).unwrap();
            prop_assert_eq!(full.prefix(k).unwrap(), Bitstream::from_bits(&bits[..k]).unwrap());
        }
    }

    trait MinWith {
        fn min_with(self, other: Self) -> Self;
    }

    impl MinWith for Probability {
        fn min_with(self, other: Self) -> Self {
            if self <= other { self } else { other }
        }
    }
}

use alloc::vec::Vec;
use core::fmt;
use core::ops::Neg;
use core::str::FromStr;

use crate::{Error, Result};

/// Longest `k` for which [`enumerate_sign_vectors`] will walk the whole cube.
pub const MAX_ENUMERATION_LEN: usize = 30;

/// Longest sign vector representable (one bit per entry).
pub const MAX_LEN: usize = 64;

/// An element of `{±1}^k` packed as a bitmask.
///
/// Bit `i` set means entry `i` is `+1`; clear means `−1`. Ordering and hashing
/// follow `(len, bits)`, so vectors of one length sort in increasing bitmask order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignVector {
    len: u8,
    bits: u64,
}

#[inline]
fn mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl SignVector {
    pub fn new(len: usize, bits: u64) -> Result<Self> {
        if len == 0 || len > MAX_LEN {
            return Err(Error::contract(alloc::format!(
                "sign vector length {len} outside 1..={MAX_LEN}"
            )));
        }
        if bits & !mask(len) != 0 {
            return Err(Error::contract(alloc::format!(
                "bitmask {bits:#x} has bits beyond length {len}"
            )));
        }
        Ok(SignVector {
            len: len as u8,
            bits,
        })
    }

    /// Caller guarantees `1 <= len <= 64` and no stray bits.
    #[inline]
    pub(crate) fn from_raw(len: usize, bits: u64) -> Self {
        debug_assert!(len >= 1 && len <= MAX_LEN && bits & !mask(len) == 0);
        SignVector {
            len: len as u8,
            bits,
        }
    }

    /// The all-`+1` vector.
    pub fn ones(len: usize) -> Result<Self> {
        Self::new(len, mask(len.min(64)))
    }

    /// Builds from entries; anything positive is `+1`, anything else `−1`.
    pub fn from_signs(entries: &[i8]) -> Result<Self> {
        let mut bits = 0u64;
        for (i, &e) in entries.iter().enumerate().take(MAX_LEN) {
            if e > 0 {
                bits |= 1 << i;
            }
        }
        Self::new(entries.len(), bits)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn is_plus(&self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    /// Entry `i` as `±1.0`.
    #[inline]
    pub fn value(&self, i: usize) -> f64 {
        if self.is_plus(i) {
            1.0
        } else {
            -1.0
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.value(i)).collect()
    }

    pub fn plus_count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn hamming(&self, other: &SignVector) -> usize {
        debug_assert_eq!(self.len, other.len);
        (self.bits ^ other.bits).count_ones() as usize
    }

    /// Entries `index*len .. (index+1)*len` as their own vector.
    pub fn block(&self, index: usize, len: usize) -> SignVector {
        let shift = index * len;
        debug_assert!(shift + len <= self.len());
        SignVector::from_raw(len, (self.bits >> shift) & mask(len))
    }
}

impl Neg for SignVector {
    type Output = SignVector;

    fn neg(self) -> SignVector {
        SignVector {
            len: self.len,
            bits: !self.bits & mask(self.len()),
        }
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.is_plus(i) { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignVector({self})")
    }
}

impl FromStr for SignVector {
    type Err = Error;

    /// Accepts `+` and either ASCII `-` or U+2212 `−`, index 0 leftmost.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut bits = 0u64;
        let mut len = 0usize;
        for ch in s.chars() {
            match ch {
                '+' => {
                    if len < 64 {
                        bits |= 1 << len;
                    }
                }
                '-' | '\u{2212}' => {}
                other => {
                    return Err(Error::Parse(alloc::format!(
                        "unexpected character {other:?} in sign vector {s:?}"
                    )))
                }
            }
            len += 1;
        }
        SignVector::new(len, bits).map_err(|e| Error::Parse(alloc::format!("{e}")))
    }
}

/// Iterator over `{±1}^k` in increasing bitmask order.
#[derive(Debug, Clone)]
pub struct SignVectors {
    len: usize,
    next: u64,
    end: u64,
}

impl Iterator for SignVectors {
    type Item = SignVector;

    fn next(&mut self) -> Option<SignVector> {
        if self.next >= self.end {
            return None;
        }
        let v = SignVector::from_raw(self.len, self.next);
        self.next += 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rest = (self.end - self.next) as usize;
        (rest, Some(rest))
    }
}

impl ExactSizeIterator for SignVectors {}

/// All `2^k` sign vectors of length `k`, bitmask `0` (all `−1`) first.
pub fn enumerate_sign_vectors(k: usize) -> Result<SignVectors> {
    if k == 0 || k > MAX_ENUMERATION_LEN {
        return Err(Error::budget(
            "sign vector enumeration length",
            MAX_ENUMERATION_LEN as u64,
            k as u64,
        ));
    }
    Ok(SignVectors {
        len: k,
        next: 0,
        end: 1u64 << k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    #[test]
    fn enumerate_k1() {
        let all: Vec<_> = enumerate_sign_vectors(1).unwrap().map(|v| v.to_f64()).collect();
        assert_eq!(all, vec![vec![-1.0], vec![1.0]]);
    }

    #[test]
    fn enumerate_k2_bitmask_order() {
        let all: Vec<_> = enumerate_sign_vectors(2).unwrap().map(|v| v.to_f64()).collect();
        assert_eq!(
            all,
            vec![
                vec![-1.0, -1.0],
                vec![1.0, -1.0],
                vec![-1.0, 1.0],
                vec![1.0, 1.0]
            ]
        );
    }

    #[test]
    fn enumerate_k5_distinct() {
        let mut all: Vec<_> = enumerate_sign_vectors(5).unwrap().collect();
        assert_eq!(all.len(), 32);
        all.dedup();
        assert_eq!(all.len(), 32);
    }

    #[test]
    fn enumerate_budget() {
        assert!(matches!(
            enumerate_sign_vectors(31),
            Err(Error::Budget { limit: 30, .. })
        ));
        assert!(enumerate_sign_vectors(0).is_err());
    }

    #[test]
    fn string_form() {
        let v = SignVector::from_signs(&[1, 1, -1]).unwrap();
        assert_eq!(v.to_string(), "++-");
        assert_eq!("++\u{2212}".parse::<SignVector>().unwrap(), v);
        assert!("+x".parse::<SignVector>().is_err());
        assert!("".parse::<SignVector>().is_err());
    }

    #[test]
    fn rejects_stray_bits() {
        assert!(SignVector::new(3, 0b1000).is_err());
    }

    proptest! {
        #[test]
        fn negation_is_involution(len in 1usize..=64, raw in any::<u64>()) {
            let v = SignVector::new(len, raw & mask(len)).unwrap();
            prop_assert_eq!(-(-v), v);
            prop_assert_eq!(v.hamming(&-v), len);
            prop_assert_eq!(v.to_string().parse::<SignVector>().unwrap(), v);
        }
    }
}

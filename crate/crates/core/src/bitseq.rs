//! Packed cyclic bit sequences.

use std::fmt;

use crate::error::{Error, Result};

/// A finite binary sequence stored 64 bits per word, bit `i` at word
/// `i / 64`, position `i % 64`. Unused high bits of the last word are zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitSeq {
    len: usize,
    words: Vec<u64>,
}

impl BitSeq {
    pub fn zeros(len: usize) -> Self {
        BitSeq {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut out = BitSeq::default();
        for b in bits {
            out.push(b);
        }
        out
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = BitSeq::default();
        for (i, c) in text.trim().chars().enumerate() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                _ => return Err(Error::parse(c.to_string(), format!("invalid bit at position {i}"))),
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Bit at `i mod len`, accepting any signed index.
    #[inline]
    pub fn get_cyclic(&self, i: i64) -> bool {
        let n = self.len as i64;
        self.get(i.rem_euclid(n) as usize)
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn push(&mut self, value: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, value);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_vec(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    /// Cyclic rotation: bit `i` of the result is bit `(i + shift) mod len`.
    pub fn rotated(&self, shift: usize) -> BitSeq {
        if self.len == 0 {
            return self.clone();
        }
        Doubled::new(self).window(shift % self.len)
    }

    /// Element order reversed.
    pub fn reversed(&self) -> BitSeq {
        BitSeq::from_bits((0..self.len).rev().map(|i| self.get(i)))
    }

    pub fn xor(&self, other: &BitSeq) -> BitSeq {
        assert_eq!(self.len, other.len, "length mismatch");
        BitSeq {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
        }
    }

    pub fn xor_assign(&mut self, other: &BitSeq) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Mod-2 inner product.
    pub fn dot(&self, other: &BitSeq) -> bool {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }
}

impl fmt::Display for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSeq({self})")
    }
}

/// Two concatenated copies of a sequence plus a zero guard word, so that any
/// cyclic window of the original can be read with unaligned word loads.
pub(crate) struct Doubled {
    len: usize,
    words: Vec<u64>,
}

impl Doubled {
    pub(crate) fn new(seq: &BitSeq) -> Self {
        let n = seq.len;
        let mut words = vec![0u64; (2 * n).div_ceil(64) + 1];
        for i in 0..2 * n {
            if seq.get(i % n) {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        Doubled { len: n, words }
    }

    /// 64 bits starting at `pos` (pos < 2n).
    #[inline]
    pub(crate) fn word_at(&self, pos: usize) -> u64 {
        let (w, s) = (pos / 64, pos % 64);
        if s == 0 {
            self.words[w]
        } else {
            (self.words[w] >> s) | (self.words[w + 1] << (64 - s))
        }
    }

    /// The length-n window beginning at `shift` (shift < n).
    pub(crate) fn window(&self, shift: usize) -> BitSeq {
        let n = self.len;
        let nw = n.div_ceil(64);
        let mut words: Vec<u64> = (0..nw).map(|k| self.word_at(shift + 64 * k)).collect();
        if !n.is_multiple_of(64) {
            words[nw - 1] &= (1u64 << (n % 64)) - 1;
        }
        BitSeq { len: n, words }
    }

    /// Hamming distance between the original and its rotation by `shift`.
    pub(crate) fn rotation_distance(&self, base: &BitSeq, shift: usize) -> usize {
        let n = self.len;
        let nw = n.div_ceil(64);
        let mut dist = 0usize;
        for k in 0..nw {
            let mut w = self.word_at(shift + 64 * k) ^ base.words[k];
            if k == nw - 1 && !n.is_multiple_of(64) {
                w &= (1u64 << (n % 64)) - 1;
            }
            dist += w.count_ones() as usize;
        }
        dist
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_reads_forward() {
        let s = BitSeq::parse("1001011").unwrap();
        assert_eq!(s.rotated(1).to_string(), "0010111");
        assert_eq!(s.rotated(3).to_string(), "1011100");
        assert_eq!(s.rotated(7), s);
    }

    #[test]
    fn rotation_across_word_boundaries() {
        let bits: Vec<bool> = (0..200).map(|i| (i * 7 + i / 3) % 5 < 2).collect();
        let s = BitSeq::from_bits(bits.iter().copied());
        for shift in [0, 1, 63, 64, 65, 127, 199] {
            let r = s.rotated(shift);
            for i in 0..200 {
                assert_eq!(r.get(i), bits[(i + shift) % 200]);
            }
        }
    }

    #[test]
    fn parse_rejects_other_characters() {
        assert!(BitSeq::parse("10x1").is_err());
        assert_eq!(BitSeq::parse("  0110\n").unwrap().len(), 4);
    }

    #[test]
    fn dot_and_xor() {
        let a = BitSeq::parse("1101000").unwrap();
        let b = BitSeq::parse("1001011").unwrap();
        assert_eq!(a.xor(&b).to_string(), "0100011");
        assert!(!a.dot(&b));
        assert!(a.dot(&BitSeq::parse("1000000").unwrap()));
        assert!(!BitSeq::parse("11").unwrap().dot(&BitSeq::parse("11").unwrap()));
    }
}

//! Fixed-length bitstrings used as measurement outcomes and partitions.
//!
//! Character `i` of the textual form is bit `i`, i.e. node `i` of the graph,
//! so `"01"` is the basis state with node 0 in set 0 and node 1 in set 1
//! (basis index 2).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring {
    len: usize,
    words: Vec<u64>,
}

impl Bitstring {
    pub fn zeros(len: usize) -> Self {
        Bitstring {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// Bits of a computational-basis index, node 0 least significant.
    pub fn from_index(index: u64, len: usize) -> Self {
        assert!(len <= 64, "basis index only addresses 64 bits");
        let mut b = Bitstring::zeros(len);
        if len > 0 {
            let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
            b.words[0] = index & mask;
        }
        b
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut b = Bitstring::zeros(bits.len());
        for (i, &v) in bits.iter().enumerate() {
            b.set(i, v);
        }
        b
    }

    /// Basis index for strings of at most 64 bits.
    pub fn to_index(&self) -> Option<u64> {
        match self.len {
            0 => Some(0),
            1..=64 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        let bit = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let v = self.get(i);
        self.set(i, !v);
    }

    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.clear_tail();
        out
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bitstring({self})")
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut b = Bitstring::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => b.set(i, true),
                other => {
                    return Err(Error::parse(
                        "bitstring",
                        format!("unexpected character {other:?} at position {i}"),
                    ))
                }
            }
        }
        Ok(b)
    }
}

impl Serialize for Bitstring {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bitstring {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn index_and_text_agree_on_bit_order() {
        let b = Bitstring::from_index(2, 2);
        assert_eq!(b.to_string(), "01");
        assert_eq!("0011".parse::<Bitstring>().unwrap().to_index(), Some(12));
    }

    #[test]
    fn complement_keeps_length() {
        let b: Bitstring = "0110100".parse().unwrap();
        assert_eq!(b.complement().to_string(), "1001011");
        assert_eq!(b.complement().complement(), b);
    }

    #[test]
    fn long_strings_do_not_have_an_index() {
        let mut b = Bitstring::zeros(130);
        b.set(129, true);
        assert!(b.get(129));
        assert_eq!(b.count_ones(), 1);
        assert_eq!(b.to_index(), None);
    }

    #[test]
    fn rejects_non_binary_text() {
        assert!("01x".parse::<Bitstring>().is_err());
    }

    proptest! {
        #[test]
        fn text_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..200)) {
            let b = Bitstring::from_bools(&bits);
            let back: Bitstring = b.to_string().parse().unwrap();
            prop_assert_eq!(back, b);
        }
    }
}

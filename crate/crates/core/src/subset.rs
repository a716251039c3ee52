//! Fixed-width bitmask subsets of a finite ground set `{0, 1, ..., n-1}`.

use crate::error::{Error, Result};
use std::fmt;

/// Largest supported ground-set size.
pub const MAX_GROUND_SIZE: usize = 512;

const WORDS: usize = MAX_GROUND_SIZE / 64;

/// A subset of `{0, ..., n-1}` stored as a fixed-width bitmask.
///
/// Ordering compares the bitmask as one big unsigned integer, which is the
/// lexicographic tie-break used by the exact minimizers.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subset {
    words: [u64; WORDS],
    n: u32,
}

impl Subset {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_GROUND_SIZE, "ground set too large: {n}");
        Subset {
            words: [0; WORDS],
            n: n as u32,
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Subset::empty(n);
        for w in 0..WORDS {
            let lo = w * 64;
            if n > lo {
                let bits = (n - lo).min(64);
                s.words[w] = if bits == 64 {
                    u64::MAX
                } else {
                    (1u64 << bits) - 1
                };
            }
        }
        s
    }

    pub fn singleton(n: usize, index: usize) -> Self {
        let mut s = Subset::empty(n);
        s.insert(index);
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(n: usize, indices: I) -> Self {
        let mut s = Subset::empty(n);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// Builds a subset from the low `n` bits of `mask` (requires `n <= 64`).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 64, "from_mask requires n <= 64");
        assert!(
            n == 64 || mask < (1u64 << n),
            "mask has bits beyond the ground set"
        );
        let mut s = Subset::empty(n);
        s.words[0] = mask;
        s
    }

    /// The low word of the bitmask (requires `n <= 64`).
    pub fn as_mask(&self) -> u64 {
        assert!(self.n <= 64, "as_mask requires n <= 64");
        self.words[0]
    }

    pub fn ground_size(&self) -> usize {
        self.n as usize
    }

    pub fn insert(&mut self, index: usize) {
        assert!(index < self.n as usize, "index {index} out of range");
        self.words[index / 64] |= 1u64 << (index % 64);
    }

    pub fn remove(&mut self, index: usize) {
        assert!(index < self.n as usize, "index {index} out of range");
        self.words[index / 64] &= !(1u64 << (index % 64));
    }

    pub fn contains(&self, index: usize) -> bool {
        index < self.n as usize && self.words[index / 64] >> (index % 64) & 1 == 1
    }

    /// Copy of `self` with `index` added.
    pub fn with(&self, index: usize) -> Self {
        let mut s = *self;
        s.insert(index);
        s
    }

    /// Copy of `self` with `index` removed.
    pub fn without(&self, index: usize) -> Self {
        let mut s = *self;
        s.remove(index);
        s
    }

    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let mut s = *self;
        for w in 0..WORDS {
            s.words[w] |= other.words[w];
        }
        s
    }

    pub fn intersect(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let mut s = *self;
        for w in 0..WORDS {
            s.words[w] &= other.words[w];
        }
        s
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn cardinality(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..WORDS).flat_map(move |w| {
            let mut bits = self.words[w];
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(w * 64 + b)
                }
            })
        })
    }

    pub fn min_index(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn max_index(&self) -> Option<usize> {
        for w in (0..WORDS).rev() {
            if self.words[w] != 0 {
                return Some(w * 64 + 63 - self.words[w].leading_zeros() as usize);
            }
        }
        None
    }

    /// The bitmask as a `0x`-prefixed hexadecimal number.
    pub fn to_hex(&self) -> String {
        let top = (0..WORDS).rev().find(|&w| self.words[w] != 0);
        match top {
            None => "0x0".to_string(),
            Some(t) => {
                let mut s = format!("0x{:x}", self.words[t]);
                for w in (0..t).rev() {
                    s.push_str(&format!("{:016x}", self.words[w]));
                }
                s
            }
        }
    }

    /// Parses the `to_hex` representation back into a subset of `{0..n-1}`.
    pub fn from_hex(n: usize, text: &str) -> Result<Self> {
        let digits = text
            .strip_prefix("0x")
            .ok_or_else(|| Error::InvalidParameter(format!("bad bitmask literal: {text}")))?;
        if digits.is_empty() || digits.len() > WORDS * 16 {
            return Err(Error::InvalidParameter(format!(
                "bad bitmask literal: {text}"
            )));
        }
        let mut s = Subset::empty(n);
        let bytes = digits.as_bytes();
        for (pos, chunk_end) in (0..).zip((0..bytes.len()).step_by(16)) {
            let hi = bytes.len() - chunk_end;
            let lo = hi.saturating_sub(16);
            let word = std::str::from_utf8(&bytes[lo..hi]).unwrap();
            s.words[pos] = u64::from_str_radix(word, 16)
                .map_err(|_| Error::InvalidParameter(format!("bad bitmask literal: {text}")))?;
        }
        for i in s.iter() {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
        }
        Ok(s)
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subset {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        for w in (0..WORDS).rev() {
            match self.words[w].cmp(&other.words[w]) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

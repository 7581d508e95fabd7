use alloc::vec;
use alloc::vec::Vec;

const INLINE: usize = 4;

/// Fixed-size bitset over training points. Sets of up to 256 points live inline.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Bits {
    len: usize,
    inline: [u64; INLINE],
    heap: Vec<u64>,
}

impl Bits {
    pub fn empty(len: usize) -> Self {
        let words = len.div_ceil(64).max(1);
        Self {
            len: words,
            inline: [0; INLINE],
            heap: if words > INLINE { vec![0; words] } else { Vec::new() },
        }
    }

    pub fn full(len: usize) -> Self {
        let mut b = Self::empty(len);
        for i in 0..len {
            b.set(i);
        }
        b
    }

    fn words(&self) -> &[u64] {
        if self.len > INLINE {
            &self.heap
        } else {
            &self.inline[..self.len]
        }
    }

    fn words_mut(&mut self) -> &mut [u64] {
        if self.len > INLINE {
            &mut self.heap
        } else {
            &mut self.inline[..self.len]
        }
    }

    fn zip_with(&self, other: &Bits, f: impl Fn(u64, u64) -> u64) -> Bits {
        let mut out = Bits {
            len: self.len,
            inline: [0; INLINE],
            heap: if self.len > INLINE { vec![0; self.len] } else { Vec::new() },
        };
        for ((o, a), b) in out.words_mut().iter_mut().zip(self.words()).zip(other.words()) {
            *o = f(*a, *b);
        }
        out
    }

    pub fn set(&mut self, i: usize) {
        self.words_mut()[i / 64] |= 1 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        self.words()[i / 64] & (1 << (i % 64)) != 0
    }

    #[cfg(test)]
    pub fn count(&self) -> u32 {
        self.words().iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words().iter().all(|&w| w == 0)
    }

    pub fn and(&self, other: &Bits) -> Bits {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Bits) -> Bits {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn and_not(&self, other: &Bits) -> Bits {
        self.zip_with(other, |a, b| a & !b)
    }

    /// `|self ∩ a ∩ b|` without allocating.
    pub fn count_and3(&self, a: &Bits, b: &Bits) -> u32 {
        self.words()
            .iter()
            .zip(a.words())
            .zip(b.words())
            .map(|((x, y), z)| (x & y & z).count_ones())
            .sum()
    }

    pub fn intersects(&self, other: &Bits) -> bool {
        self.words().iter().zip(other.words()).any(|(a, b)| a & b != 0)
    }

    pub fn is_superset(&self, other: &Bits) -> bool {
        self.words().iter().zip(other.words()).all(|(a, b)| b & !a == 0)
    }
}

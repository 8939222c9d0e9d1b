//! Dense bitsets and bit matrices over `u64` words.

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

#[inline]
pub fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet { len, words: vec![0; words_for(len)] }
    }

    pub fn full(len: usize) -> Self {
        let mut b = BitSet { len, words: vec![!0; words_for(len)] };
        b.clear_tail();
        b
    }

    pub fn from_iter<I: IntoIterator<Item = u32>>(len: usize, it: I) -> Self {
        let mut b = BitSet::new(len);
        for i in it {
            b.insert(i as usize);
        }
        b
    }

    pub fn from_words(len: usize, words: &[u64]) -> Self {
        let mut b = BitSet { len, words: words.to_vec() };
        b.clear_tail();
        b
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(w) = self.words.last_mut() {
                *w &= (1u64 << r) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i >> 6] >> (i & 63) & 1 == 1
    }
    /// Inserts `i`, returning whether it was absent.
    #[inline]
    pub fn insert(&mut self, i: usize) -> bool {
        let w = &mut self.words[i >> 6];
        let m = 1u64 << (i & 63);
        let fresh = *w & m == 0;
        *w |= m;
        fresh
    }
    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i >> 6] &= !(1u64 << (i & 63));
    }
    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
    pub fn intersect_with(&mut self, other: &[u64]) {
        for (a, b) in self.words.iter_mut().zip(other) {
            *a &= b;
        }
    }
    pub fn subtract(&mut self, other: &[u64]) {
        for (a, b) in self.words.iter_mut().zip(other) {
            *a &= !b;
        }
    }
    pub fn union_with(&mut self, other: &[u64]) {
        for (a, b) in self.words.iter_mut().zip(other) {
            *a |= b;
        }
    }
    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }
    pub fn iter(&self) -> Ones<'_> {
        ones(&self.words)
    }
    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().map(|i| i as u32).collect()
    }
    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

pub fn ones(words: &[u64]) -> Ones<'_> {
    Ones { words, idx: 0, cur: words.first().copied().unwrap_or(0) }
}

impl Iterator for Ones<'_> {
    type Item = usize;
    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let b = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * 64 + b);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

#[inline]
pub fn and_count(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

/// Square bit matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let stride = words_for(n);
        BitMatrix { n, stride, words: vec![0; n * stride] }
    }
    pub fn size(&self) -> usize {
        self.n
    }
    pub fn stride(&self) -> usize {
        self.stride
    }
    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.words[i * self.stride + (j >> 6)] >> (j & 63) & 1 == 1
    }
    /// Sets bit (i,j), returning whether it was already set.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize) -> bool {
        let w = &mut self.words[i * self.stride + (j >> 6)];
        let m = 1u64 << (j & 63);
        let was = *w & m != 0;
        *w |= m;
        was
    }
    pub fn row_set(&self, i: usize) -> BitSet {
        BitSet::from_words(self.n, self.row(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let mut b = BitSet::new(130);
        assert!(b.insert(0));
        assert!(b.insert(129));
        assert!(!b.insert(129));
        assert_eq!(b.to_vec(), vec![0, 129]);
        assert_eq!(BitSet::full(130).count(), 130);
        let c = BitSet::from_iter(130, [0, 5, 64]);
        assert_eq!(and_count(b.words(), c.words()), 1);
        let mut m = BitMatrix::new(70);
        assert!(!m.set(3, 69));
        assert!(m.get(3, 69) && !m.get(69, 3));
        assert_eq!(m.row_set(3).to_vec(), vec![69]);
    }
}

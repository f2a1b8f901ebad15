//! Packed bit-strings over chain sites, and site regions.

use rand::Rng;
use std::fmt;

pub const WORD_BITS: usize = 64;

#[inline]
pub fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A fixed-length string of classical bits, one per site, packed little-endian
/// into `u64` words (site `i` lives at bit `i % 64` of word `i / 64`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        BitString { len, words: vec![0; words_for(len)] }
    }

    /// Uniformly random string; draws exactly `words_for(len)` `u64`s from `rng`,
    /// in word order, masking unused high bits of the last word.
    pub fn random<R: Rng>(len: usize, rng: &mut R) -> Self {
        let mut words: Vec<u64> = (0..words_for(len)).map(|_| rng.random::<u64>()).collect();
        mask_tail(&mut words, len);
        BitString { len, words }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = BitString::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        s
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let w = i / WORD_BITS;
        let m = 1u64 << (i % WORD_BITS);
        if v {
            self.words[w] |= m;
        } else {
            self.words[w] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn xor_with(&mut self, other: &BitString) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Number of sites where the two strings differ (the Hamming distance).
    pub fn hamming(&self, other: &BitString) -> u32 {
        debug_assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones()).sum()
    }

    /// True iff the strings agree on every site of `region`.
    pub fn eq_on(&self, other: &BitString, region: &Region) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .zip(region.mask.words())
            .all(|((a, b), m)| (a ^ b) & m == 0)
    }

    /// Overwrite the bits of `region` with the corresponding bits of `src`.
    pub fn copy_region_from(&mut self, src: &BitString, region: &Region) {
        debug_assert_eq!(self.len, src.len);
        for ((a, b), m) in self.words.iter_mut().zip(&src.words).zip(region.mask.words()) {
            *a = (*a & !m) | (b & m);
        }
    }

    /// Hamming distance restricted to `region`.
    pub fn hamming_on(&self, other: &BitString, region: &Region) -> u32 {
        self.words
            .iter()
            .zip(&other.words)
            .zip(region.mask.words())
            .map(|((a, b), m)| ((a ^ b) & m).count_ones())
            .sum()
    }

    /// Index of this string into a dense amplitude table (len <= 63).
    pub fn to_index(&self) -> usize {
        debug_assert!(self.len < 64);
        self.words[0] as usize
    }

    pub fn from_index(len: usize, index: usize) -> Self {
        debug_assert!(len < 64);
        let mut s = BitString::zeros(len);
        s.words[0] = index as u64;
        s
    }
}

fn mask_tail(words: &mut [u64], len: usize) {
    let rem = len % WORD_BITS;
    if rem != 0 {
        if let Some(last) = words.last_mut() {
            *last &= (1u64 << rem) - 1;
        }
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", if self.get(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// A set of sites on a chain of `total` qubits, stored as a mask plus the
/// sorted site list.
#[derive(Clone, PartialEq, Eq)]
pub struct Region {
    mask: BitString,
    sites: Vec<usize>,
}

impl Region {
    pub fn empty(total: usize) -> Self {
        Region { mask: BitString::zeros(total), sites: Vec::new() }
    }

    /// Contiguous sites `lo..hi`.
    pub fn range(total: usize, lo: usize, hi: usize) -> Self {
        assert!(lo <= hi && hi <= total, "region {lo}..{hi} out of range for {total}");
        Region::from_sites(total, (lo..hi).collect())
    }

    /// Arc of `len` sites starting at `start`, wrapping around the ring.
    pub fn arc(total: usize, start: usize, len: usize) -> Self {
        assert!(len <= total);
        Region::from_sites(total, (0..len).map(|k| (start + k) % total).collect())
    }

    pub fn from_sites(total: usize, mut sites: Vec<usize>) -> Self {
        sites.sort_unstable();
        sites.dedup();
        assert!(sites.iter().all(|&s| s < total), "site out of range");
        let mut mask = BitString::zeros(total);
        for &s in &sites {
            mask.set(s, true);
        }
        Region { mask, sites }
    }

    pub fn full(total: usize) -> Self {
        Region::range(total, 0, total)
    }

    #[inline]
    pub fn contains(&self, site: usize) -> bool {
        self.mask.get(site)
    }

    /// Number of sites in the region.
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Length of the underlying chain.
    pub fn total(&self) -> usize {
        self.mask.len()
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn mask(&self) -> &BitString {
        &self.mask
    }

    pub fn complement(&self) -> Region {
        let total = self.total();
        Region::from_sites(total, (0..total).filter(|&s| !self.contains(s)).collect())
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.mask.words().iter().zip(other.mask.words()).all(|(a, b)| a & b == 0)
    }

    pub fn union(&self, other: &Region) -> Region {
        let mut sites = self.sites.clone();
        sites.extend_from_slice(&other.sites);
        Region::from_sites(self.total(), sites)
    }
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Region{:?}", self.sites)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn set_get_flip() {
        let mut s = BitString::zeros(130);
        s.set(0, true);
        s.set(64, true);
        s.set(129, true);
        assert!(s.get(0) && s.get(64) && s.get(129));
        assert_eq!(s.count_ones(), 3);
        s.flip(64);
        assert!(!s.get(64));
    }

    #[test]
    fn random_masks_tail() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for len in [1usize, 63, 64, 65, 100] {
            let s = BitString::random(len, &mut rng);
            for i in len..words_for(len) * WORD_BITS {
                assert_eq!((s.words()[i / 64] >> (i % 64)) & 1, 0);
            }
        }
    }

    #[test]
    fn region_ops() {
        let a = Region::range(16, 0, 4);
        let b = Region::arc(16, 14, 4); // 14,15,0,1
        assert!(!a.is_disjoint(&b));
        let c = Region::range(16, 8, 12);
        assert!(a.is_disjoint(&c));
        assert_eq!(a.union(&c).len(), 8);
        assert_eq!(a.complement().len(), 12);
    }

    #[test]
    fn region_swap_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let region = Region::range(40, 10, 25);
        let m1 = BitString::random(40, &mut rng);
        let m2 = BitString::random(40, &mut rng);
        let mut m1p = m1.clone();
        let mut m2p = m2.clone();
        m1p.copy_region_from(&m2, &region);
        m2p.copy_region_from(&m1, &region);
        // swapping twice is the identity
        let mut back = m1p.clone();
        back.copy_region_from(&m2p, &region);
        assert_eq!(back, m1);
        for i in 0..40 {
            let expect = if region.contains(i) { m2.get(i) } else { m1.get(i) };
            assert_eq!(m1p.get(i), expect);
        }
    }
}

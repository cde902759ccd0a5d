//! Covering codes over `{±1}^k0` and covering designs.
//!
//! Radii are computed by a multi-source breadth-first search over the whole
//! cube, so `k0` is capped at [`MAX_CODE_LEN`]. Both greedy constructions use a
//! lazily re-scored max-heap; scores only ever decrease, so a popped entry whose
//! fresh score still beats the next stale score is the true greedy choice.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use crate::math::binomial;
use crate::{Error, Result, SignVector};

/// Longest code for which the radius is computed exhaustively.
pub const MAX_CODE_LEN: usize = 20;
/// Longest code the greedy builder accepts.
pub const MAX_GREEDY_CODE_LEN: usize = 16;
/// Largest ground set for covering designs.
pub const MAX_DESIGN_N: usize = 16;
/// Cap on `C(n,t) * C(t,ℓ)`, the work of one greedy scoring pass.
pub const MAX_DESIGN_WORK: u128 = 50_000_000;

/// A code over `{±1}^k0` with its exhaustively verified covering radius.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringCode {
    k0: usize,
    words: Vec<SignVector>,
    radius: usize,
}

impl CoveringCode {
    /// Sorts and deduplicates `words`, then computes the radius.
    pub fn new(k0: usize, mut words: Vec<SignVector>) -> Result<Self> {
        if let Some(bad) = words.iter().find(|w| w.len() != k0) {
            return Err(Error::contract(alloc::format!(
                "codeword {bad} has length {}, expected {k0}",
                bad.len()
            )));
        }
        words.sort();
        words.dedup();
        let radius = covering_radius(k0, &words)?;
        Ok(CoveringCode { k0, words, radius })
    }

    /// Every point of the cube; radius 0.
    pub fn full_cube(k0: usize) -> Result<Self> {
        Self::new(k0, crate::enumerate_sign_vectors(k0)?.collect())
    }

    /// `{all +1, all −1}`; radius `⌊k0/2⌋`.
    pub fn repetition(k0: usize) -> Result<Self> {
        let ones = SignVector::ones(k0)?;
        Self::new(k0, vec![-ones, ones])
    }

    #[inline]
    pub fn k0(&self) -> usize {
        self.k0
    }

    #[inline]
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn words(&self) -> &[SignVector] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &SignVector) -> bool {
        self.words.binary_search(w).is_ok()
    }

    pub fn is_complement_closed(&self) -> bool {
        self.words.iter().all(|w| self.contains(&-*w))
    }

    /// Closest codeword and its distance; ties go to the smallest bitmask.
    pub fn nearest(&self, w: &SignVector) -> (SignVector, usize) {
        let mut best = (self.words[0], usize::MAX);
        // words are sorted, so the first minimum is the smallest bitmask
        for c in &self.words {
            let d = c.hamming(w);
            if d < best.1 {
                best = (*c, d);
            }
        }
        best
    }
}

/// Maximum over the cube of the distance to the nearest codeword.
pub fn covering_radius(k0: usize, words: &[SignVector]) -> Result<usize> {
    if words.is_empty() {
        return Err(Error::contract("covering radius of an empty code"));
    }
    if k0 == 0 || k0 > MAX_CODE_LEN {
        return Err(Error::budget("covering radius length", MAX_CODE_LEN as u64, k0 as u64));
    }
    let size = 1usize << k0;
    let mut dist = vec![u8::MAX; size];
    let mut frontier: Vec<usize> = Vec::new();
    for w in words {
        let b = w.bits() as usize;
        if dist[b] != 0 {
            dist[b] = 0;
            frontier.push(b);
        }
    }
    let mut radius = 0;
    let mut next = Vec::new();
    while !frontier.is_empty() {
        for &p in &frontier {
            for i in 0..k0 {
                let q = p ^ (1 << i);
                if dist[q] == u8::MAX {
                    dist[q] = dist[p] + 1;
                    next.push(q);
                }
            }
        }
        if !next.is_empty() {
            radius += 1;
        }
        core::mem::swap(&mut frontier, &mut next);
        next.clear();
    }
    Ok(radius)
}

/// One representative of each `±c` pair of a code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntipodalHalf {
    words: Vec<SignVector>,
}

impl AntipodalHalf {
    pub fn words(&self) -> &[SignVector] {
        &self.words
    }

    /// `ĉ`.
    pub fn size(&self) -> usize {
        self.words.len()
    }

    /// Position of `±c` in the half and the sign `σ` with `c = σ · half[idx]`.
    pub fn locate(&self, c: &SignVector) -> Option<(usize, f64)> {
        if let Some(i) = self.words.iter().position(|h| h == c) {
            return Some((i, 1.0));
        }
        let neg = -*c;
        self.words.iter().position(|h| *h == neg).map(|i| (i, -1.0))
    }
}

/// Keeps the smaller-bitmask member of each complementary pair present in the code.
pub fn antipodal_half(code: &CoveringCode) -> AntipodalHalf {
    let words = code
        .words()
        .iter()
        .filter(|c| {
            let neg = -**c;
            !(code.contains(&neg) && neg.bits() < c.bits())
        })
        .copied()
        .collect();
    AntipodalHalf { words }
}

#[derive(PartialEq, Eq)]
struct Scored {
    gain: u64,
    tie: Reverse<usize>,
}

impl Ord for Scored {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain.cmp(&other.gain).then(self.tie.cmp(&other.tie))
    }
}

impl PartialOrd for Scored {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lazy greedy set cover. `gain(i)` must be non-increasing as `mark(i)` is called.
fn lazy_greedy(
    candidates: usize,
    mut gain: impl FnMut(usize) -> u64,
    mut mark: impl FnMut(usize),
) -> Vec<usize> {
    let mut heap: BinaryHeap<Scored> = (0..candidates)
        .map(|i| Scored {
            gain: gain(i),
            tie: Reverse(i),
        })
        .filter(|s| s.gain > 0)
        .collect();
    let mut chosen = Vec::new();
    while let Some(top) = heap.pop() {
        let i = top.tie.0;
        let fresh = gain(i);
        if fresh == 0 {
            continue;
        }
        let entry = Scored {
            gain: fresh,
            tie: Reverse(i),
        };
        if heap.peek().is_some_and(|next| *next > entry) {
            heap.push(entry);
            continue;
        }
        mark(i);
        chosen.push(i);
    }
    chosen
}

/// Complement-closed code of radius at most `r`, built greedily.
///
/// Each step adds the pair `{c, −c}` (with `c` the member whose top bit is clear)
/// covering the most still-uncovered points; ties go to the smallest bitmask.
pub fn greedy_covering_code(k0: usize, r: usize) -> Result<CoveringCode> {
    if k0 == 0 || k0 > MAX_GREEDY_CODE_LEN {
        return Err(Error::budget("greedy covering code length", MAX_GREEDY_CODE_LEN as u64, k0 as u64));
    }
    if r > k0 {
        return Err(Error::contract(alloc::format!("radius {r} exceeds length {k0}")));
    }
    let full = (1usize << k0) - 1;
    // flip patterns of weight <= r
    let flips: Vec<usize> = (0..=full).filter(|m| m.count_ones() as usize <= r).collect();
    let covered = core::cell::RefCell::new(vec![false; 1 << k0]);
    let pair_points = |c: usize| {
        let neg = c ^ full;
        flips
            .iter()
            .map(move |&f| c ^ f)
            .chain(flips.iter().filter(move |&&f| k0 - f.count_ones() as usize > r).map(move |&f| neg ^ f))
    };
    let picks = lazy_greedy(
        1 << (k0 - 1),
        |c| pair_points(c).filter(|&p| !covered.borrow()[p]).count() as u64,
        |c| {
            let mut cov = covered.borrow_mut();
            for p in pair_points(c) {
                cov[p] = true;
            }
        },
    );
    let mut words = Vec::with_capacity(2 * picks.len());
    for c in picks {
        let v = SignVector::from_raw(k0, c as u64);
        words.push(v);
        words.push(-v);
    }
    CoveringCode::new(k0, words)
}

/// A family of `t`-subsets of `{0..n}` (bitmasks) covering every `ℓ`-subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringDesign {
    n: usize,
    t: usize,
    ell: usize,
    blocks: Vec<u32>,
}

fn check_design_params(n: usize, t: usize, ell: usize) -> Result<()> {
    if !(ell <= t && t <= n) {
        return Err(Error::contract(alloc::format!(
            "covering design needs ell <= t <= n, got ({n}, {t}, {ell})"
        )));
    }
    if n > MAX_DESIGN_N {
        return Err(Error::budget("covering design ground set", MAX_DESIGN_N as u64, n as u64));
    }
    Ok(())
}

impl CoveringDesign {
    /// Wraps blocks given as index lists; each must have exactly `t` distinct elements below `n`.
    pub fn new(n: usize, t: usize, ell: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        check_design_params(n, t, ell)?;
        let mut masks = Vec::with_capacity(blocks.len());
        for b in blocks {
            let mut m = 0u32;
            for &i in b {
                if i >= n {
                    return Err(Error::contract(alloc::format!("block element {i} >= n = {n}")));
                }
                m |= 1 << i;
            }
            if m.count_ones() as usize != t || b.len() != t {
                return Err(Error::contract(alloc::format!(
                    "block {b:?} is not a {t}-subset"
                )));
            }
            masks.push(m);
        }
        Ok(CoveringDesign {
            n,
            t,
            ell,
            blocks: masks,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Blocks as sorted index lists.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|&m| (0..self.n).filter(|i| m >> i & 1 == 1).collect())
            .collect()
    }

    /// Exhaustive check that every `ℓ`-subset sits inside some block.
    pub fn is_covering(&self) -> bool {
        subsets(self.n, self.ell).all(|s| self.blocks.iter().any(|&b| b & s == s))
    }
}

/// `k`-subsets of `{0..n}` as bitmasks, in lexicographic order of their sorted elements.
fn subsets(n: usize, k: usize) -> impl Iterator<Item = u32> {
    let mut idx: Vec<usize> = (0..k).collect();
    let mut done = k > n;
    core::iter::from_fn(move || {
        if done {
            return None;
        }
        let mask = idx.iter().fold(0u32, |m, &i| m | 1 << i);
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(mask)
    })
}

/// Colex rank of a subset bitmask among subsets of the same size.
fn colex_rank(mask: u32) -> usize {
    let mut rank = 0u128;
    let mut m = mask;
    let mut i = 1;
    while m != 0 {
        let pos = m.trailing_zeros() as u64;
        rank += binomial(pos, i).unwrap_or(0);
        m &= m - 1;
        i += 1;
    }
    rank as usize
}

/// Sub-masks of `mask` with exactly `k` bits.
fn sub_subsets(mask: u32, k: usize) -> impl Iterator<Item = u32> {
    let elems: Vec<u32> = (0..32).filter(|i| mask >> i & 1 == 1).collect();
    subsets(elems.len(), k).map(move |s| {
        (0..elems.len())
            .filter(|i| s >> i & 1 == 1)
            .fold(0u32, |m, i| m | 1 << elems[i])
    })
}

/// Greedy `(n, t, ℓ)` covering design.
///
/// Each step adds the `t`-subset covering the most still-uncovered `ℓ`-subsets;
/// ties go to the lexicographically smallest block.
pub fn greedy_covering_design(n: usize, t: usize, ell: usize) -> Result<CoveringDesign> {
    check_design_params(n, t, ell)?;
    let cand_count = binomial(n as u64, t as u64).unwrap_or(u128::MAX);
    let per_block = binomial(t as u64, ell as u64).unwrap_or(u128::MAX);
    let work = cand_count.saturating_mul(per_block);
    if work > MAX_DESIGN_WORK {
        return Err(Error::budget(
            "covering design scoring work",
            MAX_DESIGN_WORK as u64,
            u64::try_from(work).unwrap_or(u64::MAX),
        ));
    }
    let universe = binomial(n as u64, ell as u64).unwrap_or(0) as usize;
    let candidates: Vec<u32> = subsets(n, t).collect();
    // ℓ-subsets of each candidate, as colex ranks
    let members: Vec<Vec<usize>> = candidates
        .iter()
        .map(|&c| sub_subsets(c, ell).map(colex_rank).collect())
        .collect();
    let covered = core::cell::RefCell::new(vec![false; universe]);
    let picks = lazy_greedy(
        candidates.len(),
        |i| members[i].iter().filter(|&&s| !covered.borrow()[s]).count() as u64,
        |i| {
            let mut cov = covered.borrow_mut();
            for &s in &members[i] {
                cov[s] = true;
            }
        },
    );
    let blocks = picks.into_iter().map(|i| candidates[i]).collect();
    Ok(CoveringDesign { n, t, ell, blocks })
}

/// `[1 + ln C(t,ℓ)] · C(n,ℓ) / C(t,ℓ)`, the probabilistic upper bound on `C(n,t,ℓ)`.
pub fn erdos_spencer_bound(n: usize, t: usize, ell: usize) -> f64 {
    libm::exp2(erdos_spencer_log2(n, t, ell))
}

/// Base-2 logarithm of [`erdos_spencer_bound`], safe for large arguments.
pub fn erdos_spencer_log2(n: usize, t: usize, ell: usize) -> f64 {
    use crate::math::{ln_binomial, log2_binomial};
    let (n, t, ell) = (n as u64, t as u64, ell as u64);
    libm::log2(1.0 + ln_binomial(t, ell)) + log2_binomial(n, ell) - log2_binomial(t, ell)
}

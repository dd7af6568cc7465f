//! Combinatorics of m-subsets of [n] and the compound-matrix representation.
//!
//! Basis vectors of the m-th exterior power are labeled by strictly
//! increasing m-subsets of [n] in lexicographic order; the compound matrix
//! holds all m x m minors, indexed by those labels.

use thiserror::Error;

use crate::linalg::{LinalgError, Matrix, Transvection};
use crate::ring::RingElement;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExteriorError {
    #[error("index set must be strictly increasing within [1, {0}]")]
    BadIndexSet(u32),
    #[error("ambient parameters differ: ({0},{1}) vs ({2},{3})")]
    AmbientMismatch(u32, usize, u32, usize),
    #[error("blocks must be pairwise disjoint")]
    OverlappingBlocks,
    #[error("blocks do not partition the target set")]
    IncompletePartition,
    #[error("power m={0} out of range for n={1}")]
    PowerOutOfRange(usize, u32),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// A strictly increasing m-subset of [n] (1-based labels).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexSet {
    n: u32,
    elems: Vec<u32>,
}

impl IndexSet {
    pub fn new(n: u32, elems: Vec<u32>) -> Result<Self, ExteriorError> {
        if elems.is_empty()
            || elems[0] < 1
            || elems[elems.len() - 1] > n
            || elems.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(ExteriorError::BadIndexSet(n));
        }
        Ok(IndexSet { n, elems })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.elems.len()
    }

    pub fn elems(&self) -> &[u32] {
        &self.elems
    }

    /// 1-based position in the lexicographic order of all m-subsets of [n].
    pub fn lex_rank(&self) -> u64 {
        let n = self.n as u64;
        let m = self.elems.len() as u64;
        let mut rank = 1u64;
        let mut prev = 0u64;
        for (t, &e) in self.elems.iter().enumerate() {
            let t = t as u64;
            for skipped in prev + 1..e as u64 {
                rank += binomial(n - skipped, m - t - 1);
            }
            prev = e as u64;
        }
        rank
    }

    /// Inverse of [`lex_rank`]: the m-subset of [n] at the given 1-based rank.
    pub fn unrank(n: u32, m: usize, rank: u64) -> Result<Self, ExteriorError> {
        let total = binomial(n as u64, m as u64);
        if rank < 1 || rank > total {
            return Err(ExteriorError::BadIndexSet(n));
        }
        let mut elems = Vec::with_capacity(m);
        let mut remaining = rank - 1;
        let mut next = 1u32;
        for t in 0..m {
            let mut e = next;
            loop {
                let count = binomial((n - e) as u64, (m - t - 1) as u64);
                if remaining < count {
                    break;
                }
                remaining -= count;
                e += 1;
            }
            elems.push(e);
            next = e + 1;
        }
        IndexSet::new(n, elems)
    }

    /// All m-subsets of [n] in lexicographic order.
    pub fn all(n: u32, m: usize) -> Vec<IndexSet> {
        let total = binomial(n as u64, m as u64);
        (1..=total)
            .map(|r| IndexSet::unrank(n, m, r).unwrap())
            .collect()
    }

    /// d(I, J) = |I intersect J|.
    pub fn distance(&self, other: &IndexSet) -> Result<u32, ExteriorError> {
        if self.n != other.n || self.m() != other.m() {
            return Err(ExteriorError::AmbientMismatch(
                self.n,
                self.m(),
                other.n,
                other.m(),
            ));
        }
        Ok(self
            .elems
            .iter()
            .filter(|e| other.elems.binary_search(e).is_ok())
            .count() as u32)
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.elems
            .iter()
            .all(|e| other.elems.binary_search(e).is_err())
    }
}

/// An ordered sequence of pairwise-disjoint blocks; its sign is the parity
/// of the permutation taking the sorted union to the concatenation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shuffle {
    blocks: Vec<IndexSet>,
}

impl Shuffle {
    pub fn new(blocks: Vec<IndexSet>) -> Result<Self, ExteriorError> {
        for i in 0..blocks.len() {
            for j in i + 1..blocks.len() {
                if !blocks[i].is_disjoint(&blocks[j]) {
                    return Err(ExteriorError::OverlappingBlocks);
                }
            }
        }
        Ok(Shuffle { blocks })
    }

    pub fn blocks(&self) -> &[IndexSet] {
        &self.blocks
    }

    /// Sign via inversion counting on the concatenated word.
    pub fn sign(&self) -> i8 {
        let word: Vec<u32> = self
            .blocks
            .iter()
            .flat_map(|b| b.elems().iter().copied())
            .collect();
        let mut inversions = 0usize;
        for i in 0..word.len() {
            for j in i + 1..word.len() {
                if word[i] > word[j] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// Sign of an ordered partition of `target`, erroring if the blocks do not
/// partition it exactly.
pub fn sign_of_partition(target: &[u32], blocks: &[IndexSet]) -> Result<i8, ExteriorError> {
    let shuffle = Shuffle::new(blocks.to_vec())?;
    let mut union: Vec<u32> = blocks
        .iter()
        .flat_map(|b| b.elems().iter().copied())
        .collect();
    union.sort_unstable();
    let mut sorted_target = target.to_vec();
    sorted_target.sort_unstable();
    if union != sorted_target {
        return Err(ExteriorError::IncompletePartition);
    }
    Ok(shuffle.sign())
}

/// The compound matrix: entry (lex_rank(I), lex_rank(J)) is the minor
/// det(g[I|J]), computed division-free so it is valid over any ring.
pub fn compound(g: &Matrix, m: usize) -> Result<Matrix, ExteriorError> {
    let n = g.rows();
    if g.cols() != n {
        return Err(ExteriorError::Linalg(LinalgError::NotSquare(n, g.cols())));
    }
    if m < 1 || m >= n {
        return Err(ExteriorError::PowerOutOfRange(m, n as u32));
    }
    let sets = IndexSet::all(n as u32, m);
    let big_n = sets.len();
    let mut entries: Vec<RingElement> = Vec::with_capacity(big_n * big_n);
    for set_i in &sets {
        let rows: Vec<usize> = set_i.elems().iter().map(|e| (*e - 1) as usize).collect();
        for set_j in &sets {
            let cols: Vec<usize> = set_j.elems().iter().map(|e| (*e - 1) as usize).collect();
            let minor = g.submatrix(&rows, &cols).det_division_free()?;
            entries.push(minor);
        }
    }
    Ok(Matrix::new(g.context().clone(), big_n, big_n, entries)?)
}

/// The transvection t_(I,J)(xi) inside GL_N, with N = binom(n, m): the
/// identity plus xi at the lex-rank positions of I and J.
pub fn wedge_transvection(
    i: &IndexSet,
    j: &IndexSet,
    xi: RingElement,
) -> Result<Transvection, ExteriorError> {
    if i.n() != j.n() || i.m() != j.m() {
        return Err(ExteriorError::AmbientMismatch(i.n(), i.m(), j.n(), j.m()));
    }
    let big_n = binomial(i.n() as u64, i.m() as u64) as usize;
    Ok(Transvection::new(
        big_n,
        i.lex_rank() as usize,
        j.lex_rank() as usize,
        xi,
    )?)
}

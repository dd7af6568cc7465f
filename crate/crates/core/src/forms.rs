//! Invariant multilinear forms attached to the exterior-power representation
//! and membership tests for their stabilizer groups.
//!
//! For m | n the fully polarized k-linear form (k = n/m) sums signed ordered
//! partitions of [n] into m-blocks; its polynomial avatar q restricts to a
//! canonical representative per unordered partition. For m not dividing n,
//! the forms on all ml-element subsets V generate an ideal, and membership
//! is decided up to a multiplier matrix.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::exterior::{binomial, compound, sign_of_partition, ExteriorError, IndexSet};
use crate::linalg::{LinalgError, Matrix};
use crate::ring::{RingContext, RingElement, RingError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormsError {
    #[error("block size {0} does not divide |V| = {1}")]
    BlockSizeMismatch(usize, usize),
    #[error("V must be a strictly increasing subset of [1, {0}]")]
    BadSubset(u32),
    #[error("matrix is {0}x{1}, expected {2}x{2}")]
    WrongMatrixSize(usize, usize, usize),
    #[error("m divides n: use membership_gf_bar")]
    UseGfBar,
    #[error("m does not divide n: use membership_gy_bar")]
    UseGyBar,
    #[error("symbolic expansion capped at binom(n,m) <= 20, got binom({0},{1}) = {2}")]
    SizeCap(u32, usize, u64),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Packs a tuple of 1-based lex ranks into a u64 key, 8 bits per slot,
/// most significant slot first so numeric order is tuple-lex order.
pub(crate) fn pack_key(ranks: &[u64]) -> u64 {
    let mut acc = 0u64;
    for &r in ranks {
        debug_assert!(r > 0 && r < 256);
        acc = (acc << 8) | r;
    }
    acc
}

pub(crate) fn unpack_key(key: u64, arity: usize) -> Vec<u64> {
    let mut out = vec![0u64; arity];
    let mut k = key;
    for slot in (0..arity).rev() {
        out[slot] = k & 0xff;
        k >>= 8;
    }
    out
}

/// The k-linear form on the m-th exterior power determined by a target
/// subset V with m | |V|: signed sum over ordered partitions of V into
/// m-blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilinearForm {
    n: u32,
    m: usize,
    v: Vec<u32>,
    arity: usize,
    /// ordered-partition keys with shuffle signs, in lex order
    monomials: Vec<(Vec<IndexSet>, i8)>,
    table: BTreeMap<u64, i8>,
}

/// JSON export document for a form.
#[derive(Debug, Clone, Serialize)]
pub struct FormExport {
    pub n: u32,
    pub m: usize,
    #[serde(rename = "V")]
    pub v: Vec<u32>,
    pub arity: usize,
    pub alternating: bool,
    pub monomials: Vec<MonomialExport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonomialExport {
    pub blocks: Vec<Vec<u32>>,
    pub sign: i8,
}

fn combinations(pool: &[u32], m: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if m > pool.len() {
        return out;
    }
    if m == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        out.push(idx.iter().map(|&i| pool[i]).collect());
        // advance the index vector
        let mut t = m;
        let advanced = loop {
            if t == 0 {
                break false;
            }
            t -= 1;
            if idx[t] != t + pool.len() - m {
                break true;
            }
        };
        if !advanced {
            return out;
        }
        idx[t] += 1;
        for j in t + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn ordered_partitions(v: &[u32], m: usize) -> Vec<Vec<Vec<u32>>> {
    fn rec(remaining: &[u32], m: usize, acc: &mut Vec<Vec<u32>>, out: &mut Vec<Vec<Vec<u32>>>) {
        if remaining.is_empty() {
            out.push(acc.clone());
            return;
        }
        for block in combinations(remaining, m) {
            let rest: Vec<u32> = remaining
                .iter()
                .copied()
                .filter(|e| !block.contains(e))
                .collect();
            acc.push(block);
            rec(&rest, m, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(v, m, &mut Vec::new(), &mut out);
    out
}

/// One representative per unordered partition: blocks ordered by their
/// minimum element.
fn canonical_partitions(v: &[u32], m: usize) -> Vec<Vec<Vec<u32>>> {
    fn rec(remaining: &[u32], m: usize, acc: &mut Vec<Vec<u32>>, out: &mut Vec<Vec<Vec<u32>>>) {
        if remaining.is_empty() {
            out.push(acc.clone());
            return;
        }
        let head = remaining[0];
        for tail in combinations(&remaining[1..], m - 1) {
            let mut block = vec![head];
            block.extend_from_slice(&tail);
            let rest: Vec<u32> = remaining
                .iter()
                .copied()
                .filter(|e| !block.contains(e))
                .collect();
            acc.push(block);
            rec(&rest, m, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(v, m, &mut Vec::new(), &mut out);
    out
}

pub fn build_form(n: u32, m: usize, v: &[u32]) -> Result<MultilinearForm, FormsError> {
    if v.is_empty() || v[0] < 1 || v[v.len() - 1] > n || v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FormsError::BadSubset(n));
    }
    if m == 0 || v.len() % m != 0 {
        return Err(FormsError::BlockSizeMismatch(m, v.len()));
    }
    let arity = v.len() / m;
    let mut monomials = Vec::new();
    let mut table = BTreeMap::new();
    for blocks in ordered_partitions(v, m) {
        let sets: Vec<IndexSet> = blocks
            .iter()
            .map(|b| IndexSet::new(n, b.clone()))
            .collect::<Result<_, _>>()?;
        let sign = sign_of_partition(v, &sets)?;
        let key = pack_key(&sets.iter().map(|s| s.lex_rank()).collect::<Vec<_>>());
        table.insert(key, sign);
        monomials.push((sets, sign));
    }
    Ok(MultilinearForm {
        n,
        m,
        v: v.to_vec(),
        arity,
        monomials,
        table,
    })
}

impl MultilinearForm {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn v(&self) -> &[u32] {
        &self.v
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// For odd m the polynomial avatar is alternating rather than a plain
    /// polynomial in the coordinates.
    pub fn is_alternating(&self) -> bool {
        self.m % 2 == 1
    }

    /// All ordered-partition monomials with their signs.
    pub fn monomials(&self) -> &[(Vec<IndexSet>, i8)] {
        &self.monomials
    }

    /// The polynomial avatar: one canonical monomial per unordered
    /// partition (blocks sorted by minimum element).
    pub fn q_monomials(&self) -> Vec<(Vec<IndexSet>, i8)> {
        canonical_partitions(&self.v, self.m)
            .into_iter()
            .map(|blocks| {
                let sets: Vec<IndexSet> = blocks
                    .iter()
                    .map(|b| IndexSet::new(self.n, b.clone()).unwrap())
                    .collect();
                let sign = sign_of_partition(&self.v, &sets).unwrap();
                (sets, sign)
            })
            .collect()
    }

    pub fn export(&self) -> FormExport {
        FormExport {
            n: self.n,
            m: self.m,
            v: self.v.clone(),
            arity: self.arity,
            alternating: self.is_alternating(),
            monomials: self
                .q_monomials()
                .iter()
                .map(|(blocks, sign)| MonomialExport {
                    blocks: blocks.iter().map(|b| b.elems().to_vec()).collect(),
                    sign: *sign,
                })
                .collect(),
        }
    }

    /// Coefficient table with signs mapped into the given ring.
    pub fn table_in(&self, ctx: &RingContext) -> FormTable {
        let coeffs = self
            .table
            .iter()
            .map(|(k, s)| (*k, ctx.from_i64(*s as i64)))
            .collect();
        FormTable {
            ctx: ctx.clone(),
            arity: self.arity,
            coeffs,
        }
    }

    /// Value of the form on `arity` coordinate vectors of length binom(n,m).
    pub fn eval(&self, args: &[Vec<RingElement>]) -> Result<RingElement, FormsError> {
        let ctx = args
            .first()
            .and_then(|v| v.first())
            .map(|e| e.context().clone())
            .unwrap_or(RingContext::Integers);
        self.table_in(&ctx).eval(args)
    }
}

/// Coefficient table of a k-linear form indexed by packed tuples of
/// lex ranks; absent keys are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormTable {
    ctx: RingContext,
    arity: usize,
    coeffs: BTreeMap<u64, RingElement>,
}

impl FormTable {
    pub fn context(&self) -> &RingContext {
        &self.ctx
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn coefficients(&self) -> &BTreeMap<u64, RingElement> {
        &self.coeffs
    }

    pub fn coefficient(&self, ranks: &[u64]) -> RingElement {
        self.coeffs
            .get(&pack_key(ranks))
            .cloned()
            .unwrap_or_else(|| self.ctx.zero())
    }

    pub fn scale(&self, c: &RingElement) -> FormTable {
        let mut coeffs = BTreeMap::new();
        for (k, v) in &self.coeffs {
            let s = v.mul(c);
            if !s.is_zero() {
                coeffs.insert(*k, s);
            }
        }
        FormTable {
            ctx: self.ctx.clone(),
            arity: self.arity,
            coeffs,
        }
    }

    pub fn add(&self, other: &FormTable) -> FormTable {
        let mut coeffs = self.coeffs.clone();
        for (k, v) in &other.coeffs {
            let s = match coeffs.get(k) {
                Some(a) => a.add(v),
                None => v.clone(),
            };
            if s.is_zero() {
                coeffs.remove(k);
            } else {
                coeffs.insert(*k, s);
            }
        }
        FormTable {
            ctx: self.ctx.clone(),
            arity: self.arity,
            coeffs,
        }
    }

    pub fn eval(&self, args: &[Vec<RingElement>]) -> Result<RingElement, FormsError> {
        let mut acc = self.ctx.zero();
        for (key, c) in &self.coeffs {
            let ranks = unpack_key(*key, self.arity);
            let mut term = c.clone();
            for (slot, r) in ranks.iter().enumerate() {
                term = term.mul(&args[slot][(*r - 1) as usize]);
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }
}

/// Coefficient table of (x^1,...,x^k) -> F(g x^1, ..., g x^k), indexed by
/// arbitrary k-tuples of index sets.
pub fn transform_form(f: &MultilinearForm, g: &Matrix) -> Result<FormTable, FormsError> {
    let big_n = binomial(f.n as u64, f.m as u64) as usize;
    if g.rows() != big_n || g.cols() != big_n {
        return Err(FormsError::WrongMatrixSize(g.rows(), g.cols(), big_n));
    }
    let ctx = g.context().clone();
    // sparse row view of g
    let rows: Vec<Vec<(u64, &RingElement)>> = (0..big_n)
        .map(|i| {
            (0..big_n)
                .filter_map(|j| {
                    let e = g.get(i, j);
                    if e.is_zero() {
                        None
                    } else {
                        Some((j as u64 + 1, e))
                    }
                })
                .collect()
        })
        .collect();
    let mut coeffs: BTreeMap<u64, RingElement> = BTreeMap::new();
    let mut ranks = vec![0u64; f.arity];
    for (blocks, sign) in &f.monomials {
        let start = ctx.from_i64(*sign as i64);
        expand(&rows, blocks, 0, &start, &mut ranks, &mut coeffs);
    }
    Ok(FormTable {
        ctx,
        arity: f.arity,
        coeffs,
    })
}

fn expand(
    rows: &[Vec<(u64, &RingElement)>],
    blocks: &[IndexSet],
    slot: usize,
    acc: &RingElement,
    ranks: &mut Vec<u64>,
    out: &mut BTreeMap<u64, RingElement>,
) {
    if slot == blocks.len() {
        let key = pack_key(ranks);
        let s = match out.get(&key) {
            Some(v) => v.add(acc),
            None => acc.clone(),
        };
        if s.is_zero() {
            out.remove(&key);
        } else {
            out.insert(key, s);
        }
        return;
    }
    let row = blocks[slot].lex_rank() as usize - 1;
    for &(j, e) in &rows[row] {
        let next = acc.mul(e);
        if next.is_zero() {
            continue;
        }
        ranks[slot] = j;
        expand(rows, blocks, slot + 1, &next, ranks, out);
    }
}

fn check_square_invertible(g: &Matrix, big_n: usize) -> Result<bool, FormsError> {
    if g.rows() != big_n || g.cols() != big_n {
        return Err(FormsError::WrongMatrixSize(g.rows(), g.cols(), big_n));
    }
    Ok(g.det_division_free()?.is_unit())
}

/// Exact stabilizer membership: the transformed table equals the form's own.
pub fn membership_gf(n: u32, m: usize, g: &Matrix) -> Result<bool, FormsError> {
    if m == 0 || n as usize % m != 0 {
        return Err(FormsError::UseGyBar);
    }
    let f = build_form(n, m, &(1..=n).collect::<Vec<_>>())?;
    let big_n = binomial(n as u64, m as u64) as usize;
    if !check_square_invertible(g, big_n)? {
        return Ok(false);
    }
    let t = transform_form(&f, g)?;
    Ok(t == f.table_in(g.context()))
}

/// Similarity membership: returns the unit multiplier lambda with
/// F(gx^1,...,gx^k) = lambda * F, when one exists.
pub fn membership_gf_bar(n: u32, m: usize, g: &Matrix) -> Result<Option<RingElement>, FormsError> {
    if m == 0 || n as usize % m != 0 {
        return Err(FormsError::UseGyBar);
    }
    let f = build_form(n, m, &(1..=n).collect::<Vec<_>>())?;
    let big_n = binomial(n as u64, m as u64) as usize;
    if !check_square_invertible(g, big_n)? {
        return Ok(None);
    }
    let t = transform_form(&f, g)?;
    // lambda read off the lex-first monomial of F, then verified globally
    let (first_key, first_sign) = f.table.iter().next().map(|(k, s)| (*k, *s)).unwrap();
    let coeff = t
        .coeffs
        .get(&first_key)
        .cloned()
        .unwrap_or_else(|| g.context().zero());
    let lambda = coeff.mul(&g.context().from_i64(first_sign as i64));
    if !lambda.is_unit() {
        return Ok(None);
    }
    if t == f.table_in(g.context()).scale(&lambda) {
        Ok(Some(lambda))
    } else {
        Ok(None)
    }
}

/// Multiplier data witnessing membership in the stabilizer of the form
/// ideal: the invertible p x p matrix M with F_(V_j) o g = sum_l M[j][l] F_(V_l).
#[derive(Debug, Clone)]
pub struct GyMembership {
    pub subsets: Vec<Vec<u32>>,
    pub multipliers: Matrix,
}

impl GyMembership {
    /// Diagonal multipliers, the lambda_(V_j) of the generic shape. They
    /// vanish for elements that permute the subsets V_j.
    pub fn lambdas(&self) -> Vec<RingElement> {
        (0..self.subsets.len())
            .map(|j| self.multipliers.get(j, j).clone())
            .collect()
    }

    /// Nonzero off-diagonal coefficients c(V_j, V_l).
    pub fn cross(&self) -> Vec<(usize, usize, RingElement)> {
        let p = self.subsets.len();
        let mut out = Vec::new();
        for j in 0..p {
            for l in 0..p {
                if j != l && !self.multipliers.get(j, l).is_zero() {
                    out.push((j, l, self.multipliers.get(j, l).clone()));
                }
            }
        }
        out
    }
}

/// Membership in the stabilizer of the ideal generated by the forms F_V:
/// every transformed form decomposes exactly in the span of the F_V, and
/// the multiplier matrix of the decomposition is invertible.
pub fn membership_gy_bar(n: u32, m: usize, g: &Matrix) -> Result<Option<GyMembership>, FormsError> {
    if m == 0 || n as usize % m == 0 {
        return Err(FormsError::UseGfBar);
    }
    let l = n as usize / m;
    let ml = l * m;
    let big_n = binomial(n as u64, m as u64) as usize;
    if !check_square_invertible(g, big_n)? {
        return Ok(None);
    }
    let ctx = g.context().clone();
    let subsets: Vec<IndexSet> = IndexSet::all(n, ml);
    let forms: Vec<MultilinearForm> = subsets
        .iter()
        .map(|v| build_form(n, m, v.elems()))
        .collect::<Result<_, _>>()?;
    let p = subsets.len();
    let mut multipliers = Matrix::zeros(&ctx, p, p);
    for (j, fj) in forms.iter().enumerate() {
        let t = transform_form(fj, g)?;
        // read candidate multipliers off the transformed table; the forms
        // for distinct subsets live on disjoint key sets, so the
        // decomposition is unique when it exists
        let mut mu: BTreeMap<usize, RingElement> = BTreeMap::new();
        for (key, coeff) in &t.coeffs {
            let ranks = unpack_key(*key, fj.arity);
            let sets: Vec<IndexSet> = ranks
                .iter()
                .map(|r| IndexSet::unrank(n, m, *r).unwrap())
                .collect();
            let mut union: Vec<u32> = sets.iter().flat_map(|s| s.elems().to_vec()).collect();
            union.sort_unstable();
            union.dedup();
            if union.len() != ml {
                return Ok(None); // blocks overlap: outside the span
            }
            let target = IndexSet::new(n, union).unwrap();
            let Ok(idx) = subsets.binary_search(&target) else {
                return Ok(None);
            };
            let sign = sign_of_partition(target.elems(), &sets)?;
            let candidate = coeff.mul(&ctx.from_i64(sign as i64));
            match mu.get(&idx) {
                Some(prev) if prev != &candidate => return Ok(None),
                Some(_) => {}
                None => {
                    mu.insert(idx, candidate);
                }
            }
        }
        // verify the decomposition exactly
        let mut expected = FormTable {
            ctx: ctx.clone(),
            arity: fj.arity,
            coeffs: BTreeMap::new(),
        };
        for (&idx, c) in &mu {
            expected = expected.add(&forms[idx].table_in(&ctx).scale(c));
        }
        if expected != t {
            return Ok(None);
        }
        for (idx, c) in mu {
            multipliers.set(j, idx, c);
        }
    }
    if !multipliers.det_division_free()?.is_unit() {
        return Ok(None);
    }
    Ok(Some(GyMembership {
        subsets: subsets.iter().map(|s| s.elems().to_vec()).collect(),
        multipliers,
    }))
}

/// Verifies q(compound(g, m) x) = det(g) q(x) as an exact polynomial
/// identity over Z with generic matrix entries, so it holds over every
/// commutative ring. Odd m uses the fully polarized k-linear form with one
/// variable vector per slot.
pub fn symbolic_invariance_check(n: u32, m: usize) -> Result<bool, FormsError> {
    if m == 0 || n as usize % m != 0 || m >= n as usize {
        return Err(FormsError::UseGyBar);
    }
    let big_n = binomial(n as u64, m as u64);
    if big_n > 20 {
        return Err(FormsError::SizeCap(n, m, big_n));
    }
    let big_n = big_n as usize;
    let k = n as usize / m;
    let slots = if m % 2 == 0 { 1 } else { k };
    let sets = IndexSet::all(n, m);

    let mut var_names: Vec<String> = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            var_names.push(format!("g{i}_{j}"));
        }
    }
    for t in 1..=slots {
        for s in &sets {
            let label: String = s.elems().iter().map(|e| e.to_string()).collect();
            var_names.push(format!("x{t}_{label}"));
        }
    }
    let refs: Vec<&str> = var_names.iter().map(|s| s.as_str()).collect();
    let ctx = RingContext::polynomial(RingContext::Integers, &refs)?;

    let generic = Matrix::from_fn(ctx.clone(), n as usize, n as usize, |i, j| {
        ctx.var(&format!("g{}_{}", i + 1, j + 1)).unwrap()
    });
    let w = compound(&generic, m)?;
    // x^t_I as ring elements, indexed by slot then lex rank
    let x = |t: usize, rank: usize| -> RingElement {
        let label: String = sets[rank].elems().iter().map(|e| e.to_string()).collect();
        ctx.var(&format!("x{}_{}", t + 1, label)).unwrap()
    };
    // (W x^t)_I
    let wx = |t: usize, rank: usize| -> RingElement {
        let mut acc = ctx.zero();
        for j in 0..big_n {
            let e = w.get(rank, j);
            if !e.is_zero() {
                acc = acc.add(&e.mul(&x(t, j)));
            }
        }
        acc
    };

    let f = build_form(n, m, &(1..=n).collect::<Vec<_>>())?;
    let monomials: Vec<(Vec<IndexSet>, i8)> = if m % 2 == 0 {
        f.q_monomials()
    } else {
        f.monomials().to_vec()
    };

    let mut lhs = ctx.zero();
    let mut rhs_form = ctx.zero();
    for (blocks, sign) in &monomials {
        let mut term = ctx.from_i64(*sign as i64);
        let mut plain = ctx.from_i64(*sign as i64);
        for (t, b) in blocks.iter().enumerate() {
            let slot = if m % 2 == 0 { 0 } else { t };
            let rank = b.lex_rank() as usize - 1;
            term = term.mul(&wx(slot, rank));
            plain = plain.mul(&x(slot, rank));
        }
        lhs = lhs.add(&term);
        rhs_form = rhs_form.add(&plain);
    }
    let det = generic.det_division_free()?;
    Ok(lhs == det.mul(&rhs_form))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn zmod(k: u64) -> RingContext {
        RingContext::integers_mod(k).unwrap()
    }

    fn full(n: u32) -> Vec<u32> {
        (1..=n).collect()
    }

    fn random_invertible(ctx: &RingContext, n: usize, rng: &mut ChaCha8Rng) -> Matrix {
        loop {
            let k = ctx.modulus().unwrap() as i64;
            let m = Matrix::from_fn(ctx.clone(), n, n, |_, _| ctx.from_i64(rng.gen_range(0..k)));
            if m.det_division_free().unwrap().is_unit() {
                return m;
            }
        }
    }

    #[test]
    fn klein_quadric_form() {
        let f = build_form(4, 2, &full(4)).unwrap();
        assert_eq!(f.arity(), 2);
        assert!(!f.is_alternating());
        let q = f.q_monomials();
        // q = x12 x34 - x13 x24 + x14 x23
        assert_eq!(q.len(), 3);
        let as_tuples: Vec<(Vec<Vec<u32>>, i8)> = q
            .iter()
            .map(|(blocks, s)| (blocks.iter().map(|b| b.elems().to_vec()).collect(), *s))
            .collect();
        assert_eq!(
            as_tuples,
            vec![
                (vec![vec![1, 2], vec![3, 4]], 1),
                (vec![vec![1, 3], vec![2, 4]], -1),
                (vec![vec![1, 4], vec![2, 3]], 1),
            ]
        );
        // ordered table has both block orders
        assert_eq!(f.monomials().len(), 6);
    }

    #[test]
    fn alternating_two_form() {
        let f = build_form(2, 1, &full(2)).unwrap();
        assert!(f.is_alternating());
        let m: Vec<(Vec<Vec<u32>>, i8)> = f
            .monomials()
            .iter()
            .map(|(blocks, s)| (blocks.iter().map(|b| b.elems().to_vec()).collect(), *s))
            .collect();
        // f(x1, x2) = x1_1 x2_2 - x1_2 x2_1
        assert_eq!(
            m,
            vec![(vec![vec![1], vec![2]], 1), (vec![vec![2], vec![1]], -1)]
        );
    }

    #[test]
    fn six_two_form_has_fifteen_monomials() {
        let f = build_form(6, 2, &full(6)).unwrap();
        // 5 * 3 * 1 unordered partitions of [6] into pairs
        assert_eq!(f.q_monomials().len(), 15);
        assert_eq!(f.monomials().len(), 90);
        assert!(f.q_monomials().iter().all(|(_, s)| *s == 1 || *s == -1));
        assert!(matches!(
            build_form(6, 4, &full(6)),
            Err(FormsError::BlockSizeMismatch(4, 6))
        ));
    }

    #[test]
    fn transform_by_identity_and_scalar() {
        let z9 = zmod(9);
        let f = build_form(4, 2, &full(4)).unwrap();
        let id = Matrix::identity(&z9, 6);
        assert_eq!(transform_form(&f, &id).unwrap(), f.table_in(&z9));

        let lambda = z9.from_i64(2);
        let scaled = id.scalar_mul(&lambda);
        // k-linearity: each of the k = 2 slots picks up lambda
        assert_eq!(
            transform_form(&f, &scaled).unwrap(),
            f.table_in(&z9).scale(&lambda.mul(&lambda))
        );
    }

    #[test]
    fn elementary_compound_fixes_the_form() {
        let z8 = zmod(8);
        let f = build_form(4, 2, &full(4)).unwrap();
        for i in 1..=4usize {
            for j in 1..=4usize {
                if i == j {
                    continue;
                }
                for xi in 0..8 {
                    let t = crate::linalg::Transvection::new(4, i, j, z8.from_i64(xi)).unwrap();
                    let c = compound(&t.matrix(), 2).unwrap();
                    assert_eq!(transform_form(&f, &c).unwrap(), f.table_in(&z8));
                }
            }
        }
    }

    #[test]
    fn compound_multiplier_is_determinant() {
        let z9 = zmod(9);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let h = random_invertible(&z9, 4, &mut rng);
            let g = compound(&h, 2).unwrap();
            let lambda = membership_gf_bar(4, 2, &g).unwrap().unwrap();
            assert_eq!(lambda, h.det_division_free().unwrap());
        }
        // identity has multiplier 1
        let id = Matrix::identity(&z9, 6);
        assert!(membership_gf_bar(4, 2, &id).unwrap().unwrap().is_one());
    }

    #[test]
    fn multiplier_of_diagonal_is_its_unit() {
        let z9 = zmod(9);
        for xi in [2i64, 4, 5, 7, 8] {
            let d = Matrix::from_fn(z9.clone(), 4, 4, |i, j| {
                if i != j {
                    z9.zero()
                } else if i == 0 {
                    z9.from_i64(xi)
                } else {
                    z9.one()
                }
            });
            let g = compound(&d, 2).unwrap();
            let lambda = membership_gf_bar(4, 2, &g).unwrap().unwrap();
            assert_eq!(lambda, z9.from_i64(xi));
        }
    }

    #[test]
    fn multiplier_is_multiplicative() {
        let z9 = zmod(9);
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..8 {
            let a = compound(&random_invertible(&z9, 4, &mut rng), 2).unwrap();
            let b = compound(&random_invertible(&z9, 4, &mut rng), 2).unwrap();
            let la = membership_gf_bar(4, 2, &a).unwrap().unwrap();
            let lb = membership_gf_bar(4, 2, &b).unwrap().unwrap();
            let lab = membership_gf_bar(4, 2, &a.mul(&b).unwrap())
                .unwrap()
                .unwrap();
            assert_eq!(lab, la.mul(&lb));
        }
    }

    #[test]
    fn distance_zero_transvection_is_not_a_member() {
        // t_({1,2},{3,4})(1) sends x12 -> x12 + x34 and injects an x34^2
        // term into the Klein quadric, so it stabilizes neither exactly nor
        // up to a unit.
        let z8 = zmod(8);
        let mut g = Matrix::identity(&z8, 6);
        g.set(0, 5, z8.one());
        assert!(!membership_gf(4, 2, &g).unwrap());
        assert!(membership_gf_bar(4, 2, &g).unwrap().is_none());
        // wrong-divisibility guards
        assert!(matches!(
            membership_gf_bar(5, 2, &Matrix::identity(&z8, 10)),
            Err(FormsError::UseGyBar)
        ));
        assert!(matches!(
            membership_gy_bar(4, 2, &Matrix::identity(&z8, 6)),
            Err(FormsError::UseGfBar)
        ));
    }

    #[test]
    fn gy_membership_identity_and_compounds() {
        let f5 = RingContext::prime_field(5).unwrap();
        let id = Matrix::identity(&f5, 10);
        let w = membership_gy_bar(5, 2, &id).unwrap().unwrap();
        assert_eq!(w.subsets.len(), 5);
        assert!(w.lambdas().iter().all(|l| l.is_one()));
        assert!(w.cross().is_empty());

        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..5 {
            let h = random_invertible(&f5, 5, &mut rng);
            let g = compound(&h, 2).unwrap();
            let w = membership_gy_bar(5, 2, &g).unwrap();
            assert!(w.is_some(), "compound must stabilize the form ideal");
        }

        // wedge image of a 5-cycle permutes the subsets V_j: zero diagonal
        // multipliers but an invertible multiplier matrix
        let mut p = Matrix::zeros(&f5, 5, 5);
        for i in 0..5 {
            p.set(i, (i + 1) % 5, f5.one());
        }
        let g = compound(&p, 2).unwrap();
        let w = membership_gy_bar(5, 2, &g).unwrap().unwrap();
        assert!(w.lambdas().iter().all(|l| l.is_zero()));
    }

    #[test]
    fn gy_membership_rejects_random_matrices() {
        let f5 = RingContext::prime_field(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..5 {
            let g = random_invertible(&f5, 10, &mut rng);
            assert!(membership_gy_bar(5, 2, &g).unwrap().is_none());
        }
    }

    #[test]
    fn odd_m_form_alternates_in_its_slots() {
        let f7 = RingContext::prime_field(7).unwrap();
        let f = build_form(6, 3, &full(6)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..10 {
            let x: Vec<RingElement> = (0..20).map(|_| f7.from_i64(rng.gen_range(0..7))).collect();
            let y: Vec<RingElement> = (0..20).map(|_| f7.from_i64(rng.gen_range(0..7))).collect();
            let xy = f.eval(&[x.clone(), y.clone()]).unwrap();
            let yx = f.eval(&[y, x]).unwrap();
            assert_eq!(xy, yx.neg());
        }
    }

    #[test]
    fn polarization_restricts_to_factorial_times_q() {
        // even m over Q: f(x, ..., x) = k! q(x)
        for (n, m) in [(4u32, 2usize), (6, 2)] {
            let f = build_form(n, m, &full(n)).unwrap();
            let k = f.arity();
            let sets = IndexSet::all(n, m);
            let names: Vec<String> = sets
                .iter()
                .map(|s| {
                    format!(
                        "x_{}",
                        s.elems().iter().map(|e| e.to_string()).collect::<String>()
                    )
                })
                .collect();
            let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            let ctx = RingContext::polynomial(RingContext::Rationals, &refs).unwrap();
            let x: Vec<RingElement> = names.iter().map(|v| ctx.var(v).unwrap()).collect();
            let diag = f.eval(&vec![x.clone(); k]).unwrap();
            let mut q = ctx.zero();
            for (blocks, sign) in f.q_monomials() {
                let mut term = ctx.from_i64(sign as i64);
                for b in blocks {
                    term = term.mul(&x[b.lex_rank() as usize - 1]);
                }
                q = q.add(&term);
            }
            let factorial: i64 = (1..=k as i64).product();
            assert_eq!(diag, q.mul_i64(factorial));
        }
    }

    #[test]
    fn symbolic_invariance_small_cases() {
        assert!(symbolic_invariance_check(2, 1).unwrap());
        assert!(symbolic_invariance_check(4, 2).unwrap());
        assert!(matches!(
            symbolic_invariance_check(8, 2),
            Err(FormsError::SizeCap(8, 2, 28))
        ));
    }

    #[test]
    fn form_export_golden_json() {
        let f = build_form(4, 2, &full(4)).unwrap();
        let json = serde_json::to_string(&f.export()).unwrap();
        assert_eq!(
            json,
            "{\"n\":4,\"m\":2,\"V\":[1,2,3,4],\"arity\":2,\"alternating\":false,\
             \"monomials\":[{\"blocks\":[[1,2],[3,4]],\"sign\":1},\
             {\"blocks\":[[1,3],[2,4]],\"sign\":-1},\
             {\"blocks\":[[1,4],[2,3]],\"sign\":1}]}"
        );
    }
}

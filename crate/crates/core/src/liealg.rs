//! Exact Lie-algebra dimensions of the form-stabilizer groups.
//!
//! Writing a group element near the identity as 1 + eps*X over dual numbers
//! linearizes the invariance condition into a linear system in the matrix
//! unknown X (plus a multiplier unknown for the similarity groups). The
//! dimension of the solution space over a field is computed by exact sparse
//! elimination.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::exterior::{binomial, IndexSet};
use crate::forms::{build_form, pack_key, unpack_key, FormsError};
use crate::ring::{RingContext, RingElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("m divides n: Gf/GfBar apply, not GYBar")]
    DividesUseGf,
    #[error("m does not divide n: GYBar applies")]
    DividesUseGy,
    #[error("Lie dimensions are computed over fields, got {0}")]
    NotAField(String),
    #[error(transparent)]
    Forms(#[from] FormsError),
}

/// Which stabilizer group the system linearizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabGroup {
    Gf,
    GfBar,
    GyBar,
}

impl StabGroup {
    pub fn name(&self) -> &'static str {
        match self {
            StabGroup::Gf => "Gf",
            StabGroup::GfBar => "GfBar",
            StabGroup::GyBar => "GYBar",
        }
    }
}

/// A sparse linear system over a field. Unknowns are the N^2 entries of X
/// in row-major order; for the similarity groups one trailing multiplier
/// unknown is appended.
#[derive(Debug, Clone)]
pub struct LieSystem {
    pub field: RingContext,
    pub big_n: usize,
    pub unknowns: usize,
    pub has_multiplier: bool,
    rows: Vec<Vec<(u32, RingElement)>>,
}

impl LieSystem {
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    /// Exact dimension of the solution space.
    pub fn dimension(&self) -> usize {
        let mut ech = SparseEchelon::new(&self.field);
        for row in &self.rows {
            ech.reduce_insert(row.iter().cloned().collect());
        }
        self.unknowns - ech.rank()
    }

    /// A basis of the solution space, one vector per free column.
    pub fn nullspace_basis(&self) -> Vec<Vec<RingElement>> {
        let mut ech = SparseEchelon::new(&self.field);
        for row in &self.rows {
            ech.reduce_insert(row.iter().cloned().collect());
        }
        ech.back_substitute();
        ech.free_basis(self.unknowns)
    }

    /// Whether the vector satisfies every equation exactly.
    pub fn is_solution(&self, v: &[RingElement]) -> bool {
        assert_eq!(v.len(), self.unknowns);
        self.rows.iter().all(|row| {
            let mut acc = self.field.zero();
            for (c, coef) in row {
                acc = acc.add(&coef.mul(&v[*c as usize]));
            }
            acc.is_zero()
        })
    }
}

struct SparseEchelon {
    field: RingContext,
    pivots: BTreeMap<u32, BTreeMap<u32, RingElement>>,
}

impl SparseEchelon {
    fn new(field: &RingContext) -> Self {
        SparseEchelon {
            field: field.clone(),
            pivots: BTreeMap::new(),
        }
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn reduce_insert(&mut self, mut row: BTreeMap<u32, RingElement>) -> bool {
        loop {
            row.retain(|_, v| !v.is_zero());
            let Some((&lead, lead_val)) = row.iter().next() else {
                return false;
            };
            match self.pivots.get(&lead) {
                Some(pivot) => {
                    let coef = lead_val.clone();
                    for (c, v) in pivot {
                        let delta = coef.mul(v);
                        let entry = match row.get(c) {
                            Some(cur) => cur.sub(&delta),
                            None => delta.neg(),
                        };
                        if entry.is_zero() {
                            row.remove(c);
                        } else {
                            row.insert(*c, entry);
                        }
                    }
                }
                None => {
                    let inv = lead_val.inverse().expect("field element invertible");
                    let normalized: BTreeMap<u32, RingElement> =
                        row.iter().map(|(c, v)| (*c, v.mul(&inv))).collect();
                    self.pivots.insert(lead, normalized);
                    return true;
                }
            }
        }
    }

    /// Brings the pivot rows to reduced echelon form.
    fn back_substitute(&mut self) {
        let cols: Vec<u32> = self.pivots.keys().rev().cloned().collect();
        for &c in &cols {
            let pivot_row = self.pivots.get(&c).unwrap().clone();
            let earlier: Vec<u32> = self
                .pivots
                .keys()
                .filter(|&&k| k < c)
                .cloned()
                .collect();
            for e in earlier {
                let row = self.pivots.get_mut(&e).unwrap();
                let Some(coef) = row.get(&c).cloned() else {
                    continue;
                };
                for (cc, v) in &pivot_row {
                    let delta = coef.mul(v);
                    let entry = match row.get(cc) {
                        Some(cur) => cur.sub(&delta),
                        None => delta.neg(),
                    };
                    if entry.is_zero() {
                        row.remove(cc);
                    } else {
                        row.insert(*cc, entry);
                    }
                }
            }
        }
    }

    /// After back substitution: one solution vector per free column.
    fn free_basis(&self, unknowns: usize) -> Vec<Vec<RingElement>> {
        let mut basis = Vec::new();
        for free in 0..unknowns as u32 {
            if self.pivots.contains_key(&free) {
                continue;
            }
            let mut v = vec![self.field.zero(); unknowns];
            v[free as usize] = self.field.one();
            for (c, row) in &self.pivots {
                if let Some(coef) = row.get(&free) {
                    v[*c as usize] = coef.neg();
                }
            }
            basis.push(v);
        }
        basis
    }
}

fn require_field(field: &RingContext) -> Result<(), LieError> {
    if field.is_field() {
        Ok(())
    } else {
        Err(LieError::NotAField(field.to_string()))
    }
}

/// Integer-coefficient row accumulator keyed by the monomial the equation
/// extracts; converted to field rows at the end.
type RawRows = BTreeMap<u64, BTreeMap<u32, i64>>;

fn raw_to_sparse(field: &RingContext, raw: BTreeMap<u32, i64>) -> Vec<(u32, RingElement)> {
    raw.into_iter()
        .filter_map(|(c, v)| {
            let e = field.from_i64(v);
            if e.is_zero() {
                None
            } else {
                Some((c, e))
            }
        })
        .collect()
}

/// Rows of sum_i F(x^1, ..., X x^i, ..., x^k), one per extracted monomial:
/// replacing slot i of a partition key I by an arbitrary J contributes
/// sign(I) * X[I_i, J].
fn derivation_rows(
    n: u32,
    m: usize,
    v: &[u32],
) -> Result<(RawRows, Vec<(u64, i8)>), FormsError> {
    let f = build_form(n, m, v)?;
    let big_n = binomial(n as u64, m as u64) as usize;
    let mut rows: RawRows = BTreeMap::new();
    let mut ranks: Vec<u64> = Vec::new();
    for (blocks, sign) in f.monomials() {
        ranks.clear();
        ranks.extend(blocks.iter().map(|b| b.lex_rank()));
        for slot in 0..blocks.len() {
            let irank = ranks[slot];
            let saved = ranks[slot];
            for jrank in 1..=big_n as u64 {
                ranks[slot] = jrank;
                let key = pack_key(&ranks);
                let col = ((irank - 1) as usize * big_n + (jrank - 1) as usize) as u32;
                *rows.entry(key).or_default().entry(col).or_insert(0) += *sign as i64;
            }
            ranks[slot] = saved;
        }
    }
    let partition_keys: Vec<(u64, i8)> = f
        .monomials()
        .iter()
        .map(|(blocks, sign)| {
            let key = pack_key(&blocks.iter().map(|b| b.lex_rank()).collect::<Vec<_>>());
            (key, *sign)
        })
        .collect();
    Ok((rows, partition_keys))
}

/// System for Lie(G_f): the derivation of the full form vanishes
/// identically. With `with_multiplier`, the similarity version
/// (derivation equals the multiplier derivative times the form).
pub fn assemble_gf_system(
    n: u32,
    m: usize,
    field: &RingContext,
    with_multiplier: bool,
) -> Result<LieSystem, LieError> {
    require_field(field)?;
    if m == 0 || n as usize % m != 0 {
        return Err(LieError::DividesUseGy);
    }
    let big_n = binomial(n as u64, m as u64) as usize;
    let full: Vec<u32> = (1..=n).collect();
    let (mut rows, partition_keys) = derivation_rows(n, m, &full)?;
    let unknowns = if with_multiplier {
        big_n * big_n + 1
    } else {
        big_n * big_n
    };
    if with_multiplier {
        let lambda_col = (big_n * big_n) as u32;
        for (key, sign) in &partition_keys {
            *rows.entry(*key).or_default().entry(lambda_col).or_insert(0) -= *sign as i64;
        }
    }
    let rows = rows
        .into_values()
        .map(|r| raw_to_sparse(field, r))
        .filter(|r| !r.is_empty())
        .collect();
    Ok(LieSystem {
        field: field.clone(),
        big_n,
        unknowns,
        has_multiplier: with_multiplier,
        rows,
    })
}

/// System for Lie(G_Y-bar): for every ml-subset V_j, the derivation of F_j
/// must lie in the span of all the F_V. Span directions are eliminated by
/// pairing each partition-shaped monomial with a reference monomial of the
/// same subset, leaving linear conditions on X alone.
pub fn assemble_gy_system(n: u32, m: usize, field: &RingContext) -> Result<LieSystem, LieError> {
    require_field(field)?;
    if m == 0 || n as usize % m == 0 {
        return Err(LieError::DividesUseGf);
    }
    let l = n as usize / m;
    let ml = l * m;
    let big_n = binomial(n as u64, m as u64) as usize;
    let subsets: Vec<IndexSet> = IndexSet::all(n, ml);
    let mut out_rows: Vec<Vec<(u32, RingElement)>> = Vec::new();
    for vset in &subsets {
        let (rows, _) = derivation_rows(n, m, vset.elems())?;
        // classify each extracted monomial by the union of its blocks
        let mut by_subset: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
        let mut overlapping: Vec<u64> = Vec::new();
        for key in rows.keys() {
            let ranks = unpack_key(*key, l);
            let sets: Vec<IndexSet> = ranks
                .iter()
                .map(|r| IndexSet::unrank(n, m, *r).unwrap())
                .collect();
            let mut union: Vec<u32> = sets.iter().flat_map(|s| s.elems().to_vec()).collect();
            union.sort_unstable();
            union.dedup();
            if union.len() != ml {
                overlapping.push(*key);
                continue;
            }
            let target = IndexSet::new(n, union).unwrap();
            let idx = subsets.binary_search(&target).unwrap();
            by_subset.entry(idx).or_default().push(*key);
        }
        // outside the span: coefficient must vanish
        for key in overlapping {
            let row = raw_to_sparse(field, rows[&key].clone());
            if !row.is_empty() {
                out_rows.push(row);
            }
        }
        // inside: proportional to the subset's sign vector
        for (idx, _) in by_subset {
            let fw = build_form(n, m, subsets[idx].elems())?;
            let keys_signs: Vec<(u64, i8)> = fw
                .monomials()
                .iter()
                .map(|(blocks, sign)| {
                    (
                        pack_key(&blocks.iter().map(|b| b.lex_rank()).collect::<Vec<_>>()),
                        *sign,
                    )
                })
                .collect();
            let (ref_key, ref_sign) = keys_signs[0];
            let ref_row = rows.get(&ref_key).cloned().unwrap_or_default();
            for (key, sign) in keys_signs.iter().skip(1) {
                let row = rows.get(key).cloned().unwrap_or_default();
                // sign_ref * row(K) - sign_K * row(ref) = 0
                let mut combined: BTreeMap<u32, i64> = BTreeMap::new();
                for (c, v) in &row {
                    *combined.entry(*c).or_insert(0) += (ref_sign as i64) * v;
                }
                for (c, v) in &ref_row {
                    *combined.entry(*c).or_insert(0) -= (*sign as i64) * v;
                }
                let sparse = raw_to_sparse(field, combined);
                if !sparse.is_empty() {
                    out_rows.push(sparse);
                }
            }
        }
    }
    Ok(LieSystem {
        field: field.clone(),
        big_n,
        unknowns: big_n * big_n,
        has_multiplier: false,
        rows: out_rows,
    })
}

pub fn lie_dim_gf(n: u32, m: usize, field: &RingContext) -> Result<usize, LieError> {
    Ok(assemble_gf_system(n, m, field, false)?.dimension())
}

pub fn lie_dim_gf_bar(n: u32, m: usize, field: &RingContext) -> Result<usize, LieError> {
    Ok(assemble_gf_system(n, m, field, true)?.dimension())
}

pub fn lie_dim_gy_bar(n: u32, m: usize, field: &RingContext) -> Result<usize, LieError> {
    Ok(assemble_gy_system(n, m, field)?.dimension())
}

/// The upper bound the computed dimension is checked against: n^2 - 1 for
/// G_f and n^2 for the similarity groups away from the half-dimension case;
/// at n = 2m the stabilizer is the full orthogonal or symplectic similitude
/// group, whose classical dimension applies instead.
pub fn dim_bound(group: StabGroup, n: u32, m: usize) -> usize {
    let n = n as usize;
    let big_n = binomial(n as u64, m as u64) as usize;
    let half_dim = n == 2 * m;
    match group {
        StabGroup::Gf => {
            if half_dim {
                if m % 2 == 0 {
                    big_n * (big_n - 1) / 2
                } else {
                    big_n * (big_n + 1) / 2
                }
            } else {
                n * n - 1
            }
        }
        StabGroup::GfBar => {
            if half_dim {
                1 + if m % 2 == 0 {
                    big_n * (big_n - 1) / 2
                } else {
                    big_n * (big_n + 1) / 2
                }
            } else {
                n * n
            }
        }
        StabGroup::GyBar => n * n,
    }
}

/// Machine-readable record of one dimension computation.
#[derive(Debug, Clone, Serialize)]
pub struct LieReport {
    pub n: u32,
    pub m: usize,
    pub field: String,
    pub group: String,
    pub dim: usize,
    pub bound: usize,
    pub elapsed_ms: u128,
}

pub fn lie_report(
    group: StabGroup,
    n: u32,
    m: usize,
    field: &RingContext,
) -> Result<LieReport, LieError> {
    let start = Instant::now();
    let dim = match group {
        StabGroup::Gf => lie_dim_gf(n, m, field)?,
        StabGroup::GfBar => lie_dim_gf_bar(n, m, field)?,
        StabGroup::GyBar => lie_dim_gy_bar(n, m, field)?,
    };
    Ok(LieReport {
        n,
        m,
        field: field.to_string(),
        group: group.name().to_string(),
        dim,
        bound: dim_bound(group, n, m),
        elapsed_ms: start.elapsed().as_millis(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{compound, sign_of_partition};
    use crate::forms::membership_gf_bar;
    use crate::linalg::Matrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q() -> RingContext {
        RingContext::Rationals
    }

    fn fp(p: u64) -> RingContext {
        RingContext::prime_field(p).unwrap()
    }

    #[test]
    fn half_dimension_case_four_two() {
        // stabilizer of the Klein quadric: so_6 and gso_6
        assert_eq!(lie_dim_gf(4, 2, &q()).unwrap(), 15);
        assert_eq!(lie_dim_gf_bar(4, 2, &q()).unwrap(), 16);
        assert_eq!(lie_dim_gf(4, 2, &fp(5)).unwrap(), 15);
        assert_eq!(lie_dim_gf_bar(4, 2, &fp(5)).unwrap(), 16);
        assert_eq!(dim_bound(StabGroup::Gf, 4, 2), 15);
        assert_eq!(dim_bound(StabGroup::GfBar, 4, 2), 16);
    }

    #[test]
    fn gram_matrix_oracle_for_half_dimension_cases() {
        // independent route: Lie algebra of the Gram-matrix stabilizer
        // {X : X^T S + S X = 0} via dense nullspace
        for (n, m, field, expected) in [
            (4u32, 2usize, q(), 15usize),
            (4, 2, fp(3), 15),
            (6, 3, fp(5), 210),
            (6, 3, fp(2), 210),
        ] {
            let big_n = binomial(n as u64, m as u64) as usize;
            let f = build_form(n, m, &(1..=n).collect::<Vec<_>>()).unwrap();
            let mut gram = Matrix::zeros(&field, big_n, big_n);
            for (blocks, sign) in f.monomials() {
                let r = blocks[0].lex_rank() as usize - 1;
                let c = blocks[1].lex_rank() as usize - 1;
                gram.set(r, c, field.from_i64(*sign as i64));
            }
            // rows: equations X^T S + S X = 0, unknowns X row-major
            let mut system = Matrix::zeros(&field, big_n * big_n, big_n * big_n);
            for a in 0..big_n {
                for b in 0..big_n {
                    let row = a * big_n + b;
                    for t in 0..big_n {
                        // (X^T S)[a][b] = sum_t X[t][a] S[t][b]
                        let col = t * big_n + a;
                        let cur = system.get(row, col).add(gram.get(t, b));
                        system.set(row, col, cur);
                        // (S X)[a][b] = sum_t S[a][t] X[t][b]
                        let col = t * big_n + b;
                        let cur = system.get(row, col).add(gram.get(a, t));
                        system.set(row, col, cur);
                    }
                }
            }
            assert_eq!(system.nullspace_dim().unwrap(), expected);
            assert_eq!(lie_dim_gf(n, m, &field).unwrap(), expected);
        }
    }

    #[test]
    fn sparse_and_dense_elimination_agree() {
        let sys = assemble_gf_system(4, 2, &q(), true).unwrap();
        let mut dense = Matrix::zeros(&q(), sys.rows(), sys.unknowns);
        for (i, row) in sys.rows.iter().enumerate() {
            for (c, v) in row {
                dense.set(i, *c as usize, v.clone());
            }
        }
        assert_eq!(dense.nullspace_dim().unwrap(), sys.dimension());
    }

    #[test]
    fn gy_dimension_five_two() {
        assert_eq!(lie_dim_gy_bar(5, 2, &q()).unwrap(), 25);
        assert_eq!(lie_dim_gy_bar(5, 2, &fp(3)).unwrap(), 25);
        assert!(matches!(
            lie_dim_gy_bar(4, 2, &q()),
            Err(LieError::DividesUseGf)
        ));
        assert!(matches!(
            lie_dim_gf(5, 2, &q()),
            Err(LieError::DividesUseGy)
        ));
        assert!(matches!(
            lie_dim_gf(4, 2, &RingContext::Integers),
            Err(LieError::NotAField(_))
        ));
    }

    #[test]
    fn nullspace_vectors_satisfy_the_system() {
        let field = fp(5);
        let sys = assemble_gf_system(4, 2, &field, true).unwrap();
        let basis = sys.nullspace_basis();
        assert_eq!(basis.len(), 16);
        for v in &basis {
            assert!(sys.is_solution(v));
        }
    }

    #[test]
    fn dual_number_lift_of_nullspace_vectors_is_a_group_member() {
        // random combinations X of nullspace vectors: 1 + eps X satisfies
        // the similarity condition with multiplier 1 + eps lambda-dot
        let field = fp(5);
        let duals = RingContext::dual_numbers(field.clone()).unwrap();
        let sys = assemble_gf_system(4, 2, &field, true).unwrap();
        let basis = sys.nullspace_basis();
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let big_n = sys.big_n;
        for _ in 0..5 {
            let mut combo = vec![field.zero(); sys.unknowns];
            for b in &basis {
                let c = field.from_i64(rng.gen_range(0..5));
                for (acc, v) in combo.iter_mut().zip(b) {
                    *acc = acc.add(&c.mul(v));
                }
            }
            let g = Matrix::from_fn(duals.clone(), big_n, big_n, |i, j| {
                let x = combo[i * big_n + j].clone();
                let real = if i == j { field.one() } else { field.zero() };
                duals.dual_from_parts(real, x).unwrap()
            });
            let lambda = membership_gf_bar(4, 2, &g).unwrap().expect("member");
            let expected = duals
                .dual_from_parts(field.one(), combo[sys.unknowns - 1].clone())
                .unwrap();
            assert_eq!(lambda, expected);
        }
    }

    #[test]
    fn compound_derivation_lands_in_the_lie_algebra() {
        // d/d eps of compound(1 + eps x) solves the linearized system; the
        // multiplier derivative is the trace of x
        let field = fp(7);
        let duals = RingContext::dual_numbers(field.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for (n, m, group) in [(4u32, 2usize, StabGroup::GfBar), (5, 2, StabGroup::GyBar)] {
            let sys = match group {
                StabGroup::GfBar => assemble_gf_system(n, m, &field, true).unwrap(),
                StabGroup::GyBar => assemble_gy_system(n, m, &field).unwrap(),
                StabGroup::Gf => unreachable!(),
            };
            for _ in 0..5 {
                let x = Matrix::from_fn(duals.clone(), n as usize, n as usize, |i, j| {
                    let real = if i == j { field.one() } else { field.zero() };
                    duals
                        .dual_from_parts(real, field.from_i64(rng.gen_range(0..7)))
                        .unwrap()
                });
                let w = compound(&x, m).unwrap();
                let mut v = Vec::with_capacity(sys.unknowns);
                let mut trace = field.zero();
                for i in 0..n as usize {
                    let (_, eps) = x.get(i, i).dual_parts().unwrap();
                    trace = trace.add(eps);
                }
                for i in 0..sys.big_n {
                    for j in 0..sys.big_n {
                        let (_, eps) = w.get(i, j).dual_parts().unwrap();
                        v.push(eps.clone());
                    }
                }
                if sys.has_multiplier {
                    v.push(trace);
                }
                assert!(sys.is_solution(&v), "derivation outside Lie algebra");
            }
        }
    }

    #[test]
    fn six_two_dimensions() {
        assert_eq!(lie_dim_gf(6, 2, &fp(5)).unwrap(), 35);
        assert_eq!(lie_dim_gf_bar(6, 2, &fp(5)).unwrap(), 36);
    }

    #[test]
    fn report_shape() {
        let r = lie_report(StabGroup::GfBar, 4, 2, &q()).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["dim"], 16);
        assert_eq!(json["bound"], 16);
        assert_eq!(json["field"], "Q");
        assert_eq!(json["group"], "GfBar");
    }

    #[test]
    #[ignore = "extended tier: N = 35 system"]
    fn seven_three_extended() {
        assert_eq!(lie_dim_gy_bar(7, 3, &fp(2)).unwrap(), 49);
    }

    #[test]
    fn shuffle_sign_consistency_in_assembly() {
        // the reference monomial used to eliminate span directions must be
        // the lex-first ordered partition
        let f = build_form(5, 2, &[1, 2, 3, 4]).unwrap();
        let first = &f.monomials()[0];
        assert_eq!(
            first.0.iter().map(|b| b.elems().to_vec()).collect::<Vec<_>>(),
            vec![vec![1, 2], vec![3, 4]]
        );
        assert_eq!(
            sign_of_partition(&[1, 2, 3, 4], &first.0).unwrap(),
            first.1
        );
    }
}

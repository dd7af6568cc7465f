//! Deterministic finite-group machinery for matrix groups over Z/k or F_p
//! acting on the module R^N: orbits, stabilizer chains, exact membership,
//! and group order.
//!
//! The chain is built by the classical deterministic Schreier-Sims
//! procedure: every Schreier generator of every level is sifted through the
//! chain below, and residues are installed as new strong generators until
//! all of them sift to the identity. Transversal representatives are stored
//! as explicit matrix pairs (element and inverse), so sifting costs one
//! matrix product per level.

use std::collections::HashMap;

use num_bigint::BigUint;
use thiserror::Error;

use crate::linalg::Matrix;
use crate::ring::RingContext;

pub const DEFAULT_DOMAIN_CAP: u64 = 1 << 20;

/// Soft guard against runaway transversal storage; the desk-scale targets
/// stay far below it.
const TRANSVERSAL_BUDGET: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("engine domains require Z/k or F_p, got {0}")]
    UnsupportedRing(String),
    #[error("domain size {0}^{1} exceeds the cap {2}")]
    DomainCapExceeded(u64, usize, u64),
    #[error("modulus {0} too large for the engine (max 65535)")]
    ModulusTooLarge(u64),
    #[error("generator {0} is singular")]
    SingularGenerator(usize),
    #[error("matrix ring or size does not match the action domain")]
    DomainMismatch,
    #[error("transversal budget exceeded ({0} points stored)")]
    TransversalBudget(usize),
}

/// The finite module R^N with a bijective mixed-radix point encoding
/// (little-endian in the vector coordinates).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionDomain {
    ring: RingContext,
    modulus: u64,
    rank: usize,
    size: u64,
    cap: u64,
}

impl ActionDomain {
    pub fn new(ring: &RingContext, rank: usize, cap: Option<u64>) -> Result<Self, EngineError> {
        let modulus = ring
            .modulus()
            .ok_or_else(|| EngineError::UnsupportedRing(ring.to_string()))?;
        if modulus > u16::MAX as u64 {
            return Err(EngineError::ModulusTooLarge(modulus));
        }
        let cap = cap.unwrap_or(DEFAULT_DOMAIN_CAP);
        let mut size: u64 = 1;
        for _ in 0..rank {
            size = size
                .checked_mul(modulus)
                .filter(|s| *s <= cap)
                .ok_or(EngineError::DomainCapExceeded(modulus, rank, cap))?;
        }
        Ok(ActionDomain {
            ring: ring.clone(),
            modulus,
            rank,
            size,
            cap,
        })
    }

    pub fn ring(&self) -> &RingContext {
        &self.ring
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn encode(&self, v: &[u64]) -> u64 {
        debug_assert_eq!(v.len(), self.rank);
        let mut code = 0u64;
        for &x in v.iter().rev() {
            debug_assert!(x < self.modulus);
            code = code * self.modulus + x;
        }
        code
    }

    pub fn decode(&self, mut code: u64) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.rank);
        for _ in 0..self.rank {
            v.push(code % self.modulus);
            code /= self.modulus;
        }
        v
    }

    /// Code of the standard basis vector e_i (0-based i).
    pub fn basis_code(&self, i: usize) -> u64 {
        self.modulus.pow(i as u32)
    }
}

/// Dense matrix over Z/k with small entries, tuned for the permutation
/// action: residues in u16, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct FinMat {
    n: usize,
    modulus: u64,
    e: Vec<u16>,
}

impl FinMat {
    fn identity(n: usize, modulus: u64) -> Self {
        let mut e = vec![0u16; n * n];
        for i in 0..n {
            e[i * n + i] = 1;
        }
        FinMat { n, modulus, e }
    }

    fn from_matrix(m: &Matrix, domain: &ActionDomain) -> Result<Self, EngineError> {
        if m.rows() != domain.rank || m.cols() != domain.rank || m.context() != &domain.ring {
            return Err(EngineError::DomainMismatch);
        }
        let n = domain.rank;
        let mut e = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let r = m.get(i, j).residue().ok_or(EngineError::DomainMismatch)?;
                e.push(r as u16);
            }
        }
        Ok(FinMat {
            n,
            modulus: domain.modulus,
            e,
        })
    }

    fn mul(&self, other: &FinMat) -> FinMat {
        let n = self.n;
        let k = self.modulus;
        let mut e = vec![0u16; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc: u64 = 0;
                for l in 0..n {
                    acc += self.e[i * n + l] as u64 * other.e[l * n + j] as u64;
                }
                e[i * n + j] = (acc % k) as u16;
            }
        }
        FinMat {
            n,
            modulus: k,
            e,
        }
    }

    fn is_identity(&self) -> bool {
        let n = self.n;
        self.e.iter().enumerate().all(|(pos, &x)| {
            let expected = if pos / n == pos % n { 1 } else { 0 };
            x == expected
        })
    }

    fn act_code(&self, domain: &ActionDomain, code: u64) -> u64 {
        let v = domain.decode(code);
        let n = self.n;
        let k = self.modulus;
        let mut out = 0u64;
        // encode on the fly, little-endian
        let mut place = 1u64;
        for i in 0..n {
            let mut acc: u64 = 0;
            for (j, &x) in v.iter().enumerate() {
                acc += self.e[i * n + j] as u64 * x;
            }
            out += (acc % k) * place;
            place = place.wrapping_mul(k);
        }
        out
    }

    /// 0-based index of the first standard basis vector this matrix moves.
    fn first_moved_basis(&self) -> Option<usize> {
        let n = self.n;
        (0..n).find(|&i| (0..n).any(|j| self.e[j * n + i] != if i == j { 1 } else { 0 }))
    }
}

/// A group element carried together with its inverse, so transversal and
/// sifting updates never need on-the-fly inversion.
#[derive(Debug, Clone)]
struct Gp {
    fwd: FinMat,
    inv: FinMat,
}

impl Gp {
    fn identity(n: usize, modulus: u64) -> Self {
        Gp {
            fwd: FinMat::identity(n, modulus),
            inv: FinMat::identity(n, modulus),
        }
    }

    fn mul(&self, other: &Gp) -> Gp {
        Gp {
            fwd: self.fwd.mul(&other.fwd),
            inv: other.inv.mul(&self.inv),
        }
    }

    fn is_identity(&self) -> bool {
        self.fwd.is_identity()
    }
}

struct Level {
    base: u64,
    /// indices into the strong-generator pool; holds every generator whose
    /// depth is >= this level's index
    members: Vec<usize>,
    orbit: HashMap<u64, u32>,
    pts: Vec<u64>,
    reps: Vec<Gp>,
    orbit_done: Vec<usize>,
    schreier_done: Vec<usize>,
}

impl Level {
    fn new(base: u64, n: usize, modulus: u64) -> Self {
        let mut orbit = HashMap::new();
        orbit.insert(base, 0);
        Level {
            base,
            members: Vec::new(),
            orbit,
            pts: vec![base],
            reps: vec![Gp::identity(n, modulus)],
            orbit_done: Vec::new(),
            schreier_done: Vec::new(),
        }
    }
}

/// Base-and-strong-generators structure for the subgroup generated by the
/// input matrices, acting on the encoded module.
pub struct StabilizerChain {
    domain: ActionDomain,
    strong: Vec<(Gp, usize)>,
    levels: Vec<Level>,
    input_gens: Vec<FinMat>,
}

pub fn generate_group(
    gens: &[Matrix],
    domain: &ActionDomain,
) -> Result<StabilizerChain, EngineError> {
    let mut converted = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        let fin = FinMat::from_matrix(g, domain)?;
        let inv = g
            .inverse()
            .map_err(|_| EngineError::DomainMismatch)?
            .ok_or(EngineError::SingularGenerator(i))?;
        let inv = FinMat::from_matrix(&inv, domain)?;
        converted.push(Gp { fwd: fin, inv });
    }
    let mut chain = StabilizerChain {
        domain: domain.clone(),
        strong: Vec::new(),
        levels: Vec::new(),
        input_gens: converted.iter().map(|g| g.fwd.clone()).collect(),
    };
    for g in converted {
        if !g.is_identity() {
            chain.add_strong(g, 0)?;
        }
    }
    chain.complete()?;
    Ok(chain)
}

impl StabilizerChain {
    pub fn domain(&self) -> &ActionDomain {
        &self.domain
    }

    pub fn base_points(&self) -> Vec<u64> {
        self.levels.iter().map(|l| l.base).collect()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.pts.len()).collect()
    }

    pub fn strong_generator_count(&self) -> usize {
        self.strong.len()
    }

    /// Product of the transversal sizes along the chain.
    pub fn order(&self) -> BigUint {
        let mut acc = BigUint::from(1u32);
        for l in &self.levels {
            acc *= BigUint::from(l.pts.len() as u64);
        }
        acc
    }

    /// Exact membership by sifting; no randomness involved.
    pub fn contains(&self, g: &Matrix) -> Result<bool, EngineError> {
        let fin = FinMat::from_matrix(g, &self.domain)?;
        Ok(self.sift_fwd(fin, 0).0.is_identity())
    }

    /// Every strong generator must sift to the identity through the
    /// completed chain.
    pub fn verify(&self) -> bool {
        self.strong
            .iter()
            .all(|(g, _)| self.sift_fwd(g.fwd.clone(), 0).0.is_identity())
    }

    fn sift_fwd(&self, mut g: FinMat, from: usize) -> (FinMat, usize) {
        for l in from..self.levels.len() {
            let beta = g.act_code(&self.domain, self.levels[l].base);
            match self.levels[l].orbit.get(&beta) {
                None => return (g, l),
                Some(&idx) => {
                    g = self.levels[l].reps[idx as usize].inv.mul(&g);
                }
            }
        }
        let depth = self.levels.len();
        (g, depth)
    }

    fn sift_pair(&self, mut g: Gp, from: usize) -> (Gp, usize) {
        for l in from..self.levels.len() {
            let beta = g.fwd.act_code(&self.domain, self.levels[l].base);
            match self.levels[l].orbit.get(&beta) {
                None => return (g, l),
                Some(&idx) => {
                    let rep = &self.levels[l].reps[idx as usize];
                    g = Gp {
                        fwd: rep.inv.mul(&g.fwd),
                        inv: g.inv.mul(&rep.fwd),
                    };
                }
            }
        }
        let depth = self.levels.len();
        (g, depth)
    }

    fn add_strong(&mut self, g: Gp, depth: usize) -> Result<(), EngineError> {
        debug_assert!(depth <= self.levels.len());
        if depth == self.levels.len() {
            let moved = g
                .fwd
                .first_moved_basis()
                .expect("non-identity matrix moves a basis vector");
            let base = self.domain.basis_code(moved);
            self.levels
                .push(Level::new(base, self.domain.rank, self.domain.modulus));
        }
        let idx = self.strong.len();
        self.strong.push((g, depth));
        for l in 0..=depth {
            self.levels[l].members.push(idx);
            self.levels[l].orbit_done.push(0);
            self.levels[l].schreier_done.push(0);
            self.extend_orbit(l)?;
        }
        Ok(())
    }

    fn extend_orbit(&mut self, l: usize) -> Result<(), EngineError> {
        loop {
            let mut progressed = false;
            for slot in 0..self.levels[l].members.len() {
                let gen_idx = self.levels[l].members[slot];
                while self.levels[l].orbit_done[slot] < self.levels[l].pts.len() {
                    let p_idx = self.levels[l].orbit_done[slot];
                    self.levels[l].orbit_done[slot] += 1;
                    let p = self.levels[l].pts[p_idx];
                    let q = self.strong[gen_idx].0.fwd.act_code(&self.domain, p);
                    if !self.levels[l].orbit.contains_key(&q) {
                        let rep = self.strong[gen_idx].0.mul(&self.levels[l].reps[p_idx]);
                        let new_idx = self.levels[l].pts.len() as u32;
                        self.levels[l].orbit.insert(q, new_idx);
                        self.levels[l].pts.push(q);
                        self.levels[l].reps.push(rep);
                        progressed = true;
                    }
                }
            }
            if !progressed {
                break;
            }
        }
        let total: usize = self.levels.iter().map(|lv| lv.pts.len()).sum();
        if total > TRANSVERSAL_BUDGET {
            return Err(EngineError::TransversalBudget(total));
        }
        Ok(())
    }

    /// Next unprocessed Schreier pair at the level, advancing the watermark.
    fn next_pending(&mut self, l: usize) -> Option<(usize, usize)> {
        let level = &mut self.levels[l];
        for slot in 0..level.members.len() {
            if level.schreier_done[slot] < level.pts.len() {
                let p_idx = level.schreier_done[slot];
                level.schreier_done[slot] += 1;
                return Some((p_idx, slot));
            }
        }
        None
    }

    /// Processes pending Schreier pairs; on discovering a nontrivial
    /// residue, installs it and reports its depth. Sifting is forward-only;
    /// the inverse is recomputed only for the rare residues that survive.
    fn process_level(&mut self, l: usize) -> Result<Option<usize>, EngineError> {
        while let Some((p_idx, slot)) = self.next_pending(l) {
            let gen_idx = self.levels[l].members[slot];
            let s = &self.strong[gen_idx].0;
            let p = self.levels[l].pts[p_idx];
            let rp = &self.levels[l].reps[p_idx];
            let sp = s.fwd.act_code(&self.domain, p);
            let sp_idx = *self.levels[l]
                .orbit
                .get(&sp)
                .expect("orbit closed under generators");
            let rsp = &self.levels[l].reps[sp_idx as usize];
            // sigma = rep(s p)^-1 * s * rep(p) fixes the base point
            let sigma_fwd = rsp.inv.mul(&s.fwd).mul(&rp.fwd);
            if sigma_fwd.is_identity() {
                continue;
            }
            let (residue_fwd, depth) = self.sift_fwd(sigma_fwd, l + 1);
            if residue_fwd.is_identity() {
                continue;
            }
            let sigma = Gp {
                fwd: rsp.inv.mul(&s.fwd).mul(&rp.fwd),
                inv: rp.inv.mul(&s.inv).mul(&rsp.fwd),
            };
            let (residue, check_depth) = self.sift_pair(sigma, l + 1);
            debug_assert_eq!(check_depth, depth);
            debug_assert!(!residue.is_identity());
            self.add_strong(residue, depth)?;
            return Ok(Some(depth));
        }
        Ok(None)
    }

    fn complete(&mut self) -> Result<(), EngineError> {
        if self.levels.is_empty() {
            return Ok(());
        }
        let mut l = self.levels.len() as isize - 1;
        while l >= 0 {
            match self.process_level(l as usize)? {
                Some(depth) => {
                    l = depth.min(self.levels.len() - 1) as isize;
                }
                None => {
                    l -= 1;
                }
            }
        }
        debug_assert!(self.verify());
        Ok(())
    }

    /// The input generators sift back in; used as a construction sanity
    /// check by the level machinery.
    pub fn contains_all_inputs(&self) -> bool {
        self.input_gens
            .iter()
            .all(|g| self.sift_fwd(g.clone(), 0).0.is_identity())
    }
}

/// Breadth-first orbit of an encoded point under the generators,
/// deterministic over the generator order; returns points in discovery
/// order.
pub fn orbit(
    start: u64,
    gens: &[Matrix],
    domain: &ActionDomain,
) -> Result<Vec<u64>, EngineError> {
    let fins: Vec<FinMat> = gens
        .iter()
        .map(|g| FinMat::from_matrix(g, domain))
        .collect::<Result<_, _>>()?;
    let mut seen: HashMap<u64, ()> = HashMap::new();
    let mut pts = vec![start];
    seen.insert(start, ());
    let mut head = 0;
    while head < pts.len() {
        let p = pts[head];
        head += 1;
        for f in &fins {
            let q = f.act_code(domain, p);
            if !seen.contains_key(&q) {
                seen.insert(q, ());
                pts.push(q);
                if pts.len() as u64 > domain.size {
                    unreachable!("orbit exceeded domain size");
                }
            }
        }
    }
    Ok(pts)
}

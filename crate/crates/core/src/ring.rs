//! Exact arithmetic over the supported commutative rings.
//!
//! A [`RingContext`] names the ring; a [`RingElement`] carries its context
//! together with a canonical payload (arbitrary-precision integer, reduced
//! residue, fraction in lowest terms, dual number, or sparse multivariate
//! polynomial). Principal ideals of Z and Z/k back the level machinery.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("context mismatch: {0} vs {1}")]
    ContextMismatch(String, String),
    #[error("ideals are only supported over Z, Z/k, and F_p")]
    UnsupportedIdealRing,
    #[error("modulus must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("dual numbers require a field base, got {0}")]
    DualBaseNotField(String),
    #[error("polynomial variable names must be distinct")]
    DuplicateVariable,
    #[error("variable {0} missing from evaluation assignment")]
    MissingVariable(String),
    #[error("{0} is not defined in this polynomial ring")]
    UnknownVariable(String),
    #[error("operation {0} is not available over {1}")]
    UnsupportedOperation(&'static str, String),
}

/// Deterministic Miller-Rabin, exact for all u64 inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let pow = |mut b: u64, mut e: u64| -> u64 {
        let mut acc: u128 = 1;
        let mut bb = b as u128 % n as u128;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * bb % n as u128;
            }
            bb = bb * bb % n as u128;
            e >>= 1;
        }
        b = acc as u64;
        b
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[derive(Debug, PartialEq, Eq, Hash)]
pub struct PolyContext {
    pub base: RingContext,
    pub vars: Vec<String>,
}

/// Which ring values live in. Cheap to clone and compare.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RingContext {
    Integers,
    Rationals,
    IntegersMod(u64),
    PrimeField(u64),
    DualNumbers(Arc<RingContext>),
    Polynomial(Arc<PolyContext>),
}

impl fmt::Display for RingContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingContext::Integers => write!(f, "Z"),
            RingContext::Rationals => write!(f, "Q"),
            RingContext::IntegersMod(k) => write!(f, "Z/{k}"),
            RingContext::PrimeField(p) => write!(f, "F{p}"),
            RingContext::DualNumbers(b) => write!(f, "Dual({b})"),
            RingContext::Polynomial(pc) => {
                write!(f, "Poly({}; {})", pc.base, pc.vars.join(","))
            }
        }
    }
}

impl RingContext {
    pub fn integers_mod(k: u64) -> Result<Self, RingError> {
        if k < 2 {
            return Err(RingError::BadModulus(k));
        }
        Ok(RingContext::IntegersMod(k))
    }

    pub fn prime_field(p: u64) -> Result<Self, RingError> {
        if !is_prime_u64(p) {
            return Err(RingError::NotPrime(p));
        }
        Ok(RingContext::PrimeField(p))
    }

    pub fn dual_numbers(base: RingContext) -> Result<Self, RingError> {
        if !base.is_field() {
            return Err(RingError::DualBaseNotField(base.to_string()));
        }
        Ok(RingContext::DualNumbers(Arc::new(base)))
    }

    pub fn polynomial(base: RingContext, vars: &[&str]) -> Result<Self, RingError> {
        let names: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        for i in 0..names.len() {
            if names[i + 1..].contains(&names[i]) {
                return Err(RingError::DuplicateVariable);
            }
        }
        Ok(RingContext::Polynomial(Arc::new(PolyContext {
            base,
            vars: names,
        })))
    }

    /// Parses ring specs like "Z", "Q", "Z/4", "F5".
    pub fn parse(spec: &str) -> Result<Self, RingError> {
        let s = spec.trim();
        match s {
            "Z" | "ℤ" => return Ok(RingContext::Integers),
            "Q" | "ℚ" => return Ok(RingContext::Rationals),
            _ => {}
        }
        if let Some(k) = s.strip_prefix("Z/") {
            let k: u64 = k
                .parse()
                .map_err(|_| RingError::UnsupportedOperation("parse", s.to_string()))?;
            return RingContext::integers_mod(k);
        }
        if let Some(p) = s.strip_prefix("F_").or_else(|| s.strip_prefix('F')) {
            let p: u64 = p
                .parse()
                .map_err(|_| RingError::UnsupportedOperation("parse", s.to_string()))?;
            return RingContext::prime_field(p);
        }
        Err(RingError::UnsupportedOperation("parse", s.to_string()))
    }

    pub fn is_field(&self) -> bool {
        matches!(self, RingContext::Rationals | RingContext::PrimeField(_))
    }

    /// Modulus of Z/k or F_p.
    pub fn modulus(&self) -> Option<u64> {
        match self {
            RingContext::IntegersMod(k) => Some(*k),
            RingContext::PrimeField(p) => Some(*p),
            _ => None,
        }
    }

    pub fn zero(&self) -> RingElement {
        let payload = match self {
            RingContext::Integers => Payload::Int(BigInt::zero()),
            RingContext::Rationals => Payload::Rat(BigRational::zero()),
            RingContext::IntegersMod(_) | RingContext::PrimeField(_) => Payload::Res(0),
            RingContext::DualNumbers(b) => Payload::Dual(Box::new((b.zero(), b.zero()))),
            RingContext::Polynomial(_) => Payload::Poly(BTreeMap::new()),
        };
        RingElement {
            ctx: self.clone(),
            payload,
        }
    }

    pub fn one(&self) -> RingElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> RingElement {
        self.from_bigint(BigInt::from(v))
    }

    pub fn from_bigint(&self, v: BigInt) -> RingElement {
        let payload = match self {
            RingContext::Integers => Payload::Int(v),
            RingContext::Rationals => Payload::Rat(BigRational::from_integer(v)),
            RingContext::IntegersMod(k) | RingContext::PrimeField(k) => {
                Payload::Res(reduce_bigint(&v, *k))
            }
            RingContext::DualNumbers(b) => {
                Payload::Dual(Box::new((b.from_bigint(v), b.zero())))
            }
            RingContext::Polynomial(pc) => {
                let c = pc.base.from_bigint(v);
                let mut map = BTreeMap::new();
                if !c.is_zero() {
                    map.insert(Monomial::constant(), c);
                }
                Payload::Poly(map)
            }
        };
        RingElement {
            ctx: self.clone(),
            payload,
        }
    }

    /// The variable `name` as an element of this polynomial ring.
    pub fn var(&self, name: &str) -> Result<RingElement, RingError> {
        let RingContext::Polynomial(pc) = self else {
            return Err(RingError::UnsupportedOperation("var", self.to_string()));
        };
        let idx = pc
            .vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| RingError::UnknownVariable(name.to_string()))?;
        let mut map = BTreeMap::new();
        map.insert(Monomial(vec![(idx as u32, 1)]), pc.base.one());
        Ok(RingElement {
            ctx: self.clone(),
            payload: Payload::Poly(map),
        })
    }

    /// a + eps*b over a dual-number context.
    pub fn dual_from_parts(&self, a: RingElement, b: RingElement) -> Result<RingElement, RingError> {
        let RingContext::DualNumbers(base) = self else {
            return Err(RingError::UnsupportedOperation("dual", self.to_string()));
        };
        if a.ctx != **base || b.ctx != **base {
            return Err(RingError::ContextMismatch(a.ctx.to_string(), base.to_string()));
        }
        Ok(RingElement {
            ctx: self.clone(),
            payload: Payload::Dual(Box::new((a, b))),
        })
    }
}

fn reduce_bigint(v: &BigInt, k: u64) -> u64 {
    let m = BigInt::from(k);
    let r = v.mod_floor(&m);
    let (_, digits) = r.to_u64_digits();
    if digits.is_empty() {
        0
    } else {
        digits[0]
    }
}

/// Monomial as a sparse exponent vector, ordered by the lexicographic order
/// induced by the fixed variable list (earlier variables dominate).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<(u32, u32)>);

impl Monomial {
    pub fn constant() -> Self {
        Monomial(Vec::new())
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            match (self.0.get(i), other.0.get(j)) {
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va == vb {
                        out.push((va, ea + eb));
                        i += 1;
                        j += 1;
                    } else if va < vb {
                        out.push((va, ea));
                        i += 1;
                    } else {
                        out.push((vb, eb));
                        j += 1;
                    }
                }
                (Some(&t), None) => {
                    out.push(t);
                    i += 1;
                }
                (None, Some(&t)) => {
                    out.push(t);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Monomial(out)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    // A positive exponent at an earlier variable dominates.
                    if va != vb {
                        return if va < vb {
                            Ordering::Greater
                        } else {
                            Ordering::Less
                        };
                    }
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Payload {
    Int(BigInt),
    Rat(BigRational),
    Res(u64),
    Dual(Box<(RingElement, RingElement)>),
    Poly(BTreeMap<Monomial, RingElement>),
}

/// An exact element of some [`RingContext`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingElement {
    ctx: RingContext,
    payload: Payload,
}

impl RingElement {
    pub fn context(&self) -> &RingContext {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        match &self.payload {
            Payload::Int(v) => v.is_zero(),
            Payload::Rat(v) => v.is_zero(),
            Payload::Res(v) => *v == 0,
            Payload::Dual(p) => p.0.is_zero() && p.1.is_zero(),
            Payload::Poly(m) => m.is_empty(),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.ctx.one()
    }

    fn assert_same_ctx(&self, other: &RingElement) {
        assert!(
            self.ctx == other.ctx,
            "ring context mismatch: {} vs {}",
            self.ctx,
            other.ctx
        );
    }

    pub fn add(&self, other: &RingElement) -> RingElement {
        self.assert_same_ctx(other);
        let payload = match (&self.payload, &other.payload) {
            (Payload::Int(a), Payload::Int(b)) => Payload::Int(a + b),
            (Payload::Rat(a), Payload::Rat(b)) => Payload::Rat(a + b),
            (Payload::Res(a), Payload::Res(b)) => {
                let k = self.ctx.modulus().unwrap();
                Payload::Res(((*a as u128 + *b as u128) % k as u128) as u64)
            }
            (Payload::Dual(p), Payload::Dual(q)) => {
                Payload::Dual(Box::new((p.0.add(&q.0), p.1.add(&q.1))))
            }
            (Payload::Poly(a), Payload::Poly(b)) => {
                let mut out = a.clone();
                for (mono, c) in b {
                    match out.get_mut(mono) {
                        Some(acc) => {
                            let s = acc.add(c);
                            if s.is_zero() {
                                out.remove(mono);
                            } else {
                                *acc = s;
                            }
                        }
                        None => {
                            out.insert(mono.clone(), c.clone());
                        }
                    }
                }
                Payload::Poly(out)
            }
            _ => unreachable!("payload/context invariant violated"),
        };
        RingElement {
            ctx: self.ctx.clone(),
            payload,
        }
    }

    pub fn neg(&self) -> RingElement {
        let payload = match &self.payload {
            Payload::Int(a) => Payload::Int(-a),
            Payload::Rat(a) => Payload::Rat(-a),
            Payload::Res(a) => {
                let k = self.ctx.modulus().unwrap();
                Payload::Res(if *a == 0 { 0 } else { k - *a })
            }
            Payload::Dual(p) => Payload::Dual(Box::new((p.0.neg(), p.1.neg()))),
            Payload::Poly(m) => {
                Payload::Poly(m.iter().map(|(mo, c)| (mo.clone(), c.neg())).collect())
            }
        };
        RingElement {
            ctx: self.ctx.clone(),
            payload,
        }
    }

    pub fn sub(&self, other: &RingElement) -> RingElement {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RingElement) -> RingElement {
        self.assert_same_ctx(other);
        let payload = match (&self.payload, &other.payload) {
            (Payload::Int(a), Payload::Int(b)) => Payload::Int(a * b),
            (Payload::Rat(a), Payload::Rat(b)) => Payload::Rat(a * b),
            (Payload::Res(a), Payload::Res(b)) => {
                let k = self.ctx.modulus().unwrap();
                Payload::Res(((*a as u128 * *b as u128) % k as u128) as u64)
            }
            // (a + eps b)(c + eps d) = ac + eps(ad + bc), eps^2 = 0.
            (Payload::Dual(p), Payload::Dual(q)) => Payload::Dual(Box::new((
                p.0.mul(&q.0),
                p.0.mul(&q.1).add(&p.1.mul(&q.0)),
            ))),
            (Payload::Poly(a), Payload::Poly(b)) => {
                let mut out: BTreeMap<Monomial, RingElement> = BTreeMap::new();
                for (ma, ca) in a {
                    for (mb, cb) in b {
                        let mono = ma.mul(mb);
                        let c = ca.mul(cb);
                        if c.is_zero() {
                            continue;
                        }
                        match out.get_mut(&mono) {
                            Some(acc) => {
                                let s = acc.add(&c);
                                if s.is_zero() {
                                    out.remove(&mono);
                                } else {
                                    *acc = s;
                                }
                            }
                            None => {
                                out.insert(mono, c);
                            }
                        }
                    }
                }
                Payload::Poly(out)
            }
            _ => unreachable!("payload/context invariant violated"),
        };
        RingElement {
            ctx: self.ctx.clone(),
            payload,
        }
    }

    pub fn mul_i64(&self, c: i64) -> RingElement {
        self.mul(&self.ctx.from_i64(c))
    }

    pub fn pow(&self, mut e: u32) -> RingElement {
        let mut acc = self.ctx.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_unit(&self) -> bool {
        self.inverse().is_some()
    }

    pub fn inverse(&self) -> Option<RingElement> {
        let payload = match &self.payload {
            Payload::Int(a) => {
                if a.abs().is_one() {
                    Payload::Int(a.clone())
                } else {
                    return None;
                }
            }
            Payload::Rat(a) => {
                if a.is_zero() {
                    return None;
                }
                Payload::Rat(a.recip())
            }
            Payload::Res(a) => {
                let k = self.ctx.modulus().unwrap();
                Payload::Res(mod_inverse(*a, k)?)
            }
            // (a + eps b)^-1 = a^-1 - eps a^-2 b.
            Payload::Dual(p) => {
                let ai = p.0.inverse()?;
                Payload::Dual(Box::new((ai.clone(), ai.mul(&ai).mul(&p.1).neg())))
            }
            Payload::Poly(m) => {
                if m.len() != 1 {
                    return None;
                }
                let (mono, c) = m.iter().next().unwrap();
                if !mono.is_constant() {
                    return None;
                }
                let ci = c.inverse()?;
                let mut out = BTreeMap::new();
                out.insert(Monomial::constant(), ci);
                Payload::Poly(out)
            }
        };
        Some(RingElement {
            ctx: self.ctx.clone(),
            payload,
        })
    }

    /// Canonical residue in [0, k) for Z/k and F_p elements.
    pub fn residue(&self) -> Option<u64> {
        match &self.payload {
            Payload::Res(v) => Some(*v),
            _ => None,
        }
    }

    pub fn to_bigint(&self) -> Option<BigInt> {
        match &self.payload {
            Payload::Int(v) => Some(v.clone()),
            Payload::Res(v) => Some(BigInt::from(*v)),
            Payload::Rat(v) => {
                if v.is_integer() {
                    Some(v.to_integer())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Real and eps parts of a dual number.
    pub fn dual_parts(&self) -> Option<(&RingElement, &RingElement)> {
        match &self.payload {
            Payload::Dual(p) => Some((&p.0, &p.1)),
            _ => None,
        }
    }

    /// Sparse monomial view of a polynomial element.
    pub fn poly_terms(&self) -> Option<&BTreeMap<Monomial, RingElement>> {
        match &self.payload {
            Payload::Poly(m) => Some(m),
            _ => None,
        }
    }

    /// Evaluates a polynomial at the given variable assignment. The
    /// assignment must cover every variable that appears in the polynomial;
    /// values live in the base ring.
    pub fn eval(&self, assignment: &BTreeMap<String, RingElement>) -> Result<RingElement, RingError> {
        let RingContext::Polynomial(pc) = &self.ctx else {
            return Err(RingError::UnsupportedOperation("eval", self.ctx.to_string()));
        };
        let Payload::Poly(terms) = &self.payload else {
            unreachable!()
        };
        let mut values: Vec<Option<&RingElement>> = vec![None; pc.vars.len()];
        for (name, v) in assignment {
            if let Some(idx) = pc.vars.iter().position(|n| n == name) {
                if v.ctx != pc.base {
                    return Err(RingError::ContextMismatch(
                        v.ctx.to_string(),
                        pc.base.to_string(),
                    ));
                }
                values[idx] = Some(v);
            }
        }
        let mut acc = pc.base.zero();
        for (mono, c) in terms {
            let mut term = c.clone();
            for &(var, exp) in &mono.0 {
                let v = values[var as usize]
                    .ok_or_else(|| RingError::MissingVariable(pc.vars[var as usize].clone()))?;
                term = term.mul(&v.pow(exp));
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.payload {
            Payload::Int(v) => write!(f, "{v}"),
            Payload::Rat(v) => write!(f, "{v}"),
            Payload::Res(v) => write!(f, "{v}"),
            Payload::Dual(p) => write!(f, "{} + eps*{}", p.0, p.1),
            Payload::Poly(terms) => {
                if terms.is_empty() {
                    return write!(f, "0");
                }
                let RingContext::Polynomial(pc) = &self.ctx else {
                    unreachable!()
                };
                let mut first = true;
                for (mono, c) in terms.iter().rev() {
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    write!(f, "{c}")?;
                    for &(var, exp) in &mono.0 {
                        write!(f, "*{}", pc.vars[var as usize])?;
                        if exp > 1 {
                            write!(f, "^{exp}")?;
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

fn mod_inverse(a: u64, k: u64) -> Option<u64> {
    // Extended gcd on (a, k).
    let (mut r0, mut r1) = (a as i128, k as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    let k = k as i128;
    Some(((s0 % k + k) % k) as u64)
}

/// A principal ideal of Z, Z/k, or F_p with a canonical generator:
/// |g| over Z, gcd(g, k) over Z/k (zero ideal stored as 0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrincipalIdeal {
    ctx: RingContext,
    generator: RingElement,
}

pub fn ideal_normalize(ctx: &RingContext, g: &RingElement) -> Result<PrincipalIdeal, RingError> {
    if g.context() != ctx {
        return Err(RingError::ContextMismatch(
            g.context().to_string(),
            ctx.to_string(),
        ));
    }
    let generator = match ctx {
        RingContext::Integers => {
            let v = g.to_bigint().unwrap();
            ctx.from_bigint(v.abs())
        }
        RingContext::IntegersMod(k) | RingContext::PrimeField(k) => {
            let r = g.residue().unwrap();
            let d = r.gcd(k);
            ctx.from_i64(if d == *k { 0 } else { d as i64 })
        }
        _ => return Err(RingError::UnsupportedIdealRing),
    };
    Ok(PrincipalIdeal {
        ctx: ctx.clone(),
        generator,
    })
}

impl PrincipalIdeal {
    pub fn new(ctx: &RingContext, g: &RingElement) -> Result<Self, RingError> {
        ideal_normalize(ctx, g)
    }

    pub fn from_i64(ctx: &RingContext, g: i64) -> Result<Self, RingError> {
        ideal_normalize(ctx, &ctx.from_i64(g))
    }

    pub fn zero(ctx: &RingContext) -> Result<Self, RingError> {
        Self::from_i64(ctx, 0)
    }

    pub fn unit(ctx: &RingContext) -> Result<Self, RingError> {
        Self::from_i64(ctx, 1)
    }

    pub fn context(&self) -> &RingContext {
        &self.ctx
    }

    pub fn generator(&self) -> &RingElement {
        &self.generator
    }

    pub fn is_zero(&self) -> bool {
        self.generator.is_zero()
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.generator.is_one()
    }

    fn check_ctx(&self, other: &PrincipalIdeal) -> Result<(), RingError> {
        if self.ctx != other.ctx {
            return Err(RingError::ContextMismatch(
                self.ctx.to_string(),
                other.ctx.to_string(),
            ));
        }
        Ok(())
    }

    /// Sum of ideals: (gcd of the generators).
    pub fn sum(&self, other: &PrincipalIdeal) -> Result<PrincipalIdeal, RingError> {
        self.check_ctx(other)?;
        match &self.ctx {
            RingContext::Integers => {
                let a = self.generator.to_bigint().unwrap();
                let b = other.generator.to_bigint().unwrap();
                ideal_normalize(&self.ctx, &self.ctx.from_bigint(a.gcd(&b)))
            }
            _ => {
                let a = self.generator.residue().unwrap();
                let b = other.generator.residue().unwrap();
                ideal_normalize(&self.ctx, &self.ctx.from_i64(a.gcd(&b) as i64))
            }
        }
    }

    pub fn product(&self, other: &PrincipalIdeal) -> Result<PrincipalIdeal, RingError> {
        self.check_ctx(other)?;
        ideal_normalize(&self.ctx, &self.generator.mul(&other.generator))
    }

    pub fn scale_by_integer(&self, c: i64) -> Result<PrincipalIdeal, RingError> {
        ideal_normalize(&self.ctx, &self.generator.mul_i64(c))
    }

    /// Whether `self` contains `other` as a set.
    pub fn contains(&self, other: &PrincipalIdeal) -> Result<bool, RingError> {
        self.check_ctx(other)?;
        if other.is_zero() {
            return Ok(true);
        }
        if self.is_zero() {
            return Ok(false);
        }
        match &self.ctx {
            RingContext::Integers => {
                let a = self.generator.to_bigint().unwrap();
                let b = other.generator.to_bigint().unwrap();
                Ok(b.mod_floor(&a).is_zero())
            }
            _ => {
                let a = self.generator.residue().unwrap();
                let b = other.generator.residue().unwrap();
                Ok(b % a == 0)
            }
        }
    }

    /// Exact membership of a ring element (finite rings only for nonzero
    /// residue tests; over Z this is divisibility).
    pub fn element_member(&self, x: &RingElement) -> Result<bool, RingError> {
        if x.context() != &self.ctx {
            return Err(RingError::ContextMismatch(
                x.context().to_string(),
                self.ctx.to_string(),
            ));
        }
        if x.is_zero() {
            return Ok(true);
        }
        if self.is_zero() {
            return Ok(false);
        }
        match &self.ctx {
            RingContext::Integers => {
                let a = self.generator.to_bigint().unwrap();
                Ok(x.to_bigint().unwrap().mod_floor(&a).is_zero())
            }
            _ => Ok(x.residue().unwrap() % self.generator.residue().unwrap() == 0),
        }
    }
}

impl fmt::Display for PrincipalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.generator)
    }
}

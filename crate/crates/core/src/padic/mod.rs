//! Fixed-precision p-adic integers for odd primes, power-residue classes of
//! the residue field, and the norm-class map `K^× → K^×/N(L^×) ≅ ℤ/e` for
//! `L = ℚ_p(p^{1/e})` with `e | p − 1`.

mod oracle;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use oracle::{field_norm, norm_class_oracle, NormOracle, MAX_CANDIDATES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("p = 2 is not supported: quadratic extensions of Q_2 are wildly ramified")]
    WildPrime,
    #[error("{0} is not an odd prime")]
    NotPrime(u64),
    #[error("precision must be at least 2, got {0}")]
    PrecisionTooSmall(u32),
    #[error("p^precision = {p}^{precision} does not fit the residue word")]
    PrecisionTooLarge { p: u64, precision: u32 },
    #[error("operands live in different p-adic contexts")]
    ContextMismatch,
    #[error("value is zero to the working precision")]
    PrecisionExhausted,
    #[error("element is not a unit")]
    NotAUnit,
    #[error("degree {e} does not divide p - 1 = {}", p - 1)]
    DegreeIncompatible { e: u32, p: u64 },
    #[error("value known to {digits} digits; {needed} are required")]
    InsufficientPrecision { digits: u32, needed: u32 },
    #[error("search space of {candidates} candidates exceeds the limit of {limit}")]
    SearchSpaceTooLarge { candidates: u128, limit: u64 },
    #[error("no power of the canonical non-norm makes the value a represented norm")]
    OracleInconclusive,
    #[error("integer overflow while computing a field norm")]
    Overflow,
}

// Keeps p^N * p^N inside u128 products.
const MODULUS_LIMIT: u64 = 1 << 62;

/// `K = ℚ_p`, `R = ℤ_p` truncated at `p^precision`, `k = 𝔽_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicContext {
    p: u64,
    precision: u32,
    modulus: u64,
    primitive_root: u64,
}

impl PadicContext {
    pub fn new(p: u64, precision: u32) -> Result<Self, PadicError> {
        if p == 2 {
            return Err(PadicError::WildPrime);
        }
        if p < 3 || !is_prime(p) {
            return Err(PadicError::NotPrime(p));
        }
        if precision < 2 {
            return Err(PadicError::PrecisionTooSmall(precision));
        }
        let modulus = checked_pow(p, precision)
            .filter(|&m| m < MODULUS_LIMIT)
            .ok_or(PadicError::PrecisionTooLarge { p, precision })?;
        Ok(Self {
            p,
            precision,
            modulus,
            primitive_root: smallest_primitive_root(p),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `p^precision`
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The canonical generator of `𝔽_p^×`: its smallest primitive root.
    pub fn primitive_root(&self) -> u64 {
        self.primitive_root
    }

    /// `p^k` for `k ≤ precision`.
    pub fn p_pow(&self, k: u32) -> u64 {
        assert!(k <= self.precision, "p^{k} beyond working precision");
        self.p.pow(k)
    }

    pub fn element(&self, value: i128) -> PadicInt {
        PadicInt::new(*self, value)
    }

    pub fn check_degree(&self, e: u32) -> Result<(), PadicError> {
        if e == 0 || !(self.p - 1).is_multiple_of(u64::from(e)) {
            return Err(PadicError::DegreeIncompatible { e, p: self.p });
        }
        Ok(())
    }

    /// Class of a nonzero residue in `k^×/(k^×)^e ≅ ℤ/e`: its discrete
    /// logarithm to the canonical generator, reduced mod `e`.
    pub fn power_residue_class(&self, residue: u64, e: u32) -> Result<NormClass, PadicError> {
        self.check_degree(e)?;
        let r = residue % self.p;
        if r == 0 {
            return Err(PadicError::NotAUnit);
        }
        let cofactor = (self.p - 1) / u64::from(e);
        let target = pow_mod(r, cofactor, self.p);
        let zeta = pow_mod(self.primitive_root, cofactor, self.p);
        let mut acc = 1;
        for k in 0..e {
            if acc == target {
                return Ok(NormClass::new(k, e));
            }
            acc = mul_mod(acc, zeta, self.p);
        }
        unreachable!("r^((p-1)/e) is an e-th root of unity")
    }
}

/// Known valuation of a fixed-precision element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    /// Zero modulo every known digit.
    Exhausted,
}

/// Element of `ℤ_p` known modulo `p^digits` (`digits ≤ precision`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PadicInt {
    ctx: PadicContext,
    residue: u64,
    digits: u32,
}

impl PadicInt {
    pub fn new(ctx: PadicContext, value: i128) -> Self {
        Self::with_digits(ctx, value, ctx.precision)
    }

    /// Value known only modulo `p^digits`.
    pub fn with_digits(ctx: PadicContext, value: i128, digits: u32) -> Self {
        let digits = digits.min(ctx.precision);
        let m = i128::from(ctx.p_pow(digits));
        Self {
            ctx,
            residue: value.rem_euclid(m) as u64,
            digits,
        }
    }

    pub fn zero(ctx: PadicContext) -> Self {
        Self::new(ctx, 0)
    }

    pub fn one(ctx: PadicContext) -> Self {
        Self::new(ctx, 1)
    }

    pub fn context(&self) -> PadicContext {
        self.ctx
    }

    /// Canonical representative in `[0, p^digits)`.
    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Reduction to the residue field.
    pub fn reduce(&self) -> u64 {
        self.residue % self.ctx.p
    }

    pub fn valuation(&self) -> Valuation {
        if self.residue == 0 {
            return Valuation::Exhausted;
        }
        let mut v = 0;
        let mut r = self.residue;
        while r.is_multiple_of(self.ctx.p) {
            r /= self.ctx.p;
            v += 1;
        }
        Valuation::Finite(v)
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Valuation::Finite(0)
    }

    fn known_valuation(&self) -> u32 {
        match self.valuation() {
            Valuation::Finite(v) => v,
            Valuation::Exhausted => self.digits,
        }
    }

    fn same_context(&self, other: &Self) -> Result<(), PadicError> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(PadicError::ContextMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PadicError> {
        self.same_context(other)?;
        let digits = self.digits.min(other.digits);
        let m = self.ctx.p_pow(digits);
        Ok(Self {
            ctx: self.ctx,
            residue: ((u128::from(self.residue) + u128::from(other.residue)) % u128::from(m)) as u64,
            digits,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, PadicError> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PadicError> {
        self.same_context(other)?;
        let digits = (self.digits + other.known_valuation())
            .min(other.digits + self.known_valuation())
            .min(self.ctx.precision);
        let m = self.ctx.p_pow(digits);
        Ok(Self {
            ctx: self.ctx,
            residue: mul_mod(self.residue, other.residue, m),
            digits,
        })
    }

    pub fn neg(&self) -> Self {
        let m = self.ctx.p_pow(self.digits);
        Self {
            residue: (m - self.residue) % m,
            ..*self
        }
    }

    /// `self = p^v · u` with `u` a unit known modulo `p^(digits − v)`.
    pub fn unit_part(&self) -> Result<(u32, PadicInt), PadicError> {
        match self.valuation() {
            Valuation::Exhausted => Err(PadicError::PrecisionExhausted),
            Valuation::Finite(v) => Ok((
                v,
                Self {
                    ctx: self.ctx,
                    residue: self.residue / self.ctx.p.pow(v),
                    digits: self.digits - v,
                },
            )),
        }
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({}^{})", self.residue, self.ctx.p, self.digits)
    }
}

/// Element of `ℤ/e`, identified with `K^×/N(L^×)` or `k^×/(k^×)^e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormClass {
    pub value: u32,
    pub e: u32,
}

impl NormClass {
    pub fn new(value: u32, e: u32) -> Self {
        assert!(e >= 1 && value < e, "class {value} outside Z/{e}");
        Self { value, e }
    }

    pub fn zero(e: u32) -> Self {
        Self::new(0, e)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// Group law of `ℤ/e`.
    pub fn combine(self, other: Self) -> Self {
        assert_eq!(self.e, other.e, "classes of different degrees");
        Self::new((self.value + other.value) % self.e, self.e)
    }
}

/// Class of a unit in `k^×/(k^×)^e`, read off its reduction.
pub fn eth_power_class(u: &PadicInt, e: u32) -> Result<NormClass, PadicError> {
    u.ctx.check_degree(e)?;
    if !u.is_unit() {
        return Err(PadicError::NotAUnit);
    }
    u.ctx.power_residue_class(u.reduce(), e)
}

/// Class of `a` in `K^×/N(L^×)` for `L = K(p^{1/e})`.
///
/// Writing `a = p^α·u`, the norm of `p^{1/e}` is `(−1)^{e−1}·p`, so `a` is
/// equivalent to `(−1)^{α(e−1)}·u` and only the residue class of that unit
/// matters.
pub fn norm_class(a: &PadicInt, e: u32) -> Result<NormClass, PadicError> {
    a.ctx.check_degree(e)?;
    let (alpha, u) = a.unit_part()?;
    let flip = (u64::from(alpha) * u64::from(e - 1)) % 2 == 1;
    let unit = if flip { u.neg() } else { u };
    eth_power_class(&unit, e)
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of a unit modulo `m`.
pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (i128::from(m), i128::from(a % m));
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(i128::from(m)) as u64)
}

fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    (0..exp).try_fold(1u64, |acc, _| acc.checked_mul(base))
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn smallest_primitive_root(p: u64) -> u64 {
    let factors = prime_factors(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("every prime has a primitive root")
}

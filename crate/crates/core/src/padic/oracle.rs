//! Brute-force norm-class oracle.
//!
//! Elements of `L = K(t)`, `t^e = p`, are coefficient vectors over the basis
//! `1, t, …, t^{e−1}`; their norm is the determinant of multiplication-by-`b`.
//! The oracle enumerates every coefficient vector modulo `p^search_precision`,
//! together with its shifts `t^j·b`, and records which residues the norms hit.
//! It never consults the closed-form class formula.

use std::collections::HashSet;
use std::thread;

use super::{inv_mod, mul_mod, NormClass, PadicContext, PadicError, PadicInt, Valuation};

/// Upper bound on enumerated coefficient vectors.
pub const MAX_CANDIDATES: u64 = 10_000_000;

/// Norm of `Σ cᵢ tⁱ` with `t^e = p`, computed as an exact determinant.
#[allow(clippy::needless_range_loop)]
pub fn field_norm(coeffs: &[i128], p: i128) -> Result<i128, PadicError> {
    let e = coeffs.len();
    // Column j holds the coordinates of b·t^j.
    let mut m = vec![vec![0i128; e]; e];
    for j in 0..e {
        for (i, &c) in coeffs.iter().enumerate() {
            let k = i + j;
            if k < e {
                m[k][j] = c;
            } else {
                m[k - e][j] = c.checked_mul(p).ok_or(PadicError::Overflow)?;
            }
        }
    }
    bareiss_det(m)
}

fn bareiss_det(mut m: Vec<Vec<i128>>) -> Result<i128, PadicError> {
    let n = m.len();
    if n == 0 {
        return Ok(1);
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = m[i][j].checked_mul(m[k][k]).ok_or(PadicError::Overflow)?;
                let b = m[i][k].checked_mul(m[k][j]).ok_or(PadicError::Overflow)?;
                m[i][j] = a.checked_sub(b).ok_or(PadicError::Overflow)? / prev;
            }
        }
        prev = m[k][k];
    }
    Ok(sign * m[n - 1][n - 1])
}

/// Multiplication by `t`: `(c₀, …, c_{e−1}) ↦ (p·c_{e−1}, c₀, …, c_{e−2})`.
fn shift_by_t(coeffs: &mut [i128], p: i128) {
    if let Some(top) = coeffs.last().copied() {
        coeffs.rotate_right(1);
        coeffs[0] = top * p;
    }
}

/// Table of norm residues modulo `p^1, …, p^max_exponent`.
#[derive(Clone, Debug)]
pub struct NormOracle {
    ctx: PadicContext,
    e: u32,
    search_precision: u32,
    represented: Vec<HashSet<u64>>,
}

impl NormOracle {
    pub fn build(
        ctx: PadicContext,
        e: u32,
        search_precision: u32,
        max_exponent: u32,
    ) -> Result<Self, PadicError> {
        ctx.check_degree(e)?;
        let p = ctx.p();
        let bound = u128::from(p).pow(search_precision);
        let candidates = bound.checked_pow(e).unwrap_or(u128::MAX);
        if search_precision == 0 || candidates > u128::from(MAX_CANDIDATES) {
            return Err(PadicError::SearchSpaceTooLarge {
                candidates,
                limit: MAX_CANDIDATES,
            });
        }
        let bound = bound as u64;
        let moduli: Vec<u64> = (1..=max_exponent)
            .map(|k| p.checked_pow(k).ok_or(PadicError::Overflow))
            .collect::<Result<_, _>>()?;

        // Split on the constant coefficient; merging is a set union.
        let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(bound as usize);
        let chunk = bound.div_ceil(workers as u64);
        let partials: Vec<Result<Vec<HashSet<u64>>, PadicError>> = thread::scope(|scope| {
            let handles: Vec<_> = (0..workers as u64)
                .map(|w| {
                    let lo = w * chunk;
                    let hi = ((w + 1) * chunk).min(bound);
                    let moduli = &moduli;
                    scope.spawn(move || scan(p, e as usize, bound, lo..hi, moduli))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("oracle worker panicked"))
                .collect()
        });
        let mut represented = vec![HashSet::new(); moduli.len()];
        for part in partials {
            for (acc, set) in represented.iter_mut().zip(part?) {
                acc.extend(set);
            }
        }
        Ok(Self {
            ctx,
            e,
            search_precision,
            represented,
        })
    }

    pub fn search_precision(&self) -> u32 {
        self.search_precision
    }

    pub fn max_exponent(&self) -> u32 {
        self.represented.len() as u32
    }

    /// Whether some enumerated norm is congruent to `target` mod `p^exponent`.
    pub fn is_represented(&self, target: u64, exponent: u32) -> bool {
        assert!(
            (1..=self.max_exponent()).contains(&exponent),
            "exponent {exponent} outside the oracle table"
        );
        let m = self.ctx.p().pow(exponent);
        self.represented[exponent as usize - 1].contains(&(target % m))
    }

    /// Least `r` with `a·w^{−r}` a represented norm modulo `p^{v(a)+2}`,
    /// where `w` is the canonical generator of `k^×` lifted to `ℤ`.
    pub fn norm_class(&self, a: &PadicInt) -> Result<NormClass, PadicError> {
        if a.context() != self.ctx {
            return Err(PadicError::ContextMismatch);
        }
        let v = match a.valuation() {
            Valuation::Exhausted => return Err(PadicError::PrecisionExhausted),
            Valuation::Finite(v) => v,
        };
        let exponent = v + 2;
        if a.digits() < exponent {
            return Err(PadicError::InsufficientPrecision {
                digits: a.digits(),
                needed: exponent,
            });
        }
        if exponent > self.max_exponent() {
            return Err(PadicError::InsufficientPrecision {
                digits: self.max_exponent(),
                needed: exponent,
            });
        }
        let m = self.ctx.p().pow(exponent);
        let w_inv = inv_mod(self.ctx.primitive_root(), m).expect("primitive root is a unit");
        let mut target = a.residue() % m;
        for r in 0..self.e {
            if self.is_represented(target, exponent) {
                return Ok(NormClass::new(r, self.e));
            }
            target = mul_mod(target, w_inv, m);
        }
        Err(PadicError::OracleInconclusive)
    }
}

fn scan(
    p: u64,
    e: usize,
    bound: u64,
    leading: std::ops::Range<u64>,
    moduli: &[u64],
) -> Result<Vec<HashSet<u64>>, PadicError> {
    let mut sets = vec![HashSet::new(); moduli.len()];
    if leading.is_empty() || e == 0 {
        return Ok(sets);
    }
    let pi = i128::from(p);
    let mut digits = vec![0u64; e];
    digits[0] = leading.start;
    let mut shifted = vec![0i128; e];
    loop {
        for (s, &d) in shifted.iter_mut().zip(&digits) {
            *s = i128::from(d);
        }
        for _ in 0..e {
            let n = field_norm(&shifted, pi)?;
            for (set, &m) in sets.iter_mut().zip(moduli) {
                set.insert(n.rem_euclid(i128::from(m)) as u64);
            }
            shift_by_t(&mut shifted, pi);
        }
        // odometer: digits[1..] fastest, digits[0] within `leading`
        let mut i = e - 1;
        loop {
            if i == 0 {
                digits[0] += 1;
                if digits[0] >= leading.end {
                    return Ok(sets);
                }
                break;
            }
            digits[i] += 1;
            if digits[i] < bound {
                break;
            }
            digits[i] = 0;
            i -= 1;
        }
    }
}

/// Brute-force class of `a` in `K^×/N(L^×)`.
pub fn norm_class_oracle(
    a: &PadicInt,
    e: u32,
    search_precision: u32,
) -> Result<NormClass, PadicError> {
    let v = match a.valuation() {
        Valuation::Exhausted => return Err(PadicError::PrecisionExhausted),
        Valuation::Finite(v) => v,
    };
    NormOracle::build(a.context(), e, search_precision, v + 2)?.norm_class(a)
}

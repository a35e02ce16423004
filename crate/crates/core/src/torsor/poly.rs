use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::padic::{mul_mod, pow_mod, PadicContext, PadicError, PadicInt};

use super::TorsorError;

/// One monomial `c · x₁^{a₁} ⋯ x_n^{a_n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    #[serde(rename = "c")]
    pub coefficient: i64,
    #[serde(rename = "exp")]
    pub exponents: Vec<u32>,
}

impl Term {
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

/// Graded lexicographic order, largest first.
fn grlex_desc(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    db.cmp(&da).then_with(|| b.cmp(a))
}

/// Polynomial in `ℤ[x₁, …, x_n]` with terms in descending graded lex order
/// and no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultivariatePolynomial {
    n_vars: usize,
    terms: Vec<Term>,
}

impl MultivariatePolynomial {
    /// Collects like terms and sorts; rejects exponent vectors of the wrong length.
    pub fn new(n_vars: usize, terms: Vec<Term>) -> Result<Self, TorsorError> {
        let mut acc: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
        for t in terms {
            if t.exponents.len() != n_vars {
                return Err(TorsorError::ArityMismatch {
                    expected: n_vars,
                    found: t.exponents.len(),
                });
            }
            let slot = acc.entry(t.exponents).or_insert(0);
            *slot = slot
                .checked_add(t.coefficient)
                .ok_or(TorsorError::CoefficientOverflow)?;
        }
        let mut terms: Vec<Term> = acc
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(exponents, coefficient)| Term {
                coefficient,
                exponents,
            })
            .collect();
        terms.sort_by(|a, b| grlex_desc(&a.exponents, &b.exponents));
        Ok(Self { n_vars, terms })
    }

    pub fn constant(n_vars: usize, c: i64) -> Self {
        Self::new(
            n_vars,
            vec![Term {
                coefficient: c,
                exponents: vec![0; n_vars],
            }],
        )
        .expect("constant term has the right arity")
    }

    /// The coordinate function `x_index`.
    pub fn variable(n_vars: usize, index: usize) -> Self {
        let mut exponents = vec![0; n_vars];
        exponents[index] = 1;
        Self {
            n_vars,
            terms: vec![Term {
                coefficient: 1,
                exponents,
            }],
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(Term::degree).max().unwrap_or(0)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, TorsorError> {
        self.check_arity(other)?;
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        Self::new(self.n_vars, terms)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, TorsorError> {
        self.check_arity(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(Term {
                    coefficient: a
                        .coefficient
                        .checked_mul(b.coefficient)
                        .ok_or(TorsorError::CoefficientOverflow)?,
                    exponents: a.exponents.iter().zip(&b.exponents).map(|(x, y)| x + y).collect(),
                });
            }
        }
        Self::new(self.n_vars, terms)
    }

    pub fn try_pow(&self, k: u32) -> Result<Self, TorsorError> {
        (0..k).try_fold(Self::constant(self.n_vars, 1), |acc, _| acc.try_mul(self))
    }

    pub fn try_scale(&self, k: i64) -> Result<Self, TorsorError> {
        self.try_mul(&Self::constant(self.n_vars, k))
    }

    fn check_arity(&self, other: &Self) -> Result<(), TorsorError> {
        if self.n_vars == other.n_vars {
            Ok(())
        } else {
            Err(TorsorError::ArityMismatch {
                expected: self.n_vars,
                found: other.n_vars,
            })
        }
    }

    /// Value at an integer point, reduced into `[0, m)`.
    pub fn eval_mod(&self, point: &[u64], m: u64) -> u64 {
        assert_eq!(point.len(), self.n_vars, "point arity");
        let mut acc = 0u64;
        for t in &self.terms {
            let mut v = (i128::from(t.coefficient).rem_euclid(i128::from(m))) as u64;
            for (&x, &a) in point.iter().zip(&t.exponents) {
                v = mul_mod(v, pow_mod(x, u64::from(a), m), m);
            }
            acc = ((u128::from(acc) + u128::from(v)) % u128::from(m)) as u64;
        }
        acc
    }

    /// Value at a point of `ℤ_p^n`, with precision tracked through the arithmetic.
    pub fn eval_padic(&self, ctx: PadicContext, point: &[PadicInt]) -> Result<PadicInt, PadicError> {
        assert_eq!(point.len(), self.n_vars, "point arity");
        let mut acc = PadicInt::zero(ctx);
        for t in &self.terms {
            let mut v = ctx.element(i128::from(t.coefficient));
            for (x, &a) in point.iter().zip(&t.exponents) {
                for _ in 0..a {
                    v = v.try_mul(x)?;
                }
            }
            acc = acc.try_add(&v)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for MultivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let sign = if t.coefficient < 0 { "-" } else { "+" };
            if i > 0 {
                write!(f, " {sign} ")?;
            } else if t.coefficient < 0 {
                write!(f, "-")?;
            }
            let c = t.coefficient.unsigned_abs();
            let monomial: Vec<String> = t
                .exponents
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(j, &a)| if a == 1 { format!("x{j}") } else { format!("x{j}^{a}") })
                .collect();
            match (c, monomial.is_empty()) {
                (_, true) => write!(f, "{c}")?,
                (1, false) => write!(f, "{}", monomial.join("*"))?,
                _ => write!(f, "{c}*{}", monomial.join("*"))?,
            }
        }
        Ok(())
    }
}

impl Serialize for MultivariatePolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.terms.serialize(serializer)
    }
}

/// Deserialized as a bare term list; arity is fixed by the enclosing family.
pub(crate) fn terms_from_json<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Term>, D::Error> {
    Vec::<Term>::deserialize(d)
}

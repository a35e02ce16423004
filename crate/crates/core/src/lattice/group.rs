use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Deserializer, Serialize};

use super::json::bigint_vec;
use super::{cokernel, IntegerMatrix, LatticeError};

/// Finitely generated abelian group `ℤ^free_rank ⊕ ⊕ ℤ/dᵢ` in invariant-factor
/// normal form: every `dᵢ ≥ 2` and `dᵢ | dᵢ₊₁`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FgAbelianGroup {
    free_rank: usize,
    #[serde(with = "bigint_vec")]
    invariant_factors: Vec<BigInt>,
}

impl FgAbelianGroup {
    /// Validates normal form; use [`FgAbelianGroup::from_cyclic_orders`] to normalize.
    pub fn new(free_rank: usize, invariant_factors: Vec<BigInt>) -> Result<Self, LatticeError> {
        for (i, d) in invariant_factors.iter().enumerate() {
            if *d < BigInt::from(2) {
                return Err(LatticeError::NotNormalForm(format!(
                    "invariant factor {d} at position {i} is below 2"
                )));
            }
            if let Some(next) = invariant_factors.get(i + 1) {
                if !next.is_multiple_of(d) {
                    return Err(LatticeError::NotNormalForm(format!(
                        "{d} does not divide {next}"
                    )));
                }
            }
        }
        Ok(Self {
            free_rank,
            invariant_factors,
        })
    }

    /// `ℤ^free_rank ⊕ ⊕ ℤ/nᵢ` for arbitrary orders; `nᵢ = 0` contributes a
    /// free summand and `±1` is dropped.
    pub fn from_cyclic_orders<T: Into<BigInt> + Clone>(free_rank: usize, orders: &[T]) -> Self {
        let n = orders.len();
        let diag = IntegerMatrix::diagonal(n, n, orders);
        let torsion_part = cokernel(&diag);
        Self {
            free_rank: free_rank + torsion_part.free_rank,
            invariant_factors: torsion_part.invariant_factors,
        }
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    pub fn free(rank: usize) -> Self {
        Self {
            free_rank: rank,
            invariant_factors: Vec::new(),
        }
    }

    pub fn cyclic<T: Into<BigInt> + Clone>(order: T) -> Self {
        Self::from_cyclic_orders(0, &[order])
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_free(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    /// `None` when the group is infinite.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion_order())
    }

    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    /// Exponent of the torsion subgroup (1 when torsion-free).
    pub fn torsion_exponent(&self) -> BigInt {
        self.invariant_factors
            .last()
            .cloned()
            .unwrap_or_else(BigInt::one)
    }

    /// Number of generators of the standard presentation.
    pub fn generator_count(&self) -> usize {
        self.invariant_factors.len() + self.free_rank
    }

    /// Relation matrix of the standard presentation: one column `dᵢ·eᵢ` per
    /// torsion coordinate; free coordinates come last and carry no relation.
    pub fn relations(&self) -> IntegerMatrix {
        let n = self.generator_count();
        let k = self.invariant_factors.len();
        IntegerMatrix::diagonal(n, k, &self.invariant_factors)
    }

    pub fn torsion_subgroup(&self) -> Self {
        Self {
            free_rank: 0,
            invariant_factors: self.invariant_factors.clone(),
        }
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.invariant_factors.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Deserialize)]
struct GroupJson {
    free_rank: usize,
    #[serde(with = "bigint_vec", default)]
    invariant_factors: Vec<BigInt>,
}

impl<'de> Deserialize<'de> for FgAbelianGroup {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = GroupJson::deserialize(deserializer)?;
        if raw.invariant_factors.iter().any(|d| d.is_negative()) {
            return Err(serde::de::Error::custom("negative invariant factor"));
        }
        FgAbelianGroup::new(raw.free_rank, raw.invariant_factors).map_err(serde::de::Error::custom)
    }
}

impl Default for FgAbelianGroup {
    fn default() -> Self {
        Self::trivial()
    }
}

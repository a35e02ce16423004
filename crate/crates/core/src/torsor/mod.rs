//! Norm torsors `{N_{L/K}(y) = f(x)}` over affine space and the two routes
//! around the reduction square: evaluate at a `ℤ_p`-point directly, or reduce
//! the point to `𝔽_p` first and read the power-residue class there.

mod poly;

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::padic::{norm_class, NormClass, PadicContext, PadicError, PadicInt};

pub use poly::{MultivariatePolynomial, Term};

/// Largest special fibre `constancy_check` will enumerate.
pub const MAX_ENUMERATION: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorsorError {
    #[error("expected {expected} coordinates, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("polynomial coefficient overflow")]
    CoefficientOverflow,
    #[error("f vanishes at the reduced point {point:?}")]
    SpecialFibreVanishing { point: Vec<u64> },
    #[error("special fibre has {size} points, above the limit of {limit}")]
    EnumerationTooLarge { size: u128, limit: u64 },
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// `Y = {N(y) = f(x)} → 𝔸ⁿ` for `L = ℚ_p(p^{1/e})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormTorsorFamily {
    context: PadicContext,
    e: u32,
    f: MultivariatePolynomial,
}

impl NormTorsorFamily {
    pub fn new(context: PadicContext, e: u32, f: MultivariatePolynomial) -> Result<Self, TorsorError> {
        context.check_degree(e)?;
        Ok(Self { context, e, f })
    }

    pub fn context(&self) -> PadicContext {
        self.context
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn f(&self) -> &MultivariatePolynomial {
        &self.f
    }

    pub fn n_vars(&self) -> usize {
        self.f.n_vars()
    }

    fn check_arity(&self, len: usize) -> Result<(), TorsorError> {
        if len == self.n_vars() {
            Ok(())
        } else {
            Err(TorsorError::ArityMismatch {
                expected: self.n_vars(),
                found: len,
            })
        }
    }

    pub fn point(&self, coords: &[i128]) -> Vec<PadicInt> {
        coords.iter().map(|&c| self.context.element(c)).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    p: u64,
    precision: u32,
    e: u32,
    n_vars: usize,
    #[serde(deserialize_with = "poly::terms_from_json")]
    f: Vec<Term>,
}

impl Serialize for NormTorsorFamily {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        FamilyJson {
            p: self.context.p(),
            precision: self.context.precision(),
            e: self.e,
            n_vars: self.n_vars(),
            f: self.f.terms().to_vec(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NormTorsorFamily {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = FamilyJson::deserialize(deserializer)?;
        let ctx = PadicContext::new(raw.p, raw.precision).map_err(D::Error::custom)?;
        let f = MultivariatePolynomial::new(raw.n_vars, raw.f).map_err(D::Error::custom)?;
        NormTorsorFamily::new(ctx, raw.e, f).map_err(D::Error::custom)
    }
}

/// Class of the fibre over `point`: the norm class of `f(point)`.
pub fn evaluate(family: &NormTorsorFamily, point: &[PadicInt]) -> Result<NormClass, TorsorError> {
    family.check_arity(point.len())?;
    let value = family.f.eval_padic(family.context, point)?;
    Ok(norm_class(&value, family.e)?)
}

pub fn reduce_point(family: &NormTorsorFamily, point: &[PadicInt]) -> Vec<u64> {
    debug_assert_eq!(point.len(), family.n_vars());
    point.iter().map(PadicInt::reduce).collect()
}

/// Power-residue class of `f̄(P̄)` in `k^×/(k^×)^e`.
pub fn special_eval(family: &NormTorsorFamily, reduced: &[u64]) -> Result<NormClass, TorsorError> {
    family.check_arity(reduced.len())?;
    let p = family.context.p();
    let pt: Vec<u64> = reduced.iter().map(|x| x % p).collect();
    let value = family.f.eval_mod(&pt, p);
    if value == 0 {
        return Err(TorsorError::SpecialFibreVanishing { point: pt });
    }
    Ok(family.context.power_residue_class(value, family.e)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// Generic evaluation disagrees with the special-fibre class.
    Diagram,
    /// Two points with the same reduction evaluate differently.
    Reduction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub point: Vec<u64>,
    pub class_generic: u32,
    /// For `Reduction` failures, the class of the partner point.
    pub class_special: u32,
}

/// Evidence for the factorization of the evaluation map through reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub seed: u64,
    pub samples_drawn: usize,
    /// Points on the unit locus where both routes were compared.
    pub samples_tested: usize,
    pub skipped_nonunit: usize,
    pub pair_checks: usize,
    /// Distinct reductions of skipped points, sorted.
    pub skipped_residues: Vec<Vec<u64>>,
    pub failures: Vec<Failure>,
}

impl FactorizationReport {
    pub fn commutes(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Samples points uniformly mod `p^N` and compares both routes around the
/// square, plus a second point with the same reduction for each sample.
pub fn verify_factorization(
    family: &NormTorsorFamily,
    sample_count: usize,
    seed: u64,
) -> Result<FactorizationReport, TorsorError> {
    if sample_count == 0 {
        return Err(TorsorError::NoSamples);
    }
    let ctx = family.context;
    let p = ctx.p();
    let modulus = ctx.modulus();
    let lift_range = modulus / p;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = FactorizationReport {
        seed,
        samples_drawn: sample_count,
        samples_tested: 0,
        skipped_nonunit: 0,
        pair_checks: 0,
        skipped_residues: Vec::new(),
        failures: Vec::new(),
    };
    let mut skipped = BTreeSet::new();
    let n = family.n_vars();

    for _ in 0..sample_count {
        let coords: Vec<u64> = (0..n).map(|_| rng.gen_range(0..modulus)).collect();
        let point: Vec<PadicInt> = coords.iter().map(|&c| ctx.element(i128::from(c))).collect();
        let reduced = reduce_point(family, &point);
        let special = match special_eval(family, &reduced) {
            Ok(c) => c,
            Err(TorsorError::SpecialFibreVanishing { .. }) => {
                report.skipped_nonunit += 1;
                skipped.insert(reduced);
                continue;
            }
            Err(other) => return Err(other),
        };
        report.samples_tested += 1;
        let generic = evaluate(family, &point)?;
        if generic != special {
            report.failures.push(Failure {
                kind: FailureKind::Diagram,
                point: coords.clone(),
                class_generic: generic.value,
                class_special: special.value,
            });
        }

        let partner: Vec<u64> = coords
            .iter()
            .map(|&c| (c + p * rng.gen_range(0..lift_range)) % modulus)
            .collect();
        let partner_point: Vec<PadicInt> =
            partner.iter().map(|&c| ctx.element(i128::from(c))).collect();
        let partner_class = evaluate(family, &partner_point)?;
        report.pair_checks += 1;
        if partner_class != generic {
            report.failures.push(Failure {
                kind: FailureKind::Reduction,
                point: partner,
                class_generic: partner_class.value,
                class_special: generic.value,
            });
        }
    }
    report.skipped_residues = skipped.into_iter().collect();
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointClass {
    pub point: Vec<u64>,
    pub class: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstancyReport {
    pub e: u32,
    /// At most one class occurs on the unit locus.
    pub constant: bool,
    /// The common class when `constant` and the unit locus is nonempty.
    pub class: Option<u32>,
    pub vanishing_points: usize,
    pub classes: Vec<PointClass>,
}

impl ConstancyReport {
    pub fn distinct_classes(&self) -> BTreeSet<u32> {
        self.classes.iter().map(|c| c.class).collect()
    }
}

/// Tabulates the special-fibre class over every point of `𝔽_pⁿ` where `f̄ ≠ 0`.
pub fn constancy_check(family: &NormTorsorFamily) -> Result<ConstancyReport, TorsorError> {
    let p = family.context.p();
    let n = family.n_vars();
    let size = u128::from(p).checked_pow(n as u32).unwrap_or(u128::MAX);
    if size > u128::from(MAX_ENUMERATION) {
        return Err(TorsorError::EnumerationTooLarge {
            size,
            limit: MAX_ENUMERATION,
        });
    }
    let mut classes = Vec::new();
    let mut vanishing = 0;
    let mut seen = BTreeMap::new();
    let mut pt = vec![0u64; n];
    for _ in 0..size {
        match special_eval(family, &pt) {
            Ok(c) => {
                *seen.entry(c.value).or_insert(0usize) += 1;
                classes.push(PointClass {
                    point: pt.clone(),
                    class: c.value,
                });
            }
            Err(TorsorError::SpecialFibreVanishing { .. }) => vanishing += 1,
            Err(other) => return Err(other),
        }
        // odometer, last coordinate fastest
        for i in (0..n).rev() {
            pt[i] += 1;
            if pt[i] < p {
                break;
            }
            pt[i] = 0;
        }
    }
    let constant = seen.len() <= 1;
    Ok(ConstancyReport {
        e: family.e,
        constant,
        class: if constant { seen.keys().next().copied() } else { None },
        vanishing_points: vanishing,
        classes,
    })
}

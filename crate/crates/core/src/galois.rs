//! Finite matrix groups acting on integer lattices, with a marked
//! inertia / wild-inertia filtration.
//!
//! Matrices act on column vectors. Subgroups are named by index subsets of
//! the full group's generator list.

use std::collections::{BTreeSet, VecDeque};

use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::lattice::{
    cokernel, cokernel_with_projection, kernel_basis, subquotient, FgAbelianGroup, IntegerMatrix,
    LatticeError, LatticeSpan,
};

pub const DEFAULT_CLOSURE_CAP: usize = 10_000;
pub const DEFAULT_ORDER_CAP: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaloisError {
    #[error("generator {index} is not a {dimension}x{dimension} matrix")]
    DimensionMismatch { index: usize, dimension: usize },
    #[error("generator {index} is not invertible over the integers")]
    NotUnimodular { index: usize },
    #[error("group closure exceeded {cap} elements")]
    ClosureCapExceeded { cap: usize },
    #[error("generator index {index} out of range ({count} generators)")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("wild inertia generator {index} does not lie in the inertia group")]
    NotSubgroup { index: usize },
    #[error("conjugate of subgroup generator {index} leaves the subgroup")]
    NotNormal { index: usize },
    #[error("frobenius must be a unimodular {dimension}x{dimension} matrix")]
    BadFrobenius { dimension: usize },
    #[error("frobenius does not normalize inertia (generator {index})")]
    FrobeniusNotNormalizing { index: usize },
    #[error("frobenius does not preserve the relations of the presented group")]
    NotAnEndomorphism,
    #[error("action order exceeds the cap of {cap}")]
    InfiniteOrder { cap: u64 },
    #[error("norm kernels differ at levels {level} and {}", 2 * level)]
    NoStabilization { level: u64 },
    #[error("action does not descend to the quotient")]
    DoesNotDescend,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Finite group of unimodular matrices with its elements enumerated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixGroup {
    dimension: usize,
    generators: Vec<IntegerMatrix>,
    elements: Vec<IntegerMatrix>,
}

impl MatrixGroup {
    pub fn close(dimension: usize, generators: Vec<IntegerMatrix>) -> Result<Self, GaloisError> {
        Self::close_with_cap(dimension, generators, DEFAULT_CLOSURE_CAP)
    }

    /// Enumerates the group generated by `generators`. Elements are stored
    /// in the matrices' lexicographic order.
    pub fn close_with_cap(
        dimension: usize,
        generators: Vec<IntegerMatrix>,
        cap: usize,
    ) -> Result<Self, GaloisError> {
        for (index, g) in generators.iter().enumerate() {
            if g.rows() != dimension || g.cols() != dimension {
                return Err(GaloisError::DimensionMismatch { index, dimension });
            }
            if !g.is_unimodular() {
                return Err(GaloisError::NotUnimodular { index });
            }
        }
        let identity = IntegerMatrix::identity(dimension);
        let mut seen = BTreeSet::from([identity.clone()]);
        let mut queue = VecDeque::from([identity]);
        while let Some(x) = queue.pop_front() {
            for g in &generators {
                let y = g * &x;
                if !seen.contains(&y) {
                    if seen.len() >= cap {
                        return Err(GaloisError::ClosureCapExceeded { cap });
                    }
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        Ok(Self {
            dimension,
            generators,
            elements: seen.into_iter().collect(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn generators(&self) -> &[IntegerMatrix] {
        &self.generators
    }

    pub fn elements(&self) -> &[IntegerMatrix] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, m: &IntegerMatrix) -> bool {
        self.elements.binary_search(m).is_ok()
    }
}

pub fn close_group(
    dimension: usize,
    generators: Vec<IntegerMatrix>,
) -> Result<MatrixGroup, GaloisError> {
    MatrixGroup::close(dimension, generators)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Subgroup {
    Full,
    Inertia,
    WildInertia,
}

/// A lattice `M` with the action of a finite quotient of the Galois group,
/// its inertia subgroup, its wild inertia subgroup and (optionally) a
/// Frobenius matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisLatticeModule {
    lattice_rank: usize,
    full: MatrixGroup,
    inertia: Vec<usize>,
    wild_inertia: Vec<usize>,
    frobenius: Option<IntegerMatrix>,
    inertia_group: MatrixGroup,
}

impl GaloisLatticeModule {
    pub fn new(
        lattice_rank: usize,
        generators: Vec<IntegerMatrix>,
        inertia: Vec<usize>,
        wild_inertia: Vec<usize>,
        frobenius: Option<IntegerMatrix>,
    ) -> Result<Self, GaloisError> {
        let count = generators.len();
        for &index in inertia.iter().chain(&wild_inertia) {
            if index >= count {
                return Err(GaloisError::IndexOutOfRange { index, count });
            }
        }
        let full = MatrixGroup::close(lattice_rank, generators)?;
        let pick = |idx: &[usize]| -> Vec<IntegerMatrix> {
            idx.iter().map(|&i| full.generators[i].clone()).collect()
        };
        let inertia_group = MatrixGroup::close(lattice_rank, pick(&inertia))?;
        for &index in &wild_inertia {
            if !inertia_group.contains(&full.generators[index]) {
                return Err(GaloisError::NotSubgroup { index });
            }
        }
        let wild_group = MatrixGroup::close(lattice_rank, pick(&wild_inertia))?;
        // Conjugation by the generators suffices in a finite group.
        for (indices, group) in [(&inertia, &inertia_group), (&wild_inertia, &wild_group)] {
            for g in &full.generators {
                let g_inv = g.inverse_unimodular().expect("generators are unimodular");
                for &index in indices {
                    if !group.contains(&(&(g * &full.generators[index]) * &g_inv)) {
                        return Err(GaloisError::NotNormal { index });
                    }
                }
            }
        }
        if let Some(f) = &frobenius {
            if f.rows() != lattice_rank || f.cols() != lattice_rank {
                return Err(GaloisError::BadFrobenius {
                    dimension: lattice_rank,
                });
            }
            let f_inv = f.inverse_unimodular().ok_or(GaloisError::BadFrobenius {
                dimension: lattice_rank,
            })?;
            for &index in &inertia {
                let conj = &(f * &full.generators[index]) * &f_inv;
                if !inertia_group.contains(&conj) {
                    return Err(GaloisError::FrobeniusNotNormalizing { index });
                }
            }
        }
        Ok(Self {
            lattice_rank,
            full,
            inertia,
            wild_inertia,
            frobenius,
            inertia_group,
        })
    }

    /// Module with no inertia and no Frobenius, for plain group actions.
    pub fn unramified(lattice_rank: usize, generators: Vec<IntegerMatrix>) -> Result<Self, GaloisError> {
        Self::new(lattice_rank, generators, Vec::new(), Vec::new(), None)
    }

    pub fn lattice_rank(&self) -> usize {
        self.lattice_rank
    }

    pub fn full_group(&self) -> &MatrixGroup {
        &self.full
    }

    pub fn inertia_group(&self) -> &MatrixGroup {
        &self.inertia_group
    }

    pub fn generators(&self) -> &[IntegerMatrix] {
        self.full.generators()
    }

    pub fn inertia_indices(&self) -> &[usize] {
        &self.inertia
    }

    pub fn wild_inertia_indices(&self) -> &[usize] {
        &self.wild_inertia
    }

    pub fn frobenius(&self) -> Option<&IntegerMatrix> {
        self.frobenius.as_ref()
    }

    pub fn subgroup_generators(&self, subgroup: Subgroup) -> Vec<&IntegerMatrix> {
        let gens = self.full.generators();
        match subgroup {
            Subgroup::Full => gens.iter().collect(),
            Subgroup::Inertia => self.inertia.iter().map(|&i| &gens[i]).collect(),
            Subgroup::WildInertia => self.wild_inertia.iter().map(|&i| &gens[i]).collect(),
        }
    }

    /// `M / ⟨(g−1)m⟩` over the subgroup's generators.
    pub fn coinvariants(&self, subgroup: Subgroup) -> Coinvariants {
        coinvariants_of(self.lattice_rank, &self.subgroup_generators(subgroup))
    }

    /// Saturated fixed sublattice, as basis columns.
    pub fn invariants(&self, subgroup: Subgroup) -> IntegerMatrix {
        let n = self.lattice_rank;
        let id = IntegerMatrix::identity(n);
        let blocks: Vec<IntegerMatrix> = self
            .subgroup_generators(subgroup)
            .into_iter()
            .map(|g| g - &id)
            .collect();
        kernel_basis(&IntegerMatrix::vstack_all(n, &blocks))
    }

    /// The largest torsion-free quotient of `M` on which wild inertia acts
    /// trivially: the wild coinvariants modulo their torsion.
    pub fn largest_trivial_free_quotient(&self) -> TameQuotient {
        let co = self.coinvariants(Subgroup::WildInertia);
        let torsion = co.group.invariant_factors().len();
        let total = co.group.generator_count();
        TameQuotient {
            group: FgAbelianGroup::free(co.group.free_rank()),
            projection: co.projection.select_rows(torsion..total),
            section: co.section.select_cols(torsion..total),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ModuleJson {
    lattice_rank: usize,
    generators: Vec<IntegerMatrix>,
    #[serde(default)]
    inertia: Vec<usize>,
    #[serde(default)]
    wild_inertia: Vec<usize>,
    #[serde(default)]
    frobenius: Option<IntegerMatrix>,
}

impl Serialize for GaloisLatticeModule {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ModuleJson {
            lattice_rank: self.lattice_rank,
            generators: self.full.generators.clone(),
            inertia: self.inertia.clone(),
            wild_inertia: self.wild_inertia.clone(),
            frobenius: self.frobenius.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GaloisLatticeModule {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = ModuleJson::deserialize(deserializer)?;
        GaloisLatticeModule::new(
            raw.lattice_rank,
            raw.generators,
            raw.inertia,
            raw.wild_inertia,
            raw.frobenius,
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Coinvariant group with the projection `M → presentation` (torsion
/// coordinates first, then free ones) and a right inverse of it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Coinvariants {
    pub group: FgAbelianGroup,
    pub projection: IntegerMatrix,
    #[serde(skip)]
    pub section: IntegerMatrix,
}

pub fn coinvariants_of(rank: usize, generators: &[&IntegerMatrix]) -> Coinvariants {
    let id = IntegerMatrix::identity(rank);
    let blocks: Vec<IntegerMatrix> = generators.iter().map(|g| *g - &id).collect();
    let ck = cokernel_with_projection(&IntegerMatrix::hstack_all(rank, &blocks));
    Coinvariants {
        group: ck.group,
        projection: ck.projection,
        section: ck.section,
    }
}

/// Free quotient `N` of `M` with `projection: M → N` and a right inverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TameQuotient {
    pub group: FgAbelianGroup,
    pub projection: IntegerMatrix,
    #[serde(skip)]
    pub section: IntegerMatrix,
}

impl TameQuotient {
    /// The matrix `h` with `projection · g = h · projection`.
    pub fn descend(&self, g: &IntegerMatrix) -> Result<IntegerMatrix, GaloisError> {
        let pg = &self.projection * g;
        let h = &pg * &self.section;
        if &h * &self.projection == pg {
            Ok(h)
        } else {
            Err(GaloisError::DoesNotDescend)
        }
    }
}

/// Finitely generated abelian group `ℤ^n / im(relations)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub relations: IntegerMatrix,
}

impl Presentation {
    pub fn new(relations: IntegerMatrix) -> Self {
        Self { relations }
    }

    pub fn generators(&self) -> usize {
        self.relations.rows()
    }

    pub fn group(&self) -> FgAbelianGroup {
        cokernel(&self.relations)
    }
}

impl From<&FgAbelianGroup> for Presentation {
    fn from(g: &FgAbelianGroup) -> Self {
        Self::new(g.relations())
    }
}

/// Multiplicative order of `f` acting on the presented group, up to `cap`.
pub fn action_order(
    presentation: &Presentation,
    f: &IntegerMatrix,
    cap: u64,
) -> Result<u64, GaloisError> {
    let n = presentation.generators();
    let span = LatticeSpan::new(&presentation.relations);
    let id = IntegerMatrix::identity(n);
    let mut power = f.clone();
    for k in 1..=cap {
        if span.contains(&(&power - &id)) {
            return Ok(k);
        }
        power = f * &power;
    }
    Err(GaloisError::InfiniteOrder { cap })
}

/// `H¹` of the procyclic group topologically generated by `f`, acting
/// through a finite quotient on the presented group `A`.
///
/// For finite `A` this is `A/(f−1)A`. Otherwise it is
/// `ker(N_n)/(f−1)A` with `N_n = Σ_{i<n} fⁱ` taken at
/// `n₀ = order(f)·exponent(A_tors)`; the kernel at `2n₀` must agree.
pub fn cyclic_h1(
    presentation: &Presentation,
    f: &IntegerMatrix,
) -> Result<FgAbelianGroup, GaloisError> {
    cyclic_h1_with_cap(presentation, f, DEFAULT_ORDER_CAP)
}

pub fn cyclic_h1_with_cap(
    presentation: &Presentation,
    f: &IntegerMatrix,
    cap: u64,
) -> Result<FgAbelianGroup, GaloisError> {
    let n = presentation.generators();
    let rel = &presentation.relations;
    if f.rows() != n || f.cols() != n {
        return Err(GaloisError::BadFrobenius { dimension: n });
    }
    if !LatticeSpan::new(rel).contains(&(f * rel)) {
        return Err(GaloisError::NotAnEndomorphism);
    }
    let order = action_order(presentation, f, cap)?;
    let id = IntegerMatrix::identity(n);
    let boundaries = rel.hstack(&(f - &id));
    let group = presentation.group();
    if group.is_finite() {
        return Ok(cokernel(&boundaries));
    }

    let exponent = group
        .torsion_exponent()
        .to_u64()
        .ok_or(GaloisError::InfiniteOrder { cap })?;
    let level = order * exponent;
    let ker = norm_kernel(rel, f, level);
    let ker_doubled = norm_kernel(rel, f, 2 * level);
    let same = LatticeSpan::new(&ker).contains(&ker_doubled)
        && LatticeSpan::new(&ker_doubled).contains(&ker);
    if !same {
        return Err(GaloisError::NoStabilization { level });
    }
    Ok(subquotient(&ker, &boundaries)?)
}

/// Generators of `{x ∈ ℤⁿ : N_level·x ∈ im(rel)}`.
fn norm_kernel(rel: &IntegerMatrix, f: &IntegerMatrix, level: u64) -> IntegerMatrix {
    let n = rel.rows();
    let mut norm = IntegerMatrix::zeros(n, n);
    let mut power = IntegerMatrix::identity(n);
    for _ in 0..level {
        norm = &norm + &power;
        power = f * &power;
    }
    let system = norm.hstack(&(-rel));
    kernel_basis(&system).select_rows(0..n)
}

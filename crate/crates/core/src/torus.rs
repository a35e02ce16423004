//! Tame tori given by character-lattice data, the component group of their
//! Néron models, and its Galois cohomology over a finite residue field.
//!
//! The component group is computed as the inertia coinvariants of the
//! cocharacter lattice, `Φ = (X_*)_I`, with Frobenius acting through the
//! descended matrix.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::galois::{
    cyclic_h1, GaloisError, GaloisLatticeModule, Presentation, Subgroup,
};
use crate::lattice::{cokernel, FgAbelianGroup, IntegerMatrix, LatticeSpan};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorusError {
    #[error("degree must be at least 1")]
    InvalidDegree,
    #[error("wild inertia generator {index} acts nontrivially: the torus is not tame")]
    TamenessViolation { index: usize },
    #[error("frobenius does not descend to an automorphism of the component group")]
    FrobeniusDoesNotDescend,
    #[error(transparent)]
    Galois(#[from] GaloisError),
}

/// A torus split by a tamely ramified extension, given by its characters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct TameTorusSpec {
    characters: GaloisLatticeModule,
}

impl TameTorusSpec {
    pub fn new(characters: GaloisLatticeModule) -> Result<Self, TorusError> {
        let id = IntegerMatrix::identity(characters.lattice_rank());
        for &index in characters.wild_inertia_indices() {
            if characters.generators()[index] != id {
                return Err(TorusError::TamenessViolation { index });
            }
        }
        Ok(Self { characters })
    }

    pub fn characters(&self) -> &GaloisLatticeModule {
        &self.characters
    }

    pub fn rank(&self) -> usize {
        self.characters.lattice_rank()
    }

    /// Frobenius on characters, identity when unspecified.
    pub fn frobenius(&self) -> IntegerMatrix {
        self.characters
            .frobenius()
            .cloned()
            .unwrap_or_else(|| IntegerMatrix::identity(self.rank()))
    }
}

/// Split torus `𝔾_m^r`: trivial action, no inertia.
pub fn split_torus_spec(rank: usize) -> TameTorusSpec {
    let characters = GaloisLatticeModule::new(rank, Vec::new(), Vec::new(), Vec::new(), None)
        .expect("trivial module is well formed");
    TameTorusSpec { characters }
}

/// Characters `ℤ[G]/⟨N⟩` of the norm-one torus of a totally, tamely ramified
/// cyclic extension of degree `e`, with `G` acting as inertia.
///
/// Basis: the images of `1, σ, …, σ^{e−2}`; `σ` shifts them and sends
/// `σ^{e−2}` to `−(1 + σ + … + σ^{e−2})`.
pub fn norm_torus_spec(e: usize) -> Result<TameTorusSpec, TorusError> {
    if e == 0 {
        return Err(TorusError::InvalidDegree);
    }
    let n = e - 1;
    let mut sigma = IntegerMatrix::zeros(n, n);
    for i in 0..n {
        if i + 1 < n {
            sigma.set(i + 1, i, 1.into());
        } else {
            for k in 0..n {
                sigma.set(k, i, (-1).into());
            }
        }
    }
    let characters = GaloisLatticeModule::new(
        n,
        vec![sigma],
        vec![0],
        Vec::new(),
        Some(IntegerMatrix::identity(n)),
    )?;
    TameTorusSpec::new(characters)
}

/// Dual action on `X_* = Hom(M, ℤ)`: each matrix becomes its inverse transpose.
pub fn cocharacter_action(spec: &TameTorusSpec) -> Result<GaloisLatticeModule, TorusError> {
    let m = spec.characters();
    let dual = |g: &IntegerMatrix| {
        g.inverse_unimodular()
            .expect("module generators are unimodular")
            .transpose()
    };
    Ok(GaloisLatticeModule::new(
        m.lattice_rank(),
        m.generators().iter().map(dual).collect(),
        m.inertia_indices().to_vec(),
        m.wild_inertia_indices().to_vec(),
        m.frobenius().map(dual),
    )?)
}

/// `Φ(𝒢)` with the Frobenius matrix acting on its standard presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentGroup {
    pub group: FgAbelianGroup,
    pub frobenius_action: IntegerMatrix,
}

impl ComponentGroup {
    /// Validates that `frobenius_action` is an automorphism of the presented group.
    pub fn new(group: FgAbelianGroup, frobenius_action: IntegerMatrix) -> Result<Self, TorusError> {
        let n = group.generator_count();
        if frobenius_action.rows() != n || frobenius_action.cols() != n {
            return Err(TorusError::FrobeniusDoesNotDescend);
        }
        let rel = group.relations();
        if !LatticeSpan::new(&rel).contains(&(&frobenius_action * &rel)) {
            return Err(TorusError::FrobeniusDoesNotDescend);
        }
        // A surjective endomorphism of a finitely generated abelian group is bijective.
        if !cokernel(&frobenius_action.hstack(&rel)).is_trivial() {
            return Err(TorusError::FrobeniusDoesNotDescend);
        }
        Ok(Self {
            group,
            frobenius_action,
        })
    }

    pub fn with_trivial_frobenius(group: FgAbelianGroup) -> Self {
        let n = group.generator_count();
        Self {
            group,
            frobenius_action: IntegerMatrix::identity(n),
        }
    }

    pub fn presentation(&self) -> Presentation {
        Presentation::from(&self.group)
    }
}

pub fn component_group(spec: &TameTorusSpec) -> Result<ComponentGroup, TorusError> {
    let cochars = cocharacter_action(spec)?;
    let co = cochars.coinvariants(Subgroup::Inertia);
    let f = cochars
        .frobenius()
        .cloned()
        .unwrap_or_else(|| IntegerMatrix::identity(spec.rank()));
    let descended = &(&co.projection * &f) * &co.section;
    // projection·F ≡ F_Φ·projection modulo the relations of Φ
    let rel = co.group.relations();
    let defect = &(&co.projection * &f) - &(&descended * &co.projection);
    if !LatticeSpan::new(&rel).contains(&defect) {
        return Err(TorusError::FrobeniusDoesNotDescend);
    }
    ComponentGroup::new(co.group, descended)
}

/// `H¹(k, Φ)` for the Frobenius action on `Φ`.
pub fn h1_frobenius(cg: &ComponentGroup) -> Result<FgAbelianGroup, TorusError> {
    Ok(cyclic_h1(&cg.presentation(), &cg.frobenius_action)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(free: usize, factors: &[i64]) -> FgAbelianGroup {
        FgAbelianGroup::from_cyclic_orders(free, factors)
    }

    #[test]
    fn norm_torus_shapes() {
        assert_eq!(norm_torus_spec(1).unwrap().rank(), 0);
        let t2 = norm_torus_spec(2).unwrap();
        assert_eq!(t2.characters().generators()[0], IntegerMatrix::from_i64(&[&[-1]]));
        let t3 = norm_torus_spec(3).unwrap();
        let sigma = &t3.characters().generators()[0];
        assert_eq!(t3.rank(), 2);
        assert!(!sigma.is_identity());
        assert!(sigma.pow(3).is_identity());
        assert_eq!(norm_torus_spec(0), Err(TorusError::InvalidDegree));
    }

    #[test]
    fn cocharacter_examples() {
        let split = cocharacter_action(&split_torus_spec(2)).unwrap();
        assert!(split.generators().is_empty());
        let t2 = cocharacter_action(&norm_torus_spec(2).unwrap()).unwrap();
        assert_eq!(t2.generators()[0], IntegerMatrix::from_i64(&[&[-1]]));
        let t3 = cocharacter_action(&norm_torus_spec(3).unwrap()).unwrap();
        let d = &t3.generators()[0];
        assert!(d.pow(3).is_identity() && !d.is_identity());
        assert!(d.is_unimodular());
    }

    #[test]
    fn component_group_examples() {
        assert_eq!(component_group(&split_torus_spec(1)).unwrap().group, g(1, &[]));
        assert_eq!(component_group(&norm_torus_spec(2).unwrap()).unwrap().group, g(0, &[2]));
        assert_eq!(component_group(&norm_torus_spec(3).unwrap()).unwrap().group, g(0, &[3]));
        assert_eq!(
            component_group(&norm_torus_spec(1).unwrap()).unwrap().group,
            FgAbelianGroup::trivial()
        );
    }

    #[test]
    fn tameness_is_enforced() {
        let sign = IntegerMatrix::from_i64(&[&[-1]]);
        let wild = GaloisLatticeModule::new(1, vec![sign], vec![0], vec![0], None).unwrap();
        assert_eq!(
            TameTorusSpec::new(wild),
            Err(TorusError::TamenessViolation { index: 0 })
        );
    }

    #[test]
    fn h1_examples() {
        let z2 = ComponentGroup::with_trivial_frobenius(g(0, &[2]));
        assert_eq!(h1_frobenius(&z2).unwrap(), g(0, &[2]));
        let z = ComponentGroup::with_trivial_frobenius(g(1, &[]));
        assert_eq!(h1_frobenius(&z).unwrap(), FgAbelianGroup::trivial());
        for e in [2usize, 3, 4, 6] {
            let cg = ComponentGroup::with_trivial_frobenius(g(0, &[e as i64]));
            assert_eq!(h1_frobenius(&cg).unwrap(), g(0, &[e as i64]));
        }
    }

    #[test]
    fn component_group_validates_frobenius() {
        // x -> 2x is not an automorphism of Z/4
        assert_eq!(
            ComponentGroup::new(g(0, &[4]), IntegerMatrix::from_i64(&[&[2]])),
            Err(TorusError::FrobeniusDoesNotDescend)
        );
        assert!(ComponentGroup::new(g(0, &[4]), IntegerMatrix::from_i64(&[&[3]])).is_ok());
    }

    #[test]
    fn nontrivial_frobenius_on_split_rank_two() {
        // Characters Z^2 with Frobenius swapping: unramified, Phi = Z^2 with swap, H1 = 0.
        let swap = IntegerMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let m = GaloisLatticeModule::new(2, vec![swap.clone()], vec![], vec![], Some(swap)).unwrap();
        let cg = component_group(&TameTorusSpec::new(m).unwrap()).unwrap();
        assert_eq!(cg.group, g(2, &[]));
        assert_eq!(h1_frobenius(&cg).unwrap(), FgAbelianGroup::trivial());
    }
}

//! Cross-check between the lattice side and the p-adic side for the tame
//! norm torus of degree `e`: `|H¹(k, Φ)|` against the number of norm classes
//! `K^×/N(L^×)` actually hit by `norm_class`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::padic::{norm_class, PadicContext, PadicError};
use crate::torus::{component_group, h1_frobenius, norm_torus_spec, TorusError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BridgeError {
    #[error("lattice side gives {lattice} classes, p-adic side finds {padic}")]
    CardinalityMismatch { lattice: String, padic: usize },
    #[error("H^1 of the component group is infinite")]
    InfiniteCohomology,
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Torus(#[from] TorusError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgeReport {
    pub p: u64,
    pub e: u32,
    /// `|H¹(k, Φ)|` for `Φ = Φ(norm torus of degree e)`, trivial Frobenius.
    pub lattice_count: u64,
    /// Distinct values of `norm_class(p^α·u)`, `α ∈ {0, 1}`, `u` over unit residues.
    pub padic_classes: Vec<u32>,
}

pub fn cardinality_bridge(ctx: PadicContext, e: u32) -> Result<BridgeReport, BridgeError> {
    ctx.check_degree(e)?;
    let cg = component_group(&norm_torus_spec(e as usize)?)?;
    let h1 = h1_frobenius(&cg)?;
    let order = h1.order().ok_or(BridgeError::InfiniteCohomology)?;

    let p = i128::from(ctx.p());
    let mut classes = BTreeSet::new();
    for alpha in 0..2u32 {
        for u in 1..p {
            let a = ctx.element(p.pow(alpha) * u);
            classes.insert(norm_class(&a, e)?.value);
        }
    }
    if BigInt::from(classes.len()) != order {
        return Err(BridgeError::CardinalityMismatch {
            lattice: order.to_string(),
            padic: classes.len(),
        });
    }
    Ok(BridgeReport {
        p: ctx.p(),
        e,
        lattice_count: u64::try_from(&order).expect("order bounded by p - 1"),
        padic_classes: classes.into_iter().collect(),
    })
}

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{FgAbelianGroup, IntegerMatrix, LatticeError};

/// Unimodular decomposition `U·A·V = S` with `S` in Smith normal form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnfResult {
    #[serde(rename = "U")]
    pub u: IntegerMatrix,
    #[serde(rename = "S")]
    pub s: IntegerMatrix,
    #[serde(rename = "V")]
    pub v: IntegerMatrix,
}

impl SnfResult {
    /// The `min(rows, cols)` diagonal entries of `S`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s.get(i, i).clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|d| !d.is_zero()).count()
    }
}

/// Smith normal form with transforms.
///
/// Each stage moves the nonzero entry of least absolute value in the trailing
/// block to the pivot, clears its row and column by Euclidean steps, and
/// folds in any row whose entries the pivot fails to divide. Pivots are made
/// nonnegative, so `S` is unique.
pub fn smith_normal_form(a: &IntegerMatrix) -> SnfResult {
    let (m, n) = (a.rows(), a.cols());
    let mut s = a.clone();
    let mut u = IntegerMatrix::identity(m);
    let mut v = IntegerMatrix::identity(n);

    for t in 0..m.min(n) {
        let Some((pi, pj)) = least_nonzero(&s, (t..m).flat_map(|i| (t..n).map(move |j| (i, j))))
        else {
            break;
        };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let q = -(s.get(i, t) / s.get(t, t));
                s.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                dirty |= !s.get(i, t).is_zero();
            }
            for j in t + 1..n {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let q = -(s.get(t, j) / s.get(t, t));
                s.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                dirty |= !s.get(t, j).is_zero();
            }
            if !dirty {
                let pivot = s.get(t, t).clone();
                let offender = (t + 1..m)
                    .find(|&i| (t + 1..n).any(|j| !s.get(i, j).is_multiple_of(&pivot)));
                match offender {
                    Some(i) => {
                        s.add_row_multiple(t, i, &BigInt::one());
                        u.add_row_multiple(t, i, &BigInt::one());
                    }
                    None => break,
                }
            }
            // Re-seat the smallest remaining entry of the pivot cross.
            let cross = (t..m).map(|i| (i, t)).chain((t + 1..n).map(|j| (t, j)));
            if let Some((pi, pj)) = least_nonzero(&s, cross) {
                s.swap_rows(t, pi);
                u.swap_rows(t, pi);
                s.swap_cols(t, pj);
                v.swap_cols(t, pj);
            }
        }

        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }

    SnfResult { u, s, v }
}

fn least_nonzero(
    s: &IntegerMatrix,
    cells: impl Iterator<Item = (usize, usize)>,
) -> Option<(usize, usize)> {
    cells
        .filter(|&(i, j)| !s.get(i, j).is_zero())
        .min_by(|&(i, j), &(k, l)| s.get(i, j).abs().cmp(&s.get(k, l).abs()))
}

/// `ℤ^rows / im(A)` together with an explicit presentation map.
///
/// Coordinates of the presented group are the torsion coordinates (in the
/// order of `group.invariant_factors`) followed by the free coordinates.
/// `projection` sends `ℤ^rows` onto those coordinates; `section` is a right
/// inverse of it (`projection · section = I`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cokernel {
    pub group: FgAbelianGroup,
    pub projection: IntegerMatrix,
    pub section: IntegerMatrix,
}

impl Cokernel {
    /// Relations of the presentation: `d_i e_i` for each torsion coordinate.
    pub fn relations(&self) -> IntegerMatrix {
        self.group.relations()
    }
}

pub fn cokernel(a: &IntegerMatrix) -> FgAbelianGroup {
    cokernel_with_projection(a).group
}

pub fn cokernel_with_projection(a: &IntegerMatrix) -> Cokernel {
    let snf = smith_normal_form(a);
    let diag = snf.diagonal();
    let rank = snf.rank();
    let units = diag[..rank].iter().filter(|d| d.is_one()).count();
    let factors: Vec<BigInt> = diag[units..rank].to_vec();
    let free_rank = a.rows() - rank;
    let group = FgAbelianGroup::new(free_rank, factors).expect("SNF diagonal is in normal form");
    let projection = snf.u.select_rows(units..a.rows());
    let u_inv = snf
        .u
        .inverse_unimodular()
        .expect("SNF left transform is unimodular");
    let section = u_inv.select_cols(units..a.rows());
    Cokernel {
        group,
        projection,
        section,
    }
}

/// Basis (as columns) of the saturated lattice `{x : A·x = 0}`.
pub fn kernel_basis(a: &IntegerMatrix) -> IntegerMatrix {
    let snf = smith_normal_form(a);
    snf.v.select_cols(snf.rank()..a.cols())
}

/// Column span of a generating set, prepared for membership queries.
#[derive(Clone, Debug)]
pub struct LatticeSpan {
    ambient: usize,
    u: IntegerMatrix,
    pivots: Vec<BigInt>,
}

impl LatticeSpan {
    pub fn new(generators: &IntegerMatrix) -> Self {
        let snf = smith_normal_form(generators);
        let rank = snf.rank();
        let pivots = snf.diagonal()[..rank].to_vec();
        Self {
            ambient: generators.rows(),
            u: snf.u,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Coordinates of `vectors` (as columns) in the basis
    /// `U⁻¹[:, :rank]·diag(pivots)` of the span, or the index of the first
    /// column that lies outside it.
    pub fn coordinates(&self, vectors: &IntegerMatrix) -> Result<IntegerMatrix, usize> {
        assert_eq!(vectors.rows(), self.ambient, "span ambient dimension");
        let w = &self.u * vectors;
        let rank = self.rank();
        let mut x = IntegerMatrix::zeros(rank, vectors.cols());
        for c in 0..vectors.cols() {
            for i in rank..self.ambient {
                if !w.get(i, c).is_zero() {
                    return Err(c);
                }
            }
            for (i, d) in self.pivots.iter().enumerate() {
                let (q, r) = w.get(i, c).div_rem(d);
                if !r.is_zero() {
                    return Err(c);
                }
                x.set(i, c, q);
            }
        }
        Ok(x)
    }

    pub fn contains(&self, vectors: &IntegerMatrix) -> bool {
        self.coordinates(vectors).is_ok()
    }
}

/// `span(ker) / span(im)` in normal form.
pub fn subquotient(ker: &IntegerMatrix, im: &IntegerMatrix) -> Result<FgAbelianGroup, LatticeError> {
    if ker.rows() != im.rows() {
        return Err(LatticeError::ShapeMismatch {
            expected: format!("{} rows in the submodule generators", ker.rows()),
            found: format!("{} rows", im.rows()),
        });
    }
    let span = LatticeSpan::new(ker);
    let coords = span
        .coordinates(im)
        .map_err(|column| LatticeError::SubgroupViolation { column })?;
    Ok(cokernel(&coords))
}

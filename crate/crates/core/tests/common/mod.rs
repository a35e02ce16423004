//! Random generators and independent reference computations shared by the
//! integration suites.

#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;

use neron_torsors::galois::{GaloisLatticeModule, MatrixGroup};
use neron_torsors::lattice::IntegerMatrix;
use neron_torsors::torsor::{MultivariatePolynomial, Term};

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> IntegerMatrix {
    let entries = (0..rows * cols)
        .map(|_| BigInt::from(rng.gen_range(-bound..=bound)))
        .collect();
    IntegerMatrix::new(rows, cols, entries).unwrap()
}

/// Product of random elementary and sign matrices.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize, steps: usize) -> IntegerMatrix {
    let mut m = IntegerMatrix::identity(n);
    if n == 0 {
        return m;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        match rng.gen_range(0..4) {
            0 if i != j => m.swap_rows(i, j),
            1 => m.negate_row(i),
            _ if i != j => m.add_row_multiple(i, j, &BigInt::from(rng.gen_range(-2..=2))),
            _ => {}
        }
    }
    m
}

pub fn conjugate(c: &IntegerMatrix, c_inv: &IntegerMatrix, g: &IntegerMatrix) -> IntegerMatrix {
    &(c * g) * c_inv
}

pub fn random_signed_permutation<R: Rng>(rng: &mut R, n: usize) -> IntegerMatrix {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut m = IntegerMatrix::zeros(n, n);
    for (col, &row) in perm.iter().enumerate() {
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        m.set(row, col, BigInt::from(sign));
    }
    m
}

/// Integer matrices of finite order: rotations of order 3, 4, 6, signs and
/// permutation blocks.
fn finite_order_block<R: Rng>(rng: &mut R, max: usize) -> IntegerMatrix {
    let blocks: [&[&[i64]]; 7] = [
        &[&[1]],
        &[&[-1]],
        &[&[0, -1], &[1, -1]],
        &[&[0, -1], &[1, 0]],
        &[&[1, -1], &[1, 0]],
        &[&[0, 1], &[1, 0]],
        &[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]],
    ];
    loop {
        let b = IntegerMatrix::from_i64(blocks[rng.gen_range(0..blocks.len())]);
        if b.rows() <= max {
            return b;
        }
    }
}

pub fn block_diagonal(blocks: &[IntegerMatrix]) -> IntegerMatrix {
    let n = blocks.iter().map(IntegerMatrix::rows).sum();
    let mut m = IntegerMatrix::zeros(n, n);
    let mut at = 0;
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                m.set(at + i, at + j, b.get(i, j).clone());
            }
        }
        at += b.rows();
    }
    m
}

/// Multiplicative order of an invertible matrix, if at most `cap`.
pub fn matrix_order(f: &IntegerMatrix, cap: u64) -> Option<u64> {
    let id = IntegerMatrix::identity(f.rows());
    let mut acc = f.clone();
    for k in 1..=cap {
        if acc == id {
            return Some(k);
        }
        acc = &acc * f;
    }
    None
}

/// A random rank-`n` integer matrix of order at most 6, in a random basis.
pub fn random_finite_order_action<R: Rng>(rng: &mut R, n: usize) -> IntegerMatrix {
    loop {
        let mut blocks = Vec::new();
        let mut used = 0;
        while used < n {
            let b = finite_order_block(rng, n - used);
            used += b.rows();
            blocks.push(b);
        }
        let f = block_diagonal(&blocks);
        if matrix_order(&f, 6).is_some() {
            let c = random_unimodular(rng, n, 6);
            let c_inv = c.inverse_unimodular().unwrap();
            return conjugate(&c, &c_inv, &f);
        }
    }
}

/// Conjugates of `seeds` by every element of `group`, without repeats.
pub fn normal_closure_generators(group: &MatrixGroup, seeds: &[IntegerMatrix]) -> Vec<IntegerMatrix> {
    let mut out = BTreeSet::new();
    for h in group.elements() {
        let h_inv = h.inverse_unimodular().unwrap();
        for w in seeds {
            out.insert(conjugate(h, &h_inv, w));
        }
    }
    out.into_iter().collect()
}

/// Module generated by signed permutations in a random basis, so the group is
/// finite, with inertia and wild inertia taken as normal closures of random
/// generator subsets.
pub fn random_module<R: Rng>(rng: &mut R, max_rank: usize) -> GaloisLatticeModule {
    let n = rng.gen_range(1..=max_rank);
    let c = random_unimodular(rng, n, 6);
    let c_inv = c.inverse_unimodular().unwrap();
    let count = rng.gen_range(1..=3);
    let mut gens: Vec<IntegerMatrix> = (0..count)
        .map(|_| conjugate(&c, &c_inv, &random_signed_permutation(rng, n)))
        .collect();
    let full = MatrixGroup::close(n, gens.clone()).unwrap();
    let inertia_seeds: Vec<IntegerMatrix> = gens.iter().filter(|_| rng.gen_bool(0.7)).cloned().collect();
    let wild_seeds: Vec<IntegerMatrix> = inertia_seeds.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
    let wild_gens = normal_closure_generators(&full, &wild_seeds);
    let inertia_gens = normal_closure_generators(&full, &inertia_seeds);
    let start = gens.len();
    gens.extend(inertia_gens);
    let mid = gens.len();
    gens.extend(wild_gens);
    let inertia: Vec<usize> = (start..gens.len()).collect();
    let wild: Vec<usize> = (mid..gens.len()).collect();
    GaloisLatticeModule::new(n, gens, inertia, wild, None).unwrap()
}

pub fn random_elements<R: Rng>(rng: &mut R, group: &MatrixGroup, count: usize) -> Vec<IntegerMatrix> {
    (0..count)
        .map(|_| group.elements()[rng.gen_range(0..group.order())].clone())
        .collect()
}

pub fn random_polynomial<R: Rng>(rng: &mut R, n_vars: usize, max_degree: u32, bound: i64) -> MultivariatePolynomial {
    let count = rng.gen_range(1..=5);
    let terms = (0..count)
        .map(|_| {
            let mut exponents = vec![0u32; n_vars];
            let degree = rng.gen_range(0..=max_degree);
            for _ in 0..degree {
                exponents[rng.gen_range(0..n_vars)] += 1;
            }
            Term {
                coefficient: rng.gen_range(-bound..=bound),
                exponents,
            }
        })
        .collect();
    MultivariatePolynomial::new(n_vars, terms).unwrap()
}

/// Naive evaluation mod `m` with big integers, independent of the library path.
pub fn eval_naive(f: &MultivariatePolynomial, point: &[u64], m: u64) -> u64 {
    let m = BigInt::from(m);
    let mut acc = BigInt::zero();
    for t in f.terms() {
        let mut v = BigInt::from(t.coefficient);
        for (&x, &a) in point.iter().zip(&t.exponents) {
            v *= BigInt::from(x).pow(a);
        }
        acc += v;
    }
    let r = ((acc % &m) + &m) % &m;
    u64::try_from(r).unwrap()
}

/// Discrete logarithm by brute force, to the smallest primitive root.
pub fn dlog_reference(r: u64, p: u64) -> u64 {
    let g = (2..p)
        .find(|&g| {
            let mut x = 1;
            (1..p - 1).all(|_| {
                x = x * g % p;
                x != 1
            })
        })
        .unwrap();
    let mut x = 1;
    for k in 0..p - 1 {
        if x == r % p {
            return k;
        }
        x = x * g % p;
    }
    panic!("{r} is not a unit mod {p}");
}

/// Nonnegative, each entry dividing the next, zeros last.
pub fn divisibility_chain(d: &[BigInt]) -> bool {
    d.windows(2).all(|w| {
        if w[0].is_zero() {
            w[1].is_zero()
        } else {
            (&w[1] % &w[0]).is_zero()
        }
    }) && d.iter().all(|x| !x.is_negative())
}

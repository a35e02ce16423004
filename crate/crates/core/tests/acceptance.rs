//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{
    block_diagonal, divisibility_chain, eval_naive, random_finite_order_action, random_matrix,
    random_module, random_polynomial,
};
use neron_torsors::bridge::cardinality_bridge;
use neron_torsors::galois::{cyclic_h1, GaloisError, GaloisLatticeModule, Presentation};
use neron_torsors::lattice::{cokernel, kernel_basis, smith_normal_form, FgAbelianGroup, IntegerMatrix};
use neron_torsors::padic::{norm_class, NormOracle, PadicContext, PadicInt};
use neron_torsors::torsor::{
    constancy_check, verify_factorization, MultivariatePolynomial, NormTorsorFamily,
};
use neron_torsors::torus::{component_group, h1_frobenius, norm_torus_spec, ComponentGroup};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const SWEEP: [(u64, u32); 6] = [(3, 2), (5, 2), (7, 2), (13, 2), (7, 3), (13, 3)];
const DIAGRAM_PAIRS: [(u64, u32); 3] = [(3, 2), (5, 2), (7, 3)];
const ORACLE_LIMIT: u128 = 10_000_000;

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let t = start.elapsed();
    if t < limit {
        Ok(t)
    } else {
        Err(format!("took {t:?}, limit {limit:?}"))
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let cg = component_group(&norm_torus_spec(2).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let t = within(Duration::from_secs(1), start)?;
    ensure!(cg.group == FgAbelianGroup::cyclic(2), "got {}", cg.group);
    ensure!(cg.group.order() == Some(BigInt::from(2)), "order {:?}", cg.group.order());
    Ok(format!("Φ = {} in {t:?}", cg.group))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let h = h1_frobenius(&ComponentGroup::with_trivial_frobenius(FgAbelianGroup::cyclic(2)))
        .map_err(|e| e.to_string())?;
    let t = within(Duration::from_secs(1), start)?;
    ensure!(h.order() == Some(BigInt::from(2)), "got {h}");
    Ok(format!("H¹ = {h} in {t:?}"))
}

fn sweep_element(ctx: PadicContext, alpha: u32, u: u64) -> PadicInt {
    ctx.element(i128::from(ctx.p()).pow(alpha) * i128::from(u))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut doubled = 0;
    for (p, e) in SWEEP {
        let ctx = PadicContext::new(p, 6).map_err(|e| e.to_string())?;
        let verdicts = |sp: u32| -> Result<Vec<u32>, String> {
            let oracle = NormOracle::build(ctx, e, sp, 4).map_err(|e| e.to_string())?;
            let mut out = Vec::new();
            for alpha in 0..=2 {
                for u in 1..p {
                    let a = sweep_element(ctx, alpha, u);
                    out.push(oracle.norm_class(&a).map_err(|err| format!("oracle at {a}: {err}"))?.value);
                }
            }
            Ok(out)
        };
        let oracle = verdicts(2)?;
        let mut i = 0;
        for alpha in 0..=2 {
            for u in 1..p {
                let a = sweep_element(ctx, alpha, u);
                let formula = norm_class(&a, e).map_err(|err| err.to_string())?.value;
                ensure!(
                    formula == oracle[i],
                    "(p={p}, e={e}) a = {p}^{alpha}·{u}: formula {formula}, oracle {}",
                    oracle[i]
                );
                i += 1;
                checked += 1;
            }
        }
        if u128::from(p).pow(e * 3) <= ORACLE_LIMIT {
            ensure!(verdicts(3)? == oracle, "(p={p}, e={e}) verdict changed at search precision 3");
            doubled += 1;
        }
    }
    Ok(format!(
        "{checked} values agree, {doubled} pairs stable at search precision 3, {:?}",
        start.elapsed()
    ))
}

fn criterion_4() -> Outcome {
    let mut lines = Vec::new();
    for (p, e) in SWEEP {
        let ctx = PadicContext::new(p, 6).map_err(|e| e.to_string())?;
        let r = cardinality_bridge(ctx, e).map_err(|err| format!("(p={p}, e={e}): {err}"))?;
        ensure!(r.padic_classes.len() == e as usize, "(p={p}, e={e}): {} classes", r.padic_classes.len());
        ensure!(r.lattice_count == u64::from(e), "(p={p}, e={e}): |H¹| = {}", r.lattice_count);
        lines.push(format!("({p},{e})"));
    }
    Ok(format!("|H¹(k,Φ)| = #classes = e for {}", lines.join(" ")))
}

fn all_points(p: u64, n: usize) -> Vec<Vec<u64>> {
    let mut points = vec![Vec::new()];
    for _ in 0..n {
        points = points
            .into_iter()
            .flat_map(|pt| {
                (0..p).map(move |x| {
                    let mut next = pt.clone();
                    next.push(x);
                    next
                })
            })
            .collect();
    }
    points
}

fn criterion_5() -> Outcome {
    const FAMILIES: usize = 20;
    const SAMPLES: usize = 10_000;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut tested = 0;
    for (p, e) in DIAGRAM_PAIRS {
        let ctx = PadicContext::new(p, 6).map_err(|e| e.to_string())?;
        let mut done = 0;
        while done < FAMILIES {
            let n = rng.gen_range(1..=3);
            let f = random_polynomial(&mut rng, n, 4, 9);
            let zeros: BTreeSet<Vec<u64>> = all_points(p, n)
                .into_iter()
                .filter(|pt| eval_naive(&f, pt, p) == 0)
                .collect();
            if zeros.len() as u64 == p.pow(n as u32) {
                continue;
            }
            let fam = NormTorsorFamily::new(ctx, e, f.clone()).map_err(|e| e.to_string())?;
            let seed = rng.gen();
            let r = verify_factorization(&fam, SAMPLES, seed).map_err(|e| e.to_string())?;
            ensure!(r.failures.is_empty(), "(p={p}, e={e}) f = {f}: {:?}", r.failures[0]);
            ensure!(r.samples_drawn == SAMPLES, "drew {}", r.samples_drawn);
            ensure!(r.samples_tested + r.skipped_nonunit == SAMPLES, "sample counts do not add up");
            ensure!(r.pair_checks == r.samples_tested, "pair checks {}", r.pair_checks);
            let skipped: BTreeSet<Vec<u64>> = r.skipped_residues.iter().cloned().collect();
            ensure!(
                skipped == zeros,
                "(p={p}, e={e}) f = {f}: skipped {skipped:?}, zero locus {zeros:?}"
            );
            tested += r.samples_tested;
            done += 1;
        }
    }
    Ok(format!(
        "{} families x {SAMPLES} samples, {tested} points commute, {:?}",
        FAMILIES * DIAGRAM_PAIRS.len(),
        start.elapsed()
    ))
}

fn m(rows: &[&[i64]]) -> IntegerMatrix {
    IntegerMatrix::from_i64(rows)
}

fn tame_examples() -> Result<(), String> {
    let cases = [
        (GaloisLatticeModule::new(2, vec![IntegerMatrix::identity(2)], vec![0], vec![0], None), 2usize),
        (GaloisLatticeModule::new(1, vec![m(&[&[-1]])], vec![0], vec![0], None), 0),
        (GaloisLatticeModule::new(2, vec![m(&[&[0, 1], &[1, 0]])], vec![0], vec![0], None), 1),
    ];
    for (module, rank) in cases {
        let q = module.map_err(|e| e.to_string())?.largest_trivial_free_quotient();
        ensure!(q.group == FgAbelianGroup::free(rank), "expected Z^{rank}, got {}", q.group);
    }
    Ok(())
}

fn universal_property<R: Rng>(rng: &mut R, module: &GaloisLatticeModule) -> Result<(), String> {
    let n = module.lattice_rank();
    let q = module.largest_trivial_free_quotient();
    let id = IntegerMatrix::identity(n);
    ensure!(q.group.is_free(), "quotient {} not free", q.group);
    ensure!(cokernel(&q.projection).is_trivial(), "projection not surjective");
    let wild: Vec<IntegerMatrix> = module
        .wild_inertia_indices()
        .iter()
        .map(|&i| &module.generators()[i] - &id)
        .collect();
    for d in &wild {
        ensure!((&q.projection * d).is_zero(), "wild inertia acts on the quotient");
    }
    for g in module.generators() {
        q.descend(g).map_err(|e| e.to_string())?;
    }
    // Homs φ: M → ℤ^k killing every (g − 1), g wild: rows in the kernel of the stacked transposes.
    let transposed: Vec<IntegerMatrix> = wild.iter().map(IntegerMatrix::transpose).collect();
    let homs = kernel_basis(&IntegerMatrix::vstack_all(n, &transposed));
    ensure!(
        homs.cols() == q.group.free_rank(),
        "rank {} of trivial homs vs quotient rank {}",
        homs.cols(),
        q.group.free_rank()
    );
    for _ in 0..5 {
        let k = rng.gen_range(1..=2);
        let phi = &random_matrix(rng, k, homs.cols(), 4) * &homs.transpose();
        let h = &phi * &q.section;
        ensure!(&h * &q.projection == phi, "hom does not factor through the quotient");
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    tame_examples()?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let count = 150;
    for _ in 0..count {
        let module = random_module(&mut rng, 4);
        universal_property(&mut rng, &module)?;
    }
    Ok(format!("3 examples, universal property on {count} random modules"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let snf_count = 1500;
    for _ in 0..snf_count {
        let (r, c) = (rng.gen_range(0..=6), rng.gen_range(0..=6));
        let a = random_matrix(&mut rng, r, c, 20);
        let s = smith_normal_form(&a);
        ensure!(&(&s.u * &a) * &s.v == s.s, "U·A·V ≠ S for {a}");
        ensure!(s.u.is_unimodular() && s.v.is_unimodular(), "transform not unimodular for {a}");
        let off_diagonal = (0..r).any(|i| (0..c).any(|j| i != j && s.s.get(i, j) != &BigInt::from(0)));
        ensure!(!off_diagonal, "S not diagonal for {a}");
        ensure!(divisibility_chain(&s.diagonal()), "divisibility fails for {a}");
    }
    let mut actions = 0;
    for _ in 0..150 {
        let n = rng.gen_range(1..=4);
        let f = random_finite_order_action(&mut rng, n);
        match cyclic_h1(&Presentation::new(IntegerMatrix::zeros(n, 0)), &f) {
            Err(GaloisError::NoStabilization { level }) => return Err(format!("no stabilization at {level} for {f}")),
            Err(other) => return Err(other.to_string()),
            Ok(_) => actions += 1,
        }
    }
    // mixed groups ℤ^a ⊕ ℤ/d with F acting blockwise
    for _ in 0..50 {
        let n = rng.gen_range(1..=3);
        let d: i64 = rng.gen_range(2..=12);
        let u = (1..d).filter(|x| num_integer::gcd(*x, d) == 1).nth(rng.gen_range(0..2)).unwrap_or(1);
        let f = block_diagonal(&[random_finite_order_action(&mut rng, n), m(&[&[u]])]);
        let mut rel = IntegerMatrix::zeros(n + 1, 1);
        rel.set(n, 0, BigInt::from(d));
        match cyclic_h1(&Presentation::new(rel), &f) {
            Err(GaloisError::NoStabilization { level }) => return Err(format!("no stabilization at {level} for {f}")),
            Err(other) => return Err(other.to_string()),
            Ok(_) => actions += 1,
        }
    }
    Ok(format!("{snf_count} SNF decompositions, {actions} cyclic actions stabilize"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut count = 0;
    for (p, e) in DIAGRAM_PAIRS.into_iter().chain([(13, 3), (11, 5), (13, 4)]) {
        let ctx = PadicContext::new(p, 6).map_err(|e| e.to_string())?;
        for _ in 0..12 {
            let n = rng.gen_range(1..=3);
            let c = rng.gen_range(1..p as i64);
            // ḡ(0) ≠ 0 keeps the unit locus nonempty
            let g0 = random_polynomial(&mut rng, n, 2, 9);
            let at_origin = eval_naive(&g0, &vec![0; n], p) as i64;
            let target = rng.gen_range(1..p as i64);
            let shift = MultivariatePolynomial::constant(n, target - at_origin);
            let g = g0.try_add(&shift).map_err(|e| e.to_string())?;
            let h = random_polynomial(&mut rng, n, 3, 9);
            let f = g
                .try_pow(e)
                .and_then(|ge| ge.try_scale(c))
                .and_then(|cge| cge.try_add(&h.try_scale(p as i64)?))
                .map_err(|e| e.to_string())?;
            let fam = NormTorsorFamily::new(ctx, e, f.clone()).map_err(|e| e.to_string())?;
            let r = constancy_check(&fam).map_err(|e| e.to_string())?;
            let expected = ctx.power_residue_class(c as u64, e).map_err(|e| e.to_string())?.value;
            ensure!(r.constant, "(p={p}, e={e}) f = {f} not constant: {:?}", r.distinct_classes());
            ensure!(r.class == Some(expected), "(p={p}, e={e}) f = {f}: class {:?}, expected {expected}", r.class);
            count += 1;
        }
    }
    let ctx = PadicContext::new(5, 6).map_err(|e| e.to_string())?;
    let x = NormTorsorFamily::new(ctx, 2, MultivariatePolynomial::variable(1, 0)).map_err(|e| e.to_string())?;
    let r = constancy_check(&x).map_err(|e| e.to_string())?;
    ensure!(!r.constant, "f = x at (5,2) reported constant");
    ensure!(r.distinct_classes() == BTreeSet::from([0, 1]), "classes {:?}", r.distinct_classes());
    Ok(format!("{count} families c·g^e + p·h constant; f = x at (5,2) is not"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("component group of the tame quadratic norm torus has order 2", criterion_1),
        ("H¹(k, Z/2) with trivial Frobenius has order 2", criterion_2),
        ("norm_class agrees with the brute-force oracle", criterion_3),
        ("cardinality bridge between lattice and p-adic sides", criterion_4),
        ("evaluation factors through reduction on random families", criterion_5),
        ("tame quotient examples and universal property", criterion_6),
        ("SNF contract and cyclic H¹ stabilization", criterion_7),
        ("constancy probe", criterion_8),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|payload| {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {}  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

mod common;

use agiopp::algebra::{make_field, Embedding, Fe, Field};
use agiopp::folding::{fold, fold_table, Challenge, OracleTable};
use agiopp::foldplan::{FoldingPlan, Schedule};
use agiopp::soundness::{err_commit, Interval};
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_word(f: &Field, n: usize, rng: &mut impl Rng) -> Vec<Fe> {
    (0..n).map(|_| f.random(rng)).collect()
}

#[test]
fn zero_folds_to_zero() {
    let plan = hermitian_plan();
    let f = &plan.field;
    let t = OracleTable { level: 0, values: vec![f.zero(); 60] };
    let z = Challenge { z1: f.elem(7), z2: f.elem(9) };
    let out = fold_table(f, &plan.steps, &t, &z).unwrap();
    assert_eq!(out.level, 1);
    assert!(out.values.iter().all(|&v| v == f.zero()));
    assert!(fold_table(f, &plan.steps, &OracleTable { level: 9, values: vec![] }, &z).is_err());
}

#[test]
fn hermitian_completeness_sampled() {
    let plan = hermitian_plan();
    let f = &plan.field;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..plan.rounds() {
        for _ in 0..1000 {
            let c = random_codeword(&plan.levels[i], f, &mut rng);
            let z = Challenge { z1: f.random(&mut rng), z2: f.random(&mut rng) };
            let out = fold(f, &plan.steps[i], &c, &z).unwrap();
            assert!(plan.levels[i + 1].code().unwrap().contains(&out), "level {i}");
        }
    }
}

#[test]
fn tower_completeness_sampled() {
    for d in 1..=7 {
        let plan = tower_plan(d);
        let f = &plan.field;
        let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
        for i in 0..plan.rounds() {
            for _ in 0..200 {
                let c = random_codeword(&plan.levels[i], f, &mut rng);
                let z = Challenge { z1: f.random(&mut rng), z2: f.random(&mut rng) };
                let out = fold(f, &plan.steps[i], &c, &z).unwrap();
                assert!(plan.levels[i + 1].code().unwrap().contains(&out), "d = {d}, level {i}");
            }
        }
    }
}

#[test]
fn result_is_independent_of_thread_count() {
    let f = make_field(2, 16).unwrap();
    let xs = agiopp::foldplan::rs_domain_subspace(&f, 1 << 13);
    let plan = agiopp::foldplan::plan_rs(&f, &xs, (1 << 11) - 1, &Default::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let w = random_word(&f, 1 << 13, &mut rng);
    let z = Challenge { z1: f.random(&mut rng), z2: f.random(&mut rng) };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| fold(&f, &plan.steps[0], &w, &z).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(8));
}

/// Smallest distance (in positions) from `w` to the degree <= 1 polynomials on
/// `xs`, found by trying the line through every pair of positions. Exact
/// whenever the distance is at most n - 2.
struct LineDistance {
    xs: Vec<Fe>,
    /// (a, b, 1 / (x_b - x_a))
    pairs: Vec<(usize, usize, Fe)>,
}

impl LineDistance {
    fn new(f: &Field, xs: Vec<Fe>) -> Self {
        let n = xs.len();
        let pairs = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .map(|(a, b)| (a, b, f.inv(f.sub(xs[b], xs[a])).unwrap()))
            .collect();
        LineDistance { xs, pairs }
    }

    fn distance(&self, f: &Field, w: &[Fe]) -> usize {
        let mut best = self.xs.len();
        for &(a, b, inv) in &self.pairs {
            let slope = f.mul(f.sub(w[b], w[a]), inv);
            let d = (0..self.xs.len())
                .filter(|&k| f.add(w[a], f.mul(slope, f.sub(self.xs[k], self.xs[a]))) != w[k])
                .count();
            best = best.min(d);
        }
        best
    }
}

fn lifted(plan: &FoldingPlan) -> (Schedule, Embedding) {
    let big = make_field(2, 96).unwrap();
    let e = Embedding::new(&plan.field, &big).unwrap();
    (Schedule::new(plan).lift(&e), e)
}

/// Monte Carlo form of the per-round distance bound: for f at distance
/// delta' > delta from C_1, the fraction of challenges with
/// Delta(fold(f, z), C_2) < delta - eps stays below the bound.
#[test]
fn distance_is_preserved_statistically() {
    let plan = hermitian_plan();
    let (s, e) = lifted(&plan);
    let f = &s.field;
    let step = &s.steps[1];
    let level1 = &plan.levels[1];
    let line = LineDistance::new(f, (0..6).map(|t| e.map(plan.levels[2].domain.point(t).x())).collect());
    let eps = Interval::ratio(1, 100);
    let bound = err_commit(2, f.size(), step.arity as u32, &eps); // log2 n = 1 recovers the per-round bound
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let trials = 2000;
    for errors in 1..=3usize {
        // below half the minimum distance 9 the distance is exactly errors / 12
        let delta = errors as f64 / 12.0 - 1e-3;
        let mut close = 0;
        for _ in 0..trials {
            let mut w: Vec<Fe> = random_codeword(level1, &plan.field, &mut rng).iter().map(|&x| e.map(x)).collect();
            let mut pos: Vec<usize> = (0..12).collect();
            for k in 0..errors {
                let j = rng.gen_range(k..12);
                pos.swap(k, j);
                w[pos[k]] = f.add(w[pos[k]], f.random_nonzero(&mut rng));
            }
            let z = Challenge { z1: f.random(&mut rng), z2: f.random(&mut rng) };
            let out = fold(f, step, &w, &z).unwrap();
            let d = line.distance(f, &out) as f64 / 6.0;
            if d < delta - 0.01 {
                close += 1;
            }
        }
        let rate = close as f64 / trials as f64;
        assert!(rate <= bound.hi_f64() + 3.0 * (bound.hi_f64() / trials as f64).sqrt(), "errors = {errors}: {rate}");
    }
}

fn hermitian() -> &'static FoldingPlan {
    static PLAN: std::sync::OnceLock<FoldingPlan> = std::sync::OnceLock::new();
    PLAN.get_or_init(hermitian_plan)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fold_is_linear(seed in any::<u64>(), round in 0usize..3) {
        let plan = hermitian();
        let f = &plan.field;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = plan.levels[round].n();
        let (u, v) = (random_word(f, n, &mut rng), random_word(f, n, &mut rng));
        let (a, b) = (f.random(&mut rng), f.random(&mut rng));
        let z = Challenge { z1: f.random(&mut rng), z2: f.random(&mut rng) };
        let mix: Vec<Fe> = u.iter().zip(&v).map(|(&x, &y)| f.add(f.mul(a, x), f.mul(b, y))).collect();
        let fu = fold(f, &plan.steps[round], &u, &z).unwrap();
        let fv = fold(f, &plan.steps[round], &v, &z).unwrap();
        let expect: Vec<Fe> = fu.iter().zip(&fv).map(|(&x, &y)| f.add(f.mul(a, x), f.mul(b, y))).collect();
        prop_assert_eq!(fold(f, &plan.steps[round], &mix, &z).unwrap(), expect);
    }

    #[test]
    fn fold_is_local(seed in any::<u64>(), round in 0usize..3) {
        let plan = hermitian();
        let f = &plan.field;
        let step = &plan.steps[round];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_word(f, step.n_in(), &mut rng);
        let z = Challenge { z1: f.random(&mut rng), z2: f.random(&mut rng) };
        let base = fold(f, step, &w, &z).unwrap();
        let t = rng.gen_range(0..step.n_out());
        let mut w2 = w.clone();
        for (s, x) in w2.iter_mut().enumerate() {
            if step.fiber_of[s] as usize != t {
                *x = f.random(&mut rng);
            }
        }
        prop_assert_eq!(fold(f, step, &w2, &z).unwrap()[t], base[t]);
    }
}

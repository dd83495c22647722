//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! fails at the end if any criterion failed or ran over its time budget.

mod common;

use std::time::{Duration, Instant};

use agiopp::algebra::{make_field, Embedding, Fe, Field, OpCounter};
use agiopp::curves::{enumerate_points, tower_genus, Curve, DomainSelection, KummerCurve, TowerCurve};
use agiopp::folding::{fold, Challenge};
use agiopp::foldplan::*;
use agiopp::iopp::*;
use agiopp::rrbasis::{hu_yang_basis, min_distance_exhaustive, tower_basis, Divisor};
use agiopp::soundness::*;
use common::*;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1 ------------------------------------------------------------------------

fn worked_soundness_example() -> Outcome {
    let ex = worked_example();
    let params = worked_example_params();
    let e = evaluate(&params).map_err(|e| e.to_string())?;
    ensure(ex.dim_c0 == (1 << 16) + 2, || format!("dim C_0 = {}", ex.dim_c0))?;
    ensure(e.err_commit.le(&Interval::pow2(-91, 1)), || format!("err_commit = 2^{:.3}", e.err_commit.log2_hi()))?;
    let digits = format!("{:.5}", (e.err_query.hi_f64() * 1e5).floor() / 1e5);
    ensure(digits == "0.72728", || format!("err_query prints as {digits}"))?;
    let t = min_repetitions(&params, 90).map_err(|e| e.to_string())?;
    ensure(t == 199 && ex.report.t == Some(199), || format!("t = {t}"))?;
    Ok(format!(
        "dim = {}, err_commit = 2^{:.2}, err_query = {digits} ({:.7}), t = {t}",
        ex.dim_c0,
        e.err_commit.log2_hi(),
        e.err_query.hi_f64()
    ))
}

// 2 ------------------------------------------------------------------------

fn table_rows() -> Outcome {
    let rows = tower_table();
    let bad: Vec<String> = rows.iter().filter(|r| !r.certified).map(|r| format!("{:?}", r.row)).collect();
    ensure(rows.len() == 9 && bad.is_empty(), || format!("not certified: {bad:?}"))?;
    Ok(format!("{}/9 rows certified", rows.len()))
}

// 3 ------------------------------------------------------------------------

fn completeness_on(plan: &FoldingPlan, seeds: u64, t: usize) -> Result<usize, String> {
    let s = Schedule::new(plan);
    let mut rng = ChaCha8Rng::seed_from_u64(plan.n() as u64);
    let mut accepted = 0;
    for seed in 0..seeds {
        let word = random_codeword(&plan.levels[0], &plan.field, &mut rng);
        let coins = if seed % 2 == 0 { CoinMode::FiatShamir } else { CoinMode::Seeded(seed) };
        let proof = prove(&s, &word, &ProtocolConfig::new(coins, t)).map_err(|e| e.to_string())?;
        let bytes = proof.to_bytes(&s.field);
        let back = ProofTranscript::from_bytes(&bytes, &s).map_err(|e| e.to_string())?;
        if verify(&s, &back, coins).map_err(|e| e.to_string())?.accept {
            accepted += 1;
        }
    }
    Ok(accepted)
}

fn completeness() -> Outcome {
    let mut parts = Vec::new();
    let mut plans = vec![("F4", f4_plan()), ("Hermitian", hermitian_plan())];
    for d in 1..=7 {
        plans.push(("tower", tower_plan(d)));
    }
    for (name, plan) in &plans {
        let ok = completeness_on(plan, 100, 8)?;
        ensure(ok == 100, || format!("{name} n = {}: {ok}/100 accepted", plan.n()))?;
        parts.push(format!("{name}[{}] 100/100", plan.levels[0].degree()));
    }
    Ok(parts.join(", "))
}

// 4 ------------------------------------------------------------------------

fn all_messages(f: &Field, k: usize) -> Vec<Vec<Fe>> {
    let q = f.size() as usize;
    (0..q.pow(k as u32))
        .map(|mut i| {
            (0..k)
                .map(|_| {
                    let d = i % q;
                    i /= q;
                    f.elem(d as u128)
                })
                .collect()
        })
        .collect()
}

fn exhaustive_folding() -> Outcome {
    let plan = f4_plan();
    let f = &plan.field;
    let next = plan.levels[1].code().map_err(|e| e.to_string())?;
    let mut checks = 0;
    for msg in all_messages(f, plan.levels[0].dim()) {
        let c = plan.levels[0].encode(&msg).map_err(|e| e.to_string())?;
        for z1 in f.elements() {
            for z2 in f.elements() {
                let out = fold(f, &plan.steps[0], &c, &Challenge { z1, z2 }).map_err(|e| e.to_string())?;
                ensure(next.contains(&out), || format!("message {msg:?}, z = ({z1:?}, {z2:?})"))?;
                checks += 1;
            }
        }
    }
    // 64 codewords times the 16 pairs (z1, z2) in F_4^2
    ensure(checks == 64 * 16, || format!("{checks} checks"))?;
    Ok(format!("{checks}/{checks} folds in C_1"))
}

// 5 ------------------------------------------------------------------------

fn distance_law() -> Outcome {
    let plan = f4_plan();
    let mut parts = Vec::new();
    for (i, l) in plan.levels.iter().enumerate() {
        let d = min_distance_exhaustive(l.code().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let expect = Ratio::new((l.n() as i64 - l.degree()) as u64, l.n() as u64);
        ensure(d == expect, || format!("level {i}: distance {d}, 1 - deg/n = {expect}"))?;
        // the last level is the constant code [1, 1]
        if i + 1 < plan.levels.len() {
            ensure(d == Ratio::new(1, 2), || format!("level {i}: distance {d}"))?;
        }
        parts.push(format!("[{},{}] {d}", l.n(), l.dim()));
    }
    Ok(parts.join(", "))
}

// 6 ------------------------------------------------------------------------

/// Witnesses nu_{i+1,j} g for every j >= 1 and basis function g of L(D_{i+1})
/// outside L(E_{i,j}). Returns (failing membership, total, injective-range
/// witnesses, injective-range failing).
fn balancing_witnesses(plan: &FoldingPlan) -> Result<(usize, usize, usize, usize), String> {
    let f = &plan.field;
    let (mut fail, mut total, mut inj, mut inj_fail) = (0, 0, 0, 0);
    for i in 0..plan.ag_steps {
        let step = &plan.steps[i];
        let next = &plan.levels[i + 1];
        let rows = &next.generator().map_err(|e| e.to_string())?.rows;
        let code = next.code().map_err(|e| e.to_string())?;
        for j in 1..step.arity {
            let e_deg = step.split[j].degree();
            let nu_pole = next.degree() - e_deg;
            for (k, b) in next.basis.iter().enumerate() {
                let pole = b.pole_order(&next.curve);
                if pole <= e_deg {
                    continue;
                }
                let w: Vec<Fe> = (0..next.n()).map(|t| f.mul(step.nu_table[t * step.arity + j], rows[k][t])).collect();
                let outside = !code.contains(&w);
                total += 1;
                fail += outside as usize;
                if nu_pole + pole < next.n() as i64 {
                    inj += 1;
                    inj_fail += outside as usize;
                }
            }
        }
    }
    Ok((fail, total, inj, inj_fail))
}

fn balancing() -> Outcome {
    let (fail, total, _, _) = balancing_witnesses(&tower_plan(2))?;
    ensure(total > 0 && fail == total, || format!("d_2 = 2: {fail}/{total} witnesses fail membership"))?;
    let mut inj_all = (0, 0);
    for d in 1..=7 {
        let (_, _, inj, inj_fail) = balancing_witnesses(&tower_plan(d))?;
        ensure(inj == inj_fail, || format!("d_2 = {d}: {inj_fail}/{inj} witnesses below n fail membership"))?;
        inj_all.0 += inj_fail;
        inj_all.1 += inj;
    }
    Ok(format!("d_2 = 2: {fail}/{total}; d_2 = 1..7, witnesses of pole order < n: {}/{}", inj_all.0, inj_all.1))
}

// 7 ------------------------------------------------------------------------

fn binomial_margin(p: f64, trials: usize) -> f64 {
    3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

fn statistical_soundness() -> Outcome {
    let plan = hermitian_plan();
    let big = make_field(2, 96).map_err(|e| e.to_string())?;
    let emb = Embedding::new(&plan.field, &big).map_err(|e| e.to_string())?;
    let s = Schedule::new(&plan).lift(&emb);
    let f = &s.field;
    let n = s.n();
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    let lift = |w: Vec<Fe>| -> Vec<Fe> { w.into_iter().map(|x| emb.map(x)).collect() };

    // far words: a codeword plus e errors, 12 <= e <= 22. The minimum distance
    // of C_0 is 45, so below 22.5 errors the distance is exactly e / n.
    let base = SoundnessParams {
        n: n as u128,
        field_size: f.size(),
        p_max: s.p_max() as u32,
        lambda: s.lambda,
        epsilon: Epsilon::Pow2(-655, 100),
        delta: Some(Ratio::new(12, n as i64)),
        gamma_rule: GammaRule::Johnson,
    };
    let (eps, t) = best_epsilon(&base, 20).map_err(|e| e.to_string())?;
    let params = SoundnessParams { epsilon: eps, ..base };
    let bound = total_err(&params, t).map_err(|e| e.to_string())?.hi_f64();
    let words = 200usize;
    let mut accepted = 0;
    for k in 0..words {
        let mut w = lift(random_codeword(&plan.levels[0], &plan.field, &mut rng));
        let errors = rng.gen_range(12..=22usize);
        let mut pos: Vec<usize> = (0..n).collect();
        for e in 0..errors {
            let j = rng.gen_range(e..n);
            pos.swap(e, j);
            w[pos[e]] = f.add(w[pos[e]], f.random_nonzero(&mut rng));
        }
        let delta = errors as f64 / n as f64;
        ensure((0.2..=0.5).contains(&delta), || format!("delta = {delta}"))?;
        let mut coins = Coins::new(CoinMode::Seeded(k as u64), &s.digest());
        let st = commit_phase(&s, &w, FinalMode::Constant, &mut coins).map_err(|e| e.to_string())?;
        if query_phase(&s, &st, t as usize, Sampling::Independent, &mut coins).map_err(|e| e.to_string())?.accept {
            accepted += 1;
        }
    }
    let rate = accepted as f64 / words as f64;
    let limit = bound + binomial_margin(bound, words);
    ensure(rate <= limit, || format!("far words: acceptance {rate} > {limit} (t = {t})"))?;

    // one corrupted entry of f^(1), a single repetition
    let trials = 10_000;
    let (s0, s1) = (&s.steps[0], &s.steps[1]);
    let honest = lift(random_codeword(&plan.levels[0], &plan.field, &mut rng));
    let (mut detected, mut expected) = (0usize, 0f64);
    for k in 0..trials {
        let mut coins = Coins::new(CoinMode::Seeded(1_000_000 + k), &s.digest());
        let mut st = commit_phase(&s, &honest, FinalMode::Constant, &mut coins).map_err(|e| e.to_string())?;
        let c = rng.gen_range(0..s1.n_in());
        st.oracles[1][c] = f.add(st.oracles[1][c], f.random_nonzero(&mut rng));
        let hits = (0..n).filter(|&q| s1.fiber_of[s0.fiber_of[q] as usize] == s1.fiber_of[c]).count();
        expected += hits as f64 / n as f64;
        if !query_phase(&s, &st, 1, Sampling::Independent, &mut coins).map_err(|e| e.to_string())?.accept {
            detected += 1;
        }
    }
    let p = expected / trials as f64;
    let observed = detected as f64 / trials as f64;
    let margin = binomial_margin(p, trials as usize);
    ensure((observed - p).abs() <= margin, || {
        format!("single corruption: detected {observed}, exact {p:.5} +- {margin:.5}")
    })?;
    Ok(format!(
        "t = {t} (eps = 2^{:.2}), far words accepted {accepted}/{words} <= {limit:.2e}; single corruption {observed:.4} vs {p:.4} +- {margin:.4}",
        eps.approx().log2()
    ))
}

// 8 ------------------------------------------------------------------------

fn slope(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let b = sxy / sxx;
    (b, my - b * mx, sxy * sxy / (sxx * syy))
}

fn sparse_codeword(f: &Field, xs: &[Fe], d: usize, rng: &mut impl Rng) -> Vec<Fe> {
    let terms: Vec<(Fe, u128)> = (0..8).map(|_| (f.random(rng), rng.gen_range(0..=d) as u128)).collect();
    xs.iter().map(|&x| terms.iter().fold(f.zero(), |acc, &(c, e)| f.add(acc, f.mul(c, f.pow(x, e))))).collect()
}

fn complexity() -> Outcome {
    let f = make_field(2, 16).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(80);
    let (mut logn, mut prover, mut verifier) = (Vec::new(), Vec::new(), Vec::new());
    let t = 16;
    for k in 10..=16u32 {
        let n = 1usize << k;
        let xs = rs_domain_subspace(&f, n);
        let plan = plan_rs(&f, &xs, (n / 4 - 1) as i64, &PlanOptions::default()).map_err(|e| e.to_string())?;
        ensure(plan.proof_length() < n, || format!("n = {n}: proof length {}", plan.proof_length()))?;
        let s = Schedule::new(&plan);
        let w = sparse_codeword(&f, &xs, n / 4 - 1, &mut rng);
        let ops = OpCounter::new(&f);
        let mut coins = Coins::new(CoinMode::Seeded(k as u64), &s.digest());
        commit_phase_with(&ops, &s, &w, FinalMode::Constant, &mut coins).map_err(|e| e.to_string())?;
        let proof = prove(&s, &w, &ProtocolConfig::new(CoinMode::Seeded(k as u64), t)).map_err(|e| e.to_string())?;
        let vops = OpCounter::new(&f);
        let (d, _) = verify_with(&vops, &s, &proof, CoinMode::Seeded(k as u64)).map_err(|e| e.to_string())?;
        ensure(d.accept, || format!("n = {n}: honest proof rejected"))?;
        logn.push(k as f64);
        prover.push(ops.total() as f64);
        verifier.push(vops.total() as f64);
    }
    let lp: Vec<f64> = prover.iter().map(|v| v.log2()).collect();
    let (b, _, _) = slope(&logn, &lp);
    ensure((b - 1.0).abs() <= 0.1, || format!("prover exponent {b:.3}"))?;
    // verifier: linear in log n, so its log-log exponent is far below 1
    let (c, _, r2) = slope(&logn, &verifier);
    let lv: Vec<f64> = verifier.iter().map(|v| v.log2()).collect();
    let (vb, _, _) = slope(&logn, &lv);
    let per_log = verifier.iter().zip(&logn).map(|(v, l)| v / l).fold(0.0, f64::max);
    ensure(c > 0.0 && r2 >= 0.95 && vb < 0.5, || {
        format!("verifier fit: {c:.1} per log2 n, r^2 = {r2:.3}, exponent {vb:.3}")
    })?;
    Ok(format!(
        "prover exponent {b:.3}; verifier {c:.1} ops per log2 n (r^2 = {r2:.3}, at most {per_log:.0} log2 n, t = {t}); proof length < n at all sizes"
    ))
}

// 9 ------------------------------------------------------------------------

/// Affine points of y^N = f(x) with the infinite point: the roots, plus N per
/// x with f(x) a nonzero N-th power.
fn kummer_point_formula(c: &KummerCurve) -> usize {
    let f = c.field();
    let e = (f.size() - 1) / c.n_level() as u128;
    let powers = f.elements().filter(|&x| c.f(x) != f.zero() && f.pow(c.f(x), e) == f.one()).count();
    1 + c.m() + c.n_level() as usize * powers
}

fn hasse_weil(field_size: u128, genus: u128) -> u128 {
    let s = (field_size as f64).sqrt().round() as u128;
    assert_eq!(s * s, field_size);
    field_size + 1 + 2 * genus * s
}

fn plan_matrix() -> Result<Vec<(String, FoldingPlan)>, String> {
    let opts = PlanOptions::default();
    let mut out = vec![("F4 Kummer".to_string(), f4_plan()), ("Hermitian F16".to_string(), hermitian_plan())];
    let f16 = make_field(2, 4).map_err(|e| e.to_string())?;
    let roots: Vec<Fe> = f16.elements().skip(2).collect();
    let c = KummerCurve::new(&f16, 15, roots).map_err(|e| e.to_string())?;
    out.push((
        "y^15 over F16".into(),
        plan_kummer(&c, &Divisor::at_infinity(0, 15), &DomainSelection::All, &opts).map_err(|e| e.to_string())?,
    ));
    let f4 = make_field(2, 2).map_err(|e| e.to_string())?;
    out.push((
        "tower q=2 top=1 d=4".into(),
        plan_tower(&f4, 2, 1, 4, None, DegreeRule::GenusBump, &opts).map_err(|e| e.to_string())?,
    ));
    for d in 1..=7 {
        out.push((format!("tower q=2 top=2 d={d}"), tower_plan(d)));
    }
    for d in (14..=59).step_by(5) {
        out.push((
            format!("tower q=4 top=1 d={d}"),
            plan_tower(&f16, 4, 1, d, None, DegreeRule::GenusBump, &opts).map_err(|e| e.to_string())?,
        ));
    }
    for d in (7..=63).step_by(4) {
        out.push((
            format!("tower q=4 top=2 d={d}"),
            plan_tower(&f16, 4, 2, d, None, DegreeRule::GenusBump, &opts).map_err(|e| e.to_string())?,
        ));
    }
    let f17 = make_field(17, 1).map_err(|e| e.to_string())?;
    let xs = rs_domain_subgroup(&f17, 16).map_err(|e| e.to_string())?;
    out.push(("RS F17 subgroup".into(), plan_rs(&f17, &xs, 7, &opts).map_err(|e| e.to_string())?));
    let f256 = make_field(2, 8).map_err(|e| e.to_string())?;
    out.push((
        "RS F256 subspace".into(),
        plan_rs(&f256, &rs_domain_subspace(&f256, 256), 63, &opts).map_err(|e| e.to_string())?,
    ));
    Ok(out)
}

fn structural() -> Outcome {
    let mut violations: Vec<String> = Vec::new();
    let mut checks = 0usize;
    let mut check = |ok: bool, what: String| {
        checks += 1;
        if !ok {
            violations.push(what);
        }
    };

    // point counts and genera
    let f4 = make_field(2, 2).map_err(|e| e.to_string())?;
    let f16 = make_field(2, 4).map_err(|e| e.to_string())?;
    let herm_roots: Vec<Fe> = f16.elements().filter(|&x| f16.add(f16.pow(x, 4), x) == f16.zero()).collect();
    let kummers = vec![
        ("F4 y^3", KummerCurve::new(&f4, 3, vec![f4.elem(0), f4.elem(1)]).map_err(|e| e.to_string())?, true),
        ("Hermitian", KummerCurve::new(&f16, 5, herm_roots).map_err(|e| e.to_string())?, true),
        ("y^15", KummerCurve::new(&f16, 15, f16.elements().skip(2).collect()).map_err(|e| e.to_string())?, false),
    ];
    for (name, c, maximal) in &kummers {
        for level in 0..c.levels() {
            let cl = c.at_level(level);
            let g = cl.genus() as u128;
            check(
                g == (cl.n_level() as u128 - 1) * (cl.m() as u128 - 1) / 2,
                format!("{name} level {level}: genus {g}"),
            );
            let pts = enumerate_points(&Curve::Kummer(cl.clone())).len();
            check(pts == kummer_point_formula(&cl), format!("{name} level {level}: {pts} points"));
            let hw = hasse_weil(c.field().size(), g);
            check(pts as u128 <= hw, format!("{name} level {level}: {pts} > {hw}"));
            if *maximal && level == 0 {
                check(pts as u128 == hw, format!("{name}: {pts} points, maximal would be {hw}"));
            }
            // Riemann-Roch on multiples of infinity
            for d in 0..(2 * g as i64 + 12) {
                let b = hu_yang_basis(&cl, &Divisor::at_infinity(0, d)).map_err(|e| e.to_string())?;
                let lo = d - g as i64 + 1;
                let ok = if d >= 2 * g as i64 - 1 {
                    b.len() as i64 == lo
                } else {
                    b.len() as i64 >= lo.max(1) && b.len() as i64 <= d + 1
                };
                check(ok, format!("{name} level {level}: l({d} P_inf) = {}", b.len()));
            }
        }
    }
    for (q, field) in [(2u64, &f4), (4, &f16)] {
        for level in 0..=2usize {
            let g = tower_genus(q as u128, level as u32);
            let pts = if level == 0 {
                field.size() as usize + 1
            } else {
                let t = TowerCurve::new(field, q, level).map_err(|e| e.to_string())?;
                check(t.genus() == g, format!("tower q={q} level {level}: genus {}", t.genus()));
                for m in 0..(2 * g as i64 + 12) {
                    let len = tower_basis(&t, m).len() as i64;
                    let lo = m - g as i64 + 1;
                    let ok = if m >= 2 * g as i64 - 1 { len == lo } else { len >= lo.max(1) && len <= m + 1 };
                    check(ok, format!("tower q={q} level {level}: l({m} P_inf) = {len}"));
                }
                enumerate_points(&Curve::Tower(t)).len()
            };
            check(
                pts as u128 == (q as u128).pow(level as u32 + 2) + 1,
                format!("tower q={q} level {level}: {pts} points"),
            );
            let hw = hasse_weil(field.size(), g);
            check(pts as u128 <= hw, format!("tower q={q} level {level}: {pts} > {hw}"));
            if level <= 1 {
                check(pts as u128 == hw, format!("tower q={q} level {level}: not maximal ({pts} vs {hw})"));
            }
        }
    }

    // genus bound for 2(i - 1) < q, as 2 g <= i q^{i+1} + i (i - 1) q^i
    for q in [2u128, 3, 4, 5, 7, 8, 9, 16, 32, 64] {
        for i in (1..=10u32).filter(|&i| 2 * (i as u128 - 1) < q) {
            let g = tower_genus(q, i);
            let rhs = i as u128 * q.pow(i + 1) + (i * (i - 1)) as u128 * q.pow(i);
            check(2 * g <= rhs, format!("genus bound q={q} i={i}: 2g = {} > {rhs}", 2 * g));
        }
    }

    // the plan matrix
    let matrix = plan_matrix()?;
    for (name, plan) in &matrix {
        let rep = validate_plan(plan);
        for c in &rep.checks {
            check(c.ok, format!("{name}: {} at {:?}: {}", c.clause, c.at, c.detail));
        }
        for (i, step) in plan.steps.iter().enumerate() {
            if i < plan.ag_steps && matches!(plan.levels[i].curve, Curve::Kummer(_)) {
                check(step.split[0] == plan.levels[i + 1].divisor, format!("{name} step {i}: E_0 != D_(i+1)"));
            }
            let mut count = vec![0usize; step.n_out()];
            step.fiber_of.iter().for_each(|&t| count[t as usize] += 1);
            check(count.iter().all(|&c| c == step.arity), format!("{name} step {i}: fiber sizes"));
            for t in 0..step.n_out() {
                let fib = step.fiber(t);
                let mut mus: Vec<Fe> = fib.iter().map(|&x| step.mu_values[x as usize]).collect();
                mus.sort();
                mus.dedup();
                check(
                    mus.len() == step.arity && fib.iter().all(|&x| step.fiber_of[x as usize] as usize == t),
                    format!("{name} step {i} fiber {t}: mu not injective"),
                );
            }
        }
    }
    ensure(violations.is_empty(), || {
        format!("{} violations, first: {:?}", violations.len(), &violations[..violations.len().min(5)])
    })?;
    Ok(format!("{checks} checks over {} plans, 0 violations", matrix.len()))
}

// 10 -----------------------------------------------------------------------

fn negative_planning() -> Outcome {
    let f8 = make_field(2, 3).map_err(|e| e.to_string())?;
    let e = check_kummer_parameters(&f8, 9, 5, &Divisor::at_infinity(0, 18)).err();
    ensure(e.as_ref().and_then(PlanError::clause) == Some(Clause::Congruence), || format!("F8 y^9: {e:?}"))?;
    let f16 = make_field(2, 4).map_err(|e| e.to_string())?;
    let opts = PlanOptions::default();
    let (mut failed, mut level_one_ok) = (0, 0);
    let ds: Vec<i64> = (7..=63).collect();
    for &d in &ds {
        match plan_tower(&f16, 4, 2, d, None, DegreeRule::Floor, &opts) {
            Err(e) if e.clause() == Some(Clause::Balancing) || e.clause() == Some(Clause::SplitBound) => failed += 1,
            other => return Err(format!("floor rule, d = {d}: {:?}", other.map(|p| p.summary()))),
        }
        // the same rule is compatible between levels 1 and 0
        let degs = tower_degrees(4, 2, d, DegreeRule::Floor);
        if check_compatibility(4, 1, degs[1], degs[0]).is_ok() {
            level_one_ok += 1;
        }
    }
    ensure(level_one_ok == ds.len(), || {
        format!("floor rule fails at level 1 for {} degrees", ds.len() - level_one_ok)
    })?;
    Ok(format!(
        "y^9 = x^5 + x rejected (congruence); floor rule q=4: {failed}/{} fail at level 2, level 1 compatible",
        ds.len()
    ))
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, fn() -> Outcome, u64);
    let criteria: [Criterion; 10] = [
        ("worked soundness example", worked_soundness_example, 1),
        ("tower parameter table", table_rows, 1),
        ("completeness end to end", completeness, 10),
        ("exhaustive folding completeness", exhaustive_folding, 5),
        ("distance law", distance_law, 5),
        ("balancing discrimination", balancing, 5),
        ("statistical soundness", statistical_soundness, 120),
        ("complexity accounting", complexity, 60),
        ("structural invariants", structural, 30),
        ("negative planning", negative_planning, 1),
    ];
    let mut failed = Vec::new();
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let status = if outcome.is_ok() && in_time { "PASS" } else { "FAIL" };
        let detail = match &outcome {
            Ok(s) => s.clone(),
            Err(s) => s.clone(),
        };
        println!("{status} {:>2} {name} ({:.2?} of {budget}s): {detail}", i + 1, elapsed);
        if status == "FAIL" {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

//! In-browser explorer. Every entry point takes a plan config in the CLI's JSON
//! format and returns JSON; the wasm exports wrap the plain functions below.

use agiopp::algebra::Fe;
use agiopp::config::PlanConfig;
use agiopp::foldplan::{validate_plan, LevelSummary, Schedule};
use agiopp::iopp::{commit_phase, query_phase, CoinMode, Coins, FinalMode, Sampling};
use agiopp::soundness::{evaluate, min_repetitions, Epsilon, SoundnessParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest n the demo will fold; bigger plans only get summaries.
pub const MAX_TRACE_N: usize = 1 << 14;

#[derive(Serialize)]
pub struct PlanView {
    pub summary: String,
    pub levels: Vec<LevelSummary>,
    pub rounds: usize,
    pub p_max: usize,
    pub lambda: String,
    pub proof_length: usize,
    pub checks: usize,
    pub violations: Vec<String>,
}

#[derive(Serialize)]
pub struct RoundView {
    pub round: usize,
    pub n: usize,
    pub challenge: Option<(String, String)>,
    /// Entries where the folded word differs from the fold of the codeword.
    pub disagreements: usize,
}

#[derive(Serialize)]
pub struct TraceView {
    pub rounds: Vec<RoundView>,
    pub t: usize,
    pub accept: bool,
    pub decision: String,
}

#[derive(Serialize)]
pub struct CurvePoint {
    pub log2_epsilon: f64,
    pub gamma: f64,
    pub log2_err_commit: f64,
    pub err_query: f64,
    pub t: Option<u64>,
}

fn parse(config: &str) -> Result<PlanConfig, String> {
    PlanConfig::from_json(config).map_err(|e| e.to_string())
}

pub fn plan_view(config: &str) -> Result<PlanView, String> {
    let plan = parse(config)?.build_plan().map_err(|e| e.to_string())?;
    let rep = validate_plan(&plan);
    Ok(PlanView {
        summary: plan.summary(),
        levels: plan.summaries(),
        rounds: plan.rounds(),
        p_max: plan.p_max(),
        lambda: plan.lambda().to_string(),
        proof_length: plan.proof_length(),
        checks: rep.checks.len(),
        violations: rep.failures().iter().map(|c| format!("{} at {:?}: {}", c.clause, c.at, c.detail)).collect(),
    })
}

/// Folds a random codeword with `errors` corrupted entries through the whole
/// schedule and runs `t` query repetitions on the result.
pub fn fold_trace(config: &str, seed: u64, errors: usize, t: usize) -> Result<TraceView, String> {
    let cfg = parse(config)?;
    let plan = cfg.build_plan().map_err(|e| e.to_string())?;
    if plan.n() > MAX_TRACE_N {
        return Err(format!("n = {} is above the demo limit {MAX_TRACE_N}", plan.n()));
    }
    let schedule: Schedule = cfg.build_schedule(&plan).map_err(|e| e.to_string())?;
    let f = &schedule.field;
    let n = schedule.n();
    if errors > n {
        return Err(format!("cannot corrupt {errors} of {n} entries"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let msg: Vec<Fe> = (0..plan.levels[0].dim()).map(|_| plan.field.random(&mut rng)).collect();
    let codeword = plan.levels[0].encode(&msg).map_err(|e| e.to_string())?;
    let codeword = cfg.lift_word(&plan, &codeword).map_err(|e| e.to_string())?;
    let mut word = codeword.clone();
    let mut pos: Vec<usize> = (0..n).collect();
    for e in 0..errors {
        let j = rng.gen_range(e..n);
        pos.swap(e, j);
        word[pos[e]] = f.add(word[pos[e]], f.random_nonzero(&mut rng));
    }
    let run = |w: &[Fe]| -> Result<_, String> {
        let mut coins = Coins::new(CoinMode::Seeded(seed), &schedule.digest());
        let st = commit_phase(&schedule, w, FinalMode::Constant, &mut coins).map_err(|e| e.to_string())?;
        Ok((st, coins))
    };
    let (honest, _) = run(&codeword)?;
    let (st, mut coins) = run(&word)?;
    let rounds = st
        .oracles
        .iter()
        .enumerate()
        .map(|(i, o)| RoundView {
            round: i,
            n: o.len(),
            challenge: st.challenges.get(i).map(|z| (z.z1.index().to_string(), z.z2.index().to_string())),
            disagreements: o.iter().zip(&honest.oracles[i]).filter(|(a, b)| a != b).count(),
        })
        .collect();
    let d = query_phase(&schedule, &st, t, Sampling::Independent, &mut coins).map_err(|e| e.to_string())?;
    Ok(TraceView { rounds, t, accept: d.accept, decision: d.to_string() })
}

/// Bounds for epsilon = 2^{-a/100} over a grid of a, with t for 2^-kappa
/// where repetition reaches it.
pub fn soundness_curve(config: &str, kappa: u32) -> Result<Vec<CurvePoint>, String> {
    let cfg = parse(config)?;
    let plan = cfg.build_plan().map_err(|e| e.to_string())?;
    let schedule = cfg.build_schedule(&plan).map_err(|e| e.to_string())?;
    let base: SoundnessParams = cfg.soundness_params(&schedule);
    let mut out = Vec::new();
    for a in (100..=2000).step_by(25) {
        let p = SoundnessParams { epsilon: Epsilon::Pow2(-a, 100), ..base.clone() };
        let Ok(e) = evaluate(&p) else { continue };
        out.push(CurvePoint {
            log2_epsilon: -(a as f64) / 100.0,
            gamma: e.gamma.hi_f64(),
            log2_err_commit: e.err_commit.log2_hi(),
            err_query: e.err_query.hi_f64(),
            t: min_repetitions(&p, kappa).ok(),
        });
    }
    Ok(out)
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string())).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = planSummary)]
pub fn plan_summary_js(config: &str) -> Result<String, JsValue> {
    to_js(plan_view(config))
}

#[wasm_bindgen(js_name = foldTrace)]
pub fn fold_trace_js(config: &str, seed: u32, errors: u32, t: u32) -> Result<String, JsValue> {
    to_js(fold_trace(config, seed as u64, errors as usize, t as usize))
}

#[wasm_bindgen(js_name = soundnessCurve)]
pub fn soundness_curve_js(config: &str, kappa: u32) -> Result<String, JsValue> {
    to_js(soundness_curve(config, kappa))
}

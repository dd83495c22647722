#![allow(dead_code)]

use agiopp::algebra::{make_field, Fe, Field};
use agiopp::curves::{DomainSelection, KummerCurve};
use agiopp::foldplan::{plan_kummer, plan_tower, DegreeRule, FoldingPlan, Level, PlanOptions};
use agiopp::rrbasis::Divisor;
use rand::Rng;

/// y^3 = x(x + 1) over F_4 with D_0 = 3 P_inf: [6, 3] -> RS[2, 2] -> constant.
pub fn f4_plan() -> FoldingPlan {
    let f = make_field(2, 2).unwrap();
    let c = KummerCurve::new(&f, 3, vec![f.elem(0), f.elem(1)]).unwrap();
    plan_kummer(&c, &Divisor::at_infinity(0, 3), &DomainSelection::All, &PlanOptions::default()).unwrap()
}

/// The Hermitian curve y^5 = x^4 + x over F_16 with D_0 = 15 P_inf.
pub fn hermitian_plan() -> FoldingPlan {
    let f = make_field(2, 4).unwrap();
    let roots: Vec<Fe> = f.elements().filter(|&x| f.add(f.pow(x, 4), x) == f.zero()).collect();
    let c = KummerCurve::new(&f, 5, roots).unwrap();
    plan_kummer(&c, &Divisor::at_infinity(0, 15), &DomainSelection::All, &PlanOptions::default()).unwrap()
}

/// Hermitian tower over F_4, q = 2, top level 2.
pub fn tower_plan(d_top: i64) -> FoldingPlan {
    let f = make_field(2, 2).unwrap();
    plan_tower(&f, 2, 2, d_top, None, DegreeRule::GenusBump, &PlanOptions::default()).unwrap()
}

pub fn random_codeword<R: Rng>(level: &Level, field: &Field, rng: &mut R) -> Vec<Fe> {
    let msg: Vec<Fe> = (0..level.dim()).map(|_| field.random(rng)).collect();
    level.encode(&msg).unwrap()
}

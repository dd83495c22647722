//! JSON plan configurations and the flat word file format.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{AlgebraError, Embedding, Fe, Field};
use crate::curves::{CurveError, DomainSelection, KummerCurve};
use crate::foldplan::{
    plan_kummer, plan_rs, plan_tower, rs_domain_subgroup, rs_domain_subspace, DegreeRule, FoldingPlan, PlanError,
    PlanOptions, Schedule,
};
use crate::iopp::{CoinMode, FinalMode, ProtocolConfig, Sampling};
use crate::rrbasis::Divisor;
use crate::soundness::{best_epsilon, min_repetitions, Epsilon, GammaRule, SoundnessError, SoundnessParams};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Soundness(#[from] SoundnessError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldConfig {
    pub p: u64,
    #[serde(default = "one")]
    pub k: u32,
}

fn one() -> u32 {
    1
}

impl FieldConfig {
    pub fn build(&self) -> Result<Field, AlgebraError> {
        Field::new(self.p, self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RsDomain {
    /// The first n field elements by index (an additive subspace in characteristic 2).
    #[default]
    Subspace,
    Subgroup,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyConfig {
    Kummer {
        /// Exponent N of y^N = f(x).
        n: u64,
        /// Roots of f as field indices, or give `coefficients` instead.
        #[serde(default)]
        roots: Option<Vec<u128>>,
        #[serde(default)]
        coefficients: Option<Vec<u128>>,
        /// deg D_0 of the one-point divisor D_0 = d P_inf.
        degree: i64,
        #[serde(default)]
        domain: DomainSelection,
    },
    Tower {
        q: u64,
        /// Top level of the tower.
        level: usize,
        /// d at the top level.
        degree: i64,
        /// Points of the projective-line level, as indices; all of F_{q^2} when absent.
        #[serde(default)]
        p0: Option<Vec<u128>>,
        #[serde(default)]
        rule: DegreeRule,
    },
    Rs {
        n: usize,
        degree: i64,
        #[serde(default)]
        domain: RsDomain,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoinsConfig {
    #[default]
    FiatShamir,
    Interactive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanConfig {
    pub field: FieldConfig,
    pub code: FamilyConfig,
    /// e in |G| = p^e; only (1, 2) is wired.
    #[serde(default = "default_exponent")]
    pub group_exponent: (u32, u32),
    #[serde(default = "yes")]
    pub tail: bool,
    /// Challenges come from this extension of the code's field.
    #[serde(default)]
    pub challenge_field: Option<FieldConfig>,
    #[serde(default)]
    pub epsilon: Option<Epsilon>,
    #[serde(default)]
    pub gamma_rule: GammaRule,
    #[serde(default)]
    pub mode: CoinsConfig,
    #[serde(default)]
    pub final_mode: FinalMode,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub t: Option<usize>,
    #[serde(default)]
    pub kappa: Option<u32>,
    #[serde(default)]
    pub seed: u64,
}

fn default_exponent() -> (u32, u32) {
    (1, 2)
}

fn yes() -> bool {
    true
}

impl PlanConfig {
    pub fn from_json(s: &str) -> Result<PlanConfig, ConfigError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<PlanConfig, ConfigError> {
        PlanConfig::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn options(&self) -> PlanOptions {
        PlanOptions { group_exponent: self.group_exponent, tail: self.tail }
    }

    pub fn build_plan(&self) -> Result<FoldingPlan, ConfigError> {
        let field = self.field.build()?;
        let elems = |v: &[u128]| -> Result<Vec<Fe>, ConfigError> {
            v.iter()
                .map(|&i| {
                    if i < field.size() {
                        Ok(field.elem(i))
                    } else {
                        Err(ConfigError::Invalid(format!("element index {i} is not below |F| = {}", field.size())))
                    }
                })
                .collect()
        };
        let opts = self.options();
        let plan = match &self.code {
            FamilyConfig::Kummer { n, roots, coefficients, degree, domain } => {
                let curve = match (roots, coefficients) {
                    (Some(r), None) => KummerCurve::new(&field, *n, elems(r)?)?,
                    (None, Some(c)) => KummerCurve::from_coefficients(&field, *n, &elems(c)?)?,
                    _ => return Err(ConfigError::Invalid("give exactly one of roots, coefficients".into())),
                };
                plan_kummer(&curve, &Divisor::at_infinity(0, *degree), domain, &opts)?
            }
            FamilyConfig::Tower { q, level, degree, p0, rule } => {
                let p0 = p0.as_deref().map(elems).transpose()?;
                plan_tower(&field, *q, *level, *degree, p0.as_deref(), *rule, &opts)?
            }
            FamilyConfig::Rs { n, degree, domain } => {
                let xs = match domain {
                    RsDomain::Subspace => {
                        if *n as u128 > field.size() {
                            return Err(ConfigError::Invalid(format!("n = {n} exceeds |F|")));
                        }
                        rs_domain_subspace(&field, *n)
                    }
                    RsDomain::Subgroup => rs_domain_subgroup(&field, *n)?,
                };
                plan_rs(&field, &xs, *degree, &opts)?
            }
        };
        Ok(plan)
    }

    /// The protocol schedule, lifted to the challenge field when one is set.
    pub fn build_schedule(&self, plan: &FoldingPlan) -> Result<Schedule, ConfigError> {
        let schedule = Schedule::new(plan);
        match &self.challenge_field {
            None => Ok(schedule),
            Some(c) => {
                let big = c.build()?;
                Ok(schedule.lift(&Embedding::new(&plan.field, &big)?))
            }
        }
    }

    /// Maps a word over the code's field into the schedule's field.
    pub fn lift_word(&self, plan: &FoldingPlan, word: &[Fe]) -> Result<Vec<Fe>, ConfigError> {
        match &self.challenge_field {
            None => Ok(word.to_vec()),
            Some(c) => {
                let e = Embedding::new(&plan.field, &c.build()?)?;
                Ok(word.iter().map(|&x| e.map(x)).collect())
            }
        }
    }

    pub fn coins(&self) -> CoinMode {
        match self.mode {
            CoinsConfig::FiatShamir => CoinMode::FiatShamir,
            CoinsConfig::Interactive => CoinMode::Seeded(self.seed),
        }
    }

    pub fn soundness_params(&self, schedule: &Schedule) -> SoundnessParams {
        SoundnessParams {
            n: schedule.n() as u128,
            field_size: schedule.field.size(),
            p_max: schedule.p_max() as u32,
            lambda: schedule.lambda,
            epsilon: self.epsilon.unwrap_or(Epsilon::Pow2(-655, 100)),
            delta: None,
            gamma_rule: self.gamma_rule,
        }
    }

    /// t from the config, or the smallest t reaching 2^-kappa.
    pub fn repetitions(&self, schedule: &Schedule) -> Result<usize, ConfigError> {
        if let Some(t) = self.t {
            return Ok(t);
        }
        let kappa = self.kappa.ok_or_else(|| ConfigError::Invalid("set t or kappa".into()))?;
        let params = self.soundness_params(schedule);
        let t = match self.epsilon {
            Some(_) => min_repetitions(&params, kappa)?,
            None => best_epsilon(&params, kappa)?.1,
        };
        usize::try_from(t).map_err(|_| ConfigError::Invalid(format!("t = {t} does not fit")))
    }

    pub fn protocol(&self, schedule: &Schedule) -> Result<ProtocolConfig, ConfigError> {
        Ok(ProtocolConfig {
            coins: self.coins(),
            final_mode: self.final_mode,
            sampling: self.sampling,
            t: self.repetitions(schedule)?,
        })
    }
}

const WORD_MAGIC: &[u8; 4] = b"AGFE";

/// 32-bit tag of a field, the first four bytes of SHA-256 of its spec.
pub fn field_id(field: &Field) -> u32 {
    let h = Sha256::digest(field.spec().to_bytes());
    u32::from_le_bytes(h[..4].try_into().unwrap())
}

pub fn write_word(field: &Field, word: &[Fe]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + word.len() * field.byte_len());
    out.extend_from_slice(WORD_MAGIC);
    out.extend_from_slice(&field_id(field).to_le_bytes());
    word.iter().for_each(|&x| field.write_bytes(x, &mut out));
    out
}

pub fn read_word(field: &Field, bytes: &[u8]) -> Result<Vec<Fe>, ConfigError> {
    if bytes.len() < 8 || &bytes[..4] != WORD_MAGIC {
        return Err(ConfigError::Invalid("not a word file".into()));
    }
    let id = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if id != field_id(field) {
        return Err(ConfigError::Invalid(format!("word file is over another field (id {id:08x})")));
    }
    let body = &bytes[8..];
    let w = field.byte_len();
    if body.len() % w != 0 {
        return Err(ConfigError::Invalid("word file length is not a whole number of elements".into()));
    }
    Ok(body.chunks(w).map(|c| field.read_bytes(c)).collect::<Result<_, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const F4: &str =
        r#"{"field": {"p": 2, "k": 2}, "code": {"kummer": {"n": 3, "roots": [0, 1], "degree": 3}}, "t": 4}"#;

    #[test]
    fn kummer_config() {
        let c = PlanConfig::from_json(F4).unwrap();
        let plan = c.build_plan().unwrap();
        assert_eq!(plan.n(), 6);
        let s = c.build_schedule(&plan).unwrap();
        assert_eq!(c.protocol(&s).unwrap().t, 4);
        let back: PlanConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn bad_configs() {
        let bad = F4.replace("\"roots\": [0, 1]", "\"roots\": [0, 9]");
        assert!(matches!(PlanConfig::from_json(&bad).unwrap().build_plan(), Err(ConfigError::Invalid(_))));
        assert!(PlanConfig::from_json(&F4.replace("kummer", "spline")).is_err());
    }

    #[test]
    fn word_roundtrip() {
        let f = Field::new(3, 2).unwrap();
        let w: Vec<Fe> = (0..9).map(|i| f.elem(i)).collect();
        let bytes = write_word(&f, &w);
        assert_eq!(read_word(&f, &bytes).unwrap(), w);
        assert!(read_word(&Field::new(3, 1).unwrap(), &bytes).is_err());
    }
}

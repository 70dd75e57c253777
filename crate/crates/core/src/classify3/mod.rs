//! Classification of sign patterns into RAP / AAP / DNA.
//!
//! The cascade runs the pattern-level theory rules first (reducibility, the
//! row/column sign rule, the B-matrix rule, uniform off-diagonal signs), then
//! the bundled 3x3 table, and falls back to seeded sampling for other sizes.
//! Table labels are claims: each one is corroborated against sampled members
//! and the row's witness matrices, and a label that sampling disproves is
//! replaced by what was observed.

mod expr;
mod recipe;
mod table;
mod witness;

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use expr::{BinOp, CmpOp, Comparison, Condition, Expr, Var};
pub use recipe::{above, below, recipe_certificate, Recipe};
pub use table::{Cell, SuspectPart, Table, TableEntry, Template, TABLE_FORMAT, TABLE_VERSION};
pub use witness::{verify_witnesses, Assignment, Witness, WitnessCheck};

use crate::ap::{eigen_scan, Tolerances};
use crate::mat::RealMatrix;
use crate::signpat::{
    canonical_form, equivalent, pattern_of, row_col_necessary, sample_with, theorem4_excludes, MagnitudeProfile,
    Sign, SignPattern,
};
use crate::{Error, Result};

pub const DEFAULT_SAMPLES: usize = 200;
pub const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    /// Every member is AP.
    Rap,
    /// Some members are AP and some are not.
    Aap,
    /// No member is AP.
    Dna,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Rap => "RAP",
            Verdict::Aap => "AAP",
            Verdict::Dna => "DNA",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Evidence {
    /// The digraph is not strongly connected.
    Reducible,
    /// Some row or column lacks a Plus, and some row or column lacks a Minus.
    RowColFail,
    /// Irreducible with a reducible B-matrix.
    Theorem4,
    /// Off-diagonal signs all in `{0, +}` or all in `{0, -}`.
    UniformOffdiag,
    /// The row's polynomial recipe certified every sample.
    Recipe(String),
    /// The row's printed label, not contradicted by sampling.
    Table(String),
    /// Members of both kinds were found.
    SampledBoth {
        ap_witness: RealMatrix,
        non_ap_witness: RealMatrix,
    },
    /// Every decisive sample was AP. Not a proof.
    SampledAllAp(usize),
    /// No decisive sample was AP. Not a proof.
    SampledNoneAp(usize),
}

impl Evidence {
    /// False for the one-sided sampling outcomes.
    pub fn is_proof(&self) -> bool {
        !matches!(self, Evidence::SampledAllAp(_) | Evidence::SampledNoneAp(_))
    }

    /// Depends on the seed.
    pub fn is_sampled(&self) -> bool {
        matches!(
            self,
            Evidence::SampledBoth { .. } | Evidence::SampledAllAp(_) | Evidence::SampledNoneAp(_)
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            Evidence::Reducible => "Reducible",
            Evidence::RowColFail => "RowColFail",
            Evidence::Theorem4 => "Theorem4",
            Evidence::UniformOffdiag => "UniformOffdiag",
            Evidence::Recipe(_) => "Recipe",
            Evidence::Table(_) => "Table",
            Evidence::SampledBoth { .. } => "SampledBoth",
            Evidence::SampledAllAp(_) => "SampledAllAp",
            Evidence::SampledNoneAp(_) => "SampledNoneAp",
        }
    }
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evidence::Recipe(id) | Evidence::Table(id) => write!(f, "{}({id})", self.name()),
            Evidence::SampledBoth {
                ap_witness,
                non_ap_witness,
            } => write!(f, "SampledBoth(AP: {ap_witness}; not AP: {non_ap_witness})"),
            Evidence::SampledAllAp(k) | Evidence::SampledNoneAp(k) => write!(f, "{}({k})", self.name()),
            _ => f.write_str(self.name()),
        }
    }
}

/// Spectral verdicts over the sampled members. Borderline draws count toward
/// neither side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SampleSummary {
    pub samples: usize,
    /// How many of `samples` are witness matrices from the table row.
    pub witnesses: usize,
    pub ap: usize,
    pub not_ap: usize,
    pub borderline: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub evidence: Evidence,
    /// Table row covering the class, when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entry: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub printed_label: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SampleSummary>,
    /// An AAP label for which sampling found members of one kind only.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub uncorroborated: bool,
}

impl Classification {
    fn theory(verdict: Verdict, evidence: Evidence, entry: Option<&TableEntry>) -> Self {
        Self {
            verdict,
            evidence,
            entry: entry.map(|e| e.id.clone()),
            printed_label: entry.map(|e| e.label),
            sampling: None,
            uncorroborated: false,
        }
    }

    /// The engine verdict differs from the table row's label.
    pub fn differs_from_label(&self) -> bool {
        self.printed_label.is_some_and(|l| l != self.verdict)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    pub seed: u64,
    pub samples: usize,
    pub tol: Tolerances,
    pub profile: MagnitudeProfile,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
            tol: Tolerances::default(),
            profile: MagnitudeProfile::default(),
        }
    }
}

/// Seed of the sampling stream for one pattern.
pub fn pattern_seed(seed: u64, s: &SignPattern) -> u64 {
    seed ^ s.code().wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Classifies against the bundled table.
pub fn classify(s: &SignPattern, cfg: &ClassifyConfig) -> Result<Classification> {
    classify_with(s, Table::builtin(), cfg)
}

/// Runs the cascade. Sampling works on the canonical representative, so the
/// outcome is the same for every pattern of a class.
pub fn classify_with(s: &SignPattern, table: &Table, cfg: &ClassifyConfig) -> Result<Classification> {
    let entry = if s.n() == 3 && s.is_irreducible() {
        Some(table.lookup(s)?)
    } else {
        None
    };
    if !s.is_irreducible() {
        return Ok(Classification::theory(Verdict::Dna, Evidence::Reducible, None));
    }
    if !row_col_necessary(s) {
        return Ok(Classification::theory(Verdict::Dna, Evidence::RowColFail, entry));
    }
    if theorem4_excludes(s) {
        return Ok(Classification::theory(Verdict::Dna, Evidence::Theorem4, entry));
    }
    if uniform_offdiag(s) {
        return Ok(Classification::theory(Verdict::Rap, Evidence::UniformOffdiag, entry));
    }
    let canon = canonical_form(s).0;
    let samples = draw(&canon, cfg);
    match entry {
        Some(e) => corroborate(&canon, e, &samples, cfg),
        None => {
            let obs = observe(&samples, &cfg.tol);
            let (verdict, evidence) = match (obs.ap_witness, obs.non_ap_witness) {
                (Some(a), Some(b)) => (
                    Verdict::Aap,
                    Evidence::SampledBoth {
                        ap_witness: a,
                        non_ap_witness: b,
                    },
                ),
                (Some(_), None) => (Verdict::Rap, Evidence::SampledAllAp(obs.summary.ap)),
                (None, _) => (Verdict::Dna, Evidence::SampledNoneAp(obs.summary.not_ap)),
            };
            Ok(Classification {
                verdict,
                evidence,
                entry: None,
                printed_label: None,
                sampling: Some(obs.summary),
                uncorroborated: false,
            })
        }
    }
}

/// Evaluates the row's printed condition on `x`; `None` for rows without one.
pub fn table_condition(entry: &TableEntry, x: &RealMatrix) -> Result<Option<bool>> {
    let pattern = pattern_of(x, 0.0);
    if !entry.template.matches(&pattern) {
        return Err(Error::TemplateMismatch {
            entry: entry.id.clone(),
            template: entry.template.to_string(),
            pattern: pattern.to_string(),
        });
    }
    Ok(entry.condition.as_ref().map(|c| {
        c.holds(&|v| match v {
            Var::Entry(i, j) => x.get(i, j),
            _ => f64::NAN,
        })
    }))
}

fn uniform_offdiag(s: &SignPattern) -> bool {
    let n = s.n();
    let off = || (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)));
    off().all(|(i, j)| s.get(i, j) != Sign::Minus) || off().all(|(i, j)| s.get(i, j) != Sign::Plus)
}

fn draw(canon: &SignPattern, cfg: &ClassifyConfig) -> Vec<RealMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(pattern_seed(cfg.seed, canon));
    (0..cfg.samples).map(|_| sample_with(canon, &mut rng, cfg.profile)).collect()
}

struct Observation {
    summary: SampleSummary,
    ap_witness: Option<RealMatrix>,
    non_ap_witness: Option<RealMatrix>,
}

fn observe<'a>(ms: impl IntoIterator<Item = &'a RealMatrix>, tol: &Tolerances) -> Observation {
    let mut obs = Observation {
        summary: SampleSummary::default(),
        ap_witness: None,
        non_ap_witness: None,
    };
    for m in ms {
        obs.summary.samples += 1;
        // eigen_scan only fails on non-finite input, which sampling never produces
        let Ok(scan) = eigen_scan(m, tol.tol) else {
            obs.summary.borderline += 1;
            continue;
        };
        if scan.near_boundary(tol.borderline) {
            obs.summary.borderline += 1;
        } else if scan.certificate.is_some() {
            obs.summary.ap += 1;
            obs.ap_witness.get_or_insert_with(|| m.clone());
        } else {
            obs.summary.not_ap += 1;
            obs.non_ap_witness.get_or_insert_with(|| m.clone());
        }
    }
    obs
}

fn corroborate(canon: &SignPattern, e: &TableEntry, samples: &[RealMatrix], cfg: &ClassifyConfig) -> Result<Classification> {
    let witnesses: Vec<RealMatrix> = e
        .witnesses
        .iter()
        .flat_map(|w| w.matrices(e))
        .filter(|m| canonical_form(&pattern_of(m, 0.0)).0 == *canon)
        .collect();
    let obs = observe(samples.iter().chain(&witnesses), &cfg.tol);
    let summary = SampleSummary {
        witnesses: witnesses.len(),
        ..obs.summary
    };
    let mut out = Classification {
        verdict: e.label,
        evidence: Evidence::Table(e.id.clone()),
        entry: Some(e.id.clone()),
        printed_label: Some(e.label),
        sampling: Some(summary),
        uncorroborated: false,
    };
    match (e.label, obs.ap_witness, obs.non_ap_witness) {
        (Verdict::Rap | Verdict::Dna, Some(a), Some(b)) => {
            out.verdict = Verdict::Aap;
            out.evidence = Evidence::SampledBoth {
                ap_witness: a,
                non_ap_witness: b,
            };
        }
        (Verdict::Dna, Some(_), None) => {
            out.verdict = Verdict::Rap;
            out.evidence = Evidence::SampledAllAp(summary.ap);
        }
        (Verdict::Rap, None, Some(_)) => {
            out.verdict = Verdict::Dna;
            out.evidence = Evidence::SampledNoneAp(summary.not_ap);
        }
        (Verdict::Rap, _, None) if e.recipe.is_some() => {
            let target = e
                .template
                .expand()
                .into_iter()
                .find(|p| canonical_form(p).0 == *canon)
                .expect("lookup guarantees a template member in the class");
            let to_template = equivalent(canon, &target).expect("same class");
            for x in samples {
                recipe_certificate(e, &to_template.apply_matrix(x))?;
            }
            out.evidence = Evidence::Recipe(e.id.clone());
        }
        (Verdict::Aap, a, b) => out.uncorroborated = a.is_none() || b.is_none(),
        _ => {}
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> SignPattern {
        s.parse().unwrap()
    }

    fn run(s: &str) -> Classification {
        classify(&p(s), &ClassifyConfig::default()).unwrap()
    }

    #[test]
    fn cascade_examples() {
        let c = run("0+0/00+/+00");
        assert_eq!((c.verdict, &c.evidence), (Verdict::Rap, &Evidence::UniformOffdiag));
        assert_eq!(c.entry.as_deref(), Some("1.1"));
        let c = run("0-0/00+/+00");
        assert_eq!((c.verdict, &c.evidence), (Verdict::Dna, &Evidence::RowColFail));
        assert_eq!(run("0+0/+0-/+0+").evidence, Evidence::Theorem4);
        assert_eq!(run("+00/0+0/00+").evidence, Evidence::Reducible);
    }

    #[test]
    fn table_row_with_both_kinds() {
        let c = run("++0/-0+/+00");
        assert_eq!(c.verdict, Verdict::Aap);
        assert_eq!(c.evidence, Evidence::Table("8.2".into()));
        assert!(!c.uncorroborated);
        let s = c.sampling.unwrap();
        assert!(s.ap > 0 && s.not_ap > 0);
    }

    #[test]
    fn recipe_rows_certify() {
        let t = Table::builtin();
        let e = t.entry("4.4").unwrap();
        let member = e.template.expand().remove(0);
        let c = classify(&member, &ClassifyConfig::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Rap);
        assert_eq!(c.evidence, Evidence::Recipe("4.4".into()));
    }

    #[test]
    fn equivalent_patterns_agree() {
        let s = p("++0/-0+/+00");
        let cfg = ClassifyConfig {
            samples: 40,
            ..Default::default()
        };
        let base = classify(&s, &cfg).unwrap();
        for t in crate::signpat::EquivTransform::all(3).iter().step_by(5) {
            assert_eq!(classify(&t.apply(&s), &cfg).unwrap(), base);
        }
    }

    #[test]
    fn other_sizes_sample() {
        let cfg = ClassifyConfig {
            samples: 50,
            ..Default::default()
        };
        let c = classify(&p("++00/-0+0/00++/+00-"), &cfg).unwrap();
        assert!(c.entry.is_none());
        assert_eq!(c.verdict, Verdict::Aap);
        let Evidence::SampledBoth {
            ap_witness,
            non_ap_witness,
        } = &c.evidence
        else {
            panic!("expected SampledBoth, got {}", c.evidence);
        };
        assert!(crate::ap::is_ap(ap_witness, &cfg.tol).unwrap().is_ap);
        assert!(!crate::ap::is_ap(non_ap_witness, &cfg.tol).unwrap().is_ap);
        let s = c.sampling.unwrap();
        assert_eq!(s.samples, 50);
    }

    #[test]
    fn condition_evaluation() {
        let t = Table::builtin();
        let e = t.entry("10.2").unwrap();
        let x: RealMatrix = "0 1 0; 1 0 1; 1 -1 0".parse().unwrap();
        assert_eq!(table_condition(e, &x).unwrap(), Some(false));
        let x: RealMatrix = "0 2 0; 2 0 2; 2 -1 0".parse().unwrap();
        assert_eq!(table_condition(e, &x).unwrap(), Some(true));
        let y: RealMatrix = "0 1 0; 0 0 1; 1 0 0".parse().unwrap();
        assert!(matches!(table_condition(e, &y), Err(Error::TemplateMismatch { .. })));
        let plain = t.entry("1.1").unwrap();
        assert_eq!(table_condition(plain, &y).unwrap(), None);
    }
}

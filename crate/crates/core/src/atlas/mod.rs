//! Exhaustive 3x3 atlas: every irreducible sign pattern, deduplicated by
//! equivalence, classified, grouped by digraph and checked against the table.

mod emit;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use emit::{emit_report, write_reports, Format};

use crate::ap::eigen_scan;
use crate::classify3::{
    classify_with, pattern_seed, recipe_certificate, verify_witnesses, Classification, ClassifyConfig, Evidence,
    SuspectPart, Table, TableEntry, Var, Verdict, WitnessCheck, TABLE_FORMAT, TABLE_VERSION,
};
use crate::digraph::{digraph_of, Digraph};
use crate::mat::RealMatrix;
use crate::signpat::{canonical_form, sample_with, SignPattern};
use crate::{Error, Result};

/// Number of digraph groups with 3, 4, ..., 9 edges.
pub const GROUP_SIZES: [usize; 7] = [1, 3, 6, 8, 5, 2, 1];

// ChaCha stream ids, so every check draws from its own sequence
const STREAM_SOUNDNESS: u64 = 1;
const STREAM_CONDITION: u64 = 2;
const STREAM_RECIPE: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtlasConfig {
    pub classify: ClassifyConfig,
    /// Draws per class when checking the theory stages.
    pub soundness_samples: usize,
    /// Draws per row when comparing printed conditions with the oracle.
    pub condition_samples: usize,
    /// Draws per row when exercising recipes.
    pub recipe_samples: usize,
}

impl Default for AtlasConfig {
    fn default() -> Self {
        Self {
            classify: ClassifyConfig::default(),
            soundness_samples: 200,
            condition_samples: 200,
            recipe_samples: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub seed: u64,
    pub samples: usize,
    pub soundness_samples: usize,
    pub condition_samples: usize,
    pub recipe_samples: usize,
    pub tolerances: crate::ap::Tolerances,
    pub profile: crate::signpat::MagnitudeProfile,
    pub table_format: String,
    pub table_version: u32,
    pub crate_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    /// Canonical representative.
    pub pattern: SignPattern,
    /// Concrete patterns in the class.
    pub size: usize,
    pub classification: Classification,
    /// Engine verdict differs from the printed label.
    pub diff: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DigraphGroup {
    /// 1-based group number.
    pub number: usize,
    pub digraph: Digraph,
    pub edges: usize,
    pub classes: Vec<ClassReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Totals {
    pub rap: usize,
    pub aap: usize,
    pub dna: usize,
    pub classes: usize,
    pub irreducible_patterns: usize,
    /// Classes whose verdict rests on sampling alone.
    pub sampled: usize,
    pub label_diffs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WitnessSummary {
    pub matrices: usize,
    /// Spectral verdict equals the printed one.
    pub matches: usize,
    pub borderline: usize,
    /// Oracles agree, counted over matrices outside the borderline band.
    pub oracle_agree: usize,
    pub outside_band: usize,
    /// Oracles agree, counted over borderline matrices.
    pub borderline_agree: usize,
}

impl WitnessSummary {
    pub fn match_rate(&self) -> f64 {
        self.matches as f64 / self.matrices.max(1) as f64
    }
}

/// Printed condition against the spectral oracle on sampled members of a row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub entry: String,
    pub samples: usize,
    pub agree: usize,
    pub disagree: usize,
    pub borderline: usize,
    pub suspect: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<RealMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecipeCheck {
    pub entry: String,
    pub samples: usize,
    pub certified: usize,
    pub min_margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

/// Sampled members of the classes a theory stage resolved. Stages that deny
/// AP must see no AP draw; the uniform off-diagonal stage must see only AP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoundnessCheck {
    pub stage: String,
    pub classes: usize,
    pub samples: usize,
    pub ap: usize,
    pub not_ap: usize,
    pub borderline: usize,
    pub violations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<RealMatrix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscrepancyKind {
    /// The row is marked suspect in the data file.
    SuspectRow,
    /// The row was added to cover a class the printed listing omits.
    Unprinted,
    /// The row's template overlaps another row; it defers.
    Overlap,
    /// The engine verdict differs from the printed label.
    LabelDiff,
    /// An AAP label seen with members of one kind only.
    Uncorroborated,
    /// A witness matrix has the other spectral verdict than printed.
    WitnessMismatch,
    /// The two oracles disagree on a witness outside the borderline band.
    OracleDisagreement,
    /// The printed condition disagrees with the oracle on some member.
    ConditionMismatch,
    /// The recipe failed on some member.
    RecipeFailure,
    /// No class is assigned to the row.
    Unused,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub entry: String,
    pub kind: DiscrepancyKind,
    /// The row is marked suspect, so the finding is expected.
    pub suspect: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtlasReport {
    pub run_meta: RunMeta,
    pub totals: Totals,
    pub groups: Vec<DigraphGroup>,
    pub witness_summary: WitnessSummary,
    pub witness_report: Vec<WitnessCheck>,
    pub conditions: Vec<ConditionCheck>,
    pub recipes: Vec<RecipeCheck>,
    pub soundness: Vec<SoundnessCheck>,
    pub discrepancies: Vec<Discrepancy>,
}

impl AtlasReport {
    /// Every theory-stage soundness check saw zero violations.
    pub fn passed(&self) -> bool {
        self.soundness.iter().all(|s| s.violations == 0)
    }

    pub fn class(&self, pattern: &SignPattern) -> Option<&ClassReport> {
        let c = canonical_form(pattern).0;
        self.groups.iter().flat_map(|g| &g.classes).find(|r| r.pattern == c)
    }
}

/// Canonical representatives of all 3x3 patterns with their class sizes,
/// split into irreducible and reducible, in canonical order.
pub fn enumerate_classes() -> (BTreeMap<SignPattern, usize>, BTreeMap<SignPattern, usize>) {
    let all: Vec<SignPattern> = (0..3u64.pow(9)).map(|c| SignPattern::from_code(3, c)).collect();
    let canon: Vec<SignPattern> = all.par_iter().map(|s| canonical_form(s).0).collect();
    let (mut irr, mut red) = (BTreeMap::new(), BTreeMap::new());
    for (s, c) in all.iter().zip(canon) {
        let side = if s.is_irreducible() { &mut irr } else { &mut red };
        *side.entry(c).or_insert(0) += 1;
    }
    (irr, red)
}

pub fn build_atlas(cfg: &AtlasConfig) -> Result<AtlasReport> {
    build_atlas_with(Table::builtin(), cfg)
}

pub fn build_atlas_with(table: &Table, cfg: &AtlasConfig) -> Result<AtlasReport> {
    let (irreducible, reducible) = enumerate_classes();
    let classes: Vec<(&SignPattern, &usize)> = irreducible.iter().collect();
    let classified: Vec<Classification> = classes
        .par_iter()
        .map(|(s, _)| classify_with(s, table, &cfg.classify))
        .collect::<Result<_>>()?;

    let mut groups: Vec<DigraphGroup> = (1..=26)
        .map(|d| {
            let g = table.group_digraph(d).expect("table has 26 groups").clone();
            DigraphGroup {
                number: d,
                edges: g.edge_count(),
                digraph: g,
                classes: Vec::new(),
            }
        })
        .collect();
    let mut totals = Totals::default();
    for ((s, &size), c) in classes.iter().zip(classified) {
        let d = table
            .group_of(&digraph_of(s))
            .ok_or_else(|| Error::Table(format!("pattern {s} has a digraph outside the 26 groups")))?;
        match c.verdict {
            Verdict::Rap => totals.rap += 1,
            Verdict::Aap => totals.aap += 1,
            Verdict::Dna => totals.dna += 1,
        }
        totals.classes += 1;
        totals.irreducible_patterns += size;
        totals.sampled += usize::from(c.evidence.is_sampled());
        let diff = c.differs_from_label();
        totals.label_diffs += usize::from(diff);
        groups[d - 1].classes.push(ClassReport {
            pattern: (*s).clone(),
            size,
            classification: c,
            diff,
        });
    }
    check_group_sizes(&groups)?;

    let tol = cfg.classify.tol;
    let witness_report: Vec<WitnessCheck> = table
        .entries()
        .par_iter()
        .map(|e| verify_witnesses(e, &tol))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let witness_summary = summarize_witnesses(&witness_report);
    let conditions: Vec<ConditionCheck> = table
        .entries()
        .par_iter()
        .filter(|e| e.condition.is_some())
        .map(|e| check_condition(e, cfg))
        .collect::<Result<_>>()?;
    let recipes: Vec<RecipeCheck> = table
        .entries()
        .par_iter()
        .filter(|e| e.recipe.is_some())
        .map(|e| check_recipe(e, cfg))
        .collect();
    let soundness = check_soundness(&groups, &reducible, cfg)?;

    let mut report = AtlasReport {
        run_meta: RunMeta {
            seed: cfg.classify.seed,
            samples: cfg.classify.samples,
            soundness_samples: cfg.soundness_samples,
            condition_samples: cfg.condition_samples,
            recipe_samples: cfg.recipe_samples,
            tolerances: tol,
            profile: cfg.classify.profile,
            table_format: TABLE_FORMAT.to_string(),
            table_version: TABLE_VERSION,
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
        },
        totals,
        groups,
        witness_summary,
        witness_report,
        conditions,
        recipes,
        soundness,
        discrepancies: Vec::new(),
    };
    report.discrepancies = collect_discrepancies(table, &report);
    Ok(report)
}

fn check_group_sizes(groups: &[DigraphGroup]) -> Result<()> {
    if groups.len() != 26 || groups.iter().any(|g| g.classes.is_empty()) {
        return Err(Error::Table(format!(
            "expected 26 nonempty digraph groups, found {}",
            groups.iter().filter(|g| !g.classes.is_empty()).count()
        )));
    }
    let mut sizes = [0usize; 7];
    for g in groups {
        sizes[g.edges - 3] += 1;
    }
    if sizes != GROUP_SIZES {
        return Err(Error::Table(format!(
            "digraph groups per edge count {sizes:?}, expected {GROUP_SIZES:?}"
        )));
    }
    Ok(())
}

fn summarize_witnesses(checks: &[WitnessCheck]) -> WitnessSummary {
    let mut s = WitnessSummary::default();
    for c in checks {
        s.matrices += 1;
        s.matches += usize::from(c.matches);
        if c.borderline {
            s.borderline += 1;
            s.borderline_agree += usize::from(c.eigen_ap == c.lp_ap);
        } else {
            s.outside_band += 1;
            s.oracle_agree += usize::from(c.eigen_ap == c.lp_ap);
        }
    }
    s
}

fn entry_rng(entry: &TableEntry, seed: u64, stream: u64) -> ChaCha8Rng {
    let first = entry.template.expand().remove(0);
    let mut rng = ChaCha8Rng::seed_from_u64(pattern_seed(seed, &first));
    rng.set_stream(stream);
    rng
}

/// Draws `count` members of the row, cycling through the template's expansions.
fn draw_members(entry: &TableEntry, count: usize, seed: u64, stream: u64, cfg: &AtlasConfig) -> Vec<RealMatrix> {
    let members = entry.template.expand();
    let mut rng = entry_rng(entry, seed, stream);
    (0..count)
        .map(|k| sample_with(&members[k % members.len()], &mut rng, cfg.classify.profile))
        .collect()
}

pub fn check_condition(entry: &TableEntry, cfg: &AtlasConfig) -> Result<ConditionCheck> {
    let cond = entry
        .condition
        .as_ref()
        .ok_or_else(|| Error::Table(format!("entry {} has no condition", entry.id)))?;
    let tol = cfg.classify.tol;
    let mut out = ConditionCheck {
        entry: entry.id.clone(),
        samples: 0,
        agree: 0,
        disagree: 0,
        borderline: 0,
        suspect: entry.suspects(SuspectPart::Condition),
        counterexample: None,
    };
    for x in draw_members(entry, cfg.condition_samples, cfg.classify.seed, STREAM_CONDITION, cfg) {
        out.samples += 1;
        let env = |v: Var| match v {
            Var::Entry(i, j) => x.get(i, j),
            _ => f64::NAN,
        };
        let scan = eigen_scan(&x, tol.tol)?;
        if scan.near_boundary(tol.borderline) || cond.slack(&env).abs() < tol.borderline {
            out.borderline += 1;
        } else if cond.holds(&env) == scan.certificate.is_some() {
            out.agree += 1;
        } else {
            out.disagree += 1;
            out.counterexample.get_or_insert(x);
        }
    }
    Ok(out)
}

pub fn check_recipe(entry: &TableEntry, cfg: &AtlasConfig) -> RecipeCheck {
    let mut out = RecipeCheck {
        entry: entry.id.clone(),
        samples: 0,
        certified: 0,
        min_margin: f64::MAX,
        failure: None,
    };
    for x in draw_members(entry, cfg.recipe_samples, cfg.classify.seed, STREAM_RECIPE, cfg) {
        out.samples += 1;
        match recipe_certificate(entry, &x) {
            Ok(c) => {
                out.certified += 1;
                out.min_margin = out.min_margin.min(c.margin);
            }
            Err(e) => {
                out.failure.get_or_insert_with(|| format!("{x}: {e}"));
            }
        }
    }
    out
}

/// Which oracle outcome contradicts a stage.
#[derive(Clone, Copy)]
enum Expect {
    NoAp,
    AllAp,
}

fn check_soundness(
    groups: &[DigraphGroup],
    reducible: &BTreeMap<SignPattern, usize>,
    cfg: &AtlasConfig,
) -> Result<Vec<SoundnessCheck>> {
    let resolved = |ev: &Evidence| -> Vec<SignPattern> {
        groups
            .iter()
            .flat_map(|g| &g.classes)
            .filter(|c| c.classification.evidence == *ev)
            .map(|c| c.pattern.clone())
            .collect()
    };
    let stages = [
        ("Reducible", reducible.keys().cloned().collect::<Vec<_>>(), Expect::NoAp),
        ("RowColFail", resolved(&Evidence::RowColFail), Expect::NoAp),
        ("Theorem4", resolved(&Evidence::Theorem4), Expect::NoAp),
        ("UniformOffdiag", resolved(&Evidence::UniformOffdiag), Expect::AllAp),
    ];
    stages
        .into_iter()
        .map(|(stage, patterns, expect)| stage_soundness(stage, &patterns, expect, cfg))
        .collect()
}

fn stage_soundness(stage: &str, patterns: &[SignPattern], expect: Expect, cfg: &AtlasConfig) -> Result<SoundnessCheck> {
    let tol = cfg.classify.tol;
    let per_class: Vec<SoundnessCheck> = patterns
        .par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(pattern_seed(cfg.classify.seed, s));
            rng.set_stream(STREAM_SOUNDNESS);
            let mut c = SoundnessCheck {
                stage: stage.to_string(),
                classes: 1,
                samples: 0,
                ap: 0,
                not_ap: 0,
                borderline: 0,
                violations: 0,
                counterexample: None,
            };
            for _ in 0..cfg.soundness_samples {
                let x = sample_with(s, &mut rng, cfg.classify.profile);
                let scan = eigen_scan(&x, tol.tol)?;
                c.samples += 1;
                let ap = scan.certificate.is_some();
                if scan.near_boundary(tol.borderline) {
                    c.borderline += 1;
                    continue;
                }
                if ap {
                    c.ap += 1;
                } else {
                    c.not_ap += 1;
                }
                if ap != matches!(expect, Expect::AllAp) {
                    c.violations += 1;
                    c.counterexample.get_or_insert(x);
                }
            }
            Ok(c)
        })
        .collect::<Result<_>>()?;
    let mut total = SoundnessCheck {
        stage: stage.to_string(),
        classes: 0,
        samples: 0,
        ap: 0,
        not_ap: 0,
        borderline: 0,
        violations: 0,
        counterexample: None,
    };
    for c in per_class {
        total.classes += c.classes;
        total.samples += c.samples;
        total.ap += c.ap;
        total.not_ap += c.not_ap;
        total.borderline += c.borderline;
        total.violations += c.violations;
        if total.counterexample.is_none() {
            total.counterexample = c.counterexample;
        }
    }
    Ok(total)
}

fn collect_discrepancies(table: &Table, r: &AtlasReport) -> Vec<Discrepancy> {
    let mut out = Vec::new();
    let suspect = |id: &str| table.entry(id).is_some_and(TableEntry::is_suspect);
    let mut push = |entry: &str, kind, detail: String| {
        out.push(Discrepancy {
            entry: entry.to_string(),
            kind,
            suspect: suspect(entry),
            detail,
        })
    };
    let mut used = std::collections::HashSet::new();
    for c in r.groups.iter().flat_map(|g| &g.classes) {
        let cl = &c.classification;
        let Some(id) = cl.entry.as_deref() else { continue };
        used.insert(id.to_string());
        if c.diff {
            push(
                id,
                DiscrepancyKind::LabelDiff,
                format!(
                    "{}: printed {}, engine {} by {}",
                    c.pattern,
                    cl.printed_label.map_or("-".into(), |l| l.to_string()),
                    cl.verdict,
                    cl.evidence
                ),
            );
        }
        if cl.uncorroborated {
            push(
                id,
                DiscrepancyKind::Uncorroborated,
                format!("{}: AAP label, sampling {:?}", c.pattern, cl.sampling),
            );
        }
    }
    for e in table.entries() {
        if e.is_suspect() {
            let parts: Vec<&str> = e
                .suspect
                .iter()
                .map(|p| match p {
                    SuspectPart::Condition => "condition",
                    SuspectPart::Witness => "witness",
                    SuspectPart::Recipe => "recipe",
                })
                .collect();
            let note = e.note.as_deref().unwrap_or("");
            push(&e.id, DiscrepancyKind::SuspectRow, format!("{}: {note}", parts.join(", ")));
        }
        if !e.printed {
            push(
                &e.id,
                DiscrepancyKind::Unprinted,
                format!("{} covers a class missing from the printed listing", e.template),
            );
        }
        if let Some(t) = &e.defers_to {
            push(&e.id, DiscrepancyKind::Overlap, format!("template {} overlaps {t}; {t} takes precedence", e.template));
        }
        if !used.contains(&e.id) && e.defers_to.is_none() {
            push(&e.id, DiscrepancyKind::Unused, format!("no class is assigned to {}", e.template));
        }
    }
    for w in &r.witness_report {
        if !w.matches {
            push(
                &w.entry,
                DiscrepancyKind::WitnessMismatch,
                format!(
                    "{} [{}]: printed {}, oracle {}",
                    w.assign,
                    w.matrix,
                    ap_word(w.expected_ap),
                    ap_word(w.eigen_ap)
                ),
            );
        }
        if !w.borderline && w.eigen_ap != w.lp_ap {
            push(
                &w.entry,
                DiscrepancyKind::OracleDisagreement,
                format!("{} [{}]: eigen {}, lp {}", w.assign, w.matrix, ap_word(w.eigen_ap), ap_word(w.lp_ap)),
            );
        }
    }
    for c in &r.conditions {
        if c.disagree > 0 {
            push(
                &c.entry,
                DiscrepancyKind::ConditionMismatch,
                format!(
                    "{} of {} members disagree with the oracle, e.g. [{}]",
                    c.disagree,
                    c.samples,
                    c.counterexample.as_ref().map(ToString::to_string).unwrap_or_default()
                ),
            );
        }
    }
    for c in &r.recipes {
        if c.certified < c.samples {
            push(
                &c.entry,
                DiscrepancyKind::RecipeFailure,
                format!(
                    "{} of {} certified; {}",
                    c.certified,
                    c.samples,
                    c.failure.as_deref().unwrap_or("")
                ),
            );
        }
    }
    out.sort_by(|a, b| entry_order(&a.entry).cmp(&entry_order(&b.entry)).then(a.kind.cmp(&b.kind)));
    out
}

fn ap_word(ap: bool) -> &'static str {
    if ap {
        "AP"
    } else {
        "not AP"
    }
}

/// Sort key for ids like `16.3` or `12.S1`.
fn entry_order(id: &str) -> (u32, u32, String) {
    let (g, k) = id.split_once('.').unwrap_or((id, ""));
    (g.parse().unwrap_or(u32::MAX), k.parse().unwrap_or(u32::MAX), k.to_string())
}

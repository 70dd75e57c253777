//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero when any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use algpos::ap::{certificate_search, closure_transform, eigen_scan, is_ap, Agreement, Closure, Tolerances};
use algpos::atlas::{build_atlas, check_recipe, AtlasConfig, AtlasReport, DiscrepancyKind};
use algpos::classify3::Table;
use algpos::digraph::enumerate_irreducible_3digraphs;
use algpos::mat::RealMatrix;
use algpos::signpat::{
    b_matrix, sample_with, subclass_check, theorem4_excludes, MagnitudeProfile, ShiftRule, SignPattern,
    SubclassVerdict,
};

const SEED: u64 = 20_240_611;
const RECIPE_ROWS: [&str; 13] = [
    "4.4", "6.4", "8.4", "9.2", "10.4", "12.4", "13.4", "14.4", "15.4", "17.4", "18.4", "19.4", "20.4",
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn census() -> Outcome {
    let start = Instant::now();
    let groups = enumerate_irreducible_3digraphs();
    let elapsed = start.elapsed();
    let mut by_edges = BTreeMap::new();
    for g in &groups {
        *by_edges.entry(g.edge_count()).or_insert(0usize) += 1;
    }
    let sizes: Vec<usize> = (3..=9).map(|e| by_edges.get(&e).copied().unwrap_or(0)).collect();
    outcome(
        groups.len() == 26 && sizes == [1, 3, 6, 8, 5, 2, 1] && elapsed < Duration::from_secs(1),
        format!("{} classes, per edge count 3..9: {sizes:?}, {elapsed:.2?}", groups.len()),
    )
}

fn table_reproduction(r: &AtlasReport, elapsed: Duration) -> Outcome {
    let table = Table::builtin();
    let classes: Vec<_> = r.groups.iter().flat_map(|g| &g.classes).collect();
    let unassigned = classes.iter().filter(|c| c.classification.entry.is_none()).count();
    let (mut checked, mut agree, mut suspect_diffs) = (0, 0, 0);
    for c in &classes {
        let Some(e) = c.classification.entry.as_deref().and_then(|id| table.entry(id)) else {
            continue;
        };
        if e.is_suspect() {
            suspect_diffs += usize::from(c.diff);
        } else {
            checked += 1;
            agree += usize::from(!c.diff);
        }
    }
    outcome(
        unassigned == 0 && checked > 0 && agree == checked && elapsed < Duration::from_secs(300),
        format!(
            "{} classes, {unassigned} without an entry; non-suspect agreement {agree}/{checked}; \
             suspect-row differences {suspect_diffs}; {elapsed:.2?}",
            classes.len()
        ),
    )
}

fn witnesses(r: &AtlasReport) -> Outcome {
    let s = &r.witness_summary;
    let reported = r
        .discrepancies
        .iter()
        .filter(|d| d.kind == DiscrepancyKind::WitnessMismatch)
        .count();
    let mismatches = s.matrices - s.matches;
    outcome(
        s.matrices > 0 && s.oracle_agree == s.outside_band && s.match_rate() >= 0.95 && reported == mismatches,
        format!(
            "{} matrices; oracles agree {}/{} outside the band ({} borderline, {} agree); \
             printed verdict matched {:.2}%; {reported} mismatches reported",
            s.matrices,
            s.oracle_agree,
            s.outside_band,
            s.borderline,
            s.borderline_agree,
            100.0 * s.match_rate()
        ),
    )
}

fn recipes() -> Outcome {
    let table = Table::builtin();
    let cfg = AtlasConfig {
        recipe_samples: 100,
        classify: algpos::classify3::ClassifyConfig {
            seed: SEED,
            ..Default::default()
        },
        ..Default::default()
    };
    let mut failed = Vec::new();
    for id in RECIPE_ROWS {
        let Some(e) = table.entry(id).filter(|e| e.recipe.is_some()) else {
            failed.push(format!("{id}: no recipe"));
            continue;
        };
        let c = check_recipe(e, &cfg);
        if c.certified != 100 || c.samples != 100 || !(c.min_margin > 0.0) {
            failed.push(format!("{id}: {}/{} {}", c.certified, c.samples, c.failure.unwrap_or_default()));
        }
    }
    outcome(
        failed.is_empty(),
        if failed.is_empty() {
            format!("{} recipes, 100/100 certified each", RECIPE_ROWS.len())
        } else {
            failed.join("; ")
        },
    )
}

/// Random signs with an occasional zero, log-uniform magnitudes.
fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> RealMatrix {
    let profile = MagnitudeProfile::default();
    let data = (0..n * n)
        .map(|_| {
            if rng.gen_bool(0.15) {
                0.0
            } else if rng.gen_bool(0.5) {
                profile.draw(rng)
            } else {
                -profile.draw(rng)
            }
        })
        .collect();
    RealMatrix::new(n, data).expect("finite")
}

fn closure() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut compared, mut skipped, mut violations) = (0, 0, Vec::new());
    for k in 0..1000 {
        let n = 2 + k % 3;
        let a = random_matrix(&mut rng, n);
        let v = is_ap(&a, &tol).expect("finite input");
        if v.margins.near_boundary(tol.borderline) {
            skipped += 1;
            continue;
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let mut transforms = vec![Closure::Transpose, Closure::Negate, Closure::PermSim(perm)];
        for beta in [0.5, -0.5, 2.0] {
            for alpha in [-1.0, 0.0, 3.0] {
                transforms.push(Closure::Affine { alpha, beta });
            }
        }
        for t in &transforms {
            let b = closure_transform(&a, t).expect("valid transform");
            let w = is_ap(&b, &tol).expect("finite input");
            if w.margins.near_boundary(tol.borderline) {
                continue;
            }
            compared += 1;
            if w.is_ap != v.is_ap {
                violations.push(format!("{t:?} on [{a}]"));
            }
        }
    }
    outcome(
        violations.is_empty(),
        format!(
            "{compared} transformed pairs compared, {skipped} borderline originals excluded, {} violations{}",
            violations.len(),
            violations.first().map(|v| format!(", e.g. {v}")).unwrap_or_default()
        ),
    )
}

fn cross_validation() -> Outcome {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    let (mut disagree, mut unexplained) = (0, Vec::new());
    let total = 2000;
    for k in 0..total {
        let n = 3 + k % 2;
        let a = random_matrix(&mut rng, n);
        let scan = eigen_scan(&a, tol.tol).expect("finite input");
        let lp = certificate_search(&a, n - 1, tol.lp_eps).expect("lp");
        if scan.certificate.is_some() == lp.is_some() {
            continue;
        }
        disagree += 1;
        let v = is_ap(&a, &tol).expect("finite input");
        if v.agreement != Agreement::Borderline {
            unexplained.push(format!("[{a}] {:?} {:?}", v.agreement, v.margins));
        }
    }
    let rate = disagree as f64 / total as f64;
    outcome(
        rate < 0.01 && unexplained.is_empty(),
        format!(
            "{disagree}/{total} disagreements ({:.2}%), {} outside the borderline band{}",
            100.0 * rate,
            unexplained.len(),
            unexplained.first().map(|u| format!(", e.g. {u}")).unwrap_or_default()
        ),
    )
}

fn b_matrix_soundness() -> Outcome {
    let tol = Tolerances::default();
    let profile = MagnitudeProfile::default();
    let (mut patterns, mut samples, mut ap) = (0, 0, Vec::new());
    for code in 0..3u64.pow(9) {
        let s = SignPattern::from_code(3, code);
        if !theorem4_excludes(&s) {
            continue;
        }
        patterns += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ code);
        for _ in 0..200 {
            let x = sample_with(&s, &mut rng, profile);
            samples += 1;
            if eigen_scan(&x, tol.tol).expect("finite input").certificate.is_some() {
                ap.push(format!("{s}: [{x}]"));
            }
        }
    }
    outcome(
        patterns > 0 && ap.is_empty(),
        format!(
            "{patterns} patterns, {samples} samples, {} AP{}",
            ap.len(),
            ap.first().map(|a| format!(", e.g. {a}")).unwrap_or_default()
        ),
    )
}

fn fixtures() -> Outcome {
    let p = |s: &str| s.parse::<SignPattern>().expect("fixture pattern");
    let a = p("0+0/+0-/+0+");
    let ba = b_matrix(&a);
    let c = p("0-0/-0+/+0+");
    let bc = b_matrix(&c);
    let (small, large) = (p("0+/+0"), p("-+/+-"));
    let forward = subclass_check(&small, &large, 200, SEED).expect("same size");
    let backward = subclass_check(&large, &small, 200, SEED).expect("same size");
    let checks = [
        ("B_A", ba == p("0+0/+00/+++")),
        ("B_A reducible", !ba.is_irreducible() && theorem4_excludes(&a)),
        ("B_C", bc == p("0+0/+0+/+0+")),
        ("B_C irreducible", bc.is_irreducible()),
        ("B in A", forward == SubclassVerdict::Holds(ShiftRule::SmallNegative)),
        ("A not in B", matches!(backward, SubclassVerdict::Fails(_))),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    outcome(
        failed.is_empty(),
        format!("B_A = {ba}, B_C = {bc}; failed: {failed:?}"),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cfg = AtlasConfig {
        classify: algpos::classify3::ClassifyConfig {
            seed: SEED,
            samples: 200,
            ..Default::default()
        },
        ..Default::default()
    };
    let atlas = build_atlas(&cfg);
    let atlas_time = start.elapsed();
    let failed_atlas = |e: &algpos::Error| outcome(false, format!("atlas failed: {e}"));
    let results = [
        ("digraph census", census()),
        (
            "table reproduction",
            atlas.as_ref().map_or_else(failed_atlas, |r| table_reproduction(r, atlas_time)),
        ),
        ("witness verification", atlas.as_ref().map_or_else(failed_atlas, witnesses)),
        ("recipe soundness", recipes()),
        ("closure properties", closure()),
        ("oracle cross-validation", cross_validation()),
        ("B-matrix rule soundness", b_matrix_soundness()),
        ("structural fixtures", fixtures()),
    ];
    println!();
    for (k, (name, o)) in results.iter().enumerate() {
        println!(
            "criterion {} {name}: {} ({})",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    let failures = results.iter().filter(|r| !r.1.pass).count();
    println!("acceptance: {}/{} passed\n", results.len() - failures, results.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

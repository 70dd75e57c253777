use std::sync::OnceLock;

use algpos::atlas::{
    build_atlas, emit_report, enumerate_classes, write_reports, AtlasConfig, AtlasReport, Format,
};
use algpos::classify3::{ClassifyConfig, Table, Verdict};
use algpos::signpat::SignPattern;

fn small() -> AtlasConfig {
    AtlasConfig {
        classify: ClassifyConfig {
            samples: 20,
            seed: 7,
            ..Default::default()
        },
        soundness_samples: 20,
        condition_samples: 20,
        recipe_samples: 10,
    }
}

fn report() -> &'static AtlasReport {
    static R: OnceLock<AtlasReport> = OnceLock::new();
    R.get_or_init(|| build_atlas(&small()).unwrap())
}

#[test]
fn totals_and_partition() {
    let r = report();
    let t = &r.totals;
    assert_eq!(t.rap + t.aap + t.dna, t.classes);
    let irreducible = (0..3u64.pow(9))
        .filter(|&c| SignPattern::from_code(3, c).is_irreducible())
        .count();
    assert_eq!(t.irreducible_patterns, irreducible);
    let sizes: usize = r.groups.iter().flat_map(|g| &g.classes).map(|c| c.size).sum();
    assert_eq!(sizes, irreducible);
    assert_eq!(t.classes, enumerate_classes().0.len());
    assert!(r.passed());
}

#[test]
fn three_edge_group_has_two_classes() {
    let r = report();
    assert_eq!(r.groups.len(), 26);
    let three: Vec<_> = r.groups.iter().filter(|g| g.edges == 3).collect();
    assert_eq!(three.len(), 1);
    let mut verdicts: Vec<Verdict> = three[0].classes.iter().map(|c| c.classification.verdict).collect();
    verdicts.sort();
    assert_eq!(verdicts, [Verdict::Rap, Verdict::Dna]);
}

#[test]
fn discrepancies_name_table_rows() {
    let t = Table::builtin();
    for d in &report().discrepancies {
        assert!(t.entry(&d.entry).is_some(), "{}", d.entry);
    }
}

#[test]
fn json_round_trip_and_determinism() {
    let r = report();
    let json = emit_report(r, Format::Json);
    let back: AtlasReport = serde_json::from_str(&json).unwrap();
    assert_eq!(&back, r);
    let again = build_atlas(&small()).unwrap();
    assert_eq!(emit_report(&again, Format::Json), json);
}

#[test]
fn markdown_layout() {
    let r = report();
    let md = emit_report(r, Format::Markdown);
    assert_eq!(md.matches("\n## Group ").count(), 26);
    assert!(!md.contains("**CLEAN**"));
    let mut clean = r.clone();
    clean.discrepancies.clear();
    assert!(emit_report(&clean, Format::Markdown).contains("**CLEAN**"));
}

#[test]
fn report_files() {
    let dir = tempfile::tempdir().unwrap();
    let files = write_reports(report(), dir.path()).unwrap();
    let names: Vec<_> = files.iter().map(|f| f.file_name().unwrap().to_str().unwrap()).collect();
    assert_eq!(names, ["atlas.json", "atlas.md", "discrepancies.json"]);
    let d: serde_json::Value = serde_json::from_slice(&std::fs::read(&files[2]).unwrap()).unwrap();
    assert_eq!(d.as_array().unwrap().len(), report().discrepancies.len());
}

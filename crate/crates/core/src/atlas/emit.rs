use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::AtlasReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Markdown,
}

pub fn emit_report(r: &AtlasReport, format: Format) -> String {
    match format {
        Format::Json => to_json(r),
        Format::Markdown => to_markdown(r),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialize");
    s.push('\n');
    s
}

/// Writes `atlas.json`, `atlas.md` and `discrepancies.json` into `dir`.
pub fn write_reports(r: &AtlasReport, dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let files = [
        ("atlas.json", to_json(r)),
        ("atlas.md", to_markdown(r)),
        ("discrepancies.json", to_json(&r.discrepancies)),
    ];
    let mut out = Vec::new();
    for (name, text) in files {
        let path = dir.join(name);
        fs::write(&path, text)?;
        out.push(path);
    }
    Ok(out)
}

fn to_markdown(r: &AtlasReport) -> String {
    let mut s = String::new();
    // fmt::Write into a String cannot fail
    let w = &mut s;
    let _ = writeln!(w, "# Irreducible 3x3 sign pattern atlas\n");
    if r.discrepancies.is_empty() {
        let _ = writeln!(w, "**CLEAN**: no discrepancies.\n");
    } else {
        let expected = r.discrepancies.iter().filter(|d| d.suspect).count();
        let _ = writeln!(
            w,
            "**{} discrepancies** ({expected} on rows marked suspect), listed at the end.\n",
            r.discrepancies.len()
        );
    }
    let m = &r.run_meta;
    let _ = writeln!(
        w,
        "Seed {}, {} samples per class, tolerance {:e}, borderline band {:e}, table {} v{}.\n",
        m.seed, m.samples, m.tolerances.tol, m.tolerances.borderline, m.table_format, m.table_version
    );
    let t = &r.totals;
    let _ = writeln!(w, "| verdict | classes |\n|---|---|");
    let _ = writeln!(w, "| RAP | {} |\n| AAP | {} |\n| DNA | {} |", t.rap, t.aap, t.dna);
    let _ = writeln!(
        w,
        "| total | {} ({} irreducible patterns) |\n",
        t.classes, t.irreducible_patterns
    );
    let _ = writeln!(
        w,
        "Verdicts differing from the printed label: {}. Verdicts resting on sampling alone: {}.\n",
        t.label_diffs, t.sampled
    );

    for g in &r.groups {
        let _ = writeln!(w, "## Group {}: {} edges, `{}`\n", g.number, g.edges, g.digraph);
        let _ = writeln!(w, "| pattern | size | entry | printed | engine | evidence | diff |\n|---|---|---|---|---|---|---|");
        for c in &g.classes {
            let cl = &c.classification;
            let mut evidence = cl.evidence.name().to_string();
            if let crate::classify3::Evidence::SampledAllAp(k) | crate::classify3::Evidence::SampledNoneAp(k) = cl.evidence {
                let _ = write!(evidence, "({k}, not a proof)");
            }
            if cl.uncorroborated {
                evidence.push_str(", uncorroborated");
            }
            let _ = writeln!(
                w,
                "| `{}` | {} | {} | {} | {} | {} | {} |",
                c.pattern,
                c.size,
                cl.entry.as_deref().unwrap_or("-"),
                cl.printed_label.map_or("-".into(), |l| l.to_string()),
                cl.verdict,
                evidence,
                if c.diff { "**yes**" } else { "" }
            );
        }
        let _ = writeln!(w);
    }

    let ws = &r.witness_summary;
    let _ = writeln!(w, "## Witness matrices\n");
    let _ = writeln!(
        w,
        "{} matrices; {} match the printed verdict ({:.1}%); oracles agree on {} of {} outside the borderline band; {} borderline, on {} of which the oracles agree.\n",
        ws.matrices,
        ws.matches,
        100.0 * ws.match_rate(),
        ws.oracle_agree,
        ws.outside_band,
        ws.borderline,
        ws.borderline_agree
    );

    let _ = writeln!(w, "## Printed conditions against the oracle\n");
    let _ = writeln!(w, "| entry | samples | agree | disagree | borderline | suspect |\n|---|---|---|---|---|---|");
    for c in &r.conditions {
        let _ = writeln!(
            w,
            "| {} | {} | {} | {} | {} | {} |",
            c.entry,
            c.samples,
            c.agree,
            c.disagree,
            c.borderline,
            if c.suspect { "yes" } else { "" }
        );
    }
    let _ = writeln!(w);

    let _ = writeln!(w, "## Polynomial recipes\n");
    let _ = writeln!(w, "| entry | certified | min margin |\n|---|---|---|");
    for c in &r.recipes {
        let _ = writeln!(w, "| {} | {}/{} | {:.3e} |", c.entry, c.certified, c.samples, c.min_margin);
    }
    let _ = writeln!(w);

    let _ = writeln!(w, "## Theory-stage soundness\n");
    let _ = writeln!(
        w,
        "| stage | classes | samples | AP | not AP | borderline | violations |\n|---|---|---|---|---|---|---|"
    );
    for c in &r.soundness {
        let _ = writeln!(
            w,
            "| {} | {} | {} | {} | {} | {} | {} |",
            c.stage, c.classes, c.samples, c.ap, c.not_ap, c.borderline, c.violations
        );
    }
    let _ = writeln!(w);

    let _ = writeln!(w, "## Discrepancies\n");
    if r.discrepancies.is_empty() {
        let _ = writeln!(w, "None.");
    } else {
        let _ = writeln!(w, "| entry | kind | suspect row | detail |\n|---|---|---|---|");
        for d in &r.discrepancies {
            let kind = serde_json::to_value(d.kind).expect("unit enum");
            let _ = writeln!(
                w,
                "| {} | {} | {} | {} |",
                d.entry,
                kind.as_str().unwrap_or_default(),
                if d.suspect { "yes" } else { "" },
                d.detail.replace('|', "\\|")
            );
        }
    }
    s
}

//! The classification table: one record per listed 3x3 pattern, loaded from
//! `data/table3.toml` (format documented in the file header).

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::expr::{Condition, Var};
use super::recipe::Recipe;
use super::witness::Witness;
use super::Verdict;
use crate::digraph::{digraph_canonical, enumerate_irreducible_3digraphs, Digraph};
use crate::signpat::{canonical_form, Sign, SignPattern};
use crate::{Error, Result};

pub const TABLE_FORMAT: &str = "algpos-table3";
pub const TABLE_VERSION: u32 = 1;

const BUILTIN: &str = include_str!("../../data/table3.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Sign(Sign),
    /// Nonzero, either sign.
    Star,
}

/// A sign pattern whose cells may also be `*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Template {
    n: usize,
    cells: Vec<Cell>,
}

impl Template {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Cell {
        self.cells[i * self.n + j]
    }

    pub fn matches(&self, s: &SignPattern) -> bool {
        s.n() == self.n
            && self.cells.iter().zip(s.cells()).all(|(c, &v)| match c {
                Cell::Sign(t) => *t == v,
                Cell::Star => v != Sign::Zero,
            })
    }

    /// Every concrete pattern the template stands for, stars replaced by `-` then `+`.
    pub fn expand(&self) -> Vec<SignPattern> {
        self.cells
            .iter()
            .map(|c| match c {
                Cell::Sign(s) => vec![*s],
                Cell::Star => vec![Sign::Minus, Sign::Plus],
            })
            .multi_cartesian_product()
            .map(|cells| SignPattern::new(self.n, cells).expect("square by construction"))
            .collect()
    }

    /// Stars count as nonzero.
    pub fn digraph(&self) -> Digraph {
        let edges: Vec<(usize, usize)> = (0..self.n)
            .cartesian_product(0..self.n)
            .filter(|&(i, j)| self.get(i, j) != Cell::Sign(Sign::Zero))
            .collect();
        Digraph::from_edges(self.n, &edges)
    }
}

impl FromStr for Template {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let plain = s.replace('*', "+");
        let shape: SignPattern = plain.parse()?;
        let cells = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '/')
            .map(|c| match c {
                '*' => Cell::Star,
                c => Cell::Sign(Sign::from_char(c).expect("checked by the pattern parser")),
            })
            .collect();
        Ok(Self { n: shape.n(), cells })
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.cells.chunks(self.n).enumerate() {
            if i > 0 {
                f.write_str("/")?;
            }
            for c in row {
                let ch = match c {
                    Cell::Sign(s) => s.to_char(),
                    Cell::Star => '*',
                };
                write!(f, "{ch}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Template {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Template {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Part of a printed row that carries an evident slip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuspectPart {
    Condition,
    Witness,
    Recipe,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub id: String,
    /// Group number, 1..=26.
    pub digraph: usize,
    pub template: Template,
    pub label: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<Condition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defers_to: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub suspect: Vec<SuspectPart>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// False for records added to cover classes the printed listing omits.
    #[serde(default = "yes")]
    pub printed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recipe: Option<Recipe>,
    #[serde(default, rename = "witness", skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Witness>,
}

impl TableEntry {
    pub fn is_suspect(&self) -> bool {
        !self.suspect.is_empty()
    }

    pub fn suspects(&self, part: SuspectPart) -> bool {
        self.suspect.contains(&part)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    format: String,
    version: u32,
    entry: Vec<TableEntry>,
}

#[derive(Debug, Clone)]
pub struct Table {
    entries: Vec<TableEntry>,
    by_id: HashMap<String, usize>,
    /// Canonical pattern to the entries whose template covers it.
    by_class: HashMap<SignPattern, Vec<usize>>,
    /// Canonical digraph of each group, index `d - 1`.
    groups: Vec<Digraph>,
}

impl Table {
    /// The table compiled into the crate.
    pub fn builtin() -> &'static Table {
        static TABLE: OnceLock<Table> = OnceLock::new();
        TABLE.get_or_init(|| Table::parse(BUILTIN).expect("bundled table is valid"))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: TableFile = toml::from_str(text).map_err(|e| Error::Table(e.to_string()))?;
        if file.format != TABLE_FORMAT || file.version != TABLE_VERSION {
            return Err(Error::Table(format!(
                "expected format {TABLE_FORMAT:?} version {TABLE_VERSION}, found {:?} version {}",
                file.format, file.version
            )));
        }
        let entries = file.entry;
        let mut by_id = HashMap::new();
        for (k, e) in entries.iter().enumerate() {
            if by_id.insert(e.id.clone(), k).is_some() {
                return Err(Error::Table(format!("duplicate id {}", e.id)));
            }
            validate_entry(e)?;
        }
        for e in &entries {
            if let Some(target) = &e.defers_to {
                let ok = by_id.get(target).is_some_and(|&t| entries[t].digraph == e.digraph && t != by_id[&e.id]);
                if !ok {
                    return Err(Error::Table(format!("{}: defers_to {target} is not another entry of its group", e.id)));
                }
            }
        }
        let groups = validate_groups(&entries)?;
        let mut by_class: HashMap<SignPattern, Vec<usize>> = HashMap::new();
        for (k, e) in entries.iter().enumerate() {
            for s in e.template.expand() {
                let list = by_class.entry(canonical_form(&s).0).or_default();
                if !list.contains(&k) {
                    list.push(k);
                }
            }
        }
        Ok(Self {
            entries,
            by_id,
            by_class,
            groups,
        })
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn entry(&self, id: &str) -> Option<&TableEntry> {
        self.by_id.get(id).map(|&k| &self.entries[k])
    }

    /// Canonical digraph of group `d` (1-based).
    pub fn group_digraph(&self, d: usize) -> Option<&Digraph> {
        d.checked_sub(1).and_then(|k| self.groups.get(k))
    }

    /// Group number of a digraph, by equivalence.
    pub fn group_of(&self, g: &Digraph) -> Option<usize> {
        let c = digraph_canonical(g);
        self.groups.iter().position(|h| *h == c).map(|k| k + 1)
    }

    /// Every entry whose template covers the class of `s`, before precedence.
    pub fn candidates(&self, s: &SignPattern) -> Vec<&TableEntry> {
        if s.n() != 3 {
            return Vec::new();
        }
        self.by_class
            .get(&canonical_form(s).0)
            .map(|ks| ks.iter().map(|&k| &self.entries[k]).collect())
            .unwrap_or_default()
    }

    /// The single entry responsible for the class of `s`: candidates that
    /// defer to another candidate drop out.
    pub fn lookup(&self, s: &SignPattern) -> Result<&TableEntry> {
        let found = self.candidates(s);
        let ids: HashSet<&str> = found.iter().map(|e| e.id.as_str()).collect();
        let left: Vec<&TableEntry> = found
            .iter()
            .copied()
            .filter(|e| !e.defers_to.as_deref().is_some_and(|t| ids.contains(t)))
            .collect();
        match left.as_slice() {
            [] => Err(Error::TableMiss { pattern: s.to_string() }),
            [one] => Ok(one),
            many => Err(Error::Table(format!(
                "pattern {s} matches entries {}",
                many.iter().map(|e| e.id.as_str()).join(", ")
            ))),
        }
    }
}

fn validate_entry(e: &TableEntry) -> Result<()> {
    let fail = |what: String| Err(Error::Table(format!("{}: {what}", e.id)));
    if e.template.n() != 3 {
        return fail(format!("template {} is not 3x3", e.template));
    }
    if !(1..=26).contains(&e.digraph) {
        return fail(format!("digraph {} outside 1..=26", e.digraph));
    }
    let entry_only = |vars: Vec<Var>| {
        vars.into_iter()
            .all(|v| matches!(v, Var::Entry(i, j) if i < 3 && j < 3))
    };
    if let Some(c) = &e.condition {
        if !entry_only(c.vars()) {
            return fail(format!("condition {c} uses symbols other than a11..a33"));
        }
    }
    if let Some(r) = &e.recipe {
        r.validate().or_else(&fail)?;
    }
    for w in &e.witnesses {
        w.assign.validate(3).or_else(&fail)?;
    }
    Ok(())
}

/// Entries of one group share a digraph; groups are pairwise distinct, cover
/// the 26 irreducible classes and run in edge-count order.
fn validate_groups(entries: &[TableEntry]) -> Result<Vec<Digraph>> {
    let mut groups: BTreeMap<usize, Digraph> = BTreeMap::new();
    for e in entries {
        let g = digraph_canonical(&e.template.digraph());
        match groups.get(&e.digraph) {
            Some(h) if *h != g => {
                return Err(Error::Table(format!(
                    "{}: template digraph {g} differs from group {} digraph {h}",
                    e.id, e.digraph
                )))
            }
            Some(_) => {}
            None => {
                groups.insert(e.digraph, g);
            }
        }
    }
    if groups.len() != 26 || groups.keys().copied().ne(1..=26) {
        return Err(Error::Table(format!("expected groups 1..=26, found {} groups", groups.len())));
    }
    let list: Vec<Digraph> = groups.into_values().collect();
    if !list.windows(2).all(|w| w[0].edge_count() <= w[1].edge_count()) {
        return Err(Error::Table("groups are not in edge-count order".into()));
    }
    let mut sorted = list.clone();
    sorted.sort();
    let mut expected = enumerate_irreducible_3digraphs();
    expected.sort();
    if sorted != expected {
        return Err(Error::Table("groups do not match the irreducible 3-vertex digraphs".into()));
    }
    Ok(list)
}

//! Labelled sequents `R, Γ`, their graphs and choice-tree structure.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{self, Agent, AgentCount, Formula, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(pub u32);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}

/// `R_i xy`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelAtom {
    pub agent: Agent,
    pub from: Label,
    pub to: Label,
}

impl RelAtom {
    pub fn new(agent: Agent, from: Label, to: Label) -> Self {
        RelAtom { agent, from, to }
    }
}

impl fmt::Display for RelAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{} {} {}", self.agent, self.from, self.to)
    }
}

/// `x:φ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelledFormula {
    pub label: Label,
    pub formula: Formula,
}

impl LabelledFormula {
    pub fn new(label: Label, formula: Formula) -> Self {
        LabelledFormula { label, formula }
    }
}

impl fmt::Display for LabelledFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.label, self.formula)
    }
}

/// A labelled sequent with set semantics. Both parts keep insertion order,
/// which fixes the order in which proof search inspects formulas; equality
/// ignores that order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelledSequent {
    pub rel: IndexSet<RelAtom>,
    pub forms: IndexSet<LabelledFormula>,
}

impl LabelledSequent {
    pub fn new() -> Self {
        Self::default()
    }

    /// The one-formula sequent `w:φ`.
    pub fn singleton(label: Label, formula: Formula) -> Self {
        let mut s = Self::new();
        s.add_formula(label, formula);
        s
    }

    /// Returns true if the atom was not already present.
    pub fn add_rel(&mut self, atom: RelAtom) -> bool {
        self.rel.insert(atom)
    }

    pub fn add_formula(&mut self, label: Label, formula: Formula) -> bool {
        self.forms.insert(LabelledFormula::new(label, formula))
    }

    pub fn with_rel(mut self, atom: RelAtom) -> Self {
        self.add_rel(atom);
        self
    }

    pub fn with_formula(mut self, label: Label, formula: Formula) -> Self {
        self.add_formula(label, formula);
        self
    }

    pub fn contains(&self, label: Label, formula: &Formula) -> bool {
        self.forms.contains(&LabelledFormula::new(label, formula.clone()))
    }

    pub fn contains_rel(&self, atom: &RelAtom) -> bool {
        self.rel.contains(atom)
    }

    pub fn remove_formula(&mut self, label: Label, formula: &Formula) -> bool {
        self.forms.shift_remove(&LabelledFormula::new(label, formula.clone()))
    }

    /// `Lab(Λ)`, in ascending order.
    pub fn labels(&self) -> BTreeSet<Label> {
        let mut out: BTreeSet<Label> = self.forms.iter().map(|lf| lf.label).collect();
        for r in &self.rel {
            out.insert(r.from);
            out.insert(r.to);
        }
        out
    }

    pub fn has_label(&self, label: Label) -> bool {
        self.forms.iter().any(|lf| lf.label == label)
            || self.rel.iter().any(|r| r.from == label || r.to == label)
    }

    /// Formulas labelled `label`, in insertion order.
    pub fn formulas_at(&self, label: Label) -> impl Iterator<Item = &Formula> {
        self.forms.iter().filter(move |lf| lf.label == label).map(|lf| &lf.formula)
    }

    /// A label that does not occur in the sequent: one past the largest id.
    pub fn fresh_label(&self) -> Label {
        self.labels().last().map_or(Label(0), |l| Label(l.0 + 1))
    }

    /// Largest agent index in either part, 0 if there is none.
    pub fn max_agent(&self) -> Agent {
        let rel = self.rel.iter().map(|r| r.agent).max().unwrap_or(0);
        let forms = self.forms.iter().map(|lf| lf.formula.max_agent()).max().unwrap_or(0);
        rel.max(forms)
    }

    /// Set inclusion of both parts.
    pub fn is_subset(&self, other: &LabelledSequent) -> bool {
        self.rel.iter().all(|r| other.rel.contains(r))
            && self.forms.iter().all(|lf| other.forms.contains(lf))
    }

    pub fn is_forestlike(&self) -> bool {
        is_forestlike(self)
    }
}

impl fmt::Display for LabelledSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for r in &self.rel {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{r}")?;
        }
        for lf in &self.forms {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{lf}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Graphs
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: Label,
    pub to: Label,
    pub agent: Agent,
}

/// `G(Λ)`: vertices are labels, an `i`-labelled edge per `R_i wu`, and each
/// vertex carries the formulas at that label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequentGraph {
    pub vertices: BTreeSet<Label>,
    pub edges: BTreeSet<Edge>,
    pub vertex_labels: BTreeMap<Label, BTreeSet<Formula>>,
}

pub fn graph_of(s: &LabelledSequent) -> SequentGraph {
    let vertices = s.labels();
    let edges = s.rel.iter().map(|r| Edge { from: r.from, to: r.to, agent: r.agent }).collect();
    let mut vertex_labels: BTreeMap<Label, BTreeSet<Formula>> =
        vertices.iter().map(|&v| (v, BTreeSet::new())).collect();
    for lf in &s.forms {
        vertex_labels.entry(lf.label).or_default().insert(lf.formula.clone());
    }
    SequentGraph { vertices, edges, vertex_labels }
}

/// Undirected connected components of the relational part, each sorted,
/// listed by smallest member.
pub(crate) fn undirected_components(s: &LabelledSequent) -> Vec<BTreeSet<Label>> {
    let labels = s.labels();
    let mut adj: BTreeMap<Label, Vec<Label>> = labels.iter().map(|&l| (l, Vec::new())).collect();
    for r in &s.rel {
        adj.entry(r.from).or_default().push(r.to);
        adj.entry(r.to).or_default().push(r.from);
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &start in &labels {
        if !seen.insert(start) {
            continue;
        }
        let mut comp = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[&v] {
                if seen.insert(u) {
                    comp.insert(u);
                    queue.push_back(u);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// True iff `G(Λ)` is a disjoint union of directed trees.
///
/// Equivalently: every vertex has in-degree at most one and the underlying
/// undirected multigraph is acyclic.
pub fn is_forestlike(s: &LabelledSequent) -> bool {
    let mut indegree: BTreeMap<Label, usize> = BTreeMap::new();
    for r in &s.rel {
        if r.from == r.to {
            return false;
        }
        let d = indegree.entry(r.to).or_default();
        *d += 1;
        if *d > 1 {
            return false;
        }
    }
    let vertices = s.labels().len();
    let components = undirected_components(s).len();
    s.rel.len() == vertices - components
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceTree {
    pub root: Label,
    pub members: BTreeSet<Label>,
}

/// The choice-trees of a forestlike sequent, ordered by root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceForest {
    pub trees: Vec<ChoiceTree>,
    index: BTreeMap<Label, usize>,
}

impl ChoiceForest {
    /// `CT(w)`.
    pub fn tree_of(&self, w: Label) -> Option<&ChoiceTree> {
        self.index.get(&w).map(|&i| &self.trees[i])
    }

    pub fn same_tree(&self, w: Label, u: Label) -> bool {
        match (self.index.get(&w), self.index.get(&u)) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn roots(&self) -> impl Iterator<Item = Label> + '_ {
        self.trees.iter().map(|t| t.root)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("sequent is not forestlike")]
pub struct NotForestlike;

pub fn choice_trees(s: &LabelledSequent) -> Result<ChoiceForest, NotForestlike> {
    if !is_forestlike(s) {
        return Err(NotForestlike);
    }
    let with_parent: BTreeSet<Label> = s.rel.iter().map(|r| r.to).collect();
    let mut trees = Vec::new();
    for members in undirected_components(s) {
        let mut roots = members.iter().filter(|l| !with_parent.contains(l));
        let root = *roots.next().ok_or(NotForestlike)?;
        if roots.next().is_some() {
            return Err(NotForestlike);
        }
        trees.push(ChoiceTree { root, members });
    }
    trees.sort_by_key(|t| t.root);
    let mut index = BTreeMap::new();
    for (i, t) in trees.iter().enumerate() {
        for &l in &t.members {
            index.insert(l, i);
        }
    }
    Ok(ChoiceForest { trees, index })
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// On-disk form: `{"rel": [[agent, from, to], ...], "forms": [[label, "formula"], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequentDoc {
    pub rel: Vec<(Agent, u32, u32)>,
    pub forms: Vec<(u32, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequentDecodeError {
    #[error("formula at label w{label}: {source}")]
    Formula { label: u32, source: ParseError },
    #[error("relational atom uses agent {agent}, outside 1..={m}")]
    Agent { agent: Agent, m: u32 },
}

impl SequentDoc {
    pub fn from_sequent(s: &LabelledSequent) -> Self {
        SequentDoc {
            rel: s.rel.iter().map(|r| (r.agent, r.from.0, r.to.0)).collect(),
            forms: s.forms.iter().map(|lf| (lf.label.0, formula::print(&lf.formula))).collect(),
        }
    }

    pub fn to_sequent(&self, m: AgentCount) -> Result<LabelledSequent, SequentDecodeError> {
        let mut s = LabelledSequent::new();
        for &(agent, from, to) in &self.rel {
            if !m.contains(agent) {
                return Err(SequentDecodeError::Agent { agent, m: m.get() });
            }
            s.add_rel(RelAtom::new(agent, Label(from), Label(to)));
        }
        for (label, text) in &self.forms {
            let f = formula::parse(text, m)
                .map_err(|source| SequentDecodeError::Formula { label: *label, source })?;
            s.add_formula(Label(*label), f);
        }
        Ok(s)
    }
}

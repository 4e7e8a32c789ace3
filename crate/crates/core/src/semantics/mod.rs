//! Finite `Ldm_n^m` models: frame conditions, the model checker, counter-models
//! read off stable sequents, and a validity oracle by model enumeration.

mod oracle;

pub use oracle::{
    all_models, decide_by_brute_force, decide_by_enumeration, default_max_worlds, OracleError, Verdict, MAX_WORLDS,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Agent, AgentCount, Formula};
use crate::propagation::same_component;
use crate::prover::is_stable;
use crate::sequent::{Label, LabelledSequent};

pub type World = u32;

/// JSON: `{"worlds": [0, 1], "rel": {"1": [[0,0],[1,1]]}, "val": {"p": [1]}}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Model {
    pub worlds: BTreeSet<World>,
    pub rel: BTreeMap<Agent, BTreeSet<(World, World)>>,
    pub val: BTreeMap<String, BTreeSet<World>>,
}

pub type Interpretation = BTreeMap<Label, World>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("world {0} is not in the model")]
pub struct UnknownWorld(pub World);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameViolation {
    NoWorlds,
    RelationOutsideWorlds { agent: Agent, pair: (World, World) },
    AgentOutOfRange(Agent),
    NotReflexive { agent: Agent, world: World },
    NotSymmetric { agent: Agent, pair: (World, World) },
    NotTransitive { agent: Agent, pair: (World, World), via: World },
    /// One chosen cell per agent, represented by a member world, whose intersection is empty.
    EmptyIntersection { representatives: Vec<World> },
    TooManyChoices { agent: Agent, classes: usize, n: u32 },
}

impl fmt::Display for FrameViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameViolation::NoWorlds => write!(f, "the set of worlds is empty"),
            FrameViolation::RelationOutsideWorlds { agent, pair: (u, v) } => {
                write!(f, "R{agent} relates ({u},{v}) outside the worlds")
            }
            FrameViolation::AgentOutOfRange(i) => write!(f, "relation for agent {i} beyond the agent count"),
            FrameViolation::NotReflexive { agent, world } => write!(f, "C1: R{agent} is not reflexive at {world}"),
            FrameViolation::NotSymmetric { agent, pair: (u, v) } => {
                write!(f, "C1: R{agent} has ({u},{v}) but not ({v},{u})")
            }
            FrameViolation::NotTransitive { agent, pair: (u, w), via } => {
                write!(f, "C1: R{agent} has ({u},{via}) and ({via},{w}) but not ({u},{w})")
            }
            FrameViolation::EmptyIntersection { representatives } => {
                write!(f, "C2: the cells of {representatives:?} do not intersect")
            }
            FrameViolation::TooManyChoices { agent, classes, n } => {
                write!(f, "C3: R{agent} has {classes} classes, more than {n}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FrameReport {
    pub violations: Vec<FrameViolation>,
}

impl FrameReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Model {
    pub fn related(&self, agent: Agent, u: World, v: World) -> bool {
        self.rel.get(&agent).is_some_and(|r| r.contains(&(u, v)))
    }

    /// Worlds `v` with `R_agent u v`.
    pub fn cell(&self, agent: Agent, u: World) -> BTreeSet<World> {
        self.rel
            .get(&agent)
            .map(|r| r.range((u, World::MIN)..=(u, World::MAX)).map(|&(_, v)| v).collect())
            .unwrap_or_default()
    }

    /// Distinct cells of `agent`, assuming it is an equivalence relation.
    pub fn classes(&self, agent: Agent) -> Vec<BTreeSet<World>> {
        let mut out: Vec<BTreeSet<World>> = Vec::new();
        for &w in &self.worlds {
            let c = self.cell(agent, w);
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }

    pub fn truth(&self, atom: &str, w: World) -> bool {
        self.val.get(atom).is_some_and(|s| s.contains(&w))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Check C1, C2 and (when `n > 0`) C3 for agents `1..=m`.
pub fn check_frame(model: &Model, m: AgentCount, n: u32) -> FrameReport {
    let mut violations = Vec::new();
    if model.worlds.is_empty() {
        return FrameReport { violations: vec![FrameViolation::NoWorlds] };
    }
    for (&agent, pairs) in &model.rel {
        if !m.contains(agent) {
            violations.push(FrameViolation::AgentOutOfRange(agent));
        }
        for &(u, v) in pairs {
            if !model.worlds.contains(&u) || !model.worlds.contains(&v) {
                violations.push(FrameViolation::RelationOutsideWorlds { agent, pair: (u, v) });
            }
        }
    }
    let mut equivalences = true;
    for agent in m.agents() {
        let before = violations.len();
        for &w in &model.worlds {
            if !model.related(agent, w, w) {
                violations.push(FrameViolation::NotReflexive { agent, world: w });
            }
        }
        let empty = BTreeSet::new();
        let pairs = model.rel.get(&agent).unwrap_or(&empty);
        for &(u, v) in pairs {
            if !pairs.contains(&(v, u)) {
                violations.push(FrameViolation::NotSymmetric { agent, pair: (u, v) });
            }
            for via_w in model.cell(agent, v) {
                if !pairs.contains(&(u, via_w)) {
                    violations.push(FrameViolation::NotTransitive { agent, pair: (u, via_w), via: v });
                }
            }
        }
        equivalences &= violations.len() == before;
    }
    if !equivalences {
        return FrameReport { violations };
    }
    let classes: Vec<Vec<BTreeSet<World>>> = m.agents().map(|i| model.classes(i)).collect();
    if m.get() > 1 {
        let mut choice = vec![0usize; classes.len()];
        'tuples: loop {
            let mut meet = classes[0][choice[0]].clone();
            for (k, &c) in choice.iter().enumerate().skip(1) {
                meet = meet.intersection(&classes[k][c]).copied().collect();
            }
            if meet.is_empty() {
                let representatives =
                    choice.iter().enumerate().map(|(k, &c)| *classes[k][c].first().unwrap()).collect();
                violations.push(FrameViolation::EmptyIntersection { representatives });
            }
            for k in 0..choice.len() {
                choice[k] += 1;
                if choice[k] < classes[k].len() {
                    continue 'tuples;
                }
                choice[k] = 0;
            }
            break;
        }
    }
    if n > 0 {
        for (k, cls) in classes.iter().enumerate() {
            if cls.len() > n as usize {
                violations.push(FrameViolation::TooManyChoices { agent: k as Agent + 1, classes: cls.len(), n });
            }
        }
    }
    FrameReport { violations }
}

/// Truth of `f` at `w`, clause by clause.
pub fn evaluate(model: &Model, w: World, f: &Formula) -> Result<bool, UnknownWorld> {
    if !model.worlds.contains(&w) {
        return Err(UnknownWorld(w));
    }
    Ok(eval(model, w, f))
}

fn eval(model: &Model, w: World, f: &Formula) -> bool {
    match f {
        Formula::Atom(p) => model.truth(p, w),
        Formula::NegAtom(p) => !model.truth(p, w),
        Formula::And(l, r) => eval(model, w, l) && eval(model, w, r),
        Formula::Or(l, r) => eval(model, w, l) || eval(model, w, r),
        Formula::Box(b) => model.worlds.iter().all(|&u| eval(model, u, b)),
        Formula::Dia(b) => model.worlds.iter().any(|&u| eval(model, u, b)),
        Formula::AgBox(i, b) => model.cell(*i, w).into_iter().all(|u| eval(model, u, b)),
        Formula::AgDia(i, b) => model.cell(*i, w).into_iter().any(|u| eval(model, u, b)),
    }
}

/// Truth at every world.
pub fn globally_true(model: &Model, f: &Formula) -> bool {
    model.worlds.iter().all(|&w| eval(model, w, f))
}

/// Satisfaction of a sequent under an interpretation: if every relational
/// atom holds then some labelled formula holds. Labels missing from the
/// interpretation yield `None`.
pub fn satisfies_sequent(model: &Model, interp: &Interpretation, s: &LabelledSequent) -> Option<bool> {
    let at = |l: Label| interp.get(&l).copied();
    for r in &s.rel {
        if !model.related(r.agent, at(r.from)?, at(r.to)?) {
            return Some(true);
        }
    }
    for lf in &s.forms {
        if eval(model, at(lf.label)?, &lf.formula) {
            return Some(true);
        }
    }
    Some(false)
}

/// An interpretation of the sequent's labels under which every relational
/// atom holds and every labelled formula fails, if one exists.
pub fn falsifying_interpretation(model: &Model, s: &LabelledSequent) -> Option<Interpretation> {
    let labels: Vec<Label> = s.labels().into_iter().collect();
    // worlds where everything at the label is false
    let allowed: Vec<Vec<World>> = labels
        .iter()
        .map(|&l| {
            let forms: Vec<&Formula> = s.formulas_at(l).collect();
            model.worlds.iter().copied().filter(|&w| forms.iter().all(|f| !eval(model, w, f))).collect()
        })
        .collect();
    let index = |l: Label| labels.binary_search(&l).unwrap();
    let mut interp: Vec<Option<World>> = vec![None; labels.len()];
    fn assign(
        k: usize,
        allowed: &[Vec<World>],
        interp: &mut Vec<Option<World>>,
        consistent: &dyn Fn(&[Option<World>]) -> bool,
    ) -> bool {
        if k == allowed.len() {
            return true;
        }
        for &w in &allowed[k] {
            interp[k] = Some(w);
            if consistent(interp) && assign(k + 1, allowed, interp, consistent) {
                return true;
            }
        }
        interp[k] = None;
        false
    }
    let rel: Vec<(u32, usize, usize)> = s.rel.iter().map(|r| (r.agent, index(r.from), index(r.to))).collect();
    let consistent = |i: &[Option<World>]| {
        rel.iter().all(|&(agent, a, b)| match (i[a], i[b]) {
            (Some(u), Some(v)) => model.related(agent, u, v),
            _ => true,
        })
    };
    if assign(0, &allowed, &mut interp, &consistent) {
        Some(labels.iter().zip(interp).map(|(&l, w)| (l, w.unwrap())).collect())
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountermodelError {
    #[error("the sequent is not stable")]
    NotStable,
    #[error("label {0} does not occur in the sequent")]
    UnknownLabel(Label),
    #[error("counter-models are extracted for agent 1 only, found agent {0}")]
    MultiAgent(Agent),
}

/// The model of a stable single-agent sequent: one world per label, `R_1`
/// relating labels in the same choice-tree, and `p` true exactly where
/// `p̄` occurs. Returns the model with the identity interpretation.
pub fn extract_countermodel(
    stable: &LabelledSequent,
    goal: Label,
    n: u32,
) -> Result<(Model, Interpretation), CountermodelError> {
    if stable.max_agent() > 1 {
        return Err(CountermodelError::MultiAgent(stable.max_agent()));
    }
    if !stable.has_label(goal) {
        return Err(CountermodelError::UnknownLabel(goal));
    }
    if !is_stable(stable, n) {
        return Err(CountermodelError::NotStable);
    }
    let mut model = Model { worlds: stable.labels().into_iter().map(|l| l.0).collect(), ..Default::default() };
    let mut r1 = BTreeSet::new();
    for class in same_component(stable, 1) {
        for &u in &class {
            for &v in &class {
                r1.insert((u.0, v.0));
            }
        }
    }
    model.rel.insert(1, r1);
    for lf in &stable.forms {
        for p in lf.formula.atoms() {
            model.val.entry(p.to_string()).or_default();
        }
        if let Formula::NegAtom(p) = &lf.formula {
            model.val.entry(p.to_string()).or_default().insert(lf.label.0);
        }
    }
    let interp = stable.labels().into_iter().map(|l| (l, l.0)).collect();
    Ok((model, interp))
}

//! Proof search for the single-agent logics `Ldm_n^1`.
//!
//! The search runs over the refined calculus. Each loop iteration applies
//! either a linear step (one premise, added to the current sequent in place)
//! or a branching step (∧ or APC), which recurses into every premise.
//! A provable goal yields a checked-shape [`Derivation`]; an unprovable one
//! yields the stable sequent the search got stuck on.
//!
//! Within one sequent the candidates are examined by ascending label and
//! then in insertion order, so the search is deterministic.

mod stability;

pub use stability::{
    is_agbox_realized, is_agdia_propagated, is_box_realized, is_dia_propagated, is_n_choice_consistent,
    is_saturated, is_stable,
};

use std::sync::Arc;

use thiserror::Error;

use crate::calculus::{CalculusConfig, Derivation, Mode, Principal, RuleTag};
use crate::formula::{box_occurrences, print, Agent, AgentCount, Formula};
use crate::sequent::{choice_trees, Label, LabelledSequent, RelAtom};
use stability::TreeIndex;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchLimits {
    /// Total rule applications across all branches.
    pub max_steps: Option<u64>,
    /// Labels in any single sequent.
    pub max_labels: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProverConfig {
    /// Choice bound; 0 means unlimited choices.
    pub n: u32,
    pub limits: SearchLimits,
    /// Abort instead of recording when a structural bound is exceeded.
    pub strict_bounds: bool,
}

impl ProverConfig {
    pub fn new(n: u32) -> Self {
        ProverConfig { n, ..Default::default() }
    }

    /// The calculus the emitted derivations belong to.
    pub fn calculus(&self) -> CalculusConfig {
        CalculusConfig { m: AgentCount::ONE, n: self.n, mode: Mode::Refined }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub steps: u64,
    /// Applications per instruction, indexed 1..=8 (index 0 unused).
    pub per_instruction: [u64; 9],
    pub apc_applications: u64,
    pub max_labels: usize,
    pub max_relations: usize,
    /// `1 + #□ + #[1]` occurrences in the goal.
    pub label_bound: usize,
    /// `(1 + #□)(1 + #[1])`.
    pub product_label_bound: usize,
    /// Sequents seen with more labels than `label_bound`.
    pub label_bound_violations: u64,
    pub product_label_bound_violations: u64,
    /// APC premises whose choice-tree count is not one less than the conclusion's.
    pub apc_count_violations: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofSearchResult {
    Provable(Derivation),
    /// The stable sequent reached on the first open branch.
    Unprovable(LabelledSequent),
}

impl ProofSearchResult {
    pub fn is_provable(&self) -> bool {
        matches!(self, ProofSearchResult::Provable(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    pub result: ProofSearchResult,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProveError {
    #[error("agent {0} occurs in the goal, but the decision procedure handles agent 1 only")]
    MultiAgent(Agent),
    #[error("internal error: search produced a non-forestlike sequent: {0}")]
    NotForestlike(Box<LabelledSequent>),
    #[error("internal error: no instruction applies to the unstable sequent {0}")]
    Stuck(Box<LabelledSequent>),
    #[error("internal error: {0}")]
    BoundExceeded(String),
    #[error("search limit reached: {0}")]
    LimitReached(String),
}

/// The root label of every search.
pub const ROOT: Label = Label(0);

pub fn prove(cfg: &ProverConfig, goal: &Formula) -> Result<SearchOutcome, ProveError> {
    let agent = goal.max_agent();
    if agent > 1 {
        return Err(ProveError::MultiAgent(agent));
    }
    let (boxes, ag_boxes) = box_occurrences(goal);
    let mut search = Search {
        cfg: *cfg,
        stats: SearchStats {
            label_bound: 1 + boxes + ag_boxes,
            product_label_bound: (1 + boxes) * (1 + ag_boxes),
            ..Default::default()
        },
    };
    let result = match search.run(LabelledSequent::singleton(ROOT, goal.clone()))? {
        Branch::Closed(d) => ProofSearchResult::Provable(d),
        Branch::Open(s) => ProofSearchResult::Unprovable(s),
    };
    Ok(SearchOutcome { result, stats: search.stats })
}

/// Shorthand for `prove(&ProverConfig::new(n), goal)`.
pub fn is_provable(n: u32, goal: &Formula) -> Result<bool, ProveError> {
    Ok(prove(&ProverConfig::new(n), goal)?.result.is_provable())
}

enum Branch {
    Closed(Derivation),
    Open(LabelledSequent),
}

#[derive(Debug)]
enum Step {
    Id(Label, Arc<str>),
    Or(Label, Formula),
    And(Label, Formula),
    Prop(Label, Formula, Label),
    Dia(Label, Formula, Label),
    AgBox(Label, Formula),
    Box(Label, Formula),
    Apc(Vec<Label>),
}

fn body(f: &Formula) -> &Formula {
    match f {
        Formula::Box(b) | Formula::Dia(b) | Formula::AgBox(_, b) | Formula::AgDia(_, b) => b,
        _ => unreachable!("not a modal formula: {}", print(f)),
    }
}

fn find_step(s: &LabelledSequent, n: u32) -> Option<Step> {
    let labels = s.labels();
    for lf in &s.forms {
        if let Formula::Atom(p) = &lf.formula {
            if s.contains(lf.label, &Formula::NegAtom(p.clone())) {
                return Some(Step::Id(lf.label, p.clone()));
            }
        }
    }
    for &w in &labels {
        for f in s.formulas_at(w) {
            if let Formula::Or(l, r) = f {
                if !s.contains(w, l) || !s.contains(w, r) {
                    return Some(Step::Or(w, f.clone()));
                }
            }
        }
        for f in s.formulas_at(w) {
            if let Formula::And(l, r) = f {
                if !s.contains(w, l) && !s.contains(w, r) {
                    return Some(Step::And(w, f.clone()));
                }
            }
        }
    }
    let trees = TreeIndex::new(s);
    for &w in &labels {
        for f in s.formulas_at(w) {
            if let Formula::AgDia(1, b) = f {
                if let Some(&u) = trees.members(w).iter().find(|&&u| !s.contains(u, b)) {
                    return Some(Step::Prop(w, f.clone(), u));
                }
            }
        }
    }
    for &w in &labels {
        for f in s.formulas_at(w) {
            if let Formula::Dia(b) = f {
                if let Some(&u) = labels.iter().find(|&&u| !s.contains(u, b)) {
                    return Some(Step::Dia(w, f.clone(), u));
                }
            }
        }
    }
    for &w in &labels {
        for f in s.formulas_at(w) {
            if let Formula::AgBox(1, b) = f {
                if !trees.members(w).iter().any(|&u| s.contains(u, b)) {
                    return Some(Step::AgBox(w, f.clone()));
                }
            }
        }
    }
    for &w in &labels {
        for f in s.formulas_at(w) {
            if let Formula::Box(b) = f {
                if !labels.iter().any(|&u| s.contains(u, b)) {
                    return Some(Step::Box(w, f.clone()));
                }
            }
        }
    }
    if n > 0 && trees.count() > n as usize {
        let forest = choice_trees(s).ok()?;
        let mut roots: Vec<Label> = forest.roots().collect();
        roots.sort();
        roots.truncate(n as usize + 1);
        return Some(Step::Apc(roots));
    }
    None
}

struct Search {
    cfg: ProverConfig,
    stats: SearchStats,
}

/// A linear inference whose premise is the next entry (or the final node).
struct Link {
    conclusion: LabelledSequent,
    rule: RuleTag,
    principal: Principal,
}

fn close(chain: Vec<Link>, top: Derivation) -> Derivation {
    chain.into_iter().rev().fold(top, |premise, link| Derivation {
        conclusion: link.conclusion,
        rule: link.rule,
        principal: link.principal,
        premises: vec![premise],
    })
}

impl Search {
    fn observe(&mut self, instruction: usize) -> Result<(), ProveError> {
        self.stats.steps += 1;
        self.stats.per_instruction[instruction] += 1;
        if let Some(max) = self.cfg.limits.max_steps {
            if self.stats.steps > max {
                return Err(ProveError::LimitReached(format!("more than {max} steps")));
            }
        }
        Ok(())
    }

    fn enter(&mut self, s: &LabelledSequent) -> Result<(), ProveError> {
        if !s.is_forestlike() {
            return Err(ProveError::NotForestlike(Box::new(s.clone())));
        }
        let k = s.labels().len();
        self.stats.max_labels = self.stats.max_labels.max(k);
        self.stats.max_relations = self.stats.max_relations.max(s.rel.len());
        if k > self.stats.label_bound {
            self.stats.label_bound_violations += 1;
            if self.cfg.strict_bounds {
                return Err(ProveError::BoundExceeded(format!(
                    "{k} labels exceed the bound {}",
                    self.stats.label_bound
                )));
            }
        }
        if k > self.stats.product_label_bound {
            self.stats.product_label_bound_violations += 1;
        }
        if let Some(max) = self.cfg.limits.max_labels {
            if k > max {
                return Err(ProveError::LimitReached(format!("more than {max} labels")));
            }
        }
        Ok(())
    }

    fn run(&mut self, mut s: LabelledSequent) -> Result<Branch, ProveError> {
        let mut chain: Vec<Link> = Vec::new();
        loop {
            self.enter(&s)?;
            // Testing stability after the instructions is equivalent to
            // testing it first: a stable sequent enables none of them.
            let Some(step) = find_step(&s, self.cfg.n) else {
                return if is_stable(&s, self.cfg.n) {
                    Ok(Branch::Open(s))
                } else {
                    Err(ProveError::Stuck(Box::new(s)))
                };
            };
            match step {
                Step::Id(w, p) => {
                    self.observe(1)?;
                    return Ok(Branch::Closed(close(chain, Derivation::leaf(s, w, &p))));
                }
                Step::And(w, f) => {
                    self.observe(3)?;
                    let Formula::And(l, r) = &f else { unreachable!() };
                    let mut premises = Vec::with_capacity(2);
                    for part in [l, r] {
                        match self.run(s.clone().with_formula(w, (**part).clone()))? {
                            Branch::Closed(d) => premises.push(d),
                            open => return Ok(open),
                        }
                    }
                    let node = Derivation {
                        conclusion: s,
                        rule: RuleTag::And,
                        principal: Principal::Connective { label: w, formula: f },
                        premises,
                    };
                    return Ok(Branch::Closed(close(chain, node)));
                }
                Step::Apc(roots) => {
                    self.observe(8)?;
                    self.stats.apc_applications += 1;
                    let before = TreeIndex::new(&s).count();
                    let mut premises = Vec::new();
                    for k in 0..roots.len() {
                        for j in k + 1..roots.len() {
                            let p = s.clone().with_rel(RelAtom::new(1, roots[k], roots[j]));
                            if TreeIndex::new(&p).count() + 1 != before {
                                self.stats.apc_count_violations += 1;
                                if self.cfg.strict_bounds {
                                    return Err(ProveError::BoundExceeded(
                                        "APC premise did not merge two choice-trees".into(),
                                    ));
                                }
                            }
                            match self.run(p)? {
                                Branch::Closed(d) => premises.push(d),
                                open => return Ok(open),
                            }
                        }
                    }
                    let node = Derivation {
                        conclusion: s,
                        rule: RuleTag::Apc(1),
                        principal: Principal::Apc { labels: roots },
                        premises,
                    };
                    return Ok(Branch::Closed(close(chain, node)));
                }
                Step::Or(w, f) => {
                    self.observe(3)?;
                    let Formula::Or(l, r) = &f else { unreachable!() };
                    let (l, r) = ((**l).clone(), (**r).clone());
                    chain.push(Link {
                        conclusion: s.clone(),
                        rule: RuleTag::Or,
                        principal: Principal::Connective { label: w, formula: f },
                    });
                    s.add_formula(w, l);
                    s.add_formula(w, r);
                }
                Step::Prop(w, f, u) | Step::Dia(w, f, u) => {
                    let (instruction, rule) =
                        if matches!(f, Formula::AgDia(..)) { (4, RuleTag::Prop(1)) } else { (5, RuleTag::Dia) };
                    self.observe(instruction)?;
                    let b = body(&f).clone();
                    chain.push(Link {
                        conclusion: s.clone(),
                        rule,
                        principal: Principal::Target { label: w, formula: f, target: u },
                    });
                    s.add_formula(u, b);
                }
                Step::AgBox(w, f) | Step::Box(w, f) => {
                    let agentive = matches!(f, Formula::AgBox(..));
                    let (instruction, rule) = if agentive { (6, RuleTag::AgBox(1)) } else { (7, RuleTag::Box) };
                    self.observe(instruction)?;
                    let v = s.fresh_label();
                    let b = body(&f).clone();
                    chain.push(Link {
                        conclusion: s.clone(),
                        rule,
                        principal: Principal::Fresh { label: w, formula: f, fresh: v },
                    });
                    if agentive {
                        s.add_rel(RelAtom::new(1, w, v));
                    }
                    s.add_formula(v, b);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::check_derivation;
    use crate::formula::parse;

    fn f(s: &str) -> Formula {
        parse(s, AgentCount::ONE).unwrap()
    }

    fn outcome(n: u32, s: &str) -> SearchOutcome {
        prove(&ProverConfig::new(n), &f(s)).unwrap()
    }

    fn assert_proves(n: u32, s: &str) {
        let out = outcome(n, s);
        let ProofSearchResult::Provable(d) = &out.result else { panic!("{s} not proved for n={n}") };
        assert_eq!(check_derivation(&ProverConfig::new(n).calculus(), d), Ok(()), "{s}");
    }

    fn assert_refutes(n: u32, s: &str) {
        let out = outcome(n, s);
        let ProofSearchResult::Unprovable(st) = &out.result else { panic!("{s} proved for n={n}") };
        assert!(is_stable(st, n));
        assert!(st.contains(ROOT, &f(s)));
    }

    #[test]
    fn propositional() {
        assert_proves(0, "p | ~p");
        assert_proves(0, "(p -> q) -> ~q -> ~p");
        assert_refutes(0, "p | q");
        assert_refutes(0, "p");
    }

    #[test]
    fn modal_basics() {
        assert_proves(0, "box p -> p");
        assert_proves(0, "[1] p -> p");
        assert_proves(0, "box p -> [1] p");
        assert_proves(0, "dia [1] p -> box dia p");
        assert_refutes(0, "p -> box p");
        assert_refutes(0, "[1] p -> box p");
    }

    #[test]
    fn choice_bounds() {
        assert_refutes(0, "box <1> ~p | p");
        assert_proves(1, "box <1> ~p | p");
        assert_proves(1, "dia [1] p -> p");
        assert_refutes(2, "dia [1] p -> p");
        let apc2 = "dia [1] p & dia (~p & [1] q) -> p | q";
        assert_refutes(3, apc2);
        assert_proves(2, apc2);
        let out = outcome(2, apc2);
        assert!(out.stats.apc_applications > 0);
        assert_eq!(out.stats.apc_count_violations, 0);
    }

    #[test]
    fn multi_agent_goal_is_rejected() {
        let g = parse("[2] p", AgentCount::new(2).unwrap()).unwrap();
        assert_eq!(prove(&ProverConfig::new(0), &g), Err(ProveError::MultiAgent(2)));
    }

    #[test]
    fn limits_abort_the_search() {
        let cfg = ProverConfig { limits: SearchLimits { max_steps: Some(2), max_labels: None }, ..ProverConfig::new(0) };
        assert!(matches!(prove(&cfg, &f("box dia p | dia box ~p")), Err(ProveError::LimitReached(_))));
    }

    #[test]
    fn search_is_deterministic() {
        let a = outcome(1, "dia [1] p -> p");
        let b = outcome(1, "dia [1] p -> p");
        assert_eq!(a, b);
    }

    #[test]
    fn label_bound_statistics() {
        let out = outcome(0, "box dia [1] p");
        assert_eq!(out.stats.label_bound, 3);
        assert_eq!(out.stats.product_label_bound, 4);
        assert_eq!(out.stats.max_labels, 4);
        assert!(out.stats.label_bound_violations > 0);
        assert_eq!(out.stats.product_label_bound_violations, 0);
        let strict = ProverConfig { strict_bounds: true, ..ProverConfig::new(0) };
        assert!(matches!(prove(&strict, &f("box dia [1] p")), Err(ProveError::BoundExceeded(_))));
    }
}

//! Rule schemata of the two labelled calculi and a derivation checker.
//!
//! [`Mode::G3`] is the calculus with the structural rules `refl_i`, `eucl_i`
//! and the `⟨i⟩` rule. [`Mode::Refined`] replaces those three by the
//! propagation rules `Pr_i`. Both contain `IOA` and, for `n > 0`, `APC_n^i`.
//! Principal occurrences are recorded in every node, so checking a node is a
//! direct comparison of its premises against the sequents the rule
//! prescribes.

mod certificate;

pub use certificate::{Certificate, CertificateError, NodeDoc, PrincipalDoc};

use std::fmt;

use thiserror::Error;

use crate::formula::{Agent, AgentCount, Formula};
use crate::propagation::side_condition_holds;
use crate::sequent::{Label, LabelledSequent, RelAtom};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    G3,
    Refined,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::G3 => "g3",
            Mode::Refined => "refined",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "g3" => Ok(Mode::G3),
            "refined" => Ok(Mode::Refined),
            other => Err(format!("unknown mode `{other}` (expected `g3` or `refined`)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CalculusConfig {
    pub m: AgentCount,
    /// Choice bound; 0 means the `APC` rule is absent.
    pub n: u32,
    pub mode: Mode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleTag {
    Id,
    And,
    Or,
    Box,
    Dia,
    AgBox(Agent),
    AgDia(Agent),
    Prop(Agent),
    Refl(Agent),
    Eucl(Agent),
    Ioa,
    Apc(Agent),
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleTag::Id => f.write_str("id"),
            RuleTag::And => f.write_str("and"),
            RuleTag::Or => f.write_str("or"),
            RuleTag::Box => f.write_str("box"),
            RuleTag::Dia => f.write_str("dia"),
            RuleTag::Ioa => f.write_str("ioa"),
            RuleTag::AgBox(i) => write!(f, "agbox({i})"),
            RuleTag::AgDia(i) => write!(f, "agdia({i})"),
            RuleTag::Prop(i) => write!(f, "pr({i})"),
            RuleTag::Refl(i) => write!(f, "refl({i})"),
            RuleTag::Eucl(i) => write!(f, "eucl({i})"),
            RuleTag::Apc(i) => write!(f, "apc({i})"),
        }
    }
}

impl std::str::FromStr for RuleTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let simple = match s {
            "id" => Some(RuleTag::Id),
            "and" => Some(RuleTag::And),
            "or" => Some(RuleTag::Or),
            "box" => Some(RuleTag::Box),
            "dia" => Some(RuleTag::Dia),
            "ioa" => Some(RuleTag::Ioa),
            _ => None,
        };
        if let Some(tag) = simple {
            return Ok(tag);
        }
        let (name, rest) = s.split_once('(').ok_or_else(|| format!("unknown rule `{s}`"))?;
        let agent: Agent = rest
            .strip_suffix(')')
            .and_then(|a| a.parse().ok())
            .ok_or_else(|| format!("malformed agent index in rule `{s}`"))?;
        match name {
            "agbox" => Ok(RuleTag::AgBox(agent)),
            "agdia" => Ok(RuleTag::AgDia(agent)),
            "pr" => Ok(RuleTag::Prop(agent)),
            "refl" => Ok(RuleTag::Refl(agent)),
            "eucl" => Ok(RuleTag::Eucl(agent)),
            "apc" => Ok(RuleTag::Apc(agent)),
            _ => Err(format!("unknown rule `{s}`")),
        }
    }
}

impl RuleTag {
    pub fn agent(self) -> Option<Agent> {
        match self {
            RuleTag::AgBox(i)
            | RuleTag::AgDia(i)
            | RuleTag::Prop(i)
            | RuleTag::Refl(i)
            | RuleTag::Eucl(i)
            | RuleTag::Apc(i) => Some(i),
            _ => None,
        }
    }
}

/// The active part of an inference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Principal {
    /// `w:p, w:p̄` for the atom `p`.
    Id { label: Label, atom: String },
    /// `w:φ∧ψ` or `w:φ∨ψ`.
    Connective { label: Label, formula: Formula },
    /// `w:□φ` or `w:[i]φ` with eigenvariable `fresh`.
    Fresh { label: Label, formula: Formula, fresh: Label },
    /// `w:◇φ`, `w:⟨i⟩φ` or a propagation, adding the body at `target`.
    Target { label: Label, formula: Formula, target: Label },
    /// `refl_i` adds `R_i ww`.
    Refl { label: Label },
    /// `eucl_i` adds `R_i uv` from `R_i wu, R_i wv`.
    Eucl { w: Label, u: Label, v: Label },
    /// `IOA` adds `R_1 u_1 v, …, R_m u_m v`.
    Ioa { sources: Vec<Label>, fresh: Label },
    /// `APC_n^i` over `w_0, …, w_n`.
    Apc { labels: Vec<Label> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub conclusion: LabelledSequent,
    pub rule: RuleTag,
    pub principal: Principal,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn leaf(conclusion: LabelledSequent, label: Label, atom: &str) -> Self {
        Derivation {
            conclusion,
            rule: RuleTag::Id,
            principal: Principal::Id { label, atom: atom.to_string() },
            premises: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(Derivation::node_count).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Derivation::height).max().unwrap_or(0)
    }

    /// Pre-order traversal with the path of each node.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&[usize], &'a Derivation)) {
        fn go<'a>(d: &'a Derivation, path: &mut Vec<usize>, f: &mut impl FnMut(&[usize], &'a Derivation)) {
            f(path, d);
            for (i, p) in d.premises.iter().enumerate() {
                path.push(i);
                go(p, path, f);
                path.pop();
            }
        }
        go(self, &mut Vec::new(), f);
    }

    pub fn node_at_mut(&mut self, path: &[usize]) -> Option<&mut Derivation> {
        let mut node = self;
        for &i in path {
            node = node.premises.get_mut(i)?;
        }
        Some(node)
    }

    /// Indented rule tree, one node per line.
    pub fn pretty(&self) -> String {
        let mut out = String::new();
        fn go(d: &Derivation, depth: usize, out: &mut String) {
            out.push_str(&"  ".repeat(depth));
            out.push_str(&format!("({}) {}\n", d.rule, d.conclusion));
            for p in &d.premises {
                go(p, depth + 1, out);
            }
        }
        go(self, 0, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferenceError {
    #[error("rule ({rule}) is not part of the {mode} calculus")]
    RuleNotInCalculus { rule: RuleTag, mode: Mode },
    #[error("agent {agent} is outside 1..={m}")]
    AgentOutOfRange { agent: Agent, m: u32 },
    #[error("principal data does not fit rule ({0})")]
    PrincipalMismatch(RuleTag),
    #[error("principal {0} is not in the conclusion")]
    MissingPrincipal(String),
    #[error("principal formula {0} has the wrong shape for this rule")]
    WrongShape(String),
    #[error("expected {expected} premise(s), found {found}")]
    PremiseCount { expected: usize, found: usize },
    #[error("premise {index} is not the sequent the rule prescribes")]
    PremiseMismatch { index: usize },
    #[error("eigenvariable {0} occurs in the conclusion")]
    Eigenvariable(Label),
    #[error("side condition fails: no <{agent}>-path from {from} to {to}")]
    SideCondition { agent: Agent, from: Label, to: Label },
    #[error("label {0} does not occur in the conclusion")]
    UnknownLabel(Label),
    #[error("relational atom {0} is not in the conclusion")]
    MissingRelation(RelAtom),
    #[error("APC rule needs n + 1 = {expected} labels, found {found}")]
    ApcLabels { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("node {}: {error}", display_path(path))]
pub struct CheckError {
    /// Premise indices from the root to the offending node.
    pub path: Vec<usize>,
    pub error: InferenceError,
}

fn display_path(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter().map(usize::to_string).collect::<Vec<_>>().join(".")
    }
}

fn require_agent(cfg: &CalculusConfig, agent: Agent) -> Result<(), InferenceError> {
    if cfg.m.contains(agent) {
        Ok(())
    } else {
        Err(InferenceError::AgentOutOfRange { agent, m: cfg.m.get() })
    }
}

fn require_formula(s: &LabelledSequent, label: Label, f: &Formula) -> Result<(), InferenceError> {
    if s.contains(label, f) {
        Ok(())
    } else {
        Err(InferenceError::MissingPrincipal(format!("{label}:{f}")))
    }
}

fn require_fresh(s: &LabelledSequent, v: Label) -> Result<(), InferenceError> {
    if s.has_label(v) {
        Err(InferenceError::Eigenvariable(v))
    } else {
        Ok(())
    }
}

fn require_premises(node: &Derivation, expected: usize) -> Result<(), InferenceError> {
    if node.premises.len() == expected {
        Ok(())
    } else {
        Err(InferenceError::PremiseCount { expected, found: node.premises.len() })
    }
}

fn require_single(node: &Derivation, expected: &LabelledSequent) -> Result<(), InferenceError> {
    require_premises(node, 1)?;
    if &node.premises[0].conclusion == expected {
        Ok(())
    } else {
        Err(InferenceError::PremiseMismatch { index: 0 })
    }
}

/// Match premises against the prescribed sequents regardless of order.
fn require_all(node: &Derivation, expected: Vec<LabelledSequent>) -> Result<(), InferenceError> {
    require_premises(node, expected.len())?;
    let mut unused: Vec<Option<LabelledSequent>> = expected.into_iter().map(Some).collect();
    for (index, p) in node.premises.iter().enumerate() {
        let slot = unused
            .iter_mut()
            .find(|e| e.as_ref() == Some(&p.conclusion))
            .ok_or(InferenceError::PremiseMismatch { index })?;
        *slot = None;
    }
    Ok(())
}

fn extended(s: &LabelledSequent, rel: &[RelAtom], forms: &[(Label, Formula)]) -> LabelledSequent {
    let mut out = s.clone();
    for r in rel {
        out.add_rel(*r);
    }
    for (l, f) in forms {
        out.add_formula(*l, f.clone());
    }
    out
}

/// Check that `node` is a correct instance of its rule, given its premises'
/// conclusions. Premise subtrees are not inspected.
pub fn check_inference(cfg: &CalculusConfig, node: &Derivation) -> Result<(), InferenceError> {
    let c = &node.conclusion;
    let rule = node.rule;
    if let Some(i) = rule.agent() {
        require_agent(cfg, i)?;
    }
    let allowed = match (rule, cfg.mode) {
        (RuleTag::AgDia(_) | RuleTag::Refl(_) | RuleTag::Eucl(_), Mode::Refined) => false,
        (RuleTag::Prop(_), Mode::G3) => false,
        (RuleTag::Apc(_), _) => cfg.n > 0,
        _ => true,
    };
    if !allowed {
        return Err(InferenceError::RuleNotInCalculus { rule, mode: cfg.mode });
    }
    let mismatch = || InferenceError::PrincipalMismatch(rule);
    let shape = |label: Label, f: &Formula| InferenceError::WrongShape(format!("{label}:{f}"));

    match (rule, &node.principal) {
        (RuleTag::Id, Principal::Id { label, atom }) => {
            require_premises(node, 0)?;
            require_formula(c, *label, &Formula::atom(atom))?;
            require_formula(c, *label, &Formula::neg_atom(atom))
        }
        (RuleTag::And, Principal::Connective { label, formula }) => {
            require_formula(c, *label, formula)?;
            let Formula::And(l, r) = formula else { return Err(shape(*label, formula)) };
            require_all(
                node,
                vec![
                    extended(c, &[], &[(*label, (**l).clone())]),
                    extended(c, &[], &[(*label, (**r).clone())]),
                ],
            )
        }
        (RuleTag::Or, Principal::Connective { label, formula }) => {
            require_formula(c, *label, formula)?;
            let Formula::Or(l, r) = formula else { return Err(shape(*label, formula)) };
            require_single(node, &extended(c, &[], &[(*label, (**l).clone()), (*label, (**r).clone())]))
        }
        (RuleTag::Box, Principal::Fresh { label, formula, fresh }) => {
            require_formula(c, *label, formula)?;
            let Formula::Box(body) = formula else { return Err(shape(*label, formula)) };
            require_fresh(c, *fresh)?;
            require_single(node, &extended(c, &[], &[(*fresh, (**body).clone())]))
        }
        (RuleTag::AgBox(i), Principal::Fresh { label, formula, fresh }) => {
            require_formula(c, *label, formula)?;
            let Formula::AgBox(j, body) = formula else { return Err(shape(*label, formula)) };
            if *j != i {
                return Err(shape(*label, formula));
            }
            require_fresh(c, *fresh)?;
            let mut expected = extended(c, &[RelAtom::new(i, *label, *fresh)], &[(*fresh, (**body).clone())]);
            if cfg.mode == Mode::G3 {
                expected.remove_formula(*label, formula);
            }
            require_single(node, &expected)
        }
        (RuleTag::Dia, Principal::Target { label, formula, target }) => {
            require_formula(c, *label, formula)?;
            let Formula::Dia(body) = formula else { return Err(shape(*label, formula)) };
            if !c.has_label(*target) {
                return Err(InferenceError::UnknownLabel(*target));
            }
            require_single(node, &extended(c, &[], &[(*target, (**body).clone())]))
        }
        (RuleTag::AgDia(i) | RuleTag::Prop(i), Principal::Target { label, formula, target }) => {
            require_formula(c, *label, formula)?;
            let Formula::AgDia(j, body) = formula else { return Err(shape(*label, formula)) };
            if *j != i {
                return Err(shape(*label, formula));
            }
            if let RuleTag::AgDia(_) = rule {
                let edge = RelAtom::new(i, *label, *target);
                if !c.contains_rel(&edge) {
                    return Err(InferenceError::MissingRelation(edge));
                }
            } else {
                let holds = side_condition_holds(c, i, *label, *target)
                    .map_err(|e| InferenceError::UnknownLabel(e.0))?;
                if !holds {
                    return Err(InferenceError::SideCondition { agent: i, from: *label, to: *target });
                }
            }
            require_single(node, &extended(c, &[], &[(*target, (**body).clone())]))
        }
        (RuleTag::Refl(i), Principal::Refl { label }) => {
            require_single(node, &extended(c, &[RelAtom::new(i, *label, *label)], &[]))
        }
        (RuleTag::Eucl(i), Principal::Eucl { w, u, v }) => {
            for atom in [RelAtom::new(i, *w, *u), RelAtom::new(i, *w, *v)] {
                if !c.contains_rel(&atom) {
                    return Err(InferenceError::MissingRelation(atom));
                }
            }
            require_single(node, &extended(c, &[RelAtom::new(i, *u, *v)], &[]))
        }
        (RuleTag::Ioa, Principal::Ioa { sources, fresh }) => {
            if sources.len() != cfg.m.get() as usize {
                return Err(mismatch());
            }
            require_fresh(c, *fresh)?;
            let atoms: Vec<RelAtom> = cfg
                .m
                .agents()
                .zip(sources)
                .map(|(i, &u)| RelAtom::new(i, u, *fresh))
                .collect();
            require_single(node, &extended(c, &atoms, &[]))
        }
        (RuleTag::Apc(i), Principal::Apc { labels }) => {
            let n = cfg.n as usize;
            if labels.len() != n + 1 {
                return Err(InferenceError::ApcLabels { expected: n + 1, found: labels.len() });
            }
            let mut expected = Vec::with_capacity(n * (n + 1) / 2);
            for k in 0..n {
                for j in k + 1..=n {
                    expected.push(extended(c, &[RelAtom::new(i, labels[k], labels[j])], &[]));
                }
            }
            require_all(node, expected)
        }
        _ => Err(mismatch()),
    }
}

/// Check every node of `d`, reporting the first failure in pre-order.
pub fn check_derivation(cfg: &CalculusConfig, d: &Derivation) -> Result<(), CheckError> {
    // Explicit stack: prover derivations can be deep.
    let mut stack: Vec<(Vec<usize>, &Derivation)> = vec![(Vec::new(), d)];
    while let Some((path, node)) = stack.pop() {
        check_inference(cfg, node).map_err(|error| CheckError { path: path.clone(), error })?;
        for (i, p) in node.premises.iter().enumerate().rev() {
            let mut child = path.clone();
            child.push(i);
            stack.push((child, p));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn f(s: &str) -> Formula {
        parse(s, AgentCount::new(2).unwrap()).unwrap()
    }

    fn refined(n: u32) -> CalculusConfig {
        CalculusConfig { m: AgentCount::ONE, n, mode: Mode::Refined }
    }

    fn g3(m: u32, n: u32) -> CalculusConfig {
        CalculusConfig { m: AgentCount::new(m).unwrap(), n, mode: Mode::G3 }
    }

    const W0: Label = Label(0);
    const W1: Label = Label(1);
    const W2: Label = Label(2);

    fn clash(s: LabelledSequent, at: Label) -> Derivation {
        Derivation::leaf(s, at, "p")
    }

    #[test]
    fn id_node_checks() {
        let s = LabelledSequent::new().with_formula(W0, f("p")).with_formula(W0, f("~p"));
        assert_eq!(check_inference(&refined(0), &clash(s.clone(), W0)), Ok(()));
        let wrong_label = clash(s, W1);
        assert!(matches!(
            check_inference(&refined(0), &wrong_label),
            Err(InferenceError::MissingPrincipal(_))
        ));
    }

    fn apc_node(s: &LabelledSequent, n: usize, pairs: &[(u32, u32)]) -> Derivation {
        Derivation {
            conclusion: s.clone(),
            rule: RuleTag::Apc(1),
            principal: Principal::Apc { labels: (0..=n as u32).map(Label).collect() },
            premises: pairs
                .iter()
                .map(|&(a, b)| {
                    let p = s.clone().with_rel(RelAtom::new(1, Label(a), Label(b)));
                    Derivation::leaf(p, W0, "p")
                })
                .collect(),
        }
    }

    #[test]
    fn apc_premise_counts() {
        let s = LabelledSequent::new()
            .with_formula(W0, f("q"))
            .with_formula(W1, f("q"))
            .with_formula(W2, f("q"));
        assert_eq!(check_inference(&refined(1), &apc_node(&s, 1, &[(0, 1)])), Ok(()));
        assert_eq!(check_inference(&refined(2), &apc_node(&s, 2, &[(0, 1), (0, 2), (1, 2)])), Ok(()));
        // premise order does not matter
        assert_eq!(check_inference(&refined(2), &apc_node(&s, 2, &[(1, 2), (0, 1), (0, 2)])), Ok(()));
        assert_eq!(
            check_inference(&refined(2), &apc_node(&s, 2, &[(0, 1), (0, 2)])),
            Err(InferenceError::PremiseCount { expected: 3, found: 2 })
        );
        assert_eq!(
            check_inference(&refined(2), &apc_node(&s, 2, &[(0, 1), (0, 2), (0, 2)])),
            Err(InferenceError::PremiseMismatch { index: 2 })
        );
        assert!(matches!(
            check_inference(&refined(0), &apc_node(&s, 1, &[(0, 1)])),
            Err(InferenceError::RuleNotInCalculus { .. })
        ));
        assert!(matches!(
            check_inference(&refined(2), &apc_node(&s, 1, &[(0, 1)])),
            Err(InferenceError::ApcLabels { expected: 3, found: 2 })
        ));
    }

    /// `R1 wu, R2 uv, R1 vz, w:⟨1⟩p` from the propagation example.
    fn propagation_example() -> LabelledSequent {
        LabelledSequent::new()
            .with_rel(RelAtom::new(1, Label(0), Label(1)))
            .with_rel(RelAtom::new(2, Label(1), Label(2)))
            .with_rel(RelAtom::new(1, Label(2), Label(3)))
            .with_formula(Label(0), f("<1> p"))
    }

    fn propagate(s: &LabelledSequent, rule: RuleTag, target: Label) -> Derivation {
        let premise = s.clone().with_formula(target, f("p"));
        Derivation {
            conclusion: s.clone(),
            rule,
            principal: Principal::Target { label: Label(0), formula: f("<1> p"), target },
            premises: vec![Derivation::leaf(premise, target, "p")],
        }
    }

    #[test]
    fn propagation_side_condition() {
        let cfg = CalculusConfig { m: AgentCount::new(2).unwrap(), n: 0, mode: Mode::Refined };
        let s = propagation_example();
        assert_eq!(check_inference(&cfg, &propagate(&s, RuleTag::Prop(1), Label(1))), Ok(()));
        let err = check_inference(&cfg, &propagate(&s, RuleTag::Prop(1), Label(3))).unwrap_err();
        assert_eq!(err, InferenceError::SideCondition { agent: 1, from: Label(0), to: Label(3) });
        assert!(err.to_string().contains("side condition fails"));
    }

    #[test]
    fn g3_diamond_rule_is_a_propagation_instance() {
        let s = propagation_example();
        let g3_node = propagate(&s, RuleTag::AgDia(1), Label(1));
        assert_eq!(check_inference(&g3(2, 0), &g3_node), Ok(()));
        let as_prop = Derivation { rule: RuleTag::Prop(1), ..g3_node.clone() };
        let cfg = CalculusConfig { m: AgentCount::new(2).unwrap(), n: 0, mode: Mode::Refined };
        assert_eq!(check_inference(&cfg, &as_prop), Ok(()));
        // (⟨i⟩) needs the edge itself, not just a path
        assert!(matches!(
            check_inference(&g3(2, 0), &propagate(&s, RuleTag::AgDia(1), Label(3))),
            Err(InferenceError::MissingRelation(_))
        ));
        assert!(matches!(
            check_inference(&cfg, &g3_node),
            Err(InferenceError::RuleNotInCalculus { .. })
        ));
    }

    #[test]
    fn agent_box_retains_principal_only_in_refined_mode() {
        let s = LabelledSequent::singleton(W0, f("[1] p"));
        let keep = s.clone().with_rel(RelAtom::new(1, W0, W1)).with_formula(W1, f("p"));
        let mut drop = keep.clone();
        drop.remove_formula(W0, &f("[1] p"));
        let node = |premise: LabelledSequent| Derivation {
            conclusion: s.clone(),
            rule: RuleTag::AgBox(1),
            principal: Principal::Fresh { label: W0, formula: f("[1] p"), fresh: W1 },
            premises: vec![Derivation::leaf(premise, W1, "p")],
        };
        assert_eq!(check_inference(&refined(0), &node(keep.clone())), Ok(()));
        assert!(check_inference(&refined(0), &node(drop.clone())).is_err());
        assert_eq!(check_inference(&g3(1, 0), &node(drop)), Ok(()));
        assert!(check_inference(&g3(1, 0), &node(keep)).is_err());
    }

    #[test]
    fn eigenvariable_must_be_fresh() {
        let s = LabelledSequent::new().with_formula(W0, f("box p")).with_formula(W1, f("q"));
        let node = Derivation {
            conclusion: s.clone(),
            rule: RuleTag::Box,
            principal: Principal::Fresh { label: W0, formula: f("box p"), fresh: W1 },
            premises: vec![Derivation::leaf(s.clone().with_formula(W1, f("p")), W1, "p")],
        };
        assert_eq!(check_inference(&refined(0), &node), Err(InferenceError::Eigenvariable(W1)));
    }

    #[test]
    fn structural_rules_in_g3() {
        let s = LabelledSequent::new()
            .with_rel(RelAtom::new(1, W0, W1))
            .with_formula(W0, f("p"));
        let refl = Derivation {
            conclusion: s.clone(),
            rule: RuleTag::Refl(1),
            principal: Principal::Refl { label: W0 },
            premises: vec![Derivation::leaf(s.clone().with_rel(RelAtom::new(1, W0, W0)), W0, "p")],
        };
        assert_eq!(check_inference(&g3(1, 0), &refl), Ok(()));
        let eucl = Derivation {
            conclusion: s.clone(),
            rule: RuleTag::Eucl(1),
            principal: Principal::Eucl { w: W0, u: W1, v: W1 },
            premises: vec![Derivation::leaf(s.clone().with_rel(RelAtom::new(1, W1, W1)), W0, "p")],
        };
        assert_eq!(check_inference(&g3(1, 0), &eucl), Ok(()));
        let bad = Derivation { principal: Principal::Eucl { w: W1, u: W0, v: W0 }, ..eucl };
        assert!(matches!(check_inference(&g3(1, 0), &bad), Err(InferenceError::MissingRelation(_))));
    }

    #[test]
    fn principal_must_match_rule_kind() {
        let s = LabelledSequent::singleton(W0, f("p | q"));
        let node = Derivation {
            conclusion: s.clone(),
            rule: RuleTag::And,
            principal: Principal::Connective { label: W0, formula: f("p | q") },
            premises: vec![],
        };
        assert!(matches!(check_inference(&refined(0), &node), Err(InferenceError::WrongShape(_))));
        let node = Derivation { principal: Principal::Refl { label: W0 }, ..node };
        assert_eq!(check_inference(&refined(0), &node), Err(InferenceError::PrincipalMismatch(RuleTag::And)));
    }

    #[test]
    fn derivation_errors_report_paths() {
        let s = LabelledSequent::singleton(W0, f("p | ~p"));
        let premise = s.clone().with_formula(W0, f("p")).with_formula(W0, f("~p"));
        let good = Derivation {
            conclusion: s.clone(),
            rule: RuleTag::Or,
            principal: Principal::Connective { label: W0, formula: f("p | ~p") },
            premises: vec![Derivation::leaf(premise.clone(), W0, "p")],
        };
        assert_eq!(check_derivation(&refined(0), &good), Ok(()));
        let mut bad = good.clone();
        bad.premises[0].principal = Principal::Id { label: W0, atom: "q".into() };
        let err = check_derivation(&refined(0), &bad).unwrap_err();
        assert_eq!(err.path, vec![0]);
        assert!(err.to_string().starts_with("node 0:"));
    }

    #[test]
    fn rule_tags_round_trip_through_strings() {
        let tags = [
            RuleTag::Id,
            RuleTag::And,
            RuleTag::Or,
            RuleTag::Box,
            RuleTag::Dia,
            RuleTag::Ioa,
            RuleTag::AgBox(2),
            RuleTag::AgDia(1),
            RuleTag::Prop(3),
            RuleTag::Refl(1),
            RuleTag::Eucl(2),
            RuleTag::Apc(1),
        ];
        for t in tags {
            assert_eq!(t.to_string().parse::<RuleTag>(), Ok(t));
        }
        assert!("cut".parse::<RuleTag>().is_err());
        assert!("wk".parse::<RuleTag>().is_err());
        assert!("apc(x)".parse::<RuleTag>().is_err());
    }
}

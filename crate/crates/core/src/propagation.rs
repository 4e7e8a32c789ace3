//! Propagation automata and the side condition of the propagation rules.
//!
//! `P_Λ(w,u)` has the labels of `Λ` as states, `w` initial, `u` accepting,
//! and a pair of `⟨i⟩` transitions for every `R_i vv'`. The application
//! language `L_i` is `⟨i⟩*`, so `P_Λ(w,u) ∩ L_i ≠ ∅` reduces to reachability
//! of `u` from `w` along `⟨i⟩` transitions alone.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::formula::Agent;
use crate::sequent::{Label, LabelledSequent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("label {0} does not occur in the sequent")]
pub struct UnknownLabel(pub Label);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropagationAutomaton {
    /// Agents whose symbol `⟨i⟩` labels at least one transition.
    pub alphabet: BTreeSet<Agent>,
    pub states: BTreeSet<Label>,
    pub initial: Label,
    pub accepting: Label,
    /// `(v, i, v')` for `v --⟨i⟩--> v'`.
    pub transitions: BTreeSet<(Label, Agent, Label)>,
}

impl PropagationAutomaton {
    /// Whether the automaton accepts the string `⟨word[0]⟩⟨word[1]⟩…`.
    pub fn accepts(&self, word: &[Agent]) -> bool {
        let mut current = BTreeSet::from([self.initial]);
        for &sym in word {
            current = self
                .transitions
                .iter()
                .filter(|(v, i, _)| *i == sym && current.contains(v))
                .map(|&(_, _, to)| to)
                .collect();
            if current.is_empty() {
                return false;
            }
        }
        current.contains(&self.accepting)
    }

    /// Non-emptiness of the intersection with `L_i = ⟨i⟩*`.
    pub fn intersects_star(&self, agent: Agent) -> bool {
        let mut seen = BTreeSet::from([self.initial]);
        let mut queue = VecDeque::from([self.initial]);
        while let Some(v) = queue.pop_front() {
            if v == self.accepting {
                return true;
            }
            for &(from, i, to) in &self.transitions {
                if from == v && i == agent && seen.insert(to) {
                    queue.push_back(to);
                }
            }
        }
        false
    }
}

/// `P_Λ(w,u)`.
pub fn automaton_of(
    s: &LabelledSequent,
    w: Label,
    u: Label,
) -> Result<PropagationAutomaton, UnknownLabel> {
    let states = s.labels();
    for l in [w, u] {
        if !states.contains(&l) {
            return Err(UnknownLabel(l));
        }
    }
    let mut transitions = BTreeSet::new();
    for r in &s.rel {
        transitions.insert((r.from, r.agent, r.to));
        transitions.insert((r.to, r.agent, r.from));
    }
    Ok(PropagationAutomaton {
        alphabet: s.rel.iter().map(|r| r.agent).collect(),
        states,
        initial: w,
        accepting: u,
        transitions,
    })
}

fn agent_adjacency(s: &LabelledSequent, agent: Agent) -> BTreeMap<Label, Vec<Label>> {
    let mut adj: BTreeMap<Label, Vec<Label>> = BTreeMap::new();
    for r in s.rel.iter().filter(|r| r.agent == agent) {
        adj.entry(r.from).or_default().push(r.to);
        adj.entry(r.to).or_default().push(r.from);
    }
    adj
}

/// `P_Λ(w,u) ∩ L_i ≠ ∅`, computed by breadth-first search over the
/// `i`-labelled atoms without materialising the automaton.
pub fn side_condition_holds(
    s: &LabelledSequent,
    agent: Agent,
    w: Label,
    u: Label,
) -> Result<bool, UnknownLabel> {
    for l in [w, u] {
        if !s.has_label(l) {
            return Err(UnknownLabel(l));
        }
    }
    if w == u {
        return Ok(true);
    }
    let adj = agent_adjacency(s, agent);
    let mut seen = BTreeSet::from([w]);
    let mut queue = VecDeque::from([w]);
    while let Some(v) = queue.pop_front() {
        for &next in adj.get(&v).into_iter().flatten() {
            if next == u {
                return Ok(true);
            }
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    Ok(false)
}

/// Partition of `Lab(Λ)` into classes of mutual `⟨i⟩`-reachability,
/// ordered by smallest member.
pub fn same_component(s: &LabelledSequent, agent: Agent) -> Vec<BTreeSet<Label>> {
    let adj = agent_adjacency(s, agent);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for start in s.labels() {
        if !seen.insert(start) {
            continue;
        }
        let mut class = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &next in adj.get(&v).into_iter().flatten() {
                if seen.insert(next) {
                    class.insert(next);
                    queue.push_back(next);
                }
            }
        }
        out.push(class);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{AgentCount, Formula};
    use crate::sequent::RelAtom;
    use proptest::prelude::*;

    const W: Label = Label(0);
    const U: Label = Label(1);
    const V: Label = Label(2);
    const Z: Label = Label(3);

    /// `R1 wu, R2 uv, R1 vz, w:⟨1⟩φ`.
    fn propagation_example() -> LabelledSequent {
        let phi = crate::formula::parse("<1> p", AgentCount::new(2).unwrap()).unwrap();
        LabelledSequent::new()
            .with_rel(RelAtom::new(1, W, U))
            .with_rel(RelAtom::new(2, U, V))
            .with_rel(RelAtom::new(1, V, Z))
            .with_formula(W, phi)
    }

    #[test]
    fn automaton_has_bidirectional_transitions() {
        let a = automaton_of(&propagation_example(), W, Z).unwrap();
        assert_eq!(a.states.len(), 4);
        assert_eq!(
            a.transitions,
            BTreeSet::from([
                (W, 1, U),
                (U, 1, W),
                (U, 2, V),
                (V, 2, U),
                (V, 1, Z),
                (Z, 1, V),
            ])
        );
        let back = automaton_of(&propagation_example(), Z, W).unwrap();
        assert_eq!(a.transitions, back.transitions);
        assert!(a.accepts(&[1, 2, 1]));
        assert!(!a.accepts(&[1, 1, 1]));
    }

    #[test]
    fn empty_relational_part_has_no_transitions() {
        let s = LabelledSequent::singleton(W, Formula::atom("p"));
        let a = automaton_of(&s, W, W).unwrap();
        assert!(a.transitions.is_empty());
        assert!(a.accepts(&[]));
        assert_eq!(automaton_of(&s, W, U), Err(UnknownLabel(U)));
    }

    #[test]
    fn side_condition_on_worked_example() {
        let s = propagation_example();
        assert!(!side_condition_holds(&s, 1, W, Z).unwrap());
        assert!(side_condition_holds(&s, 1, W, U).unwrap());
        assert!(side_condition_holds(&s, 2, U, V).unwrap());
        for l in [W, U, V, Z] {
            assert!(side_condition_holds(&s, 1, l, l).unwrap());
        }
        assert_eq!(side_condition_holds(&s, 1, W, Label(9)), Err(UnknownLabel(Label(9))));
    }

    #[test]
    fn components_on_worked_example() {
        let s = propagation_example();
        assert_eq!(same_component(&s, 1), vec![BTreeSet::from([W, U]), BTreeSet::from([V, Z])]);
        let bare = LabelledSequent::new().with_formula(W, Formula::atom("p")).with_formula(U, Formula::atom("q"));
        assert_eq!(same_component(&bare, 1), vec![BTreeSet::from([W]), BTreeSet::from([U])]);
    }

    fn arb_sequent() -> impl Strategy<Value = LabelledSequent> {
        prop::collection::vec((1u32..=2, 0u32..5, 0u32..5), 0..7).prop_map(|atoms| {
            let mut s = LabelledSequent::new();
            for l in 0..5 {
                s.add_formula(Label(l), Formula::atom("p"));
            }
            for (i, a, b) in atoms {
                s.add_rel(RelAtom::new(i, Label(a), Label(b)));
            }
            s
        })
    }

    /// Every string in `⟨i⟩*` of length at most `|Lab(Λ)|`; longer witnesses
    /// can always be shortened by removing a cycle.
    fn brute_force_accepts_star(s: &LabelledSequent, i: Agent, w: Label, u: Label) -> bool {
        let a = automaton_of(s, w, u).unwrap();
        (0..=s.labels().len()).any(|k| a.accepts(&vec![i; k]))
    }

    proptest! {
        #[test]
        fn bfs_matches_string_enumeration(s in arb_sequent(), i in 1u32..=2) {
            for w in s.labels() {
                for u in s.labels() {
                    let fast = side_condition_holds(&s, i, w, u).unwrap();
                    prop_assert_eq!(fast, brute_force_accepts_star(&s, i, w, u));
                    prop_assert_eq!(fast, automaton_of(&s, w, u).unwrap().intersects_star(i));
                    prop_assert_eq!(fast, side_condition_holds(&s, i, u, w).unwrap());
                }
            }
        }

        #[test]
        fn components_agree_with_side_condition(s in arb_sequent(), i in 1u32..=2) {
            let classes = same_component(&s, i);
            for w in s.labels() {
                for u in s.labels() {
                    let same = classes.iter().any(|c| c.contains(&w) && c.contains(&u));
                    prop_assert_eq!(same, side_condition_holds(&s, i, w, u).unwrap());
                }
            }
        }

        #[test]
        fn reachability_is_monotone(s in arb_sequent(), extra in (1u32..=2, 0u32..5, 0u32..5), i in 1u32..=2) {
            let grown = s.clone().with_rel(RelAtom::new(extra.0, Label(extra.1), Label(extra.2)));
            for w in s.labels() {
                for u in s.labels() {
                    if side_condition_holds(&s, i, w, u).unwrap() {
                        prop_assert!(side_condition_holds(&grown, i, w, u).unwrap());
                    }
                }
            }
        }
    }
}

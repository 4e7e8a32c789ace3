//! Hand-built derivations shared by the integration tests.

#![allow(dead_code)]

use stit_core::calculus::{CalculusConfig, Derivation, Mode, Principal, RuleTag};
use stit_core::formula::{parse, AgentCount, Formula};
use stit_core::sequent::{Label, LabelledSequent, RelAtom};

pub fn f(text: &str, m: u32) -> Formula {
    parse(text, AgentCount::new(m).unwrap()).unwrap()
}

fn body(f: &Formula) -> Formula {
    match f {
        Formula::Box(b) | Formula::Dia(b) | Formula::AgBox(_, b) | Formula::AgDia(_, b) => (**b).clone(),
        _ => panic!("not modal"),
    }
}

/// Builds derivations bottom-up, computing each premise from its conclusion.
#[derive(Clone, Copy)]
pub struct Builder {
    pub mode: Mode,
}

impl Builder {
    pub fn or(&self, s: &LabelledSequent, w: Label, phi: &Formula, rest: impl FnOnce(LabelledSequent) -> Derivation) -> Derivation {
        let Formula::Or(l, r) = phi else { panic!() };
        let p = s.clone().with_formula(w, (**l).clone()).with_formula(w, (**r).clone());
        node(s, RuleTag::Or, Principal::Connective { label: w, formula: phi.clone() }, vec![rest(p)])
    }

    pub fn and(
        &self,
        s: &LabelledSequent,
        w: Label,
        phi: &Formula,
        left: impl FnOnce(LabelledSequent) -> Derivation,
        right: impl FnOnce(LabelledSequent) -> Derivation,
    ) -> Derivation {
        let Formula::And(l, r) = phi else { panic!() };
        let pl = s.clone().with_formula(w, (**l).clone());
        let pr = s.clone().with_formula(w, (**r).clone());
        node(s, RuleTag::And, Principal::Connective { label: w, formula: phi.clone() }, vec![left(pl), right(pr)])
    }

    pub fn boxed(&self, s: &LabelledSequent, w: Label, phi: &Formula, v: Label, rest: impl FnOnce(LabelledSequent) -> Derivation) -> Derivation {
        let p = s.clone().with_formula(v, body(phi));
        node(s, RuleTag::Box, Principal::Fresh { label: w, formula: phi.clone(), fresh: v }, vec![rest(p)])
    }

    pub fn agbox(&self, s: &LabelledSequent, i: u32, w: Label, phi: &Formula, v: Label, rest: impl FnOnce(LabelledSequent) -> Derivation) -> Derivation {
        let mut p = s.clone().with_rel(RelAtom::new(i, w, v)).with_formula(v, body(phi));
        if self.mode == Mode::G3 {
            p.remove_formula(w, phi);
        }
        node(s, RuleTag::AgBox(i), Principal::Fresh { label: w, formula: phi.clone(), fresh: v }, vec![rest(p)])
    }

    pub fn target(&self, s: &LabelledSequent, rule: RuleTag, w: Label, phi: &Formula, u: Label, rest: impl FnOnce(LabelledSequent) -> Derivation) -> Derivation {
        let p = s.clone().with_formula(u, body(phi));
        node(s, rule, Principal::Target { label: w, formula: phi.clone(), target: u }, vec![rest(p)])
    }

    pub fn refl(&self, s: &LabelledSequent, i: u32, w: Label, rest: impl FnOnce(LabelledSequent) -> Derivation) -> Derivation {
        let p = s.clone().with_rel(RelAtom::new(i, w, w));
        node(s, RuleTag::Refl(i), Principal::Refl { label: w }, vec![rest(p)])
    }

    pub fn eucl(&self, s: &LabelledSequent, i: u32, w: Label, u: Label, v: Label, rest: impl FnOnce(LabelledSequent) -> Derivation) -> Derivation {
        let p = s.clone().with_rel(RelAtom::new(i, u, v));
        node(s, RuleTag::Eucl(i), Principal::Eucl { w, u, v }, vec![rest(p)])
    }

    pub fn ioa(&self, s: &LabelledSequent, sources: &[Label], v: Label, rest: impl FnOnce(LabelledSequent) -> Derivation) -> Derivation {
        let mut p = s.clone();
        for (k, &u) in sources.iter().enumerate() {
            p.add_rel(RelAtom::new(k as u32 + 1, u, v));
        }
        node(s, RuleTag::Ioa, Principal::Ioa { sources: sources.to_vec(), fresh: v }, vec![rest(p)])
    }
}

pub fn node(s: &LabelledSequent, rule: RuleTag, principal: Principal, premises: Vec<Derivation>) -> Derivation {
    Derivation { conclusion: s.clone(), rule, principal, premises }
}

pub fn id(s: LabelledSequent, w: Label, atom: &str) -> Derivation {
    Derivation::leaf(s, w, atom)
}

pub const IOA: &str = "dia [1] p & dia [2] q -> dia ([1] p & [2] q)";

/// The independence-of-agents axiom for two agents in the G3 calculus.
pub fn ioa_derivation() -> (CalculusConfig, Derivation) {
    let cfg = CalculusConfig { m: AgentCount::new(2).unwrap(), n: 0, mode: Mode::G3 };
    let b = Builder { mode: Mode::G3 };
    let goal = f(IOA, 2);
    let (x, y1, y2, v, u) = (Label(0), Label(1), Label(2), Label(3), Label(4));
    let Formula::Or(ab, c) = &goal else { panic!() };
    let Formula::Or(a, bb) = &**ab else { panic!() };
    let d = (**c).clone();
    let conj = body(&d);
    let Formula::And(left, right) = &conj else { panic!() };
    // One side per agent: witness u for [i] ψ at v, then move ⟨i⟩ ψ̄ from y_i to u.
    let side = |i: u32, y: Label, boxed: Formula, dia_at_y: Formula, atom: &'static str| {
        move |s: LabelledSequent| {
            b.agbox(&s, i, v, &boxed, u, |s| {
                b.refl(&s, i, y, |s| {
                    b.eucl(&s, i, y, v, y, |s| {
                        b.eucl(&s, i, v, y, u, |s| {
                            b.target(&s, RuleTag::AgDia(i), y, &dia_at_y, u, |s| id(s, u, atom))
                        })
                    })
                })
            })
        }
    };
    let s0 = LabelledSequent::singleton(x, goal.clone());
    let deriv = b.or(&s0, x, &goal, |s| {
        b.or(&s, x, ab, |s| {
            b.boxed(&s, x, a, y1, |s| {
                b.boxed(&s, x, bb, y2, |s| {
                    b.ioa(&s, &[y1, y2], v, |s| {
                        b.target(&s, RuleTag::Dia, x, &d, v, |s| {
                            b.and(
                                &s,
                                v,
                                &conj,
                                side(1, y1, (**left).clone(), body(a), "p"),
                                side(2, y2, (**right).clone(), body(bb), "q"),
                            )
                        })
                    })
                })
            })
        })
    });
    (cfg, deriv)
}

pub const APC1: &str = "box <1> ~p | p";

/// The one-choice axiom in the G3 calculus: APC merges the two trees, then
/// reflexivity and euclideanity supply the edge for the ⟨1⟩ rule.
pub fn apc1_derivation() -> (CalculusConfig, Derivation) {
    let cfg = CalculusConfig { m: AgentCount::ONE, n: 1, mode: Mode::G3 };
    let b = Builder { mode: Mode::G3 };
    let goal = f(APC1, 1);
    let Formula::Or(l, _) = &goal else { panic!() };
    let (w0, w1) = (Label(0), Label(1));
    let s0 = LabelledSequent::singleton(w0, goal.clone());
    let deriv = b.or(&s0, w0, &goal, |s| {
        b.boxed(&s, w0, l, w1, |s| {
            let merged = s.clone().with_rel(RelAtom::new(1, w0, w1));
            let above = b.refl(&merged, 1, w0, |s| {
                b.eucl(&s, 1, w0, w1, w0, |s| {
                    b.target(&s, RuleTag::AgDia(1), w1, &body(l), w0, |s| id(s, w0, "p"))
                })
            });
            node(&s, RuleTag::Apc(1), Principal::Apc { labels: vec![w0, w1] }, vec![above])
        })
    });
    (cfg, deriv)
}

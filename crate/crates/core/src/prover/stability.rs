//! Saturation, realization, propagation and stability of forestlike sequents.
//!
//! `CT(w)` is computed as the undirected component of `w`, which is exactly
//! its choice-tree whenever the sequent is forestlike.

use std::collections::{BTreeMap, BTreeSet};

use crate::formula::{negate, Formula};
use crate::sequent::{undirected_components, Label, LabelledSequent};

pub(crate) struct TreeIndex {
    comps: Vec<BTreeSet<Label>>,
    of: BTreeMap<Label, usize>,
}

impl TreeIndex {
    pub(crate) fn new(s: &LabelledSequent) -> Self {
        let comps = undirected_components(s);
        let mut of = BTreeMap::new();
        for (i, c) in comps.iter().enumerate() {
            for &l in c {
                of.insert(l, i);
            }
        }
        TreeIndex { comps, of }
    }

    pub(crate) fn members(&self, w: Label) -> &BTreeSet<Label> {
        static EMPTY: BTreeSet<Label> = BTreeSet::new();
        self.of.get(&w).map_or(&EMPTY, |&i| &self.comps[i])
    }

    pub(crate) fn count(&self) -> usize {
        self.comps.len()
    }
}

pub fn is_saturated(s: &LabelledSequent, w: Label) -> bool {
    s.formulas_at(w).all(|f| {
        if s.contains(w, &negate(f)) {
            return false;
        }
        match f {
            Formula::Or(l, r) => s.contains(w, l) && s.contains(w, r),
            Formula::And(l, r) => s.contains(w, l) || s.contains(w, r),
            _ => true,
        }
    })
}

fn box_realized(s: &LabelledSequent, labels: &BTreeSet<Label>, w: Label) -> bool {
    s.formulas_at(w).all(|f| match f {
        Formula::Box(body) => labels.iter().any(|&u| s.contains(u, body)),
        _ => true,
    })
}

fn agbox_realized(s: &LabelledSequent, trees: &TreeIndex, w: Label) -> bool {
    s.formulas_at(w).all(|f| match f {
        Formula::AgBox(1, body) => trees.members(w).iter().any(|&u| s.contains(u, body)),
        _ => true,
    })
}

fn dia_propagated(s: &LabelledSequent, labels: &BTreeSet<Label>, w: Label) -> bool {
    s.formulas_at(w).all(|f| match f {
        Formula::Dia(body) => labels.iter().all(|&u| s.contains(u, body)),
        _ => true,
    })
}

fn agdia_propagated(s: &LabelledSequent, trees: &TreeIndex, w: Label) -> bool {
    s.formulas_at(w).all(|f| match f {
        Formula::AgDia(1, body) => trees.members(w).iter().all(|&u| s.contains(u, body)),
        _ => true,
    })
}

pub fn is_box_realized(s: &LabelledSequent, w: Label) -> bool {
    box_realized(s, &s.labels(), w)
}

pub fn is_agbox_realized(s: &LabelledSequent, w: Label) -> bool {
    agbox_realized(s, &TreeIndex::new(s), w)
}

pub fn is_dia_propagated(s: &LabelledSequent, w: Label) -> bool {
    dia_propagated(s, &s.labels(), w)
}

pub fn is_agdia_propagated(s: &LabelledSequent, w: Label) -> bool {
    agdia_propagated(s, &TreeIndex::new(s), w)
}

/// At most `n` choice-trees. Only meaningful for `n > 0`.
pub fn is_n_choice_consistent(s: &LabelledSequent, n: u32) -> bool {
    TreeIndex::new(s).count() <= n as usize
}

/// Saturated, realized and propagated everywhere, plus `n`-choice consistent
/// when `n > 0`.
pub fn is_stable(s: &LabelledSequent, n: u32) -> bool {
    let labels = s.labels();
    let trees = TreeIndex::new(s);
    labels.iter().all(|&w| {
        is_saturated(s, w)
            && box_realized(s, &labels, w)
            && agbox_realized(s, &trees, w)
            && dia_propagated(s, &labels, w)
            && agdia_propagated(s, &trees, w)
    }) && (n == 0 || trees.count() <= n as usize)
}

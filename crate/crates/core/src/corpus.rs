//! Formula corpora for differential testing.

use rand::Rng;

use crate::formula::Formula;

/// `p, q, r, s, t, ...`, then `p5`, `p6`, ... beyond the fifth.
pub fn atom_names(k: usize) -> Vec<String> {
    const NAMED: [&str; 5] = ["p", "q", "r", "s", "t"];
    (0..k).map(|i| NAMED.get(i).map_or_else(|| format!("p{i}"), |s| s.to_string())).collect()
}

/// Every single-agent NNF formula over `atoms` with exactly `c` connectives.
pub fn formulas_with(atoms: &[String], c: usize) -> Vec<Formula> {
    let mut table: Vec<Vec<Formula>> = Vec::with_capacity(c + 1);
    for k in 0..=c {
        let mut layer = Vec::new();
        if k == 0 {
            for a in atoms {
                layer.push(Formula::atom(a));
                layer.push(Formula::neg_atom(a));
            }
        } else {
            for b in &table[k - 1] {
                layer.push(Formula::boxed(b.clone()));
                layer.push(Formula::dia(b.clone()));
                layer.push(Formula::ag_box(1, b.clone()));
                layer.push(Formula::ag_dia(1, b.clone()));
            }
            for left in 0..k {
                for l in &table[left] {
                    for r in &table[k - 1 - left] {
                        layer.push(Formula::and(l.clone(), r.clone()));
                        layer.push(Formula::or(l.clone(), r.clone()));
                    }
                }
            }
        }
        table.push(layer);
    }
    table.pop().unwrap_or_default()
}

/// Every single-agent NNF formula over `atoms` with at most `max` connectives,
/// smallest first.
pub fn exhaustive(atoms: &[String], max: usize) -> Vec<Formula> {
    (0..=max).flat_map(|c| formulas_with(atoms, c)).collect()
}

/// A random single-agent NNF formula of nesting depth at most `depth`.
pub fn random_formula(rng: &mut impl Rng, depth: usize, atoms: &[String]) -> Formula {
    if depth == 0 || rng.gen_ratio(1, 5) {
        let a = &atoms[rng.gen_range(0..atoms.len())];
        return if rng.gen() { Formula::atom(a) } else { Formula::neg_atom(a) };
    }
    let sub = |rng: &mut _| random_formula(rng, depth - 1, atoms);
    match rng.gen_range(0..6) {
        0 => Formula::and(sub(rng), sub(rng)),
        1 => Formula::or(sub(rng), sub(rng)),
        2 => Formula::boxed(sub(rng)),
        3 => Formula::dia(sub(rng)),
        4 => Formula::ag_box(1, sub(rng)),
        _ => Formula::ag_dia(1, sub(rng)),
    }
}

/// Nesting depth of connectives; literals have depth 0.
pub fn nesting_depth(f: &Formula) -> usize {
    match f {
        Formula::Atom(_) | Formula::NegAtom(_) => 0,
        Formula::And(l, r) | Formula::Or(l, r) => 1 + nesting_depth(l).max(nesting_depth(r)),
        Formula::Box(b) | Formula::Dia(b) | Formula::AgBox(_, b) | Formula::AgDia(_, b) => 1 + nesting_depth(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    #[test]
    fn corpus_sizes() {
        let atoms = atom_names(2);
        let sizes: Vec<usize> = (0..=3).map(|c| formulas_with(&atoms, c).len()).collect();
        assert_eq!(sizes, vec![4, 48, 960, 23808]);
        let all = exhaustive(&atoms, 2);
        assert_eq!(all.len(), 4 + 48 + 960);
        assert_eq!(all.iter().collect::<BTreeSet<_>>().len(), all.len());
        assert!(all.iter().all(|f| f.connectives() <= 2 && f.max_agent() <= 1));
    }

    #[test]
    fn random_formulas_respect_depth_and_seed() {
        let atoms = atom_names(3);
        let gen = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50).map(|_| random_formula(&mut rng, 4, &atoms)).collect::<Vec<_>>()
        };
        let a = gen(7);
        assert_eq!(a, gen(7));
        assert_ne!(a, gen(8));
        assert!(a.iter().all(|f| nesting_depth(f) <= 4));
    }

    #[test]
    fn atom_naming() {
        assert_eq!(atom_names(2), vec!["p", "q"]);
        assert_eq!(atom_names(7)[6], "p6");
    }
}

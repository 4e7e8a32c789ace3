//! Validity by exhaustive enumeration of small models.
//!
//! Worlds are bit positions of a `u64`, so every search is capped at 64 worlds.
//!
//! For a single agent the default search is over reduced models: each world
//! is identified with its valuation type (the set of atoms of `f` it makes
//! true) and each choice cell with the set of types it contains. Any model is
//! bisimilar, for `□` and `[1]` alike, to the reduced model obtained by
//! merging worlds of equal type within a cell and then merging cells with
//! equal type sets. Merging never adds worlds or cells, so a counter-model
//! with at most `k` worlds and `n` cells exists iff a reduced one does.
//! The literal enumeration of all partitions and valuations is also
//! available and is the only route for more than one agent.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use super::{Model, World};
use crate::formula::{box_occurrences, Agent, AgentCount, Formula};

pub const MAX_WORLDS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// No counter-model up to a bound below the default.
    ValidUpToBound { max_worlds: usize },
    CounterModel { model: Model, world: World },
}

impl Verdict {
    pub fn is_counter_model(&self) -> bool {
        matches!(self, Verdict::CounterModel { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("the world bound must be at least 1")]
    ZeroWorlds,
    #[error("at most {MAX_WORLDS} worlds are supported, {0} requested")]
    TooManyWorlds(usize),
    #[error("agent {agent} occurs in the formula but there are only {m} agents")]
    AgentOutOfRange { agent: Agent, m: u32 },
}

/// `(1 + #□)(1 + #[1])` for one agent; `1 + #□ + #[i]` otherwise.
///
/// For one agent, a counter-model can be cut down to the evaluation world's
/// cell plus one cell per `□` occurrence (a `◇` witness each), keeping in
/// every retained cell at most one `[1]` witness per `[1]` occurrence.
pub fn default_max_worlds(f: &Formula, m: AgentCount) -> usize {
    let (boxes, ag_boxes) = box_occurrences(f);
    if m.get() == 1 {
        (1 + boxes) * (1 + ag_boxes)
    } else {
        1 + boxes + ag_boxes
    }
}

struct BitModel {
    size: usize,
    /// `cells[i - 1][w]` is the cell of world `w` for agent `i`.
    cells: Vec<Vec<u64>>,
    /// Truth sets indexed like the sorted atom list.
    val: Vec<u64>,
}

fn full(size: usize) -> u64 {
    if size == 64 {
        u64::MAX
    } else {
        (1u64 << size) - 1
    }
}

impl BitModel {
    fn eval(&self, atoms: &[Arc<str>], f: &Formula) -> u64 {
        let all = full(self.size);
        let atom = |p: &Arc<str>| atoms.binary_search(p).map_or(0, |k| self.val[k]);
        match f {
            Formula::Atom(p) => atom(p),
            Formula::NegAtom(p) => !atom(p) & all,
            Formula::And(l, r) => self.eval(atoms, l) & self.eval(atoms, r),
            Formula::Or(l, r) => self.eval(atoms, l) | self.eval(atoms, r),
            Formula::Box(b) => {
                if self.eval(atoms, b) == all {
                    all
                } else {
                    0
                }
            }
            Formula::Dia(b) => {
                if self.eval(atoms, b) != 0 {
                    all
                } else {
                    0
                }
            }
            Formula::AgBox(i, b) | Formula::AgDia(i, b) => {
                let inner = self.eval(atoms, b);
                let boxed = matches!(f, Formula::AgBox(..));
                let cells = &self.cells[*i as usize - 1];
                (0..self.size)
                    .filter(|&w| {
                        let c = cells[w];
                        if boxed {
                            inner & c == c
                        } else {
                            inner & c != 0
                        }
                    })
                    .fold(0, |acc, w| acc | 1 << w)
            }
        }
    }

    fn to_model(&self, atoms: &[Arc<str>]) -> Model {
        let mut model = Model { worlds: (0..self.size as World).collect(), ..Default::default() };
        for (k, cells) in self.cells.iter().enumerate() {
            let pairs = model.rel.entry(k as Agent + 1).or_default();
            for (w, &c) in cells.iter().enumerate() {
                for v in 0..self.size {
                    if c >> v & 1 == 1 {
                        pairs.insert((w as World, v as World));
                    }
                }
            }
        }
        for (k, p) in atoms.iter().enumerate() {
            let set: BTreeSet<World> = (0..self.size).filter(|&w| self.val[k] >> w & 1 == 1).map(|w| w as World).collect();
            model.val.insert(p.to_string(), set);
        }
        model
    }

    /// First world falsifying `f`, if any.
    fn refutes(&self, atoms: &[Arc<str>], f: &Formula) -> Option<World> {
        let falsified = !self.eval(atoms, f) & full(self.size);
        (falsified != 0).then(|| falsified.trailing_zeros())
    }
}

fn prepare(f: &Formula, m: AgentCount, max_worlds: Option<usize>) -> Result<(Vec<Arc<str>>, usize, bool), OracleError> {
    let agent = f.max_agent();
    if agent > m.get() {
        return Err(OracleError::AgentOutOfRange { agent, m: m.get() });
    }
    let default = default_max_worlds(f, m);
    let bound = max_worlds.unwrap_or(default);
    if bound == 0 {
        return Err(OracleError::ZeroWorlds);
    }
    if max_worlds.is_some_and(|k| k > MAX_WORLDS) {
        return Err(OracleError::TooManyWorlds(bound));
    }
    let atoms: BTreeSet<Arc<str>> = f.atoms().into_iter().collect();
    Ok((atoms.into_iter().collect(), bound, bound < default))
}

fn require_capacity(bound: usize) -> Result<(), OracleError> {
    if bound > MAX_WORLDS {
        Err(OracleError::TooManyWorlds(bound))
    } else {
        Ok(())
    }
}

fn exhausted(bound: usize, below_default: bool) -> Verdict {
    if below_default {
        Verdict::ValidUpToBound { max_worlds: bound }
    } else {
        Verdict::Valid
    }
}

/// Search for a model of at most `max_worlds` worlds (default
/// [`default_max_worlds`]) with at most `n` choices per agent (`n = 0`:
/// unbounded) falsifying `f` somewhere.
pub fn decide_by_enumeration(
    f: &Formula,
    m: AgentCount,
    n: u32,
    max_worlds: Option<usize>,
) -> Result<Verdict, OracleError> {
    if m.get() > 1 {
        return decide_by_brute_force(f, m, n, max_worlds);
    }
    let (atoms, bound, below_default) = prepare(f, m, max_worlds)?;
    if atoms.len() > 4 {
        // Too many type sets to list; the literal route still works.
        return decide_by_brute_force(f, m, n, max_worlds);
    }
    let types = 1usize << atoms.len();
    // Type sets ordered by size, so smaller cells are tried first.
    let mut type_sets: Vec<u64> = (1..=full(types)).collect();
    type_sets.sort_by_key(|t| (t.count_ones(), *t));
    let max_cells = if n == 0 { type_sets.len() } else { n as usize };
    // Reduced models never exceed the largest cells taken together.
    let mut sizes: Vec<usize> = type_sets.iter().map(|t| t.count_ones() as usize).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let largest: usize = sizes.iter().take(max_cells).sum();
    let reach = bound.min(largest);
    require_capacity(reach)?;
    for size in 1..=reach {
        let mut chosen = Vec::new();
        if let Some(found) = reduced_models(&type_sets, 0, size, max_cells, &mut chosen, &mut |cells| {
            let bm = reduced_to_bits(cells, atoms.len());
            bm.refutes(&atoms, f).map(|w| (bm.to_model(&atoms), w))
        }) {
            return Ok(Verdict::CounterModel { model: found.0, world: found.1 });
        }
    }
    Ok(exhausted(bound, below_default))
}

/// Sets of distinct type sets, taken in index order from `start`, with
/// exactly `remaining` worlds in total and at most `cells_left` cells.
fn reduced_models<T>(
    type_sets: &[u64],
    start: usize,
    remaining: usize,
    cells_left: usize,
    chosen: &mut Vec<u64>,
    visit: &mut impl FnMut(&[u64]) -> Option<T>,
) -> Option<T> {
    if remaining == 0 {
        return visit(chosen);
    }
    if cells_left == 0 {
        return None;
    }
    for k in start..type_sets.len() {
        let t = type_sets[k];
        let w = t.count_ones() as usize;
        if w > remaining {
            // sorted by size
            break;
        }
        chosen.push(t);
        let r = reduced_models(type_sets, k + 1, remaining - w, cells_left - 1, chosen, visit);
        chosen.pop();
        if r.is_some() {
            return r;
        }
    }
    None
}

fn reduced_to_bits(cells: &[u64], atom_count: usize) -> BitModel {
    let mut cell_of = Vec::new();
    let mut val = vec![0u64; atom_count];
    let mut next = 0usize;
    for &set in cells {
        let first = next;
        for t in 0..64 {
            if set >> t & 1 == 1 {
                for (k, v) in val.iter_mut().enumerate() {
                    if t >> k & 1 == 1 {
                        *v |= 1 << next;
                    }
                }
                next += 1;
            }
        }
        let mask = full(next) & !full(first);
        cell_of.extend(std::iter::repeat_n(mask, next - first));
    }
    BitModel { size: next, cells: vec![cell_of], val }
}

/// Restricted growth strings of length `k` with at most `max_blocks` blocks.
fn partitions(k: usize, max_blocks: usize) -> Vec<Vec<u64>> {
    fn go(k: usize, max_blocks: usize, rgs: &mut Vec<usize>, blocks: usize, out: &mut Vec<Vec<u64>>) {
        if rgs.len() == k {
            let mut masks = vec![0u64; blocks];
            for (w, &b) in rgs.iter().enumerate() {
                masks[b] |= 1 << w;
            }
            out.push(rgs.iter().map(|&b| masks[b]).collect());
            return;
        }
        let limit = if rgs.is_empty() { 1 } else { (blocks + 1).min(max_blocks) };
        for b in 0..limit {
            rgs.push(b);
            go(k, max_blocks, rgs, blocks.max(b + 1), out);
            rgs.pop();
        }
    }
    let mut out = Vec::new();
    go(k, max_blocks, &mut Vec::with_capacity(k), 0, &mut out);
    out
}

/// Odometer step over `digits` in base `radix`; false after the last value.
fn advance(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

/// Every agent choosing any of its cells leaves a common world.
fn independent(cells: &[&Vec<u64>]) -> bool {
    let distinct: Vec<BTreeSet<u64>> = cells.iter().map(|c| c.iter().copied().collect()).collect();
    let mut product = 1usize;
    for d in &distinct {
        product = product.saturating_mul(d.len());
    }
    // each world lies in exactly one tuple of cells, so all tuples are hit
    // iff the number of distinct tuples realised is the product
    let size = cells[0].len();
    let realised: BTreeSet<Vec<u64>> = (0..size).map(|w| cells.iter().map(|c| c[w]).collect()).collect();
    realised.len() == product
}

/// Every model on worlds `0..size` with agents `1..=m`, at most `n` choices
/// per agent (`n = 0`: unbounded), independent agents, and every valuation
/// of `atoms`.
pub fn all_models(m: AgentCount, n: u32, atoms: &[&str], size: usize) -> Vec<Model> {
    assert!((1..=MAX_WORLDS).contains(&size) && size * atoms.len() < 64, "model space too large");
    let max_blocks = if n == 0 { size } else { (n as usize).min(size) };
    let parts = partitions(size, max_blocks);
    let agents = m.get() as usize;
    let names: Vec<Arc<str>> = atoms.iter().map(|&a| Arc::from(a)).collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; agents];
    loop {
        let cells: Vec<&Vec<u64>> = choice.iter().map(|&c| &parts[c]).collect();
        if agents == 1 || independent(&cells) {
            let owned: Vec<Vec<u64>> = cells.iter().map(|c| (*c).clone()).collect();
            for assignment in 0..1u64 << (size * atoms.len()) {
                let val = (0..atoms.len()).map(|k| (assignment >> (k * size)) & full(size)).collect();
                out.push(BitModel { size, cells: owned.clone(), val }.to_model(&names));
            }
        }
        if !advance(&mut choice, parts.len()) {
            return out;
        }
    }
}

/// Literal enumeration: for each world count, every combination of
/// partitions (one per agent, filtered by independence) and every valuation.
pub fn decide_by_brute_force(
    f: &Formula,
    m: AgentCount,
    n: u32,
    max_worlds: Option<usize>,
) -> Result<Verdict, OracleError> {
    let (atoms, bound, below_default) = prepare(f, m, max_worlds)?;
    require_capacity(bound)?;
    let agents = m.get() as usize;
    for size in 1..=bound {
        let max_blocks = if n == 0 { size } else { (n as usize).min(size) };
        let parts = partitions(size, max_blocks);
        let bits = size * atoms.len();
        if bits >= 64 {
            return Err(OracleError::TooManyWorlds(size));
        }
        let mut choice = vec![0usize; agents];
        loop {
            let cells: Vec<&Vec<u64>> = choice.iter().map(|&c| &parts[c]).collect();
            if agents == 1 || independent(&cells) {
                let owned: Vec<Vec<u64>> = cells.iter().map(|c| (*c).clone()).collect();
                for assignment in 0..1u64 << bits {
                    let val = (0..atoms.len())
                        .map(|k| (assignment >> (k * size)) & full(size))
                        .collect();
                    let bm = BitModel { size, cells: owned.clone(), val };
                    if let Some(w) = bm.refutes(&atoms, f) {
                        return Ok(Verdict::CounterModel { model: bm.to_model(&atoms), world: w });
                    }
                }
            }
            if !advance(&mut choice, parts.len()) {
                break;
            }
        }
    }
    Ok(exhausted(bound, below_default))
}

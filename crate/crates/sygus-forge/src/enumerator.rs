//! Size-layered enumeration of grammar programs.
//!
//! Programs are streamed in layers of increasing size, where size counts
//! non-leaf constructor applications. Within a layer the order is fixed:
//! constructors in declaration order, then for each constructor the ways of
//! splitting the remaining size among its arguments in lexicographically
//! ascending order, then the cartesian product of child layers with the
//! first child varying slowest. [`EnumeratorState`] keeps a cursor into this
//! stream and hands out candidates consistent with a set of stored points.
//!
//! The cursor never rewinds when a point is added: a program that was
//! passed over failed some point that is still stored, so it can never
//! become consistent again.

use std::collections::{BTreeMap, HashSet};
use std::rc::Rc;

use crate::grammar::{GrammarSpec, ProgramTerm};
use crate::term::{Assignment, TermError};

/// All programs of `datatype` with exactly `size` non-leaf applications, in
/// stream order.
pub fn enumerate_layer(g: &GrammarSpec, datatype: &str, size: usize) -> Vec<ProgramTerm> {
    let mut cache = LayerCache::default();
    cache.layer(g, datatype, size).as_ref().clone()
}

#[derive(Debug, Default)]
struct LayerCache {
    memo: BTreeMap<(String, usize), Rc<Vec<ProgramTerm>>>,
}

impl LayerCache {
    fn layer(&mut self, g: &GrammarSpec, datatype: &str, size: usize) -> Rc<Vec<ProgramTerm>> {
        if let Some(v) = self.memo.get(&(datatype.to_string(), size)) {
            return Rc::clone(v);
        }
        let def = g.datatype(datatype).expect("grammar was validated");
        let mut out = Vec::new();
        if size == 0 {
            for c in &def.constructors {
                if c.is_leaf() {
                    out.push(ProgramTerm::leaf(&c.name, datatype));
                }
            }
        } else {
            // Clone the constructor list so the recursive `layer` calls can
            // borrow `self` mutably.
            let constructors = def.constructors.clone();
            for c in &constructors {
                if c.is_leaf() {
                    continue;
                }
                let mins: Vec<usize> = c
                    .args
                    .iter()
                    .map(|a| g.min_size(a).expect("grammar was validated"))
                    .collect();
                for split in splits(size - 1, &mins) {
                    let child_layers: Vec<Rc<Vec<ProgramTerm>>> = c
                        .args
                        .iter()
                        .zip(&split)
                        .map(|(a, s)| self.layer(g, a, *s))
                        .collect();
                    if child_layers.iter().any(|l| l.is_empty()) {
                        continue;
                    }
                    let mut children = Vec::with_capacity(child_layers.len());
                    product(&c.name, datatype, &child_layers, &mut children, &mut out);
                }
            }
        }
        let rc = Rc::new(out);
        self.memo
            .insert((datatype.to_string(), size), Rc::clone(&rc));
        rc
    }
}

/// Ways of writing `total` as an ordered sum with `mins[i]` as the lower
/// bound of position i, lexicographically ascending.
fn splits(total: usize, mins: &[usize]) -> Vec<Vec<usize>> {
    fn rec(total: usize, mins: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        match mins {
            [] => {
                if total == 0 {
                    out.push(cur.clone());
                }
            }
            [lo, rest @ ..] => {
                let rest_min: usize = rest.iter().sum();
                if total < lo + rest_min {
                    return;
                }
                for s in *lo..=(total - rest_min) {
                    cur.push(s);
                    rec(total - s, rest, cur, out);
                    cur.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(total, mins, &mut Vec::with_capacity(mins.len()), &mut out);
    out
}

fn product(
    constructor: &str,
    datatype: &str,
    layers: &[Rc<Vec<ProgramTerm>>],
    children: &mut Vec<ProgramTerm>,
    out: &mut Vec<ProgramTerm>,
) {
    if children.len() == layers.len() {
        out.push(ProgramTerm::node(constructor, datatype, children.clone()));
        return;
    }
    for p in layers[children.len()].iter() {
        children.push(p.clone());
        product(constructor, datatype, layers, children, out);
        children.pop();
    }
}

/// Result of asking for the next consistent candidate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NextCandidate {
    Candidate { program: ProgramTerm, size: usize },
    /// The grammar's whole (finite) language has been scanned.
    Exhausted,
    /// The configured size cap was hit before finding a candidate.
    CapReached,
}

/// Cursor over the candidate stream.
///
/// With `prune` enabled, programs whose verdict vector over the stored
/// points matches one already seen since the last [`point_added`] are
/// skipped, so repeated calls without new points yield behaviorally
/// distinct candidates. This never changes which candidate a call returns:
/// a skipped program's representative was scanned earlier in the same
/// round, so its vector contains a refutation (a fully consistent program
/// would have ended the round).
///
/// [`point_added`]: EnumeratorState::point_added
#[derive(Debug)]
pub struct EnumeratorState {
    grammar: GrammarSpec,
    cache: LayerCache,
    size: usize,
    index: usize,
    scanned: BTreeMap<usize, usize>,
    size_cap: usize,
    prune: bool,
    seen: HashSet<Vec<bool>>,
}

impl EnumeratorState {
    pub fn new(grammar: GrammarSpec, size_cap: usize, prune: bool) -> Self {
        EnumeratorState {
            grammar,
            cache: LayerCache::default(),
            size: 0,
            index: 0,
            scanned: BTreeMap::new(),
            size_cap,
            prune,
            seen: HashSet::new(),
        }
    }

    pub fn grammar(&self) -> &GrammarSpec {
        &self.grammar
    }

    /// Size layer the cursor currently points into.
    pub fn current_size(&self) -> usize {
        self.size
    }

    /// Programs examined in the given layer so far.
    pub fn scanned_in_layer(&self, size: usize) -> usize {
        self.scanned.get(&size).copied().unwrap_or(0)
    }

    pub fn total_scanned(&self) -> usize {
        self.scanned.values().sum()
    }

    /// Number of programs in a layer of the start datatype.
    pub fn layer_len(&mut self, size: usize) -> usize {
        let start = self.grammar.start().to_string();
        self.cache.layer(&self.grammar, &start, size).len()
    }

    /// Must be called whenever a point is added to the store; resets the
    /// equivalence cache, whose signatures are indexed by point position.
    pub fn point_added(&mut self) {
        self.seen.clear();
    }

    /// Advance to the next program that `verdict` accepts at every point.
    /// `verdict(p, a)` decides whether program `p` is acceptable at point
    /// `a`; errors abort the scan.
    pub fn next_consistent<F>(
        &mut self,
        points: &[Assignment],
        verdict: &mut F,
    ) -> Result<NextCandidate, TermError>
    where
        F: FnMut(&ProgramTerm, &Assignment) -> Result<bool, TermError>,
    {
        let hard_max = self.grammar.finite_max_size();
        loop {
            if let Some(m) = hard_max {
                if self.size > m {
                    return Ok(NextCandidate::Exhausted);
                }
            }
            if self.size > self.size_cap {
                return Ok(NextCandidate::CapReached);
            }
            let start = self.grammar.start().to_string();
            let layer = self.cache.layer(&self.grammar, &start, self.size);
            while self.index < layer.len() {
                let program = &layer[self.index];
                self.index += 1;
                *self.scanned.entry(self.size).or_insert(0) += 1;

                if self.prune {
                    let mut sig = Vec::with_capacity(points.len());
                    for a in points {
                        sig.push(verdict(program, a)?);
                    }
                    let consistent = sig.iter().all(|&v| v);
                    if !self.seen.insert(sig) {
                        continue;
                    }
                    if consistent {
                        return Ok(NextCandidate::Candidate {
                            program: program.clone(),
                            size: self.size,
                        });
                    }
                } else {
                    let mut consistent = true;
                    for a in points {
                        if !verdict(program, a)? {
                            consistent = false;
                            break;
                        }
                    }
                    if consistent {
                        return Ok(NextCandidate::Candidate {
                            program: program.clone(),
                            size: self.size,
                        });
                    }
                }
            }
            self.size += 1;
            self.index = 0;
        }
    }
}

/// The points collected so far. Each is a full assignment to the input
/// variables. Inserting a point that is already stored is rejected; in a
/// refinement loop that means the last candidate was not actually refuted
/// and the engine must abort rather than spin.
#[derive(Debug, Clone, Default)]
pub struct CounterexampleStore {
    points: Vec<Assignment>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StoreError {
    #[error("counterexample duplicates stored point: {0}")]
    DuplicatePoint(String),
}

impl CounterexampleStore {
    pub fn new() -> Self {
        CounterexampleStore::default()
    }

    pub fn points(&self) -> &[Assignment] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn insert(&mut self, point: Assignment) -> Result<(), StoreError> {
        if self.points.contains(&point) {
            return Err(StoreError::DuplicatePoint(point.to_string()));
        }
        self.points.push(point);
        Ok(())
    }
}

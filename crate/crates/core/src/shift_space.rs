//! Words, cylinders and subshifts of finite type over the alphabet `{1, ..., d}`.
//!
//! [`Symbol`] is 1-based, as is every symbol a user types. Matrices and
//! serialized vectors are indexed 0-based; [`Symbol::zero_based`] is the only
//! crossing point.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{input_err, Result};

/// A letter of the alphabet `{1, ..., d}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(usize);

impl Symbol {
    /// 1-based constructor; zero is rejected.
    pub fn new(index: usize) -> Result<Symbol> {
        if index == 0 {
            return Err(input_err!("symbols are numbered from 1"));
        }
        Ok(Symbol(index))
    }

    pub fn from_zero_based(i: usize) -> Symbol {
        Symbol(i + 1)
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn zero_based(self) -> usize {
        self.0 - 1
    }

    pub fn check(self, d: usize) -> Result<()> {
        if self.0 > d {
            return Err(input_err!("symbol {} outside alphabet 1..={}", self.0, d));
        }
        Ok(())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite word, naming the cylinder of points that start with it.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    /// From 1-based indices.
    pub fn new(indices: &[usize]) -> Result<Word> {
        indices.iter().map(|&k| Symbol::new(k)).collect::<Result<Vec<_>>>().map(Word)
    }

    pub fn from_zero_based(indices: &[usize]) -> Word {
        Word(indices.iter().map(|&i| Symbol::from_zero_based(i)).collect())
    }

    pub fn from_symbols(symbols: Vec<Symbol>) -> Word {
        Word(symbols)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn zero_based(&self) -> Vec<usize> {
        self.0.iter().map(|s| s.zero_based()).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Symbol> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Symbol> {
        self.0.last().copied()
    }

    /// `self` followed by `s`.
    pub fn extended(&self, s: Symbol) -> Word {
        let mut v = self.0.clone();
        v.push(s);
        Word(v)
    }

    /// `s` followed by `self`.
    pub fn prepended(&self, s: Symbol) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(s);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn check(&self, d: usize) -> Result<()> {
        self.0.iter().try_for_each(|s| s.check(d))
    }

    /// Consecutive pairs, 0-based.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.windows(2).map(|w| (w[0].zero_based(), w[1].zero_based()))
    }

    /// All `d^n` words of length `n`, in lexicographic order.
    pub fn all_of_length(d: usize, n: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..n {
            out = out.iter().flat_map(|w| cylinder_refinement_children(w, d)).collect();
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "]")
    }
}

/// A square 0/1 matrix; `T(i, j) = 1` allows the subword `ij`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    d: usize,
    entries: Vec<bool>,
}

impl TransitionMatrix {
    pub fn full(d: usize) -> TransitionMatrix {
        TransitionMatrix { d, entries: vec![true; d * d] }
    }

    pub fn empty(d: usize) -> TransitionMatrix {
        TransitionMatrix { d, entries: vec![false; d * d] }
    }

    /// Rows of 0/1 values; anything else is an input error.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<TransitionMatrix> {
        let d = rows.len();
        let mut entries = Vec::with_capacity(d * d);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != d {
                return Err(input_err!("transition matrix row {} has length {}, expected {}", i, r.len(), d));
            }
            for (j, &x) in r.iter().enumerate() {
                match x {
                    0 => entries.push(false),
                    1 => entries.push(true),
                    _ => return Err(input_err!("transition matrix entry ({}, {}) is {}, expected 0 or 1", i, j, x)),
                }
            }
        }
        Ok(TransitionMatrix { d, entries })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// 0-based.
    pub fn allows(&self, i: usize, j: usize) -> bool {
        self.entries[i * self.d + j]
    }

    pub fn set(&mut self, i: usize, j: usize, allowed: bool) {
        self.entries[i * self.d + j] = allowed;
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.d).map(|i| (0..self.d).map(|j| self.allows(i, j) as u8).collect()).collect()
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.d).filter(move |&j| self.allows(i, j))
    }

    /// The matrix restricted to `members` (0-based), in the given order.
    pub fn restricted(&self, members: &[usize]) -> TransitionMatrix {
        let n = members.len();
        let mut t = TransitionMatrix::empty(n);
        for (a, &i) in members.iter().enumerate() {
            for (b, &j) in members.iter().enumerate() {
                t.set(a, b, self.allows(i, j));
            }
        }
        t
    }

    /// `reach[i][j]`: a path of length at least one leads from `i` to `j`.
    pub fn reachability(&self) -> Vec<Vec<bool>> {
        let d = self.d;
        let mut r: Vec<Vec<bool>> = (0..d).map(|i| (0..d).map(|j| self.allows(i, j)).collect()).collect();
        for k in 0..d {
            for i in 0..d {
                if r[i][k] {
                    for j in 0..d {
                        if r[k][j] {
                            r[i][j] = true;
                        }
                    }
                }
            }
        }
        r
    }

    pub fn is_irreducible(&self) -> bool {
        self.d > 0 && self.reachability().iter().all(|row| row.iter().all(|&x| x))
    }
}

/// The periodic point `generator^infinity`, with a primitive generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicOrbit {
    generator: Word,
}

impl PeriodicOrbit {
    pub fn new(generator: Word) -> Result<PeriodicOrbit> {
        let n = generator.len();
        if n == 0 {
            return Err(input_err!("periodic orbit needs a non-empty generator"));
        }
        let s = generator.symbols();
        for p in 1..n {
            if n.is_multiple_of(p) && (0..n).all(|k| s[k] == s[k % p]) {
                return Err(input_err!("generator {} is a power of a word of length {}", generator, p));
            }
        }
        Ok(PeriodicOrbit { generator })
    }

    pub fn generator(&self) -> &Word {
        &self.generator
    }

    pub fn period(&self) -> usize {
        self.generator.len()
    }

    /// Symbol at position `k` of the orbit point shifted `start` times.
    pub fn symbol_at(&self, start: usize, k: usize) -> Symbol {
        self.generator.symbols()[(start + k) % self.period()]
    }
}

/// A cycle through pairwise distinct symbols, stored rotated so that its
/// smallest symbol comes first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimpleCycle(Vec<Symbol>);

impl SimpleCycle {
    pub fn new(symbols: Vec<Symbol>) -> Result<SimpleCycle> {
        if symbols.is_empty() {
            return Err(input_err!("a cycle needs at least one symbol"));
        }
        for (a, s) in symbols.iter().enumerate() {
            if symbols[..a].contains(s) {
                return Err(input_err!("symbol {} repeats in a simple cycle", s));
            }
        }
        let root = (0..symbols.len()).min_by_key(|&k| symbols[k]).unwrap_or(0);
        let mut v = symbols;
        v.rotate_left(root);
        Ok(SimpleCycle(v))
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Edges `(x_k, x_{k+1})` including the closing one, 0-based.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.0.len();
        (0..n).map(move |k| (self.0[k].zero_based(), self.0[(k + 1) % n].zero_based()))
    }

    /// All `len()` rotations of the cycle, as words.
    pub fn rotations(&self) -> Vec<Word> {
        let n = self.0.len();
        (0..n).map(|r| Word((0..n).map(|k| self.0[(r + k) % n]).collect())).collect()
    }

    pub fn orbit(&self) -> PeriodicOrbit {
        PeriodicOrbit { generator: Word(self.0.clone()) }
    }

    /// Mean of `weight` over the edges of the cycle.
    pub fn mean(&self, weight: impl Fn(usize, usize) -> f64) -> f64 {
        self.edges().map(|(i, j)| weight(i, j)).sum::<f64>() / self.0.len() as f64
    }
}

impl fmt::Display for SimpleCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

/// Partition of the recurrent symbols into irreducible classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    /// Each class sorted; classes ordered by their smallest symbol.
    pub classes: Vec<Vec<Symbol>>,
    /// Symbols that lie on no cycle.
    pub transient: Vec<Symbol>,
}

impl Components {
    /// Index of the class containing `s`, if it is recurrent.
    pub fn class_of(&self, s: Symbol) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&s))
    }
}

/// `2^-n` where `n` is the first index at which the words differ; `0` when one
/// is a prefix of the other.
pub fn word_distance(x: &Word, y: &Word) -> f64 {
    match x.symbols().iter().zip(y.symbols()).position(|(a, b)| a != b) {
        Some(n) => libm::exp2(-(n as f64)),
        None => 0.0,
    }
}

/// Whether every consecutive pair of `w` is allowed by `t`.
pub fn sft_allows(t: &TransitionMatrix, w: &Word) -> Result<bool> {
    w.check(t.dim())?;
    Ok(w.transitions().all(|(i, j)| t.allows(i, j)))
}

/// Classes of mutually reachable symbols; symbols on no cycle go to `transient`.
pub fn irreducible_components(t: &TransitionMatrix) -> Components {
    let d = t.dim();
    let reach = t.reachability();
    let mut assigned = vec![false; d];
    let mut classes = Vec::new();
    let mut transient = Vec::new();
    for i in 0..d {
        if assigned[i] {
            continue;
        }
        if !reach[i][i] {
            transient.push(Symbol::from_zero_based(i));
            continue;
        }
        let class: Vec<Symbol> = (i..d).filter(|&j| reach[i][j] && reach[j][i]).map(Symbol::from_zero_based).collect();
        for s in &class {
            assigned[s.zero_based()] = true;
        }
        classes.push(class);
    }
    Components { classes, transient }
}

/// Every simple cycle of the graph of `t` (the complete graph if `None`),
/// each reported once. Cycles are found by depth-first search from each
/// root through larger symbols only, so the root is the smallest symbol.
pub fn enumerate_simple_cycles(d: usize, t: Option<&TransitionMatrix>) -> Vec<SimpleCycle> {
    let allowed = |i: usize, j: usize| t.is_none_or(|t| t.allows(i, j));
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(d);
    let mut on_path = vec![false; d];
    for root in 0..d {
        path.push(root);
        on_path[root] = true;
        extend_cycles(d, root, &allowed, &mut path, &mut on_path, &mut out);
        on_path[root] = false;
        path.pop();
    }
    out
}

fn extend_cycles(
    d: usize,
    root: usize,
    allowed: &impl Fn(usize, usize) -> bool,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    out: &mut Vec<SimpleCycle>,
) {
    let last = path[path.len() - 1];
    if allowed(last, root) {
        out.push(SimpleCycle(path.iter().map(|&i| Symbol::from_zero_based(i)).collect()));
    }
    for next in root + 1..d {
        if !on_path[next] && allowed(last, next) {
            on_path[next] = true;
            path.push(next);
            extend_cycles(d, root, allowed, path, on_path, out);
            path.pop();
            on_path[next] = false;
        }
    }
}

/// The `d` one-letter extensions of `w`.
pub fn cylinder_refinement_children(w: &Word, d: usize) -> Vec<Word> {
    (0..d).map(|a| w.extended(Symbol::from_zero_based(a))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[usize]) -> Word {
        Word::new(v).unwrap()
    }

    #[test]
    fn distance_is_dyadic_in_first_disagreement() {
        assert_eq!(word_distance(&w(&[1, 2, 1, 3, 4]), &w(&[1, 2, 1, 2, 3])), 0.125);
        assert_eq!(word_distance(&w(&[1, 2]), &w(&[1, 2])), 0.0);
        assert_eq!(word_distance(&w(&[2, 1]), &w(&[1, 1])), 1.0);
        assert_eq!(word_distance(&w(&[1]), &w(&[1, 2, 2])), 0.0);
    }

    fn four_symbol_graph() -> TransitionMatrix {
        // forbidden subwords: 12, 14, 23, 41, 44
        TransitionMatrix::from_rows(&[[1u8, 0, 1, 0], [1, 1, 0, 1], [1, 1, 1, 1], [0, 1, 1, 0]]).unwrap()
    }

    #[test]
    fn sft_membership() {
        let t = four_symbol_graph();
        for bad in [[1, 2], [1, 4], [2, 3], [4, 1], [4, 4]] {
            assert!(!sft_allows(&t, &w(&bad)).unwrap());
        }
        assert!(sft_allows(&t, &w(&[1, 3, 2, 4, 2])).unwrap());
        assert!(sft_allows(&t, &w(&[4])).unwrap());
        assert!(sft_allows(&TransitionMatrix::full(3), &w(&[3, 1, 2, 2])).unwrap());
        assert!(sft_allows(&t, &w(&[5])).is_err());
    }

    #[test]
    fn bad_transition_entries_are_rejected() {
        assert!(TransitionMatrix::from_rows(&[[0u8, 2], [1, 1]]).is_err());
        assert!(TransitionMatrix::from_rows(&[vec![0u8, 1], vec![1]]).is_err());
    }

    #[test]
    fn components_and_transient_bucket() {
        let c = irreducible_components(&TransitionMatrix::full(3));
        assert_eq!(c.classes.len(), 1);
        assert!(c.transient.is_empty());

        // 1 -> 2 -> 3 -> 2, 1 has no in-cycle
        let t = TransitionMatrix::from_rows(&[[0u8, 1, 0], [0, 0, 1], [0, 1, 0]]).unwrap();
        let c = irreducible_components(&t);
        assert_eq!(c.transient, vec![Symbol(1)]);
        assert_eq!(c.classes, vec![vec![Symbol(2), Symbol(3)]]);
        assert_eq!(c.class_of(Symbol(3)), Some(0));
        assert_eq!(c.class_of(Symbol(1)), None);
    }

    #[test]
    fn simple_cycle_counts() {
        assert_eq!(enumerate_simple_cycles(2, None).len(), 3);
        assert_eq!(enumerate_simple_cycles(3, None).len(), 8);
        let mut t = TransitionMatrix::full(3);
        t.set(0, 1, false);
        let cycles = enumerate_simple_cycles(3, Some(&t));
        let c12 = SimpleCycle::new(vec![Symbol(2), Symbol(1)]).unwrap();
        assert!(!cycles.contains(&c12));
        assert!(cycles.contains(&SimpleCycle::new(vec![Symbol(1), Symbol(3)]).unwrap()));
    }

    #[test]
    fn cycles_compare_up_to_rotation() {
        let a = SimpleCycle::new(vec![Symbol(3), Symbol(1), Symbol(2)]).unwrap();
        let b = SimpleCycle::new(vec![Symbol(1), Symbol(2), Symbol(3)]).unwrap();
        let c = SimpleCycle::new(vec![Symbol(1), Symbol(3), Symbol(2)]).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(SimpleCycle::new(vec![Symbol(1), Symbol(1)]).is_err());
        assert_eq!(a.rotations().len(), 3);
    }

    #[test]
    fn children() {
        assert_eq!(cylinder_refinement_children(&Word::empty(), 2), vec![w(&[1]), w(&[2])]);
        assert_eq!(cylinder_refinement_children(&w(&[1]), 2), vec![w(&[1, 1]), w(&[1, 2])]);
        assert_eq!(cylinder_refinement_children(&w(&[2, 1]), 3).len(), 3);
        assert_eq!(Word::all_of_length(3, 4).len(), 81);
    }

    #[test]
    fn periodic_orbit_generator_must_be_primitive() {
        assert!(PeriodicOrbit::new(w(&[1, 2, 1, 2])).is_err());
        assert!(PeriodicOrbit::new(w(&[1, 1])).is_err());
        assert_eq!(PeriodicOrbit::new(w(&[1, 1, 2])).unwrap().period(), 3);
    }
}

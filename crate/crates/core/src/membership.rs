//! Subgroup membership in `F_n` through folded (Stallings) automata.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::freegroup::{Generator, Word};

/// A folded automaton recognizing a finitely generated subgroup.
///
/// State 0 is the base. Transitions are labelled by positive generators;
/// inverse letters read edges backwards. No state has two outgoing or two
/// incoming edges with the same label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldedAutomaton {
    rank: usize,
    outgoing: Vec<Vec<Option<usize>>>,
    incoming: Vec<Vec<Option<usize>>>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.0[root] != root {
            root = self.0[root];
        }
        let mut x = x;
        while self.0[x] != root {
            let next = self.0[x];
            self.0[x] = root;
            x = next;
        }
        root
    }

    /// Merges two classes; the smaller id survives.
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            let (keep, drop) = if a < b { (a, b) } else { (b, a) };
            self.0[drop] = keep;
        }
    }
}

/// Builds the wedge of loops spelling `words` at the base and folds it.
pub fn build_stallings(rank: usize, words: &[Word]) -> Result<FoldedAutomaton> {
    if rank == 0 {
        return Err(Error::invalid("rank", "rank must be at least 1"));
    }
    let mut states = 1usize;
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for (i, w) in words.iter().enumerate() {
        if w.rank() != rank {
            return Err(Error::invalid(
                "subgroup",
                format!("generator {i} has rank {}, expected {rank}", w.rank()),
            ));
        }
        let n = w.len();
        let mut prev = 0;
        for (j, g) in w.letters().iter().enumerate() {
            let next = if j + 1 == n {
                0
            } else {
                states += 1;
                states - 1
            };
            if g.is_inverse() {
                edges.push((next, g.index(), prev));
            } else {
                edges.push((prev, g.index(), next));
            }
            prev = next;
        }
    }

    let mut uf = UnionFind((0..states).collect());
    loop {
        let mut merged = false;
        let mut out: HashMap<(usize, usize), usize> = HashMap::new();
        let mut inc: HashMap<(usize, usize), usize> = HashMap::new();
        for &(u, g, v) in &edges {
            let (u, v) = (uf.find(u), uf.find(v));
            match out.get(&(u, g)) {
                Some(&v2) if v2 != v => {
                    uf.union(v, v2);
                    merged = true;
                    break;
                }
                _ => {
                    out.insert((u, g), v);
                }
            }
            match inc.get(&(v, g)) {
                Some(&u2) if u2 != u => {
                    uf.union(u, u2);
                    merged = true;
                    break;
                }
                _ => {
                    inc.insert((v, g), u);
                }
            }
        }
        if !merged {
            break;
        }
    }

    let folded: BTreeSet<(usize, usize, usize)> = edges
        .iter()
        .map(|&(u, g, v)| (uf.find(u), g, uf.find(v)))
        .collect();

    // Canonical numbering by breadth-first search from the base.
    let mut adjacency: BTreeMap<usize, Vec<(Generator, usize)>> = BTreeMap::new();
    for &(u, g, v) in &folded {
        adjacency.entry(u).or_default().push((Generator::positive(g), v));
        adjacency.entry(v).or_default().push((Generator::negative(g), u));
    }
    for list in adjacency.values_mut() {
        list.sort();
    }
    let base = uf.find(0);
    let mut number: HashMap<usize, usize> = HashMap::from([(base, 0)]);
    let mut queue = VecDeque::from([base]);
    while let Some(s) = queue.pop_front() {
        for &(_, t) in adjacency.get(&s).map(Vec::as_slice).unwrap_or(&[]) {
            if !number.contains_key(&t) {
                number.insert(t, number.len());
                queue.push_back(t);
            }
        }
    }
    let n = number.len();
    let mut outgoing = vec![vec![None; rank]; n];
    let mut incoming = vec![vec![None; rank]; n];
    for &(u, g, v) in &folded {
        let (u, v) = (number[&u], number[&v]);
        outgoing[u][g] = Some(v);
        incoming[v][g] = Some(u);
    }
    Ok(FoldedAutomaton {
        rank,
        outgoing,
        incoming,
    })
}

impl FoldedAutomaton {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn states(&self) -> usize {
        self.outgoing.len()
    }

    pub fn edge_count(&self) -> usize {
        self.outgoing.iter().flatten().filter(|t| t.is_some()).count()
    }

    /// Positive transitions `(from, generator, to)` in canonical order.
    pub fn transitions(&self) -> Vec<(usize, usize, usize)> {
        let mut v = Vec::new();
        for (u, row) in self.outgoing.iter().enumerate() {
            for (g, t) in row.iter().enumerate() {
                if let Some(t) = t {
                    v.push((u, g, *t));
                }
            }
        }
        v
    }

    /// Where reading `g` from `state` leads, if anywhere.
    pub fn step(&self, state: usize, g: Generator) -> Option<usize> {
        if g.is_inverse() {
            self.incoming[state][g.index()]
        } else {
            self.outgoing[state][g.index()]
        }
    }

    /// Reads a word from `state`.
    pub fn read(&self, state: usize, w: &Word) -> Option<usize> {
        w.letters().iter().try_fold(state, |s, &g| self.step(s, g))
    }

    /// Whether `u` lies in the subgroup.
    pub fn member(&self, u: &Word) -> Result<bool> {
        if u.rank() != self.rank {
            return Err(Error::invalid(
                "word",
                format!("rank mismatch: word has rank {}, automaton {}", u.rank(), self.rank),
            ));
        }
        Ok(self.read(0, u) == Some(0))
    }

    /// Rank of the recognized subgroup: edges − states + 1.
    pub fn subgroup_rank(&self) -> usize {
        self.edge_count() + 1 - self.states()
    }

    /// A subgroup has finite index iff every state has every in- and
    /// out-transition.
    pub fn is_finite_index(&self) -> bool {
        self.outgoing.iter().chain(&self.incoming).all(|row| row.iter().all(Option::is_some))
    }
}

/// `v_x · v_y⁻¹` for every ordered pair of cells whose product lies in the
/// subgroup. Pairs with equal cells give the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HlTable {
    entries: BTreeMap<(usize, usize), Word>,
}

impl HlTable {
    pub fn get(&self, x: usize, y: usize) -> Option<&Word> {
        self.entries.get(&(x, y))
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), Word> {
        &self.entries
    }

    /// The distinct subgroup elements that occur.
    pub fn elements(&self) -> BTreeSet<Word> {
        self.entries.values().cloned().collect()
    }
}

/// Tabulates the members among all products `cells[x] · cells[y]⁻¹`.
pub fn compute_hl(aut: &FoldedAutomaton, cells: &[Word]) -> Result<HlTable> {
    let mut entries = BTreeMap::new();
    for (x, vx) in cells.iter().enumerate() {
        for (y, vy) in cells.iter().enumerate() {
            let h = crate::freegroup::concat(vx, &vy.inverse())?;
            if aut.member(&h)? {
                entries.insert((x, y), h);
            }
        }
    }
    Ok(HlTable { entries })
}

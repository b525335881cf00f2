//! Brute-force ground truth on finite balls of the Cayley graph.
//!
//! Nothing here shares code with the decision procedures beyond word
//! arithmetic: the searches enumerate explicit colourings of explicit group
//! elements. Answers are either certain or [`OracleAnswer::Unknown`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::caps::Caps;
use crate::coding::CodingInstance;
use crate::error::{Error, Result};
use crate::freegroup::{ball, Generator, Word};
use crate::tileset::{Letter, NNInstance};

/// A colouring of the ball of radius `radius` around the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallColoring {
    rank: usize,
    radius: usize,
    cells: BTreeMap<Word, Letter>,
}

impl BallColoring {
    pub fn new(rank: usize, radius: usize, cells: BTreeMap<Word, Letter>) -> Self {
        BallColoring {
            rank,
            radius,
            cells,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn get(&self, w: &Word) -> Option<Letter> {
        self.cells.get(w).copied()
    }

    pub fn set(&mut self, w: Word, a: Letter) {
        self.cells.insert(w, a);
    }

    pub fn cells(&self) -> &BTreeMap<Word, Letter> {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn count(&self, a: Letter) -> usize {
        self.cells.values().filter(|&&b| b == a).count()
    }

    /// True when every reduced word of length ≤ radius is coloured.
    pub fn is_total(&self) -> bool {
        crate::freegroup::ball_size(self.rank, self.radius) == self.cells.len() as u128
            && self.cells.keys().all(|w| w.len() <= self.radius)
    }
}

/// The forbidden patterns an oracle query is checked against.
#[derive(Debug, Clone, Copy)]
pub enum Rules<'a> {
    Nearest(&'a NNInstance),
    Codings(&'a CodingInstance),
}

impl Rules<'_> {
    fn rank(&self) -> usize {
        match self {
            Rules::Nearest(i) => i.rank(),
            Rules::Codings(c) => c.rank(),
        }
    }

    fn letters(&self) -> usize {
        match self {
            Rules::Nearest(i) => i.letter_count(),
            Rules::Codings(c) => c.alphabet().len(),
        }
    }

    /// Every rule as a list of `(offset, letter)` entries.
    fn patterns(&self) -> Vec<Vec<(Word, Letter)>> {
        match self {
            Rules::Nearest(inst) => inst
                .forbidden()
                .iter()
                .map(|t| {
                    vec![
                        (Word::identity(inst.rank()), t.from),
                        (inst.generators()[t.generator].clone(), t.to),
                    ]
                })
                .collect(),
            Rules::Codings(c) => c.codings().iter().map(|p| p.entries().to_vec()).collect(),
        }
    }

    fn describe(&self, pattern: usize) -> String {
        match self {
            Rules::Nearest(inst) => {
                let t = inst.forbidden().iter().nth(pattern).unwrap();
                format!(
                    "({}, {}, {})",
                    inst.letter_name(t.from),
                    inst.letter_name(t.to),
                    inst.generators()[t.generator]
                )
            }
            Rules::Codings(c) => {
                let entries: Vec<String> = c.codings()[pattern]
                    .entries()
                    .iter()
                    .map(|(w, a)| format!("({w}, {})", c.alphabet()[*a]))
                    .collect();
                format!("{{{}}}", entries.join(", "))
            }
        }
    }

    /// Nearest-neighbour rules over the free generators make the
    /// constraint graph on a ball a tree.
    fn is_tree(&self) -> bool {
        matches!(self, Rules::Nearest(i) if i.is_standard())
    }
}

/// What [`ball_colorings_exist`] asks for.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BallQuery {
    pub radius: usize,
    /// Letter required at the identity.
    pub seed: Option<Letter>,
    /// Letter that must occur at least this many times.
    pub min_count: Option<(Letter, usize)>,
}

impl BallQuery {
    pub fn radius(radius: usize) -> Self {
        BallQuery {
            radius,
            ..BallQuery::default()
        }
    }

    pub fn seeded(radius: usize, seed: Letter) -> Self {
        BallQuery {
            radius,
            seed: Some(seed),
            min_count: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleAnswer {
    Exists(BallColoring),
    Absent,
    Unknown,
}

impl OracleAnswer {
    /// `Some(true)` / `Some(false)` when conclusive.
    pub fn decided(&self) -> Option<bool> {
        match self {
            OracleAnswer::Exists(_) => Some(true),
            OracleAnswer::Absent => Some(false),
            OracleAnswer::Unknown => None,
        }
    }
}

/// A rule placed at a concrete position: cells (ball indices) and letters.
struct Placement {
    origin: usize,
    pattern: usize,
    cells: Vec<(usize, Letter)>,
}

struct Ball {
    words: Vec<Word>,
    index: HashMap<Word, usize>,
}

impl Ball {
    fn new(rank: usize, radius: usize, caps: &Caps) -> Result<Ball> {
        let words = ball(rank, radius, caps.ball)?;
        let index = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        Ok(Ball { words, index })
    }
}

/// All translates `g·pattern` lying entirely inside the ball.
fn placements(b: &Ball, patterns: &[Vec<(Word, Letter)>]) -> Vec<Placement> {
    let mut out = Vec::new();
    for (p, entries) in patterns.iter().enumerate() {
        let Some((w0, _)) = entries.first() else {
            // The empty pattern occurs everywhere.
            out.push(Placement {
                origin: 0,
                pattern: p,
                cells: Vec::new(),
            });
            continue;
        };
        let w0_inv = w0.inverse();
        let mut origins: BTreeSet<Word> = BTreeSet::new();
        for cell in &b.words {
            origins.insert(cell * &w0_inv);
        }
        for g in origins {
            let cells: Option<Vec<(usize, Letter)>> = entries
                .iter()
                .map(|(w, a)| b.index.get(&(&g * w)).map(|&i| (i, *a)))
                .collect();
            if let Some(cells) = cells {
                let origin = b.index.get(&g).copied().unwrap_or(usize::MAX);
                out.push(Placement {
                    origin,
                    pattern: p,
                    cells,
                });
            }
        }
    }
    out
}

/// Exhaustive search for a colouring of the radius-`r` ball that contains no
/// forbidden pattern entirely inside the ball.
///
/// Nearest-neighbour instances over the free generators are searched as a
/// tree (independent subtrees per child); everything else by chronological
/// backtracking over the ball in shortlex order, letters ascending. Running
/// out of the node budget gives [`OracleAnswer::Unknown`].
pub fn ball_colorings_exist(rules: Rules<'_>, query: BallQuery, caps: &Caps) -> Result<OracleAnswer> {
    let letters = rules.letters();
    for a in query.seed.into_iter().chain(query.min_count.map(|(a, _)| a)) {
        if a >= letters {
            return Err(Error::invalid("seed", format!("letter index {a} out of range")));
        }
    }
    let b = match Ball::new(rules.rank(), query.radius, caps) {
        Ok(b) => b,
        Err(e) if e.is_cap() => return Ok(OracleAnswer::Unknown),
        Err(e) => return Err(e),
    };
    let answer = if rules.is_tree() {
        let Rules::Nearest(inst) = rules else { unreachable!() };
        TreeSearch::new(inst, &b, query, caps.oracle_nodes).run()
    } else {
        let pats = rules.patterns();
        let places = placements(&b, &pats);
        LinearSearch::new(&b, &places, letters, query, caps.oracle_nodes).run()
    };
    if let OracleAnswer::Exists(coloring) = &answer {
        debug_assert!(validate_witness(coloring, rules).is_ok());
    }
    Ok(answer)
}

struct LinearSearch<'a> {
    words: &'a [Word],
    letters: usize,
    query: BallQuery,
    // Placements indexed by their last cell in assignment order.
    closing: Vec<Vec<&'a Placement>>,
    assignment: Vec<Letter>,
    budget: u64,
}

impl<'a> LinearSearch<'a> {
    fn new(b: &'a Ball, places: &'a [Placement], letters: usize, query: BallQuery, budget: u64) -> Self {
        let mut closing = vec![Vec::new(); b.words.len()];
        let mut always_violated = false;
        for p in places {
            match p.cells.iter().map(|&(c, _)| c).max() {
                Some(last) => closing[last].push(p),
                None => always_violated = true,
            }
        }
        let mut s = LinearSearch {
            words: &b.words,
            letters,
            query,
            closing,
            assignment: Vec::with_capacity(b.words.len()),
            budget,
        };
        if always_violated {
            s.letters = 0;
        }
        s
    }

    fn run(mut self) -> OracleAnswer {
        match self.search(0) {
            Some(true) => {
                let cells = self
                    .words
                    .iter()
                    .cloned()
                    .zip(self.assignment.iter().copied())
                    .collect();
                OracleAnswer::Exists(BallColoring::new(
                    self.words[0].rank(),
                    self.query.radius,
                    cells,
                ))
            }
            Some(false) => OracleAnswer::Absent,
            None => OracleAnswer::Unknown,
        }
    }

    fn violates(&self, cell: usize) -> bool {
        self.closing[cell]
            .iter()
            .any(|p| p.cells.iter().all(|&(c, a)| self.assignment[c] == a))
    }

    // Some(found) or None when the budget runs out.
    fn search(&mut self, cell: usize) -> Option<bool> {
        if self.budget == 0 {
            return None;
        }
        self.budget -= 1;
        if let Some((target, threshold)) = self.query.min_count {
            let have = self.assignment.iter().filter(|&&a| a == target).count();
            if have + (self.words.len() - cell) < threshold {
                return Some(false);
            }
        }
        if cell == self.words.len() {
            return Some(true);
        }
        let candidates: Vec<Letter> = match (cell, self.query.seed) {
            (0, Some(a)) => vec![a],
            _ => (0..self.letters).collect(),
        };
        for a in candidates {
            self.assignment.push(a);
            if !self.violates(cell) && self.search(cell + 1)? {
                return Some(true);
            }
            self.assignment.pop();
        }
        Some(false)
    }
}

struct TreeSearch<'a> {
    inst: &'a NNInstance,
    words: &'a [Word],
    children: Vec<Vec<(usize, Generator)>>,
    query: BallQuery,
    assignment: Vec<Letter>,
    budget: u64,
}

impl<'a> TreeSearch<'a> {
    fn new(inst: &'a NNInstance, b: &'a Ball, query: BallQuery, budget: u64) -> Self {
        let children = b
            .words
            .iter()
            .map(|w| {
                Generator::all(inst.rank())
                    .filter(|&g| w.last() != Some(g.inverse()))
                    .filter_map(|g| b.index.get(&w.times(g)).map(|&i| (i, g)))
                    .collect()
            })
            .collect();
        TreeSearch {
            inst,
            words: &b.words,
            children,
            query,
            assignment: vec![0; b.words.len()],
            budget,
        }
    }

    fn compatible(&self, parent: Letter, child: Letter, g: Generator) -> bool {
        use crate::tileset::Triple;
        if g.is_inverse() {
            !self.inst.forbids(Triple::new(child, parent, g.index()))
        } else {
            !self.inst.forbids(Triple::new(parent, child, g.index()))
        }
    }

    fn counting(&self) -> Option<Letter> {
        self.query.min_count.map(|(a, _)| a)
    }

    /// Colours the subtree under `cell` given its letter. Returns the
    /// largest achievable count of the counted letter (or 0 when not
    /// counting), `Some(None)` when impossible, `None` when out of budget.
    fn solve(&mut self, cell: usize, letter: Letter) -> Option<Option<usize>> {
        if self.budget == 0 {
            return None;
        }
        self.budget -= 1;
        self.assignment[cell] = letter;
        let mut total = usize::from(self.counting() == Some(letter));
        for k in 0..self.children[cell].len() {
            let (child, g) = self.children[cell][k];
            let mut best: Option<(usize, Letter)> = None;
            for b in 0..self.inst.letter_count() {
                if !self.compatible(letter, b, g) {
                    continue;
                }
                if let Some(count) = self.solve(child, b)? {
                    if best.is_none_or(|(c, _)| count > c) {
                        best = Some((count, b));
                    }
                    if self.counting().is_none() {
                        break;
                    }
                }
            }
            let Some((count, b)) = best else {
                return Some(None);
            };
            if self.counting().is_some() {
                // Later candidates overwrote the subtree; rewrite the best.
                self.solve(child, b)?;
            }
            total += count;
        }
        Some(Some(total))
    }

    fn run(mut self) -> OracleAnswer {
        let roots: Vec<Letter> = match self.query.seed {
            Some(a) => vec![a],
            None => (0..self.inst.letter_count()).collect(),
        };
        let threshold = self.query.min_count.map_or(0, |(_, t)| t);
        let mut best: Option<(usize, Letter)> = None;
        for a in roots {
            match self.solve(0, a) {
                None => return OracleAnswer::Unknown,
                Some(Some(count)) if count >= threshold => {
                    if best.is_none_or(|(c, _)| count > c) {
                        best = Some((count, a));
                    }
                    if self.counting().is_none() {
                        break;
                    }
                }
                Some(_) => {}
            }
        }
        let Some((_, a)) = best else {
            return OracleAnswer::Absent;
        };
        if self.solve(0, a).is_none() {
            return OracleAnswer::Unknown;
        }
        let cells = self
            .words
            .iter()
            .cloned()
            .zip(self.assignment.iter().copied())
            .collect();
        OracleAnswer::Exists(BallColoring::new(self.inst.rank(), self.query.radius, cells))
    }
}

/// The first forbidden pattern found in a colouring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Where the pattern is placed (its identity entry).
    pub at: Word,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pattern {} occurs at `{}`", self.rule, self.at)
    }
}

/// Checks every forbidden pattern that lies entirely inside the coloured
/// ball. Cells outside the colouring's domain make a placement irrelevant.
pub fn validate_witness(coloring: &BallColoring, rules: Rules<'_>) -> Result<(), Violation> {
    let words: Vec<Word> = coloring.cells.keys().cloned().collect();
    let index = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let b = Ball { words, index };
    let values: Vec<Letter> = coloring.cells.values().copied().collect();
    let pats = rules.patterns();
    for p in placements(&b, &pats) {
        if p.cells.iter().all(|&(c, a)| values[c] == a) {
            let at = if p.origin == usize::MAX {
                // Origin outside the ball: report the first cell instead.
                b.words[p.cells.first().map_or(0, |&(c, _)| c)].clone()
            } else {
                b.words[p.origin].clone()
            };
            return Err(Violation {
                at,
                rule: rules.describe(p.pattern),
            });
        }
    }
    Ok(())
}

/// All reduced products of at most `max_factors` subgroup generators and
/// their inverses.
pub fn enumerate_subgroup(rank: usize, words: &[Word], max_factors: usize) -> BTreeSet<Word> {
    let mut factors: Vec<Word> = words.to_vec();
    factors.extend(words.iter().map(Word::inverse));
    let mut all: BTreeSet<Word> = BTreeSet::from([Word::identity(rank)]);
    let mut frontier: BTreeSet<Word> = all.clone();
    for _ in 0..max_factors {
        let mut next = BTreeSet::new();
        for w in &frontier {
            for f in &factors {
                let p = w * f;
                if all.insert(p.clone()) {
                    next.insert(p);
                }
            }
        }
        frontier = next;
    }
    all
}

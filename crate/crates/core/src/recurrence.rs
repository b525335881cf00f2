//! Recurrence: configurations in which a given letter appears infinitely
//! often.
//!
//! On `F_n` with the free generators, a letter `a0` of the completeness
//! core is recurrent exactly when the tileset graph restricted to the core
//! carries a balloon at `a0`: a closed walk whose label is a reduced,
//! nontrivial word `w`, so that the walk can be repeated along the axis
//! `w^k` and the rest of the tree filled in by the extension map.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use crate::caps::Caps;
use crate::coding::{compile_codings, CodingDomain, CodingInstance};
use crate::error::{Error, Result};
use crate::freegroup::{ball, Generator, Word};
use crate::oracle::BallColoring;
use crate::tileset::{build_tileset_graph, completeness_core, CompletenessCore, Letter, NNInstance, TilesetGraph};

/// A closed walk `a_0 -s_1-> a_1 -s_2-> ... -s_n-> a_n = a_0` in the
/// tileset graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Balloon {
    letters: Vec<Letter>,
    steps: Vec<Generator>,
}

impl Balloon {
    /// `letters` lists `a_0, ..., a_n` with `a_n = a_0`; `steps` lists
    /// `s_1, ..., s_n`.
    pub fn new(letters: Vec<Letter>, steps: Vec<Generator>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::invalid("balloon", "a balloon needs at least one step"));
        }
        if letters.len() != steps.len() + 1 {
            return Err(Error::invalid("balloon", "expected one more letter than steps"));
        }
        if letters[0] != letters[steps.len()] {
            return Err(Error::invalid("balloon", "the walk does not return to its base"));
        }
        Ok(Balloon { letters, steps })
    }

    pub fn base(&self) -> Letter {
        self.letters[0]
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn steps(&self) -> &[Generator] {
        &self.steps
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The label `s_1 ⋯ s_n`, reduced.
    pub fn label(&self, rank: usize) -> Result<Word> {
        Word::new(rank, self.steps.iter().copied())
    }

    /// Largest `k ≤ ⌈n/2⌉ − 1` with `s_j = s_{n+1−j}⁻¹` for all `j ≤ k`.
    pub fn mirror_depth(&self) -> usize {
        let n = self.steps.len();
        let limit = n.div_ceil(2).saturating_sub(1);
        (1..=limit)
            .take_while(|&j| self.steps[j - 1] == self.steps[n - j].inverse())
            .count()
    }
}

/// The first balloon condition a walk fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalloonViolation {
    /// Step `step` (1-based) is not an edge of the tileset graph.
    MissingEdge { step: usize },
    /// Steps `step` and `step + 1` cancel.
    NotReduced { step: usize },
    /// The label folds back on itself to depth `depth` but `a_i ≠ a_{n−i}`.
    Mirror { depth: usize, i: usize },
    /// The pair `(a_i, s_{i+1})` repeats `(a_j, s_{j+1})` for `j < i`.
    RepeatedPair { first: usize, second: usize },
}

impl fmt::Display for BalloonViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BalloonViolation::MissingEdge { step } => write!(f, "step {step} is not an allowed edge"),
            BalloonViolation::NotReduced { step } => {
                write!(f, "steps {step} and {} cancel", step + 1)
            }
            BalloonViolation::Mirror { depth, i } => write!(
                f,
                "label folds back to depth {depth} but letters {i} and its mirror differ"
            ),
            BalloonViolation::RepeatedPair { first, second } => {
                write!(f, "positions {first} and {second} repeat the same letter and step")
            }
        }
    }
}

/// Checks the balloon conditions in order: edges, reduced label, mirror
/// condition, and (when `simple`) distinct letter/step pairs.
pub fn is_balloon(b: &Balloon, graph: &TilesetGraph, simple: bool) -> Result<(), BalloonViolation> {
    let n = b.len();
    for i in 1..=n {
        let s = b.steps[i - 1];
        let ok = s.index() < graph.generators()
            && b.letters[i - 1] < graph.letters()
            && b.letters[i] < graph.letters()
            && graph.allows_step(b.letters[i - 1], b.letters[i], s);
        if !ok {
            return Err(BalloonViolation::MissingEdge { step: i });
        }
    }
    for i in 1..n {
        if b.steps[i] == b.steps[i - 1].inverse() {
            return Err(BalloonViolation::NotReduced { step: i });
        }
    }
    let depth = b.mirror_depth();
    for i in 1..=depth {
        if b.letters[i] != b.letters[n - i] {
            return Err(BalloonViolation::Mirror { depth, i });
        }
    }
    if simple {
        let mut seen = std::collections::HashMap::new();
        for i in 1..n {
            if let Some(&j) = seen.get(&(b.letters[i], b.steps[i])) {
                return Err(BalloonViolation::RepeatedPair { first: j, second: i });
            }
            seen.insert((b.letters[i], b.steps[i]), i);
        }
    }
    Ok(())
}

struct BalloonSearch<'a> {
    graph: &'a TilesetGraph,
    core: &'a CompletenessCore,
    base: Letter,
    // can_close[a][g]: from `a`, having just stepped along `g`, some reduced
    // walk inside the core reaches the base.
    can_close: Vec<Vec<bool>>,
    letters: Vec<Letter>,
    steps: Vec<Generator>,
    used: HashSet<(Letter, Generator)>,
}

fn generator_slot(g: Generator, rank: usize) -> usize {
    g.index() + if g.is_inverse() { rank } else { 0 }
}

impl BalloonSearch<'_> {
    fn compute_can_close(graph: &TilesetGraph, core: &CompletenessCore, base: Letter) -> Vec<Vec<bool>> {
        let rank = graph.generators();
        let mut can = vec![vec![false; 2 * rank]; graph.letters()];
        let mut queue = VecDeque::new();
        for g in Generator::all(rank) {
            can[base][generator_slot(g, rank)] = true;
            queue.push_back((base, g));
        }
        // State (b, h) reaches the base; (a, g) steps to (b, h) when h ≠ g⁻¹.
        while let Some((b, h)) = queue.pop_front() {
            // a --h--> b means b --h⁻¹--> a.
            for &a in graph.step(b, h.inverse()) {
                if !core.contains(a) {
                    continue;
                }
                for g in Generator::all(rank) {
                    if g != h.inverse() && !can[a][generator_slot(g, rank)] {
                        can[a][generator_slot(g, rank)] = true;
                        queue.push_back((a, g));
                    }
                }
            }
        }
        can
    }

    fn search(&mut self) -> bool {
        let rank = self.graph.generators();
        let current = *self.letters.last().unwrap();
        let n = self.steps.len();
        for g in Generator::all(rank) {
            if self.steps.last().is_some_and(|&l| g == l.inverse()) {
                continue;
            }
            if n >= 1 && self.used.contains(&(current, g)) {
                continue;
            }
            for &b in self.graph.step(current, g) {
                if !self.core.contains(b) || !self.can_close[b][generator_slot(g, rank)] {
                    continue;
                }
                self.letters.push(b);
                self.steps.push(g);
                if n >= 1 {
                    self.used.insert((current, g));
                }
                if b == self.base {
                    let candidate = Balloon {
                        letters: self.letters.clone(),
                        steps: self.steps.clone(),
                    };
                    if is_balloon(&candidate, self.graph, true).is_ok() {
                        return true;
                    }
                }
                if self.search() {
                    return true;
                }
                if n >= 1 {
                    self.used.remove(&(current, g));
                }
                self.letters.pop();
                self.steps.pop();
            }
        }
        false
    }
}

/// Depth-first search for a simple balloon at `a0` inside the core. Steps
/// are tried with positive generators first, then letters in ascending
/// order.
pub fn find_simple_balloon(graph: &TilesetGraph, core: &CompletenessCore, a0: Letter) -> Option<Balloon> {
    if !core.contains(a0) {
        return None;
    }
    let mut s = BalloonSearch {
        graph,
        core,
        base: a0,
        can_close: BalloonSearch::compute_can_close(graph, core, a0),
        letters: vec![a0],
        steps: Vec::new(),
        used: HashSet::new(),
    };
    let found = s.search();
    found.then_some(Balloon {
        letters: s.letters,
        steps: s.steps,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RdpVerdict {
    pub recurrent: bool,
    pub balloon: Option<Balloon>,
    pub core: CompletenessCore,
}

/// Whether some configuration on `F_n` uses `a0` infinitely often.
pub fn decide_rdp_free(instance: &NNInstance, a0: Letter) -> Result<RdpVerdict> {
    instance.require_standard("recurrence")?;
    instance.require_letter(a0)?;
    let graph = build_tileset_graph(instance);
    let core = completeness_core(instance)?;
    let balloon = find_simple_balloon(&graph, &core, a0);
    Ok(RdpVerdict {
        recurrent: balloon.is_some(),
        balloon,
        core,
    })
}

/// On the integers: a shortest cycle `a0 → ... → a0` in the tileset graph,
/// listed without the closing letter.
pub fn decide_rdp_z(instance: &NNInstance, a0: Letter) -> Result<Option<Vec<Letter>>> {
    if instance.rank() != 1 {
        return Err(Error::invalid("rank", "recurrence on the integers needs rank 1"));
    }
    instance.require_standard("recurrence")?;
    instance.require_letter(a0)?;
    let graph = build_tileset_graph(instance);
    let n = graph.letters();
    let mut parent: Vec<Option<Letter>> = vec![None; n];
    let mut queue = VecDeque::new();
    for &b in graph.successors(a0, 0) {
        if parent[b].is_none() {
            parent[b] = Some(a0);
            queue.push_back(b);
        }
    }
    while let Some(v) = queue.pop_front() {
        if v == a0 {
            let mut cycle = vec![a0];
            let mut u = parent[a0].unwrap();
            while u != a0 {
                cycle.push(u);
                u = parent[u].unwrap();
            }
            cycle[1..].reverse();
            return Ok(Some(cycle));
        }
        for &b in graph.successors(v, 0) {
            if parent[b].is_none() {
                parent[b] = Some(v);
                queue.push_back(b);
            }
        }
    }
    Ok(None)
}

/// Recurrence for instances whose generators are arbitrary words: compile
/// the rules to codings, then ask for a balloon at any map carrying `a0`
/// at the identity.
pub fn decide_rdp_general(instance: &NNInstance, a0: Letter, caps: &Caps) -> Result<bool> {
    instance.require_letter(a0)?;
    if instance.is_standard() {
        if instance.rank() == 1 {
            return Ok(decide_rdp_z(instance, a0)?.is_some());
        }
        return Ok(decide_rdp_free(instance, a0)?.recurrent);
    }
    let compiled = compile_codings(&CodingInstance::from_nn(instance), CodingDomain::SuffixHull, caps)?;
    for phi in compiled.seed_set(a0) {
        if compiled.instance.rank() == 1 {
            if decide_rdp_z(&compiled.instance, phi)?.is_some() {
                return Ok(true);
            }
        } else if decide_rdp_free(&compiled.instance, phi)?.recurrent {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Group elements on the axis of a balloon inside the ball: `w^k`, `k ≥ 0`.
pub fn balloon_axis(balloon: &Balloon, rank: usize, radius: usize) -> Result<Vec<Word>> {
    let w = balloon.label(rank)?;
    let mut out = Vec::new();
    let mut p = Word::identity(rank);
    for _ in 0..=radius + balloon.len() {
        if p.len() <= radius {
            out.push(p.clone());
        }
        p = &p * &w;
    }
    Ok(out)
}

/// Builds the restriction to a ball of a configuration in which the
/// balloon repeats along its axis. Cells on the walks `w^k s_1 ⋯ s_i`
/// (`k ≥ 0`) get the balloon letters; every other cell gets the extension
/// letter of its parent.
pub fn balloon_to_configuration(
    instance: &NNInstance,
    balloon: &Balloon,
    core: &CompletenessCore,
    radius: usize,
    caps: &Caps,
) -> Result<BallColoring> {
    instance.require_standard("balloon expansion")?;
    let graph = build_tileset_graph(instance);
    if let Err(v) = is_balloon(balloon, &graph, false) {
        return Err(Error::invalid("balloon", v.to_string()));
    }
    if let Some(&a) = balloon.letters.iter().find(|&&a| !core.contains(a)) {
        return Err(Error::invalid(
            "balloon",
            format!("letter `{}` is not in the completeness core", instance.letter_name(a)),
        ));
    }
    let rank = instance.rank();
    let words = ball(rank, radius, caps.ball)?;
    let mut coloring = BallColoring::new(rank, radius, Default::default());
    let w = balloon.label(rank)?;
    let mut base = Word::identity(rank);
    for _ in 0..=radius + balloon.len() {
        let mut p = base.clone();
        for i in 0..=balloon.len() {
            if i > 0 {
                p = p.times(balloon.steps[i - 1]);
            }
            if p.len() <= radius {
                let a = balloon.letters[i];
                if let Some(old) = coloring.get(&p) {
                    if old != a {
                        return Err(Error::invalid("balloon", "walk assigns two letters to one cell"));
                    }
                }
                coloring.set(p.clone(), a);
            }
        }
        base = &base * &w;
    }
    // Shortlex order visits parents before children.
    for word in words {
        if coloring.get(&word).is_some() {
            continue;
        }
        let last = word.last().expect("identity is on the walk");
        let parent = word.times(last.inverse());
        let a = coloring.get(&parent).expect("parent assigned first");
        let b = core.extend(a, last).expect("core letters extend");
        coloring.set(word, b);
    }
    Ok(coloring)
}

/// Grows a configuration from `seed` at the identity with the extension
/// map.
pub fn core_to_configuration(
    instance: &NNInstance,
    core: &CompletenessCore,
    seed: Letter,
    radius: usize,
    caps: &Caps,
) -> Result<BallColoring> {
    instance.require_standard("core expansion")?;
    if !core.contains(seed) {
        return Err(Error::invalid("seed", "seed is not in the completeness core"));
    }
    let rank = instance.rank();
    let mut coloring = BallColoring::new(rank, radius, Default::default());
    for word in ball(rank, radius, caps.ball)? {
        let a = match word.last() {
            None => seed,
            Some(last) => {
                let parent = word.times(last.inverse());
                core.extend(coloring.get(&parent).unwrap(), last).unwrap()
            }
        };
        coloring.set(word, a);
    }
    Ok(coloring)
}

/// Letters that are recurrent in some configuration on `F_n`.
pub fn recurrent_letters(instance: &NNInstance) -> Result<BTreeSet<Letter>> {
    let mut out = BTreeSet::new();
    for a in 0..instance.letter_count() {
        if decide_rdp_free(instance, a)?.recurrent {
            out.insert(a);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{validate_witness, Rules};
    use crate::tileset::Triple;

    const A: Generator = Generator::positive(0);
    const B: Generator = Generator::positive(1);
    const BI: Generator = Generator::negative(1);

    /// Letters o, k, r, w; edges o-b->k, k-a->r, r-b->w, w-a->k and a
    /// self-loop on every letter along both generators.
    fn okrw() -> NNInstance {
        let allowed: BTreeSet<Triple> = [
            Triple::new(0, 1, 1),
            Triple::new(1, 2, 0),
            Triple::new(2, 3, 1),
            Triple::new(3, 1, 0),
        ]
        .into_iter()
        .chain((0..4).flat_map(|x| [Triple::new(x, x, 0), Triple::new(x, x, 1)]))
        .collect();
        let mut forbidden = Vec::new();
        for s in 0..2 {
            for x in 0..4 {
                for y in 0..4 {
                    if !allowed.contains(&Triple::new(x, y, s)) {
                        forbidden.push(Triple::new(x, y, s));
                    }
                }
            }
        }
        let names = ["o", "k", "r", "w"].map(String::from).to_vec();
        NNInstance::standard(2, names, forbidden).unwrap()
    }

    fn okrw_balloon() -> Balloon {
        Balloon::new(vec![0, 1, 2, 3, 1, 0], vec![B, A, B, A, BI]).unwrap()
    }

    #[test]
    fn figure_balloon_is_valid() {
        let inst = okrw();
        let graph = build_tileset_graph(&inst);
        let b = okrw_balloon();
        assert_eq!(is_balloon(&b, &graph, true), Ok(()));
        assert_eq!(b.mirror_depth(), 1);
        assert_eq!(b.label(2).unwrap(), Word::parse(2, "b a b a b-").unwrap());
    }

    #[test]
    fn figure_balloon_expansion() {
        let inst = okrw();
        let core = completeness_core(&inst).unwrap();
        assert_eq!(core.len(), 4);
        let caps = Caps::default();
        let b = okrw_balloon();
        let w = b.label(2).unwrap();
        assert_eq!(w.pow(2).len(), 8);

        let col = balloon_to_configuration(&inst, &b, &core, 5, &caps).unwrap();
        assert_eq!(col.get(&Word::identity(2)), Some(0));
        assert_eq!(col.get(&w), Some(0));
        assert!(validate_witness(&col, Rules::Nearest(&inst)).is_ok());

        let col = balloon_to_configuration(&inst, &b, &core, 8, &caps).unwrap();
        for k in 0..=2 {
            assert_eq!(col.get(&w.pow(k)), Some(0), "k={k}");
        }
        assert!(validate_witness(&col, Rules::Nearest(&inst)).is_ok());
        assert_eq!(balloon_axis(&b, 2, 8).unwrap().len(), 3);
    }

    #[test]
    fn violations_reported_in_order() {
        let graph = build_tileset_graph(&okrw());
        let missing = Balloon::new(vec![0, 2, 0], vec![A, Generator::negative(0)]).unwrap();
        assert_eq!(is_balloon(&missing, &graph, false), Err(BalloonViolation::MissingEdge { step: 1 }));
        let cancel = Balloon::new(vec![0, 0, 0], vec![A, Generator::negative(0)]).unwrap();
        assert_eq!(is_balloon(&cancel, &graph, false), Err(BalloonViolation::NotReduced { step: 1 }));
        // Label b a b a b a b-: the ends fold by one step, and a_1 = o
        // differs from a_6 = k.
        let mirror = Balloon::new(vec![0, 0, 0, 1, 2, 3, 1, 0], vec![B, A, B, A, B, A, BI]).unwrap();
        assert_eq!(is_balloon(&mirror, &graph, false), Err(BalloonViolation::Mirror { depth: 1, i: 1 }));
        let repeated = Balloon::new(vec![0, 0, 0, 0], vec![A, A, A]).unwrap();
        assert_eq!(is_balloon(&repeated, &graph, false), Ok(()));
        assert_eq!(
            is_balloon(&repeated, &graph, true),
            Err(BalloonViolation::RepeatedPair { first: 1, second: 2 })
        );
    }

    #[test]
    fn mirror_condition() {
        // Letters 0,1 with edges 0-a->1, 1-b->1, 1-a->0 and self-loops on 0.
        let allowed = [
            Triple::new(0, 1, 0),
            Triple::new(1, 1, 1),
            Triple::new(1, 0, 0),
            Triple::new(0, 0, 0),
            Triple::new(0, 0, 1),
        ];
        let mut forbidden = Vec::new();
        for s in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    if !allowed.contains(&Triple::new(x, y, s)) {
                        forbidden.push(Triple::new(x, y, s));
                    }
                }
            }
        }
        let inst = NNInstance::numbered(2, 2, forbidden).unwrap();
        let graph = build_tileset_graph(&inst);
        // 0 -a-> 1 -b-> 1 -a-> 0: label a b a, no fold.
        let ok = Balloon::new(vec![0, 1, 1, 0], vec![A, B, A]).unwrap();
        assert_eq!(is_balloon(&ok, &graph, true), Ok(()));
        // Same walk read backwards is also a balloon.
        let back = Balloon::new(vec![0, 1, 1, 0], vec![Generator::negative(0), BI, Generator::negative(0)]).unwrap();
        assert_eq!(is_balloon(&back, &graph, true), Ok(()));
    }

    #[test]
    fn golden_mean_recurrence() {
        let g = NNInstance::numbered(1, 2, [Triple::new(1, 1, 0)]).unwrap();
        assert_eq!(decide_rdp_z(&g, 1).unwrap(), Some(vec![1, 0]));
        assert_eq!(decide_rdp_z(&g, 0).unwrap(), Some(vec![0]));
        let v = decide_rdp_free(&g, 1).unwrap();
        assert!(v.recurrent);
        let b = v.balloon.unwrap();
        assert_eq!(b.letters(), &[1, 0, 1]);
    }

    #[test]
    fn transient_letter() {
        // 1 may appear once: 0* 1 2*, with 2 never returning to 0 or 1.
        let mut forbidden = Vec::new();
        for (a, b) in [(0, 2), (1, 0), (1, 1), (2, 0), (2, 1)] {
            forbidden.push(Triple::new(a, b, 0));
        }
        let inst = NNInstance::numbered(1, 3, forbidden).unwrap();
        assert!(decide_rdp_z(&inst, 1).unwrap().is_none());
        assert!(decide_rdp_z(&inst, 0).unwrap().is_some());
        assert!(crate::tileset::decide_sdp_free(&inst, 1).unwrap());
        assert!(!decide_rdp_free(&inst, 1).unwrap().recurrent);
    }

    #[test]
    fn core_expansion_is_valid() {
        let inst = okrw();
        let core = completeness_core(&inst).unwrap();
        let col = core_to_configuration(&inst, &core, 2, 3, &Caps::default()).unwrap();
        assert_eq!(col.get(&Word::identity(2)), Some(2));
        assert!(col.is_total());
        assert!(validate_witness(&col, Rules::Nearest(&inst)).is_ok());
    }
}

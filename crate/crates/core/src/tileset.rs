//! Nearest-neighbour SFT instances, tileset graphs and the emptiness and
//! seeded decisions on free groups and on the integers.
//!
//! On `F_n` with its free generating set the Cayley graph is a tree, so a
//! configuration exists exactly when some letters can be extended forever
//! in every direction. [`completeness_core`] computes the largest such set
//! of letters (the completeness core) by pruning letters that lack a
//! neighbour along some signed generator. Each pruning round is
//! synchronous: a letter survives `r` rounds exactly when the radius-`r`
//! ball admits a valid colouring with that letter at the centre.
//!
//! Seeded decision: a letter `a0` can sit at the identity iff it belongs to
//! the core. Membership suffices because the extension map grows a
//! configuration outward from the identity one tree edge at a time; it is
//! necessary because every letter used by a configuration survives every
//! pruning round.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::freegroup::{Generator, Word};

pub type Letter = usize;

/// A forbidden nearest-neighbour pattern: `from` at `g` and `to` at
/// `g · generators[generator]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub from: Letter,
    pub to: Letter,
    pub generator: usize,
}

impl Triple {
    pub const fn new(from: Letter, to: Letter, generator: usize) -> Self {
        Triple {
            from,
            to,
            generator,
        }
    }
}

/// Alphabet, generator words and forbidden triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NNInstance {
    rank: usize,
    alphabet: Vec<String>,
    generators: Vec<Word>,
    forbidden: BTreeSet<Triple>,
}

impl NNInstance {
    pub fn new(
        rank: usize,
        alphabet: Vec<String>,
        generators: Vec<Word>,
        forbidden: impl IntoIterator<Item = Triple>,
    ) -> Result<Self> {
        if rank == 0 {
            return Err(Error::invalid("rank", "rank must be at least 1"));
        }
        let mut names = BTreeSet::new();
        for name in &alphabet {
            if !names.insert(name.as_str()) {
                return Err(Error::invalid("alphabet", format!("duplicate letter `{name}`")));
            }
        }
        let mut seen = BTreeSet::new();
        for (i, g) in generators.iter().enumerate() {
            if g.rank() != rank {
                return Err(Error::invalid(
                    "generators",
                    format!("generator {i} has rank {}, expected {rank}", g.rank()),
                ));
            }
            if g.is_identity() {
                return Err(Error::invalid(
                    "generators",
                    format!("generator {i} is the identity"),
                ));
            }
            if !seen.insert(g.clone()) {
                return Err(Error::invalid(
                    "generators",
                    format!("generator {i} (`{g}`) is repeated"),
                ));
            }
        }
        let forbidden: BTreeSet<Triple> = forbidden.into_iter().collect();
        for t in &forbidden {
            if t.from >= alphabet.len() || t.to >= alphabet.len() {
                return Err(Error::invalid(
                    "forbidden",
                    format!("triple {t:?} references a missing letter"),
                ));
            }
            if t.generator >= generators.len() {
                return Err(Error::invalid(
                    "forbidden",
                    format!("triple {t:?} references a missing generator"),
                ));
            }
        }
        Ok(NNInstance {
            rank,
            alphabet,
            generators,
            forbidden,
        })
    }

    /// An instance over the free generators `a, b, ...` (or `t`).
    pub fn standard(
        rank: usize,
        alphabet: Vec<String>,
        forbidden: impl IntoIterator<Item = Triple>,
    ) -> Result<Self> {
        NNInstance::new(rank, alphabet, Word::free_generators(rank), forbidden)
    }

    /// Standard instance whose letters are named `0`, `1`, ...
    pub fn numbered(
        rank: usize,
        letters: usize,
        forbidden: impl IntoIterator<Item = Triple>,
    ) -> Result<Self> {
        NNInstance::standard(rank, numbered_alphabet(letters), forbidden)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn letter_count(&self) -> usize {
        self.alphabet.len()
    }

    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    pub fn forbidden(&self) -> &BTreeSet<Triple> {
        &self.forbidden
    }

    pub fn forbids(&self, t: Triple) -> bool {
        self.forbidden.contains(&t)
    }

    /// True when the generator list is exactly the free basis in order.
    pub fn is_standard(&self) -> bool {
        self.generators == Word::free_generators(self.rank)
    }

    pub fn letter(&self, name: &str) -> Result<Letter> {
        self.alphabet
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| Error::invalid("seed", format!("unknown letter `{name}`")))
    }

    pub fn letter_name(&self, a: Letter) -> &str {
        &self.alphabet[a]
    }

    pub fn check_caps(&self, caps: &Caps) -> Result<()> {
        Caps::check("alphabet", caps.alphabet, self.alphabet.len())?;
        Caps::check("rank", caps.rank, self.rank)
    }

    pub(crate) fn require_standard(&self, procedure: &str) -> Result<()> {
        if self.is_standard() {
            Ok(())
        } else {
            Err(Error::invalid(
                "generators",
                format!("{procedure} requires the free generating set"),
            ))
        }
    }

    pub(crate) fn require_letter(&self, a: Letter) -> Result<()> {
        if a < self.alphabet.len() {
            Ok(())
        } else {
            Err(Error::invalid("seed", format!("letter index {a} out of range")))
        }
    }
}

pub(crate) fn numbered_alphabet(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// The tileset graph: one vertex per letter, one labelled edge per allowed
/// triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TilesetGraph {
    letters: usize,
    successors: Vec<Vec<Vec<Letter>>>,
    predecessors: Vec<Vec<Vec<Letter>>>,
}

pub fn build_tileset_graph(instance: &NNInstance) -> TilesetGraph {
    let n = instance.letter_count();
    let gens = instance.generators().len();
    let mut successors = vec![vec![Vec::new(); n]; gens];
    let mut predecessors = vec![vec![Vec::new(); n]; gens];
    for s in 0..gens {
        for a in 0..n {
            for b in 0..n {
                if !instance.forbids(Triple::new(a, b, s)) {
                    successors[s][a].push(b);
                    predecessors[s][b].push(a);
                }
            }
        }
    }
    TilesetGraph {
        letters: n,
        successors,
        predecessors,
    }
}

impl TilesetGraph {
    pub fn letters(&self) -> usize {
        self.letters
    }

    pub fn generators(&self) -> usize {
        self.successors.len()
    }

    pub fn has_edge(&self, a: Letter, b: Letter, s: usize) -> bool {
        self.successors[s][a].binary_search(&b).is_ok()
    }

    pub fn successors(&self, a: Letter, s: usize) -> &[Letter] {
        &self.successors[s][a]
    }

    pub fn predecessors(&self, b: Letter, s: usize) -> &[Letter] {
        &self.predecessors[s][b]
    }

    /// Letters reachable from `a` by one step along a signed generator:
    /// forward along `s`, backward along `s⁻¹`.
    pub fn step(&self, a: Letter, g: Generator) -> &[Letter] {
        if g.is_inverse() {
            self.predecessors(a, g.index())
        } else {
            self.successors(a, g.index())
        }
    }

    /// Whether stepping from `a` to `b` along the signed generator `g` uses
    /// an edge (forward edge `(a, b, s)` or backward edge `(b, a, s)`).
    pub fn allows_step(&self, a: Letter, b: Letter, g: Generator) -> bool {
        if g.is_inverse() {
            self.has_edge(b, a, g.index())
        } else {
            self.has_edge(a, b, g.index())
        }
    }

    pub fn edge_count(&self) -> usize {
        self.successors.iter().flatten().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = Triple> + '_ {
        self.successors.iter().enumerate().flat_map(|(s, rows)| {
            rows.iter()
                .enumerate()
                .flat_map(move |(a, bs)| bs.iter().map(move |&b| Triple::new(a, b, s)))
        })
    }
}

/// The completeness core and an extension map witnessing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletenessCore {
    members: Vec<bool>,
    extension: BTreeMap<(Letter, Generator), Letter>,
    rounds: usize,
}

impl CompletenessCore {
    pub fn contains(&self, a: Letter) -> bool {
        self.members.get(a).copied().unwrap_or(false)
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.members.len()).filter(|&a| self.members[a]).collect()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&m| m)
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    /// `f(a, g)`: the least core letter `b` such that stepping from `a` to
    /// `b` along `g` is allowed.
    pub fn extend(&self, a: Letter, g: Generator) -> Option<Letter> {
        self.extension.get(&(a, g)).copied()
    }

    pub fn extension(&self) -> &BTreeMap<(Letter, Generator), Letter> {
        &self.extension
    }

    /// Number of pruning rounds that removed at least one letter.
    pub fn rounds(&self) -> usize {
        self.rounds
    }
}

fn prune_once(graph: &TilesetGraph, alive: &[bool]) -> Vec<bool> {
    let has_alive = |xs: &[Letter]| xs.iter().any(|&b| alive[b]);
    (0..graph.letters())
        .map(|a| {
            alive[a]
                && (0..graph.generators()).all(|s| {
                    has_alive(graph.successors(a, s)) && has_alive(graph.predecessors(a, s))
                })
        })
        .collect()
}

/// Survivor sets `L_0 = A, L_1, ...` of synchronous pruning, ending with
/// the first set that repeats (the core). `levels[r]` for `r` beyond the end
/// equals the last entry.
pub fn pruning_levels(instance: &NNInstance) -> Result<Vec<Vec<bool>>> {
    instance.require_standard("completeness pruning")?;
    let graph = build_tileset_graph(instance);
    let mut levels = vec![vec![true; graph.letters()]];
    loop {
        let next = prune_once(&graph, levels.last().unwrap());
        if &next == levels.last().unwrap() {
            return Ok(levels);
        }
        levels.push(next);
    }
}

/// Whether `a` survives `rounds` pruning rounds.
pub fn survives(levels: &[Vec<bool>], a: Letter, rounds: usize) -> bool {
    levels[rounds.min(levels.len() - 1)][a]
}

/// Greatest fixpoint of the pruning pass together with the least-letter
/// extension map.
pub fn completeness_core(instance: &NNInstance) -> Result<CompletenessCore> {
    let levels = pruning_levels(instance)?;
    let graph = build_tileset_graph(instance);
    let members = levels.last().unwrap().clone();
    Ok(core_from_members(&graph, instance.rank(), members, levels.len() - 1))
}

fn core_from_members(
    graph: &TilesetGraph,
    rank: usize,
    members: Vec<bool>,
    rounds: usize,
) -> CompletenessCore {
    let mut extension = BTreeMap::new();
    for a in (0..graph.letters()).filter(|&a| members[a]) {
        for g in Generator::all(rank) {
            let b = graph
                .step(a, g)
                .iter()
                .copied()
                .find(|&b| members[b])
                .expect("core letter without witness");
            extension.insert((a, g), b);
        }
    }
    CompletenessCore {
        members,
        extension,
        rounds,
    }
}

/// Emptiness verdict with the completeness core as witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DpVerdict {
    pub nonempty: bool,
    pub core: CompletenessCore,
}

/// Nonemptiness on `F_n` with the free generating set: the core is nonempty.
pub fn decide_dp_free(instance: &NNInstance) -> Result<DpVerdict> {
    let core = completeness_core(instance)?;
    Ok(DpVerdict {
        nonempty: !core.is_empty(),
        core,
    })
}

/// Seeded decision on `F_n`: `a0` belongs to the core.
pub fn decide_sdp_free(instance: &NNInstance, a0: Letter) -> Result<bool> {
    instance.require_letter(a0)?;
    Ok(completeness_core(instance)?.contains(a0))
}

/// Outcome of the windowed decision on the integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowVerdict {
    pub nonempty: bool,
    /// All generator exponents are multiples of `scale`; the problem splits
    /// into `scale` independent copies on `scale·ℤ`.
    pub scale: u64,
    /// Window length on the rescaled lattice.
    pub window: usize,
    pub blocks: usize,
    pub surviving_blocks: usize,
    /// A periodic pattern on the rescaled lattice, when nonempty.
    pub period: Option<Vec<Letter>>,
}

impl WindowVerdict {
    /// The periodic witness evaluated at `t^i`: every coset of `scale·ℤ`
    /// repeats the same period.
    pub fn letter_at(&self, i: i64) -> Option<Letter> {
        let period = self.period.as_ref()?;
        let q = i.div_euclid(self.scale as i64);
        Some(period[q.rem_euclid(period.len() as i64) as usize])
    }
}

struct Constraints {
    scale: u64,
    window: usize,
    letters: usize,
    // forbidden[k][a * letters + b]: `a` at i and `b` at i + k (k ≥ 1).
    forbidden: Vec<Vec<bool>>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn z_constraints(instance: &NNInstance, caps: &Caps) -> Result<Constraints> {
    if instance.rank() != 1 {
        return Err(Error::invalid(
            "rank",
            "the windowed decision requires rank 1 (the integers)",
        ));
    }
    instance.check_caps(caps)?;
    let exponents: Vec<i64> = instance.generators().iter().map(Word::exponent_sum).collect();
    let used: BTreeSet<usize> = instance.forbidden().iter().map(|t| t.generator).collect();
    let scale = used
        .iter()
        .fold(0u64, |acc, &s| gcd(acc, exponents[s].unsigned_abs()))
        .max(1);
    let window = used
        .iter()
        .map(|&s| (exponents[s].unsigned_abs() / scale) as usize)
        .max()
        .unwrap_or(1);
    Caps::check("window", caps.window, window)?;
    let n = instance.letter_count();
    let mut forbidden = vec![vec![false; n * n]; window + 1];
    for t in instance.forbidden() {
        let k = exponents[t.generator];
        let d = (k.unsigned_abs() / scale) as usize;
        let (a, b) = if k > 0 { (t.from, t.to) } else { (t.to, t.from) };
        forbidden[d][a * n + b] = true;
    }
    Ok(Constraints {
        scale,
        window,
        letters: n,
        forbidden,
    })
}

struct WindowGraph {
    blocks: Vec<Vec<Letter>>,
    successors: Vec<Vec<usize>>,
    alive: Vec<bool>,
}

impl Constraints {
    fn clashes(&self, block: &[Letter], next: Letter) -> bool {
        let p = block.len();
        (1..=p.min(self.window)).any(|k| self.forbidden[k][block[p - k] * self.letters + next])
    }
}

fn window_graph(c: &Constraints, caps: &Caps) -> Result<WindowGraph> {
    let w = c.window;
    let mut blocks = Vec::new();
    let mut stack: Vec<Letter> = Vec::with_capacity(w);
    fn grow(
        c: &Constraints,
        w: usize,
        stack: &mut Vec<Letter>,
        out: &mut Vec<Vec<Letter>>,
        cap: usize,
    ) -> Result<()> {
        if stack.len() == w {
            Caps::check("window_blocks", cap, out.len() + 1)?;
            out.push(stack.clone());
            return Ok(());
        }
        for a in 0..c.letters {
            if !c.clashes(stack, a) {
                stack.push(a);
                grow(c, w, stack, out, cap)?;
                stack.pop();
            }
        }
        Ok(())
    }
    grow(c, w, &mut stack, &mut blocks, caps.window_blocks)?;

    let mut by_prefix: HashMap<&[Letter], Vec<usize>> = HashMap::new();
    for (i, b) in blocks.iter().enumerate() {
        by_prefix.entry(&b[..w - 1]).or_default().push(i);
    }
    let successors: Vec<Vec<usize>> = blocks
        .iter()
        .map(|u| {
            by_prefix
                .get(&u[1..])
                .map(|vs| {
                    vs.iter()
                        .copied()
                        .filter(|&v| !c.forbidden[w][u[0] * c.letters + blocks[v][w - 1]])
                        .collect()
                })
                .unwrap_or_default()
        })
        .collect();

    // Trim to the largest subgraph where every vertex has an in- and an
    // out-edge: exactly the blocks lying on bi-infinite walks.
    let n = blocks.len();
    let mut indeg = vec![0usize; n];
    let mut predecessors = vec![Vec::new(); n];
    for (u, vs) in successors.iter().enumerate() {
        for &v in vs {
            indeg[v] += 1;
            predecessors[v].push(u);
        }
    }
    let mut outdeg: Vec<usize> = successors.iter().map(Vec::len).collect();
    let mut alive = vec![true; n];
    let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0 || outdeg[v] == 0).collect();
    while let Some(v) = queue.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &x in &successors[v] {
            if alive[x] {
                indeg[x] -= 1;
                if indeg[x] == 0 {
                    queue.push(x);
                }
            }
        }
        for &x in &predecessors[v] {
            if alive[x] {
                outdeg[x] -= 1;
                if outdeg[x] == 0 {
                    queue.push(x);
                }
            }
        }
    }
    Ok(WindowGraph {
        blocks,
        successors,
        alive,
    })
}

fn no_constraints(instance: &NNInstance) -> bool {
    instance.forbidden().is_empty()
}

/// Nonemptiness on the integers for generators that are arbitrary powers
/// of `t`.
///
/// The instance is recoded as a window SFT: vertices are the valid blocks
/// of length `W` (the largest exponent after dividing out the common
/// factor) and edges join overlapping blocks whose union is valid. The SFT
/// is nonempty iff this graph has a cycle.
pub fn decide_dp_z_windowed(instance: &NNInstance, caps: &Caps) -> Result<WindowVerdict> {
    let c = z_constraints(instance, caps)?;
    if no_constraints(instance) {
        let nonempty = instance.letter_count() > 0;
        return Ok(WindowVerdict {
            nonempty,
            scale: 1,
            window: 1,
            blocks: instance.letter_count(),
            surviving_blocks: instance.letter_count(),
            period: nonempty.then(|| vec![0]),
        });
    }
    let g = window_graph(&c, caps)?;
    let surviving = g.alive.iter().filter(|&&a| a).count();
    let period = g.alive.iter().position(|&a| a).map(|start| {
        // Follow the first surviving successor until a block repeats.
        let mut seen = HashMap::new();
        let mut path = Vec::new();
        let mut v = start;
        loop {
            if let Some(&i) = seen.get(&v) {
                break path[i..].iter().map(|&b: &usize| g.blocks[b][0]).collect();
            }
            seen.insert(v, path.len());
            path.push(v);
            v = *g.successors[v]
                .iter()
                .find(|&&x| g.alive[x])
                .expect("trimmed vertex without successor");
        }
    });
    Ok(WindowVerdict {
        nonempty: surviving > 0,
        scale: c.scale,
        window: c.window,
        blocks: g.blocks.len(),
        surviving_blocks: surviving,
        period,
    })
}

/// Seeded decision on the integers: some block on a bi-infinite walk starts
/// with `a0`.
pub fn decide_sdp_z_windowed(instance: &NNInstance, a0: Letter, caps: &Caps) -> Result<bool> {
    instance.require_letter(a0)?;
    let c = z_constraints(instance, caps)?;
    if no_constraints(instance) {
        return Ok(true);
    }
    let g = window_graph(&c, caps)?;
    Ok(g
        .blocks
        .iter()
        .zip(&g.alive)
        .any(|(b, &alive)| alive && b[0] == a0))
}

/// One seeded instance per letter; the DP answer is the OR of their answers.
pub fn dp_to_seeded_family(instance: &NNInstance) -> Vec<(NNInstance, Letter)> {
    (0..instance.letter_count())
        .map(|a| (instance.clone(), a))
        .collect()
}

/// One recurring instance per letter. On an infinite group some letter of a
/// configuration repeats infinitely often, so the DP answer is again the OR.
pub fn dp_to_recurring_family(instance: &NNInstance) -> Vec<(NNInstance, Letter)> {
    dp_to_seeded_family(instance)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_triples(letters: usize, gens: usize) -> Vec<Triple> {
        let mut v = Vec::new();
        for s in 0..gens {
            for a in 0..letters {
                for b in 0..letters {
                    v.push(Triple::new(a, b, s));
                }
            }
        }
        v
    }

    #[test]
    fn graph_complements_forbidden() {
        // Alphabet {0,1,2}, generators s and t, (2,1,t) forbidden.
        let inst = NNInstance::numbered(2, 3, [Triple::new(2, 1, 1)]).unwrap();
        let g = build_tileset_graph(&inst);
        assert!(!g.has_edge(2, 1, 1));
        assert!(g.has_edge(2, 1, 0));
        assert_eq!(g.edge_count(), 9 * 2 - 1);

        let free = NNInstance::numbered(2, 3, []).unwrap();
        assert_eq!(build_tileset_graph(&free).edge_count(), 18);
        let full = NNInstance::numbered(2, 3, all_triples(3, 2)).unwrap();
        assert_eq!(build_tileset_graph(&full).edge_count(), 0);
    }

    #[test]
    fn instance_validation() {
        assert!(NNInstance::numbered(1, 2, [Triple::new(2, 0, 0)]).is_err());
        assert!(NNInstance::numbered(1, 2, [Triple::new(0, 0, 1)]).is_err());
        let t = Word::t_power(1);
        assert!(NNInstance::new(1, numbered_alphabet(1), vec![t.clone(), t], []).is_err());
        assert!(NNInstance::new(1, numbered_alphabet(1), vec![Word::identity(1)], []).is_err());
        assert!(NNInstance::new(1, vec!["x".into(), "x".into()], vec![], []).is_err());
    }

    #[test]
    fn core_examples() {
        let inst = NNInstance::numbered(1, 2, [Triple::new(1, 1, 0)]).unwrap();
        let core = completeness_core(&inst).unwrap();
        assert_eq!(core.letters(), vec![0, 1]);
        assert_eq!(core.extend(1, Generator::positive(0)), Some(0));
        assert_eq!(core.extend(0, Generator::positive(0)), Some(0));

        let free = NNInstance::numbered(2, 3, []).unwrap();
        assert_eq!(completeness_core(&free).unwrap().letters(), vec![0, 1, 2]);

        let dead = NNInstance::numbered(1, 1, [Triple::new(0, 0, 0)]).unwrap();
        assert!(completeness_core(&dead).unwrap().is_empty());
    }

    /// Exhaustive check of the two-sided extension condition over every
    /// subset of a small alphabet; the core must be the largest subset that
    /// satisfies it.
    #[test]
    fn core_is_largest_subset_satisfying_extension_condition() {
        let inst = NNInstance::numbered(1, 2, [Triple::new(1, 1, 0)]).unwrap();
        let g = build_tileset_graph(&inst);
        let mut best = 0u32;
        for mask in 0u32..4 {
            let inside = |a: usize| mask >> a & 1 == 1;
            let ok = (0..2).filter(|&a| inside(a)).all(|a| {
                g.successors(a, 0).iter().any(|&b| inside(b))
                    && g.predecessors(a, 0).iter().any(|&b| inside(b))
            });
            if ok && mask.count_ones() > best.count_ones() {
                best = mask;
            }
        }
        assert_eq!(best, 0b11);
    }

    #[test]
    fn dp_and_sdp_examples() {
        let golden = NNInstance::numbered(1, 2, [Triple::new(1, 1, 0)]).unwrap();
        assert!(decide_dp_free(&golden).unwrap().nonempty);
        let dead = NNInstance::numbered(1, 1, [Triple::new(0, 0, 0)]).unwrap();
        assert!(!decide_dp_free(&dead).unwrap().nonempty);
        assert!(decide_dp_free(&NNInstance::numbered(2, 4, []).unwrap()).unwrap().nonempty);

        let inst = NNInstance::numbered(1, 2, [Triple::new(0, 0, 0), Triple::new(0, 1, 0)]).unwrap();
        assert!(!decide_sdp_free(&inst, 0).unwrap());
        assert!(decide_sdp_free(&inst, 1).unwrap());
        assert!(decide_sdp_free(&inst, 2).is_err());
    }

    #[test]
    fn windowed_examples() {
        let caps = Caps::default();
        let alt = NNInstance::numbered(1, 2, [Triple::new(0, 0, 0), Triple::new(1, 1, 0)]).unwrap();
        let v = decide_dp_z_windowed(&alt, &caps).unwrap();
        assert!(v.nonempty);
        assert_eq!(v.period.as_deref(), Some(&[0, 1][..]));

        let none = NNInstance::numbered(1, 2, all_triples(2, 1)).unwrap();
        assert!(!decide_dp_z_windowed(&none, &caps).unwrap().nonempty);

        let gens = vec![Word::t_power(1), Word::t_power(2)];
        let conflict = NNInstance::new(
            1,
            numbered_alphabet(2),
            gens,
            [
                Triple::new(0, 0, 1),
                Triple::new(1, 1, 1),
                Triple::new(0, 1, 0),
                Triple::new(1, 0, 0),
            ],
        )
        .unwrap();
        let v = decide_dp_z_windowed(&conflict, &caps).unwrap();
        assert_eq!(v.window, 2);
        assert!(!v.nonempty);

        assert!(decide_dp_z_windowed(&NNInstance::numbered(2, 2, []).unwrap(), &caps).is_err());
    }

    #[test]
    fn windowed_rescales_common_factor_and_flips_negative_powers() {
        let caps = Caps::default();
        // Golden mean along t^-4: rescaled to window 1.
        let inst = NNInstance::new(
            1,
            numbered_alphabet(2),
            vec![Word::t_power(-4)],
            [Triple::new(1, 1, 0), Triple::new(0, 0, 0)],
        )
        .unwrap();
        let v = decide_dp_z_windowed(&inst, &caps).unwrap();
        assert_eq!((v.scale, v.window), (4, 1));
        assert!(v.nonempty);
        // The witness alternates along t^4 and validates on a stretch.
        for i in -20i64..20 {
            let (a, b) = (v.letter_at(i).unwrap(), v.letter_at(i - 4).unwrap());
            assert_ne!(a, b);
        }
    }

    #[test]
    fn windowed_seeded() {
        let caps = Caps::default();
        // Nothing may be followed by 1, so 1 has no left neighbour.
        let inst = NNInstance::numbered(1, 2, [Triple::new(1, 1, 0), Triple::new(0, 1, 0)]).unwrap();
        assert!(!decide_sdp_z_windowed(&inst, 1, &caps).unwrap());
        assert!(decide_sdp_z_windowed(&inst, 0, &caps).unwrap());
        // Allow 0 -> 1 again: ...0001000... contains 1 without periodicity.
        let inst = NNInstance::numbered(1, 2, [Triple::new(1, 1, 0)]).unwrap();
        assert!(decide_sdp_z_windowed(&inst, 1, &caps).unwrap());
    }

    #[test]
    fn families() {
        let inst = NNInstance::numbered(1, 3, [Triple::new(0, 0, 0)]).unwrap();
        let fam = dp_to_seeded_family(&inst);
        assert_eq!(fam.len(), 3);
        assert!(fam.iter().all(|(i, _)| i.forbidden() == inst.forbidden()));
        assert_eq!(dp_to_recurring_family(&inst).len(), 3);

        let dead = NNInstance::numbered(1, 2, all_triples(2, 1)).unwrap();
        assert!(dp_to_seeded_family(&dead)
            .iter()
            .all(|(i, a)| !decide_sdp_free(i, *a).unwrap()));
        let golden = NNInstance::numbered(1, 2, [Triple::new(1, 1, 0)]).unwrap();
        assert!(dp_to_seeded_family(&golden)
            .iter()
            .any(|(i, a)| decide_sdp_free(i, *a).unwrap()));
    }

    #[test]
    fn pruning_levels_shrink_and_stabilize() {
        // A chain 0 -> 1 -> 2 -> 3 with only 3 self-looping along t.
        let mut forbidden = all_triples(4, 1);
        forbidden.retain(|t| !matches!((t.from, t.to), (0, 1) | (1, 2) | (2, 3) | (3, 3)));
        let inst = NNInstance::numbered(1, 4, forbidden).unwrap();
        let levels = pruning_levels(&inst).unwrap();
        assert!(survives(&levels, 1, 0));
        assert!(!survives(&levels, 0, 1));
        assert!(!survives(&levels, 2, 3));
        assert!(survives(&levels, 3, 100));
        assert_eq!(completeness_core(&inst).unwrap().letters(), vec![3]);
    }
}

//! Pattern codings and compilers between presentations.
//!
//! A pattern coding is a finite pattern that may not appear anywhere in a
//! configuration. Codings compile to nearest-neighbour instances over the
//! free generators by recoding each configuration as the family of its
//! restrictions to a fixed domain `D` around every group element. The
//! domain must contain the identity and every coding word, and must be
//! closed under taking suffixes so that overlapping restrictions agree
//! globally once neighbouring ones do.
//!
//! This module also holds the finite-index machinery: [`CosetData`] for a
//! subgroup and a transversal, the higher power shift
//! ([`higher_power_shift`]) that moves an instance on `G` to one on the
//! subgroup, and [`lift_subgroup_instance`] going the other way.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::caps::Caps;
use crate::error::{Error, Result, StageExt};
use crate::freegroup::{ball, concat, Generator, Word};
use crate::membership::{build_stallings, FoldedAutomaton};
use crate::tileset::{
    decide_dp_z_windowed, decide_sdp_z_windowed, decide_sdp_free, Letter, NNInstance, Triple,
};

/// A finite forbidden pattern `{(w_1, a_1), ..., (w_k, a_k)}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternCoding {
    entries: Vec<(Word, Letter)>,
}

impl PatternCoding {
    /// Entries are sorted by word. A word may appear only once.
    pub fn new(entries: impl IntoIterator<Item = (Word, Letter)>) -> Result<Self> {
        let mut map: BTreeMap<Word, Letter> = BTreeMap::new();
        let mut rank = None;
        for (w, a) in entries {
            if *rank.get_or_insert(w.rank()) != w.rank() {
                return Err(Error::invalid("codings", "entries of one coding have different ranks"));
            }
            if let Some(&old) = map.get(&w) {
                if old != a {
                    return Err(Error::invalid(
                        "codings",
                        format!("coding assigns two letters to `{}`", display_word(&w)),
                    ));
                }
            }
            map.insert(w, a);
        }
        if map.is_empty() {
            return Err(Error::invalid("codings", "empty coding"));
        }
        Ok(PatternCoding {
            entries: map.into_iter().collect(),
        })
    }

    pub fn entries(&self) -> &[(Word, Letter)] {
        &self.entries
    }

    pub fn rank(&self) -> usize {
        self.entries[0].0.rank()
    }

    /// Length of the longest word.
    pub fn radius(&self) -> usize {
        self.entries.iter().map(|(w, _)| w.len()).max().unwrap_or(0)
    }
}

/// A set of pattern codings over one alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodingInstance {
    rank: usize,
    alphabet: Vec<String>,
    codings: Vec<PatternCoding>,
}

impl CodingInstance {
    pub fn new(rank: usize, alphabet: Vec<String>, codings: Vec<PatternCoding>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::invalid("rank", "rank must be at least 1"));
        }
        let names: BTreeSet<&String> = alphabet.iter().collect();
        if names.len() != alphabet.len() {
            return Err(Error::invalid("alphabet", "duplicate letter"));
        }
        for (i, c) in codings.iter().enumerate() {
            if c.rank() != rank {
                return Err(Error::invalid("codings", format!("coding {i} has the wrong rank")));
            }
            if c.entries.iter().any(|&(_, a)| a >= alphabet.len()) {
                return Err(Error::invalid("codings", format!("coding {i} uses a missing letter")));
            }
        }
        Ok(CodingInstance {
            rank,
            alphabet,
            codings,
        })
    }

    /// One two-cell coding per forbidden triple.
    pub fn from_nn(instance: &NNInstance) -> Self {
        CodingInstance {
            rank: instance.rank(),
            alphabet: instance.alphabet().to_vec(),
            codings: instance
                .forbidden()
                .iter()
                .map(|&t| nn_to_coding(instance, t))
                .collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn codings(&self) -> &[PatternCoding] {
        &self.codings
    }

    pub fn letter(&self, name: &str) -> Result<Letter> {
        self.alphabet
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| Error::invalid("seed", format!("unknown letter `{name}`")))
    }

    /// Largest coding radius.
    pub fn radius(&self) -> usize {
        self.codings.iter().map(PatternCoding::radius).max().unwrap_or(0)
    }
}

/// `{(ε, a), (w, b)}` for the triple `(a, b, w)`.
pub fn nn_to_coding(instance: &NNInstance, t: Triple) -> PatternCoding {
    let w = instance.generators()[t.generator].clone();
    PatternCoding::new([(Word::identity(instance.rank()), t.from), (w, t.to)])
        .expect("triple generators are never the identity")
}

/// Checks that `images` is a free basis of `F_n`, `n = images.len()`.
fn require_basis(rank: usize, images: &[Word]) -> Result<()> {
    if images.len() != rank {
        return Err(Error::invalid(
            "translation",
            format!("expected {rank} words, got {}", images.len()),
        ));
    }
    let aut = build_stallings(rank, images)?;
    if aut.states() != 1 || aut.edge_count() != rank {
        return Err(Error::invalid("translation", "words do not form a free basis"));
    }
    Ok(())
}

/// Rewrites a coding given over a free basis `S` into another basis `S'`.
/// `translation[i]` spells the `i`-th generator of `S` over `S'`.
pub fn rewrite_generating_set(coding: &PatternCoding, translation: &[Word]) -> Result<PatternCoding> {
    require_basis(coding.rank(), translation)?;
    rewrite_unchecked(coding, translation)
}

fn rewrite_unchecked(coding: &PatternCoding, translation: &[Word]) -> Result<PatternCoding> {
    let entries = coding
        .entries
        .iter()
        .map(|(w, a)| Ok((w.substitute(translation)?, *a)))
        .collect::<Result<Vec<_>>>()?;
    PatternCoding::new(entries)
}

/// [`rewrite_generating_set`] applied to every coding of an instance.
pub fn rewrite_instance(instance: &CodingInstance, translation: &[Word]) -> Result<CodingInstance> {
    require_basis(instance.rank, translation)?;
    let codings = instance
        .codings
        .iter()
        .map(|c| rewrite_unchecked(c, translation))
        .collect::<Result<Vec<_>>>()?;
    CodingInstance::new(instance.rank, instance.alphabet.clone(), codings)
}

/// The set of words each compiled letter assigns letters to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodingDomain {
    /// The ball of the given radius, which must be at least the coding
    /// radius.
    Ball(usize),
    /// The identity together with every suffix of every coding word.
    SuffixHull,
}

/// Valid maps `D → A` and the overlaps between neighbouring domains.
#[derive(Debug, Clone)]
pub struct MapSpace {
    rank: usize,
    domain: Vec<Word>,
    maps: Vec<Vec<Letter>>,
    // overlaps[s]: pairs (p, q) with domain[p] = s · domain[q].
    overlaps: Vec<Vec<(usize, usize)>>,
}

fn display_word(w: &Word) -> String {
    if w.is_identity() {
        "ε".to_string()
    } else {
        w.to_string()
    }
}

impl MapSpace {
    pub fn build(instance: &CodingInstance, domain: CodingDomain, caps: &Caps) -> Result<Self> {
        let rank = instance.rank;
        Caps::check("rank", caps.rank, rank)?;
        Caps::check("alphabet", caps.alphabet, instance.alphabet.len())?;
        let radius = instance.radius();
        let words: Vec<Word> = match domain {
            CodingDomain::Ball(n) => {
                if n < radius {
                    return Err(Error::invalid(
                        "radius",
                        format!("domain radius {n} is below the coding radius {radius}"),
                    ));
                }
                Caps::check("coding_radius", caps.coding_radius, n)?;
                ball(rank, n, caps.ball)?
            }
            CodingDomain::SuffixHull => {
                let mut set = BTreeSet::from([Word::identity(rank)]);
                for c in &instance.codings {
                    for (w, _) in &c.entries {
                        for i in 0..w.len() {
                            set.insert(Word::new(rank, w.letters()[i..].iter().copied())?);
                        }
                    }
                }
                Caps::check("ball", caps.ball, set.len())?;
                set.into_iter().collect()
            }
        };
        let index: HashMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();

        // Each coding is checked when its last cell is assigned.
        let mut checks: Vec<Vec<Vec<(usize, Letter)>>> = vec![Vec::new(); words.len()];
        for c in &instance.codings {
            let cells: Vec<(usize, Letter)> = c.entries.iter().map(|(w, a)| (index[w], *a)).collect();
            let last = cells.iter().map(|&(i, _)| i).max().unwrap();
            checks[last].push(cells);
        }

        let mut overlaps = vec![Vec::new(); rank];
        for (s, pairs) in overlaps.iter_mut().enumerate() {
            let gen = Word::from_generator(rank, Generator::positive(s));
            for (q, w) in words.iter().enumerate() {
                if let Some(&p) = index.get(&(&gen * w)) {
                    pairs.push((p, q));
                }
            }
        }

        let mut maps = Vec::new();
        let mut current = vec![0; words.len()];
        enumerate_maps(
            0,
            instance.alphabet.len(),
            &checks,
            &mut current,
            &mut maps,
            caps.compiled_letters,
        )?;
        Ok(MapSpace {
            rank,
            domain: words,
            maps,
            overlaps,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn domain(&self) -> &[Word] {
        &self.domain
    }

    pub fn maps(&self) -> &[Vec<Letter>] {
        &self.maps
    }

    /// Whether map `phi` at `g` agrees with map `psi` at `g · s`.
    pub fn compatible(&self, phi: usize, psi: usize, s: usize) -> bool {
        self.overlaps[s]
            .iter()
            .all(|&(p, q)| self.maps[phi][p] == self.maps[psi][q])
    }

    /// Maps that put `a0` at the identity.
    pub fn seed_set(&self, a0: Letter) -> Vec<usize> {
        (0..self.maps.len()).filter(|&i| self.maps[i][0] == a0).collect()
    }

    /// A readable name such as `ε=0;t=1;t-=0`.
    pub fn map_name(&self, phi: usize, alphabet: &[String]) -> String {
        self.domain
            .iter()
            .zip(&self.maps[phi])
            .map(|(w, &a)| format!("{}={}", display_word(w), alphabet[a]))
            .collect::<Vec<_>>()
            .join(";")
    }

    fn keys(&self, s: usize) -> (Vec<usize>, Vec<usize>) {
        let mut ids: HashMap<Vec<Letter>, usize> = HashMap::new();
        let mut intern = |k: Vec<Letter>| {
            let n = ids.len();
            *ids.entry(k).or_insert(n)
        };
        let pairs = &self.overlaps[s];
        let mut out = Vec::with_capacity(self.maps.len());
        let mut inc = Vec::with_capacity(self.maps.len());
        for m in &self.maps {
            out.push(intern(pairs.iter().map(|&(p, _)| m[p]).collect()));
            inc.push(intern(pairs.iter().map(|&(_, q)| m[q]).collect()));
        }
        (out, inc)
    }
}

fn enumerate_maps(
    pos: usize,
    letters: usize,
    checks: &[Vec<Vec<(usize, Letter)>>],
    current: &mut Vec<Letter>,
    maps: &mut Vec<Vec<Letter>>,
    cap: usize,
) -> Result<()> {
    if pos == current.len() {
        if maps.len() == cap {
            return Err(Error::cap("compiled_letters", cap as u64, cap as u64 + 1));
        }
        maps.push(current.clone());
        return Ok(());
    }
    for a in 0..letters {
        current[pos] = a;
        let violated = checks[pos]
            .iter()
            .any(|cells| cells.iter().all(|&(i, b)| current[i] == b));
        if !violated {
            enumerate_maps(pos + 1, letters, checks, current, maps, cap)?;
        }
    }
    Ok(())
}

/// A coding instance compiled to a nearest-neighbour instance over the free
/// generators, together with the map space behind its letters.
#[derive(Debug, Clone)]
pub struct CompiledCodings {
    pub instance: NNInstance,
    pub space: MapSpace,
}

impl CompiledCodings {
    pub fn seed_set(&self, a0: Letter) -> Vec<Letter> {
        self.space.seed_set(a0)
    }
}

/// Eager compilation: every incompatible pair of maps becomes a forbidden
/// triple.
pub fn compile_codings(instance: &CodingInstance, domain: CodingDomain, caps: &Caps) -> Result<CompiledCodings> {
    let space = MapSpace::build(instance, domain, caps)?;
    let n = space.maps.len();
    Caps::check("triples", caps.triples, n.saturating_mul(n).saturating_mul(space.rank))?;
    let mut forbidden = Vec::new();
    for s in 0..space.rank {
        let (out, inc) = space.keys(s);
        for phi in 0..n {
            for psi in 0..n {
                if out[phi] != inc[psi] {
                    forbidden.push(Triple::new(phi, psi, s));
                }
            }
        }
    }
    let names = (0..n).map(|i| space.map_name(i, &instance.alphabet)).collect();
    let nn = NNInstance::standard(space.rank, names, forbidden)?;
    Ok(CompiledCodings { instance: nn, space })
}

/// The completeness core of the compiled instance, computed without
/// materializing its triples.
#[derive(Debug, Clone)]
pub struct LazyCore {
    pub space: MapSpace,
    alive: Vec<bool>,
}

impl LazyCore {
    pub fn compute(instance: &CodingInstance, domain: CodingDomain, caps: &Caps) -> Result<Self> {
        let space = MapSpace::build(instance, domain, caps)?;
        let n = space.maps.len();
        let rank = space.rank;
        let mut out_key = Vec::new();
        let mut in_key = Vec::new();
        // succ[s][k]: alive maps with in-key k (successors of out-key k).
        // pred[s][k]: alive maps with out-key k (predecessors of in-key k).
        let mut succ = Vec::new();
        let mut pred = Vec::new();
        let mut by_out: Vec<HashMap<usize, Vec<usize>>> = Vec::new();
        let mut by_in: Vec<HashMap<usize, Vec<usize>>> = Vec::new();
        for s in 0..rank {
            let (out, inc) = space.keys(s);
            let keys = out.iter().chain(&inc).max().map_or(0, |m| m + 1);
            let mut sc = vec![0usize; keys];
            let mut pc = vec![0usize; keys];
            let mut bo: HashMap<usize, Vec<usize>> = HashMap::new();
            let mut bi: HashMap<usize, Vec<usize>> = HashMap::new();
            for phi in 0..n {
                sc[inc[phi]] += 1;
                pc[out[phi]] += 1;
                bo.entry(out[phi]).or_default().push(phi);
                bi.entry(inc[phi]).or_default().push(phi);
            }
            out_key.push(out);
            in_key.push(inc);
            succ.push(sc);
            pred.push(pc);
            by_out.push(bo);
            by_in.push(bi);
        }

        let mut alive = vec![true; n];
        let mut queue = VecDeque::new();
        for phi in 0..n {
            let ok = (0..rank).all(|s| succ[s][out_key[s][phi]] > 0 && pred[s][in_key[s][phi]] > 0);
            if !ok {
                alive[phi] = false;
                queue.push_back(phi);
            }
        }
        while let Some(phi) = queue.pop_front() {
            for s in 0..rank {
                let k = in_key[s][phi];
                succ[s][k] -= 1;
                if succ[s][k] == 0 {
                    for &chi in by_out[s].get(&k).map(Vec::as_slice).unwrap_or(&[]) {
                        if alive[chi] {
                            alive[chi] = false;
                            queue.push_back(chi);
                        }
                    }
                }
                let k = out_key[s][phi];
                pred[s][k] -= 1;
                if pred[s][k] == 0 {
                    for &chi in by_in[s].get(&k).map(Vec::as_slice).unwrap_or(&[]) {
                        if alive[chi] {
                            alive[chi] = false;
                            queue.push_back(chi);
                        }
                    }
                }
            }
        }
        Ok(LazyCore { space, alive })
    }

    pub fn contains(&self, phi: usize) -> bool {
        self.alive[phi]
    }

    pub fn len(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether some surviving map puts `a0` at the identity.
    pub fn admits_seed(&self, a0: Letter) -> bool {
        self.space.seed_set(a0).into_iter().any(|phi| self.alive[phi])
    }
}

/// Outcome of deciding a coding instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodingVerdict {
    pub answer: bool,
    pub maps: usize,
    pub surviving: usize,
}

/// Emptiness (or, with a seed, the seeded problem) for pattern codings on
/// `F_n`.
pub fn decide_codings(instance: &CodingInstance, seed: Option<Letter>, caps: &Caps) -> Result<CodingVerdict> {
    if let Some(a0) = seed {
        if a0 >= instance.alphabet.len() {
            return Err(Error::invalid("seed", format!("letter index {a0} out of range")));
        }
    }
    let core = LazyCore::compute(instance, CodingDomain::SuffixHull, caps).stage("compile")?;
    let answer = match seed {
        Some(a0) => core.admits_seed(a0),
        None => !core.is_empty(),
    };
    Ok(CodingVerdict {
        answer,
        maps: core.space.maps.len(),
        surviving: core.len(),
    })
}

/// Emptiness or the seeded problem for a nearest-neighbour instance with
/// arbitrary generator words.
pub fn decide_nn(instance: &NNInstance, seed: Option<Letter>, caps: &Caps) -> Result<bool> {
    instance.check_caps(caps)?;
    if let Some(a0) = seed {
        instance.require_letter(a0)?;
    }
    if instance.rank() == 1 {
        return match seed {
            Some(a0) => decide_sdp_z_windowed(instance, a0, caps),
            None => Ok(decide_dp_z_windowed(instance, caps)?.nonempty),
        };
    }
    if instance.is_standard() {
        return match seed {
            Some(a0) => decide_sdp_free(instance, a0),
            None => Ok(!crate::tileset::completeness_core(instance)?.is_empty()),
        };
    }
    Ok(decide_codings(&CodingInstance::from_nn(instance), seed, caps)?.answer)
}

/// A subgroup `H ≤ F_n` of finite index with a right transversal `R`
/// (`F_n = ⋃ H r`).
#[derive(Debug, Clone)]
pub struct CosetData {
    rank: usize,
    subgroup: Vec<Word>,
    representatives: Vec<Word>,
    automaton: FoldedAutomaton,
    identity: usize,
}

impl CosetData {
    pub fn new(rank: usize, subgroup: Vec<Word>, representatives: Vec<Word>) -> Result<Self> {
        let automaton = build_stallings(rank, &subgroup)?;
        for r in &representatives {
            if r.rank() != rank {
                return Err(Error::invalid("representatives", "rank mismatch"));
            }
        }
        let identity = representatives
            .iter()
            .position(Word::is_identity)
            .ok_or_else(|| Error::invalid("representatives", "the identity must be a representative"))?;
        for (i, ri) in representatives.iter().enumerate() {
            for rj in &representatives[..i] {
                if automaton.member(&concat(ri, &rj.inverse())?)? {
                    return Err(Error::invalid(
                        "representatives",
                        format!("`{ri}` and `{rj}` lie in the same coset"),
                    ));
                }
            }
        }
        let data = CosetData {
            rank,
            subgroup,
            representatives,
            automaton,
            identity,
        };
        for r in &data.representatives {
            for g in Generator::all(rank) {
                if data.decompose(&r.times(g)).is_none() {
                    return Err(Error::invalid(
                        "representatives",
                        format!("the coset of `{}` is not represented", r.times(g)),
                    ));
                }
            }
        }
        Ok(data)
    }

    /// `H = ⟨t^m⟩` in the integers with representatives `1, t, ..., t^{m-1}`.
    pub fn cyclic(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("subgroup", "index must be positive"));
        }
        CosetData::new(
            1,
            vec![Word::t_power(m as i64)],
            (0..m).map(|i| Word::t_power(i as i64)).collect(),
        )
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn subgroup(&self) -> &[Word] {
        &self.subgroup
    }

    pub fn representatives(&self) -> &[Word] {
        &self.representatives
    }

    pub fn index(&self) -> usize {
        self.representatives.len()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.automaton.member(w).unwrap_or(false)
    }

    /// Writes `g = h · r_j` with `h ∈ H`.
    pub fn decompose(&self, g: &Word) -> Option<(Word, usize)> {
        self.representatives.iter().enumerate().find_map(|(j, r)| {
            let h = g.mul_unchecked(&r.inverse());
            self.contains(&h).then_some((h, j))
        })
    }

    /// Right multiplication table: `r_i · x = h · r_j` for every signed
    /// generator `x`.
    pub fn table(&self) -> BTreeMap<(usize, Generator), (Word, usize)> {
        let mut t = BTreeMap::new();
        for (i, r) in self.representatives.iter().enumerate() {
            for g in Generator::all(self.rank) {
                t.insert((i, g), self.decompose(&r.times(g)).expect("validated transversal"));
            }
        }
        t
    }
}

/// The instance on the subgroup recording, at each `h`, the letters of the
/// whole coset block `h · R`.
#[derive(Debug, Clone)]
pub struct PowerShift {
    /// Generators are words of `G` lying in `H`.
    pub instance: NNInstance,
    pub tuples: Vec<Vec<Letter>>,
    pub identity: usize,
}

impl PowerShift {
    /// Tuples carrying `a0` at the identity representative.
    pub fn seed_set(&self, a0: Letter) -> Vec<Letter> {
        (0..self.tuples.len())
            .filter(|&p| self.tuples[p][self.identity] == a0)
            .collect()
    }
}

fn all_tuples(letters: usize, len: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..letters).map(move |a| {
                    let mut t = t.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

/// Moves an instance on `G` to the higher power shift on `H`.
///
/// A rule `(a, b, s)` read at `h · r_i` relates `r_i` to `r_i · s = h' · r_j`:
/// it forbids `a` in slot `i` at `h` together with `b` in slot `j` at
/// `h · h'`. When `h'` is trivial the rule removes tuples instead.
pub fn higher_power_shift(instance: &NNInstance, cosets: &CosetData, caps: &Caps) -> Result<PowerShift> {
    if instance.rank() != cosets.rank {
        return Err(Error::invalid("cosets", "rank differs from the instance"));
    }
    instance.check_caps(caps)?;
    let n = instance.letter_count();
    let k = cosets.index();
    let total = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    Caps::check("compiled_letters", caps.compiled_letters, total.min(usize::MAX as u128) as usize)?;
    let tuples = all_tuples(n, k);

    let mut deleted = vec![false; tuples.len()];
    // Binary rules as (slot i, letter a, slot j, letter b, h').
    let mut binary: BTreeMap<Word, BTreeSet<(usize, Letter, usize, Letter)>> = BTreeMap::new();
    for t in instance.forbidden() {
        let s = &instance.generators()[t.generator];
        for (i, r) in cosets.representatives.iter().enumerate() {
            let (h, j) = cosets
                .decompose(&r.mul_unchecked(s))
                .expect("validated transversal");
            if h.is_identity() {
                for (p, tuple) in tuples.iter().enumerate() {
                    if tuple[i] == t.from && tuple[j] == t.to {
                        deleted[p] = true;
                    }
                }
            } else {
                let hi = h.inverse();
                if hi < h {
                    binary.entry(hi).or_default().insert((j, t.to, i, t.from));
                } else {
                    binary.entry(h).or_default().insert((i, t.from, j, t.to));
                }
            }
        }
    }

    let kept: Vec<usize> = (0..tuples.len()).filter(|&p| !deleted[p]).collect();
    let new_tuples: Vec<Vec<Letter>> = kept.iter().map(|&p| tuples[p].clone()).collect();
    let m = new_tuples.len();
    Caps::check("triples", caps.triples, m.saturating_mul(m).saturating_mul(binary.len()))?;
    let generators: Vec<Word> = binary.keys().cloned().collect();
    let mut forbidden = Vec::new();
    for (g, rules) in binary.values().enumerate() {
        for (p, x) in new_tuples.iter().enumerate() {
            for (q, y) in new_tuples.iter().enumerate() {
                if rules.iter().any(|&(i, a, j, b)| x[i] == a && y[j] == b) {
                    forbidden.push(Triple::new(p, q, g));
                }
            }
        }
    }
    let names = new_tuples
        .iter()
        .map(|t| {
            let parts: Vec<&str> = t.iter().map(|&a| instance.letter_name(a)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let generators = if generators.is_empty() {
        // Keep a generator so the instance stays well-formed.
        vec![cosets.subgroup.iter().find(|w| !w.is_identity()).cloned().unwrap_or_else(|| {
            Word::from_generator(instance.rank(), Generator::positive(0))
        })]
    } else {
        generators
    };
    let out = NNInstance::new(instance.rank(), names, generators, forbidden)?;
    Ok(PowerShift {
        instance: out,
        tuples: new_tuples,
        identity: cosets.identity,
    })
}

/// Reads an instance given over a free basis of `H` as an instance on `G`.
///
/// `embedding[i]` is the image of the `i`-th basis element of `H`; the
/// images must form a free basis of the subgroup they generate. Free
/// generators of `G` that are not yet generator words are appended without
/// rules.
pub fn lift_subgroup_instance(instance: &NNInstance, rank: usize, embedding: &[Word]) -> Result<NNInstance> {
    if embedding.len() != instance.rank() {
        return Err(Error::invalid(
            "embedding",
            format!("expected {} images, got {}", instance.rank(), embedding.len()),
        ));
    }
    let aut = build_stallings(rank, embedding)?;
    if embedding.iter().any(Word::is_identity) || aut.subgroup_rank() != embedding.len() {
        return Err(Error::invalid("embedding", "images are not a free basis of their subgroup"));
    }
    let mut generators = instance
        .generators()
        .iter()
        .map(|w| w.substitute(embedding))
        .collect::<Result<Vec<_>>>()?;
    for g in Word::free_generators(rank) {
        if !generators.contains(&g) {
            generators.push(g);
        }
    }
    NNInstance::new(
        rank,
        instance.alphabet().to_vec(),
        generators,
        instance.forbidden().iter().copied(),
    )
}

impl fmt::Display for PatternCoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(w, a)| format!("({}, {a})", display_word(w)))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

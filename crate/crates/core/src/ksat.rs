//! k-SAT over a subgroup `H ≤ F_n`.
//!
//! An [`InputFormula`] is a k-CNF whose literals are group elements
//! ("cells"). An assignment is a map `x : F_n → {0, 1}`, and it satisfies
//! the formula over `H` when every translate `φ(h)`, obtained by replacing
//! each cell `v` with `x(h·v)`, is true for every `h ∈ H`.
//!
//! The reduction to the domino problem records, at every `h`, the matrix of
//! values `x(h·v_ij)`. Two cells `v_x, v_y` whose quotient `v_x·v_y⁻¹` lies
//! in `H` read the same group element from different translates, which
//! becomes a nearest-neighbour rule along that quotient.

use std::collections::{BTreeMap, BTreeSet};

use crate::caps::Caps;
use crate::cnf::{self, Cnf, SolveResult};
use crate::coding::{decide_codings, CodingInstance, PatternCoding};
use crate::error::{Error, Result, StageExt};
use crate::freegroup::{ball, Word};
use crate::membership::{build_stallings, compute_hl, HlTable};
use crate::tileset::{decide_dp_z_windowed, Letter, NNInstance, Triple};

/// A cell, possibly negated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub word: Word,
    pub negated: bool,
}

impl Literal {
    pub fn pos(word: Word) -> Self {
        Literal { word, negated: false }
    }

    pub fn neg(word: Word) -> Self {
        Literal { word, negated: true }
    }
}

/// A k-CNF over group cells: `clauses[i][j]` is the literal in row `i`,
/// column `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputFormula {
    rank: usize,
    k: usize,
    clauses: Vec<Vec<Literal>>,
}

impl InputFormula {
    pub fn new(rank: usize, k: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::invalid("rank", "rank must be at least 1"));
        }
        if k == 0 {
            return Err(Error::invalid("k", "clauses need at least one literal"));
        }
        for (i, c) in clauses.iter().enumerate() {
            if c.len() != k {
                return Err(Error::invalid(
                    "clauses",
                    format!("clause {i} has {} literals, expected {k}", c.len()),
                ));
            }
            if c.iter().any(|l| l.word.rank() != rank) {
                return Err(Error::invalid("clauses", format!("clause {i} has a word of the wrong rank")));
            }
        }
        Ok(InputFormula { rank, k, clauses })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    /// The cells in row-major order.
    pub fn cells(&self) -> Vec<Word> {
        self.clauses.iter().flatten().map(|l| l.word.clone()).collect()
    }

    /// Whether `x` satisfies the translate `φ(h)`.
    pub fn satisfied_at(&self, h: &Word, x: impl Fn(&Word) -> bool) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| x(&(h * &l.word)) != l.negated))
    }
}

/// The formula `(¬ε ∨ s)(u ∨ s)(¬ε ∨ ¬s)(u ∨ ¬s)` with `s` the first free
/// generator. It is satisfiable over `H` iff `u ∉ H`.
pub fn membership_gadget(rank: usize, u: &Word) -> Result<InputFormula> {
    if u.rank() != rank {
        return Err(Error::invalid("word", "rank mismatch"));
    }
    let e = Word::identity(rank);
    let s = Word::free_generators(rank).remove(0);
    InputFormula::new(
        rank,
        2,
        vec![
            vec![Literal::neg(e.clone()), Literal::pos(s.clone())],
            vec![Literal::pos(u.clone()), Literal::pos(s.clone())],
            vec![Literal::neg(e), Literal::neg(s.clone())],
            vec![Literal::pos(u.clone()), Literal::neg(s)],
        ],
    )
}

/// The domino instance produced from a formula.
#[derive(Debug, Clone)]
pub struct SatCompilation {
    /// Letters are satisfying matrices; generators are the free generators
    /// followed by the quotients in `H_L` (one of each inverse pair).
    pub instance: NNInstance,
    /// `matrices[a]` lists the values of letter `a` in row-major order.
    pub matrices: Vec<Vec<bool>>,
    pub hl: HlTable,
}

impl SatCompilation {
    /// Number of generators that carry rules.
    pub fn link_generators(&self) -> usize {
        let used: BTreeSet<usize> = self.instance.forbidden().iter().map(|t| t.generator).collect();
        used.len()
    }
}

fn matrix_name(bits: &[bool], k: usize) -> String {
    if bits.is_empty() {
        return "-".to_string();
    }
    bits.chunks(k)
        .map(|row| row.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>())
        .collect::<Vec<_>>()
        .join("/")
}

/// Compiles a formula over `H = ⟨subgroup⟩` to a nearest-neighbour
/// instance on `F_n` that is nonempty iff the formula is satisfiable.
pub fn sat_to_dp(formula: &InputFormula, subgroup: &[Word], caps: &Caps) -> Result<SatCompilation> {
    let rank = formula.rank;
    Caps::check("rank", caps.rank, rank)?;
    let cells = formula.cells();
    let aut = build_stallings(rank, subgroup)?;
    let hl = compute_hl(&aut, &cells)?;

    // Equal cells share a variable; this covers every identity quotient.
    let mut var_of: BTreeMap<&Word, usize> = BTreeMap::new();
    for c in &cells {
        let n = var_of.len();
        var_of.entry(c).or_insert(n);
    }
    Caps::check("sat_variables", caps.sat_variables, var_of.len())?;
    let mut cnf = Cnf::new(var_of.len());
    for row in &formula.clauses {
        cnf.add(
            row.iter()
                .map(|l| {
                    let v = var_of[&l.word] as i32 + 1;
                    if l.negated {
                        -v
                    } else {
                        v
                    }
                })
                .collect(),
        );
    }
    let solutions = cnf::all_solutions(&cnf, caps.matrices)?;
    let mut matrices: Vec<Vec<bool>> = solutions
        .iter()
        .map(|s| cells.iter().map(|c| s[var_of[c]]).collect())
        .collect();
    matrices.sort();
    matrices.dedup();

    // Rules: cell x at g agrees with cell y at g·h, for (x, y) ↦ h in H_L.
    let mut generators = Word::free_generators(rank);
    let mut links: BTreeMap<usize, BTreeSet<(usize, usize)>> = BTreeMap::new();
    for (&(x, y), h) in hl.entries() {
        if h.is_identity() {
            continue;
        }
        let hi = h.inverse();
        let (word, pair) = if hi < *h { (hi, (y, x)) } else { (h.clone(), (x, y)) };
        let index = match generators.iter().position(|g| *g == word) {
            Some(i) => i,
            None => {
                generators.push(word);
                generators.len() - 1
            }
        };
        links.entry(index).or_default().insert(pair);
    }
    let n = matrices.len();
    Caps::check("triples", caps.triples, n.saturating_mul(n).saturating_mul(links.len()))?;
    let mut forbidden = Vec::new();
    for (&g, pairs) in &links {
        for (a, ma) in matrices.iter().enumerate() {
            for (b, mb) in matrices.iter().enumerate() {
                if pairs.iter().any(|&(x, y)| ma[x] != mb[y]) {
                    forbidden.push(Triple::new(a, b, g));
                }
            }
        }
    }
    let names = matrices.iter().map(|m| matrix_name(m, formula.k)).collect();
    let instance = NNInstance::new(rank, names, generators, forbidden)?;
    Ok(SatCompilation {
        instance,
        matrices,
        hl,
    })
}

/// Result of deciding a formula through the domino reduction.
#[derive(Debug, Clone)]
pub struct KsatVerdict {
    pub satisfiable: bool,
    pub letters: usize,
    pub generators: usize,
    /// A periodic witness on the integers: `period[i]` is the matrix at the
    /// `i`-th element of the rescaled subgroup lattice.
    pub period: Option<Vec<Letter>>,
    pub compilation: SatCompilation,
}

/// Decides satisfiability over `H`. Rank 1 uses the windowed procedure;
/// higher ranks compile the rules to codings and compute the core.
pub fn decide_ksat_free(formula: &InputFormula, subgroup: &[Word], caps: &Caps) -> Result<KsatVerdict> {
    let compilation = sat_to_dp(formula, subgroup, caps).stage("sat_to_dp")?;
    let inst = &compilation.instance;
    let letters = inst.letter_count();
    let generators = inst.generators().len();
    let (satisfiable, period) = if letters == 0 {
        (false, None)
    } else if formula.rank == 1 {
        let v = decide_dp_z_windowed(inst, caps).stage("decide")?;
        (v.nonempty, v.period)
    } else {
        let codings = inst
            .forbidden()
            .iter()
            .map(|t| {
                PatternCoding::new([
                    (Word::identity(formula.rank), t.from),
                    (inst.generators()[t.generator].clone(), t.to),
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        let ci = CodingInstance::new(formula.rank, inst.alphabet().to_vec(), codings)?;
        (decide_codings(&ci, None, caps)?.answer, None)
    };
    Ok(KsatVerdict {
        satisfiable,
        letters,
        generators,
        period,
        compilation,
    })
}

/// An assignment of the cells `h·v` for `h` in a truncation of `H`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedAssignment {
    pub values: BTreeMap<Word, bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TruncationResult {
    /// The translates `φ(h)` with `|h| ≤ radius` are jointly satisfiable.
    Satisfiable(TruncatedAssignment),
    /// Already these translates conflict, so the formula is unsatisfiable.
    Unsatisfiable,
    Unknown,
}

/// Solves the conjunction of `φ(h)` over subgroup elements `h` of length at
/// most `radius`.
pub fn truncation_sat_check(
    formula: &InputFormula,
    subgroup: &[Word],
    radius: usize,
    caps: &Caps,
) -> Result<TruncationResult> {
    let rank = formula.rank;
    let aut = build_stallings(rank, subgroup)?;
    let mut members = Vec::new();
    for h in ball(rank, radius, caps.ball)? {
        if aut.member(&h)? {
            members.push(h);
        }
    }
    let mut var_of: BTreeMap<Word, usize> = BTreeMap::new();
    let mut clauses = Vec::new();
    for h in &members {
        for row in &formula.clauses {
            let mut clause = Vec::new();
            for l in row {
                let cell = h * &l.word;
                let n = var_of.len();
                let v = *var_of.entry(cell).or_insert(n) as i32 + 1;
                clause.push(if l.negated { -v } else { v });
            }
            clauses.push(clause);
        }
    }
    Caps::check("sat_variables", caps.sat_variables, var_of.len())?;
    let cnf = Cnf {
        variables: var_of.len(),
        clauses,
    };
    Ok(match cnf::solve(&cnf, caps.oracle_nodes) {
        SolveResult::Sat(a) => TruncationResult::Satisfiable(TruncatedAssignment {
            values: var_of.into_iter().map(|(w, v)| (w, a[v])).collect(),
        }),
        SolveResult::Unsat => TruncationResult::Unsatisfiable,
        SolveResult::Unknown => TruncationResult::Unknown,
    })
}

/// A formula on the integers that is satisfiable over `⟨t^{2^m}⟩` iff a
/// rank-1 instance is nonempty.
#[derive(Debug, Clone)]
pub struct ThreeSatReduction {
    pub formula: InputFormula,
    pub subgroup: Vec<Word>,
    /// The scaling exponent `m`.
    pub exponent: usize,
    /// Bits per letter code.
    pub code_bits: usize,
    pub dummies: usize,
    /// Clauses before padding to exactly three literals.
    pub base_clauses: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    Code(usize),
    Next(usize),
    Dummy(usize),
}

type Lit3 = (Slot, bool);

fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

struct Padding {
    next_dummy: usize,
    out: Vec<Vec<Lit3>>,
}

impl Padding {
    fn fresh(&mut self) -> Slot {
        self.next_dummy += 1;
        Slot::Dummy(self.next_dummy - 1)
    }

    fn push(&mut self, clause: Vec<Lit3>) {
        match clause.len() {
            0 => {
                let d = [self.fresh(), self.fresh(), self.fresh()];
                for mask in 0..8u8 {
                    self.out
                        .push((0..3).map(|i| (d[i], mask >> i & 1 == 1)).collect());
                }
            }
            1 => {
                let (d, e) = (self.fresh(), self.fresh());
                for mask in 0..4u8 {
                    self.out
                        .push(vec![clause[0], (d, mask & 1 == 1), (e, mask & 2 == 2)]);
                }
            }
            2 => {
                let d = self.fresh();
                self.out.push(vec![clause[0], clause[1], (d, false)]);
                self.out.push(vec![clause[0], clause[1], (d, true)]);
            }
            3 => self.out.push(clause),
            len => {
                // (l1 ∨ l2 ∨ d1)(¬d1 ∨ l3 ∨ d2) ... (¬d ∨ l_{L-1} ∨ l_L)
                let mut d = self.fresh();
                self.out.push(vec![clause[0], clause[1], (d, false)]);
                for &l in &clause[2..len - 2] {
                    let e = self.fresh();
                    self.out.push(vec![(d, true), l, (e, false)]);
                    d = e;
                }
                self.out
                    .push(vec![(d, true), clause[len - 2], clause[len - 1]]);
            }
        }
    }
}

/// Literal saying that bit `j` of the code of letter `a` is set as in `a`.
fn code_literal(slot: Slot, a: Letter, j: usize) -> Lit3 {
    // Negated when the bit is 0.
    (slot, a >> j & 1 == 0)
}

fn base_clauses(instance: &NNInstance, caps: &Caps) -> Result<(usize, Vec<Vec<Lit3>>)> {
    let n = instance.letter_count();
    let b = ceil_log2(n);
    let mut clauses: Vec<Vec<Lit3>> = Vec::new();
    if n == 0 {
        clauses.push(Vec::new());
    } else if b > 0 {
        // Distributing ⋁_a ⋀_j code_j(a) gives one clause per choice of a
        // bit for every letter.
        let count = (b as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        Caps::check("clauses", caps.clauses, count.min(usize::MAX as u128) as usize)?;
        let mut choice = vec![0usize; n];
        loop {
            let mut clause: Vec<Lit3> = (0..n).map(|a| code_literal(Slot::Code(choice[a]), a, choice[a])).collect();
            clause.sort();
            clause.dedup();
            clauses.push(clause);
            let mut i = 0;
            while i < n && choice[i] == b - 1 {
                choice[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
            choice[i] += 1;
        }
    }
    for t in instance.forbidden() {
        let mut clause = Vec::new();
        for j in 0..b {
            let (s, neg) = code_literal(Slot::Code(j), t.from, j);
            clause.push((s, !neg));
        }
        for j in 0..b {
            let (s, neg) = code_literal(Slot::Next(j), t.to, j);
            clause.push((s, !neg));
        }
        clauses.push(clause);
    }
    Caps::check("clauses", caps.clauses, clauses.len())?;
    Ok((b, clauses))
}

/// Compiles a rank-1 standard instance to 3-SAT over `⟨t^{2^m}⟩`.
///
/// Letters get binary codes of `B = ⌈log₂ n⌉` bits stored at `t^0 ..
/// t^{B-1}`; the neighbour's code sits at `t^{M} .. t^{M+B-1}` with
/// `M = 2^m`, and padding variables occupy the residues from `B` on.
pub fn dp_to_3sat_z(instance: &NNInstance, caps: &Caps) -> Result<ThreeSatReduction> {
    let (b, clauses) = prepare(instance, caps)?;
    let dummies = count_dummies(&clauses);
    let n = instance.letter_count();
    let mut m = (clauses.len() * n + b).max(1);
    while (1usize << m.min(63)) < b + dummies {
        m += 1;
    }
    build_reduction(b, clauses, m, caps)
}

/// As [`dp_to_3sat_z`] with a chosen exponent, which must leave room for
/// the code and padding variables.
pub fn dp_to_3sat_z_with_exponent(instance: &NNInstance, m: usize, caps: &Caps) -> Result<ThreeSatReduction> {
    let (b, clauses) = prepare(instance, caps)?;
    let dummies = count_dummies(&clauses);
    if m >= 63 || (1usize << m) < b + dummies {
        return Err(Error::invalid(
            "exponent",
            format!("2^{m} leaves no room for {} variables per block", b + dummies),
        ));
    }
    build_reduction(b, clauses, m, caps)
}

fn prepare(instance: &NNInstance, caps: &Caps) -> Result<(usize, Vec<Vec<Lit3>>)> {
    if instance.rank() != 1 {
        return Err(Error::invalid("rank", "the 3-SAT compiler needs rank 1"));
    }
    instance.require_standard("the 3-SAT compiler")?;
    instance.check_caps(caps)?;
    base_clauses(instance, caps)
}

fn count_dummies(clauses: &[Vec<Lit3>]) -> usize {
    let mut p = Padding {
        next_dummy: 0,
        out: Vec::new(),
    };
    for c in clauses {
        p.push(c.clone());
    }
    p.next_dummy
}

fn build_reduction(b: usize, clauses: Vec<Vec<Lit3>>, m: usize, caps: &Caps) -> Result<ThreeSatReduction> {
    Caps::check("scale_exponent", caps.scale_exponent, m)?;
    let base = clauses.len();
    let mut p = Padding {
        next_dummy: 0,
        out: Vec::new(),
    };
    for c in clauses {
        p.push(c);
    }
    let big = 1i64 << m;
    let position = |s: Slot| -> Word {
        match s {
            Slot::Code(j) => Word::t_power(j as i64),
            Slot::Next(j) => Word::t_power(big + j as i64),
            Slot::Dummy(d) => Word::t_power((b + d) as i64),
        }
    };
    let rows = p
        .out
        .iter()
        .map(|c| {
            c.iter()
                .map(|&(s, neg)| Literal {
                    word: position(s),
                    negated: neg,
                })
                .collect()
        })
        .collect();
    Ok(ThreeSatReduction {
        formula: InputFormula::new(1, 3, rows)?,
        subgroup: vec![Word::t_power(big)],
        exponent: m,
        code_bits: b,
        dummies: p.next_dummy,
        base_clauses: base,
    })
}

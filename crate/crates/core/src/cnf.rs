//! A small DPLL solver for classical CNF formulas.
//!
//! Literals use the DIMACS convention: variable `v` (0-based) appears as
//! `v + 1` or `-(v + 1)`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Cnf {
    pub variables: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn new(variables: usize) -> Self {
        Cnf {
            variables,
            clauses: Vec::new(),
        }
    }

    pub fn add(&mut self, clause: Vec<i32>) {
        debug_assert!(clause.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= self.variables));
        self.clauses.push(clause);
    }

    /// Whether a complete assignment satisfies every clause.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| value(assignment, l)))
    }
}

fn value(assignment: &[bool], lit: i32) -> bool {
    assignment[lit.unsigned_abs() as usize - 1] == (lit > 0)
}

/// Outcome of a budgeted search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    Sat(Vec<bool>),
    Unsat,
    /// The decision budget ran out.
    Unknown,
}

struct Solver<'a> {
    cnf: &'a Cnf,
    assignment: Vec<Option<bool>>,
    trail: Vec<usize>,
    budget: u64,
}

enum Propagation {
    Conflict,
    Done,
}

impl Solver<'_> {
    fn lit_value(&self, lit: i32) -> Option<bool> {
        self.assignment[lit.unsigned_abs() as usize - 1].map(|v| v == (lit > 0))
    }

    fn assign(&mut self, lit: i32) {
        let v = lit.unsigned_abs() as usize - 1;
        self.assignment[v] = Some(lit > 0);
        self.trail.push(v);
    }

    fn undo(&mut self, mark: usize) {
        for v in self.trail.drain(mark..) {
            self.assignment[v] = None;
        }
    }

    fn propagate(&mut self) -> Propagation {
        loop {
            let mut changed = false;
            for c in &self.cnf.clauses {
                let mut unassigned = None;
                let mut open = 0;
                let mut sat = false;
                for &l in c {
                    match self.lit_value(l) {
                        Some(true) => {
                            sat = true;
                            break;
                        }
                        Some(false) => {}
                        None => {
                            open += 1;
                            unassigned = Some(l);
                        }
                    }
                }
                if sat {
                    continue;
                }
                match open {
                    0 => return Propagation::Conflict,
                    1 => {
                        let l = unassigned.unwrap();
                        let v = l.unsigned_abs() as usize - 1;
                        self.assignment[v] = Some(l > 0);
                        self.trail.push(v);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return Propagation::Done;
            }
        }
    }

    /// First unassigned variable of the first clause not yet satisfied.
    fn branch_variable(&self) -> Option<usize> {
        for c in &self.cnf.clauses {
            if c.iter().any(|&l| self.lit_value(l) == Some(true)) {
                continue;
            }
            if let Some(&l) = c.iter().find(|&&l| self.lit_value(l).is_none()) {
                return Some(l.unsigned_abs() as usize - 1);
            }
        }
        None
    }

    /// Visits every satisfying assignment until `visit` returns false.
    /// Returns `None` when the budget runs out.
    fn search(&mut self, visit: &mut dyn FnMut(&[Option<bool>]) -> bool) -> Option<bool> {
        if self.budget == 0 {
            return None;
        }
        self.budget -= 1;
        let mark = self.trail.len();
        if let Propagation::Conflict = self.propagate() {
            self.undo(mark);
            return Some(true);
        }
        let keep_going = match self.branch_variable() {
            None => visit(&self.assignment),
            Some(v) => {
                let mut go = true;
                for val in [false, true] {
                    let inner = self.trail.len();
                    self.assign(if val { v as i32 + 1 } else { -(v as i32 + 1) });
                    let r = self.search(visit);
                    self.undo(inner);
                    match r {
                        None => {
                            self.undo(mark);
                            return None;
                        }
                        Some(false) => {
                            go = false;
                            break;
                        }
                        Some(true) => {}
                    }
                }
                go
            }
        };
        self.undo(mark);
        Some(keep_going)
    }
}

fn solver(cnf: &Cnf, budget: u64) -> Solver<'_> {
    Solver {
        cnf,
        assignment: vec![None; cnf.variables],
        trail: Vec::new(),
        budget,
    }
}

/// Finds one satisfying assignment; unconstrained variables are false.
pub fn solve(cnf: &Cnf, budget: u64) -> SolveResult {
    let mut found = None;
    let mut s = solver(cnf, budget);
    let r = s.search(&mut |a| {
        found = Some(a.iter().map(|v| v.unwrap_or(false)).collect());
        false
    });
    match (r, found) {
        (_, Some(a)) => SolveResult::Sat(a),
        (None, None) => SolveResult::Unknown,
        (Some(_), None) => SolveResult::Unsat,
    }
}

/// Every satisfying assignment, in lexicographic order (false < true).
/// Fails once more than `cap` are found.
pub fn all_solutions(cnf: &Cnf, cap: usize) -> Result<Vec<Vec<bool>>> {
    let mut out: Vec<Vec<bool>> = Vec::new();
    let mut overflow = false;
    let mut s = solver(cnf, u64::MAX);
    s.search(&mut |a| {
        let free: Vec<usize> = (0..a.len()).filter(|&v| a[v].is_none()).collect();
        let combos = 1u128 << free.len().min(127);
        if out.len() as u128 + combos > cap as u128 {
            overflow = true;
            return false;
        }
        for mask in 0..combos as u64 {
            let mut full: Vec<bool> = a.iter().map(|v| v.unwrap_or(false)).collect();
            for (bit, &v) in free.iter().enumerate() {
                full[v] = mask >> bit & 1 == 1;
            }
            out.push(full);
        }
        true
    });
    if overflow {
        return Err(Error::cap("matrices", cap as u64, cap as u64 + 1));
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(cnf: &Cnf) -> Vec<Vec<bool>> {
        (0..1u32 << cnf.variables)
            .map(|m| (0..cnf.variables).map(|v| m >> v & 1 == 1).collect::<Vec<_>>())
            .filter(|a| cnf.satisfied_by(a))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    #[test]
    fn small_formulas() {
        let mut cnf = Cnf::new(3);
        cnf.add(vec![1, 2]);
        cnf.add(vec![-1, 3]);
        cnf.add(vec![-2, -3]);
        let all = all_solutions(&cnf, 100).unwrap();
        assert_eq!(all, brute(&cnf));
        match solve(&cnf, 1000) {
            SolveResult::Sat(a) => assert!(cnf.satisfied_by(&a)),
            other => panic!("{other:?}"),
        }
        cnf.add(vec![1]);
        cnf.add(vec![2]);
        assert_eq!(solve(&cnf, 1000), SolveResult::Unsat);
        assert!(all_solutions(&cnf, 100).unwrap().is_empty());
    }

    #[test]
    fn empty_clause_and_free_variables() {
        let mut cnf = Cnf::new(2);
        assert_eq!(all_solutions(&cnf, 10).unwrap().len(), 4);
        assert!(all_solutions(&cnf, 3).unwrap_err().is_cap());
        cnf.add(vec![]);
        assert_eq!(solve(&cnf, 10), SolveResult::Unsat);
    }

    #[test]
    fn random_formulas_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let vars = rng.gen_range(1..=6);
            let mut cnf = Cnf::new(vars);
            for _ in 0..rng.gen_range(0..10) {
                let len = rng.gen_range(1..=3);
                let clause = (0..len)
                    .map(|_| {
                        let v = rng.gen_range(1..=vars as i32);
                        if rng.gen() {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect();
                cnf.add(clause);
            }
            let expected = brute(&cnf);
            assert_eq!(all_solutions(&cnf, 1 << 10).unwrap(), expected);
            match solve(&cnf, u64::MAX) {
                SolveResult::Sat(a) => assert!(cnf.satisfied_by(&a)),
                SolveResult::Unsat => assert!(expected.is_empty()),
                SolveResult::Unknown => unreachable!(),
            }
        }
    }
}

//! Resource caps shared by all procedures.
//!
//! Every search or compilation whose size can grow exponentially checks
//! one of these limits and fails with [`Error::CapExceeded`] instead of
//! running away.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest accepted alphabet.
    pub alphabet: usize,
    /// Largest accepted free-group rank.
    pub rank: usize,
    /// Largest window used by the windowed decision on the integers.
    pub window: usize,
    /// Largest number of window blocks materialized.
    pub window_blocks: usize,
    /// Largest number of elements in an enumerated ball.
    pub ball: usize,
    /// Largest coding radius `N` accepted by the coding compiler.
    pub coding_radius: usize,
    /// Largest number of compiled letters (maps) materialized.
    pub compiled_letters: usize,
    /// Largest number of matrix letters produced by the k-SAT compiler.
    pub matrices: usize,
    /// Largest number of distinct variables handed to the classical solver.
    pub sat_variables: usize,
    /// Largest number of forbidden triples materialized.
    pub triples: usize,
    /// Largest number of clauses produced by a formula compiler.
    pub clauses: usize,
    /// Largest scaling exponent `m` for the 3-SAT compiler on the integers.
    pub scale_exponent: usize,
    /// Node budget for the brute-force oracle.
    pub oracle_nodes: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            alphabet: 64,
            rank: 4,
            window: 12,
            window_blocks: 1 << 20,
            ball: 200_000,
            coding_radius: 3,
            compiled_letters: 1 << 16,
            matrices: 1 << 16,
            sat_variables: 4096,
            triples: 1 << 24,
            clauses: 1 << 16,
            scale_exponent: 12,
            oracle_nodes: 20_000_000,
        }
    }
}

impl Caps {
    /// Parses overrides of the form `window=14,alphabet=32`.
    pub fn parse_overrides(mut self, spec: &str) -> Result<Caps> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::invalid("--caps", format!("expected key=value, got `{item}`")))?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|_| Error::invalid("--caps", format!("`{value}` is not a non-negative integer")))?;
            let as_usize = value as usize;
            match key.trim() {
                "alphabet" => self.alphabet = as_usize,
                "rank" => self.rank = as_usize,
                "window" => self.window = as_usize,
                "window_blocks" => self.window_blocks = as_usize,
                "ball" => self.ball = as_usize,
                "coding_radius" => self.coding_radius = as_usize,
                "compiled_letters" => self.compiled_letters = as_usize,
                "matrices" => self.matrices = as_usize,
                "sat_variables" => self.sat_variables = as_usize,
                "triples" => self.triples = as_usize,
                "clauses" => self.clauses = as_usize,
                "scale_exponent" => self.scale_exponent = as_usize,
                "oracle_nodes" => self.oracle_nodes = value,
                other => return Err(Error::invalid("--caps", format!("unknown cap `{other}`"))),
            }
        }
        Ok(self)
    }

    pub(crate) fn check(cap: &'static str, limit: usize, observed: usize) -> Result<()> {
        if observed > limit {
            Err(Error::cap(cap, limit as u64, observed as u64))
        } else {
            Ok(())
        }
    }
}

//! Decision procedures and compilers for the domino problem on free groups.
//!
//! The crate works with nearest-neighbour subshifts of finite type on the
//! free group `F_n` (and on the integers, its rank-1 case):
//!
//! * [`freegroup`]: reduced words, balls and substitutions.
//! * [`tileset`]: instances, tileset graphs, the completeness core, and the
//!   emptiness and seeded decisions.
//! * [`recurrence`]: balloons and the recurring-letter problem.
//! * [`coding`]: pattern codings, their compilation to nearest-neighbour
//!   rules, and finite-index subgroups.
//! * [`membership`]: Stallings automata and subgroup membership.
//! * [`ksat`]: k-SAT over subgroups and its reductions to and from domino
//!   instances.
//! * [`oracle`]: a brute-force ball search used to cross-check the above.
//! * [`cli`]: the command-line front end.

pub mod caps;
pub mod cli;
pub mod cnf;
pub mod coding;
pub mod error;
pub mod freegroup;
pub mod io;
pub mod ksat;
pub mod membership;
pub mod oracle;
pub mod recurrence;
pub mod tileset;

pub use caps::Caps;
pub use error::{Error, Result};
pub use freegroup::{Generator, Word};
pub use tileset::{Letter, NNInstance, Triple};

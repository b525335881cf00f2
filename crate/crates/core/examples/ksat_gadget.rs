//! The membership gadget: a 2-CNF over a subgroup that is satisfiable
//! exactly when a word lies outside it.

use domino::ksat::{decide_ksat_free, membership_gadget, truncation_sat_check, TruncationResult};
use domino::membership::build_stallings;
use domino::{Caps, Word};

fn main() -> domino::Result<()> {
    let caps = Caps::default();
    let h = [Word::parse(2, "a a")?, Word::parse(2, "b")?];
    let aut = build_stallings(2, &h)?;
    for text in ["a", "a a", "b a a b-", "a b"] {
        let u = Word::parse(2, text)?;
        let formula = membership_gadget(2, &u)?;
        let v = decide_ksat_free(&formula, &h, &caps)?;
        let truncated = match truncation_sat_check(&formula, &h, 4, &caps)? {
            TruncationResult::Satisfiable(_) => "sat",
            TruncationResult::Unsatisfiable => "unsat",
            TruncationResult::Unknown => "unknown",
        };
        println!(
            "u = {text:<8} member {:<5} satisfiable {:<5} ({} matrices, radius-4 truncation {truncated})",
            aut.member(&u)?,
            v.satisfiable,
            v.letters
        );
    }
    Ok(())
}

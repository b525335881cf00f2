//! Subgroup membership in F_2 through folded automata.

use domino::membership::{build_stallings, compute_hl};
use domino::{Generator, Word};

fn main() -> domino::Result<()> {
    let gens = [Word::parse(2, "a b a-")?, Word::parse(2, "a a")?];
    let aut = build_stallings(2, &gens)?;
    println!(
        "{} states, {} edges, subgroup rank {}, finite index {}",
        aut.states(),
        aut.edge_count(),
        aut.subgroup_rank(),
        aut.is_finite_index()
    );
    for (from, g, to) in aut.transitions() {
        println!("  {from} -[{}]-> {to}", Generator::positive(g).name(2));
    }
    for text in ["a b b a-", "a a a", "b", "a b a"] {
        let u = Word::parse(2, text)?;
        println!("{text:>10}: {}", aut.member(&u)?);
    }

    let cells = [Word::identity(2), Word::parse(2, "a")?, Word::parse(2, "a b")?];
    for ((x, y), h) in compute_hl(&aut, &cells)?.entries().iter().filter(|((x, y), _)| x != y) {
        println!("cells {x},{y} differ by {h}");
    }
    Ok(())
}

//! Compiles pattern codings to a nearest-neighbour instance and decides it.

use domino::coding::{compile_codings, decide_codings, CodingDomain, CodingInstance, PatternCoding};
use domino::tileset::decide_dp_z_windowed;
use domino::{Caps, Word};

fn main() -> domino::Result<()> {
    let caps = Caps::default();
    let w = |s: &str| Word::parse(1, s);
    // No two 1s at distance one or two, as in ...1 0 0 1 0 0...
    let inst = CodingInstance::new(
        1,
        vec!["0".into(), "1".into()],
        vec![
            PatternCoding::new([(w("t-")?, 1), (w("t")?, 1)])?,
            PatternCoding::new([(w("")?, 1), (w("t")?, 1)])?,
        ],
    )?;

    let compiled = compile_codings(&inst, CodingDomain::SuffixHull, &caps)?;
    println!("{} compiled letters", compiled.instance.letter_count());
    for (phi, _) in compiled.space.maps().iter().enumerate() {
        println!("  {}", compiled.space.map_name(phi, inst.alphabet()));
    }
    let v = decide_dp_z_windowed(&compiled.instance, &caps)?;
    println!("nonempty on ℤ: {}", v.nonempty);

    let verdict = decide_codings(&inst, Some(1), &caps)?;
    println!("seeded with 1: {} ({} of {} maps survive)", verdict.answer, verdict.surviving, verdict.maps);
    Ok(())
}

//! Plain and seeded domino problems for the golden-mean rules on F_2 and ℤ.
//!
//! Run with `cargo run --example golden_mean`.

use domino::tileset::{completeness_core, decide_dp_free, decide_dp_z_windowed, decide_sdp_free, pruning_levels};
use domino::{Caps, NNInstance, Triple};

fn main() -> domino::Result<()> {
    // No two adjacent 1s along either generator.
    let f2 = NNInstance::numbered(2, 2, [Triple::new(1, 1, 0), Triple::new(1, 1, 1)])?;
    let levels = pruning_levels(&f2)?;
    println!("pruning stabilised after {} rounds", levels.len() - 1);

    let core = completeness_core(&f2)?;
    println!("core letters: {:?}", core.letters());
    for (&(a, g), &b) in core.extension() {
        println!("  {a} -[{}]-> {b}", g.name(2));
    }
    println!("DP on F_2: {}", decide_dp_free(&f2)?.nonempty);
    println!("SDP on F_2 seeded with 1: {}", decide_sdp_free(&f2, 1)?);

    // Forcing 0 -> 1 and 1 -> 0 on ℤ leaves only the alternating pattern.
    let z = NNInstance::numbered(1, 2, [Triple::new(0, 0, 0), Triple::new(1, 1, 0)])?;
    let v = decide_dp_z_windowed(&z, &Caps::default())?;
    println!("DP on ℤ: {} with period {:?}", v.nonempty, v.period);
    Ok(())
}

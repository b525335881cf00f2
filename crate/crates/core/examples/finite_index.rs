//! Moving instances between a group and a finite-index subgroup.

use domino::coding::{higher_power_shift, lift_subgroup_instance, CosetData};
use domino::tileset::decide_dp_z_windowed;
use domino::{Caps, NNInstance, Triple, Word};

fn main() -> domino::Result<()> {
    let caps = Caps::default();
    // Period three: 0 -> 1 -> 2 -> 0.
    let forbidden = (0..3)
        .flat_map(|a| (0..3).map(move |b| (a, b)))
        .filter(|&(a, b)| b != (a + 1) % 3)
        .map(|(a, b)| Triple::new(a, b, 0));
    let cycle = NNInstance::numbered(1, 3, forbidden)?;

    for m in 2..=3 {
        let hps = higher_power_shift(&cycle, &CosetData::cyclic(m)?, &caps)?;
        let nonempty = decide_dp_z_windowed(&hps.instance, &caps)?.nonempty;
        println!(
            "index {m}: {} block letters, generators {:?}, nonempty {nonempty}",
            hps.instance.letter_count(),
            hps.instance.generators().iter().map(Word::to_string).collect::<Vec<_>>()
        );
    }

    // An instance on ⟨a a, b⟩ ≤ F_2 read back inside F_2.
    let h = NNInstance::numbered(2, 2, [Triple::new(1, 1, 0), Triple::new(0, 0, 1)])?;
    let lifted = lift_subgroup_instance(&h, 2, &[Word::parse(2, "a a")?, Word::parse(2, "b")?])?;
    println!(
        "lifted generators {:?}",
        lifted.generators().iter().map(Word::to_string).collect::<Vec<_>>()
    );
    Ok(())
}

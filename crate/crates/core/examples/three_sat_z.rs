//! Round trip from a domino instance on ℤ to 3-SAT over ⟨t^(2^m)⟩ and back.

use domino::ksat::{decide_ksat_free, dp_to_3sat_z};
use domino::tileset::decide_dp_z_windowed;
use domino::{Caps, NNInstance, Triple};

fn main() -> domino::Result<()> {
    let caps = Caps::default();
    let cases = [
        ("golden mean", NNInstance::numbered(1, 2, [Triple::new(1, 1, 0)])?),
        ("no continuation", NNInstance::numbered(1, 1, [Triple::new(0, 0, 0)])?),
        (
            "alternating",
            NNInstance::numbered(1, 2, [Triple::new(0, 0, 0), Triple::new(1, 1, 0)])?,
        ),
    ];
    for (name, inst) in cases {
        let red = dp_to_3sat_z(&inst, &caps)?;
        let direct = decide_dp_z_windowed(&inst, &caps)?.nonempty;
        let via_sat = decide_ksat_free(&red.formula, &red.subgroup, &caps)?.satisfiable;
        println!(
            "{name:<16} m = {:<2} bits {} clauses {:<3} direct {direct:<5} via 3-SAT {via_sat}",
            red.exponent,
            red.code_bits,
            red.formula.clauses().len()
        );
    }
    Ok(())
}

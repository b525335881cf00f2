//! Recurrence through balloons: finds a balloon for a four-letter instance
//! on F_2 and expands it into a witness ball.

use std::collections::BTreeSet;

use domino::oracle::{validate_witness, Rules};
use domino::recurrence::{
    balloon_axis, balloon_to_configuration, decide_rdp_free, is_balloon, recurrent_letters, Balloon,
};
use domino::tileset::build_tileset_graph;
use domino::{Caps, Generator, NNInstance, Triple};

fn main() -> domino::Result<()> {
    // Letters may repeat along both generators; the only other moves are
    // o -b-> k -a-> r -b-> w -a-> k.
    let allowed: BTreeSet<Triple> = [
        Triple::new(0, 1, 1),
        Triple::new(1, 2, 0),
        Triple::new(2, 3, 1),
        Triple::new(3, 1, 0),
    ]
    .into_iter()
    .chain((0..4).flat_map(|x| [Triple::new(x, x, 0), Triple::new(x, x, 1)]))
    .collect();
    let forbidden = (0..2)
        .flat_map(|s| (0..4).flat_map(move |x| (0..4).map(move |y| Triple::new(x, y, s))))
        .filter(|t| !allowed.contains(t));
    let names = ["o", "k", "r", "w"].map(String::from).to_vec();
    let inst = NNInstance::standard(2, names, forbidden)?;

    let v = decide_rdp_free(&inst, 0)?;
    let found = v.balloon.expect("o is recurrent");
    println!("search found label {} at o", found.label(2)?);

    // A longer balloon that folds back on itself once.
    let (a, b) = (Generator::positive(0), Generator::positive(1));
    let balloon = Balloon::new(vec![0, 1, 2, 3, 1, 0], vec![b, a, b, a, b.inverse()])?;
    println!(
        "hand-built label {}, mirror depth {}, valid {}",
        balloon.label(2)?,
        balloon.mirror_depth(),
        is_balloon(&balloon, &build_tileset_graph(&inst), true).is_ok()
    );

    let radius = 5;
    let ball = balloon_to_configuration(&inst, &balloon, &v.core, radius, &Caps::default())?;
    let axis = balloon_axis(&balloon, 2, radius)?;
    let on_axis: Vec<String> = axis.iter().map(|w| format!("{}@[{w}]", inst.letter_name(ball.get(w).unwrap()))).collect();
    println!("axis inside radius {radius}: {}", on_axis.join(" "));
    println!("witness of {} cells valid: {}", ball.len(), validate_witness(&ball, Rules::Nearest(&inst)).is_ok());
    println!("recurrent letters: {:?}", recurrent_letters(&inst)?);
    Ok(())
}

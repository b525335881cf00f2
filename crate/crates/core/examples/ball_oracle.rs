//! Brute-force ball colourings, used to cross-check the decision procedures.

use domino::oracle::{ball_colorings_exist, validate_witness, BallQuery, OracleAnswer, Rules};
use domino::tileset::{pruning_levels, survives};
use domino::{Caps, NNInstance, Triple};

fn main() -> domino::Result<()> {
    let caps = Caps::default();
    // 1 must be followed by 2 along a, and 2 has no successor along a.
    let inst = NNInstance::numbered(
        2,
        3,
        [Triple::new(1, 0, 0), Triple::new(1, 1, 0), Triple::new(2, 0, 0), Triple::new(2, 1, 0), Triple::new(2, 2, 0)],
    )?;
    let levels = pruning_levels(&inst)?;
    for a in 0..3 {
        let row: Vec<String> = (0..=3)
            .map(|r| {
                let oracle = ball_colorings_exist(Rules::Nearest(&inst), BallQuery::seeded(r, a), &caps)?;
                Ok(format!("r{r}:{}/{}", survives(&levels, a, r) as u8, oracle.decided() == Some(true)))
            })
            .collect::<domino::Result<_>>()?;
        println!("letter {a}: {}", row.join(" "));
    }
    if let OracleAnswer::Exists(ball) = ball_colorings_exist(Rules::Nearest(&inst), BallQuery::radius(3), &caps)? {
        println!("radius-3 witness with {} cells, valid {}", ball.len(), validate_witness(&ball, Rules::Nearest(&inst)).is_ok());
    }
    Ok(())
}

//! Mine every analogy quadruplet over a small consonant and vowel inventory.

use phonovec::analogy::mine_quadruplets;
use phonovec::features::FeatureTable;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = FeatureTable::bundled();
    let phones = ["p", "b", "t", "d", "k", "ɡ", "m", "n", "i", "e", "u", "o"];
    let outcome = mine_quadruplets(&table, phones)?;
    println!(
        "{} quadruplets ({} ordered tuples) over {} phones",
        outcome.quadruplets.len(),
        outcome.raw_tuples,
        phones.len()
    );
    for q in &outcome.quadruplets {
        println!(
            "{:<12} {:<9} dist {}  [{}]",
            q.phones.join(" "),
            q.cv.as_str(),
            q.max_distance,
            q.active_features.join(",")
        );
    }
    Ok(())
}

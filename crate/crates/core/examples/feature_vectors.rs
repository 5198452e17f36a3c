//! Extract phonological vectors, compare them, and measure how quickly small
//! subsamples recover each direction.

use phonovec::features::FeatureTable;
use phonovec::synth::{synthetic_corpus, SyntheticSpec};
use phonovec::vectors::{extract_vector, sample_efficiency, vector_similarity_matrix, Weighting, DEFAULT_TARGETS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = FeatureTable::bundled();
    let bank = synthetic_corpus(&table, &SyntheticSpec::default())?.bank()?;

    let mut vectors = Vec::new();
    for (feature, class) in DEFAULT_TARGETS {
        let v = extract_vector(&bank, &table, feature, class, Weighting::Instance)?;
        println!("{feature}:{class}  +{:?}  -{:?}", v.pos_phones, v.neg_phones);
        vectors.push(v);
    }

    let sim = vector_similarity_matrix(&vectors)?;
    println!("\ncosine similarity");
    for (v, row) in vectors.iter().zip(&sim) {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:+.2}")).collect();
        println!("{:<6} {}", v.feature, cells.join(" "));
    }

    println!("\nmean cosine to the full-bank vector");
    let ns = [1, 4, 16, 64, 256];
    for (feature, class) in DEFAULT_TARGETS {
        let eff = sample_efficiency(&bank, &table, feature, class, &ns, 200, 0)?;
        let cells: Vec<String> = eff.iter().map(|e| format!("N={:<3} {:.3}", e.n, e.mean())).collect();
        println!("{feature:<6} {}", cells.join("  "));
    }
    Ok(())
}

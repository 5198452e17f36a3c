//! Bootstrap cosine evaluation of every quadruplet on a noisy synthetic bank.

use phonovec::analogy::{averaged_similarity, evaluate_quadruplets, mine_quadruplets, success_rate, BootstrapConfig};
use phonovec::features::FeatureTable;
use phonovec::synth::{synthetic_corpus, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = FeatureTable::bundled();
    let spec = SyntheticSpec::default();
    let bank = synthetic_corpus(&table, &spec)?.bank()?;
    let quads = mine_quadruplets(&table, bank.labels())?.quadruplets;

    let cfg = BootstrapConfig {
        n_samples: 300,
        ..BootstrapConfig::default()
    };
    let results = evaluate_quadruplets(&bank, &quads, &cfg)?;
    for r in results.iter().take(5) {
        println!(
            "{:<10} analogy {:.4} [{:.4}, {:.4}]  same {:.4}  diff {:.4}  success {}",
            r.quadruplet.id(),
            r.analogy.mean,
            r.analogy.ci_low,
            r.analogy.ci_high,
            r.same.mean,
            r.diff.mean,
            r.success
        );
    }
    let avg = averaged_similarity(&results, cfg.ci_level)?;
    println!(
        "{} quadruplets: success rate {:.3}, averaged similarity {:.4} [{:.4}, {:.4}]",
        results.len(),
        success_rate(&results)?,
        avg.mean,
        avg.ci_low,
        avg.ci_high
    );
    Ok(())
}

//! Pair-consistency score on a structured bank and on an unstructured one.

use phonovec::analogy::pcs;
use phonovec::features::FeatureTable;
use phonovec::synth::{synthetic_corpus, CorpusKind, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = FeatureTable::bundled();
    for kind in [CorpusKind::Analogy, CorpusKind::Null] {
        let spec = SyntheticSpec {
            kind,
            ..SyntheticSpec::default()
        };
        let bank = synthetic_corpus(&table, &spec)?.bank()?;
        let report = pcs(&bank, &table, None, 0)?;
        println!("{kind}: overall AUC {:.4}", report.overall_auc);
        for c in &report.categories {
            println!("  {:<24} {} pairs  AUC {:.3}", c.label, c.pairs.len(), c.auc);
        }
        for (label, reason) in &report.skipped {
            println!("  {label:<24} skipped: {reason}");
        }
    }
    Ok(())
}

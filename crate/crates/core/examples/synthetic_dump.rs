//! Write a synthetic representation dump to disk and read it back through the
//! same path the command line uses for real dumps.

use phonovec::corpus::{build_phone_bank, discover_dumps, BankFilters};
use phonovec::features::FeatureTable;
use phonovec::synth::{write_synthetic_dump, CorpusKind, SyntheticSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tmp = tempfile::tempdir()?;
    let table = FeatureTable::bundled();
    for (layer, kind) in [CorpusKind::Analogy, CorpusKind::Null].into_iter().enumerate() {
        let spec = SyntheticSpec {
            kind,
            instances_per_phone: 80,
            ..SyntheticSpec::default()
        };
        write_synthetic_dump(&tmp.path().join(format!("layer_{layer:02}")), &table, &spec)?;
    }

    let mut filters = BankFilters::default();
    filters.vocabulary = Some(table.phones().map(str::to_string).collect());
    for dump in discover_dumps(tmp.path())? {
        let manifest = dump.manifest()?;
        let bank = build_phone_bank(&dump, &manifest, &filters)?;
        println!(
            "{} (model {:?}): {} utterances, {} segments, {} phones, dim {}",
            dump.root().file_name().unwrap_or_default().to_string_lossy(),
            dump.meta().model_id,
            dump.utterance_ids()?.len(),
            manifest.len(),
            bank.n_phones(),
            bank.dim()
        );
    }
    Ok(())
}

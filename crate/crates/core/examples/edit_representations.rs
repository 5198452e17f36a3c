//! Plan a batch of voicing edits on a synthetic dump and write the edited
//! representations next to `edits.jsonl`.

use std::collections::BTreeMap;

use phonovec::corpus::{s3mr, RepDump};
use phonovec::features::{FeatureTable, PhoneClass};
use phonovec::synth::{synthetic_corpus, write_synthetic_dump, SyntheticSpec};
use phonovec::vectors::{extract_vector, plan_edit_batch, write_edit_batch, UtteranceGeometry, Weighting};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tmp = tempfile::tempdir()?;
    let table = FeatureTable::bundled();
    let dump: RepDump = write_synthetic_dump(&tmp.path().join("dump"), &table, &SyntheticSpec::default())?;

    let bank = synthetic_corpus(&table, &SyntheticSpec::default())?.bank()?;
    let v = extract_vector(&bank, &table, "voi", PhoneClass::Consonant, Weighting::Instance)?;

    let mut geometry = BTreeMap::new();
    for id in dump.utterance_ids()? {
        let m = dump.load(&id)?;
        geometry.insert(id, UtteranceGeometry::from(&m));
    }
    let specs = plan_edit_batch(&dump.manifest()?, &geometry, &table, "voi", PhoneClass::Consonant, 8, (-3.0, 3.0), 7)?;
    let out = tmp.path().join("edited");
    write_edit_batch(&dump, &specs, &v, &out)?;

    for s in &specs {
        let before = dump.load(&s.utterance_id)?;
        let after = s3mr::read_file(&out.join("reps").join(format!("{}.s3mr", s.edit_id)))?;
        let shift: f64 = (s.frame_start..s.frame_end)
            .flat_map(|t| before.row(t).iter().zip(after.row(t)).map(|(a, b)| (*b - *a) as f64))
            .map(|d| d * d)
            .sum::<f64>()
            .sqrt();
        println!(
            "{}  {} frames {}..{}  λ {:+.2}  ‖Δ‖ {:.3}",
            s.edit_id, s.phone, s.frame_start, s.frame_end, s.lambda, shift
        );
    }
    println!("{} edits written under {}", specs.len(), out.display());
    Ok(())
}

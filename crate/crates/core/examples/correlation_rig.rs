//! Write the synthetic audio rig, measure every edit pair, and correlate λ
//! with the acoustic change for each feature.

use phonovec::acoustics::{measure_edits, AcousticConfig, SignTable};
use phonovec::synth::{write_correlation_rig, RigSpec, EDITED_DIR, ORIG_DIR};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tmp = tempfile::tempdir()?;
    let table = SignTable::default();
    let spec = RigSpec {
        n_per_feature: 60,
        ..RigSpec::default()
    };
    let edits = write_correlation_rig(tmp.path(), &spec, &table)?;
    let groups = measure_edits(
        &edits,
        &tmp.path().join(ORIG_DIR),
        &tmp.path().join(EDITED_DIR),
        &table,
        &AcousticConfig::default(),
    )?;
    for g in &groups {
        let row = g.correlate()?;
        println!(
            "{:<6} {:<10} {:<5} n={:<3} rho {:+.3}  expected {}  match {}",
            row.feature,
            row.class.to_string(),
            row.measurement.to_string(),
            row.n,
            row.rho.unwrap_or(f64::NAN),
            row.sign_expected,
            row.sign_match
        );
    }
    Ok(())
}

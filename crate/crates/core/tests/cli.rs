use std::path::{Path, PathBuf};
use std::process::Command;

use phonovec::acoustics::SignTable;
use phonovec::features::FeatureTable;
use phonovec::synth::{write_correlation_rig, write_synthetic_dump, RigSpec, SyntheticSpec};
use phonovec::vectors::EditSpec;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phonovec"))
}

fn run(args: &[&str]) -> i32 {
    let mut full = vec!["phonovec"];
    full.extend_from_slice(args);
    phonovec::cli::run(full)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn files_under(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

fn small_rig(dir: &Path) -> PathBuf {
    let spec = RigSpec {
        n_per_feature: 32,
        ..RigSpec::default()
    };
    write_correlation_rig(dir, &spec, &SignTable::default()).unwrap();
    dir.join("edits.jsonl")
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope");
    let cases: &[(&[&str], i32)] = &[
        (&["frobnicate"], 2),
        (&["eval", "--dump", s(&missing)], 2),
        (&["mine", "--table", s(&missing), "--phones", "p,b"], 2),
        (&["mine", "--phones", "p,b,qq"], 2),
        (&["eval", "--n-replicates", "3", "--ci-level", "1.5", "--dump", s(&missing)], 2),
        (&["edit", "--n", "3"], 2),
    ];
    for (args, code) in cases {
        let status = bin().args(*args).arg("--out").arg(tmp.path().join("o")).output().unwrap();
        assert_eq!(status.status.code(), Some(*code), "{args:?}");
    }
    let ok = bin().args(["mine", "--phones", "p,b,t,d", "--out"]).arg(tmp.path().join("ok")).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn mine_lists_the_plosive_square() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(&["mine", "--phones", "t,d,p,b", "--out", s(tmp.path())]), 0);
    let text = std::fs::read_to_string(tmp.path().join("quadruplets.jsonl")).unwrap();
    let quads: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(quads.len(), 1);
    assert_eq!(quads[0]["phones"], serde_json::json!(["b", "d", "p", "t"]));
    assert_eq!(quads[0]["cv"], "consonant");
}

#[test]
fn eval_writes_one_summary_row_per_stratum() {
    let tmp = tempfile::tempdir().unwrap();
    let dump = tmp.path().join("syn");
    let out = tmp.path().join("eval");
    assert_eq!(run(&["gen-synthetic", "--kind", "noisy", "--instances", "60", "--out", s(&dump)]), 0);
    assert_eq!(run(&["eval", "--dump", s(&dump), "--strata", "all,cv", "--n-samples", "100", "--out", s(&out)]), 0);
    let mut r = csv::Reader::from_path(out.join("summary.csv")).unwrap();
    let strata: Vec<String> = r.records().map(|rec| rec.unwrap()[1].to_string()).collect();
    assert_eq!(strata, ["all", "cv:consonant", "cv:vowel"]);
    let results = std::fs::read_to_string(out.join("results.jsonl")).unwrap();
    assert_eq!(results.lines().count(), 21);
    // writes are atomic, so no temporary files survive
    for f in files_under(tmp.path()) {
        assert!(!f.file_name().unwrap().to_string_lossy().starts_with(".tmp"), "{}", f.display());
    }
}

#[test]
fn vectors_on_plosives_only_extract_voicing() {
    let tmp = tempfile::tempdir().unwrap();
    let dump = tmp.path().join("plosives");
    let spec = SyntheticSpec {
        phones: ["p", "b", "t", "d", "k", "ɡ"].iter().map(|p| p.to_string()).collect(),
        instances_per_phone: 60,
        ..SyntheticSpec::default()
    };
    write_synthetic_dump(&dump, &FeatureTable::bundled(), &spec).unwrap();
    let out = tmp.path().join("v");
    assert_eq!(run(&["vectors", "--dump", s(&dump), "--repeats", "100", "--out", s(&out)]), 0);

    let skipped = std::fs::read_to_string(out.join("skipped.csv")).unwrap();
    assert_eq!(skipped.lines().count(), 1 + 7);
    assert!(!skipped.contains("voi,"));
    let vectors: Vec<_> = std::fs::read_dir(out.join("vectors")).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(vectors, ["voi_consonant.json"]);

    let mut r = csv::Reader::from_path(out.join("sample_efficiency_hist.csv")).unwrap();
    let mut total = std::collections::BTreeMap::<String, u64>::new();
    for rec in r.records() {
        let rec = rec.unwrap();
        *total.entry(rec[2].to_string()).or_default() += rec[5].parse::<u64>().unwrap();
    }
    assert_eq!(total.len(), 5);
    assert!(total.values().all(|&c| c == 100), "{total:?}");
}

#[test]
fn similarity_matrix_is_symmetric_with_unit_diagonal() {
    let tmp = tempfile::tempdir().unwrap();
    let dump = tmp.path().join("syn");
    let out = tmp.path().join("v");
    assert_eq!(run(&["gen-synthetic", "--kind", "noisy", "--instances", "60", "--out", s(&dump)]), 0);
    assert_eq!(run(&["vectors", "--dump", s(&dump), "--repeats", "20", "--out", s(&out)]), 0);
    let mut r = csv::Reader::from_path(out.join("similarity.csv")).unwrap();
    let m: Vec<Vec<f64>> = r
        .records()
        .map(|rec| rec.unwrap().iter().skip(1).map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(m.len(), 8);
    for i in 0..8 {
        assert!((m[i][i] - 1.0).abs() < 1e-6);
        for j in 0..8 {
            assert_eq!(m[i][j], m[j][i]);
        }
    }
}

#[test]
fn correlate_without_svg_writes_only_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let edits = small_rig(&tmp.path().join("rig"));
    let out = tmp.path().join("corr");
    assert_eq!(run(&["correlate", "--edits", s(&edits), "--no-svg", "--out", s(&out)]), 0);
    let files = files_under(&out);
    assert!(files.iter().any(|f| f.ends_with("correlation.csv")));
    assert!(files.iter().all(|f| f.extension().unwrap() == "csv"), "{files:?}");

    let with_svg = tmp.path().join("corr_svg");
    assert_eq!(run(&["correlate", "--edits", s(&edits), "--svg", "--out", s(&with_svg)]), 0);
    assert_eq!(files_under(&with_svg).iter().filter(|f| f.extension().unwrap() == "svg").count(), 8);
}

#[test]
fn zero_lambda_edits_route_to_stability() {
    let tmp = tempfile::tempdir().unwrap();
    let rig = tmp.path().join("rig");
    let edits = small_rig(&rig);
    let zeroed: Vec<String> = std::fs::read_to_string(&edits)
        .unwrap()
        .lines()
        .map(|l| {
            let mut e: EditSpec = serde_json::from_str(l).unwrap();
            e.lambda = 0.0;
            serde_json::to_string(&e).unwrap()
        })
        .collect();
    std::fs::write(&edits, zeroed.join("\n")).unwrap();
    let out = tmp.path().join("out");
    assert_eq!(run(&["correlate", "--edits", s(&edits), "--out", s(&out)]), 0);
    assert!(out.join("stability.csv").exists());
    assert!(out.join("stability_density.csv").exists());
    assert!(!out.join("correlation.csv").exists());
}

#[test]
fn flags_override_the_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let from_config = tmp.path().join("from_config");
    let from_flag = tmp.path().join("from_flag");
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, format!("out = {:?}\nseed = 3\n", s(&from_config))).unwrap();

    assert_eq!(run(&["--config", s(&cfg), "mine", "--phones", "p,b,t,d"]), 0);
    assert!(from_config.join("quadruplets.jsonl").exists());

    assert_eq!(run(&["--config", s(&cfg), "--out", s(&from_flag), "mine", "--phones", "p,b,t,d"]), 0);
    assert!(from_flag.join("quadruplets.jsonl").exists());

    std::fs::write(&cfg, "no_such_key = 1\n").unwrap();
    assert_eq!(run(&["--config", s(&cfg), "mine", "--phones", "p,b"]), 2);
}

#[test]
fn seed_changes_bootstrap_output() {
    let tmp = tempfile::tempdir().unwrap();
    let dump = tmp.path().join("syn");
    assert_eq!(run(&["gen-synthetic", "--kind", "noisy", "--instances", "60", "--out", s(&dump)]), 0);
    let eval = |seed: &str, name: &str| {
        let out = tmp.path().join(name);
        assert_eq!(run(&["eval", "--dump", s(&dump), "--n-samples", "50", "--seed", seed, "--out", s(&out)]), 0);
        std::fs::read(out.join("results.jsonl")).unwrap()
    };
    assert_eq!(eval("1", "a"), eval("1", "b"));
    assert_ne!(eval("1", "a"), eval("2", "c"));
}

//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Runs without the libtest harness so the report is always printed.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use phonovec::acoustics::{cog, correlate_feature, formants, hnr, spearman, AcousticConfig, MeasurementPair, Sign, SignTable, Waveform};
use phonovec::analogy::mine_quadruplets;
use phonovec::corpus::{slice_and_pool, RepresentationMatrix, SegmentRecord};
use phonovec::features::{FeatureTable, PhoneClass, TernaryVector};
use phonovec::synth::signals::{add_noise_at_ratio, sine, two_formant_vowel};
use phonovec::synth::{synthetic_corpus, SyntheticSpec};
use phonovec::vectors::{apply_edit, sample_efficiency, EditSpec, PhonologicalVector, Weighting, DEFAULT_TARGETS};

type Check = Result<String, String>;

fn cli(args: &[&str]) -> i32 {
    let mut full = vec!["phonovec"];
    full.extend_from_slice(args);
    phonovec::cli::run(full)
}

fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

/// `(success_rate, pcs)` of the `all` row of an eval summary.
fn summary_all(path: &Path) -> Result<(f64, f64), String> {
    let mut r = csv::Reader::from_path(path).map_err(|e| e.to_string())?;
    let headers = r.headers().map_err(|e| e.to_string())?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name).ok_or(format!("no column {name}"));
    let (s, c, pc) = (col("stratum")?, col("success_rate")?, col("pcs")?);
    for rec in r.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        if &rec[s] == "all" {
            let num = |i: usize| rec[i].parse::<f64>().map_err(|e| format!("{}: {e}", &rec[i]));
            return Ok((num(c)?, num(pc)?));
        }
    }
    Err("no `all` row".into())
}

fn exact_analogy_oracle() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = dir.path().join("noisy");
    let out = dir.path().join("eval");
    if cli(&["gen-synthetic", "--kind", "noisy", "--out", p(&corpus)]) != 0 {
        return Err("gen-synthetic failed".into());
    }
    let spec = SyntheticSpec::default();
    let table = FeatureTable::bundled();
    let n_quads = mine_quadruplets(&table, spec.phones.iter().map(String::as_str))
        .map_err(|e| e.to_string())?
        .quadruplets
        .len();
    if spec.instances_per_phone < 100 || spec.phones.len() < 8 || n_quads < 2 || spec.noise_sd != 0.01 {
        return Err("corpus does not meet the criterion's shape".into());
    }
    let t = Instant::now();
    let code = cli(&["eval", "--dump", p(&corpus), "--jobs", "1", "--out", p(&out)]);
    let secs = t.elapsed().as_secs_f64();
    if code != 0 {
        return Err(format!("eval exited {code}"));
    }
    let (success, pcs) = summary_all(&out.join("summary.csv"))?;
    let detail = format!(
        "{} phones x {} instances, {n_quads} quadruplets: success {success:.4}, PCS {pcs:.4}, {secs:.1} s single-threaded",
        spec.phones.len(),
        spec.instances_per_phone
    );
    if success == 1.0 && pcs >= 0.99 && secs < 60.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn null_oracle() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = dir.path().join("null");
    let out = dir.path().join("eval");
    if cli(&["gen-synthetic", "--kind", "null", "--out", p(&corpus)]) != 0
        || cli(&["eval", "--dump", p(&corpus), "--out", p(&out)]) != 0
    {
        return Err("command failed".into());
    }
    let (success, pcs) = summary_all(&out.join("summary.csv"))?;
    let detail = format!("success {success:.4}, PCS {pcs:.4}");
    if success <= 0.05 && (0.4..=0.6).contains(&pcs) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Binary extension written out directly: + -> (1,0), 0 -> (0,0), - -> (0,1).
fn extend_oracle(t: &[i8]) -> Vec<i8> {
    t.iter()
        .flat_map(|&v| match v {
            1 => [1, 0],
            -1 => [0, 1],
            _ => [0, 0],
        })
        .collect()
}

/// Orbit of a tuple under the three analogy symmetries, by closure.
fn orbit_by_closure(t: [usize; 4]) -> BTreeSet<[usize; 4]> {
    let gens = [
        |[a, b, c, d]: [usize; 4]| [a, c, b, d],
        |[a, b, c, d]: [usize; 4]| [b, a, d, c],
        |[a, b, c, d]: [usize; 4]| [c, d, a, b],
    ];
    let mut seen = BTreeSet::from([t]);
    let mut queue = VecDeque::from([t]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g(x);
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen
}

fn brute_force_quads(vectors: &[Vec<i8>]) -> BTreeSet<[usize; 4]> {
    let n = vectors.len();
    let diff = |a: usize, b: usize| -> Vec<i8> { vectors[a].iter().zip(&vectors[b]).map(|(x, y)| x - y).collect() };
    let mut out = BTreeSet::new();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let d = diff(a, b);
            for c in 0..n {
                for e in 0..n {
                    let same_unordered = (a == c && b == e) || (a == e && b == c);
                    if same_unordered || diff(c, e) != d {
                        continue;
                    }
                    out.insert(*orbit_by_closure([a, b, c, e]).iter().next().expect("non-empty orbit"));
                }
            }
        }
    }
    out
}

fn mining_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut total = 0usize;
    let mut vocabularies = 0usize;
    for table_ix in 0..50 {
        let n_feat = rng.gen_range(2..=5);
        let features: Vec<String> = (0..n_feat).map(|i| format!("f{i}")).collect();
        // distinct rows, so label identity and vector identity coincide
        let mut rows: BTreeMap<Vec<i8>, String> = BTreeMap::new();
        let target = rng.gen_range(6..=20);
        for _ in 0..400 {
            if rows.len() == target {
                break;
            }
            let v: Vec<i8> = (0..n_feat).map(|_| rng.gen_range(-1..=1)).collect();
            let label = format!("x{}", rows.len());
            rows.entry(v).or_insert(label);
        }
        let table = FeatureTable::new(
            features,
            rows.iter().map(|(v, l)| (l.clone(), TernaryVector::from_i8(v).expect("ternary"))),
        )
        .map_err(|e| e.to_string())?;
        let labels: Vec<String> = rows.values().cloned().collect();
        for _ in 0..4 {
            let k = rng.gen_range(0..=labels.len().min(12));
            let mut vocab: Vec<String> = labels.choose_multiple(&mut rng, k).cloned().collect();
            vocab.sort();
            let vectors: Vec<Vec<i8>> = vocab
                .iter()
                .map(|l| extend_oracle(&table.ternary(l).expect("in table").to_i8()))
                .collect();
            let expected: BTreeSet<[String; 4]> = brute_force_quads(&vectors)
                .into_iter()
                .map(|t| t.map(|i| vocab[i].clone()))
                .collect();
            let mined: BTreeSet<[String; 4]> = mine_quadruplets(&table, vocab.iter().map(String::as_str))
                .map_err(|e| e.to_string())?
                .quadruplets
                .into_iter()
                .map(|q| q.phones)
                .collect();
            if mined != expected {
                return Err(format!(
                    "table {table_ix}, vocabulary {vocab:?}: mined {} vs brute force {}",
                    mined.len(),
                    expected.len()
                ));
            }
            total += expected.len();
            vocabularies += 1;
        }
    }
    Ok(format!("50 tables, {vocabularies} vocabularies, {total} quadruplets matched"))
}

fn pooling_exactness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let fr = 50.0;
    let mut worst = 0.0f64;
    for case in 0..1000 {
        let rows = rng.gen_range(1..40);
        let cols = rng.gen_range(1..16);
        let data: Vec<f32> = (0..rows * cols).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let m = RepresentationMatrix::new(data.clone(), rows, cols, 320, 16000).map_err(|e| e.to_string())?;
        let (s, e, t0, t1) = match case % 4 {
            0 => (0, rows, 0.0, rows as f64 / fr),
            1 => {
                let s = rng.gen_range(0..rows);
                (s, s + 1, s as f64 / fr, (s + 1) as f64 / fr)
            }
            2 => {
                // shorter than one frame: the frame at the start index
                let s = rng.gen_range(0..rows);
                (s, s + 1, (s as f64 + 0.2) / fr, (s as f64 + 0.7) / fr)
            }
            _ => {
                let s = rng.gen_range(0..rows);
                let e = rng.gen_range(s + 1..=rows);
                (s, e, s as f64 / fr, e as f64 / fr)
            }
        };
        let seg = SegmentRecord::new("u", "a", t0, t1);
        let got = slice_and_pool(&m, &seg).map_err(|err| format!("case {case}: {err}"))?;
        for c in 0..cols {
            let oracle = (s..e).map(|t| data[t * cols + c] as f64).sum::<f64>() / (e - s) as f64;
            let rel = (got[c] - oracle).abs() / oracle.abs().max(1e-12);
            let rel = if oracle.abs() < 1e-9 { (got[c] - oracle).abs() } else { rel };
            worst = worst.max(rel);
        }
    }
    let detail = format!("1000 cases, worst relative error {worst:.2e}");
    if worst <= 1e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn edit_contract() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst = 0.0f64;
    for case in 0..1000 {
        let rows = rng.gen_range(1..30);
        let cols = rng.gen_range(1..12);
        let data: Vec<f32> = (0..rows * cols).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let m = RepresentationMatrix::new(data, rows, cols, 320, 16000).map_err(|e| e.to_string())?;
        let v = PhonologicalVector {
            feature: "voi".into(),
            phone_class: PhoneClass::Consonant,
            direction: (0..cols).map(|_| rng.gen_range(-2.0..2.0)).collect(),
            n_pos: 1,
            n_neg: 1,
            pos_phones: vec![],
            neg_phones: vec![],
            weighting: Weighting::Instance,
            layer_index: 0,
            model_id: String::new(),
        };
        let s = rng.gen_range(0..rows);
        let e = rng.gen_range(s + 1..=rows);
        let lambda = if case % 10 == 0 { 0.0 } else { rng.gen_range(-8.0..8.0) };
        let spec = EditSpec {
            edit_id: format!("c{case}"),
            utterance_id: "u".into(),
            phone: "b".into(),
            t_start: s as f64 / 50.0,
            t_end: e as f64 / 50.0,
            frame_start: s,
            frame_end: e,
            feature: "voi".into(),
            phone_class: PhoneClass::Consonant,
            lambda,
        };
        let out = apply_edit(&m, &spec, &v).map_err(|err| format!("case {case}: {err}"))?;
        if lambda == 0.0 && out.data().iter().zip(m.data()).any(|(a, b)| a.to_bits() != b.to_bits()) {
            return Err(format!("case {case}: λ=0 not bit-identical"));
        }
        for t in 0..rows {
            for c in 0..cols {
                let (a, b) = (out.row(t)[c], m.row(t)[c]);
                if t < s || t >= e {
                    if a.to_bits() != b.to_bits() {
                        return Err(format!("case {case}: row {t} outside the span changed"));
                    }
                } else {
                    let err = ((a as f64 - b as f64) - lambda * v.direction[c] as f64).abs();
                    worst = worst.max(err);
                }
            }
        }
    }
    let detail = format!("1000 cases, worst in-span error {worst:.2e}");
    if worst <= 1e-6 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_spearman(xs: &[f64], ys: &[f64]) -> f64 {
    let rank = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|&x| {
                let less = v.iter().filter(|&&y| y < x).count() as f64;
                let equal = v.iter().filter(|&&y| y == x).count() as f64;
                less + (equal + 1.0) / 2.0
            })
            .collect()
    };
    let (rx, ry) = (rank(xs), rank(ys));
    let n = xs.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn dsp_oracles() -> Check {
    let cfg = AcousticConfig::default();
    let fs = 16000;
    let wave = |x: Vec<f64>| Waveform::new(x, fs).map_err(|e| e.to_string());
    let mut notes = Vec::new();
    let mut failures = Vec::new();

    let w = wave(sine(1000.0, fs, 0.3, 1.0))?;
    let c1 = cog(&w, 0.0, 0.3, &cfg).map_err(|e| e.to_string())?.value.unwrap_or(f64::NAN);
    notes.push(format!("COG 1 kHz {c1:.1}"));
    if !((c1 - 1000.0).abs() <= 10.0) {
        failures.push("pure-tone COG");
    }
    let pair: Vec<f64> = sine(500.0, fs, 0.3, 1.0).iter().zip(sine(1500.0, fs, 0.3, 1.0)).map(|(a, b)| a + b).collect();
    let c2 = cog(&wave(pair)?, 0.0, 0.3, &cfg).map_err(|e| e.to_string())?.value.unwrap_or(f64::NAN);
    notes.push(format!("COG 500+1500 {c2:.1}"));
    if !((c2 - 1000.0).abs() <= 20.0) {
        failures.push("two-tone COG");
    }

    // the named resonator oracle: 120 Hz impulse train, resonators at 500 and 1500 Hz
    let w = wave(two_formant_vowel(120.0, 500.0, 80.0, 1500.0, 100.0, fs, 0.3))?;
    let f = formants(&w, 0.0, 0.3, &cfg).map_err(|e| e.to_string())?;
    let (m1, m2) = (f.f1.value.unwrap_or(f64::NAN), f.f2.value.unwrap_or(f64::NAN));
    let err = ((m1 - 500.0).abs() / 500.0).max((m2 - 1500.0).abs() / 1500.0);
    notes.push(format!("formants {m1:.0}/{m2:.0} Hz ({:.1}%)", 100.0 * err));
    if !(err <= 0.10) {
        failures.push("formants");
    }
    let shifted = formants(&w, 0.005, 0.3, &cfg).map_err(|e| e.to_string())?.f1.value.unwrap_or(f64::NAN);
    if !((shifted - m1).abs() / m1 < 0.05) {
        failures.push("formant offset stability");
    }
    let b1: Vec<f64> = [60.0, 120.0, 240.0]
        .iter()
        .map(|&bw| {
            let w = Waveform::new(two_formant_vowel(120.0, 500.0, bw, 1500.0, 100.0, fs, 0.3), fs).expect("finite");
            formants(&w, 0.0, 0.3, &cfg).ok().and_then(|f| f.b1.value).unwrap_or(f64::NAN)
        })
        .collect();
    notes.push(format!("B1 sweep {:.0} < {:.0} < {:.0}", b1[0], b1[1], b1[2]));
    if !(b1[0] < b1[1] && b1[1] < b1[2]) {
        failures.push("bandwidth sweep");
    }

    let harmonic = two_formant_vowel(120.0, 600.0, 80.0, 1700.0, 100.0, fs, 0.5);
    for seed in 0..5 {
        let v: Vec<f64> = [10.0, 1.0, 0.1]
            .iter()
            .map(|&r| {
                let w = Waveform::new(add_noise_at_ratio(&harmonic, r, seed), fs).expect("finite");
                hnr(&w, 0.0, 0.5, &cfg).ok().and_then(|m| m.value).unwrap_or(f64::NAN)
            })
            .collect();
        if !(v[0] > v[1] && v[1] > v[2]) {
            failures.push("HNR ordering");
            notes.push(format!("HNR seed {seed}: {v:?}"));
        } else if seed == 0 {
            notes.push(format!("HNR {:.1} > {:.1} > {:.1} dB", v[0], v[1], v[2]));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut worst_rho = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(3..40);
        // small integer ranges so the series contain ties
        let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(0..8) as f64).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(-3..=3) as f64 / 3.0).collect();
        let oracle = oracle_spearman(&xs, &ys);
        if let Ok(r) = spearman(&xs, &ys) {
            if oracle.is_finite() {
                worst_rho = worst_rho.max((r - oracle).abs());
            }
        }
    }
    let idx: Vec<f64> = (0..50).map(|i| i as f64).collect();
    let mono: Vec<f64> = idx.iter().map(|i| i.powi(3)).collect();
    let up = spearman(&idx, &mono).map_err(|e| e.to_string())?;
    let down = spearman(&idx, &mono.iter().map(|v| -v).collect::<Vec<_>>()).map_err(|e| e.to_string())?;
    notes.push(format!("Spearman worst {worst_rho:.1e}, monotone {up:+} / {down:+}"));
    if worst_rho > 1e-12 || up != 1.0 || down != -1.0 {
        failures.push("Spearman");
    }

    let detail = notes.join("; ");
    if failures.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{} failed: {detail}", failures.join(", ")))
    }
}

fn correlation_rig() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let noise = Normal::new(0.0, 0.5).expect("valid sd");
    let table = SignTable::default();
    let mut notes = Vec::new();
    let mut ok = true;
    for (feature, kind, sign) in table.rows() {
        let s = if *sign == Sign::Plus { 1.0 } else { -1.0 };
        let pairs: Vec<MeasurementPair> = (0..200)
            .map(|_| {
                let lambda = rng.gen_range(-5.0..5.0);
                let before = rng.gen_range(100.0..1000.0);
                MeasurementPair {
                    lambda,
                    before: Some(before),
                    after: Some(before + s * 0.5 * lambda + noise.sample(&mut rng)),
                }
            })
            .collect();
        let class = DEFAULT_TARGETS.iter().find(|t| t.0 == feature).map_or(PhoneClass::Consonant, |t| t.1);
        let row = correlate_feature(feature, class, *kind, *sign, &pairs).map_err(|e| e.to_string())?;
        let rho = row.rho.unwrap_or(0.0);
        ok &= rho.abs() >= 0.9 && row.sign_match;
        notes.push(format!("{feature} {rho:+.3}"));

        let deltas: Vec<f64> = pairs.iter().map(|p| p.after.unwrap() - p.before.unwrap()).collect();
        let mut lambdas: Vec<f64> = pairs.iter().map(|p| p.lambda).collect();
        let mut small = 0;
        for _ in 0..100 {
            lambdas.shuffle(&mut rng);
            if spearman(&lambdas, &deltas).map_err(|e| e.to_string())?.abs() <= 0.2 {
                small += 1;
            }
        }
        ok &= small >= 95;
        notes.push(format!("permuted {small}/100"));
    }
    let detail = notes.join(", ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn correlation_rig_audio() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let rig = dir.path().join("rig");
    let out = dir.path().join("corr");
    if cli(&["gen-synthetic", "--kind", "rig", "--out", p(&rig)]) != 0
        || cli(&["correlate", "--edits", p(&rig.join("edits.jsonl")), "--out", p(&out)]) != 0
    {
        return Err("command failed".into());
    }
    let mut r = csv::Reader::from_path(out.join("correlation.csv")).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    let mut ok = true;
    let mut n = 0;
    for rec in r.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let rho: f64 = rec[4].parse().unwrap_or(0.0);
        ok &= rho.abs() >= 0.9 && &rec[7] == "true";
        notes.push(format!("{} {} {rho:+.3}", &rec[0], &rec[2]));
        n += 1;
    }
    ok &= n == 8;
    let detail = notes.join(", ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sample_efficiency_check() -> Check {
    let table = FeatureTable::bundled();
    let corpus = synthetic_corpus(&table, &SyntheticSpec::default()).map_err(|e| e.to_string())?;
    let bank = corpus.bank().map_err(|e| e.to_string())?;
    let ns = [1, 4, 16, 64, 256];
    let mut notes = Vec::new();
    let mut ok = true;
    for (feature, class) in DEFAULT_TARGETS {
        let eff = sample_efficiency(&bank, &table, feature, class, &ns, 1000, 0).map_err(|e| e.to_string())?;
        let means: Vec<f64> = eff.iter().map(|e| e.mean()).collect();
        let monotone = means.windows(2).all(|w| w[1] >= w[0]);
        ok &= monotone && means[4] >= 0.99;
        notes.push(format!("{feature} {:.3}->{:.4}{}", means[0], means[4], if monotone { "" } else { " (not monotone)" }));
    }
    let detail = notes.join(", ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).expect("readable dir") {
            let path = entry.expect("dir entry").path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).expect("under root").to_path_buf();
                out.insert(rel, std::fs::read(&path).expect("readable file"));
            }
        }
    }
    out
}

fn determinism() -> Check {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    // Both runs use the same paths, since edit sidecars record their source file.
    let base = root.path().join("run");
    let run_all = |jobs: &str| -> Result<BTreeMap<PathBuf, Vec<u8>>, String> {
        if base.exists() {
            std::fs::remove_dir_all(&base).map_err(|e| e.to_string())?;
        }
        let o = |name: &str| base.join(name).to_str().expect("utf-8 temp path").to_string();
        let (syn, rig) = (o("syn"), o("rig"));
        let rig_edits = format!("{rig}/edits.jsonl");
        let steps: Vec<Vec<String>> = [
            vec!["gen-synthetic", "--kind", "noisy", "--out", &syn],
            vec!["gen-synthetic", "--kind", "rig", "--rig-n", "40", "--out", &rig],
            vec!["mine", "--dump", &syn, "--out", &o("mine")],
            vec!["eval", "--dump", &syn, "--n-samples", "200", "--out", &o("eval")],
            vec!["pcs", "--dump", &syn, "--out", &o("pcs")],
            vec!["vectors", "--dump", &syn, "--repeats", "200", "--out", &o("vectors")],
            vec!["edit", "--dump", &syn, "--feature", "voi", "--class", "consonant", "--n", "50", "--out", &o("edit")],
            vec!["correlate", "--edits", &rig_edits, "--out", &o("corr")],
        ]
        .iter()
        .map(|s| s.iter().map(|x| x.to_string()).collect())
        .collect();
        for step in &steps {
            let mut args: Vec<&str> = step.iter().map(String::as_str).collect();
            args.extend(["--jobs", jobs, "--seed", "5"]);
            let code = cli(&args);
            if code != 0 {
                return Err(format!("{} exited {code} at --jobs {jobs}", step[0]));
            }
        }
        // λ = 0 copy of the rig edits for the stability command
        let text = std::fs::read_to_string(&rig_edits).map_err(|e| e.to_string())?;
        let zeroed: Vec<String> = text
            .lines()
            .map(|l| {
                let mut e: EditSpec = serde_json::from_str(l).expect("edit spec");
                e.lambda = 0.0;
                serde_json::to_string(&e).expect("serializable")
            })
            .collect();
        let zero_path = o("zero_edits.jsonl");
        std::fs::write(&zero_path, zeroed.join("\n")).map_err(|e| e.to_string())?;
        let code = cli(&[
            "stability",
            "--edits",
            &zero_path,
            "--orig",
            &format!("{rig}/orig"),
            "--resynth",
            &format!("{rig}/edited"),
            "--out",
            &o("stability"),
            "--jobs",
            jobs,
        ]);
        if code != 0 {
            return Err(format!("stability exited {code}"));
        }
        Ok(snapshot(&base))
    };
    let a = run_all("1")?;
    let b = run_all("8")?;
    if a.keys().ne(b.keys()) {
        return Err("different file sets".into());
    }
    let differing: Vec<String> = a
        .iter()
        .filter(|(k, v)| b[*k] != **v)
        .map(|(k, _)| k.display().to_string())
        .collect();
    if differing.is_empty() {
        Ok(format!("{} output files byte-identical across --jobs 1 and --jobs 8 for all 8 commands", a.len()))
    } else {
        Err(format!("differing: {}", differing.join(", ")))
    }
}

fn main() {
    let checks: [(&str, fn() -> Check); 10] = [
        ("exact-analogy oracle", exact_analogy_oracle),
        ("null oracle", null_oracle),
        ("mining equivalence", mining_equivalence),
        ("pooling exactness", pooling_exactness),
        ("edit contract", edit_contract),
        ("DSP oracles", dsp_oracles),
        ("correlation-sign rig", correlation_rig),
        ("correlation-sign rig (audio, via correlate)", correlation_rig_audio),
        ("sample efficiency", sample_efficiency_check),
        ("determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in checks {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS  {name} [{secs:.1}s]: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL  {name} [{secs:.1}s]: {d}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{read_vocab_file, LayerSelection, RunConfig};
use super::svg::{self, Series, Style};
use super::{CliError, CorrelateArgs, EditArgs, EvalArgs, GenArgs, InputArgs, MineArgs, PcsArgs, StabilityArgs, VectorsArgs};
use crate::acoustics::{
    measure_edits, stability_from_dirs, write_correlation_csv, write_stability_csv, write_stability_density_csv,
    write_wav, CorrelationRow, SignTable, WavEncoding, Waveform,
};
use crate::analogy::{
    evaluate_quadruplets, mine_quadruplets, pcs as pcs_report, stratify, AnalogyError, AnalogyResult, PcsReport,
    Quadruplet, StratifyMode, StratumSummary,
};
use crate::corpus::{build_phone_bank, discover_dumps, PhoneBank, RepDump};
use crate::features::{FeatureTable, PhoneClass};
use crate::io::{to_jsonl, write_atomic};
use crate::synth::signals::{add_noise_at_ratio, normalize_peak, sine, two_formant_vowel};
use crate::synth::{write_correlation_rig, write_synthetic_dump, CorpusKind, RigSpec, SyntheticSpec};
use crate::vectors::{
    extract_vector, plan_edit_batch, sample_efficiency, vector_similarity_matrix, write_edit_batch,
    PhonologicalVector, UtteranceGeometry, Weighting, DEFAULT_TARGETS, EDITS_FILE,
};

fn f6(v: f64) -> String {
    format!("{v:.6}")
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
    write_atomic(path, &bytes)?;
    Ok(())
}

fn comma_list(s: &str) -> Vec<String> {
    s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()
}

fn apply_input(cfg: &mut RunConfig, input: &InputArgs) {
    if !input.dumps.is_empty() {
        cfg.dumps = input.dumps.clone();
    }
    if let Some(t) = &input.table {
        cfg.feature_table = Some(t.clone());
    }
    if let Some(l) = &input.layers {
        cfg.layers = l.clone();
    }
}

/// Every configured dump whose layer is selected, sorted by layer.
fn select_dumps(cfg: &RunConfig) -> Result<Vec<RepDump>, CliError> {
    if cfg.dumps.is_empty() {
        return Err(CliError::Usage("no dump given (use --dump or `dumps` in the config)".into()));
    }
    let selection = LayerSelection::parse(&cfg.layers)?;
    let mut out = Vec::new();
    for p in &cfg.dumps {
        if !p.exists() {
            return Err(CliError::Usage(format!("dump path {} does not exist", p.display())));
        }
        let found = discover_dumps(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
        out.extend(found.into_iter().filter(|d| selection.contains(d.layer_index())));
    }
    if let LayerSelection::Set(wanted) = &selection {
        let have: BTreeSet<u32> = out.iter().map(|d| d.layer_index()).collect();
        if let Some(missing) = wanted.iter().find(|l| !have.contains(l)) {
            return Err(CliError::Usage(format!("no dump for requested layer {missing}")));
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("no dump matches the layer selection".into()));
    }
    out.sort_by(|a, b| a.layer_index().cmp(&b.layer_index()).then_with(|| a.root().cmp(b.root())));
    Ok(out)
}

fn load_bank(dump: &RepDump, cfg: &RunConfig, table: &FeatureTable) -> Result<PhoneBank, CliError> {
    let manifest = dump.manifest()?;
    let filters = cfg.bank_filters(table)?;
    build_phone_bank(dump, &manifest, &filters)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", dump.root().display())))
}

fn parse_class(s: &str) -> Result<PhoneClass, CliError> {
    s.parse().map_err(CliError::Usage)
}

pub(super) fn mine(mut cfg: RunConfig, args: MineArgs) -> Result<(), CliError> {
    apply_input(&mut cfg, &args.input);
    let table = cfg.feature_table()?;
    let vocab: BTreeSet<String> = if let Some(p) = &args.phones {
        comma_list(p).into_iter().collect()
    } else if let Some(path) = &args.vocab {
        read_vocab_file(path)?
    } else if !cfg.dumps.is_empty() {
        let dump = select_dumps(&cfg)?.remove(0);
        let bank = load_bank(&dump, &cfg, &table)?;
        bank.labels().into_iter().map(str::to_string).collect()
    } else {
        return Err(CliError::Usage("no vocabulary: give --phones, --vocab or --dump".into()));
    };
    let unknown: Vec<&str> = vocab.iter().map(String::as_str).filter(|p| !table.contains(p)).collect();
    if !unknown.is_empty() {
        return Err(CliError::Usage(format!("phones not in the feature table: {}", unknown.join(" "))));
    }
    let outcome = mine_quadruplets(&table, vocab.iter().map(String::as_str))?;
    let path = cfg.out.join("quadruplets.jsonl");
    write_atomic(&path, &to_jsonl(&outcome.quadruplets)?)?;
    println!(
        "{} quadruplets ({} ordered tuples) over {} phones -> {}",
        outcome.quadruplets.len(),
        outcome.raw_tuples,
        vocab.len(),
        path.display()
    );
    Ok(())
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| CliError::Usage(format!("{} line {}: {e}", path.display(), i + 1)))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PcsScope {
    All,
    Class(PhoneClass),
    None,
}

/// One summary row: stratum label, PCS scope, and the results in it.
fn summary_rows(
    layer: u32,
    results: &[AnalogyResult],
    modes: &[Option<StratifyMode>],
    ci_level: f64,
) -> Result<Vec<(String, PcsScope, Option<StratumSummary>, u32)>, AnalogyError> {
    let mut rows = Vec::new();
    for mode in modes {
        match mode {
            None => {
                let s = (!results.is_empty()).then(|| StratumSummary::of(results, ci_level)).transpose()?;
                rows.push(("all".to_string(), PcsScope::All, s, layer));
            }
            Some(m) => {
                for (label, s) in stratify(results, *m, ci_level)? {
                    let scope = match m {
                        StratifyMode::CvClass => PcsScope::Class(label.parse().expect("cv strata are class names")),
                        _ => PcsScope::None,
                    };
                    rows.push((format!("{}:{label}", m.prefix()), scope, Some(s), layer));
                }
            }
        }
    }
    Ok(rows)
}

fn parse_strata(list: &[String]) -> Result<Vec<Option<StratifyMode>>, CliError> {
    let mut out = Vec::new();
    for s in list {
        let m = if s == "all" {
            None
        } else {
            Some(s.parse::<StratifyMode>().map_err(|e| CliError::Usage(e.to_string()))?)
        };
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

pub(super) fn eval(mut cfg: RunConfig, args: EvalArgs) -> Result<(), CliError> {
    apply_input(&mut cfg, &args.input);
    if let Some(v) = args.n_samples {
        cfg.n_samples = v;
    }
    if let Some(v) = args.n_replicates {
        cfg.n_replicates = v;
    }
    if let Some(v) = args.ci_level {
        cfg.ci_level = v;
    }
    if let Some(s) = &args.strata {
        cfg.strata = comma_list(s);
    }
    cfg.svg |= args.svg;
    cfg.validate()?;
    let modes = parse_strata(&cfg.strata)?;
    let table = cfg.feature_table()?;
    let fixed: Option<Vec<Quadruplet>> = args.quads.as_deref().map(read_jsonl).transpose()?;
    let dumps = select_dumps(&cfg)?;
    let boot = cfg.bootstrap();

    let mut all_results = Vec::new();
    let mut csv_rows = Vec::new();
    let mut curve = Vec::new();
    for dump in &dumps {
        let bank = load_bank(dump, &cfg, &table)?;
        let quads: Vec<Quadruplet> = match &fixed {
            Some(qs) => qs
                .iter()
                .filter(|q| q.phones.iter().all(|p| bank.contains(p)))
                .cloned()
                .collect(),
            None => mine_quadruplets(&table, bank.labels())?.quadruplets,
        };
        let results = evaluate_quadruplets(&bank, &quads, &boot)?;
        let mut pcs_cache: BTreeMap<Option<PhoneClass>, Option<f64>> = BTreeMap::new();
        let mut pcs_for = |class: Option<PhoneClass>| -> Result<Option<f64>, CliError> {
            if let Some(v) = pcs_cache.get(&class) {
                return Ok(*v);
            }
            let v = match pcs_report(&bank, &table, class, cfg.seed) {
                Ok(r) => Some(r.overall_auc),
                Err(AnalogyError::NoPcsCategories) => None,
                Err(e) => return Err(e.into()),
            };
            pcs_cache.insert(class, v);
            Ok(v)
        };
        let layer = bank.layer_index;
        for (label, scope, summary, layer) in summary_rows(layer, &results, &modes, cfg.ci_level)? {
            let pcs = match scope {
                PcsScope::All => pcs_for(None)?,
                PcsScope::Class(c) => pcs_for(Some(c))?,
                PcsScope::None => None,
            };
            if label == "all" {
                if let Some(s) = &summary {
                    curve.push((layer as f64, s.success_rate, s.averaged_similarity.mean));
                }
                println!(
                    "layer {layer}: {} quadruplets, success rate {}, pcs {}",
                    results.len(),
                    summary.as_ref().map_or("-".into(), |s| format!("{:.4}", s.success_rate)),
                    pcs.map_or("-".into(), |p| format!("{p:.4}"))
                );
            }
            let opt = |v: Option<f64>| v.map(f6).unwrap_or_default();
            csv_rows.push(vec![
                layer.to_string(),
                label,
                summary.as_ref().map_or(0, |s| s.n_quads).to_string(),
                opt(summary.as_ref().map(|s| s.success_rate)),
                opt(summary.as_ref().map(|s| s.averaged_similarity.mean)),
                opt(summary.as_ref().map(|s| s.averaged_similarity.ci_low)),
                opt(summary.as_ref().map(|s| s.averaged_similarity.ci_high)),
                opt(pcs),
            ]);
        }
        all_results.extend(results);
    }
    write_atomic(&cfg.out.join("results.jsonl"), &to_jsonl(&all_results)?)?;
    write_csv(
        &cfg.out.join("summary.csv"),
        &[
            "layer",
            "stratum",
            "n_quads",
            "success_rate",
            "averaged_similarity",
            "similarity_ci_low",
            "similarity_ci_high",
            "pcs",
        ],
        &csv_rows,
    )?;
    if cfg.svg {
        let doc = svg::plot(
            "analogy evaluation by layer",
            "layer",
            "value",
            &[
                Series {
                    name: "success rate",
                    points: curve.iter().map(|c| (c.0, c.1)).collect(),
                },
                Series {
                    name: "averaged similarity",
                    points: curve.iter().map(|c| (c.0, c.2)).collect(),
                },
            ],
            Style::Line,
        );
        write_atomic(&cfg.out.join("layers.svg"), doc.as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct LayerPcs<'a> {
    layer: u32,
    #[serde(flatten)]
    report: &'a PcsReport,
}

pub(super) fn pcs(mut cfg: RunConfig, args: PcsArgs) -> Result<(), CliError> {
    apply_input(&mut cfg, &args.input);
    let class = args.class.as_deref().filter(|c| *c != "all").map(parse_class).transpose()?;
    let table = cfg.feature_table()?;
    let mut rows = Vec::new();
    let mut json = Vec::new();
    for dump in select_dumps(&cfg)? {
        let bank = load_bank(&dump, &cfg, &table)?;
        let report = pcs_report(&bank, &table, class, cfg.seed)?;
        let layer = bank.layer_index;
        for c in &report.categories {
            rows.push(vec![
                layer.to_string(),
                c.label.clone(),
                c.pairs.len().to_string(),
                c.n_correct.to_string(),
                c.n_mismatched.to_string(),
                f6(c.auc),
            ]);
        }
        rows.push(vec![
            layer.to_string(),
            "overall".into(),
            report.categories.iter().map(|c| c.pairs.len()).sum::<usize>().to_string(),
            report.categories.iter().map(|c| c.n_correct).sum::<usize>().to_string(),
            report.categories.iter().map(|c| c.n_mismatched).sum::<usize>().to_string(),
            f6(report.overall_auc),
        ]);
        println!(
            "layer {layer}: pcs {:.4} over {} categories ({} skipped)",
            report.overall_auc,
            report.categories.len(),
            report.skipped.len()
        );
        json.push(serde_json::to_value(LayerPcs { layer, report: &report })?);
    }
    write_csv(
        &cfg.out.join("pcs.csv"),
        &["layer", "category", "n_pairs", "n_correct", "n_mismatched", "auc"],
        &rows,
    )?;
    write_atomic(&cfg.out.join("pcs.jsonl"), &to_jsonl(&json)?)?;
    Ok(())
}

fn parse_targets(s: &str) -> Result<Vec<(String, PhoneClass)>, CliError> {
    comma_list(s)
        .into_iter()
        .map(|t| {
            let (f, c) = t
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("target {t:?} is not feature:class")))?;
            Ok((f.to_string(), parse_class(c)?))
        })
        .collect()
}

fn parse_sizes(s: &str) -> Result<Vec<usize>, CliError> {
    comma_list(s)
        .iter()
        .map(|x| match x.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Usage(format!("invalid sample size {x:?}"))),
        })
        .collect()
}

/// Bin cosines in [-1, 1] into `bins` equal-width bins.
fn histogram(values: &[f64], bins: usize) -> Vec<usize> {
    let mut counts = vec![0usize; bins];
    for v in values {
        let k = (((v.clamp(-1.0, 1.0) + 1.0) / 2.0 * bins as f64).floor() as usize).min(bins - 1);
        counts[k] += 1;
    }
    counts
}

pub(super) fn vectors(mut cfg: RunConfig, args: VectorsArgs) -> Result<(), CliError> {
    apply_input(&mut cfg, &args.input);
    if let Some(s) = &args.sample_sizes {
        cfg.sample_sizes = parse_sizes(s)?;
    }
    if let Some(r) = args.repeats {
        cfg.repeats = r;
    }
    if let Some(w) = &args.weighting {
        cfg.weighting = w.clone();
    }
    cfg.svg |= args.svg;
    cfg.validate()?;
    let weighting: Weighting = cfg.weighting.parse().map_err(CliError::Usage)?;
    let targets = match &args.targets {
        Some(t) => parse_targets(t)?,
        None => DEFAULT_TARGETS.iter().map(|(f, c)| (f.to_string(), *c)).collect(),
    };
    let table = cfg.feature_table()?;
    for (f, _) in &targets {
        table.feature_index(f).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let dumps = select_dumps(&cfg)?;
    let multi = dumps.len() > 1;
    for dump in &dumps {
        let bank = load_bank(dump, &cfg, &table)?;
        let dir = if multi {
            cfg.out.join(format!("layer_{:02}", bank.layer_index))
        } else {
            cfg.out.clone()
        };
        vectors_for_bank(&cfg, &table, &bank, &targets, weighting, &dir)?;
    }
    Ok(())
}

fn vectors_for_bank(
    cfg: &RunConfig,
    table: &FeatureTable,
    bank: &PhoneBank,
    targets: &[(String, PhoneClass)],
    weighting: Weighting,
    dir: &Path,
) -> Result<(), CliError> {
    let mut extracted: Vec<PhonologicalVector> = Vec::new();
    let mut skipped = Vec::new();
    for (feature, class) in targets {
        match extract_vector(bank, table, feature, *class, weighting) {
            Ok(v) if v.norm() > 0.0 => extracted.push(v),
            Ok(_) => skipped.push(vec![feature.clone(), class.to_string(), "zero vector".into()]),
            Err(e) => skipped.push(vec![feature.clone(), class.to_string(), e.to_string()]),
        }
    }
    write_csv(&dir.join("skipped.csv"), &["feature", "class", "reason"], &skipped)?;
    if extracted.is_empty() {
        return Err(CliError::Runtime(format!(
            "no extractable vectors for layer {} ({} targets skipped)",
            bank.layer_index,
            skipped.len()
        )));
    }
    let name = |v: &PhonologicalVector| format!("{}_{}", v.feature, v.phone_class);
    for v in &extracted {
        write_atomic(&dir.join("vectors").join(format!("{}.json", name(v))), v.to_json()?.as_bytes())?;
    }

    let sim = vector_similarity_matrix(&extracted)?;
    let names: Vec<String> = extracted.iter().map(name).collect();
    let mut header = vec!["vector"];
    header.extend(names.iter().map(String::as_str));
    let rows: Vec<Vec<String>> = names
        .iter()
        .zip(&sim)
        .map(|(n, row)| std::iter::once(n.clone()).chain(row.iter().map(|&c| f6(c))).collect())
        .collect();
    write_csv(&dir.join("similarity.csv"), &header, &rows)?;

    let bins = cfg.histogram_bins;
    let mut hist_rows = Vec::new();
    let mut mean_rows = Vec::new();
    let mut curves = Vec::new();
    for v in &extracted {
        let eff = sample_efficiency(bank, table, &v.feature, v.phone_class, &cfg.sample_sizes, cfg.repeats, cfg.seed)?;
        let mut curve = Vec::new();
        for e in &eff {
            for (k, c) in histogram(&e.cosines, bins).into_iter().enumerate() {
                let lo = -1.0 + 2.0 * k as f64 / bins as f64;
                hist_rows.push(vec![
                    v.feature.clone(),
                    v.phone_class.to_string(),
                    e.n.to_string(),
                    f6(lo),
                    f6(lo + 2.0 / bins as f64),
                    c.to_string(),
                ]);
            }
            mean_rows.push(vec![v.feature.clone(), v.phone_class.to_string(), e.n.to_string(), f6(e.mean())]);
            curve.push(((e.n as f64).log2(), e.mean()));
        }
        curves.push((name(v), curve));
    }
    write_csv(
        &dir.join("sample_efficiency_hist.csv"),
        &["feature", "class", "n", "bin_low", "bin_high", "count"],
        &hist_rows,
    )?;
    write_csv(
        &dir.join("sample_efficiency.csv"),
        &["feature", "class", "n", "mean_cosine"],
        &mean_rows,
    )?;
    if cfg.svg {
        let series: Vec<Series> = curves
            .iter()
            .map(|(n, c)| Series {
                name: n,
                points: c.clone(),
            })
            .collect();
        let doc = svg::plot("sample efficiency", "log2 N", "mean cosine to full-bank vector", &series, Style::Line);
        write_atomic(&dir.join("sample_efficiency.svg"), doc.as_bytes())?;
    }
    println!(
        "layer {}: {} vectors extracted, {} skipped -> {}",
        bank.layer_index,
        extracted.len(),
        skipped.len(),
        dir.display()
    );
    for s in &skipped {
        println!("  skipped {}:{} ({})", s[0], s[1], s[2]);
    }
    Ok(())
}

pub(super) fn edit(mut cfg: RunConfig, args: EditArgs) -> Result<(), CliError> {
    apply_input(&mut cfg, &args.input);
    if let Some(n) = args.n {
        cfg.n_edits = n;
    }
    if let Some(v) = args.lambda_min {
        cfg.lambda_min = v;
    }
    if let Some(v) = args.lambda_max {
        cfg.lambda_max = v;
    }
    cfg.validate()?;
    let table = cfg.feature_table()?;
    let mut dumps = select_dumps(&cfg)?;
    if dumps.len() != 1 {
        return Err(CliError::Usage(format!(
            "edit needs exactly one layer, {} selected (use --layers)",
            dumps.len()
        )));
    }
    let dump = dumps.remove(0);
    let v = match (&args.vector, &args.feature) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("cannot read vector {}: {e}", p.display())))?;
            PhonologicalVector::from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?
        }
        (None, Some(f)) => {
            let class = parse_class(args.class.as_deref().unwrap_or_default())?;
            let bank = load_bank(&dump, &cfg, &table)?;
            extract_vector(&bank, &table, f, class, cfg.weighting.parse().map_err(CliError::Usage)?)?
        }
        (None, None) => return Err(CliError::Usage("give --vector or --feature with --class".into())),
    };
    let manifest = cfg.bank_filters(&table)?.prepare(&dump.manifest()?);
    let utts: BTreeSet<&str> = manifest.iter().map(|s| s.utterance_id.as_str()).collect();
    let geometry: BTreeMap<String, UtteranceGeometry> = utts
        .into_par_iter()
        .filter(|u| dump.has_utterance(u))
        .map(|u| Ok((u.to_string(), UtteranceGeometry::from(&dump.load(u)?))))
        .collect::<Result<_, crate::corpus::CorpusError>>()?;
    let specs = plan_edit_batch(
        &manifest,
        &geometry,
        &table,
        &v.feature,
        v.phone_class,
        cfg.n_edits,
        (cfg.lambda_min, cfg.lambda_max),
        cfg.seed,
    )?;
    write_edit_batch(&dump, &specs, &v, &cfg.out)?;
    println!(
        "{} edits of {}:{} -> {}",
        specs.len(),
        v.feature,
        v.phone_class,
        cfg.out.join(EDITS_FILE).display()
    );
    Ok(())
}

/// Edits file plus original and edited audio directories.
fn edit_inputs(
    cfg: &RunConfig,
    edits: &Option<PathBuf>,
    orig: &Option<PathBuf>,
    edited: &Option<PathBuf>,
    edited_default: &str,
) -> Result<(Vec<crate::vectors::EditSpec>, PathBuf, PathBuf), CliError> {
    let edits_path = edits
        .clone()
        .or_else(|| cfg.edits.clone())
        .ok_or_else(|| CliError::Usage("no edits file given (use --edits or `edits` in the config)".into()))?;
    let base = edits_path.parent().map(Path::to_path_buf).unwrap_or_default();
    let orig = orig.clone().or_else(|| cfg.orig_audio.clone()).unwrap_or_else(|| base.join("orig"));
    let edited = edited
        .clone()
        .or_else(|| cfg.edited_audio.clone())
        .unwrap_or_else(|| base.join(edited_default));
    for d in [&orig, &edited] {
        if !d.is_dir() {
            return Err(CliError::Usage(format!("audio directory {} does not exist", d.display())));
        }
    }
    Ok((read_jsonl(&edits_path)?, orig, edited))
}

fn write_stability(cfg: &RunConfig, rows: &[crate::acoustics::StabilitySummary]) -> Result<(), CliError> {
    write_stability_csv(&cfg.out.join("stability.csv"), rows)?;
    write_stability_density_csv(&cfg.out.join("stability_density.csv"), rows, cfg.histogram_bins)?;
    for r in rows {
        println!(
            "{}: n={} median Δ {} fraction |Δ| < {} {}: {}",
            r.kind,
            r.n,
            r.median.map_or("-".into(), |m| format!("{m:.3}")),
            r.threshold,
            r.kind.unit(),
            r.frac_below.map_or("-".into(), |f| format!("{f:.3}"))
        );
    }
    Ok(())
}

pub(super) fn correlate(mut cfg: RunConfig, args: CorrelateArgs) -> Result<(), CliError> {
    if args.svg {
        cfg.svg = true;
    }
    if args.no_svg {
        cfg.svg = false;
    }
    let (edits, orig, edited) = edit_inputs(&cfg, &args.edits, &args.orig, &args.edited, "edited")?;
    if edits.is_empty() {
        return Err(CliError::Usage("edits file is empty".into()));
    }
    if edits.iter().all(|e| e.lambda == 0.0) {
        println!("every edit has λ = 0: writing the stability table");
        let rows = stability_from_dirs(&edits, &orig, &edited, &cfg.acoustic)?;
        return write_stability(&cfg, &rows);
    }
    let groups = measure_edits(&edits, &orig, &edited, &SignTable::default(), &cfg.acoustic)?;
    let rows: Vec<CorrelationRow> = groups.iter().map(|g| g.correlate()).collect::<Result<_, _>>()?;
    write_correlation_csv(&cfg.out.join("correlation.csv"), &rows)?;
    let opt = |v: Option<f64>| v.map(f6).unwrap_or_default();
    let mut scatter = Vec::new();
    for g in &groups {
        for (id, p) in g.edit_ids.iter().zip(&g.pairs) {
            scatter.push(vec![
                g.feature.clone(),
                g.class.to_string(),
                g.kind.to_string(),
                id.clone(),
                f6(p.lambda),
                opt(p.before),
                opt(p.after),
                opt(p.before.zip(p.after).map(|(b, a)| a - b)),
            ]);
        }
        if cfg.svg {
            let points = g
                .pairs
                .iter()
                .filter_map(|p| Some((p.lambda, p.after? - p.before?)))
                .collect();
            let title = format!("{} ({}) vs λ", g.kind, g.feature);
            let doc = svg::plot(
                &title,
                "λ",
                &format!("Δ{} ({})", g.kind, g.kind.unit()),
                &[Series { name: &g.feature, points }],
                Style::Points,
            );
            write_atomic(
                &cfg.out.join(format!("scatter_{}_{}.svg", g.feature, g.class)),
                doc.as_bytes(),
            )?;
        }
    }
    write_csv(
        &cfg.out.join("scatter.csv"),
        &["feature", "class", "measurement", "edit_id", "lambda", "before", "after", "delta"],
        &scatter,
    )?;
    for r in &rows {
        println!(
            "{}:{} {} n={} rho={} expected {} match {}",
            r.feature,
            r.class,
            r.measurement,
            r.n,
            r.rho.map_or("-".into(), |v| format!("{v:+.3}")),
            r.sign_expected,
            r.sign_match
        );
    }
    Ok(())
}

pub(super) fn stability(cfg: RunConfig, args: StabilityArgs) -> Result<(), CliError> {
    let (edits, orig, resynth) = edit_inputs(&cfg, &args.edits, &args.orig, &args.resynth, "resynth")?;
    if !edits.iter().any(|e| e.lambda == 0.0) {
        return Err(CliError::Usage("no λ = 0 edits in the edits file".into()));
    }
    let rows = stability_from_dirs(&edits, &orig, &resynth, &cfg.acoustic)?;
    write_stability(&cfg, &rows)
}

#[derive(Serialize)]
struct SignalInfo {
    file: String,
    measurement: &'static str,
    expected: Vec<f64>,
    note: String,
}

/// Test signals with known COG, formants and HNR ordering.
fn write_signals(dir: &Path) -> Result<Vec<SignalInfo>, CliError> {
    let fs = 16000;
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    let mut put = |name: &str, x: Vec<f64>, measurement: &'static str, expected: Vec<f64>, note: &str| {
        let w = Waveform::new(normalize_peak(&x, 0.8), fs)?;
        write_wav(dir.join(name), &w, WavEncoding::Float32)?;
        out.push(SignalInfo {
            file: name.to_string(),
            measurement,
            expected,
            note: note.to_string(),
        });
        Ok::<(), CliError>(())
    };
    put("sine_1000.wav", sine(1000.0, fs, 0.5, 1.0), "COG", vec![1000.0], "pure tone")?;
    let pair: Vec<f64> = sine(500.0, fs, 0.5, 1.0)
        .iter()
        .zip(sine(1500.0, fs, 0.5, 1.0))
        .map(|(a, b)| a + b)
        .collect();
    put("sines_500_1500.wav", pair, "COG", vec![1000.0], "equal-amplitude tones")?;
    for (f1, f2) in [(300.0, 2300.0), (500.0, 1500.0), (700.0, 1100.0)] {
        put(
            &format!("vowel_{f1:.0}_{f2:.0}.wav"),
            two_formant_vowel(120.0, f1, 80.0, f2, 100.0, fs, 0.5),
            "F1,F2",
            vec![f1, f2],
            "two resonators",
        )?;
    }
    let harmonic = two_formant_vowel(120.0, 600.0, 80.0, 1700.0, 100.0, fs, 0.5);
    for (name, ratio) in [("10", 10.0), ("1", 1.0), ("0.1", 0.1)] {
        put(
            &format!("hnr_{name}.wav"),
            add_noise_at_ratio(&harmonic, ratio, 7),
            "HNR",
            vec![10.0 * f64::log10(ratio)],
            "harmonic:noise power ratio in dB; HNR decreases down the list",
        )?;
    }
    Ok(out)
}

pub(super) fn gen_synthetic(cfg: RunConfig, args: GenArgs) -> Result<(), CliError> {
    let table = cfg.feature_table()?;
    let kinds: Vec<&str> = match args.kind.as_str() {
        "all" => vec!["exact", "noisy", "null", "rig", "signals"],
        k @ ("exact" | "noisy" | "analogy" | "null" | "rig" | "signals") => vec![k],
        other => return Err(CliError::Usage(format!("unknown synthetic kind {other:?}"))),
    };
    let nested = kinds.len() > 1;
    for kind in kinds {
        let dir = if nested { cfg.out.join(kind) } else { cfg.out.clone() };
        match kind {
            "rig" => {
                let spec = RigSpec {
                    n_per_feature: args.rig_n.unwrap_or(RigSpec::default().n_per_feature),
                    seed: cfg.seed,
                    ..Default::default()
                };
                let edits = write_correlation_rig(&dir, &spec, &SignTable::default())?;
                println!("rig: {} edit pairs -> {}", edits.len(), dir.display());
            }
            "signals" => {
                let info = write_signals(&dir)?;
                write_atomic(&dir.join("signals.json"), &serde_json::to_vec_pretty(&info)?)?;
                println!("signals: {} files -> {}", info.len(), dir.display());
            }
            _ => {
                let base = SyntheticSpec::default();
                let spec = SyntheticSpec {
                    kind: kind.parse::<CorpusKind>().map_err(CliError::Usage)?,
                    instances_per_phone: args.instances.unwrap_or(base.instances_per_phone),
                    noise_sd: match kind {
                        "exact" => 0.0,
                        _ => args.noise_sd.unwrap_or(base.noise_sd),
                    },
                    seed: cfg.seed,
                    ..base
                };
                let dump = write_synthetic_dump(&dir, &table, &spec)?;
                println!(
                    "{kind}: {} phones x {} instances -> {}",
                    spec.phones.len(),
                    spec.instances_per_phone,
                    dump.root().display()
                );
            }
        }
    }
    Ok(())
}

//! Batch command-line surface for the profile-matching pipeline.
//!
//! Subcommands mirror the experiment DAG: `gen` makes synthetic corpora,
//! `acid` estimates the per-attribute properties, `sample` builds the
//! evaluation datasets, `train` fits linkers and the confidence estimator,
//! `eval` sweeps PR curves, and `match` runs the end-to-end matchers.
//! Every artifact-producing command writes one manifest with input/output
//! digests; identical seeds reproduce identical artifacts.

mod manifest;

use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use acidmatch::acid;
use acidmatch::blocking::{self, build_name_index};
use acidmatch::classifiers::{
    load_model, save_model, train, train_cascade, ClassifierFamily, TrainConfig,
};
use acidmatch::corpus::{load_ground_truth, load_profiles, Corpus, Gazetteer};
use acidmatch::datagen::{self, GenConfig};
use acidmatch::eval;
use acidmatch::features::{Featurizer, ThresholdConfig};
use acidmatch::matcher;
use acidmatch::sampling::{
    build_emulated_large, build_enriched_training, build_random_sampled, undersample, PairDataset,
};

use manifest::ManifestBuilder;

#[derive(Parser)]
#[command(name = "acidmatch", version, about = "Cross-network profile matching pipeline")]
struct Cli {
    /// Worker threads for per-probe work; results never depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic corpora from a GenConfig JSON.
    Gen(GenArgs),
    /// Estimate the per-attribute ACID report for labeled corpora.
    Acid(AcidArgs),
    /// Build evaluation and training pair datasets.
    Sample(SampleArgs),
    /// Train a linker family, the cascade, or the confidence estimator.
    Train(TrainArgs),
    /// PR sweeps, recall at target precision, breakdowns, imbalance demo.
    Eval(EvalArgs),
    /// Run the generic or unique matcher over probes.
    Match(MatchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// GenConfig JSON path.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long)]
    sn1: PathBuf,
    #[arg(long)]
    sn2: PathBuf,
    /// Gazetteer CSV for resolving label-only locations.
    #[arg(long)]
    gazetteer: Option<PathBuf>,
}

#[derive(Args)]
struct AcidArgs {
    #[command(flatten)]
    corpora: CorpusArgs,
    #[arg(long)]
    gt: PathBuf,
    /// Thresholds JSON; defaults are used when omitted.
    #[arg(long)]
    thresholds: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SampleArgs {
    #[command(subcommand)]
    mode: SampleMode,
}

#[derive(Subcommand)]
enum SampleMode {
    /// Cross product of a random sample of matching pairs.
    Random {
        #[command(flatten)]
        corpora: CorpusArgs,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        n_pos: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-probe name-search candidates over the full sn2 corpus.
    Emulated {
        #[command(flatten)]
        corpora: CorpusArgs,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long, default_value_t = blocking::DEFAULT_MIN_SIM)]
        min_sim: f64,
        #[arg(long, default_value_t = blocking::DEFAULT_CAP)]
        cap: usize,
        /// Force unsampled matching profiles into the dataset.
        #[arg(long)]
        include_unsampled: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Balance a dataset by under-sampling the majority class.
    Undersample {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// n positives + n random negatives + n hard negatives, deduplicated.
    Enriched {
        #[arg(long)]
        random: PathBuf,
        #[arg(long)]
        emulated: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Nb,
    Lr,
    Svm,
    Dt,
    NbCascade,
    Confidence,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Training pairs CSV. For `confidence`, its distinct id1 values are
    /// the probes whose topmatches become training decisions.
    #[arg(long)]
    train: PathBuf,
    #[command(flatten)]
    corpora: CorpusArgs,
    /// Hard-negative dataset, required by `nb-cascade`.
    #[arg(long)]
    hard: Option<PathBuf>,
    /// Trained linker, required by `confidence`.
    #[arg(long)]
    linker: Option<PathBuf>,
    /// Ground truth CSV, required by `confidence`.
    #[arg(long)]
    gt: Option<PathBuf>,
    #[arg(long)]
    thresholds: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fix the SVM regularizer instead of cross-validating.
    #[arg(long)]
    svm_lambda: Option<f64>,
    #[arg(long, default_value_t = blocking::DEFAULT_MIN_SIM)]
    min_sim: f64,
    #[arg(long, default_value_t = blocking::DEFAULT_CAP)]
    cap: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// TPR FPR N_POS N_NEG: print the class-imbalance arithmetic and exit.
    #[arg(long, num_args = 4, value_names = ["TPR", "FPR", "N_POS", "N_NEG"])]
    demo_imbalance: Option<Vec<String>>,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    test: Option<PathBuf>,
    #[command(flatten)]
    corpora: Option<CorpusArgsOpt>,
    #[arg(long, default_value_t = 0.95)]
    target_precision: f64,
    #[arg(long, default_value_t = 201)]
    n_thresholds: usize,
    /// Also write the per-attribute true/missed/false breakdown at --th-p.
    #[arg(long)]
    breakdown: bool,
    #[arg(long, default_value_t = 0.5)]
    th_p: f64,
    #[arg(long)]
    thresholds: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CorpusArgsOpt {
    #[arg(long)]
    sn1: Option<PathBuf>,
    #[arg(long)]
    sn2: Option<PathBuf>,
    #[arg(long)]
    gazetteer: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MatchMode {
    Generic,
    Unique,
}

#[derive(Args)]
struct MatchArgs {
    #[arg(long, value_enum)]
    mode: MatchMode,
    #[arg(long)]
    model: PathBuf,
    /// Confidence estimator, required in unique mode.
    #[arg(long)]
    confidence: Option<PathBuf>,
    #[command(flatten)]
    corpora: CorpusArgs,
    /// File with one probe id per line; defaults to every sn1 profile.
    #[arg(long)]
    probes: Option<PathBuf>,
    /// Declaration threshold on p (generic mode).
    #[arg(long, default_value_t = 0.5)]
    th_p: f64,
    /// Decision threshold on the confidence q (unique mode).
    #[arg(long, default_value_t = 0.5)]
    th_q: f64,
    #[arg(long, default_value_t = blocking::DEFAULT_MIN_SIM)]
    min_sim: f64,
    #[arg(long, default_value_t = blocking::DEFAULT_CAP)]
    cap: usize,
    #[arg(long)]
    out: PathBuf,
}

/// Thresholds file: the five consistency thresholds plus the location
/// feature scale.
#[derive(Deserialize)]
#[serde(default)]
struct ThresholdsFile {
    real_name: f64,
    screen_name: f64,
    location_km: f64,
    photo: f64,
    friends_min: f64,
    location_kappa_km: f64,
}

impl Default for ThresholdsFile {
    fn default() -> Self {
        let th = ThresholdConfig::default();
        ThresholdsFile {
            real_name: th.real_name,
            screen_name: th.screen_name,
            location_km: th.location_km,
            photo: th.photo,
            friends_min: th.friends_min,
            location_kappa_km: Featurizer::default().kappa_km,
        }
    }
}

fn load_thresholds(path: Option<&Path>) -> Result<(ThresholdConfig, Featurizer)> {
    let file: ThresholdsFile = match path {
        Some(p) => {
            let text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => ThresholdsFile::default(),
    };
    let th = ThresholdConfig {
        real_name: file.real_name,
        screen_name: file.screen_name,
        location_km: file.location_km,
        photo: file.photo,
        friends_min: file.friends_min,
    };
    th.validate().map_err(|e| anyhow!(e))?;
    Ok((
        th,
        Featurizer {
            kappa_km: file.location_kappa_km,
        },
    ))
}

fn load_corpora(args: &CorpusArgs) -> Result<(Corpus, Corpus)> {
    let gazetteer = args
        .gazetteer
        .as_deref()
        .map(Gazetteer::load)
        .transpose()
        .context("loading gazetteer")?;
    let sn1 = load_profiles(&args.sn1, gazetteer.as_ref())
        .with_context(|| format!("loading {}", args.sn1.display()))?;
    let sn2 = load_profiles(&args.sn2, gazetteer.as_ref())
        .with_context(|| format!("loading {}", args.sn2.display()))?;
    Ok((sn1, sn2))
}

fn ensure_out_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))
}

fn main() {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Acid(args) => cmd_acid(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Train(args) => cmd_train(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Match(args) => cmd_match(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let mut mb = ManifestBuilder::new("gen");
    mb.config(&args.config)?;
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let mut cfg: GenConfig =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", args.config.display()))?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    mb.seed(cfg.seed);

    let (sn1, sn2, gt) = datagen::generate(&cfg)?;
    ensure_out_dir(&args.out)?;
    let sn1_path = args.out.join("sn1.jsonl");
    let sn2_path = args.out.join("sn2.jsonl");
    let gt_path = args.out.join("gt.csv");
    sn1.save(&sn1_path)?;
    sn2.save(&sn2_path)?;
    gt.save(&gt_path)?;

    // Achieved calibration, recorded for the manifest.
    let fz = Featurizer {
        kappa_km: cfg.location_kappa_km,
    };
    let calibration = if gt.is_empty() {
        serde_json::Value::Null
    } else {
        let mut per_attr = serde_json::Map::new();
        for attr in acidmatch::corpus::AttributeKind::ALL {
            let a = acid::estimate_availability(&gt, &sn1, &sn2, attr)?;
            let c = acid::estimate_consistency(&gt, &sn1, &sn2, attr, &cfg.calibration_thresholds, &fz)
                .map(Some)
                .or_else(|e| match e {
                    acid::AcidError::NoAvailablePairs(_) => Ok(None),
                    other => Err(other),
                })?;
            per_attr.insert(
                attr.name().to_string(),
                serde_json::json!({ "availability": a, "consistency": c }),
            );
        }
        serde_json::Value::Object(per_attr)
    };

    println!(
        "generated sn1={} sn2={} matching pairs={}",
        sn1.len(),
        sn2.len(),
        gt.len()
    );
    mb.output(&sn1_path)
        .output(&sn2_path)
        .output(&gt_path)
        .extra(serde_json::json!({ "calibration": calibration }));
    mb.write(&args.out)?;
    Ok(())
}

fn cmd_acid(args: AcidArgs) -> Result<()> {
    let mut mb = ManifestBuilder::new("acid");
    let (th, fz) = load_thresholds(args.thresholds.as_deref())?;
    let (sn1, sn2) = load_corpora(&args.corpora)?;
    let gt = load_ground_truth(&args.gt, &sn1, &sn2)?;
    mb.input(&args.corpora.sn1)?
        .input(&args.corpora.sn2)?
        .input(&args.gt)?;

    let report = acid::acid_report(&gt, &sn1, &sn2, &th, &fz)?;
    print!("{}", report.to_table());

    ensure_out_dir(&args.out)?;
    let csv_path = args.out.join("acid_report.csv");
    std::fs::write(&csv_path, report.to_csv())
        .with_context(|| format!("writing {}", csv_path.display()))?;
    mb.output(&csv_path);
    mb.write(&args.out)?;
    Ok(())
}

fn cmd_sample(args: SampleArgs) -> Result<()> {
    match args.mode {
        SampleMode::Random {
            corpora,
            gt,
            n_pos,
            seed,
            out,
        } => {
            let mut mb = ManifestBuilder::new("sample-random");
            mb.seed(seed);
            let (sn1, sn2) = load_corpora(&corpora)?;
            let truth = load_ground_truth(&gt, &sn1, &sn2)?;
            mb.input(&corpora.sn1)?.input(&corpora.sn2)?.input(&gt)?;
            let ds = build_random_sampled(&truth, n_pos, seed)?;
            write_dataset(&ds, &out, &mut mb, serde_json::Value::Null)?;
            println!(
                "random-sampled: {} pairs ({} positive, {} negative)",
                ds.len(),
                ds.positives(),
                ds.negatives()
            );
            Ok(())
        }
        SampleMode::Emulated {
            corpora,
            gt,
            min_sim,
            cap,
            include_unsampled,
            out,
        } => {
            let mut mb = ManifestBuilder::new("sample-emulated");
            let (sn1, sn2) = load_corpora(&corpora)?;
            let truth = load_ground_truth(&gt, &sn1, &sn2)?;
            mb.input(&corpora.sn1)?.input(&corpora.sn2)?.input(&gt)?;
            let index = build_name_index(&sn2);
            let probes: Vec<&acidmatch::corpus::Profile> = sn1.iter().collect();
            let result =
                build_emulated_large(&probes, &index, &truth, min_sim, cap, include_unsampled);
            println!(
                "emulated-large: {} pairs over {} probes, containment rate {:.4}",
                result.dataset.len(),
                probes.len(),
                result.containment_rate
            );
            write_dataset(
                &result.dataset,
                &out,
                &mut mb,
                serde_json::json!({ "containment_rate": result.containment_rate }),
            )
        }
        SampleMode::Undersample { input, seed, out } => {
            let mut mb = ManifestBuilder::new("sample-undersample");
            mb.seed(seed);
            mb.input(&input)?;
            let ds = PairDataset::load(&input)?;
            let balanced = undersample(&ds, seed)?;
            println!(
                "undersampled: {} pairs ({} positive)",
                balanced.len(),
                balanced.positives()
            );
            write_dataset(&balanced, &out, &mut mb, serde_json::Value::Null)
        }
        SampleMode::Enriched {
            random,
            emulated,
            n,
            seed,
            out,
        } => {
            let mut mb = ManifestBuilder::new("sample-enriched");
            mb.seed(seed);
            mb.input(&random)?.input(&emulated)?;
            let random_ds = PairDataset::load(&random)?;
            let emulated_ds = PairDataset::load(&emulated)?;
            let ds = build_enriched_training(&random_ds, &emulated_ds, n, seed)?;
            println!("enriched: {} pairs ({} positive)", ds.len(), ds.positives());
            write_dataset(&ds, &out, &mut mb, serde_json::Value::Null)
        }
    }
}

fn write_dataset(
    ds: &PairDataset,
    out: &Path,
    mb: &mut ManifestBuilder,
    extra: serde_json::Value,
) -> Result<()> {
    ensure_out_dir(out)?;
    let path = out.join("pairs.csv");
    ds.save(&path)?;
    mb.output(&path).extra(extra);
    mb.write(out)?;
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let mut mb = ManifestBuilder::new("train");
    mb.seed(args.seed);
    let (_, fz) = load_thresholds(args.thresholds.as_deref())?;
    let (sn1, sn2) = load_corpora(&args.corpora)?;
    mb.input(&args.corpora.sn1)?
        .input(&args.corpora.sn2)?
        .input(&args.train)?;
    let train_ds = PairDataset::load(&args.train)?;
    let config = TrainConfig {
        svm_lambda: args.svm_lambda,
        ..TrainConfig::default()
    };

    ensure_out_dir(&args.out)?;
    let model_path = args.out.join("model.txt");

    match args.family {
        FamilyArg::Confidence => {
            let linker_path = args
                .linker
                .as_deref()
                .ok_or_else(|| anyhow!("--family confidence requires --linker"))?;
            let gt_path = args
                .gt
                .as_deref()
                .ok_or_else(|| anyhow!("--family confidence requires --gt"))?;
            mb.input(linker_path)?.input(gt_path)?;
            let linker = load_model(linker_path)?;
            let gt = load_ground_truth(gt_path, &sn1, &sn2)?;
            let index = build_name_index(&sn2);

            let mut seen = std::collections::HashSet::new();
            let probes: Vec<&acidmatch::corpus::Profile> = train_ds
                .pairs()
                .iter()
                .filter(|p| seen.insert(p.sn1_id.clone()))
                .map(|p| {
                    sn1.get(&p.sn1_id)
                        .ok_or_else(|| anyhow!("unknown probe id {}", p.sn1_id))
                })
                .collect::<Result<_>>()?;
            let decisions = matcher::generate_confidence_training(
                &probes,
                &index,
                &sn2,
                &gt,
                &linker,
                &fz,
                args.min_sim,
                args.cap,
            );
            let model = matcher::train_confidence(&decisions, args.seed)?;
            matcher::save_confidence(&model, &model_path)?;
            println!(
                "confidence estimator trained on {} topmatch decisions",
                decisions.len()
            );
        }
        FamilyArg::NbCascade => {
            let hard_path = args
                .hard
                .as_deref()
                .ok_or_else(|| anyhow!("--family nb-cascade requires --hard"))?;
            mb.input(hard_path)?;
            let hard_ds = PairDataset::load(hard_path)?;
            let model =
                train_cascade(&train_ds, &hard_ds, &sn1, &sn2, &fz, &config, args.seed)?;
            save_model(&model, &model_path)?;
            println!("cascade trained: {}", model.manifest.family);
        }
        plain => {
            let family = match plain {
                FamilyArg::Nb => ClassifierFamily::NaiveBayesKde,
                FamilyArg::Lr => ClassifierFamily::LogisticRegression,
                FamilyArg::Svm => ClassifierFamily::LinearSvm,
                FamilyArg::Dt => ClassifierFamily::DecisionTree,
                _ => unreachable!(),
            };
            let model = train(family, &train_ds, &sn1, &sn2, &fz, &config, args.seed)?;
            save_model(&model, &model_path)?;
            println!(
                "{} trained on {} pairs ({} positive)",
                model.manifest.family, model.manifest.n_examples, model.manifest.n_positives
            );
        }
    }
    mb.output(&model_path);
    mb.write(&args.out)?;
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    if let Some(demo) = &args.demo_imbalance {
        let parse = |i: usize, name: &str| -> Result<f64> {
            demo[i]
                .parse::<f64>()
                .with_context(|| format!("parsing {name} `{}`", demo[i]))
        };
        let tpr = parse(0, "TPR")?;
        let fpr = parse(1, "FPR")?;
        let n_pos = parse(2, "N_POS")? as u64;
        let n_neg = parse(3, "N_NEG")? as u64;
        let (tm, fm, precision) = eval::imbalance_demo(tpr, fpr, n_pos, n_neg);
        println!(
            "true matches: {tm:.0}, false matches: {fm:.0}, precision: {:.2}%",
            precision * 100.0
        );
        return Ok(());
    }

    let mut mb = ManifestBuilder::new("eval");
    let (th, fz) = load_thresholds(args.thresholds.as_deref())?;
    let model_path = args.model.as_deref().ok_or_else(|| anyhow!("--model is required"))?;
    let test_path = args.test.as_deref().ok_or_else(|| anyhow!("--test is required"))?;
    let out = args.out.as_deref().ok_or_else(|| anyhow!("--out is required"))?;
    let corpora = args.corpora.as_ref().ok_or_else(|| anyhow!("--sn1/--sn2 are required"))?;
    let corpora = CorpusArgs {
        sn1: corpora.sn1.clone().ok_or_else(|| anyhow!("--sn1 is required"))?,
        sn2: corpora.sn2.clone().ok_or_else(|| anyhow!("--sn2 is required"))?,
        gazetteer: corpora.gazetteer.clone(),
    };
    let (sn1, sn2) = load_corpora(&corpora)?;
    mb.input(&corpora.sn1)?
        .input(&corpora.sn2)?
        .input(model_path)?
        .input(test_path)?;

    let model = load_model(model_path)?;
    let test = PairDataset::load(test_path)?;
    let curve = eval::pr_curve(&model, &test, &sn1, &sn2, &fz, args.n_thresholds)?;
    let recall = eval::recall_at_precision(&curve, args.target_precision);
    println!(
        "recall at precision >= {:.2}: {recall:.4} ({} pairs, {} positive)",
        args.target_precision,
        test.len(),
        test.positives()
    );

    ensure_out_dir(out)?;
    let svg_path = out.join("pr.svg");
    eval::emit_pr_svg(&[(model.manifest.family.clone(), curve)], &svg_path)?;
    mb.output(&svg_path).output(&svg_path.with_extension("csv"));

    if args.breakdown {
        let rows = eval::match_breakdown(&model, &test, &sn1, &sn2, &fz, args.th_p, &th)?;
        let breakdown_path = out.join("breakdown.csv");
        std::fs::write(&breakdown_path, eval::breakdown_csv(&rows))
            .with_context(|| format!("writing {}", breakdown_path.display()))?;
        mb.output(&breakdown_path);
    }

    mb.extra(serde_json::json!({
        "target_precision": args.target_precision,
        "recall_at_target": recall,
    }));
    mb.write(out)?;
    Ok(())
}

fn cmd_match(args: MatchArgs) -> Result<()> {
    let mut mb = ManifestBuilder::new("match");
    let (_, fz) = load_thresholds(None)?;
    let (sn1, sn2) = load_corpora(&args.corpora)?;
    mb.input(&args.corpora.sn1)?
        .input(&args.corpora.sn2)?
        .input(&args.model)?;
    let model = load_model(&args.model)?;
    let index = build_name_index(&sn2);

    let probe_ids: Vec<String> = match &args.probes {
        Some(path) => {
            mb.input(path)?;
            std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(String::from)
                .collect()
        }
        None => sn1.iter().map(|p| p.profile_id.clone()).collect(),
    };
    let probes: Vec<&acidmatch::corpus::Profile> = probe_ids
        .iter()
        .map(|id| sn1.get(id).ok_or_else(|| anyhow!("unknown probe id {id}")))
        .collect::<Result<_>>()?;

    ensure_out_dir(&args.out)?;
    let decisions_path = args.out.join("decisions.csv");

    match args.mode {
        MatchMode::Generic => {
            let mut w = csv::Writer::from_path(&decisions_path)
                .with_context(|| format!("writing {}", decisions_path.display()))?;
            w.write_record(["probe_id", "sn2_id", "p"])?;
            let mut total = 0usize;
            for probe in &probes {
                for (sn2_id, p) in matcher::match_generic(
                    probe, &index, &sn2, &model, &fz, args.th_p, args.min_sim, args.cap,
                ) {
                    w.write_record([probe.profile_id.as_str(), &sn2_id, &format!("{p:.6}")])?;
                    total += 1;
                }
            }
            w.flush()?;
            println!(
                "generic mode: {} declared matches over {} probes",
                total,
                probes.len()
            );
        }
        MatchMode::Unique => {
            let conf_path = args
                .confidence
                .as_deref()
                .ok_or_else(|| anyhow!("--mode unique requires --confidence"))?;
            mb.input(conf_path)?;
            let confidence = matcher::load_confidence(conf_path)?;
            let decisions: Vec<matcher::MatchDecision> = probes
                .iter()
                .map(|probe| {
                    matcher::match_unique(
                        probe, &index, &sn2, &model, &confidence, &fz, args.th_q, args.min_sim,
                        args.cap,
                    )
                })
                .collect();
            matcher::save_decisions(&decisions, &decisions_path)?;
            let matched = decisions.iter().filter(|d| d.matched_id().is_some()).count();
            println!(
                "unique mode: {} matched, {} abstained (matched rate {:.4})",
                matched,
                decisions.len() - matched,
                matched as f64 / decisions.len().max(1) as f64
            );
        }
    }
    mb.output(&decisions_path);
    mb.write(&args.out)?;
    Ok(())
}

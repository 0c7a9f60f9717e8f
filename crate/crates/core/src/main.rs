//! Command-line pipeline driver.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use polsar::error::{Error, Result};
use polsar::io::config::{load_config, PipelineConfig};
use polsar::io::{model as model_io, pnm};
use polsar::speckle::{boxcar_multilook, lee_filter, FilterConfig, FilterMode};
use polsar::svm::{classify_svm, extract_features, train_svm, SvmParams, DEFAULT_COST};
use polsar::synth::{generate_scene, generate_slc_scene};
use polsar::wishart::{classify_wishart, train_wishart, LabelMask};

#[derive(Parser)]
#[command(
    name = "polsar",
    version,
    about = "Polarimetric SAR classification pipeline: scene synthesis, speckle \
             filtering, H/A/alpha decomposition, Wishart and SVM classification, \
             confusion-matrix evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic multi-look scene from a scene config
    Synth {
        /// Config file with the scene block (scene.width, scene.class1.center, ...)
        #[arg(long)]
        config: PathBuf,
        /// Output T3 dataset directory
        #[arg(long)]
        t3_out: Option<PathBuf>,
        /// Output ground-truth mask (PGM)
        #[arg(long)]
        mask_out: Option<PathBuf>,
        /// Optional single-look complex dataset of the same scene geometry
        #[arg(long)]
        slc_out: Option<PathBuf>,
        /// Optional sparse training mask (PGM) with N pixels per class
        #[arg(long)]
        train_mask_out: Option<PathBuf>,
        /// Training pixels per class for --train-mask-out
        #[arg(long)]
        train_per_class: Option<usize>,
        /// Override the scene seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Speckle filtering: boxcar multilook of SLC data, or Lee refinement of T3 data
    Filter {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Input dataset directory (SLC for boxcar, T3 for lee)
        #[arg(long)]
        input: Option<PathBuf>,
        /// Output T3 dataset directory
        #[arg(long)]
        output: Option<PathBuf>,
        /// boxcar | lee  (default boxcar)
        #[arg(long)]
        mode: Option<String>,
        /// Odd window size (default 3)
        #[arg(long)]
        window: Option<usize>,
        /// Equivalent looks for the Lee weight (default: input header looks)
        #[arg(long)]
        looks: Option<f64>,
    },
    /// Entropy / anisotropy / mean-alpha decomposition of a T3 dataset
    Decompose {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        /// Output dataset directory (H, A, alpha float32 planes)
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Estimate per-class Wishart centers from labeled pixels
    TrainWishart {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        /// Training mask (PGM, 0 = unlabeled)
        #[arg(long)]
        mask: Option<PathBuf>,
        /// Output model file
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Classify a T3 dataset with a Wishart model
    ClassifyWishart {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Output class map (PPM)
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Train a one-vs-one kernel SVM from labeled pixels
    TrainSvm {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        mask: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        /// rbf | polynomial | sigmoid (default rbf)
        #[arg(long)]
        kernel: Option<String>,
        /// RBF gamma (default 0.444)
        #[arg(long)]
        gamma: Option<f64>,
        /// Soft-margin cost C (default 100)
        #[arg(long)]
        cost: Option<f64>,
        /// Polynomial degree (default 2)
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Classify a T3 dataset with an SVM model
    ClassifySvm {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Confusion matrix of a predicted map against ground truth
    Evaluate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Ground-truth mask (PGM, 0 = excluded)
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Predicted class map (PPM, or PGM with label bytes)
        #[arg(long)]
        predicted: Option<PathBuf>,
        /// CSV output file (report is always printed to stdout)
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Comma-separated class names for the report header
        #[arg(long)]
        names: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load_optional_config(path: &Option<PathBuf>) -> Result<PipelineConfig> {
    match path {
        Some(p) => load_config(p),
        None => Ok(PipelineConfig::default()),
    }
}

fn require(what: &str, flag: Option<PathBuf>, cfg: Option<PathBuf>) -> Result<PathBuf> {
    flag.or(cfg)
        .ok_or_else(|| Error::config(format!("missing {what}: pass --{what} or set it in the config")))
}

/// Deterministic spread of `per_class` training pixels per class: every
/// class's labeled pixels are sampled at an even stride in raster order.
fn training_subset(mask: &LabelMask, per_class: usize) -> Result<LabelMask> {
    if per_class == 0 {
        return Err(Error::config("train_per_class must be >= 1"));
    }
    let k = mask.num_classes();
    let mut out = vec![0u8; mask.labels().len()];
    for class in 1..=k {
        let indices: Vec<usize> = mask
            .labels()
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect();
        if indices.is_empty() {
            return Err(Error::MissingClass(class));
        }
        let take = per_class.min(indices.len());
        for j in 0..take {
            let idx = indices[j * indices.len() / take];
            out[idx] = class;
        }
    }
    LabelMask::new(mask.width(), mask.height(), out)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Synth {
            config,
            t3_out,
            mask_out,
            slc_out,
            train_mask_out,
            train_per_class,
            seed,
        } => {
            let cfg = load_config(&config)?;
            let mut spec = cfg
                .scene
                .clone()
                .ok_or_else(|| Error::config(format!("{} has no scene block", config.display())))?;
            if let Some(seed) = seed.or(cfg.seed) {
                spec.seed = seed;
            }
            let t3_out = require("t3-out", t3_out, cfg.output.clone())?;
            let mask_out = require("mask-out", mask_out, cfg.mask.clone())?;

            let (raster, mask) = generate_scene(&spec)?;
            polsar::io::write_t3(&t3_out, &raster)?;
            pnm::write_mask(&mask_out, &mask)?;
            eprintln!(
                "synth: {}x{} scene, {} classes, {} looks, seed {} ({})",
                spec.width,
                spec.height,
                spec.classes.len(),
                spec.looks,
                spec.seed,
                polsar::synth::RNG_ALGORITHM
            );

            if let Some(dir) = slc_out {
                let (slc, _) = generate_slc_scene(&spec)?;
                polsar::io::write_slc(&dir, &slc)?;
            }
            if let Some(path) = train_mask_out {
                let per_class = train_per_class
                    .or(cfg.train_per_class)
                    .ok_or_else(|| Error::config("--train-mask-out needs --train-per-class"))?;
                let subset = training_subset(&mask, per_class)?;
                pnm::write_mask(&path, &subset)?;
            }
            Ok(())
        }

        Command::Filter {
            config,
            input,
            output,
            mode,
            window,
            looks,
        } => {
            let cfg = load_optional_config(&config)?;
            let input = require("input", input, cfg.input.clone())?;
            let output = require("output", output, cfg.output.clone())?;
            let mode = match mode.as_deref() {
                Some("boxcar") => FilterMode::Boxcar,
                Some("lee") => FilterMode::Lee,
                Some(other) => return Err(Error::config(format!("unknown filter mode '{other}'"))),
                None => cfg.mode.unwrap_or(FilterMode::Boxcar),
            };
            let window = window.or(cfg.window).unwrap_or(3);
            match mode {
                FilterMode::Boxcar => {
                    let slc = polsar::io::read_slc(&input)?;
                    let out = boxcar_multilook(&slc, window)?;
                    polsar::io::write_t3(&output, &out)?;
                    eprintln!("filter: boxcar {window}x{window}, {} looks", out.looks());
                }
                FilterMode::Lee => {
                    let raster = polsar::io::read_t3(&input)?;
                    let filter_cfg = FilterConfig {
                        window,
                        mode,
                        looks: looks.or(cfg.looks).unwrap_or(raster.looks() as f64),
                    };
                    let out = lee_filter(&raster, &filter_cfg)?;
                    polsar::io::write_t3(&output, &out)?;
                    eprintln!(
                        "filter: lee {window}x{window}, equivalent looks {}",
                        filter_cfg.looks
                    );
                }
            }
            Ok(())
        }

        Command::Decompose {
            config,
            input,
            output,
        } => {
            let cfg = load_optional_config(&config)?;
            let input = require("input", input, cfg.input)?;
            let output = require("output", output, cfg.output)?;
            let raster = polsar::io::read_t3(&input)?;
            let haa = polsar::decomposition::haa_raster(&raster)?;
            polsar::io::write_haa(&output, &haa, raster.looks())?;
            let masked = haa.pixels().iter().filter(|p| p.is_none()).count();
            eprintln!(
                "decompose: {} pixels, {masked} masked (zero power)",
                haa.pixels().len()
            );
            Ok(())
        }

        Command::TrainWishart {
            config,
            input,
            mask,
            model,
        } => {
            let cfg = load_optional_config(&config)?;
            let input = require("input", input, cfg.input)?;
            let mask_path = require("mask", mask, cfg.mask)?;
            let model_path = require("model", model, cfg.model)?;
            let raster = polsar::io::read_t3(&input)?;
            let mask = pnm::read_mask(&mask_path)?;
            let trained = train_wishart(&raster, &mask)?;
            model_io::write_wishart_model(&model_path, &trained)?;
            eprintln!(
                "train-wishart: {} classes from {} labeled pixels",
                trained.classes().len(),
                mask.labels().iter().filter(|&&l| l != 0).count()
            );
            Ok(())
        }

        Command::ClassifyWishart {
            config,
            input,
            model,
            map,
        } => {
            let cfg = load_optional_config(&config)?;
            let input = require("input", input, cfg.input)?;
            let model_path = require("model", model, cfg.model)?;
            let map_path = require("map", map, cfg.map)?;
            let raster = polsar::io::read_t3(&input)?;
            let model = model_io::read_wishart_model(&model_path)?;
            let map = classify_wishart(&raster, &model);
            pnm::write_class_map(&map_path, &map)?;
            eprintln!("classify-wishart: {} pixels", map.classes().len());
            Ok(())
        }

        Command::TrainSvm {
            config,
            input,
            mask,
            model,
            kernel,
            gamma,
            cost,
            degree,
        } => {
            let cfg = load_optional_config(&config)?;
            let input = require("input", input, cfg.input.clone())?;
            let mask_path = require("mask", mask, cfg.mask.clone())?;
            let model_path = require("model", model, cfg.model.clone())?;
            let raster = polsar::io::read_t3(&input)?;
            let mask = pnm::read_mask(&mask_path)?;
            if mask.width() != raster.width() || mask.height() != raster.height() {
                return Err(Error::config("mask dimensions do not match raster"));
            }
            let features = extract_features(&raster);
            let mut train_features = Vec::new();
            let mut train_labels = Vec::new();
            for (f, &l) in features.iter().zip(mask.labels()) {
                if l != 0 {
                    train_features.push(*f);
                    train_labels.push(l);
                }
            }
            let params = SvmParams {
                kernel: cfg.resolve_kernel(kernel.as_deref(), gamma, degree)?,
                cost: cost.or(cfg.cost).unwrap_or(DEFAULT_COST),
                ..Default::default()
            };
            let model = train_svm(&train_features, &train_labels, &params)?;
            model_io::write_svm_model(&model_path, &model)?;
            let nsv: usize = model.machines.iter().map(|m| m.support_vectors.len()).sum();
            eprintln!(
                "train-svm: {} classes, {} machines, {} support vectors, {} training pixels",
                model.classes.len(),
                model.machines.len(),
                nsv,
                train_labels.len()
            );
            Ok(())
        }

        Command::ClassifySvm {
            config,
            input,
            model,
            map,
        } => {
            let cfg = load_optional_config(&config)?;
            let input = require("input", input, cfg.input)?;
            let model_path = require("model", model, cfg.model)?;
            let map_path = require("map", map, cfg.map)?;
            let raster = polsar::io::read_t3(&input)?;
            let model = model_io::read_svm_model(&model_path)?;
            let map = classify_svm(&raster, &model);
            pnm::write_class_map(&map_path, &map)?;
            eprintln!("classify-svm: {} pixels", map.classes().len());
            Ok(())
        }

        Command::Evaluate {
            config,
            truth,
            predicted,
            csv,
            names,
        } => {
            let cfg = load_optional_config(&config)?;
            let truth_path = require("truth", truth, cfg.truth)?;
            let predicted_path = require("predicted", predicted, cfg.predicted)?;
            let truth = pnm::read_mask(&truth_path)?;
            let predicted = pnm::read_class_map(&predicted_path)?;
            let mut cm = polsar::eval::confusion(&truth, &predicted)?;
            if let Some(names) = names {
                let names: Vec<String> = names.split(',').map(str::to_string).collect();
                cm.set_names(names)?;
            }
            let report = cm.to_csv();
            print!("{report}");
            if let Some(csv_path) = csv.or(cfg.csv) {
                std::fs::write(&csv_path, &report).map_err(|e| Error::io(&csv_path, e))?;
            }
            eprintln!(
                "evaluate: overall accuracy {:.2}%, mean recall {:.2}%",
                cm.overall_accuracy(),
                cm.mean_recall()
            );
            Ok(())
        }
    }
}

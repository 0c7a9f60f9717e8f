//! Flat `key=value` pipeline configuration.
//!
//! One file can hold defaults for every subcommand; command-line flags
//! override config values. `#` starts a comment. Unknown keys are rejected.
//!
//! Recognized keys: `input output mask model map csv truth predicted mode
//! window looks classifier kernel degree gamma cost seed train_per_class
//! names` plus the scene block for `synth`:
//!
//! ```text
//! scene.width=300
//! scene.height=300
//! scene.looks=9
//! scene.seed=42
//! scene.classes=3
//! scene.class1.center=1.0,0.8,0.1,0.55,0.25,0,0,0,0   # T11,T22,T33,ReT12,...
//! scene.class1.rect=0,0,300,100                       # x,y,w,h (repeatable)
//! ```
//!
//! Documented defaults applied by the CLI when neither a flag nor a config
//! value is present: `mode=boxcar`, `window=3`, `kernel=rbf`,
//! `gamma=0.444`, `cost=100`, `seed=0`.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::speckle::FilterMode;
use crate::svm::Kernel;
use crate::synth::{ClassRegion, Rect, SceneSpec};
use crate::types::HermitianMatrix3;

const KNOWN_KEYS: [&str; 18] = [
    "input",
    "output",
    "mask",
    "model",
    "map",
    "csv",
    "truth",
    "predicted",
    "mode",
    "window",
    "looks",
    "classifier",
    "kernel",
    "degree",
    "gamma",
    "cost",
    "seed",
    "train_per_class",
];

#[derive(Debug, Clone, Default)]
pub struct PipelineConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub mask: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub map: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub predicted: Option<PathBuf>,
    pub mode: Option<FilterMode>,
    pub window: Option<usize>,
    pub looks: Option<f64>,
    pub classifier: Option<String>,
    pub kernel: Option<String>,
    pub degree: Option<u32>,
    pub gamma: Option<f64>,
    pub cost: Option<f64>,
    pub seed: Option<u64>,
    pub train_per_class: Option<usize>,
    pub scene: Option<SceneSpec>,
}

impl PipelineConfig {
    /// Resolve the kernel choice from `kernel`/`gamma`/`degree` fields and
    /// optional overrides, applying the documented defaults.
    pub fn resolve_kernel(
        &self,
        kernel_flag: Option<&str>,
        gamma_flag: Option<f64>,
        degree_flag: Option<u32>,
    ) -> Result<Kernel> {
        let kind = kernel_flag
            .map(str::to_string)
            .or_else(|| self.kernel.clone())
            .unwrap_or_else(|| "rbf".to_string());
        let gamma = gamma_flag.or(self.gamma).unwrap_or(crate::svm::DEFAULT_GAMMA);
        let degree = degree_flag.or(self.degree).unwrap_or(2);
        let kernel = match kind.as_str() {
            "rbf" => Kernel::Rbf(gamma),
            "polynomial" | "poly" => Kernel::Polynomial(degree),
            "sigmoid" => Kernel::Sigmoid,
            other => return Err(Error::config(format!("unknown kernel '{other}'"))),
        };
        kernel.validate()?;
        Ok(kernel)
    }
}

/// Parse a config file.
pub fn load_config(path: &Path) -> Result<PipelineConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(path, &text)
}

struct SceneClassBuilder {
    center: Option<HermitianMatrix3>,
    rects: Vec<Rect>,
}

pub fn parse_config(path: &Path, text: &str) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::default();
    let mut scene_width = None;
    let mut scene_height = None;
    let mut scene_looks = None;
    let mut scene_seed = None;
    let mut scene_classes: Option<usize> = None;
    let mut class_builders: std::collections::BTreeMap<u8, SceneClassBuilder> =
        std::collections::BTreeMap::new();
    let mut has_scene_keys = false;

    let mut offset = 0u64;
    for line in text.lines() {
        let line_offset = offset;
        offset += line.len() as u64 + 1;
        let content = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| {
            Error::format(path, line_offset, format!("expected key=value, got '{content}'"))
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| Error::format(path, line_offset, format!("bad {what} value '{value}'"));

        if let Some(scene_key) = key.strip_prefix("scene.") {
            has_scene_keys = true;
            match scene_key {
                "width" => scene_width = Some(value.parse().map_err(|_| bad("scene.width"))?),
                "height" => scene_height = Some(value.parse().map_err(|_| bad("scene.height"))?),
                "looks" => scene_looks = Some(value.parse().map_err(|_| bad("scene.looks"))?),
                "seed" => scene_seed = Some(value.parse().map_err(|_| bad("scene.seed"))?),
                "classes" => scene_classes = Some(value.parse().map_err(|_| bad("scene.classes"))?),
                other => {
                    let (class_part, field) = other.split_once('.').ok_or_else(|| {
                        Error::format(path, line_offset, format!("unknown scene key '{other}'"))
                    })?;
                    let class_id: u8 = class_part
                        .strip_prefix("class")
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| {
                            Error::format(path, line_offset, format!("bad scene class key '{class_part}'"))
                        })?;
                    let builder = class_builders.entry(class_id).or_insert(SceneClassBuilder {
                        center: None,
                        rects: Vec::new(),
                    });
                    match field {
                        "center" => {
                            let values: Vec<f64> = value
                                .split(',')
                                .map(|t| t.trim().parse::<f64>().map_err(|_| bad("center")))
                                .collect::<Result<_>>()?;
                            if values.len() != 9 {
                                return Err(Error::format(
                                    path,
                                    line_offset,
                                    format!("center needs 9 values, found {}", values.len()),
                                ));
                            }
                            builder.center = Some(HermitianMatrix3::new(
                                [values[0], values[1], values[2]],
                                [
                                    Complex64::new(values[3], values[4]),
                                    Complex64::new(values[5], values[6]),
                                    Complex64::new(values[7], values[8]),
                                ],
                            ));
                        }
                        "rect" => {
                            let values: Vec<usize> = value
                                .split(',')
                                .map(|t| t.trim().parse::<usize>().map_err(|_| bad("rect")))
                                .collect::<Result<_>>()?;
                            if values.len() != 4 {
                                return Err(Error::format(
                                    path,
                                    line_offset,
                                    format!("rect needs x,y,w,h, found {} values", values.len()),
                                ));
                            }
                            builder.rects.push(Rect {
                                x: values[0],
                                y: values[1],
                                w: values[2],
                                h: values[3],
                            });
                        }
                        other => {
                            return Err(Error::format(
                                path,
                                line_offset,
                                format!("unknown scene class field '{other}'"),
                            ))
                        }
                    }
                }
            }
            continue;
        }

        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::format(path, line_offset, format!("unknown key '{key}'")));
        }
        match key {
            "input" => cfg.input = Some(value.into()),
            "output" => cfg.output = Some(value.into()),
            "mask" => cfg.mask = Some(value.into()),
            "model" => cfg.model = Some(value.into()),
            "map" => cfg.map = Some(value.into()),
            "csv" => cfg.csv = Some(value.into()),
            "truth" => cfg.truth = Some(value.into()),
            "predicted" => cfg.predicted = Some(value.into()),
            "mode" => {
                cfg.mode = Some(match value {
                    "boxcar" => FilterMode::Boxcar,
                    "lee" => FilterMode::Lee,
                    _ => return Err(bad("mode")),
                })
            }
            "window" => cfg.window = Some(value.parse().map_err(|_| bad("window"))?),
            "looks" => cfg.looks = Some(value.parse().map_err(|_| bad("looks"))?),
            "classifier" => {
                if value != "wishart" && value != "svm" {
                    return Err(bad("classifier"));
                }
                cfg.classifier = Some(value.to_string());
            }
            "kernel" => cfg.kernel = Some(value.to_string()),
            "degree" => cfg.degree = Some(value.parse().map_err(|_| bad("degree"))?),
            "gamma" => cfg.gamma = Some(value.parse().map_err(|_| bad("gamma"))?),
            "cost" => cfg.cost = Some(value.parse().map_err(|_| bad("cost"))?),
            "seed" => cfg.seed = Some(value.parse().map_err(|_| bad("seed"))?),
            "train_per_class" => {
                cfg.train_per_class = Some(value.parse().map_err(|_| bad("train_per_class"))?)
            }
            _ => unreachable!(),
        }
    }

    if has_scene_keys {
        let need = |what: &str| Error::format(path, 0, format!("scene block missing '{what}'"));
        let width = scene_width.ok_or_else(|| need("scene.width"))?;
        let height = scene_height.ok_or_else(|| need("scene.height"))?;
        let looks = scene_looks.ok_or_else(|| need("scene.looks"))?;
        let count = scene_classes.ok_or_else(|| need("scene.classes"))?;
        let seed = scene_seed.unwrap_or(0);
        let mut classes = Vec::new();
        for class_id in 1..=count {
            let class_id = u8::try_from(class_id)
                .map_err(|_| Error::format(path, 0, "scene supports at most 255 classes"))?;
            let builder = class_builders.remove(&class_id).ok_or_else(|| {
                Error::format(path, 0, format!("scene block missing class {class_id}"))
            })?;
            let center = builder.center.ok_or_else(|| {
                Error::format(path, 0, format!("scene class {class_id} missing center"))
            })?;
            if builder.rects.is_empty() {
                return Err(Error::format(
                    path,
                    0,
                    format!("scene class {class_id} has no rectangles"),
                ));
            }
            classes.push(ClassRegion {
                class_id,
                center,
                rects: builder.rects,
            });
        }
        if let Some((&extra, _)) = class_builders.iter().next() {
            return Err(Error::format(
                path,
                0,
                format!("scene class {extra} is outside scene.classes={count}"),
            ));
        }
        let spec = SceneSpec {
            width,
            height,
            looks,
            classes,
            seed,
        };
        spec.validate()?;
        cfg.scene = Some(spec);
    }

    Ok(cfg)
}

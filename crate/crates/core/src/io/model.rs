//! Plain-text model files.
//!
//! Numbers are written with 17 significant digits so f64 values round-trip
//! exactly.
//!
//! Wishart model:
//! ```text
//! wishart-model v1
//! looks=9
//! class 1 <T11> <T22> <T33> <ReT12> <ImT12> <ReT13> <ImT13> <ReT23> <ImT23>
//! ```
//!
//! SVM model:
//! ```text
//! svm-model v1
//! kernel=rbf gamma=<g>          (or: kernel=polynomial degree=<p> | kernel=sigmoid)
//! cost=<C>
//! classes=1,2,3
//! scaler_mean=<9 values>
//! scaler_std=<9 values>
//! scaler_const=<9 0/1 flags>
//! machine pos=1 neg=2 bias=<b> nsv=<k>
//! sv <y> <alpha> <9 scaled feature values>
//! ```

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::svm::{BinaryMachine, FeatureScaler, FeatureVector, Kernel, SvmModel};
use crate::types::HermitianMatrix3;
use crate::wishart::WishartModel;

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

struct LineReader<'a> {
    path: &'a Path,
    lines: std::str::Lines<'a>,
    offset: u64,
    line_offset: u64,
}

impl<'a> LineReader<'a> {
    fn new(path: &'a Path, text: &'a str) -> Self {
        Self {
            path,
            lines: text.lines(),
            offset: 0,
            line_offset: 0,
        }
    }

    fn next(&mut self) -> Option<&'a str> {
        loop {
            let line = self.lines.next()?;
            self.line_offset = self.offset;
            self.offset += line.len() as u64 + 1;
            let trimmed = line.trim();
            if !trimmed.is_empty() && !trimmed.starts_with('#') {
                return Some(trimmed);
            }
        }
    }

    fn fail(&self, msg: impl Into<String>) -> Error {
        Error::format(self.path, self.line_offset, msg)
    }

    fn expect(&mut self, what: &str) -> Result<&'a str> {
        self.next()
            .ok_or_else(|| Error::format(self.path, self.offset, format!("missing {what}")))
    }
}

fn parse_f64(reader: &LineReader, token: &str) -> Result<f64> {
    token
        .parse::<f64>()
        .map_err(|_| reader.fail(format!("bad number '{token}'")))
}

fn parse_values(reader: &LineReader, text: &str, expected: usize) -> Result<Vec<f64>> {
    let values: Vec<f64> = text
        .split_whitespace()
        .map(|t| parse_f64(reader, t))
        .collect::<Result<_>>()?;
    if values.len() != expected {
        return Err(reader.fail(format!("expected {expected} values, found {}", values.len())));
    }
    Ok(values)
}

/// Serialize a Wishart model.
pub fn write_wishart_model(path: &Path, model: &WishartModel) -> Result<()> {
    let mut out = String::from("wishart-model v1\n");
    out.push_str(&format!("looks={}\n", model.looks()));
    for class in model.classes() {
        let c = &class.center;
        out.push_str(&format!(
            "class {} {} {} {} {} {} {} {} {} {}\n",
            class.class_id,
            fmt(c.diag[0]),
            fmt(c.diag[1]),
            fmt(c.diag[2]),
            fmt(c.upper[0].re),
            fmt(c.upper[0].im),
            fmt(c.upper[1].re),
            fmt(c.upper[1].im),
            fmt(c.upper[2].re),
            fmt(c.upper[2].im),
        ));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Load a Wishart model.
pub fn read_wishart_model(path: &Path) -> Result<WishartModel> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = LineReader::new(path, &text);
    let magic = reader.expect("model header")?;
    if magic != "wishart-model v1" {
        return Err(reader.fail(format!("expected 'wishart-model v1', found '{magic}'")));
    }
    let looks_line = reader.expect("looks line")?;
    let looks: u32 = looks_line
        .strip_prefix("looks=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| reader.fail(format!("bad looks line '{looks_line}'")))?;

    let mut centers = Vec::new();
    while let Some(line) = reader.next() {
        let rest = line
            .strip_prefix("class ")
            .ok_or_else(|| reader.fail(format!("expected class record, found '{line}'")))?;
        let mut tokens = rest.split_whitespace();
        let id_token = tokens
            .next()
            .ok_or_else(|| reader.fail("class record missing id"))?;
        let class_id: u8 = id_token
            .parse()
            .map_err(|_| reader.fail(format!("bad class id '{id_token}'")))?;
        let values: Vec<f64> = tokens
            .map(|t| parse_f64(&reader, t))
            .collect::<Result<_>>()?;
        if values.len() != 9 {
            return Err(reader.fail(format!("class record needs 9 values, found {}", values.len())));
        }
        let center = HermitianMatrix3::new(
            [values[0], values[1], values[2]],
            [
                Complex64::new(values[3], values[4]),
                Complex64::new(values[5], values[6]),
                Complex64::new(values[7], values[8]),
            ],
        );
        centers.push((class_id, center));
    }
    WishartModel::from_stored_centers(&centers, looks)
}

fn kernel_line(kernel: &Kernel) -> String {
    match kernel {
        Kernel::Rbf(g) => format!("kernel=rbf gamma={}", fmt(*g)),
        Kernel::Polynomial(p) => format!("kernel=polynomial degree={p}"),
        Kernel::Sigmoid => "kernel=sigmoid".to_string(),
    }
}

fn parse_kernel(reader: &LineReader, line: &str) -> Result<Kernel> {
    let mut tokens = line.split_whitespace();
    let head = tokens.next().unwrap_or_default();
    let kind = head
        .strip_prefix("kernel=")
        .ok_or_else(|| reader.fail(format!("expected kernel line, found '{line}'")))?;
    match kind {
        "rbf" => {
            let g = tokens
                .next()
                .and_then(|t| t.strip_prefix("gamma="))
                .ok_or_else(|| reader.fail("rbf kernel needs gamma="))?;
            Ok(Kernel::Rbf(parse_f64(reader, g)?))
        }
        "polynomial" => {
            let p = tokens
                .next()
                .and_then(|t| t.strip_prefix("degree="))
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| reader.fail("polynomial kernel needs degree="))?;
            Ok(Kernel::Polynomial(p))
        }
        "sigmoid" => Ok(Kernel::Sigmoid),
        other => Err(reader.fail(format!("unknown kernel '{other}'"))),
    }
}

/// Serialize an SVM model.
pub fn write_svm_model(path: &Path, model: &SvmModel) -> Result<()> {
    let mut out = String::from("svm-model v1\n");
    out.push_str(&kernel_line(&model.kernel));
    out.push('\n');
    out.push_str(&format!("cost={}\n", fmt(model.cost)));
    let classes: Vec<String> = model.classes.iter().map(|c| c.to_string()).collect();
    out.push_str(&format!("classes={}\n", classes.join(",")));
    let join = |v: &[f64]| v.iter().map(|x| fmt(*x)).collect::<Vec<_>>().join(" ");
    out.push_str(&format!("scaler_mean={}\n", join(&model.scaler.mean)));
    out.push_str(&format!("scaler_std={}\n", join(&model.scaler.std)));
    let flags: Vec<&str> = model
        .scaler
        .constant
        .iter()
        .map(|&b| if b { "1" } else { "0" })
        .collect();
    out.push_str(&format!("scaler_const={}\n", flags.join(",")));
    for machine in &model.machines {
        out.push_str(&format!(
            "machine pos={} neg={} bias={} nsv={}\n",
            machine.class_pos,
            machine.class_neg,
            fmt(machine.bias),
            machine.support_vectors.len()
        ));
        for ((sv, y), alpha) in machine
            .support_vectors
            .iter()
            .zip(&machine.sv_labels)
            .zip(&machine.sv_alpha)
        {
            out.push_str(&format!("sv {} {} {}\n", fmt(*y), fmt(*alpha), join(&sv.0)));
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Load an SVM model.
pub fn read_svm_model(path: &Path) -> Result<SvmModel> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = LineReader::new(path, &text);
    let magic = reader.expect("model header")?;
    if magic != "svm-model v1" {
        return Err(reader.fail(format!("expected 'svm-model v1', found '{magic}'")));
    }
    let kernel_text = reader.expect("kernel line")?;
    let kernel = parse_kernel(&reader, kernel_text)?;
    let cost_line = reader.expect("cost line")?;
    let cost = cost_line
        .strip_prefix("cost=")
        .ok_or_else(|| reader.fail(format!("expected cost line, found '{cost_line}'")))
        .and_then(|v| parse_f64(&reader, v))?;

    let classes_line = reader.expect("classes line")?;
    let mut classes: Vec<u8> = classes_line
        .strip_prefix("classes=")
        .ok_or_else(|| reader.fail(format!("expected classes line, found '{classes_line}'")))?
        .split(',')
        .map(|t| {
            t.parse::<u8>()
                .map_err(|_| reader.fail(format!("bad class id '{t}'")))
        })
        .collect::<Result<_>>()?;
    // Ascending order pins the lowest-id tie-break in voting.
    classes.sort_unstable();

    let take_array = |reader: &mut LineReader, key: &str| -> Result<[f64; 9]> {
        let line = reader.expect(key)?;
        let body = line
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .ok_or_else(|| reader.fail(format!("expected {key}= line, found '{line}'")))?;
        let values = parse_values(reader, body, 9)?;
        Ok(values.try_into().unwrap())
    };
    let mean = take_array(&mut reader, "scaler_mean")?;
    let std = take_array(&mut reader, "scaler_std")?;

    let const_line = reader.expect("scaler_const line")?;
    let flags_text = const_line
        .strip_prefix("scaler_const=")
        .ok_or_else(|| reader.fail(format!("expected scaler_const line, found '{const_line}'")))?;
    let flags: Vec<bool> = flags_text
        .split(',')
        .map(|t| match t {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(reader.fail(format!("bad scaler flag '{other}'"))),
        })
        .collect::<Result<_>>()?;
    if flags.len() != 9 {
        return Err(reader.fail("scaler_const needs 9 flags"));
    }
    let scaler = FeatureScaler {
        mean,
        std,
        constant: flags.try_into().unwrap(),
    };

    let mut machines = Vec::new();
    while let Some(line) = reader.next() {
        let rest = line
            .strip_prefix("machine ")
            .ok_or_else(|| reader.fail(format!("expected machine record, found '{line}'")))?;
        let mut pos = None;
        let mut neg = None;
        let mut bias = None;
        let mut nsv = None;
        for token in rest.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| reader.fail(format!("bad machine field '{token}'")))?;
            match key {
                "pos" => pos = value.parse::<u8>().ok(),
                "neg" => neg = value.parse::<u8>().ok(),
                "bias" => bias = Some(parse_f64(&reader, value)?),
                "nsv" => nsv = value.parse::<usize>().ok(),
                other => return Err(reader.fail(format!("unknown machine field '{other}'"))),
            }
        }
        let (pos, neg, bias, nsv) = match (pos, neg, bias, nsv) {
            (Some(p), Some(n), Some(b), Some(k)) => (p, n, b, k),
            _ => return Err(reader.fail("machine record needs pos, neg, bias and nsv")),
        };
        let mut support_vectors = Vec::with_capacity(nsv);
        let mut sv_labels = Vec::with_capacity(nsv);
        let mut sv_alpha = Vec::with_capacity(nsv);
        for _ in 0..nsv {
            let sv_line = reader.expect("support vector line")?;
            let body = sv_line
                .strip_prefix("sv ")
                .ok_or_else(|| reader.fail(format!("expected sv record, found '{sv_line}'")))?;
            let values = parse_values(&reader, body, 11)?;
            if values[0] != 1.0 && values[0] != -1.0 {
                return Err(reader.fail(format!("support vector label must be +-1, got {}", values[0])));
            }
            sv_labels.push(values[0]);
            sv_alpha.push(values[1]);
            support_vectors.push(FeatureVector(values[2..11].try_into().unwrap()));
        }
        machines.push(BinaryMachine {
            class_pos: pos,
            class_neg: neg,
            support_vectors,
            sv_labels,
            sv_alpha,
            bias,
        });
    }

    let expected_machines = classes.len() * (classes.len() - 1) / 2;
    if machines.len() != expected_machines {
        return Err(Error::format(
            path,
            0,
            format!(
                "model has {} machines, expected {expected_machines} for {} classes",
                machines.len(),
                classes.len()
            ),
        ));
    }

    Ok(SvmModel {
        kernel,
        cost,
        scaler,
        classes,
        machines,
    })
}

//! Helpers shared by the CLI integration suites: running the binary,
//! generating synthetic bundles, and structurally validating JSON output
//! against the schemas shipped in `schemas/`.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_artmetrics");

pub fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .output()
        .expect("artmetrics binary should spawn")
}

pub fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} exited with {:?}\nstderr: {}",
        args,
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process should exit, not signal")
}

pub fn stderr_text(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn stdout_text(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Writes a generator config with the given headline parameters and returns
/// its path. `effects_json` is the raw JSON object for `dummy_effects`.
pub fn write_synth_config(
    path: &Path,
    n_records: usize,
    true_alpha: f64,
    effects_json: &str,
    noise_sd: f64,
    seed: u64,
    image_side: usize,
) -> PathBuf {
    let body = format!(
        r#"{{
  "n_records": {n_records},
  "true_alpha": {true_alpha},
  "dummy_effects": {effects_json},
  "noise_sd": {noise_sd},
  "seed": {seed},
  "image_side": {image_side}
}}"#
    );
    std::fs::write(path, body).expect("write synth config");
    path.to_path_buf()
}

/// Runs `synth` into `bundle_dir` and `extract` over its images, returning
/// the features CSV path. `size` must match the bundle's image side for the
/// extracted entropy to reproduce the generator's.
pub fn synth_and_extract(
    config: &Path,
    bundle_dir: &Path,
    size: usize,
    threads: usize,
) -> PathBuf {
    run_ok(&[
        "synth",
        "--config",
        config.to_str().unwrap(),
        "--out",
        bundle_dir.to_str().unwrap(),
    ]);
    let features = bundle_dir.join("features.csv");
    run_ok(&[
        "extract",
        "--images",
        bundle_dir.join("images").to_str().unwrap(),
        "--out",
        features.to_str().unwrap(),
        "--size",
        &size.to_string(),
        "--threads",
        &threads.to_string(),
    ]);
    features
}

pub fn schemas_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

/// Structural JSON-schema checks covering the subset the shipped schemas
/// use: `type` (including union arrays), `required`, `properties`,
/// `additionalProperties: false`, `items`, `enum`, `oneOf`, `minimum`, and
/// `$ref` into `#/definitions`.
pub mod schema {
    use serde_json::Value;

    pub fn validate(root: &Value, value: &Value) -> Result<(), String> {
        check(root, root, value, "$")
    }

    fn resolve<'a>(root: &'a Value, schema: &'a Value) -> &'a Value {
        let Some(reference) = schema.get("$ref").and_then(Value::as_str) else {
            return schema;
        };
        let mut node = root;
        for part in reference.trim_start_matches("#/").split('/') {
            node = node
                .get(part)
                .unwrap_or_else(|| panic!("schema $ref {reference} should resolve"));
        }
        node
    }

    fn check(root: &Value, schema: &Value, value: &Value, path: &str) -> Result<(), String> {
        let schema = resolve(root, schema);
        if let Some(branches) = schema.get("oneOf").and_then(Value::as_array) {
            if branches.iter().any(|b| check(root, b, value, path).is_ok()) {
                return Ok(());
            }
            return Err(format!("{path}: no oneOf branch matched"));
        }
        if let Some(ty) = schema.get("type") {
            let allowed: Vec<&str> = match ty {
                Value::String(s) => vec![s.as_str()],
                Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
                _ => Vec::new(),
            };
            if !allowed.iter().any(|t| type_matches(t, value)) {
                return Err(format!("{path}: expected type {allowed:?}, got {value}"));
            }
        }
        if let Some(options) = schema.get("enum").and_then(Value::as_array) {
            if !options.contains(value) {
                return Err(format!("{path}: {value} not in enum {options:?}"));
            }
        }
        if let (Some(min), Some(x)) = (schema.get("minimum").and_then(Value::as_f64), value.as_f64())
        {
            if x < min {
                return Err(format!("{path}: {x} below minimum {min}"));
            }
        }
        if let Some(obj) = value.as_object() {
            if let Some(required) = schema.get("required").and_then(Value::as_array) {
                for name in required.iter().filter_map(Value::as_str) {
                    if !obj.contains_key(name) {
                        return Err(format!("{path}: missing required field {name}"));
                    }
                }
            }
            let props = schema.get("properties").and_then(Value::as_object);
            let open = schema
                .get("additionalProperties")
                .and_then(Value::as_bool)
                .unwrap_or(true);
            for (key, val) in obj {
                match props.and_then(|p| p.get(key)) {
                    Some(sub) => check(root, sub, val, &format!("{path}.{key}"))?,
                    None if !open => return Err(format!("{path}: unexpected field {key}")),
                    None => {}
                }
            }
        }
        if let (Some(items), Some(arr)) = (schema.get("items"), value.as_array()) {
            for (i, v) in arr.iter().enumerate() {
                check(root, items, v, &format!("{path}[{i}]"))?;
            }
        }
        Ok(())
    }

    fn type_matches(t: &str, v: &Value) -> bool {
        match t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "number" => v.is_number(),
            "integer" => v.as_i64().is_some() || v.as_u64().is_some(),
            "boolean" => v.is_boolean(),
            "null" => v.is_null(),
            _ => false,
        }
    }
}

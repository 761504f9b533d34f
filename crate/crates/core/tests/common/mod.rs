//! Shared test oracles, independent of the library's solver paths.

#![allow(dead_code)]

use specbound::{AngularGrid, GridDensity};

/// Levinson-Durbin recursion: AR coefficients and innovation variance from a
/// covariance window. Independent oracle for the P ≡ 1 estimator.
pub fn levinson(lags: &[f64]) -> (Vec<f64>, f64) {
    let n = lags.len() - 1;
    let mut a = vec![0.0; n + 1]; // a[1..=n] are the AR coefficients
    let mut var = lags[0];
    for m in 1..=n {
        let mut acc = lags[m];
        for j in 1..m {
            acc -= a[j] * lags[m - j];
        }
        let k = acc / var;
        let mut next = a.clone();
        next[m] = k;
        for j in 1..m {
            next[j] = a[j] - k * a[m - j];
        }
        a = next;
        var *= 1.0 - k * k;
    }
    (a[1..].to_vec(), var)
}

/// AR spectral density σ²/|1 − Σ aⱼ e^{ijθ}|² on a grid, from Levinson
/// output or closed-form coefficients.
pub fn ar_spectral_density(ar: &[f64], sigma2: f64, grid: AngularGrid) -> GridDensity {
    let values: Vec<f64> = grid
        .nodes()
        .map(|theta| {
            let (mut re, mut im) = (1.0, 0.0);
            for (j, c) in ar.iter().enumerate() {
                let w = (j + 1) as f64 * theta;
                re -= c * w.cos();
                im -= c * w.sin();
            }
            sigma2 / (re * re + im * im)
        })
        .collect();
    GridDensity::new(grid, values).expect("AR density positive")
}

/// Closed-form AR(1) covariance lags r_k = σ²·a^k/(1−a²).
pub fn ar1_lags(a: f64, sigma2: f64, order: usize) -> Vec<f64> {
    (0..=order)
        .map(|k| sigma2 * a.powi(k as i32) / (1.0 - a * a))
        .collect()
}

/// log Φ ≤ Φ − 1 + 1e−12 at every strictly positive node (zero nodes carry
/// the −∞ ≤ −1 limit and are skipped).
pub fn assert_log_inequality(density: &GridDensity, label: &str) {
    for (j, &v) in density.values().iter().enumerate() {
        if v > 0.0 {
            assert!(
                v.ln() <= v - 1.0 + 1e-12,
                "{label}: log inequality violated at node {j}: value {v}"
            );
        }
    }
}

/// Random strictly positive density exp(Σ c_k·cos kθ/k-ish), giving a PD lag
/// window of any order below the aliasing limit.
pub fn random_positive_density(
    rng: &mut impl rand::Rng,
    degree: usize,
    grid: AngularGrid,
) -> GridDensity {
    let mut values: Vec<f64> = vec![0.0; grid.size()];
    let coeffs: Vec<f64> = (0..=degree)
        .map(|k| {
            let scale = if k == 0 { 0.5 } else { 0.5 / k as f64 };
            (rng.gen::<f64>() * 2.0 - 1.0) * scale
        })
        .collect();
    for (j, theta) in grid.nodes().enumerate() {
        let mut log_phi = coeffs[0];
        for (k, c) in coeffs.iter().enumerate().skip(1) {
            log_phi += 2.0 * c * (k as f64 * theta).cos();
        }
        values[j] = log_phi.exp();
    }
    GridDensity::new(grid, values).expect("exponential is positive")
}

/// Minimal JSON Schema subset validator: type, properties, required,
/// additionalProperties (bool), items, enum, oneOf, $ref into #/definitions
/// or a sibling schema file.
pub mod schema {
    use serde_json::Value;
    use std::collections::HashMap;
    use std::path::Path;

    pub struct SchemaSet {
        schemas: HashMap<String, Value>,
    }

    impl SchemaSet {
        pub fn load(dir: &Path) -> Self {
            let mut schemas = HashMap::new();
            for entry in std::fs::read_dir(dir).expect("schema dir") {
                let path = entry.expect("entry").path();
                if path.extension().is_some_and(|e| e == "json") {
                    let text = std::fs::read_to_string(&path).expect("schema text");
                    let value: Value = serde_json::from_str(&text).expect("schema json");
                    schemas.insert(
                        path.file_name().unwrap().to_string_lossy().into_owned(),
                        value,
                    );
                }
            }
            Self { schemas }
        }

        pub fn validate(&self, schema_file: &str, value: &Value) -> Result<(), String> {
            let root = self
                .schemas
                .get(schema_file)
                .ok_or_else(|| format!("unknown schema {schema_file}"))?;
            self.check(root, root, value, schema_file)
        }

        fn resolve<'a>(&'a self, root: &'a Value, reference: &str) -> Option<(&'a Value, &'a Value)> {
            if let Some(path) = reference.strip_prefix("#/definitions/") {
                return root
                    .get("definitions")
                    .and_then(|d| d.get(path))
                    .map(|s| (root, s));
            }
            self.schemas.get(reference).map(|s| (s, s))
        }

        fn check(
            &self,
            root: &Value,
            schema: &Value,
            value: &Value,
            at: &str,
        ) -> Result<(), String> {
            if let Some(reference) = schema.get("$ref").and_then(Value::as_str) {
                let (new_root, target) = self
                    .resolve(root, reference)
                    .ok_or_else(|| format!("{at}: unresolved $ref {reference}"))?;
                return self.check(new_root, target, value, at);
            }
            if let Some(any) = schema.get("oneOf").and_then(Value::as_array) {
                let mut errors = Vec::new();
                for (i, s) in any.iter().enumerate() {
                    match self.check(root, s, value, &format!("{at}/oneOf[{i}]")) {
                        Ok(()) => return Ok(()),
                        Err(e) => errors.push(e),
                    }
                }
                return Err(format!("{at}: no oneOf branch matched: {errors:?}"));
            }
            if let Some(allowed) = schema.get("enum").and_then(Value::as_array) {
                if !allowed.contains(value) {
                    return Err(format!("{at}: {value} not in enum"));
                }
            }
            match schema.get("type").and_then(Value::as_str) {
                Some("object") => {
                    let obj = value
                        .as_object()
                        .ok_or_else(|| format!("{at}: expected object"))?;
                    if let Some(required) = schema.get("required").and_then(Value::as_array) {
                        for name in required {
                            let name = name.as_str().unwrap();
                            if !obj.contains_key(name) {
                                return Err(format!("{at}: missing required field {name}"));
                            }
                        }
                    }
                    let props = schema.get("properties").and_then(Value::as_object);
                    let additional = schema
                        .get("additionalProperties")
                        .and_then(Value::as_bool)
                        .unwrap_or(true);
                    for (key, item) in obj {
                        match props.and_then(|p| p.get(key)) {
                            Some(sub) => {
                                self.check(root, sub, item, &format!("{at}/{key}"))?;
                            }
                            None if additional => {}
                            None => return Err(format!("{at}: unexpected field {key}")),
                        }
                    }
                    Ok(())
                }
                Some("array") => {
                    let arr = value
                        .as_array()
                        .ok_or_else(|| format!("{at}: expected array"))?;
                    if let Some(items) = schema.get("items") {
                        for (i, item) in arr.iter().enumerate() {
                            self.check(root, items, item, &format!("{at}[{i}]"))?;
                        }
                    }
                    Ok(())
                }
                Some("string") => value
                    .as_str()
                    .map(|_| ())
                    .ok_or_else(|| format!("{at}: expected string")),
                Some("number") => value
                    .as_f64()
                    .map(|_| ())
                    .ok_or_else(|| format!("{at}: expected number")),
                Some("integer") => value
                    .as_i64()
                    .map(|_| ())
                    .or_else(|| value.as_u64().map(|_| ()))
                    .ok_or_else(|| format!("{at}: expected integer")),
                Some("boolean") => value
                    .as_bool()
                    .map(|_| ())
                    .ok_or_else(|| format!("{at}: expected boolean")),
                Some(other) => Err(format!("{at}: unsupported type {other}")),
                None => Ok(()),
            }
        }
    }

    /// Directory of the schemas shipped with the crate.
    pub fn shipped_dir() -> std::path::PathBuf {
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
    }
}

//! Scenario files: the JSON schema, parsing with precise error positions,
//! and semantic validation against the bound registry.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use mtb_core::compare::{LambdaPolicy, McConfig, Method, OracleConfig};
use mtb_core::ReferenceSpec;

/// CLI failure with the process exit code it maps to:
/// 1 — unusable input (unreadable file, malformed JSON, schema violation),
/// 2 — domain failure (invalid family, size caps, output I/O),
/// 3 — theorem violation reported by the soundness checker.
#[derive(Debug)]
pub enum CliError {
    Read {
        path: String,
        message: String,
    },
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    Schema(String),
    Domain(String),
    Io(String),
    Violation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Parse { .. } | CliError::Schema(_) => 1,
            CliError::Domain(_) | CliError::Io(_) => 2,
            CliError::Violation(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Read { path, message } => write!(f, "cannot read {path}: {message}"),
            CliError::Parse {
                path,
                line,
                column,
                message,
            } => write!(f, "{path}:{line}:{column}: {message}"),
            CliError::Schema(m) => write!(f, "schema: {m}"),
            CliError::Domain(m) => write!(f, "domain: {m}"),
            CliError::Io(m) => write!(f, "io: {m}"),
            CliError::Violation(m) => write!(f, "violation: {m}"),
        }
    }
}

impl From<mtb_core::Error> for CliError {
    fn from(e: mtb_core::Error) -> Self {
        match &e {
            mtb_core::Error::Violation { .. } => CliError::Violation(e.to_string()),
            // wrong method for the family shape or an unsupported
            // method/reference pairing is a scenario problem, not a math one
            mtb_core::Error::Arity { .. }
            | mtb_core::Error::Kind { .. }
            | mtb_core::Error::UnsupportedReference { .. } => CliError::Schema(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

fn default_product_n() -> usize {
    1
}

fn default_mc_samples() -> usize {
    McConfig::default().samples
}

fn default_mc_seed() -> u64 {
    McConfig::default().seed
}

fn default_minimax_iters() -> usize {
    OracleConfig::default().minimax_iters
}

fn default_enum_cap() -> u64 {
    OracleConfig::default().enum_cap
}

fn default_product_size_cap() -> u64 {
    OracleConfig::default().product_size_cap
}

fn default_lambda_range() -> (f64, f64) {
    mtb_core::bounds::DEFAULT_LAMBDA_RANGE
}

fn default_grid_points() -> usize {
    mtb_core::bounds::DEFAULT_GRID_POINTS
}

fn default_refine_tol() -> f64 {
    mtb_core::bounds::DEFAULT_REFINE_TOL
}

/// The candidate family, in either representation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Finite {
        #[serde(default)]
        atoms: Option<Vec<String>>,
        #[serde(default)]
        weights: Option<Vec<f64>>,
        density_matrix: Vec<Vec<f64>>,
    },
    Gaussian {
        means: Vec<Vec<f64>>,
        sigma: f64,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case", deny_unknown_fields)]
pub enum LambdaPolicySpec {
    Fixed {
        lambda: f64,
    },
    Optimize {
        #[serde(default = "default_lambda_range")]
        range: (f64, f64),
        #[serde(default = "default_grid_points")]
        grid_points: usize,
        #[serde(default = "default_refine_tol")]
        refine_tol: f64,
    },
}

impl Default for LambdaPolicySpec {
    fn default() -> Self {
        LambdaPolicySpec::Optimize {
            range: default_lambda_range(),
            grid_points: default_grid_points(),
            refine_tol: default_refine_tol(),
        }
    }
}

impl LambdaPolicySpec {
    pub fn to_policy(self) -> LambdaPolicy {
        match self {
            LambdaPolicySpec::Fixed { lambda } => LambdaPolicy::Fixed(lambda),
            LambdaPolicySpec::Optimize {
                range,
                grid_points,
                refine_tol,
            } => LambdaPolicy::Optimize {
                range,
                grid_points,
                refine_tol,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSpec {
    #[serde(default = "default_mc_samples")]
    pub samples: usize,
    #[serde(default = "default_mc_seed")]
    pub seed: u64,
}

impl Default for McSpec {
    fn default() -> Self {
        McSpec {
            samples: default_mc_samples(),
            seed: default_mc_seed(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    #[serde(default = "default_minimax_iters")]
    pub minimax_iters: usize,
    #[serde(default = "default_enum_cap")]
    pub enum_cap: u64,
    #[serde(default = "default_product_size_cap")]
    pub product_size_cap: u64,
}

impl Default for OracleSpec {
    fn default() -> Self {
        OracleSpec {
            minimax_iters: default_minimax_iters(),
            enum_cap: default_enum_cap(),
            product_size_cap: default_product_size_cap(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub family_spec: FamilySpec,
    #[serde(default = "default_product_n")]
    pub product_n: usize,
    #[serde(default)]
    pub reference: ReferenceSpec,
    pub bounds: Vec<String>,
    #[serde(default)]
    pub lambda_policy: LambdaPolicySpec,
    #[serde(default)]
    pub mc: McSpec,
    #[serde(default)]
    pub oracle: OracleSpec,
}

/// Reads and fully validates a scenario, filling every default so the echoed
/// header shows the configuration actually used.
pub fn parse_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut scenario: Scenario = serde_json::from_str(&text).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Syntax | Category::Eof | Category::Io => CliError::Parse {
                path: path.display().to_string(),
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            },
            Category::Data => CliError::Schema(e.to_string()),
        }
    })?;
    fill_defaults(&mut scenario)?;
    validate(&scenario)?;
    Ok(scenario)
}

fn fill_defaults(scenario: &mut Scenario) -> Result<(), CliError> {
    if let FamilySpec::Finite {
        atoms,
        weights,
        density_matrix,
    } = &mut scenario.family_spec
    {
        let n_atoms = density_matrix.first().map_or(0, Vec::len);
        if atoms.is_none() {
            *atoms = Some((0..n_atoms).map(|i| i.to_string()).collect());
        }
        if weights.is_none() {
            *weights = Some(vec![1.0; n_atoms]);
        }
    }
    Ok(())
}

/// Every method name the `bounds` list accepts.
pub fn registry_names() -> Vec<&'static str> {
    Method::ALL.iter().map(|m| m.name()).collect()
}

fn validate(scenario: &Scenario) -> Result<(), CliError> {
    if scenario.bounds.is_empty() {
        return Err(CliError::Schema(
            "bounds must list at least one method".into(),
        ));
    }
    for name in &scenario.bounds {
        if Method::parse(name).is_none() {
            return Err(CliError::Schema(format!(
                "unknown bound method {name:?}; valid names: {}",
                registry_names().join(", ")
            )));
        }
    }
    if scenario.product_n == 0 {
        return Err(CliError::Schema("product_n must be >= 1".into()));
    }
    match scenario.lambda_policy {
        LambdaPolicySpec::Fixed { lambda } => {
            if !(lambda.is_finite() && lambda > 0.0) {
                return Err(CliError::Schema(format!(
                    "lambda_policy.lambda must be a positive finite number, got {lambda}"
                )));
            }
        }
        LambdaPolicySpec::Optimize {
            range: (lo, hi),
            grid_points,
            refine_tol,
        } => {
            if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
                return Err(CliError::Schema(format!(
                    "lambda_policy.range must satisfy 0 < min < max, got [{lo}, {hi}]"
                )));
            }
            if grid_points < 2 {
                return Err(CliError::Schema(format!(
                    "lambda_policy.grid_points must be >= 2, got {grid_points}"
                )));
            }
            if !(refine_tol.is_finite() && refine_tol > 0.0) {
                return Err(CliError::Schema(format!(
                    "lambda_policy.refine_tol must be positive, got {refine_tol}"
                )));
            }
        }
    }
    Ok(())
}

/// The scenario's methods resolved against the registry. `validate` already
/// guaranteed each name parses.
pub fn methods(scenario: &Scenario) -> Vec<Method> {
    scenario
        .bounds
        .iter()
        .map(|name| Method::parse(name).expect("validated"))
        .collect()
}

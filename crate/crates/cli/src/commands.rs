//! The three subcommands: eval (one scenario, all requested bounds), sweep
//! (tensorized bounds across sample sizes), verify (randomized suites).

use std::path::Path;

use mtb_core::compare::{
    compare_all, compare_tensorized, CompareConfig, FamilyModel, McConfig, OracleConfig,
};
use mtb_core::family::{make_finite_family, make_gaussian_family, product_extend};
use mtb_core::testbed::{run_verification, Reproducer};

use crate::report::{
    render_csv, render_json, rows_from_comparison, rows_from_sweep, write_atomic, ReportRow,
};
use crate::scenario::{methods, parse_scenario, CliError, FamilySpec, LambdaPolicySpec, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

fn build_model(scenario: &Scenario) -> Result<FamilyModel, CliError> {
    match &scenario.family_spec {
        FamilySpec::Finite {
            atoms,
            weights,
            density_matrix,
        } => {
            let fam = make_finite_family(
                atoms.clone().expect("defaults filled"),
                weights.clone().expect("defaults filled"),
                density_matrix.clone(),
            )?;
            let fam = if scenario.product_n > 1 {
                product_extend(&fam, scenario.product_n, scenario.oracle.product_size_cap)?
            } else {
                fam
            };
            Ok(FamilyModel::Finite(fam))
        }
        FamilySpec::Gaussian { means, sigma } => {
            let fam = make_gaussian_family(means.clone(), *sigma)?;
            let fam = if scenario.product_n > 1 {
                fam.product_extend(scenario.product_n)?
            } else {
                fam
            };
            Ok(FamilyModel::Gaussian(fam))
        }
    }
}

fn compare_config(scenario: &Scenario, fault_vj_scale: Option<f64>) -> CompareConfig {
    CompareConfig {
        reference: scenario.reference.clone(),
        methods: methods(scenario),
        lambda: scenario.lambda_policy.to_policy(),
        mc: McConfig {
            samples: scenario.mc.samples,
            seed: scenario.mc.seed,
        },
        oracle: OracleConfig {
            minimax_iters: scenario.oracle.minimax_iters,
            enum_cap: scenario.oracle.enum_cap,
            product_size_cap: scenario.oracle.product_size_cap,
        },
        fault_vj_scale,
    }
}

fn emit(
    scenario: &Scenario,
    rows: Vec<ReportRow>,
    format: Format,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let text = match format {
        Format::Csv => render_csv(scenario, &rows)?,
        Format::Json => render_json(scenario, rows)?,
    };
    match out {
        Some(path) => write_atomic(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn cmd_eval(scenario_path: &Path, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let scenario = parse_scenario(scenario_path)?;
    let model = build_model(&scenario)?;
    let config = compare_config(&scenario, None);
    let comparison = compare_all(&model, &config)?;
    let rows = rows_from_comparison(&comparison, &scenario.reference.label(), scenario.product_n);
    emit(&scenario, rows, format, out)
}

/// Parses "1,2,5,10" into sample sizes, rejecting empties and zeros.
pub fn parse_n_list(raw: &str) -> Result<Vec<usize>, CliError> {
    let values = raw
        .split(',')
        .map(|part| part.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| {
            CliError::Schema(format!(
                "--n must be a comma-separated list of positive integers, got {raw:?}"
            ))
        })?;
    if values.is_empty() {
        return Err(CliError::Schema("--n must list at least one n".into()));
    }
    if values.contains(&0) {
        return Err(CliError::Schema("--n values must be >= 1".into()));
    }
    Ok(values)
}

pub fn cmd_sweep(
    scenario_path: &Path,
    n_list: &str,
    format: Format,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let scenario = parse_scenario(scenario_path)?;
    let n_values = parse_n_list(n_list)?;
    if scenario.product_n != 1 {
        return Err(CliError::Schema(
            "sweep varies the product size itself; set product_n to 1".into(),
        ));
    }
    let model = build_model(&scenario)?;
    let config = compare_config(&scenario, None);
    let points = compare_tensorized(&model, &config, &n_values)?;
    let rows = rows_from_sweep(&points, &scenario.reference.label());
    emit(&scenario, rows, format, out)
}

/// Scenario replaying a reproducer family under the same bound set the
/// soundness suite used.
fn reproducer_scenario(repro: &Reproducer) -> Scenario {
    let members = repro.densities.len();
    let atoms = repro.atom_weights.len();
    let mut bounds: Vec<String> = [
        "fano_new",
        "birge",
        "birge_massart",
        "vj",
        "vj_improved",
        "phi_hinge",
        "phi_entropy",
        "phi_power",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    bounds.push(if members == 2 { "two_point" } else { "fano_ih" }.into());
    Scenario {
        family_spec: FamilySpec::Finite {
            atoms: Some((0..atoms).map(|i| i.to_string()).collect()),
            weights: Some(repro.atom_weights.clone()),
            density_matrix: repro.densities.clone(),
        },
        product_n: 1,
        reference: Default::default(),
        bounds,
        lambda_policy: LambdaPolicySpec::Fixed { lambda: 1.0 },
        mc: Default::default(),
        oracle: Default::default(),
    }
}

pub fn cmd_verify(seed: u64, families: usize, fault_vj_scale: Option<f64>) -> Result<(), CliError> {
    if families == 0 {
        return Err(CliError::Schema("--families must be >= 1".into()));
    }
    let report = run_verification(seed, families, fault_vj_scale)?;
    for suite in &report.suites {
        let verdict = if suite.failures == 0 { "PASS" } else { "FAIL" };
        println!(
            "{verdict} {}: {}/{} checks passed",
            suite.name,
            suite.checks - suite.failures,
            suite.checks
        );
        if let Some(first) = &suite.first_failure {
            println!("    first failure: {first}");
        }
    }
    if report.passed() {
        println!("verification: PASS ({} suites)", report.suites.len());
        return Ok(());
    }
    let mut detail = "verification failed".to_string();
    if let Some(repro) = &report.reproducer {
        let path = format!("mtb_reproducer_seed{seed}.json");
        let scenario = reproducer_scenario(repro);
        let text = serde_json::to_string_pretty(&scenario)
            .map_err(|e| CliError::Io(format!("reproducer serialization failed: {e}")))?;
        write_atomic(Path::new(&path), &format!("{text}\n"))?;
        println!("reproducer written to {path}");
        detail = format!("{} ({})", repro.detail, repro.suite);
    }
    println!("verification: FAIL");
    Err(CliError::Violation(detail))
}

use crate::args::{CheckArgs, Common, ComputeArgs, OutputFormat, Show, SimulateArgs, ValidateArgs};
use crate::error::CliError;
use crate::report::*;
use qmc_core::checker::{Checker, StateSet, UntilMethod};
use qmc_core::linalg::{maximally_mixed, ComplexMatrix};
use qmc_core::logic::{parse_formula, parse_path_formula, PathFormula};
use qmc_core::model::{load_model_unchecked, ModelError, QmcModel, Scalar, DEFAULT_STOCHASTIC_TOL};
use qmc_core::simulate::estimate_prob;
use qmc_core::superop::{SuperOp, DEFAULT_EPS};
use serde::Serialize;
use std::time::Instant;

/// Rendered report plus exit status.
pub struct Outcome {
    pub output: String,
    pub status: u8,
}

fn render<T: Serialize>(format: OutputFormat, report: &T, text: impl FnOnce(&T) -> String) -> String {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(report).expect("reports serialize") + "\n",
        OutputFormat::Text => text(report),
    }
}

fn read(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn model_error(common: &Common, source: ModelError) -> CliError {
    CliError::Model {
        path: common.model.display().to_string(),
        source,
    }
}

/// Loads and validates the model at the default row-sum tolerance.
fn load(common: &Common) -> Result<QmcModel, CliError> {
    let model = load_model_unchecked(&read(&common.model)?).map_err(|e| model_error(common, e))?;
    let report = model.validate(DEFAULT_STOCHASTIC_TOL);
    if !report.is_valid() {
        return Err(model_error(common, ModelError::Invalid(report)));
    }
    Ok(model)
}

fn state_index(model: &QmcModel, name: &str) -> Result<usize, CliError> {
    model
        .state_index(name)
        .ok_or_else(|| CliError::UnknownState(name.to_string()))
}

fn state_names(model: &QmcModel, set: &StateSet) -> Vec<String> {
    set.iter().map(|&s| model.state_name(s).to_string()).collect()
}

fn tolerances(eps: f64) -> Tolerances {
    Tolerances {
        eps,
        stochastic: DEFAULT_STOCHASTIC_TOL,
    }
}

fn check_tol(tol: f64) -> Result<f64, CliError> {
    if tol.is_finite() && tol >= 0.0 {
        Ok(tol)
    } else {
        Err(CliError::Usage(format!("tolerance must be a non-negative number, got {tol}")))
    }
}

pub fn validate(args: &ValidateArgs) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let common = &args.common;
    let tol = check_tol(common.tol.unwrap_or(DEFAULT_STOCHASTIC_TOL))?;
    let model = load_model_unchecked(&read(&common.model)?).map_err(|e| model_error(common, e))?;
    let checked = model.validate(tol);
    let report = ValidateReport {
        command: "validate".into(),
        model: common.model.display().to_string(),
        valid: checked.is_valid(),
        dimension: model.dim(),
        states: model.num_states(),
        tolerance: tol,
        rows: checked
            .rows
            .iter()
            .map(|r| RowJson {
                state: r.state.clone(),
                deviation: sig(r.deviation),
            })
            .collect(),
        violations: checked.violations.iter().map(ToString::to_string).collect(),
        seconds: sig(start.elapsed().as_secs_f64()),
    };
    Ok(Outcome {
        output: render(common.output, &report, ValidateReport::text),
        status: if report.valid { 0 } else { 1 },
    })
}

pub fn check(args: &CheckArgs) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let common = &args.common;
    let eps = check_tol(common.tol.unwrap_or(DEFAULT_EPS))?;
    let method: UntilMethod = args.method.into();
    let model = load(common)?;
    let phi = parse_formula(&args.formula)?;
    let target = args.state.as_deref().map(|s| state_index(&model, s)).transpose()?;
    let result = Checker::new(&model).with_eps(eps).with_method(method).finish(&phi)?;

    let marginal_at = |s: usize| {
        result
            .evidence
            .iter()
            .flat_map(|e| &e.verdicts)
            .any(|v| v.state == s && v.marginal)
    };
    let verdicts = (0..model.num_states())
        .map(|s| StateVerdictJson {
            state: model.state_name(s).to_string(),
            verdict: result.holds_at(s),
            marginal: marginal_at(s),
        })
        .collect();
    let evidence = result
        .evidence
        .iter()
        .map(|e| EvidenceJson {
            formula: e.formula.clone(),
            path: e.path.clone(),
            direction: e.direction.symbol().to_string(),
            bound: MatrixJson::from(e.bound.trace_operator().matrix()),
            method: e.method.map(|m| m.to_string()),
            states: e
                .verdicts
                .iter()
                .map(|v| EvidenceStateJson {
                    state: model.state_name(v.state).to_string(),
                    holds: v.holds,
                    marginal: v.marginal,
                    gap: sig(v.gap),
                    trace_operator: MatrixJson::from(
                        e.values.get(v.state).expect("value per state").trace_operator().matrix(),
                    ),
                })
                .collect(),
        })
        .collect();
    let report = CheckReport {
        command: "check".into(),
        model: common.model.display().to_string(),
        formula: phi.to_string(),
        state: args.state.clone(),
        holds: target.map(|s| result.holds_at(s)),
        marginal: target.map(marginal_at),
        satisfying: state_names(&model, &result.satisfying),
        verdicts,
        subformulas: result
            .subformulas
            .iter()
            .map(|(f, set)| SubformulaJson {
                formula: f.clone(),
                satisfying: state_names(&model, set),
            })
            .collect(),
        evidence,
        tolerances: tolerances(eps),
        method: method.to_string(),
        seconds: sig(start.elapsed().as_secs_f64()),
    };
    let status = match report.holds {
        Some(false) => 1,
        _ => 0,
    };
    Ok(Outcome {
        output: render(common.output, &report, CheckReport::text),
        status,
    })
}

fn bounded_formula(text: &str, k: Option<usize>) -> Result<PathFormula, CliError> {
    let pf = parse_path_formula(text)?;
    match (k, &pf) {
        (Some(_), PathFormula::Next(_)) => Err(CliError::Usage(
            "--k applies to until and eventually formulas only".into(),
        )),
        (Some(k), _) => Ok(pf.with_step_bound(k)),
        (None, _) => Ok(pf),
    }
}

pub fn compute(args: &ComputeArgs) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let common = &args.common;
    let eps = check_tol(common.tol.unwrap_or(DEFAULT_EPS))?;
    let model = load(common)?;
    let pf = bounded_formula(&args.path_formula, args.k)?;
    let s = state_index(&model, &args.state)?;
    let mut checker = Checker::new(&model).with_eps(eps).with_method(args.method.into());
    let (values, method) = checker.path_values(&pf)?;
    let q = values.get(s).expect("value per state");
    let d = model.dim();
    let report = ComputeReport {
        command: "compute".into(),
        model: common.model.display().to_string(),
        path_formula: pf.to_string(),
        state: args.state.clone(),
        method: method.map(|m| m.to_string()),
        tolerances: tolerances(eps),
        trace_operator: MatrixJson::from(q.trace_operator().matrix()),
        matrix_rep: (args.show == Show::Matrix).then(|| MatrixJson::from(q.matrix_rep())),
        equivalent_to_identity: q.eqsim(&SuperOp::identity(d), eps),
        equivalent_to_zero: q.eqsim(&SuperOp::zero(d), eps),
        seconds: sig(start.elapsed().as_secs_f64()),
    };
    let show_matrix = args.show == Show::Matrix;
    Ok(Outcome {
        output: render(common.output, &report, |r| r.text(show_matrix)),
        status: 0,
    })
}

fn load_density(spec: &str, d: usize) -> Result<ComplexMatrix, CliError> {
    if spec == "maximally-mixed" {
        return Ok(maximally_mixed(d));
    }
    let text = read(std::path::Path::new(spec))?;
    let rows: Vec<Vec<Scalar>> = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{spec}: expected a JSON matrix of numbers or [re, im] pairs: {e}")))?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Usage(format!("{spec}: density matrix must be square")));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| rows[i][j].value()))
}

pub fn simulate(args: &SimulateArgs) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let common = &args.common;
    let eps = check_tol(common.tol.unwrap_or(DEFAULT_EPS))?;
    let model = load(common)?;
    let pf = bounded_formula(&args.path_formula, args.k)?;
    let s = state_index(&model, &args.state)?;
    let rho = load_density(&args.rho, model.dim())?;
    let seed = args.seed.unwrap_or_else(rand::random);
    let mut checker = Checker::new(&model).with_eps(eps);
    let est = estimate_prob(&mut checker, s, &rho, &pf, args.samples, seed)?;
    let report = SimulateReport {
        command: "simulate".into(),
        model: common.model.display().to_string(),
        path_formula: pf.to_string(),
        state: args.state.clone(),
        rho: args.rho.clone(),
        samples: est.samples,
        seed,
        successes: est.successes,
        estimate: sig(est.estimate),
        stderr: sig(est.stderr),
        seconds: sig(start.elapsed().as_secs_f64()),
    };
    Ok(Outcome {
        output: render(common.output, &report, SimulateReport::text),
        status: 0,
    })
}

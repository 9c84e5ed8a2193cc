//! One function per subcommand. Each returns a [`Record`]: the JSON result
//! and the same data as a fixed-header CSV table.

use cergm::exact::{enumerate_exact, feasible_edge_counts, window_error};
use cergm::nld::{
    cd1_terms, ergm_log_card_f, ergm_log_cards, ergm_profile, main1_constants, main1_terms,
};
use cergm::variational::{general_envelope, general_window_sups, special_envelope};
use cergm::{
    run_chain, solve_constrained_scalar, t_derivative_bounds, thermo_integrate, ConstraintSpec,
    Error, ExactOptions, ModelSpec, ScalarModel,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Command, RunConfig, ScanMethod, ScanParameter};
use crate::CliError;

pub const EXACT_HEADER: &[&str] = &[
    "n",
    "e",
    "t",
    "psi",
    "psi_cond",
    "graphs_total",
    "graphs_in_window",
];
pub const VARIATIONAL_HEADER: &[&str] = &[
    "n",
    "e",
    "t",
    "argmax_x",
    "value",
    "boundary_active",
    "envelope_lower",
    "envelope_upper",
];
pub const BOUNDS_HEADER: &[&str] = &[
    "n_vertices",
    "n_pairs",
    "t_prime",
    "delta",
    "epsilon",
    "k",
    "l",
    "complexity_term",
    "smoothness_term",
    "delta0",
    "eps0",
    "eta0",
    "log_card_f",
    "log_card_h",
    "upper_window",
    "lower_window",
];
pub const INTEGRATE_HEADER: &[&str] = &[
    "n",
    "e",
    "t",
    "nodes",
    "zero_point",
    "psi_estimate",
    "std_error",
];
pub const COMPARE_HEADER: &[&str] = &[
    "n",
    "e",
    "t",
    "exact",
    "variational",
    "argmax_x",
    "ti",
    "ti_std_error",
    "gap_variational_exact",
    "gap_ti_exact",
];
pub const SCAN_HEADER: &[&str] = &[
    "parameter",
    "value",
    "n",
    "e",
    "t",
    "zetas",
    "feasible",
    "exact",
    "variational",
    "argmax_x",
    "boundary_active",
];

/// Sample header: `sweep, edge_count, t_H1 … t_Hs, accept_rate,
/// window_reject_rate`.
pub fn sample_header(s: usize) -> Vec<String> {
    let mut h = vec!["sweep".to_string(), "edge_count".to_string()];
    h.extend((1..=s).map(|i| format!("t_H{i}")));
    h.push("accept_rate".into());
    h.push("window_reject_rate".into());
    h
}

#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub result: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

fn header(h: &[&str]) -> Vec<String> {
    h.iter().map(|s| s.to_string()).collect()
}

/// Shortest round-trip formatting; empty for missing values.
fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn window_of(model: &ModelSpec) -> (Option<f64>, Option<f64>) {
    model
        .constraint()
        .map_or((None, None), |w| (Some(w.e), Some(w.t)))
}

pub fn model_json(model: &ModelSpec) -> Value {
    let mut v = serde_json::to_value(model).expect("model serializes");
    v["b"] = json!(model.b());
    v
}

fn exact_options(cfg: &RunConfig) -> Result<ExactOptions, CliError> {
    match cfg.max_n {
        Some(m) => Ok(ExactOptions::with_max_n(m)),
        None => Ok(ExactOptions::from_env()?),
    }
}

fn require_window(model: &ModelSpec) -> Result<ConstraintSpec, CliError> {
    let w = *model
        .constraint()
        .ok_or_else(|| CliError::Config("this command needs model.e and model.t".into()))?;
    if feasible_edge_counts(model.n(), &w).is_empty() {
        return Err(window_error(model.n(), &w).into());
    }
    Ok(w)
}

pub fn dispatch(command: Command, cfg: &RunConfig, csv: bool) -> Result<Record, CliError> {
    if let Some(c) = cfg.command {
        if c != command {
            return Err(CliError::Config(format!(
                "config is for `{}` but `{}` was requested",
                c.name(),
                command.name()
            )));
        }
    }
    match command {
        Command::Exact => exact(cfg),
        Command::Variational => variational(cfg),
        Command::Bounds => bounds(cfg),
        Command::Sample => sample(cfg, csv),
        Command::Integrate => integrate(cfg),
        Command::Compare => compare(cfg),
        Command::Scan => scan(cfg),
    }
}

fn exact(cfg: &RunConfig) -> Result<Record, CliError> {
    let model = cfg.model()?;
    let window = match model.constraint() {
        Some(_) => Some(require_window(&model)?),
        None => None,
    };
    let table = enumerate_exact(&model, &[], &exact_options(cfg)?)?;
    let psi = table.psi(None)?;
    let psi_cond = window.as_ref().map(|w| table.psi(Some(w))).transpose()?;
    let counts = table.counts(window.as_ref());
    let window_json = window.map(|w| {
        json!({
            "e": w.e,
            "t": w.t,
            "lo": w.lo(),
            "hi": w.hi(),
            "feasible_edge_counts": feasible_edge_counts(model.n(), &w),
        })
    });
    let (e, t) = window_of(&model);
    Ok(Record {
        result: json!({
            "psi": psi,
            "psi_cond": psi_cond,
            "window": window_json,
            "counts": counts,
        }),
        header: header(EXACT_HEADER),
        rows: vec![vec![
            model.n().to_string(),
            num(e),
            num(t),
            num(Some(psi)),
            num(psi_cond),
            counts.total.to_string(),
            counts.in_window.to_string(),
        ]],
    })
}

fn variational(cfg: &RunConfig) -> Result<Record, CliError> {
    let model = cfg.constrained_model()?;
    let kappa = cfg.kappa()?;
    let w = *model.constraint().expect("constrained");
    let scalar = ScalarModel::from_model(&model);
    let solution = solve_constrained_scalar(&scalar, w.e, w.t)?;
    let k = &cfg.constants;
    let (envelope, general) = match kappa {
        Some(kappa) => {
            let env = special_envelope(solution.value, model.b(), model.n(), kappa, k.c, k.big_c)?;
            let general = match general_window_sups(&model, kappa, k.c) {
                Ok(sups) => {
                    let env = general_envelope(
                        sups.shrunken.value,
                        sups.enlarged.value,
                        model.b(),
                        model.n(),
                        kappa,
                        k.big_c,
                    )?;
                    json!({"windows": sups, "envelope": env})
                }
                Err(e @ (Error::UnsupportedModel(_) | Error::Infeasible { .. })) => {
                    json!({"unavailable": e.to_string()})
                }
                Err(e) => return Err(e.into()),
            };
            (Some(env), Some(general))
        }
        None => (None, None),
    };
    Ok(Record {
        result: json!({
            "solution": solution,
            "kappa": kappa,
            "special_envelope": envelope,
            "general": general,
        }),
        header: header(VARIATIONAL_HEADER),
        rows: vec![vec![
            model.n().to_string(),
            num(Some(w.e)),
            num(Some(w.t)),
            num(Some(solution.argmax_x)),
            num(Some(solution.value)),
            solution.boundary_active.to_string(),
            num(envelope.map(|e| e.lower)),
            num(envelope.map(|e| e.upper)),
        ]],
    })
}

fn bounds(cfg: &RunConfig) -> Result<Record, CliError> {
    let model = cfg.constrained_model()?;
    let kappa = cfg.kappa()?;
    let w = *model.constraint().expect("constrained");
    let nv = model.n();
    if nv < 2 {
        return Err(CliError::Config("bounds need model.n ≥ 2".into()));
    }
    let k = &cfg.constants;
    let profile = ergm_profile(&model)?;
    let n = profile.n() as f64;
    let nf = nv as f64;
    let b = model.b();
    let t_prime = w.t_prime(nv)?;
    let delta = match (cfg.bounds.delta, kappa) {
        (Some(d), _) => d,
        (None, Some(kappa)) => k.c * n.powf(-1.0 / (2.0 * kappa)),
        (None, None) => {
            return Err(CliError::Config("bounds need bounds.delta or kappa".into()));
        }
    };
    let epsilon = cfg
        .bounds
        .epsilon
        .unwrap_or_else(|| (b.powi(3) * nf.ln() / (delta.powi(3) * nf)).powf(0.2));
    let consts = main1_constants(&profile);
    let (log_f, log_h) = ergm_log_cards(
        &model,
        consts.k,
        delta,
        epsilon,
        k.covering_c,
        k.covering_big_c,
    )?;
    let main1 = main1_terms(&profile, t_prime, delta, epsilon, log_f, log_h)?;
    let cd1 = cd1_terms(
        &profile,
        epsilon,
        ergm_log_card_f(&model, epsilon, k.covering_c, k.covering_big_c)?,
    )?;
    let motif_bounds = model
        .motifs()
        .iter()
        .map(|m| t_derivative_bounds(m, nv, k.covering_c, k.covering_big_c))
        .collect::<cergm::Result<Vec<_>>>()?;
    let n2 = nf * nf;
    let lower_slack = (main1.eps0 * n + main1.eta0 * n + std::f64::consts::LN_2) / n2;
    Ok(Record {
        result: json!({
            "t_prime": t_prime,
            "delta": delta,
            "epsilon": epsilon,
            "main1": main1,
            "cd1": cd1,
            "motif_bounds": motif_bounds,
            "per_n2": {
                "complexity_term": main1.complexity_term / n2,
                "smoothness_term": main1.smoothness_term / n2,
                "lower_slack": lower_slack,
            },
        }),
        header: header(BOUNDS_HEADER),
        rows: vec![vec![
            nv.to_string(),
            profile.n().to_string(),
            num(Some(t_prime)),
            num(Some(delta)),
            num(Some(epsilon)),
            num(Some(main1.k)),
            num(Some(main1.l)),
            num(Some(main1.complexity_term)),
            num(Some(main1.smoothness_term)),
            num(Some(main1.delta0)),
            num(Some(main1.eps0)),
            num(Some(main1.eta0)),
            num(Some(main1.log_card_f)),
            num(Some(main1.log_card_h)),
            num(Some(main1.windows.upper)),
            num(Some(main1.windows.lower)),
        ]],
    })
}

fn sample(cfg: &RunConfig, csv: bool) -> Result<Record, CliError> {
    let model = cfg.constrained_model()?;
    require_window(&model)?;
    let chain = cergm::ChainConfig {
        record_trace: csv,
        ..cfg.chain_config()
    };
    let stats = run_chain(&model, &chain)?;
    let rows = stats
        .trace
        .iter()
        .map(|r| {
            let mut row = vec![r.sweep.to_string(), r.edge_count.to_string()];
            row.extend(r.densities.iter().map(|&d| num(Some(d))));
            row.push(num(Some(r.accept_rate)));
            row.push(num(Some(r.window_reject_rate)));
            row
        })
        .collect();
    Ok(Record {
        result: json!({"chain": chain, "stats": stats}),
        header: sample_header(model.motifs().len()),
        rows,
    })
}

fn integrate(cfg: &RunConfig) -> Result<Record, CliError> {
    let model = cfg.constrained_model()?;
    let w = require_window(&model)?;
    let chain = cfg.chain_config();
    let estimate = thermo_integrate(&model, &chain, cfg.nodes())?;
    Ok(Record {
        result: json!({"chain": chain, "estimate": estimate}),
        header: header(INTEGRATE_HEADER),
        rows: vec![vec![
            model.n().to_string(),
            num(Some(w.e)),
            num(Some(w.t)),
            estimate.quadrature_nodes.to_string(),
            num(Some(estimate.zero_point)),
            num(Some(estimate.psi_estimate)),
            num(Some(estimate.std_error)),
        ]],
    })
}

fn compare(cfg: &RunConfig) -> Result<Record, CliError> {
    let model = cfg.constrained_model()?;
    let w = require_window(&model)?;
    let opts = exact_options(cfg)?;
    let exact = if model.n() <= opts.max_n {
        Some(enumerate_exact(&model, &[], &opts)?.psi(Some(&w))?)
    } else {
        None
    };
    let solution = solve_constrained_scalar(&ScalarModel::from_model(&model), w.e, w.t)?;
    let ti = match cfg.chain {
        Some(_) => Some(thermo_integrate(&model, &cfg.chain_config(), cfg.nodes())?),
        None => None,
    };
    let ti_value = ti.as_ref().map(|t| t.psi_estimate);
    let gap_var = exact.map(|x| solution.value - x);
    let gap_ti = exact.zip(ti_value).map(|(x, v)| v - x);
    Ok(Record {
        result: json!({
            "exact": exact,
            "variational": solution,
            "ti": ti,
            "gaps": {
                "variational_minus_exact": gap_var,
                "ti_minus_exact": gap_ti,
                "variational_minus_ti": ti_value.map(|v| solution.value - v),
            },
        }),
        header: header(COMPARE_HEADER),
        rows: vec![vec![
            model.n().to_string(),
            num(Some(w.e)),
            num(Some(w.t)),
            num(exact),
            num(Some(solution.value)),
            num(Some(solution.argmax_x)),
            num(ti_value),
            num(ti.as_ref().map(|t| t.std_error)),
            num(gap_var),
            num(gap_ti),
        ]],
    })
}

struct ScanRow {
    value: f64,
    model: ModelSpec,
    feasible: bool,
    exact: Option<f64>,
    variational: Option<cergm::VariationalSolution>,
}

fn scan(cfg: &RunConfig) -> Result<Record, CliError> {
    let section = cfg
        .scan
        .as_ref()
        .ok_or_else(|| CliError::Config("scan needs a `scan` section".into()))?;
    let base = cfg.constrained_model()?;
    let param = section.parameter(base.motifs().len())?;
    let grid = section.grid()?;
    let opts = exact_options(cfg)?;
    let methods = &section.methods;
    let want_exact = methods.contains(&ScanMethod::Exact);
    if want_exact && base.n() > opts.max_n {
        return Err(CliError::Model(Error::Size {
            what: "N",
            value: base.n(),
            max: opts.max_n,
        }));
    }

    let point = |&value: &f64| -> Result<ScanRow, CliError> {
        let w = *base.constraint().expect("constrained");
        let model = match param {
            ScanParameter::E => base.clone().with_constraint(
                ConstraintSpec::new(value, w.t).map_err(|e| CliError::Config(e.to_string()))?,
            ),
            ScanParameter::T => base.clone().with_constraint(
                ConstraintSpec::new(w.e, value).map_err(|e| CliError::Config(e.to_string()))?,
            ),
            ScanParameter::Zeta(i) => {
                let mut z = base.zetas().to_vec();
                z[i] = value;
                base.with_zetas(z)
                    .map_err(|e| CliError::Config(e.to_string()))?
            }
        };
        let w = *model.constraint().expect("constrained");
        let feasible = !feasible_edge_counts(model.n(), &w).is_empty();
        let exact = if want_exact && feasible {
            Some(enumerate_exact(&model, &[], &opts)?.psi(Some(&w))?)
        } else {
            None
        };
        let variational = if methods.contains(&ScanMethod::Variational) {
            Some(solve_constrained_scalar(
                &ScalarModel::from_model(&model),
                w.e,
                w.t,
            )?)
        } else {
            None
        };
        Ok(ScanRow {
            value,
            model,
            feasible,
            exact,
            variational,
        })
    };
    let rows: Vec<ScanRow> = grid.par_iter().map(point).collect::<Result<_, _>>()?;

    let json_rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            let w = r.model.constraint().expect("constrained");
            json!({
                "value": r.value,
                "e": w.e,
                "t": w.t,
                "zetas": r.model.zetas(),
                "feasible": r.feasible,
                "exact": r.exact,
                "variational": r.variational,
            })
        })
        .collect();
    let csv_rows = rows
        .iter()
        .map(|r| {
            let w = r.model.constraint().expect("constrained");
            vec![
                section.parameter.clone(),
                num(Some(r.value)),
                r.model.n().to_string(),
                num(Some(w.e)),
                num(Some(w.t)),
                r.model
                    .zetas()
                    .iter()
                    .map(|z| num(Some(*z)))
                    .collect::<Vec<_>>()
                    .join(";"),
                r.feasible.to_string(),
                num(r.exact),
                num(r.variational.map(|v| v.value)),
                num(r.variational.map(|v| v.argmax_x)),
                r.variational
                    .map(|v| v.boundary_active.to_string())
                    .unwrap_or_default(),
            ]
        })
        .collect();
    Ok(Record {
        result: json!({
            "parameter": section.parameter,
            "methods": methods,
            "rows": json_rows,
        }),
        header: header(SCAN_HEADER),
        rows: csv_rows,
    })
}

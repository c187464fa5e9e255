use std::collections::BTreeMap;
use std::sync::Arc;

use compwb_core::error::Error;
use compwb_core::experiments::{
    bounded_derivative_chain, cauchy_derivative_bound, compactness_blowup, equicontinuity_constant,
    necessary_growth, negative_chain, nuclearity_sum, sufficient_condition_check,
};
use compwb_core::fdb::{compose_jet, identity_lah, identity_two_power, parse_rational, Jet};
use compwb_core::functions::{
    estimate_growth_exponent, seminorm_p_lambda, seminorm_pi, ModelFunction,
};
use compwb_core::report::{ChainReport, Param, Verdict, DEFAULT_THRESHOLD};
use compwb_core::sequences::{check_sequence_conditions, doubling_from_sequence, WeightSequence};
use compwb_core::weights::{
    check_weight_conditions, default_test_points, dilation_constant, ConjugateEvaluator,
    SearchBounds, Weight, WeightFunction,
};
use compwb_core::LogNum;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use serde_json::Value;

use crate::args::{Command, Experiment, Global, Method};
use crate::config::{default_grid, grid_or, parse_jet, parse_list, RunConfig};
use crate::output::{fmt_f64, to_value, Table};

/// Exit status of a finished computation.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// JSON summary, CSV table and pass flag of one run.
#[derive(Debug)]
pub struct Outcome {
    pub summary: Value,
    pub table: Table,
    pub passed: bool,
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Precondition(_) | Error::Regime(_) => EXIT_USAGE,
            _ => EXIT_FAIL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn parse<T: std::str::FromStr>(s: &str) -> Result<T, Failure>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>().map_err(|e| usage(e.to_string()))
}

fn required<'a>(field: &str, v: &'a Option<String>) -> Result<&'a str, Failure> {
    v.as_deref()
        .ok_or_else(|| usage(format!("{field}: missing spec")))
}

fn conj(w: WeightFunction) -> ConjugateEvaluator {
    ConjugateEvaluator::auto(w.into_arc())
}

/// Runs a validated configuration.
pub fn execute(cfg: &RunConfig) -> Result<Outcome, Failure> {
    let g = &cfg.global;
    let grid = match default_grid(&cfg.command) {
        Some(def) => Some(grid_or(g, def).map_err(usage)?),
        None => None,
    };
    match &cfg.command {
        Command::Conjugate {
            weight,
            s,
            lambda,
            method,
        } => {
            let w = parse::<WeightFunction>(required("--weight", weight)?)?.into_arc();
            conjugate(w, *s, *lambda, *method)
        }
        Command::WeightCheck { weight } => {
            let w = parse::<WeightFunction>(required("--weight", weight)?)?;
            let report =
                check_weight_conditions(&w, grid.as_ref().expect("grid"), SearchBounds::default());
            let rows = report.rows();
            let mut table = Table::new(&["condition", "witness", "grid", "verdict"]);
            for r in &rows {
                table.push(vec![
                    r.condition.clone(),
                    r.witness.map(fmt_f64).unwrap_or_default(),
                    r.grid.clone(),
                    r.verdict.to_string(),
                ]);
            }
            let passed = rows.iter().all(|r| r.verdict);
            Ok(Outcome {
                summary: summary("weight-check", &report, passed),
                table,
                passed,
            })
        }
        Command::SequenceCheck {
            sequence,
            pmax,
            jmax,
        } => {
            let m = parse::<WeightSequence>(required("--sequence", sequence)?)?;
            let g = match &g.grid {
                Some(s) => Some(parse::<compwb_core::Grid>(s)?),
                None => None,
            };
            let report = check_sequence_conditions(&m, *pmax, *jmax)?;
            let doubling = doubling_from_sequence(&m, g.as_ref());
            let rows = report.rows();
            let mut table = Table::new(&["condition", "witness", "grid", "verdict"]);
            for r in &rows {
                table.push(vec![
                    r.condition.clone(),
                    r.witness.map(fmt_f64).unwrap_or_default(),
                    r.grid.clone(),
                    r.verdict.to_string(),
                ]);
            }
            table.push(vec![
                "doubling".into(),
                doubling.h.map(|h| h.to_string()).unwrap_or_default(),
                g.map(|g| g.to_string()).unwrap_or_else(|| "default".into()),
                doubling.h.is_some().to_string(),
            ]);
            let passed = rows.iter().all(|r| r.verdict) && doubling.h.is_some();
            #[derive(Serialize)]
            struct Body<'a, R: Serialize> {
                conditions: &'a R,
                doubling: &'a compwb_core::sequences::SequenceDoubling,
            }
            Ok(Outcome {
                summary: summary(
                    "sequence-check",
                    &Body {
                        conditions: &report,
                        doubling: &doubling,
                    },
                    passed,
                ),
                table,
                passed,
            })
        }
        Command::Fdb {
            outer,
            inner,
            order,
            log,
        } => fdb(outer, inner, *order, *log),
        Command::Identities { jmax } => identities(*jmax),
        Command::Seminorm {
            function,
            weight,
            lambda,
            mu,
            j,
            k,
        } => {
            let f = parse::<ModelFunction>(required("--function", function)?)?;
            let c = conj(parse::<WeightFunction>(required("--weight", weight)?)?);
            let grid = grid.expect("grid");
            let r = match mu {
                Some(mu) => seminorm_pi(&f, *lambda, *mu, &c, &grid, *j)?,
                None => seminorm_p_lambda(&f, *lambda, &c, &grid, *j, *k)?,
            };
            let mut table = Table::new(&["sign", "log_abs", "enlarged_log_abs", "stable"]);
            table.push(vec![
                r.value.sign().to_string(),
                fmt_f64(r.value.log_abs()),
                fmt_f64(r.enlarged_value.log_abs()),
                r.stable.to_string(),
            ]);
            let passed = r.stable && !r.degenerate;
            Ok(Outcome {
                summary: summary("seminorm", &r, passed),
                table,
                passed,
            })
        }
        Command::EstimateIndex {
            function,
            x,
            jlo,
            jhi,
        } => {
            let f = parse::<ModelFunction>(required("--function", function)?)?;
            estimate_index(&f, x, *jlo, *jhi)
        }
        Command::Experiment { which } => {
            let report = experiment(which, g, grid)?;
            Ok(chain_outcome(&report))
        }
    }
}

/// `{kind, verdict: {passed}, report}` for the non-chain commands.
fn summary<T: Serialize + ?Sized>(kind: &str, report: &T, passed: bool) -> Value {
    #[derive(Serialize)]
    struct Summary<'a, T: Serialize + ?Sized> {
        command: &'a str,
        verdict: Pass,
        report: &'a T,
    }
    #[derive(Serialize)]
    struct Pass {
        passed: bool,
    }
    to_value(&Summary {
        command: kind,
        verdict: Pass { passed },
        report,
    })
}

fn conjugate(
    w: Arc<dyn Weight>,
    s: f64,
    lambda: Option<f64>,
    method: Method,
) -> Result<Outcome, Failure> {
    let c = match method {
        Method::Auto => ConjugateEvaluator::auto(w.clone()),
        Method::Numeric => ConjugateEvaluator::numeric(w.clone()),
    };
    let value = match lambda {
        Some(l) => c.scaled(l, s),
        None => c.eval(s),
    }
    .map_err(Error::from)?;
    #[derive(Serialize)]
    struct Body {
        weight: String,
        method: String,
        s: f64,
        lambda: Option<f64>,
        value: f64,
    }
    let method = format!("{:?}", c.method()).to_lowercase();
    let mut table = Table::new(&["weight", "method", "s", "lambda", "value"]);
    table.push(vec![
        w.label(),
        method.clone(),
        fmt_f64(s),
        lambda.map(fmt_f64).unwrap_or_default(),
        fmt_f64(value),
    ]);
    Ok(Outcome {
        summary: summary(
            "conjugate",
            &Body {
                weight: w.label(),
                method,
                s,
                lambda,
                value,
            },
            true,
        ),
        table,
        passed: true,
    })
}

fn fdb(outer: &str, inner: &str, order: Option<usize>, log: bool) -> Result<Outcome, Failure> {
    let o = parse_jet(outer).map_err(|e| usage(format!("--outer: {e}")))?;
    let i = parse_jet(inner).map_err(|e| usage(format!("--inner: {e}")))?;
    let order = order.unwrap_or((o.len() - 1).min(i.len() - 1));
    let inner = Jet::new(BigRational::zero(), i);
    let outer = Jet::new(inner.values[0].clone(), o);
    let composed = compose_jet(&outer, &inner, order).map_err(Error::from)?;
    let (summary_values, table) = if log {
        let vals: Vec<LogNum> = composed.values.iter().map(LogNum::from_ratio).collect();
        let mut t = Table::new(&["j", "sign", "log_abs"]);
        for (j, v) in vals.iter().enumerate() {
            t.push(vec![
                j.to_string(),
                v.sign().to_string(),
                fmt_f64(v.log_abs()),
            ]);
        }
        (to_value(&vals), t)
    } else {
        let vals: Vec<String> = composed.values.iter().map(|v| v.to_string()).collect();
        let mut t = Table::new(&["j", "value"]);
        for (j, v) in vals.iter().enumerate() {
            t.push(vec![j.to_string(), v.clone()]);
        }
        (to_value(&vals), t)
    };
    #[derive(Serialize)]
    struct Body {
        order: usize,
        values: Value,
    }
    Ok(Outcome {
        summary: summary(
            "fdb",
            &Body {
                order,
                values: summary_values,
            },
            true,
        ),
        table,
        passed: true,
    })
}

fn identities(jmax: usize) -> Result<Outcome, Failure> {
    #[derive(Serialize)]
    struct Row {
        identity: &'static str,
        j: usize,
        enumerated: String,
        closed_form: String,
        holds: bool,
    }
    let mut rows = Vec::with_capacity(2 * jmax);
    for j in 1..=jmax {
        for (name, r) in [
            ("two_power", identity_two_power(j)),
            ("lah", identity_lah(j)),
        ] {
            let r = r.map_err(Error::from)?;
            rows.push(Row {
                identity: name,
                j,
                holds: r.holds(),
                enumerated: r.enumerated.to_string(),
                closed_form: r.closed_form.to_string(),
            });
        }
    }
    let mut table = Table::new(&["identity", "j", "enumerated", "closed_form", "holds"]);
    for r in &rows {
        table.push(vec![
            r.identity.into(),
            r.j.to_string(),
            r.enumerated.clone(),
            r.closed_form.clone(),
            r.holds.to_string(),
        ]);
    }
    let passed = rows.iter().all(|r| r.holds);
    Ok(Outcome {
        summary: summary("identities", &rows, passed),
        table,
        passed,
    })
}

fn estimate_index(f: &ModelFunction, x: &str, jlo: usize, jhi: usize) -> Result<Outcome, Failure> {
    let xr = parse_rational(x).map_err(|e| usage(format!("--x: {e}")))?;
    let (jet, source) = match f.exact_jet(&xr, jhi) {
        Ok(j) => (j.to_lognum(), "exact"),
        Err(_) => {
            let xf = num_traits::ToPrimitive::to_f64(&xr).unwrap_or(f64::NAN);
            (f.jet(xf, jhi).map_err(Error::from)?, "float")
        }
    };
    let est = estimate_growth_exponent(&jet, jlo, jhi).map_err(Error::from)?;
    #[derive(Serialize)]
    struct Body<'a, E: Serialize> {
        function: String,
        x: &'a str,
        source: &'a str,
        estimate: &'a E,
    }
    let mut table = Table::new(&["j", "log_abs_derivative"]);
    for j in jlo..=jhi {
        table.push(vec![j.to_string(), fmt_f64(jet.values[j].log_abs())]);
    }
    Ok(Outcome {
        summary: summary(
            "estimate-index",
            &Body {
                function: f.to_string(),
                x,
                source,
                estimate: &est,
            },
            true,
        ),
        table,
        passed: true,
    })
}

fn experiment(
    e: &Experiment,
    g: &Global,
    grid: Option<compwb_core::Grid>,
) -> Result<ChainReport, Failure> {
    let threshold = g.threshold.unwrap_or(DEFAULT_THRESHOLD);
    let grid = || grid.clone().expect("experiment grid");
    Ok(match e {
        Experiment::Negative { d, k, dprime, jmax } => {
            negative_chain(*d, *k, *dprime, *jmax, threshold)?
        }
        Experiment::Bounded { d, psi, mmax } => {
            bounded_derivative_chain(*d, &parse(psi)?, *mmax, threshold)?
        }
        Experiment::Compactness {
            psi,
            x0,
            p,
            weight,
            nmax,
        } => compactness_blowup(
            &parse(psi)?,
            *x0,
            *p,
            &conj(parse(weight)?),
            *nmax,
            threshold,
        )?,
        Experiment::Sufficient {
            psi,
            weight,
            a,
            m,
            jmax,
        } => {
            let ms = parse_list::<u32>(m).map_err(|e| usage(format!("--m: {e}")))?;
            sufficient_condition_check(
                &parse(psi)?,
                &parse::<WeightFunction>(weight)?,
                *a,
                &ms,
                &grid(),
                *jmax,
            )?
            .to_chain()
        }
        Experiment::Necessary { psi, sigma, omega } => necessary_growth(
            &parse(psi)?,
            &parse::<WeightFunction>(sigma)?,
            &parse::<WeightFunction>(omega)?,
            &grid(),
        )?
        .to_chain(),
        Experiment::Nuclear { weight, m, l, jmax } => {
            let w = parse::<WeightFunction>(weight)?;
            let points = default_test_points();
            let l = match l {
                Some(l) => *l,
                None => dilation_constant(&w, &points, SearchBounds::default().l)
                    .witness
                    .ok_or_else(|| Failure {
                        code: EXIT_FAIL,
                        message: "no dilation constant found; pass --l".into(),
                    })?,
            };
            nuclearity_sum(&conj(w), *m, l, *jmax, &points)?
        }
        Experiment::Equicont {
            weight,
            xs,
            lambdas,
            count,
            n,
            k,
            jspot,
        } => {
            let list = |field: &str, v: &Option<String>| -> Result<Vec<f64>, Failure> {
                match v {
                    Some(s) => parse_list::<f64>(s).map_err(|e| usage(format!("{field}: {e}"))),
                    None => Ok((1..=*count).map(|j| j as f64).collect()),
                }
            };
            equicontinuity_constant(
                &list("--xs", xs)?,
                &list("--lambdas", lambdas)?,
                &conj(parse(weight)?),
                *n,
                *k,
                &grid(),
                *jspot,
            )?
        }
        Experiment::Cauchy { psi, delta, jmax } => {
            cauchy_derivative_bound(&parse(psi)?, *delta, &grid(), *jmax)?
        }
    })
}

/// JSON summary `{experiment, params, verdict, first_crossing_index, columns,
/// notes}` and the CSV table the `columns` manifest names.
pub fn chain_outcome(r: &ChainReport) -> Outcome {
    let mut columns = vec!["index".to_string()];
    columns.extend(r.columns.iter().cloned());
    columns.push("holds".into());
    let header: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new(&header);
    for row in &r.rows {
        let mut cells = vec![row.index.to_string()];
        cells.extend(row.values.iter().map(|&v| fmt_f64(v)));
        cells.push(row.holds().to_string());
        table.push(cells);
    }
    #[derive(Serialize)]
    struct Summary<'a> {
        experiment: &'a str,
        params: &'a BTreeMap<String, Param>,
        verdict: &'a Verdict,
        passed: bool,
        first_crossing_index: Option<u64>,
        columns: &'a [String],
        checks: Vec<String>,
        notes: &'a [String],
    }
    let passed = r.verdict.passed();
    Outcome {
        summary: to_value(&Summary {
            experiment: &r.experiment,
            params: &r.params,
            verdict: &r.verdict,
            passed,
            first_crossing_index: r.verdict.first_crossing_index,
            columns: &columns,
            checks: r.check_names(),
            notes: &r.notes,
        }),
        table,
        passed,
    }
}

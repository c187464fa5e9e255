use std::fmt;
use std::str::FromStr;

use compwb_core::fdb::parse_rational;
use compwb_core::functions::{ModelFunction, MAX_COMPOSED_ORDER};
use compwb_core::sequences::WeightSequence;
use compwb_core::weights::WeightFunction;
use compwb_core::Grid;
use num_rational::BigRational;

use crate::args::{Command, Experiment, Global};
use crate::output::{check_writable, parent_dir};

/// Largest exact order accepted by `fdb`; plans grow like the partition count.
pub const MAX_FDB_ORDER: usize = MAX_COMPOSED_ORDER;
/// Largest `j` of the identity checks.
pub const MAX_IDENTITY_J: usize = 30;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub global: Global,
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Default)]
struct Diags(Vec<Diagnostic>);

impl Diags {
    fn push(&mut self, field: &str, message: impl Into<String>) {
        self.0.push(Diagnostic {
            field: field.to_string(),
            message: message.into(),
        });
    }

    fn positive(&mut self, field: &str, v: f64) {
        if !(v > 0.0 && v.is_finite()) {
            self.push(field, format!("must be positive and finite, got {v}"));
        }
    }

    fn at_least(&mut self, field: &str, v: u64, lo: u64) {
        if v < lo {
            self.push(field, format!("must be at least {lo}, got {v}"));
        }
    }

    fn spec<T: FromStr>(&mut self, field: &str, what: &str, s: Option<&str>) -> Option<T>
    where
        T::Err: fmt::Display,
    {
        match s {
            None => {
                self.push(field, format!("missing {what} spec"));
                None
            }
            Some(s) => match s.parse::<T>() {
                Ok(v) => Some(v),
                Err(e) => {
                    self.push(field, e.to_string());
                    None
                }
            },
        }
    }
}

/// Comma-separated list of values.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|_| format!("cannot parse `{}`", p.trim()))
        })
        .collect()
}

/// JSON array of `"p/q"` strings (integers are accepted as numbers too).
pub fn parse_jet(s: &str) -> Result<Vec<BigRational>, String> {
    let v: serde_json::Value = serde_json::from_str(s).map_err(|e| e.to_string())?;
    let items = v
        .as_array()
        .ok_or_else(|| "expected a JSON array".to_string())?;
    if items.is_empty() {
        return Err("jet is empty".into());
    }
    items
        .iter()
        .map(|item| match item {
            serde_json::Value::String(s) => parse_rational(s).map_err(|e| e.to_string()),
            serde_json::Value::Number(n) => {
                parse_rational(&n.to_string()).map_err(|e| e.to_string())
            }
            other => Err(format!("`{other}` is not a rational")),
        })
        .collect()
}

/// Grid given by `--grid`, or the command default.
pub fn grid_or(global: &Global, default: &str) -> Result<Grid, String> {
    global
        .grid
        .as_deref()
        .unwrap_or(default)
        .parse::<Grid>()
        .map_err(|e| e.to_string())
}

/// Default grid of each command that samples one.
pub fn default_grid(cmd: &Command) -> Option<&'static str> {
    match cmd {
        Command::WeightCheck { .. } => Some("log:1e-2,1e8,2000"),
        Command::Seminorm { .. } => Some("sym:5,0.125"),
        Command::Experiment { which } => match which {
            Experiment::Sufficient { .. } | Experiment::Equicont { .. } => Some("sym:6,0.125"),
            Experiment::Necessary { .. } => Some("log:1e-3,1e3,4001"),
            Experiment::Cauchy { .. } => Some("lin:1,20,191"),
            _ => None,
        },
        _ => None,
    }
}

/// Empty iff `run` would not exit with status 2 on configuration grounds.
pub fn validate_config(cfg: &RunConfig) -> Vec<Diagnostic> {
    let mut d = Diags::default();
    let g = &cfg.global;
    if let Some(t) = g.threads {
        d.at_least("--threads", t as u64, 1);
    }
    if let Some(t) = g.threshold {
        if !(t > 1.0 && t.is_finite()) {
            d.push(
                "--threshold",
                format!("must be finite and exceed 1, got {t}"),
            );
        }
    }
    match default_grid(&cfg.command) {
        Some(def) => {
            if let Err(e) = grid_or(g, def) {
                d.push("--grid", e);
            }
        }
        None => {
            if let (Some(_), Command::SequenceCheck { .. }) = (&g.grid, &cfg.command) {
                if let Err(e) = grid_or(g, "") {
                    d.push("--grid", e);
                }
            }
        }
    }
    if let Some(out) = &g.out {
        if out.is_dir() {
            d.push("--out", format!("{} is a directory", out.display()));
        } else if let Err(e) = check_writable(&parent_dir(out)) {
            d.push(
                "--out",
                format!("cannot write to {}: {e}", parent_dir(out).display()),
            );
        }
    }
    validate_command(&cfg.command, &mut d);
    d.0
}

fn validate_command(cmd: &Command, d: &mut Diags) {
    match cmd {
        Command::Conjugate {
            weight, s, lambda, ..
        } => {
            d.spec::<WeightFunction>("--weight", "weight", weight.as_deref());
            if !(*s >= 0.0 && s.is_finite()) {
                d.push("--s", format!("must be nonnegative and finite, got {s}"));
            }
            if let Some(l) = lambda {
                d.positive("--lambda", *l);
            }
        }
        Command::WeightCheck { weight } => {
            d.spec::<WeightFunction>("--weight", "weight", weight.as_deref());
        }
        Command::SequenceCheck {
            sequence,
            pmax,
            jmax,
        } => {
            d.spec::<WeightSequence>("--sequence", "sequence", sequence.as_deref());
            d.at_least("--pmax", *pmax as u64, 50);
            d.at_least("--jmax", *jmax as u64, 10 * *pmax as u64);
        }
        Command::Fdb {
            outer,
            inner,
            order,
            ..
        } => {
            let o = parse_jet(outer).map_err(|e| d.push("--outer", e)).ok();
            let i = parse_jet(inner).map_err(|e| d.push("--inner", e)).ok();
            if let (Some(o), Some(i)) = (o, i) {
                let have = (o.len() - 1).min(i.len() - 1);
                let want = order.unwrap_or(have);
                if want > have {
                    d.push(
                        "--order",
                        format!("jets supply derivatives up to order {have}, got {want}"),
                    );
                } else if want > MAX_FDB_ORDER {
                    d.push("--order", format!("must not exceed {MAX_FDB_ORDER}"));
                }
            }
        }
        Command::Identities { jmax } => {
            if !(1..=MAX_IDENTITY_J).contains(jmax) {
                d.push(
                    "--jmax",
                    format!("must lie in 1..={MAX_IDENTITY_J}, got {jmax}"),
                );
            }
        }
        Command::Seminorm {
            function,
            weight,
            lambda,
            mu,
            j,
            k,
        } => {
            let f = d.spec::<ModelFunction>("--function", "function", function.as_deref());
            d.spec::<WeightFunction>("--weight", "weight", weight.as_deref());
            d.positive("--lambda", *lambda);
            if let Some(m) = mu {
                d.positive("--mu", *m);
            }
            if let Some(f) = f {
                if *j > f.max_order() {
                    d.push(
                        "--j",
                        format!("{} supports orders up to {}", f, f.max_order()),
                    );
                }
            }
            if j + k > 200 {
                d.push("--k", format!("J + K must not exceed 200, got {}", j + k));
            }
        }
        Command::EstimateIndex {
            function,
            x,
            jlo,
            jhi,
        } => {
            let f = d.spec::<ModelFunction>("--function", "function", function.as_deref());
            if let Err(e) = parse_rational(x) {
                d.push("--x", e.to_string());
            }
            d.at_least("--jlo", *jlo as u64, 1);
            if *jhi < jlo + 7 {
                d.push(
                    "--jhi",
                    format!("need at least 8 orders, got {jlo}..={jhi}"),
                );
            }
            if let Some(f) = f {
                if *jhi > f.max_exact_order() {
                    d.push(
                        "--jhi",
                        format!("{f} supports orders up to {}", f.max_exact_order()),
                    );
                }
            }
        }
        Command::Experiment { which } => validate_experiment(which, d),
    }
}

fn validate_experiment(e: &Experiment, d: &mut Diags) {
    match e {
        Experiment::Negative {
            d: dd,
            k,
            dprime,
            jmax,
        } => {
            d.positive("--d", *dd);
            d.positive("--k", *k);
            d.positive("--dprime", *dprime);
            d.at_least("--jmax", *jmax, 1);
            let upper = (k + 1.0) * dd;
            if *dprime >= upper {
                d.push(
                    "--dprime",
                    format!("regime: d' must be < (k+1)d = {upper}, got {dprime}"),
                );
            } else if dprime < dd {
                d.push(
                    "--dprime",
                    format!("regime: d' must be >= d = {dd}, got {dprime}"),
                );
            }
        }
        Experiment::Bounded { d: dd, psi, mmax } => {
            d.positive("--d", *dd);
            d.spec::<ModelFunction>("--psi", "function", Some(psi));
            d.at_least("--mmax", *mmax as u64, 1);
        }
        Experiment::Compactness {
            psi,
            x0,
            p,
            weight,
            nmax,
        } => {
            d.spec::<ModelFunction>("--psi", "function", Some(psi));
            d.spec::<WeightFunction>("--weight", "weight", Some(weight));
            if !x0.is_finite() {
                d.push("--x0", "must be finite");
            }
            d.at_least("--p", *p as u64, 1);
            d.at_least("--nmax", *nmax as u64, 1);
            if *nmax > MAX_FDB_ORDER {
                d.push("--nmax", format!("must not exceed {MAX_FDB_ORDER}"));
            }
        }
        Experiment::Sufficient {
            psi,
            weight,
            a,
            m,
            jmax,
        } => {
            d.spec::<ModelFunction>("--psi", "function", Some(psi));
            d.spec::<WeightFunction>("--weight", "weight", Some(weight));
            d.positive("--a", *a);
            match parse_list::<u32>(m) {
                Ok(ms) if ms.iter().all(|&v| v >= 1) => {}
                Ok(_) => d.push("--m", "entries must be at least 1"),
                Err(e) => d.push("--m", e),
            }
            d.at_least("--jmax", *jmax as u64, 1);
        }
        Experiment::Necessary { psi, sigma, omega } => {
            d.spec::<ModelFunction>("--psi", "function", Some(psi));
            d.spec::<WeightFunction>("--sigma", "weight", Some(sigma));
            d.spec::<WeightFunction>("--omega", "weight", Some(omega));
        }
        Experiment::Nuclear { weight, m, l, .. } => {
            d.spec::<WeightFunction>("--weight", "weight", Some(weight));
            d.at_least("--m", *m as u64, 1);
            if let Some(l) = l {
                d.at_least("--l", *l, 1);
            }
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
            d.spec::<WeightFunction>("--weight", "weight", Some(weight));
            d.at_least("--count", *count as u64, 1);
            d.at_least("--n", *n as u64, 1);
            d.at_least("--k", *k as u64, 1);
            d.at_least("--jspot", *jspot as u64, 1);
            let mut lens = Vec::new();
            for (field, list) in [("--xs", xs), ("--lambdas", lambdas)] {
                let Some(list) = list else {
                    lens.push(*count);
                    continue;
                };
                match parse_list::<f64>(list) {
                    Ok(v) if v.iter().all(|x| *x > 0.0 && x.is_finite()) => lens.push(v.len()),
                    Ok(_) => d.push(field, "entries must be positive and finite"),
                    Err(e) => d.push(field, e),
                }
            }
            if lens.len() == 2 && lens[0] != lens[1] {
                d.push(
                    "--lambdas",
                    format!(
                        "length {} differs from the x list length {}",
                        lens[1], lens[0]
                    ),
                );
            }
        }
        Experiment::Cauchy { psi, delta, jmax } => {
            d.spec::<ModelFunction>("--psi", "function", Some(psi));
            d.positive("--delta", *delta);
            d.at_least("--jmax", *jmax as u64, 1);
        }
    }
}

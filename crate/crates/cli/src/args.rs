use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Weights, conjugates, Faà di Bruno and inequality-chain experiments.
///
/// Exit status: 0 when every verdict passes, 1 on a violated inequality or a
/// divergence that was not reached, 2 on usage or configuration errors.
#[derive(Debug, Parser)]
#[command(name = "compwb", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Output path; CSV goes to `<out>.csv`, the JSON summary to `<out>.json`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    pub format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// `log:lo,hi,n`, `lin:lo,hi,n` or `sym:radius,step`.
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// Divergence threshold in linear scale.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        self != Format::Csv
    }
    pub fn csv(self) -> bool {
        self != Format::Json
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Auto,
    Numeric,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Young conjugate `φ*(s)`, or `λφ*(s/λ)` with `--lambda`.
    Conjugate {
        #[arg(long)]
        weight: Option<String>,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Weight conditions, doubling and dilation constants on the grid.
    WeightCheck {
        #[arg(long)]
        weight: Option<String>,
    },
    /// Sequence conditions, Petzsche liminf and doubling constant.
    SequenceCheck {
        #[arg(long)]
        sequence: Option<String>,
        #[arg(long, default_value_t = 200)]
        pmax: usize,
        /// Truncation index of the series sums.
        #[arg(long, default_value_t = 4000)]
        jmax: usize,
    },
    /// Faà di Bruno composition of two jets given as JSON arrays of `"p/q"`.
    Fdb {
        /// Derivatives of the outer function at the inner base value.
        #[arg(long)]
        outer: String,
        /// Inner base value followed by its derivatives of order 1, 2, ...
        #[arg(long)]
        inner: String,
        #[arg(long)]
        order: Option<usize>,
        /// Emit `{sign, log_abs}` instead of exact rationals.
        #[arg(long)]
        log: bool,
    },
    /// Multinomial sum identities for `1 <= j <= jmax`.
    Identities {
        #[arg(long, default_value_t = 25)]
        jmax: usize,
    },
    /// `p_λ` seminorm, or `π_{λ,μ}` when `--mu` is given.
    Seminorm {
        #[arg(long)]
        function: Option<String>,
        #[arg(long)]
        weight: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long, default_value_t = 20)]
        j: usize,
        #[arg(long, default_value_t = 20)]
        k: usize,
    },
    /// Growth exponent `s` in `log|f^(j)(x)| ~ s j log j + c j`.
    EstimateIndex {
        #[arg(long)]
        function: Option<String>,
        /// Rational point, `p/q` or decimal integer.
        #[arg(long, default_value = "0")]
        x: String,
        #[arg(long, default_value_t = 1)]
        jlo: usize,
        #[arg(long, default_value_t = 80)]
        jhi: usize,
    },
    /// Inequality-chain experiments.
    Experiment {
        #[command(subcommand)]
        which: Experiment,
    },
}

#[derive(Debug, Clone, Subcommand)]
pub enum Experiment {
    /// Block construction for a non-embedding composition.
    Negative {
        #[arg(long, default_value_t = 2.0)]
        d: f64,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, default_value_t = 3.5)]
        dprime: f64,
        #[arg(long, default_value_t = 400)]
        jmax: u64,
    },
    /// Bounded-derivative chain for a polynomial-type `ψ`.
    Bounded {
        #[arg(long, default_value_t = 2.0)]
        d: f64,
        #[arg(long, default_value = "poly:0,0,0,1")]
        psi: String,
        #[arg(long, default_value_t = 12)]
        mmax: u32,
    },
    /// Blow-up of single-order jets composed with `ψ`.
    Compactness {
        #[arg(long, default_value = "poly:0,2,0,1")]
        psi: String,
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
        #[arg(long, default_value_t = 1)]
        p: u32,
        #[arg(long, default_value = "gevrey:d=2")]
        weight: String,
        #[arg(long, default_value_t = 24)]
        nmax: usize,
    },
    /// Constants `C_m` of the sufficient condition.
    Sufficient {
        #[arg(long, default_value = "poly:0,0,1")]
        psi: String,
        #[arg(long, default_value = "gevrey:d=2")]
        weight: String,
        #[arg(long, default_value_t = 1.5)]
        a: f64,
        /// Comma-separated list.
        #[arg(long, default_value = "1,2,4")]
        m: String,
        #[arg(long, default_value_t = 15)]
        jmax: usize,
    },
    /// `sup σ(x) / (1 + ω(ψ(x)))` on the grid.
    Necessary {
        #[arg(long, default_value = "poly:0,0,1")]
        psi: String,
        #[arg(long, default_value = "gevrey:d=2")]
        sigma: String,
        #[arg(long, default_value = "gevrey:d=2")]
        omega: String,
    },
    /// Partial sums of conjugate-scale ratios.
    Nuclear {
        #[arg(long, default_value = "gevrey:d=2")]
        weight: String,
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Dilation constant; searched when omitted.
        #[arg(long)]
        l: Option<u64>,
        #[arg(long, default_value_t = 50)]
        jmax: u64,
    },
    /// Constant of the scaled-translation family.
    Equicont {
        #[arg(long, default_value = "gevrey:d=2")]
        weight: String,
        /// Comma-separated `x_j`; default `1..=count`.
        #[arg(long)]
        xs: Option<String>,
        /// Comma-separated `λ_j`; default `1..=count`.
        #[arg(long)]
        lambdas: Option<String>,
        #[arg(long, default_value_t = 40)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// `m = K n`.
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value_t = 12)]
        jspot: usize,
    },
    /// Cauchy-estimate constant for analytic `ψ`.
    Cauchy {
        #[arg(long, default_value = "sqrt1px2")]
        psi: String,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long, default_value_t = 20)]
        jmax: usize,
    },
}

//! Command-line arguments and the key-value config file.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::grid::Grid;

#[derive(Parser, Debug)]
#[command(name = "opens", version, about = "Entanglement in observable-projected ensembles: field theory, lattice and exact diagonalization")]
#[command(args_override_self = true, arg_required_else_help = true, propagate_version = true)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Worker threads for independent sweep points.
    #[arg(long, global = true, env = "OPENS_JOBS")]
    pub jobs: Option<usize>,
    /// `key = value` file of flags, applied before the command line.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    Csv,
    Json,
}

/// Interval geometry `A = [0, L]`, `B = [a, b]`; `a = L + d` and `b = a + ℓ₂` when given as lengths.
#[derive(Args, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GeomArgs {
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub l: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    /// Gap between A and B.
    #[arg(long)]
    pub d: Option<f64>,
    /// Length of B, as a grid.
    #[arg(long)]
    pub l2: Option<Grid>,
    /// Field-theory cutoff ε.
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct QuadArgs {
    /// Point-splitting ε of the operator correlators.
    #[arg(long, default_value_t = 1e-3)]
    pub eps_reg: f64,
    /// Absolute and relative quadrature tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Integrate the regularized kernel directly instead of subtracting the flat piece.
    #[arg(long)]
    pub no_subtraction: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct OperatorArgs {
    /// `scalar:h`, `vector:h` or `boson:K`.
    #[arg(long, default_value = "scalar:0.25")]
    pub spec: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub geom: GeomArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct LatticeArgs {
    /// `xx`, `ising` or `kappa,h`.
    #[arg(long, default_value = "xx")]
    pub model: String,
    #[arg(long, default_value_t = 10)]
    pub l1: usize,
    #[arg(long, default_value_t = 10)]
    pub d: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteArg {
    Auto,
    U1,
    Nambu,
    NambuRe,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompareArg {
    None,
    Cft,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RescalingArg {
    OverPi,
    Plain,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case", rename_all_fields = "kebab-case")]
pub enum Command {
    /// Compact-boson charged moments `Z_n(γ)/Z_n` along ℓ₂.
    BosonMoments {
        #[command(flatten)]
        #[serde(flatten)]
        geom: GeomArgs,
        /// Luttinger parameter.
        #[arg(long = "K", default_value_t = 1.0)]
        #[serde(rename = "K")]
        k: f64,
        /// One flux per replica; `n` is the number of entries.
        #[arg(long, default_value = "0.3,0.7")]
        gamma: Grid,
    },
    /// Rényi ratio and measurement-induced entanglement of the compact boson.
    BosonMie {
        #[command(flatten)]
        #[serde(flatten)]
        geom: GeomArgs,
        #[arg(long, default_value = "2:8")]
        n: Grid,
    },
    /// Holevo χ continued to n → 1 with its closed approximations.
    BosonHolevo {
        #[command(flatten)]
        #[serde(flatten)]
        geom: GeomArgs,
        #[arg(long, default_value_t = 8)]
        nmax: usize,
    },
    /// Holevo χ after a time t.
    BosonTime {
        #[command(flatten)]
        #[serde(flatten)]
        geom: GeomArgs,
        #[arg(long, default_value = "100:100000:log")]
        t: Grid,
        #[arg(long, default_value_t = 1e-3)]
        eps_prime: f64,
        #[arg(long, default_value_t = 8)]
        nmax: usize,
    },
    /// `C_n = v M⁻¹ vᵀ` against n with the residual from a straight line.
    CnTable {
        #[command(flatten)]
        #[serde(flatten)]
        op: OperatorArgs,
        #[arg(long, default_value = "1:10")]
        n: Grid,
    },
    /// Entries of the replica matrix M.
    OperatorM {
        #[command(flatten)]
        #[serde(flatten)]
        op: OperatorArgs,
        #[arg(long, default_value = "2")]
        n: Grid,
    },
    /// Measurement-induced entanglement for a Gaussian observable.
    OperatorMie {
        #[command(flatten)]
        #[serde(flatten)]
        op: OperatorArgs,
        #[arg(long, default_value = "2:6")]
        n: Grid,
    },
    /// Overlap generating function and its UV-finite ratio.
    Overlap {
        #[command(flatten)]
        #[serde(flatten)]
        op: OperatorArgs,
        #[arg(long, default_value = "0.4")]
        gamma1: Grid,
        #[arg(long, default_value = "0.6")]
        gamma2: Grid,
    },
    /// Averaged purity over measurement outcomes.
    AveragedPurity {
        #[command(flatten)]
        #[serde(flatten)]
        op: OperatorArgs,
        #[arg(long, default_value = "0:1:5")]
        gamma: Grid,
    },
    /// Sensitivity of normalized and raw observables to halving the point splitting.
    UvCheck {
        /// Comma-separated specs.
        #[arg(long, default_value = "scalar:0.75,scalar:1")]
        specs: String,
        #[command(flatten)]
        #[serde(flatten)]
        geom: GeomArgs,
        #[command(flatten)]
        #[serde(flatten)]
        quad: QuadArgs,
        #[arg(long, default_value_t = 0.4)]
        gamma1: f64,
        #[arg(long, default_value_t = 0.6)]
        gamma2: f64,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        /// Small flux for the unnormalized numerators.
        #[arg(long, default_value_t = 0.02)]
        gamma_raw: f64,
    },
    /// Lattice charged moments along ℓ₂, optionally against field theory.
    LatticeMoments {
        #[command(flatten)]
        #[serde(flatten)]
        lat: LatticeArgs,
        #[arg(long, default_value = "10:200")]
        l2: Grid,
        #[arg(long, default_value = "0.3,0.7")]
        gamma: Grid,
        #[arg(long, value_enum, default_value_t = RouteArg::Auto)]
        route: RouteArg,
        /// Total sites of an open chain holding the window; infinite chain when absent.
        #[arg(long)]
        sites: Option<usize>,
        #[arg(long, value_enum, default_value_t = CompareArg::None)]
        compare: CompareArg,
        /// Cutoff of the boson prediction for the hopping chain.
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// Flux rescaling of the Ising comparison.
        #[arg(long, value_enum, default_value_t = RescalingArg::OverPi)]
        rescaling: RescalingArg,
        #[command(flatten)]
        #[serde(flatten)]
        quad: QuadArgs,
    },
    /// Charge probabilities, post-measurement overlaps and resolved entropies on the lattice.
    LatticeOverlap {
        #[command(flatten)]
        #[serde(flatten)]
        lat: LatticeArgs,
        #[arg(long, default_value_t = 10)]
        l2: usize,
        /// Rényi index of the resolved entropies.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        sites: Option<usize>,
    },
    /// Gaussian-determinant route against exact diagonalization on a short chain.
    EdVerify {
        #[arg(long, default_value = "xx")]
        model: String,
        #[arg(long, default_value_t = 8)]
        sites: usize,
        #[arg(long, default_value_t = 3)]
        l1: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 3)]
        l2: usize,
        #[arg(long, default_value = "1:3")]
        n: Grid,
        #[arg(long, default_value = "-2.8:2.8:8")]
        gamma: Grid,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

impl Command {
    pub fn name(&self) -> String {
        let v = serde_json::to_value(self).expect("command serializes");
        match v {
            serde_json::Value::Object(m) => m.keys().next().cloned().unwrap_or_default(),
            serde_json::Value::String(s) => s,
            _ => String::new(),
        }
    }

    /// Flag values as sorted `key = value` pairs, for the provenance block.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        if let serde_json::Value::Object(m) = serde_json::to_value(self).expect("command serializes") {
            for (_, fields) in m {
                flatten("", &fields, &mut out);
            }
        }
        out
    }
}

fn flatten(prefix: &str, v: &serde_json::Value, out: &mut BTreeMap<String, String>) {
    match v {
        serde_json::Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        serde_json::Value::Null => {}
        serde_json::Value::String(s) => {
            out.insert(prefix.to_string(), s.clone());
        }
        other => {
            out.insert(prefix.to_string(), other.to_string());
        }
    }
}

/// Names of all commands, used to locate the command in the argument list.
pub fn command_names() -> Vec<String> {
    use clap::CommandFactory;
    Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect()
}

/// Parse a `key = value` config file into flags. `#` starts a comment; `command = x`
/// names the command; `true`/`false` values toggle switches.
pub fn config_flags(text: &str) -> Result<(Option<String>, Vec<String>), String> {
    let mut command = None;
    let mut flags = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
        let (k, v) = (k.trim().trim_start_matches("--"), v.trim());
        if k.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        match (k, v) {
            ("command", _) => command = Some(v.to_string()),
            (_, "true") => flags.push(format!("--{k}")),
            (_, "false") => {}
            _ => flags.push(format!("--{k}={v}")),
        }
    }
    Ok((command, flags))
}

/// Splice config-file flags in front of the command-line flags so the latter win.
pub fn merge_config(argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else if a == "--config" {
            path = argv.get(i + 1).cloned();
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let (file_command, flags) = config_flags(&text)?;
    let names = command_names();
    let pos = argv.iter().skip(1).position(|a| names.contains(a)).map(|p| p + 1);
    let mut out = vec![argv.first().cloned().unwrap_or_else(|| "opens".into())];
    let rest: Vec<String> = match (pos, file_command) {
        (Some(p), _) => {
            out.push(argv[p].clone());
            argv.iter().enumerate().skip(1).filter(|(i, _)| *i != p).map(|(_, a)| a.clone()).collect()
        }
        (None, Some(c)) => {
            out.push(c);
            argv[1..].to_vec()
        }
        (None, None) => return Err("config file names no command and none was given".into()),
    };
    out.extend(flags);
    out.extend(rest);
    Ok(out)
}

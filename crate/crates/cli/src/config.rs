//! Run configuration: command-line flags, `--config` files and the
//! `key=value` grammar for weights, ψ functions and test functions.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use hardy_core::norms::{PGrid, PsiSpec, Spacing};
use hardy_core::radialfn::RadialFunction;
use hardy_core::verify::{Operator, DEFAULT_EPS_SCHEDULE};
use hardy_core::weights::{SlowlyVarying, WeightSpec};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Theta,
    Zeta,
    Norm,
    Gls,
    VerifyBound,
    Sharpness,
    GlsCheck,
    AnisoCheck,
    Asymptotics,
    ReportAll,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Theta => "theta",
            Command::Zeta => "zeta",
            Command::Norm => "norm",
            Command::Gls => "gls",
            Command::VerifyBound => "verify-bound",
            Command::Sharpness => "sharpness",
            Command::GlsCheck => "gls-check",
            Command::AnisoCheck => "aniso-check",
            Command::Asymptotics => "asymptotics",
            Command::ReportAll => "report-all",
        }
    }

    fn parse(s: &str) -> Result<Self, CliError> {
        <Command as ValueEnum>::from_str(s, false).map_err(|_| CliError::config(format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    fn parse(s: &str) -> Result<Self, CliError> {
        <Format as ValueEnum>::from_str(s, false).map_err(|_| CliError::config(format!("unknown format `{s}` (csv, json)")))
    }
}

/// Command-line flags. Every flag except `--config` may also appear in the
/// config file as `name = value`; flags given on the command line win.
#[derive(Debug, Clone, Default, Parser)]
#[command(name = "hardy", version, about = "Weighted Hardy operators and Grand Lebesgue Space norms")]
pub struct Args {
    /// Command to run (may be set in the config file instead)
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Config file: one `name = value` directive per line, `#` comments
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Weight, e.g. "kind=beta alpha=2 beta=1"
    #[arg(long)]
    pub weight: Option<String>,
    /// ψ function, e.g. "psi=power a=0.5 A=2 B=20"; repeat once per axis for aniso-check
    #[arg(long)]
    pub psi: Vec<String>,
    /// Test function, e.g. "fn=extremal p=2 eps=0.1"; repeat once per axis for aniso-check
    #[arg(long = "function")]
    pub function: Vec<String>,
    /// Dimension d
    #[arg(long)]
    pub d: Option<usize>,
    /// Per-axis dimensions for aniso-check, comma separated
    #[arg(long)]
    pub dims: Option<String>,
    /// A single exponent p
    #[arg(long)]
    pub p: Option<f64>,
    /// Exponent grid lo:hi:n[:log|lin]
    #[arg(long = "p-grid")]
    pub p_grid: Option<String>,
    /// ε schedule for sharpness, comma separated
    #[arg(long)]
    pub eps: Option<String>,
    /// Operator for verify-bound and gls-check: U, V or H
    #[arg(long)]
    pub operator: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (standard output when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Golden-section tolerance for refining a sup over p
    #[arg(long = "refine-tol")]
    pub refine_tol: Option<f64>,
    /// Relative inset of default grids from the ends of a ψ support
    #[arg(long = "grid-margin")]
    pub grid_margin: Option<f64>,
    /// Number of points of default grids
    #[arg(long = "grid-points")]
    pub grid_points: Option<usize>,
}

const FILE_KEYS: [&str; 15] = [
    "command",
    "weight",
    "psi",
    "function",
    "d",
    "dims",
    "p",
    "p-grid",
    "eps",
    "operator",
    "format",
    "out",
    "refine-tol",
    "grid-margin",
    "grid-points",
];

/// Reads `name = value` directives. `psi` and `function` may repeat.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, Vec<String>>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, Vec<String>>, CliError> {
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::config(format!("config line {}: expected `name = value`", i + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if !FILE_KEYS.contains(&key.as_str()) {
            return Err(CliError::config(format!("config line {}: unknown directive `{key}`", i + 1)));
        }
        let values = out.entry(key.clone()).or_default();
        if !values.is_empty() && key != "psi" && key != "function" {
            return Err(CliError::config(format!("config line {}: `{key}` given twice", i + 1)));
        }
        values.push(value.trim().to_string());
    }
    Ok(out)
}

impl Args {
    /// Fills flags missing on the command line from config directives.
    pub fn merge_file(mut self, file: &BTreeMap<String, Vec<String>>) -> Result<Self, CliError> {
        let one = |k: &str| file.get(k).and_then(|v| v.first()).cloned();
        let num = |k: &str| -> Result<Option<f64>, CliError> { one(k).map(|s| parse_f64(k, &s)).transpose() };
        let int = |k: &str| -> Result<Option<usize>, CliError> { one(k).map(|s| parse_usize(k, &s)).transpose() };
        if self.command.is_none() {
            self.command = one("command").map(|s| Command::parse(&s)).transpose()?;
        }
        self.weight = self.weight.or(one("weight"));
        if self.psi.is_empty() {
            self.psi = file.get("psi").cloned().unwrap_or_default();
        }
        if self.function.is_empty() {
            self.function = file.get("function").cloned().unwrap_or_default();
        }
        self.d = match self.d {
            Some(d) => Some(d),
            None => int("d")?,
        };
        self.dims = self.dims.or(one("dims"));
        self.p = match self.p {
            Some(p) => Some(p),
            None => num("p")?,
        };
        self.p_grid = self.p_grid.or(one("p-grid"));
        self.eps = self.eps.or(one("eps"));
        self.operator = self.operator.or(one("operator"));
        if self.format.is_none() {
            self.format = one("format").map(|s| Format::parse(&s)).transpose()?;
        }
        self.out = self.out.or(one("out").map(PathBuf::from));
        self.refine_tol = match self.refine_tol {
            Some(t) => Some(t),
            None => num("refine-tol")?,
        };
        self.grid_margin = match self.grid_margin {
            Some(t) => Some(t),
            None => num("grid-margin")?,
        };
        self.grid_points = match self.grid_points {
            Some(n) => Some(n),
            None => int("grid-points")?,
        };
        Ok(self)
    }
}

fn parse_f64(key: &str, s: &str) -> Result<f64, CliError> {
    s.trim().parse::<f64>().map_err(|_| CliError::config(format!("`{key}`: not a number: `{s}`")))
}

fn parse_usize(key: &str, s: &str) -> Result<usize, CliError> {
    s.trim().parse::<usize>().map_err(|_| CliError::config(format!("`{key}`: not a non-negative integer: `{s}`")))
}

/// Whitespace-separated `key=value` pairs.
#[derive(Debug, Clone)]
pub struct KeyValues {
    what: &'static str,
    pairs: Vec<(String, String)>,
}

impl KeyValues {
    pub fn parse(what: &'static str, s: &str) -> Result<Self, CliError> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        for tok in s.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("{what}: expected key=value, got `{tok}`")))?;
            if pairs.iter().any(|(q, _)| q == k) {
                return Err(CliError::config(format!("{what}: `{k}` given twice")));
            }
            pairs.push((k.to_string(), v.to_string()));
        }
        Ok(KeyValues { what, pairs })
    }

    fn get(&self, k: &str) -> Option<&str> {
        self.pairs.iter().find(|(q, _)| q == k).map(|(_, v)| v.as_str())
    }

    fn str(&self, k: &str) -> Result<&str, CliError> {
        self.get(k).ok_or_else(|| CliError::config(format!("{}: missing `{k}`", self.what)))
    }

    fn num(&self, k: &str) -> Result<f64, CliError> {
        parse_f64(k, self.str(k)?)
    }

    fn num_or(&self, k: &str, default: f64) -> Result<f64, CliError> {
        self.get(k).map_or(Ok(default), |s| parse_f64(k, s))
    }

    /// Rejects keys outside `allowed`.
    fn only(&self, allowed: &[&str]) -> Result<(), CliError> {
        match self.pairs.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            Some((k, _)) => Err(CliError::config(format!("{}: unknown key `{k}` (expected {})", self.what, allowed.join(", ")))),
            None => Ok(()),
        }
    }
}

/// `kind=const c=1`, `kind=beta alpha=2 beta=1`, `kind=log gamma=0.5 L=log_shift`.
pub fn parse_weight(s: &str) -> Result<WeightSpec, CliError> {
    let kv = KeyValues::parse("weight", s)?;
    let w = match kv.str("kind")? {
        "const" => {
            kv.only(&["kind", "c"])?;
            WeightSpec::constant(kv.num_or("c", 1.0)?)
        }
        "beta" => {
            kv.only(&["kind", "alpha", "beta"])?;
            WeightSpec::beta(kv.num("alpha")?, kv.num("beta")?)
        }
        "log" => {
            kv.only(&["kind", "gamma", "L"])?;
            let l = kv.get("L").map_or(Ok(SlowlyVarying::One), SlowlyVarying::parse)?;
            WeightSpec::log(kv.num("gamma")?, l)
        }
        other => return Err(CliError::config(format!("weight: unknown kind `{other}` (const, beta, log)"))),
    };
    Ok(w?)
}

/// `fn=indicator|gaussian|bump|zero`, `fn=extremal p=2 eps=0.1`, `fn=power s=1.5`.
pub fn parse_function(s: &str, d: usize) -> Result<RadialFunction, CliError> {
    let kv = KeyValues::parse("function", s)?;
    let f = match kv.str("fn")? {
        "indicator" => {
            kv.only(&["fn"])?;
            RadialFunction::indicator_ball(d)
        }
        "gaussian" => {
            kv.only(&["fn"])?;
            RadialFunction::gaussian(d)
        }
        "bump" => {
            kv.only(&["fn"])?;
            RadialFunction::bump(d)
        }
        "zero" => {
            kv.only(&["fn"])?;
            RadialFunction::zero(d)
        }
        "extremal" => {
            kv.only(&["fn", "p", "eps"])?;
            RadialFunction::extremal(d, kv.num("p")?, kv.num("eps")?)
        }
        "power" => {
            kv.only(&["fn", "s"])?;
            RadialFunction::power_tail(d, kv.num("s")?)
        }
        other => {
            return Err(CliError::config(format!(
                "function: unknown fn `{other}` (indicator, gaussian, bump, zero, extremal, power)"
            )))
        }
    };
    Ok(f?)
}

/// `psi=const [c=1] A= B=`, `psi=power a= A= B=`, `psi=norm A= B=` (ψ(p) = |f|_p of `f`).
pub fn parse_psi(s: &str, f: Option<&RadialFunction>) -> Result<PsiSpec, CliError> {
    let kv = KeyValues::parse("psi", s)?;
    let (a, b) = (kv.num("A")?, kv.num_or("B", f64::INFINITY)?);
    let psi = match kv.str("psi")? {
        "const" => {
            kv.only(&["psi", "c", "A", "B"])?;
            PsiSpec::constant(kv.num_or("c", 1.0)?, a, b)
        }
        "power" => {
            kv.only(&["psi", "a", "A", "B"])?;
            PsiSpec::power(kv.num("a")?, a, b)
        }
        "norm" => {
            kv.only(&["psi", "A", "B"])?;
            let f = f.ok_or_else(|| CliError::config("psi=norm needs --function"))?;
            PsiSpec::from_norm_curve(f, a, b)
        }
        other => return Err(CliError::config(format!("psi: unknown kind `{other}` (const, power, norm)"))),
    };
    Ok(psi?)
}

/// `lo:hi:n[:log|lin]`, log spacing by default.
pub fn parse_grid(s: &str) -> Result<PGrid, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(CliError::config(format!("p-grid: expected lo:hi:n[:log|lin], got `{s}`")));
    }
    let lo = parse_f64("p-grid", parts[0])?;
    let hi = parse_f64("p-grid", parts[1])?;
    let n = parse_usize("p-grid", parts[2])?;
    let spacing = parts.get(3).map_or(Ok(Spacing::Log), |t| Spacing::parse(t))?;
    Ok(PGrid::new(lo, hi, n, spacing)?)
}

pub fn parse_operator(s: &str) -> Result<Operator, CliError> {
    match s {
        "U" | "u" | "avg" => Ok(Operator::Average),
        "V" | "v" | "conjugate" => Ok(Operator::Conjugate),
        "H" | "h" | "hardy" => Ok(Operator::Hardy),
        _ => Err(CliError::config(format!("operator: expected U, V or H, got `{s}`"))),
    }
}

fn parse_list<T>(key: &str, s: &str, item: impl Fn(&str, &str) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
    s.split(',').map(|t| item(key, t)).collect()
}

/// Where a command reads its exponents from.
#[derive(Debug, Clone)]
pub enum Exponents {
    Single(f64),
    Grid(PGrid),
}

impl Exponents {
    pub fn points(&self) -> Vec<f64> {
        match self {
            Exponents::Single(p) => vec![*p],
            Exponents::Grid(g) => g.points().to_vec(),
        }
    }
}

/// A fully parsed and validated run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub weight: Option<WeightSpec>,
    pub psi: Vec<PsiSpec>,
    pub functions: Vec<RadialFunction>,
    pub d: usize,
    pub dims: Vec<usize>,
    pub exponents: Option<Exponents>,
    pub eps: Vec<f64>,
    pub operator: Operator,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub refine_tol: Option<f64>,
    pub grid_margin: f64,
    pub grid_points: Option<usize>,
    /// Directives as given, for the JSON `config_echo` block.
    pub echo: Vec<(String, String)>,
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.echo.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{} {}", self.command.as_str(), parts.join(" "))
    }
}

impl RunConfig {
    /// Parses and checks every field the command needs before anything runs.
    pub fn from_args(args: Args) -> Result<Self, CliError> {
        let args = match &args.config {
            Some(path) => {
                let file = read_config_file(path)?;
                args.merge_file(&file)?
            }
            None => args,
        };
        let command = args.command.ok_or_else(|| CliError::config("no command given"))?;
        let mut echo = Vec::new();
        let mut note = |k: &str, v: String| echo.push((k.to_string(), v));

        let d = args.d.unwrap_or(1);
        if d == 0 {
            return Err(CliError::config("dimension must be >= 1"));
        }
        note("d", d.to_string());
        let dims = match &args.dims {
            Some(s) => parse_list("dims", s, parse_usize)?,
            None => vec![d; args.function.len().max(1)],
        };
        if dims.contains(&0) {
            return Err(CliError::config("dims must be >= 1"));
        }
        if command == Command::AnisoCheck {
            note("dims", dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","));
        }

        let weight = match &args.weight {
            Some(s) => {
                note("weight", s.clone());
                Some(parse_weight(s)?)
            }
            None => None,
        };
        let operator = match &args.operator {
            Some(s) => parse_operator(s)?,
            None => Operator::Average,
        };
        if matches!(command, Command::VerifyBound | Command::GlsCheck) {
            note("operator", operator.as_str().to_string());
        }

        let functions = if command == Command::AnisoCheck {
            if args.function.len() != dims.len() {
                return Err(CliError::config(format!(
                    "aniso-check: {} functions for {} axes",
                    args.function.len(),
                    dims.len()
                )));
            }
            args.function.iter().zip(&dims).map(|(s, &d)| parse_function(s, d)).collect::<Result<Vec<_>, _>>()?
        } else {
            if args.function.len() > 1 {
                return Err(CliError::config("only aniso-check takes more than one --function"));
            }
            args.function.iter().map(|s| parse_function(s, d)).collect::<Result<Vec<_>, _>>()?
        };
        for s in &args.function {
            note("function", s.clone());
        }

        let psi = if command == Command::AnisoCheck {
            let specs: Vec<&String> = match args.psi.len() {
                1 => vec![&args.psi[0]; dims.len()],
                n if n == dims.len() => args.psi.iter().collect(),
                n => return Err(CliError::config(format!("aniso-check: {n} ψ specs for {} axes", dims.len()))),
            };
            specs.iter().zip(&functions).map(|(s, f)| parse_psi(s, Some(f))).collect::<Result<Vec<_>, _>>()?
        } else {
            if args.psi.len() > 1 {
                return Err(CliError::config("only aniso-check takes more than one --psi"));
            }
            args.psi.iter().map(|s| parse_psi(s, functions.first())).collect::<Result<Vec<_>, _>>()?
        };
        for s in &args.psi {
            note("psi", s.clone());
        }

        let exponents = match (&args.p_grid, args.p) {
            (Some(_), Some(_)) => return Err(CliError::config("give either --p or --p-grid, not both")),
            (Some(g), None) => {
                note("p-grid", g.clone());
                Some(Exponents::Grid(parse_grid(g)?))
            }
            (None, Some(p)) => {
                if !(p >= 1.0) || !p.is_finite() {
                    return Err(CliError::config(format!("p must be finite and >= 1, got {p}")));
                }
                note("p", fmt_num(p));
                Some(Exponents::Single(p))
            }
            (None, None) => None,
        };
        let eps = match &args.eps {
            Some(s) => {
                note("eps", s.clone());
                parse_list("eps", s, parse_f64)?
            }
            None => DEFAULT_EPS_SCHEDULE.to_vec(),
        };
        let grid_margin = args.grid_margin.unwrap_or(hardy_core::norms::DEFAULT_GRID_MARGIN);
        if !(grid_margin > 0.0 && grid_margin < 0.5) {
            return Err(CliError::config(format!("grid-margin must lie in (0, 0.5), got {grid_margin}")));
        }
        if let Some(t) = args.refine_tol {
            if !(t > 0.0) || !t.is_finite() {
                return Err(CliError::config(format!("refine-tol must be positive, got {t}")));
            }
            note("refine-tol", fmt_num(t));
        }
        if let Some(n) = args.grid_points {
            note("grid-points", n.to_string());
        }

        let cfg = RunConfig {
            command,
            weight,
            psi,
            functions,
            d,
            dims,
            exponents,
            eps,
            operator,
            format: args.format.unwrap_or_default(),
            out: args.out,
            refine_tol: args.refine_tol,
            grid_margin,
            grid_points: args.grid_points,
            echo,
        };
        cfg.require()?;
        Ok(cfg)
    }

    /// Command-specific required fields.
    fn require(&self) -> Result<(), CliError> {
        let need = |ok: bool, what: &str| -> Result<(), CliError> {
            if ok {
                Ok(())
            } else {
                Err(CliError::config(format!("{} needs {what}", self.command.as_str())))
            }
        };
        let has_w = self.weight.is_some();
        let has_f = !self.functions.is_empty();
        let has_psi = !self.psi.is_empty();
        let has_p = self.exponents.is_some();
        let single_p = matches!(self.exponents, Some(Exponents::Single(_)));
        match self.command {
            Command::Theta | Command::Zeta => {
                need(has_w, "--weight")?;
                need(has_p, "--p or --p-grid")
            }
            Command::Norm => {
                need(has_f, "--function")?;
                need(has_p, "--p or --p-grid")
            }
            Command::Gls => {
                need(has_f, "--function")?;
                need(has_psi, "--psi")
            }
            Command::VerifyBound => {
                need(has_w || self.operator == Operator::Hardy, "--weight")?;
                need(has_f, "--function")?;
                need(has_p, "--p or --p-grid")
            }
            Command::Sharpness => {
                need(has_w, "--weight")?;
                need(single_p, "--p")
            }
            Command::GlsCheck => {
                need(has_w || self.operator == Operator::Hardy, "--weight")?;
                need(has_f, "--function")?;
                need(has_psi, "--psi")
            }
            Command::AnisoCheck => {
                need(has_w, "--weight")?;
                need(has_f, "--function")?;
                need(has_psi, "--psi")?;
                need(self.dims.len() <= hardy_core::aniso::MAX_AXES, "at most 3 axes")
            }
            Command::Asymptotics => need(has_w, "--weight"),
            Command::ReportAll => Ok(()),
        }
    }

    pub fn weight(&self) -> &WeightSpec {
        self.weight.as_ref().expect("validated")
    }

    pub fn function(&self) -> &RadialFunction {
        &self.functions[0]
    }

    pub fn psi(&self) -> &PsiSpec {
        &self.psi[0]
    }

    /// The explicit grid, or `n` points inset in `support`.
    pub fn grid_or_inset(&self, support: (f64, f64), n: usize) -> Result<PGrid, CliError> {
        let g = match &self.exponents {
            Some(Exponents::Grid(g)) => g.clone(),
            Some(Exponents::Single(p)) => PGrid::singleton(*p)?,
            None => PGrid::inset(support, self.grid_points.unwrap_or(n), Spacing::Log, self.grid_margin)?,
        };
        Ok(match self.refine_tol {
            Some(t) => g.with_refinement(true, t),
            None => g,
        })
    }
}

/// Shortest round-trip form, for echoing numbers back.
pub fn fmt_num(x: f64) -> String {
    format!("{x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_grammar() {
        assert_eq!(parse_weight("kind=beta alpha=2 beta=1").unwrap().label(), "beta(alpha=2,beta=1)");
        assert_eq!(parse_weight("kind=const").unwrap().label(), "const(c=1)");
        assert_eq!(parse_weight("kind=log gamma=0.5 L=log_shift").unwrap().label(), "log(gamma=0.5,L=log_shift)");
        for bad in ["kind=beta alpha=2", "kind=cosine", "alpha=2", "kind=const c=x", "kind=const q=1", "kind=beta alpha=-1 beta=1"] {
            assert!(parse_weight(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn psi_and_function_grammar() {
        assert_eq!(parse_psi("psi=const A=1.5 B=10", None).unwrap().support(), (1.5, 10.0));
        assert_eq!(parse_psi("psi=power a=0.5 A=2 B=20", None).unwrap().eval(4.0).unwrap(), 2.0);
        assert!(parse_psi("psi=norm A=1 B=3", None).is_err());
        let f = parse_function("fn=extremal p=2 eps=0.1", 1).unwrap();
        assert!(parse_psi("psi=norm A=2.2 B=3", Some(&f)).is_ok());
        assert!(parse_function("fn=extremal p=2", 1).is_err());
        assert!(parse_function("fn=zero", 2).unwrap().is_zero());
    }

    #[test]
    fn grid_grammar() {
        let g = parse_grid("1.5:10:50").unwrap();
        assert_eq!(g.points().len(), 50);
        assert_eq!(g.lo(), 1.5);
        let g = parse_grid("2:4:9:lin").unwrap();
        assert_eq!(g.points()[4], 3.0);
        for bad in ["1:2", "1:2:3:log", "2:1:10", "1:2:10:cubic", "a:2:10"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn config_file_directives() {
        let m = parse_config_text("# comment\ncommand = theta\nweight = kind=beta alpha=2 beta=1 # trailing\n\np-grid=1.5:10:50\n")
            .unwrap();
        assert_eq!(m["weight"], vec!["kind=beta alpha=2 beta=1".to_string()]);
        assert!(parse_config_text("colour = red").is_err());
        assert!(parse_config_text("d = 1\nd = 2").is_err());
        assert!(parse_config_text("no equals sign").is_err());
        let args = Args { d: Some(3), ..Default::default() }.merge_file(&m).unwrap();
        assert_eq!(args.command, Some(Command::Theta));
        assert_eq!(args.d, Some(3));
    }

    #[test]
    fn required_fields() {
        let args = |cmd| Args { command: Some(cmd), ..Default::default() };
        assert!(RunConfig::from_args(args(Command::Theta)).is_err());
        assert!(RunConfig::from_args(args(Command::ReportAll)).is_ok());
        let a = Args { weight: Some("kind=const".into()), p: Some(2.0), ..args(Command::Sharpness) };
        assert!(RunConfig::from_args(a).is_ok());
        let a = Args { weight: Some("kind=const".into()), p_grid: Some("1.5:3:8".into()), ..args(Command::Sharpness) };
        assert!(RunConfig::from_args(a).is_err());
    }
}

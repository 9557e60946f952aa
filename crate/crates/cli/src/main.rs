use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use kinkwave::config::{parse_config, RunConfig, DEFAULT_NU, DEFAULT_SWEEP};
use kinkwave::output::{emit_plot_script, format_profile_csv, format_sig12, write_profile_csv};
use kinkwave::profile::{measure_width, Profile};
use kinkwave::validation::{validate_all, validate_model, verified_profile, ValidationReport};
use kinkwave::wave::{
    admissible_problem, existence_gate, find_equilibria, integration_constant, reduced_field, wave_speed_squared,
    BoundaryStates, Existence, SpeedSign, WaveProblem,
};
use kinkwave::{par, ConstitutiveModel, Method, ModelSpec};
use serde_json::json;

/// Writes to stdout; a closed pipe (`kinkwave ... | head`) ends the process quietly.
fn emit(text: &str) {
    let mut stdout = io::stdout().lock();
    if let Err(e) = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        if e.kind() == io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: writing output: {e}");
        std::process::exit(1);
    }
}

macro_rules! out {
    ($($t:tt)*) => { emit(&format!("{}\n", format_args!($($t)*))) };
}

macro_rules! out_raw {
    ($($t:tt)*) => { emit(&format!($($t)*)) };
}

/// Traveling-wave profiles of strain-limiting viscoelastic materials.
#[derive(Parser)]
#[command(name = "kinkwave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Wave speed, integration constant, g(1) and existence verdicts.
    Speed(SpeedArgs),
    /// Equilibria of the reduced field with their eigenvalues.
    Equilibria(EquilibriaArgs),
    /// One wave profile written as CSV.
    Profile(ProfileArgs),
    /// Profiles for several viscosities plus a gnuplot script.
    Sweep(SweepArgs),
    /// Run the validation checks and the printed-formula audit.
    Validate(ValidateArgs),
}

#[derive(Args, Clone)]
struct WaveArgs {
    /// Model spec, e.g. `quadratic` or `quadratic:gp0=1,gpp0=-0.6`.
    #[arg(long)]
    model: Option<ModelSpec>,
    /// Stress as xi -> -inf.
    #[arg(long, allow_hyphen_values = true)]
    tminus: Option<f64>,
    /// Stress as xi -> +inf.
    #[arg(long, allow_hyphen_values = true)]
    tplus: Option<f64>,
    /// Sign of the wave speed (1 or -1); default: whichever admits a wave.
    #[arg(long, allow_hyphen_values = true)]
    c_sign: Option<i8>,
    /// Read defaults from a config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SpeedArgs {
    #[command(flatten)]
    wave: WaveArgs,
    /// Viscosity used for the existence verdicts.
    #[arg(long, default_value_t = DEFAULT_NU)]
    nu: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EquilibriaArgs {
    #[command(flatten)]
    wave: WaveArgs,
    #[arg(long, default_value_t = DEFAULT_NU)]
    nu: f64,
    /// Search interval; default one unit beyond the boundary states.
    #[arg(long, allow_hyphen_values = true)]
    tmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tmax: Option<f64>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Clone)]
struct NumericArgs {
    /// closed-form, ode or quadrature; default closed-form when available.
    #[arg(long)]
    method: Option<Method>,
    #[arg(long, allow_hyphen_values = true)]
    xi_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    xi_max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
}

#[derive(Args)]
struct ProfileArgs {
    #[command(flatten)]
    wave: WaveArgs,
    #[command(flatten)]
    numeric: NumericArgs,
    #[arg(long)]
    nu: Option<f64>,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    wave: WaveArgs,
    #[command(flatten)]
    numeric: NumericArgs,
    /// Comma-separated viscosities; default 0.25,0.5,1.0.
    #[arg(long, value_delimiter = ',')]
    nu: Option<Vec<f64>>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Validate a single model.
    #[arg(long, conflicts_with = "all")]
    model: Option<ModelSpec>,
    /// Validate every catalog model (the default).
    #[arg(long)]
    all: bool,
    #[arg(long, default_value_t = DEFAULT_NU)]
    nu: f64,
    /// Write the structured report (JSON) here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Print the JSON report instead of the summary.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Speed(a) => speed(a),
        Command::Equilibria(a) => equilibria(a),
        Command::Profile(a) => profile(a),
        Command::Sweep(a) => sweep(a),
        Command::Validate(a) => validate(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// The config file (if any) with the command-line flags applied on top.
fn load_config(wave: &WaveArgs, numeric: Option<&NumericArgs>) -> Result<RunConfig> {
    let mut cfg = match (&wave.config, &wave.model) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text).with_context(|| format!("in {}", path.display()))?
        }
        (None, Some(spec)) => RunConfig::for_model(&spec.build()?),
        (None, None) => bail!("give --model or --config"),
    };
    if let (Some(_), Some(spec)) = (&wave.config, &wave.model) {
        let model = spec.build()?;
        cfg.model = RunConfig::for_model(&model).model;
    }
    if let Some(t) = wave.tminus {
        cfg.wave.t_minus = t;
    }
    if let Some(t) = wave.tplus {
        cfg.wave.t_plus = t;
    }
    if let Some(s) = wave.c_sign {
        cfg.wave.c_sign = Some(s);
    }
    if let Some(n) = numeric {
        let num = &mut cfg.numeric;
        num.method = n.method.or(num.method);
        num.xi_min = n.xi_min.or(num.xi_min);
        num.xi_max = n.xi_max.or(num.xi_max);
        num.samples = n.samples.unwrap_or(num.samples);
        num.rel_tol = n.rel_tol.unwrap_or(num.rel_tol);
        num.abs_tol = n.abs_tol.unwrap_or(num.abs_tol);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn verdict(e: &Existence) -> String {
    match e {
        Existence::Admissible => "admissible".into(),
        Existence::NoWave(r) => format!("no wave: {r}"),
    }
}

fn speed(a: SpeedArgs) -> Result<ExitCode> {
    let cfg = load_config(&a.wave, None)?;
    let model = cfg.build_model()?;
    let boundary = cfg.boundary()?;
    let admissibility = model.check_g1_positive();
    let c2 = wave_speed_squared(&model, &boundary);
    let verdicts: Vec<(f64, String)> = [SpeedSign::Positive, SpeedSign::Negative]
        .into_iter()
        .map(|s| {
            let v = WaveProblem::new(model, a.nu, boundary, s).map(|p| existence_gate(&p));
            (s.value(), v.map(|v| verdict(&v)).unwrap_or_else(|e| e.to_string()))
        })
        .collect();
    let (c2v, av) = match &c2 {
        Ok(c2) => (Some(*c2), Some(integration_constant(&model, &boundary, *c2)?)),
        Err(_) => (None, None),
    };
    if a.json {
        let out = json!({
            "model": ModelSpec::from(&model),
            "t_minus": boundary.t_minus,
            "t_plus": boundary.t_plus,
            "nu": a.nu,
            "c2": c2v,
            "c": c2v.map(|v| [v.sqrt(), -v.sqrt()]),
            "A": av,
            "g1": admissibility.g1,
            "g1_positive": admissibility.positive,
            "compressive_limit": admissibility.compressive_limit,
            "existence": verdicts.iter().map(|(s, v)| json!({"c_sign": s, "verdict": v})).collect::<Vec<_>>(),
        });
        out!("{}", serde_json::to_string_pretty(&out)?);
        return Ok(ExitCode::SUCCESS);
    }
    out!("model       {model}");
    out!("states      T- = {}, T+ = {}", boundary.t_minus, boundary.t_plus);
    match c2 {
        Ok(c2) => {
            out!("c^2         {c2}");
            out!("c           +{} / -{}", c2.sqrt(), c2.sqrt());
            out!("A           {}", av.unwrap_or(f64::NAN));
        }
        Err(e) => out!("c^2         {e}"),
    }
    out!("g(1)        {} ({})", admissibility.g1, if admissibility.positive { "positive" } else { "not positive" });
    if let Some(t) = admissibility.compressive_limit {
        out!("advisory    |g(T)| exceeds 1 from T = {t} (compressive side)");
    }
    for (s, v) in verdicts {
        out!("c {}     {v}  (nu = {})", if s > 0.0 { "> 0" } else { "< 0" }, a.nu);
    }
    Ok(ExitCode::SUCCESS)
}

fn equilibria(a: EquilibriaArgs) -> Result<ExitCode> {
    let cfg = load_config(&a.wave, None)?;
    let model = cfg.build_model()?;
    let boundary = cfg.boundary()?;
    let sign = match cfg.c_sign() {
        Some(s) => s,
        None => WaveProblem::new(model, a.nu, boundary, SpeedSign::Positive)?
            .with_admissible_sign()
            .map_or(SpeedSign::Positive, |p| p.c_sign),
    };
    let field = reduced_field(&WaveProblem::new(model, a.nu, boundary, sign)?)?;
    let (lo, hi) = field.default_search_interval();
    let interval = (a.tmin.unwrap_or(lo), a.tmax.unwrap_or(hi));
    let rep = find_equilibria(&field, interval)?;
    if a.json {
        let out = json!({
            "model": ModelSpec::from(&model),
            "nu": a.nu,
            "c": field.c,
            "interval": [interval.0, interval.1],
            "continuum": rep.continuum,
            "equilibria": rep.equilibria,
        });
        out!("{}", serde_json::to_string_pretty(&out)?);
        return Ok(ExitCode::SUCCESS);
    }
    out!("model {model}, nu = {}, c = {}", a.nu, field.c);
    if rep.continuum {
        out!("f vanishes on [{}, {}]: every point is an equilibrium", interval.0, interval.1);
    }
    for e in &rep.equilibria {
        out!("T* = {:<20} lambda = {:<20} {:?}", format_sig12(e.value), format_sig12(e.eigenvalue), e.stability);
    }
    Ok(ExitCode::SUCCESS)
}

fn solve(cfg: &RunConfig, model: ConstitutiveModel, boundary: BoundaryStates, nu: f64) -> Result<(Profile, f64)> {
    let problem = admissible_problem(model, nu, boundary, cfg.c_sign())?;
    let field = reduced_field(&problem)?;
    let icfg = cfg.numeric.integrator(&field)?;
    let profile = verified_profile(&field, cfg.numeric.method, &icfg)?;
    let width = measure_width(&profile).or_else(|_| field.width())?;
    Ok((profile, width))
}

fn profile(a: ProfileArgs) -> Result<ExitCode> {
    let cfg = load_config(&a.wave, Some(&a.numeric))?;
    let model = cfg.build_model()?;
    let nu = a.nu.unwrap_or_else(|| cfg.nu_values()[0]);
    let (profile, width) = solve(&cfg, model, cfg.boundary()?, nu)?;
    match a.out.or(cfg.output.path.clone()) {
        Some(path) => {
            write_profile_csv(&profile, Some(width), &path).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {} samples ({}) to {}", profile.samples.len(), profile.meta.method, path.display());
        }
        None => out_raw!("{}", format_profile_csv(&profile, Some(width))),
    }
    Ok(ExitCode::SUCCESS)
}

fn file_stem(model: &ConstitutiveModel, nu: f64) -> String {
    format!("{}_nu{nu}", model.name())
}

fn sweep(a: SweepArgs) -> Result<ExitCode> {
    let cfg = load_config(&a.wave, Some(&a.numeric))?;
    let model = cfg.build_model()?;
    let boundary = cfg.boundary()?;
    let nus = match a.nu {
        Some(v) => v,
        None if a.wave.config.is_some() => cfg.nu_values(),
        None => DEFAULT_SWEEP.to_vec(),
    };
    let out_dir = a.out_dir.or(cfg.output.out_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let results = par::map(&nus, |&nu| solve(&cfg, model, boundary, nu));
    let mut written = Vec::new();
    for (nu, r) in nus.iter().zip(results) {
        let (profile, width) = r.with_context(|| format!("nu = {nu}"))?;
        let name = format!("{}.csv", file_stem(&model, *nu));
        write_profile_csv(&profile, Some(width), &out_dir.join(&name))?;
        out!("nu = {nu:<8} width = {width:<12.6} -> {}", out_dir.join(&name).display());
        written.push((profile, name));
    }
    let script = cfg.output.plot_script.clone().unwrap_or_else(|| PathBuf::from(format!("{}.gp", model.name())));
    let script = if script.is_absolute() { script } else { out_dir.join(script) };
    let entries: Vec<(&Profile, &str)> = written.iter().map(|(p, n)| (p, n.as_str())).collect();
    let image = format!("{}.png", model.name());
    emit_plot_script(&entries, &image, &script)?;
    out!("plot script -> {} (run `gnuplot {}` inside {})", script.display(), file_name(&script), out_dir.display());
    Ok(ExitCode::SUCCESS)
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn validate(a: ValidateArgs) -> Result<ExitCode> {
    let report: ValidationReport = match &a.model {
        Some(spec) => validate_model(&spec.build()?, a.nu).finish(),
        None => validate_all(a.nu),
    };
    if let Some(path) = &a.report {
        fs::write(path, report.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    if a.json {
        out!("{}", report.to_json());
    } else {
        out_raw!("{}", report.summary());
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

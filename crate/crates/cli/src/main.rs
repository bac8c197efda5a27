use clap::{Parser, Subcommand, ValueEnum};
use singbvp::arith::{parse_q, to_f64, Q};
use singbvp::pipeline::{
    self, displacement, eval_prepared, kirchhoff_preset, parse_forcing, parse_problem, prepare, quad_solution, to_csv,
    verify_prepared, CompiledKernel, EvalMode, EvalOptions, KirchhoffConfig, Load, ProblemSpec, StepError, VerifyOptions,
};
use singbvp::quad::QuadOptions;
use singbvp::{ClosedForm, Error};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "singbvp", version, about = "Green's operators for boundary problems with a mild singularity at 0")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Out {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Quad,
}

#[derive(clap::Args)]
struct QuadArgs {
    /// Relative tolerance between successive panel doublings.
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    /// Panel limit per smooth segment.
    #[arg(long, default_value_t = 4096)]
    max_panels: usize,
}

impl QuadArgs {
    fn options(&self) -> QuadOptions {
        QuadOptions { rel_tol: self.rel_tol, max_panels: self.max_panels }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the Green's operator, its kernel and the construction report.
    Solve {
        file: PathBuf,
        #[arg(long)]
        truncation: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        out: Out,
    },
    /// Sample u = G f on the grid i·b/N, i = 1..N, and write CSV.
    Eval {
        file: PathBuf,
        /// Expression in x, or a fixture name such as kirchhoff-paper.
        #[arg(long)]
        forcing: String,
        #[arg(long, default_value_t = 10)]
        grid: usize,
        #[arg(long, value_enum, default_value = "quad")]
        mode: Mode,
        #[command(flatten)]
        quad: QuadArgs,
        /// Output path; `-` writes to stdout.
        #[arg(long, default_value = "-")]
        csv: String,
    },
    /// Check T(G f) = Q f and the boundary conditions on G f.
    Verify {
        file: PathBuf,
        #[arg(long)]
        forcing: String,
        /// Residual tolerance of the numeric path.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Use the numeric path even for analytic forcings.
        #[arg(long)]
        numeric: bool,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Graded Kirchhoff plate: slope φ = −w′ on [0, β] with φ(0) = φ(β) = 0.
    Kirchhoff {
        #[arg(long, default_value = "9/10")]
        beta: String,
        #[arg(long, default_value = "1/3")]
        nu: String,
        /// constant:<q0>, expr:<q(x)>, or paper for the published forcing.
        #[arg(long, default_value = "paper")]
        load: String,
        #[arg(long, default_value = "1")]
        t0: String,
        #[arg(long, default_value = "1")]
        e0: String,
        /// Outer radius b.
        #[arg(long, default_value = "1")]
        radius: String,
        #[arg(long, default_value_t = 20)]
        grid: usize,
        /// Also output w(ρ) = −∫_{ρ0}^ρ φ.
        #[arg(long)]
        displacement: bool,
        #[arg(long, default_value_t = 0.0)]
        rho0: f64,
        /// Run the numeric verification as well.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        quad: QuadArgs,
        #[arg(long, default_value = "-")]
        csv: String,
        /// Write the problem file of the preset to this path.
        #[arg(long)]
        emit_problem: Option<PathBuf>,
    },
}

enum Failure {
    Step(StepError),
    Plain(Error),
}

impl From<StepError> for Failure {
    fn from(e: StepError) -> Self {
        Failure::Step(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Plain(e)
    }
}

fn rational(name: &str, s: &str) -> Result<Q, Error> {
    parse_q(s).map_err(|e| Error::InvalidInput(format!("--{name}: {e}")))
}

fn write_out(path: &str, text: &str) -> Result<(), Error> {
    if path == "-" {
        print!("{text}");
        Ok(())
    } else {
        std::fs::write(path, text).map_err(|e| Error::InvalidInput(format!("{path}: {e}")))
    }
}

fn load_spec(file: &PathBuf, truncation: Option<usize>) -> Result<ProblemSpec, Error> {
    let mut spec = parse_problem(file)?;
    if let Some(t) = truncation {
        spec.truncation = t;
    }
    Ok(spec)
}

fn forcing(src: &str) -> Result<ClosedForm, Error> {
    parse_forcing(src).map_err(|e| Error::InvalidInput(format!("--forcing: {e}")))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Solve { file, truncation, out } => {
            let spec = load_spec(&file, truncation)?;
            let v = pipeline::cmd_solve(&spec)?;
            match out {
                Out::Json => println!("{}", serde_json::to_string_pretty(&v).expect("serializable")),
                Out::Text => {
                    println!("G = {}", v["greens_operator"].as_str().unwrap_or_default());
                    for p in v["greens_function"]["pieces"].as_array().into_iter().flatten() {
                        let terms: Vec<String> = p["terms"]
                            .as_array()
                            .into_iter()
                            .flatten()
                            .map(|t| format!("({})*({})", t["p"].as_str().unwrap_or_default(), t["q"].as_str().unwrap_or_default()))
                            .collect();
                        println!("g = {}   for {}", terms.join(" + "), p["region"].as_str().unwrap_or_default());
                    }
                    for w in v["report"]["warnings"].as_array().into_iter().flatten() {
                        eprintln!("warning: {}", w.as_str().unwrap_or_default());
                    }
                }
            }
        }
        Cmd::Eval { file, forcing: f, grid, mode, quad, csv } => {
            let spec = load_spec(&file, None)?;
            let f = forcing(&f)?;
            let prep = prepare(&spec)?;
            let mode = match mode {
                Mode::Exact => EvalMode::Exact,
                Mode::Quad => EvalMode::Quadrature,
            };
            let rows = eval_prepared(&prep, &f, EvalOptions { grid, mode, quad: quad.options() })?;
            write_out(&csv, &to_csv(&rows))?;
        }
        Cmd::Verify { file, forcing: f, tol, numeric, quad } => {
            let spec = load_spec(&file, None)?;
            let f = forcing(&f)?;
            let prep = prepare(&spec)?;
            let opts = VerifyOptions { force_numeric: numeric, tol, quad: quad.options(), ..Default::default() };
            let r = verify_prepared(&prep, &f, opts)?;
            println!("{}", serde_json::to_string_pretty(&r.to_json()).expect("serializable"));
        }
        Cmd::Kirchhoff { beta, nu, load, t0, e0, radius, grid, displacement: with_w, rho0, verify, quad, csv, emit_problem } => {
            let load = match load.split_once(':') {
                Some(("constant", q0)) => Load::Constant(rational("load", q0)?),
                Some(("expr", e)) => Load::Expr(singbvp::expr::parse_expr(e)?),
                None if load == "paper" => Load::PaperFixture,
                _ => return Err(Error::InvalidInput(format!("--load: expected constant:<q0>, expr:<q> or paper, got '{load}'")).into()),
            };
            let cfg = KirchhoffConfig {
                nu: rational("nu", &nu)?,
                t0: rational("t0", &t0)?,
                e0: rational("e0", &e0)?,
                b: rational("radius", &radius)?,
                beta: rational("beta", &beta)?,
                load,
                ..Default::default()
            };
            let (spec, f) = kirchhoff_preset(&cfg)?;
            if let Some(p) = emit_problem {
                let text = serde_json::to_string_pretty(&spec.to_json()).expect("serializable");
                std::fs::write(&p, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?;
            }
            let prep = prepare(&spec)?;
            eprintln!("forcing f(rho) = {}", f.display("x"));
            let opts = quad.options();
            let kernel = CompiledKernel::new(&prep.kernel, 0);
            let b = to_f64(&cfg.beta);
            let phi = |r: f64| quad_solution(&prep, &kernel, &f, r, opts).unwrap_or(f64::NAN);
            let mut text = String::from(if with_w { "x,u,w\n" } else { "x,u\n" });
            // w(y) = W(y) − W(ρ0) with W = −∫_0^y φ accumulated over the grid
            let w_ref = if with_w { displacement(&phi, 0.0, rho0, opts)? } else { 0.0 };
            let (mut prev, mut w_acc) = (0.0, 0.0);
            for i in 1..=grid.max(1) {
                let y = b * i as f64 / grid.max(1) as f64;
                let u = quad_solution(&prep, &kernel, &f, y, opts)?;
                text.push_str(&format!("{},{}", pipeline::format_sig(y), pipeline::format_sig(u)));
                if with_w {
                    w_acc += displacement(&phi, prev, y, opts)?;
                    prev = y;
                    text.push_str(&format!(",{}", pipeline::format_sig(w_acc - w_ref)));
                }
                text.push('\n');
            }
            write_out(&csv, &text)?;
            if verify {
                let r = verify_prepared(&prep, &f, VerifyOptions { quad: opts, ..Default::default() })?;
                eprintln!("{}", serde_json::to_string_pretty(&r.to_json()).expect("serializable"));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Step(e)) => {
            eprintln!("error in step '{}': {}", e.step, e.error);
            ExitCode::from(if matches!(e.error, Error::VerificationFailed(_)) { 3 } else { 1 })
        }
        Err(Failure::Plain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

//! Command-line surface: verification suites and deterministic CSV/JSON
//! export of the fibration data (level sets, phase portraits, critical
//! curves and multi-moment maps).

mod export;
mod pool;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use export::{Cell, Format, Table};
use report::{run_verify, VerifyConfig};
use spin7_core::fibration::so3::multi_moment_so3;
use spin7_core::fibration::so3::{
    cayley_residual_at as so3_residual_at, conserved_f, trace_level_set, SO3FibreParams,
};
use spin7_core::fibration::sp1::{
    alpha_c, beta_c, cayley_residual_at as sp1_residual_at, f1_f2, multi_moment_sp1, trace_fibre,
    FibreCurveSp1, IntegrateOptions, Sp1Event, Sp1PhaseState,
};
use spin7_core::geometry::{multi_moment_fibre, ChartKind, ChartPointSO3};

#[derive(Parser)]
#[command(
    name = "spin7",
    version,
    about = "Bryant-Salamon Spin(7) structures on the negative spinor bundle of S^4: \
             verification suites and Cayley-fibration data export",
    after_help = "Exit codes: 0 = pass, 1 = computational failure, 2 = usage error.\n\
                  The default output directory honors SPIN7_OUT_DIR."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// PRNG seed; fixed seed means byte-identical outputs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (default: $SPIN7_OUT_DIR or ".").
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format for exported tables.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads for parameter sweeps (default: machine parallelism).
    /// Results are collected in input order, so this never changes output.
    #[arg(long)]
    jobs: Option<usize>,
}

impl CommonArgs {
    fn out_dir(&self) -> PathBuf {
        self.output
            .clone()
            .or_else(|| std::env::var_os("SPIN7_OUT_DIR").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }

    fn jobs(&self) -> usize {
        self.jobs.unwrap_or_else(pool::default_jobs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChartArg {
    So3,
    Sp1,
    Both,
}

impl ChartArg {
    fn charts(self) -> Vec<ChartKind> {
        match self {
            ChartArg::So3 => vec![ChartKind::So3],
            ChartArg::Sp1 => vec![ChartKind::Sp1],
            ChartArg::Both => vec![ChartKind::So3, ChartKind::Sp1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MomentAction {
    Fibre,
    So3,
    Sp1,
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v < 0.0 || !v.is_finite() {
        return Err("must be a nonnegative finite number".to_string());
    }
    Ok(v)
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v <= 0.0 || !v.is_finite() {
        return Err("must be a positive finite number".to_string());
    }
    Ok(v)
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the structure-equation verification suites and report per-suite
    /// max residuals. Exit 0 only if every suite passes its tolerance.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = ChartArg::Both)]
        chart: ChartArg,
        /// Scale parameter of the Spin(7) structure (c >= 0).
        #[arg(long, default_value = "1.0", value_parser = non_negative, allow_hyphen_values = true)]
        c: f64,
        /// Chart points sampled for the d Phi_c closure check.
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Central-difference step for the numeric exterior derivative.
        #[arg(long, default_value = "1e-5", value_parser = positive)]
        fd_step: f64,
        /// Tolerance on max |coeff(d Phi_c)|.
        #[arg(long, default_value = "1e-6", value_parser = positive)]
        tol_dphi: f64,
        /// Tolerance on the relative self-duality residual of Phi_c.
        #[arg(long, default_value = "1e-8", value_parser = positive)]
        tol_self_dual: f64,
        /// Tolerance on pi7 idempotence and the lambda fixed-point defect.
        #[arg(long, default_value = "1e-10", value_parser = positive)]
        tol_pi7: f64,
        /// Tolerance on the coframe/frame pairing defect.
        #[arg(long, default_value = "1e-12", value_parser = positive)]
        tol_duality: f64,
        /// Tolerance on the metric-volume consistency defect.
        #[arg(long, default_value = "1e-10", value_parser = positive)]
        tol_volume: f64,
        /// Emit the report as JSON on stdout.
        #[arg(long)]
        json: bool,
    },
    /// Trace SO(3)-chart Cayley fibres (level sets of the first integral
    /// F) and export one table per F value with the per-sample Cayley
    /// residual. Columns: alpha,u,F,eta_residual.
    FibrateSo3 {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value = "1.0", value_parser = non_negative, allow_hyphen_values = true)]
        c: f64,
        /// Fibre constant v = s/t.
        #[arg(long, default_value = "1.0", value_parser = positive)]
        v: f64,
        /// F levels to trace (comma separated).
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.5,1.0,2.0")]
        f: Vec<f64>,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        /// Samples per curve.
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// Integrate Sp(1)-chart Cayley fibres from launch points and export
    /// one table per launch. Columns: alpha,r,eta_residual,event.
    FibrateSp1 {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value = "1.0", value_parser = non_negative, allow_hyphen_values = true)]
        c: f64,
        /// Launch points "alpha,r" (repeatable).
        #[arg(long = "launch", value_parser = parse_launch, required = true, allow_hyphen_values = true)]
        launches: Vec<(f64, f64)>,
        /// Escape cutoff radius.
        #[arg(long, default_value = "1e3", value_parser = positive)]
        r_max: f64,
        /// Export the right-multiplication variant of the action: the
        /// poles swap roles, realized as the reflection alpha -> -alpha
        /// in the emitted rows.
        #[arg(long)]
        reflect: bool,
    },
    /// Sample the phase-portrait vector field (f1, f2) on a grid and export
    /// it with the two critical-curve polylines. Columns: alpha,r,f1,f2.
    PhasePortrait {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value = "1.0", value_parser = non_negative, allow_hyphen_values = true)]
        c: f64,
        /// Grid resolution as "NxM" (alpha x r).
        #[arg(long, default_value = "200x200", value_parser = parse_grid)]
        grid: (usize, usize),
        #[arg(long, default_value = "3.0", value_parser = positive)]
        r_max: f64,
    },
    /// Evaluate a multi-moment map on its natural domain and export the
    /// grid. Columns: r,nu (fibre), alpha,u,nu (so3), alpha,r,nu (sp1).
    MomentMap {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        action: MomentAction,
        #[arg(long, default_value = "1.0", value_parser = non_negative, allow_hyphen_values = true)]
        c: f64,
        /// Single radius for the fibre action (omit for a radial sweep).
        #[arg(long, value_parser = non_negative, allow_hyphen_values = true)]
        r: Option<f64>,
        /// Fibre constant v = s/t for the so3 action.
        #[arg(long, default_value = "1.0", value_parser = positive)]
        v: f64,
        /// Grid resolution as "NxM".
        #[arg(long, default_value = "120x120", value_parser = parse_grid)]
        grid: (usize, usize),
        /// Coordinate cap (u for so3, r otherwise).
        #[arg(long, default_value = "3.0", value_parser = positive)]
        extent: f64,
    },
}

fn parse_launch(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected \"alpha,r\"".to_string());
    }
    let alpha: f64 = parts[0].trim().parse().map_err(|e| format!("alpha: {e}"))?;
    let r: f64 = parts[1].trim().parse().map_err(|e| format!("r: {e}"))?;
    if r < 0.0 {
        return Err("r must be nonnegative".to_string());
    }
    Ok((alpha, r))
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = s.split('x').collect();
    if parts.len() != 2 {
        return Err("expected \"NxM\"".to_string());
    }
    let n: usize = parts[0].parse().map_err(|e| format!("{e}"))?;
    let m: usize = parts[1].parse().map_err(|e| format!("{e}"))?;
    if n < 2 || m < 2 {
        return Err("grid must be at least 2x2".to_string());
    }
    Ok((n, m))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Verify {
            common,
            chart,
            c,
            points,
            fd_step,
            tol_dphi,
            tol_self_dual,
            tol_pi7,
            tol_duality,
            tol_volume,
            json,
        } => {
            let cfg = VerifyConfig {
                charts: chart.charts(),
                c,
                points,
                fd_step,
                seed: common.seed,
                jobs: common.jobs(),
                tol_dphi,
                tol_self_dual,
                tol_pi7,
                tol_lambda: tol_pi7,
                tol_duality,
                tol_volume,
            };
            let report = run_verify(&cfg).map_err(|e| e.to_string())?;
            if json {
                print!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            Ok(report.pass())
        }
        Command::FibrateSo3 {
            common,
            c,
            v,
            f,
            beta,
            delta,
            samples,
        } => {
            let dir = common.out_dir();
            let jobs = common.jobs();
            for f0 in f {
                let params =
                    SO3FibreParams::new(beta, delta, v, f0, c).map_err(|e| e.to_string())?;
                let curve = trace_level_set(&params, samples).map_err(|e| e.to_string())?;
                let rows = pool::map_ordered(jobs, &curve.samples, |&(alpha, u)| {
                    let f_val = if alpha < std::f64::consts::FRAC_PI_2 {
                        conserved_f(alpha, u, v, c).ok()
                    } else {
                        None
                    };
                    let eta = so3_eta_at(alpha, u, &params);
                    (alpha, u, f_val, eta)
                });
                let mut table = Table::new(vec!["alpha", "u", "F", "eta_residual"]);
                for (alpha, u, f_val, eta) in rows {
                    table.push(vec![
                        Cell::Num(alpha),
                        Cell::Num(u),
                        f_val.map_or(Cell::Empty, Cell::Num),
                        eta.map_or(Cell::Empty, Cell::Num),
                    ]);
                }
                let name = format!("fibrate_so3_c{}_F{}.{}", c, f0, common.format.extension());
                let path = dir.join(name);
                table
                    .write(&path, common.format)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                println!("wrote {} ({:?})", path.display(), curve.topology);
            }
            Ok(true)
        }
        Command::FibrateSp1 {
            common,
            c,
            launches,
            r_max,
            reflect,
        } => {
            let dir = common.out_dir();
            let opts = IntegrateOptions {
                r_max,
                stop_at_critical: false,
                ..Default::default()
            };
            for (alpha, r) in launches {
                let launch = Sp1PhaseState::new(alpha, r, c).map_err(|e| e.to_string())?;
                let curve = trace_fibre(&launch, &opts).map_err(|e| e.to_string())?;
                let mut table = sp1_curve_table(&curve, common.jobs());
                if reflect {
                    for row in &mut table.rows {
                        if let Cell::Num(a) = row[0] {
                            row[0] = Cell::Num(-a);
                        }
                    }
                }
                let name = format!(
                    "fibrate_sp1_c{}_a{}_r{}{}.{}",
                    c,
                    alpha,
                    r,
                    if reflect { "_reflected" } else { "" },
                    common.format.extension()
                );
                let path = dir.join(name);
                table
                    .write(&path, common.format)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                println!("wrote {} ({:?})", path.display(), curve.topology);
            }
            Ok(true)
        }
        Command::PhasePortrait {
            common,
            c,
            grid: (na, nr),
            r_max,
        } => {
            let dir = common.out_dir();
            let mut table = Table::new(vec!["alpha", "r", "f1", "f2"]);
            let alpha_lo = -std::f64::consts::FRAC_PI_2;
            let alpha_hi = std::f64::consts::FRAC_PI_2;
            for i in 0..na {
                let alpha = alpha_lo + (alpha_hi - alpha_lo) * (i as f64 + 0.5) / na as f64;
                for j in 0..nr {
                    let r = r_max * (j as f64 + 0.5) / nr as f64;
                    let (f1, f2) = f1_f2(&Sp1PhaseState { alpha, r, c });
                    table.push(vec![
                        Cell::Num(alpha),
                        Cell::Num(r),
                        Cell::Num(f1),
                        Cell::Num(f2),
                    ]);
                }
            }
            let grid_path = dir.join(format!(
                "phase_portrait_c{}.{}",
                c,
                common.format.extension()
            ));
            table
                .write(&grid_path, common.format)
                .map_err(|e| format!("{}: {e}", grid_path.display()))?;
            // critical-curve polylines
            for (name, curve_fn) in [
                (
                    "alpha_c",
                    alpha_c as fn(f64, f64) -> spin7_core::Result<f64>,
                ),
                ("beta_c", beta_c as fn(f64, f64) -> spin7_core::Result<f64>),
            ] {
                let mut poly = Table::new(vec!["r", "alpha"]);
                for j in 0..(4 * nr) {
                    let r = r_max * (j as f64 + 0.5) / (4 * nr) as f64;
                    if let Ok(a) = curve_fn(r, c) {
                        poly.push(vec![Cell::Num(r), Cell::Num(a)]);
                    }
                }
                let path = dir.join(format!("{name}_c{}.{}", c, common.format.extension()));
                poly.write(&path, common.format)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
            }
            println!("wrote {}", grid_path.display());
            Ok(true)
        }
        Command::MomentMap {
            common,
            action,
            c,
            r,
            v,
            grid: (na, nb),
            extent,
        } => {
            let dir = common.out_dir();
            let (table, stem) = match action {
                MomentAction::Fibre => {
                    let mut t = Table::new(vec!["r", "nu"]);
                    match r {
                        Some(r0) => {
                            let nu = multi_moment_fibre(r0, c).map_err(|e| e.to_string())?;
                            t.push(vec![Cell::Num(r0), Cell::Num(nu)]);
                        }
                        None => {
                            // 1-D radial sweep: the first grid dimension
                            let n = na.max(2);
                            for j in 0..n {
                                let rr = extent * j as f64 / (n - 1) as f64;
                                let nu = multi_moment_fibre(rr, c).map_err(|e| e.to_string())?;
                                t.push(vec![Cell::Num(rr), Cell::Num(nu)]);
                            }
                        }
                    }
                    (t, "moment_fibre")
                }
                MomentAction::So3 => {
                    let mut t = Table::new(vec!["alpha", "u", "nu"]);
                    for i in 0..na {
                        let alpha = std::f64::consts::FRAC_PI_2 * (i as f64 + 0.5) / na as f64;
                        for j in 0..nb {
                            let u = extent * j as f64 / (nb - 1) as f64;
                            let nu = multi_moment_so3(alpha, u, v, c).map_err(|e| e.to_string())?;
                            t.push(vec![Cell::Num(alpha), Cell::Num(u), Cell::Num(nu)]);
                        }
                    }
                    (t, "moment_so3")
                }
                MomentAction::Sp1 => {
                    let mut t = Table::new(vec!["alpha", "r", "nu"]);
                    for i in 0..na {
                        let alpha = -std::f64::consts::FRAC_PI_2
                            + std::f64::consts::PI * (i as f64 + 0.5) / na as f64;
                        for j in 0..nb {
                            let rr = extent * j as f64 / (nb - 1) as f64;
                            let nu = multi_moment_sp1(alpha, rr, c).map_err(|e| e.to_string())?;
                            t.push(vec![Cell::Num(alpha), Cell::Num(rr), Cell::Num(nu)]);
                        }
                    }
                    (t, "moment_sp1")
                }
            };
            let path = dir.join(format!("{stem}_c{}.{}", c, common.format.extension()));
            table
                .write(&path, common.format)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            println!("wrote {}", path.display());
            Ok(true)
        }
    }
}

/// Per-sample Cayley residual on an SO(3) level set, at a fixed point of
/// the group orbit (the residual is orbit-invariant). None where the
/// sample sits on the chart boundary.
fn so3_eta_at(alpha: f64, u: f64, params: &SO3FibreParams) -> Option<f64> {
    if !(1e-6..=std::f64::consts::FRAC_PI_2 - 1e-9).contains(&alpha) || u <= 1e-12 {
        return None;
    }
    let s = (u * params.v0).sqrt();
    let t = (u / params.v0).sqrt();
    let p = ChartPointSO3 {
        alpha,
        beta: params.beta0,
        theta: 1.1,
        phi: 0.7,
        s,
        t,
        delta: params.delta0,
        gamma: 0.9,
        c: params.c,
    };
    so3_residual_at(&p).ok()
}

/// Rows (alpha, r, eta_residual, event) for an integrated Sp(1) fibre,
/// tagging the sample nearest each recorded event.
fn sp1_curve_table(curve: &FibreCurveSp1, jobs: usize) -> Table {
    let c = curve.launch.c;
    let residuals = pool::map_ordered(jobs, &curve.samples, |&(alpha, r)| {
        if alpha.abs() >= std::f64::consts::FRAC_PI_2 - 1e-4 || !(1e-3..=1e4).contains(&r) {
            return None;
        }
        sp1_residual_at(
            &Sp1PhaseState { alpha, r, c },
            [1.0, 0.0, 0.0, 0.0],
            [0.9, 1.1, 0.7],
        )
        .ok()
    });
    // attach each event to its nearest sample
    let mut tags: Vec<Option<String>> = vec![None; curve.samples.len()];
    for event in &curve.events {
        let (target, label): ((f64, f64), String) = match event {
            Sp1Event::CrossedAlphaC { alpha, r } => ((*alpha, *r), "crossed_alpha_c".into()),
            Sp1Event::CrossedBetaC { alpha, r } => ((*alpha, *r), "crossed_beta_c".into()),
            Sp1Event::ReachedPiHalf { r0, .. } => {
                ((std::f64::consts::FRAC_PI_2, *r0), "reached_pi_half".into())
            }
            Sp1Event::ReachedRMax { alpha, r } => ((*alpha, *r), "reached_r_max".into()),
            Sp1Event::ReachedNode => ((-std::f64::consts::FRAC_PI_2, 0.0), "reached_node".into()),
            Sp1Event::ExactSolution => ((curve.launch.alpha, curve.launch.r), "exact".into()),
        };
        let mut best = (f64::INFINITY, 0usize);
        for (i, &(a, r)) in curve.samples.iter().enumerate() {
            let d = (a - target.0).powi(2) + (r - target.1).powi(2);
            if d < best.0 {
                best = (d, i);
            }
        }
        tags[best.1] = Some(label);
    }
    let mut table = Table::new(vec!["alpha", "r", "eta_residual", "event"]);
    for (i, &(alpha, r)) in curve.samples.iter().enumerate() {
        table.push(vec![
            Cell::Num(alpha),
            Cell::Num(r),
            residuals[i].map_or(Cell::Empty, Cell::Num),
            tags[i].clone().map_or(Cell::Empty, Cell::Text),
        ]);
    }
    table
}

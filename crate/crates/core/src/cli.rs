//! Command-line front end. Every command writes its artifacts and a
//! `<command>.manifest` into the output directory (`sweep` uses its own
//! subdirectory so its reports can be fed to `asymptotics --reports`) and
//! echoes its main table to standard output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::asymptotics::{blowup_rescale, convergence_table, BlowupRecord};
use crate::config::{parse_config, RunConfig};
use crate::error::{Error, Result};
use crate::field::Field2D;
use crate::manifest::{ArtifactWriter, Manifest};
use crate::report::{report_from_text, report_to_text};
use crate::scalar_field::{c_tilde, shoot_soliton, soliton_constants, tau_formula, RadialProfile, SolitonConstants};
use crate::scaling::{build_path, compact_bump, path_max, PathOptions};
use crate::solver::{continuation_sweep, solve, SolveReport, SweepPoint};
use crate::verify::run_checks;

pub const THREADS_ENV: &str = "GP_EXCITED_THREADS";

/// Subdirectory of the output directory that receives `sweep` artifacts.
pub const SWEEP_DIR: &str = "sweep";

#[derive(Debug, Parser)]
#[command(name = "gp-excited", version, about = "Normalized excited states of the supercritical Gross-Pitaevskii equation")]
pub struct Cli {
    /// Directory for artifacts and manifests.
    #[arg(long, global = true, default_value = "gp-excited-out")]
    pub out: PathBuf,
    /// Worker threads; the GP_EXCITED_THREADS variable takes precedence.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Soliton constants per exponent.
    Constants {
        #[arg(long = "q-list", value_delimiter = ',', default_value = "2.05,2.1,2.2,2.5,3")]
        q_list: Vec<f64>,
        /// Interaction strength; defaults to half the critical mass.
        #[arg(long)]
        a: Option<f64>,
    },
    /// The ground state Q of `-Laplacian u + u = u^3` as a radial table.
    Groundstate {
        #[arg(long, default_value_t = 1e-3)]
        dr: f64,
    },
    /// Energies along the mountain-pass path.
    PathEnergy {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides `q` from the configuration.
        #[arg(long)]
        q: Option<f64>,
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// One excited state from a configuration file.
    Solve2d {
        #[arg(long)]
        config: PathBuf,
    },
    /// Continuation over decreasing exponents plus the blow-up table.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides `q_schedule` from the configuration.
        #[arg(long, value_delimiter = ',')]
        q: Option<Vec<f64>>,
    },
    /// Blow-up table from saved reports.
    Asymptotics {
        #[arg(long)]
        reports: PathBuf,
    },
    /// Runs the property suite and re-checks manifests in the output directory.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn thread_count(flag: Option<usize>) -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::Range { key: THREADS_ENV.into(), msg: format!("expected a positive integer, got `{v}`") }),
        },
        Err(_) => Ok(flag.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))),
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let threads = thread_count(cli.threads)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Range { key: "threads".into(), msg: e.to_string() })?;
    pool.install(|| dispatch(cli, threads))
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("cannot read config {}: {e}", p.display()))))?;
            parse_config(&text)
        }
    }
}

fn ground_and(q: f64) -> Result<(RadialProfile, RadialProfile, SolitonConstants)> {
    let ground = shoot_soliton(2.0, 1e-15)?;
    let profile = shoot_soliton(q, 1e-15)?;
    let consts = soliton_constants(&profile, &ground);
    Ok((ground, profile, consts))
}

fn e(x: f64) -> String {
    format!("{x:.16e}")
}

fn dispatch(cli: &Cli, threads: usize) -> Result<()> {
    let start = Instant::now();
    let name = match &cli.command {
        Command::Constants { .. } => "constants",
        Command::Groundstate { .. } => "groundstate",
        Command::PathEnergy { .. } => "path-energy",
        Command::Solve2d { .. } => "solve2d",
        Command::Sweep { .. } => "sweep",
        Command::Asymptotics { .. } => "asymptotics",
        Command::Verify { .. } => "verify",
    };
    let dir = match &cli.command {
        Command::Sweep { .. } => cli.out.join(SWEEP_DIR),
        _ => cli.out.clone(),
    };
    let mut w = ArtifactWriter::new(&dir, Manifest::new(name, threads))?;
    let mut failed = None;
    match &cli.command {
        Command::Constants { q_list, a } => constants(&mut w, q_list, *a)?,
        Command::Groundstate { dr } => groundstate(&mut w, *dr)?,
        Command::PathEnergy { config, q, samples } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(q) = q {
                cfg.q = *q;
            }
            cfg.validate()?;
            input_config(&mut w, config.as_deref(), &cfg);
            path_energy(&mut w, &cfg, *samples)?
        }
        Command::Solve2d { config } => {
            let cfg = load_config(Some(config))?;
            input_config(&mut w, Some(config), &cfg);
            solve2d(&mut w, &cfg)?
        }
        Command::Sweep { config, q } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(q) = q {
                cfg.q_schedule = q.clone();
            }
            cfg.validate()?;
            input_config(&mut w, config.as_deref(), &cfg);
            sweep(&mut w, &cfg)?
        }
        Command::Asymptotics { reports } => {
            w.manifest.inputs.push(("reports".into(), reports.display().to_string()));
            asymptotics(&mut w, reports)?
        }
        Command::Verify { config } => {
            let cfg = load_config(config.as_deref())?;
            input_config(&mut w, config.as_deref(), &cfg);
            failed = verify(&mut w, &cfg, &cli.out)?;
        }
    }
    w.manifest.wall_time = start.elapsed().as_secs_f64();
    w.finish()?;
    match failed {
        Some(n) => Err(Error::Domain(format!("{n} verification checks failed"))),
        None => Ok(()),
    }
}

fn input_config(w: &mut ArtifactWriter, path: Option<&Path>, cfg: &RunConfig) {
    if let Some(p) = path {
        w.manifest.inputs.push(("config_file".into(), p.display().to_string()));
    }
    for line in cfg.serialize().lines() {
        if let Some((k, v)) = line.split_once(" = ") {
            w.manifest.inputs.push((k.into(), v.into()));
        }
    }
}

fn constants(w: &mut ArtifactWriter, q_list: &[f64], a: Option<f64>) -> Result<()> {
    w.manifest.inputs.push(("q_list".into(), q_list.iter().map(|q| format!("{q:?}")).collect::<Vec<_>>().join(",")));
    let ground = shoot_soliton(2.0, 1e-15)?;
    let a_star = ground.norm2_sq();
    let a = a.unwrap_or(0.5 * a_star);
    w.manifest.inputs.push(("a".into(), e(a)));
    let mut csv = String::from("q,u0,norm2_sq,a_q_star,tau_q,c_tilde_q,grad_sq,pohozaev_res,decay_c,decay_rate\n");
    let (mut c_max, mut delta_min) = (0.0_f64, f64::INFINITY);
    for &q in q_list {
        if !(2.0..=4.0).contains(&q) {
            return Err(Error::Range { key: "q-list".into(), msg: format!("exponents must lie in [2, 4], got {q}") });
        }
        let p = shoot_soliton(q, 1e-15).map_err(|e| Error::AtExponent { q, source: Box::new(e) })?;
        let c = soliton_constants(&p, &ground);
        let (tau, ct) = if q > 2.0 {
            let t = tau_formula(a, c.a_q_star, q);
            (t, c_tilde(q, t))
        } else {
            (f64::NAN, f64::NAN)
        };
        let (dc, delta) = p.decay;
        c_max = c_max.max(dc);
        delta_min = delta_min.min(delta);
        writeln!(
            csv,
            "{q:?},{},{},{},{},{},{},{},{},{}",
            e(c.u0),
            e(c.norm2_sq),
            e(c.a_q_star),
            e(tau),
            e(ct),
            e(c.grad_sq),
            e(c.pohozaev_res),
            e(dc),
            e(delta)
        )
        .unwrap();
    }
    // Fitted tails u <= C e^{-delta r} share the bound (max C, min delta) over the listed exponents.
    writeln!(csv, "# common_decay_bound c={} delta={} exists={}", e(c_max), e(delta_min), delta_min > 0.0 && c_max.is_finite()).unwrap();
    w.write("constants.csv", csv.as_bytes())?;
    print!("{csv}");
    Ok(())
}

fn groundstate(w: &mut ArtifactWriter, dr: f64) -> Result<()> {
    if !(dr > 0.0 && dr <= 0.05) {
        return Err(Error::Range { key: "dr".into(), msg: format!("step must lie in (0, 0.05], got {dr}") });
    }
    w.manifest.inputs.push(("dr".into(), e(dr)));
    let opts = crate::scalar_field::ShootOptions { dr, ..Default::default() };
    let q = crate::scalar_field::shoot_soliton_with(2.0, opts)?;
    let (c, delta) = q.decay;
    let mut csv = String::from("r,u,du\n");
    for k in 0..q.r.len() {
        writeln!(csv, "{},{},{}", e(q.r[k]), e(q.values[k]), e(q.slopes[k])).unwrap();
    }
    w.write("groundstate.csv", csv.as_bytes())?;
    let summary = format!(
        "u0 = {}\na_star = {}\ngrad_sq = {}\nsecond_moment = {}\ndecay_c = {}\ndecay_rate = {}\nr_match = {}\n",
        e(q.u0),
        e(q.norm2_sq()),
        e(q.grad_sq()),
        e(q.radial_integral(|r, u, _| r * r * u * u) / q.norm2_sq()),
        e(c),
        e(delta),
        e(q.r_match)
    );
    w.write("groundstate.txt", summary.as_bytes())?;
    print!("{summary}");
    Ok(())
}

fn path_energy(w: &mut ArtifactWriter, cfg: &RunConfig, samples: usize) -> Result<()> {
    let (_, profile, consts) = ground_and(cfg.q)?;
    let params = cfg.params(consts.a_star)?;
    let opts = PathOptions { samples_per_segment: samples, ..PathOptions::default() };
    let x0 = cfg.seed_x0.unwrap_or([params.b1 * params.ring, 0.0]);
    let phi = compact_bump(0.5, 127)?;
    let path = build_path(&params, &phi, &profile, &consts, x0, opts)?;
    let m = path_max(&path)?;
    let mut csv = String::from("segment,param,t,energy,mass,grad_sq\n");
    for s in &m.samples {
        writeln!(csv, "{},{},{},{},{},{}", s.segment.name(), e(s.param), e(s.t), e(s.energy), e(s.mass), e(s.grad_sq)).unwrap();
    }
    writeln!(
        csv,
        "# t_star={} E_max={} lower_bound={} upper_bound_stmt={} upper_bound_proof={} scaled_gap={} segment={}",
        e(m.t_q),
        e(m.e_max),
        e(m.lower_bound),
        e(m.upper_bound_stmt),
        e(m.upper_bound_proof),
        e(m.scaled_gap),
        m.segment.name()
    )
    .unwrap();
    w.write("path_energy.csv", csv.as_bytes())?;
    print!("{csv}");
    Ok(())
}

fn write_report(w: &mut ArtifactWriter, report: &SolveReport, params: &crate::field::ProblemParams) -> Result<String> {
    let stem = format!("report_q{:?}", report.q);
    let text = report_to_text(report, params);
    w.write(&format!("{stem}.txt"), text.as_bytes())?;
    let mut dump = Vec::new();
    report.u.write_dump(&mut dump)?;
    w.write(&format!("{stem}.field"), &dump)?;
    Ok(text)
}

fn solve2d(w: &mut ArtifactWriter, cfg: &RunConfig) -> Result<()> {
    let (_, profile, consts) = ground_and(cfg.q)?;
    let params = cfg.params(consts.a_star)?;
    let report = solve(&cfg.solve_config(&params), &params, &profile, &consts)?;
    let text = write_report(w, &report, &params)?;
    print!("{text}");
    Ok(())
}

fn blowup_csv(rows: &[BlowupRecord]) -> String {
    let mut csv = String::from("q,tau_q,eps,grad_ratio,ring_defect,mu_scaled,profile_err_L2,beta_hat,bracket_verdict\n");
    for r in rows {
        writeln!(
            csv,
            "{:?},{},{},{},{},{},{},{},{}",
            r.q,
            e(r.tau),
            e(r.eps),
            e(r.grad_ratio),
            e(r.ring_defect),
            e(r.mu_scaled),
            e(r.profile_err_l2),
            e(r.beta_hat),
            r.bracket
        )
        .unwrap();
    }
    csv
}

fn trend_summary(rows: Vec<BlowupRecord>) -> Result<String> {
    if rows.len() < 3 {
        return Ok(String::new());
    }
    let table = convergence_table(rows)?;
    let mut s = format!("C1 = {}\nC2 = {}\n", e(table.c1), e(table.c2));
    for t in &table.trends {
        writeln!(s, "trend_{} = {} ({})", t.column, if t.ok { "ok" } else { "violated" }, t.detail).unwrap();
    }
    Ok(s)
}

fn sweep(w: &mut ArtifactWriter, cfg: &RunConfig) -> Result<()> {
    let ground = shoot_soliton(2.0, 1e-15)?;
    let points = cfg
        .q_schedule
        .iter()
        .map(|&q| {
            let profile = shoot_soliton(q, 1e-15).map_err(|e| Error::AtExponent { q, source: Box::new(e) })?;
            let consts = soliton_constants(&profile, &ground);
            Ok(SweepPoint { profile, consts })
        })
        .collect::<Result<Vec<_>>>()?;
    let params = cfg.params_at(cfg.q_schedule[0], ground.norm2_sq())?;
    let reports = continuation_sweep(&cfg.solve_config(&params), &params, &points)?;
    let mut rows = Vec::new();
    for r in &reports {
        let p = params.with_q(r.q)?;
        write_report(w, r, &p)?;
        rows.push(blowup_rescale(r, &ground, &p)?);
    }
    let csv = blowup_csv(&rows);
    w.write("asymptotics.csv", csv.as_bytes())?;
    let summary = trend_summary(rows)?;
    if !summary.is_empty() {
        w.write("trends.txt", summary.as_bytes())?;
    }
    print!("{csv}{summary}");
    Ok(())
}

/// Loads every `report_q*.txt` with its `.field` companion from `dir`, sorted by decreasing `q`.
pub fn load_reports(dir: &Path) -> Result<Vec<(crate::field::ProblemParams, SolveReport)>> {
    let entries = fs::read_dir(dir)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("cannot read report directory {}: {e}", dir.display()))))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("report_q") && n.ends_with(".txt"))
        })
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        let text = fs::read_to_string(&p)?;
        let field = fs::File::open(p.with_extension("field"))?;
        let u = Field2D::read_dump(std::io::BufReader::new(field))?;
        out.push(report_from_text(&text, u)?);
    }
    if out.is_empty() {
        return Err(Error::Range { key: "reports".into(), msg: format!("no report_q*.txt files in {}", dir.display()) });
    }
    out.sort_by(|a, b| b.1.q.total_cmp(&a.1.q));
    Ok(out)
}

fn asymptotics(w: &mut ArtifactWriter, dir: &Path) -> Result<()> {
    let ground = shoot_soliton(2.0, 1e-15)?;
    let rows = load_reports(dir)?
        .iter()
        .map(|(p, r)| blowup_rescale(r, &ground, p))
        .collect::<Result<Vec<_>>>()?;
    let csv = blowup_csv(&rows);
    w.write("asymptotics.csv", csv.as_bytes())?;
    let summary = trend_summary(rows)?;
    print!("{csv}{summary}");
    Ok(())
}

fn verify(w: &mut ArtifactWriter, cfg: &RunConfig, out: &Path) -> Result<Option<usize>> {
    let checks = run_checks(cfg, Some(out))?;
    let mut table = String::from("check,status,detail\n");
    for c in &checks {
        writeln!(table, "{},{},{}", c.name, if c.ok { "pass" } else { "FAIL" }, c.detail.replace(',', ";")).unwrap();
    }
    w.write("verify.csv", table.as_bytes())?;
    print!("{table}");
    let failed = checks.iter().filter(|c| !c.ok).count();
    Ok((failed > 0).then_some(failed))
}

//! `zeta-ladders` command-line front end.
//!
//! Exit codes: 0 success, 2 usage error, 3 domain or precondition error,
//! 4 verification failure. Results go to stdout, diagnostics to stderr.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use zeta_ladders::config::{load_run_config, OutFormat, RunConfig};
use zeta_ladders::ladder::{self, LadderParams};
use zeta_ladders::report::{fmt_num, parse_config_report, to_json};
use zeta_ladders::rs_core::{self, CriticalT};
use zeta_ladders::{argmod, moments, zeros, Error, ErrorKind, ZeroStore};

#[derive(Parser)]
#[command(
    name = "zeta-ladders",
    version,
    about = "Critical-line toolkit for the Riemann zeta function"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Flat key = value configuration file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Zero store file; without one, zeros are scanned as needed.
    #[arg(long, global = true, env = "ZETA_LADDERS_STORE")]
    store: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<String>,
    /// json or csv.
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    epsilon: Option<String>,
    #[arg(long, global = true)]
    l: Option<String>,
    #[arg(long, global = true)]
    k: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long = "z-floor", global = true)]
    z_floor: Option<String>,
    #[arg(long = "delta-gap", global = true)]
    delta_gap: Option<String>,
    #[arg(long = "residual-cap", global = true)]
    residual_cap: Option<String>,
    #[arg(long, global = true)]
    budget: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Hardy's Z(t).
    Z { t: f64 },
    /// Riemann-Siegel theta(t).
    Theta { t: f64 },
    /// Zero scanning, verification and import.
    #[command(subcommand)]
    Zeros(ZerosCmd),
    /// S(t) = N(t) - theta(t)/pi - 1.
    S { t: f64 },
    /// S1(T), or `s1 roots <lo> <hi>` for the sign changes of S1.
    S1 {
        #[arg(num_args = 1..=3, allow_negative_numbers = true)]
        args: Vec<String>,
    },
    /// Mean of arg zeta(1/2 + it) over [a, b].
    Mean { a: f64, b: f64 },
    #[command(subcommand)]
    Moments(MomentsCmd),
    /// The oscillatory product system and local oscillators.
    #[command(subcommand)]
    Qsys(QsysCmd),
    #[command(subcommand)]
    Ladder(LadderCmd),
    /// CSV data for plotting.
    #[command(subcommand)]
    Plotdata(PlotCmd),
}

#[derive(Subcommand)]
enum ZerosCmd {
    /// Ordinates in (lo, hi].
    Scan {
        lo: f64,
        hi: f64,
        /// Also write a zero store verified to `hi` (requires lo <= 10).
        #[arg(long)]
        write: Option<PathBuf>,
    },
    /// Turing-style verification of the store up to its watermark.
    Verify,
    /// Parse and verify a zero table.
    Import {
        path: PathBuf,
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MomentsCmd {
    /// Selberg window moment(s); several heights give a stability table.
    Selberg {
        #[arg(required = true)]
        t: Vec<f64>,
    },
    /// (1/(U ln T)) int_T^{T+U} |Z|^2.
    Hl { t: f64, u: f64 },
}

#[derive(Subcommand)]
enum QsysCmd {
    /// prod |Z(x_r) / Z(y_r)|.
    Eval {
        #[arg(long, value_delimiter = ',', required = true)]
        xs: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        ys: Vec<f64>,
    },
    /// Oscillator bank at base x.
    Bank { x: f64 },
    /// Spectral synthesis at n points of [x, x + V] against Z.
    Synth { x: f64, v: f64, n: usize },
}

#[derive(Subcommand)]
enum LadderCmd {
    Segments {
        t: f64,
    },
    /// Search for a factorization configuration and print its report.
    Search {
        t: f64,
    },
    /// Re-verify a configuration report.
    Verify {
        report: PathBuf,
    },
    /// Search, verify and print the metamorphosis document.
    Report {
        t: f64,
    },
}

#[derive(Subcommand)]
enum PlotCmd {
    /// t, S1(t) on [lo, hi] with the given step.
    S1 { lo: f64, hi: f64, step: f64 },
}

enum Failure {
    Usage(String),
    Lib(Error),
    /// A verification failure that still has a payload for stdout.
    WithPayload(Error, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Out = Result<String, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

struct Ctx {
    cfg: RunConfig,
}

impl Ctx {
    fn new(g: &Global) -> Result<Self, Failure> {
        let mut cfg = match &g.config {
            Some(p) => load_run_config(p).map_err(|e| usage(format!("{}: {e}", p.display())))?,
            None => RunConfig::default(),
        };
        let flags = [
            ("threads", &g.threads),
            ("out_format", &g.format),
            ("epsilon", &g.epsilon),
            ("l", &g.l),
            ("k", &g.k),
            ("seed", &g.seed),
            ("z_floor", &g.z_floor),
            ("delta_gap", &g.delta_gap),
            ("residual_cap", &g.residual_cap),
            ("budget", &g.budget),
        ];
        for (key, v) in flags {
            if let Some(v) = v {
                cfg.set(key, v).map_err(usage)?;
            }
        }
        if let Some(p) = &g.store {
            cfg.zero_store_path = Some(p.clone());
        }
        Ok(Ctx { cfg })
    }

    fn params(&self) -> LadderParams {
        self.cfg.ladder_params()
    }

    fn csv(&self) -> bool {
        self.cfg.out_format == OutFormat::Csv
    }

    /// The configured store, or a fresh scan, covering height `need`.
    fn store(&self, need: f64) -> Result<ZeroStore, Failure> {
        let st = match &self.cfg.zero_store_path {
            Some(p) => {
                zeros::import_table(p).map_err(|e| Failure::Lib(Error::Domain(format!("{}: {e}", p.display()))))?
            }
            None => ZeroStore::scan(need.max(rs_core::T_MIN) + 1.0)?,
        };
        if st.verified_to() < need {
            return Err(Error::BeyondWatermark {
                t: need,
                verified_to: st.verified_to(),
            }
            .into());
        }
        Ok(st)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = Ctx::new(&cli.global).and_then(|ctx| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(ctx.cfg.threads)
            .build_global()
            .map_err(|e| usage(e.to_string()))?;
        run(&ctx, &cli.cmd)
    });
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => report_error(&e),
        Err(Failure::WithPayload(e, payload)) => {
            print!("{payload}");
            report_error(&e)
        }
    }
}

fn report_error(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e.kind() {
        ErrorKind::Domain => ExitCode::from(3),
        ErrorKind::Verification => ExitCode::from(4),
    }
}

fn line(x: f64) -> String {
    format!("{}\n", fmt_num(x))
}

fn ordered(lo: f64, hi: f64) -> Result<(), Failure> {
    if lo < hi {
        Ok(())
    } else {
        Err(usage(format!("empty or inverted range [{lo}, {hi}]")))
    }
}

fn run(ctx: &Ctx, cmd: &Cmd) -> Out {
    match cmd {
        Cmd::Z { t } => Ok(line(rs_core::rs_z(CriticalT::new(*t)?))),
        Cmd::Theta { t } => Ok(line(rs_core::theta(CriticalT::new(*t)?))),
        Cmd::Zeros(z) => run_zeros(ctx, z),
        Cmd::S { t } => Ok(line(argmod::s(*t, &ctx.store(*t)?)?)),
        Cmd::S1 { args } => run_s1(ctx, args),
        Cmd::Mean { a, b } => {
            ordered(*a, *b)?;
            Ok(line(argmod::mean_arg(*a, *b, &ctx.store(*b)?)?))
        }
        Cmd::Moments(m) => run_moments(ctx, m),
        Cmd::Qsys(q) => run_qsys(ctx, q),
        Cmd::Ladder(l) => run_ladder(ctx, l),
        Cmd::Plotdata(PlotCmd::S1 { lo, hi, step }) => {
            ordered(*lo, *hi)?;
            if !(*step > 0.0) {
                return Err(usage("step must be positive"));
            }
            let st = ctx.store(*hi)?;
            let mut out = String::from("t,S1\n");
            let n = ((hi - lo) / step).floor() as usize;
            for i in 0..=n {
                let t = lo + step * i as f64;
                let _ = writeln!(out, "{},{}", fmt_num(t), fmt_num(argmod::s1(t, &st)?));
            }
            Ok(out)
        }
    }
}

fn run_zeros(ctx: &Ctx, cmd: &ZerosCmd) -> Out {
    match cmd {
        ZerosCmd::Scan { lo, hi, write } => {
            ordered(*lo, *hi)?;
            let ords = if let Some(path) = write {
                if *lo > rs_core::T_MIN {
                    return Err(usage("--write needs a complete scan (lo <= 10)"));
                }
                let st = ZeroStore::scan(*hi)?;
                st.write(path)?;
                st.ordinates().iter().copied().filter(|&g| g > *lo).collect()
            } else {
                zeros::scan_zeros(*lo, *hi)?
            };
            if ctx.csv() {
                let mut out = String::from("gamma\n");
                for g in &ords {
                    let _ = writeln!(out, "{}", fmt_num(*g));
                }
                Ok(out)
            } else {
                Ok(to_json(
                    &json!({"lo": lo, "hi": hi, "count": ords.len(), "ordinates": ords}),
                )?)
            }
        }
        ZerosCmd::Verify => {
            let st = ctx.store(0.0)?;
            verified(&st)
        }
        ZerosCmd::Import { path, write } => {
            let st = zeros::import_table(path)?;
            if let Some(w) = write {
                st.write(w)?;
            }
            verified(&st)
        }
    }
}

fn verified(st: &ZeroStore) -> Out {
    let rep = zeros::verify_count_report(st, st.verified_to());
    let payload = to_json(&json!({
        "count": st.len(),
        "verified_to": st.verified_to(),
        "source": st.source(),
        "report": rep,
    }))?;
    match &rep.failure {
        None => Ok(payload),
        Some(f) => Err(Failure::WithPayload(
            Error::Verification(format!("{:?} check failed at {}: {}", f.check, f.at, f.detail)),
            payload,
        )),
    }
}

fn run_s1(ctx: &Ctx, args: &[String]) -> Out {
    let num = |s: &str| s.parse::<f64>().map_err(|_| usage(format!("not a number: '{s}'")));
    match args {
        [t] => Ok(line(argmod::s1(num(t)?, &ctx.store(num(t)?)?)?)),
        [cmd, lo, hi] if cmd == "roots" => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            ordered(lo, hi)?;
            let roots = argmod::find_mu_roots(lo, hi, &ctx.store(hi)?)?;
            if ctx.csv() {
                let mut out = String::from("mu,lo,hi\n");
                for (m, (a, b)) in roots.roots.iter().zip(&roots.brackets) {
                    let _ = writeln!(out, "{},{},{}", fmt_num(*m), fmt_num(*a), fmt_num(*b));
                }
                Ok(out)
            } else {
                Ok(to_json(&roots)?)
            }
        }
        _ => Err(usage("expected `s1 <T>` or `s1 roots <lo> <hi>`")),
    }
}

fn run_moments(ctx: &Ctx, cmd: &MomentsCmd) -> Out {
    let (l, eps) = (ctx.cfg.l, ctx.cfg.epsilon);
    match cmd {
        MomentsCmd::Selberg { t } => {
            let top = t.iter().fold(0.0f64, |m, &x| m.max(x + moments::window_width(x, eps)));
            let st = ctx.store(top)?;
            let rep = moments::moment_stability(t, l, eps, &st)?;
            match (ctx.csv(), rep.rows.as_slice()) {
                (true, _) => Ok(rep.to_csv()),
                (false, [one]) => Ok(to_json(one)?),
                (false, _) => Ok(to_json(&rep)?),
            }
        }
        MomentsCmd::Hl { t, u } => Ok(line(moments::hl_second_moment(*t, *u, &ctx.store(t + u)?)?)),
    }
}

fn run_qsys(ctx: &Ctx, cmd: &QsysCmd) -> Out {
    match cmd {
        QsysCmd::Eval { xs, ys } => Ok(line(ladder::q_product(xs, ys, ctx.cfg.z_floor)?)),
        QsysCmd::Bank { x } => {
            let bank = rs_core::make_bank(CriticalT::new(*x)?);
            if ctx.csv() {
                let mut out = String::from("n,omega,amplitude\n");
                for (i, (w, a)) in bank.frequencies.iter().zip(&bank.amplitudes).enumerate() {
                    let _ = writeln!(out, "{},{},{}", i + 1, fmt_num(*w), fmt_num(*a));
                }
                Ok(out)
            } else {
                Ok(to_json(&json!({
                    "base": bank.base.get(),
                    "term_count": bank.term_count,
                    "frequencies": bank.frequencies,
                    "amplitudes": bank.amplitudes,
                    "phase_const": bank.phase_const,
                    "remainder_bound": bank.remainder_bound,
                    "window": bank.window(),
                    "err_spec": bank.err_spec(),
                }))?)
            }
        }
        QsysCmd::Synth { x, v, n } => {
            if *n < 2 {
                return Err(usage("need at least 2 points"));
            }
            let bank = rs_core::make_bank(CriticalT::new(*x)?);
            let mut rows = Vec::with_capacity(*n);
            for i in 0..*n {
                let t = x + v * i as f64 / (*n - 1) as f64;
                let s = bank.spectral_z(t)?;
                let z = rs_core::rs_z(CriticalT::new(t)?);
                rows.push((t, s, z));
            }
            if ctx.csv() {
                let mut out = String::from("t,spectral_z,rs_z,diff\n");
                for (t, s, z) in rows {
                    let _ = writeln!(out, "{},{},{},{}", fmt_num(t), fmt_num(s), fmt_num(z), fmt_num(s - z));
                }
                Ok(out)
            } else {
                let max_diff = rows.iter().map(|(_, s, z)| (s - z).abs()).fold(0.0, f64::max);
                Ok(to_json(&json!({
                    "base": x,
                    "window": v,
                    "err_spec": bank.err_spec(),
                    "max_abs_diff": max_diff,
                    "t": rows.iter().map(|r| r.0).collect::<Vec<_>>(),
                    "spectral_z": rows.iter().map(|r| r.1).collect::<Vec<_>>(),
                    "rs_z": rows.iter().map(|r| r.2).collect::<Vec<_>>(),
                }))?)
            }
        }
    }
}

/// Everything the search and verification at height `t` need.
struct LadderRun {
    store: ZeroStore,
    est: moments::MomentEstimate,
    roots: argmod::RootList,
}

fn ladder_inputs(ctx: &Ctx, t: f64, l: u32, eps: f64, k: usize) -> Result<LadderRun, Failure> {
    let chain = ladder::build_segments(t, eps, k)?;
    let store = ctx.store(chain.segment(k).1)?;
    let est = moments::selberg_moment(t, l, eps, &store)?;
    let roots = argmod::find_mu_roots(0.0, t + est.h, &store)?;
    Ok(LadderRun { store, est, roots })
}

fn search(ctx: &Ctx, t: f64) -> Result<(LadderRun, ladder::LadderConfiguration), Failure> {
    let k = ctx.cfg.k;
    let run = ladder_inputs(ctx, t, ctx.cfg.l, ctx.cfg.epsilon, k)?;
    let p = ctx.params();
    match ladder::search_configuration(t, ctx.cfg.l, ctx.cfg.epsilon, k, &run.est, &run.roots, &run.store, &p) {
        Ok(cfg) => Ok((run, cfg)),
        Err(Error::NoConfiguration { best }) => {
            let payload = to_json(&*best)?;
            Err(Failure::WithPayload(Error::NoConfiguration { best }, payload))
        }
        Err(e) => Err(e.into()),
    }
}

fn run_ladder(ctx: &Ctx, cmd: &LadderCmd) -> Out {
    let p = ctx.params();
    match cmd {
        LadderCmd::Segments { t } => Ok(to_json(&ladder::build_segments(*t, ctx.cfg.epsilon, ctx.cfg.k)?)?),
        LadderCmd::Search { t } => {
            let (run, cfg) = search(ctx, *t)?;
            let fac = ladder::verify_factorization(&cfg, &run.roots, &run.store, &p)?;
            Ok(ladder::config_report(&cfg, &fac).to_json()?)
        }
        LadderCmd::Verify { report } => {
            let text = std::fs::read_to_string(report).map_err(Error::from)?;
            let rep = parse_config_report(&text)?;
            let cfg = ladder::LadderConfiguration::from_report(&rep);
            let run = ladder_inputs(ctx, rep.t, rep.l, rep.epsilon, rep.k)?;
            let fac = ladder::factorization_report(&cfg, &run.roots, &run.store, &p)?;
            let mut failures = fac.failures.clone();
            let recomputed = ladder::config_report(&cfg, &fac);
            for (name, a, b) in [
                ("mu_kbar", rep.mu_kbar, recomputed.mu_kbar),
                ("mean_0_alpha0", rep.mean_0_alpha0, recomputed.mean_0_alpha0),
                (
                    "mean_mukbar_alpha0",
                    rep.mean_mukbar_alpha0,
                    recomputed.mean_mukbar_alpha0,
                ),
                ("c_hat", rep.c_hat, run.est.c_hat),
            ] {
                if !((a - b).abs() <= 1e-9 * b.abs().max(1e-300)) {
                    failures.push(format!("stored {name} = {a} differs from recomputed {b}"));
                }
            }
            for (name, a, b) in [
                ("gaps_alpha", &rep.gaps_alpha, &recomputed.gaps_alpha),
                ("gaps_beta", &rep.gaps_beta, &recomputed.gaps_beta),
            ] {
                if a.iter().zip(b).any(|(x, y)| !((x - y).abs() <= 1e-9 * y.abs())) {
                    failures.push(format!("stored {name} inconsistent with nodes"));
                }
            }
            let payload = to_json(&json!({ "identities": fac, "failures": failures }))?;
            match failures.first() {
                None => Ok(payload),
                Some(f) => Err(Failure::WithPayload(Error::Verification(f.clone()), payload)),
            }
        }
        LadderCmd::Report { t } => {
            let (run, cfg) = search(ctx, *t)?;
            ladder::verify_factorization(&cfg, &run.roots, &run.store, &p)?;
            Ok(to_json(&ladder::metamorphosis_report(&cfg, &p)?)?)
        }
    }
}

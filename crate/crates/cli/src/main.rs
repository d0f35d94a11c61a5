use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use ckp_core::brackets::atable::{generating_atable, atable_closed};
use ckp_core::centralinv::{sweep, PipelineTables};
use ckp_core::frobenius::{flat_chart, frob_point, pencil_check, FlatChart, PencilReport};
use ckp_core::hierarchy::{flow_with, FlowResult, Truncation};
use ckp_core::jetring::DiffPoly;

mod config;
mod report;
mod suites;

use config::{Format, NRange, RunConfig, Suite, Tolerances};
use report::Report;

#[derive(Parser)]
#[command(name = "ckp", version, about = "Constrained KP hierarchy: flows, brackets and central invariants")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the t_k flow of the hierarchy.
    Flows(FlowsArgs),
    /// Run the verification suites.
    Verify(VerifyArgs),
    /// Central invariants at seeded sample points.
    Cinv(CinvArgs),
    /// Coefficients A_{k,0;a} of the second bracket.
    Atable(AtableArgs),
    /// Frobenius manifold checks at seeded sample points.
    Frobenius(FrobArgs),
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the output to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlowsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: u32,
    /// Epsilon order E (default max(4, k)).
    #[arg(long)]
    eps_order: Option<u32>,
    /// Resolvent depth K (default k + 4).
    #[arg(long)]
    depth: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    /// JSON file with a RunConfig; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Suites to run (repeatable or comma separated); all by default.
    #[arg(long, value_enum, value_delimiter = ',')]
    suite: Vec<Suite>,
    /// `n`, `lo..hi` or `lo..=hi`, both ends inclusive.
    #[arg(long)]
    n: Option<NRange>,
    #[arg(long)]
    kmax: Option<u32>,
    #[arg(long)]
    eps_order: Option<u32>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol_closed: Option<f64>,
    #[arg(long)]
    tol_pipeline: Option<f64>,
    #[arg(long)]
    tol_frobenius: Option<f64>,
    #[arg(long)]
    tol_oracle: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CinvArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 25)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Also evaluate through the generated A-tables.
    #[arg(long)]
    pipeline: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct AtableArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    a: u8,
    #[arg(long, default_value_t = 2)]
    kmax: u32,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct FrobArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

/// Errors that should exit with status 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn emit(output: &Output, text: String, json: impl FnOnce() -> Result<String>) -> Result<()> {
    let body = match output.format.unwrap_or(Format::Text) {
        Format::Text => text,
        Format::Json => json()? + "\n",
    };
    match &output.out {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Term {
    coeff: String,
    monomial: String,
}

#[derive(Serialize)]
struct Velocity {
    field: String,
    /// Coefficients of `eps^0, eps^1, ...`.
    eps: Vec<Vec<Term>>,
}

fn terms(d: &DiffPoly) -> Vec<Term> {
    d.terms()
        .map(|(m, c)| Term { coeff: c.to_string(), monomial: m.to_string() })
        .collect()
}

fn flow_json(f: &FlowResult, trunc: Truncation) -> Result<String> {
    #[derive(Serialize)]
    struct Out {
        schema: u32,
        n: usize,
        k: u32,
        truncation: Truncation,
        velocities: Vec<Velocity>,
    }
    let velocities = f
        .velocities
        .iter()
        .map(|(fid, v)| Velocity { field: fid.name(), eps: v.coeffs().iter().map(terms).collect() })
        .collect();
    Ok(serde_json::to_string_pretty(&Out { schema: 1, n: f.n, k: f.k, truncation: trunc, velocities })?)
}

fn cmd_flows(a: FlowsArgs) -> Result<bool> {
    if a.k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    let base = Truncation::for_flow(a.k);
    let trunc = Truncation { depth: a.depth.unwrap_or(base.depth), eps_order: a.eps_order.unwrap_or(base.eps_order) };
    let f = flow_with(a.n, a.k, trunc)?;
    emit(&a.output, f.render_eps_one(), || flow_json(&f, trunc))?;
    Ok(true)
}

fn verify_config(a: &VerifyArgs) -> Result<RunConfig> {
    let mut c = match &a.config {
        Some(p) => {
            let s = std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&s).map_err(|e| usage(format!("{}: {e}", p.display())))?
        }
        None => RunConfig::default(),
    };
    if !a.suite.is_empty() {
        let mut s = a.suite.clone();
        s.sort();
        s.dedup();
        c.suites = s;
    }
    c.n = a.n.unwrap_or(c.n);
    c.kmax = a.kmax.unwrap_or(c.kmax);
    c.eps_order = a.eps_order.unwrap_or(c.eps_order);
    c.depth = a.depth.unwrap_or(c.depth);
    c.samples = a.samples.unwrap_or(c.samples);
    c.seed = a.seed.unwrap_or(c.seed);
    let t = c.tol;
    c.tol = Tolerances {
        closed: a.tol_closed.unwrap_or(t.closed),
        pipeline: a.tol_pipeline.unwrap_or(t.pipeline),
        frobenius: a.tol_frobenius.unwrap_or(t.frobenius),
        oracle: a.tol_oracle.unwrap_or(t.oracle),
    };
    c.format = a.output.format.unwrap_or(c.format);
    c.out = a.output.out.clone().or(c.out);
    c.validate().map_err(usage)?;
    Ok(c)
}

fn cmd_verify(a: VerifyArgs) -> Result<bool> {
    let cfg = verify_config(&a)?;
    let report = Report::new(cfg.clone(), suites::run(&cfg));
    let output = Output { format: Some(cfg.format), out: cfg.out.clone() };
    emit(&output, report.render_text(), || Ok(serde_json::to_string_pretty(&report)?))?;
    Ok(report.pass)
}

fn cmd_cinv(a: CinvArgs) -> Result<bool> {
    if a.samples == 0 {
        return Err(usage("--samples must be positive"));
    }
    let tables = if a.pipeline { Some(PipelineTables::new(a.n)?) } else { None };
    let rows = sweep(a.n, a.samples, a.seed, tables.as_ref(), Tolerances::default().closed)?;
    let pass = rows.iter().all(|r| r.max_dev_closed <= 1e-9 && r.max_dev_pipeline.map_or(true, |d| d <= 1e-7));
    let mut text = String::new();
    for (i, r) in rows.iter().enumerate() {
        let cs: Vec<String> = r.c.iter().map(|c| format!("{:.12}", c[0])).collect();
        text.push_str(&format!("#{i} c = [{}] max_dev = {:.2e}", cs.join(", "), r.max_dev_closed));
        if let Some(p) = r.max_dev_pipeline {
            text.push_str(&format!(" pipeline = {p:.2e}"));
        }
        text.push('\n');
    }
    #[derive(Serialize)]
    struct Out<'a> {
        schema: u32,
        n: usize,
        samples: usize,
        seed: u64,
        rows: &'a [ckp_core::centralinv::SweepRow],
    }
    emit(&a.output, text, || {
        Ok(serde_json::to_string_pretty(&Out { schema: 1, n: a.n, samples: a.samples, seed: a.seed, rows: &rows })?)
    })?;
    Ok(pass)
}

fn cmd_atable(a: AtableArgs) -> Result<bool> {
    let t = generating_atable(a.n, a.a, a.kmax)?;
    let matches: Vec<bool> = t.entries.iter().enumerate().map(|(k, e)| *e == atable_closed(a.n, a.a, k as u32)).collect();
    let mut text = String::new();
    for (k, e) in t.entries.iter().enumerate() {
        text.push_str(&format!("A_{{{k},0;{}}} = {e}    [closed form: {}]\n", a.a, if matches[k] { "match" } else { "MISMATCH" }));
    }
    #[derive(Serialize)]
    struct Out {
        schema: u32,
        table: ckp_core::brackets::atable::ATableSerial,
        matches_closed_form: Vec<bool>,
        parity: bool,
        diagonal_regular: bool,
    }
    let out = Out {
        schema: 1,
        table: t.to_serial(),
        matches_closed_form: matches.clone(),
        parity: t.parity_holds(),
        diagonal_regular: t.diagonal_regular(),
    };
    emit(&a.output, text, || Ok(serde_json::to_string_pretty(&out)?))?;
    Ok(matches.iter().all(|m| *m) && out.parity && out.diagonal_regular)
}

fn cmd_frobenius(a: FrobArgs) -> Result<bool> {
    if a.samples < 2 {
        return Err(usage("--samples must be at least 2"));
    }
    #[derive(Serialize)]
    struct Row {
        point: ckp_core::centralinv::SamplePoint,
        #[serde(serialize_with = "ser_mat")]
        metric: Vec<Vec<ckp_core::numkit::Scalar>>,
        associative: bool,
        pencil: PencilReport,
    }
    fn ser_mat<S: serde::Serializer>(m: &[Vec<ckp_core::numkit::Scalar>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
    }
    #[derive(Serialize)]
    struct Out {
        schema: u32,
        n: usize,
        seed: u64,
        rows: Vec<Row>,
        flat: FlatChart,
    }
    let points = suites::frobenius_points(a.n, a.samples, a.seed).map_err(anyhow::Error::msg)?;
    let mut rows = Vec::new();
    let mut pass = true;
    let mut text = String::new();
    for p in &points {
        let fp = frob_point(p)?;
        let fr = ckp_core::centralinv::canonical_frame(p, &ckp_core::centralinv::Gates::sampling())?;
        let pencil = pencil_check(&fp, &fr)?;
        pass &= fp.associative() && pencil.ok(1e-8);
        text.push_str(&format!(
            "metric = {:?} associative = {} pencil root_dev = {:.2e} diagonal_dev = {:.2e}\n",
            fp.metric.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            fp.associative(),
            pencil.root_dev,
            pencil.diagonal_dev
        ));
        rows.push(Row { point: p.clone(), metric: fp.metric.clone(), associative: fp.associative(), pencil });
    }
    let flat = flat_chart(&points)?;
    pass &= flat.eta_constant;
    text.push_str(&format!(
        "eta = {:?} constant = {}\n",
        flat.eta.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        flat.eta_constant
    ));
    let out = Out { schema: 1, n: a.n, seed: a.seed, rows, flat };
    emit(&a.output, text, || Ok(serde_json::to_string_pretty(&out)?))?;
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Flows(a) => cmd_flows(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Cinv(a) => cmd_cinv(a),
        Cmd::Atable(a) => cmd_atable(a),
        Cmd::Frobenius(a) => cmd_frobenius(a),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

//! `isi`: sampling, decomposition, maps, statistics and verification for
//! 3D Ising interfaces.
//!
//! Exit codes: 0 ok, 1 usage, 2 precondition (bad input, failed
//! requirement), 3 verification failure.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use isi_cli::config::{echo, merge, parse_box, parse_face, parse_range};
use isi_cli::verify::{self, Level, Suite};
use isi_core::interface::Interface;
use isi_core::lattice::{BoxDims, Coord};
use isi_core::maps::{is_isolated, phi_iso_with_witness, psi_delete, witness_reconstruct, Frame, IsoParams};
use isi_core::pillars::{increments, Pillar};
use isi_core::sampler::{for_each_conditional, for_each_interface, Constraint, Schedule};
use isi_core::spins::SpinConfig;
use isi_core::stats::{
    self, deep_faces, gamma, gamma_in_band, m_star, max_stats, pillar_tail, AlphaTable, Provenance, TailTable,
};
use isi_core::walls::{decompose, WallCollectionFile};
use isi_core::IsiError;

#[derive(Parser)]
#[command(name = "isi", version, about = "3D Ising interfaces under Dobrushin boundary conditions")]
struct Cli {
    /// JSON config; its keys are the long flag names with underscores.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample interfaces of the unconditional box.
    Sample(SampleArgs),
    /// Sample interfaces conditioned on exterior walls.
    ConditionalSample(SampleArgs),
    /// Walls and ceilings of an interface.
    Decompose(InputArgs),
    /// Pillar over a base face.
    Pillar(PillarArgs),
    /// Apply the isolation map or the pillar deletion map.
    Maps(MapsArgs),
    /// Estimators.
    #[command(subcommand)]
    Stats(StatsCmd),
    /// Run the verification suite.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum StatsCmd {
    /// Estimate alpha_h from pillar tails of the unconditional box.
    Alpha(AlphaArgs),
    /// Evaluate m* and gamma on an alpha table.
    Mstar(MstarArgs),
    /// Maximum-height statistics of sample files.
    Maxstats(MaxArgs),
    /// Pillar-height tails of sample files.
    Tails(TailArgs),
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(deny_unknown_fields)]
struct SampleArgs {
    /// Box: n (meaning n,n,n) or n,m,H; the box is 2n x 2m x 2H cells.
    #[arg(long = "box")]
    r#box: Option<String>,
    /// Shorthand for --box n,n,n.
    #[arg(long)]
    n: Option<i32>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sweeps before the first sample (default 200).
    #[arg(long)]
    burn_in: Option<usize>,
    /// Sweeps between samples (default 10).
    #[arg(long)]
    thin: Option<usize>,
    /// Wall collection JSON with a region (conditional sampling).
    #[arg(long)]
    constraint: Option<PathBuf>,
    /// Height-1 ring wall along the box side (conditional sampling).
    #[arg(long)]
    ring: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(deny_unknown_fields)]
struct InputArgs {
    /// Snapshot (.snap) or interface (.iface) file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Box of an .iface input: n or n,m,H.
    #[arg(long = "box")]
    r#box: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(deny_unknown_fields)]
struct PillarArgs {
    /// Snapshot (.snap) or interface (.iface) file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Box of an .iface input: n or n,m,H.
    #[arg(long = "box")]
    r#box: Option<String>,
    /// Base face a,b (the face with lower corner (a, b)).
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    constraint: Option<PathBuf>,
    #[arg(long)]
    ring: bool,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(deny_unknown_fields)]
struct MapsArgs {
    /// Snapshot (.snap) or interface (.iface) file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Box of an .iface input: n or n,m,H.
    #[arg(long = "box")]
    r#box: Option<String>,
    #[arg(long)]
    x: Option<String>,
    /// Apply the isolation map (default).
    #[arg(long)]
    phi_iso: bool,
    /// Delete the pillar at x instead.
    #[arg(long)]
    psi: bool,
    /// Isolation parameter L (default 3).
    #[arg(long)]
    l: Option<i32>,
    /// Isolation height parameter h (default max(1, hgt of the pillar)).
    #[arg(long)]
    h: Option<i32>,
    #[arg(long)]
    constraint: Option<PathBuf>,
    #[arg(long)]
    ring: bool,
    /// Write the image interface here (.iface).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(deny_unknown_fields)]
struct AlphaArgs {
    #[arg(long = "box")]
    r#box: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    /// Heights: lo..hi or hi (default 1..3).
    #[arg(long)]
    h: Option<String>,
    /// Configurations per chain.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Independent chains, one per thread (default: available cores).
    #[arg(long)]
    chains: Option<usize>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    thin: Option<usize>,
    /// Confidence level (default 0.95).
    #[arg(long)]
    level: Option<f64>,
    /// Output prefix: writes PREFIX.csv and PREFIX.jsonl.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(deny_unknown_fields)]
struct MstarArgs {
    /// Number of faces s (any positive real).
    #[arg(long)]
    s: Option<f64>,
    /// CSV with columns h and alpha (as written by `stats alpha`).
    #[arg(long)]
    alpha_file: Option<PathBuf>,
    #[arg(long)]
    beta: Option<f64>,
    /// Slack in the gamma band check (default 1).
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(deny_unknown_fields)]
struct MaxArgs {
    /// Snapshot or interface files.
    #[arg(long, num_args = 1..)]
    inputs: Option<Vec<PathBuf>>,
    #[arg(long = "box")]
    r#box: Option<String>,
    #[arg(long)]
    constraint: Option<PathBuf>,
    #[arg(long)]
    ring: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(deny_unknown_fields)]
struct TailArgs {
    #[arg(long, num_args = 1..)]
    inputs: Option<Vec<PathBuf>>,
    #[arg(long = "box")]
    r#box: Option<String>,
    /// Base face a,b; default: every face at distance >= 2 from the side.
    #[arg(long)]
    x: Option<String>,
    #[arg(long)]
    h_max: Option<usize>,
    /// Minimum number of samples required.
    #[arg(long)]
    min_samples: Option<usize>,
    #[arg(long)]
    level: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize, Clone, Debug, Default)]
#[serde(deny_unknown_fields)]
struct VerifyArgs {
    /// quick or full.
    level: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated criterion numbers to run.
    #[arg(long)]
    only: Option<String>,
    /// Write the report as JSON lines here.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Error classes mapped to exit codes.
#[derive(Debug)]
enum Exit {
    Usage(String),
    Failed(String),
}

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exit::Usage(s) | Exit::Failed(s) => f.write_str(s),
        }
    }
}

impl std::error::Error for Exit {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Exit::Usage(msg.into()).into()
}

fn need<T>(v: Option<T>, flag: &str) -> anyhow::Result<T> {
    v.ok_or_else(|| usage(format!("missing required --{flag}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<Exit>() {
                Some(Exit::Usage(_)) => 1,
                Some(Exit::Failed(_)) => 3,
                None => match e.downcast_ref::<IsiError>() {
                    Some(IsiError::Bug(_)) => 3,
                    _ => 2,
                },
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = cli.config.as_deref();
    match cli.cmd {
        Cmd::Sample(a) => cmd_sample(merge(&a, cfg)?, false),
        Cmd::ConditionalSample(a) => cmd_sample(merge(&a, cfg)?, true),
        Cmd::Decompose(a) => cmd_decompose(merge(&a, cfg)?),
        Cmd::Pillar(a) => cmd_pillar(merge(&a, cfg)?),
        Cmd::Maps(a) => cmd_maps(merge(&a, cfg)?),
        Cmd::Stats(StatsCmd::Alpha(a)) => cmd_alpha(merge(&a, cfg)?),
        Cmd::Stats(StatsCmd::Mstar(a)) => cmd_mstar(merge(&a, cfg)?),
        Cmd::Stats(StatsCmd::Maxstats(a)) => cmd_maxstats(merge(&a, cfg)?),
        Cmd::Stats(StatsCmd::Tails(a)) => cmd_tails(merge(&a, cfg)?),
        Cmd::Verify(a) => cmd_verify(merge(&a, cfg)?),
    }
}

// ---------------------------------------------------------------------------
// helpers

fn dims_of(b: &Option<String>, n: Option<i32>) -> anyhow::Result<BoxDims> {
    match (b, n) {
        (Some(s), _) => parse_box(s).map_err(|e| usage(e.to_string())),
        (None, Some(n)) if n >= 1 => Ok(BoxDims::cube(n)),
        (None, Some(n)) => Err(usage(format!("--n must be positive, got {n}"))),
        (None, None) => Err(usage("missing required --box or --n")),
    }
}

fn check_beta(beta: f64) -> anyhow::Result<f64> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(usage(format!("--beta must be a non-negative number, got {beta}")));
    }
    Ok(beta)
}

/// Interface from a snapshot (.snap, self-describing) or a binary interface
/// file, which needs the box.
fn read_interface(path: &Path, b: &Option<String>) -> anyhow::Result<Interface> {
    let mut bytes = Vec::new();
    File::open(path)
        .with_context(|| format!("opening {}", path.display()))?
        .read_to_end(&mut bytes)?;
    let i = if bytes.starts_with(b"ISI3") {
        let (s, _, _) = SpinConfig::read_snapshot(&mut bytes.as_slice())?;
        Interface::extract(&s)?
    } else {
        let d = match b {
            Some(s) => parse_box(s).map_err(|e| usage(e.to_string()))?,
            None => return Err(usage(format!("{}: interface files need --box", path.display()))),
        };
        Interface::read_binary(&mut bytes.as_slice(), d)?
    };
    i.validate().with_context(|| format!("invalid interface in {}", path.display()))?;
    Ok(i)
}

fn load_frame(d: BoxDims, constraint: &Option<PathBuf>, ring: bool) -> anyhow::Result<(Frame, Constraint)> {
    let cons = match (constraint, ring) {
        (Some(_), true) => return Err(usage("--constraint and --ring are exclusive")),
        (Some(p), false) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let file: WallCollectionFile = serde_json::from_str(&text)?;
            if file.dims != d {
                bail!(IsiError::Precondition(format!("constraint box {:?} differs from {:?}", file.dims, d)));
            }
            let region = file
                .region()
                .ok_or_else(|| IsiError::Precondition("constraint file has no region".into()))?;
            Constraint::new(region, file.collection()?)?
        }
        (None, true) => Constraint::ring(d)?,
        (None, false) => Constraint::none(d),
    };
    Ok((Frame::new(cons.region.clone(), cons.walls.clone())?, cons))
}

fn write_json(out: &Option<PathBuf>, v: &Value) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    match out {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn coord_json(c: Coord) -> Value {
    json!([c.x, c.y, c.z])
}

fn face_label(c: Coord) -> String {
    format!("{},{}", (c.x - 1) / 2, (c.y - 1) / 2)
}

// ---------------------------------------------------------------------------
// sample

fn cmd_sample(a: SampleArgs, conditional: bool) -> anyhow::Result<()> {
    let d = dims_of(&a.r#box, a.n)?;
    let beta = check_beta(need(a.beta, "beta")?)?;
    let n = need(a.samples, "samples")?;
    let seed = need(a.seed, "seed")?;
    let out = need(a.out.clone(), "out")?;
    let sched = Schedule { burn_in: a.burn_in.unwrap_or(200), sweeps_between: a.thin.unwrap_or(10) };
    if !conditional && (a.constraint.is_some() || a.ring) {
        return Err(usage("use conditional-sample for constrained runs"));
    }
    let (frame, cons) = load_frame(d, &a.constraint, a.ring)?;
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let mut k = 0usize;
    let mut save = |cfg: &SpinConfig, i: &Interface| -> isi_core::Result<()> {
        let stem = out.join(format!("sample_{k:05}"));
        let mut w = BufWriter::new(File::create(stem.with_extension("snap"))?);
        cfg.write_snapshot(&mut w, beta, seed)?;
        let mut w = BufWriter::new(File::create(stem.with_extension("iface"))?);
        i.write_binary(&mut w)?;
        k += 1;
        Ok(())
    };
    let flagged = if conditional {
        for_each_conditional(cons, beta, n, sched, seed, false, |ch, i| save(&ch.config(), &i))?
    } else {
        for_each_interface(d, beta, n, sched, seed, |ch, i| save(&ch.config(), &i))?
    };
    let cmd = if conditional { "conditional-sample" } else { "sample" };
    let prov = Provenance::new(seed, d, beta, &frame, &echo(cmd, &a));
    let run = json!({
        "provenance": prov,
        "config": echo(cmd, &a),
        "samples": n,
        "truncated_discarded": flagged,
        "ceiling_height": frame.hc,
    });
    write_json(&Some(out.join("run.json")), &run)?;
    println!("wrote {n} samples to {}", out.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// decompose / pillar / maps

fn cmd_decompose(a: InputArgs) -> anyhow::Result<()> {
    let path = need(a.input.clone(), "input")?;
    let i = read_interface(&path, &a.r#box)?;
    let dec = decompose(&i)?;
    let walls: Vec<Value> = dec
        .walls
        .iter()
        .map(|w| {
            json!({
                "faces": w.faces().len(),
                "excess": w.excess(),
                "floor": w.floor,
                "standard": w.standardize().faces.iter().map(|&f| coord_json(f)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let v = json!({
        "input": path,
        "faces": i.len(),
        "walls": dec.walls.len(),
        "ceilings": dec.ceilings.len(),
        "wall_faces": dec.wall_face_count(),
        "ceiling_faces": dec.ceiling_face_count(),
        "excess": dec.total_excess(),
        "max_height": i.max_height(),
        "wall_list": walls,
    });
    write_json(&None, &v)
}

fn cmd_pillar(a: PillarArgs) -> anyhow::Result<()> {
    let path = need(a.input.clone(), "input")?;
    let i = read_interface(&path, &a.r#box)?;
    let x = parse_face(&need(a.x.clone(), "x")?).map_err(|e| usage(e.to_string()))?;
    let (frame, _) = load_frame(i.dims, &a.constraint, a.ring)?;
    if !frame.region.contains(x) {
        bail!(IsiError::Precondition(format!("face {} is not in S", face_label(x))));
    }
    let k = frame.restrict(&i)?;
    let p = Pillar::from_spins(&k.spins_of()?, x, 0);
    let split = p.split();
    let seq = increments(&split.spine);
    let v = json!({
        "x": face_label(x),
        "ceiling_height": frame.hc,
        "hgt": p.hgt(),
        "cells": p.cells.len(),
        "faces": p.faces.len(),
        "cut_points": p.cut_points().iter().map(|&c| coord_json(c.shift(0, 0, 2 * frame.hc))).collect::<Vec<_>>(),
        "empty_base": p.has_empty_base(),
        "base_cells": split.base_cells.len(),
        "spine_cells": split.spine.cells.len(),
        "increments": seq.as_ref().map(|s| s.t()),
        "increment_excess": seq.as_ref().map(|s| s.increments.iter().map(|x| x.excess()).collect::<Vec<_>>()),
    });
    write_json(&None, &v)
}

fn cmd_maps(a: MapsArgs) -> anyhow::Result<()> {
    if a.phi_iso && a.psi {
        return Err(usage("--phi-iso and --psi are exclusive"));
    }
    let path = need(a.input.clone(), "input")?;
    let i = read_interface(&path, &a.r#box)?;
    let x = parse_face(&need(a.x.clone(), "x")?).map_err(|e| usage(e.to_string()))?;
    let (frame, _) = load_frame(i.dims, &a.constraint, a.ring)?;
    let (j, v) = if a.psi {
        let del = psi_delete(&i, x, &frame)?;
        let v = json!({
            "map": "psi",
            "x": face_label(x),
            "height": del.height,
            "pillar_faces": del.pillar_faces,
            "excess": del.excess,
            "sym_diff": del.sym_diff,
            "bound_4h_minus_1": del.excess >= 4 * del.height as i64 - 1,
        });
        (del.interface, v)
    } else {
        let k = frame.restrict(&i)?;
        let hgt = Pillar::from_spins(&k.spins_of()?, x, 0).hgt();
        let p = IsoParams::new(a.l.unwrap_or(3), a.h.unwrap_or(hgt.max(1)))?;
        let before = is_isolated(&i, x, &frame, p)?;
        let (j, trace, w) = phi_iso_with_witness(&i, x, &frame, p)?;
        let after = is_isolated(&j, x, &frame, p)?;
        let recovered = witness_reconstruct(&j, &w, x, &frame).map(|r| r == i);
        let v = json!({
            "map": "phi_iso",
            "x": face_label(x),
            "params": p,
            "input_isolated": before,
            "output_isolated": after,
            "trace": trace,
            "formula_consistent": trace.formula_consistent(),
            "bounds_hold": trace.bounds_hold(),
            "witness": {
                "faces": w.face_count(),
                "parts": w.parts.len(),
                "digest": format!("{:016x}", w.digest()),
                "reconstructs": recovered.as_ref().is_ok_and(|&b| b),
                "error": recovered.err().map(|e| e.to_string()),
            },
        });
        (j, v)
    };
    if let Some(out) = &a.out {
        let mut w = BufWriter::new(File::create(out).with_context(|| format!("writing {}", out.display()))?);
        j.write_binary(&mut w)?;
        w.flush()?;
    }
    write_json(&None, &v)
}

// ---------------------------------------------------------------------------
// stats

fn default_chains() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn cmd_alpha(a: AlphaArgs) -> anyhow::Result<()> {
    let d = match &a.r#box {
        Some(s) => parse_box(s).map_err(|e| usage(e.to_string()))?,
        None => BoxDims::new(12, 12, 6),
    };
    let beta = check_beta(need(a.beta, "beta")?)?;
    let seed = need(a.seed, "seed")?;
    let (lo, hi) = parse_range(a.h.as_deref().unwrap_or("1..3")).map_err(|e| usage(e.to_string()))?;
    let samples = a.samples.unwrap_or(10_000);
    if samples == 0 {
        bail!(IsiError::Precondition("need at least 1 sample per chain, got 0".into()));
    }
    let chains = a.chains.unwrap_or_else(default_chains).max(1);
    let level = a.level.unwrap_or(stats::DEFAULT_LEVEL);
    let sched = Schedule { burn_in: a.burn_in.unwrap_or(200), sweeps_between: a.thin.unwrap_or(1) };
    let xs = deep_faces(d, 2);
    // one chain per thread on its own stream; tallies merge by addition
    let parts: Vec<isi_core::Result<TailTable>> = std::thread::scope(|sc| {
        let hs: Vec<_> = (0..chains)
            .map(|k| {
                let xs = &xs;
                sc.spawn(move || stats::sampled_pillar_tail(d, beta, samples, sched, seed, k as u64, xs, hi))
            })
            .collect();
        hs.into_iter().map(|h| h.join().expect("chain thread panicked")).collect()
    });
    let mut tail = TailTable::new(hi);
    for p in parts {
        tail.merge(&p?)?;
    }
    let mut table = AlphaTable::from_tail(&tail, beta, level);
    table.rows.retain(|r| r.h >= lo);
    let violations = table.superadditivity_violations(0.0);
    let result = json!({
        "table": table,
        "slope": table.slope(),
        "alpha_bar": stats::alpha_bar(beta),
        "superadditivity_violations": violations,
        "raw_counts": tail.counts,
        "observations": tail.total,
    });
    let cfg = echo("stats alpha", &a);
    let prov = Provenance::new(seed, d, beta, &Frame::whole(d), &cfg);
    if let Some(prefix) = &a.out {
        table.write_csv(File::create(prefix.with_extension("csv"))?)?;
        let mut w = File::create(prefix.with_extension("jsonl"))?;
        stats::write_jsonl(&mut w, "alpha", &prov, &result)?;
    }
    table.write_csv(std::io::stdout())?;
    if !violations.is_empty() {
        return Err(Exit::Failed(format!("superadditivity violated beyond CI slack at {violations:?}")).into());
    }
    Ok(())
}

#[derive(Deserialize)]
struct AlphaCsvRow {
    h: usize,
    alpha: f64,
    #[serde(default)]
    censored: Option<bool>,
}

fn cmd_mstar(a: MstarArgs) -> anyhow::Result<()> {
    let s = need(a.s, "s")?;
    if !(s > 0.0) {
        return Err(usage("--s must be positive"));
    }
    let beta = check_beta(need(a.beta, "beta")?)?;
    let path = need(a.alpha_file.clone(), "alpha-file")?;
    let mut rd = csv::Reader::from_path(&path).with_context(|| format!("reading {}", path.display()))?;
    let mut alpha = Vec::new();
    for (k, row) in rd.deserialize::<AlphaCsvRow>().enumerate() {
        let row = row?;
        if row.h != k + 1 {
            bail!(IsiError::Precondition(format!("alpha table must list h = 1, 2, ... in order; row {k} has h = {}", row.h)));
        }
        if row.censored == Some(true) {
            break;
        }
        alpha.push(row.alpha);
    }
    let m = m_star(s, &alpha, beta)?;
    let g = gamma(s, &alpha, beta)?;
    let eps = a.eps.unwrap_or(1.0);
    write_json(
        &None,
        &json!({ "s": s, "beta": beta, "m_star": m, "gamma": g, "gamma_in_band": gamma_in_band(g, beta, eps), "eps": eps }),
    )
}

fn read_inputs(inputs: &Option<Vec<PathBuf>>, b: &Option<String>, min: usize) -> anyhow::Result<Vec<Interface>> {
    let paths = inputs.clone().unwrap_or_default();
    if paths.len() < min.max(1) {
        bail!(IsiError::Precondition(format!(
            "insufficient samples: need at least {}, got {} (short by {})",
            min.max(1),
            paths.len(),
            min.max(1) - paths.len()
        )));
    }
    paths.iter().map(|p| read_interface(p, b)).collect()
}

fn cmd_maxstats(a: MaxArgs) -> anyhow::Result<()> {
    let samples = read_inputs(&a.inputs, &a.r#box, 1)?;
    let (frame, _) = load_frame(samples[0].dims, &a.constraint, a.ring)?;
    let ms = max_stats(&samples, &frame)?;
    let v = json!({
        "samples": samples.len(),
        "mean": ms.mean(),
        "identity_holds": ms.identity_holds(),
        "stats": ms,
    });
    if !ms.identity_holds() {
        write_json(&a.out, &v)?;
        return Err(Exit::Failed("max face height differs from max pillar height".into()).into());
    }
    write_json(&a.out, &v)
}

fn cmd_tails(a: TailArgs) -> anyhow::Result<()> {
    let samples = read_inputs(&a.inputs, &a.r#box, a.min_samples.unwrap_or(1))?;
    let d = samples[0].dims;
    let xs = match &a.x {
        Some(s) => vec![parse_face(s).map_err(|e| usage(e.to_string()))?],
        None => deep_faces(d, 2),
    };
    let t = pillar_tail(&samples, &xs, a.h_max.unwrap_or(5))?;
    let level = a.level.unwrap_or(stats::DEFAULT_LEVEL);
    if let Some(prefix) = &a.out {
        t.pillar.write_csv(File::create(prefix.with_extension("csv"))?, level)?;
    }
    write_json(
        &None,
        &json!({
            "faces": xs.len(),
            "samples": samples.len(),
            "pillar": t.pillar.rows(level),
            "reach": t.reach.rows(level),
            "log_slope": t.pillar.log_slope(1),
        }),
    )
}

// ---------------------------------------------------------------------------
// verify

fn cmd_verify(a: VerifyArgs) -> anyhow::Result<()> {
    let level = match a.level.as_deref().unwrap_or("quick") {
        "quick" => Level::Quick,
        "full" => Level::Full,
        other => return Err(usage(format!("verify level must be quick or full, got {other}"))),
    };
    let seed = a.seed.unwrap_or(1);
    let only: Option<Vec<u8>> = match &a.only {
        Some(s) => Some(
            s.split(',')
                .map(|t| t.trim().parse::<u8>())
                .collect::<Result<_, _>>()
                .map_err(|e| usage(format!("--only: {e}")))?,
        ),
        None => None,
    };
    let mut suite = Suite::new(level, seed);
    let ids: Vec<u8> = only.unwrap_or_else(|| verify::ids(level));
    if let Some(&bad) = ids.iter().find(|&&i| !(1..=12).contains(&i)) {
        return Err(usage(format!("no criterion {bad}")));
    }
    let mut report = Vec::new();
    for id in ids {
        let o = suite.run(id);
        println!("{o}");
        report.push(o);
    }
    if let Some(p) = &a.out {
        let mut w = BufWriter::new(File::create(p)?);
        for o in &report {
            serde_json::to_writer(&mut w, o)?;
            w.write_all(b"\n")?;
        }
    }
    let failed: Vec<u8> = report.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Exit::Failed(format!("criteria {failed:?} failed")).into())
    }
}


use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use afl_core::dl::{dl_fixed_points, eigenlines, galois_orbit_check, semisimplicity_probe};
use afl_core::engine::{duality_check, orbital_polynomial};
use afl_core::poly::render_elem;
use afl_core::sweep::{default_catalogue, Entry};
use afl_core::{
    afl_verdict, block_instance, coxeter_instance, fl_check, parse_instance, run_sweep,
    serialize_instance, MinusculeInstance, Signature, SweepConfig, VerifyOptions,
};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

const SEED_ENV: &str = "AFL_LAB_SEED";

/// Exact finite-field checks of the minuscule AFL counting identities.
#[derive(Parser, Debug)]
#[command(name = "afl-lab", version)]
struct Cli {
    /// Also print a human-readable table on stderr.
    #[arg(long, global = true)]
    pretty: bool,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build and certify an instance, print it as JSON.
    Gen(InstanceArgs),
    /// Compare the analytic and geometric sides on one instance.
    Verify {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Shift of the orbital polynomial.
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        ell: i64,
        /// Skip the per-stratum eigenline cross-check.
        #[arg(long)]
        no_dl_cross_check: bool,
    },
    /// Seeded random sweep over a catalogue of signatures.
    Sweep(SweepArgs),
    /// Even-dimension counting identity on one instance.
    Fl(InstanceArgs),
    /// Fixed points of a random regular elliptic element on the Coxeter variety.
    Dl {
        #[arg(long, default_value_t = 3)]
        q: u32,
        #[arg(long, default_value_t = 3)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Orbital polynomial of one instance.
    Orbital {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        ell: i64,
    },
    /// Run the built-in worked examples.
    Selftest,
}

#[derive(Args, Debug)]
struct InstanceArgs {
    /// Instance JSON file, as written by `gen`.
    file: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    q: u32,
    /// Block signature such as "cp:1:1,sp:1:1".
    #[arg(long, conflicts_with_all = ["file", "coxeter"])]
    sig: Option<String>,
    /// Random regular elliptic instance of dimension `--n`.
    #[arg(long, requires = "n", conflicts_with = "file")]
    coxeter: bool,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long = "q", value_delimiter = ',', default_values_t = [3u32, 5])]
    qs: Vec<u32>,
    #[arg(long, default_value_t = 9)]
    max_dim: usize,
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Restrict to these entries ("sp:1:3", "coxeter:5", ...); repeatable.
    #[arg(long = "sig")]
    sigs: Vec<String>,
    /// Leave even-dimension entries out of the default catalogue.
    #[arg(long)]
    odd_only: bool,
    #[arg(long, default_value_t = 1)]
    parallelism: usize,
    #[arg(long)]
    no_dl_cross_check: bool,
}

/// `AFL_LAB_SEED`, when set, wins over `--seed`.
fn effective_seed(flag: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{SEED_ENV}={v:?} is not an unsigned integer")),
        Err(_) => Ok(flag),
    }
}

fn load_instance(args: &InstanceArgs) -> Result<MinusculeInstance> {
    let seed = effective_seed(args.seed)?;
    if let Some(path) = &args.file {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(parse_instance(&text)?);
    }
    if args.coxeter {
        let n = args.n.expect("clap enforces --n");
        return Ok(coxeter_instance(args.q, n, seed)?);
    }
    let Some(sig) = &args.sig else {
        bail!("give an instance file, --sig or --coxeter --n");
    };
    let sig: Signature = sig.parse()?;
    Ok(block_instance(args.q, &sig, seed)?)
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, format!("{text}\n"))
            .with_context(|| format!("writing {}", path.display())),
        None => match writeln!(io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

fn emit_json(cli: &Cli, value: &Value) -> Result<()> {
    emit(cli, &serde_json::to_string_pretty(value)?)
}

fn table(rows: &[(&str, String)]) {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in rows {
        eprintln!("{k:<width$}  {v}");
    }
}

fn cmd_gen(cli: &Cli, args: &InstanceArgs) -> Result<bool> {
    let inst = load_instance(args)?;
    if cli.pretty {
        table(&[
            ("q", inst.p().to_string()),
            ("n", inst.n().to_string()),
            ("signature", inst.signature_string()),
            ("seed", inst.seed.to_string()),
        ]);
    }
    emit(cli, &serialize_instance(&inst))?;
    Ok(true)
}

fn cmd_verify(cli: &Cli, args: &InstanceArgs, ell: i64, dl_cross_check: bool) -> Result<bool> {
    let inst = load_instance(args)?;
    let report = afl_verdict(
        &inst,
        &VerifyOptions {
            ell,
            dl_cross_check,
        },
    )?;
    if cli.pretty {
        table(&[
            ("signature", report.signature.clone()),
            ("q / n", format!("{} / {}", report.p, report.n)),
            ("support", report.support.to_string()),
            ("A (analytic)", report.analytic.to_string()),
            ("G (geometric)", report.geometric.to_string()),
            ("closed derivative", report.closed_deriv.to_string()),
            ("closed cardinality", report.closed_card.to_string()),
            ("fixed points", report.brute_card.to_string()),
            ("orbital", report.orbital.polynomial.clone()),
            ("verdict", format!("{:?}", report.verdict)),
        ]);
    }
    emit_json(cli, &serde_json::to_value(&report)?)?;
    Ok(report.passed())
}

fn cmd_sweep(cli: &Cli, args: &SweepArgs) -> Result<bool> {
    let entries = if args.sigs.is_empty() {
        None
    } else {
        Some(
            args.sigs
                .iter()
                .map(|s| s.parse::<Entry>())
                .collect::<Result<Vec<_>, _>>()?,
        )
    };
    let cfg = SweepConfig {
        qs: args.qs.clone(),
        max_dim: args.max_dim,
        count: args.count,
        seed: effective_seed(args.seed)?,
        entries,
        include_even: !args.odd_only,
        parallelism: args.parallelism,
        dl_cross_check: !args.no_dl_cross_check,
    };
    let summary = run_sweep(&cfg)?;
    if cli.pretty {
        let catalogue = cfg
            .entries
            .clone()
            .unwrap_or_else(|| default_catalogue(cfg.include_even));
        table(&[
            ("seed", summary.seed.to_string()),
            (
                "entries",
                catalogue
                    .iter()
                    .filter(|e| e.dim() <= cfg.max_dim)
                    .count()
                    .to_string(),
            ),
            ("instances", summary.instances.to_string()),
            ("passes", summary.passes.to_string()),
            ("fails", summary.fails.to_string()),
            ("errors", summary.errors.to_string()),
        ]);
        for f in &summary.findings {
            eprintln!(
                "finding #{} q={} {} seed={}: {:?} {:?}",
                f.index, f.q, f.entry, f.seed, f.failed_checks, f.error
            );
        }
    }
    emit_json(cli, &serde_json::to_value(&summary)?)?;
    Ok(summary.fails == 0 && summary.errors == 0)
}

fn cmd_fl(cli: &Cli, args: &InstanceArgs) -> Result<bool> {
    let inst = load_instance(args)?;
    let fl = fl_check(&inst)?;
    let duality = duality_check(&inst)?;
    let ok = fl.holds() && duality.symmetric && duality.involution;
    if cli.pretty {
        table(&[
            ("signature", inst.signature_string()),
            ("lhs", fl.lhs.to_string()),
            ("rhs", fl.rhs.to_string()),
            ("level counts", format!("{:?}", duality.level_counts)),
        ]);
    }
    emit_json(
        cli,
        &json!({
            "p": inst.p(),
            "n": inst.n(),
            "seed": inst.seed,
            "signature": inst.signature_string(),
            "lhs": fl.lhs,
            "rhs": fl.rhs,
            "holds": fl.holds(),
            "duality": duality,
        }),
    )?;
    Ok(ok)
}

fn dl_report(q: u32, t: usize, seed: u64) -> Result<Value> {
    let inst = coxeter_instance(q, t, seed)?;
    let lines = eigenlines(&inst.tower, &inst.space, &inst.g, seed)?;
    let fixed = dl_fixed_points(&inst.tower, &inst.space, &inst.g, seed)?;
    let diagnosis = semisimplicity_probe(inst.field(), &inst.g, seed);
    Ok(json!({
        "t": t,
        "q": q,
        "seed": seed,
        "eigenvalue_orbit": lines.iter().map(|r| render_elem(&r.eigenvalue)).collect::<Vec<_>>(),
        "count": fixed.len(),
        "galois_transitive": galois_orbit_check(&inst.tower, &fixed),
        "diagnosis": diagnosis,
    }))
}

fn cmd_dl(cli: &Cli, q: u32, t: usize, seed: u64) -> Result<bool> {
    let report = dl_report(q, t, effective_seed(seed)?)?;
    let ok = report["count"] == json!(t) && report["galois_transitive"] == json!(true);
    if cli.pretty {
        table(&[
            ("q / t", format!("{q} / {t}")),
            ("count", report["count"].to_string()),
            ("transitive", report["galois_transitive"].to_string()),
        ]);
    }
    emit_json(cli, &report)?;
    Ok(ok)
}

fn cmd_orbital(cli: &Cli, args: &InstanceArgs, ell: i64) -> Result<bool> {
    let inst = load_instance(args)?;
    let poly = orbital_polynomial(&inst, ell);
    let value = poly.value_at_one();
    if cli.pretty {
        table(&[
            ("signature", inst.signature_string()),
            ("polynomial", poly.to_string()),
            ("value at 1", value.to_string()),
            ("derivative at 1", poly.derivative_at_one().to_string()),
        ]);
    }
    emit_json(
        cli,
        &json!({
            "p": inst.p(),
            "n": inst.n(),
            "seed": inst.seed,
            "signature": inst.signature_string(),
            "ell": ell,
            "polynomial": poly.to_string(),
            "value_at_one": value,
            "derivative_at_one": poly.derivative_at_one(),
        }),
    )?;
    // odd dimension forces a zero at u = 1
    Ok(inst.n() % 2 == 0 || value == 0)
}

struct Case {
    name: &'static str,
    run: fn() -> Result<(bool, String)>,
}

fn verify_case(q: u32, sig: &str, expected: i64) -> Result<(bool, String)> {
    let inst = block_instance(q, &sig.parse()?, 1)?;
    let r = afl_verdict(&inst, &VerifyOptions::default())?;
    Ok((
        r.passed() && r.analytic == expected && r.geometric == expected,
        format!("A={} G={} expected {expected}", r.analytic, r.geometric),
    ))
}

const CASES: &[Case] = &[
    Case {
        name: "verify sp:1:1",
        run: || verify_case(3, "sp:1:1", 1),
    },
    Case {
        name: "verify sp:1:3",
        run: || verify_case(3, "sp:1:3", 2),
    },
    Case {
        name: "verify cp:1:1,sp:1:1",
        run: || verify_case(3, "cp:1:1,sp:1:1", 2),
    },
    Case {
        name: "verify cp:1:2,sp:1:3",
        run: || verify_case(5, "cp:1:2,sp:1:3", 6),
    },
    Case {
        name: "verify empty support",
        run: || verify_case(3, "sp:1:1,sp:1:1,sp:1:1", 0),
    },
    Case {
        name: "verify coxeter n=5",
        run: || {
            let r = afl_verdict(&coxeter_instance(3, 5, 1)?, &VerifyOptions::default())?;
            Ok((
                r.passed() && r.geometric == 5,
                format!("A={} G={}", r.analytic, r.geometric),
            ))
        },
    },
    Case {
        name: "fl cp:1:1",
        run: || {
            let fl = fl_check(&block_instance(3, &"cp:1:1".parse()?, 1)?)?;
            Ok((
                fl.lhs == 2 && fl.rhs == 2,
                format!("lhs={} rhs={}", fl.lhs, fl.rhs),
            ))
        },
    },
    Case {
        name: "dl q=3 t=3",
        run: || {
            let r = dl_report(3, 3, 1)?;
            Ok((
                r["count"] == json!(3) && r["galois_transitive"] == json!(true),
                format!("count={}", r["count"]),
            ))
        },
    },
    Case {
        name: "orbital dim 1",
        run: || {
            let p = orbital_polynomial(&block_instance(3, &"sp:1:1".parse()?, 1)?, 0).to_string();
            Ok((p == "1 - u", p))
        },
    },
];

fn cmd_selftest(cli: &Cli) -> Result<bool> {
    let mut results = Vec::new();
    let mut all = true;
    for case in CASES {
        let (pass, detail) = (case.run)().unwrap_or_else(|e| (false, format!("error: {e}")));
        all &= pass;
        if cli.pretty {
            eprintln!(
                "{} {:<24} {detail}",
                if pass { "PASS" } else { "FAIL" },
                case.name
            );
        }
        results.push(json!({ "name": case.name, "pass": pass, "detail": detail }));
    }
    emit_json(cli, &json!({ "cases": results, "pass": all }))?;
    Ok(all)
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Gen(args) => cmd_gen(cli, args),
        Command::Verify {
            inst,
            ell,
            no_dl_cross_check,
        } => cmd_verify(cli, inst, *ell, !no_dl_cross_check),
        Command::Sweep(args) => cmd_sweep(cli, args),
        Command::Fl(args) => cmd_fl(cli, args),
        Command::Dl { q, t, seed } => cmd_dl(cli, *q, *t, *seed),
        Command::Orbital { inst, ell } => cmd_orbital(cli, inst, *ell),
        Command::Selftest => cmd_selftest(cli),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

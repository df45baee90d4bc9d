//! Command-line interface and deterministic report generation.

use crate::algebra::{self, algebra_closure, twisted_matrix, AlgElement};
use crate::diffcoeff::scalar_specialize;
use crate::error::{Error, Result};
use crate::hierarchy;
use crate::io;
use crate::reductions::{
    self, component_decompose, ConstraintKind, DecomposeTarget,
};
use crate::scalar::Scalar;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::io::Write as _;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Text,
    Latex,
    Json,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    emit: Emit,
    /// Output file; stdout when absent. Relative paths resolve under
    /// $NCKP_OUT_DIR when that is set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file; explicit flags take precedence over its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed for randomized checks.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Parser, Debug)]
#[command(name = "nckp", version, about = "Noncommutative KP hierarchy engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Flow equations d/dt_n U_k of the generalized hierarchy.
    Flow {
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long = "K")]
        k: Option<u32>,
        #[arg(long)]
        depth: Option<i64>,
        #[command(flatten)]
        common: Common,
    },
    /// Zakharov-Shabat compatibility residual for a flow pair.
    Zs {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long = "K")]
        k: Option<u32>,
        #[arg(long)]
        depth: Option<i64>,
        #[command(flatten)]
        common: Common,
    },
    /// n-reduced subhierarchy flow (KdV, Boussinesq, ...).
    Reduce {
        /// Reduction order (L^n differential).
        #[arg(long, default_value_t = 2)]
        n: u32,
        /// Flow index.
        #[arg(long, default_value_t = 3)]
        m: u32,
        #[arg(long)]
        depth: Option<i64>,
        #[command(flatten)]
        common: Common,
    },
    /// Adjoint symmetry constraints: relations and flow preservation.
    Constrain {
        #[arg(long, value_parser = parse_kind)]
        kind: ConstraintKind,
        /// Flow index for the preservation residual.
        #[arg(long, default_value_t = 3)]
        n: u32,
        /// Maximal solved relation order.
        #[arg(long = "M", default_value_t = 4)]
        max_order: u32,
        #[arg(long)]
        depth: Option<i64>,
        #[command(flatten)]
        common: Common,
    },
    /// Component decompositions of the K=1 third flow.
    Bestiary {
        #[arg(long, value_enum, default_value = "all")]
        target: BestiaryTarget,
        #[arg(long, default_value_t = false)]
        colour: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Numeric SU(3) conjugation-equivariance of a flow right-hand side.
    Covariance {
        #[arg(long, default_value_t = 3)]
        flow: u32,
        #[arg(long, default_value_t = 50)]
        trials: u32,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Structure-constant algebra tables and diagnostics.
    Algebra {
        /// Preset name: H, HC, O, R, MnC, tensor:X*Y.
        #[arg(long)]
        name: Option<String>,
        /// Explicit table as a JSON document.
        #[arg(long)]
        table: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Quaternionic time algebra property checks.
    Timealg {
        #[arg(long, default_value_t = 100)]
        samples: u32,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BestiaryTarget {
    Quaternion,
    ComplexPair,
    RealQuadruple,
    All,
}

fn parse_kind(s: &str) -> std::result::Result<ConstraintKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "b" | "btype" | "b-type" => Ok(ConstraintKind::BType),
        "c" | "ctype" | "c-type" => Ok(ConstraintKind::CType),
        other => Err(format!("unknown constraint kind '{}'; use b or c", other)),
    }
}

/// Effective run parameters after merging flags over the config file.
#[derive(Debug, Clone)]
struct RunConfig {
    k: u32,
    depth: i64,
    seed: u64,
}

fn load_config_file(path: &PathBuf) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("config file: {}", e)))
}

fn resolve_config(
    common: &Common,
    k: Option<u32>,
    depth: Option<i64>,
) -> Result<RunConfig> {
    let file = match &common.config {
        Some(p) => load_config_file(p)?,
        None => Value::Null,
    };
    let k = k
        .or_else(|| file["K"].as_u64().map(|v| v as u32))
        .unwrap_or(6);
    let depth = depth.or_else(|| file["depth"].as_i64()).unwrap_or(10);
    let seed = common
        .seed
        .or_else(|| file["seed"].as_u64())
        .unwrap_or(42);
    if k < 1 || depth < k as i64 {
        return Err(Error::Config(format!(
            "need depth >= K >= 1, got K={}, depth={}",
            k, depth
        )));
    }
    Ok(RunConfig { k, depth, seed })
}

fn config_json(cfg: &RunConfig) -> Value {
    json!({"K": cfg.k, "depth": cfg.depth, "seed": cfg.seed})
}

fn report(command: &str, config: Value, results: Value) -> Value {
    json!({
        "command": command,
        "config": config,
        "engine_version": env!("CARGO_PKG_VERSION"),
        "results": results,
    })
}

fn write_output(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        None => {
            let mut stdout = std::io::stdout();
            writeln!(stdout, "{}", text)?;
            Ok(())
        }
        Some(path) => {
            let path = if path.is_relative() {
                match std::env::var_os("NCKP_OUT_DIR") {
                    Some(dir) => PathBuf::from(dir).join(path),
                    None => path.clone(),
                }
            } else {
                path.clone()
            };
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(path, format!("{}\n", text))?;
            Ok(())
        }
    }
}

/// Renders a report: JSON is the serialized report (deterministic);
/// text/latex use the prerendered body.
fn finish(common: &Common, report: Value, body: String, elapsed: f64) -> Result<()> {
    match common.emit {
        Emit::Json => write_output(common, &serde_json::to_string_pretty(&report).unwrap()),
        Emit::Text => {
            write_output(common, &body)?;
            eprintln!("wall-time: {:.3}s", elapsed);
            Ok(())
        }
        Emit::Latex => write_output(common, &body),
    }
}

/// True exit-code-1 situations: a requested check did not hold.
struct CheckFailure;

fn run_command(cli: Cli) -> Result<std::result::Result<(), CheckFailure>> {
    let started = Instant::now();
    match cli.command {
        Command::Flow {
            n,
            k,
            depth,
            common,
        } => {
            let cfg = resolve_config(&common, k, depth)?;
            let l = hierarchy::build_lax(cfg.k, cfg.depth)?;
            let f = hierarchy::flow(&l, n)?;
            let mut scalar = serde_json::Map::new();
            for (k, p) in &f.equations {
                scalar.insert(k.to_string(), json!(format!("{}", scalar_specialize(p))));
            }
            let results = json!({
                "flow": io::flow_system_to_json(&f),
                "scalar_specialization": Value::Object(scalar),
            });
            let body = match common.emit {
                Emit::Latex => io::flow_system_to_latex(&f),
                _ => {
                    let mut lines = Vec::new();
                    for (k, p) in &f.equations {
                        lines.push(format!("d/dt{} U{} = {}", n, k, p));
                    }
                    for (k, p) in &f.tail {
                        lines.push(format!("tail D^-{}: {}", k, p));
                    }
                    lines.join("\n")
                }
            };
            let rep = report("flow", config_json(&cfg), results);
            finish(&common, rep, body, started.elapsed().as_secs_f64())?;
            Ok(Ok(()))
        }
        Command::Zs {
            n,
            m,
            k,
            depth,
            common,
        } => {
            let cfg = resolve_config(&common, k, depth)?;
            let l = hierarchy::build_lax(cfg.k, cfg.depth)?;
            let r = hierarchy::zs_residual(&l, n, m)?;
            let vanishes = r.is_zero();
            let results = json!({
                "n": n,
                "m": m,
                "vanishes": vanishes,
                "residual": io::psido_to_json(&r, "free"),
            });
            let body = match common.emit {
                Emit::Latex => io::psido_to_latex(&r),
                _ => format!(
                    "zs({}, {}): {}",
                    n,
                    m,
                    if vanishes { "vanishes" } else { "NONZERO" }
                ),
            };
            let rep = report("zs", config_json(&cfg), results);
            finish(&common, rep, body, started.elapsed().as_secs_f64())?;
            Ok(if vanishes { Ok(()) } else { Err(CheckFailure) })
        }
        Command::Reduce {
            n,
            m,
            depth,
            common,
        } => {
            let cfg = resolve_config(&common, None, depth)?;
            let f = reductions::reduced_flow(n, m, cfg.depth.max(8))?;
            let mut scalar = serde_json::Map::new();
            for (k, p) in &f.equations {
                scalar.insert(k.to_string(), json!(format!("{}", scalar_specialize(p))));
            }
            let results = json!({
                "reduction": n,
                "flow": io::flow_system_to_json(&f),
                "scalar_specialization": Value::Object(scalar),
            });
            let body = match common.emit {
                Emit::Latex => io::flow_system_to_latex(&f),
                _ => {
                    let mut lines = Vec::new();
                    for (k, p) in &f.equations {
                        lines.push(format!("d/dt{} W{} = {}", m, k, p));
                    }
                    lines.join("\n")
                }
            };
            let rep = report("reduce", config_json(&cfg), results);
            finish(&common, rep, body, started.elapsed().as_secs_f64())?;
            Ok(Ok(()))
        }
        Command::Constrain {
            kind,
            n,
            max_order,
            depth,
            common,
        } => {
            let cfg = resolve_config(&common, None, depth)?;
            let relations = reductions::symmetry_relations(kind, max_order)?;
            let residual = reductions::preservation_residual(kind, n, max_order, cfg.depth)?;
            let mut rules = serde_json::Map::new();
            for (k, rhs) in &relations.rules {
                rules.insert(format!("U{}+", k), io::ncpoly_to_json(rhs));
            }
            let results = json!({
                "relations": Value::Object(rules),
                "residual": io::residual_report_to_json(&residual),
            });
            let body = {
                let mut lines = Vec::new();
                for (k, rhs) in &relations.rules {
                    lines.push(format!("U{}+ = {}", k, rhs));
                }
                lines.push(residual.note.clone());
                lines.join("\n")
            };
            let rep = report("constrain", config_json(&cfg), results);
            finish(&common, rep, body, started.elapsed().as_secs_f64())?;
            Ok(Ok(()))
        }
        Command::Bestiary {
            target,
            colour,
            common,
        } => {
            let cfg = resolve_config(&common, None, None)?;
            let rhs = reductions::projection_flow_k1().rhs;
            let targets: Vec<DecomposeTarget> = match target {
                BestiaryTarget::Quaternion => vec![DecomposeTarget::Quaternion],
                BestiaryTarget::ComplexPair => vec![DecomposeTarget::ComplexPair],
                BestiaryTarget::RealQuadruple => vec![DecomposeTarget::RealQuadruple],
                BestiaryTarget::All => vec![
                    DecomposeTarget::Quaternion,
                    DecomposeTarget::ComplexPair,
                    DecomposeTarget::RealQuadruple,
                ],
            };
            let mut results = serde_json::Map::new();
            let mut lines = Vec::new();
            for t in targets {
                let colour_here = colour && t == DecomposeTarget::Quaternion;
                let d = component_decompose(&rhs, t, colour_here)?;
                let name = format!("{:?}", t);
                let mut eqs = serde_json::Map::new();
                for (label, p) in &d.equations {
                    eqs.insert(label.clone(), json!(format!("{}", p)));
                    lines.push(format!("[{}] d/dt {} = {}", name, label, p));
                }
                results.insert(name, Value::Object(eqs));
            }
            let body = lines.join("\n");
            let rep = report("bestiary", config_json(&cfg), Value::Object(results));
            finish(&common, rep, body, started.elapsed().as_secs_f64())?;
            Ok(Ok(()))
        }
        Command::Covariance {
            flow,
            trials,
            tol,
            common,
        } => {
            let cfg = resolve_config(&common, Some(1), None)?;
            let l = hierarchy::build_lax(1, cfg.depth.max(flow as i64 + 2))?;
            let f = hierarchy::flow(&l, flow)?;
            let rhs = f.equations[&1].clone();
            let rep_cov = reductions::su3_covariance_check(&rhs, trials, cfg.seed, tol)?;
            let results = json!({
                "flow": flow,
                "trials": rep_cov.trials,
                "tol": rep_cov.tol,
                "max_deviation": format!("{:e}", rep_cov.max_deviation),
                "pass": rep_cov.pass,
            });
            let body = format!(
                "covariance of flow {}: {} (max deviation {:e} over {} trials, tol {:e})",
                flow,
                if rep_cov.pass { "pass" } else { "FAIL" },
                rep_cov.max_deviation,
                rep_cov.trials,
                tol
            );
            let rep = report("covariance", config_json(&cfg), results);
            finish(&common, rep, body, started.elapsed().as_secs_f64())?;
            Ok(if rep_cov.pass { Ok(()) } else { Err(CheckFailure) })
        }
        Command::Algebra {
            name,
            table,
            common,
        } => {
            let cfg = resolve_config(&common, Some(1), Some(1))?;
            let alg = match (&name, &table) {
                (Some(n), None) => algebra::preset(n)?,
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(path)?;
                    let v: Value = serde_json::from_str(&text)
                        .map_err(|e| Error::Parse(format!("table file: {}", e)))?;
                    std::sync::Arc::new(io::algebra_from_json(&v)?)
                }
                _ => {
                    return Err(Error::Config(
                        "give exactly one of --name or --table".into(),
                    ))
                }
            };
            let mut results = serde_json::Map::new();
            results.insert("table".into(), io::algebra_to_json(&alg));
            let witness = alg.associativity_witness();
            results.insert(
                "associative".into(),
                json!(witness.is_none()),
            );
            if let Some((i, j, k)) = witness {
                results.insert(
                    "associativity_witness".into(),
                    json!([alg.labels[i], alg.labels[j], alg.labels[k]]),
                );
            }
            let mut lines = vec![format!(
                "{}: dim {}, associative: {}",
                alg.name,
                alg.dim,
                witness.is_none()
            )];
            if alg.name == "H" {
                // closure of the twisted left-multiplication family
                let gens: Vec<_> = (0..4)
                    .map(|b| twisted_matrix(&AlgElement::basis(&alg, b)).unwrap())
                    .collect();
                let (basis, dim) = algebra_closure(&gens);
                let (_, dim2) = algebra_closure(&basis);
                results.insert(
                    "twisted_closure_dim".into(),
                    json!({"dim": dim, "restable": dim == dim2}),
                );
                lines.push(format!(
                    "twisted closure of {{T(1),T(i),T(j),T(k)}}: dim {} (stable: {})",
                    dim,
                    dim == dim2
                ));
            }
            let body = lines.join("\n");
            let rep = report("algebra", config_json(&cfg), Value::Object(results));
            finish(&common, rep, body, started.elapsed().as_secs_f64())?;
            Ok(Ok(()))
        }
        Command::Timealg { samples, common } => {
            let cfg = resolve_config(&common, Some(1), Some(1))?;
            let checks = timealg_checks(samples, cfg.seed);
            let pass = checks.iter().all(|(_, ok)| *ok);
            let mut results = serde_json::Map::new();
            for (name, ok) in &checks {
                results.insert(name.clone(), json!(ok));
            }
            let body = checks
                .iter()
                .map(|(name, ok)| format!("{}: {}", name, if *ok { "pass" } else { "FAIL" }))
                .collect::<Vec<_>>()
                .join("\n");
            let rep = report("timealg", config_json(&cfg), Value::Object(results));
            finish(&common, rep, body, started.elapsed().as_secs_f64())?;
            Ok(if pass { Ok(()) } else { Err(CheckFailure) })
        }
    }
}

fn timealg_checks(samples: u32, seed: u64) -> Vec<(String, bool)> {
    use crate::timealg::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_quat = |rng: &mut ChaCha8Rng| {
        Quat([
            Scalar::from_int(rng.gen_range(-2..=2)),
            Scalar::from_int(rng.gen_range(-2..=2)),
            Scalar::from_int(rng.gen_range(-2..=2)),
            Scalar::from_int(rng.gen_range(-2..=2)),
        ])
    };
    let random_element = |rng: &mut ChaCha8Rng| {
        let mut e = TimeElement::zero();
        for _ in 0..rng.gen_range(1..=2) {
            let mut term = TimeElement::constant(&Quat::from_ints(
                rng.gen_range(-2..=2),
                rng.gen_range(-2..=2),
                rng.gen_range(-2..=2),
                rng.gen_range(-2..=2),
            ));
            for _ in 0..rng.gen_range(0..=2) {
                term = term.mul(&TimeElement::time(rng.gen_range(1..=3)));
            }
            e = e.add(&term);
        }
        e
    };

    let mut derivations_commute = true;
    let mut automorphism = true;
    let mut commutes_with_derive = true;
    let mut reduction_hom = true;
    let u = Quat::basis(1);
    let ue = TimeElement::constant(&u);
    let mut done = 0;
    while done < samples {
        let x = random_element(&mut rng);
        let y = random_element(&mut rng);
        derivations_commute &= time_derive(1, &time_derive(2, &x))
            == time_derive(2, &time_derive(1, &x));
        let q = random_quat(&mut rng);
        if q.inverse().is_ok() {
            let a = QuatAction::new(ActionMode::Adjoint, q).unwrap();
            automorphism &= act(&a, &x.mul(&y)).unwrap()
                == act(&a, &x).unwrap().mul(&act(&a, &y).unwrap());
            commutes_with_derive &=
                act(&a, &time_derive(1, &x)).unwrap() == time_derive(1, &act(&a, &x).unwrap());
        }
        // reduction homomorphism on the C_u subalgebra
        let cx = TimeElement::scalar(Scalar::from_int(rng.gen_range(-2..=2)))
            .add(&ue.scale(&Scalar::from_int(rng.gen_range(-2..=2))))
            .mul(&TimeElement::time(rng.gen_range(1..=3)));
        let cy = TimeElement::scalar(Scalar::from_int(rng.gen_range(-2..=2)))
            .add(&ue.scale(&Scalar::from_int(rng.gen_range(-2..=2))))
            .mul(&TimeElement::time(rng.gen_range(1..=3)));
        reduction_hom &= commutative_reduction(&u, &cx.mul(&cy)).unwrap()
            == commutative_reduction(&u, &cx)
                .unwrap()
                .mul(&commutative_reduction(&u, &cy).unwrap());
        done += 1;
    }
    vec![
        ("derivations_commute".into(), derivations_commute),
        ("adjoint_automorphism".into(), automorphism),
        ("adjoint_commutes_with_derivations".into(), commutes_with_derive),
        ("commutative_reduction_homomorphism".into(), reduction_hom),
    ]
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with success exit
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_command(cli) {
        Ok(Ok(())) => 0,
        Ok(Err(CheckFailure)) => 1,
        Err(e) => {
            eprintln!("error: {}", e);
            2
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use heckerm::contfrac::{hecke_unit, jp_expand, JPState, JpStatus, DEFAULT_MAX_STEPS};
use heckerm::exact::AlgebraicReal;
use heckerm::modsym::{eigen_orbits, ModsymError, ModularSymbolSpace};
use heckerm::pipeline::{analyze_levels, Config, LevelReport, PipelineError, Stage};
use heckerm::pseudolattice::{endomorphism_ring, EndRing, PseudoLattice};
use heckerm::quadorder::{class_group, fundamental_unit, order_from_disc};

#[derive(Parser)]
#[command(name = "heckerm", version, about = "Real multiplication from Hecke eigenforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Jacobi-Perron expansion of a vector (1, theta_1, ..., theta_n).
    Jp {
        /// `|`-separated canonical forms `poly=...;root=lo,hi;coords=...`
        #[arg(long)]
        theta: String,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        #[arg(long)]
        json: bool,
    },
    /// Endomorphism ring of the lattice Z + Z theta.
    Endo {
        #[arg(long)]
        theta: String,
        #[arg(long)]
        json: bool,
    },
    /// Class group and fundamental unit of the order of discriminant D.
    Classgroup {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        json: bool,
    },
    /// Modular symbols, Hecke orbits and selected Hecke matrices at level N.
    Modsym {
        #[arg(long, allow_hyphen_values = true)]
        level: i64,
        #[arg(long, num_args = 1..)]
        hecke: Vec<i64>,
        #[arg(long)]
        json: bool,
    },
    /// Full pipeline for one or more levels.
    Analyze {
        /// Repeat to analyze several levels.
        #[arg(long, required = true, allow_hyphen_values = true)]
        level: Vec<i64>,
        #[arg(long, default_value_t = 2000)]
        max_jp_steps: usize,
        #[arg(long, default_value_t = 20)]
        hecke_bound: i64,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::InvalidLevel(_) | PipelineError::InvalidConfig(_) => Failure::Input(e.to_string()),
            _ => Failure::Internal(e.to_string()),
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn internal<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Internal(e.to_string())
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
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(2)
        }
    }
}

fn emit(json: bool, value: &Value, text: impl FnOnce() -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("json"));
    } else {
        print!("{}", text());
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Jp { theta, max_steps, json } => cmd_jp(&theta, max_steps, json),
        Command::Endo { theta, json } => cmd_endo(&theta, json),
        Command::Classgroup { disc, json } => cmd_classgroup(disc, json),
        Command::Modsym { level, hecke, json } => cmd_modsym(level, &hecke, json),
        Command::Analyze {
            level,
            max_jp_steps,
            hecke_bound,
            json,
            cache_dir,
            jobs,
        } => {
            let config = Config {
                max_jp_steps,
                hecke_bound,
                cache_dir,
                jobs,
                ..Config::default()
            };
            if let Some(&bad) = level.iter().find(|&&n| n < 1) {
                return Err(PipelineError::InvalidLevel(bad).into());
            }
            let reports = analyze_levels(&level, &config)?;
            if json {
                let v = if reports.len() == 1 {
                    serde_json::to_value(&reports[0])
                } else {
                    serde_json::to_value(&reports)
                }
                .map_err(internal)?;
                println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            } else {
                for r in &reports {
                    print!("{}", summarize(r));
                }
            }
            Ok(())
        }
    }
}

fn cmd_jp(theta: &str, max_steps: usize, json: bool) -> Result<(), Failure> {
    if max_steps == 0 {
        return Err(Failure::Input("--max-steps must be positive".into()));
    }
    let theta = AlgebraicReal::parse_list(theta).map_err(input)?;
    let state = JPState::new(theta).map_err(input)?;
    let exp = jp_expand(&state, max_steps).map_err(input)?;
    let a = exp.period_matrix();
    let unit = if exp.status == JpStatus::Periodic {
        Some(hecke_unit(&exp).map_err(internal)?)
    } else {
        None
    };
    let v = json!({
        "dimension": exp.dimension,
        "preperiod": digits(exp.preperiod()),
        "period": digits(exp.period()),
        "digits": digits(&exp.digits),
        "A": a,
        "charpoly": a.as_ref().map(|m| m.charpoly()),
        "lambdaA": unit.as_ref().map(|u| u.value.to_string()),
        "status": exp.status,
    });
    emit(json, &v, || {
        let mut s = format!("dimension {}\nstatus {}\n", exp.dimension, exp.status.as_str());
        s += &format!("preperiod length {}, period length {}\n", exp.preperiod_len, exp.period_len);
        if let (Some(a), Some(u)) = (&a, &unit) {
            s += &format!("A =\n{a}\ncharpoly {}\nlambdaA ~ {:.12}\n", a.charpoly(), u.value.to_f64());
        }
        s
    });
    Ok(())
}

fn digits<T: ToString>(ds: &[Vec<T>]) -> Value {
    ds.iter().map(|d| d.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect()
}

fn cmd_endo(theta: &str, json: bool) -> Result<(), Failure> {
    let theta = AlgebraicReal::parse(theta).map_err(input)?;
    let one = AlgebraicReal::one(theta.field());
    let m = PseudoLattice::from_periods(&[one, theta]).map_err(input)?;
    let ring = endomorphism_ring(&m).map_err(input)?;
    let v = match &ring {
        EndRing::RealMultiplication(c) => json!({
            "minpoly": c.min_poly,
            "D": c.discriminant.to_string(),
            "dK": c.fundamental_discriminant.to_string(),
            "f": c.f.to_string(),
        }),
        EndRing::Trivial { degree } => json!({
            "minpoly": Value::Null,
            "degree": degree,
            "endomorphisms": "Z",
        }),
    };
    emit(json, &v, || match &ring {
        EndRing::RealMultiplication(c) => format!(
            "End = order of discriminant {} (dK {}, conductor {})\nminpoly {}\n",
            c.discriminant, c.fundamental_discriminant, c.f, c.min_poly
        ),
        EndRing::Trivial { degree } => format!("End = Z (slope of degree {degree})\n"),
    });
    Ok(())
}

fn cmd_classgroup(disc: i64, json: bool) -> Result<(), Failure> {
    let order = order_from_disc(&disc.into()).map_err(input)?;
    let cg = class_group(&order).map_err(input)?;
    let u = fundamental_unit(&order).map_err(internal)?;
    let v = json!({
        "D": order.d.to_string(),
        "dK": order.d_k.to_string(),
        "f": order.f.to_string(),
        "h": cg.h,
        "hPlus": cg.h_plus,
        "cycles": cg.cycles,
        "unit": u.unit,
        "unitNorm": u.norm,
    });
    emit(json, &v, || {
        let mut s = format!(
            "D = {} (dK {}, f {})\nh = {}, h+ = {}\nfundamental unit ({} + {} sqrt({}))/2, norm {}\n",
            order.d, order.d_k, order.f, cg.h, cg.h_plus, u.x, u.y, order.d, u.norm
        );
        for (i, c) in cg.cycles.iter().enumerate() {
            let forms: Vec<String> = c.iter().map(|f| format!("({},{},{})", f.a, f.b, f.c)).collect();
            s += &format!("cycle {i}: {}\n", forms.join(" "));
        }
        s
    });
    Ok(())
}

fn cmd_modsym(level: i64, hecke: &[i64], json: bool) -> Result<(), Failure> {
    if level < 1 {
        return Err(Failure::Input(format!("level must be a positive integer, got {level}")));
    }
    if let Some(&n) = hecke.iter().find(|&&n| n < 1) {
        return Err(Failure::Input(format!("Hecke index must be positive, got {n}")));
    }
    let space = ModularSymbolSpace::new(level).map_err(internal)?;
    let (orbits, note) = match eigen_orbits(&space) {
        Ok(o) => (Some(o), None),
        Err(e @ (ModsymError::NonSeparating { .. } | ModsymError::NoCuspForms)) => (None, Some(e.to_string())),
        Err(e) => return Err(internal(e)),
    };
    let mut matrices = serde_json::Map::new();
    for &n in hecke {
        let t = space.hecke_operator(n).map_err(internal)?;
        matrices.insert(n.to_string(), json!({ "matrix": t, "charpoly": t.charpoly() }));
    }
    let summaries: Option<Vec<Value>> = orbits.as_ref().map(|os| {
        os.iter()
            .map(|o| {
                let s = o.summary();
                json!({ "factor": s.factor, "Kf": s.kf, "anosov": s.anosov, "ap": s.ap })
            })
            .collect()
    });
    let v = json!({
        "level": level,
        "genus": space.genus(),
        "orbits": summaries,
        "note": note,
        "hecke": matrices,
    });
    emit(json, &v, || {
        let mut s = format!("level {level}, genus {}\n", space.genus());
        match &orbits {
            Some(os) => {
                for (i, o) in os.iter().enumerate() {
                    s += &format!(
                        "orbit {i}: {} (degree {}){}\n",
                        o.factor,
                        o.degree(),
                        if o.is_anosov_hecke { ", Anosov-Hecke" } else { "" }
                    );
                }
            }
            None => s += &format!("{}\n", note.clone().unwrap_or_default()),
        }
        for &n in hecke {
            if let Ok(t) = space.hecke_operator(n) {
                s += &format!("T{n} =\n{t}\ncharpoly {}\n", t.charpoly());
            }
        }
        s
    });
    Ok(())
}

fn summarize(r: &LevelReport) -> String {
    let mut s = format!(
        "level {}: genus {}, status {:?}\n",
        r.level,
        r.genus,
        r.status
    );
    if !r.message.is_empty() {
        s += &format!("  {}\n", r.message);
    }
    if let Some(op) = &r.separating_operator {
        s += &format!("  separating operator {op}\n");
    }
    for o in &r.orbits {
        s += &format!("  orbit {} degree {}{}\n", o.factor, o.degree, if o.anosov { " Anosov-Hecke" } else { "" });
    }
    for a in &r.anosov {
        for e in &a.embeddings {
            let mut parts = Vec::new();
            if let Some(t) = &e.theta {
                parts.push(format!("theta ~ {:.10}", t.to_f64()));
            }
            match &e.jp {
                Stage::Done(j) => parts.push(format!("JP {} after {} steps", j.status.as_str(), j.steps)),
                Stage::Skipped(w) | Stage::Failed(w) => parts.push(format!("JP: {w}")),
            }
            if let Stage::Done(u) = &e.unit {
                parts.push(format!("lambdaA ~ {:.10}", u.unit.value.to_f64()));
            }
            s += &format!("  embedding {}: {}\n", e.embedding, parts.join(", "));
        }
        if let Stage::Done(c) = &a.class_group {
            s += &format!("  order D = {}: h = {}, h+ = {}\n", c.d, c.h, c.h_plus);
        }
        let t = &a.theorem1;
        s += &format!(
            "  h_R = g: {:?}; ring class field: {:?}; lambda in order: {:?}\n",
            t.h_r_equals_g.verdict, t.ring_class_field.verdict, t.lambda_in_order.verdict
        );
    }
    s += &format!("  {} ms\n", r.timing.total_ms);
    s
}

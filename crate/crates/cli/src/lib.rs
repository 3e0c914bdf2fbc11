//! Argument handling, command dispatch and reports for the `cnkit` binary.

pub mod cache;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use cnkit::congruent::{
    congruent_curve, point_to_triangle, roberts_uvm, search_uvm, triangle_to_point, tunnell_consistent,
    tunnell_counts, uvm_to_point, Triangle,
};
use cnkit::descent::{
    build_certificate_with, verify_certificate, DescentCertificate, DirectSolver, GcdRule, QuarticSolver,
    SearchOptions, SearchOutcome, Seed, Side,
};
use cnkit::exactnum::{parse_int, parse_rat, rat_sqrt, squarefree_decompose};
use cnkit::families::{
    family1_certificate, family1_distinctness, family1_instance, family2_certificate, family2_instance,
    family2_orders, family2_quartic, table2_products, Distinctness, TABLE1,
};
use cnkit::{Int, Rat, TorsionVerdict};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cache::Cache;

#[derive(Debug, Parser)]
#[command(
    name = "cnkit",
    version,
    about = "Exact 2-descent and congruent-number checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Largest e and M tried in each quartic search.
    #[arg(long, global = true, default_value_t = 64)]
    pub height: u64,
    /// Largest u tried when looking for n m^2 = uv(u^2 - v^2).
    #[arg(long, global = true, default_value_t = 200)]
    pub uvm_bound: u64,
    /// Print the report as one line of JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// JSONL file of quartic search outcomes shared between runs.
    #[arg(long, global = true, env = "CNKIT_CACHE")]
    pub cache: Option<PathBuf>,
    /// Require gcd(b2, M) = 1 instead of gcd(b2, e) = 1 for searched witnesses.
    #[arg(long, global = true)]
    pub strict_gcd: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether n is congruent within the search bounds.
    Check {
        #[arg(allow_hyphen_values = true)]
        n: String,
    },
    /// Descent certificate for y^2 = x(x^2 + A).
    Descent {
        #[arg(allow_hyphen_values = true)]
        a: String,
        /// JSON array of witness or point seeds.
        #[arg(long)]
        seeds: Option<PathBuf>,
    },
    /// Rank-2 family instance at (r, s).
    Family1 {
        #[arg(allow_hyphen_values = true)]
        r: String,
        #[arg(allow_hyphen_values = true)]
        s: String,
    },
    /// Rank-3 family instance at t = r1/s.
    Family2 {
        #[arg(allow_hyphen_values = true)]
        r1: String,
        #[arg(allow_hyphen_values = true)]
        s: String,
    },
    /// Recompute the A-values of the published rank table.
    Table1,
    /// Square-class products for the rank-3 family at (r1, s).
    Table2 {
        #[arg(allow_hyphen_values = true)]
        r1: String,
        #[arg(allow_hyphen_values = true)]
        s: String,
    },
    /// Tunnell's four counts for squarefree n > 0.
    Tunnell {
        #[arg(allow_hyphen_values = true)]
        n: String,
    },
    /// Search for n m^2 = uv(u^2 - v^2) with u <= bound.
    Uvm {
        #[arg(allow_hyphen_values = true)]
        n: String,
        bound: Option<u64>,
    },
    /// Map a right triangle of area n to a curve point and a (u, v, m) triple.
    Triangle {
        #[arg(allow_hyphen_values = true)]
        n: String,
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(allow_hyphen_values = true)]
        y: String,
        #[arg(allow_hyphen_values = true)]
        z: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandEcho {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandReport {
    pub command: CommandEcho,
    pub verdicts: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<DescentCertificate>,
    pub timing_ms: u64,
}

/// Process exit status for a finished command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Definitive = 0,
    Usage = 1,
    Unknown = 2,
}

pub struct Outcome {
    pub report: CommandReport,
    pub lines: Vec<String>,
    pub exit: Exit,
}

#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<cnkit::Error> for UsageError {
    fn from(e: cnkit::Error) -> Self {
        UsageError(e.to_string())
    }
}

type CmdResult = Result<(Value, Option<DescentCertificate>, Vec<String>, Exit), UsageError>;

fn int_arg(name: &str, s: &str) -> Result<Int, UsageError> {
    parse_int(s).map_err(|_| UsageError(format!("{name}: expected an integer, got {s:?}")))
}

fn nonzero_arg(name: &str, s: &str) -> Result<Int, UsageError> {
    let v = int_arg(name, s)?;
    if v.is_zero() {
        return Err(UsageError(format!("{name} must be nonzero")));
    }
    Ok(v)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report payload serializes")
}

/// Certificates are re-checked before they leave the process; a failure here is a bug.
fn checked(cert: DescentCertificate) -> DescentCertificate {
    if let Err(e) = verify_certificate(&cert) {
        panic!(
            "refusing to print an invalid certificate for A = {}: {e}",
            cert.a_curve
        );
    }
    cert
}

fn cert_lines(cert: &DescentCertificate) -> Vec<String> {
    let fmt = |side: Side| {
        let mut v: Vec<String> = cert.classes(side).iter().map(|c| c.to_string()).collect();
        v.sort_by_key(|s| {
            (
                s.trim_start_matches('-').parse::<Int>().unwrap_or_default(),
                s.starts_with('-'),
            )
        });
        v.join(", ")
    };
    let exhausted = cert
        .searches
        .iter()
        .filter(|s| matches!(s.outcome, SearchOutcome::Exhausted { .. }))
        .count();
    let mut out = vec![
        format!("A = {}", cert.a_curve),
        format!("alpha classes ({}): {}", cert.alpha.len(), fmt(Side::E)),
        format!("alphabar classes ({}): {}", cert.alphabar.len(), fmt(Side::Ebar)),
        format!("rank >= {}", cert.rank_lower_bound),
    ];
    if exhausted > 0 {
        out.push(format!(
            "{exhausted} quartics unresolved at height {}",
            cert.height
        ));
    }
    out.extend(cert.notes.iter().map(|n| format!("note: {n}")));
    out
}

struct Ctx<'a> {
    opts: SearchOptions,
    uvm_bound: u64,
    solver: &'a dyn QuarticSolver,
}

fn cmd_check(ctx: &Ctx, n_arg: &str) -> CmdResult {
    let n = nonzero_arg("n", n_arg)?;
    let (sf, f) = squarefree_decompose(&n.abs())?;
    let mut lines = vec![format!("n = {n}, squarefree part {sf}")];
    let tunnell = match sf.to_u64() {
        Some(m) => {
            let counts = tunnell_counts(m);
            let ok = tunnell_consistent(m)?;
            lines.push(format!(
                "Tunnell counts A={} B={} C={} D={} ({})",
                counts.a_n,
                counts.b_n,
                counts.c_n,
                counts.d_n,
                if ok { "consistent" } else { "inconsistent" }
            ));
            Some((counts, ok))
        }
        None => None,
    };
    let uvm = search_uvm(&sf, ctx.uvm_bound);
    let mut seeds = Vec::new();
    let mut point = None;
    let mut triangle = None;
    if let Some(w) = &uvm {
        let p = uvm_to_point(w)?;
        lines.push(format!("uvm (u, v, m) = ({}, {}, {}), point {p}", w.u, w.v, w.m));
        let t = point_to_triangle(&sf, &p)?;
        lines.push(format!("triangle ({}, {}, {})", t.x_leg, t.y_leg, t.z_hyp));
        seeds.push(Seed::Point {
            side: Side::E,
            point: p.clone(),
        });
        point = Some(p);
        triangle = Some(t);
    } else {
        lines.push(format!("no uvm triple with u <= {}", ctx.uvm_bound));
    }
    let cert = checked(build_certificate_with(
        &-(&sf * &sf),
        &ctx.opts,
        &seeds,
        ctx.solver,
    )?);
    let verdict = if tunnell.as_ref().is_some_and(|(_, ok)| !ok) {
        "NOT_CONGRUENT"
    } else if cert.rank_lower_bound >= 1 {
        "CONGRUENT"
    } else {
        "UNKNOWN"
    };
    lines.push(format!("rank >= {}", cert.rank_lower_bound));
    lines.push(verdict.to_string());
    let payload = json!({
        "n": n.to_string(),
        "squarefree": sf.to_string(),
        "square_factor": f.to_string(),
        "tunnell": tunnell.map(|(c, ok)| json!({"counts": to_value(&c), "consistent": ok})),
        "uvm": uvm.as_ref().map(to_value),
        "point": point.as_ref().map(to_value),
        "triangle": triangle.as_ref().map(to_value),
        "rank_lower_bound": cert.rank_lower_bound,
        "verdict": verdict,
    });
    let exit = if verdict == "UNKNOWN" {
        Exit::Unknown
    } else {
        Exit::Definitive
    };
    Ok((payload, Some(cert), lines, exit))
}

fn cmd_descent(ctx: &Ctx, a_arg: &str, seeds: Option<&PathBuf>) -> CmdResult {
    let a = nonzero_arg("A", a_arg)?;
    let seeds: Vec<Seed> = match seeds {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| UsageError(format!("cannot read seeds {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| UsageError(format!("bad seeds file {}: {e}", path.display())))?
        }
        None => Vec::new(),
    };
    let cert = checked(build_certificate_with(&a, &ctx.opts, &seeds, ctx.solver)?);
    let unresolved = cert
        .searches
        .iter()
        .filter(|s| matches!(s.outcome, SearchOutcome::Exhausted { .. }))
        .count();
    let payload = json!({
        "a_curve": a.to_string(),
        "seeds": seeds.len(),
        "alpha_size": cert.alpha.len(),
        "alphabar_size": cert.alphabar.len(),
        "rank_lower_bound": cert.rank_lower_bound,
        "unresolved_quartics": unresolved,
    });
    let lines = cert_lines(&cert);
    Ok((payload, Some(cert), lines, Exit::Definitive))
}

fn cmd_family1(ctx: &Ctx, r: &str, s: &str) -> CmdResult {
    let (r, s) = (nonzero_arg("r", r)?, nonzero_arg("s", s)?);
    let inst = family1_instance(&r, &s)?;
    let distinct = family1_distinctness(&inst)?;
    let cert = checked(family1_certificate(&inst, &ctx.opts)?);
    let mut lines = vec![
        format!("(r, s) = ({r}, {s}), u = {}, v = {}", inst.u, inst.v),
        format!("A = {}", inst.a_value),
        format!(
            "witness for class {}: {:?}",
            inst.b1,
            (&inst.witness.n, &inst.witness.e, &inst.witness.m)
        ),
        match &distinct {
            Distinctness::Distinct16 => "16 distinct classes".to_string(),
            Distinctness::Collision { labels, .. } => {
                format!("classes {} and {} coincide", labels[0], labels[1])
            }
        },
    ];
    lines.extend(cert_lines(&cert));
    let payload = json!({
        "instance": to_value(&inst),
        "distinctness": to_value(&distinct),
        "witness_verified": inst.witness.satisfies(&inst.b1, &inst.b2),
        "rank_lower_bound": cert.rank_lower_bound,
    });
    Ok((payload, Some(cert), lines, Exit::Definitive))
}

fn cmd_family2(ctx: &Ctx, r1: &str, s: &str) -> CmdResult {
    let (r1, s) = (nonzero_arg("r1", r1)?, nonzero_arg("s", s)?);
    let t = Rat::new(r1.clone(), s.clone());
    let q = family2_quartic(&t);
    let y_root = rat_sqrt(&q).ok_or_else(|| {
        UsageError(format!(
            "-896t^4 - 40t^2 + 1 = {q} is not a rational square at t = {t}"
        ))
    })?;
    let inst = family2_instance(&r1, &s, &y_root)?;
    let orders = family2_orders(&inst)?;
    let cert = checked(family2_certificate(&inst, &ctx.opts)?);
    let infinite = orders.iter().all(|o| *o == TorsionVerdict::InfiniteOrder);
    let mut lines = vec![
        format!("t = {t}, y1 = {y_root}"),
        format!("A = {}", inst.a_value),
        format!("curve constant {}", inst.a_t),
        format!("P = {}", inst.p),
        format!("Q = {}", inst.q),
        format!("R = {}", inst.r),
        format!("P, Q, R on curve; orders {orders:?}"),
    ];
    lines.extend(cert_lines(&cert));
    let payload = json!({
        "instance": to_value(&inst),
        "on_curve": true,
        "orders": to_value(&orders),
        "infinite_order": infinite,
        "rank_lower_bound": cert.rank_lower_bound,
    });
    Ok((payload, Some(cert), lines, Exit::Definitive))
}

fn cmd_table1() -> CmdResult {
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut matched = 0;
    for (r, s, a, rank) in TABLE1 {
        let inst = family1_instance(&Int::from(r), &Int::from(s))?;
        let ok = inst.a_value == Int::from(a);
        matched += ok as usize;
        lines.push(format!(
            "({r}, {s}) A = {} listed {a} rank {rank} {}",
            inst.a_value,
            if ok { "ok" } else { "MISMATCH" }
        ));
        rows.push(json!({
            "r": r.to_string(), "s": s.to_string(),
            "a_listed": a.to_string(), "a_computed": inst.a_value.to_string(),
            "listed_rank": rank, "matches": ok,
        }));
    }
    lines.push(format!("{matched}/{} A-values match", TABLE1.len()));
    let payload = json!({"rows": rows, "matched": matched, "total": TABLE1.len()});
    Ok((payload, None, lines, Exit::Definitive))
}

fn cmd_table2(r1: &str, s: &str) -> CmdResult {
    let (r1, s) = (nonzero_arg("r1", r1)?, nonzero_arg("s", s)?);
    let rows = table2_products(&r1, &s)?;
    let mut lines: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{:<12} class {} listed {} {}; times K = {} listed {} {}",
                r.label,
                r.uv_class,
                r.r1s_class,
                if r.column2_matches { "ok" } else { "MISMATCH" },
                r.product,
                r.new_class,
                if r.product_matches { "ok" } else { "MISMATCH" },
            )
        })
        .collect();
    let good = rows
        .iter()
        .filter(|r| r.column2_matches && r.product_matches)
        .count();
    lines.push(format!("{good}/{} rows match", rows.len()));
    let payload = json!({"rows": to_value(&rows), "matched": good});
    Ok((payload, None, lines, Exit::Definitive))
}

fn cmd_tunnell(n: &str) -> CmdResult {
    let v = nonzero_arg("n", n)?;
    let m = v
        .to_u64()
        .ok_or_else(|| UsageError(format!("n = {v} must be a positive integer below 2^64")))?;
    let consistent = tunnell_consistent(m)?;
    let counts = tunnell_counts(m);
    let lines = vec![
        format!(
            "A={} B={} C={} D={}",
            counts.a_n, counts.b_n, counts.c_n, counts.d_n
        ),
        if consistent {
            "consistent (congruence not ruled out)".to_string()
        } else {
            "inconsistent: not congruent".to_string()
        },
    ];
    let payload = json!({"n": v.to_string(), "counts": to_value(&counts), "consistent": consistent});
    Ok((payload, None, lines, Exit::Definitive))
}

fn cmd_uvm(ctx: &Ctx, n: &str, bound: Option<u64>) -> CmdResult {
    let n = nonzero_arg("n", n)?;
    let bound = bound.unwrap_or(ctx.uvm_bound);
    match search_uvm(&n, bound) {
        Some(w) => {
            let p = uvm_to_point(&w)?;
            let lines = vec![
                format!("(u, v, m) = ({}, {}, {})", w.u, w.v, w.m),
                format!("point {p}"),
            ];
            let payload =
                json!({"n": n.to_string(), "bound": bound, "uvm": to_value(&w), "point": to_value(&p)});
            Ok((payload, None, lines, Exit::Definitive))
        }
        None => {
            let lines = vec![format!("no triple with u <= {bound}"), "UNKNOWN".to_string()];
            let payload =
                json!({"n": n.to_string(), "bound": bound, "uvm": Value::Null, "verdict": "UNKNOWN"});
            Ok((payload, None, lines, Exit::Unknown))
        }
    }
}

fn cmd_triangle(n: &str, x: &str, y: &str, z: &str) -> CmdResult {
    let n = nonzero_arg("n", n)?;
    let sides = [x, y, z].map(parse_rat);
    let [x, y, z] = sides;
    let t = Triangle::new(x?, y?, z?)?;
    let p = triangle_to_point(&n, &t)?;
    congruent_curve(&n)?.check(&p)?;
    let w = roberts_uvm(&n, &t)?;
    let lines = vec![
        format!("point {p}"),
        format!("(u, v, m) = ({}, {}, {})", w.u, w.v, w.m),
    ];
    let payload =
        json!({"n": n.to_string(), "triangle": to_value(&t), "point": to_value(&p), "uvm": to_value(&w)});
    Ok((payload, None, lines, Exit::Definitive))
}

fn echo(cmd: &Command) -> CommandEcho {
    let (name, args): (&str, Vec<&String>) = match cmd {
        Command::Check { n } => ("check", vec![n]),
        Command::Descent { a, .. } => ("descent", vec![a]),
        Command::Family1 { r, s } => ("family1", vec![r, s]),
        Command::Family2 { r1, s } => ("family2", vec![r1, s]),
        Command::Table1 => ("table1", vec![]),
        Command::Table2 { r1, s } => ("table2", vec![r1, s]),
        Command::Tunnell { n } => ("tunnell", vec![n]),
        Command::Uvm { n, .. } => ("uvm", vec![n]),
        Command::Triangle { n, x, y, z } => ("triangle", vec![n, x, y, z]),
    };
    let mut args: Vec<String> = args.into_iter().cloned().collect();
    match cmd {
        Command::Uvm { bound: Some(b), .. } => args.push(b.to_string()),
        Command::Descent { seeds: Some(p), .. } => args.push(format!("--seeds={}", p.display())),
        _ => {}
    }
    CommandEcho {
        name: name.to_string(),
        args,
    }
}

/// Runs one parsed command. Cache write failures are reported as usage errors.
pub fn run(cli: &Cli) -> Result<Outcome, UsageError> {
    let start = Instant::now();
    let opts = SearchOptions {
        height: cli.height,
        gcd_rule: if cli.strict_gcd {
            GcdRule::Standard
        } else {
            GcdRule::Literal
        },
        parallel: true,
    };
    let cache = cli
        .cache
        .as_deref()
        .map(Cache::open)
        .transpose()
        .map_err(UsageError)?;
    let solver: &dyn QuarticSolver = match &cache {
        Some(c) => c,
        None => &DirectSolver,
    };
    let ctx = Ctx {
        opts,
        uvm_bound: cli.uvm_bound,
        solver,
    };
    let (verdicts, certificate, lines, exit) = match &cli.command {
        Command::Check { n } => cmd_check(&ctx, n),
        Command::Descent { a, seeds } => cmd_descent(&ctx, a, seeds.as_ref()),
        Command::Family1 { r, s } => cmd_family1(&ctx, r, s),
        Command::Family2 { r1, s } => cmd_family2(&ctx, r1, s),
        Command::Table1 => cmd_table1(),
        Command::Table2 { r1, s } => cmd_table2(r1, s),
        Command::Tunnell { n } => cmd_tunnell(n),
        Command::Uvm { n, bound } => cmd_uvm(&ctx, n, *bound),
        Command::Triangle { n, x, y, z } => cmd_triangle(n, x, y, z),
    }?;
    if let Some(c) = &cache {
        c.flush().map_err(UsageError)?;
    }
    let report = CommandReport {
        command: echo(&cli.command),
        verdicts,
        certificate,
        timing_ms: start.elapsed().as_millis() as u64,
    };
    Ok(Outcome { report, lines, exit })
}

/// The report with its timing zeroed, for comparing runs.
pub fn without_timing(mut r: CommandReport) -> CommandReport {
    r.timing_ms = 0;
    r
}

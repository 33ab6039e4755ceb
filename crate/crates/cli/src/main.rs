use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use zstrip_core::integral::{f_integral, z_scale};
use zstrip_core::scan::{c_statistic, ZERO_WIDTH};
use zstrip_core::series::{g_series, z_approx, SeriesTolerance};
use zstrip_core::{phase_count_check, table, xray_grid, z_oracle, Error, QuadratureConfig, ZOracleConfig, TABLE_T};

/// Largest internal error estimate a table row may carry.
const TABLE_MAX_ERROR: f64 = 1e-5;

#[derive(Parser, Debug)]
#[command(
    name = "zstrip",
    version,
    about = "Evaluate Z(t) through its cosh-kernel integral and series forms"
)]
struct Cli {
    /// Report wall time (JSON meta or stderr); off by default so output is reproducible.
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate Z(t) with one method.
    Eval(EvalArgs),
    /// Z(t) against its series approximation at powers of ten.
    Table(TableArgs),
    /// Count zeros of Z on an interval and check the phase-count inequality.
    Scan(ScanArgs),
    /// The statistic c(t) from the continuous argument of H.
    Hstat(HstatArgs),
    /// Sign grid of Re H(z) and Im H(z) over a rectangle, as CSV.
    Xray(XrayArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Oracle,
    Integral,
    Approx,
    G,
}

#[derive(Args, Debug, Serialize)]
struct EvalArgs {
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
    #[arg(long, value_enum, default_value = "oracle")]
    method: Method,
    /// Abscissa of the integration line (integral method).
    #[arg(long, default_value_t = 4.0)]
    sigma: f64,
    /// Truncation target for the series and the integral tails.
    #[arg(long, default_value_t = 1e-10)]
    eps: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug, Serialize)]
struct TableArgs {
    /// Comma-separated subset of 10, 100, ..., 1e8.
    #[arg(long, value_delimiter = ',')]
    rows: Option<Vec<f64>>,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
}

#[derive(Args, Debug, Serialize)]
struct ScanArgs {
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug, Serialize)]
struct HstatArgs {
    #[arg(long)]
    t: f64,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug, Serialize)]
struct XrayArgs {
    #[arg(long)]
    re0: f64,
    #[arg(long)]
    re1: f64,
    #[arg(long, allow_negative_numbers = true)]
    im0: f64,
    #[arg(long, allow_negative_numbers = true)]
    im1: f64,
    /// Cells per side.
    #[arg(long, default_value_t = 400)]
    n: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure of a command, mapped to the exit code.
enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_usage() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Numerical(format!("i/o: {e}"))
    }
}

type CmdResult = Result<String, Failure>;

fn measured(value: f64, est_error: f64) -> Value {
    json!({ "value": value, "est_error": est_error })
}

fn document(command: &str, flags: &impl Serialize, rows: Vec<Value>, wall: Option<f64>) -> String {
    let mut meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "flags": flags,
    });
    if let Some(w) = wall {
        meta["wall_time_s"] = json!(w);
    }
    let mut out = serde_json::to_string_pretty(&json!({ "meta": meta, "rows": rows })).expect("JSON encoding");
    out.push('\n');
    out
}

fn check_finite(name: &str, v: f64) -> Result<(), Failure> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--{name} must be finite")))
    }
}

fn cmd_eval(args: &EvalArgs, wall: &dyn Fn() -> Option<f64>) -> CmdResult {
    check_finite("t", args.t)?;
    if !(args.eps > 0.0 && args.eps <= 1e-3) {
        return Err(Failure::Usage(format!("--eps must lie in (0, 1e-3], got {}", args.eps)));
    }
    let t = args.t;
    let tol = SeriesTolerance {
        eps: args.eps,
        ..Default::default()
    };
    let mut extra = json!({});
    let (value, est_error) = match args.method {
        Method::Oracle => {
            let v = z_oracle(t, &ZOracleConfig::default())?;
            (v.value, v.est_error)
        }
        Method::Approx => {
            let v = z_approx(t, &tol)?;
            (v.value, v.est_error)
        }
        Method::Integral => {
            let cfg = QuadratureConfig {
                tail_eps: args.eps,
                ..Default::default()
            };
            let coarse = QuadratureConfig {
                step: 2.0 * cfg.step,
                ..cfg
            };
            let scale = z_scale(t);
            let re = |c: &QuadratureConfig| -> Result<f64, Error> { Ok(f_integral(t, args.sigma, c)?.re / scale) };
            let fine = re(&cfg)?;
            // the trapezoid converges geometrically, so the doubled-step
            // difference bounds the discretization error
            let diff = (fine - re(&coarse)?).abs();
            (fine, diff + 2.0 * args.eps / scale)
        }
        Method::G => {
            let g = g_series(t, &tol)?;
            // each H_r is truncated to eps at the Z scale; the correction
            // coefficients add O(1/t) to that
            let err = 2.0 * args.eps;
            let scale = z_scale(t);
            extra = json!({ "g_re": measured(g.re, err * scale), "g_im": measured(g.im, err * scale) });
            (g.re / scale, err)
        }
    };
    if !value.is_finite() || !est_error.is_finite() {
        return Err(Failure::Numerical("non-finite result".into()));
    }
    let method = Method::to_possible_value(&args.method)
        .expect("named")
        .get_name()
        .to_owned();
    if args.json {
        let mut row = json!({ "t": t, "method": method, "z": measured(value, est_error) });
        if let Value::Object(more) = extra {
            row.as_object_mut().expect("object").extend(more);
        }
        return Ok(document("eval", args, vec![row], wall()));
    }
    Ok(format!(
        "t={t:.7} method={method} value={value:.7} est_error={est_error:.1e}\n"
    ))
}

fn cmd_table(args: &TableArgs, wall: &dyn Fn() -> Option<f64>) -> CmdResult {
    let ts = args.rows.clone().unwrap_or_else(|| TABLE_T.to_vec());
    let rows = table(&ts)?;
    let out = if args.json {
        let rows = rows
            .iter()
            .map(|r| {
                json!({
                    "t": r.t,
                    "z": measured(r.z, r.z_err),
                    "approx": measured(r.approx, r.approx_err),
                    "absdiff": measured(r.absdiff, r.z_err + r.approx_err),
                })
            })
            .collect();
        document("table", args, rows, wall())
    } else if args.csv {
        let mut s = String::from("t,Z,approx,absdiff\n");
        for r in &rows {
            writeln!(s, "{},{:.7},{:.7},{:.7}", r.t, r.z, r.approx, r.absdiff).expect("write to string");
        }
        s
    } else {
        let mut s = format!("{:>11} {:>12} {:>12} {:>12}\n", "t", "Z(t)", "approx", "|diff|");
        for r in &rows {
            writeln!(s, "{:>11} {:>12.7} {:>12.7} {:>12.7}", r.t, r.z, r.approx, r.absdiff).expect("write to string");
        }
        s
    };
    if let Some(r) = rows.iter().find(|r| r.max_error() > TABLE_MAX_ERROR) {
        print!("{out}");
        return Err(Failure::Numerical(format!(
            "row t = {} has error estimate {:.1e} above {TABLE_MAX_ERROR:.0e}",
            r.t,
            r.max_error()
        )));
    }
    Ok(out)
}

fn cmd_scan(args: &ScanArgs, wall: &dyn Fn() -> Option<f64>) -> CmdResult {
    check_finite("from", args.from)?;
    check_finite("to", args.to)?;
    if !(args.from >= 10.0 && args.from < args.to && args.to <= 1e5) {
        return Err(Failure::Usage(format!(
            "needs 10 <= from < to <= 1e5, got {} and {}",
            args.from, args.to
        )));
    }
    let r = phase_count_check(args.from, args.to, args.step)?;
    if args.json {
        let zeros: Vec<Value> = r.zeros.iter().map(|&z| measured(z, ZERO_WIDTH)).collect();
        let row = json!({
            "a": r.a,
            "b": r.b,
            "N": r.count,
            "dphi_over_pi": measured(r.dphi_over_pi, r.dphi_over_pi_error),
            "verdict": if r.verdict { "pass" } else { "fail" },
            "zeros": zeros,
        });
        return Ok(document("scan", args, vec![row], wall()));
    }
    let zeros: Vec<String> = r.zeros.iter().map(|z| format!("{z:.7}")).collect();
    Ok(format!(
        "a,b,N,dphi_over_pi,verdict,zeros\n{:.7},{:.7},{},{:.7},{},{}\n",
        r.a,
        r.b,
        r.count,
        r.dphi_over_pi,
        if r.verdict { "pass" } else { "fail" },
        zeros.join(";")
    ))
}

fn cmd_hstat(args: &HstatArgs, wall: &dyn Fn() -> Option<f64>) -> CmdResult {
    check_finite("t", args.t)?;
    let s = c_statistic(args.t, args.step)?;
    if args.json {
        let row = json!({
            "t": s.t,
            "c": measured(s.c, s.c_error),
            "end_phase": measured(s.end_phase, s.end_phase_error),
            "samples": s.samples,
        });
        return Ok(document("hstat", args, vec![row], wall()));
    }
    Ok(format!("t={:.7} c={:.7} end_phase={:.7}\n", s.t, s.c, s.end_phase))
}

fn cmd_xray(args: &XrayArgs) -> CmdResult {
    for (name, v) in [
        ("re0", args.re0),
        ("re1", args.re1),
        ("im0", args.im0),
        ("im1", args.im1),
    ] {
        check_finite(name, v)?;
    }
    let cells = xray_grid(args.re0, args.re1, args.im0, args.im1, args.n, args.n)?;
    let mut csv = String::with_capacity(40 * cells.len() + 32);
    csv.push_str("re,im,sgn_re_H,sgn_im_H\n");
    for c in &cells {
        writeln!(csv, "{:.7},{:.7},{},{}", c.re, c.im, c.sgn_re, c.sgn_im).expect("write to string");
    }
    match &args.out {
        Some(path) => {
            fs::write(path, csv)?;
            Ok(format!("wrote {} cells to {}\n", cells.len(), path.display()))
        }
        None => Ok(csv),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let timing = cli.timing;
    let wall = move || timing.then(|| start.elapsed().as_secs_f64());
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(a, &wall),
        Command::Table(a) => cmd_table(a, &wall),
        Command::Scan(a) => cmd_scan(a, &wall),
        Command::Hstat(a) => cmd_hstat(a, &wall),
        Command::Xray(a) => cmd_xray(a),
    };
    let json_mode = match &cli.command {
        Command::Eval(a) => a.json,
        Command::Table(a) => a.json,
        Command::Scan(a) => a.json,
        Command::Hstat(a) => a.json,
        Command::Xray(_) => false,
    };
    if timing && !json_mode {
        eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    }
    match result {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

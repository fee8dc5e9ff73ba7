//! Command-line front end: derivation, classification, invariant scans,
//! gap labeling, approximant spectra, Ising iteration, and kick orbits,
//! all with machine-readable output (JSON or CSV).

use clap::{Parser, Subcommand};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use tracemaps::fibfamily::{
    closed_form_map, closed_form_transformation, invariant_h, invariant_h_tilde, FibParams,
};
use tracemaps::gaplabel::{frequency_module, m1, m2, perron_data, QuadExact, QuadField};
use tracemaps::ising::{free_energy_series, IsingParams};
use tracemaps::kicked::{initial_traces, orbit, Kick};
use tracemaps::spectra::{assign_labels, band_structure, ScanConfig, TightBindingChain};
use tracemaps::tracemap::{check_invariant, classify, derive, fricke, TraceMap};
use tracemaps::word::Substitution;

#[derive(Parser)]
#[command(
    name = "tracemaps",
    version,
    about = "Trace maps of two-letter substitution rules: exact derivation, invariants, gap labeling, spectra, Ising chains, kick orbits",
    after_help = "Rule syntax: a->WORD;b->WORD with letters a, b and inverses A, B \
                  (e for the empty word), e.g. \"a->b;b->ba\" or \"a->bA;b->e\".\n\
                  All floating-point output carries 17 significant digits."
)]
struct Cli {
    /// Write output to this file instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for energy-grid scans (results are identical for any
    /// job count)
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the exact trace map of a substitution rule (JSON)
    Derive {
        /// Substitution rule, e.g. "a->b;b->ba"
        #[arg(long)]
        rule: String,
    },
    /// Classify a substitution by its transformation polynomial (JSON)
    Classify {
        #[arg(long)]
        rule: String,
    },
    /// Scan the generalized Fibonacci family for the known invariants (JSON)
    InvariantScan {
        #[arg(long, allow_negative_numbers = true)]
        kmin: i64,
        #[arg(long, allow_negative_numbers = true)]
        kmax: i64,
        #[arg(long, allow_negative_numbers = true)]
        lmin: i64,
        #[arg(long, allow_negative_numbers = true)]
        lmax: i64,
    },
    /// Exact Perron data and IDOS frequency module of a chain (JSON)
    Gaplabel {
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, allow_negative_numbers = true)]
        l: i64,
        /// Membership query "(mu,nu,p)": test (mu + nu*lambda)/(D*k^p)
        /// against the module; repeatable
        #[arg(long = "test")]
        tests: Vec<String>,
    },
    /// Band/gap structure and gap labels of a periodic approximant (CSV)
    Idos {
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, allow_negative_numbers = true)]
        l: i64,
        /// Generation; the approximant word has length f_n + k f_{n-1}
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        v1: f64,
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        v2: f64,
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Free-energy iteration of the aperiodic Ising chain (JSON)
    Ising {
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        l: i64,
        #[arg(long = "K0", allow_negative_numbers = true)]
        k0: f64,
        #[arg(long = "K1", allow_negative_numbers = true)]
        k1: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        h0: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        h1: f64,
        /// Iterate generations 1..=n
        #[arg(long)]
        n: u32,
    },
    /// Trace orbit of two SU(2) kicks under a family map (CSV)
    Kick {
        #[arg(long, allow_negative_numbers = true)]
        a0: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        n0x: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        n0y: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        n0z: f64,
        #[arg(long, allow_negative_numbers = true)]
        a1: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        n1x: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        n1y: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        n1z: f64,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        l: i64,
        #[arg(long)]
        steps: usize,
    },
    /// Trace orbit of an arbitrary rule from an explicit start point (CSV)
    Orbit {
        #[arg(long)]
        rule: String,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
        #[arg(long)]
        steps: usize,
    },
}

enum CliError {
    /// Bad flag values: exit code 2.
    Usage(String),
    /// Failures from the computation modules: exit code 1.
    Compute(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli.command, cli.jobs) {
        Ok(text) => text,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: BadFlagValue: {msg}");
            return ExitCode::from(2);
        }
        Err(CliError::Compute(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    match &cli.output {
        None => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Some(path) => match std::fs::write(path, &out) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: OutputUnwritable: {}: {e}", path.display());
                ExitCode::from(1)
            }
        },
    }
}

/// 17 significant digits, round-trip safe.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out
}

fn parse_rule(rule: &str) -> Result<Substitution, CliError> {
    rule.parse()
        .map_err(|e| CliError::Usage(format!("cannot parse rule {rule:?}: {e}")))
}

fn quad_json(v: &QuadExact) -> String {
    format!(
        "{{\"rational\":\"{}\",\"lambda_coeff\":\"{}\",\"value\":{}}}",
        v.a,
        v.b,
        fmt_f64(v.to_f64())
    )
}

fn run(cmd: &Command, jobs: usize) -> Result<String, CliError> {
    match cmd {
        Command::Derive { rule } => {
            let rho = parse_rule(rule)?;
            let map = derive(&rho);
            let class = classify(&rho).map_err(|e| CliError::Compute(e.to_string()))?;
            Ok(format!(
                "{{\"schema\":1,\"rule\":\"{}\",\"fx\":\"{}\",\"fy\":\"{}\",\"fz\":\"{}\",\"P\":\"{}\",\"class\":\"{}\"}}\n",
                json_escape(&rho.to_string()),
                json_escape(&map.fx.to_string()),
                json_escape(&map.fy.to_string()),
                json_escape(&map.fz.to_string()),
                json_escape(&class.witness.to_string()),
                class.kind.name(),
            ))
        }
        Command::Classify { rule } => {
            let rho = parse_rule(rule)?;
            let class = classify(&rho).map_err(|e| CliError::Compute(e.to_string()))?;
            Ok(format!(
                "{{\"schema\":1,\"rule\":\"{}\",\"P\":\"{}\",\"class\":\"{}\"}}\n",
                json_escape(&rho.to_string()),
                json_escape(&class.witness.to_string()),
                class.kind.name(),
            ))
        }
        Command::InvariantScan {
            kmin,
            kmax,
            lmin,
            lmax,
        } => {
            if kmin > kmax || lmin > lmax {
                return Err(CliError::Usage("empty scan box".into()));
            }
            let mut rows = Vec::new();
            for k in *kmin..=*kmax {
                for l in *lmin..=*lmax {
                    let params = FibParams::new(k, l);
                    let map = closed_form_map(params);
                    let p = closed_form_transformation(params);
                    let mut found = Vec::new();
                    if k == l + 1 && check_invariant(&map, &invariant_h(l)) {
                        found.push("\"H\"");
                    }
                    if k == 1 - l && check_invariant(&map, &invariant_h_tilde(l)) {
                        found.push("\"Htilde\"");
                    }
                    rows.push(format!(
                        "{{\"k\":{k},\"l\":{l},\"P\":\"{}\",\"invariants\":[{}]}}",
                        json_escape(&p.to_string()),
                        found.join(",")
                    ));
                }
            }
            Ok(format!("{{\"schema\":1,\"rows\":[{}]}}\n", rows.join(",")))
        }
        Command::Gaplabel { k, l, tests } => {
            let pd = perron_data(*k, *l).map_err(|e| CliError::Compute(e.to_string()))?;
            let module = frequency_module(*k, *l).map_err(|e| CliError::Compute(e.to_string()))?;
            let rho = Substitution::gen_fibonacci(*k, *l);
            let m1m = m1(&rho).map_err(|e| CliError::Compute(e.to_string()))?;
            let m2m = m2(&rho).map_err(|e| CliError::Compute(e.to_string()))?;
            debug_assert_eq!(m1m, rho.matrix().transpose());
            let field = QuadField::new(*k, *l);
            let mut s = String::new();
            let _ = write!(
                s,
                "{{\"schema\":1,\"k\":{k},\"l\":{l},\"D\":{},\"disc\":{},\"lambda_plus\":{}",
                pd.d,
                field.discriminant(),
                quad_json(&pd.lambda_plus)
            );
            let _ = write!(
                s,
                ",\"v1\":[{}]",
                pd.v1.iter().map(quad_json).collect::<Vec<_>>().join(",")
            );
            let _ = write!(
                s,
                ",\"v2\":[{}]",
                pd.v2.iter().map(quad_json).collect::<Vec<_>>().join(",")
            );
            let _ = write!(
                s,
                ",\"m1\":[[0,{k}],[1,{l}]],\"m2\":[{}]",
                m2m.iter()
                    .map(|row| format!("[{}]", row.map(|v| v.to_string()).join(",")))
                    .collect::<Vec<_>>()
                    .join(",")
            );
            let _ = write!(
                s,
                ",\"congruences\":{{\"modulus\":{},\"coefficients\":[[1,1],[1,{}]]}}",
                module.d,
                k + l
            );
            if !tests.is_empty() {
                let mut results = Vec::new();
                for q in tests {
                    let (mu, nu, p) = parse_triple(q)?;
                    let value = module_element(field, module.d, mu, nu, p);
                    // extra k factors can repair the congruences, so search a
                    // few exponents beyond the stated one
                    let p_max = p + (module.d.unsigned_abs() as u32).min(16) + 2;
                    let member = module
                        .contains(&value, p_max)
                        .map_err(|e| CliError::Compute(e.to_string()))?;
                    results.push(format!(
                        "{{\"mu\":{mu},\"nu\":{nu},\"p\":{p},\"value\":{},\"member\":{member}}}",
                        quad_json(&value)
                    ));
                }
                let _ = write!(s, ",\"tests\":[{}]", results.join(","));
            }
            s.push_str("}\n");
            Ok(s)
        }
        Command::Idos {
            k,
            l,
            n,
            v1,
            v2,
            grid,
            tol,
        } => {
            let chain = TightBindingChain::from_f64(FibParams::new(*k, *l), *n, *v1, *v2);
            let cfg = ScanConfig {
                window: None,
                grid: *grid,
                tol: *tol,
                jobs,
            };
            let stair =
                band_structure(&chain, &cfg).map_err(|e| CliError::Compute(e.to_string()))?;
            let stair = if *k == 1 {
                assign_labels(&stair, chain.params).map_err(|e| CliError::Compute(e.to_string()))?
            } else {
                stair
            };
            let mut s = String::from("E_low,E_high,type,idos_num,idos_den,mu,nu\n");
            let mut rows: Vec<(f64, String)> = Vec::new();
            for band in &stair.bands {
                rows.push((
                    band.e_low,
                    format!(
                        "{},{},band,{},{},,\n",
                        fmt_f64(band.e_low),
                        fmt_f64(band.e_high),
                        band.cumulative,
                        stair.period
                    ),
                ));
            }
            for gap in &stair.gaps {
                let (mu, nu) = match gap.label {
                    Some((mu, nu)) => (mu.to_string(), nu.to_string()),
                    None => (String::new(), String::new()),
                };
                rows.push((
                    gap.e_low,
                    format!(
                        "{},{},gap,{},{},{},{}\n",
                        fmt_f64(gap.e_low),
                        fmt_f64(gap.e_high),
                        gap.idos_num,
                        gap.idos_den,
                        mu,
                        nu
                    ),
                ));
            }
            rows.sort_by(|a, b| a.0.total_cmp(&b.0));
            for (_, row) in rows {
                s.push_str(&row);
            }
            Ok(s)
        }
        Command::Ising {
            k,
            l,
            k0,
            k1,
            h0,
            h1,
            n,
        } => {
            let params = IsingParams {
                k0: *k0,
                k1: *k1,
                h0: *h0,
                h1: *h1,
                subst: FibParams::new(*k, *l),
            };
            let series =
                free_energy_series(&params, *n).map_err(|e| CliError::Compute(e.to_string()))?;
            let mut rows = Vec::new();
            let mut prev_f: Option<f64> = None;
            for r in &series {
                let delta = match prev_f {
                    Some(p) => fmt_f64((r.free_energy - p).abs()),
                    None => "null".to_string(),
                };
                prev_f = Some(r.free_energy);
                rows.push(format!(
                    "{{\"n\":{},\"N\":\"{}\",\"x_mantissa\":{},\"x_exponent\":\"{}\",\"log_Z\":{},\"F\":{},\"delta\":{}}}",
                    r.generation,
                    r.length,
                    fmt_f64(r.x_mantissa),
                    r.x_exponent,
                    fmt_f64(r.log_z),
                    fmt_f64(r.free_energy),
                    delta
                ));
            }
            Ok(format!(
                "{{\"schema\":1,\"K0\":{},\"K1\":{},\"h0\":{},\"h1\":{},\"k\":{k},\"l\":{l},\"generations\":[{}]}}\n",
                fmt_f64(*k0),
                fmt_f64(*k1),
                fmt_f64(*h0),
                fmt_f64(*h1),
                rows.join(",")
            ))
        }
        Command::Kick {
            a0,
            n0x,
            n0y,
            n0z,
            a1,
            n1x,
            n1y,
            n1z,
            k,
            l,
            steps,
        } => {
            let k0 = Kick::normalized(*a0, [*n0x, *n0y, *n0z])
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let k1 = Kick::normalized(*a1, [*n1x, *n1y, *n1z])
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let map = closed_form_map(FibParams::new(*k, *l));
            let start = initial_traces(&k0, &k1);
            Ok(orbit_csv(&map, start, *steps))
        }
        Command::Orbit {
            rule,
            x,
            y,
            z,
            steps,
        } => {
            let rho = parse_rule(rule)?;
            let map = derive(&rho);
            Ok(orbit_csv(&map, [*x, *y, *z], *steps))
        }
    }
}

fn orbit_csv(map: &TraceMap, start: [f64; 3], steps: usize) -> String {
    let o = orbit(map, start, steps);
    let i = fricke();
    let mut s = String::from("n,x,y,z,I\n");
    for (n, p) in o.points.iter().enumerate() {
        let inv = i.eval(&p[0], &p[1], &p[2]);
        let _ = writeln!(
            s,
            "{n},{},{},{},{}",
            fmt_f64(p[0]),
            fmt_f64(p[1]),
            fmt_f64(p[2]),
            fmt_f64(inv)
        );
    }
    s
}

fn parse_triple(s: &str) -> Result<(i64, i64, u32), CliError> {
    let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "membership query must be \"(mu,nu,p)\", got {s:?}"
        )));
    }
    let mu = parts[0]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad mu in {s:?}")))?;
    let nu = parts[1]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad nu in {s:?}")))?;
    let p = parts[2]
        .parse()
        .map_err(|_| CliError::Usage(format!("bad p in {s:?}")))?;
    Ok((mu, nu, p))
}

fn module_element(field: QuadField, d: i64, mu: i64, nu: i64, p: u32) -> QuadExact {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    let denom = BigRational::from_integer(BigInt::from(d) * BigInt::from(field.k).pow(p));
    QuadExact::new(
        BigRational::from_integer(mu.into()) / &denom,
        BigRational::from_integer(nu.into()) / &denom,
        field,
    )
}

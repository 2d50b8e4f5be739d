use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use padic_stark::config::{RunConfig, PREC_ENV};
use padic_stark::dirichlet::{
    enumerate_characters, lp_derivative_gamma, lp_value_at_zero, PadicEmbedding,
};
use padic_stark::eisenstein::h_star_report;
use padic_stark::gamma::GammaP;
use padic_stark::gauss::{stickelberger_data, GaussContext, GaussSumInstance};
use padic_stark::group_ring::{
    refined_congruence_check_over_q, theta_report, AbelianFieldDatum, FiniteAbelianGroup,
    IdealFiltration,
};
use padic_stark::verify::{self, CriterionReport};
use padic_stark::Error;

/// Exact p-adic verification of Gauss sums, Gamma values, L-derivatives,
/// Stickelberger elements and Eisenstein congruences.
#[derive(Parser)]
#[command(name = "padic-stark", version)]
struct Cli {
    /// Flat TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Working precision M.
    #[arg(long, global = true, env = PREC_ENV)]
    prec: Option<u32>,
    /// Print a readable summary instead of JSON.
    #[arg(long, global = true)]
    human: bool,
    /// Write the JSON report here as well.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Morita's Gamma_p at an integer or a rational a/N.
    Gamma {
        #[arg(long)]
        prime: u64,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Gauss and Jacobi sums with their Stickelberger valuation.
    Gauss(GaussArgs),
    /// Gauss sum against the product of Gamma_p values.
    GrossKoblitz(GaussArgs),
    /// L_p(chi omega, 0) and L_p'(chi omega, 0) for odd primitive chi.
    Lp {
        #[arg(long)]
        modulus: u64,
        #[arg(long)]
        prime: u64,
    },
    /// The three independent derivative routes, pairwise.
    VerifyFerreroGreenberg {
        #[arg(long)]
        modulus: Option<u64>,
        #[arg(long)]
        prime: Option<u64>,
    },
    /// Rank-one Gross-Stark for Q(sqrt(d)), d < 0.
    VerifyIq {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        prime: u64,
    },
    /// Class-number formula for all fundamental d with |d| <= bound.
    ClassNumber {
        #[arg(long)]
        bound: Option<u64>,
    },
    /// Stickelberger element theta_{S,T} of a subfield of Q(mu_N).
    Theta(DatumArgs),
    /// Invariants of I^n / I^(n+1) for a finite abelian group.
    IdealFiltration {
        /// Cyclic factors, comma separated.
        #[arg(long, value_delimiter = ',')]
        group: Vec<u64>,
        #[arg(long)]
        n: usize,
    },
    /// Refined class-number congruence over Q.
    RefinedCheck {
        #[command(flatten)]
        datum: DatumArgs,
        #[arg(long)]
        calibration: Option<String>,
    },
    /// Eigen-relations of the weight-1 Eisenstein family modulo (k-1)^2.
    EisensteinCheck {
        #[arg(long)]
        chi_modulus: u64,
        #[arg(long)]
        prime: u64,
        /// q-expansion truncation.
        #[arg(long)]
        qmax: Option<usize>,
    },
    /// Every numbered check at its pinned parameters.
    All {
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct GaussArgs {
    #[arg(long)]
    prime: u64,
    #[arg(long)]
    n: u64,
    #[arg(long, allow_hyphen_values = true)]
    a: i64,
}

#[derive(Args)]
struct DatumArgs {
    /// Conductor N of the ambient Q(mu_N).
    #[arg(long)]
    modulus: u64,
    /// Generators of the subgroup of (Z/N)^* fixing the field.
    #[arg(long, value_delimiter = ',')]
    subgroup: Vec<u64>,
    /// Finite primes in S.
    #[arg(long, value_delimiter = ',')]
    s: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    t: Vec<u64>,
}

impl DatumArgs {
    fn datum(&self) -> padic_stark::Result<AbelianFieldDatum> {
        AbelianFieldDatum::new(self.modulus, self.subgroup.clone(), self.s.clone(), self.t.clone())
    }
}

/// Exit status by failure class.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Guardrail(_) => 3,
        Error::Config(_) | Error::UnknownCalibration(_) => 5,
        Error::Oracle(_) | Error::InsufficientPrecision { .. } => 6,
        _ => 4,
    }
}

struct Outcome {
    pass: bool,
    body: Value,
    lines: Vec<String>,
}

impl Outcome {
    fn info(body: Value) -> Self {
        Self { pass: true, body, lines: Vec::new() }
    }

    fn criterion(r: CriterionReport) -> Self {
        let lines = std::iter::once(r.summary_line())
            .chain(r.failures.iter().skip(1).map(|f| format!("  {f}")))
            .collect();
        Self { pass: r.pass, body: to_value(&r), lines }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn parse_rational(s: &str) -> padic_stark::Result<(i64, i64)> {
    let bad = || Error::InvalidInstance(format!("{s:?} is not an integer or a/N"));
    match s.split_once('/') {
        Some((a, n)) => Ok((a.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?)),
        None => Ok((s.trim().parse().map_err(|_| bad())?, 1)),
    }
}

fn odd_primitive(modulus: u64) -> Vec<padic_stark::dirichlet::DirichletCharacter> {
    enumerate_characters(modulus)
        .into_iter()
        .filter(|c| c.is_odd() && c.is_primitive())
        .collect()
}

fn run(cli: &Cli) -> padic_stark::Result<Outcome> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(p) = cli.prec {
        cfg.prec = p;
    }
    if cli.output.is_some() {
        cfg.output = cli.output.clone();
    }
    // command arguments pass through the same guardrails as config files
    match &cli.command {
        Command::Gamma { prime, .. }
        | Command::Lp { prime, .. }
        | Command::VerifyIq { prime, .. }
        | Command::EisensteinCheck { prime, .. } => cfg.primes = vec![*prime],
        Command::Gauss(g) | Command::GrossKoblitz(g) => cfg.primes = vec![g.prime],
        Command::VerifyFerreroGreenberg { prime: Some(p), .. } => cfg.primes = vec![*p],
        Command::ClassNumber { bound: Some(b) } => cfg.disc_bound = *b,
        Command::RefinedCheck { calibration: Some(c), .. } => cfg.calibration = c.clone(),
        Command::All { seed: Some(s) } => cfg.seed = *s,
        _ => {}
    }
    if let Command::EisensteinCheck { qmax: Some(q), .. } = &cli.command {
        cfg.n_max = *q;
    }
    cfg.validate()?;
    let prec = cfg.prec;

    let out = match &cli.command {
        Command::Gamma { prime, at } => {
            let (a, n) = parse_rational(at)?;
            let v = GammaP::new(*prime, prec)?.at_rational(a, n)?;
            Outcome::info(json!({"p": prime, "at": at, "prec": prec, "value": v.to_string(), "digits": v}))
        }
        Command::Gauss(g) => {
            let inst = GaussSumInstance::new(g.prime, g.n, g.a, prec)?;
            let ctx = GaussContext::new(g.prime, g.n, prec)?;
            let sum = ctx.gauss_sum(g.a)?;
            let st = stickelberger_data(&inst);
            let v = ctx.gauss_valuation(&sum)?;
            let j = ctx.jacobi_sum_padic(g.a)?;
            Outcome {
                pass: st.exponent_check && v == st.digit_sum,
                body: json!({"instance": inst, "q": inst.q(), "valuation": v,
                    "stickelberger": st, "jacobi": j.to_string()}),
                lines: Vec::new(),
            }
        }
        Command::GrossKoblitz(g) => {
            let inst = GaussSumInstance::new(g.prime, g.n, g.a, prec)?;
            let rep = GaussContext::new(g.prime, g.n, prec)?.gross_koblitz(&inst)?;
            let need = prec as i64 - padic_stark::padic::precision_loss(g.prime, prec).delta() as i64;
            Outcome {
                pass: rep.agreement_precision >= need && rep.factorial_congruence_ok,
                body: to_value(&rep),
                lines: Vec::new(),
            }
        }
        Command::Lp { modulus, prime } => {
            let mut rows = Vec::new();
            for chi in odd_primitive(*modulus) {
                let emb = PadicEmbedding::for_character(&chi, *prime, prec + 10)?;
                let v = lp_value_at_zero(&chi, *prime, &emb, prec)?;
                let d = lp_derivative_gamma(&chi, *prime, &emb, prec)?;
                rows.push(json!({"order": chi.order(), "value": v.to_string(), "derivative": d.to_string()}));
            }
            if rows.is_empty() {
                return Err(Error::Character(format!("no odd primitive character mod {modulus}")));
            }
            Outcome::info(json!({"modulus": modulus, "p": prime, "prec": prec, "characters": rows}))
        }
        Command::VerifyFerreroGreenberg { modulus, prime } => {
            let pairs: Vec<(u64, u64)> = match (modulus, prime) {
                (Some(m), Some(p)) => vec![(*m, *p)],
                (None, None) => verify::LP_PAIRS.to_vec(),
                _ => return Err(Error::InvalidInstance("give both --modulus and --prime, or neither".into())),
            };
            Outcome::criterion(verify::ferrero_greenberg_suite(&pairs, prec)?)
        }
        Command::VerifyIq { disc, prime } => Outcome::criterion(verify::rank_one_suite(&[(*disc, *prime)], prec)?),
        Command::ClassNumber { .. } => Outcome::criterion(verify::class_number_suite(cfg.disc_bound)?),
        Command::Theta(d) => {
            let rep = theta_report(&d.datum()?)?;
            Outcome { pass: rep.integral && rep.interpolates, body: to_value(&rep), lines: Vec::new() }
        }
        Command::IdealFiltration { group, n } => {
            let g = FiniteAbelianGroup::new(group.clone())?;
            let inv = IdealFiltration::new(&g, n + 1)?.quotient_invariants(*n)?;
            Outcome::info(json!({"group": group, "n": n, "invariants": inv}))
        }
        Command::RefinedCheck { datum, .. } => {
            let rep = refined_congruence_check_over_q(&datum.datum()?, cfg.calibration()?)?;
            Outcome { pass: rep.pass, body: to_value(&rep), lines: Vec::new() }
        }
        Command::EisensteinCheck { chi_modulus, prime, .. } => {
            let r = verify::eisenstein_suite(&[(*chi_modulus, *prime)], cfg.n_max, prec)?;
            let mut h = Vec::new();
            for chi in odd_primitive(*chi_modulus) {
                h.push(h_star_report(&chi, *prime, cfg.n_max, prec)?);
            }
            let mut o = Outcome::criterion(r);
            o.pass &= h.iter().all(|x| x.pass);
            o.body["h_star"] = to_value(&h);
            o
        }
        Command::All { .. } => {
            let suite = verify::run_all(cfg.seed)?;
            let lines = suite.criteria.iter().map(CriterionReport::summary_line).collect();
            Outcome { pass: suite.pass, body: to_value(&suite), lines }
        }
    };
    if let Some(path) = &cfg.output {
        let text = serde_json::to_string_pretty(&out.body).expect("reports serialize");
        std::fs::write(path, text + "\n").map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    }
    Ok(out)
}

fn render_human(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match x {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_human(x, indent + 2, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", compact(x))),
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", compact(v))),
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        _ => v.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.human {
                if out.lines.is_empty() {
                    let mut s = String::new();
                    render_human(&out.body, 0, &mut s);
                    print!("{s}");
                    println!("{}", if out.pass { "PASS" } else { "FAIL" });
                } else {
                    for l in &out.lines {
                        println!("{l}");
                    }
                }
            } else {
                println!("{}", serde_json::to_string_pretty(&out.body).expect("reports serialize"));
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

use std::io;
use std::path::Path;

use rayon::prelude::*;
use rcrit_core::bounds::{
    bracket_r_crit, check_additive, p1_star_with_tolerance, tradeoff_lower, ThresholdStatus, THRESHOLD_TOL,
};
use rcrit_core::math::gv_distance;
use rcrit_core::oracle::{
    covering_beta_exponent, divergence_orders, exact_error_probabilities, run_identity_suite, BinaryCode,
    DecisionRegion, IdentitySuiteConfig, Neighbours,
};
use rcrit_core::sim::{exponent_sweep, simulate_dual, simulate_with_code, Codebook, TrialConfig};
use rcrit_core::spectrum::SpectrumPoint;
use rcrit_core::ChannelPair;
use thiserror::Error;

use crate::table::{num, opt, Table};
use crate::{Channels, Output};

const TABLE_P0: [f64; 8] = [0.1, 0.12, 0.15, 0.2, 0.3, 0.4, 0.45, 0.49];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] rcrit_core::Error),
    #[error("check failed: {0}")]
    Check(String),
    #[error("cannot read grid: {0}")]
    Grid(#[from] csv::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use rcrit_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Grid(_) => 2,
            CliError::Core(
                E::Domain { .. }
                | E::Channel { .. }
                | E::Config(_)
                | E::NonIntegral { .. }
                | E::SizeLimit(_)
                | E::Ordering { .. }
                | E::Infeasible { .. },
            ) => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn emit(table: &Table, output: &Output) -> Result<()> {
    table.emit(output.format, output.out.as_deref())?;
    Ok(())
}

fn flag(b: bool) -> String {
    b.to_string()
}

fn read_grid(path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Usage(format!("grid file lacks a `{name}` column")))
    };
    let (i0, i1) = (col("p0")?, col("p1")?);
    let mut pairs = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |i: usize| -> Result<f64> {
            let raw = record.get(i).unwrap_or("");
            raw.parse()
                .map_err(|_| CliError::Usage(format!("grid row {}: `{raw}` is not a number", line + 1)))
        };
        pairs.push((parse(i0)?, parse(i1)?));
    }
    Ok(pairs)
}

fn channels(args: &Channels) -> Result<Vec<ChannelPair>> {
    let pairs = match (&args.grid, args.p0.zip(args.p1)) {
        (Some(path), _) => read_grid(path)?,
        (None, Some(pair)) => vec![pair],
        (None, None) => return Err(CliError::Usage("give --p0 and --p1, or --grid".into())),
    };
    if pairs.is_empty() {
        return Err(CliError::Usage("the channel grid is empty".into()));
    }
    pairs
        .into_iter()
        .map(|(p0, p1)| ChannelPair::new(p0, p1).map_err(|e| CliError::Usage(e.to_string())))
        .collect()
}

pub fn bounds(args: &Channels, output: &Output) -> Result<()> {
    let slack = output.tolerance.unwrap_or(1e-12);
    let pairs = channels(args)?;
    let rows: Vec<(Vec<String>, bool)> = pairs
        .par_iter()
        .map(|c| -> Result<(Vec<String>, bool)> {
            let b = bracket_r_crit(c);
            let additive = if c.alternative_is_cleaner() {
                check_additive(c, (c.capacity0() + 0.01).min(1.0))?.certified
            } else {
                false
            };
            let r = b.r_crit;
            let row = vec![
                num(c.p0()),
                num(c.p1()),
                num(r.lower),
                num(r.upper),
                r.upper_source.to_string(),
                num(b.helper_r_crit.lower),
                num(b.helper_r_crit.upper),
                num(b.comb.tau_up),
                flag(b.two_hyp_certified),
                flag(additive),
            ];
            Ok((row, r.lower <= r.upper + slack))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(vec![
        "p0",
        "p1",
        "r_lower",
        "r_upper",
        "r_upper_source",
        "R_crit_lower",
        "R_crit_upper",
        "tau_comb",
        "two_hyp_certified",
        "additive_certified",
    ]);
    let mut bad = Vec::new();
    for (row, ok) in rows {
        if !ok {
            bad.push(format!("({}, {})", row[0], row[1]));
        }
        table.push(row);
    }
    emit(&table, output)?;
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "lower bound exceeds upper bound at {}",
            bad.join(", ")
        )))
    }
}

pub fn threshold(p0_list: &[f64], output: &Output) -> Result<()> {
    let tol = output.tolerance.unwrap_or(THRESHOLD_TOL);
    let list = if p0_list.is_empty() {
        TABLE_P0.to_vec()
    } else {
        p0_list.to_vec()
    };
    if let Some(p) = list.iter().find(|&&p| !(p > 0.0 && p <= 0.5)) {
        return Err(CliError::Usage(format!("p0 = {p} outside (0, 1/2]")));
    }
    let results: Vec<_> = list
        .par_iter()
        .map(|&p0| (p0, p1_star_with_tolerance(p0, tol)))
        .collect();
    let mut table = Table::new(vec!["p0", "p1_star", "status", "omega0", "predicate_value"]);
    let mut bad = Vec::new();
    for (p0, res) in results {
        match res {
            Ok(t) => {
                let status = match t.status {
                    ThresholdStatus::Bracketed => "bracketed",
                    ThresholdStatus::NeverPositive => "never_positive",
                    ThresholdStatus::AlwaysPositive => "always_positive",
                };
                table.push(vec![
                    num(p0),
                    num(t.p1_star),
                    status.into(),
                    num(t.omega0),
                    num(t.predicate_value),
                ]);
            }
            Err(rcrit_core::Error::NonMonotone { .. }) => {
                bad.push(num(p0));
                table.push(vec![
                    num(p0),
                    String::new(),
                    "non_monotone".into(),
                    String::new(),
                    String::new(),
                ]);
            }
            Err(e) => return Err(e.into()),
        }
    }
    emit(&table, output)?;
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "threshold predicate not monotone in p1 at p0 = {}",
            bad.join(", ")
        )))
    }
}

pub fn mu(rate: f64, alpha: &str, points: usize, output: &Output) -> Result<()> {
    let tol = output.tolerance.unwrap_or(1e-8);
    if points == 0 {
        return Err(CliError::Usage("--points must be positive".into()));
    }
    let alpha = match alpha {
        "gv" => gv_distance(rate)?,
        s => s
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("--alpha must be a number or `gv`, got `{s}`")))?,
    };
    let cap = SpectrumPoint::new(rate, alpha, 0.0)?.cap;
    if cap <= 0.0 {
        return Err(CliError::Usage(format!("empty distance range: G = {cap}")));
    }
    let rows: Vec<(f64, f64, f64)> = (1..=points)
        .into_par_iter()
        .map(|j| -> Result<(f64, f64, f64)> {
            let omega = cap * j as f64 / points as f64;
            let p = SpectrumPoint::new(rate, alpha, omega)?;
            Ok((omega, p.mu_integral()?, p.mu_closed()?))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(vec!["R", "alpha", "omega", "mu_integral", "mu_closed", "abs_diff"]);
    let mut worst: f64 = 0.0;
    for (omega, a, b) in rows {
        worst = worst.max((a - b).abs());
        table.push(vec![
            num(rate),
            num(alpha),
            num(omega),
            num(a),
            num(b),
            num((a - b).abs()),
        ]);
    }
    emit(&table, output)?;
    eprintln!("max |mu_integral - mu_closed| = {worst:e} over {points} points (G = {cap})");
    if worst <= tol {
        Ok(())
    } else {
        Err(CliError::Check(format!("forms differ by {worst:e} > {tol:e}")))
    }
}

pub fn oracle_check(
    n: usize,
    codes: usize,
    seed: u64,
    max_words: usize,
    pair: Option<(f64, f64)>,
    output: &Output,
) -> Result<()> {
    let cfg = IdentitySuiteConfig {
        seed,
        codes,
        min_n: 4.min(n),
        max_n: n,
        max_words,
    };
    let report = run_identity_suite(&cfg)?;
    let mut table = Table::new(vec!["item", "value"]);
    let mut row = |k: &str, v: String| table.push(vec![k.to_string(), v]);
    row("count_equivalence_checks", report.count_equivalence.checks.to_string());
    row(
        "count_equivalence_failures",
        report.count_equivalence.failures.len().to_string(),
    );
    row("covering_codes", report.codes_checked.to_string());
    row("covering_checks", report.covering.checks.to_string());
    row("covering_failures", report.covering.failures.len().to_string());
    if let Some((p0, p1)) = pair {
        let channel = ChannelPair::new(p0, p1)?;
        let orders = divergence_orders(&channel);
        let single = BinaryCode::new(n, vec![0])?;
        let beta = covering_beta_exponent(&single, &channel, Neighbours::All)?;
        row("divergence_p0_p1", num(orders.d01));
        row("divergence_p1_p0", num(orders.d10));
        row("single_word_log2_beta_over_n", num(beta.value));
    }
    emit(&table, output)?;
    for f in report
        .count_equivalence
        .failures
        .iter()
        .chain(&report.covering.failures)
    {
        eprintln!("identity failure: {f}");
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Check("exact identity suite reported failures".into()))
    }
}

pub struct SimulateArgs {
    pub p0: f64,
    pub p1: f64,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub r: f64,
    pub tau: Option<f64>,
    pub exact_crosscheck: bool,
    pub tau_grid: Vec<f64>,
    pub n_grid: Vec<usize>,
}

fn sweep(args: &SimulateArgs, channel: &ChannelPair, tau: f64, output: &Output) -> Result<()> {
    let taus = if args.tau_grid.is_empty() {
        vec![tau]
    } else {
        args.tau_grid.clone()
    };
    let ns = if args.n_grid.is_empty() {
        vec![args.n]
    } else {
        args.n_grid.clone()
    };
    let rows = exponent_sweep(channel, args.r, &taus, &ns, args.trials, args.seed)?;
    let mut table = Table::new(vec![
        "tau",
        "n",
        "predicted_alpha_exponent",
        "predicted_beta_exponent",
        "alpha_exponent_hat",
        "alpha_exponent_se",
        "beta_exponent_hat",
        "beta_exponent_se",
    ]);
    for r in rows {
        table.push(vec![
            num(r.tau),
            r.n.to_string(),
            num(r.predicted_alpha_exponent),
            num(r.predicted_beta_exponent),
            opt(r.alpha_exponent_hat),
            num(r.alpha_exponent_se),
            opt(r.beta_exponent_hat),
            num(r.beta_exponent_se),
        ]);
    }
    emit(&table, output)
}

pub fn simulate(args: &SimulateArgs, output: &Output) -> Result<()> {
    let channel = ChannelPair::new(args.p0, args.p1)?;
    let tau = args.tau.unwrap_or(args.p0);
    if !args.tau_grid.is_empty() || !args.n_grid.is_empty() {
        if args.exact_crosscheck {
            return Err(CliError::Usage(
                "--exact-crosscheck cannot be combined with a sweep".into(),
            ));
        }
        return sweep(args, &channel, tau, output);
    }
    let cfg = TrialConfig {
        n: args.n,
        r: args.r,
        channel,
        tau,
        trials: args.trials,
        seed: args.seed,
    };
    cfg.validate()?;
    let mut exact = None;
    let report = if args.exact_crosscheck {
        let code = BinaryCode::random(args.n, cfg.code_size()?, args.seed)?;
        let region = DecisionRegion::threshold(&channel, args.n, tau);
        exact = Some(exact_error_probabilities(&code, &region, &channel)?);
        simulate_with_code(&cfg, &Codebook::from_binary_code(&code))?
    } else {
        simulate_dual(&cfg)?
    };
    let predicted = tradeoff_lower(&channel, args.r, tau)?;
    let mut headers = vec![
        "n",
        "r",
        "p0",
        "p1",
        "tau",
        "code_size",
        "trials",
        "alpha_direct",
        "alpha_direct_se",
        "beta_direct",
        "beta_direct_se",
        "log2_alpha",
        "log2_alpha_se",
        "log2_beta",
        "log2_beta_se",
        "alpha_exponent_hat",
        "beta_exponent_hat",
        "predicted_alpha_exponent",
        "predicted_beta_exponent",
        "decision_rule",
    ];
    let mut row = vec![
        args.n.to_string(),
        num(args.r),
        num(args.p0),
        num(args.p1),
        num(tau),
        report.code_size.to_string(),
        args.trials.to_string(),
        num(report.alpha_direct.value),
        num(report.alpha_direct.std_error),
        num(report.beta_direct.value),
        num(report.beta_direct.std_error),
        num(report.alpha.log2_value),
        num(report.alpha.log2_std_error),
        num(report.beta.log2_value),
        num(report.beta.log2_std_error),
        opt(report.alpha_exponent_hat),
        opt(report.beta_exponent_hat),
        num(predicted.alpha_exponent),
        num(predicted.beta_exponent),
        report.decision_rule.to_string(),
    ];
    let mut failure = None;
    if let Some(e) = exact {
        let k = output.tolerance.unwrap_or(3.0);
        let t = args.trials as f64;
        let ok = |est: f64, p: f64| (est - p).abs() <= k * (p * (1.0 - p) / t).sqrt() + 1e-12;
        let pass = ok(report.alpha_direct.value, e.alpha_avg) && ok(report.beta_direct.value, e.beta_avg);
        headers.extend([
            "exact_alpha_avg",
            "exact_beta_avg",
            "exact_alpha_max",
            "exact_beta_max",
            "crosscheck_pass",
        ]);
        row.extend([
            num(e.alpha_avg),
            num(e.beta_avg),
            num(e.alpha_max),
            num(e.beta_max),
            flag(pass),
        ]);
        if !pass {
            failure = Some(format!(
                "simulation differs from exact probabilities by more than {k} standard errors"
            ));
        }
    }
    let mut table = Table::new(headers);
    table.push(row);
    emit(&table, output)?;
    match failure {
        Some(msg) => Err(CliError::Check(msg)),
        None => Ok(()),
    }
}

//! `fluid`: analytic tables, trajectories, and simulations for fountain-coded
//! block delivery versus idealized ARQ.
//!
//! Exit codes: 0 success, 2 usage error, 3 I/O error, 4 internal numerical
//! consistency failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use fluid_core::analytics::{
    arq_delivery_round, cost_ratio, efficiency_bound, fluid_delivery_round, latency_bounds,
    loss_product_trajectory, round_distribution, DeliveryDistribution,
};
use fluid_core::protocol::BlockSpec;
use fluid_core::sim::{
    monte_carlo, parse_loss_model, run_aligned_pair, run_block, LossModel, Mode, Protocol,
    Scenario, ScenarioFile,
};
use std::fmt::Write as _;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fluid",
    version,
    about = "Fountain-coded block delivery laboratory: exact analysis and deterministic simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact delivery-round percentages for FLUID and ARQ across loss rates
    Table1(Table1Args),
    /// Loss-product trajectory for an explicit sequence of round loss fractions
    Trajectory(TrajectoryArgs),
    /// Monte Carlo simulation of one protocol, with exact overlay under Bernoulli loss
    Simulate(SimulateArgs),
    /// Aligned FLUID/ARQ paired runs over a shared loss realization
    Compare(CompareArgs),
    /// Block parameters with efficiency, cost and latency bounds
    Bounds(BoundsArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProtocolArg {
    Fluid,
    Arq,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Protocol {
        match p {
            ProtocolArg::Fluid => Protocol::Fluid,
            ProtocolArg::Arq => Protocol::Arq,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Comparison,
    Realistic,
}

enum CliError {
    Usage(String),
    Io(String),
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Numeric(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Table1(args) => cmd_table1(args),
        Command::Trajectory(args) => cmd_trajectory(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Bounds(args) => cmd_bounds(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fluid: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn emit(out: Option<&str>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Io(format!("cannot write {path}: {e}"))),
        None => {
            use std::io::Write;
            match std::io::stdout().write_all(content.as_bytes()) {
                Ok(()) => Ok(()),
                // downstream pipe closed (e.g. piped into head): not an error
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                Err(e) => Err(CliError::Io(format!("cannot write to stdout: {e}"))),
            }
        }
    }
}

fn parse_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("not a number: `{s}`")))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// table1
// ---------------------------------------------------------------------------

#[derive(Args)]
struct Table1Args {
    /// Loss rates in percent, comma separated
    #[arg(long, default_value = "0.1,0.2,0.5,1,2,5,10,20,50")]
    rates: String,
    /// Block budget N
    #[arg(long, default_value_t = 100)]
    n: u64,
    /// Slack parameter (FLUID recovers at K = floor(N*(1-epsilon)))
    #[arg(long, default_value_t = 0.10)]
    epsilon: f64,
    /// Rounds shown individually; the last column aggregates the rest
    #[arg(long, default_value_t = 9)]
    max_round: u32,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write output to a file instead of standard output
    #[arg(long)]
    out: Option<String>,
}

fn derived_k(n: u64, epsilon: f64) -> Result<u64, CliError> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(CliError::Usage(format!(
            "epsilon must lie in [0,1), got {epsilon}"
        )));
    }
    Ok((((n as f64) * (1.0 - epsilon) + 1e-9).floor() as u64).max(1))
}

fn cmd_table1(args: Table1Args) -> Result<ExitCode, CliError> {
    if args.n == 0 || args.max_round == 0 {
        return Err(CliError::Usage("n and max-round must be positive".into()));
    }
    let k = derived_k(args.n, args.epsilon)?;
    let rates = parse_list(&args.rates)?;

    let mut bad_rates = Vec::new();
    let mut rows: Vec<(f64, DeliveryDistribution, DeliveryDistribution)> = Vec::new();
    for rate in rates {
        if !(0.0..=100.0).contains(&rate) {
            eprintln!("fluid: skipping invalid loss rate {rate}% (must lie in [0,100])");
            bad_rates.push(rate);
            continue;
        }
        let p = rate / 100.0;
        let fluid = round_distribution(args.n, k, p, args.max_round)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let arq = round_distribution(args.n, args.n, p, args.max_round)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        for d in [&fluid, &arq] {
            if (d.total_mass() - 1.0).abs() > 1e-9 {
                return Err(CliError::Numeric(format!(
                    "distribution mass {} for p={p}",
                    d.total_mass()
                )));
            }
        }
        rows.push((rate, fluid, arq));
    }

    let content = match args.format {
        Format::Table => render_table1(&rows, args.max_round),
        Format::Csv => render_table1_csv(&rows, args.max_round),
    };
    emit(args.out.as_deref(), &content)?;
    if bad_rates.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(2))
    }
}

/// Cells whose two-decimal percentage rounds to zero render as "--".
fn cell(probability: f64) -> String {
    if probability * 10_000.0 < 0.5 {
        "--".into()
    } else {
        format!("{:.2}", probability * 100.0)
    }
}

fn render_table1(
    rows: &[(f64, DeliveryDistribution, DeliveryDistribution)],
    max_round: u32,
) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:>7}  {:<6}", "% loss", "scheme");
    for r in 1..=max_round {
        let _ = write!(out, "{r:>8}");
    }
    let _ = writeln!(out, "{:>8}", format!("{}+", max_round + 1));
    for (rate, fluid, arq) in rows {
        for (label, dist) in [("FLUID", fluid), ("ARQ", arq)] {
            if label == "FLUID" {
                let _ = write!(out, "{rate:>7}  ");
            } else {
                let _ = write!(out, "{:>7}  ", "");
            }
            let _ = write!(out, "{label:<6}");
            for e in &dist.entries {
                let _ = write!(out, "{:>8}", cell(*e));
            }
            let _ = writeln!(out, "{:>8}", cell(dist.tail));
        }
    }
    out
}

fn render_table1_csv(
    rows: &[(f64, DeliveryDistribution, DeliveryDistribution)],
    max_round: u32,
) -> String {
    let mut out = String::from("loss_percent,scheme,round,probability\n");
    for (rate, fluid, arq) in rows {
        for (label, dist) in [("FLUID", fluid), ("ARQ", arq)] {
            for (i, e) in dist.entries.iter().enumerate() {
                let _ = writeln!(out, "{rate},{label},{},{e}", i + 1);
            }
            let _ = writeln!(out, "{rate},{label},{}+,{}", max_round + 1, dist.tail);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// trajectory
// ---------------------------------------------------------------------------

#[derive(Args)]
struct TrajectoryArgs {
    /// Per-round loss fractions, comma separated (e.g. 0.90,0.40,0.25)
    #[arg(long)]
    rounds: String,
    /// Block budget N (real valued; the analysis works in expectations)
    #[arg(long, default_value_t = 100.0)]
    n: f64,
    /// FLUID slack threshold
    #[arg(long, default_value_t = 0.10)]
    epsilon: f64,
    /// Optional exact slack threshold S/N overriding epsilon
    #[arg(long)]
    exact_threshold: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    out: Option<String>,
}

fn cmd_trajectory(args: TrajectoryArgs) -> Result<ExitCode, CliError> {
    let fractions = parse_list(&args.rounds)?;
    let trace =
        loss_product_trajectory(args.n, &fractions).map_err(|e| CliError::Usage(e.to_string()))?;
    let fluid = fluid_delivery_round(&trace, args.epsilon, args.exact_threshold);
    let arq = arq_delivery_round(&trace);

    let content = match args.format {
        Format::Csv => trace.to_csv(),
        Format::Table => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{:>5} {:>10} {:>14} {:>14}",
                "round", "fraction", "loss_product", "remaining"
            );
            let _ = writeln!(out, "{:>5} {:>10} {:>14} {:>14.4}", 0, "-", 1.0, trace.n);
            for (i, ((f, p), l)) in trace
                .fractions
                .iter()
                .zip(&trace.products)
                .zip(&trace.losses)
                .enumerate()
            {
                let _ = writeln!(out, "{:>5} {:>10} {:>14.6} {:>14.4}", i + 1, f, p, l);
            }
            let threshold = args.exact_threshold.unwrap_or(args.epsilon);
            let _ = writeln!(out, "slack threshold: {threshold}");
            let _ = match fluid {
                Some(r) => writeln!(out, "FLUID delivers in round {r}"),
                None => writeln!(out, "FLUID undelivered within the listed rounds"),
            };
            let _ = match arq {
                Some(r) => writeln!(out, "ARQ delivers in round {r}"),
                None => writeln!(out, "ARQ undelivered within the listed rounds"),
            };
            out
        }
    };
    emit(args.out.as_deref(), &content)?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// shared scenario building for simulate/compare
// ---------------------------------------------------------------------------

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file (key = value lines); flags below override its fields
    #[arg(long)]
    scenario: Option<String>,
    /// Source packets per block
    #[arg(long)]
    k: Option<u64>,
    /// Block budget
    #[arg(long)]
    n: Option<u64>,
    /// Slack parameter
    #[arg(long)]
    epsilon: Option<f64>,
    /// Loss model: bernoulli:P | rounds:F1,F2,... | ge:PG,PB,PG2B,PB2G
    #[arg(long)]
    loss: Option<String>,
    #[arg(long)]
    rtt: Option<f64>,
    #[arg(long)]
    tx_interval: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Run FLUID past recovery until N packets are received
    #[arg(long)]
    extend_to_budget: bool,
    /// Absolute block-timer deadline
    #[arg(long)]
    block_timer: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
}

impl ScenarioArgs {
    fn build(&self) -> Result<(Scenario, u64), CliError> {
        let usage = |m: String| CliError::Usage(m);
        let (mut scenario, file_trials) = match &self.scenario {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("cannot read {path}: {e}")))?;
                let parsed = ScenarioFile::parse(&text).map_err(|e| usage(e.to_string()))?;
                (parsed.scenario, parsed.trials)
            }
            None => {
                let spec = self.spec_from_flags()?.ok_or_else(|| {
                    usage("give a --scenario file or exactly two of --k/--n/--epsilon".into())
                })?;
                let loss = self
                    .loss
                    .as_deref()
                    .ok_or_else(|| usage("missing --loss".into()))?;
                let loss = parse_loss_model(loss).map_err(usage)?;
                (Scenario::new(spec, loss, 1.0, 0.0, 0), None)
            }
        };
        if self.scenario.is_some() {
            // flag overrides on top of the file
            if let Some(loss) = &self.loss {
                scenario.loss = parse_loss_model(loss).map_err(usage)?;
            }
            if let Some(spec) = self.spec_from_flags()? {
                scenario.spec = spec;
            }
        }
        if let Some(rtt) = self.rtt {
            scenario.rtt = rtt;
        }
        if let Some(tx) = self.tx_interval {
            scenario.tx_interval = tx;
        }
        if let Some(seed) = self.seed {
            scenario.seed = seed;
        }
        if let Some(mode) = self.mode {
            scenario.mode = match mode {
                ModeArg::Comparison => Mode::Comparison,
                ModeArg::Realistic => Mode::Realistic,
            };
        }
        if self.extend_to_budget {
            scenario.extend_to_budget = true;
        }
        if let Some(t) = self.block_timer {
            scenario.block_timer = Some(t);
        }
        scenario.validate().map_err(|e| usage(e.to_string()))?;
        let trials = self.trials.or(file_trials).unwrap_or(1000);
        if trials == 0 {
            return Err(usage("trials must be at least 1".into()));
        }
        Ok((scenario, trials))
    }

    fn spec_from_flags(&self) -> Result<Option<BlockSpec>, CliError> {
        let usage = |m: String| CliError::Usage(m);
        let spec = match (self.k, self.n, self.epsilon) {
            (None, None, None) => return Ok(None),
            (Some(k), None, Some(e)) => {
                BlockSpec::from_epsilon(1, k, e).map_err(|e| usage(e.to_string()))?
            }
            (Some(k), Some(n), None) => {
                BlockSpec::from_budget(1, k, n).map_err(|e| usage(e.to_string()))?
            }
            (None, Some(n), Some(e)) => {
                let k = derived_k(n, e)?;
                BlockSpec::from_budget(1, k, n).map_err(|e| usage(e.to_string()))?
            }
            _ => return Err(usage("give exactly two of --k/--n/--epsilon".into())),
        };
        Ok(Some(spec))
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, value_enum, default_value_t = ProtocolArg::Fluid)]
    protocol: ProtocolArg,
    /// Rounds shown in the distribution output
    #[arg(long, default_value_t = 12)]
    max_round: u32,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    out: Option<String>,
    /// Also write one CSV row per trial to this path
    #[arg(long)]
    per_trial_out: Option<String>,
}

fn exact_overlay(
    scenario: &Scenario,
    protocol: Protocol,
    max_round: u32,
) -> Result<Option<DeliveryDistribution>, CliError> {
    let (LossModel::Bernoulli { p }, Mode::Comparison) = (&scenario.loss, scenario.mode) else {
        return Ok(None);
    };
    let m = match protocol {
        Protocol::Fluid => scenario.spec.k,
        Protocol::Arq => scenario.spec.n,
    };
    let dist = round_distribution(scenario.spec.n, m, *p, max_round)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if (dist.total_mass() - 1.0).abs() > 1e-9 {
        return Err(CliError::Numeric(format!(
            "exact distribution mass {}",
            dist.total_mass()
        )));
    }
    Ok(Some(dist))
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode, CliError> {
    let (scenario, trials) = args.scenario.build()?;
    let protocol: Protocol = args.protocol.into();
    let dist = monte_carlo(&scenario, protocol, trials);
    let exact = exact_overlay(&scenario, protocol, args.max_round)?;

    if let Some(path) = &args.per_trial_out {
        let mut csv = String::from(fluid_core::sim::BlockResult::csv_header());
        csv.push('\n');
        for i in 0..trials {
            let result = run_block(&scenario.with_trial_seed(i), protocol);
            csv.push_str(&result.to_csv_row(i));
            csv.push('\n');
        }
        std::fs::write(path, csv).map_err(|e| CliError::Io(format!("cannot write {path}: {e}")))?;
    }

    let rounds_shown = (dist.round_freq.len() as u32).max(args.max_round);
    let content = match args.format {
        Format::Csv => {
            let mut out = String::from("round,frequency,exact\n");
            for i in 0..rounds_shown as usize {
                let freq = dist.round_freq.get(i).copied().unwrap_or(0.0);
                let e = exact
                    .as_ref()
                    .and_then(|d| d.entries.get(i))
                    .map_or(String::new(), |v| v.to_string());
                let _ = writeln!(out, "{},{freq},{e}", i + 1);
            }
            let tail = exact.as_ref().map_or(String::new(), |d| d.tail.to_string());
            let _ = writeln!(out, "undelivered,{},{tail}", dist.undelivered);
            out
        }
        Format::Table => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{} over {} trials: K={} N={} seed={}",
                protocol.name(),
                trials,
                scenario.spec.k,
                scenario.spec.n,
                scenario.seed
            );
            let _ = writeln!(
                out,
                "{:>6} {:>12} {:>12}",
                "round",
                "empirical",
                if exact.is_some() { "exact" } else { "" }
            );
            for i in 0..rounds_shown as usize {
                let freq = dist.round_freq.get(i).copied().unwrap_or(0.0);
                let e = exact.as_ref().and_then(|d| d.entries.get(i)).copied();
                if freq == 0.0 && e.unwrap_or(0.0) < 1e-6 {
                    continue;
                }
                match e {
                    Some(e) => {
                        let _ = writeln!(out, "{:>6} {:>12.5} {:>12.5}", i + 1, freq, e);
                    }
                    None => {
                        let _ = writeln!(out, "{:>6} {:>12.5}", i + 1, freq);
                    }
                }
            }
            if dist.undelivered > 0.0 {
                let _ = writeln!(out, "undelivered: {}", dist.undelivered);
            }
            if let (Some(mean), Some(p50), Some(p99)) =
                (dist.mean_round, dist.p50_round, dist.p99_round)
            {
                let _ = writeln!(out, "delivery round: mean {mean:.4}, p50 {p50}, p99 {p99}");
            }
            if let (Some(mean), Some(p50), Some(p99)) =
                (dist.mean_time, dist.p50_time, dist.p99_time)
            {
                let _ = writeln!(out, "delivery time: mean {mean:.4}, p50 {p50}, p99 {p99}");
            }
            let _ = writeln!(
                out,
                "transmissions per block: mean {}",
                dist.mean_transmissions
            );
            out
        }
    };
    emit(args.out.as_deref(), &content)?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[arg(long)]
    out: Option<String>,
}

fn cmd_compare(args: CompareArgs) -> Result<ExitCode, CliError> {
    let (scenario, trials) = args.scenario.build()?;
    let mut csv = String::from("trial,fluid_round,arq_round,fluid_time,arq_time,fluid_tx,arq_tx\n");
    let mut dominance_violations = 0u64;
    let mut unequal_totals = 0u64;
    let mut fluid_round_sum = 0u64;
    let mut arq_round_sum = 0u64;
    let mut delivered_pairs = 0u64;
    for i in 0..trials {
        let sc = scenario.with_trial_seed(i);
        let (fluid, arq) = run_aligned_pair(&sc);
        if scenario.extend_to_budget && fluid.transmissions_total != arq.transmissions_total {
            unequal_totals += 1;
        }
        if let (Some(f), Some(a)) = (fluid.delivery_round, arq.delivery_round) {
            delivered_pairs += 1;
            fluid_round_sum += f as u64;
            arq_round_sum += a as u64;
            if f > a {
                dominance_violations += 1;
            }
        }
        let _ = writeln!(
            csv,
            "{i},{},{},{},{},{},{}",
            fluid
                .delivery_round
                .map_or(String::new(), |r| r.to_string()),
            arq.delivery_round.map_or(String::new(), |r| r.to_string()),
            fluid.delivery_time.map_or(String::new(), |t| t.to_string()),
            arq.delivery_time.map_or(String::new(), |t| t.to_string()),
            fluid.transmissions_total,
            arq.transmissions_total,
        );
    }

    let content = match args.format {
        Format::Csv => csv,
        Format::Table => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "aligned pairs: {trials} (delivered both: {delivered_pairs})"
            );
            if delivered_pairs > 0 {
                let _ = writeln!(
                    out,
                    "mean delivery round: FLUID {:.4}, ARQ {:.4}",
                    fluid_round_sum as f64 / delivered_pairs as f64,
                    arq_round_sum as f64 / delivered_pairs as f64
                );
            }
            let _ = writeln!(
                out,
                "dominance violations (FLUID later than ARQ): {dominance_violations}"
            );
            if scenario.extend_to_budget {
                let _ = writeln!(
                    out,
                    "unequal transmission totals under extension: {unequal_totals}"
                );
            }
            out
        }
    };
    emit(args.out.as_deref(), &content)?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    k: u64,
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    rtt: f64,
    #[arg(long, default_value_t = 0.0)]
    tx_interval: f64,
    /// Delivery round for the latency envelope
    #[arg(long, default_value_t = 1)]
    round: u32,
}

fn cmd_bounds(args: BoundsArgs) -> Result<ExitCode, CliError> {
    let spec = BlockSpec::from_epsilon(1, args.k, args.epsilon)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if args.round == 0 {
        return Err(CliError::Usage("round must be at least 1".into()));
    }
    let (eff, eff_bound) =
        efficiency_bound(args.k, args.epsilon).map_err(|e| CliError::Usage(e.to_string()))?;
    let (ratio, ratio_bound) =
        cost_ratio(args.k, args.epsilon).map_err(|e| CliError::Usage(e.to_string()))?;
    if eff < eff_bound || ratio > ratio_bound {
        return Err(CliError::Numeric("bound check failed".into()));
    }
    let t = spec.n as f64 * args.tx_interval;
    let (lower, upper) = latency_bounds(t, args.rtt, args.round, spec.k, spec.n);

    let mut out = String::new();
    let _ = writeln!(out, "K = {}", spec.k);
    let _ = writeln!(out, "epsilon = {}", spec.epsilon);
    let _ = writeln!(out, "lambda = {}", spec.lambda);
    let _ = writeln!(out, "N = {}", spec.n);
    let _ = writeln!(out, "S = {}", spec.s);
    let _ = writeln!(
        out,
        "exact slack threshold S/N = {}",
        spec.exact_threshold()
    );
    let _ = writeln!(out, "delivery efficiency K/N = {eff} (bound {eff_bound})");
    let _ = writeln!(out, "cost ratio N/K = {ratio} (bound {ratio_bound})");
    let _ = writeln!(
        out,
        "latency for round {} with T = {t}, RTT = {}: [{lower}, {upper}]",
        args.round, args.rtt
    );
    emit(None, &out)?;
    Ok(ExitCode::SUCCESS)
}

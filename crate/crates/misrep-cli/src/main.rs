//! Command-line driver: every library operation behind one binary.
//!
//! Exit codes: 0 success, 2 usage errors, 3 input or domain errors,
//! 4 refused resource guards.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use misrep::empirics::{batch_run, EmpiricsConfig, FilterConfig};
use misrep::frontier::{enumerate_points, frontier_slopes};
use misrep::gerrymander::{cost_monotonicity_check, gerry_cost, GerryOutcome, GerryTarget};
use misrep::majorization::{
    majorizes, mm_holds_fixed_s, mm_violation_search, MajorizationResult, MmSearchOutcome,
};
use misrep::model::{agg_misrep, dist_misrep, phi, PhiValue, Profile};
use misrep::optimizer::{
    optimal_cutoff, optimal_seats, seat_schedule, transition_weights, weight_interval,
    WeightInterval,
};
use misrep::ratio::{format_decimal, format_ratio, parse_ratio};
use misrep::rules::{
    gerrymandering_proofness_counterexample, strong_monotonicity_counterexample,
    GerrymanderOutcome, MonotonicityOutcome,
};
use misrep::{Error, Rational, Weight};

#[derive(Parser)]
#[command(
    name = "misrep",
    version,
    about = "Seat allocation balancing district-level and aggregate misrepresentation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal seat totals, allocation, and objective values at one weight.
    Solve(SolveArgs),
    /// Seat counts, switch weights, and cutoffs across all weights.
    Schedule(ScheduleArgs),
    /// Achievable (dist, agg) value pairs and the Pareto frontier.
    Frontier(FrontierArgs),
    /// Certified axiom counterexamples for the rule family.
    Axioms(AxiomsArgs),
    /// Concentration comparisons and violation search.
    Majorize(MajorizeArgs),
    /// Cheapest-redraw costs toward a seat target.
    Gerry(GerryArgs),
    /// Batch pipeline from race returns to an implied-weight report.
    Empirics(EmpiricsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    emit: Emit,
    /// Render rationals as decimals with this many digits instead of
    /// exact fractions.
    #[arg(long)]
    decimal_digits: Option<u32>,
}

impl OutputArgs {
    fn rational(&self, r: &Rational) -> String {
        match self.decimal_digits {
            None => format_ratio(r),
            Some(d) => format_decimal(r, d),
        }
    }

    fn weight(&self, w: &Weight) -> String {
        match w {
            Weight::Finite(v) => self.rational(v),
            Weight::Infinity => "inf".into(),
        }
    }

    fn phi(&self, v: &PhiValue) -> Value {
        match v {
            PhiValue::Finite(x) => Value::String(self.rational(x)),
            PhiValue::Lexicographic { agg, dist } => json!({
                "agg": self.rational(agg),
                "dist": self.rational(dist),
            }),
        }
    }

    /// Prints rows under `headers` as CSV or as a JSON array of objects.
    fn table(&self, headers: &[&str], rows: Vec<Vec<Value>>) -> Result<(), Error> {
        match self.emit {
            Emit::Csv => {
                let mut w = csv::Writer::from_writer(vec![]);
                w.write_record(headers)?;
                for row in rows {
                    w.write_record(row.iter().map(csv_cell))?;
                }
                let bytes = w.into_inner().expect("in-memory writer");
                print!("{}", String::from_utf8(bytes).expect("utf8 output"));
            }
            Emit::Json => {
                let objects: Vec<Value> = rows
                    .into_iter()
                    .map(|row| {
                        let map: serde_json::Map<String, Value> =
                            headers.iter().map(|h| h.to_string()).zip(row).collect();
                        Value::Object(map)
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&Value::Array(objects))?);
            }
        }
        Ok(())
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        other => other.to_string(),
    }
}

fn load_profile(path: &PathBuf) -> Result<Profile, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    Profile::from_text(&text)
}

fn parse_weight(s: &str) -> Result<Weight, String> {
    Weight::parse(s).map_err(|e| e.to_string())
}

fn parse_rational_arg(s: &str) -> Result<Rational, String> {
    parse_ratio(s).map_err(|e| e.to_string())
}

/// Shares of a profile as a semicolon-joined list.
fn profile_field(out: &OutputArgs, p: &Profile) -> String {
    (0..p.len())
        .map(|d| out.rational(p.share(d).value()))
        .collect::<Vec<_>>()
        .join(";")
}

#[derive(Args)]
struct SolveArgs {
    /// Profile file: one district per line, either a share or
    /// `a_votes,total_votes`.
    #[arg(long)]
    profile: PathBuf,
    /// Objective weight on aggregate misrepresentation; `inf` allowed.
    #[arg(long, value_parser = parse_weight)]
    weight: Weight,
    #[command(flatten)]
    out: OutputArgs,
}

fn cmd_solve(args: &SolveArgs) -> Result<(), Error> {
    let p = load_profile(&args.profile)?;
    let optimal = optimal_seats(&p, &args.weight)?;
    let selected = *optimal.last().expect("optimum is never empty");
    let alloc = misrep::model::top_s_allocation(&p, selected)?;
    let awarded: Vec<String> = alloc
        .awarded_districts()
        .iter()
        .map(|d| (d + 1).to_string())
        .collect();
    let dist = dist_misrep(&p, &alloc)?;
    let agg = agg_misrep(&p, selected)?;
    let value = phi(&p, &alloc, &args.weight)?;
    let cutoff = optimal_cutoff(&p, &args.weight)?;
    let interval = weight_interval(&p, selected)?;
    let row = vec![
        json!(p.len()),
        Value::String(args.out.rational(p.aggregate())),
        Value::String(args.out.weight(&args.weight)),
        json!(optimal.first().copied().unwrap()),
        json!(selected),
        Value::String(awarded.join(";")),
        Value::String(args.out.rational(&dist)),
        Value::String(args.out.rational(&agg)),
        args.out.phi(&value),
        Value::String(args.out.rational(cutoff.value())),
        Value::String(describe_interval(&args.out, &interval)),
    ];
    args.out.table(
        &[
            "districts",
            "aggregate",
            "weight",
            "optimal_low",
            "optimal_high",
            "awarded",
            "dist",
            "agg",
            "phi",
            "cutoff",
            "selected_support",
        ],
        vec![row],
    )
}

fn describe_interval(out: &OutputArgs, interval: &WeightInterval) -> String {
    match interval {
        WeightInterval::Empty => "empty".into(),
        WeightInterval::InfinityOnly => "inf".into(),
        WeightInterval::Range {
            lo,
            hi,
            includes_infinity,
        } => {
            let hi_s = match hi {
                Weight::Finite(v) => out.rational(v),
                Weight::Infinity => "inf".into(),
            };
            let tail = if *includes_infinity && hi.is_finite() {
                "+inf"
            } else {
                ""
            };
            format!("{}..{}{}", out.rational(lo), hi_s, tail)
        }
    }
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long)]
    profile: PathBuf,
    #[command(flatten)]
    out: OutputArgs,
}

fn cmd_schedule(args: &ScheduleArgs) -> Result<(), Error> {
    let p = load_profile(&args.profile)?;
    let schedule = seat_schedule(&p)?;
    let tw = transition_weights(&p)?;
    let rising = schedule.start <= schedule.end;
    // Segment boundaries: 0, each switch weight, infinity. Rising
    // schedules hold their seat count on [lo, hi); falling schedules on
    // (lo, hi]. The cutoff column is evaluated at the inclusive end.
    let mut bounds: Vec<Weight> = vec![Weight::zero()];
    bounds.extend(schedule.breakpoints());
    bounds.push(Weight::Infinity);
    let mut seats = vec![schedule.start];
    seats.extend(schedule.steps.iter().map(|s| s.seats));
    let mut rows = Vec::new();
    for (i, seat) in seats.iter().enumerate() {
        let (lo, hi) = (&bounds[i], &bounds[i + 1]);
        let probe = if rising { lo } else { hi };
        let cutoff = optimal_cutoff(&p, probe)?;
        rows.push(vec![
            Value::String(args.out.weight(lo)),
            Value::String(args.out.weight(hi)),
            json!(seat),
            Value::String(args.out.rational(cutoff.value())),
        ]);
    }
    args.out.table(&["w_lo", "w_hi", "seats", "cutoff"], rows)?;
    if matches!(args.out.emit, Emit::Csv) {
        let ceil = tw
            .w_ceil
            .as_ref()
            .map(|v| args.out.rational(v))
            .unwrap_or_else(|| "none".into());
        eprintln!(
            "# start {} -> end {}; w_floor {}; w_ceil {}; w_pr {}",
            schedule.start,
            schedule.end,
            args.out.rational(&tw.w_floor),
            ceil,
            args.out.weight(&tw.w_pr),
        );
    }
    Ok(())
}

#[derive(Args)]
struct FrontierArgs {
    #[arg(long)]
    profile: PathBuf,
    /// Enumerate all 2^N allocations instead of the N+1 strongest-first
    /// ones (refused above 20 districts).
    #[arg(long)]
    full: bool,
    #[command(flatten)]
    out: OutputArgs,
}

fn cmd_frontier(args: &FrontierArgs) -> Result<(), Error> {
    let p = load_profile(&args.profile)?;
    let points = enumerate_points(&p, args.full)?;
    let rows: Vec<Vec<Value>> = points
        .iter()
        .map(|pt| {
            vec![
                json!(pt.seat_total),
                Value::String(args.out.rational(&pt.dist)),
                Value::String(args.out.rational(&pt.agg)),
                json!(pt.is_pareto),
                Value::String(
                    pt.supporting
                        .as_ref()
                        .map(|i| describe_interval(&args.out, i))
                        .unwrap_or_default(),
                ),
            ]
        })
        .collect();
    args.out
        .table(&["seats", "dist", "agg", "pareto", "support"], rows)?;
    if !args.full && matches!(args.out.emit, Emit::Csv) {
        let slopes: Vec<String> = frontier_slopes(&p)?
            .iter()
            .map(|(w, s)| format!("{}@{}", args.out.rational(s), args.out.rational(w)))
            .collect();
        eprintln!(
            "# frontier slopes (slope@switch-weight): {}",
            slopes.join(" ")
        );
    }
    Ok(())
}

#[derive(Clone, Copy, ValueEnum)]
enum Axiom {
    /// Raising a winner's share must never cost it the seat.
    Monotonicity,
    /// Equal-total redraws must not move seats.
    Redistricting,
}

#[derive(Args)]
struct AxiomsArgs {
    #[arg(long, value_enum)]
    axiom: Axiom,
    #[arg(long, value_parser = parse_weight)]
    weight: Weight,
    /// District count for the counterexample construction.
    #[arg(long, default_value_t = 3)]
    districts: usize,
    #[command(flatten)]
    out: OutputArgs,
}

fn cmd_axioms(args: &AxiomsArgs) -> Result<(), Error> {
    let headers = [
        "axiom",
        "weight",
        "districts",
        "outcome",
        "before",
        "after",
        "detail",
    ];
    let row = match args.axiom {
        Axiom::Monotonicity => {
            match strong_monotonicity_counterexample(&args.weight, args.districts)? {
                MonotonicityOutcome::Holds => vec![
                    Value::String("monotonicity".into()),
                    Value::String(args.out.weight(&args.weight)),
                    json!(args.districts),
                    Value::String("holds".into()),
                    Value::Null,
                    Value::Null,
                    Value::Null,
                ],
                MonotonicityOutcome::Violated(cx) => vec![
                    Value::String("monotonicity".into()),
                    Value::String(args.out.weight(&args.weight)),
                    json!(args.districts),
                    Value::String("violated".into()),
                    Value::String(profile_field(&args.out, &cx.before)),
                    Value::String(profile_field(&args.out, &cx.after)),
                    Value::String(format!("district {} loses its seat", cx.lost_district + 1)),
                ],
            }
        }
        Axiom::Redistricting => {
            match gerrymandering_proofness_counterexample(&args.weight, args.districts)? {
                GerrymanderOutcome::Holds => vec![
                    Value::String("redistricting".into()),
                    Value::String(args.out.weight(&args.weight)),
                    json!(args.districts),
                    Value::String("holds".into()),
                    Value::Null,
                    Value::Null,
                    Value::Null,
                ],
                GerrymanderOutcome::Violated(cx) => vec![
                    Value::String("redistricting".into()),
                    Value::String(args.out.weight(&args.weight)),
                    json!(args.districts),
                    Value::String("violated".into()),
                    Value::String(profile_field(&args.out, &cx.before)),
                    Value::String(profile_field(&args.out, &cx.after)),
                    Value::String(format!("seats {} -> {}", cx.seats_before, cx.seats_after)),
                ],
            }
        }
    };
    args.out.table(&headers, vec![row])
}

#[derive(Args)]
struct MajorizeArgs {
    /// Candidate dominating profile.
    #[arg(long, required_unless_present = "search", conflicts_with = "search")]
    left: Option<PathBuf>,
    /// Candidate dominated profile.
    #[arg(long, required_unless_present = "search", conflicts_with = "search")]
    right: Option<PathBuf>,
    /// Also report the fixed-seat slack at this seat total (needs
    /// --weight).
    #[arg(long, requires = "weight")]
    seats: Option<usize>,
    /// Weight for the fixed-seat slack.
    #[arg(long, value_parser = parse_weight, requires = "seats")]
    weight: Option<Weight>,
    /// Search for a certified violation instead of comparing two files.
    #[arg(long, requires = "rule_weight", requires = "eval_weight")]
    search: bool,
    /// Rule weight for the search.
    #[arg(long, value_parser = parse_weight)]
    rule_weight: Option<Weight>,
    /// Scoring weight for the search.
    #[arg(long, value_parser = parse_weight)]
    eval_weight: Option<Weight>,
    /// Rule-evaluation budget for the search.
    #[arg(long, default_value_t = 10_000)]
    attempts: usize,
    /// Seed for the randomized fallback.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

fn cmd_majorize(args: &MajorizeArgs) -> Result<(), Error> {
    if args.search {
        let lambda = args.rule_weight.clone().expect("enforced by clap");
        let eval = args.eval_weight.clone().expect("enforced by clap");
        let outcome = mm_violation_search(&lambda, &eval, args.attempts, args.seed)?;
        let headers = [
            "outcome",
            "rule_evaluations",
            "more_concentrated",
            "less_concentrated",
            "seats_more",
            "seats_less",
            "phi_more",
            "phi_less",
        ];
        let row = match outcome {
            MmSearchOutcome::NotFound { rule_evaluations } => vec![
                Value::String("not_found".into()),
                json!(rule_evaluations),
                Value::Null,
                Value::Null,
                Value::Null,
                Value::Null,
                Value::Null,
                Value::Null,
            ],
            MmSearchOutcome::Found(v) => vec![
                Value::String("violation".into()),
                json!(v.rule_evaluations),
                Value::String(profile_field(&args.out, &v.more_concentrated)),
                Value::String(profile_field(&args.out, &v.less_concentrated)),
                json!(v.seats_more),
                json!(v.seats_less),
                args.out.phi(&v.phi_more),
                args.out.phi(&v.phi_less),
            ],
        };
        return args.out.table(&headers, vec![row]);
    }
    let left = load_profile(args.left.as_ref().expect("enforced by clap"))?;
    let right = load_profile(args.right.as_ref().expect("enforced by clap"))?;
    let result = majorizes(&left, &right)?;
    let slack = match (&args.seats, &args.weight, &result) {
        (Some(s), Some(w), MajorizationResult::Majorizes(_)) => {
            Some(mm_holds_fixed_s(&left, &right, *s, w)?)
        }
        _ => None,
    };
    let headers = ["outcome", "detail", "prefix_gaps", "slack"];
    let row = match result {
        MajorizationResult::Majorizes(cert) => vec![
            Value::String("majorizes".into()),
            Value::Null,
            Value::String(
                cert.prefix_gaps
                    .iter()
                    .map(|g| args.out.rational(g))
                    .collect::<Vec<_>>()
                    .join(";"),
            ),
            slack
                .map(|s| Value::String(args.out.rational(&s)))
                .unwrap_or(Value::Null),
        ],
        MajorizationResult::UnequalTotals { p_total, q_total } => vec![
            Value::String("unequal_totals".into()),
            Value::String(format!(
                "{} vs {}",
                args.out.rational(&p_total),
                args.out.rational(&q_total)
            )),
            Value::Null,
            Value::Null,
        ],
        MajorizationResult::PrefixViolation {
            prefix_len,
            shortfall,
        } => vec![
            Value::String("prefix_violation".into()),
            Value::String(format!(
                "top-{prefix_len} sum falls short by {}",
                args.out.rational(&shortfall)
            )),
            Value::Null,
            Value::Null,
        ],
    };
    args.out.table(&headers, vec![row])
}

#[derive(Args)]
struct GerryArgs {
    #[arg(long)]
    profile: PathBuf,
    /// Seat target the redraw must reach.
    #[arg(long = "k", visible_alias = "seats")]
    seats: usize,
    /// Comma-separated nondecreasing weights, e.g. `0,0.1,0.2,inf`.
    #[arg(long, value_delimiter = ',', value_parser = parse_weight)]
    weights: Vec<Weight>,
    #[command(flatten)]
    out: OutputArgs,
}

fn cmd_gerry(args: &GerryArgs) -> Result<(), Error> {
    let p = load_profile(&args.profile)?;
    let curve = cost_monotonicity_check(&p, args.seats, &args.weights)?;
    let mut rows = Vec::new();
    for point in &curve.points {
        let target = GerryTarget {
            baseline: p.clone(),
            weight: point.weight.clone(),
            seats: args.seats,
        };
        let witness = match gerry_cost(&target)? {
            GerryOutcome::Feasible { witness, .. } => profile_field(&args.out, &witness),
            GerryOutcome::Infeasible { .. } => unreachable!("curve points are feasible"),
        };
        rows.push(vec![
            Value::String(args.out.weight(&point.weight)),
            Value::String("feasible".into()),
            Value::String(args.out.rational(&point.cost)),
            Value::String(witness),
        ]);
    }
    if let Some(w) = &curve.truncated_at {
        let target = GerryTarget {
            baseline: p.clone(),
            weight: w.clone(),
            seats: args.seats,
        };
        let reason = match gerry_cost(&target)? {
            GerryOutcome::Infeasible { reason } => reason,
            GerryOutcome::Feasible { .. } => unreachable!("truncation weight is infeasible"),
        };
        rows.push(vec![
            Value::String(args.out.weight(w)),
            Value::String("infeasible".into()),
            Value::Null,
            Value::String(reason),
        ]);
    }
    args.out
        .table(&["weight", "status", "cost", "witness"], rows)
}

#[derive(Args)]
struct EmpiricsArgs {
    /// Directory of race-returns CSV files.
    #[arg(long)]
    input: PathBuf,
    /// Directory of presidential-baseline CSV files.
    #[arg(long)]
    baseline: PathBuf,
    /// Report CSV path; the exclusion log lands next to it.
    #[arg(long)]
    output: PathBuf,
    /// Cap for the capped weight columns.
    #[arg(long, default_value = "0.6", value_parser = parse_rational_arg)]
    cap: Rational,
    /// Minimum districts per state-year.
    #[arg(long, default_value_t = 8)]
    min_districts: usize,
    /// Maximum tolerated fraction of nonmajor-dominated districts.
    #[arg(long, default_value = "1/4", value_parser = parse_rational_arg)]
    nonmajor_max_frac: Rational,
}

fn cmd_empirics(args: &EmpiricsArgs) -> Result<(), Error> {
    let config = EmpiricsConfig {
        filter: FilterConfig {
            min_districts: args.min_districts,
            nonmajor_max_frac: args.nonmajor_max_frac.clone(),
        },
        cap: args.cap.clone(),
    };
    let summary = batch_run(&args.input, &args.baseline, &args.output, &config)?;
    println!(
        "wrote {} state-years to {} ({} excluded; log at {})",
        summary.state_years,
        summary.report_path.display(),
        summary.excluded,
        summary.exclusions_path.display(),
    );
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Schedule(args) => cmd_schedule(args),
        Command::Frontier(args) => cmd_frontier(args),
        Command::Axioms(args) => cmd_axioms(args),
        Command::Majorize(args) => cmd_majorize(args),
        Command::Gerry(args) => cmd_gerry(args),
        Command::Empirics(args) => cmd_empirics(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Resource(_) => ExitCode::from(4),
                _ => ExitCode::from(3),
            }
        }
    }
}

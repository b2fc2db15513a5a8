use std::io::Write;
use std::path::Path;

use serde_json::json;
use sidonlab::bmop::{
    build_bm, orbit, verify_block_identities, verify_disjoint_orbit_identity, BmOperator, BmParameters, Polynomial,
};
use sidonlab::deltasidon::{build_m_sequence, check_pairwise_disjoint, DeltaSidonFamily, IndexTuple};
use sidonlab::dhc::{select_power_indices, weak_mixing_witness, HittingData};
use sidonlab::natset::{
    enumerate_sidon_supersets, is_sidon, jn_offsets, quadratic_sequence, sidon_family_jn, sidon_violation,
    verify_difference_density, NatWindow,
};
use sidonlab::ratio::{format_ratio, Q};
use sidonlab::shiftlab::{
    build_weights_piecewise, build_weights_syndetic_gap, return_times_ball, square_blocks, Membership, WeightSequence,
};

use crate::config::{check_increasing, default_horizon, parse_eps, parse_positive, Format, RunConfig};
use crate::{
    BlockSpec, BmopCommand, Cli, CliError, Command, ConfigCommand, DeltaSidonCommand, DensityCommand, OperatorArgs,
    RuleName, SeqRule, ShiftCommand, SidonCommand, Status, WeightArgs, WitnessCommand,
};

const DEFAULT_EPS: &str = "2/5";

fn op_err(e: impl std::fmt::Display) -> CliError {
    CliError::Operation(e.to_string())
}

fn missing(flag: &str) -> CliError {
    CliError::Usage(format!("missing --{flag} (flag or config key)"))
}

fn horizon_or_default(flag: Option<u64>, config: &RunConfig) -> Result<u64, CliError> {
    match flag.or(config.horizon) {
        Some(h) => Ok(h),
        None => default_horizon(),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Operation(format!("malformed {what} {}: {e}", path.display())))
}

/// Runs one parsed command, writing its report to `out`.
pub fn execute(cli: &Cli, config: &RunConfig, out: &mut dyn Write) -> Result<Status, CliError> {
    let format = cli.format.or(config.format);
    match &cli.command {
        Command::Sidon(cmd) => sidon(cmd, config, format, out),
        Command::Deltasidon(cmd) => deltasidon(cmd, config, format, out),
        Command::Shift(cmd) => shift(cmd, config, format, out),
        Command::Bmop(cmd) => bmop(cmd, config, format, out),
        Command::Density(cmd) => density(cmd, config, format, out),
        Command::Witness(cmd) => witness(cmd, config, format, out),
        Command::Config(ConfigCommand::Check { file }) => {
            let checked = RunConfig::load(file)?;
            writeln!(out, "{}", checked.to_json())?;
            Ok(Status::Pass)
        }
    }
}

fn sidon(cmd: &SidonCommand, config: &RunConfig, format: Option<Format>, out: &mut dyn Write) -> Result<Status, CliError> {
    match cmd {
        SidonCommand::Check { set } => {
            let set = set.clone().map(|s| s.0).or_else(|| config.set.clone()).ok_or_else(|| missing("set"))?;
            let window = NatWindow::tight(set);
            let violation = sidon_violation(&window);
            match format.unwrap_or(Format::Text) {
                Format::Json => {
                    let report = json!({
                        "set": window.elements(),
                        "sidon": violation.is_none(),
                        "witness": violation.map(|q| q.as_array()),
                    });
                    writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("json"))?;
                }
                _ => match violation {
                    None => writeln!(out, "sidon: true")?,
                    Some(q) => writeln!(out, "sidon: false, witness {q}")?,
                },
            }
            Ok(Status::from_bool(violation.is_none()))
        }
        SidonCommand::Family { n } => {
            let n = n.or(config.n).ok_or_else(|| missing("n"))?;
            let set = sidon_family_jn(n).map_err(op_err)?;
            match format.unwrap_or(Format::Text) {
                Format::Json => {
                    let report = json!({
                        "n": n,
                        "offsets": jn_offsets(n).map_err(op_err)?,
                        "set": set.elements(),
                    });
                    writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("json"))?;
                }
                _ => writeln!(out, "{set}")?,
            }
            Ok(Status::from_bool(is_sidon(&set.with_zero())))
        }
        SidonCommand::Enumerate { bound } => {
            let bound = bound.or(config.bound).ok_or_else(|| missing("bound"))?;
            let json = format == Some(Format::Json);
            for window in enumerate_sidon_supersets(bound) {
                if json {
                    writeln!(out, "{}", serde_json::to_string(window.elements()).expect("json"))?;
                } else {
                    writeln!(out, "{window}")?;
                }
            }
            Ok(Status::Pass)
        }
    }
}

fn jn_sets(levels: u32) -> Result<Vec<NatWindow>, CliError> {
    (1..=u64::from(levels)).map(|n| sidon_family_jn(n).map_err(op_err)).collect()
}

fn deltasidon(
    cmd: &DeltaSidonCommand,
    config: &RunConfig,
    format: Option<Format>,
    out: &mut dyn Write,
) -> Result<Status, CliError> {
    match cmd {
        DeltaSidonCommand::Build { levels } => {
            let levels = levels.or(config.levels).ok_or_else(|| missing("levels"))?;
            let family = build_m_sequence(&jn_sets(levels)?, levels).map_err(op_err)?;
            let report = check_pairwise_disjoint(&family);
            match format.unwrap_or(Format::Json) {
                Format::Json => writeln!(out, "{}", family.to_json())?,
                _ => {
                    writeln!(out, "l,n,m")?;
                    for m in family.multipliers() {
                        writeln!(out, "{},{},{}", m.l, m.n, m.m)?;
                    }
                }
            }
            eprintln!(
                "certified: {levels} levels, {} tuples, {} intervals pairwise disjoint",
                family.tuples().len(),
                report.intervals_checked
            );
            Ok(Status::from_bool(report.disjoint))
        }
        DeltaSidonCommand::Verify { file } => {
            let family: DeltaSidonFamily = read_json(file, "family")?;
            let report = check_pairwise_disjoint(&family);
            match format.unwrap_or(Format::Text) {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("json"))?,
                _ => match &report.collision {
                    None => writeln!(out, "disjoint: true ({} intervals)", report.intervals_checked)?,
                    Some(c) => writeln!(
                        out,
                        "disjoint: false, J{} {} meets J{} {} at {}",
                        c.first,
                        c.first_interval,
                        c.second,
                        c.second_interval,
                        format_ratio(&c.point)
                    )?,
                },
            }
            Ok(Status::from_bool(report.disjoint))
        }
    }
}

fn weights_from(args: &WeightArgs, config: &RunConfig) -> Result<(WeightSequence, u64), CliError> {
    let horizon = horizon_or_default(args.horizon, config)?;
    let weights = match args.rule {
        RuleName::SyndeticGap => {
            let spec = args
                .blocks
                .clone()
                .or_else(|| config.blocks.clone().map(BlockSpec::List))
                .unwrap_or(BlockSpec::AutoK2);
            let blocks = match spec {
                BlockSpec::AutoK2 => square_blocks(horizon),
                BlockSpec::List(list) => {
                    check_increasing(&list, "blocks")?;
                    list
                }
            };
            build_weights_syndetic_gap(&blocks, horizon).map_err(op_err)?
        }
        RuleName::Piecewise => {
            let complement = args
                .complement
                .clone()
                .map(|s| s.0)
                .or_else(|| config.complement.clone())
                .ok_or_else(|| missing("complement"))?;
            check_increasing(&complement, "complement")?;
            let window = NatWindow::new(horizon, complement).map_err(|e| CliError::Usage(e.to_string()))?;
            build_weights_piecewise(&window, horizon).map_err(op_err)?
        }
    };
    Ok((weights, horizon))
}

fn membership_name(m: Membership) -> &'static str {
    match m {
        Membership::Member => "member",
        Membership::Nonmember => "nonmember",
        Membership::Boundary => "boundary",
    }
}

fn shift(cmd: &ShiftCommand, config: &RunConfig, format: Option<Format>, out: &mut dyn Write) -> Result<Status, CliError> {
    match cmd {
        ShiftCommand::Weights(args) => {
            let (weights, horizon) = weights_from(args, config)?;
            match format.unwrap_or(Format::Csv) {
                Format::Json => writeln!(out, "{}", weights.to_json())?,
                Format::Plotdata => {
                    let profile = weights.profile();
                    writeln!(out, "# n log2_prefix_product")?;
                    for n in 0..=horizon {
                        let log = profile.log2_product(n).ok_or_else(|| op_err("weights are not powers of two"))?;
                        writeln!(out, "{n} {log}")?;
                    }
                }
                Format::Csv | Format::Text => write!(out, "{}", weights.to_csv().map_err(op_err)?)?,
            }
            Ok(Status::Pass)
        }
        ShiftCommand::Returns { weights: args, eps } => {
            let (weights, horizon) = weights_from(args, config)?;
            let eps_text = eps.clone().or_else(|| config.eps.clone()).unwrap_or_else(|| DEFAULT_EPS.into());
            let eps = parse_eps(&eps_text)?;
            let verdict = return_times_ball(&weights, &eps, horizon).map_err(op_err)?;
            match format.unwrap_or(Format::Json) {
                Format::Json | Format::Text => writeln!(out, "{}", verdict.to_json())?,
                Format::Csv => {
                    writeln!(out, "n,verdict")?;
                    for n in 1..=horizon {
                        if let Some(m) = verdict.verdict(n) {
                            writeln!(out, "{n},{}", membership_name(m))?;
                        }
                    }
                }
                Format::Plotdata => {
                    writeln!(out, "# n verdict (1 member, 0 boundary, -1 nonmember)")?;
                    for n in 1..=horizon {
                        let code = match verdict.verdict(n) {
                            Some(Membership::Member) => 1,
                            Some(Membership::Boundary) => 0,
                            Some(Membership::Nonmember) | None => -1,
                        };
                        writeln!(out, "{n} {code}")?;
                    }
                }
            }
            Ok(Status::Pass)
        }
    }
}

/// Loads parameters (explicit or from a family) and builds the operator.
fn operator_from(
    args: &OperatorArgs,
    config: &RunConfig,
    dimension_hint: Option<u64>,
) -> Result<(BmOperator, Option<DeltaSidonFamily>), CliError> {
    let dimension = match args.dimension.or(config.dimension).or(dimension_hint) {
        Some(d) => d,
        None => default_horizon()?,
    };
    let (params, family) = match (&args.params, &args.fam) {
        (Some(path), _) => (read_json::<BmParameters>(path, "parameters")?, None),
        (None, Some(path)) => {
            let family: DeltaSidonFamily = read_json(path, "family")?;
            (BmParameters::from_family(&family, dimension, |_| Polynomial::zero()), Some(family))
        }
        (None, None) => return Err(missing("fam or --params")),
    };
    let op = build_bm(&params, dimension).map_err(op_err)?;
    Ok((op, family))
}

/// Smallest dimension holding every block up to `(l, n, |F_n|)`.
fn dimension_for(family: &DeltaSidonFamily, l: u32, n: u32) -> Option<u64> {
    let size = family.set(n)?.len() as u32;
    let last = IndexTuple::new(l, n, size);
    family
        .flattened()
        .into_iter()
        .filter(|(t, _)| *t <= last)
        .map(|(_, b)| u64::try_from(b).ok().map(|b| b + 1))
        .max()
        .flatten()
}

fn bmop(cmd: &BmopCommand, config: &RunConfig, format: Option<Format>, out: &mut dyn Write) -> Result<Status, CliError> {
    match cmd {
        BmopCommand::Build(args) => {
            let (op, _) = operator_from(args, config, None)?;
            match format.unwrap_or(Format::Csv) {
                Format::Json => {
                    let blocks: Vec<_> = op.blocks().iter().map(|b| &b.block).collect();
                    let report = json!({ "dimension": op.dimension(), "blocks": blocks });
                    writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("json"))?;
                }
                _ => write!(out, "{}", op.to_triplet_csv())?,
            }
            Ok(Status::Pass)
        }
        BmopCommand::Orbit { operator, steps } => {
            let (op, _) = operator_from(operator, config, None)?;
            let last_block = op.blocks().last().map(|b| b.block.b);
            let steps = steps
                .or(config.steps)
                .or(last_block)
                .unwrap_or(op.dimension().saturating_sub(2));
            let trace = orbit(&op, steps).map_err(op_err)?;
            match format.unwrap_or(Format::Json) {
                Format::Csv => {
                    writeln!(out, "n,index,num,den")?;
                    for step in &trace.steps {
                        for (i, v) in step.vector.iter() {
                            writeln!(out, "{},{i},{},{}", step.n, v.numer(), v.denom())?;
                        }
                    }
                }
                Format::Plotdata => {
                    writeln!(out, "# n max_support support_size")?;
                    for step in &trace.steps {
                        let top = step.vector.max_support().unwrap_or(0);
                        writeln!(out, "{} {top} {}", step.n, step.vector.iter().count())?;
                    }
                }
                Format::Json | Format::Text => write!(out, "{}", trace.to_json_lines())?,
            }
            Ok(Status::Pass)
        }
        BmopCommand::Verify { operator, l, n } => match (l, n) {
            (Some(l), Some(n)) => {
                let hint = match &operator.fam {
                    Some(path) if operator.dimension.or(config.dimension).is_none() => {
                        let family: DeltaSidonFamily = read_json(path, "family")?;
                        dimension_for(&family, *l, *n)
                    }
                    _ => None,
                };
                let (op, family) = operator_from(operator, config, hint)?;
                let family = family.ok_or_else(|| CliError::Usage("--l/--n need --fam".into()))?;
                let exact = verify_disjoint_orbit_identity(&op, &family, *l, *n).map_err(op_err)?;
                match format.unwrap_or(Format::Text) {
                    Format::Json => writeln!(out, "{}", json!({ "l": l, "n": n, "exact": exact }))?,
                    _ => writeln!(out, "identity: {}", if exact { "exact" } else { "failed" })?,
                }
                Ok(Status::from_bool(exact))
            }
            _ => {
                let (op, _) = operator_from(operator, config, None)?;
                let checks = verify_block_identities(&op).map_err(op_err)?;
                let exact = checks.iter().all(|c| c.exact);
                match format.unwrap_or(Format::Text) {
                    Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&checks).expect("json"))?,
                    _ => writeln!(
                        out,
                        "identity: {} ({} blocks)",
                        if exact { "exact" } else { "failed" },
                        checks.len()
                    )?,
                }
                Ok(Status::from_bool(exact))
            }
        },
    }
}

fn density(
    cmd: &DensityCommand,
    config: &RunConfig,
    format: Option<Format>,
    out: &mut dyn Write,
) -> Result<Status, CliError> {
    let DensityCommand::Report { seq_rule, c, horizon } = cmd;
    let c_text = c.clone().or_else(|| config.c.clone()).unwrap_or_else(|| "1".into());
    let c: Q = parse_positive(&c_text, "c")?;
    let horizon = horizon_or_default(*horizon, config)?;
    let seq = match seq_rule {
        SeqRule::Squares => quadratic_sequence(&c, horizon).map_err(op_err)?,
    };
    let report = verify_difference_density(&seq, &c, horizon).map_err(op_err)?;
    match format.unwrap_or(Format::Text) {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("json"))?,
        _ => {
            let bound = report.bound.to_string();
            writeln!(
                out,
                "estimate = {} at horizon {horizon}",
                format_ratio(&report.estimate.value)
            )?;
            writeln!(out, "estimate ≥ {bound}: {}", if report.pass { "pass" } else { "fail" })?;
        }
    }
    Ok(Status::from_bool(report.pass))
}

fn witness(
    cmd: &WitnessCommand,
    config: &RunConfig,
    format: Option<Format>,
    out: &mut dyn Write,
) -> Result<Status, CliError> {
    match cmd {
        WitnessCommand::Run { j, data, plant, horizon } => {
            let j = j.clone().map(|s| s.0).or_else(|| config.set.clone()).ok_or_else(|| missing("j"))?;
            let j = NatWindow::tight(j);
            let data = match (data, plant) {
                (Some(path), _) => read_json::<HittingData>(path, "hitting data")?,
                (None, Some(plant)) => {
                    let [n, k] = plant.0[..] else {
                        return Err(CliError::Usage("--plant takes `n,k`".into()));
                    };
                    let quadruple = sidon_violation(&j.with_zero()).ok_or_else(|| op_err("J ∪ {0} is Sidon"))?;
                    let horizon = horizon_or_default(*horizon, config)?;
                    HittingData::planted(quadruple, n, k, horizon).map_err(op_err)?
                }
                (None, None) => return Err(missing("data or --plant")),
            };
            let report = weak_mixing_witness(&j, &data).map_err(op_err)?;
            match format.unwrap_or(Format::Json) {
                Format::Text => writeln!(
                    out,
                    "witness: {} ({}, quadruple {}, n = {}) verified: {}",
                    report.value, report.case, report.quadruple, report.n, report.verified
                )?,
                _ => writeln!(out, "{}", report.to_json())?,
            }
            Ok(Status::from_bool(report.verified))
        }
        WitnessCommand::Indices { j, n } => {
            let j = j.clone().map(|s| s.0).or_else(|| config.set.clone()).ok_or_else(|| missing("j"))?;
            let n = n.or(config.n).ok_or_else(|| missing("n"))?;
            let selection = select_power_indices(&NatWindow::tight(j), n);
            match format.unwrap_or(Format::Text) {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&selection).expect("json"))?,
                _ => match &selection {
                    Some(pairs) => {
                        let text: Vec<String> = pairs.iter().map(|p| format!("({},{})", p.lower, p.upper)).collect();
                        writeln!(out, "{}", text.join(","))?;
                    }
                    None => writeln!(out, "no selection")?,
                },
            }
            Ok(Status::from_bool(selection.is_some()))
        }
    }
}


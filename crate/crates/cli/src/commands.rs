use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use npos_abc::dataset::{
    approval_weight_order, committee_overlap, generate as generate_election, simplicity_statistic,
    weight_order_statistics, ApprovalModel, ElectionSeries, GeneratorConfig, WeightModel,
};
use npos_abc::io::{CommitteeFile, ElectionFile, TraceFile};
use npos_abc::representation::{
    ejr_violations, min_avg_satisfaction, pav_score, priceability_gap, supporting_group_census,
    weighted_satisfaction, Axiom,
};
use npos_abc::security::{
    backing_variance, maximin_support, min_approval_weight_subset, replacement_cost,
    seqpav_replacement_lp, stake_lost_curve, MaximinSupport, SubsetMethod, WitnessVoter,
};
use npos_abc::{Committee, Election, Error, RuleId, RuleOptions, RuleRegistry};
use serde_json::json;

use crate::error::CliError;
use crate::manifest::{parse_grid, RunManifest};
use crate::report::{to_csv_string, MeasureRow};
use crate::ElectionOverrides;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn with_path(path: &Path, err: CliError) -> CliError {
    match err {
        CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
        CliError::Semantic(msg) => CliError::Semantic(format!("{}: {msg}", path.display())),
    }
}

fn parse_election_file(path: &Path) -> Result<ElectionFile, CliError> {
    ElectionFile::parse(&read(path)?).map_err(|e| with_path(path, e.into()))
}

/// Builds the raw election, or the list of violated invariants.
fn build(
    file: &ElectionFile,
    overrides: &ElectionOverrides,
) -> Result<Result<Election, Vec<String>>, CliError> {
    let raw = match file.to_election() {
        Ok(e) => e,
        Err(Error::UnknownCandidate(c)) => {
            return Ok(Err(vec![format!(
                "approval references candidate index {c}, but there are {} candidates",
                file.candidates.len()
            )]))
        }
        Err(e) => return Err(e.into()),
    };
    let mut election = raw;
    if let Some(k) = overrides.k {
        election = election.with_k(k);
    }
    if let Some(cap) = overrides.ballot_cap {
        election = election.with_ballot_cap(Some(cap));
    }
    let violations = election.validate();
    Ok(if violations.is_empty() {
        Ok(election)
    } else {
        Err(violations)
    })
}

/// Reads, validates and normalizes an election.
fn load_election(
    path: &Path,
    overrides: &ElectionOverrides,
) -> Result<(ElectionFile, Election), CliError> {
    let file = parse_election_file(path)?;
    match build(&file, overrides).map_err(|e| with_path(path, e))? {
        Ok(election) => {
            let normalized = election
                .normalize()
                .map_err(|e| with_path(path, e.into()))?;
            Ok((file, normalized))
        }
        Err(violations) => Err(CliError::semantic(format!(
            "{}: invalid election:\n  {}",
            path.display(),
            violations.join("\n  ")
        ))),
    }
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "election".to_string())
}

fn ids(election: &Election, candidates: &[usize]) -> String {
    candidates
        .iter()
        .map(|&c| election.candidates()[c].as_str())
        .collect::<Vec<_>>()
        .join(";")
}

fn voter_ids(election: &Election, voters: &[usize]) -> String {
    voters
        .iter()
        .map(|&v| election.voters()[v].as_str())
        .collect::<Vec<_>>()
        .join(";")
}

fn check_grid(grid: &[usize], k: usize) -> Result<(), CliError> {
    match grid.iter().find(|&&l| l == 0 || l > k) {
        Some(l) => Err(CliError::semantic(format!("ℓ = {l} is outside 1..={k}"))),
        None => Ok(()),
    }
}

fn resolve_grid(grid: Option<&[usize]>, k: usize) -> Result<Vec<usize>, CliError> {
    match grid {
        Some(g) => {
            check_grid(g, k)?;
            Ok(g.to_vec())
        }
        None => Ok((1..=k).collect()),
    }
}

fn rule_ids(names: &[String]) -> Result<Vec<RuleId>, CliError> {
    names
        .iter()
        .map(|n| n.parse::<RuleId>().map_err(CliError::from))
        .collect()
}

pub fn validate(path: &Path) -> Result<(), CliError> {
    let file = parse_election_file(path)?;
    match build(&file, &ElectionOverrides::default())? {
        Ok(election) => {
            println!(
                "ok: {} voters, {} candidates, k = {}",
                election.num_voters(),
                election.num_candidates(),
                election.k()
            );
            Ok(())
        }
        Err(violations) => {
            for v in &violations {
                println!("violation: {v}");
            }
            Err(CliError::semantic(format!(
                "{} violated invariant(s)",
                violations.len()
            )))
        }
    }
}

fn options(allow_copies: bool) -> RuleOptions {
    if allow_copies {
        RuleOptions::with_copies()
    } else {
        RuleOptions::default()
    }
}

pub fn run(manifest: &RunManifest) -> Result<(), CliError> {
    let rules = rule_ids(&manifest.rules)?;
    if rules.is_empty() {
        return Err(CliError::semantic("no rule selected; pass --rule"));
    }
    let registry = RuleRegistry::default();
    let out = manifest.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let opts = options(manifest.allow_copies);
    for input in &manifest.inputs {
        let (_, election) = load_election(input, &manifest.overrides())?;
        for &rule in &rules {
            let outcome = registry.get(rule.name())?.elect(&election, &opts)?;
            let base = format!("{}.{}", stem(input), rule.name());
            let committee_path = out.join(format!("{base}.committee.json"));
            let trace_path = out.join(format!("{base}.trace.json"));
            write_atomic(
                &committee_path,
                CommitteeFile::new(&election, rule, &outcome.committee)
                    .to_json()
                    .as_bytes(),
            )?;
            write_atomic(
                &trace_path,
                TraceFile::new(&election, &outcome.trace)
                    .to_json()
                    .as_bytes(),
            )?;
            println!("{}", committee_path.display());
            println!("{}", trace_path.display());
        }
    }
    Ok(())
}

const METRICS: [&str; 11] = [
    "pav",
    "satisfaction",
    "jr",
    "ejr+",
    "minavg",
    "census",
    "priceability",
    "minweight",
    "mms",
    "stake-lost",
    "variance",
];

struct Measurer<'a> {
    election: &'a Election,
    committee: &'a Committee,
    grid: &'a [usize],
    budget: Option<Duration>,
    mms: Option<MaximinSupport>,
}

impl Measurer<'_> {
    fn maximin(&mut self) -> Result<&MaximinSupport, CliError> {
        if self.mms.is_none() {
            self.mms = Some(maximin_support(self.election, self.committee)?);
        }
        Ok(self.mms.as_ref().expect("just computed"))
    }

    fn rows(&mut self, metric: &str) -> Result<Vec<MeasureRow>, CliError> {
        let e = self.election;
        let w = self.committee;
        let mut rows = Vec::new();
        match metric {
            "pav" => rows.push(MeasureRow::scalar("pav", pav_score(e, w))),
            "satisfaction" => rows.push(MeasureRow::scalar(
                "satisfaction",
                weighted_satisfaction(e, w),
            )),
            "jr" | "ejr+" => {
                let axiom = if metric == "jr" {
                    Axiom::Jr
                } else {
                    Axiom::EjrPlus
                };
                let violating = ejr_violations(e, w, axiom);
                rows.push(MeasureRow::new(
                    metric,
                    None,
                    Some(violating.len() as f64),
                    ids(e, &violating),
                ));
            }
            "minavg" => {
                for &ell in self.grid {
                    rows.push(match min_avg_satisfaction(e, w, ell) {
                        Some(g) => MeasureRow::new(
                            "minavg",
                            Some(ell),
                            Some(g.value),
                            format!(
                                "{}<-{}{}",
                                e.candidates()[g.candidate],
                                voter_ids(e, &g.group),
                                if g.exact { "" } else { " (search budget hit)" }
                            ),
                        ),
                        None => MeasureRow::new("minavg", Some(ell), None, ""),
                    });
                }
            }
            "census" => {
                let census = supporting_group_census(e, w);
                for &ell in self.grid {
                    rows.push(MeasureRow::new(
                        "census",
                        Some(ell),
                        Some(census[ell - 1] as f64),
                        "",
                    ));
                }
            }
            "priceability" => {
                let report = priceability_gap(e, w)?;
                let note = report.diagnostic.clone().unwrap_or_default();
                rows.push(MeasureRow::new(
                    "gap",
                    None,
                    Some(report.gap),
                    ids(e, &report.exceeding),
                ));
                rows.push(MeasureRow::new(
                    "normalized_gap",
                    None,
                    report.normalized_gap,
                    note,
                ));
                rows.push(MeasureRow::scalar("price", report.system.price));
            }
            "minweight" => {
                let distinct = w.distinct().len();
                for &ell in self.grid {
                    if ell > distinct {
                        rows.push(MeasureRow::new("minweight", Some(ell), None, ""));
                        continue;
                    }
                    let r = min_approval_weight_subset(e, w, ell, SubsetMethod::Ilp, self.budget)?;
                    rows.push(MeasureRow::new(
                        "minweight",
                        Some(ell),
                        Some(r.weight),
                        ids(e, &r.subset),
                    ));
                    if !r.optimal {
                        rows.push(MeasureRow::new(
                            "minweight-bound",
                            Some(ell),
                            Some(r.bound),
                            "time budget hit",
                        ));
                    }
                }
            }
            "mms" => {
                let value = self.maximin()?.value;
                rows.push(MeasureRow::scalar("mms", value));
            }
            "stake-lost" => {
                let grid = self.grid;
                let curve = stake_lost_curve(&self.maximin()?.assignment);
                for &ell in grid {
                    rows.push(MeasureRow::new(
                        "stake-lost",
                        Some(ell),
                        curve.get(ell - 1).copied(),
                        "",
                    ));
                }
            }
            "variance" => {
                let value = backing_variance(&self.maximin()?.assignment);
                rows.push(MeasureRow::scalar("variance", value));
            }
            other => {
                return Err(CliError::semantic(format!(
                    "unknown metric `{other}`; expected one of {}",
                    METRICS.join(", ")
                )))
            }
        }
        Ok(rows)
    }
}

fn normalize_metric(name: &str) -> String {
    match name.trim().to_ascii_lowercase().as_str() {
        "ejr" | "ejr-plus" | "ejrplus" => "ejr+".to_string(),
        "gap" => "priceability".to_string(),
        "maximin" => "mms".to_string(),
        other => other.to_string(),
    }
}

pub fn measure(manifest: &RunManifest) -> Result<(), CliError> {
    if manifest.metrics.is_empty() {
        return Err(CliError::semantic("empty metric list; pass --metrics"));
    }
    let metrics: Vec<String> = manifest
        .metrics
        .iter()
        .map(|m| normalize_metric(m))
        .collect();
    if let Some(bad) = metrics.iter().find(|m| !METRICS.contains(&m.as_str())) {
        return Err(CliError::semantic(format!(
            "unknown metric `{bad}`; expected one of {}",
            METRICS.join(", ")
        )));
    }
    let rules = rule_ids(&manifest.rules)?;
    if manifest.committee.is_none() && rules.is_empty() {
        return Err(CliError::semantic(
            "missing committee input; pass --committee or --rule",
        ));
    }
    let pairs = manifest.inputs.len()
        * if manifest.committee.is_some() {
            1
        } else {
            rules.len()
        };
    if pairs > 1 && manifest.out.is_none() {
        return Err(CliError::semantic(
            "several committees to measure; pass --out",
        ));
    }
    let budget = manifest.time_budget.map(Duration::from_secs_f64);
    let registry = RuleRegistry::default();
    let opts = options(manifest.allow_copies);

    for input in &manifest.inputs {
        let (_, election) = load_election(input, &manifest.overrides())?;
        let grid = resolve_grid(manifest.l_grid.as_deref(), election.k())?;
        let mut committees: Vec<(String, Committee)> = Vec::new();
        if let Some(path) = &manifest.committee {
            let file = CommitteeFile::parse(&read(path)?).map_err(|e| with_path(path, e.into()))?;
            let committee = file
                .to_committee(&election)
                .map_err(|e| with_path(path, e.into()))?;
            committees.push((file.rule.clone(), committee));
        } else {
            for &rule in &rules {
                let outcome = registry.get(rule.name())?.elect(&election, &opts)?;
                committees.push((rule.name().to_string(), outcome.committee));
            }
        }
        for (label, committee) in &committees {
            if committee.is_empty() {
                return Err(CliError::semantic("committee is empty"));
            }
            let mut measurer = Measurer {
                election: &election,
                committee,
                grid: &grid,
                budget,
                mms: None,
            };
            let mut rows = Vec::new();
            for metric in &metrics {
                rows.extend(measurer.rows(metric)?);
            }
            let csv = to_csv_string(&rows)?;
            match &manifest.out {
                Some(out) => {
                    let base = format!("{}.{label}", stem(input));
                    let json = serde_json::to_string_pretty(&json!({
                        "input": input.display().to_string(),
                        "rule": label,
                        "seed": manifest.seed,
                        "members": committee.members().iter().map(|&c| election.candidates()[c].clone()).collect::<Vec<_>>(),
                        "rows": rows,
                    }))
                    .expect("rows serialize")
                        + "\n";
                    let csv_path = out.join(format!("{base}.measures.csv"));
                    write_atomic(&csv_path, csv.as_bytes())?;
                    write_atomic(&out.join(format!("{base}.measures.json")), json.as_bytes())?;
                    println!("{}", csv_path.display());
                }
                None => {
                    io::stdout()
                        .write_all(csv.as_bytes())
                        .map_err(|e| CliError::semantic(format!("writing output: {e}")))?;
                }
            }
        }
    }
    Ok(())
}

fn csv_file<F>(path: &Path, header: &[&str], fill: F) -> Result<(), CliError>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<(), csv::Error>,
{
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    fill(&mut writer)?;
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::semantic(format!("writing CSV: {e}")))?;
    write_atomic(path, &bytes)
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), |v| v.to_string())
}

pub fn dataset_stats(dir: &Path, rule: &str, out: &Path) -> Result<(), CliError> {
    let rules = rule_ids(
        &rule
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(String::from)
            .collect::<Vec<_>>(),
    )?;
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::semantic(format!(
            "{}: no election files (*.json)",
            dir.display()
        )));
    }

    let mut series = ElectionSeries::new();
    for path in &paths {
        let (file, election) = load_election(path, &ElectionOverrides::default())?;
        let era = file.era().ok_or_else(|| {
            CliError::semantic(format!(
                "{}: meta.era is missing or not an integer",
                path.display()
            ))
        })?;
        series
            .insert(era, election)
            .map_err(|e| with_path(path, e.into()))?;
    }
    let missing = series.missing_eras();
    if !missing.is_empty() {
        eprintln!(
            "warning: {} era label(s) missing from the series: {missing:?}",
            missing.len()
        );
    }

    let registry = RuleRegistry::default();
    let mut committees: BTreeMap<u64, Vec<Committee>> = BTreeMap::new();
    for (era, election) in series.iter() {
        let mut per_rule = Vec::with_capacity(rules.len());
        for &rule in &rules {
            let outcome = registry
                .get(rule.name())?
                .elect(election, &RuleOptions::default())
                .map_err(|e| CliError::semantic(format!("era {era}, {rule}: {e}")))?;
            per_rule.push(outcome.committee);
        }
        committees.insert(era, per_rule);
    }
    let elections: BTreeMap<u64, &Election> = series.iter().collect();

    csv_file(
        &out.join("changes.csv"),
        &[
            "era_from",
            "era_to",
            "voters",
            "weight",
            "opinion",
            "candidates",
        ],
        |w| {
            for (from, to, c) in series.consecutive_changes() {
                w.write_record([
                    from.to_string(),
                    to.to_string(),
                    c.voters.to_string(),
                    opt(c.weight),
                    opt(c.opinion),
                    c.candidates.to_string(),
                ])?;
            }
            Ok(())
        },
    )?;

    let eras: Vec<u64> = elections.keys().copied().collect();
    csv_file(
        &out.join("committee_changes.csv"),
        &["era_from", "era_to", "rule", "overlap"],
        |w| {
            for pair in eras.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                for (r, rule) in rules.iter().enumerate() {
                    let overlap = committee_overlap(
                        elections[&a],
                        &committees[&a][r],
                        elections[&b],
                        &committees[&b][r],
                    );
                    w.write_record([
                        a.to_string(),
                        b.to_string(),
                        rule.name().to_string(),
                        overlap.to_string(),
                    ])?;
                }
            }
            Ok(())
        },
    )?;

    let mut header = vec!["rule"];
    header.extend(rules.iter().map(|r| r.name()));
    csv_file(&out.join("overlap.csv"), &header, |w| {
        for (i, row_rule) in rules.iter().enumerate() {
            let mut record = vec![row_rule.name().to_string()];
            for j in 0..rules.len() {
                let total: usize = eras
                    .iter()
                    .map(|era| {
                        let e = elections[era];
                        committee_overlap(e, &committees[era][i], e, &committees[era][j])
                    })
                    .sum();
                record.push((total as f64 / eras.len() as f64).to_string());
            }
            w.write_record(&record)?;
        }
        Ok(())
    })?;

    csv_file(&out.join("weights.csv"), &["era", "rank", "weight"], |w| {
        for (era, e) in series.iter() {
            for (rank, weight) in weight_order_statistics(e).sorted.iter().enumerate() {
                w.write_record([era.to_string(), (rank + 1).to_string(), weight.to_string()])?;
            }
        }
        Ok(())
    })?;

    csv_file(
        &out.join("approval_weights.csv"),
        &["era", "rank", "approval_weight"],
        |w| {
            for (era, e) in series.iter() {
                for (rank, weight) in approval_weight_order(e).iter().enumerate() {
                    w.write_record([era.to_string(), (rank + 1).to_string(), weight.to_string()])?;
                }
            }
            Ok(())
        },
    )?;

    csv_file(
        &out.join("half_weight.csv"),
        &["era", "voters", "half_weight_prefix"],
        |w| {
            for (era, e) in series.iter() {
                let stats = weight_order_statistics(e);
                w.write_record([
                    era.to_string(),
                    e.num_voters().to_string(),
                    stats.half_weight_prefix.to_string(),
                ])?;
            }
            Ok(())
        },
    )?;

    csv_file(&out.join("simplicity.csv"), &["era", "simplicity"], |w| {
        for (era, e) in series.iter() {
            w.write_record([era.to_string(), opt(simplicity_statistic(e))])?;
        }
        Ok(())
    })?;

    println!(
        "{} election(s) summarized into {}",
        series.len(),
        out.display()
    );
    Ok(())
}

fn parse_weight_model(spec: &str) -> Result<WeightModel, CliError> {
    match spec.split_once(':') {
        None if spec == "uniform" => Ok(WeightModel::Uniform),
        Some(("pareto", alpha)) => alpha
            .parse::<f64>()
            .ok()
            .filter(|a| *a > 0.0 && a.is_finite())
            .map(|alpha| WeightModel::Pareto { alpha })
            .ok_or_else(|| CliError::semantic(format!("invalid Pareto shape `{alpha}`"))),
        _ => Err(CliError::semantic(format!(
            "unknown weight model `{spec}`; expected uniform or pareto:<alpha>"
        ))),
    }
}

fn parse_approval_model(spec: &str) -> Result<ApprovalModel, CliError> {
    match spec.split_once(':') {
        None if spec == "impartial" => Ok(ApprovalModel::Impartial),
        Some(("clustered", groups)) => groups
            .parse::<usize>()
            .ok()
            .filter(|g| *g > 0)
            .map(|groups| ApprovalModel::Clustered { groups })
            .ok_or_else(|| CliError::semantic(format!("invalid group count `{groups}`"))),
        _ => Err(CliError::semantic(format!(
            "unknown approval model `{spec}`; expected impartial or clustered:<groups>"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn generate(
    n: usize,
    m: usize,
    k: usize,
    ballot_cap: usize,
    weights: &str,
    approvals: &str,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let config = GeneratorConfig {
        n,
        m,
        k,
        ballot_cap,
        weights: parse_weight_model(weights)?,
        approvals: parse_approval_model(approvals)?,
        seed,
    };
    let election = generate_election(&config)?;
    let meta = json!({
        "generator": {
            "n": n, "m": m, "k": k, "ballot_cap": ballot_cap,
            "weights": weights, "approvals": approvals, "seed": seed,
        }
    });
    let text = ElectionFile::from_election(&election, meta).to_json();
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::semantic(format!("writing output: {e}"))),
    }
}

fn describe(voters: &[WitnessVoter]) -> String {
    let largest = voters.iter().map(|v| v.approvals.len()).max().unwrap_or(0);
    format!(
        "{} voter(s), ballots of at most {largest} new candidate(s)",
        voters.len()
    )
}

pub fn replace_cost(
    path: &Path,
    rule: &str,
    l_grid: Option<&str>,
    overrides: &ElectionOverrides,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let rule: RuleId = rule.parse()?;
    if rule == RuleId::Mes {
        return Err(CliError::semantic(
            "replacement cost is not defined for mes: it is not candidate monotone with additional voters",
        ));
    }
    let (_, election) = load_election(path, overrides)?;
    let grid = match l_grid {
        Some(g) => parse_grid(g)?,
        None => (1..=election.k()).collect(),
    };
    check_grid(&grid, election.k())?;
    let outcome = RuleRegistry::default()
        .get(rule.name())?
        .elect(&election, &RuleOptions::default())?;
    let trace = &outcome.trace;
    let k = election.k();

    let mut rows = Vec::new();
    for &ell in &grid {
        let row = if rule == RuleId::SeqPav {
            let lp = seqpav_replacement_lp(ell)?;
            let x = trace.per_round[k - ell];
            MeasureRow::new(
                "replacement-cost",
                Some(ell),
                Some(lp.value * x),
                format!(
                    "{} voter type(s) over subsets of the new candidates",
                    lp.voters.len()
                ),
            )
        } else {
            let quote = replacement_cost(rule, trace, ell, election.ballot_cap())?;
            MeasureRow::new(
                "replacement-cost",
                Some(ell),
                Some(quote.cost),
                describe(&quote.witness),
            )
        };
        rows.push(row);
    }
    let csv = to_csv_string(&rows)?;
    match out {
        Some(path) => write_atomic(path, csv.as_bytes()),
        None => io::stdout()
            .write_all(csv.as_bytes())
            .map_err(|e| CliError::semantic(format!("writing output: {e}"))),
    }
}

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use nbswitch_core::bounds::{self, MultirateScheme};
use nbswitch_core::clos::{ClosConfig, SpacePolicy, Traffic};
use nbswitch_core::harness::{
    self, mix_seed, Adversary, ClosRule, Report, SweepSpec, TrialStats, CLOS_TRACE_HEADER, MULTILOG_TRACE_HEADER,
};
use nbswitch_core::multilog::{MultilogConfig, PlanePolicy};
use nbswitch_core::{trace, Mode, Rational};

use crate::config::{Config, Section};
use crate::{parse, read_file, CliResult, Failure, Output};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Network {
    Multilog,
    Clos,
    Benes,
    Multirate,
}

impl Network {
    fn as_str(self) -> &'static str {
        match self {
            Network::Multilog => "multilog",
            Network::Clos => "clos",
            Network::Benes => "benes",
            Network::Multirate => "multirate",
        }
    }
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    network: Option<Network>,
    /// Radix (multilog).
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,
    /// Stages (multilog) or ports per edge crossbar (Clos).
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Edge crossbars per side (clos, multirate).
    #[arg(long, value_delimiter = ',')]
    r: Vec<usize>,
    /// Window sizes; every t in 0..=n when omitted (multilog).
    #[arg(long, value_delimiter = ',')]
    t: Vec<usize>,
    /// Fanouts (multilog).
    #[arg(long, value_delimiter = ',')]
    f: Vec<usize>,
    /// Middle-stage counts tried, relative to the sufficient one.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    m_offset: Vec<i64>,
    /// Trials per grid point.
    #[arg(long)]
    trials: Option<usize>,
    /// Events per trial.
    #[arg(long)]
    events: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// random, greedy, exhaustive or exhaustive:<depth>.
    #[arg(long)]
    adversary: Option<String>,
    /// link or crosstalk (multilog).
    #[arg(long)]
    mode: Option<String>,
    /// Check weak duality on every probed state (multilog greedy and exhaustive).
    #[arg(long)]
    check_duality: bool,
    /// Plane choice: first-fit, best-fit or random (multilog).
    #[arg(long)]
    policy: Option<String>,
    /// Replay this trace instead of sweeping.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    /// Absolute middle-stage count for a trace replay.
    #[arg(long)]
    m: Option<usize>,
}

const KEYS: &[&str] = &[
    "network",
    "d",
    "n",
    "r",
    "t",
    "f",
    "m_offset",
    "trials",
    "events",
    "seed",
    "adversary",
    "mode",
    "check_duality",
    "policy",
    "trace",
    "m",
];

pub fn run(a: SimulateArgs, cfg: &Config) -> CliResult<Output> {
    let s = cfg.section("simulate")?;
    s.check_keys(KEYS)?;
    let network = s.pick(a.network, "network", Network::Multilog)?;
    let trace: Option<PathBuf> = match a.trace.clone() {
        Some(p) => Some(p),
        None => s.get("trace")?,
    };
    match (network, trace) {
        (Network::Multilog, Some(p)) => multilog_trace(&a, &s, &p),
        (Network::Multilog, None) => multilog_sweep(a, &s),
        (net, Some(p)) => clos_trace(net, &a, &s, &p),
        (net, None) => clos_sweep(net, a, &s),
    }
}

fn single<T: Copy>(name: &str, v: &[T]) -> CliResult<T> {
    match v {
        [x] => Ok(*x),
        _ => Err(Failure::Usage(format!("a trace replay takes exactly one --{name}"))),
    }
}

fn policy(name: &str, seed: u64) -> CliResult<PlanePolicy> {
    match name {
        "first-fit" => Ok(PlanePolicy::FirstFit),
        "best-fit" => Ok(PlanePolicy::BestFit),
        "random" => Ok(PlanePolicy::Random(seed)),
        other => Err(Failure::Usage(format!("unknown policy {other:?}"))),
    }
}

fn mode(a: &SimulateArgs, s: &Section) -> CliResult<Mode> {
    parse(&s.pick(a.mode.clone(), "mode", "link".to_string())?)
}

fn multilog_sweep(a: SimulateArgs, s: &Section) -> CliResult<Output> {
    let seed = s.pick(a.seed, "seed", 1)?;
    let spec = SweepSpec {
        ds: s.pick_list(a.d.clone(), "d", vec![2])?,
        ns: s.pick_list(a.n.clone(), "n", vec![3])?,
        ts: s.pick_list(a.t.clone(), "t", Vec::new())?,
        fs: s.pick_list(a.f.clone(), "f", vec![1])?,
        m_offsets: s.pick_list(a.m_offset.clone(), "m_offset", vec![0])?,
        trials: s.pick(a.trials, "trials", 100)?,
        events: s.pick(a.events, "events", 40)?,
        seed,
        adversary: parse(&s.pick(a.adversary.clone(), "adversary", "greedy".to_string())?)?,
        mode: mode(&a, s)?,
        check_duality: s.pick_flag(a.check_duality, "check_duality")?,
        policy: policy(&s.pick(a.policy.clone(), "policy", "first-fit".to_string())?, seed)?,
    };
    let report = harness::run_sweep(&spec)?;
    Ok(with_failures(report.csv(), report_failures(&report)))
}

fn report_failures(report: &Report) -> Option<String> {
    let bad = report.failures();
    let first = bad.first()?;
    let p = &first.point;
    Some(format!(
        "{} grid point(s) failed; first d={} n={} t={} f={} m={}: {} blocked, {} duality violations",
        bad.len(),
        p.d,
        p.n,
        p.t,
        p.f,
        p.m,
        first.stats.blocked,
        first.stats.duality_violations
    ))
}

fn with_failures(text: String, failed: Option<String>) -> Output {
    Output { text, failed }
}

fn multilog_trace(a: &SimulateArgs, s: &Section, path: &PathBuf) -> CliResult<Output> {
    let d = single("d", &s.pick_list(a.d.clone(), "d", vec![2])?)?;
    let n = single("n", &s.pick_list(a.n.clone(), "n", vec![3])?)?;
    let t = single("t", &s.pick_list(a.t.clone(), "t", vec![0])?)?;
    let f = single("f", &s.pick_list(a.f.clone(), "f", vec![1])?)?;
    let mode = mode(a, s)?;
    let m_bound = harness::multilog_m(mode, d, n, t, f)?;
    let m = match a.m.or(s.get("m")?) {
        Some(m) => m,
        None => offset_m(m_bound, &s.pick_list(a.m_offset.clone(), "m_offset", vec![0])?)?,
    };
    let seed = s.pick(a.seed, "seed", 1)?;
    let pol = policy(&s.pick(a.policy.clone(), "policy", "first-fit".to_string())?, seed)?;
    if d > u8::MAX as usize {
        return Err(Failure::Usage(format!("d = {d} too large")));
    }
    let events = trace::parse_multilog(&read_file(path)?, d as u8, n)?;
    let cfg = MultilogConfig::new(d, n, m, t, f, mode)?.with_policy(pol);
    let run = harness::run_multilog_trace(cfg, &events)?;
    let failed = (run.blocked > 0 && m >= m_bound).then(|| format!("{} blocked at m = {m} >= {m_bound}", run.blocked));
    Ok(with_failures(run.csv(MULTILOG_TRACE_HEADER), failed))
}

fn offset_m(m_bound: usize, offsets: &[i64]) -> CliResult<usize> {
    let off = single("m-offset", offsets)?;
    let m = m_bound as i64 + off;
    if m < 1 {
        return Err(Failure::Usage(format!("m = {m} < 1")));
    }
    Ok(m as usize)
}

fn clos_m_bound(net: Network, n: usize) -> usize {
    match net {
        Network::Clos => bounds::clos_snb(n as u64) as usize,
        Network::Benes => bounds::clos_wsnb_r2(n as u64) as usize,
        _ => bounds::clos_multirate(n as u64, MultirateScheme::FourType) as usize,
    }
}

fn clos_trace(net: Network, a: &SimulateArgs, s: &Section, path: &PathBuf) -> CliResult<Output> {
    let n = single("n", &s.pick_list(a.n.clone(), "n", vec![2])?)?;
    let r = match net {
        Network::Benes => 2,
        _ => single("r", &s.pick_list(a.r.clone(), "r", vec![2])?)?,
    };
    if n == 0 {
        return Err(Failure::Usage("n must be at least 1".into()));
    }
    let m_bound = clos_m_bound(net, n);
    let m = match a.m.or(s.get("m")?) {
        Some(m) => m,
        None => offset_m(m_bound, &s.pick_list(a.m_offset.clone(), "m_offset", vec![0])?)?,
    };
    let events = trace::parse_clos::<Rational>(&read_file(path)?)?;
    let (traffic, rule) = match net {
        Network::Clos => (Traffic::SpaceUnicast, ClosRule::Snb(SpacePolicy::FirstFit)),
        Network::Benes => (Traffic::SpaceUnicast, ClosRule::Benes),
        _ => (Traffic::MultirateUnicast, ClosRule::Multirate(nbswitch_core::DwecScheme::four_type())),
    };
    let cfg = ClosConfig::symmetric(n, m, r, traffic)?;
    let run = harness::run_clos_trace(cfg, rule, &events)?;
    let failed = (run.blocked > 0 && m >= m_bound).then(|| format!("{} blocked at m = {m} >= {m_bound}", run.blocked));
    Ok(with_failures(run.csv(CLOS_TRACE_HEADER), failed))
}

const CLOS_HEADER: &str = "seed,network,adversary,n,r,m_bound,m,trials,events,blocked,max_blocking";

fn clos_sweep(net: Network, a: SimulateArgs, s: &Section) -> CliResult<Output> {
    let ns = s.pick_list(a.n.clone(), "n", vec![2])?;
    let rs = match net {
        Network::Benes => vec![2],
        _ => s.pick_list(a.r.clone(), "r", vec![2])?,
    };
    let offsets = s.pick_list(a.m_offset.clone(), "m_offset", vec![0])?;
    let trials = s.pick(a.trials, "trials", 100)?;
    let events = s.pick(a.events, "events", 40)?;
    let seed = s.pick(a.seed, "seed", 1)?;
    let adversary: Adversary = parse(&s.pick(a.adversary.clone(), "adversary", "random".to_string())?)?;
    match (net, adversary) {
        (_, Adversary::Random) | (Network::Clos, Adversary::Greedy) => {}
        _ => {
            return Err(Failure::Usage(format!(
                "adversary {adversary} is not available for {}",
                net.as_str()
            )))
        }
    }
    if ns.is_empty() || rs.is_empty() || offsets.is_empty() || ns.contains(&0) || rs.contains(&0) {
        return Err(Failure::Usage("empty or zero parameter grid".into()));
    }
    let mut out = String::from(CLOS_HEADER);
    out.push('\n');
    let mut failures = 0usize;
    let mut pi = 0u64;
    for &n in &ns {
        for &r in &rs {
            let m_bound = clos_m_bound(net, n);
            for &off in &offsets {
                let m = m_bound as i64 + off;
                if m < 1 {
                    continue;
                }
                let m = m as usize;
                let mut stats = TrialStats::default();
                for trial in 0..trials {
                    let ts = mix_seed(seed, &[pi, trial as u64]);
                    stats.merge(match (net, adversary) {
                        (Network::Clos, Adversary::Greedy) => harness::clos_greedy(n, r, m, events, ts)?,
                        (Network::Clos, _) => harness::clos_random(n, r, m, events, ts)?,
                        (Network::Benes, _) => harness::benes_random(n, m, events, ts)?,
                        _ => harness::multirate_random(n, r, m, nbswitch_core::DwecScheme::four_type(), events, ts)?,
                    });
                }
                pi += 1;
                if m >= m_bound && stats.blocked > 0 {
                    failures += 1;
                }
                out.push_str(&format!(
                    "{seed},{},{adversary},{n},{r},{m_bound},{m},{},{},{},{}\n",
                    net.as_str(),
                    stats.trials,
                    stats.events,
                    stats.blocked,
                    stats.max_blocking
                ));
            }
        }
    }
    let failed = (failures > 0).then(|| format!("{failures} grid point(s) blocked at or above the sufficient m"));
    Ok(with_failures(out, failed))
}

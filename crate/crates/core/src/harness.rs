//! Adversarial traffic generators, sweeps and reports.
//!
//! Every trial owns its state and a ChaCha8 generator seeded from
//! `mix_seed(sweep seed, point, trial)`, so results do not depend on
//! scheduling.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds;
use crate::clos::{ClosConfig, ClosOutcome, ClosState, MultirateState, SpacePolicy, Terminal, Traffic};
use crate::dary::{ipow, DaryString};
use crate::dwec::{ColoringState, DwecScheme, Event, StepOutcome};
use crate::error::{Error, Result};
use crate::lpcert::{
    build_instance, check_weak_duality, dual_family, dual_special_t_eq_n, primal_from_state, primal_optimum,
    realize_primal, DualSolution, LpInstance, PrimalSolution, SpecialDual,
};
use crate::multilog::{ConnState, MultilogConfig, PlanePolicy, WindowOutcome};
use crate::scalar::Scalar;
use crate::trace::{ClosEvent, MultilogEvent};
use crate::Mode;

/// Small exact scalar for per-state checks; every value here fits easily.
type Q = crate::SmallRational;

/// Largest accepted `Exhaustive` depth.
pub const EXHAUSTIVE_DEPTH_CAP: usize = 4096;

/// splitmix64 over the parts.
pub fn mix_seed(base: u64, parts: &[u64]) -> u64 {
    let mut z = base;
    for &p in parts.iter().chain([&0x9e37_79b9_7f4a_7c15]) {
        z = z.wrapping_add(p).wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
    }
    z
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Adversary {
    Random,
    /// Builds toward a fixed probe, placing branches itself.
    Greedy,
    /// Realizes the exact worst state for a probe, at most `depth` branches.
    Exhaustive(usize),
}

impl fmt::Display for Adversary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Adversary::Random => f.write_str("random"),
            Adversary::Greedy => f.write_str("greedy"),
            Adversary::Exhaustive(d) => write!(f, "exhaustive:{d}"),
        }
    }
}

impl FromStr for Adversary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Adversary::Random),
            "greedy" => Ok(Adversary::Greedy),
            "exhaustive" => Ok(Adversary::Exhaustive(EXHAUSTIVE_DEPTH_CAP)),
            _ => {
                let depth = s
                    .strip_prefix("exhaustive:")
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| Error::Argument(format!("unknown adversary {s:?}")))?;
                Ok(Adversary::Exhaustive(depth))
            }
        }
    }
}

/// The sufficient plane count from the case tables (t < n) or the
/// t = n closed forms.
pub fn multilog_m(mode: Mode, d: usize, n: usize, t: usize, f: usize) -> Result<usize> {
    let (d32, n32, f64_) = (d as u32, n as u32, f as u64);
    let m = if t == n {
        match mode {
            Mode::LinkBlocking => bounds::snb_fcast_t_eq_n(d32, n32, f64_)?,
            Mode::CrosstalkFree => bounds::cf_snb_fcast_t_eq_n(d32, n32, f64_)?,
        }
    } else {
        bounds::bound::<crate::Rational>(mode, d32, n32, t as u32, f64_)?.m_sufficient
    };
    Ok(m.max(1) as usize)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrialStats {
    pub trials: usize,
    pub events: usize,
    pub blocked: usize,
    /// Largest number of blocking planes (or unavailable crossbars) seen
    /// for a probe.
    pub max_blocking: usize,
    pub duality_checks: usize,
    pub duality_violations: usize,
    /// First few violation messages.
    pub findings: Vec<String>,
}

impl TrialStats {
    pub fn merge(&mut self, o: TrialStats) {
        self.trials += o.trials;
        self.events += o.events;
        self.blocked += o.blocked;
        self.max_blocking = self.max_blocking.max(o.max_blocking);
        self.duality_checks += o.duality_checks;
        self.duality_violations += o.duality_violations;
        for f in o.findings {
            self.note(f);
        }
    }

    fn note(&mut self, msg: String) {
        if self.findings.len() < 5 {
            self.findings.push(msg);
        }
    }
}

// ---------------------------------------------------------------------------
// multilog

/// A blocking probe: a free input and outputs inside one window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Probe {
    pub input: usize,
    pub outputs: Vec<usize>,
}

fn random_probe(rng: &mut ChaCha8Rng, cfg: &MultilogConfig) -> Probe {
    let ports = ipow(cfg.d, cfg.n);
    let wsize = ipow(cfg.d, cfg.t);
    let w = rng.gen_range(0..ports / wsize);
    let kmax = cfg.f.min(wsize);
    let k = if rng.gen_bool(0.5) { kmax } else { rng.gen_range(1..=kmax) };
    let mut outputs: Vec<usize> = (w * wsize..(w + 1) * wsize).choose_multiple(rng, k);
    outputs.sort_unstable();
    Probe {
        input: rng.gen_range(0..ports),
        outputs,
    }
}

fn probe_instance(cfg: &MultilogConfig, probe: &Probe) -> Result<LpInstance> {
    let s = |x| DaryString::from_index(cfg.d as u8, cfg.n, x);
    let b: Vec<DaryString> = probe.outputs.iter().map(|&v| s(v)).collect();
    build_instance(cfg.d, cfg.n, cfg.t, cfg.f, &s(probe.input), &b, cfg.mode)
}

/// Every dual the library constructs for this instance.
pub fn all_duals(inst: &LpInstance) -> Result<Vec<(String, DualSolution<Q>)>> {
    let (n, t) = (inst.n(), inst.t());
    let mut out = Vec::new();
    if t == n {
        let variants = [
            SpecialDual::LinkAllGamma,
            SpecialDual::LinkSplit,
            SpecialDual::CrosstalkAllDelta,
            SpecialDual::CrosstalkGammaTail,
            SpecialDual::CrosstalkBalanced,
        ];
        for v in variants.into_iter().filter(|v| v.mode() == inst.mode()) {
            out.push((format!("{v:?}"), dual_special_t_eq_n(inst, v)?));
        }
    } else {
        let pmax = bounds::p_max(inst.mode(), n as u32, t as u32) as usize;
        for p in 0..=pmax {
            for q in n - t..=n {
                out.push((format!("p={p},q={q}"), dual_family(inst, p, q)?));
            }
        }
    }
    Ok(out)
}

/// Weak duality of the state's blocking primal against every dual.
fn duality_check(
    conn: &ConnState,
    probe: &Probe,
    inst: &LpInstance,
    duals: &[(String, DualSolution<Q>)],
    stats: &mut TrialStats,
) -> Result<()> {
    let primal: PrimalSolution<Q> = primal_from_state(conn, inst)?;
    let planes = conn.blocking_planes(probe.input, &probe.outputs).len();
    if primal.objective() != Q::from_usize(planes) {
        stats.duality_violations += 1;
        stats.note(format!("primal objective {} but {planes} blocking planes", primal.objective()));
    }
    for (name, dual) in duals {
        stats.duality_checks += 1;
        match check_weak_duality(inst, &primal, dual) {
            Ok(gap) if gap >= Q::from_usize(0) => {}
            Ok(gap) => {
                stats.duality_violations += 1;
                stats.note(format!("{name}: negative gap {gap}"));
            }
            Err(e) => {
                stats.duality_violations += 1;
                stats.note(format!("{name}: {e}"));
            }
        }
    }
    Ok(())
}

fn audit(conn: &ConnState) -> Result<()> {
    conn.audit().map_err(|e| Error::Argument(format!("state audit failed: {e}")))
}

/// Random arrivals (multi-window, fanout up to f) and departures. The plane
/// policy is the config's.
pub fn multilog_random(cfg: MultilogConfig, events: usize, seed: u64) -> Result<TrialStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut conn = ConnState::new(cfg);
    let ports = conn.ports();
    let mut stats = TrialStats {
        trials: 1,
        ..Default::default()
    };
    let mut next = 1u64;
    for _ in 0..events {
        stats.events += 1;
        let free_in: Vec<usize> = (0..ports).filter(|&u| conn.input_free(u)).collect();
        let free_out: Vec<usize> = (0..ports).filter(|&v| conn.output_free(v)).collect();
        if !conn.is_empty() && (rng.gen_bool(0.35) || free_in.is_empty() || free_out.is_empty()) {
            let id = *conn.requests().keys().choose(&mut rng).expect("non-empty");
            conn.release(id)?;
        } else {
            let u = *free_in.choose(&mut rng).expect("checked above");
            let k = rng.gen_range(1..=cfg.f.min(free_out.len()));
            let outs: Vec<usize> = free_out.choose_multiple(&mut rng, k).copied().collect();
            let res = conn.admit(next, u, &outs)?;
            next += 1;
            stats.blocked += res.iter().filter(|o| o.is_blocked()).count();
        }
        audit(&conn)?;
        let probe = random_probe(&mut rng, &cfg);
        if conn.input_free(probe.input) && probe.outputs.iter().all(|&v| conn.output_free(v)) {
            let b = conn.blocking_planes(probe.input, &probe.outputs).len();
            stats.max_blocking = stats.max_blocking.max(b);
        }
    }
    Ok(stats)
}

/// Fix a probe, then repeatedly add the request that puts branches in
/// conflict with it on the most planes not yet blocking. Planes are chosen
/// by the adversary, which covers every routing choice the window rule
/// permits. Once all m planes block, the probe is admitted through the
/// simulator and counted if it blocks.
pub fn multilog_greedy(cfg: MultilogConfig, events: usize, seed: u64, check_duality: bool) -> Result<TrialStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut conn = ConnState::new(cfg);
    let ports = conn.ports();
    let mut stats = TrialStats {
        trials: 1,
        ..Default::default()
    };
    let probe = random_probe(&mut rng, &cfg);
    let probe_res: BTreeSet<usize> = conn.resources_of(probe.input, &probe.outputs).into_iter().collect();
    let reserved: BTreeSet<usize> = probe.outputs.iter().copied().collect();
    let mut conflict = vec![false; ports * ports];
    for u in (0..ports).filter(|&u| u != probe.input) {
        for v in (0..ports).filter(|v| !reserved.contains(v)) {
            conflict[u * ports + v] = conn.resources_of(u, &[v]).iter().any(|r| probe_res.contains(r));
        }
    }
    let (inst, duals) = if check_duality {
        let inst = probe_instance(&cfg, &probe)?;
        let duals = all_duals(&inst)?;
        (Some(inst), duals)
    } else {
        (None, Vec::new())
    };
    let mut next = 1u64;
    for _ in 0..events {
        stats.events += 1;
        let blocking = conn.blocking_planes(probe.input, &probe.outputs);
        let open: Vec<usize> = (1..=cfg.m).filter(|p| !blocking.contains(p)).collect();
        let mut best: Option<(usize, usize, Vec<(Vec<usize>, usize)>)> = None;
        let mut inputs: Vec<usize> = (0..ports).filter(|&u| u != probe.input && conn.input_free(u)).collect();
        inputs.shuffle(&mut rng);
        for &u in inputs.iter().take(8) {
            let mut by_window: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for v in (0..ports).filter(|&v| conflict[u * ports + v] && conn.output_free(v)) {
                by_window.entry(conn.window_of(v)).or_default().push(v);
            }
            let mut windows: Vec<Vec<usize>> = by_window.into_values().collect();
            windows.shuffle(&mut rng);
            let mut used = BTreeSet::new();
            let mut groups = Vec::new();
            for outs in windows {
                if groups.len() == cfg.f {
                    break;
                }
                let v = *outs.choose(&mut rng).expect("windows are non-empty");
                if let Some(&p) = open.iter().find(|&&p| !used.contains(&p) && conn.fits(p, u, &[v])) {
                    used.insert(p);
                    groups.push((vec![v], p));
                }
            }
            if best.as_ref().is_none_or(|b| groups.len() > b.0) {
                best = Some((groups.len(), u, groups));
            }
        }
        match best {
            Some((score, u, groups)) if score > 0 && !(rng.gen_bool(0.1) && !conn.is_empty()) => {
                conn.place_groups(next, u, &groups)?;
                next += 1;
            }
            _ => {
                if conn.is_empty() {
                    break;
                }
                let id = *conn.requests().keys().choose(&mut rng).expect("non-empty");
                conn.release(id)?;
            }
        }
        audit(&conn)?;
        let b = conn.blocking_planes(probe.input, &probe.outputs).len();
        stats.max_blocking = stats.max_blocking.max(b);
        if let Some(inst) = &inst {
            duality_check(&conn, &probe, inst, &duals, &mut stats)?;
        }
        if b == cfg.m {
            break;
        }
    }
    let out = conn.admit(next, probe.input, &probe.outputs)?;
    stats.events += 1;
    stats.blocked += out.iter().filter(|o| o.is_blocked()).count();
    Ok(stats)
}

/// Realize the exact worst state for a random probe (up to `depth`
/// branches), then admit the probe.
pub fn multilog_exhaustive(cfg: MultilogConfig, depth: usize, seed: u64, check_duality: bool) -> Result<TrialStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probe = random_probe(&mut rng, &cfg);
    let inst = probe_instance(&cfg, &probe)?;
    let mut opt: PrimalSolution<Q> = primal_optimum(&inst);
    truncate_primal(&mut opt, depth);
    let mut conn = ConnState::new(cfg);
    let placed = realize_primal(&inst, &opt, &mut conn)?;
    audit(&conn)?;
    let mut stats = TrialStats {
        trials: 1,
        events: placed + 1,
        ..Default::default()
    };
    let b = conn.blocking_planes(probe.input, &probe.outputs).len();
    stats.max_blocking = b;
    if b != placed {
        stats.note(format!("realized {placed} branches but {b} planes block"));
        stats.duality_violations += 1;
    }
    if check_duality {
        duality_check(&conn, &probe, &inst, &all_duals(&inst)?, &mut stats)?;
    }
    let next = conn.requests().keys().next_back().copied().unwrap_or(0) + 1;
    let out = conn.admit(next, probe.input, &probe.outputs)?;
    stats.blocked += out.iter().filter(|o| o.is_blocked()).count();
    Ok(stats)
}

fn truncate_primal(p: &mut PrimalSolution<Q>, depth: usize) {
    let mut left = depth;
    let mut keep = |_: &(usize, usize), x: &mut Q| {
        if *x == Q::from_usize(1) && left > 0 {
            left -= 1;
            true
        } else {
            false
        }
    };
    p.x_uw.retain(&mut keep);
    p.x_uv.retain(&mut keep);
}

/// The exact largest number of planes any legal state blocks, over every
/// probe: all inputs, all windows, all output subsets up to min(f, d^t).
/// Fails with `SizeLimit` beyond `max_probes` probes.
pub fn exhaustive_worst(
    d: usize,
    n: usize,
    t: usize,
    f: usize,
    mode: Mode,
    max_probes: usize,
) -> Result<(usize, Probe)> {
    let cfg = MultilogConfig::new(d, n, 1, t, f, mode)?;
    let ports = ipow(d, n);
    let wsize = ipow(d, t);
    let kmax = f.min(wsize);
    let per_window: usize = (1..=kmax).map(|k| binom(wsize, k)).sum();
    let total = per_window.saturating_mul(ports).saturating_mul(ports / wsize);
    if total > max_probes {
        return Err(Error::SizeLimit(total));
    }
    let mut best: Option<(usize, Probe)> = None;
    for w in 0..ports / wsize {
        let mut subsets = Vec::new();
        subsets_upto(w * wsize, (w + 1) * wsize, kmax, &mut Vec::new(), &mut subsets);
        for input in 0..ports {
            for outputs in &subsets {
                let probe = Probe {
                    input,
                    outputs: outputs.clone(),
                };
                let v = primal_optimum::<Q>(&probe_instance(&cfg, &probe)?).objective().to_integer() as usize;
                if best.as_ref().is_none_or(|b| v > b.0) {
                    best = Some((v, probe));
                }
            }
        }
    }
    Ok(best.expect("at least one probe"))
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn subsets_upto(lo: usize, hi: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    for v in lo..hi {
        cur.push(v);
        out.push(cur.clone());
        if cur.len() < k {
            subsets_upto(v + 1, hi, k, cur, out);
        }
        cur.pop();
    }
}

/// A dual with one covering row zeroed out.
#[derive(Clone, Debug, PartialEq)]
pub struct FuzzedDual {
    /// `DC-1 u=..,w=..` or `DC-2 u=..,v=..`.
    pub target: String,
    pub violations: Vec<Error>,
}

impl FuzzedDual {
    /// Whether the checker named the corrupted row.
    pub fn detected(&self) -> bool {
        self.violations.iter().any(|e| match e {
            Error::Infeasible { constraint, index } => format!("{constraint} {index}") == self.target,
            _ => false,
        })
    }
}

/// Take `dual`, pick a dual constraint at random and zero every variable in
/// it, then run the feasibility checker.
pub fn fuzz_dual(inst: &LpInstance, dual: &DualSolution<Q>, seed: u64) -> Option<FuzzedDual> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n1 = inst.uw_pairs().len();
    let total = n1 + inst.uv_pairs().len();
    if total == 0 {
        return None;
    }
    let mut bad = dual.clone();
    let pick = rng.gen_range(0..total);
    let target = if pick < n1 {
        let (u, w) = inst.uw_pairs()[pick];
        bad.alpha[w] = Q::from_usize(0);
        bad.beta.remove(&(u, w));
        bad.eps[u] = Q::from_usize(0);
        format!("DC-1 u={u},w={w}")
    } else {
        let (u, v) = inst.uv_pairs()[pick - n1];
        bad.gamma[u] = Q::from_usize(0);
        bad.delta[v] = Q::from_usize(0);
        bad.eps[u] = Q::from_usize(0);
        format!("DC-2 u={u},v={v}")
    };
    Some(FuzzedDual {
        target,
        violations: bad.violations(inst),
    })
}

// ---------------------------------------------------------------------------
// Clos

fn free_pair(rng: &mut ChaCha8Rng, st: &ClosState) -> Option<(Terminal, Terminal)> {
    let i = st.free_inputs().choose(rng)?;
    let o = st.free_outputs().choose(rng)?;
    Some((i, o))
}

fn clos_audit(st: &ClosState) -> Result<()> {
    st.audit().map_err(|e| Error::Argument(format!("state audit failed: {e}")))
}

/// Random unicast arrivals and departures, random middle crossbar choice.
pub fn clos_random(n: usize, r: usize, m: usize, events: usize, seed: u64) -> Result<TrialStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = ClosConfig::symmetric(n, m, r, Traffic::SpaceUnicast)?;
    let mut st = ClosState::new(cfg, SpacePolicy::Random(mix_seed(seed, &[1])));
    let mut stats = TrialStats {
        trials: 1,
        ..Default::default()
    };
    let mut next = 1u64;
    for _ in 0..events {
        stats.events += 1;
        let pair = free_pair(&mut rng, &st);
        if pair.is_none() || (!st.requests().is_empty() && rng.gen_bool(0.35)) {
            let id = *st.requests().keys().choose(&mut rng).expect("full state has requests");
            st.release(id)?;
        } else if let Some((i, o)) = pair {
            stats.max_blocking = stats.max_blocking.max(st.unavailable(i.xbar, o.xbar));
            if st.snb_admit(next, i, o)?.is_blocked() {
                stats.blocked += 1;
            }
            next += 1;
        }
        clos_audit(&st)?;
    }
    Ok(stats)
}

/// Fix a probe pair of terminals and keep adding connections that make one
/// more middle crossbar unavailable to it, on a crossbar of the adversary's
/// choosing. Prefers connections touching only one side of the probe.
pub fn clos_greedy(n: usize, r: usize, m: usize, events: usize, seed: u64) -> Result<TrialStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = ClosConfig::symmetric(n, m, r, Traffic::SpaceUnicast)?;
    let mut st = ClosState::new(cfg, SpacePolicy::FirstFit);
    let pin = Terminal::new(rng.gen_range(0..r), rng.gen_range(0..n));
    let pout = Terminal::new(rng.gen_range(0..r), rng.gen_range(0..n));
    let mut stats = TrialStats {
        trials: 1,
        ..Default::default()
    };
    let mut next = 1u64;
    for _ in 0..events {
        stats.events += 1;
        let avail = st.available(pin.xbar, pout.xbar);
        let mut best: Option<(usize, Terminal, Terminal, usize)> = None;
        let ins: Vec<Terminal> = st.free_inputs().filter(|&t| t != pin).collect();
        let outs: Vec<Terminal> = st.free_outputs().filter(|&t| t != pout).collect();
        for &i in &ins {
            for &o in &outs {
                let touches = (i.xbar == pin.xbar) as usize + (o.xbar == pout.xbar) as usize;
                if touches == 0 {
                    continue;
                }
                let score = 3 - touches;
                for c in st.available(i.xbar, o.xbar) {
                    if avail.contains(&c) && best.as_ref().is_none_or(|b| score > b.0 || (score == b.0 && rng.gen_bool(0.3))) {
                        best = Some((score, i, o, c));
                    }
                }
            }
        }
        match best {
            Some((_, i, o, c)) => {
                st.place(next, i, o, c + 1)?;
                next += 1;
            }
            None => {
                let Some(&id) = st.requests().keys().choose(&mut rng) else {
                    break;
                };
                st.release(id)?;
            }
        }
        clos_audit(&st)?;
        let u = st.unavailable(pin.xbar, pout.xbar);
        stats.max_blocking = stats.max_blocking.max(u);
        if u == m {
            break;
        }
    }
    stats.events += 1;
    if st.snb_admit(next, pin, pout)?.is_blocked() {
        stats.blocked += 1;
    }
    Ok(stats)
}

/// r = 2 with the reuse rule; the M_ij invariants are checked after every
/// event.
pub fn benes_random(n: usize, m: usize, events: usize, seed: u64) -> Result<TrialStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = ClosConfig::symmetric(n, m, 2, Traffic::SpaceUnicast)?;
    let mut st = ClosState::new(cfg, SpacePolicy::FirstFit);
    let mut stats = TrialStats {
        trials: 1,
        ..Default::default()
    };
    let mut next = 1u64;
    for _ in 0..events {
        stats.events += 1;
        let pair = free_pair(&mut rng, &st);
        if pair.is_none() || (!st.requests().is_empty() && rng.gen_bool(0.3)) {
            let id = *st.requests().keys().choose(&mut rng).expect("full state has requests");
            st.release(id)?;
        } else if let Some((i, o)) = pair {
            if st.benes_admit(next, i, o)?.is_blocked() {
                stats.blocked += 1;
            }
            next += 1;
        }
        stats.max_blocking = stats.max_blocking.max(st.requests().values().map(|r| r.mid + 1).max().unwrap_or(0));
        clos_audit(&st)?;
        st.benes_invariant().map_err(|e| Error::Argument(format!("invariant broken: {e}")))?;
    }
    Ok(stats)
}

/// Random multirate traffic with rates p/q, q <= 20, fitting the terminal
/// residuals.
pub fn multirate_random<T: Scalar>(
    n: usize,
    r: usize,
    m: usize,
    scheme: DwecScheme<T>,
    events: usize,
    seed: u64,
) -> Result<TrialStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = ClosConfig::symmetric(n, m, r, Traffic::MultirateUnicast)?;
    let mut st = MultirateState::new(cfg, scheme);
    let mut stats = TrialStats {
        trials: 1,
        ..Default::default()
    };
    let mut next = 1u64;
    for _ in 0..events {
        stats.events += 1;
        if !st.requests().is_empty() && rng.gen_bool(0.35) {
            let id = *st.requests().keys().choose(&mut rng).expect("non-empty");
            st.release(id)?;
        } else {
            let i = Terminal::new(rng.gen_range(0..r), rng.gen_range(0..n));
            let o = Terminal::new(rng.gen_range(0..r), rng.gen_range(0..n));
            let room = crate::scalar::min(st.residual_in(i), st.residual_out(o));
            let den = rng.gen_range(1..=20);
            let rate = T::ratio(rng.gen_range(1..=den), den);
            if rate <= room {
                if st.multirate_admit(next, i, o, rate)?.is_blocked() {
                    stats.blocked += 1;
                }
                next += 1;
            }
        }
        stats.max_blocking = stats.max_blocking.max(st.requests().values().map(|q| q.crossbar).max().unwrap_or(0));
        st.audit().map_err(|e| Error::Argument(format!("state audit failed: {e}")))?;
    }
    Ok(stats)
}

/// Random DWEC events; `weights` draws come from the given list, or from
/// p/q with q <= 20 when it is empty. The live edge count hovers around
/// `live_target`. Audits after every step, including the class sizes;
/// max_blocking holds the peak colors_used.
pub fn dwec_random<T: Scalar>(
    scheme: DwecScheme<T>,
    vertices: usize,
    weights: &[T],
    live_target: usize,
    events: usize,
    seed: u64,
) -> Result<TrialStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = ColoringState::new(scheme, vertices);
    let mut stats = TrialStats {
        trials: 1,
        ..Default::default()
    };
    let mut next = 1u64;
    for _ in 0..events {
        stats.events += 1;
        // departures balance arrivals around `live_target` live edges
        let p_depart = (st.edges().len() as f64 / (2.0 * live_target as f64)).min(1.0);
        let ev = if !st.edges().is_empty() && rng.gen_bool(p_depart) {
            Event::Depart {
                id: *st.edges().keys().choose(&mut rng).expect("non-empty"),
            }
        } else {
            let u = rng.gen_range(0..vertices);
            let v = (u + rng.gen_range(1..vertices)) % vertices;
            let w = match weights.choose(&mut rng) {
                Some(w) => w.clone(),
                None => {
                    let den = rng.gen_range(1..=20);
                    T::ratio(rng.gen_range(1..=den), den)
                }
            };
            next += 1;
            Event::Arrive { id: next - 1, u, v, w }
        };
        st.step(ev)?;
        st.audit().map_err(|e| Error::Argument(format!("coloring audit failed at t={}: {e}", st.time())))?;
        stats.max_blocking = stats.max_blocking.max(st.colors_used());
    }
    Ok(stats)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DwecExhaustive {
    /// Distinct states expanded, up to vertex relabeling.
    pub states: usize,
    /// Events applied and checked.
    pub events_checked: usize,
    /// Largest colors_used seen.
    pub max_colors: usize,
    /// Smallest ratio * opt_bar + additive - colors_used seen.
    pub min_slack: Option<Q>,
    /// Event sequences (as trace text) breaking the bound, at most five.
    pub violations: Vec<String>,
    pub violation_count: usize,
}

/// Every sequence of at most `max_events` arrivals and departures on
/// `vertices` vertices (any pair, weights from `weights`), checking
/// colors_used <= ratio * opt_bar + additive after every event, where
/// opt_bar is the running max of opt_exact over the live edges. States are
/// merged up to vertex relabeling; a state reached again with no more
/// events left is not expanded twice.
pub fn dwec_exhaustive(
    scheme: &DwecScheme<Q>,
    vertices: usize,
    weights: &[Q],
    max_events: usize,
    ratio: Q,
    additive: Q,
) -> Result<DwecExhaustive> {
    if !(2..=6).contains(&vertices) {
        return Err(Error::Range {
            name: "vertices",
            value: vertices as i64,
            range: "[2, 6]".into(),
        });
    }
    if max_events > crate::dwec::OPT_EXACT_LIMIT {
        return Err(Error::SizeLimit(max_events));
    }
    let perms = permutations(vertices);
    let pairs: Vec<(usize, usize)> = (0..vertices).flat_map(|u| (u + 1..vertices).map(move |v| (u, v))).collect();
    let mut search = DwecSearch {
        weights,
        perms,
        pairs,
        ratio,
        additive,
        seen: std::collections::HashMap::new(),
        opt: std::collections::HashMap::new(),
        leaves: 0,
        out: DwecExhaustive::default(),
        path: Vec::new(),
    };
    let st = ColoringState::new(scheme.clone(), vertices);
    if max_events > 0 {
        search.visit(&st, 0, max_events)?;
    }
    search.out.states = search.seen.len();
    search.out.events_checked = search.leaves;
    Ok(search.out)
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for i in 0..k {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..=i).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, i);
                    q
                })
            })
            .collect();
    }
    out
}

type DwecKey = (Vec<(usize, usize, usize, usize)>, Vec<bool>, Q, usize, usize);

struct DwecSearch<'a> {
    weights: &'a [Q],
    perms: Vec<Vec<usize>>,
    pairs: Vec<(usize, usize)>,
    ratio: Q,
    additive: Q,
    seen: std::collections::HashMap<DwecKey, usize>,
    opt: std::collections::HashMap<Vec<(usize, usize, usize)>, usize>,
    leaves: usize,
    out: DwecExhaustive,
    path: Vec<Event<Q>>,
}

impl DwecSearch<'_> {
    fn key(&self, st: &ColoringState<Q>, opt_bar: usize) -> DwecKey {
        let widx = |w: &Q| self.weights.iter().position(|x| x == w).expect("weights come from the list");
        let edges = self
            .perms
            .iter()
            .map(|p| {
                let mut e: Vec<_> = st
                    .edges()
                    .values()
                    .map(|e| {
                        let (a, b) = (p[e.u], p[e.v]);
                        (a.min(b), a.max(b), widx(&e.w), e.color)
                    })
                    .collect();
                e.sort_unstable();
                e
            })
            .min()
            .expect("at least one permutation");
        (edges, st.used_mask().to_vec(), *st.wbar(), st.dbar(), opt_bar)
    }

    fn opt_of(&mut self, st: &ColoringState<Q>) -> Result<usize> {
        let widx = |w: &Q| self.weights.iter().position(|x| x == w).expect("weights come from the list");
        let mut key: Vec<(usize, usize, usize)> = st.edges().values().map(|e| (e.u.min(e.v), e.u.max(e.v), widx(&e.w))).collect();
        key.sort_unstable();
        if let Some(&v) = self.opt.get(&key) {
            return Ok(v);
        }
        let v = crate::dwec::opt_exact(&st.live_edges())?;
        self.opt.insert(key, v);
        Ok(v)
    }

    fn visit(&mut self, st: &ColoringState<Q>, opt_bar: usize, left: usize) -> Result<()> {
        let key = self.key(st, opt_bar);
        match self.seen.get(&key) {
            Some(&l) if l >= left => return Ok(()),
            _ => {
                self.seen.insert(key, left);
            }
        }
        let next_id = st.time() as u64 + 1;
        let mut moves: Vec<Event<Q>> = Vec::new();
        for &(u, v) in &self.pairs {
            for w in self.weights {
                moves.push(Event::Arrive { id: next_id, u, v, w: *w });
            }
        }
        // identical live edges give identical successors
        let mut gone = BTreeSet::new();
        for (&id, e) in st.edges() {
            if gone.insert((e.u, e.v, e.w, e.color)) {
                moves.push(Event::Depart { id });
            }
        }
        for ev in moves {
            let mut nx = st.clone();
            nx.step(ev.clone())?;
            nx.audit().map_err(|e| Error::Argument(format!("coloring audit failed: {e}")))?;
            self.path.push(ev);
            self.leaves += 1;
            let ob = opt_bar.max(self.opt_of(&nx)?);
            let used = nx.colors_used();
            let slack = self.ratio * Q::from_usize(ob) + self.additive - Q::from_usize(used);
            self.out.max_colors = self.out.max_colors.max(used);
            if self.out.min_slack.is_none_or(|m| slack < m) {
                self.out.min_slack = Some(slack);
            }
            if slack < Q::from_usize(0) {
                self.out.violation_count += 1;
                if self.out.violations.len() < 5 {
                    self.out.violations.push(dwec_trace_text(&self.path));
                }
            }
            if left > 1 {
                self.visit(&nx, ob, left - 1)?;
            }
            self.path.pop();
        }
        Ok(())
    }
}

/// Events in the trace syntax `parse_dwec` reads.
pub fn dwec_trace_text<T: Scalar>(events: &[Event<T>]) -> String {
    events
        .iter()
        .map(|e| match e {
            Event::Arrive { id, u, v, w } => format!("A {id} {u} {v} {w}\n"),
            Event::Depart { id } => format!("D {id}\n"),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// traces

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TraceRun {
    pub rows: Vec<String>,
    pub blocked: usize,
}

impl TraceRun {
    pub fn csv(&self, header: &str) -> String {
        let mut s = String::from(header);
        s.push('\n');
        for r in &self.rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }
}

pub const MULTILOG_TRACE_HEADER: &str = "event,id,window,plane,status";
pub const CLOS_TRACE_HEADER: &str = "event,id,crossbar,status";

pub fn run_multilog_trace(cfg: MultilogConfig, events: &[MultilogEvent]) -> Result<TraceRun> {
    let mut conn = ConnState::new(cfg);
    let mut run = TraceRun::default();
    for ev in events {
        match ev {
            MultilogEvent::Arrive { id, input, outputs } => {
                let check = |s: &DaryString| {
                    if s.base() as usize != cfg.d || s.len() != cfg.n {
                        Err(Error::Argument(format!("address {s} does not fit d={} n={}", cfg.d, cfg.n)))
                    } else {
                        Ok(s.index())
                    }
                };
                let u = check(input)?;
                let outs = outputs.iter().map(check).collect::<Result<Vec<_>>>()?;
                for o in conn.admit(*id, u, &outs)? {
                    run.rows.push(match o {
                        WindowOutcome::Routed { window, plane } => format!("A,{id},{window},{plane},routed"),
                        WindowOutcome::Blocked { window } => {
                            run.blocked += 1;
                            format!("A,{id},{window},,blocked")
                        }
                    });
                }
            }
            MultilogEvent::Depart { id } => {
                conn.release(*id)?;
                run.rows.push(format!("D,{id},,,released"));
            }
        }
    }
    Ok(run)
}

#[derive(Clone, Debug)]
pub enum ClosRule<T> {
    Snb(SpacePolicy),
    /// r = 2 reuse rule.
    Benes,
    Multirate(DwecScheme<T>),
}

pub fn run_clos_trace<T: Scalar>(cfg: ClosConfig, rule: ClosRule<T>, events: &[ClosEvent<T>]) -> Result<TraceRun> {
    let mut run = TraceRun::default();
    let row = |run: &mut TraceRun, id: u64, o: ClosOutcome| match o {
        ClosOutcome::Routed { crossbar } => format!("A,{id},{crossbar},routed"),
        ClosOutcome::Blocked => {
            run.blocked += 1;
            format!("A,{id},,blocked")
        }
    };
    match rule {
        ClosRule::Multirate(scheme) => {
            let mut st = MultirateState::new(cfg, scheme);
            for ev in events {
                match ev {
                    ClosEvent::Arrive { id, input, output, rate } => {
                        let rate = rate.clone().unwrap_or_else(T::one);
                        let o = st.multirate_admit(*id, *input, *output, rate)?;
                        let r = row(&mut run, *id, o);
                        run.rows.push(r);
                    }
                    ClosEvent::Depart { id } => {
                        st.release(*id)?;
                        run.rows.push(format!("D,{id},,released"));
                    }
                }
            }
        }
        rule => {
            let benes = matches!(rule, ClosRule::Benes);
            let policy = match rule {
                ClosRule::Snb(p) => p,
                _ => SpacePolicy::FirstFit,
            };
            let mut st = ClosState::new(cfg, policy);
            for ev in events {
                match ev {
                    ClosEvent::Arrive { id, input, output, rate } => {
                        if rate.as_ref().is_some_and(|r| *r != T::one()) {
                            return Err(Error::Argument(format!("request {id}: rates need the multirate rule")));
                        }
                        let o = if benes {
                            st.benes_admit(*id, *input, *output)?
                        } else {
                            st.snb_admit(*id, *input, *output)?
                        };
                        let r = row(&mut run, *id, o);
                        run.rows.push(r);
                    }
                    ClosEvent::Depart { id } => {
                        st.release(*id)?;
                        run.rows.push(format!("D,{id},,released"));
                    }
                }
            }
        }
    }
    Ok(run)
}

/// One csv_row per event.
pub fn run_dwec_trace<T: Scalar>(scheme: DwecScheme<T>, events: &[Event<T>]) -> Result<TraceRun> {
    let vertices = events
        .iter()
        .map(|e| match e {
            Event::Arrive { u, v, .. } => u.max(v) + 1,
            Event::Depart { .. } => 0,
        })
        .max()
        .unwrap_or(0);
    let mut st = ColoringState::new(scheme, vertices);
    let mut run = TraceRun::default();
    for ev in events {
        if let StepOutcome::Colored { .. } = st.step(ev.clone())? {}
        run.rows.push(st.csv_row());
    }
    Ok(run)
}

// ---------------------------------------------------------------------------
// sweeps

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub ds: Vec<usize>,
    pub ns: Vec<usize>,
    /// Empty means every t in 0..=n.
    pub ts: Vec<usize>,
    pub fs: Vec<usize>,
    /// Plane counts tried, relative to the sufficient m.
    pub m_offsets: Vec<i64>,
    pub trials: usize,
    /// Events per trial (random and greedy adversaries).
    pub events: usize,
    pub seed: u64,
    pub adversary: Adversary,
    pub mode: Mode,
    pub check_duality: bool,
    pub policy: PlanePolicy,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            ds: vec![2],
            ns: vec![3],
            ts: Vec::new(),
            fs: vec![1],
            m_offsets: vec![0],
            trials: 100,
            events: 40,
            seed: 1,
            adversary: Adversary::Greedy,
            mode: Mode::LinkBlocking,
            check_duality: false,
            policy: PlanePolicy::FirstFit,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GridPoint {
    pub d: usize,
    pub n: usize,
    pub t: usize,
    pub f: usize,
    /// The sufficient plane count and the offset applied to it.
    pub m_bound: usize,
    pub m: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.ds.is_empty() || self.ns.is_empty() || self.fs.is_empty() || self.m_offsets.is_empty() {
            return Err(Error::Argument("empty parameter grid".into()));
        }
        if let Adversary::Exhaustive(depth) = self.adversary {
            if depth > EXHAUSTIVE_DEPTH_CAP {
                return Err(Error::Range {
                    name: "depth",
                    value: depth as i64,
                    range: format!("[0, {EXHAUSTIVE_DEPTH_CAP}]"),
                });
            }
        }
        Ok(())
    }

    /// Grid points in d, n, t, f, offset order. Combinations with t > n,
    /// f > d^n or m < 1 are skipped.
    pub fn points(&self) -> Result<Vec<GridPoint>> {
        self.validate()?;
        let mut out = Vec::new();
        for &d in &self.ds {
            for &n in &self.ns {
                let ts: Vec<usize> = if self.ts.is_empty() { (0..=n).collect() } else { self.ts.clone() };
                for &t in ts.iter().filter(|&&t| t <= n) {
                    for &f in self.fs.iter().filter(|&&f| f >= 1 && f <= ipow(d, n)) {
                        let m_bound = multilog_m(self.mode, d, n, t, f)?;
                        for &off in &self.m_offsets {
                            let m = m_bound as i64 + off;
                            if m >= 1 {
                                out.push(GridPoint {
                                    d,
                                    n,
                                    t,
                                    f,
                                    m_bound,
                                    m: m as usize,
                                });
                            }
                        }
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(Error::Argument("no valid grid points".into()));
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub point: GridPoint,
    pub stats: TrialStats,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub seed: u64,
    pub mode: Mode,
    pub adversary: Adversary,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub const HEADER: &'static str = "seed,mode,adversary,d,n,t,f,m_bound,m,trials,events,blocked,max_blocking,duality_checks,duality_violations";

    pub fn csv(&self) -> String {
        let mut s = String::from(Self::HEADER);
        s.push('\n');
        for r in &self.rows {
            let (p, st) = (&r.point, &r.stats);
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                self.seed,
                self.mode.as_str(),
                self.adversary,
                p.d,
                p.n,
                p.t,
                p.f,
                p.m_bound,
                p.m,
                st.trials,
                st.events,
                st.blocked,
                st.max_blocking,
                st.duality_checks,
                st.duality_violations
            ));
        }
        s
    }

    /// Rows where something blocked at or above the sufficient m, or a
    /// duality check failed.
    pub fn failures(&self) -> Vec<&ReportRow> {
        self.rows
            .iter()
            .filter(|r| (r.point.m >= r.point.m_bound && r.stats.blocked > 0) || r.stats.duality_violations > 0)
            .collect()
    }

    pub fn total(&self) -> TrialStats {
        let mut t = TrialStats::default();
        for r in &self.rows {
            t.merge(r.stats.clone());
        }
        t
    }
}

pub fn run_trial(spec: &SweepSpec, p: &GridPoint, seed: u64) -> Result<TrialStats> {
    let cfg = MultilogConfig::new(p.d, p.n, p.m, p.t, p.f, spec.mode)?.with_policy(match spec.policy {
        PlanePolicy::Random(_) => PlanePolicy::Random(mix_seed(seed, &[7])),
        other => other,
    });
    match spec.adversary {
        Adversary::Random => multilog_random(cfg, spec.events, seed),
        Adversary::Greedy => multilog_greedy(cfg, spec.events, seed, spec.check_duality),
        Adversary::Exhaustive(depth) => multilog_exhaustive(cfg, depth, seed, spec.check_duality),
    }
}

/// Run every grid point; rows come back in grid order whatever the worker
/// pool does.
pub fn run_sweep(spec: &SweepSpec) -> Result<Report> {
    let points = spec.points()?;
    let rows = points
        .par_iter()
        .enumerate()
        .map(|(pi, p)| {
            let mut stats = TrialStats::default();
            for trial in 0..spec.trials {
                stats.merge(run_trial(spec, p, mix_seed(spec.seed, &[pi as u64, trial as u64]))?);
            }
            Ok(ReportRow { point: *p, stats })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Report {
        seed: spec.seed,
        mode: spec.mode,
        adversary: spec.adversary,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_mix() {
        assert_ne!(mix_seed(1, &[0, 1]), mix_seed(1, &[1, 0]));
        assert_eq!(mix_seed(5, &[2]), mix_seed(5, &[2]));
    }

    #[test]
    fn adversary_names_round_trip() {
        for a in [Adversary::Random, Adversary::Greedy, Adversary::Exhaustive(12)] {
            assert_eq!(a.to_string().parse::<Adversary>().unwrap(), a);
        }
        assert!("sneaky".parse::<Adversary>().is_err());
    }

    #[test]
    fn sufficient_m_matches_known_values() {
        assert_eq!(multilog_m(Mode::LinkBlocking, 2, 4, 4, 1).unwrap(), 5);
        assert_eq!(multilog_m(Mode::LinkBlocking, 2, 4, 0, 2).unwrap(), 6);
        assert_eq!(multilog_m(Mode::LinkBlocking, 2, 4, 1, 16).unwrap(), 6);
        assert_eq!(multilog_m(Mode::CrosstalkFree, 2, 4, 1, 16).unwrap(), 12);
    }

    #[test]
    fn greedy_blocks_below_the_bound() {
        let m = multilog_m(Mode::LinkBlocking, 2, 4, 1, 2).unwrap();
        let cfg = MultilogConfig::new(2, 4, m - 1, 1, 2, Mode::LinkBlocking).unwrap();
        let found: usize = (0..40).map(|s| multilog_greedy(cfg, 60, s, true).unwrap().blocked).sum();
        assert!(found > 0);
    }

    #[test]
    fn exhaustive_worst_is_below_the_bound() {
        for mode in [Mode::LinkBlocking, Mode::CrosstalkFree] {
            for (t, f) in [(0, 1), (1, 2), (2, 2)] {
                let (worst, _) = exhaustive_worst(2, 3, t, f, mode, 100_000).unwrap();
                assert!(worst < multilog_m(mode, 2, 3, t, f).unwrap(), "{mode:?} t={t} f={f}");
            }
        }
    }

    #[test]
    fn exhaustive_trial_blocks_exactly_when_planes_run_out() {
        let cfg = MultilogConfig::new(2, 4, 2, 0, 1, Mode::LinkBlocking).unwrap();
        let s = multilog_exhaustive(cfg, EXHAUSTIVE_DEPTH_CAP, 3, true).unwrap();
        assert_eq!(s.duality_violations, 0, "{:?}", s.findings);
        assert_eq!(s.blocked, usize::from(s.max_blocking == 2));
    }

    #[test]
    fn clos_greedy_finds_blocking_at_2n_minus_2() {
        for n in 2..=4 {
            let s = clos_greedy(n, 2, 2 * n - 2, 200, 9).unwrap();
            assert_eq!(s.blocked, 1, "n={n}");
            let s = clos_greedy(n, 2, 2 * n - 1, 200, 9).unwrap();
            assert_eq!(s.blocked, 0);
            assert_eq!(s.max_blocking, 2 * n - 2);
        }
    }

    #[test]
    fn sweep_is_deterministic_and_ordered() {
        let spec = SweepSpec {
            ns: vec![3],
            fs: vec![1, 2],
            trials: 3,
            events: 10,
            check_duality: true,
            ..Default::default()
        };
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        assert_eq!(a.csv(), b.csv());
        assert_eq!(a.rows.len(), spec.points().unwrap().len());
        assert!(a.failures().is_empty(), "{}", a.csv());
        let pts: Vec<_> = a.rows.iter().map(|r| r.point).collect();
        let mut sorted = pts.clone();
        sorted.sort();
        assert_eq!(pts, sorted);
    }

    #[test]
    fn empty_grid_is_rejected() {
        let spec = SweepSpec {
            fs: vec![],
            ..Default::default()
        };
        assert!(spec.points().is_err());
        let spec = SweepSpec {
            adversary: Adversary::Exhaustive(EXHAUSTIVE_DEPTH_CAP + 1),
            ..Default::default()
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn dwec_exhaustive_small() {
        let w = [Q::new(1, 4), Q::new(41, 100), Q::new(3, 5)];
        let scheme = DwecScheme::<Q>::four_type();
        let r = dwec_exhaustive(&scheme, 3, &w, 3, scheme.ratio(), Q::new(9, 5)).unwrap();
        assert_eq!(r.violation_count, 0);
        assert!(r.states > 10);
        assert!(r.max_colors >= 1);
        assert_eq!(permutations(4).len(), 24);
    }

    #[test]
    fn fuzzed_duals_are_caught() {
        let inst = LpInstance::canonical(2, 4, 1, 2, 2, Mode::LinkBlocking).unwrap();
        let dual = dual_family::<Q>(&inst, 0, 3).unwrap();
        for seed in 0..20 {
            let f = fuzz_dual(&inst, &dual, seed).unwrap();
            assert!(f.detected(), "{f:?}");
        }
    }

    #[test]
    fn multilog_trace_rows() {
        let cfg = MultilogConfig::new(2, 3, 1, 0, 1, Mode::LinkBlocking).unwrap();
        let ev = crate::trace::parse_multilog("A 1 000 000\nA 2 100 001\nD 1\n", 2, 3).unwrap();
        let run = run_multilog_trace(cfg, &ev).unwrap();
        assert_eq!(run.rows, vec!["A,1,0,1,routed", "A,2,1,,blocked", "D,1,,,released"]);
        assert_eq!(run.blocked, 1);
        assert!(run_multilog_trace(cfg, &[]).unwrap().rows.is_empty());
    }
}

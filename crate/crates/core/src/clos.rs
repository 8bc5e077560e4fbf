//! Three-stage Clos network C(n1, r1, m, n2, r2).
//!
//! Crossbars, ports and middle crossbars are 0-based internally and 1-based
//! in every textual form.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dwec::{ColoringState, DwecScheme, StepOutcome};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Terminal {
    pub xbar: usize,
    pub port: usize,
}

impl Terminal {
    pub fn new(xbar: usize, port: usize) -> Self {
        Self { xbar, port }
    }
}

impl fmt::Display for Terminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.xbar + 1, self.port + 1)
    }
}

impl FromStr for Terminal {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Argument(format!("terminal {s:?} is not <crossbar>:<port>"));
        let (x, p) = s.split_once(':').ok_or_else(bad)?;
        let x: usize = x.trim().parse().map_err(|_| bad())?;
        let p: usize = p.trim().parse().map_err(|_| bad())?;
        if x == 0 || p == 0 {
            return Err(bad());
        }
        Ok(Self::new(x - 1, p - 1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Traffic {
    SpaceUnicast,
    MultirateUnicast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClosConfig {
    pub n1: usize,
    pub r1: usize,
    pub m: usize,
    pub n2: usize,
    pub r2: usize,
    pub traffic: Traffic,
}

impl ClosConfig {
    pub fn new(n1: usize, r1: usize, m: usize, n2: usize, r2: usize, traffic: Traffic) -> Result<Self> {
        for (name, v) in [("n1", n1), ("r1", r1), ("m", m), ("n2", n2), ("r2", r2)] {
            if v == 0 {
                return Err(Error::Argument(format!("{name} must be positive")));
            }
        }
        Ok(Self {
            n1,
            r1,
            m,
            n2,
            r2,
            traffic,
        })
    }

    pub fn symmetric(n: usize, m: usize, r: usize, traffic: Traffic) -> Result<Self> {
        Self::new(n, r, m, n, r, traffic)
    }

    fn check_terminals(&self, input: Terminal, output: Terminal) -> Result<()> {
        if input.xbar >= self.r1 || input.port >= self.n1 {
            return Err(Error::Argument(format!("input {input} out of range")));
        }
        if output.xbar >= self.r2 || output.port >= self.n2 {
            return Err(Error::Argument(format!("output {output} out of range")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpacePolicy {
    FirstFit,
    Random(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosOutcome {
    /// 1-based middle crossbar.
    Routed { crossbar: usize },
    Blocked,
}

impl ClosOutcome {
    pub fn is_blocked(&self) -> bool {
        matches!(self, ClosOutcome::Blocked)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpaceRequest {
    pub input: Terminal,
    pub output: Terminal,
    /// 0-based middle crossbar.
    pub mid: usize,
}

/// Space-division unicast state.
#[derive(Clone, Debug)]
pub struct ClosState {
    cfg: ClosConfig,
    policy: SpacePolicy,
    rng: ChaCha8Rng,
    // [mid][crossbar] -> request id, 0 when free
    in_link: Vec<Vec<u64>>,
    out_link: Vec<Vec<u64>>,
    in_term: Vec<Vec<u64>>,
    out_term: Vec<Vec<u64>>,
    requests: BTreeMap<u64, SpaceRequest>,
}

impl ClosState {
    pub fn new(cfg: ClosConfig, policy: SpacePolicy) -> Self {
        let seed = match policy {
            SpacePolicy::Random(s) => s,
            SpacePolicy::FirstFit => 0,
        };
        Self {
            cfg,
            policy,
            rng: ChaCha8Rng::seed_from_u64(seed),
            in_link: vec![vec![0; cfg.r1]; cfg.m],
            out_link: vec![vec![0; cfg.r2]; cfg.m],
            in_term: vec![vec![0; cfg.n1]; cfg.r1],
            out_term: vec![vec![0; cfg.n2]; cfg.r2],
            requests: BTreeMap::new(),
        }
    }

    pub fn config(&self) -> &ClosConfig {
        &self.cfg
    }

    pub fn requests(&self) -> &BTreeMap<u64, SpaceRequest> {
        &self.requests
    }

    pub fn input_free(&self, t: Terminal) -> bool {
        self.in_term[t.xbar][t.port] == 0
    }

    pub fn output_free(&self, t: Terminal) -> bool {
        self.out_term[t.xbar][t.port] == 0
    }

    pub fn free_inputs(&self) -> impl Iterator<Item = Terminal> + '_ {
        free_terms(&self.in_term)
    }

    pub fn free_outputs(&self) -> impl Iterator<Item = Terminal> + '_ {
        free_terms(&self.out_term)
    }

    /// 0-based middle crossbars with free links to both i and o.
    pub fn available(&self, i: usize, o: usize) -> Vec<usize> {
        (0..self.cfg.m)
            .filter(|&c| self.in_link[c][i] == 0 && self.out_link[c][o] == 0)
            .collect()
    }

    pub fn unavailable(&self, i: usize, o: usize) -> usize {
        self.cfg.m - self.available(i, o).len()
    }

    fn precheck(&self, id: u64, input: Terminal, output: Terminal) -> Result<()> {
        if id == 0 {
            return Err(Error::Argument("request id 0 is reserved".into()));
        }
        if self.requests.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        self.cfg.check_terminals(input, output)?;
        if !self.input_free(input) {
            return Err(Error::InputBusy(input.to_string()));
        }
        if !self.output_free(output) {
            return Err(Error::OutputBusy(output.to_string()));
        }
        Ok(())
    }

    fn commit(&mut self, id: u64, input: Terminal, output: Terminal, mid: usize) {
        self.in_link[mid][input.xbar] = id;
        self.out_link[mid][output.xbar] = id;
        self.in_term[input.xbar][input.port] = id;
        self.out_term[output.xbar][output.port] = id;
        self.requests.insert(id, SpaceRequest { input, output, mid });
    }

    /// Route on any available middle crossbar chosen by the policy.
    pub fn snb_admit(&mut self, id: u64, input: Terminal, output: Terminal) -> Result<ClosOutcome> {
        self.precheck(id, input, output)?;
        let avail = self.available(input.xbar, output.xbar);
        let pick = match self.policy {
            SpacePolicy::FirstFit => avail.first().copied(),
            SpacePolicy::Random(_) => avail.choose(&mut self.rng).copied(),
        };
        Ok(match pick {
            Some(mid) => {
                self.commit(id, input, output, mid);
                ClosOutcome::Routed { crossbar: mid + 1 }
            }
            None => ClosOutcome::Blocked,
        })
    }

    /// Route on a given 1-based middle crossbar.
    pub fn place(&mut self, id: u64, input: Terminal, output: Terminal, crossbar: usize) -> Result<()> {
        self.precheck(id, input, output)?;
        if crossbar == 0 || crossbar > self.cfg.m {
            return Err(Error::Argument(format!("crossbar {crossbar} out of range")));
        }
        let mid = crossbar - 1;
        if self.in_link[mid][input.xbar] != 0 || self.out_link[mid][output.xbar] != 0 {
            return Err(Error::Argument(format!("crossbar {crossbar} is unavailable")));
        }
        self.commit(id, input, output, mid);
        Ok(())
    }

    /// Route with the reuse rule; needs r1 = r2 = 2.
    pub fn benes_admit(&mut self, id: u64, input: Terminal, output: Terminal) -> Result<ClosOutcome> {
        if self.cfg.r1 != 2 || self.cfg.r2 != 2 {
            return Err(Error::Argument("the reuse rule needs r = 2".into()));
        }
        self.precheck(id, input, output)?;
        let (i, j) = (input.xbar, output.xbar);
        let avail = self.available(i, j);
        let diag = avail.iter().copied().find(|&c| {
            let rq = self.in_link[c][1 - i];
            rq != 0 && self.requests[&rq].output.xbar == 1 - j
        });
        let idle = || {
            avail
                .iter()
                .copied()
                .find(|&c| self.in_link[c].iter().all(|&x| x == 0) && self.out_link[c].iter().all(|&x| x == 0))
        };
        Ok(match diag.or_else(idle) {
            Some(mid) => {
                self.commit(id, input, output, mid);
                ClosOutcome::Routed { crossbar: mid + 1 }
            }
            None => ClosOutcome::Blocked,
        })
    }

    pub fn release(&mut self, id: u64) -> Result<SpaceRequest> {
        let rq = self.requests.remove(&id).ok_or(Error::UnknownId(id))?;
        self.in_link[rq.mid][rq.input.xbar] = 0;
        self.out_link[rq.mid][rq.output.xbar] = 0;
        self.in_term[rq.input.xbar][rq.input.port] = 0;
        self.out_term[rq.output.xbar][rq.output.port] = 0;
        Ok(rq)
    }

    /// M_ij as 1-based crossbar sets, indexed [i][j] with 0-based i, j.
    pub fn benes_sets(&self) -> [[BTreeSet<usize>; 2]; 2] {
        let mut m: [[BTreeSet<usize>; 2]; 2] = Default::default();
        for rq in self.requests.values() {
            if rq.input.xbar < 2 && rq.output.xbar < 2 {
                m[rq.input.xbar][rq.output.xbar].insert(rq.mid + 1);
            }
        }
        m
    }

    /// |M11 ∪ M22| <= n and |M12 ∪ M21| <= n.
    pub fn benes_invariant(&self) -> std::result::Result<(), String> {
        let m = self.benes_sets();
        let n = self.cfg.n1.max(self.cfg.n2);
        let a = m[0][0].union(&m[1][1]).count();
        let b = m[0][1].union(&m[1][0]).count();
        if a > n || b > n {
            return Err(format!("|M11 ∪ M22| = {a}, |M12 ∪ M21| = {b}, n = {n}"));
        }
        Ok(())
    }

    pub fn audit(&self) -> std::result::Result<(), String> {
        let mut fresh = ClosState::new(self.cfg, SpacePolicy::FirstFit);
        for (&id, rq) in &self.requests {
            if fresh.in_link[rq.mid][rq.input.xbar] != 0 || fresh.out_link[rq.mid][rq.output.xbar] != 0 {
                return Err(format!("request {id} shares a middle link"));
            }
            if !fresh.input_free(rq.input) || !fresh.output_free(rq.output) {
                return Err(format!("request {id} shares a terminal"));
            }
            fresh.commit(id, rq.input, rq.output, rq.mid);
        }
        if fresh.in_link != self.in_link || fresh.out_link != self.out_link {
            return Err("link maps out of sync".into());
        }
        if fresh.in_term != self.in_term || fresh.out_term != self.out_term {
            return Err("terminal maps out of sync".into());
        }
        Ok(())
    }
}

fn free_terms(t: &[Vec<u64>]) -> impl Iterator<Item = Terminal> + '_ {
    t.iter().enumerate().flat_map(|(x, ports)| {
        ports
            .iter()
            .enumerate()
            .filter(|(_, &o)| o == 0)
            .map(move |(p, _)| Terminal::new(x, p))
    })
}

/// An event on the abstract r = 2 state: crossbar classes only, terminals
/// left implicit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenesEvent {
    Arrive { i: usize, j: usize },
    /// 1-based crossbar.
    Depart { crossbar: usize, i: usize, j: usize },
}

// crossbar contents as a bitmask over the pairs (i, j), bit 2i + j
type Abstract = Vec<u8>;

fn abstract_admit(st: &Abstract, i: usize, j: usize) -> Option<usize> {
    let bit = |a: usize, b: usize| 1u8 << (2 * a + b);
    let uses = |mask: u8| {
        let ins = [(mask & (bit(0, 0) | bit(0, 1))) != 0, (mask & (bit(1, 0) | bit(1, 1))) != 0];
        let outs = [(mask & (bit(0, 0) | bit(1, 0))) != 0, (mask & (bit(0, 1) | bit(1, 1))) != 0];
        (ins, outs)
    };
    let free = |mask: u8| {
        let (ins, outs) = uses(mask);
        !ins[i] && !outs[j]
    };
    st.iter()
        .position(|&m| m & bit(1 - i, 1 - j) != 0 && free(m))
        .or_else(|| st.iter().position(|&m| m == 0))
}

/// Breadth-first search over abstract states of the r = 2 network under the
/// reuse rule. Returns a shortest event sequence ending in a blocked
/// arrival, if one exists within `max_depth` events.
pub fn benes_blocking_search(n: usize, m: usize, max_depth: usize) -> Option<Vec<BenesEvent>> {
    let start: Abstract = vec![0; m];
    let mut parent: HashMap<Abstract, (Abstract, BenesEvent)> = HashMap::new();
    let mut depth: HashMap<Abstract, usize> = HashMap::from([(start.clone(), 0)]);
    let mut queue = VecDeque::from([start.clone()]);
    let path = |parent: &HashMap<Abstract, (Abstract, BenesEvent)>, mut s: Abstract| {
        let mut out = Vec::new();
        while let Some((p, e)) = parent.get(&s) {
            out.push(*e);
            s = p.clone();
        }
        out.reverse();
        out
    };
    while let Some(s) = queue.pop_front() {
        let dep = depth[&s];
        if dep >= max_depth {
            continue;
        }
        let mut count = [[0usize; 2]; 2];
        for &mask in &s {
            for (i, row) in count.iter_mut().enumerate() {
                for (j, c) in row.iter_mut().enumerate() {
                    *c += usize::from(mask & (1 << (2 * i + j)) != 0);
                }
            }
        }
        let mut next = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                let in_load = count[i][0] + count[i][1];
                let out_load = count[0][j] + count[1][j];
                if in_load < n && out_load < n {
                    match abstract_admit(&s, i, j) {
                        None => {
                            let mut p = path(&parent, s.clone());
                            p.push(BenesEvent::Arrive { i, j });
                            return Some(p);
                        }
                        Some(c) => {
                            let mut t = s.clone();
                            t[c] |= 1 << (2 * i + j);
                            next.push((t, BenesEvent::Arrive { i, j }));
                        }
                    }
                }
                for (c, &mask) in s.iter().enumerate() {
                    if mask & (1 << (2 * i + j)) != 0 {
                        let mut t = s.clone();
                        t[c] &= !(1 << (2 * i + j));
                        next.push((t, BenesEvent::Depart { crossbar: c + 1, i, j }));
                    }
                }
            }
        }
        for (t, e) in next {
            if let std::collections::hash_map::Entry::Vacant(v) = depth.entry(t.clone()) {
                v.insert(dep + 1);
                parent.insert(t.clone(), (s.clone(), e));
                queue.push_back(t);
            }
        }
    }
    None
}

/// Replay abstract events on a concrete state with the lowest free ports.
/// Returns the position of the first blocked arrival.
pub fn replay_benes(n: usize, m: usize, events: &[BenesEvent]) -> Result<Option<usize>> {
    let cfg = ClosConfig::symmetric(n, m, 2, Traffic::SpaceUnicast)?;
    let mut st = ClosState::new(cfg, SpacePolicy::FirstFit);
    let mut next = 1u64;
    for (k, e) in events.iter().enumerate() {
        match *e {
            BenesEvent::Arrive { i, j } => {
                let input = st.free_inputs().find(|t| t.xbar == i).ok_or_else(|| Error::InputBusy(format!("crossbar {}", i + 1)))?;
                let output = st.free_outputs().find(|t| t.xbar == j).ok_or_else(|| Error::OutputBusy(format!("crossbar {}", j + 1)))?;
                if st.benes_admit(next, input, output)?.is_blocked() {
                    return Ok(Some(k));
                }
                next += 1;
            }
            BenesEvent::Depart { crossbar, i, j } => {
                let id = st
                    .requests()
                    .iter()
                    .find(|(_, r)| r.mid + 1 == crossbar && r.input.xbar == i && r.output.xbar == j)
                    .map(|(&id, _)| id)
                    .ok_or_else(|| Error::Argument(format!("nothing to depart at event {k}")))?;
                st.release(id)?;
            }
        }
        st.benes_invariant().map_err(Error::Argument)?;
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateRequest<T> {
    pub input: Terminal,
    pub output: Terminal,
    pub rate: T,
    /// 1-based middle crossbar.
    pub crossbar: usize,
}

/// Multirate unicast: each request is a DWEC edge between its input and
/// output crossbars; colors map to middle crossbars through one contiguous
/// block per color class.
#[derive(Clone, Debug)]
pub struct MultirateState<T> {
    cfg: ClosConfig,
    coloring: ColoringState<T>,
    offsets: Vec<usize>,
    blocks: Vec<usize>,
    in_load: Vec<Vec<T>>,
    out_load: Vec<Vec<T>>,
    requests: BTreeMap<u64, RateRequest<T>>,
}

impl<T: Scalar> MultirateState<T> {
    pub fn new(cfg: ClosConfig, scheme: DwecScheme<T>) -> Self {
        let n = <T as Scalar>::from_usize(cfg.n1.max(cfg.n2));
        let blocks: Vec<usize> = scheme
            .x()
            .iter()
            .map(|x| (x.clone() * n.clone()).ceil_i64().max(0) as usize)
            .collect();
        let offsets = blocks
            .iter()
            .scan(0, |acc, &b| {
                let o = *acc;
                *acc += b;
                Some(o)
            })
            .collect();
        Self {
            cfg,
            coloring: ColoringState::new(scheme, cfg.r1 + cfg.r2),
            offsets,
            blocks,
            in_load: vec![vec![T::zero(); cfg.n1]; cfg.r1],
            out_load: vec![vec![T::zero(); cfg.n2]; cfg.r2],
            requests: BTreeMap::new(),
        }
    }

    /// Σ ⌈x_i n⌉: middle crossbars the reserved blocks span.
    pub fn required_m(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn coloring(&self) -> &ColoringState<T> {
        &self.coloring
    }

    pub fn requests(&self) -> &BTreeMap<u64, RateRequest<T>> {
        &self.requests
    }

    pub fn residual_in(&self, t: Terminal) -> T {
        T::one() - self.in_load[t.xbar][t.port].clone()
    }

    pub fn residual_out(&self, t: Terminal) -> T {
        T::one() - self.out_load[t.xbar][t.port].clone()
    }

    pub fn multirate_admit(&mut self, id: u64, input: Terminal, output: Terminal, rate: T) -> Result<ClosOutcome> {
        self.cfg.check_terminals(input, output)?;
        if id == 0 {
            return Err(Error::Argument("request id 0 is reserved".into()));
        }
        if self.requests.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        if rate <= T::zero() || rate > T::one() {
            return Err(Error::Argument(format!("rate {rate} outside (0, 1]")));
        }
        if rate > self.residual_in(input) {
            return Err(Error::InputBusy(input.to_string()));
        }
        if rate > self.residual_out(output) {
            return Err(Error::OutputBusy(output.to_string()));
        }
        let u = input.xbar;
        let v = self.cfg.r1 + output.xbar;
        let StepOutcome::Colored { class, slot, .. } = self.coloring.arrive(id, u, v, rate.clone())? else {
            unreachable!("arrivals always color");
        };
        let crossbar = self.offsets[class] + slot + 1;
        if slot >= self.blocks[class] || crossbar > self.cfg.m {
            self.coloring.depart(id)?;
            return Ok(ClosOutcome::Blocked);
        }
        self.in_load[input.xbar][input.port] = self.in_load[input.xbar][input.port].clone() + rate.clone();
        self.out_load[output.xbar][output.port] = self.out_load[output.xbar][output.port].clone() + rate.clone();
        self.requests.insert(
            id,
            RateRequest {
                input,
                output,
                rate,
                crossbar,
            },
        );
        Ok(ClosOutcome::Routed { crossbar })
    }

    pub fn release(&mut self, id: u64) -> Result<RateRequest<T>> {
        let rq = self.requests.remove(&id).ok_or(Error::UnknownId(id))?;
        self.coloring.depart(id)?;
        let (i, o) = (rq.input, rq.output);
        self.in_load[i.xbar][i.port] = self.in_load[i.xbar][i.port].clone() - rq.rate.clone();
        self.out_load[o.xbar][o.port] = self.out_load[o.xbar][o.port].clone() - rq.rate.clone();
        Ok(rq)
    }

    /// Per middle link weight <= 1, terminal rates <= 1, and the coloring audit.
    pub fn audit(&self) -> std::result::Result<(), String> {
        let mut links: BTreeMap<(usize, bool, usize), T> = BTreeMap::new();
        let mut ins: BTreeMap<Terminal, T> = BTreeMap::new();
        let mut outs: BTreeMap<Terminal, T> = BTreeMap::new();
        let bump = |e: &mut T, r: &T| *e = e.clone() + r.clone();
        for rq in self.requests.values() {
            bump(links.entry((rq.crossbar, false, rq.input.xbar)).or_insert_with(T::zero), &rq.rate);
            bump(links.entry((rq.crossbar, true, rq.output.xbar)).or_insert_with(T::zero), &rq.rate);
            bump(ins.entry(rq.input).or_insert_with(T::zero), &rq.rate);
            bump(outs.entry(rq.output).or_insert_with(T::zero), &rq.rate);
        }
        if let Some(((c, side, x), w)) = links.iter().find(|(_, w)| **w > T::one()) {
            let side = if *side { "output" } else { "input" };
            return Err(format!("crossbar {c} carries {w} on the link to {side} crossbar {}", x + 1));
        }
        if ins.values().chain(outs.values()).any(|w| *w > T::one()) {
            return Err("terminal rate above 1".into());
        }
        self.coloring.audit()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use rand::Rng;

    fn t(x: usize, p: usize) -> Terminal {
        Terminal::new(x, p)
    }

    #[test]
    fn terminal_text() {
        let x: Terminal = "2:3".parse().unwrap();
        assert_eq!(x, t(1, 2));
        assert_eq!(x.to_string(), "2:3");
        assert!("0:1".parse::<Terminal>().is_err());
        assert!("3".parse::<Terminal>().is_err());
    }

    #[test]
    fn first_request_uses_crossbar_one() {
        let cfg = ClosConfig::symmetric(2, 3, 2, Traffic::SpaceUnicast).unwrap();
        let mut st = ClosState::new(cfg, SpacePolicy::FirstFit);
        assert_eq!(st.snb_admit(1, t(0, 0), t(1, 1)).unwrap(), ClosOutcome::Routed { crossbar: 1 });
        assert_eq!(st.benes_admit(2, t(1, 0), t(0, 0)).unwrap(), ClosOutcome::Routed { crossbar: 1 });
        st.audit().unwrap();
    }

    #[test]
    fn worst_case_placement_blocks_below_2n_minus_1() {
        for n in 2..=4 {
            let cfg = ClosConfig::symmetric(n, 2 * n - 2, n + 1, Traffic::SpaceUnicast).unwrap();
            let mut st = ClosState::new(cfg, SpacePolicy::FirstFit);
            let mut id = 1;
            for k in 1..n {
                st.place(id, t(0, k), t(k, 0), k).unwrap();
                id += 1;
                st.place(id, t(k, 0), t(0, k), n - 1 + k).unwrap();
                id += 1;
            }
            assert_eq!(st.unavailable(0, 0), 2 * n - 2);
            assert!(st.snb_admit(id, t(0, 0), t(0, 0)).unwrap().is_blocked());
        }
    }

    #[test]
    fn snb_random_never_blocks_at_2n_minus_1() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let cfg = ClosConfig::symmetric(3, 5, 3, Traffic::SpaceUnicast).unwrap();
        let mut st = ClosState::new(cfg, SpacePolicy::Random(9));
        let mut next = 1;
        for _ in 0..3000 {
            if rng.gen_bool(0.4) && !st.requests().is_empty() {
                let ids: Vec<u64> = st.requests().keys().copied().collect();
                st.release(*ids.choose(&mut rng).unwrap()).unwrap();
                continue;
            }
            let ins: Vec<_> = st.free_inputs().collect();
            let outs: Vec<_> = st.free_outputs().collect();
            if ins.is_empty() || outs.is_empty() {
                continue;
            }
            let (i, o) = (*ins.choose(&mut rng).unwrap(), *outs.choose(&mut rng).unwrap());
            assert!(st.unavailable(i.xbar, o.xbar) <= 4);
            assert!(!st.snb_admit(next, i, o).unwrap().is_blocked());
            next += 1;
        }
        st.audit().unwrap();
    }

    #[test]
    fn benes_hand_sequence_blocks_at_two() {
        // n = 2, m = 2: crossbar 2 carries I2->O1 and I1->O2; the second I1->O2
        // goes to crossbar 1; once the first I1->O2 leaves, I1->O1 finds no
        // reusable or idle crossbar.
        let cfg = ClosConfig::symmetric(2, 2, 2, Traffic::SpaceUnicast).unwrap();
        let mut st = ClosState::new(cfg, SpacePolicy::FirstFit);
        assert_eq!(st.benes_admit(1, t(1, 0), t(0, 0)).unwrap(), ClosOutcome::Routed { crossbar: 1 });
        assert_eq!(st.benes_admit(2, t(0, 0), t(1, 0)).unwrap(), ClosOutcome::Routed { crossbar: 1 });
        assert_eq!(st.benes_admit(3, t(0, 1), t(1, 1)).unwrap(), ClosOutcome::Routed { crossbar: 2 });
        st.release(2).unwrap();
        assert!(st.benes_admit(4, t(0, 0), t(0, 1)).unwrap().is_blocked());
        st.benes_invariant().unwrap();
    }

    #[test]
    fn abstract_search_agrees_with_replay() {
        for n in 1..=4 {
            let m = 3 * n / 2;
            assert!(benes_blocking_search(n, m, 20).is_none(), "n = {n}");
            if m > 1 {
                let seq = benes_blocking_search(n, m - 1, 20).expect("blocking below 3n/2");
                assert_eq!(replay_benes(n, m - 1, &seq).unwrap(), Some(seq.len() - 1));
            }
        }
    }

    #[test]
    fn benes_rejects_other_r() {
        let cfg = ClosConfig::symmetric(2, 3, 3, Traffic::SpaceUnicast).unwrap();
        let mut st = ClosState::new(cfg, SpacePolicy::FirstFit);
        assert!(st.benes_admit(1, t(0, 0), t(0, 0)).is_err());
    }

    #[test]
    fn multirate_single_full_rate() {
        type R = Ratio<i64>;
        let cfg = ClosConfig::symmetric(4, 24, 3, Traffic::MultirateUnicast).unwrap();
        let mut st = MultirateState::new(cfg, DwecScheme::<R>::four_type());
        assert_eq!(st.required_m(), 24);
        let out = st.multirate_admit(1, t(0, 0), t(2, 1), R::new(1, 1)).unwrap();
        assert_eq!(out, ClosOutcome::Routed { crossbar: 1 });
        assert!(matches!(
            st.multirate_admit(2, t(0, 0), t(1, 1), R::new(1, 10)),
            Err(Error::InputBusy(_))
        ));
        st.release(1).unwrap();
        st.audit().unwrap();
    }
}

//! Stateful simulator of log_d(N, 0, m) under the window algorithm.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::banyan::Topology;
use crate::dary::{ipow, window_index, DaryString};
use crate::error::{check_range, Error, Result};
use crate::Mode;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanePolicy {
    FirstFit,
    /// The feasible plane carrying the most resources already.
    BestFit,
    Random(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultilogConfig {
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub t: usize,
    pub f: usize,
    pub mode: Mode,
    pub policy: PlanePolicy,
}

impl MultilogConfig {
    pub fn new(d: usize, n: usize, m: usize, t: usize, f: usize, mode: Mode) -> Result<Self> {
        if !(2..=36).contains(&d) {
            return Err(Error::Argument(format!("d = {d} outside [2, 36]")));
        }
        check_range("n", n as i64, 2, 12)?;
        check_range("m", m as i64, 1, 1 << 20)?;
        check_range("t", t as i64, 0, n as i64)?;
        check_range("f", f as i64, 1, ipow(d, n) as i64)?;
        Ok(Self {
            d,
            n,
            m,
            t,
            f,
            mode,
            policy: PlanePolicy::FirstFit,
        })
    }

    pub fn with_policy(mut self, policy: PlanePolicy) -> Self {
        self.policy = policy;
        self
    }
}

/// One routed branch: an output reached on a plane (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Branch {
    pub plane: usize,
    pub output: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Request {
    pub input: usize,
    pub branches: Vec<Branch>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowOutcome {
    Routed { window: usize, plane: usize },
    Blocked { window: usize },
}

impl WindowOutcome {
    pub fn is_blocked(&self) -> bool {
        matches!(self, WindowOutcome::Blocked { .. })
    }
}

#[derive(Clone, Debug)]
pub struct ConnState {
    cfg: MultilogConfig,
    topo: Topology,
    // per plane, resource -> owning request id, 0 when free
    occupancy: Vec<Vec<u64>>,
    requests: BTreeMap<u64, Request>,
    output_owner: Vec<u64>,
    input_owner: Vec<u64>,
    rng: ChaCha8Rng,
    scratch: Vec<usize>,
}

impl ConnState {
    pub fn new(cfg: MultilogConfig) -> Self {
        let topo = Topology::new(cfg.d, cfg.n);
        let width = match cfg.mode {
            Mode::LinkBlocking => topo.num_links(),
            Mode::CrosstalkFree => topo.num_ses(),
        };
        let seed = match cfg.policy {
            PlanePolicy::Random(s) => s,
            _ => 0,
        };
        Self {
            cfg,
            topo,
            occupancy: vec![vec![0; width]; cfg.m],
            requests: BTreeMap::new(),
            output_owner: vec![0; topo.ports()],
            input_owner: vec![0; topo.ports()],
            rng: ChaCha8Rng::seed_from_u64(seed),
            scratch: Vec::new(),
        }
    }

    pub fn config(&self) -> &MultilogConfig {
        &self.cfg
    }

    pub fn ports(&self) -> usize {
        self.topo.ports()
    }

    pub fn requests(&self) -> &BTreeMap<u64, Request> {
        &self.requests
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }

    pub fn output_free(&self, v: usize) -> bool {
        self.output_owner[v] == 0
    }

    pub fn input_free(&self, u: usize) -> bool {
        self.input_owner[u] == 0
    }

    pub fn window_of(&self, v: usize) -> usize {
        v / ipow(self.cfg.d, self.cfg.t)
    }

    fn digits(&self, idx: usize) -> DaryString {
        DaryString::from_index(self.cfg.d as u8, self.cfg.n, idx)
    }

    fn resources(&self, u: usize, v: usize, out: &mut Vec<usize>) {
        let x = self.digits(u);
        let y = self.digits(v);
        match self.cfg.mode {
            Mode::LinkBlocking => self.topo.link_ids(x.digits(), y.digits(), out),
            Mode::CrosstalkFree => self.topo.se_ids(x.digits(), y.digits(), out),
        }
    }

    fn sub_resources(&self, u: usize, outputs: &[usize]) -> Vec<usize> {
        let mut res = Vec::new();
        for &v in outputs {
            self.resources(u, v, &mut res);
        }
        res.sort_unstable();
        res.dedup();
        res
    }

    fn plane_admits(&self, plane: usize, res: &[usize]) -> bool {
        self.plane_admits_for(plane, res, 0)
    }

    // Branches of one request carry the same signal and may share resources.
    fn plane_admits_for(&self, plane: usize, res: &[usize], id: u64) -> bool {
        let occ = &self.occupancy[plane];
        res.iter().all(|&r| occ[r] == 0 || occ[r] == id)
    }

    fn validate(&self, input: usize, outputs: &[usize]) -> Result<()> {
        let ports = self.ports();
        if input >= ports {
            return Err(Error::Argument(format!("input {input} out of range")));
        }
        if outputs.is_empty() {
            return Err(Error::Argument("request without outputs".into()));
        }
        if outputs.len() > self.cfg.f {
            return Err(Error::FanoutExceeded {
                got: outputs.len(),
                f: self.cfg.f,
            });
        }
        let uniq: BTreeSet<_> = outputs.iter().collect();
        if uniq.len() != outputs.len() {
            return Err(Error::Argument("duplicate outputs in request".into()));
        }
        if !self.input_free(input) {
            return Err(Error::InputBusy(self.digits(input).to_string()));
        }
        for &v in outputs {
            if v >= ports {
                return Err(Error::Argument(format!("output {v} out of range")));
            }
            if !self.output_free(v) {
                return Err(Error::OutputBusy(self.digits(v).to_string()));
            }
        }
        Ok(())
    }

    /// Planes (1-based) on which some existing route conflicts with a
    /// branch of the subrequest (input, outputs).
    pub fn blocking_planes(&self, input: usize, outputs: &[usize]) -> BTreeSet<usize> {
        let res = self.sub_resources(input, outputs);
        (0..self.cfg.m)
            .filter(|&p| !self.plane_admits(p, &res))
            .map(|p| p + 1)
            .collect()
    }

    /// Route (input, outputs) by the window rule. Each window's subrequest is
    /// committed on its own; a blocked window leaves the others in place.
    pub fn admit(&mut self, id: u64, input: usize, outputs: &[usize]) -> Result<Vec<WindowOutcome>> {
        if id == 0 {
            return Err(Error::Argument("request id 0 is reserved".into()));
        }
        if self.requests.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        self.validate(input, outputs)?;
        let mut by_window: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &v in outputs {
            by_window.entry(self.window_of(v)).or_default().push(v);
        }
        let mut outcomes = Vec::with_capacity(by_window.len());
        let mut branches = Vec::new();
        for (window, outs) in by_window {
            let res = self.sub_resources(input, &outs);
            let feasible: Vec<usize> = (0..self.cfg.m).filter(|&p| self.plane_admits_for(p, &res, id)).collect();
            let Some(plane) = self.pick(&feasible) else {
                outcomes.push(WindowOutcome::Blocked { window });
                continue;
            };
            for &r in &res {
                self.occupancy[plane][r] = id;
            }
            for &v in &outs {
                self.output_owner[v] = id;
                branches.push(Branch { plane: plane + 1, output: v });
            }
            outcomes.push(WindowOutcome::Routed {
                window,
                plane: plane + 1,
            });
        }
        if !branches.is_empty() {
            self.input_owner[input] = id;
            self.requests.insert(id, Request { input, branches });
        }
        Ok(outcomes)
    }

    /// Route every branch of (input, outputs) on one given plane (1-based),
    /// bypassing the policy. Fails without side effects if that plane is
    /// blocked for any branch.
    pub fn place(&mut self, id: u64, input: usize, outputs: &[usize], plane: usize) -> Result<()> {
        self.place_groups(id, input, &[(outputs.to_vec(), plane)])
    }

    /// Explicit placement of (outputs, plane) groups. A window may appear in
    /// one group only; different groups may share a plane.
    pub fn place_groups(&mut self, id: u64, input: usize, groups: &[(Vec<usize>, usize)]) -> Result<()> {
        if id == 0 {
            return Err(Error::Argument("request id 0 is reserved".into()));
        }
        if self.requests.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        let all: Vec<usize> = groups.iter().flat_map(|g| g.0.iter().copied()).collect();
        self.validate(input, &all)?;
        let mut seen = BTreeMap::new();
        let mut plan = Vec::with_capacity(groups.len());
        for (gi, (outs, plane)) in groups.iter().enumerate() {
            check_range("plane", *plane as i64, 1, self.cfg.m as i64)?;
            for &v in outs {
                if *seen.entry(self.window_of(v)).or_insert(gi) != gi {
                    return Err(Error::Argument("a window is split across groups".into()));
                }
            }
            let res = self.sub_resources(input, outs);
            if !self.plane_admits(plane - 1, &res) {
                return Err(Error::Argument(format!("plane {plane} is blocked for this request")));
            }
            plan.push((res, *plane));
        }
        let mut branches = Vec::with_capacity(all.len());
        for ((res, plane), (outs, _)) in plan.into_iter().zip(groups) {
            for r in res {
                self.occupancy[plane - 1][r] = id;
            }
            for &v in outs {
                self.output_owner[v] = id;
                branches.push(Branch { plane, output: v });
            }
        }
        self.input_owner[input] = id;
        self.requests.insert(id, Request { input, branches });
        Ok(())
    }

    /// Sorted resource ids (links or SEs) of the multicast tree input -> outputs.
    pub fn resources_of(&self, input: usize, outputs: &[usize]) -> Vec<usize> {
        self.sub_resources(input, outputs)
    }

    /// Whether the tree input -> outputs fits on a plane (1-based) as is.
    pub fn fits(&self, plane: usize, input: usize, outputs: &[usize]) -> bool {
        self.plane_admits(plane - 1, &self.sub_resources(input, outputs))
    }

    fn pick(&mut self, feasible: &[usize]) -> Option<usize> {
        match self.cfg.policy {
            PlanePolicy::FirstFit => feasible.first().copied(),
            PlanePolicy::BestFit => feasible
                .iter()
                .copied()
                .max_by_key(|&p| (self.occupancy[p].iter().filter(|&&o| o != 0).count(), usize::MAX - p)),
            PlanePolicy::Random(_) => feasible.choose(&mut self.rng).copied(),
        }
    }

    pub fn release(&mut self, id: u64) -> Result<Request> {
        let req = self.requests.remove(&id).ok_or(Error::UnknownId(id))?;
        for b in &req.branches {
            self.scratch.clear();
            let mut res = std::mem::take(&mut self.scratch);
            self.resources(req.input, b.output, &mut res);
            for &r in &res {
                let slot = &mut self.occupancy[b.plane - 1][r];
                if *slot == id {
                    *slot = 0;
                }
            }
            self.scratch = res;
            self.output_owner[b.output] = 0;
        }
        self.input_owner[req.input] = 0;
        Ok(req)
    }

    /// All routed branches as (plane, input, output, id).
    pub fn branches(&self) -> impl Iterator<Item = (usize, usize, usize, u64)> + '_ {
        self.requests
            .iter()
            .flat_map(|(&id, r)| r.branches.iter().map(move |b| (b.plane, r.input, b.output, id)))
    }

    /// Rebuild occupancy from the registry and compare; checks every
    /// ConnState invariant.
    pub fn audit(&self) -> std::result::Result<(), String> {
        let width = self.occupancy.first().map_or(0, |p| p.len());
        let mut occ = vec![vec![0u64; width]; self.cfg.m];
        let mut outs = vec![0u64; self.ports()];
        let mut ins = vec![0u64; self.ports()];
        let mut res = Vec::new();
        for (&id, req) in &self.requests {
            if req.branches.len() > self.cfg.f {
                return Err(format!("request {id} has {} outputs", req.branches.len()));
            }
            if ins[req.input] != 0 {
                return Err(format!("input {} has two requests", req.input));
            }
            ins[req.input] = id;
            let mut plane_of_window = BTreeMap::new();
            for b in &req.branches {
                let w = self.window_of(b.output);
                if *plane_of_window.entry(w).or_insert(b.plane) != b.plane {
                    return Err(format!("request {id} splits window {w} across planes"));
                }
                if outs[b.output] != 0 {
                    return Err(format!("output {} owned twice", b.output));
                }
                outs[b.output] = id;
                res.clear();
                self.resources(req.input, b.output, &mut res);
                for &r in &res {
                    let slot = &mut occ[b.plane - 1][r];
                    if *slot != 0 && *slot != id {
                        return Err(format!("requests {} and {id} share resource {r} on plane {}", *slot, b.plane));
                    }
                    *slot = id;
                }
            }
        }
        if occ != self.occupancy {
            return Err("occupancy map out of sync with registry".into());
        }
        if outs != self.output_owner || ins != self.input_owner {
            return Err("terminal ownership out of sync".into());
        }
        Ok(())
    }

    pub fn parse_address(&self, s: &str) -> Result<usize> {
        let v = DaryString::parse(self.cfg.d as u8, s)?;
        if v.len() != self.cfg.n {
            return Err(Error::Argument(format!("{s} is not {} digits long", self.cfg.n)));
        }
        Ok(v.index())
    }

    pub fn window_index_of(&self, v: &DaryString) -> Result<usize> {
        window_index(v, self.cfg.t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::banyan::shares_link;
    use rand::Rng;

    fn cfg(d: usize, n: usize, m: usize, t: usize, f: usize, mode: Mode) -> MultilogConfig {
        MultilogConfig::new(d, n, m, t, f, mode).unwrap()
    }

    #[test]
    fn first_request_lands_on_plane_one() {
        let mut st = ConnState::new(cfg(2, 3, 3, 1, 2, Mode::LinkBlocking));
        let out = st.admit(1, 5, &[2, 3]).unwrap();
        assert_eq!(out, vec![WindowOutcome::Routed { window: 1, plane: 1 }]);
        st.audit().unwrap();
    }

    #[test]
    fn second_request_blocks_iff_links_shared() {
        let s = |x: &str| DaryString::parse(2, x).unwrap();
        for (u, v) in [("100", "011"), ("110", "001"), ("100", "001"), ("010", "100")] {
            let mut st = ConnState::new(cfg(2, 3, 1, 0, 1, Mode::LinkBlocking));
            st.admit(1, 0, &[0]).unwrap();
            let out = st.admit(2, s(u).index(), &[s(v).index()]).unwrap();
            let expect = shares_link(&s("000"), &s("000"), &s(u), &s(v)).unwrap();
            assert_eq!(out[0].is_blocked(), expect, "{u} -> {v}");
        }
    }

    #[test]
    fn windows_of_one_request_share_links() {
        // 0000 -> {0000, 0010}: t = 1 puts them in different windows, and the
        // two routes share the stage-1 to stage-3 links.
        let mut st = ConnState::new(cfg(2, 4, 1, 1, 2, Mode::LinkBlocking));
        let out = st.admit(1, 0, &[0, 2]).unwrap();
        assert!(out.iter().all(|o| !o.is_blocked()), "{out:?}");
        st.audit().unwrap();
        st.release(1).unwrap();
        assert!(st.occupancy.iter().flatten().all(|&o| o == 0));
    }

    #[test]
    fn release_restores_empty_state() {
        let mut st = ConnState::new(cfg(2, 4, 4, 2, 4, Mode::CrosstalkFree));
        let empty = st.clone();
        st.admit(9, 3, &[0, 5, 6, 15]).unwrap();
        assert!(!st.is_empty());
        st.release(9).unwrap();
        assert_eq!(st.occupancy, empty.occupancy);
        assert_eq!(st.output_owner, empty.output_owner);
        assert!(st.is_empty());
        assert_eq!(st.release(9).unwrap_err(), Error::UnknownId(9));
    }

    #[test]
    fn precondition_errors() {
        let mut st = ConnState::new(cfg(2, 3, 2, 1, 2, Mode::LinkBlocking));
        assert_eq!(
            st.admit(1, 0, &[1, 2, 3]).unwrap_err(),
            Error::FanoutExceeded { got: 3, f: 2 }
        );
        st.admit(1, 0, &[1]).unwrap();
        assert!(matches!(st.admit(2, 2, &[1]), Err(Error::OutputBusy(_))));
        assert!(matches!(st.admit(2, 0, &[4]), Err(Error::InputBusy(_))));
        assert_eq!(st.admit(1, 3, &[4]).unwrap_err(), Error::DuplicateId(1));
    }

    #[test]
    fn blocking_planes_fixture() {
        let mut st = ConnState::new(cfg(2, 3, 4, 0, 1, Mode::LinkBlocking));
        assert!(st.blocking_planes(0, &[0]).is_empty());
        // Fill planes 1 and 2 with unrelated traffic, then a conflicting route on plane 3.
        st.admit(1, 7, &[7]).unwrap();
        st.admit(2, 3, &[6]).unwrap();
        let before = st.blocking_planes(0, &[0]);
        assert!(before.is_empty(), "{before:?}");
        // 100 -> 001 shares the stage-1/2 link with 000 -> 000 (lcs(00,10)=1, lcp(00,00)=2).
        let mut st = ConnState::new(cfg(2, 3, 4, 0, 1, Mode::LinkBlocking));
        for (id, (u, v)) in [(1u64, (0b110, 0b110)), (2, (0b111, 0b111)), (3, (0b100, 0b001))] {
            st.admit(id, u, &[v]).unwrap();
        }
        let planes = st.blocking_planes(0, &[0]);
        let ids: Vec<_> = st.branches().filter(|b| planes.contains(&b.0)).map(|b| b.3).collect();
        assert!(ids.contains(&3));
    }

    #[test]
    fn random_interleaving_keeps_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for mode in [Mode::LinkBlocking, Mode::CrosstalkFree] {
            let mut st = ConnState::new(cfg(2, 4, 3, 1, 3, mode).with_policy(PlanePolicy::Random(5)));
            let mut next = 1u64;
            for _ in 0..100 {
                if rng.gen_bool(0.4) && !st.is_empty() {
                    let ids: Vec<_> = st.requests().keys().copied().collect();
                    st.release(*ids.choose(&mut rng).unwrap()).unwrap();
                } else {
                    let u = rng.gen_range(0..16);
                    let free: Vec<_> = (0..16).filter(|&v| st.output_free(v)).collect();
                    if !st.input_free(u) || free.is_empty() {
                        continue;
                    }
                    let k = rng.gen_range(1..=3.min(free.len()));
                    let outs: Vec<_> = free.choose_multiple(&mut rng, k).copied().collect();
                    st.admit(next, u, &outs).unwrap();
                    next += 1;
                }
                st.audit().unwrap();
            }
        }
    }

    #[test]
    fn crosstalk_state_is_link_legal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut st = ConnState::new(cfg(2, 4, 2, 0, 2, Mode::CrosstalkFree));
        for id in 1..=12u64 {
            let u = rng.gen_range(0..16);
            let v = rng.gen_range(0..16);
            let _ = st.admit(id, u, &[v]);
        }
        let mut link = ConnState::new(cfg(2, 4, 2, 0, 2, Mode::LinkBlocking));
        link.requests = st.requests.clone();
        let mut res = Vec::new();
        for (&id, r) in &st.requests {
            link.input_owner[r.input] = id;
            for b in &r.branches {
                link.output_owner[b.output] = id;
                res.clear();
                link.resources(r.input, b.output, &mut res);
                for &x in &res {
                    link.occupancy[b.plane - 1][x] = id;
                }
            }
        }
        link.audit().unwrap();
    }
}

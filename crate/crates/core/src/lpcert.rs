//! The blocking LP around a tagged request, its dual-feasible family and
//! the exact weak-duality check.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::banyan::{shares_link, shares_se};
use crate::bounds::{cost, p_max};
use crate::dary::{ipow, AddressSets, DaryString};
use crate::error::{check_range, Error, Result};
use crate::multilog::ConnState;
use crate::scalar::{min, pow, Scalar};
use crate::Mode;

#[derive(Clone, Debug)]
pub struct LpInstance {
    f: usize,
    mode: Mode,
    sets: AddressSets,
    uw: Vec<(usize, usize)>,
    uv: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstanceCounts {
    pub inputs: usize,
    pub windows: usize,
    pub window0_rest: usize,
    pub uw: usize,
    pub uv: usize,
}

pub fn build_instance(
    d: usize,
    n: usize,
    t: usize,
    f: usize,
    a: &DaryString,
    b: &[DaryString],
    mode: Mode,
) -> Result<LpInstance> {
    if a.base() as usize != d || a.len() != n {
        return Err(Error::Argument(format!("input {a} is not a base-{d} string of length {n}")));
    }
    check_range("f", f as i64, 1, ipow(d, n) as i64)?;
    if b.len() > f {
        return Err(Error::FanoutExceeded { got: b.len(), f });
    }
    let sets = AddressSets::build(a, b, t)?;
    Ok(LpInstance::from_sets(sets, f, mode))
}

impl LpInstance {
    pub fn from_sets(sets: AddressSets, f: usize, mode: Mode) -> Self {
        let thr = sets.n() as i64 - mode.theta();
        let mut uw = Vec::new();
        let mut uv = Vec::new();
        for (u, i) in sets.inputs() {
            for (w, j) in sets.windows() {
                if (i + j) as i64 >= thr {
                    uw.push((u, w));
                }
            }
            for (v, j) in sets.window0_rest() {
                if (i + j) as i64 >= thr {
                    uv.push((u, v));
                }
            }
        }
        Self { f, mode, sets, uw, uv }
    }

    /// a = 0^n and B = the k smallest outputs of W_0.
    pub fn canonical(d: usize, n: usize, t: usize, f: usize, k: usize, mode: Mode) -> Result<Self> {
        if k > f {
            return Err(Error::FanoutExceeded { got: k, f });
        }
        Ok(Self::from_sets(AddressSets::canonical(d as u8, n, t, k)?, f, mode))
    }

    pub fn d(&self) -> usize {
        self.sets.d()
    }
    pub fn n(&self) -> usize {
        self.sets.n()
    }
    pub fn t(&self) -> usize {
        self.sets.t()
    }
    pub fn f(&self) -> usize {
        self.f
    }
    pub fn k(&self) -> usize {
        self.sets.k()
    }
    pub fn mode(&self) -> Mode {
        self.mode
    }
    pub fn sets(&self) -> &AddressSets {
        &self.sets
    }
    pub fn uw_pairs(&self) -> &[(usize, usize)] {
        &self.uw
    }
    pub fn uv_pairs(&self) -> &[(usize, usize)] {
        &self.uv
    }

    pub fn defined_uw(&self, u: usize, w: usize) -> bool {
        match (self.sets.i_of(u), self.sets.j_of_window(w)) {
            (Some(i), Some(j)) => (i + j) as i64 >= self.n() as i64 - self.mode.theta(),
            _ => false,
        }
    }

    pub fn defined_uv(&self, u: usize, v: usize) -> bool {
        match (self.sets.i_of(u), self.sets.j_of_output(v)) {
            (Some(i), Some(j)) => (i + j) as i64 >= self.n() as i64 - self.mode.theta(),
            _ => false,
        }
    }

    pub fn counts(&self) -> InstanceCounts {
        InstanceCounts {
            inputs: self.sets.inputs().count(),
            windows: self.sets.windows().count(),
            window0_rest: self.sets.window0_rest().count(),
            uw: self.uw.len(),
            uv: self.uv.len(),
        }
    }
}

fn infeasible(constraint: &str, index: String) -> Error {
    Error::Infeasible {
        constraint: constraint.into(),
        index,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrimalSolution<T> {
    pub x_uw: BTreeMap<(usize, usize), T>,
    pub x_uv: BTreeMap<(usize, usize), T>,
}

impl<T: Scalar> Default for PrimalSolution<T> {
    fn default() -> Self {
        Self {
            x_uw: BTreeMap::new(),
            x_uv: BTreeMap::new(),
        }
    }
}

impl<T: Scalar> PrimalSolution<T> {
    pub fn objective(&self) -> T {
        self.x_uw
            .values()
            .chain(self.x_uv.values())
            .fold(T::zero(), |s, x| s + x.clone())
    }

    /// Checks the variable domains and the five constraint families P-1..P-5.
    pub fn check(&self, inst: &LpInstance) -> Result<()> {
        let zero = T::zero();
        let one = T::one();
        let mut per_w: BTreeMap<usize, T> = BTreeMap::new();
        let mut per_u_v: BTreeMap<usize, T> = BTreeMap::new();
        let mut per_v: BTreeMap<usize, T> = BTreeMap::new();
        let mut per_u: BTreeMap<usize, T> = BTreeMap::new();
        for (&(u, w), x) in &self.x_uw {
            if !inst.defined_uw(u, w) {
                return Err(infeasible("domain", format!("x_u{u}_w{w}")));
            }
            if *x < zero {
                return Err(infeasible("nonneg", format!("x_u{u}_w{w}")));
            }
            if *x > one {
                return Err(infeasible("P-2", format!("u={u},w={w}")));
            }
            add(&mut per_w, w, x);
            add(&mut per_u, u, x);
        }
        for (&(u, v), x) in &self.x_uv {
            if !inst.defined_uv(u, v) {
                return Err(infeasible("domain", format!("x_u{u}_v{v}")));
            }
            if *x < zero {
                return Err(infeasible("nonneg", format!("x_u{u}_v{v}")));
            }
            add(&mut per_u_v, u, x);
            add(&mut per_v, v, x);
            add(&mut per_u, u, x);
        }
        let dt: T = <T as Scalar>::from_usize(ipow(inst.d(), inst.t()));
        if let Some((w, _)) = per_w.iter().find(|(_, s)| **s > dt) {
            return Err(infeasible("P-1", format!("w={w}")));
        }
        if let Some((u, _)) = per_u_v.iter().find(|(_, s)| **s > one) {
            return Err(infeasible("P-3", format!("u={u}")));
        }
        if let Some((v, _)) = per_v.iter().find(|(_, s)| **s > one) {
            return Err(infeasible("P-4", format!("v={v}")));
        }
        let f: T = <T as Scalar>::from_usize(inst.f());
        if let Some((u, _)) = per_u.iter().find(|(_, s)| **s > f) {
            return Err(infeasible("P-5", format!("u={u}")));
        }
        Ok(())
    }
}

fn add<T: Scalar>(m: &mut BTreeMap<usize, T>, key: usize, x: &T) {
    let e = m.entry(key).or_insert_with(T::zero);
    *e = e.clone() + x.clone();
}

/// One blocking branch per blocking plane, mapped to 0/1 primal variables.
pub fn primal_from_state<T: Scalar>(conn: &ConnState, inst: &LpInstance) -> Result<PrimalSolution<T>> {
    let cfg = conn.config();
    if cfg.d != inst.d() || cfg.n != inst.n() || cfg.t != inst.t() || cfg.mode != inst.mode() {
        return Err(Error::Argument("state and instance disagree on (d, n, t, mode)".into()));
    }
    let a = inst.sets().a();
    let bs = inst.sets().outputs();
    if !conn.input_free(a.index()) {
        return Err(Error::InputBusy(a.to_string()));
    }
    if let Some(b) = bs.iter().find(|b| !conn.output_free(b.index())) {
        return Err(Error::OutputBusy(b.to_string()));
    }
    let d = inst.d() as u8;
    let n = inst.n();
    let mut chosen: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (plane, u, v, _) in conn.branches() {
        let us = DaryString::from_index(d, n, u);
        let vs = DaryString::from_index(d, n, v);
        let mut blocks = false;
        for b in bs {
            let hit = match inst.mode() {
                Mode::LinkBlocking => shares_link(a, b, &us, &vs)?,
                Mode::CrosstalkFree => shares_se(a, b, &us, &vs)?,
            };
            if hit {
                blocks = true;
                break;
            }
        }
        if blocks {
            let e = chosen.entry(plane).or_insert((u, v));
            if (u, v) < *e {
                *e = (u, v);
            }
        }
    }
    let wsize = ipow(inst.d(), inst.t());
    let mut sol = PrimalSolution::default();
    for (u, v) in chosen.into_values() {
        let w = v / wsize;
        if w == inst.sets().window0() {
            sol.x_uv.insert((u, v), T::one());
        } else {
            sol.x_uw.insert((u, w), T::one());
        }
    }
    Ok(sol)
}

/// An optimal 0/1 primal solution. The constraint matrix is a network
/// matrix, so the optimum is the max flow of
/// source -> u (cap f) -> w (cap 1) -> sink (cap d^t), and
/// u -> W_0 gate (cap 1) -> v (cap 1) -> sink (cap 1).
pub fn primal_optimum<T: Scalar>(inst: &LpInstance) -> PrimalSolution<T> {
    let ports = ipow(inst.d(), inst.n());
    let nw = inst.sets().num_windows();
    // node layout: source, sink, inputs, gates, windows, outputs
    let (src, snk) = (0, 1);
    let inp = |u: usize| 2 + u;
    let gate = |u: usize| 2 + ports + u;
    let win = |w: usize| 2 + 2 * ports + w;
    let out = |v: usize| 2 + 2 * ports + nw + v;
    let mut g = Flow::new(2 + 3 * ports + nw);
    let mut uw_edges = Vec::with_capacity(inst.uw.len());
    let mut uv_edges = Vec::with_capacity(inst.uv.len());
    for (u, _) in inst.sets().inputs() {
        g.add(src, inp(u), inst.f());
        g.add(inp(u), gate(u), 1);
    }
    for (w, _) in inst.sets().windows() {
        g.add(win(w), snk, ipow(inst.d(), inst.t()));
    }
    for (v, _) in inst.sets().window0_rest() {
        g.add(out(v), snk, 1);
    }
    for &(u, w) in &inst.uw {
        uw_edges.push(g.add(inp(u), win(w), 1));
    }
    for &(u, v) in &inst.uv {
        uv_edges.push(g.add(gate(u), out(v), 1));
    }
    g.max_flow(src, snk);
    let mut sol = PrimalSolution::default();
    for (&p, &e) in inst.uw.iter().zip(&uw_edges) {
        if g.flow_on(e) == 1 {
            sol.x_uw.insert(p, T::one());
        }
    }
    for (&p, &e) in inst.uv.iter().zip(&uv_edges) {
        if g.flow_on(e) == 1 {
            sol.x_uv.insert(p, T::one());
        }
    }
    sol
}

/// Dinic on a small graph.
struct Flow {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<usize>,
    orig: Vec<usize>,
}

impl Flow {
    fn new(n: usize) -> Self {
        Self {
            head: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
            orig: Vec::new(),
        }
    }

    fn add(&mut self, a: usize, b: usize, c: usize) -> usize {
        let e = self.to.len();
        self.head[a].push(e);
        self.to.push(b);
        self.cap.push(c);
        self.orig.push(c);
        self.head[b].push(e + 1);
        self.to.push(a);
        self.cap.push(0);
        self.orig.push(0);
        e
    }

    fn flow_on(&self, e: usize) -> usize {
        self.orig[e] - self.cap[e]
    }

    fn max_flow(&mut self, s: usize, t: usize) -> usize {
        let n = self.head.len();
        let mut total = 0;
        loop {
            let mut level = vec![usize::MAX; n];
            level[s] = 0;
            let mut q = std::collections::VecDeque::from([s]);
            while let Some(x) = q.pop_front() {
                for &e in &self.head[x] {
                    if self.cap[e] > 0 && level[self.to[e]] == usize::MAX {
                        level[self.to[e]] = level[x] + 1;
                        q.push_back(self.to[e]);
                    }
                }
            }
            if level[t] == usize::MAX {
                return total;
            }
            let mut it = vec![0; n];
            loop {
                let f = self.augment(s, t, usize::MAX, &level, &mut it);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
    }

    fn augment(&mut self, x: usize, t: usize, limit: usize, level: &[usize], it: &mut [usize]) -> usize {
        if x == t {
            return limit;
        }
        while it[x] < self.head[x].len() {
            let e = self.head[x][it[x]];
            let y = self.to[e];
            if self.cap[e] > 0 && level[y] == level[x] + 1 {
                let f = self.augment(y, t, limit.min(self.cap[e]), level, it);
                if f > 0 {
                    self.cap[e] -= f;
                    self.cap[e ^ 1] += f;
                    return f;
                }
            }
            it[x] += 1;
        }
        0
    }
}

/// Build a legal state realizing a 0/1 primal solution: one branch per unit,
/// each on its own plane (in variable order), using the lowest unused output
/// of each window. Units beyond the plane count are dropped.
pub fn realize_primal<T: Scalar>(inst: &LpInstance, primal: &PrimalSolution<T>, conn: &mut ConnState) -> Result<usize> {
    let wsize = ipow(inst.d(), inst.t());
    let taken: std::collections::BTreeSet<usize> = inst.sets().outputs().iter().map(|b| b.index()).collect();
    let mut next_in_window: BTreeMap<usize, usize> = BTreeMap::new();
    let mut groups: BTreeMap<usize, Vec<(Vec<usize>, usize)>> = BTreeMap::new();
    let mut plane = 0;
    let m = conn.config().m;
    let units = primal
        .x_uw
        .iter()
        .filter(|(_, x)| **x == T::one())
        .map(|(&(u, w), _)| (u, None, Some(w)))
        .chain(primal.x_uv.iter().filter(|(_, x)| **x == T::one()).map(|(&(u, v), _)| (u, Some(v), None)));
    for (u, v, w) in units {
        if plane == m {
            break;
        }
        let v = match (v, w) {
            (Some(v), _) => v,
            (None, Some(w)) => {
                let slot = next_in_window.entry(w).or_insert(0);
                let v = (w * wsize..(w + 1) * wsize)
                    .filter(|v| !taken.contains(v) && conn.output_free(*v))
                    .nth(*slot)
                    .ok_or_else(|| Error::Argument(format!("window {w} is full")))?;
                *slot += 1;
                v
            }
            _ => unreachable!(),
        };
        plane += 1;
        groups.entry(u).or_default().push((vec![v], plane));
    }
    let mut id = conn.requests().keys().next_back().copied().unwrap_or(0) + 1;
    for (u, g) in groups {
        conn.place_groups(id, u, &g)?;
        id += 1;
    }
    Ok(plane)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualSolution<T> {
    /// By window index; the W_0 slot is unused.
    pub alpha: Vec<T>,
    pub beta: BTreeMap<(usize, usize), T>,
    /// By input index; the slot of a is unused.
    pub gamma: Vec<T>,
    /// By output index; only W_0 - B slots count.
    pub delta: Vec<T>,
    pub eps: Vec<T>,
}

impl<T: Scalar> DualSolution<T> {
    pub fn zero(inst: &LpInstance) -> Self {
        let ports = ipow(inst.d(), inst.n());
        Self {
            alpha: vec![T::zero(); inst.sets().num_windows()],
            beta: BTreeMap::new(),
            gamma: vec![T::zero(); ports],
            delta: vec![T::zero(); ports],
            eps: vec![T::zero(); ports],
        }
    }

    fn sum_delta(&self, inst: &LpInstance) -> T {
        inst.sets()
            .window0_rest()
            .fold(T::zero(), |s, (v, _)| s + self.delta[v].clone())
    }

    pub fn objective(&self, inst: &LpInstance) -> T {
        let sets = inst.sets();
        let dt = <T as Scalar>::from_usize(ipow(inst.d(), inst.t()));
        let f = <T as Scalar>::from_usize(inst.f());
        let mut s = T::zero();
        for (w, _) in sets.windows() {
            s = s + dt.clone() * self.alpha[w].clone();
        }
        for b in self.beta.values() {
            s = s + b.clone();
        }
        for (u, _) in sets.inputs() {
            s = s + self.gamma[u].clone() + f.clone() * self.eps[u].clone();
        }
        s + self.sum_delta(inst)
    }

    /// Objective with Σδ replaced by min{d^t - k, k(d^(n-q) - 1)}, valid
    /// when δ is the indicator of B_q ∪ ... ∪ B_{n-1} on W_0 - B.
    pub fn union_bound_objective(&self, inst: &LpInstance, q: usize) -> T {
        let k = <T as Scalar>::from_usize(inst.k());
        let tail = min(
            pow::<T>(inst.d() as i64, inst.t() as i64) - k.clone(),
            k * (pow::<T>(inst.d() as i64, inst.n() as i64 - q as i64) - T::one()),
        );
        self.objective(inst) - self.sum_delta(inst) + tail
    }

    /// Every violated constraint, in a deterministic order.
    pub fn violations(&self, inst: &LpInstance) -> Vec<Error> {
        let zero = T::zero();
        let one = T::one();
        let mut out = Vec::new();
        let neg = |v: &[T], name: &str, out: &mut Vec<Error>| {
            for (i, x) in v.iter().enumerate() {
                if *x < zero {
                    out.push(infeasible("nonneg", format!("{name}[{i}]")));
                }
            }
        };
        neg(&self.alpha, "alpha", &mut out);
        neg(&self.gamma, "gamma", &mut out);
        neg(&self.delta, "delta", &mut out);
        neg(&self.eps, "eps", &mut out);
        for (&(u, w), b) in &self.beta {
            if *b < zero {
                out.push(infeasible("nonneg", format!("beta[u={u},w={w}]")));
            }
            if !inst.defined_uw(u, w) {
                out.push(infeasible("domain", format!("beta[u={u},w={w}]")));
            }
        }
        for &(u, w) in &inst.uw {
            let b = self.beta.get(&(u, w)).cloned().unwrap_or_else(T::zero);
            if self.alpha[w].clone() + b + self.eps[u].clone() < one {
                out.push(infeasible("DC-1", format!("u={u},w={w}")));
            }
        }
        for &(u, v) in &inst.uv {
            if self.gamma[u].clone() + self.delta[v].clone() + self.eps[u].clone() < one {
                out.push(infeasible("DC-2", format!("u={u},v={v}")));
            }
        }
        out
    }

    pub fn check(&self, inst: &LpInstance) -> Result<()> {
        match self.violations(inst).into_iter().next() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

fn set_band<T: Scalar>(inst: &LpInstance, dual: &mut DualSolution<T>, jlo: i64, jhi: i64, ilo_of_j: impl Fn(i64) -> i64, ihi: i64) {
    let sets = inst.sets();
    for (w, j) in sets.windows() {
        let j = j as i64;
        if j < jlo || j > jhi {
            continue;
        }
        let ilo = ilo_of_j(j);
        for (u, i) in sets.inputs() {
            let i = i as i64;
            if i >= ilo && i <= ihi {
                dual.beta.insert((u, w), T::one());
            }
        }
    }
}

fn set_alpha<T: Scalar>(inst: &LpInstance, dual: &mut DualSolution<T>, jlo: i64, jhi: i64) {
    for (w, j) in inst.sets().windows() {
        if (j as i64) >= jlo && (j as i64) <= jhi {
            dual.alpha[w] = T::one();
        }
    }
}

fn set_gamma<T: Scalar>(inst: &LpInstance, dual: &mut DualSolution<T>, ilo: i64, ihi: i64) {
    for (u, i) in inst.sets().inputs() {
        if (i as i64) >= ilo && (i as i64) <= ihi {
            dual.gamma[u] = T::one();
        }
    }
}

fn set_delta_tail<T: Scalar>(inst: &LpInstance, dual: &mut DualSolution<T>, q: usize) {
    for (v, j) in inst.sets().window0_rest() {
        if j >= q {
            dual.delta[v] = T::one();
        }
    }
}

/// The (p, q) member of the dual-feasible family, for t < n.
pub fn dual_family<T: Scalar>(inst: &LpInstance, p: usize, q: usize) -> Result<DualSolution<T>> {
    let (n, t) = (inst.n(), inst.t());
    if t >= n {
        return Err(Error::Argument("the dual family needs t < n".into()));
    }
    let mode = inst.mode();
    check_range("p", p as i64, 0, p_max(mode, n as u32, t as u32) as i64)?;
    check_range("q", q as i64, (n - t) as i64, n as i64)?;
    let (ni, ti, pi, qi) = (n as i64, t as i64, p as i64, q as i64);
    let th = mode.theta();
    // the crosstalk thresholds sit one lower
    let lo = 1 - th;
    let half = match mode {
        Mode::LinkBlocking => ni / 2,
        Mode::CrosstalkFree => (ni + 1) / 2,
    };
    let mut dual = DualSolution::zero(inst);
    for (u, i) in inst.sets().inputs() {
        if i as i64 >= ni - pi {
            dual.eps[u] = T::one();
        }
    }
    let band = move |j: i64| ni - th - j;
    if ti >= half {
        set_band(inst, &mut dual, pi + lo, ni - ti - 1, band, ni - pi - 1);
    } else if pi < ti {
        set_band(inst, &mut dual, pi + lo, ti - th, band, ni - pi - 1);
        set_alpha(inst, &mut dual, ti + lo, ni - ti - 1);
    } else {
        set_alpha(inst, &mut dual, pi + lo, ni - ti - 1);
    }
    if q == n - t {
        set_delta_tail(inst, &mut dual, 0);
    } else {
        set_gamma(inst, &mut dual, ni - qi + 1 - th, ni - pi - 1);
        set_delta_tail(inst, &mut dual, q);
    }
    Ok(dual)
}

/// The special assignments used when t = n.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecialDual {
    /// γ_u = 1 for i(u) >= 1.
    LinkAllGamma,
    /// γ on i(u) >= n-q+1, δ on j(v) >= q, q = floor((n+r)/2) + 1.
    LinkSplit,
    /// δ_v = 1 on all of W_0 - B.
    CrosstalkAllDelta,
    /// γ on i(u) >= 1, δ on B_{n-1}.
    CrosstalkGammaTail,
    /// γ on i(u) >= p, δ on j(v) >= n-p, p = ceil((n-r-1)/2).
    CrosstalkBalanced,
}

impl SpecialDual {
    /// The branch the t = n closed forms take for (f, k).
    pub fn default_for(inst: &LpInstance) -> Self {
        let (d, n) = (inst.d(), inst.n());
        let f = inst.f();
        let dn2 = ipow(d, n - 2);
        match inst.mode() {
            Mode::LinkBlocking if f > dn2 => SpecialDual::LinkAllGamma,
            Mode::LinkBlocking => SpecialDual::LinkSplit,
            Mode::CrosstalkFree if f > dn2 * (d - 1) => {
                if inst.k() > dn2 * (d - 1) {
                    SpecialDual::CrosstalkAllDelta
                } else {
                    SpecialDual::CrosstalkGammaTail
                }
            }
            Mode::CrosstalkFree => SpecialDual::CrosstalkBalanced,
        }
    }

    pub fn mode(self) -> Mode {
        match self {
            SpecialDual::LinkAllGamma | SpecialDual::LinkSplit => Mode::LinkBlocking,
            _ => Mode::CrosstalkFree,
        }
    }

    /// The q for which δ is the indicator of B_q ∪ ... ∪ B_{n-1}.
    pub fn q(self, d: usize, n: usize, f: usize) -> usize {
        let r = crate::bounds::ilog(d as u32, f as u64) as usize;
        match self {
            SpecialDual::LinkAllGamma => n,
            SpecialDual::LinkSplit => ((n + r) / 2 + 1).min(n),
            SpecialDual::CrosstalkAllDelta => 0,
            SpecialDual::CrosstalkGammaTail => n - 1,
            SpecialDual::CrosstalkBalanced => n - balanced_p(n, r),
        }
    }
}

fn balanced_p(n: usize, r: usize) -> usize {
    (n.saturating_sub(r + 1)).div_ceil(2)
}

pub fn dual_special_t_eq_n<T: Scalar>(inst: &LpInstance, variant: SpecialDual) -> Result<DualSolution<T>> {
    let n = inst.n();
    if inst.t() != n {
        return Err(Error::Argument(format!("special duals need t = n, got t = {}", inst.t())));
    }
    if variant.mode() != inst.mode() {
        return Err(Error::Argument(format!("{variant:?} does not apply in {} mode", inst.mode().as_str())));
    }
    let ni = n as i64;
    let q = variant.q(inst.d(), n, inst.f());
    let mut dual = DualSolution::zero(inst);
    match variant {
        SpecialDual::LinkAllGamma => set_gamma(inst, &mut dual, 1, ni),
        SpecialDual::LinkSplit => {
            set_gamma(inst, &mut dual, ni - q as i64 + 1, ni);
            set_delta_tail(inst, &mut dual, q);
        }
        SpecialDual::CrosstalkAllDelta => set_delta_tail(inst, &mut dual, 0),
        SpecialDual::CrosstalkGammaTail => {
            set_gamma(inst, &mut dual, 1, ni);
            set_delta_tail(inst, &mut dual, q);
        }
        SpecialDual::CrosstalkBalanced => {
            set_gamma(inst, &mut dual, (n - q) as i64, ni);
            set_delta_tail(inst, &mut dual, q);
        }
    }
    Ok(dual)
}

/// Closed form of the special dual's union-bound objective.
pub fn special_formula<T: Scalar>(variant: SpecialDual, d: usize, n: usize, f: usize, k: usize) -> T {
    let (di, ni) = (d as i64, n as i64);
    let q = variant.q(d, n, f) as i64;
    let kk = <T as Scalar>::from_usize(k);
    let tail = |e: i64| min(pow::<T>(di, ni) - kk.clone(), kk.clone() * (pow::<T>(di, e) - T::one()));
    match variant {
        SpecialDual::LinkAllGamma => pow::<T>(di, ni - 1) - T::one(),
        SpecialDual::LinkSplit => pow::<T>(di, q - 1) - T::one() + tail(ni - q),
        SpecialDual::CrosstalkAllDelta => pow::<T>(di, ni) - kk.clone(),
        SpecialDual::CrosstalkGammaTail => pow::<T>(di, ni - 1) - T::one() + tail(1),
        SpecialDual::CrosstalkBalanced => pow::<T>(di, q) - T::one() + tail(ni - q),
    }
}

/// Dual objective minus primal objective, after checking both.
pub fn check_weak_duality<T: Scalar>(inst: &LpInstance, primal: &PrimalSolution<T>, dual: &DualSolution<T>) -> Result<T> {
    primal.check(inst)?;
    dual.check(inst)?;
    let gap = dual.objective(inst) - primal.objective();
    if gap < T::zero() {
        return Err(infeasible("weak-duality", format!("gap {gap}")));
    }
    Ok(gap)
}

/// CPLEX LP text for the primal.
pub fn export_lp(inst: &LpInstance) -> String {
    let uw = |&(u, w): &(usize, usize)| format!("x_u{u}_w{w}");
    let uv = |&(u, v): &(usize, usize)| format!("x_u{u}_v{v}");
    let mut s = String::new();
    let _ = writeln!(
        s,
        "\\ blocking LP d={} n={} t={} f={} k={} mode={} a={} B={}",
        inst.d(),
        inst.n(),
        inst.t(),
        inst.f(),
        inst.k(),
        inst.mode().as_str(),
        inst.sets().a(),
        inst.sets().outputs().iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",")
    );
    s.push_str("Maximize\n");
    let all: Vec<String> = inst.uw.iter().map(uw).chain(inst.uv.iter().map(uv)).collect();
    write_row(&mut s, "obj", &all, None);
    s.push_str("Subject To\n");
    let dt = ipow(inst.d(), inst.t());
    let mut by_w: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    let mut by_u_v: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    let mut by_v: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    let mut by_u: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for p in &inst.uw {
        by_w.entry(p.1).or_default().push(uw(p));
        by_u.entry(p.0).or_default().push(uw(p));
    }
    for p in &inst.uv {
        by_u_v.entry(p.0).or_default().push(uv(p));
        by_v.entry(p.1).or_default().push(uv(p));
        by_u.entry(p.0).or_default().push(uv(p));
    }
    for (w, vars) in &by_w {
        write_row(&mut s, &format!("win_w{w}"), vars, Some(dt));
    }
    for (u, vars) in &by_u_v {
        write_row(&mut s, &format!("w0in_u{u}"), vars, Some(1));
    }
    for (v, vars) in &by_v {
        write_row(&mut s, &format!("out_v{v}"), vars, Some(1));
    }
    for (u, vars) in &by_u {
        write_row(&mut s, &format!("fan_u{u}"), vars, Some(inst.f()));
    }
    s.push_str("Bounds\n");
    for p in &inst.uw {
        let _ = writeln!(s, " 0 <= {} <= 1", uw(p));
    }
    s.push_str("End\n");
    s
}

fn write_row(s: &mut String, name: &str, vars: &[String], rhs: Option<usize>) {
    let _ = write!(s, " {name}:");
    if vars.is_empty() {
        s.push_str(" 0");
    }
    for (i, v) in vars.iter().enumerate() {
        if i > 0 && i % 8 == 0 {
            s.push_str("\n   ");
        }
        if i == 0 {
            let _ = write!(s, " {v}");
        } else {
            let _ = write!(s, " + {v}");
        }
    }
    if let Some(r) = rhs {
        let _ = write!(s, " <= {r}");
    }
    s.push('\n');
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateRow<T> {
    pub d: usize,
    pub n: usize,
    pub t: usize,
    pub f: usize,
    pub k: usize,
    pub p: usize,
    pub q: usize,
    pub mode: Mode,
    pub feasible: bool,
    /// Union-bound objective.
    pub objective: T,
    pub cost_formula: T,
}

impl<T: Scalar> CertificateRow<T> {
    pub fn matches(&self) -> bool {
        self.objective == self.cost_formula
    }

    pub fn csv_header() -> &'static str {
        "d,n,t,f,k,p,q,mode,feasible,objective,cost_formula,match"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.d,
            self.n,
            self.t,
            self.f,
            self.k,
            self.p,
            self.q,
            self.mode.as_str(),
            self.feasible,
            self.objective,
            self.cost_formula,
            self.matches()
        )
    }
}

/// Builds and audits every certificate for one (d, n, t, f, mode) point on
/// the canonical instances. For t = n the special duals are used; p then
/// records the branch's p (0 where there is none).
pub fn certify_point<T: Scalar>(d: usize, n: usize, t: usize, f: usize, mode: Mode) -> Result<Vec<CertificateRow<T>>> {
    let kmax = f.min(ipow(d, t));
    let mut rows = Vec::new();
    for k in 1..=kmax {
        let inst = LpInstance::canonical(d, n, t, f, k, mode)?;
        let row = |p: usize, q: usize, dual: &DualSolution<T>, formula: T| CertificateRow {
            d,
            n,
            t,
            f,
            k,
            p,
            q,
            mode,
            feasible: dual.violations(&inst).is_empty(),
            objective: dual.union_bound_objective(&inst, q),
            cost_formula: formula,
        };
        if t == n {
            let variant = SpecialDual::default_for(&inst);
            let dual = dual_special_t_eq_n::<T>(&inst, variant)?;
            let q = variant.q(d, n, f);
            let p = match variant {
                SpecialDual::CrosstalkBalanced => n - q,
                _ => 0,
            };
            rows.push(row(p, q, &dual, special_formula(variant, d, n, f, k)));
            continue;
        }
        for p in 0..=p_max(mode, n as u32, t as u32) as usize {
            for q in (n - t)..=n {
                let dual = dual_family::<T>(&inst, p, q)?;
                let c = cost::<T>(mode, d as u32, n as u32, t as u32, f as u64, k as u64, p as u32, q as u32)?;
                rows.push(row(p, q, &dual, c));
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multilog::MultilogConfig;
    use crate::Rational;
    use num_rational::Ratio;

    type R = Ratio<i64>;

    fn q(x: i64) -> Rational {
        Rational::from_integer(x.into())
    }

    #[test]
    fn t_eq_n_has_no_window_variables() {
        let inst = LpInstance::canonical(2, 4, 4, 1, 1, Mode::LinkBlocking).unwrap();
        assert!(inst.uw_pairs().is_empty());
        assert!(!inst.uv_pairs().is_empty());
        assert!(!export_lp(&inst).contains("_w"));
    }

    #[test]
    fn index_sets_match_brute_force() {
        let inst = LpInstance::canonical(2, 3, 1, 1, 1, Mode::LinkBlocking).unwrap();
        // brute force straight from lcs/lcp on the strings
        let a = DaryString::zeros(2, 3);
        let b = DaryString::zeros(2, 3);
        let (mut uw, mut uv) = (0, 0);
        for u in DaryString::all(2, 3) {
            if u == a {
                continue;
            }
            let i = crate::dary::lcs_digits(&u.digits()[..2], &a.digits()[..2]);
            for v in DaryString::all(2, 3) {
                if v == b {
                    continue;
                }
                let j = crate::dary::lcp_digits(&v.digits()[..2], &b.digits()[..2]);
                if v.digits()[..2] == b.digits()[..2] {
                    uv += usize::from(i + j >= 3);
                } else if v.digits()[2] == 0 {
                    // one representative per window
                    uw += usize::from(i + j >= 3);
                }
            }
        }
        assert_eq!(inst.counts().uw, uw);
        assert_eq!(inst.counts().uv, uv);
    }

    #[test]
    fn crosstalk_sets_contain_link_sets() {
        for t in 0..=4 {
            let l = LpInstance::canonical(2, 4, t, 4, 1, Mode::LinkBlocking).unwrap();
            let c = LpInstance::canonical(2, 4, t, 4, 1, Mode::CrosstalkFree).unwrap();
            assert!(l.uw_pairs().iter().all(|p| c.uw_pairs().contains(p)));
            assert!(l.uv_pairs().iter().all(|p| c.uv_pairs().contains(p)));
        }
    }

    #[test]
    fn family_feasible_and_matches_cost_small_grid() {
        for mode in [Mode::LinkBlocking, Mode::CrosstalkFree] {
            for n in 2..=4 {
                for t in 0..n {
                    for f in [1, 2, 4] {
                        for row in certify_point::<R>(2, n, t, f, mode).unwrap() {
                            assert!(row.feasible && row.matches(), "{}", row.csv_row());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn actual_objective_at_most_union_bound() {
        let inst = LpInstance::canonical(2, 4, 2, 4, 3, Mode::LinkBlocking).unwrap();
        for q in 2..=4 {
            let dual = dual_family::<R>(&inst, 0, q).unwrap();
            assert!(dual.objective(&inst) <= dual.union_bound_objective(&inst, q));
        }
    }

    #[test]
    fn special_split_reproduces_hwang() {
        let inst = LpInstance::canonical(2, 4, 4, 1, 1, Mode::LinkBlocking).unwrap();
        let v = SpecialDual::default_for(&inst);
        assert_eq!(v, SpecialDual::LinkSplit);
        let dual = dual_special_t_eq_n::<Rational>(&inst, v).unwrap();
        dual.check(&inst).unwrap();
        assert_eq!(dual.union_bound_objective(&inst, 3), q(4));
        assert_eq!(crate::bounds::hwang_unicast(2, 4), 5);
    }

    #[test]
    fn special_all_gamma_objective() {
        let inst = LpInstance::canonical(2, 4, 4, 8, 3, Mode::LinkBlocking).unwrap();
        let v = SpecialDual::default_for(&inst);
        assert_eq!(v, SpecialDual::LinkAllGamma);
        let dual = dual_special_t_eq_n::<Rational>(&inst, v).unwrap();
        dual.check(&inst).unwrap();
        assert_eq!(dual.objective(&inst), q(7));
    }

    #[test]
    fn special_rejects_wrong_t() {
        let inst = LpInstance::canonical(2, 4, 3, 1, 1, Mode::LinkBlocking).unwrap();
        assert!(dual_special_t_eq_n::<R>(&inst, SpecialDual::LinkSplit).is_err());
        assert!(dual_family::<R>(&inst, 1, 0).is_err());
    }

    #[test]
    fn corrupted_dual_names_dc1() {
        let inst = LpInstance::canonical(2, 4, 1, 2, 1, Mode::LinkBlocking).unwrap();
        let mut dual = dual_family::<Rational>(&inst, 0, 3).unwrap();
        dual.check(&inst).unwrap();
        let &(u, w) = inst.uw_pairs().first().unwrap();
        dual.alpha[w] = q(0);
        dual.beta.remove(&(u, w));
        dual.eps[u] = q(0);
        match dual.check(&inst).unwrap_err() {
            Error::Infeasible { constraint, index } => {
                assert_eq!(constraint, "DC-1");
                assert_eq!(index, format!("u={u},w={w}"));
            }
            e => panic!("{e}"),
        }
        let zero = PrimalSolution::<Rational>::default();
        assert!(check_weak_duality(&inst, &zero, &dual).is_err());
    }

    #[test]
    fn zero_primal_gap_is_dual_objective() {
        let inst = LpInstance::canonical(2, 3, 1, 2, 2, Mode::CrosstalkFree).unwrap();
        let dual = dual_family::<Rational>(&inst, 1, 3).unwrap();
        let gap = check_weak_duality(&inst, &PrimalSolution::default(), &dual).unwrap();
        assert_eq!(gap, dual.objective(&inst));
    }

    #[test]
    fn empty_state_gives_zero_primal() {
        let cfg = MultilogConfig::new(2, 3, 2, 1, 2, Mode::LinkBlocking).unwrap();
        let conn = ConnState::new(cfg);
        let inst = LpInstance::canonical(2, 3, 1, 2, 1, Mode::LinkBlocking).unwrap();
        let p = primal_from_state::<Rational>(&conn, &inst).unwrap();
        assert_eq!(p.objective(), q(0));
    }

    #[test]
    fn three_blocking_planes() {
        // a = 0000, B = {0000}; each placed route meets i(u) + j(v) >= 4.
        let cfg = MultilogConfig::new(2, 4, 4, 0, 1, Mode::LinkBlocking).unwrap();
        let mut conn = ConnState::new(cfg);
        let s = |x: &str| DaryString::parse(2, x).unwrap().index();
        conn.place(1, s("0001"), &[s("0100")], 1).unwrap();
        conn.place(2, s("1000"), &[s("0010")], 2).unwrap();
        conn.place(3, s("1001"), &[s("0011")], 3).unwrap();
        conn.place(4, s("1111"), &[s("1111")], 4).unwrap();
        conn.audit().unwrap();
        let blocking = conn.blocking_planes(0, &[0]);
        assert_eq!(blocking.into_iter().collect::<Vec<_>>(), [1, 2, 3]);
        let inst = LpInstance::canonical(2, 4, 0, 1, 1, Mode::LinkBlocking).unwrap();
        let p = primal_from_state::<Rational>(&conn, &inst).unwrap();
        p.check(&inst).unwrap();
        assert_eq!(p.objective(), q(3));
        for pp in 0..=3 {
            for qq in 4..=4 {
                let dual = dual_family::<Rational>(&inst, pp, qq).unwrap();
                assert!(check_weak_duality(&inst, &p, &dual).unwrap() >= q(0));
            }
        }
    }

    #[test]
    fn primal_optimum_is_realizable() {
        for mode in [Mode::LinkBlocking, Mode::CrosstalkFree] {
            for (t, f, k) in [(0, 1, 1), (1, 2, 2), (2, 4, 3), (4, 2, 2), (3, 16, 8)] {
                let inst = LpInstance::canonical(2, 4, t, f, k, mode).unwrap();
                let opt = primal_optimum::<Rational>(&inst);
                opt.check(&inst).unwrap();
                let units = opt.objective().to_integer().try_into().unwrap();
                let cfg = MultilogConfig::new(2, 4, units + 1, t, f, mode).unwrap();
                let mut conn = ConnState::new(cfg);
                assert_eq!(realize_primal(&inst, &opt, &mut conn).unwrap(), units);
                conn.audit().unwrap();
                let b: Vec<usize> = (0..k).collect();
                assert_eq!(conn.blocking_planes(0, &b).len(), units, "t={t} f={f} k={k} {mode:?}");
                assert_eq!(primal_from_state::<Rational>(&conn, &inst).unwrap().objective(), opt.objective());
            }
        }
    }

    #[test]
    fn lp_text_shape() {
        let inst = LpInstance::canonical(2, 3, 1, 2, 1, Mode::LinkBlocking).unwrap();
        let lp = export_lp(&inst);
        assert!(lp.contains("Maximize\n") && lp.contains("Subject To\n") && lp.contains("Bounds\n"));
        assert!(lp.ends_with("End\n"));
        assert_eq!(lp, export_lp(&inst));
    }
}

//! Dynamic weighted edge coloring.
//!
//! Edges arrive and depart on a fixed base graph; every vertex may carry at
//! most weight 1 per color. Weights are split into types by descending
//! breakpoints (type 0 is (1/2, 1]); type i is served from color classes
//! C_i, C_{i+1}, ... whose sizes track the running maxima of the maximum
//! vertex weight and of the heavy-edge degree.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct DwecScheme<T> {
    breakpoints: Vec<T>,
    x: Vec<T>,
}

fn check_breakpoints<T: Scalar>(bps: &[T]) -> Result<()> {
    if bps.first() != Some(&T::ratio(1, 2)) {
        return Err(Error::Argument("the first breakpoint must be 1/2".into()));
    }
    for w in bps.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::Argument("breakpoints must be strictly descending".into()));
        }
    }
    if bps.iter().any(|b| *b <= T::zero()) {
        return Err(Error::Argument("breakpoints must lie in (0, 1)".into()));
    }
    Ok(())
}

impl<T: Scalar> DwecScheme<T> {
    /// A scheme with explicit constants, rejected unless x satisfies the
    /// blocking LP of its breakpoints.
    pub fn new(breakpoints: Vec<T>, x: Vec<T>) -> Result<Self> {
        check_breakpoints(&breakpoints)?;
        if x.len() != breakpoints.len() + 1 {
            return Err(Error::Argument(format!(
                "{} breakpoints need {} constants, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                x.len()
            )));
        }
        let two = T::from_int(2);
        if x.iter().any(|v| *v < T::zero()) {
            return Err(Error::InfeasibleScheme("negative constant".into()));
        }
        for (i, row) in blocking_rows(&breakpoints)?.iter().enumerate() {
            let lhs = dot(row, &x);
            if lhs < two {
                return Err(Error::InfeasibleScheme(format!("row {i}: {lhs} < 2")));
            }
        }
        Ok(Self { breakpoints, x })
    }

    pub fn four_type() -> Self {
        let r = |p, q| T::ratio(p, q);
        Self::new(
            vec![r(1, 2), r(2, 5), r(1, 3)],
            vec![r(2, 1), r(3, 8), r(3, 10), r(3, 1)],
        )
        .expect("4-type constants are feasible")
    }

    /// Breakpoints 1/2, 2/5, 1/3, 11/43 with LP-optimal constants.
    pub fn five_type() -> Self {
        let r = |p, q| T::ratio(p, q);
        Self::from_breakpoints(vec![r(1, 2), r(2, 5), r(1, 3), r(11, 43)]).expect("5-type LP is feasible")
    }

    pub fn from_breakpoints(breakpoints: Vec<T>) -> Result<Self> {
        let d = derive_constants(&breakpoints)?;
        Self::new(breakpoints, d.x)
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn num_types(&self) -> usize {
        self.x.len()
    }

    pub fn ratio(&self) -> T {
        self.x.iter().fold(T::zero(), |s, v| s + v.clone())
    }

    /// (lower, upper] of type i.
    pub fn interval(&self, i: usize) -> (T, T) {
        interval(&self.breakpoints, i)
    }

    pub fn classify(&self, w: &T) -> Result<usize> {
        if *w <= T::zero() || *w > T::one() {
            return Err(Error::Argument(format!("weight {w} outside (0, 1]")));
        }
        Ok(self.breakpoints.iter().take_while(|b| *w <= **b).count())
    }

    /// ⌈x_0 Δ̄⌉ for class 0, ⌈x_i W̄⌉ otherwise.
    pub fn class_size(&self, i: usize, wbar: &T, dbar: usize) -> usize {
        let v = if i == 0 {
            self.x[0].clone() * <T as Scalar>::from_usize(dbar)
        } else {
            self.x[i].clone() * wbar.clone()
        };
        v.ceil_i64().max(0) as usize
    }
}

fn interval<T: Scalar>(bps: &[T], i: usize) -> (T, T) {
    let upper = if i == 0 { T::one() } else { bps[i - 1].clone() };
    let lower = bps.get(i).cloned().unwrap_or_else(T::zero);
    (lower, upper)
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (x, y)| s + x.clone() * y.clone())
}

/// Least blocked weight a class-j color must carry to turn away a type-i
/// edge: the minimum over multisets of weights from types 1..=j that can
/// share a color (Σ lower < 1) yet exceed 1 - U_i (Σ upper > 1 - U_i) of
/// max(Σ lower, 1 - U_i).
pub fn beta<T: Scalar>(bps: &[T], i: usize, j: usize) -> Option<T> {
    let need = T::one() - interval(bps, i).1;
    let types: Vec<(T, T)> = (1..=j).map(|t| interval(bps, t)).collect();
    let umin = types.iter().map(|t| t.1.clone()).fold(T::one(), crate::scalar::min);
    let size = (need.clone() / umin).ceil_i64().max(0) as usize + 1;
    let mut best: Option<T> = None;
    let mut pick = Vec::new();
    multisets(types.len(), size, 0, &mut pick, &mut |ms: &[usize]| {
        if ms.is_empty() {
            return;
        }
        let su = ms.iter().fold(T::zero(), |s, &t| s + types[t].1.clone());
        let sl = ms.iter().fold(T::zero(), |s, &t| s + types[t].0.clone());
        if su > need && sl < T::one() {
            let v = crate::scalar::max(sl, need.clone());
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v);
            }
        }
    });
    best
}

fn multisets(kinds: usize, left: usize, from: usize, pick: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    visit(pick);
    if left == 0 {
        return;
    }
    for t in from..kinds {
        pick.push(t);
        multisets(kinds, left - 1, t, pick, visit);
        pick.pop();
    }
}

/// Row 0 is x_0 >= 2; row i >= 1 holds β_ij for j >= i.
pub fn blocking_rows<T: Scalar>(bps: &[T]) -> Result<Vec<Vec<T>>> {
    check_breakpoints(bps)?;
    let k = bps.len();
    let mut rows = Vec::with_capacity(k + 1);
    let mut first = vec![T::zero(); k + 1];
    first[0] = T::one();
    rows.push(first);
    for i in 1..=k {
        let mut row = vec![T::zero(); k + 1];
        for (j, slot) in row.iter_mut().enumerate().skip(i) {
            *slot = beta(bps, i, j).ok_or_else(|| Error::InfeasibleScheme(format!("class {j} can never block type {i}")))?;
        }
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Derived<T> {
    pub x: Vec<T>,
    pub objective: T,
    pub rows: Vec<Vec<T>>,
}

/// Solve min Σx subject to the blocking rows (each >= 2) and x >= 0, exactly,
/// by enumerating basic solutions.
pub fn derive_constants<T: Scalar>(bps: &[T]) -> Result<Derived<T>> {
    let rows = blocking_rows(bps)?;
    let n = rows.len();
    let two = T::from_int(2);
    let mut cons: Vec<(Vec<T>, T)> = rows.iter().map(|r| (r.clone(), two.clone())).collect();
    for a in 0..n {
        let mut e = vec![T::zero(); n];
        e[a] = T::one();
        cons.push((e, T::zero()));
    }
    let mut best: Option<(T, Vec<T>)> = None;
    let mut sel = Vec::with_capacity(n);
    choose(cons.len(), n, 0, &mut sel, &mut |sel: &[usize]| {
        let Some(x) = solve_square(sel.iter().map(|&s| cons[s].clone()).collect()) else {
            return;
        };
        if cons.iter().all(|(r, b)| dot(r, &x) >= *b) {
            let s = x.iter().fold(T::zero(), |a, v| a + v.clone());
            if best.as_ref().is_none_or(|(b, _)| s < *b) {
                best = Some((s, x));
            }
        }
    });
    let (objective, x) = best.ok_or_else(|| Error::InfeasibleScheme("LP has no basic feasible solution".into()))?;
    Ok(Derived { x, objective, rows })
}

fn choose(total: usize, k: usize, from: usize, sel: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if sel.len() == k {
        visit(sel);
        return;
    }
    for i in from..total {
        sel.push(i);
        choose(total, k, i + 1, sel, visit);
        sel.pop();
    }
}

fn solve_square<T: Scalar>(mut m: Vec<(Vec<T>, T)>) -> Option<Vec<T>> {
    let n = m.len();
    for c in 0..n {
        let p = (c..n).find(|&r| m[r].0[c] != T::zero())?;
        m.swap(c, p);
        let (prow, pb) = m[c].clone();
        for (r, (row, b)) in m.iter_mut().enumerate() {
            if r == c || row[c] == T::zero() {
                continue;
            }
            let fct = row[c].clone() / prow[c].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                *x = x.clone() - fct.clone() * y.clone();
            }
            *b = b.clone() - fct * pb.clone();
        }
    }
    Some(m.into_iter().enumerate().map(|(i, (row, b))| b / row[i].clone()).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge<T> {
    pub u: usize,
    pub v: usize,
    pub w: T,
    pub ty: usize,
    /// 1-based color.
    pub color: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Event<T> {
    Arrive { id: u64, u: usize, v: usize, w: T },
    Depart { id: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    /// `slot` is the 0-based position of `color` inside its class list.
    Colored { id: u64, color: usize, class: usize, slot: usize },
    Departed { id: u64 },
}

#[derive(Clone, Debug)]
pub struct ColoringState<T> {
    scheme: DwecScheme<T>,
    vertices: usize,
    edges: BTreeMap<u64, Edge<T>>,
    classes: Vec<Vec<usize>>,
    // color - 1 -> (class, slot)
    color_home: Vec<(usize, usize)>,
    used: Vec<bool>,
    // load[v][color - 1]
    load: Vec<Vec<T>>,
    incident: Vec<T>,
    heavy: Vec<usize>,
    wbar: T,
    dbar: usize,
    time: usize,
}

impl<T: Scalar> ColoringState<T> {
    pub fn new(scheme: DwecScheme<T>, vertices: usize) -> Self {
        let k = scheme.num_types();
        Self {
            scheme,
            vertices,
            edges: BTreeMap::new(),
            classes: vec![Vec::new(); k],
            color_home: Vec::new(),
            used: Vec::new(),
            load: vec![Vec::new(); vertices],
            incident: vec![T::zero(); vertices],
            heavy: vec![0; vertices],
            wbar: T::zero(),
            dbar: 0,
            time: 0,
        }
    }

    pub fn scheme(&self) -> &DwecScheme<T> {
        &self.scheme
    }
    pub fn vertices(&self) -> usize {
        self.vertices
    }
    pub fn wbar(&self) -> &T {
        &self.wbar
    }
    pub fn dbar(&self) -> usize {
        self.dbar
    }
    pub fn time(&self) -> usize {
        self.time
    }
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }
    pub fn edges(&self) -> &BTreeMap<u64, Edge<T>> {
        &self.edges
    }

    /// Colors allocated across all classes.
    pub fn colors_allocated(&self) -> usize {
        self.color_home.len()
    }

    /// Colors that have carried at least one edge so far.
    pub fn colors_used(&self) -> usize {
        self.used.iter().filter(|&&u| u).count()
    }

    /// Whether each allocated color (1-based index - 1) has carried an edge.
    pub fn used_mask(&self) -> &[bool] {
        &self.used
    }

    pub fn opt_lower(&self) -> usize {
        (self.wbar.ceil_i64().max(0) as usize).max(self.dbar)
    }

    pub fn live_edges(&self) -> Vec<(usize, usize, T)> {
        self.edges.values().map(|e| (e.u, e.v, e.w.clone())).collect()
    }

    pub fn color_load(&self, v: usize, color: usize) -> T {
        self.load[v].get(color - 1).cloned().unwrap_or_else(T::zero)
    }

    fn grow(&mut self) {
        for i in 0..self.classes.len() {
            let want = self.scheme.class_size(i, &self.wbar, self.dbar);
            while self.classes[i].len() < want {
                let color = self.color_home.len() + 1;
                self.color_home.push((i, self.classes[i].len()));
                self.classes[i].push(color);
                self.used.push(false);
                for l in &mut self.load {
                    l.push(T::zero());
                }
            }
        }
    }

    fn fits(&self, u: usize, v: usize, w: &T, color: usize) -> bool {
        let c = color - 1;
        self.load[u][c].clone() + w.clone() <= T::one() && self.load[v][c].clone() + w.clone() <= T::one()
    }

    pub fn step(&mut self, ev: Event<T>) -> Result<StepOutcome> {
        match ev {
            Event::Arrive { id, u, v, w } => self.arrive(id, u, v, w),
            Event::Depart { id } => self.depart(id),
        }
    }

    pub fn arrive(&mut self, id: u64, u: usize, v: usize, w: T) -> Result<StepOutcome> {
        if u >= self.vertices || v >= self.vertices || u == v {
            return Err(Error::Argument(format!("bad endpoints ({u}, {v})")));
        }
        if self.edges.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        let ty = self.scheme.classify(&w)?;
        let heavy = w > T::ratio(1, 2);
        for x in [u, v] {
            self.incident[x] = self.incident[x].clone() + w.clone();
            if self.incident[x] > self.wbar {
                self.wbar = self.incident[x].clone();
            }
            if heavy {
                self.heavy[x] += 1;
                self.dbar = self.dbar.max(self.heavy[x]);
            }
        }
        self.grow();
        self.time += 1;
        let found = self.classes[ty..]
            .iter()
            .flatten()
            .copied()
            .find(|&c| self.fits(u, v, &w, c));
        let Some(color) = found else {
            return Err(Error::ColoringFailure(id));
        };
        let c = color - 1;
        for x in [u, v] {
            self.load[x][c] = self.load[x][c].clone() + w.clone();
        }
        self.used[c] = true;
        let (class, slot) = self.color_home[c];
        self.edges.insert(id, Edge { u, v, w, ty, color });
        Ok(StepOutcome::Colored { id, color, class, slot })
    }

    pub fn depart(&mut self, id: u64) -> Result<StepOutcome> {
        let e = self.edges.remove(&id).ok_or(Error::UnknownId(id))?;
        let c = e.color - 1;
        for x in [e.u, e.v] {
            self.load[x][c] = self.load[x][c].clone() - e.w.clone();
            self.incident[x] = self.incident[x].clone() - e.w.clone();
            if e.w > T::ratio(1, 2) {
                self.heavy[x] -= 1;
            }
        }
        self.time += 1;
        Ok(StepOutcome::Departed { id })
    }

    /// Recomputes loads and checks class sizes, disjointness and the
    /// per-vertex per-color cap.
    pub fn audit(&self) -> std::result::Result<(), String> {
        for (i, c) in self.classes.iter().enumerate() {
            let want = self.scheme.class_size(i, &self.wbar, self.dbar);
            if c.len() != want {
                return Err(format!("class {i} has {} colors, expected {want}", c.len()));
            }
        }
        let mut seen = vec![false; self.color_home.len()];
        for c in self.classes.iter().flatten() {
            if std::mem::replace(&mut seen[c - 1], true) {
                return Err(format!("color {c} in two classes"));
            }
        }
        let ncol = self.color_home.len();
        let mut load = vec![vec![T::zero(); ncol]; self.vertices];
        for (id, e) in &self.edges {
            let (class, _) = self.color_home[e.color - 1];
            if class < e.ty {
                return Err(format!("edge {id} of type {} sits in class {class}", e.ty));
            }
            for x in [e.u, e.v] {
                load[x][e.color - 1] = load[x][e.color - 1].clone() + e.w.clone();
            }
        }
        for (v, row) in load.iter().enumerate() {
            for (c, l) in row.iter().enumerate() {
                if *l > T::one() {
                    return Err(format!("vertex {v} carries {l} on color {}", c + 1));
                }
                if *l != self.load[v][c] {
                    return Err(format!("stale load at vertex {v}, color {}", c + 1));
                }
            }
        }
        Ok(())
    }

    pub fn csv_header() -> &'static str {
        "t,colors_used,opt_lower,W_bar,Delta_bar"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.time,
            self.colors_used(),
            self.opt_lower(),
            self.wbar,
            self.dbar
        )
    }
}

/// Largest edge count opt_exact accepts.
pub const OPT_EXACT_LIMIT: usize = 12;

/// Minimum number of colors keeping every vertex's same-color weight <= 1.
pub fn opt_exact<T: Scalar>(edges: &[(usize, usize, T)]) -> Result<usize> {
    if edges.len() > OPT_EXACT_LIMIT {
        return Err(Error::SizeLimit(edges.len()));
    }
    if edges.is_empty() {
        return Ok(0);
    }
    let mut es: Vec<_> = edges.to_vec();
    es.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap_or(std::cmp::Ordering::Equal));
    let nv = es.iter().map(|e| e.0.max(e.1)).max().unwrap_or(0) + 1;
    let mut incident = vec![T::zero(); nv];
    let mut heavy = vec![0usize; nv];
    for (u, v, w) in &es {
        for x in [*u, *v] {
            incident[x] = incident[x].clone() + w.clone();
            heavy[x] += usize::from(*w > T::ratio(1, 2));
        }
    }
    let lb = incident
        .iter()
        .map(|w| w.ceil_i64().max(0) as usize)
        .chain(heavy.iter().copied())
        .max()
        .unwrap_or(1)
        .max(1);
    for k in lb..=es.len() {
        let mut load = vec![vec![T::zero(); k]; nv];
        if assign(&es, 0, k, 0, &mut load) {
            return Ok(k);
        }
    }
    Ok(es.len())
}

fn assign<T: Scalar>(es: &[(usize, usize, T)], i: usize, k: usize, opened: usize, load: &mut [Vec<T>]) -> bool {
    let Some((u, v, w)) = es.get(i) else {
        return true;
    };
    // colors beyond the first unopened one are interchangeable
    for c in 0..k.min(opened + 1) {
        let lu = load[*u][c].clone() + w.clone();
        let lv = load[*v][c].clone() + w.clone();
        if lu > T::one() || lv > T::one() {
            continue;
        }
        load[*u][c] = lu;
        load[*v][c] = lv;
        if assign(es, i + 1, k, opened.max(c + 1), load) {
            return true;
        }
        load[*u][c] = load[*u][c].clone() - w.clone();
        load[*v][c] = load[*v][c].clone() - w.clone();
    }
    false
}

/// opt_exact with a cache keyed on the sorted edge multiset.
#[derive(Default)]
pub struct OptCache<T> {
    map: HashMap<Vec<(usize, usize, String)>, usize>,
    _t: std::marker::PhantomData<T>,
}

impl<T: Scalar> OptCache<T> {
    pub fn new() -> Self {
        Self {
            map: HashMap::new(),
            _t: std::marker::PhantomData,
        }
    }

    pub fn get(&mut self, edges: &[(usize, usize, T)]) -> Result<usize> {
        let mut key: Vec<_> = edges.iter().map(|(u, v, w)| ((*u).min(*v), (*u).max(*v), w.to_string())).collect();
        key.sort();
        if let Some(&v) = self.map.get(&key) {
            return Ok(v);
        }
        let v = opt_exact(edges)?;
        self.map.insert(key, v);
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_rational::Ratio;

    type R = Ratio<i64>;

    fn r(p: i64, q: i64) -> R {
        R::new(p, q)
    }

    #[test]
    fn classify_intervals() {
        let s4 = DwecScheme::<R>::four_type();
        let s5 = DwecScheme::<R>::five_type();
        assert_eq!(s4.classify(&r(3, 5)).unwrap(), 0);
        assert_eq!(s4.classify(&r(1, 2)).unwrap(), 1);
        assert_eq!(s4.classify(&r(2, 5)).unwrap(), 2);
        assert_eq!(s4.classify(&r(3, 10)).unwrap(), 3);
        assert_eq!(s5.classify(&r(3, 10)).unwrap(), 3);
        assert_eq!(s5.classify(&r(1, 4)).unwrap(), 4);
        assert!(s4.classify(&r(0, 1)).is_err());
        assert!(s4.classify(&r(11, 10)).is_err());
    }

    #[test]
    fn four_type_rows_and_objective() {
        let d = derive_constants(&[r(1, 2), r(2, 5), r(1, 3)]).unwrap();
        assert_eq!(d.rows[1], vec![r(0, 1), r(4, 5), r(2, 3), r(1, 2)]);
        assert_eq!(d.rows[2], vec![r(0, 1), r(0, 1), r(2, 3), r(3, 5)]);
        assert_eq!(d.rows[3], vec![r(0, 1), r(0, 1), r(0, 1), r(2, 3)]);
        assert_eq!(d.x, vec![r(2, 1), r(3, 8), r(3, 10), r(3, 1)]);
        assert_eq!(d.objective, r(227, 40));
    }

    #[test]
    fn two_type_objective_six() {
        let d = derive_constants(&[r(1, 2)]).unwrap();
        assert_eq!(d.rows[1], vec![r(0, 1), r(1, 2)]);
        assert_eq!(d.objective, r(6, 1));
    }

    #[test]
    fn five_type_derived() {
        let d = derive_constants::<Rational>(&[
            Rational::ratio(1, 2),
            Rational::ratio(2, 5),
            Rational::ratio(1, 3),
            Rational::ratio(11, 43),
        ])
        .unwrap();
        assert_eq!(d.objective, Rational::ratio(156051, 27520));
        assert!(d.objective < Rational::ratio(227, 40));
    }

    #[test]
    fn infeasible_constants_rejected() {
        let e = DwecScheme::new(vec![r(1, 2), r(2, 5), r(1, 3)], vec![r(2, 1), r(3, 8), r(3, 10), r(2, 1)]);
        assert!(matches!(e, Err(Error::InfeasibleScheme(_))));
    }

    #[test]
    fn first_heavy_edge() {
        let mut st = ColoringState::new(DwecScheme::<R>::four_type(), 2);
        let out = st.arrive(1, 0, 1, r(1, 1)).unwrap();
        assert_eq!(st.dbar(), 1);
        assert_eq!(st.classes()[0].len(), 2);
        assert_eq!(out, StepOutcome::Colored { id: 1, color: 1, class: 0, slot: 0 });
        st.audit().unwrap();
    }

    #[test]
    fn halves_share_a_color() {
        let mut st = ColoringState::new(DwecScheme::<R>::four_type(), 2);
        let a = st.arrive(1, 0, 1, r(1, 2)).unwrap();
        let b = st.arrive(2, 0, 1, r(1, 2)).unwrap();
        let color = |o: StepOutcome| match o {
            StepOutcome::Colored { color, .. } => color,
            _ => unreachable!(),
        };
        assert_eq!(color(a), color(b));
        st.audit().unwrap();
    }

    #[test]
    fn running_maxima_do_not_drop() {
        let mut st = ColoringState::new(DwecScheme::<R>::four_type(), 3);
        st.arrive(1, 0, 1, r(3, 5)).unwrap();
        st.arrive(2, 0, 2, r(3, 5)).unwrap();
        let before = st.colors_allocated();
        st.depart(1).unwrap();
        st.depart(2).unwrap();
        assert_eq!(st.dbar(), 2);
        assert_eq!(*st.wbar(), r(6, 5));
        assert_eq!(st.colors_allocated(), before);
        assert_eq!(st.depart(2).unwrap_err(), Error::UnknownId(2));
        st.audit().unwrap();
    }

    #[test]
    fn opt_lower_examples() {
        let mut st = ColoringState::new(DwecScheme::<R>::four_type(), 4);
        assert_eq!(st.opt_lower(), 0);
        st.arrive(1, 0, 1, r(1, 2)).unwrap();
        st.arrive(2, 0, 2, r(1, 2)).unwrap();
        st.arrive(3, 0, 3, r(1, 2)).unwrap();
        assert!(st.opt_lower() >= 2);
        let mut st = ColoringState::new(DwecScheme::<R>::four_type(), 4);
        for (i, v) in [1, 2, 3].into_iter().enumerate() {
            st.arrive(i as u64, 0, v, r(3, 5)).unwrap();
        }
        assert_eq!(st.dbar(), 3);
        assert!(st.opt_lower() >= 3);
    }

    #[test]
    fn opt_exact_examples() {
        assert_eq!(opt_exact::<R>(&[]).unwrap(), 0);
        assert_eq!(opt_exact(&[(0, 1, r(1, 1))]).unwrap(), 1);
        assert_eq!(opt_exact(&[(0, 1, r(3, 5)), (0, 1, r(3, 5))]).unwrap(), 2);
        for n in 1..=6 {
            let es = vec![(0, 1, r(1, n)); n as usize];
            assert_eq!(opt_exact(&es).unwrap(), 1);
        }
        // a triangle of 3/5 edges needs 3 colors
        assert_eq!(opt_exact(&[(0, 1, r(3, 5)), (1, 2, r(3, 5)), (0, 2, r(3, 5))]).unwrap(), 3);
        assert_eq!(opt_exact(&vec![(0, 1, r(1, 2)); 13]).unwrap_err(), Error::SizeLimit(13));
    }

    #[test]
    fn colors_used_within_allocation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let mut st = ColoringState::new(DwecScheme::<R>::four_type(), 5);
        let mut live = Vec::new();
        for id in 0..2000u64 {
            if rng.gen_bool(0.45) && !live.is_empty() {
                let k = rng.gen_range(0..live.len());
                st.depart(live.swap_remove(k)).unwrap();
            } else {
                let u = rng.gen_range(0..5);
                let v = (u + rng.gen_range(1..5)) % 5;
                st.arrive(id, u, v, r(rng.gen_range(1..=20), 20)).unwrap();
                live.push(id);
            }
            assert!(st.colors_used() <= st.colors_allocated());
        }
        st.audit().unwrap();
    }
}

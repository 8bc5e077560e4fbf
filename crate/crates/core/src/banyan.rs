//! Routes in one BY⁻¹(n) plane and the pairwise sharing predicates.

use std::fmt;

use crate::dary::{ipow, lcp_digits, lcs_digits, DaryString};
use crate::error::{Error, Result};

/// A switching element: its stage (1-based) and its (n-1)-digit label.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SeLabel {
    pub stage: usize,
    pub label: Vec<u8>,
}

impl SeLabel {
    pub fn label_string(&self) -> String {
        self.label
            .iter()
            .map(|&x| char::from_digit(x as u32, 36).unwrap())
            .collect()
    }
}

/// Canonical link keys. `Internal` is the link leaving stage `stage`
/// from SE `se` through output port `port`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum LinkId {
    Input(DaryString),
    Internal { stage: usize, se: Vec<u8>, port: u8 },
    Output(DaryString),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Route {
    pub input: DaryString,
    pub output: DaryString,
    pub ses: Vec<SeLabel>,
    pub links: Vec<LinkId>,
}

impl Route {
    pub fn internal_links(&self) -> &[LinkId] {
        &self.links[1..self.links.len() - 1]
    }

    /// One line per stage: `stage=<s> se=<label>`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for se in &self.ses {
            out.push_str(&format!("stage={} se={}\n", se.stage, se.label_string()));
        }
        out
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

fn check_pair(x: &DaryString, y: &DaryString) -> Result<()> {
    if x.base() != y.base() || x.len() != y.len() {
        return Err(Error::Argument(format!("{x} and {y} differ in shape")));
    }
    if x.len() < 2 {
        return Err(Error::Argument("a BY⁻¹(n) plane needs n >= 2".into()));
    }
    Ok(())
}

/// Stage-s label: y_1..y_{s-1} x_s..x_{n-1}.
fn stage_label(x: &[u8], y: &[u8], s: usize) -> Vec<u8> {
    let n = x.len();
    let mut label = Vec::with_capacity(n - 1);
    label.extend_from_slice(&y[..s - 1]);
    label.extend_from_slice(&x[s - 1..n - 1]);
    label
}

pub fn route(x: &DaryString, y: &DaryString) -> Result<Route> {
    check_pair(x, y)?;
    let n = x.len();
    let (xd, yd) = (x.digits(), y.digits());
    let ses: Vec<SeLabel> = (1..=n)
        .map(|s| SeLabel {
            stage: s,
            label: stage_label(xd, yd, s),
        })
        .collect();
    let mut links = Vec::with_capacity(n + 1);
    links.push(LinkId::Input(x.clone()));
    for s in 1..n {
        links.push(LinkId::Internal {
            stage: s,
            se: ses[s - 1].label.clone(),
            port: yd[s - 1],
        });
    }
    links.push(LinkId::Output(y.clone()));
    Ok(Route {
        input: x.clone(),
        output: y.clone(),
        ses,
        links,
    })
}

fn overlap(a: &DaryString, b: &DaryString, u: &DaryString, v: &DaryString) -> Result<usize> {
    check_pair(a, b)?;
    check_pair(u, v)?;
    check_pair(a, u)?;
    let n = a.len();
    Ok(lcs_digits(&a.digits()[..n - 1], &u.digits()[..n - 1])
        + lcp_digits(&b.digits()[..n - 1], &v.digits()[..n - 1]))
}

/// Do R(a,b) and R(u,v) pass through a common SE?
pub fn shares_se(a: &DaryString, b: &DaryString, u: &DaryString, v: &DaryString) -> Result<bool> {
    Ok(overlap(a, b, u, v)? + 1 >= a.len())
}

/// Do R(a,b) and R(u,v) use a common inter-stage link?
pub fn shares_link(a: &DaryString, b: &DaryString, u: &DaryString, v: &DaryString) -> Result<bool> {
    Ok(overlap(a, b, u, v)? >= a.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Intersection {
    None,
    Single(usize),
    /// Stages `first..=last` are all shared.
    Multiple { first: usize, last: usize },
}

pub fn intersection_stage(
    a: &DaryString,
    b: &DaryString,
    u: &DaryString,
    v: &DaryString,
) -> Result<Intersection> {
    let total = overlap(a, b, u, v)?;
    let n = a.len();
    if total + 1 < n {
        return Ok(Intersection::None);
    }
    let p = lcp_digits(&b.digits()[..n - 1], &v.digits()[..n - 1]);
    let s = lcs_digits(&a.digits()[..n - 1], &u.digits()[..n - 1]);
    let first = (n - s).max(1);
    let last = (p + 1).min(n);
    Ok(if first == last {
        Intersection::Single(first)
    } else {
        Intersection::Multiple { first, last }
    })
}

/// Dense numbering of SEs and links for one plane, used by the simulator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Topology {
    pub d: usize,
    pub n: usize,
}

impl Topology {
    pub fn new(d: usize, n: usize) -> Self {
        assert!(d >= 2 && n >= 2);
        Self { d, n }
    }

    pub fn ports(&self) -> usize {
        ipow(self.d, self.n)
    }

    pub fn num_ses(&self) -> usize {
        self.n * ipow(self.d, self.n - 1)
    }

    pub fn num_links(&self) -> usize {
        (self.n + 1) * self.ports()
    }

    fn label_index(&self, x: &[u8], y: &[u8], s: usize) -> usize {
        let mut idx = 0;
        for &z in y[..s - 1].iter().chain(&x[s - 1..self.n - 1]) {
            idx = idx * self.d + z as usize;
        }
        idx
    }

    /// Dense SE ids of R(x, y), stage order.
    pub fn se_ids(&self, x: &[u8], y: &[u8], out: &mut Vec<usize>) {
        let per = ipow(self.d, self.n - 1);
        for s in 1..=self.n {
            out.push((s - 1) * per + self.label_index(x, y, s));
        }
    }

    /// Dense link ids of R(x, y): input stub, n-1 internal links, output stub.
    pub fn link_ids(&self, x: &[u8], y: &[u8], out: &mut Vec<usize>) {
        let big = self.ports();
        let idx = |v: &[u8]| v.iter().fold(0, |acc, &z| acc * self.d + z as usize);
        out.push(idx(x));
        for s in 1..self.n {
            let se = self.label_index(x, y, s);
            out.push(big * s + se * self.d + y[s - 1] as usize);
        }
        out.push(big * self.n + idx(y));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeSet, HashMap, VecDeque};

    fn s(d: u8, x: &str) -> DaryString {
        DaryString::parse(d, x).unwrap()
    }

    #[test]
    fn worked_route() {
        let r = route(&s(2, "01001"), &s(2, "10101")).unwrap();
        let labels: Vec<_> = r.ses.iter().map(|se| se.label_string()).collect();
        // The stage-3 entry follows y_1 y_2 x_3 x_4; "1010" there would not be
        // adjacent to the stage-2 SE 1100.
        assert_eq!(labels, ["0100", "1100", "1000", "1010", "1010"]);
        assert_eq!(r.links.len(), 6);
        assert!(r.dump().starts_with("stage=1 se=0100\nstage=2 se=1100\n"));
    }

    #[test]
    fn identity_route_is_all_zero() {
        let z = DaryString::zeros(3, 4);
        let r = route(&z, &z).unwrap();
        assert!(r.ses.iter().all(|se| se.label.iter().all(|&x| x == 0)));
    }

    #[test]
    fn adjacent_stages_differ_in_one_position() {
        let r = route(&s(3, "0121"), &s(3, "2200")).unwrap();
        for w in r.ses.windows(2) {
            let diff: Vec<_> = (0..3).filter(|&i| w[0].label[i] != w[1].label[i]).collect();
            assert!(diff.is_empty() || diff == vec![w[0].stage - 1]);
        }
    }

    // Explicit BY⁻¹(n) graph from the stage-connection rule, searched breadth-first.
    fn bfs_route(d: u8, n: usize, x: &DaryString, y: &DaryString) -> Vec<Vec<u8>> {
        let start = (1usize, x.digits()[..n - 1].to_vec());
        let goal = (n, y.digits()[..n - 1].to_vec());
        let mut prev: HashMap<(usize, Vec<u8>), (usize, Vec<u8>)> = HashMap::new();
        let mut queue = VecDeque::from([start.clone()]);
        let mut seen = BTreeSet::from([start.clone()]);
        while let Some(node) = queue.pop_front() {
            if node == goal {
                break;
            }
            let (stage, z) = &node;
            if *stage == n {
                continue;
            }
            for star in 0..d {
                let mut next = z.clone();
                next[stage - 1] = star;
                let nn = (stage + 1, next);
                if seen.insert(nn.clone()) {
                    prev.insert(nn.clone(), node.clone());
                    queue.push_back(nn);
                }
            }
        }
        let mut path = vec![goal.1.clone()];
        let mut cur = goal;
        while let Some(p) = prev.get(&cur) {
            path.push(p.1.clone());
            cur = p.clone();
        }
        path.reverse();
        path
    }

    #[test]
    fn route_matches_graph_walk() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let x = DaryString::from_index(3, 4, rng.gen_range(0..81));
            let y = DaryString::from_index(3, 4, rng.gen_range(0..81));
            let r = route(&x, &y).unwrap();
            let labels: Vec<_> = r.ses.iter().map(|se| se.label.clone()).collect();
            assert_eq!(labels, bfs_route(3, 4, &x, &y));
        }
    }

    #[test]
    fn small_se_example() {
        let (a, b, u, v) = (s(2, "000"), s(2, "000"), s(2, "100"), s(2, "011"));
        assert!(shares_se(&a, &b, &u, &v).unwrap());
        let ra: BTreeSet<_> = route(&a, &b).unwrap().ses.into_iter().collect();
        let ru: BTreeSet<_> = route(&u, &v).unwrap().ses.into_iter().collect();
        assert!(ra.intersection(&ru).next().is_some());
        assert!(!shares_link(&a, &b, &u, &v).unwrap());
        assert_eq!(intersection_stage(&a, &b, &u, &v).unwrap(), Intersection::Single(2));
    }

    #[test]
    fn identical_routes_share_everything() {
        let (a, b) = (s(2, "0110"), s(2, "1011"));
        assert!(shares_se(&a, &b, &a, &b).unwrap());
        assert!(shares_link(&a, &b, &a, &b).unwrap());
        assert_eq!(
            intersection_stage(&a, &b, &a, &b).unwrap(),
            Intersection::Multiple { first: 1, last: 4 }
        );
    }

    #[test]
    fn dense_ids_are_consistent_with_keys() {
        let topo = Topology::new(2, 4);
        let mut by_key: HashMap<LinkId, usize> = HashMap::new();
        let mut se_key: HashMap<SeLabel, usize> = HashMap::new();
        for x in DaryString::all(2, 4) {
            for y in DaryString::all(2, 4) {
                let r = route(&x, &y).unwrap();
                let (mut l, mut e) = (Vec::new(), Vec::new());
                topo.link_ids(x.digits(), y.digits(), &mut l);
                topo.se_ids(x.digits(), y.digits(), &mut e);
                for (k, id) in r.links.iter().zip(&l) {
                    assert!(*id < topo.num_links());
                    assert_eq!(*by_key.entry(k.clone()).or_insert(*id), *id);
                }
                for (k, id) in r.ses.iter().zip(&e) {
                    assert!(*id < topo.num_ses());
                    assert_eq!(*se_key.entry(k.clone()).or_insert(*id), *id);
                }
            }
        }
        let distinct: BTreeSet<_> = by_key.values().collect();
        assert_eq!(distinct.len(), by_key.len());
    }
}

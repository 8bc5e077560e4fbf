//! Base-d strings, window indexing and the address sets A_i / B_j.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{check_range, Error, Result};

/// A string over Z_d, most significant digit first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DaryString {
    base: u8,
    digits: Vec<u8>,
}

impl DaryString {
    pub fn new(base: u8, digits: Vec<u8>) -> Result<Self> {
        if base < 2 {
            return Err(Error::Argument(format!("base {base} < 2")));
        }
        if digits.is_empty() {
            return Err(Error::Argument("empty digit string".into()));
        }
        if let Some(&bad) = digits.iter().find(|&&x| x >= base) {
            return Err(Error::Argument(format!("digit {bad} not below base {base}")));
        }
        Ok(Self { base, digits })
    }

    pub fn zeros(base: u8, n: usize) -> Self {
        Self {
            base,
            digits: vec![0; n],
        }
    }

    /// The string whose base-d value is `index`, padded to `n` digits.
    pub fn from_index(base: u8, n: usize, mut index: usize) -> Self {
        let mut digits = vec![0u8; n];
        for slot in digits.iter_mut().rev() {
            *slot = (index % base as usize) as u8;
            index /= base as usize;
        }
        debug_assert_eq!(index, 0, "index does not fit in {n} digits");
        Self { base, digits }
    }

    pub fn parse(base: u8, s: &str) -> Result<Self> {
        let digits = s
            .chars()
            .map(|c| {
                c.to_digit(36)
                    .map(|v| v as u8)
                    .ok_or_else(|| Error::Argument(format!("bad digit {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(base, digits)
    }

    pub fn base(&self) -> u8 {
        self.base
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    /// 1-based digit access, as in x_1 ... x_n.
    pub fn digit(&self, pos: usize) -> u8 {
        self.digits[pos - 1]
    }

    pub fn index(&self) -> usize {
        self.digits
            .iter()
            .fold(0usize, |acc, &x| acc * self.base as usize + x as usize)
    }

    /// First `len` digits.
    pub fn head(&self, len: usize) -> &[u8] {
        &self.digits[..len]
    }

    pub fn all(base: u8, n: usize) -> impl Iterator<Item = DaryString> {
        let total = (base as usize).pow(n as u32);
        (0..total).map(move |i| DaryString::from_index(base, n, i))
    }
}

impl fmt::Display for DaryString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &x in &self.digits {
            write!(f, "{}", char::from_digit(x as u32, 36).unwrap())?;
        }
        Ok(())
    }
}

impl fmt::Debug for DaryString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn same_shape(u: &DaryString, v: &DaryString) -> Result<()> {
    if u.base != v.base {
        return Err(Error::Argument(format!("bases {} and {} differ", u.base, v.base)));
    }
    if u.len() != v.len() {
        return Err(Error::Argument(format!("lengths {} and {} differ", u.len(), v.len())));
    }
    Ok(())
}

pub(crate) fn lcp_digits(u: &[u8], v: &[u8]) -> usize {
    u.iter().zip(v).take_while(|(a, b)| a == b).count()
}

pub(crate) fn lcs_digits(u: &[u8], v: &[u8]) -> usize {
    u.iter().rev().zip(v.iter().rev()).take_while(|(a, b)| a == b).count()
}

pub fn lcp(u: &DaryString, v: &DaryString) -> Result<usize> {
    same_shape(u, v)?;
    Ok(lcp_digits(&u.digits, &v.digits))
}

pub fn lcs(u: &DaryString, v: &DaryString) -> Result<usize> {
    same_shape(u, v)?;
    Ok(lcs_digits(&u.digits, &v.digits))
}

/// Window of `v` when outputs are grouped into windows of d^t outputs.
pub fn window_index(v: &DaryString, t: usize) -> Result<usize> {
    let n = v.len();
    check_range("t", t as i64, 0, n as i64)?;
    Ok(v.digits[..n - t]
        .iter()
        .fold(0usize, |acc, &x| acc * v.base as usize + x as usize))
}

pub fn ipow(d: usize, e: usize) -> usize {
    d.pow(e as u32)
}

/// The address classification around a tagged request (a, B).
///
/// Inputs and outputs are referred to by their base-d index.
#[derive(Clone, Debug)]
pub struct AddressSets {
    d: usize,
    n: usize,
    t: usize,
    a: DaryString,
    b: Vec<DaryString>,
    window0: usize,
    i_of: Vec<Option<usize>>,
    j_of_window: Vec<Option<usize>>,
    j_of_output: Vec<Option<usize>>,
    a_sets: Vec<Vec<usize>>,
    // B_j as output index lists; j >= n-t lists may overlap
    b_sets: Vec<Vec<usize>>,
}

impl AddressSets {
    pub fn build(a: &DaryString, outputs: &[DaryString], t: usize) -> Result<Self> {
        let n = a.len();
        let d = a.base() as usize;
        check_range("t", t as i64, 0, n as i64)?;
        if outputs.is_empty() {
            return Err(Error::Argument("empty output set".into()));
        }
        for b in outputs {
            same_shape(a, b)?;
        }
        let uniq: BTreeSet<_> = outputs.iter().collect();
        if uniq.len() != outputs.len() {
            return Err(Error::Argument("duplicate outputs".into()));
        }
        let windows: BTreeSet<usize> = outputs
            .iter()
            .map(|b| window_index(b, t))
            .collect::<Result<_>>()?;
        if windows.len() > 1 {
            return Err(Error::MultipleWindows(windows.len()));
        }
        let window0 = *windows.iter().next().unwrap();
        let b: Vec<DaryString> = uniq.into_iter().cloned().collect();
        let in_b: BTreeSet<usize> = b.iter().map(|x| x.index()).collect();

        let total = ipow(d, n);
        let mut i_of = vec![None; total];
        let mut a_sets = vec![Vec::new(); n];
        for (idx, slot) in i_of.iter_mut().enumerate() {
            if idx == a.index() {
                continue;
            }
            let u = DaryString::from_index(a.base(), n, idx);
            let i = lcs_digits(&u.digits[..n - 1], &a.digits[..n - 1]);
            *slot = Some(i);
            a_sets[i].push(idx);
        }

        let nw = ipow(d, n - t);
        let w0_digits = DaryString::from_index(a.base(), n - t, window0);
        let mut j_of_window = vec![None; nw];
        for (w, slot) in j_of_window.iter_mut().enumerate() {
            if w == window0 {
                continue;
            }
            let wd = DaryString::from_index(a.base(), n - t, w);
            *slot = Some(lcp_digits(&wd.digits, &w0_digits.digits).min(n - 1));
        }

        let mut j_of_output = vec![None; total];
        let mut b_sets = vec![Vec::new(); n];
        for (idx, slot) in j_of_output.iter_mut().enumerate() {
            if in_b.contains(&idx) {
                continue;
            }
            let v = DaryString::from_index(a.base(), n, idx);
            let js: BTreeSet<usize> = b
                .iter()
                .map(|bb| lcp_digits(&v.digits[..n - 1], &bb.digits[..n - 1]))
                .collect();
            for &j in &js {
                b_sets[j].push(idx);
            }
            if window_index(&v, t)? == window0 {
                *slot = js.iter().next_back().copied();
            }
        }

        Ok(Self {
            d,
            n,
            t,
            a: a.clone(),
            b,
            window0,
            i_of,
            j_of_window,
            j_of_output,
            a_sets,
            b_sets,
        })
    }

    /// a = 0^n and B = the k smallest outputs of window 0.
    pub fn canonical(d: u8, n: usize, t: usize, k: usize) -> Result<Self> {
        check_range("k", k as i64, 1, ipow(d as usize, t) as i64)?;
        let a = DaryString::zeros(d, n);
        let b: Vec<_> = (0..k).map(|i| DaryString::from_index(d, n, i)).collect();
        Self::build(&a, &b, t)
    }

    pub fn d(&self) -> usize {
        self.d
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn t(&self) -> usize {
        self.t
    }
    pub fn k(&self) -> usize {
        self.b.len()
    }
    pub fn a(&self) -> &DaryString {
        &self.a
    }
    pub fn outputs(&self) -> &[DaryString] {
        &self.b
    }
    pub fn window0(&self) -> usize {
        self.window0
    }
    pub fn num_windows(&self) -> usize {
        self.j_of_window.len()
    }

    /// i(u); `None` for u = a.
    pub fn i_of(&self, u: usize) -> Option<usize> {
        self.i_of[u]
    }

    /// j(w); `None` for the request's own window.
    pub fn j_of_window(&self, w: usize) -> Option<usize> {
        self.j_of_window[w]
    }

    /// j(v), the largest j with v in B_j; `None` unless v is in W_0 - B.
    pub fn j_of_output(&self, v: usize) -> Option<usize> {
        self.j_of_output[v]
    }

    pub fn a_set(&self, i: usize) -> &[usize] {
        &self.a_sets[i]
    }

    pub fn b_set(&self, j: usize) -> &[usize] {
        &self.b_sets[j]
    }

    /// Inputs other than a.
    pub fn inputs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.i_of
            .iter()
            .enumerate()
            .filter_map(|(u, i)| i.map(|i| (u, i)))
    }

    /// Windows other than W_0 with their j(w).
    pub fn windows(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.j_of_window
            .iter()
            .enumerate()
            .filter_map(|(w, j)| j.map(|j| (w, j)))
    }

    /// Outputs of W_0 - B with their j(v).
    pub fn window0_rest(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.j_of_output
            .iter()
            .enumerate()
            .filter_map(|(v, j)| j.map(|j| (v, j)))
    }

    /// |B_q ∪ ... ∪ B_{n-1}| for n-t <= q <= n (q = n is the empty union).
    pub fn union_b_tail(&self, q: usize) -> Result<usize> {
        check_range("q", q as i64, (self.n - self.t) as i64, self.n as i64)?;
        Ok(self.window0_rest().filter(|&(_, j)| j >= q).count())
    }
}

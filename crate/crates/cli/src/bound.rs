use clap::{Args, ValueEnum};
use nbswitch_core::bounds::{self, MultirateScheme};
use nbswitch_core::harness::multilog_m;
use nbswitch_core::{Mode, Rational};

use crate::config::Config;
use crate::{parse, CliResult, Output};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Three-stage Clos, strict sense: 2n - 1.
    ClosSnb,
    /// Two-crossbar Clos under the reuse rule: floor(3n/2).
    ClosWsnb,
    /// Multirate Clos with the class scheme.
    ClosMultirate,
    /// Multilog d-ary networks, one row per (t, f).
    Multilog,
    /// Unicast strict-sense multilog count.
    Hwang,
    /// f-cast strict-sense multilog count.
    Wang07,
    /// Window (t) strict-sense multilog count.
    Danilewicz,
    /// Crosstalk-free window count.
    CfWindow,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(value_enum)]
    kind: Kind,
    /// Radix.
    #[arg(long)]
    d: Option<u32>,
    /// Stages (multilog) or ports per edge crossbar (Clos).
    #[arg(long)]
    n: Option<u32>,
    /// Window sizes; every t in 0..=n when omitted.
    #[arg(long, value_delimiter = ',')]
    t: Vec<u32>,
    /// Fanouts.
    #[arg(long, value_delimiter = ',')]
    f: Vec<u64>,
    /// link or crosstalk.
    #[arg(long)]
    mode: Option<String>,
    /// Multirate scheme: four or five-printed.
    #[arg(long)]
    scheme: Option<String>,
    /// Also print the bound from enumerating the dual family.
    #[arg(long)]
    enumerate: bool,
}

const KEYS: &[&str] = &["d", "n", "t", "f", "mode", "scheme", "enumerate"];

pub fn run(a: BoundArgs, cfg: &Config) -> CliResult<Output> {
    let s = cfg.section("bound")?;
    s.check_keys(KEYS)?;
    let d = s.pick(a.d, "d", 2)?;
    let n = match a.n {
        Some(n) => n,
        None => s.get("n")?.ok_or_else(|| "--n is required".to_string())?,
    };
    let ts = s.pick_list(a.t, "t", Vec::new())?;
    let fs = s.pick_list(a.f, "f", vec![1])?;
    let mode: Mode = parse(&s.pick(a.mode, "mode", "link".to_string())?)?;
    let enumerate = s.pick_flag(a.enumerate, "enumerate")?;
    if n == 0 {
        return Err("n must be at least 1".to_string().into());
    }
    if d < 2 {
        return Err(format!("d = {d} < 2").into());
    }
    let one_t = || -> CliResult<u32> {
        match ts.as_slice() {
            [t] => Ok(*t),
            _ => Err("exactly one --t is required".to_string().into()),
        }
    };
    let one_f = || -> CliResult<u64> {
        match fs.as_slice() {
            [f] => Ok(*f),
            _ => Err("exactly one --f is required".to_string().into()),
        }
    };
    let text = match a.kind {
        Kind::ClosSnb => format!("n,m\n{},{}\n", n, bounds::clos_snb(n as u64)),
        Kind::ClosWsnb => format!("n,m\n{},{}\n", n, bounds::clos_wsnb_r2(n as u64)),
        Kind::ClosMultirate => {
            let name = s.pick(a.scheme, "scheme", "four".to_string())?;
            let scheme = match name.as_str() {
                "four" => MultirateScheme::FourType,
                "five-printed" => MultirateScheme::FiveTypePrinted,
                other => return Err(format!("unknown scheme {other:?}").into()),
            };
            format!("n,scheme,m\n{},{},{}\n", n, name, bounds::clos_multirate(n as u64, scheme))
        }
        Kind::Hwang => format!("d,n,m\n{},{},{}\n", d, n, bounds::hwang_unicast(d, n)),
        Kind::Wang07 => {
            let f = one_f()?;
            format!("d,n,f,m\n{},{},{},{}\n", d, n, f, bounds::wang07(d, n, f)?)
        }
        Kind::Danilewicz => {
            let t = one_t()?;
            format!("d,n,t,m\n{},{},{},{}\n", d, n, t, bounds::danilewicz(d, n, t)?)
        }
        Kind::CfWindow => {
            let t = one_t()?;
            format!("d,n,t,m\n{},{},{},{}\n", d, n, t, bounds::cf_wsnb_window(d, n, t)?)
        }
        Kind::Multilog => multilog(mode, d, n, ts, &fs, enumerate)?,
    };
    Ok(Output::ok(text))
}

fn multilog(mode: Mode, d: u32, n: u32, ts: Vec<u32>, fs: &[u64], enumerate: bool) -> CliResult<String> {
    let ts = if ts.is_empty() { (0..=n).collect() } else { ts };
    let mut out = String::from("mode,d,n,t,f,branch,value,m_sufficient");
    if enumerate {
        out.push_str(",enumerated_value,enumerated_m,k,p,q");
    }
    out.push('\n');
    for &t in &ts {
        for &f in fs {
            if t == n {
                // t = n has closed forms; the case table stops at t = n - 1
                let m = multilog_m(mode, d as usize, n as usize, t as usize, f as usize)?;
                out.push_str(&format!("{},{d},{n},{t},{f},t=n,{},{m}", mode.as_str(), m - 1));
                if enumerate {
                    out.push_str(",,,,,");
                }
            } else {
                let b = bounds::bound::<Rational>(mode, d, n, t, f)?;
                out.push_str(&format!("{},{}", mode.as_str(), b.csv_row()));
                if enumerate {
                    let e = bounds::sufficient_m_enumerated::<Rational>(d, n, t, f, mode)?;
                    out.push_str(&format!(",{},{},{},{},{}", e.value, e.m_sufficient, e.k, e.p, e.q));
                }
            }
            out.push('\n');
        }
    }
    Ok(out)
}

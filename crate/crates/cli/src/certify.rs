use std::path::PathBuf;

use clap::Args;
use nbswitch_core::dary::ipow;
use nbswitch_core::harness::{all_duals, fuzz_dual, mix_seed};
use nbswitch_core::lpcert::{certify_point, export_lp, CertificateRow, LpInstance};
use nbswitch_core::{Mode, Rational};

use crate::config::Config;
use crate::{parse, CliResult, Failure, Output};

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Window sizes; every t in 0..=n when omitted.
    #[arg(long, value_delimiter = ',')]
    t: Vec<usize>,
    /// Fanouts; `dn` stands for d^n.
    #[arg(long, value_delimiter = ',')]
    f: Vec<String>,
    /// link, crosstalk or both.
    #[arg(long)]
    mode: Option<String>,
    /// Also write every instance's LP to this directory.
    #[arg(long, value_name = "DIR")]
    export_lp: Option<PathBuf>,
    /// Corrupt every dual with this seed and report whether the checker names the damage.
    #[arg(long, value_name = "SEED")]
    fuzz: Option<u64>,
}

const KEYS: &[&str] = &["d", "n", "t", "f", "mode", "export_lp", "fuzz"];

struct Point {
    d: usize,
    n: usize,
    t: usize,
    f: usize,
    mode: Mode,
}

fn grid(a: &CertifyArgs, cfg: &Config) -> CliResult<Vec<Point>> {
    let s = cfg.section("certify")?;
    let ds = s.pick_list(a.d.clone(), "d", vec![2, 3])?;
    let ns = s.pick_list(a.n.clone(), "n", vec![3, 4, 5])?;
    let ts = s.pick_list(a.t.clone(), "t", Vec::new())?;
    let fs: Vec<String> = s.pick_list(a.f.clone(), "f", ["1", "2", "4", "dn"].map(String::from).to_vec())?;
    let modes = match s.pick(a.mode.clone(), "mode", "both".to_string())?.as_str() {
        "both" => vec![Mode::LinkBlocking, Mode::CrosstalkFree],
        m => vec![parse(m)?],
    };
    if ds.is_empty() || ns.is_empty() || fs.is_empty() {
        return Err(Failure::Usage("empty parameter grid".into()));
    }
    let mut out = Vec::new();
    for &d in &ds {
        for &n in &ns {
            if d < 2 || n < 1 || (n as u32) > usize::BITS / d.ilog2().max(1) {
                return Err(Failure::Usage(format!("d = {d}, n = {n} outside the supported range")));
            }
            let dn = ipow(d, n);
            let mut f_vals = Vec::new();
            for tok in &fs {
                let f = match tok.trim() {
                    "dn" => dn,
                    v => v.parse().map_err(|_| Failure::Usage(format!("bad fanout {v:?}")))?,
                };
                if (1..=dn).contains(&f) && !f_vals.contains(&f) {
                    f_vals.push(f);
                }
            }
            let t_vals: Vec<usize> = if ts.is_empty() { (0..=n).collect() } else { ts.clone() };
            for &t in t_vals.iter().filter(|&&t| t <= n) {
                for &f in &f_vals {
                    for &mode in &modes {
                        out.push(Point { d, n, t, f, mode });
                    }
                }
            }
        }
    }
    if out.is_empty() {
        return Err(Failure::Usage("no valid grid points".into()));
    }
    Ok(out)
}

fn lp_name(p: &Point, k: usize) -> String {
    format!("blocking_d{}_n{}_t{}_f{}_k{}_{}.lp", p.d, p.n, p.t, p.f, k, p.mode.as_str())
}

fn instances(p: &Point) -> CliResult<Vec<(usize, LpInstance)>> {
    (1..=p.f.min(ipow(p.d, p.t)))
        .map(|k| Ok((k, LpInstance::canonical(p.d, p.n, p.t, p.f, k, p.mode)?)))
        .collect()
}

pub fn run(a: CertifyArgs, cfg: &Config) -> CliResult<Output> {
    let s = cfg.section("certify")?;
    s.check_keys(KEYS)?;
    let points = grid(&a, cfg)?;
    let dir: Option<PathBuf> = a.export_lp.clone().or(s.get("export_lp")?);
    let fuzz: Option<u64> = a.fuzz.or(s.get("fuzz")?);

    if let Some(dir) = &dir {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
        for p in &points {
            for (k, inst) in instances(p)? {
                let path = dir.join(lp_name(p, k));
                std::fs::write(&path, export_lp(&inst))
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            }
        }
    }

    if let Some(seed) = fuzz {
        return fuzz_grid(&points, seed);
    }

    let mut out = String::from(CertificateRow::<Rational>::csv_header());
    out.push('\n');
    let mut bad = 0usize;
    for p in &points {
        for row in certify_point::<Rational>(p.d, p.n, p.t, p.f, p.mode)? {
            if !row.feasible || !row.matches() {
                bad += 1;
            }
            out.push_str(&row.csv_row());
            out.push('\n');
        }
    }
    let failed = (bad > 0).then(|| format!("{bad} certificate(s) infeasible or not matching the cost formula"));
    Ok(Output { text: out, failed })
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// One row per dual: the constraint that was zeroed out and what the
/// checker reported.
fn fuzz_grid(points: &[Point], seed: u64) -> CliResult<Output> {
    let mut out = String::from("d,n,t,f,k,mode,dual,target,detected,violations\n");
    let mut missed = 0usize;
    let mut idx = 0u64;
    for p in points {
        for (k, inst) in instances(p)? {
            for (name, dual) in all_duals(&inst)? {
                idx += 1;
                let Some(fz) = fuzz_dual(&inst, &dual, mix_seed(seed, &[idx])) else {
                    continue;
                };
                let detected = fz.detected();
                if !detected {
                    missed += 1;
                }
                let named: Vec<String> = fz.violations.iter().map(|e| e.to_string()).collect();
                out.push_str(&format!(
                    "{},{},{},{},{k},{},{},{},{detected},{}\n",
                    p.d,
                    p.n,
                    p.t,
                    p.f,
                    p.mode.as_str(),
                    quote(&name),
                    quote(&fz.target),
                    quote(&named.join("; "))
                ));
            }
        }
    }
    let failed = (missed > 0).then(|| format!("{missed} corrupted dual(s) passed the checker"));
    Ok(Output { text: out, failed })
}

use std::path::PathBuf;

use clap::Args;
use nbswitch_core::dwec::{derive_constants, DwecScheme};
use nbswitch_core::harness;
use nbswitch_core::{trace, Rational, Scalar, SmallRational};

use crate::config::Config;
use crate::{read_file, CliResult, Failure, Output};

#[derive(Args, Debug)]
pub struct DwecArgs {
    /// Solve for the class constants given breakpoints, e.g. 1/2,2/5,1/3.
    #[arg(long, value_name = "FRACTIONS")]
    derive_constants: Option<String>,
    /// Color the events of a trace and print one row per event.
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
    /// Run this many random events and audit every step.
    #[arg(long, value_name = "EVENTS")]
    random: Option<usize>,
    /// Check every event sequence up to this length against the ratio bound.
    #[arg(long, value_name = "EVENTS")]
    exhaustive: Option<usize>,
    /// four or five.
    #[arg(long)]
    scheme: Option<String>,
    /// Vertices of the base graph (random and exhaustive).
    #[arg(long)]
    vertices: Option<usize>,
    /// Edge weights to draw from (random and exhaustive).
    #[arg(long, value_delimiter = ',')]
    weights: Vec<String>,
    /// Live edges the random run hovers around.
    #[arg(long)]
    live: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Multiplier in colors_used <= ratio * OPT + additive.
    #[arg(long)]
    ratio: Option<String>,
    #[arg(long)]
    additive: Option<String>,
}

const KEYS: &[&str] = &[
    "derive_constants",
    "trace",
    "random",
    "exhaustive",
    "scheme",
    "vertices",
    "weights",
    "live",
    "seed",
    "ratio",
    "additive",
];

fn fraction<T: Scalar>(s: &str) -> CliResult<T> {
    T::parse_fraction(s).ok_or_else(|| Failure::Usage(format!("bad fraction {s:?}")))
}

fn fractions<T: Scalar>(list: &[String]) -> CliResult<Vec<T>> {
    list.iter().flat_map(|s| s.split(',')).map(fraction).collect()
}

fn scheme<T: Scalar>(name: &str) -> CliResult<DwecScheme<T>> {
    match name {
        "four" => Ok(DwecScheme::four_type()),
        "five" => Ok(DwecScheme::five_type()),
        other => Err(Failure::Usage(format!("unknown scheme {other:?}"))),
    }
}

pub fn run(a: DwecArgs, cfg: &Config) -> CliResult<Output> {
    let s = cfg.section("dwec")?;
    s.check_keys(KEYS)?;
    let derive: Option<String> = a.derive_constants.clone().or(s.get("derive_constants")?);
    let trace: Option<PathBuf> = a.trace.clone().or(s.get("trace")?);
    let random: Option<usize> = a.random.or(s.get("random")?);
    let exhaustive: Option<usize> = a.exhaustive.or(s.get("exhaustive")?);
    let chosen = [derive.is_some(), trace.is_some(), random.is_some(), exhaustive.is_some()];
    if chosen.iter().filter(|&&c| c).count() != 1 {
        return Err(Failure::Usage(
            "give exactly one of --derive-constants, --trace, --random, --exhaustive".into(),
        ));
    }
    let scheme_name = s.pick(a.scheme.clone(), "scheme", "four".to_string())?;
    let weights = s.pick_list(a.weights.clone(), "weights", Vec::new())?;

    if let Some(list) = derive {
        let bps: Vec<Rational> = fractions(&[list])?;
        let dc = derive_constants(&bps)?;
        let mut out = String::from("name,value,decimal\n");
        for (i, x) in dc.x.iter().enumerate() {
            out.push_str(&format!("x{i},{x},{}\n", x.to_f64_lossy()));
        }
        out.push_str(&format!("objective,{},{}\n", dc.objective, dc.objective.to_f64_lossy()));
        return Ok(Output::ok(out));
    }

    if let Some(path) = trace {
        let events = trace::parse_dwec::<Rational>(&read_file(&path)?)?;
        let run = harness::run_dwec_trace(scheme::<Rational>(&scheme_name)?, &events)?;
        return Ok(Output::ok(run.csv(nbswitch_core::ColoringState::csv_header())));
    }

    if let Some(events) = random {
        let vertices = s.pick(a.vertices, "vertices", 6)?;
        let live = s.pick(a.live, "live", 8)?;
        let seed = s.pick(a.seed, "seed", 1)?;
        if vertices < 2 || live == 0 {
            return Err(Failure::Usage("need at least 2 vertices and a positive --live".into()));
        }
        let w: Vec<Rational> = fractions(&weights)?;
        let st = harness::dwec_random(scheme::<Rational>(&scheme_name)?, vertices, &w, live, events, seed)?;
        return Ok(Output::ok(format!(
            "seed,scheme,vertices,events,peak_colors_used\n{seed},{scheme_name},{vertices},{},{}\n",
            st.events, st.max_blocking
        )));
    }

    let max_events = exhaustive.expect("one mode was chosen");
    let vertices = s.pick(a.vertices, "vertices", 4)?;
    let w: Vec<SmallRational> = if weights.is_empty() {
        fractions(&["1/4,41/100,3/5".to_string()])?
    } else {
        fractions(&weights)?
    };
    let sch = scheme::<SmallRational>(&scheme_name)?;
    let ratio = match a.ratio.clone().or(s.get("ratio")?) {
        Some(r) => fraction(&r)?,
        None => sch.ratio(),
    };
    let additive = fraction(&s.pick(a.additive.clone(), "additive", "9/5".to_string())?)?;
    let ex = harness::dwec_exhaustive(&sch, vertices, &w, max_events, ratio, additive)?;
    let mut out = String::from("scheme,vertices,max_events,states,events_checked,max_colors,min_slack,violations\n");
    out.push_str(&format!(
        "{scheme_name},{vertices},{max_events},{},{},{},{},{}\n",
        ex.states,
        ex.events_checked,
        ex.max_colors,
        ex.min_slack.map(|v| v.to_string()).unwrap_or_default(),
        ex.violation_count
    ));
    let failed = (ex.violation_count > 0).then(|| {
        format!(
            "{} sequences exceed the ratio bound; first:\n{}",
            ex.violation_count,
            ex.violations.first().cloned().unwrap_or_default()
        )
    });
    Ok(Output { text: out, failed })
}

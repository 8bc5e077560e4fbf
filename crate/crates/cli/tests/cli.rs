use std::path::PathBuf;
use std::process::{Command, Output};

fn nbswitch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nbswitch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nbswitch-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn clos_snb_bound() {
    let o = nbswitch(&["bound", "clos-snb", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "n,m\n4,7\n");
}

#[test]
fn multilog_bound_window_one() {
    let o = nbswitch(&["bound", "multilog", "--d", "2", "--n", "4", "--t", "1", "--f", "16"]);
    assert_eq!(o.status.code(), Some(0));
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    assert!(row.ends_with(",6"), "{row}");
}

#[test]
fn window_past_n_is_a_usage_error() {
    let o = nbswitch(&["bound", "multilog", "--t", "5", "--n", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("out of range"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(nbswitch(&["bound", "clos-snb", "--bogus"]).status.code(), Some(2));
}

#[test]
fn derive_constants_four_type() {
    let o = nbswitch(&["dwec", "--derive-constants", "1/2,2/5,1/3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "name,value,decimal\nx0,2,2\nx1,3/8,0.375\nx2,3/10,0.3\nx3,3,3\nobjective,227/40,5.675\n"
    );
}

#[test]
fn bad_fraction_is_a_usage_error() {
    let o = nbswitch(&["dwec", "--derive-constants", "1/2,two/5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad fraction"));
}

#[test]
fn dwec_trace_columns() {
    let p = scratch("dwec.tr", "# two edges\nA 1 0 1 1/2\nA 2 1 2 3/5\nD 1\n");
    let o = nbswitch(&["dwec", "--trace", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "t,colors_used,opt_lower,W_bar,Delta_bar\n1,1,1,1/2,0\n2,2,2,11/10,1\n3,2,2,11/10,1\n"
    );
}

#[test]
fn sweep_at_bound_passes_and_below_bound_reports_blocking() {
    let args = ["simulate", "--n", "3", "--t", "0", "--f", "1,2", "--m-offset", "-1,0", "--trials", "30", "--seed", "9"];
    let o = nbswitch(&args);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        let (m_bound, m, blocked): (usize, usize, usize) = (r[7].parse().unwrap(), r[8].parse().unwrap(), r[11].parse().unwrap());
        if m >= m_bound {
            assert_eq!(blocked, 0);
        } else {
            assert!(blocked > 0, "greedy found nothing at m = {m}");
        }
    }
    assert_eq!(nbswitch(&args).stdout, o.stdout);
}

#[test]
fn clos_greedy_sweep() {
    let o = nbswitch(&["simulate", "--network", "clos", "--n", "3", "--r", "3", "--adversary", "greedy", "--m-offset", "-1,0", "--trials", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert!(rows[1].starts_with("1,clos,greedy,3,3,5,4,"));
    assert!(!rows[1].ends_with(",0,4"));
    assert!(rows[2].starts_with("1,clos,greedy,3,3,5,5,"));
}

#[test]
fn empty_trace_gives_header_only() {
    let p = scratch("empty.tr", "");
    let o = nbswitch(&["simulate", "--trace", p.to_str().unwrap(), "--n", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "event,id,window,plane,status\n");
}

#[test]
fn trace_parse_error_names_the_line() {
    let p = scratch("bad.tr", "A 1 000 001\n\nA 2 100\n");
    let o = nbswitch(&["simulate", "--trace", p.to_str().unwrap(), "--n", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn trace_blocks_only_below_the_bound() {
    // 2x2 Clos with one middle crossbar: the second call from crossbar 1 is stuck
    let p = scratch("clos.tr", "A 1 1:1 1:1\nA 2 1:2 2:1\n");
    let path = p.to_str().unwrap();
    let low = nbswitch(&["simulate", "--network", "clos", "--trace", path, "--n", "2", "--r", "2", "--m", "1"]);
    assert_eq!(low.status.code(), Some(0));
    assert!(stdout(&low).contains("A,2,,blocked"));
    let routed = nbswitch(&["simulate", "--network", "clos", "--trace", path, "--n", "2", "--r", "2"]);
    assert_eq!(routed.status.code(), Some(0));
    assert!(!stdout(&routed).contains("blocked"));
}

#[test]
fn certify_small_grid() {
    let o = nbswitch(&["certify", "--d", "2", "--n", "3,4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().count() > 100);
    for row in text.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[8], "true", "{row}");
        assert_eq!(cols[11], "true", "{row}");
    }
}

#[test]
fn certify_fuzz_names_violations() {
    let o = nbswitch(&["certify", "--d", "2", "--n", "3", "--fuzz", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().count() > 10);
    for row in text.lines().skip(1) {
        assert!(row.contains(",true,\"constraint DC-"), "{row}");
    }
}

#[test]
fn certify_exports_lp_files() {
    let dir = std::env::temp_dir().join(format!("nbswitch-lp-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let o = nbswitch(&["certify", "--d", "2", "--n", "3", "--t", "1", "--f", "2", "--mode", "link", "--export-lp", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mut names: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["blocking_d2_n3_t1_f2_k1_link.lp", "blocking_d2_n3_t1_f2_k2_link.lp"]);
    let lp = std::fs::read_to_string(dir.join(&names[1])).unwrap();
    assert!(lp.contains("Maximize") && lp.trim_end().ends_with("End"));
}

#[test]
fn export_lp_matches_certify_export() {
    let dir = std::env::temp_dir().join(format!("nbswitch-lp2-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    nbswitch(&["certify", "--d", "2", "--n", "3", "--t", "2", "--f", "4", "--mode", "crosstalk", "--export-lp", dir.to_str().unwrap()]);
    let o = nbswitch(&["export-lp", "--d", "2", "--n", "3", "--t", "2", "--f", "4", "--k", "3", "--mode", "crosstalk"]);
    assert_eq!(o.status.code(), Some(0));
    let file = std::fs::read(dir.join("blocking_d2_n3_t2_f4_k3_crosstalk.lp")).unwrap();
    assert_eq!(o.stdout, file);
}

#[test]
fn config_file_fills_missing_flags() {
    let cfg = scratch("run.toml", "[bound]\nn = 3\n\n[simulate]\nn = [3]\nt = [0]\ntrials = 3\nseed = 4\n");
    let c = cfg.to_str().unwrap();
    let o = nbswitch(&["--config", c, "bound", "clos-snb"]);
    assert_eq!(stdout(&o), "n,m\n3,5\n");
    let o = nbswitch(&["--config", c, "bound", "clos-snb", "--n", "6"]);
    assert_eq!(stdout(&o), "n,m\n6,11\n");
    let o = nbswitch(&["--config", c, "simulate"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("4,link,greedy,2,3,0,1,3,3,3,"), "{}", lines[1]);
}

#[test]
fn config_typos_are_rejected() {
    let cfg = scratch("typo.toml", "[bound]\nnn = 3\n");
    let o = nbswitch(&["--config", cfg.to_str().unwrap(), "bound", "clos-snb", "--n", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key"));
}

#[test]
fn dwec_exhaustive_short_run() {
    let o = nbswitch(&["dwec", "--exhaustive", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "four");
    assert_eq!(row[7], "0");
}

#[test]
fn dwec_tight_ratio_fails_verification() {
    // ratio 1 with no additive slack: two heavy edges at a vertex need two colors
    let o = nbswitch(&["dwec", "--exhaustive", "3", "--ratio", "1", "--additive", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

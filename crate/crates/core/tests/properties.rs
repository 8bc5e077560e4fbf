use num_rational::Ratio;
use proptest::prelude::*;

use nbswitch_core::banyan::{shares_link, shares_se};
use nbswitch_core::clos::{ClosConfig, ClosState, SpacePolicy, Terminal, Traffic};
use nbswitch_core::dary::{lcp, lcs, DaryString};
use nbswitch_core::dwec::{opt_exact, ColoringState, DwecScheme, Event};
use nbswitch_core::lpcert::{build_instance, check_weak_duality, primal_from_state, primal_optimum};
use nbswitch_core::harness::all_duals;
use nbswitch_core::multilog::{ConnState, MultilogConfig};
use nbswitch_core::Mode;

type Q = Ratio<i64>;

fn addr(d: u8, n: usize) -> impl Strategy<Value = DaryString> {
    proptest::collection::vec(0..d, n).prop_map(move |v| DaryString::new(d, v).unwrap())
}

proptest! {
    #[test]
    fn index_round_trips(s in addr(3, 5)) {
        prop_assert_eq!(DaryString::from_index(3, 5, s.index()), s);
    }

    #[test]
    fn lcp_lcs_symmetric(a in addr(2, 6), b in addr(2, 6)) {
        prop_assert_eq!(lcp(&a, &b).unwrap(), lcp(&b, &a).unwrap());
        prop_assert_eq!(lcs(&a, &b).unwrap(), lcs(&b, &a).unwrap());
        prop_assert_eq!(lcp(&a, &a).unwrap(), 6);
    }

    #[test]
    fn link_sharing_implies_se_sharing(a in addr(3, 4), b in addr(3, 4), u in addr(3, 4), v in addr(3, 4)) {
        if shares_link(&a, &b, &u, &v).unwrap() {
            prop_assert!(shares_se(&a, &b, &u, &v).unwrap());
        }
    }

    /// Any state the simulator builds: blocking count = primal_from_state
    /// objective <= max-flow optimum <= every dual objective.
    #[test]
    fn primal_chain(
        ops in proptest::collection::vec((0usize..16, proptest::collection::vec(0usize..16, 1..4), any::<bool>()), 1..30),
        t in 0usize..4,
        probe_in in 0usize..16,
        crosstalk in any::<bool>(),
    ) {
        let mode = if crosstalk { Mode::CrosstalkFree } else { Mode::LinkBlocking };
        let cfg = MultilogConfig::new(2, 4, 4, t, 3, mode).unwrap();
        let mut st = ConnState::new(cfg);
        let mut id = 1u64;
        let wsize = 1usize << t;
        for (u, outs, depart) in ops {
            if depart && !st.is_empty() {
                let k = *st.requests().keys().next().unwrap();
                st.release(k).unwrap();
                continue;
            }
            let mut outs: Vec<usize> = outs.into_iter().filter(|&v| st.output_free(v) && v >= wsize).collect();
            outs.sort_unstable();
            outs.dedup();
            if outs.is_empty() || !st.input_free(u) || u == probe_in {
                continue;
            }
            st.admit(id, u, &outs).unwrap();
            id += 1;
            prop_assert!(st.audit().is_ok());
        }
        let b: Vec<usize> = (0..wsize.min(3)).collect();
        let s = |x| DaryString::from_index(2, 4, x);
        let bs: Vec<DaryString> = b.iter().map(|&v| s(v)).collect();
        let inst = build_instance(2, 4, t, 3, &s(probe_in), &bs, mode).unwrap();
        let primal = primal_from_state::<Q>(&st, &inst).unwrap();
        prop_assert_eq!(primal.objective(), Q::from_integer(st.blocking_planes(probe_in, &b).len() as i64));
        let opt = primal_optimum::<Q>(&inst);
        prop_assert!(primal.objective() <= opt.objective());
        for (name, dual) in all_duals(&inst).unwrap() {
            let gap = check_weak_duality(&inst, &opt, &dual).unwrap();
            prop_assert!(gap >= Q::from_integer(0), "{}", name);
        }
    }

    #[test]
    fn dwec_lower_bounds_hold(evs in proptest::collection::vec((0usize..4, 1usize..4, 1i64..=10, any::<bool>()), 1..9)) {
        let mut st = ColoringState::new(DwecScheme::<Q>::four_type(), 4);
        let mut id = 0u64;
        let mut opt_bar = 0;
        for (u, off, p, depart) in evs {
            if depart && !st.edges().is_empty() {
                let k = *st.edges().keys().next().unwrap();
                st.step(Event::Depart { id: k }).unwrap();
            } else {
                id += 1;
                st.step(Event::Arrive { id, u, v: (u + off) % 4, w: Q::new(p, 10) }).unwrap();
            }
            prop_assert!(st.audit().is_ok());
            prop_assert!(st.colors_used() <= st.colors_allocated());
            let opt = opt_exact(&st.live_edges()).unwrap();
            prop_assert!(opt <= st.live_edges().len());
            opt_bar = opt_bar.max(opt);
            prop_assert!(st.opt_lower() <= opt_bar, "lower {} > opt {}", st.opt_lower(), opt_bar);
        }
    }

    #[test]
    fn clos_snb_never_blocks_at_2n_minus_1(
        n in 1usize..5, r in 1usize..5,
        ops in proptest::collection::vec((0usize..16, 0usize..16, any::<bool>()), 1..60),
        seed in any::<u64>(),
    ) {
        let cfg = ClosConfig::symmetric(n, 2 * n - 1, r, Traffic::SpaceUnicast).unwrap();
        let mut st = ClosState::new(cfg, SpacePolicy::Random(seed));
        let mut id = 1u64;
        for (i, o, depart) in ops {
            if depart && !st.requests().is_empty() {
                let k = *st.requests().keys().next().unwrap();
                st.release(k).unwrap();
                continue;
            }
            let (i, o) = (Terminal::new(i % r, (i / r) % n), Terminal::new(o % r, (o / r) % n));
            if st.input_free(i) && st.output_free(o) {
                prop_assert!(!st.snb_admit(id, i, o).unwrap().is_blocked());
                id += 1;
            }
            prop_assert!(st.audit().is_ok());
        }
    }
}

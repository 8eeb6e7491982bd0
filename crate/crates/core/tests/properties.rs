use chenstein::discrete_dist::{kolmogorov_distance, tv_distance, wasserstein_distance, IntegerPmf};
use chenstein::interpoint::InterpointConfig;
use chenstein::pointproc::{BoxWindow, Intensity, PointPattern};
use chenstein::poisson_stein::{IndicatorSet, PoissonLaw, SteinSolution, SteinTarget};
use chenstein::runs::count_runs;
use chenstein::ustat::{eval_ustat, Kernel};
use chenstein::voronoi::{circumradius_2d, directions_cover};
use proptest::prelude::*;

fn law() -> impl Strategy<Value = IntegerPmf> {
    prop::collection::vec(0.0f64..1.0, 1..15).prop_filter_map("zero mass", |w| {
        let s: f64 = w.iter().sum();
        (s > 0.0).then(|| IntegerPmf::from_dense(&w.iter().map(|x| x / s).collect::<Vec<_>>()).unwrap())
    })
}

fn points_2d(max: usize) -> impl Strategy<Value = Vec<[f64; 2]>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| [a, b]), 3..max)
}

proptest! {
    #[test]
    fn distances_are_metrics(p in law(), q in law()) {
        let tv = tv_distance(&p, &q);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&tv));
        prop_assert!((tv - tv_distance(&q, &p)).abs() < 1e-12);
        prop_assert!(tv_distance(&p, &p) < 1e-12);
        prop_assert!(kolmogorov_distance(&p, &q) <= tv + 1e-12);
        prop_assert!(wasserstein_distance(&p, &q) + 1e-12 >= tv);
    }

    #[test]
    fn pmf_csv_round_trips(p in law()) {
        let back = IntegerPmf::from_csv(&p.to_csv()).unwrap();
        prop_assert_eq!(back.support(), p.support());
        for (a, b) in back.masses().iter().zip(p.masses()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn pattern_csv_round_trips(coords in prop::collection::vec(0.0f64..1.0, 0..40)) {
        let coords: Vec<f64> = coords[..coords.len() / 2 * 2].to_vec();
        let w = BoxWindow::unit_cube(2).unwrap();
        let p = PointPattern::new(w.clone(), coords, Intensity::Poisson { t: 5.0 }).unwrap();
        let back = PointPattern::from_csv(&p.to_csv(), w, Intensity::Poisson { t: 5.0 }).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn stein_residual_is_small(lambda in 0.05f64..30.0, set in prop::collection::btree_set(0u64..60, 1..10)) {
        let sol = SteinSolution::new(lambda, SteinTarget::Set(IndicatorSet::Finite(set))).unwrap();
        for i in 0..150 {
            prop_assert!(sol.residual(i).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn poisson_masses_sum_to_one(lambda in 0.01f64..500.0) {
        let law = PoissonLaw::new(lambda).unwrap();
        let top = law.truncation_index(1e-16);
        let total: f64 = law.pmf_table(top).iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn run_count_matches_definition(bits in prop::collection::vec(any::<bool>(), 1..30), k in 1usize..6) {
        prop_assume!(k <= bits.len());
        let starts = (0..=bits.len() - k)
            .filter(|&i| (i == 0 || !bits[i - 1]) && bits[i..i + k].iter().all(|&b| b))
            .count() as u64;
        prop_assert_eq!(count_runs(&bits, k).unwrap(), starts);
    }

    #[test]
    fn pair_ustat_matches_brute_force(coords in prop::collection::vec(0.0f64..1.0, 0..120), delta in 0.0f64..0.4) {
        let coords: Vec<f64> = coords[..coords.len() / 2 * 2].to_vec();
        let w = BoxWindow::unit_cube(2).unwrap();
        let p = PointPattern::new(w, coords, Intensity::Binomial { n: 0 }).unwrap();
        let fast = Kernel::distance_threshold(2, delta).unwrap();
        let slow = Kernel::new("plain", 2, 2, move |x| {
            (x[0][0] - x[1][0]).powi(2) + (x[0][1] - x[1][1]).powi(2) <= delta * delta
        })
        .unwrap();
        prop_assert_eq!(eval_ustat(&p, &fast).unwrap(), eval_ustat(&p, &slow).unwrap());
    }

    #[test]
    fn circumradius_shrinks_when_neighbors_are_added(nb in points_2d(10), extra in points_2d(5)) {
        let before = circumradius_2d([0.0, 0.0], &nb);
        let mut all = nb.clone();
        all.extend(extra);
        let after = circumradius_2d([0.0, 0.0], &all);
        prop_assert!(after <= before * (1.0 + 1e-12));
    }

    #[test]
    fn circumradius_ignores_far_points(nb in points_2d(12), far in (0.0f64..std::f64::consts::TAU, 0.0f64..5.0)) {
        prop_assume!(directions_cover([0.0, 0.0], &nb));
        let r = circumradius_2d([0.0, 0.0], &nb);
        let dist = 2.0 * r * (1.0 + 1e-9) + far.1;
        let mut all = nb.clone();
        all.push([dist * far.0.cos(), dist * far.0.sin()]);
        prop_assert!((circumradius_2d([0.0, 0.0], &all) - r).abs() <= 1e-12 * r.max(1.0));
    }

    #[test]
    fn interpoint_buffer_holds_every_qualifying_pair(
        d in 1usize..3,
        t in 10.0f64..500.0,
        mid in prop::collection::vec(0.0f64..1.0, 2),
        dir in prop::collection::vec(-1.0f64..1.0, 2),
        frac in 0.0f64..1.0,
    ) {
        let cfg = InterpointConfig::unit(d, t, 4.0, 100, 0).unwrap();
        let norm: f64 = dir[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-6);
        let half = 0.5 * frac * cfg.max_distance();
        let sim = cfg.window.buffered(cfg.buffer()).unwrap();
        for sign in [-1.0, 1.0] {
            let p: Vec<f64> = (0..d).map(|j| mid[j] + sign * half * dir[j] / norm).collect();
            prop_assert!(sim.contains(&p));
        }
    }
}

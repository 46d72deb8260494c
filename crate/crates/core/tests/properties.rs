use advbound::bounds;
use advbound::matrix::{self, HermitianMatrix};
use advbound::problems::build_search;
use advbound::report;
use advbound::simulator;
use advbound::young;
use faer::c64;
use proptest::prelude::*;

fn hermitian(n: usize, entries: &[(f64, f64)]) -> HermitianMatrix {
    HermitianMatrix::from_fn(n, |i, j| {
        let (a, b) = entries[i.min(j) * n + i.max(j)];
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => c64::new(a, 0.0),
            std::cmp::Ordering::Less => c64::new(a, b),
            std::cmp::Ordering::Greater => c64::new(a, -b),
        }
    })
    .unwrap()
}

fn arb_hermitian(max: usize) -> impl Strategy<Value = HermitianMatrix> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |e| hermitian(n, &e))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigendecomposition_reconstructs(a in arb_hermitian(7)) {
        let s = matrix::eig_hermitian(&a).unwrap();
        prop_assert!(s.reconstruct().max_abs_diff(&a) < 1e-12);
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let tr: f64 = s.eigenvalues.iter().sum();
        prop_assert!((tr - a.trace()).abs() < 1e-12);
    }

    #[test]
    fn kronecker_spectrum_is_products(a in arb_hermitian(4), b in arb_hermitian(4)) {
        let k = HermitianMatrix::new(matrix::kron(a.as_ref(), b.as_ref())).unwrap();
        let mut want: Vec<f64> = Vec::new();
        for x in matrix::eigenvalues(&a).unwrap() {
            for y in matrix::eigenvalues(&b).unwrap() {
                want.push(x * y);
            }
        }
        want.sort_by(f64::total_cmp);
        let got = matrix::eigenvalues(&k).unwrap();
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-11);
        }
    }

    #[test]
    fn square_root_squares_back(a in arb_hermitian(6)) {
        let psd = HermitianMatrix::new(a.as_ref() * a.as_ref()).unwrap();
        let r = matrix::psd_power(&psd, 0.5).unwrap();
        let back = HermitianMatrix::new(r.as_ref() * r.as_ref()).unwrap();
        prop_assert!(back.max_abs_diff(&psd) < 1e-10);
        prop_assert!(matrix::eigenvalues(&r).unwrap()[0] > -1e-12);
    }

    #[test]
    fn gamma_family_maps_spectrum(n in 3usize..10, gamma in 0.01f64..5.0) {
        let add = bounds::search_additive(n).unwrap();
        let g = add.gamma_family(gamma).unwrap();
        let mut want: Vec<f64> = add.spectrum().eigenvalues.iter().map(|l| 1.0 + gamma * (1.0 - l)).collect();
        want.sort_by(f64::total_cmp);
        for (a, b) in g.spectrum().eigenvalues.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        let p = build_search(n).unwrap();
        prop_assert!(bounds::validate(&g, &p).pass);
    }

    #[test]
    fn search_additive_matches_closed_form(n in 3usize..14, eps in 0.0f64..0.2) {
        let p = build_search(n).unwrap();
        let r = bounds::additive_bound(&bounds::search_additive(n).unwrap(), &p, eps).unwrap();
        let root = (n as f64 - 1.0).sqrt();
        let want = (1.0 - eps - 2.0 * (eps * (1.0 - eps)).sqrt()) * root;
        prop_assert!((r.bound - want).abs() < 1e-9);
    }

    #[test]
    fn search_hybrid_scales_the_stated_value(n in 3usize..14, t in 0.0f64..1.0) {
        let nf = n as f64;
        let eps = t * (1.0 - 1.0 / nf - 0.01);
        let p = build_search(n).unwrap();
        let adv = bounds::search_additive(n).unwrap();
        let r = bounds::hybrid_bound(&adv, &p, eps, -1.0 / (nf - 1.0)).unwrap();
        let beta = (1.0 - eps).sqrt() - 1.0 / nf.sqrt();
        prop_assert!((r.bound - nf / (nf - 1.0) * beta * beta * (nf - 1.0).sqrt()).abs() < 1e-9);
        prop_assert!((r.eta - 1.0 / nf).abs() < 1e-12);
    }

    #[test]
    fn grover_matches_rotation(n in 2usize..24, k in 0usize..5) {
        let p = build_search(n).unwrap();
        let c = simulator::grover_for_search(n, k).unwrap();
        let t = simulator::run(&c, &p).unwrap();
        let s = simulator::success_probability(t.final_state(), &c, &p).unwrap();
        let theta = (1.0 / (n as f64).sqrt()).asin();
        prop_assert!((s - ((2 * k + 1) as f64 * theta).sin().powi(2)).abs() < 1e-9);
        let adv = bounds::search_additive(n).unwrap();
        prop_assert!(simulator::check_per_query(&t, &adv, &p).unwrap().pass);
    }

    #[test]
    fn hook_lengths_sum_to_factorial(n in 1usize..10) {
        let total: u128 = young::partitions(n)
            .iter()
            .map(|l| young::full_dimension(l).unwrap().pow(2))
            .sum();
        prop_assert_eq!(total, young::factorial(n));
    }

    #[test]
    fn csv_round_trips(n in 3usize..10, eps in 0.0f64..0.6) {
        let p = build_search(n).unwrap();
        let adv = bounds::search_additive(n).unwrap();
        let reps = vec![
            bounds::additive_bound(&adv, &p, eps).unwrap(),
            bounds::hybrid_bound(&adv, &p, eps, -1.0 / (n as f64 - 1.0)).unwrap(),
        ];
        let rows = report::read_csv(&report::to_csv(&reps).unwrap()).unwrap();
        prop_assert_eq!(rows.len(), 2);
        for (row, r) in rows.iter().zip(&reps) {
            prop_assert_eq!(row, &report::CsvRow::from(r));
        }
    }
}

mod common;

use common::Oracle;
use dirac_lattice::covariant::{
    generate_solution, omega_on_slice, random_configuration, smeared_flow, SmearedGenerator,
};
use dirac_lattice::dirac::{classify, count_dof, run_algorithm};
use dirac_lattice::gauge::{apply_gauge, check_action_invariance, eom_residuals, SpacetimeParams};
use dirac_lattice::lattice::{backward, eta3, forward, LatticeSpec};
use dirac_lattice::linalg::{normalize_sparse, Rational, SparseVec};
use dirac_lattice::phase_space::{LinearFunctional, QuadraticFunctional};
use dirac_lattice::report::{self, AnalysisReport};
use dirac_lattice::sample::{self, rng, SampleRng};
use dirac_lattice::theory::maps::{
    b_from_connection, connection_from_b, inverse_tetrad, metric_from_f, zero_tensor3, ConnectionGrid, Mat4, TetradGrid,
};
use dirac_lattice::theory::{maxwell_first_order, paper_g0_theory};
use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;

fn sparse(r: &mut SampleRng, dim: usize, k: usize) -> SparseVec {
    normalize_sparse((0..k).map(|_| (r.gen_range(0..dim), sample::rational(r))).collect())
}

fn tetrad(r: &mut SampleRng) -> Mat4 {
    loop {
        let m: Mat4 = std::array::from_fn(|_| std::array::from_fn(|_| sample::rational(r)));
        if inverse_tetrad(&m).is_some() {
            return m;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn differences_commute_and_telescope(seed in any::<u64>(), n in 1usize..5, a in 1usize..4, b in 1usize..4) {
        let l = LatticeSpec::spatial(n);
        let f = sample::field(&mut rng(seed), l.volume());
        prop_assert_eq!(forward(&l, &forward(&l, &f, b), a), forward(&l, &forward(&l, &f, a), b));
        prop_assert_eq!(backward(&l, &forward(&l, &f, b), a), forward(&l, &backward(&l, &f, a), b));
        prop_assert!(forward(&l, &f, a).iter().sum::<Rational>().is_zero());
        prop_assert!(backward(&l, &f, a).iter().sum::<Rational>().is_zero());
    }

    #[test]
    fn curl_identities(seed in any::<u64>(), n in 1usize..5) {
        let l = LatticeSpec::spatial(n);
        let mut r = rng(seed);
        let g = sample::field(&mut r, l.volume());
        let f: Vec<_> = (0..3).map(|_| sample::field(&mut r, l.volume())).collect();
        let mut div = vec![Rational::zero(); l.volume()];
        for a in 1..=3 {
            let mut curl_f = vec![Rational::zero(); l.volume()];
            let mut curl_grad = vec![Rational::zero(); l.volume()];
            for b in 1..=3 {
                for c in 1..=3 {
                    let s = Rational::from_integer(eta3(a, b, c).into());
                    if s.is_zero() {
                        continue;
                    }
                    for (x, v) in forward(&l, &f[c - 1], b).into_iter().enumerate() {
                        curl_f[x] += &s * v;
                    }
                    for (x, v) in forward(&l, &forward(&l, &g, c), b).into_iter().enumerate() {
                        curl_grad[x] += &s * v;
                    }
                }
            }
            prop_assert!(curl_grad.iter().all(Zero::is_zero));
            for (x, v) in forward(&l, &curl_f, a).into_iter().enumerate() {
                div[x] += v;
            }
        }
        prop_assert!(div.iter().all(Zero::is_zero));
    }

    #[test]
    fn two_form_map_is_antisymmetric_and_invertible(seed in any::<u64>()) {
        let l = LatticeSpec::spacetime(1, 2);
        let mut r = rng(seed);
        let e = TetradGrid { lattice: l, sites: (0..l.volume()).map(|_| tetrad(&mut r)).collect() };
        let sites = (0..l.volume()).map(|_| {
            let mut w = zero_tensor3();
            for m in w.iter_mut() {
                for i in 0..4 {
                    for j in i + 1..4 {
                        let c = sample::rational(&mut r);
                        m[j][i] = -c.clone();
                        m[i][j] = c;
                    }
                }
            }
            w
        }).collect();
        let w = ConnectionGrid { lattice: l, sites };
        let b = b_from_connection(&e, &w).unwrap();
        for s in &b.sites {
            for m in s {
                for al in 0..4 {
                    for be in 0..4 {
                        prop_assert_eq!(&m[al][be], &-m[be][al].clone());
                    }
                }
            }
        }
        prop_assert_eq!(connection_from_b(&e, &b).unwrap(), w);
    }

    #[test]
    fn metric_is_symmetric(seed in any::<u64>()) {
        let l = LatticeSpec::spacetime(2, 2);
        let mut r = rng(seed);
        let f: [Vec<Rational>; 4] = std::array::from_fn(|_| sample::field(&mut r, l.volume()));
        for g in metric_from_f(&l, &f).unwrap() {
            for mu in 0..4 {
                for nu in 0..4 {
                    prop_assert_eq!(&g[mu][nu], &g[nu][mu]);
                }
            }
        }
    }

    #[test]
    fn brackets_are_antisymmetric_and_satisfy_jacobi(seed in any::<u64>()) {
        let om = common::omega(1);
        let d = om.dim();
        let mut r = rng(seed);
        let f = LinearFunctional::new(d, sparse(&mut r, d, 5));
        let g = LinearFunctional::new(d, sparse(&mut r, d, 5));
        prop_assert_eq!(om.poisson(&f, &g).unwrap(), -om.poisson(&g, &f).unwrap());
        let mut quad = || {
            let prods = (0..2).map(|_| (sample::rational(&mut r), sparse(&mut r, d, 3), sparse(&mut r, d, 3))).collect();
            QuadraticFunctional::from_products(d, prods).unwrap()
        };
        let (h1, h2) = (quad(), quad());
        prop_assert!(h1.is_symmetric());
        let lhs = om
            .poisson_lin_quad(&om.poisson_lin_quad(&f, &h1).unwrap(), &h2)
            .unwrap()
            .add_scaled(&Rational::from_integer((-1).into()), &om.poisson_lin_quad(&om.poisson_lin_quad(&f, &h2).unwrap(), &h1).unwrap());
        let omat = om.to_matrix();
        let (m1, m2) = (&h1.quadratic, &h2.quadratic);
        let k = m1.mul(&omat).unwrap().mul(m2).unwrap().add(&m2.mul(&omat).unwrap().mul(m1).unwrap().neg()).unwrap();
        let h12 = QuadraticFunctional { quadratic: k, linear: LinearFunctional::zero(d) };
        prop_assert_eq!(lhs, om.poisson_lin_quad(&f, &h12).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn action_and_field_equations_are_gauge_invariant(seed in any::<u64>(), t in 1usize..4, n in 2usize..4) {
        let l = LatticeSpec::spacetime(t, n);
        let c = random_configuration(seed, l);
        let p = SpacetimeParams::random(l, &mut rng(seed ^ 0x5a5a));
        prop_assert!(check_action_invariance(&c.e, &c.b, &p).unwrap().is_zero());
        let (ne, nb) = apply_gauge(&c.e, &c.b, &p).unwrap();
        prop_assert_eq!(eom_residuals(&ne, &nb).unwrap(), eom_residuals(&c.e, &c.b).unwrap());
    }

    #[test]
    fn omega_is_antisymmetric_and_slice_independent(seed in any::<u64>()) {
        let l = LatticeSpec::spacetime(3, 2);
        let d1 = generate_solution(seed, l).unwrap();
        let d2 = generate_solution(seed.wrapping_add(1), l).unwrap();
        prop_assert!(d1.is_on_shell().unwrap());
        let w = omega_on_slice(&d1, &d2, 0).unwrap();
        prop_assert_eq!(omega_on_slice(&d2, &d1, 0).unwrap(), -w.clone());
        for t in 1..3 {
            prop_assert_eq!(&omega_on_slice(&d1, &d2, t).unwrap(), &w);
        }
    }

    #[test]
    fn smeared_flows_preserve_first_class_values(seed in any::<u64>(), which in 0usize..4, eps in -3i64..4) {
        let sys = run_algorithm(&paper_g0_theory(), &LatticeSpec::spatial(2)).unwrap();
        let cat = sys.catalog();
        let mut r = rng(seed);
        let point = sample::field(&mut r, cat.dim());
        let (name, k) = [("gamma", 4), ("gamma_a", 12), ("gamma_0", 4), ("gamma_0a", 12)][which];
        let g = SmearedGenerator::from_name(name, (0..k).map(|_| sample::field(&mut r, cat.sites())).collect()).unwrap();
        let moved = smeared_flow(&g, &point, cat).unwrap().at(&Rational::from_integer(eps.into()));
        for f in Oracle::new(cat).first_class() {
            prop_assert_eq!(f.eval(&moved), f.eval(&point));
        }
    }

    #[test]
    fn dof_is_integral_and_reports_round_trip(seed in any::<u64>(), n in 1usize..4) {
        let spec = maxwell_first_order();
        let cc = classify(&run_algorithm(&spec, &LatticeSpec::spatial(n)).unwrap()).unwrap();
        prop_assert!(count_dof(&cc).is_ok());
        let r = report::analyze(&spec, n, 2, seed).unwrap();
        let json = report::to_json(&r);
        let back: AnalysisReport = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(report::to_json(&back), json);
        prop_assert_eq!(back, r);
    }
}

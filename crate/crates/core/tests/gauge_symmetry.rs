mod common;

use common::Oracle;
use dirac_lattice::covariant::{generate_solution, random_configuration};
use dirac_lattice::dirac::{classify, run_algorithm};
use dirac_lattice::gauge::{
    apply_gauge, apply_gauge_phase, castellani_generator, check_action_invariance, diffeo_parameters, discrete_action,
    gauge_variation, slice_phase_point, translation_difference, vidx, GaugeParams, SpacetimeParams,
};
use dirac_lattice::lattice::{eps4, minkowski, LatticeSpec};
use dirac_lattice::linalg::{int, rat, Rational};
use dirac_lattice::report::{self, Status, Suite, Trials};
use dirac_lattice::sample::{self, rng};
use dirac_lattice::theory::maps::{BGrid, TetradGrid};
use dirac_lattice::theory::{g0_b, g0_e, maxwell_first_order};
use num_traits::Zero;

/// Naive `½ Σ ε^{αβμν} B^I_{αβ} (D_μ e_{νI} − D_ν e_{μI})` over explicit coordinates.
fn action_oracle(e: &TetradGrid, b: &BGrid) -> Rational {
    let l = e.lattice;
    let ext = [l.t, l.n, l.n, l.n];
    let flat = |c: [usize; 4]| c[1] + l.n * c[2] + l.n * l.n * c[3] + l.n.pow(3) * c[0];
    let mut s = Rational::zero();
    for t in 0..l.t {
        for z in 0..l.n {
            for y in 0..l.n {
                for x in 0..l.n {
                    let c = [t, x, y, z];
                    let here = flat(c);
                    let step = |mu: usize| {
                        let mut d = c;
                        d[mu] = (d[mu] + 1) % ext[mu];
                        flat(d)
                    };
                    for i in 0..4 {
                        let low = int(minkowski(i));
                        for al in 0..4 {
                            for be in 0..4 {
                                for mu in 0..4 {
                                    for nu in 0..4 {
                                        let sg = eps4(al, be, mu, nu);
                                        if sg == 0 {
                                            continue;
                                        }
                                        let dmu = &e.sites[step(mu)][i][nu] - &e.sites[here][i][nu];
                                        let dnu = &e.sites[step(nu)][i][mu] - &e.sites[here][i][mu];
                                        s += int(sg) * rat(1, 2) * &low * &b.sites[here][i][al][be] * (dmu - dnu);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    s
}

#[test]
fn action_matches_naive_sum() {
    for (seed, l) in [(1, LatticeSpec::spacetime(2, 2)), (2, LatticeSpec::spacetime(3, 2))] {
        let c = random_configuration(seed, l);
        assert_eq!(discrete_action(&c.e, &c.b).unwrap(), action_oracle(&c.e, &c.b));
    }
}

#[test]
fn pure_gauge_tetrad_has_zero_action() {
    let l = LatticeSpec::spacetime(2, 2);
    let mut r = rng(9);
    let f: Vec<_> = (0..4).map(|_| sample::field(&mut r, l.volume())).collect();
    let sites = (0..l.volume())
        .map(|x| std::array::from_fn(|i| std::array::from_fn(|mu| &f[i][l.shift(x, mu, 1)] - &f[i][x])))
        .collect();
    let e = TetradGrid { lattice: l, sites };
    let b = random_configuration(10, l).b;
    assert!(discrete_action(&e, &b).unwrap().is_zero());
}

#[test]
fn action_is_gauge_invariant() {
    let l = LatticeSpec::spacetime(2, 2);
    for seed in 0..20 {
        let mut r = rng(1000 + seed);
        let c = random_configuration(seed, l);
        let p = SpacetimeParams::random(l, &mut r);
        assert!(check_action_invariance(&c.e, &c.b, &p).unwrap().is_zero());
    }
    let l = LatticeSpec::spacetime(3, 2);
    let c = random_configuration(77, l);
    let p = SpacetimeParams::random(l, &mut rng(78));
    assert!(check_action_invariance(&c.e, &c.b, &p).unwrap().is_zero());
}

#[test]
fn castellani_flow_is_the_gauge_transformation() {
    let sys = run_algorithm(&dirac_lattice::theory::paper_g0_theory(), &LatticeSpec::spatial(2)).unwrap();
    let cc = classify(&sys).unwrap();
    let cat = sys.catalog();
    let o = Oracle::new(cat);

    let zero = GaugeParams::zero(cat.lattice);
    assert!(castellani_generator(&zero, &cc).unwrap().is_zero());

    let mut peak = GaugeParams::zero(cat.lattice);
    peak.eps[2][5] = int(1);
    assert_eq!(castellani_generator(&peak, &cc).unwrap(), o.psi(2, 5));

    for seed in 0..5 {
        let p = GaugeParams::random(cat.lattice, &mut rng(seed));
        let g = castellani_generator(&p, &cc).unwrap();
        assert_eq!(sys.omega.flow(&g).unwrap(), gauge_variation(&p, cat).unwrap());

        // secondary constraints are unchanged by the transformation
        let z = sample::field(&mut rng(50 + seed), cat.dim());
        let z2 = apply_gauge_phase(&z, &p, cat).unwrap();
        for f in o.secondaries() {
            assert_eq!(f.eval(&z), f.eval(&z2));
        }
    }

    let mx = run_algorithm(&maxwell_first_order(), &LatticeSpec::spatial(2)).unwrap();
    let mcc = classify(&mx).unwrap();
    assert!(castellani_generator(&zero, &mcc).is_err());
}

#[test]
fn slice_transformation_matches_spacetime_transformation() {
    let l = LatticeSpec::spacetime(2, 2);
    let sys = run_algorithm(&dirac_lattice::theory::paper_g0_theory(), &LatticeSpec::spatial(2)).unwrap();
    let cat = sys.catalog();
    for seed in 0..3 {
        let c = random_configuration(seed, l);
        let p = SpacetimeParams::random(l, &mut rng(seed + 40));
        let (ne, nb) = apply_gauge(&c.e, &c.b, &p).unwrap();
        for t in 0..l.t {
            let before = slice_phase_point(&c.e, &c.b, t, cat).unwrap();
            let after = slice_phase_point(&ne, &nb, t, cat).unwrap();
            let canonical = apply_gauge_phase(&before, &GaugeParams::from_spacetime(&p, t), cat).unwrap();
            for s in 0..cat.sites() {
                let x = s + 8 * t;
                for i in 0..4 {
                    for mu in 0..4 {
                        let k = cat.q(s, g0_e(i, mu));
                        assert_eq!(after[k], canonical[k]);
                    }
                    for a in 1..=3 {
                        let k = cat.p(s, g0_e(i, a));
                        assert_eq!(after[k], canonical[k]);
                        for b in a + 1..=3 {
                            let k = cat.q(s, g0_b(i, a, b));
                            assert_eq!(after[k], canonical[k]);
                        }
                        // B_{0a} picks up ½ D̄_a Λ_0 beyond the ε̇_{0a} identification
                        let k = cat.q(s, g0_b(i, 0, a));
                        let prev = l.shift(x, a, -1);
                        let extra = (&p.lambda_mu[x][i][0] - &p.lambda_mu[prev][i][0]) * rat(1, 2);
                        assert_eq!(&after[k] - &canonical[k], extra);
                    }
                }
            }
        }
        let gp = GaugeParams::from_spacetime(&p, 0);
        assert_eq!(gp.eps_a[vidx(1, 2)][3], p.lambda_mu[3][1][2]);
    }
}

#[test]
fn diffeomorphisms_are_translations_on_shell() {
    let l = LatticeSpec::spacetime(2, 2);
    for seed in 0..10 {
        let sol = generate_solution(seed, l).unwrap();
        let mut r = rng(seed + 500);
        let xi: [Rational; 4] = std::array::from_fn(|_| sample::rational(&mut r));
        let p = diffeo_parameters(&vec![xi.clone(); l.volume()], &sol.e, &sol.b).unwrap();
        let (ne, nb) = apply_gauge(&sol.e, &sol.b, &p).unwrap();
        let (te, tb) = translation_difference(&xi, &sol.e, &sol.b).unwrap();
        for x in 0..l.volume() {
            for i in 0..4 {
                for mu in 0..4 {
                    assert_eq!(&ne.sites[x][i][mu] - &sol.e.sites[x][i][mu], te.sites[x][i][mu]);
                    for nu in 0..4 {
                        assert_eq!(&nb.sites[x][i][mu][nu] - &sol.b.sites[x][i][mu][nu], tb.sites[x][i][mu][nu]);
                    }
                }
            }
        }
    }
    // off shell the tetrad mismatch is ξ^ρ(D_μ e_ρ − D_ρ e_μ)
    let c = random_configuration(3, l);
    let xi = [int(1), rat(-1, 2), int(2), int(0)];
    let p = diffeo_parameters(&vec![xi.clone(); l.volume()], &c.e, &c.b).unwrap();
    let (ne, _) = apply_gauge(&c.e, &c.b, &p).unwrap();
    let (te, _) = translation_difference(&xi, &c.e, &c.b).unwrap();
    let mut nonzero = false;
    for x in 0..l.volume() {
        for i in 0..4 {
            for mu in 0..4 {
                let mut curl = Rational::zero();
                for rho in 0..4 {
                    let dmu = &c.e.sites[l.shift(x, mu, 1)][i][rho] - &c.e.sites[x][i][rho];
                    let drho = &c.e.sites[l.shift(x, rho, 1)][i][mu] - &c.e.sites[x][i][mu];
                    curl += &xi[rho] * (dmu - drho);
                }
                let mismatch = &ne.sites[x][i][mu] - &c.e.sites[x][i][mu] - &te.sites[x][i][mu];
                nonzero |= !mismatch.is_zero();
                assert_eq!(mismatch, curl);
            }
        }
    }
    assert!(nonzero);
}

#[test]
fn every_suite_holds_on_three_site_lattices() {
    let spec = dirac_lattice::theory::paper_g0_theory();
    let r = report::verify_with(&spec, Suite::All, 3, 2, 17, &Trials::QUICK).unwrap();
    for v in &r.verdicts {
        assert_eq!(v.status, Status::Pass, "{}: {}", v.name, v.detail);
    }
}

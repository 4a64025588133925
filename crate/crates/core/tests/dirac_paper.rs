mod common;

use common::{coeffs, Oracle};
use dirac_lattice::dirac::{
    algebra_closure, canonical_hamiltonian, classify, count_dof, dirac_bracket, dof_oracle, extended_system,
    primary_constraints, run_algorithm, Generation,
};
use dirac_lattice::lattice::{eta3, minkowski, LatticeSpec};
use dirac_lattice::linalg::{int, rank, rat, same_span, SparseMatrix};
use dirac_lattice::phase_space::LinearFunctional;
use dirac_lattice::theory::{g0_b, g0_e, paper_g0_theory};
use num_traits::Zero;

fn lattice(n: usize) -> LatticeSpec {
    LatticeSpec::spatial(n)
}

#[test]
fn primaries_match_family_by_family() {
    let spec = paper_g0_theory();
    for n in [1, 2] {
        let cs = primary_constraints(&spec, &lattice(n)).unwrap();
        assert_eq!(cs.len(), 40 * n.pow(3));
    }
    let cs = primary_constraints(&spec, &lattice(2)).unwrap();
    let om = common::omega(2);
    let o = Oracle::new(&om.catalog);
    let mut expected = Vec::new();
    for x in 0..8 {
        for i in 0..4 {
            expected.push(o.pi0(i, x));
            for a in 1..=3 {
                expected.push(o.pi0a(i, a, x));
                expected.push(o.chi_a(i, a, x));
            }
            for (a, b) in [(1, 2), (1, 3), (2, 3)] {
                // raw momentum of the stored component: twice Π^{ab}
                expected.push(o.chi_ab(i, a, b, x).scale(&int(2)));
            }
        }
    }
    let mut got: Vec<_> = cs.iter().map(|c| c.functional.clone()).collect();
    let key = |f: &LinearFunctional| f.coeffs.clone();
    got.sort_by_key(key);
    expected.sort_by_key(key);
    assert_eq!(got, expected);
    // Π_I^1 − 2 B_{I23} for a spatial internal index
    let phi = cs.iter().find(|c| c.label.origin == "e[1,1]" && c.label.site == 0).unwrap();
    assert_eq!(phi.functional.coeff(om.catalog.q(0, g0_b(1, 2, 3))), int(-2));
}

#[test]
fn hamiltonian_shape() {
    let spec = paper_g0_theory();
    assert!(canonical_hamiltonian(&spec, &lattice(1)).unwrap().quadratic.is_zero());
    let h = canonical_hamiltonian(&spec, &lattice(2)).unwrap();
    assert!(h.is_symmetric());
    let cat = &common::omega(2).catalog;
    for x in 0..8 {
        for i in 0..4 {
            assert!(h.quadratic.row(cat.p(x, g0_e(i, 0))).is_empty());
            for a in 0..4 {
                for b in a + 1..4 {
                    assert!(h.quadratic.row(cat.p(x, g0_b(i, a, b))).is_empty());
                }
            }
        }
    }
}

#[test]
fn primary_bracket_rank() {
    let spec = paper_g0_theory();
    for n in [1, 2] {
        let sys = run_algorithm(&spec, &lattice(n)).unwrap();
        let prim: Vec<_> = sys.primaries().iter().map(|c| &c.functional).collect();
        let k = dirac_lattice::dirac::bracket_matrix(&sys.omega, &prim, &prim).unwrap();
        let v = n.pow(3);
        assert_eq!(rank(&k), 24 * v);
        assert_eq!(prim.len() - rank(&k), 16 * v);
    }
}

#[test]
fn n2_full_pipeline() {
    let spec = paper_g0_theory();
    let sys = run_algorithm(&spec, &lattice(2)).unwrap();
    let cat = sys.catalog();
    let o = Oracle::new(cat);
    assert_eq!(sys.passes, 2);
    assert_eq!(sys.constraints.len(), 448);
    let secondaries: Vec<_> = sys
        .constraints
        .iter()
        .filter(|c| c.generation == Generation::Secondary(1))
        .map(|c| c.functional.clone())
        .collect();
    assert_eq!(secondaries.len(), 16 * 8);
    assert!(same_span(&coeffs(&secondaries), &coeffs(&o.secondaries())));

    // multipliers
    let prim = sys.primaries();
    for (c, v) in prim.iter().zip(&sys.multipliers.values) {
        let x = c.label.site;
        let comp = spec.component_index(&c.label.origin).unwrap();
        for i in 0..4 {
            if comp == g0_e(i, 0) || (1..=3).any(|a| comp == g0_b(i, 0, a)) {
                assert!(v.is_none(), "{}", c.label);
            }
            for a in 1..=3 {
                if comp == g0_e(i, a) {
                    assert!(v.as_ref().unwrap().is_zero(), "{}", c.label);
                }
                for b in a + 1..=3 {
                    if comp == g0_b(i, a, b) {
                        assert_eq!(v.as_ref().unwrap(), &o.lambda_ab(i, a, b, x), "{}", c.label);
                    }
                }
            }
        }
    }
    assert_eq!(sys.multipliers.free_count(), 16 * 8);

    let cc = classify(&sys).unwrap();
    assert_eq!(cc.second_class.len(), 192);
    assert_eq!(cc.first_class.len(), 256);
    assert!(same_span(
        &coeffs(&cc.first_class.iter().map(|c| c.functional.clone()).collect::<Vec<_>>()),
        &coeffs(&o.first_class())
    ));
    assert!(same_span(
        &coeffs(&cc.second_class.iter().map(|c| c.functional.clone()).collect::<Vec<_>>()),
        &coeffs(&o.second_class())
    ));

    // reducibility: 4V local divergences plus 12 global relations, minus overlaps
    let fc = o.first_class();
    let fmat = SparseMatrix::from_rows(cat.dim(), coeffs(&fc)).unwrap();
    let deps = o.dependencies();
    for r in &deps {
        let combo = fmat.vec_mul(r);
        assert!(combo.is_empty());
    }
    let dep_rank = rank(&SparseMatrix::from_rows(fc.len(), deps).unwrap());
    assert_eq!(dep_rank, 4 * 8 + 12);
    assert_eq!(cc.reducibility_basis.len(), fc.len() - rank(&fmat));
    assert_eq!(cc.reducibility_basis.len(), dep_rank);

    let counts = count_dof(&cc).unwrap();
    assert_eq!(counts.dof_exact, 12);
    assert_eq!(dof_oracle(&sys).unwrap(), 12);

    // algebra
    let table = algebra_closure(&cc).unwrap();
    assert!(table.closed);
    let om = &sys.omega;
    for x in 0..8 {
        for y in 0..8 {
            for i in 0..4 {
                for j in 0..4 {
                    for a in 1..=3 {
                        for (c, d) in [(1, 2), (1, 3), (2, 3)] {
                            let v = om.poisson(&o.chi_a(i, a, x), &o.chi_ab(j, c, d, y)).unwrap();
                            let expect = if x == y && i == j { -eta3(a, c, d) * minkowski(i) } else { 0 };
                            assert_eq!(v, int(expect));
                        }
                    }
                }
            }
        }
    }
    for f in o.first_class() {
        for g in o.first_class().iter().chain(&o.second_class()) {
            assert!(om.poisson(&f, g).unwrap().is_zero());
        }
    }

    // Dirac brackets
    let dim = cat.dim();
    for x in [0, 5] {
        for i in 0..4 {
            for a in 1..=3 {
                for b in 1..=3 {
                    let e = LinearFunctional::coordinate(dim, cat.q(x, g0_e(i, a)));
                    let p = LinearFunctional::coordinate(dim, cat.p(x, g0_e(i, b)));
                    assert_eq!(dirac_bracket(&e, &p, &cc).unwrap(), int((a == b) as i64));
                }
            }
            for (a, b, c) in [(1, 2, 3), (1, 3, 2), (2, 3, 1)] {
                let bf = LinearFunctional::coordinate(dim, cat.q(x, g0_b(i, a, b)));
                let e = LinearFunctional::coordinate(dim, cat.q(x, g0_e(i, c)));
                assert_eq!(dirac_bracket(&bf, &e, &cc).unwrap(), rat(-eta3(a, b, c) * minkowski(i), 2));
            }
        }
    }
    for chi in &cc.second_class {
        let g = LinearFunctional::new(
            dim,
            vec![(3, int(2)), (100, int(-1)), (401, rat(1, 3)), (cat.p(2, g0_b(1, 1, 2)), int(5))],
        );
        assert!(dirac_bracket(&chi.functional, &g, &cc).unwrap().is_zero());
    }

    // extended system
    let ext = extended_system(&sys, &cc).unwrap();
    for x in 0..8 {
        for i in 0..4 {
            let eq = &ext.eom[cat.q(x, g0_e(i, 0))];
            assert!(eq.drift.is_zero());
            assert_eq!(eq.slots.len(), 1);
            assert_eq!(eq.slots[0].1, int(1));
            let eq = &ext.eom[cat.p(x, g0_e(i, 0))];
            assert_eq!(eq.drift, o.psi(i, x));
            assert!(eq.slots.is_empty());
        }
    }
    // H = −Σ B^I_{0a} γ_I^a − Σ e^I_0 ψ_I
    let mut pairs = Vec::new();
    for x in 0..8 {
        for i in 0..4 {
            let e0 = LinearFunctional::coordinate(dim, cat.q(x, g0_e(i, 0))).scale(&int(-1));
            pairs.push((e0, o.psi(i, x)));
            for a in 1..=3 {
                let b0a = LinearFunctional::coordinate(dim, cat.q(x, g0_b(i, 0, a))).scale(&int(-1));
                pairs.push((b0a, o.gamma_a(i, a, x)));
            }
        }
    }
    let expected = dirac_lattice::phase_space::QuadraticFunctional::zero(dim).add_products(&pairs).unwrap();
    assert_eq!(ext.hamiltonian, expected);
}

#[test]
fn n1_has_no_secondaries() {
    let sys = run_algorithm(&paper_g0_theory(), &lattice(1)).unwrap();
    assert_eq!(sys.constraints.len(), 40);
    let cc = classify(&sys).unwrap();
    assert_eq!((cc.first_class.len(), cc.second_class.len()), (16, 24));
    assert!(cc.reducibility_basis.is_empty());
    assert_eq!(count_dof(&cc).unwrap().dof_exact, 12);
    assert_eq!(dof_oracle(&sys).unwrap(), 12);
}

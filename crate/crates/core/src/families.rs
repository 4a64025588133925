//! Named constraint families of the tetrad/two-form theory, as functionals
//! over its coordinate catalog.
//!
//! `Π^{ab}` denotes half the canonical momentum of the stored component
//! `B_{ab}` (a < b), the normalization under which expanded sums over both
//! orderings reproduce the continuum formulas.

use crate::error::{Error, Result};
use crate::lattice::{eta3, minkowski};
use crate::linalg::{int, rat, Rational, SparseVec};
use crate::phase_space::{CoordinateCatalog, LinearFunctional};
use crate::theory::{g0_b, g0_b_signed, g0_e, paper_g0_theory, PhaseVar};

pub struct Families<'a> {
    cat: &'a CoordinateCatalog,
}

impl<'a> Families<'a> {
    /// Fails with `TheoryMismatch` unless the catalog is the paper theory's.
    pub fn new(cat: &'a CoordinateCatalog) -> Result<Self> {
        if cat.labels != paper_g0_theory().component_labels() {
            return Err(Error::TheoryMismatch { expected: "paper_g0".into() });
        }
        Ok(Families { cat })
    }

    fn f(&self, e: SparseVec) -> LinearFunctional {
        LinearFunctional::new(self.cat.dim(), e)
    }

    fn fwd(&self, x: usize, a: usize, v: PhaseVar, c: Rational) -> SparseVec {
        let next = self.cat.lattice.shift(x, a, 1);
        vec![(self.cat.var(next, v), c.clone()), (self.cat.var(x, v), -c)]
    }

    fn bwd(&self, x: usize, a: usize, v: PhaseVar, c: Rational) -> SparseVec {
        let prev = self.cat.lattice.shift(x, a, -1);
        vec![(self.cat.var(x, v), c.clone()), (self.cat.var(prev, v), -c)]
    }

    /// `Π_I^0`
    pub fn pi0(&self, i: usize, x: usize) -> LinearFunctional {
        self.f(vec![(self.cat.p(x, g0_e(i, 0)), int(1))])
    }

    /// `Π_I^{0a}`
    pub fn pi0a(&self, i: usize, a: usize, x: usize) -> LinearFunctional {
        self.f(vec![(self.cat.p(x, g0_b(i, 0, a)), int(1))])
    }

    /// `D̄_a Π_I^a`
    pub fn psi(&self, i: usize, x: usize) -> LinearFunctional {
        self.f((1..=3).flat_map(|a| self.bwd(x, a, PhaseVar::P(g0_e(i, a)), int(1))).collect())
    }

    /// `η^{abc} η_II D_b e^I_c`
    pub fn psi_a(&self, i: usize, a: usize, x: usize) -> LinearFunctional {
        let mut e = Vec::new();
        for b in 1..=3 {
            for c in 1..=3 {
                let s = eta3(a, b, c) * minkowski(i);
                if s != 0 {
                    e.extend(self.fwd(x, b, PhaseVar::Q(g0_e(i, c)), int(s)));
                }
            }
        }
        self.f(e)
    }

    /// `ψ_I^a − D_b Π_I^{ab}`
    pub fn gamma_a(&self, i: usize, a: usize, x: usize) -> LinearFunctional {
        let mut e = self.psi_a(i, a, x).coeffs;
        for b in 1..=3 {
            if let Some((k, s)) = g0_b_signed(i, a, b) {
                e.extend(self.fwd(x, b, PhaseVar::P(k), rat(-s, 2)));
            }
        }
        self.f(e)
    }

    /// `Π_I^a − η^{abc} B_{Ibc}`
    pub fn chi_a(&self, i: usize, a: usize, x: usize) -> LinearFunctional {
        let mut e = vec![(self.cat.p(x, g0_e(i, a)), int(1))];
        for b in 1..=3 {
            for c in 1..=3 {
                let s = eta3(a, b, c) * minkowski(i);
                if let (true, Some((k, sign))) = (s != 0, g0_b_signed(i, b, c)) {
                    e.push((self.cat.q(x, k), int(-s * sign)));
                }
            }
        }
        self.f(e)
    }

    /// `Π_I^{ab}`
    pub fn chi_ab(&self, i: usize, a: usize, b: usize, x: usize) -> LinearFunctional {
        match g0_b_signed(i, a, b) {
            Some((k, s)) => self.f(vec![(self.cat.p(x, k), rat(s, 2))]),
            None => LinearFunctional::zero(self.cat.dim()),
        }
    }
}

//! Hand transcriptions of the paper theory's constraint families, written
//! directly in catalog coordinates without going through the engine.
#![allow(dead_code)]

use dirac_lattice::lattice::{eta3, minkowski, LatticeSpec};
use dirac_lattice::linalg::{int, normalize_sparse, rat, Rational, SparseVec};
use dirac_lattice::phase_space::{build_omega, CoordinateCatalog, LinearFunctional, SymplecticMatrix};
use dirac_lattice::theory::{g0_b, g0_b_signed, g0_e, paper_g0_theory, PhaseVar};

pub fn omega(n: usize) -> SymplecticMatrix {
    build_omega(&paper_g0_theory(), LatticeSpec::spatial(n))
}

pub struct Oracle<'a> {
    pub cat: &'a CoordinateCatalog,
}

impl<'a> Oracle<'a> {
    pub fn new(cat: &'a CoordinateCatalog) -> Self {
        Oracle { cat }
    }

    pub fn sites(&self) -> usize {
        self.cat.sites()
    }

    fn f(&self, e: Vec<(usize, Rational)>) -> LinearFunctional {
        LinearFunctional::new(self.cat.dim(), e)
    }

    /// `v(x + â) − v(x)`
    fn fwd(&self, x: usize, a: usize, v: PhaseVar, c: Rational) -> SparseVec {
        let next = self.cat.lattice.shift(x, a, 1);
        vec![(self.cat.var(next, v), c.clone()), (self.cat.var(x, v), -c)]
    }

    /// `v(x) − v(x − â)`
    fn bwd(&self, x: usize, a: usize, v: PhaseVar, c: Rational) -> SparseVec {
        let prev = self.cat.lattice.shift(x, a, -1);
        vec![(self.cat.var(x, v), c.clone()), (self.cat.var(prev, v), -c)]
    }

    /// Stored component and sign for an antisymmetric pair, `None` on the diagonal.
    fn pair(i: usize, a: usize, b: usize) -> Option<(usize, i64)> {
        g0_b_signed(i, a, b)
    }

    /// `Π_I^{ab}` with the ½ of the expanded-sum convention.
    pub fn pi_ab(&self, i: usize, a: usize, b: usize, x: usize) -> SparseVec {
        match Self::pair(i, a, b) {
            Some((k, s)) => vec![(self.cat.p(x, k), rat(s, 2))],
            None => vec![],
        }
    }

    pub fn pi0(&self, i: usize, x: usize) -> LinearFunctional {
        self.f(vec![(self.cat.p(x, g0_e(i, 0)), int(1))])
    }

    pub fn pi0a(&self, i: usize, a: usize, x: usize) -> LinearFunctional {
        self.f(vec![(self.cat.p(x, g0_b(i, 0, a)), int(1))])
    }

    /// `Π_I^a − η^{abc} B_{Ibc}`
    pub fn chi_a(&self, i: usize, a: usize, x: usize) -> LinearFunctional {
        let mut e = vec![(self.cat.p(x, g0_e(i, a)), int(1))];
        for b in 1..=3 {
            for c in 1..=3 {
                let s = eta3(a, b, c) * minkowski(i);
                if s != 0 {
                    let (k, sign) = Self::pair(i, b, c).unwrap();
                    e.push((self.cat.q(x, k), int(-s * sign)));
                }
            }
        }
        self.f(e)
    }

    /// `Π_I^{ab}`
    pub fn chi_ab(&self, i: usize, a: usize, b: usize, x: usize) -> LinearFunctional {
        self.f(self.pi_ab(i, a, b, x))
    }

    /// `D̄_a Π_I^a`
    pub fn psi(&self, i: usize, x: usize) -> LinearFunctional {
        let mut e = Vec::new();
        for a in 1..=3 {
            e.extend(self.bwd(x, a, PhaseVar::P(g0_e(i, a)), int(1)));
        }
        self.f(e)
    }

    /// `½η^{abc}(D_b e_{Ic} − D_c e_{Ib}) = η^{abc} η_II D_b e^I_c`
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
            if let Some((k, s)) = Self::pair(i, a, b) {
                e.extend(self.fwd(x, b, PhaseVar::P(k), rat(-s, 2)));
            }
        }
        self.f(e)
    }

    /// `½(D̄_a B^I_{0b} − D̄_b B^I_{0a})`
    pub fn lambda_ab(&self, i: usize, a: usize, b: usize, x: usize) -> LinearFunctional {
        let mut e = self.bwd(x, a, PhaseVar::Q(g0_b(i, 0, b)), rat(1, 2));
        e.extend(self.bwd(x, b, PhaseVar::Q(g0_b(i, 0, a)), rat(-1, 2)));
        self.f(e)
    }

    pub fn secondaries(&self) -> Vec<LinearFunctional> {
        let mut out = Vec::new();
        for x in 0..self.sites() {
            for i in 0..4 {
                out.push(self.psi(i, x));
                for a in 1..=3 {
                    out.push(self.psi_a(i, a, x));
                }
            }
        }
        out
    }

    /// `Π^0, Π^{0a}, ψ, γ^a` at every site, 16 functionals per site.
    pub fn first_class(&self) -> Vec<LinearFunctional> {
        let mut out = Vec::new();
        for x in 0..self.sites() {
            for i in 0..4 {
                out.push(self.pi0(i, x));
                for a in 1..=3 {
                    out.push(self.pi0a(i, a, x));
                }
                out.push(self.psi(i, x));
                for a in 1..=3 {
                    out.push(self.gamma_a(i, a, x));
                }
            }
        }
        out
    }

    /// Position of `γ_I^a(x)` (a = 0 for `ψ_I`) in [`Oracle::first_class`].
    pub fn first_class_index(x: usize, i: usize, a: usize) -> usize {
        x * 32 + i * 8 + 4 + a
    }

    /// `χ_I^a` and `Π_I^{ab}` at every site, 24 per site.
    pub fn second_class(&self) -> Vec<LinearFunctional> {
        let mut out = Vec::new();
        for x in 0..self.sites() {
            for i in 0..4 {
                for a in 1..=3 {
                    out.push(self.chi_a(i, a, x));
                }
                for (a, b) in [(1, 2), (1, 3), (2, 3)] {
                    out.push(self.chi_ab(i, a, b, x));
                }
            }
        }
        out
    }

    /// Local divergences `D_a γ_I^a(x) = 0` and the global sums of `ψ_I`
    /// and `γ_I^a`, as coefficient vectors over [`Oracle::first_class`].
    pub fn dependencies(&self) -> Vec<SparseVec> {
        let v = self.sites();
        let mut out = Vec::new();
        for x in 0..v {
            for i in 0..4 {
                let mut r = Vec::new();
                for a in 1..=3 {
                    let next = self.cat.lattice.shift(x, a, 1);
                    r.push((Self::first_class_index(next, i, a), int(1)));
                    r.push((Self::first_class_index(x, i, a), int(-1)));
                }
                out.push(normalize_sparse(r));
            }
        }
        for i in 0..4 {
            for a in 0..=3 {
                out.push((0..v).map(|x| (Self::first_class_index(x, i, a), int(1))).collect());
            }
        }
        out.into_iter().filter(|r: &SparseVec| !r.is_empty()).collect()
    }
}

pub fn coeffs(fs: &[LinearFunctional]) -> Vec<SparseVec> {
    fs.iter().map(|f| f.coeffs.clone()).filter(|c| !c.is_empty()).collect()
}

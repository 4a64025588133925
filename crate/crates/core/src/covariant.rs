//! Covariant phase space on a periodic spacetime lattice.
//!
//! Solutions are built from potentials, `e = D f` and
//! `B_{αβ} = D̄_α A_β − D̄_β A_α`, plus constant pieces. The symplectic
//! current pairs the two-form at `x` with the tetrad at `x + μ̂`:
//!
//! `J^μ(x) = ε^{μναβ} η_II [δ₁B^I_{αβ}(x) δ₂e^I_ν(x + μ̂) − (1 ↔ 2)]`,
//!
//! whose backward divergence splits as `δB·D_μδe + D̄_μδB·δe`, each term
//! vanishing on the linearized field equations.

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::families::Families;
use crate::gauge::{eom_residuals, SpacetimeParams};
use crate::lattice::{eps4, eta3, minkowski, LatticeSpec};
use crate::linalg::{int, rat, Rational};
use crate::phase_space::{CoordinateCatalog, SymplecticMatrix};
use crate::sample::{self, rng};
use crate::theory::maps::{zero_mat4, zero_tensor3, BGrid, TetradGrid};
use crate::theory::{g0_b, g0_e};

#[derive(Clone, Debug, PartialEq)]
pub struct SpacetimeSolution {
    pub e: TetradGrid,
    pub b: BGrid,
}

/// The theory is linear, so tangents solve the same equations.
pub type TangentSolution = SpacetimeSolution;

impl SpacetimeSolution {
    pub fn zero(l: LatticeSpec) -> Self {
        SpacetimeSolution {
            e: TetradGrid { lattice: l, sites: vec![zero_mat4(); l.volume()] },
            b: BGrid { lattice: l, sites: vec![zero_tensor3(); l.volume()] },
        }
    }

    pub fn lattice(&self) -> LatticeSpec {
        self.e.lattice
    }

    pub fn is_on_shell(&self) -> Result<bool> {
        Ok(eom_residuals(&self.e, &self.b)?.is_zero())
    }

    /// `a·self + other`
    pub fn axpy(&self, a: &Rational, other: &SpacetimeSolution) -> SpacetimeSolution {
        let mut out = other.clone();
        for (o, s) in out.e.sites.iter_mut().zip(&self.e.sites) {
            for (orow, srow) in o.iter_mut().zip(s) {
                for (ov, sv) in orow.iter_mut().zip(srow) {
                    *ov += a * sv;
                }
            }
        }
        for (o, s) in out.b.sites.iter_mut().zip(&self.b.sites) {
            for (om, sm) in o.iter_mut().zip(s) {
                for (orow, srow) in om.iter_mut().zip(sm) {
                    for (ov, sv) in orow.iter_mut().zip(srow) {
                        *ov += a * sv;
                    }
                }
            }
        }
        out
    }
}

/// Solution from explicit potentials: `f` as `[I]` fields, `a` as `[I][β]`
/// fields, plus constant tetrad and two-form pieces.
pub fn solution_from_potentials(
    l: LatticeSpec,
    f: &[Vec<Rational>],
    a: &[Vec<Vec<Rational>>],
    const_e: &[[Rational; 4]; 4],
    const_b: &[[[Rational; 4]; 4]; 4],
) -> SpacetimeSolution {
    let sites: Vec<_> = (0..l.volume())
        .into_par_iter()
        .map(|x| {
            let mut e = const_e.clone();
            let mut b = const_b.clone();
            for i in 0..4 {
                for mu in 0..4 {
                    e[i][mu] += &f[i][l.shift(x, mu, 1)] - &f[i][x];
                    for nu in 0..4 {
                        let dmu = &a[i][nu][x] - &a[i][nu][l.shift(x, mu, -1)];
                        let dnu = &a[i][mu][x] - &a[i][mu][l.shift(x, nu, -1)];
                        b[i][mu][nu] += dmu - dnu;
                    }
                }
            }
            (e, b)
        })
        .collect();
    let (es, bs) = sites.into_iter().unzip();
    SpacetimeSolution { e: TetradGrid { lattice: l, sites: es }, b: BGrid { lattice: l, sites: bs } }
}

/// Random exact solution with constant (harmonic) pieces.
pub fn generate_solution(seed: u64, l: LatticeSpec) -> Result<SpacetimeSolution> {
    if !l.spacetime {
        return Err(Error::Validation("solutions live on a spacetime lattice".into()));
    }
    let mut r = rng(seed);
    let v = l.volume();
    let f: Vec<_> = (0..4).map(|_| sample::field(&mut r, v)).collect();
    let a: Vec<Vec<_>> = (0..4).map(|_| (0..4).map(|_| sample::field(&mut r, v)).collect()).collect();
    let const_e = std::array::from_fn(|_| std::array::from_fn(|_| sample::rational(&mut r)));
    let mut const_b = zero_tensor3();
    for m in const_b.iter_mut() {
        for al in 0..4 {
            for be in al + 1..4 {
                let c = sample::rational(&mut r);
                m[be][al] = -c.clone();
                m[al][be] = c;
            }
        }
    }
    let sol = solution_from_potentials(l, &f, &a, &const_e, &const_b);
    assert!(sol.is_on_shell()?, "potential construction must solve the field equations");
    Ok(sol)
}

/// Random fields with no relation to the field equations.
pub fn random_configuration(seed: u64, l: LatticeSpec) -> SpacetimeSolution {
    let mut r = rng(seed);
    let mut s = SpacetimeSolution::zero(l);
    for site in s.e.sites.iter_mut() {
        for v in site.iter_mut().flatten() {
            *v = sample::rational(&mut r);
        }
    }
    for site in s.b.sites.iter_mut() {
        for m in site.iter_mut() {
            for al in 0..4 {
                for be in al + 1..4 {
                    let c = sample::rational(&mut r);
                    m[be][al] = -c.clone();
                    m[al][be] = c;
                }
            }
        }
    }
    s
}

/// The tangent `(−DΛ, −½(D̄_μΛ_ν − D̄_νΛ_μ))` of a gauge orbit.
pub fn pure_gauge_tangent(p: &SpacetimeParams) -> SpacetimeSolution {
    let l = p.lattice;
    let f: Vec<Vec<Rational>> = (0..4).map(|i| (0..l.volume()).map(|x| -&p.lambda[x][i]).collect()).collect();
    let a: Vec<Vec<Vec<Rational>>> = (0..4)
        .map(|i| (0..4).map(|mu| (0..l.volume()).map(|x| &p.lambda_mu[x][i][mu] * rat(-1, 2)).collect()).collect())
        .collect();
    let zero_e = std::array::from_fn(|_| std::array::from_fn(|_| Rational::zero()));
    solution_from_potentials(l, &f, &a, &zero_e, &zero_tensor3())
}

fn check_pair(a: &SpacetimeSolution, b: &SpacetimeSolution) -> Result<LatticeSpec> {
    let l = a.lattice();
    if b.lattice() != l || a.b.lattice != l || b.b.lattice != l {
        return Err(Error::Validation("configurations live on different lattices".into()));
    }
    Ok(l)
}

fn psi_at(l: LatticeSpec, sol: &SpacetimeSolution, delta: &TangentSolution, x: usize, mu: usize) -> Rational {
    let next = l.shift(x, mu, 1);
    let mut s = Rational::zero();
    for i in 0..4 {
        let eta = int(minkowski(i));
        for nu in 0..4 {
            let de = &delta.e.sites[next][i][nu];
            if de.is_zero() {
                continue;
            }
            for al in 0..4 {
                for be in 0..4 {
                    let sg = eps4(mu, nu, al, be);
                    if sg != 0 {
                        s += int(sg) * &eta * &sol.b.sites[x][i][al][be] * de;
                    }
                }
            }
        }
    }
    s
}

/// `Ψ^μ(x) = ε^{μναβ} η_II B^I_{αβ}(x) δe^I_ν(x + μ̂)` at every site.
pub fn potential_field(sol: &SpacetimeSolution, delta: &TangentSolution) -> Result<Vec<[Rational; 4]>> {
    let l = check_pair(sol, delta)?;
    Ok((0..l.volume()).into_par_iter().map(|x| std::array::from_fn(|mu| psi_at(l, sol, delta, x, mu))).collect())
}

/// `Σ_{x ∈ slice t} Ψ^0(x)`.
pub fn symplectic_potential(sol: &SpacetimeSolution, delta: &TangentSolution, t: usize) -> Result<Rational> {
    let l = check_pair(sol, delta)?;
    let sites: Vec<usize> = l.slice_sites(t).collect();
    Ok(sites.par_iter().map(|&x| psi_at(l, sol, delta, x, 0)).collect::<Vec<_>>().into_iter().sum())
}

/// `J^μ(x)` for the tangent pair.
pub fn current_field(d1: &TangentSolution, d2: &TangentSolution) -> Result<Vec<[Rational; 4]>> {
    let a = potential_field(d1, d2)?;
    let b = potential_field(d2, d1)?;
    Ok(a.into_iter().zip(b).map(|(p, q)| std::array::from_fn(|mu| &p[mu] - &q[mu])).collect())
}

/// `ω(d1, d2) = Σ_{slice t} J^0`, which reads
/// `Σ η_II η^{abc} [δ₁B^I_{bc}(t, x) δ₂e^I_a(t + 1, x) − (1 ↔ 2)]`.
pub fn omega_on_slice(d1: &TangentSolution, d2: &TangentSolution, t: usize) -> Result<Rational> {
    Ok(symplectic_potential(d1, d2, t)? - symplectic_potential(d2, d1, t)?)
}

/// `D̄_μ J^μ` at every site.
pub fn current_divergence_check(d1: &TangentSolution, d2: &TangentSolution) -> Result<Vec<Rational>> {
    let l = check_pair(d1, d2)?;
    let j = current_field(d1, d2)?;
    Ok((0..l.volume()).map(|x| (0..4).map(|mu| &j[x][mu] - &j[l.shift(x, mu, -1)][mu]).sum()).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureVerdict {
    /// `ω(d_i, d_j)` computed through the potential at the first base solution.
    pub values: Vec<Vec<Rational>>,
    pub antisymmetric: bool,
    pub base_independent: bool,
    pub matches_current: bool,
}

impl ClosureVerdict {
    pub fn passed(&self) -> bool {
        self.antisymmetric && self.base_independent && self.matches_current
    }
}

/// `ω_s(d1, d2) = [Ψ(s + d1; d2) − Ψ(s; d2)] − [Ψ(s + d2; d1) − Ψ(s; d1)]`.
fn omega_via_potential(
    s: &SpacetimeSolution,
    d1: &TangentSolution,
    d2: &TangentSolution,
    t: usize,
) -> Result<Rational> {
    let one = int(1);
    let s1 = d1.axpy(&one, s);
    let s2 = d2.axpy(&one, s);
    Ok(symplectic_potential(&s1, d2, t)?
        - symplectic_potential(s, d2, t)?
        - (symplectic_potential(&s2, d1, t)? - symplectic_potential(s, d1, t)?))
}

/// Checks that ω is a constant antisymmetric form on the span of `basis`:
/// the potential route gives the same matrix at both base solutions and
/// agrees with the current route.
pub fn closure_check(
    basis: &[TangentSolution],
    bases: (&SpacetimeSolution, &SpacetimeSolution),
    t: usize,
) -> Result<ClosureVerdict> {
    let n = basis.len();
    let mut values = vec![vec![Rational::zero(); n]; n];
    let (mut anti, mut indep, mut matches) = (true, true, true);
    for i in 0..n {
        for j in 0..n {
            let v = omega_via_potential(bases.0, &basis[i], &basis[j], t)?;
            indep &= v == omega_via_potential(bases.1, &basis[i], &basis[j], t)?;
            matches &= v == omega_on_slice(&basis[i], &basis[j], t)?;
            values[i][j] = v;
        }
    }
    for i in 0..n {
        for j in 0..n {
            anti &= values[i][j] == -values[j][i].clone();
        }
    }
    Ok(ClosureVerdict { values, antisymmetric: anti, base_independent: indep, matches_current: matches })
}

/// A smeared first-class constraint of the tetrad/two-form theory.
/// Vector test fields are stored at `3·I + (a − 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmearedGenerator {
    /// `γ_I[C] = Σ C^I D̄_a Π_I^a`
    Gamma(Vec<Vec<Rational>>),
    /// `γ_I^a[C_a] = Σ C^I_a γ_I^a`
    GammaA(Vec<Vec<Rational>>),
    /// `γ_I^0[D] = Σ D^I Π_I^0`
    Gamma0(Vec<Vec<Rational>>),
    /// `γ_I^{0a}[D_a] = Σ D^I_a Π_I^{0a}`
    Gamma0a(Vec<Vec<Rational>>),
}

impl SmearedGenerator {
    pub fn from_name(name: &str, fields: Vec<Vec<Rational>>) -> Result<Self> {
        let (g, want) = match name {
            "gamma" => (SmearedGenerator::Gamma(fields), 4),
            "gamma_a" => (SmearedGenerator::GammaA(fields), 12),
            "gamma_0" => (SmearedGenerator::Gamma0(fields), 4),
            "gamma_0a" => (SmearedGenerator::Gamma0a(fields), 12),
            _ => return Err(Error::UnknownGenerator(name.into())),
        };
        if g.fields().len() != want {
            return Err(Error::DimensionMismatch { expected: want, found: g.fields().len() });
        }
        Ok(g)
    }

    pub fn fields(&self) -> &[Vec<Rational>] {
        match self {
            SmearedGenerator::Gamma(f)
            | SmearedGenerator::GammaA(f)
            | SmearedGenerator::Gamma0(f)
            | SmearedGenerator::Gamma0a(f) => f,
        }
    }

    /// The smeared constraint as a functional over the catalog.
    pub fn functional(&self, cat: &CoordinateCatalog) -> Result<crate::phase_space::LinearFunctional> {
        let fam = Families::new(cat)?;
        let mut g = crate::phase_space::LinearFunctional::zero(cat.dim());
        for x in 0..cat.sites() {
            for i in 0..4 {
                match self {
                    SmearedGenerator::Gamma(c) => g = g.add_scaled(&c[i][x], &fam.psi(i, x)),
                    SmearedGenerator::Gamma0(d) => g = g.add_scaled(&d[i][x], &fam.pi0(i, x)),
                    SmearedGenerator::GammaA(c) => {
                        for a in 1..=3 {
                            g = g.add_scaled(&c[3 * i + a - 1][x], &fam.gamma_a(i, a, x));
                        }
                    }
                    SmearedGenerator::Gamma0a(d) => {
                        for a in 1..=3 {
                            g = g.add_scaled(&d[3 * i + a - 1][x], &fam.pi0a(i, a, x));
                        }
                    }
                }
            }
        }
        Ok(g)
    }
}

/// `z ↦ base + ε·delta + O(ε²)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstOrder {
    pub base: Vec<Rational>,
    pub delta: Vec<Rational>,
}

impl FirstOrder {
    pub fn at(&self, eps: &Rational) -> Vec<Rational> {
        self.base.iter().zip(&self.delta).map(|(b, d)| b + eps * d).collect()
    }
}

/// Motion generated by a smeared constraint, written out directly:
/// `γ[C]` moves `e_a` by `−D_a C`; `γ^a[C_a]` moves `Π^a` by
/// `−½η^{abc}(D̄_b C_c − D̄_c C_b)` and `B_{ab}` by `−½(D̄_a C_b − D̄_b C_a)`;
/// `γ^0[D]` moves `e_0` by `D`; `γ^{0a}[D_a]` moves `B_{0a}` by `D_a`.
pub fn smeared_flow(which: &SmearedGenerator, point: &[Rational], cat: &CoordinateCatalog) -> Result<FirstOrder> {
    Families::new(cat)?;
    if point.len() != cat.dim() {
        return Err(Error::DimensionMismatch { expected: cat.dim(), found: point.len() });
    }
    let l = cat.lattice;
    for f in which.fields() {
        if f.len() != cat.sites() {
            return Err(Error::DimensionMismatch { expected: cat.sites(), found: f.len() });
        }
    }
    let mut delta = vec![Rational::zero(); cat.dim()];
    for x in 0..cat.sites() {
        let fw = |f: &[Rational], a: usize| &f[l.shift(x, a, 1)] - &f[x];
        let bw = |f: &[Rational], a: usize| &f[x] - &f[l.shift(x, a, -1)];
        for i in 0..4 {
            match which {
                SmearedGenerator::Gamma(c) => {
                    for a in 1..=3 {
                        delta[cat.q(x, g0_e(i, a))] = -fw(&c[i], a);
                    }
                }
                SmearedGenerator::Gamma0(d) => delta[cat.q(x, g0_e(i, 0))] = d[i][x].clone(),
                SmearedGenerator::Gamma0a(d) => {
                    for a in 1..=3 {
                        delta[cat.q(x, g0_b(i, 0, a))] = d[3 * i + a - 1][x].clone();
                    }
                }
                SmearedGenerator::GammaA(c) => {
                    let low = |k: usize| -> Vec<Rational> { c[k].iter().map(|v| v * int(minkowski(i))).collect() };
                    for a in 1..=3 {
                        let mut dp = Rational::zero();
                        for b in 1..=3 {
                            for cc in 1..=3 {
                                let s = eta3(a, b, cc);
                                if s != 0 {
                                    let term = bw(&low(3 * i + cc - 1), b) - bw(&low(3 * i + b - 1), cc);
                                    dp -= int(s) * rat(1, 2) * term;
                                }
                            }
                        }
                        delta[cat.p(x, g0_e(i, a))] = dp;
                        for b in a + 1..=3 {
                            let v = (bw(&c[3 * i + b - 1], a) - bw(&c[3 * i + a - 1], b)) * rat(-1, 2);
                            delta[cat.q(x, g0_b(i, a, b))] = v;
                        }
                    }
                }
            }
        }
    }
    Ok(FirstOrder { base: point.to_vec(), delta })
}

/// The same motion through the canonical bracket: `δz = {z, G}`.
pub fn canonical_flow(which: &SmearedGenerator, point: &[Rational], om: &SymplecticMatrix) -> Result<FirstOrder> {
    let g = which.functional(&om.catalog)?;
    let mut delta = vec![Rational::zero(); om.dim()];
    for (i, v) in om.flow(&g)? {
        delta[i] = v;
    }
    Ok(FirstOrder { base: point.to_vec(), delta })
}

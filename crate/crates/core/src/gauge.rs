//! Gauge transformations of the tetrad/two-form theory.
//!
//! Differences on the tetrad are forward and differences on the two-form
//! are backward, so that `Σ ε^{αβμν} B_{αβ} D_μ e_ν` is exactly invariant:
//! the backward difference is minus the adjoint of the forward one, and
//! forward differences commute.

use num_traits::Zero;
use rayon::prelude::*;

use crate::dirac::ClassifiedConstraints;
use crate::error::{Error, Result};
use crate::families::Families;
use crate::lattice::{eps4, eta3, minkowski, LatticeSpec};
use crate::linalg::{int, normalize_sparse, rat, Rational, RowSpan, SparseVec};
use crate::phase_space::{CoordinateCatalog, LinearFunctional};
use crate::sample::{self, SampleRng};
use crate::theory::maps::{zero_mat4, zero_tensor3, BGrid, Mat4, Tensor3, TetradGrid};
use crate::theory::{g0_b, g0_e};

/// Smearing fields of the gauge generator on one spatial slice.
///
/// Time derivatives of the parameters are independent fields here.
/// Vector parameters are stored at `3·I + (a − 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeParams {
    pub lattice: LatticeSpec,
    pub eps0: Vec<Vec<Rational>>,
    pub eps0_dot: Vec<Vec<Rational>>,
    pub eps: Vec<Vec<Rational>>,
    pub eps0a: Vec<Vec<Rational>>,
    pub eps0a_dot: Vec<Vec<Rational>>,
    pub eps_a: Vec<Vec<Rational>>,
}

pub fn vidx(i: usize, a: usize) -> usize {
    3 * i + a - 1
}

impl GaugeParams {
    pub fn zero(lattice: LatticeSpec) -> Self {
        let v = lattice.volume();
        let z = |k: usize| vec![vec![Rational::zero(); v]; k];
        GaugeParams { lattice, eps0: z(4), eps0_dot: z(4), eps: z(4), eps0a: z(12), eps0a_dot: z(12), eps_a: z(12) }
    }

    pub fn random(lattice: LatticeSpec, rng: &mut SampleRng) -> Self {
        let v = lattice.volume();
        let mut f = |k: usize| (0..k).map(|_| sample::field(rng, v)).collect::<Vec<_>>();
        GaugeParams { lattice, eps0: f(4), eps0_dot: f(4), eps: f(4), eps0a: f(12), eps0a_dot: f(12), eps_a: f(12) }
    }

    /// Slice `t` of spacetime parameters under `ε_0 = −ε = −Λ`,
    /// `ε_a = −2ε_{0a} = Λ_a`, with `∂_0` realized as `D_0` on `ε_0` and as
    /// `D̄_0` on `ε_{0a}` (the placements of `e_0` and `B_{0a}`).
    pub fn from_spacetime(p: &SpacetimeParams, t: usize) -> Self {
        let l4 = p.lattice;
        let slice = LatticeSpec::spatial(l4.n);
        let mut out = GaugeParams::zero(slice);
        let vol = slice.volume();
        for s in 0..vol {
            let x = s + vol * t;
            let next = l4.shift(x, 0, 1);
            let prev = l4.shift(x, 0, -1);
            for i in 0..4 {
                out.eps[i][s] = p.lambda[x][i].clone();
                out.eps0[i][s] = -&p.lambda[x][i];
                out.eps0_dot[i][s] = &p.lambda[x][i] - &p.lambda[next][i];
                for a in 1..=3 {
                    let k = vidx(i, a);
                    out.eps_a[k][s] = p.lambda_mu[x][i][a].clone();
                    out.eps0a[k][s] = -&p.lambda_mu[x][i][a] * rat(1, 2);
                    out.eps0a_dot[k][s] = (&p.lambda_mu[prev][i][a] - &p.lambda_mu[x][i][a]) * rat(1, 2);
                }
            }
        }
        out
    }
}

/// `Λ^I` and `Λ^I_μ` (stored `[I][μ]`) on a spacetime lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpacetimeParams {
    pub lattice: LatticeSpec,
    pub lambda: Vec<[Rational; 4]>,
    pub lambda_mu: Vec<Mat4>,
}

impl SpacetimeParams {
    pub fn zero(lattice: LatticeSpec) -> Self {
        let v = lattice.volume();
        SpacetimeParams {
            lattice,
            lambda: vec![std::array::from_fn(|_| Rational::zero()); v],
            lambda_mu: vec![zero_mat4(); v],
        }
    }

    pub fn random(lattice: LatticeSpec, rng: &mut SampleRng) -> Self {
        let v = lattice.volume();
        let lambda = (0..v).map(|_| std::array::from_fn(|_| sample::rational(rng))).collect();
        let lambda_mu =
            (0..v).map(|_| std::array::from_fn(|_| std::array::from_fn(|_| sample::rational(rng)))).collect();
        SpacetimeParams { lattice, lambda, lambda_mu }
    }
}

fn check_catalog(p: &GaugeParams, cat: &CoordinateCatalog) -> Result<()> {
    if p.lattice != cat.lattice {
        return Err(Error::CatalogMismatch);
    }
    Ok(())
}

/// `G = Σ_x [ε̇_0 Π^0 + ε̇_{0a} Π^{0a} + ε ψ + ε_a γ^a]`.
pub fn castellani_generator(p: &GaugeParams, cc: &ClassifiedConstraints) -> Result<LinearFunctional> {
    let cat = &cc.omega.catalog;
    let fam = Families::new(cat)?;
    check_catalog(p, cat)?;
    let span = RowSpan::from_rows(&cc.first_class.iter().map(|c| c.functional.coeffs.clone()).collect::<Vec<_>>());
    let mut g = LinearFunctional::zero(cat.dim());
    for x in 0..cat.sites() {
        for i in 0..4 {
            let terms = std::iter::once((p.eps0_dot[i][x].clone(), fam.pi0(i, x)))
                .chain(std::iter::once((p.eps[i][x].clone(), fam.psi(i, x))))
                .chain((1..=3).map(|a| (p.eps0a_dot[vidx(i, a)][x].clone(), fam.pi0a(i, a, x))))
                .chain((1..=3).map(|a| (p.eps_a[vidx(i, a)][x].clone(), fam.gamma_a(i, a, x))));
            for (c, f) in terms {
                if !span.contains(&f.coeffs) {
                    return Err(Error::TheoryMismatch { expected: "paper_g0".into() });
                }
                g = g.add_scaled(&c, &f);
            }
        }
    }
    Ok(g)
}

/// The phase-space gauge transformation, component by component:
/// `δe_0 = ε̇_0`, `δe_a = −D_a ε`, `δB_{0a} = ε̇_{0a}`,
/// `δB_{ab} = −½(D̄_a ε_b − D̄_b ε_a)`, `δΠ^a = −η^{abc} η_II D̄_b ε_c`.
pub fn gauge_variation(p: &GaugeParams, cat: &CoordinateCatalog) -> Result<SparseVec> {
    Families::new(cat)?;
    check_catalog(p, cat)?;
    let l = cat.lattice;
    let per_site: Vec<SparseVec> = (0..cat.sites())
        .into_par_iter()
        .map(|x| {
            let fw = |f: &[Rational], a: usize| &f[l.shift(x, a, 1)] - &f[x];
            let bw = |f: &[Rational], a: usize| &f[x] - &f[l.shift(x, a, -1)];
            let mut out = Vec::new();
            for i in 0..4 {
                out.push((cat.q(x, g0_e(i, 0)), p.eps0_dot[i][x].clone()));
                for a in 1..=3 {
                    out.push((cat.q(x, g0_e(i, a)), -fw(&p.eps[i], a)));
                    out.push((cat.q(x, g0_b(i, 0, a)), p.eps0a_dot[vidx(i, a)][x].clone()));
                    for b in a + 1..=3 {
                        let v = (bw(&p.eps_a[vidx(i, b)], a) - bw(&p.eps_a[vidx(i, a)], b)) * rat(-1, 2);
                        out.push((cat.q(x, g0_b(i, a, b)), v));
                    }
                    let mut dp = Rational::zero();
                    for b in 1..=3 {
                        for c in 1..=3 {
                            let s = eta3(a, b, c) * minkowski(i);
                            if s != 0 {
                                dp -= int(s) * bw(&p.eps_a[vidx(i, c)], b);
                            }
                        }
                    }
                    out.push((cat.p(x, g0_e(i, a)), dp));
                }
            }
            out
        })
        .collect();
    Ok(normalize_sparse(per_site.into_iter().flatten().collect()))
}

/// `z + δz`. The transformation is linear in the fields, so this is exact.
pub fn apply_gauge_phase(z: &[Rational], p: &GaugeParams, cat: &CoordinateCatalog) -> Result<Vec<Rational>> {
    if z.len() != cat.dim() {
        return Err(Error::DimensionMismatch { expected: cat.dim(), found: z.len() });
    }
    let mut out = z.to_vec();
    for (i, v) in gauge_variation(p, cat)? {
        out[i] += v;
    }
    Ok(out)
}

fn same_lattice(a: LatticeSpec, b: LatticeSpec) -> Result<()> {
    if a != b {
        return Err(Error::Validation("fields and parameters live on different lattices".into()));
    }
    if !a.spacetime {
        return Err(Error::Validation("spacetime fields need a spacetime lattice".into()));
    }
    Ok(())
}

/// `e → e − DΛ`, `B_{μν} → B_{μν} − ½(D̄_μ Λ_ν − D̄_ν Λ_μ)`.
pub fn apply_gauge(e: &TetradGrid, b: &BGrid, p: &SpacetimeParams) -> Result<(TetradGrid, BGrid)> {
    same_lattice(e.lattice, b.lattice)?;
    same_lattice(e.lattice, p.lattice)?;
    let l = e.lattice;
    let half = rat(1, 2);
    let sites: Vec<(Mat4, Tensor3)> = (0..l.volume())
        .into_par_iter()
        .map(|x| {
            let mut ne = e.sites[x].clone();
            let mut nb = b.sites[x].clone();
            for i in 0..4 {
                for mu in 0..4 {
                    ne[i][mu] -= &p.lambda[l.shift(x, mu, 1)][i] - &p.lambda[x][i];
                    for nu in 0..4 {
                        let dmu = &p.lambda_mu[x][i][nu] - &p.lambda_mu[l.shift(x, mu, -1)][i][nu];
                        let dnu = &p.lambda_mu[x][i][mu] - &p.lambda_mu[l.shift(x, nu, -1)][i][mu];
                        nb[i][mu][nu] -= (dmu - dnu) * &half;
                    }
                }
            }
            (ne, nb)
        })
        .collect();
    let (es, bs) = sites.into_iter().unzip();
    Ok((TetradGrid { lattice: l, sites: es }, BGrid { lattice: l, sites: bs }))
}

/// `S = ½ Σ_x ε^{αβμν} B^I_{αβ} (D_μ e_{νI} − D_ν e_{μI})`.
pub fn discrete_action(e: &TetradGrid, b: &BGrid) -> Result<Rational> {
    same_lattice(e.lattice, b.lattice)?;
    let l = e.lattice;
    let parts: Vec<Rational> = (0..l.volume())
        .into_par_iter()
        .map(|x| {
            let mut s = Rational::zero();
            for i in 0..4 {
                let eta = int(minkowski(i));
                for mu in 0..4 {
                    let next = l.shift(x, mu, 1);
                    for nu in 0..4 {
                        let de = &e.sites[next][i][nu] - &e.sites[x][i][nu];
                        if de.is_zero() {
                            continue;
                        }
                        for al in 0..4 {
                            for be in 0..4 {
                                let sg = eps4(al, be, mu, nu);
                                if sg != 0 {
                                    s += int(sg) * &eta * &b.sites[x][i][al][be] * &de;
                                }
                            }
                        }
                    }
                }
            }
            s
        })
        .collect();
    Ok(parts.into_iter().sum())
}

/// `S(transformed) − S(original)`.
pub fn check_action_invariance(e: &TetradGrid, b: &BGrid, p: &SpacetimeParams) -> Result<Rational> {
    let (ne, nb) = apply_gauge(e, b, p)?;
    Ok(discrete_action(&ne, &nb)? - discrete_action(e, b)?)
}

/// `Λ^I = −ξ^ρ e^I_ρ`, `Λ^I_μ = −2 ξ^ρ B^I_{ρμ}`, pointwise.
pub fn diffeo_parameters(xi: &[[Rational; 4]], e: &TetradGrid, b: &BGrid) -> Result<SpacetimeParams> {
    same_lattice(e.lattice, b.lattice)?;
    let l = e.lattice;
    if xi.len() != l.volume() {
        return Err(Error::DimensionMismatch { expected: l.volume(), found: xi.len() });
    }
    let mut p = SpacetimeParams::zero(l);
    for x in 0..l.volume() {
        for i in 0..4 {
            for rho in 0..4 {
                p.lambda[x][i] -= &xi[x][rho] * &e.sites[x][i][rho];
                for mu in 0..4 {
                    p.lambda_mu[x][i][mu] -= int(2) * &xi[x][rho] * &b.sites[x][i][rho][mu];
                }
            }
        }
    }
    Ok(p)
}

/// `(ξ^ρ D_ρ e, ξ^ρ D̄_ρ B)` for a constant `ξ`.
pub fn translation_difference(xi: &[Rational; 4], e: &TetradGrid, b: &BGrid) -> Result<(TetradGrid, BGrid)> {
    same_lattice(e.lattice, b.lattice)?;
    let l = e.lattice;
    let sites: Vec<(Mat4, Tensor3)> = (0..l.volume())
        .into_par_iter()
        .map(|x| {
            let mut de = zero_mat4();
            let mut db = zero_tensor3();
            for rho in (0..4).filter(|r| !xi[*r].is_zero()) {
                let (next, prev) = (l.shift(x, rho, 1), l.shift(x, rho, -1));
                for i in 0..4 {
                    for mu in 0..4 {
                        de[i][mu] += &xi[rho] * (&e.sites[next][i][mu] - &e.sites[x][i][mu]);
                        for nu in 0..4 {
                            db[i][mu][nu] += &xi[rho] * (&b.sites[x][i][mu][nu] - &b.sites[prev][i][mu][nu]);
                        }
                    }
                }
            }
            (de, db)
        })
        .collect();
    let (es, bs) = sites.into_iter().unzip();
    Ok((TetradGrid { lattice: l, sites: es }, BGrid { lattice: l, sites: bs }))
}

/// Field-equation residuals: the tetrad curl `D_μ e_ν − D_ν e_μ` (stored
/// `[I][μ][ν]`) and `ε^{αβμν} D̄_μ B_{αβ}` (stored `[I][ν]`).
#[derive(Clone, Debug, PartialEq)]
pub struct EomResiduals {
    pub curl_e: Vec<Tensor3>,
    pub div_b: Vec<Mat4>,
}

impl EomResiduals {
    pub fn is_zero(&self) -> bool {
        self.curl_e.iter().flatten().flatten().flatten().all(Zero::is_zero)
            && self.div_b.iter().flatten().flatten().all(Zero::is_zero)
    }
}

pub fn eom_residuals(e: &TetradGrid, b: &BGrid) -> Result<EomResiduals> {
    same_lattice(e.lattice, b.lattice)?;
    let l = e.lattice;
    let sites: Vec<(Tensor3, Mat4)> = (0..l.volume())
        .into_par_iter()
        .map(|x| {
            let mut curl = zero_tensor3();
            let mut div = zero_mat4();
            for i in 0..4 {
                for mu in 0..4 {
                    let next = l.shift(x, mu, 1);
                    let prev = l.shift(x, mu, -1);
                    for nu in 0..4 {
                        curl[i][mu][nu] += &e.sites[next][i][nu] - &e.sites[x][i][nu];
                        curl[i][nu][mu] -= &e.sites[next][i][nu] - &e.sites[x][i][nu];
                        for al in 0..4 {
                            for be in 0..4 {
                                let s = eps4(al, be, mu, nu);
                                if s != 0 {
                                    div[i][nu] += int(s) * (&b.sites[x][i][al][be] - &b.sites[prev][i][al][be]);
                                }
                            }
                        }
                    }
                }
            }
            (curl, div)
        })
        .collect();
    let (curl_e, div_b) = sites.into_iter().unzip();
    Ok(EomResiduals { curl_e, div_b })
}

/// Phase point of the tetrad/two-form theory on time slice `t`: configuration
/// from the grids, momenta on the primary surface (`Π^a = η^{abc} B_{bc}`,
/// all others zero).
pub fn slice_phase_point(e: &TetradGrid, b: &BGrid, t: usize, cat: &CoordinateCatalog) -> Result<Vec<Rational>> {
    Families::new(cat)?;
    let vol = cat.sites();
    if e.lattice.n != cat.lattice.n || t >= e.lattice.t {
        return Err(Error::Validation("slice does not match the catalog".into()));
    }
    let mut z = vec![Rational::zero(); cat.dim()];
    for s in 0..vol {
        let x = s + vol * t;
        for i in 0..4 {
            for mu in 0..4 {
                z[cat.q(s, g0_e(i, mu))] = e.sites[x][i][mu].clone();
                for nu in mu + 1..4 {
                    z[cat.q(s, g0_b(i, mu, nu))] = b.sites[x][i][mu][nu].clone();
                }
            }
            for a in 1..=3 {
                let mut pi = Rational::zero();
                for bb in 1..=3 {
                    for c in 1..=3 {
                        let sg = eta3(a, bb, c) * minkowski(i);
                        if sg != 0 {
                            pi += int(sg) * &b.sites[x][i][bb][c];
                        }
                    }
                }
                z[cat.p(s, g0_e(i, a))] = pi;
            }
        }
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::rng;

    fn random_fields(l: LatticeSpec, r: &mut SampleRng) -> (TetradGrid, BGrid) {
        let v = l.volume();
        let e = TetradGrid {
            lattice: l,
            sites: (0..v).map(|_| std::array::from_fn(|_| std::array::from_fn(|_| sample::rational(r)))).collect(),
        };
        let mut bs = vec![zero_tensor3(); v];
        for site in bs.iter_mut() {
            for i in 0..4 {
                for a in 0..4 {
                    for c in a + 1..4 {
                        let val = sample::rational(r);
                        site[i][c][a] = -val.clone();
                        site[i][a][c] = val;
                    }
                }
            }
        }
        (e, BGrid { lattice: l, sites: bs })
    }

    #[test]
    fn zero_params_change_nothing() {
        let l = LatticeSpec::spacetime(2, 2);
        let (e, b) = random_fields(l, &mut rng(1));
        let (ne, nb) = apply_gauge(&e, &b, &SpacetimeParams::zero(l)).unwrap();
        assert_eq!((ne, nb), (e.clone(), b.clone()));
        assert!(check_action_invariance(&e, &b, &SpacetimeParams::zero(l)).unwrap().is_zero());
    }

    #[test]
    fn constant_lambda_is_trivial() {
        let l = LatticeSpec::spacetime(3, 2);
        let (e, b) = random_fields(l, &mut rng(2));
        let mut p = SpacetimeParams::zero(l);
        for x in 0..l.volume() {
            p.lambda[x] = [int(1), int(-2), rat(1, 3), int(4)];
            p.lambda_mu[x][2][1] = int(7);
        }
        let (ne, nb) = apply_gauge(&e, &b, &p).unwrap();
        assert_eq!((ne, nb), (e, b));
    }

    #[test]
    fn zero_b_gives_zero_action() {
        let l = LatticeSpec::spacetime(2, 2);
        let (e, _) = random_fields(l, &mut rng(3));
        let b = BGrid { lattice: l, sites: vec![zero_tensor3(); l.volume()] };
        assert!(discrete_action(&e, &b).unwrap().is_zero());
    }

    #[test]
    fn residuals_are_gauge_invariant() {
        let l = LatticeSpec::spacetime(2, 2);
        let mut r = rng(4);
        let (e, b) = random_fields(l, &mut r);
        let p = SpacetimeParams::random(l, &mut r);
        let (ne, nb) = apply_gauge(&e, &b, &p).unwrap();
        assert_eq!(eom_residuals(&e, &b).unwrap(), eom_residuals(&ne, &nb).unwrap());
    }

    #[test]
    fn zero_xi_gives_zero_params() {
        let l = LatticeSpec::spacetime(2, 2);
        let (e, b) = random_fields(l, &mut rng(5));
        let xi = vec![std::array::from_fn(|_| Rational::zero()); l.volume()];
        assert_eq!(diffeo_parameters(&xi, &e, &b).unwrap(), SpacetimeParams::zero(l));
    }
}

//! Canonical coordinates, the constant symplectic matrix, and brackets of
//! linear and quadratic functionals.
//!
//! Coordinates are site-major. Within a site the configuration components
//! come first, then their momenta: `flat = site·2n + k` for `q_k` and
//! `site·2n + n + k` for `p_k`, with `n` the per-site configuration
//! dimension. Antisymmetric pairs are stored once, so `{q_k(x), p_k(y)} = δ_xy`
//! for every stored component.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::linalg::{axpy, fmt_rational, normalize_sparse, sparse_dot, Rational, SparseMatrix, SparseVec};
use crate::theory::{PhaseVar, Slot, Stencil, TheorySpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateCatalog {
    pub lattice: LatticeSpec,
    pub labels: Vec<String>,
}

impl CoordinateCatalog {
    pub fn new(spec: &TheorySpec, lattice: LatticeSpec) -> Self {
        CoordinateCatalog { lattice, labels: spec.component_labels() }
    }

    pub fn config_dim(&self) -> usize {
        self.labels.len()
    }

    pub fn sites(&self) -> usize {
        self.lattice.volume()
    }

    pub fn dim(&self) -> usize {
        2 * self.config_dim() * self.sites()
    }

    pub fn q(&self, site: usize, comp: usize) -> usize {
        site * 2 * self.config_dim() + comp
    }

    pub fn p(&self, site: usize, comp: usize) -> usize {
        site * 2 * self.config_dim() + self.config_dim() + comp
    }

    pub fn var(&self, site: usize, v: PhaseVar) -> usize {
        match v {
            PhaseVar::Q(k) => self.q(site, k),
            PhaseVar::P(k) => self.p(site, k),
        }
    }

    /// Inverse of [`CoordinateCatalog::var`].
    pub fn decode(&self, flat: usize) -> (usize, PhaseVar) {
        let n = self.config_dim();
        let site = flat / (2 * n);
        let r = flat % (2 * n);
        if r < n {
            (site, PhaseVar::Q(r))
        } else {
            (site, PhaseVar::P(r - n))
        }
    }

    /// Canonical partner and the sign of `{z_i, z_partner}`.
    pub fn partner(&self, flat: usize) -> (usize, i64) {
        let n = self.config_dim();
        if flat % (2 * n) < n {
            (flat + n, 1)
        } else {
            (flat - n, -1)
        }
    }

    pub fn label(&self, flat: usize) -> String {
        let (site, v) = self.decode(flat);
        let c = self.lattice.coords(site).0;
        match v {
            PhaseVar::Q(k) => format!("{}@({},{},{})", self.labels[k], c[1], c[2], c[3]),
            PhaseVar::P(k) => format!("P:{}@({},{},{})", self.labels[k], c[1], c[2], c[3]),
        }
    }

    /// The slot `(S v)(site)` as a linear form over the catalog.
    pub fn slot_form(&self, site: usize, slot: &Slot) -> SparseVec {
        match slot.stencil {
            Stencil::Id => vec![(self.var(site, slot.var), Rational::one())],
            Stencil::D(a) => {
                let next = self.lattice.shift(site, a, 1);
                normalize_sparse(vec![
                    (self.var(next, slot.var), Rational::one()),
                    (self.var(site, slot.var), -Rational::one()),
                ])
            }
        }
    }
}

/// `Σ_i c_i z_i + constant`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearFunctional {
    pub dim: usize,
    pub coeffs: SparseVec,
    pub constant: Rational,
}

impl LinearFunctional {
    pub fn zero(dim: usize) -> Self {
        LinearFunctional { dim, coeffs: Vec::new(), constant: Rational::zero() }
    }

    pub fn new(dim: usize, entries: Vec<(usize, Rational)>) -> Self {
        LinearFunctional { dim, coeffs: normalize_sparse(entries), constant: Rational::zero() }
    }

    pub fn coordinate(dim: usize, i: usize) -> Self {
        LinearFunctional { dim, coeffs: vec![(i, Rational::one())], constant: Rational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }

    pub fn add_scaled(&self, s: &Rational, other: &LinearFunctional) -> LinearFunctional {
        LinearFunctional {
            dim: self.dim,
            coeffs: axpy(&self.coeffs, s, &other.coeffs),
            constant: &self.constant + s * &other.constant,
        }
    }

    pub fn scale(&self, s: &Rational) -> LinearFunctional {
        LinearFunctional::zero(self.dim).add_scaled(s, self)
    }

    pub fn eval(&self, z: &[Rational]) -> Rational {
        self.coeffs.iter().fold(self.constant.clone(), |acc, (i, c)| acc + c * &z[*i])
    }

    pub fn coeff(&self, i: usize) -> Rational {
        match self.coeffs.binary_search_by_key(&i, |e| e.0) {
            Ok(k) => self.coeffs[k].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn render(&self, cat: &CoordinateCatalog) -> String {
        let mut parts: Vec<String> =
            self.coeffs.iter().map(|(i, c)| format!("{}*{}", fmt_rational(c), cat.label(*i))).collect();
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push(fmt_rational(&self.constant));
        }
        parts.join(" + ")
    }
}

/// `½ zᵀ M z + bᵀ z + c` with `M` symmetric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticFunctional {
    pub quadratic: SparseMatrix,
    pub linear: LinearFunctional,
}

impl QuadraticFunctional {
    pub fn zero(dim: usize) -> Self {
        QuadraticFunctional { quadratic: SparseMatrix::zeros(dim, dim), linear: LinearFunctional::zero(dim) }
    }

    pub fn dim(&self) -> usize {
        self.linear.dim
    }

    /// Builds `Σ c·u·w` from pairs of linear forms.
    pub fn from_products(dim: usize, products: Vec<(Rational, SparseVec, SparseVec)>) -> Result<Self> {
        let mut trip = Vec::new();
        for (c, u, w) in products {
            for (i, a) in &u {
                for (j, b) in &w {
                    let v = &c * a * b;
                    trip.push((*i, *j, v.clone()));
                    trip.push((*j, *i, v));
                }
            }
        }
        Ok(QuadraticFunctional {
            quadratic: SparseMatrix::from_triplets(dim, dim, trip)?,
            linear: LinearFunctional::zero(dim),
        })
    }

    pub fn is_symmetric(&self) -> bool {
        self.quadratic.transpose() == self.quadratic
    }

    pub fn eval(&self, z: &[Rational]) -> Rational {
        let mz = self.quadratic.mul_vec(z).expect("dimension checked by caller");
        let quad: Rational = z.iter().zip(&mz).map(|(a, b)| a * b).sum();
        quad / Rational::from_integer(2.into()) + self.linear.eval(z)
    }

    /// Gradient `M z + b` as a list of linear functionals, one per coordinate.
    pub fn gradient(&self, i: usize) -> LinearFunctional {
        LinearFunctional { dim: self.dim(), coeffs: self.quadratic.row(i).clone(), constant: self.linear.coeff(i) }
    }

    /// `self + Σ_k f_k(z)·g_k(z)` for pairs of linear functionals.
    pub fn add_products(&self, pairs: &[(LinearFunctional, LinearFunctional)]) -> Result<Self> {
        let dim = self.dim();
        let mut out = self.clone();
        let mut prods = Vec::new();
        for (f, g) in pairs {
            prods.push((Rational::one(), f.coeffs.clone(), g.coeffs.clone()));
            out.linear = out.linear.add_scaled(&f.constant, g);
            out.linear =
                out.linear.add_scaled(&g.constant, &LinearFunctional { constant: Rational::zero(), ..f.clone() });
        }
        let extra = QuadraticFunctional::from_products(dim, prods)?;
        out.quadratic = out.quadratic.add(&extra.quadratic)?;
        Ok(out)
    }
}

/// The constant matrix `Ω` with `{z_i, z_j} = Ω_ij`.
#[derive(Clone, Debug)]
pub struct SymplecticMatrix {
    pub catalog: CoordinateCatalog,
}

pub fn build_omega(spec: &TheorySpec, lattice: LatticeSpec) -> SymplecticMatrix {
    SymplecticMatrix { catalog: CoordinateCatalog::new(spec, lattice) }
}

impl SymplecticMatrix {
    pub fn dim(&self) -> usize {
        self.catalog.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        let (p, s) = self.catalog.partner(i);
        if p == j {
            s
        } else {
            0
        }
    }

    pub fn to_matrix(&self) -> SparseMatrix {
        let d = self.dim();
        let trip = (0..d)
            .map(|i| {
                let (p, s) = self.catalog.partner(i);
                (i, p, Rational::from_integer(s.into()))
            })
            .collect();
        SparseMatrix::from_triplets(d, d, trip).expect("indices in range")
    }

    /// Row vector `fᵀ Ω`.
    pub fn left_apply(&self, f: &SparseVec) -> SparseVec {
        // (fᵀΩ)_j = Σ_i f_i Ω_ij; Ω_ij ≠ 0 only for j = partner(i).
        normalize_sparse(
            f.iter()
                .map(|(i, v)| {
                    let (p, s) = self.catalog.partner(*i);
                    (p, v * Rational::from_integer(s.into()))
                })
                .collect(),
        )
    }

    fn check(&self, f: &LinearFunctional) -> Result<()> {
        if f.dim != self.dim() {
            return Err(Error::CatalogMismatch);
        }
        Ok(())
    }

    /// `{f, g} = fᵀ Ω g`.
    pub fn poisson(&self, f: &LinearFunctional, g: &LinearFunctional) -> Result<Rational> {
        self.check(f)?;
        self.check(g)?;
        Ok(sparse_dot(&self.left_apply(&f.coeffs), &g.coeffs))
    }

    /// `{f, h}` for quadratic `h = ½zᵀMz + bᵀz`: the linear functional `fᵀΩ(Mz + b)`.
    pub fn poisson_lin_quad(&self, f: &LinearFunctional, h: &QuadraticFunctional) -> Result<LinearFunctional> {
        self.check(f)?;
        if h.dim() != self.dim() {
            return Err(Error::CatalogMismatch);
        }
        let w = self.left_apply(&f.coeffs);
        Ok(LinearFunctional {
            dim: self.dim(),
            coeffs: h.quadratic.vec_mul(&w),
            constant: sparse_dot(&w, &h.linear.coeffs),
        })
    }

    /// Infinitesimal flow `{z_i, f}` for every coordinate: the vector `Ω ∇f`.
    pub fn flow(&self, f: &LinearFunctional) -> Result<SparseVec> {
        self.check(f)?;
        // (Ω c)_i = Σ_j Ω_ij c_j = −(cᵀΩ)_i
        Ok(self.left_apply(&f.coeffs).into_iter().map(|(i, v)| (i, -v)).collect())
    }
}

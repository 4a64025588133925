//! The Dirac–Bergmann algorithm on a spatial lattice.
//!
//! Every constraint is a linear functional of the canonical coordinates, so
//! all brackets among constraints are constants and the whole analysis is
//! exact linear algebra: bracket matrices, their null spaces, and spans.

use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::linalg::{
    fmt_rational, independent_rows, left_nullspace, null_basis, rank, rref, sparse_dot, Rational, RowSpan,
    SparseMatrix, SparseVec,
};
use crate::phase_space::{build_omega, CoordinateCatalog, LinearFunctional, QuadraticFunctional, SymplecticMatrix};
use crate::theory::{KineticFactor, TheorySpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generation {
    Primary,
    /// Produced by the given consistency pass (1 for the first).
    Secondary(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintClass {
    First,
    Second,
    Unresolved,
}

/// `family(origin)@site`. Primaries use the component label as origin;
/// derived constraints record the constraint they were generated from.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub family: String,
    pub origin: String,
    pub site: usize,
}

impl Label {
    fn derived(family: &str, from: &Label) -> Label {
        Label { family: family.into(), origin: format!("{}:{}", from.family, from.origin), site: from.site }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})@{}", self.family, self.origin, self.site)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub functional: LinearFunctional,
    pub label: Label,
    pub generation: Generation,
    pub class: ConstraintClass,
}

/// One entry per primary constraint: the velocity it multiplies, solved as a
/// functional of phase space, or `None` when it stays arbitrary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplierSolution {
    pub labels: Vec<Label>,
    pub values: Vec<Option<LinearFunctional>>,
}

impl MultiplierSolution {
    pub fn get(&self, label: &Label) -> Option<&Option<LinearFunctional>> {
        self.labels.iter().position(|l| l == label).map(|i| &self.values[i])
    }

    pub fn free_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }
}

/// Output of the consistency loop.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub omega: SymplecticMatrix,
    pub hamiltonian: QuadraticFunctional,
    pub constraints: Vec<Constraint>,
    pub multipliers: MultiplierSolution,
    /// Consistency passes run, including the final one that found nothing.
    pub passes: usize,
}

impl ConstraintSystem {
    pub fn catalog(&self) -> &CoordinateCatalog {
        &self.omega.catalog
    }

    pub fn primaries(&self) -> Vec<&Constraint> {
        self.constraints.iter().filter(|c| c.generation == Generation::Primary).collect()
    }
}

#[derive(Clone, Debug)]
pub struct ClassifiedConstraints {
    pub omega: SymplecticMatrix,
    pub first_class: Vec<Constraint>,
    pub second_class: Vec<Constraint>,
    /// Dependencies among the first-class functionals, as coefficient vectors.
    pub reducibility_basis: Vec<SparseVec>,
    pub multipliers: MultiplierSolution,
    /// Inverse of `C_αβ = {χ_α, χ_β}`.
    pub second_inverse: SparseMatrix,
}

impl ClassifiedConstraints {
    /// First-class then second-class constraints.
    pub fn final_set(&self) -> Vec<&Constraint> {
        self.first_class.iter().chain(&self.second_class).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofCounts {
    pub n_vars: usize,
    pub n_first_class_raw: usize,
    pub n_first_class_independent: usize,
    pub n_second_class: usize,
    pub dof_exact: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofReport {
    pub counts: DofCounts,
    pub dof_bulk_density: Rational,
    pub topological_modes: Rational,
    /// `(N, dof_exact)` at the two sizes used for the fit `a·V + b`.
    pub fit_points: [(usize, i64); 2],
}

fn require_spatial(l: &LatticeSpec) -> Result<()> {
    if l.spacetime {
        return Err(Error::Validation("constraint analysis needs a spatial lattice".into()));
    }
    Ok(())
}

pub fn primary_constraints(spec: &TheorySpec, l: &LatticeSpec) -> Result<Vec<Constraint>> {
    spec.validate()?;
    require_spatial(l)?;
    let labels = spec.component_labels();
    if let Some((m, _, _)) = spec.velocity_hessian().first() {
        return Err(Error::NonFirstOrderLagrangian(labels[*m].clone()));
    }
    let cat = CoordinateCatalog::new(spec, *l);
    let n = cat.config_dim();
    let mut contraction: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
    for k in &spec.kinetic {
        if let KineticFactor::Config(m) = k.factor {
            contraction[k.velocity].push((m, k.coeff.clone()));
        }
    }
    let dim = cat.dim();
    let mut out = Vec::with_capacity(n * cat.sites());
    for site in 0..cat.sites() {
        for (comp, terms) in contraction.iter().enumerate() {
            let mut entries = vec![(cat.p(site, comp), Rational::one())];
            entries.extend(terms.iter().map(|(m, c)| (cat.q(site, *m), -c)));
            out.push(Constraint {
                functional: LinearFunctional::new(dim, entries),
                label: Label { family: "phi".into(), origin: labels[comp].clone(), site },
                generation: Generation::Primary,
                class: ConstraintClass::Unresolved,
            });
        }
    }
    Ok(out)
}

/// The Hamiltonian table summed over the lattice. On the primary surface
/// this is `Σ q̇p − L` for a Lagrangian linear in velocities.
pub fn canonical_hamiltonian(spec: &TheorySpec, l: &LatticeSpec) -> Result<QuadraticFunctional> {
    spec.validate()?;
    require_spatial(l)?;
    let cat = CoordinateCatalog::new(spec, *l);
    let products = (0..cat.sites())
        .flat_map(|site| {
            spec.hamiltonian
                .iter()
                .map(|t| (t.coeff.clone(), cat.slot_form(site, &t.left), cat.slot_form(site, &t.right)))
                .collect::<Vec<_>>()
        })
        .collect();
    QuadraticFunctional::from_products(cat.dim(), products)
}

/// `K_ij = {r_i, c_j}`.
pub fn bracket_matrix(
    om: &SymplecticMatrix,
    rows: &[&LinearFunctional],
    cols: &[&LinearFunctional],
) -> Result<SparseMatrix> {
    for f in rows.iter().chain(cols) {
        if f.dim != om.dim() {
            return Err(Error::CatalogMismatch);
        }
    }
    let w: Vec<SparseVec> = rows.par_iter().map(|f| om.left_apply(&f.coeffs)).collect();
    let c = SparseMatrix::from_rows(om.dim(), cols.iter().map(|f| f.coeffs.clone()).collect())?;
    SparseMatrix::from_rows(om.dim(), w)?.mul(&c.transpose())
}

fn combine(dim: usize, v: &SparseVec, fs: &[&LinearFunctional]) -> LinearFunctional {
    v.iter().fold(LinearFunctional::zero(dim), |acc, (i, c)| acc.add_scaled(c, fs[*i]))
}

/// One pass: new constraints from the null directions of the bracket matrix
/// against the primaries, and the multipliers fixed by the remaining rows.
pub fn consistency_step(
    om: &SymplecticMatrix,
    cs: &[Constraint],
    h: &QuadraticFunctional,
    pass: usize,
) -> Result<(Vec<Constraint>, MultiplierSolution)> {
    let dim = om.dim();
    let all: Vec<&LinearFunctional> = cs.iter().map(|c| &c.functional).collect();
    let prim_idx: Vec<usize> = (0..cs.len()).filter(|&i| cs[i].generation == Generation::Primary).collect();
    let prim: Vec<&LinearFunctional> = prim_idx.iter().map(|&i| &cs[i].functional).collect();
    let p = bracket_matrix(om, &all, &prim)?;
    let drift: Vec<LinearFunctional> = all.par_iter().map(|c| om.poisson_lin_quad(c, h)).collect::<Result<_>>()?;
    let drift_refs: Vec<&LinearFunctional> = drift.iter().collect();

    let span = RowSpan::from_rows(&all.iter().map(|f| f.coeffs.clone()).collect::<Vec<_>>());
    let candidates: Vec<(usize, LinearFunctional)> =
        null_basis(&p.transpose()).into_par_iter().map(|(j, v)| (j, combine(dim, &v, &drift_refs))).collect();
    let mut new = Vec::new();
    for (j, cand) in candidates {
        let in_span = cand.coeffs.is_empty() || span.contains(&cand.coeffs);
        if in_span {
            if !cand.constant.is_zero() {
                return Err(Error::InconsistentSystem(fmt_rational(&cand.constant)));
            }
            continue;
        }
        new.push(Constraint {
            functional: cand,
            label: Label::derived("psi", &cs[j].label),
            generation: Generation::Secondary(pass),
            class: ConstraintClass::Unresolved,
        });
    }

    let rows = independent_rows(p.rows());
    let k = prim.len();
    let mut values: Vec<Option<LinearFunctional>> = vec![None; k];
    if !rows.is_empty() {
        // [P_R | −d_R], the constant term of each drift in the last column
        let rhs: Vec<SparseVec> = rows
            .iter()
            .map(|&r| {
                let mut v: SparseVec = drift[r].coeffs.iter().map(|(i, c)| (*i, -c)).collect();
                if !drift[r].constant.is_zero() {
                    v.push((dim, -&drift[r].constant));
                }
                v
            })
            .collect();
        let aug = p.select_rows(&rows).hstack(&SparseMatrix::from_rows(dim + 1, rhs)?)?;
        for (piv, row) in rref(&aug) {
            if piv >= k {
                return Err(Error::Unsolvable);
            }
            let mut f = LinearFunctional::zero(dim);
            for (c, v) in row.into_iter().filter(|(c, _)| *c >= k) {
                if c - k == dim {
                    f.constant = v;
                } else {
                    f.coeffs.push((c - k, v));
                }
            }
            values[piv] = Some(f);
        }
    }
    let labels = prim_idx.iter().map(|&i| cs[i].label.clone()).collect();
    Ok((new, MultiplierSolution { labels, values }))
}

/// Primaries, then consistency passes until one adds nothing.
pub fn run_algorithm(spec: &TheorySpec, l: &LatticeSpec) -> Result<ConstraintSystem> {
    let mut constraints = primary_constraints(spec, l)?;
    let hamiltonian = canonical_hamiltonian(spec, l)?;
    let omega = build_omega(spec, *l);
    let mut pass = 1;
    loop {
        let (new, multipliers) = consistency_step(&omega, &constraints, &hamiltonian, pass)?;
        if new.is_empty() {
            return Ok(ConstraintSystem { omega, hamiltonian, constraints, multipliers, passes: pass });
        }
        constraints.extend(new);
        pass += 1;
    }
}

/// Splits the constraints into first and second class.
///
/// Second-class representatives are the rows kept by a greedy row basis of
/// the full bracket matrix; first-class functionals are the combinations
/// given by its reduced-echelon null basis.
pub fn classify(sys: &ConstraintSystem) -> Result<ClassifiedConstraints> {
    let om = &sys.omega;
    let dim = om.dim();
    let all: Vec<&LinearFunctional> = sys.constraints.iter().map(|c| &c.functional).collect();
    let k = bracket_matrix(om, &all, &all)?;
    let second_idx = independent_rows(k.rows());
    let second_class: Vec<Constraint> = second_idx
        .iter()
        .map(|&i| {
            let c = &sys.constraints[i];
            Constraint { label: Label::derived("chi", &c.label), class: ConstraintClass::Second, ..c.clone() }
        })
        .collect();
    let first_class: Vec<Constraint> = null_basis(&k)
        .into_par_iter()
        .map(|(j, v)| {
            let src = &sys.constraints[j];
            Constraint {
                functional: combine(dim, &v, &all),
                label: Label::derived("gamma", &src.label),
                generation: src.generation,
                class: ConstraintClass::First,
            }
        })
        .collect();
    let second_inverse = invert_or_empty(&k.select(&second_idx, &second_idx))?;
    Ok(ClassifiedConstraints {
        omega: om.clone(),
        reducibility_basis: reducibility(&first_class)?,
        first_class,
        second_class,
        multipliers: sys.multipliers.clone(),
        second_inverse,
    })
}

fn invert_or_empty(m: &SparseMatrix) -> Result<SparseMatrix> {
    if m.nrows() == 0 {
        return Ok(SparseMatrix::zeros(0, 0));
    }
    crate::linalg::invert(m)
}

/// Left kernel of the stacked first-class coefficient rows.
pub fn reducibility(first_class: &[Constraint]) -> Result<Vec<SparseVec>> {
    let Some(first) = first_class.first() else {
        return Ok(Vec::new());
    };
    let rows = first_class.iter().map(|c| c.functional.coeffs.clone()).collect();
    Ok(left_nullspace(&SparseMatrix::from_rows(first.functional.dim, rows)?))
}

pub fn count_dof(cc: &ClassifiedConstraints) -> Result<DofCounts> {
    let n_vars = cc.omega.dim();
    let raw = cc.first_class.len();
    let indep = raw - cc.reducibility_basis.len();
    let s = cc.second_class.len();
    let num = n_vars as i64 - 2 * indep as i64 - s as i64;
    if num < 0 || num % 2 != 0 {
        return Err(Error::NonIntegerDof(format!("({n_vars} - 2*{indep} - {s})/2")));
    }
    Ok(DofCounts {
        n_vars,
        n_first_class_raw: raw,
        n_first_class_independent: indep,
        n_second_class: s,
        dof_exact: num / 2,
    })
}

/// The second size used in volume fits: `n + 1` up to 2, else `n − 1`.
/// At `N = 1` every difference vanishes, so it is never a partner.
pub fn fit_partner(n: usize) -> usize {
    if n <= 2 {
        n + 1
    } else {
        n - 1
    }
}

/// Runs the full analysis at `n` and at [`fit_partner`]`(n)`, and fits
/// `dof_exact = a·V + b` exactly through the two points.
pub fn dof_report(spec: &TheorySpec, n: usize) -> Result<DofReport> {
    let other = fit_partner(n);
    let at = |m: usize| -> Result<DofCounts> {
        let sys = run_algorithm(spec, &LatticeSpec::spatial(m))?;
        count_dof(&classify(&sys)?)
    };
    let counts = at(n)?;
    let other_dof = at(other)?.dof_exact;
    let (v1, v2) = ((n.pow(3)) as i64, (other.pow(3)) as i64);
    let a = Rational::new((counts.dof_exact - other_dof).into(), (v1 - v2).into());
    let b = Rational::from_integer(counts.dof_exact.into()) - &a * Rational::from_integer(v1.into());
    let mut fit_points = [(n, counts.dof_exact), (other, other_dof)];
    fit_points.sort();
    Ok(DofReport { counts, dof_bulk_density: a, topological_modes: b, fit_points })
}

/// Independent count: constraint-surface dimension minus the number of
/// independent first-class flow directions, halved.
pub fn dof_oracle(sys: &ConstraintSystem) -> Result<i64> {
    let dim = sys.omega.dim();
    let all: Vec<&LinearFunctional> = sys.constraints.iter().map(|c| &c.functional).collect();
    let c = SparseMatrix::from_rows(dim, all.iter().map(|f| f.coeffs.clone()).collect())?;
    let k = bracket_matrix(&sys.omega, &all, &all)?;
    let y = SparseMatrix::from_rows(all.len(), left_nullspace(&k))?;
    let surface = dim - rank(&c);
    let gauge = rank(&y.mul(&c)?);
    let num = surface as i64 - gauge as i64;
    if num % 2 != 0 {
        return Err(Error::NonIntegerDof(format!("({surface} - {gauge})/2")));
    }
    Ok(num / 2)
}

/// `{f, g}_D = {f, g} − {f, χ_α} (C⁻¹)^{αβ} {χ_β, g}`.
pub fn dirac_bracket(f: &LinearFunctional, g: &LinearFunctional, cc: &ClassifiedConstraints) -> Result<Rational> {
    let om = &cc.omega;
    let base = om.poisson(f, g)?;
    if cc.second_class.is_empty() {
        return Ok(base);
    }
    let wf = om.left_apply(&f.coeffs);
    let wg = om.left_apply(&g.coeffs);
    let a: SparseVec = cc
        .second_class
        .iter()
        .enumerate()
        .map(|(i, c)| (i, sparse_dot(&wf, &c.functional.coeffs)))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    // {χ_β, g} = −{g, χ_β}
    let b: SparseVec = cc
        .second_class
        .iter()
        .enumerate()
        .map(|(i, c)| (i, -sparse_dot(&wg, &c.functional.coeffs)))
        .filter(|(_, v)| !v.is_zero())
        .collect();
    let cb = cc.second_inverse.mul_sparse_vec(&b);
    Ok(base - sparse_dot(&a, &cb))
}

/// `{χ_i, g}_D` for every second-class `χ_i`, one row per `g`.
pub fn second_class_dirac_brackets(gs: &[LinearFunctional], cc: &ClassifiedConstraints) -> Result<Vec<Vec<Rational>>> {
    let om = &cc.omega;
    let chis: Vec<&LinearFunctional> = cc.second_class.iter().map(|c| &c.functional).collect();
    let c = bracket_matrix(om, &chis, &chis)?;
    gs.par_iter()
        .map(|g| {
            if g.dim != om.dim() {
                return Err(Error::CatalogMismatch);
            }
            let wg = om.left_apply(&g.coeffs);
            let b: SparseVec = chis
                .iter()
                .enumerate()
                .map(|(i, f)| (i, -sparse_dot(&wg, &f.coeffs)))
                .filter(|(_, v)| !v.is_zero())
                .collect();
            let corr = c.mul_sparse_vec(&cc.second_inverse.mul_sparse_vec(&b));
            let mut out: Vec<Rational> = vec![Rational::zero(); chis.len()];
            for (i, v) in &b {
                out[*i] += v;
            }
            for (i, v) in corr {
                out[i] -= v;
            }
            Ok(out)
        })
        .collect()
}

/// A free multiplier multiplying one first-class (`u`) or second-class (`v`)
/// constraint in the extended Hamiltonian.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplierSlot {
    pub name: String,
    pub generator: LinearFunctional,
}

/// `ż_i = drift + Σ_k coeff_k · slot_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationOfMotion {
    pub coordinate: usize,
    pub label: String,
    pub drift: LinearFunctional,
    pub slots: Vec<(usize, Rational)>,
}

#[derive(Clone, Debug)]
pub struct ExtendedSystem {
    /// `H_c` plus the fixed-multiplier terms.
    pub hamiltonian: QuadraticFunctional,
    pub slots: Vec<MultiplierSlot>,
    pub eom: Vec<EquationOfMotion>,
}

/// `H_E = H + Σ u_k γ_k + Σ v_k χ_k` and the equations `ż = {z, H_E}`.
pub fn extended_system(sys: &ConstraintSystem, cc: &ClassifiedConstraints) -> Result<ExtendedSystem> {
    let om = &sys.omega;
    let cat = sys.catalog();
    let dim = om.dim();
    let prim = sys.primaries();
    let pairs: Vec<(LinearFunctional, LinearFunctional)> = prim
        .iter()
        .zip(&sys.multipliers.values)
        .filter_map(|(c, v)| v.as_ref().map(|l| (l.clone(), c.functional.clone())))
        .collect();
    let hamiltonian = sys.hamiltonian.add_products(&pairs)?;

    let slots: Vec<MultiplierSlot> = cc
        .first_class
        .iter()
        .map(|c| ("u", c))
        .chain(cc.second_class.iter().map(|c| ("v", c)))
        .map(|(kind, c)| MultiplierSlot { name: format!("{kind}:{}", c.label), generator: c.functional.clone() })
        .collect();
    let mut per_coord: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); dim];
    let flows: Vec<SparseVec> = slots.par_iter().map(|s| om.flow(&s.generator)).collect::<Result<_>>()?;
    for (k, flow) in flows.into_iter().enumerate() {
        for (i, v) in flow {
            per_coord[i].push((k, v));
        }
    }
    let eom = per_coord
        .into_iter()
        .enumerate()
        .map(|(i, slots)| {
            let (partner, sign) = cat.partner(i);
            EquationOfMotion {
                coordinate: i,
                label: cat.label(i),
                drift: hamiltonian.gradient(partner).scale(&Rational::from_integer(sign.into())),
                slots,
            }
        })
        .collect();
    Ok(ExtendedSystem { hamiltonian, slots, eom })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraTable {
    /// Size of the final set (first class, then second class).
    pub size: usize,
    pub n_first: usize,
    /// Nonzero brackets `(i, j, {c_i, c_j})` with `i < j`.
    pub nonzero: Vec<(usize, usize, Rational)>,
    /// Every bracket involving a first-class constraint vanishes.
    pub closed: bool,
}

/// Brackets among the final constraints. They are all constants, so a
/// bracket lies in the constraint span exactly when it is zero.
pub fn algebra_closure(cc: &ClassifiedConstraints) -> Result<AlgebraTable> {
    let set: Vec<&LinearFunctional> = cc.final_set().iter().map(|c| &c.functional).collect();
    let k = bracket_matrix(&cc.omega, &set, &set)?;
    let n_first = cc.first_class.len();
    let mut nonzero = Vec::new();
    for (i, row) in k.rows().iter().enumerate() {
        for (j, v) in row {
            if i < *j && !v.is_zero() {
                nonzero.push((i, *j, v.clone()));
            }
        }
    }
    let closed = nonzero.iter().all(|(i, _, _)| *i >= n_first);
    Ok(AlgebraTable { size: set.len(), n_first, nonzero, closed })
}

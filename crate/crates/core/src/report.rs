//! Analysis and verification reports.
//!
//! Reports are plain data: every count is the integer the engine produced and
//! every residual is an exact rational, serialized as `"n/d"`. Nothing in a
//! report depends on timing or on the number of worker threads.

use std::fmt::Write as _;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covariant::{
    canonical_flow, current_divergence_check, generate_solution, omega_on_slice, pure_gauge_tangent,
    random_configuration, smeared_flow, SmearedGenerator,
};
use crate::dirac::{
    algebra_closure, bracket_matrix, classify, count_dof, dof_oracle, fit_partner, run_algorithm,
    second_class_dirac_brackets, ClassifiedConstraints, ConstraintSystem, Generation,
};
use crate::error::{Error, Result};
use crate::families::Families;
use crate::gauge::{
    apply_gauge, castellani_generator, check_action_invariance, diffeo_parameters, gauge_variation,
    translation_difference, GaugeParams, SpacetimeParams,
};
use crate::lattice::LatticeSpec;
use crate::linalg::{dense_from_sparse, rank, Rational};
use crate::phase_space::{CoordinateCatalog, LinearFunctional};
use crate::sample::{self, rng, SampleRng};
use crate::theory::maps::{
    b_from_connection, connection_from_b, inverse_tetrad, zero_tensor3, ConnectionGrid, Mat4, TetradGrid,
};
use crate::theory::TheorySpec;

pub const MAX_N: usize = 4;
pub const MAX_T: usize = 6;

/// Serde adapter writing a rational as `"numerator/denominator"`.
pub mod ratio {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use crate::linalg::{parse_rational, Rational};

    pub fn to_string(r: &Rational) -> String {
        format!("{}/{}", r.numer(), r.denom())
    }

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).ok_or_else(|| D::Error::custom(format!("not a rational: {s}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Gauge,
    Symplectic,
    Dirac,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "gauge" => Ok(Suite::Gauge),
            "symplectic" => Ok(Suite::Symplectic),
            "dirac" => Ok(Suite::Dirac),
            _ => Err(Error::Validation(format!("unknown suite `{s}` (all, gauge, symplectic, dirac)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub status: Status,
    pub trials: usize,
    #[serde(with = "ratio")]
    pub residual: Rational,
    pub detail: String,
}

impl Verdict {
    fn from_residual(name: &str, trials: usize, residual: Rational, detail: String) -> Self {
        let status = if residual.is_zero() { Status::Pass } else { Status::Fail };
        Verdict { name: name.into(), status, trials, residual, detail }
    }

    fn skipped(name: &str, why: &str) -> Self {
        Verdict {
            name: name.into(),
            status: Status::Skipped,
            trials: 0,
            residual: Rational::zero(),
            detail: why.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extents {
    pub n: usize,
    pub t: usize,
    pub spatial_sites: usize,
    pub spacetime_sites: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintCounts {
    pub primary: usize,
    /// New constraints found by each consistency pass.
    pub per_pass: Vec<usize>,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankEntry {
    pub matrix: String,
    pub size: usize,
    pub rank: usize,
    pub nullity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub first_class: usize,
    pub second_class: usize,
}

/// An exact fit `a·V + b` through two lattice sizes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolumeFit {
    #[serde(with = "ratio")]
    pub bulk_density: Rational,
    #[serde(with = "ratio")]
    pub topological: Rational,
    pub points: Vec<(usize, i64)>,
}

impl VolumeFit {
    pub fn through(p: (usize, i64), q: (usize, i64)) -> Self {
        let (v1, v2) = (p.0.pow(3) as i64, q.0.pow(3) as i64);
        let a = Rational::new((p.1 - q.1).into(), (v1 - v2).into());
        let b = Rational::from_integer(p.1.into()) - &a * Rational::from_integer(v1.into());
        let mut points = vec![p, q];
        points.sort();
        VolumeFit { bulk_density: a, topological: b, points }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reducibility {
    pub dimension: usize,
    pub fit: VolumeFit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DofSummary {
    pub n_vars: usize,
    pub first_class_independent: usize,
    pub second_class: usize,
    pub dof_exact: i64,
    pub dof_oracle: i64,
    #[serde(with = "ratio")]
    pub dof_bulk_density: Rational,
    #[serde(with = "ratio")]
    pub topological_modes: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub theory: String,
    pub lattice: Extents,
    pub seed: u64,
    pub constraints: ConstraintCounts,
    pub ranks: Vec<RankEntry>,
    pub classes: ClassCounts,
    pub reducibility: Reducibility,
    pub dof: DofSummary,
    pub verdicts: Vec<Verdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub theory: String,
    pub lattice: Extents,
    pub seed: u64,
    pub verdicts: Vec<Verdict>,
}

pub trait Verdicts {
    fn verdicts(&self) -> &[Verdict];

    fn passed(&self) -> bool {
        self.verdicts().iter().all(|v| v.status != Status::Fail)
    }
}

impl Verdicts for AnalysisReport {
    fn verdicts(&self) -> &[Verdict] {
        &self.verdicts
    }
}

impl Verdicts for VerifyReport {
    fn verdicts(&self) -> &[Verdict] {
        &self.verdicts
    }
}

/// Trial counts per randomized check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Trials {
    pub action: usize,
    pub castellani: usize,
    pub diffeo: usize,
    pub round_trip: usize,
    pub symplectic: usize,
    pub dirac: usize,
}

impl Trials {
    pub const FULL: Trials =
        Trials { action: 20, castellani: 5, diffeo: 10, round_trip: 10, symplectic: 10, dirac: 100 };
    pub const QUICK: Trials = Trials { action: 3, castellani: 2, diffeo: 2, round_trip: 2, symplectic: 2, dirac: 10 };
}

fn extents(n: usize, t: usize) -> Result<Extents> {
    if !(1..=MAX_N).contains(&n) {
        return Err(Error::Validation(format!("n must lie in 1..={MAX_N}, got {n}")));
    }
    if !(1..=MAX_T).contains(&t) {
        return Err(Error::Validation(format!("t must lie in 1..={MAX_T}, got {t}")));
    }
    Ok(Extents { n, t, spatial_sites: n.pow(3), spacetime_sites: t * n.pow(3) })
}

struct Context<'a> {
    spec: &'a TheorySpec,
    sys: &'a ConstraintSystem,
    cc: &'a ClassifiedConstraints,
    spacetime: LatticeSpec,
    seed: u64,
    paper: bool,
}

impl Context<'_> {
    /// Independent per-trial seeds drawn from the run seed and a stream tag.
    fn seeds(&self, tag: u64, count: usize) -> Vec<u64> {
        let mut r = rng(self.seed ^ tag.rotate_left(40));
        (0..count).map(|_| r.next_u64()).collect()
    }
}

fn abs_sum<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Rational {
    xs.into_iter().map(|x| x.abs()).sum()
}

fn diff_sum(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn mat_diff(a: &Mat4, b: &Mat4) -> Rational {
    a.iter().zip(b).map(|(x, y)| diff_sum(x, y)).sum()
}

/// Residual total plus the first trial seed that produced a nonzero residual.
fn tally(rs: Vec<(u64, Rational)>) -> (Rational, Option<u64>) {
    let first = rs.iter().find(|(_, r)| !r.is_zero()).map(|(s, _)| *s);
    (rs.into_iter().map(|(_, r)| r).sum(), first)
}

fn counterexample(ok: String, first: Option<u64>) -> String {
    match first {
        Some(s) => format!("counterexample at trial seed {s}"),
        None => ok,
    }
}

fn dirac_suite(ctx: &Context, trials: &Trials) -> Result<Vec<Verdict>> {
    let counts = count_dof(ctx.cc)?;
    let oracle = dof_oracle(ctx.sys)?;
    let dof = Verdict::from_residual(
        "dof_oracle",
        1,
        Rational::from_integer((counts.dof_exact - oracle).abs().into()),
        format!("formula {} vs oracle {}", counts.dof_exact, oracle),
    );

    let table = algebra_closure(ctx.cc)?;
    let open = table.nonzero.iter().filter(|(i, _, _)| *i < table.n_first);
    let closure = Verdict::from_residual(
        "algebra_closure",
        1,
        abs_sum(open.map(|(_, _, v)| v)),
        format!("{} nonzero brackets among {} constraints", table.nonzero.len(), table.size),
    );

    let dim = ctx.sys.omega.dim();
    let seeds = ctx.seeds(1, trials.dirac);
    let gs: Vec<LinearFunctional> = seeds
        .iter()
        .map(|&s| {
            let f = sample::field(&mut rng(s), dim);
            LinearFunctional::new(dim, f.into_iter().enumerate().collect())
        })
        .collect();
    let rows = second_class_dirac_brackets(&gs, ctx.cc)?;
    let (residual, first) = tally(seeds.iter().zip(&rows).map(|(s, r)| (*s, abs_sum(r))).collect());
    let degeneracy = Verdict::from_residual(
        "dirac_degeneracy",
        trials.dirac,
        residual,
        counterexample(format!("{} second-class constraints central", ctx.cc.second_class.len()), first),
    );
    Ok(vec![dof, closure, degeneracy])
}

fn random_tetrad(r: &mut SampleRng) -> Mat4 {
    loop {
        let m: Mat4 = std::array::from_fn(|_| std::array::from_fn(|_| sample::rational(r)));
        if inverse_tetrad(&m).is_some() {
            return m;
        }
    }
}

fn random_connection_site(r: &mut SampleRng) -> crate::theory::maps::Tensor3 {
    let mut w = zero_tensor3();
    for m in w.iter_mut() {
        for i in 0..4 {
            for j in i + 1..4 {
                let c = sample::rational(r);
                m[j][i] = -c.clone();
                m[i][j] = c;
            }
        }
    }
    w
}

fn round_trip_residual(l: LatticeSpec, seed: u64) -> Result<Rational> {
    let mut r = rng(seed);
    let e = TetradGrid { lattice: l, sites: (0..l.volume()).map(|_| random_tetrad(&mut r)).collect() };
    let w = ConnectionGrid { lattice: l, sites: (0..l.volume()).map(|_| random_connection_site(&mut r)).collect() };
    let back = connection_from_b(&e, &b_from_connection(&e, &w)?)?;
    Ok(back
        .sites
        .iter()
        .zip(&w.sites)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| mat_diff(x, y)).sum::<Rational>())
        .sum())
}

const PAPER_ONLY: &str = "only defined for the paper_g0 field content";

fn gauge_suite(ctx: &Context, trials: &Trials) -> Result<Vec<Verdict>> {
    let names = ["action_invariance", "castellani_flow", "diffeomorphism", "map_round_trip"];
    if !ctx.paper {
        return Ok(names.iter().map(|n| Verdict::skipped(n, PAPER_ONLY)).collect());
    }
    let l = ctx.spacetime;

    let seeds = ctx.seeds(2, trials.action);
    let rs = seeds
        .par_iter()
        .map(|&s| {
            let mut r = rng(s);
            let c = random_configuration(r.next_u64(), l);
            let p = SpacetimeParams::random(l, &mut r);
            Ok((s, check_action_invariance(&c.e, &c.b, &p)?.abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    let (res, first) = tally(rs);
    let action = Verdict::from_residual(
        "action_invariance",
        trials.action,
        res,
        counterexample(format!("{0}/{0} trials invariant", trials.action), first),
    );

    let cat = ctx.sys.catalog();
    let seeds = ctx.seeds(3, trials.castellani);
    let rs = seeds
        .par_iter()
        .map(|&s| {
            let p = GaugeParams::random(cat.lattice, &mut rng(s));
            let flow = ctx.sys.omega.flow(&castellani_generator(&p, ctx.cc)?)?;
            let var = gauge_variation(&p, cat)?;
            Ok((s, diff_sum(&dense_from_sparse(&flow, cat.dim()), &dense_from_sparse(&var, cat.dim()))))
        })
        .collect::<Result<Vec<_>>>()?;
    let (res, first) = tally(rs);
    let castellani = Verdict::from_residual(
        "castellani_flow",
        trials.castellani,
        res,
        counterexample("generator flow equals the gauge variation".into(), first),
    );

    let seeds = ctx.seeds(4, trials.diffeo);
    let rs = seeds
        .par_iter()
        .map(|&s| {
            let mut r = rng(s);
            let sol = generate_solution(r.next_u64(), l)?;
            let xi: [Rational; 4] = std::array::from_fn(|_| sample::rational(&mut r));
            let p = diffeo_parameters(&vec![xi.clone(); l.volume()], &sol.e, &sol.b)?;
            let (ne, nb) = apply_gauge(&sol.e, &sol.b, &p)?;
            let (te, tb) = translation_difference(&xi, &sol.e, &sol.b)?;
            let mut res = Rational::zero();
            for x in 0..l.volume() {
                for i in 0..4 {
                    for mu in 0..4 {
                        res += (&ne.sites[x][i][mu] - &sol.e.sites[x][i][mu] - &te.sites[x][i][mu]).abs();
                        for nu in 0..4 {
                            let d = &nb.sites[x][i][mu][nu] - &sol.b.sites[x][i][mu][nu];
                            res += (d - &tb.sites[x][i][mu][nu]).abs();
                        }
                    }
                }
            }
            Ok((s, res))
        })
        .collect::<Result<Vec<_>>>()?;
    let (res, first) = tally(rs);
    let diffeo = Verdict::from_residual(
        "diffeomorphism",
        trials.diffeo,
        res,
        counterexample("field-dependent gauge transformation equals translation on shell".into(), first),
    );

    let seeds = ctx.seeds(5, trials.round_trip);
    let rs = seeds.par_iter().map(|&s| Ok((s, round_trip_residual(l, s)?))).collect::<Result<Vec<_>>>()?;
    let (res, first) = tally(rs);
    let round_trip = Verdict::from_residual(
        "map_round_trip",
        trials.round_trip,
        res,
        counterexample("connection recovered from B exactly".into(), first),
    );
    Ok(vec![action, castellani, diffeo, round_trip])
}

fn symplectic_suite(ctx: &Context, trials: &Trials) -> Result<Vec<Verdict>> {
    let names = [
        "omega_slice_independence",
        "omega_gauge_degeneracy",
        "current_conservation",
        "current_off_shell_control",
        "smeared_flows",
    ];
    if !ctx.paper {
        return Ok(names.iter().map(|n| Verdict::skipped(n, PAPER_ONLY)).collect());
    }
    let l = ctx.spacetime;
    let seeds = ctx.seeds(6, trials.symplectic);
    let rs = seeds
        .par_iter()
        .map(|&s| {
            let mut r = rng(s);
            let d1 = generate_solution(r.next_u64(), l)?;
            let d2 = generate_solution(r.next_u64(), l)?;
            let g = pure_gauge_tangent(&SpacetimeParams::random(l, &mut r));
            let w0 = omega_on_slice(&d1, &d2, 0)?;
            let mut slices = Rational::zero();
            let mut gauge = Rational::zero();
            for t in 0..l.t {
                slices += (omega_on_slice(&d1, &d2, t)? - &w0).abs();
                gauge += omega_on_slice(&g, &d2, t)?.abs();
            }
            let div = abs_sum(&current_divergence_check(&d1, &d2)?);
            Ok((s, slices, gauge, div))
        })
        .collect::<Result<Vec<_>>>()?;
    let pick =
        |k: usize| -> Vec<(u64, Rational)> { rs.iter().map(|(s, a, b, c)| (*s, [a, b, c][k].clone())).collect() };
    let (res, first) = tally(pick(0));
    let slices = Verdict::from_residual(
        "omega_slice_independence",
        trials.symplectic,
        res,
        counterexample(format!("omega equal on all {} slices", l.t), first),
    );
    let (res, first) = tally(pick(1));
    let gauge = Verdict::from_residual(
        "omega_gauge_degeneracy",
        trials.symplectic,
        res,
        counterexample("omega vanishes on pure-gauge tangents".into(), first),
    );
    let (res, first) = tally(pick(2));
    let current = Verdict::from_residual(
        "current_conservation",
        trials.symplectic,
        res,
        counterexample("divergence zero at every site".into(), first),
    );

    let [s_off, s_on] = ctx.seeds(7, 2)[..] else { unreachable!() };
    let off = random_configuration(s_off, l);
    let on = generate_solution(s_on, l)?;
    let moved = current_divergence_check(&off, &on)?.iter().any(|v| !v.is_zero());
    let control = Verdict::from_residual(
        "current_off_shell_control",
        1,
        if moved { Rational::zero() } else { Rational::from_integer(1.into()) },
        if moved {
            "off-shell divergence nonzero".into()
        } else {
            format!("off-shell divergence vanished (seeds {s_off}, {s_on})")
        },
    );

    let cat = ctx.sys.catalog();
    let v = cat.sites();
    let [s_flow] = ctx.seeds(8, 1)[..] else { unreachable!() };
    let mut r = rng(s_flow);
    let point = sample::field(&mut r, cat.dim());
    let mut res = Rational::zero();
    for (name, k) in [("gamma", 4), ("gamma_a", 12), ("gamma_0", 4), ("gamma_0a", 12)] {
        let g = SmearedGenerator::from_name(name, (0..k).map(|_| sample::field(&mut r, v)).collect())?;
        let direct = smeared_flow(&g, &point, cat)?;
        let canonical = canonical_flow(&g, &point, &ctx.sys.omega)?;
        res += diff_sum(&direct.delta, &canonical.delta) + diff_sum(&direct.base, &canonical.base);
    }
    let bad = (!res.is_zero()).then_some(s_flow);
    let flows = Verdict::from_residual(
        "smeared_flows",
        4,
        res,
        counterexample("smeared motions equal canonical flows".into(), bad),
    );
    Ok(vec![slices, gauge, current, control, flows])
}

fn run_suites(ctx: &Context, suite: Suite, trials: &Trials) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    if matches!(suite, Suite::All | Suite::Dirac) {
        out.extend(dirac_suite(ctx, trials)?);
    }
    if matches!(suite, Suite::All | Suite::Gauge) {
        out.extend(gauge_suite(ctx, trials)?);
    }
    if matches!(suite, Suite::All | Suite::Symplectic) {
        out.extend(symplectic_suite(ctx, trials)?);
    }
    Ok(out)
}

fn is_paper(spec: &TheorySpec, n: usize) -> bool {
    Families::new(&CoordinateCatalog::new(spec, LatticeSpec::spatial(n))).is_ok()
}

/// Full constraint analysis at spatial extent `n`, plus every verdict at
/// reduced trial counts.
pub fn analyze(spec: &TheorySpec, n: usize, t: usize, seed: u64) -> Result<AnalysisReport> {
    analyze_with(spec, n, t, seed, &Trials::QUICK)
}

pub fn analyze_with(spec: &TheorySpec, n: usize, t: usize, seed: u64, trials: &Trials) -> Result<AnalysisReport> {
    let lattice = extents(n, t)?;
    let other = fit_partner(n);
    let (here, there) = rayon::join(
        || -> Result<_> {
            let sys = run_algorithm(spec, &LatticeSpec::spatial(n))?;
            let cc = classify(&sys)?;
            Ok((sys, cc))
        },
        || -> Result<_> {
            let sys = run_algorithm(spec, &LatticeSpec::spatial(other))?;
            let cc = classify(&sys)?;
            Ok((sys, cc))
        },
    );
    let ((sys, cc), (_, occ)) = (here?, there?);
    let counts = count_dof(&cc)?;
    let ocounts = count_dof(&occ)?;

    let primary = sys.constraints.iter().filter(|c| c.generation == Generation::Primary).count();
    let per_pass = (1..=sys.passes)
        .map(|p| sys.constraints.iter().filter(|c| c.generation == Generation::Secondary(p)).count())
        .collect();

    let om = &sys.omega;
    let prim: Vec<&LinearFunctional> = sys.primaries().iter().map(|c| &c.functional).collect();
    let all: Vec<&LinearFunctional> = sys.constraints.iter().map(|c| &c.functional).collect();
    let second: Vec<&LinearFunctional> = cc.second_class.iter().map(|c| &c.functional).collect();
    let mut ranks = Vec::new();
    for (name, set) in [("primary_brackets", &prim), ("all_brackets", &all), ("second_class_brackets", &second)] {
        let r = if set.is_empty() { 0 } else { rank(&bracket_matrix(om, set, set)?) };
        ranks.push(RankEntry { matrix: name.into(), size: set.len(), rank: r, nullity: set.len() - r });
    }

    let red = cc.reducibility_basis.len();
    let ored = occ.reducibility_basis.len();
    let dof_fit = VolumeFit::through((n, counts.dof_exact), (other, ocounts.dof_exact));

    let ctx =
        Context { spec, sys: &sys, cc: &cc, spacetime: LatticeSpec::spacetime(t, n), seed, paper: is_paper(spec, n) };
    let verdicts = run_suites(&ctx, Suite::All, trials)?;
    let dof = DofSummary {
        n_vars: counts.n_vars,
        first_class_independent: counts.n_first_class_independent,
        second_class: counts.n_second_class,
        dof_exact: counts.dof_exact,
        dof_oracle: dof_oracle(&sys)?,
        dof_bulk_density: dof_fit.bulk_density,
        topological_modes: dof_fit.topological,
    };
    Ok(AnalysisReport {
        theory: ctx.spec.name.clone(),
        lattice,
        seed,
        constraints: ConstraintCounts { primary, per_pass, total: sys.constraints.len() },
        ranks,
        classes: ClassCounts { first_class: cc.first_class.len(), second_class: cc.second_class.len() },
        reducibility: Reducibility { dimension: red, fit: VolumeFit::through((n, red as i64), (other, ored as i64)) },
        dof,
        verdicts,
    })
}

/// Runs one property suite at full trial counts.
pub fn verify(spec: &TheorySpec, suite: Suite, n: usize, t: usize, seed: u64) -> Result<VerifyReport> {
    verify_with(spec, suite, n, t, seed, &Trials::FULL)
}

pub fn verify_with(
    spec: &TheorySpec,
    suite: Suite,
    n: usize,
    t: usize,
    seed: u64,
    trials: &Trials,
) -> Result<VerifyReport> {
    let lattice = extents(n, t)?;
    let sys = run_algorithm(spec, &LatticeSpec::spatial(n))?;
    let cc = classify(&sys)?;
    let ctx =
        Context { spec, sys: &sys, cc: &cc, spacetime: LatticeSpec::spacetime(t, n), seed, paper: is_paper(spec, n) };
    Ok(VerifyReport { suite, theory: spec.name.clone(), lattice, seed, verdicts: run_suites(&ctx, suite, trials)? })
}

pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

fn render_verdicts(out: &mut String, verdicts: &[Verdict]) {
    let width = verdicts.iter().map(|v| v.name.len()).max().unwrap_or(0);
    for v in verdicts {
        let tag = match v.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        let _ = writeln!(
            out,
            "  {tag} {:width$}  trials {:>3}  residual {}  {}",
            v.name,
            v.trials,
            ratio::to_string(&v.residual),
            v.detail
        );
    }
}

fn affine(a: &Rational, b: &Rational) -> String {
    let sign = if b.is_negative() { '-' } else { '+' };
    format!("{}·V {sign} {}", ratio::to_string(a), ratio::to_string(&b.abs()))
}

pub fn render_analysis(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let l = &r.lattice;
    let _ = writeln!(out, "theory {}  n={} t={}  V={}  seed {}", r.theory, l.n, l.t, l.spatial_sites, r.seed);
    let per_pass: Vec<String> = r.constraints.per_pass.iter().map(|c| c.to_string()).collect();
    let _ = writeln!(
        out,
        "constraints: {} primary, per pass [{}], {} total",
        r.constraints.primary,
        per_pass.join(", "),
        r.constraints.total
    );
    for k in &r.ranks {
        let _ = writeln!(out, "  {:22} size {:>5}  rank {:>5}  nullity {:>5}", k.matrix, k.size, k.rank, k.nullity);
    }
    let _ = writeln!(out, "classes: {} first class, {} second class", r.classes.first_class, r.classes.second_class);
    let f = &r.reducibility.fit;
    let _ = writeln!(out, "reducibility: {} = {}", r.reducibility.dimension, affine(&f.bulk_density, &f.topological));
    let d = &r.dof;
    let _ = writeln!(
        out,
        "dof: ({} - 2·{} - {})/2 = {}  oracle {}  bulk density {}  topological {}",
        d.n_vars,
        d.first_class_independent,
        d.second_class,
        d.dof_exact,
        d.dof_oracle,
        ratio::to_string(&d.dof_bulk_density),
        ratio::to_string(&d.topological_modes)
    );
    let _ = writeln!(out, "verdicts:");
    render_verdicts(&mut out, &r.verdicts);
    let _ = writeln!(out, "{}", if r.passed() { "PASS" } else { "FAIL" });
    out
}

pub fn render_verify(r: &VerifyReport) -> String {
    let mut out = String::new();
    let l = &r.lattice;
    let suite = serde_json::to_value(r.suite).expect("suite serializes");
    let _ = writeln!(
        out,
        "verify {}  theory {}  n={} t={}  seed {}",
        suite.as_str().unwrap_or("?"),
        r.theory,
        l.n,
        l.t,
        r.seed
    );
    render_verdicts(&mut out, &r.verdicts);
    let _ = writeln!(out, "{}", if r.passed() { "PASS" } else { "FAIL" });
    out
}

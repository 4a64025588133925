//! Declarative first-order field theories.
//!
//! A theory is a list of fields (flattened into per-site configuration
//! components), a kinetic table `Σ c·q_m·q̇_n` and a Hamiltonian-density
//! table whose rows are products of two (possibly differenced) phase-space
//! variables at the same site. Differences in the Hamiltonian table are
//! forward differences.

mod format;
pub mod maps;

use std::collections::BTreeSet;

pub use format::{emit_theory, load_theory};

use crate::error::{Error, Result};
use crate::lattice::{eta3, minkowski};
use crate::linalg::{int, rat, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexGroup {
    /// One index running over `lo..=hi`.
    Single { name: String, lo: usize, hi: usize },
    /// An antisymmetric index pair, stored once with first < second.
    Antisym { names: (String, String), lo: usize, hi: usize },
}

impl IndexGroup {
    fn values(&self) -> Vec<Vec<usize>> {
        match self {
            IndexGroup::Single { lo, hi, .. } => (*lo..=*hi).map(|i| vec![i]).collect(),
            IndexGroup::Antisym { lo, hi, .. } => {
                let mut out = Vec::new();
                for a in *lo..=*hi {
                    for b in a + 1..=*hi {
                        out.push(vec![a, b]);
                    }
                }
                out
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDescriptor {
    pub name: String,
    pub groups: Vec<IndexGroup>,
}

impl FieldDescriptor {
    /// Component labels in storage order: groups vary lexicographically,
    /// the last group fastest. Labels look like `B[1,0,2]`.
    pub fn components(&self) -> Vec<String> {
        let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
        for g in &self.groups {
            let vals = g.values();
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    vals.iter().map(move |v| {
                        let mut t = t.clone();
                        t.extend(v);
                        t
                    })
                })
                .collect();
        }
        tuples.into_iter().map(|t| component_label(&self.name, &t)).collect()
    }
}

pub fn component_label(field: &str, idx: &[usize]) -> String {
    let inner: Vec<String> = idx.iter().map(ToString::to_string).collect();
    format!("{}[{}]", field, inner.join(","))
}

/// A configuration component or its conjugate momentum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PhaseVar {
    Q(usize),
    P(usize),
}

/// `Id` or a forward difference along spatial axis 1..=3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stencil {
    Id,
    D(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slot {
    pub var: PhaseVar,
    pub stencil: Stencil,
}

impl Slot {
    pub fn id(var: PhaseVar) -> Self {
        Slot { var, stencil: Stencil::Id }
    }
    pub fn d(axis: usize, var: PhaseVar) -> Self {
        Slot { var, stencil: Stencil::D(axis) }
    }
}

/// First factor of a kinetic term. A velocity here makes the Lagrangian
/// quadratic in velocities, which the constraint analysis rejects.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KineticFactor {
    Config(usize),
    Velocity(usize),
}

/// `coeff · factor · q̇_velocity`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KineticTerm {
    pub coeff: Rational,
    pub factor: KineticFactor,
    pub velocity: usize,
}

/// `Σ_x coeff · (S_l u)(x) · (S_r w)(x)`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HamiltonianTerm {
    pub coeff: Rational,
    pub left: Slot,
    pub right: Slot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheorySpec {
    pub name: String,
    pub fields: Vec<FieldDescriptor>,
    pub kinetic: Vec<KineticTerm>,
    pub hamiltonian: Vec<HamiltonianTerm>,
    /// Components that appear only linearly and undifferentiated in time.
    pub multipliers: Vec<usize>,
}

impl TheorySpec {
    pub fn component_labels(&self) -> Vec<String> {
        self.fields.iter().flat_map(FieldDescriptor::components).collect()
    }

    /// Per-site configuration dimension.
    pub fn config_dim(&self) -> usize {
        self.component_labels().len()
    }

    pub fn component_index(&self, label: &str) -> Option<usize> {
        self.component_labels().iter().position(|l| l == label)
    }

    /// Checks every table entry against the declared components.
    pub fn validate(&self) -> Result<()> {
        let mut names = BTreeSet::new();
        for f in &self.fields {
            if !names.insert(f.name.clone()) {
                return Err(Error::Validation(format!("duplicate field name `{}`", f.name)));
            }
            for g in &f.groups {
                let (lo, hi) = match g {
                    IndexGroup::Single { lo, hi, .. } | IndexGroup::Antisym { lo, hi, .. } => (*lo, *hi),
                };
                if lo > hi {
                    return Err(Error::Validation(format!("empty index range {lo}..{hi} in `{}`", f.name)));
                }
            }
        }
        let n = self.config_dim();
        let check = |i: usize, what: &str| {
            if i < n {
                Ok(())
            } else {
                Err(Error::Validation(format!("{what} refers to component #{i}, only {n} declared")))
            }
        };
        for k in &self.kinetic {
            check(k.velocity, "kinetic row")?;
            match k.factor {
                KineticFactor::Config(i) | KineticFactor::Velocity(i) => check(i, "kinetic row")?,
            }
        }
        for h in &self.hamiltonian {
            for s in [h.left, h.right] {
                match s.var {
                    PhaseVar::Q(i) | PhaseVar::P(i) => check(i, "hamiltonian row")?,
                }
                if let Stencil::D(a) = s.stencil {
                    if !(1..=3).contains(&a) {
                        return Err(Error::Validation(format!("stencil D{a} is not a spatial direction")));
                    }
                }
            }
        }
        for &m in &self.multipliers {
            check(m, "multiplier list")?;
        }
        Ok(())
    }

    /// Entries `(m, n, value)` of the velocity Hessian `∂²L/∂q̇_m∂q̇_n`.
    pub fn velocity_hessian(&self) -> Vec<(usize, usize, Rational)> {
        let mut out: Vec<(usize, usize, Rational)> = Vec::new();
        for k in &self.kinetic {
            if let KineticFactor::Velocity(m) = k.factor {
                out.push((m, k.velocity, k.coeff.clone()));
                out.push((k.velocity, m, k.coeff.clone()));
            }
        }
        let mut merged: std::collections::BTreeMap<(usize, usize), Rational> = Default::default();
        for (a, b, v) in out {
            *merged.entry((a, b)).or_insert_with(|| int(0)) += v;
        }
        merged.into_iter().filter(|(_, v)| *v != int(0)).map(|((a, b), v)| (a, b, v)).collect()
    }
}

/// Index of `e[I,mu]` in the paper theory.
pub fn g0_e(i: usize, mu: usize) -> usize {
    4 * i + mu
}

/// Index of `B[I,al,be]` (al < be) in the paper theory.
pub fn g0_b(i: usize, al: usize, be: usize) -> usize {
    assert!(al < be);
    const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    16 + 6 * i + PAIRS.iter().position(|&p| p == (al, be)).unwrap()
}

/// `B[I,a,b]` for any ordered spatial pair, with the sign of the reordering.
pub fn g0_b_signed(i: usize, a: usize, b: usize) -> Option<(usize, i64)> {
    match a.cmp(&b) {
        std::cmp::Ordering::Less => Some((g0_b(i, a, b), 1)),
        std::cmp::Ordering::Greater => Some((g0_b(i, b, a), -1)),
        std::cmp::Ordering::Equal => None,
    }
}

/// The G→0 first-order action in tetrad/two-form variables.
///
/// Fields: `e[I,mu]` (16) and `B[I,al,be]` with `al < be` (24).
/// Kinetic term `η^{abc} B_{Iab} ė^I_c` expanded over ordered pairs (a, b);
/// the canonical Hamiltonian density is
/// `−η^{abc} B_{I0a} D_b e^I_c + Π_I^c D_c e^I_0`.
pub fn paper_g0_theory() -> TheorySpec {
    let fields = vec![
        FieldDescriptor {
            name: "e".into(),
            groups: vec![
                IndexGroup::Single { name: "I".into(), lo: 0, hi: 3 },
                IndexGroup::Single { name: "mu".into(), lo: 0, hi: 3 },
            ],
        },
        FieldDescriptor {
            name: "B".into(),
            groups: vec![
                IndexGroup::Single { name: "I".into(), lo: 0, hi: 3 },
                IndexGroup::Antisym { names: ("al".into(), "be".into()), lo: 0, hi: 3 },
            ],
        },
    ];
    let mut kinetic = Vec::new();
    for i in 0..4 {
        let s = minkowski(i);
        for a in 1..=3 {
            for b in 1..=3 {
                for c in 1..=3 {
                    let e = eta3(a, b, c);
                    if e == 0 {
                        continue;
                    }
                    let (bi, sign) = g0_b_signed(i, a, b).unwrap();
                    kinetic.push(KineticTerm {
                        coeff: int(e * s * sign),
                        factor: KineticFactor::Config(bi),
                        velocity: g0_e(i, c),
                    });
                }
            }
        }
    }
    let mut hamiltonian = Vec::new();
    for i in 0..4 {
        let s = minkowski(i);
        for a in 1..=3 {
            for b in 1..=3 {
                for c in 1..=3 {
                    let e = eta3(a, b, c);
                    if e == 0 {
                        continue;
                    }
                    hamiltonian.push(HamiltonianTerm {
                        coeff: int(-e * s),
                        left: Slot::id(PhaseVar::Q(g0_b(i, 0, a))),
                        right: Slot::d(b, PhaseVar::Q(g0_e(i, c))),
                    });
                }
            }
        }
    }
    for i in 0..4 {
        for c in 1..=3 {
            hamiltonian.push(HamiltonianTerm {
                coeff: int(1),
                left: Slot::id(PhaseVar::P(g0_e(i, c))),
                right: Slot::d(c, PhaseVar::Q(g0_e(i, 0))),
            });
        }
    }
    let mut multipliers: Vec<usize> = (0..4).map(|i| g0_e(i, 0)).collect();
    for i in 0..4 {
        for a in 1..=3 {
            multipliers.push(g0_b(i, 0, a));
        }
    }
    multipliers.sort_unstable();
    TheorySpec { name: "paper_g0".into(), fields, kinetic, hamiltonian, multipliers }
}

/// Index of `A[mu]` / `E[a]` in the Maxwell theory.
pub fn maxwell_a(mu: usize) -> usize {
    mu
}
pub fn maxwell_e(a: usize) -> usize {
    3 + a
}

/// First-order electromagnetism: `E^a Ȧ_a − ½(E² + (curl A)²) + A_0 D̄_a E^a`.
pub fn maxwell_first_order() -> TheorySpec {
    let fields = vec![
        FieldDescriptor { name: "A".into(), groups: vec![IndexGroup::Single { name: "mu".into(), lo: 0, hi: 3 }] },
        FieldDescriptor { name: "E".into(), groups: vec![IndexGroup::Single { name: "a".into(), lo: 1, hi: 3 }] },
    ];
    let kinetic = (1..=3)
        .map(|a| KineticTerm { coeff: int(1), factor: KineticFactor::Config(maxwell_e(a)), velocity: maxwell_a(a) })
        .collect();
    let mut hamiltonian = Vec::new();
    for a in 1..=3 {
        let e = PhaseVar::Q(maxwell_e(a));
        hamiltonian.push(HamiltonianTerm { coeff: rat(1, 2), left: Slot::id(e), right: Slot::id(e) });
    }
    for a in 1..=3 {
        for b in 1..=3 {
            for c in 1..=3 {
                for d in 1..=3 {
                    for f in 1..=3 {
                        let s = eta3(a, b, c) * eta3(a, d, f);
                        if s != 0 {
                            hamiltonian.push(HamiltonianTerm {
                                coeff: rat(s, 2),
                                left: Slot::d(b, PhaseVar::Q(maxwell_a(c))),
                                right: Slot::d(d, PhaseVar::Q(maxwell_a(f))),
                            });
                        }
                    }
                }
            }
        }
    }
    // −A_0 D̄_a E^a summed over the lattice equals Σ E^a D_a A_0.
    for a in 1..=3 {
        hamiltonian.push(HamiltonianTerm {
            coeff: int(1),
            left: Slot::id(PhaseVar::Q(maxwell_e(a))),
            right: Slot::d(a, PhaseVar::Q(maxwell_a(0))),
        });
    }
    TheorySpec { name: "maxwell1".into(), fields, kinetic, hamiltonian, multipliers: vec![maxwell_a(0)] }
}

/// Built-in theory by name.
pub fn builtin(name: &str) -> Option<TheorySpec> {
    match name {
        "paper_g0" => Some(paper_g0_theory()),
        "maxwell1" | "maxwell" => Some(maxwell_first_order()),
        _ => None,
    }
}

//! Text format for theory documents.
//!
//! ```text
//! # comment
//! theory <name>
//!
//! [fields]
//! <field> <group>...          group: I=0..3  or  (al,be)=0..3 (antisymmetric pair)
//!
//! [kinetic]
//! <coeff> <factor> <velocity>  term coeff·factor·(d/dt velocity); factor may be dot:<label>
//!
//! [hamiltonian]
//! <coeff> <var> <stencil> <var>             term coeff·var·(stencil var)
//! <coeff> <stencil> <var> <stencil> <var>   both factors differenced
//!
//! [multipliers]
//! <label>...
//! ```
//!
//! Labels are component labels such as `B[1,0,2]`; a momentum is written
//! `P:<label>`. Coefficients are integers or `n/d`. Stencils are `id`, `D1`,
//! `D2`, `D3` (forward differences).

use std::collections::HashMap;

use super::{
    FieldDescriptor, HamiltonianTerm, IndexGroup, KineticFactor, KineticTerm, PhaseVar, Slot, Stencil, TheorySpec,
};
use crate::error::{Error, Result};
use crate::linalg::{fmt_rational, parse_rational, Rational};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Fields,
    Kinetic,
    Hamiltonian,
    Multipliers,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_range(line: usize, s: &str) -> Result<(usize, usize)> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| perr(line, format!("expected lo..hi, found `{s}`")))?;
    let lo = lo.parse().map_err(|_| perr(line, format!("bad range start `{lo}`")))?;
    let hi = hi.parse().map_err(|_| perr(line, format!("bad range end `{hi}`")))?;
    Ok((lo, hi))
}

fn parse_group(line: usize, tok: &str) -> Result<IndexGroup> {
    let (lhs, range) =
        tok.split_once('=').ok_or_else(|| perr(line, format!("expected index=lo..hi, found `{tok}`")))?;
    let (lo, hi) = parse_range(line, range)?;
    if let Some(inner) = lhs.strip_prefix('(') {
        let inner = inner.strip_suffix(')').ok_or_else(|| perr(line, format!("unclosed pair `{lhs}`")))?;
        let names: Vec<&str> = inner.split(',').map(str::trim).collect();
        if names.len() != 2 || names[0] == names[1] || names.iter().any(|n| n.is_empty()) {
            return Err(Error::Validation(format!(
                "line {line}: antisymmetric pair must name two distinct indices, found `{lhs}`"
            )));
        }
        Ok(IndexGroup::Antisym { names: (names[0].into(), names[1].into()), lo, hi })
    } else {
        Ok(IndexGroup::Single { name: lhs.into(), lo, hi })
    }
}

fn parse_coeff(line: usize, s: &str) -> Result<Rational> {
    parse_rational(s).ok_or_else(|| perr(line, format!("bad coefficient `{s}`")))
}

fn parse_stencil(line: usize, s: &str) -> Result<Stencil> {
    match s {
        "id" => Ok(Stencil::Id),
        "D1" => Ok(Stencil::D(1)),
        "D2" => Ok(Stencil::D(2)),
        "D3" => Ok(Stencil::D(3)),
        _ => Err(perr(line, format!("unknown stencil `{s}`"))),
    }
}

fn stencil_str(s: Stencil) -> String {
    match s {
        Stencil::Id => "id".into(),
        Stencil::D(a) => format!("D{a}"),
    }
}

struct Resolver {
    index: HashMap<String, usize>,
}

impl Resolver {
    fn component(&self, line: usize, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::Validation(format!("line {line}: undeclared component `{label}`")))
    }

    fn var(&self, line: usize, label: &str) -> Result<PhaseVar> {
        match label.strip_prefix("P:") {
            Some(l) => Ok(PhaseVar::P(self.component(line, l)?)),
            None => Ok(PhaseVar::Q(self.component(line, label)?)),
        }
    }
}

/// Parse and validate a theory document.
pub fn load_theory(document: &str) -> Result<TheorySpec> {
    let mut name: Option<String> = None;
    let mut fields: Vec<FieldDescriptor> = Vec::new();
    let mut section = Section::None;
    // Table rows are resolved once all fields are known.
    let mut kinetic_rows: Vec<(usize, Vec<String>)> = Vec::new();
    let mut ham_rows: Vec<(usize, Vec<String>)> = Vec::new();
    let mut mult_rows: Vec<(usize, String)> = Vec::new();

    for (k, raw) in document.lines().enumerate() {
        let line = k + 1;
        let text = raw.split('#').next().unwrap().trim();
        if text.is_empty() {
            continue;
        }
        if text.starts_with('[') {
            section = match text {
                "[fields]" => Section::Fields,
                "[kinetic]" => Section::Kinetic,
                "[hamiltonian]" => Section::Hamiltonian,
                "[multipliers]" => Section::Multipliers,
                _ => return Err(perr(line, format!("unknown section `{text}`"))),
            };
            continue;
        }
        let toks: Vec<String> = text.split_whitespace().map(String::from).collect();
        match section {
            Section::None => {
                if toks.len() == 2 && toks[0] == "theory" {
                    name = Some(toks[1].clone());
                } else {
                    return Err(perr(line, "expected `theory <name>` before any section"));
                }
            }
            Section::Fields => {
                let groups = toks[1..].iter().map(|t| parse_group(line, t)).collect::<Result<Vec<_>>>()?;
                fields.push(FieldDescriptor { name: toks[0].clone(), groups });
            }
            Section::Kinetic => {
                if toks.len() != 3 {
                    return Err(perr(line, "kinetic rows have 3 columns: coefficient factor velocity"));
                }
                kinetic_rows.push((line, toks));
            }
            Section::Hamiltonian => {
                if toks.len() != 4 && toks.len() != 5 {
                    return Err(perr(line, "hamiltonian rows have 4 or 5 columns"));
                }
                ham_rows.push((line, toks));
            }
            Section::Multipliers => mult_rows.extend(toks.into_iter().map(|t| (line, t))),
        }
    }
    let name = name.ok_or_else(|| perr(document.lines().count().max(1), "missing `theory <name>` header"))?;
    if fields.is_empty() {
        return Err(perr(document.lines().count().max(1), "no [fields] declared"));
    }

    let mut spec = TheorySpec { name, fields, kinetic: Vec::new(), hamiltonian: Vec::new(), multipliers: Vec::new() };
    // Duplicate fields must be reported before label resolution.
    {
        let mut seen = std::collections::BTreeSet::new();
        for f in &spec.fields {
            if !seen.insert(f.name.clone()) {
                return Err(Error::Validation(format!("duplicate field name `{}`", f.name)));
            }
        }
    }
    let res = Resolver { index: spec.component_labels().into_iter().enumerate().map(|(i, l)| (l, i)).collect() };
    for (line, t) in kinetic_rows {
        let coeff = parse_coeff(line, &t[0])?;
        let factor = match t[1].strip_prefix("dot:") {
            Some(l) => KineticFactor::Velocity(res.component(line, l)?),
            None => KineticFactor::Config(res.component(line, &t[1])?),
        };
        spec.kinetic.push(KineticTerm { coeff, factor, velocity: res.component(line, &t[2])? });
    }
    for (line, t) in ham_rows {
        let coeff = parse_coeff(line, &t[0])?;
        let (left, right) = if t.len() == 4 {
            (Slot::id(res.var(line, &t[1])?), Slot { stencil: parse_stencil(line, &t[2])?, var: res.var(line, &t[3])? })
        } else {
            (
                Slot { stencil: parse_stencil(line, &t[1])?, var: res.var(line, &t[2])? },
                Slot { stencil: parse_stencil(line, &t[3])?, var: res.var(line, &t[4])? },
            )
        };
        spec.hamiltonian.push(HamiltonianTerm { coeff, left, right });
    }
    for (line, l) in mult_rows {
        spec.multipliers.push(res.component(line, &l)?);
    }
    spec.validate()?;
    Ok(spec)
}

/// Canonical text form; `load_theory(emit_theory(s)) == s`.
pub fn emit_theory(spec: &TheorySpec) -> String {
    let labels = spec.component_labels();
    let var = |v: PhaseVar| match v {
        PhaseVar::Q(i) => labels[i].clone(),
        PhaseVar::P(i) => format!("P:{}", labels[i]),
    };
    let mut out = format!("theory {}\n\n[fields]\n", spec.name);
    for f in &spec.fields {
        out.push_str(&f.name);
        for g in &f.groups {
            match g {
                IndexGroup::Single { name, lo, hi } => out.push_str(&format!(" {name}={lo}..{hi}")),
                IndexGroup::Antisym { names, lo, hi } => {
                    out.push_str(&format!(" ({},{})={lo}..{hi}", names.0, names.1))
                }
            }
        }
        out.push('\n');
    }
    out.push_str("\n[kinetic]\n");
    for k in &spec.kinetic {
        let factor = match k.factor {
            KineticFactor::Config(i) => labels[i].clone(),
            KineticFactor::Velocity(i) => format!("dot:{}", labels[i]),
        };
        out.push_str(&format!("{} {} {}\n", fmt_rational(&k.coeff), factor, labels[k.velocity]));
    }
    out.push_str("\n[hamiltonian]\n");
    for h in &spec.hamiltonian {
        let c = fmt_rational(&h.coeff);
        if h.left.stencil == Stencil::Id {
            out.push_str(&format!("{c} {} {} {}\n", var(h.left.var), stencil_str(h.right.stencil), var(h.right.var)));
        } else {
            out.push_str(&format!(
                "{c} {} {} {} {}\n",
                stencil_str(h.left.stencil),
                var(h.left.var),
                stencil_str(h.right.stencil),
                var(h.right.var)
            ));
        }
    }
    out.push_str("\n[multipliers]\n");
    let m: Vec<&str> = spec.multipliers.iter().map(|&i| labels[i].as_str()).collect();
    out.push_str(&m.join(" "));
    out.push('\n');
    out
}

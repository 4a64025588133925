//! Periodic cubical lattices and difference operators.
//!
//! Axes are numbered like spacetime indices: 0 is time, 1..=3 are space.
//! A spatial lattice only accepts axes 1..=3. Sites are stored with x
//! fastest: `flat = x + N*y + N²*z + N³*t`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Rational, SparseMatrix};

/// A scalar field: one rational per site.
pub type Field = Vec<Rational>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub n: usize,
    pub t: usize,
    pub spacetime: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Forward,
    Backward,
}

/// Coordinates `[t, x, y, z]`, each reduced into `[0, extent)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SiteIndex(pub [usize; 4]);

impl LatticeSpec {
    pub fn spatial(n: usize) -> Self {
        assert!(n >= 1, "spatial extent must be at least 1");
        LatticeSpec { n, t: 1, spacetime: false }
    }

    pub fn spacetime(t: usize, n: usize) -> Self {
        assert!(n >= 1 && t >= 1, "extents must be at least 1");
        LatticeSpec { n, t, spacetime: true }
    }

    /// Spatial volume N³.
    pub fn spatial_volume(&self) -> usize {
        self.n.pow(3)
    }

    /// Number of sites: N³, or T·N³ for a spacetime lattice.
    pub fn volume(&self) -> usize {
        if self.spacetime {
            self.t * self.spatial_volume()
        } else {
            self.spatial_volume()
        }
    }

    pub fn extent(&self, axis: usize) -> usize {
        if axis == 0 {
            self.t
        } else {
            self.n
        }
    }

    pub fn axes(&self) -> std::ops::RangeInclusive<usize> {
        if self.spacetime {
            0..=3
        } else {
            1..=3
        }
    }

    pub fn check_axis(&self, axis: usize) -> Result<()> {
        if self.axes().contains(&axis) {
            Ok(())
        } else {
            Err(Error::InvalidAxis { axis, dim: if self.spacetime { 4 } else { 3 } })
        }
    }

    pub fn site(&self, coords: [i64; 4]) -> SiteIndex {
        let mut c = [0usize; 4];
        for (axis, v) in coords.iter().enumerate() {
            let ext = if axis == 0 && !self.spacetime { 1 } else { self.extent(axis) } as i64;
            c[axis] = v.rem_euclid(ext) as usize;
        }
        SiteIndex(c)
    }

    pub fn flat(&self, s: SiteIndex) -> usize {
        let [t, x, y, z] = s.0;
        let n = self.n;
        let spatial = x + n * (y + n * z);
        if self.spacetime {
            spatial + self.spatial_volume() * t
        } else {
            spatial
        }
    }

    pub fn coords(&self, flat: usize) -> SiteIndex {
        let n = self.n;
        let v3 = self.spatial_volume();
        let (t, s) = if self.spacetime { (flat / v3, flat % v3) } else { (0, flat) };
        SiteIndex([t, s % n, (s / n) % n, s / (n * n)])
    }

    /// Flat index of the neighbour `steps` sites along `axis`.
    pub fn shift(&self, flat: usize, axis: usize, steps: i64) -> usize {
        let c = self.coords(flat).0;
        let mut s = [c[0] as i64, c[1] as i64, c[2] as i64, c[3] as i64];
        s[axis] += steps;
        self.flat(self.site(s))
    }

    /// Sites of the time slice `t` of a spacetime lattice, in spatial order.
    pub fn slice_sites(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        let v3 = self.spatial_volume();
        (0..v3).map(move |s| s + v3 * (t % self.t))
    }

    pub fn zero_field(&self) -> Field {
        vec![Rational::zero(); self.volume()]
    }
}

/// Matrix of the forward (`f(x+â) − f(x)`) or backward (`f(x) − f(x−â)`)
/// difference along `axis`, with periodic wraparound.
pub fn diff_matrix(l: &LatticeSpec, axis: usize, orientation: Orientation) -> Result<SparseMatrix> {
    l.check_axis(axis)?;
    let v = l.volume();
    let mut trip = Vec::with_capacity(2 * v);
    for x in 0..v {
        let other = match orientation {
            Orientation::Forward => l.shift(x, axis, 1),
            Orientation::Backward => l.shift(x, axis, -1),
        };
        let (plus, minus) = match orientation {
            Orientation::Forward => (other, x),
            Orientation::Backward => (x, other),
        };
        trip.push((x, plus, Rational::one()));
        trip.push((x, minus, -Rational::one()));
    }
    SparseMatrix::from_triplets(v, v, trip)
}

/// Forward difference applied to a field.
pub fn forward(l: &LatticeSpec, f: &[Rational], axis: usize) -> Field {
    (0..l.volume()).map(|x| &f[l.shift(x, axis, 1)] - &f[x]).collect()
}

/// Backward difference applied to a field.
pub fn backward(l: &LatticeSpec, f: &[Rational], axis: usize) -> Field {
    (0..l.volume()).map(|x| &f[x] - &f[l.shift(x, axis, -1)]).collect()
}

pub fn shifted(l: &LatticeSpec, f: &[Rational], axis: usize, steps: i64) -> Field {
    (0..l.volume()).map(|x| f[l.shift(x, axis, steps)].clone()).collect()
}

pub fn apply_diff(l: &LatticeSpec, f: &[Rational], axis: usize, o: Orientation) -> Field {
    match o {
        Orientation::Forward => forward(l, f, axis),
        Orientation::Backward => backward(l, f, axis),
    }
}

/// Totally antisymmetric symbol on 3 or 4 indices, `ε^{0123} = η^{123} = +1`.
pub fn levi_civita(indices: &[usize]) -> i64 {
    let n = indices.len();
    debug_assert!(n == 3 || n == 4);
    let offset = if n == 3 { 1 } else { 0 };
    let mut p: Vec<usize> = Vec::with_capacity(n);
    for &i in indices {
        if i < offset || i - offset >= n {
            return 0;
        }
        p.push(i - offset);
    }
    let mut sign = 1;
    for i in 0..n {
        for j in i + 1..n {
            if p[i] == p[j] {
                return 0;
            }
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// `η^{abc}` over spatial indices 1..=3.
pub fn eta3(a: usize, b: usize, c: usize) -> i64 {
    levi_civita(&[a, b, c])
}

/// `ε^{μναβ}` over spacetime indices 0..=3.
pub fn eps4(m: usize, n: usize, a: usize, b: usize) -> i64 {
    levi_civita(&[m, n, a, b])
}

/// Internal Minkowski metric, signature (−,+,+,+).
pub fn minkowski(i: usize) -> i64 {
    if i == 0 {
        -1
    } else {
        1
    }
}

//! Pointwise maps between tetrad, connection and two-form grids.
//!
//! Storage: `TetradGrid` holds `e^I_μ` as `[I][μ]`; `ConnectionGrid` holds
//! `ω_μ^{IJ}` as `[μ][I][J]`, antisymmetric in `IJ`; `BGrid` holds
//! `B^I_{αβ}` as `[I][α][β]`, antisymmetric in `αβ`. Internal indices are
//! lowered with `η = diag(−1, 1, 1, 1)`. Antisymmetrization brackets are
//! unnormalized: `X_{[α}Y_{β]} = X_α Y_β − X_β Y_α`.

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{eps4, forward, minkowski, LatticeSpec};
use crate::linalg::{int, invert, rat, Rational, SparseMatrix};

pub type Mat4 = [[Rational; 4]; 4];
pub type Tensor3 = [[[Rational; 4]; 4]; 4];

pub fn zero_mat4() -> Mat4 {
    std::array::from_fn(|_| std::array::from_fn(|_| Rational::zero()))
}

pub fn zero_tensor3() -> Tensor3 {
    std::array::from_fn(|_| zero_mat4())
}

#[derive(Clone, Debug, PartialEq)]
pub struct TetradGrid {
    pub lattice: LatticeSpec,
    pub sites: Vec<Mat4>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionGrid {
    pub lattice: LatticeSpec,
    pub sites: Vec<Tensor3>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BGrid {
    pub lattice: LatticeSpec,
    pub sites: Vec<Tensor3>,
}

impl TetradGrid {
    pub fn identity(lattice: LatticeSpec) -> Self {
        let mut m = zero_mat4();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = int(1);
        }
        TetradGrid { lattice, sites: vec![m; lattice.volume()] }
    }
}

fn eta(i: usize) -> Rational {
    int(minkowski(i))
}

/// `B^I_{αβ} = −½ ε^{IJKL} (e_{αJ} ω_{βKL} − e_{βJ} ω_{αKL})` at every site.
pub fn b_from_connection(e: &TetradGrid, w: &ConnectionGrid) -> Result<BGrid> {
    if e.lattice != w.lattice {
        return Err(Error::DimensionMismatch { expected: e.lattice.volume(), found: w.lattice.volume() });
    }
    let sites = e.sites.par_iter().zip(&w.sites).map(|(es, ws)| b_site(es, ws)).collect();
    Ok(BGrid { lattice: e.lattice, sites })
}

fn b_site(e: &Mat4, w: &Tensor3) -> Tensor3 {
    let half = rat(1, 2);
    let mut b = zero_tensor3();
    for i in 0..4 {
        for al in 0..4 {
            for be in 0..4 {
                if al == be {
                    continue;
                }
                let mut acc = Rational::zero();
                for j in 0..4 {
                    for k in 0..4 {
                        for l in 0..4 {
                            let s = eps4(i, j, k, l);
                            if s == 0 {
                                continue;
                            }
                            // lowered: e_{αJ} = η_JJ e^J_α, ω_{βKL} = η_KK η_LL ω_β^{KL}
                            let low = minkowski(j) * minkowski(k) * minkowski(l);
                            let t = &e[j][al] * &w[be][k][l] - &e[j][be] * &w[al][k][l];
                            acc += int(s * low) * t;
                        }
                    }
                }
                b[i][al][be] = -(&half * acc);
            }
        }
    }
    b
}

/// Inverse map, valid where the tetrad is invertible:
/// `ω_{αIJ} = ½ ε_{IJKL} e^{βK} (B^L_{αβ} − ½ e^{γL} e_{αN} B^N_{βγ})`.
pub fn connection_from_b(e: &TetradGrid, b: &BGrid) -> Result<ConnectionGrid> {
    if e.lattice != b.lattice {
        return Err(Error::DimensionMismatch { expected: e.lattice.volume(), found: b.lattice.volume() });
    }
    let sites = e
        .sites
        .par_iter()
        .zip(&b.sites)
        .enumerate()
        .map(|(site, (es, bs))| connection_site(es, bs).ok_or(Error::DegenerateTetrad(site)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConnectionGrid { lattice: e.lattice, sites })
}

/// `e^μ_I` as `[μ][I]`, or `None` when singular.
pub fn inverse_tetrad(e: &Mat4) -> Option<Mat4> {
    let m = SparseMatrix::from_dense(&e.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
    let inv = invert(&m).ok()?.to_dense();
    // e[I][μ] is a matrix with rows I, columns μ; its inverse has rows μ, columns I.
    Some(std::array::from_fn(|mu| std::array::from_fn(|i| inv[mu][i].clone())))
}

fn connection_site(e: &Mat4, b: &Tensor3) -> Option<Tensor3> {
    let inv = inverse_tetrad(e)?;
    let half = rat(1, 2);
    // e^{βK} = e^β_K η^{KK}
    let eup: Mat4 = std::array::from_fn(|be| std::array::from_fn(|k| &inv[be][k] * eta(k)));
    // Z^L_{αβ} = B^L_{αβ} − ½ e^{γL} e_{αN} B^N_{βγ}
    let mut z = zero_tensor3();
    for l in 0..4 {
        for al in 0..4 {
            for be in 0..4 {
                let mut corr = Rational::zero();
                for ga in 0..4 {
                    for n in 0..4 {
                        if b[n][be][ga].is_zero() {
                            continue;
                        }
                        corr += &eup[ga][l] * (&e[n][al] * eta(n)) * &b[n][be][ga];
                    }
                }
                z[l][al][be] = &b[l][al][be] - &half * corr;
            }
        }
    }
    let mut w = zero_tensor3();
    for al in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = Rational::zero();
                for k in 0..4 {
                    for l in 0..4 {
                        // ε_{IJKL} = −ε^{IJKL}
                        let s = -eps4(i, j, k, l);
                        if s == 0 {
                            continue;
                        }
                        for be in 0..4 {
                            acc += int(s) * &eup[be][k] * &z[l][al][be];
                        }
                    }
                }
                // raise I, J
                w[al][i][j] = &half * acc * eta(i) * eta(j);
            }
        }
    }
    Some(w)
}

/// `g_{μν} = η_IJ G^I_μ G^J_ν` from supplied per-site gradients `G[μ][I] = D_μ f^I`.
pub fn metric_from_gradients(grads: &[Mat4]) -> Vec<Mat4> {
    grads
        .iter()
        .map(|g| {
            std::array::from_fn(|mu| {
                std::array::from_fn(|nu| (0..4).fold(Rational::zero(), |acc, i| acc + eta(i) * &g[mu][i] * &g[nu][i]))
            })
        })
        .collect()
}

/// Metric built from forward differences of a 4-vector field on a spacetime lattice.
pub fn metric_from_f(l: &LatticeSpec, f: &[Vec<Rational>; 4]) -> Result<Vec<Mat4>> {
    if !l.spacetime {
        return Err(Error::InvalidAxis { axis: 0, dim: 3 });
    }
    let d: Vec<Vec<Vec<Rational>>> = (0..4).map(|mu| (0..4).map(|i| forward(l, &f[i], mu)).collect()).collect();
    let grads: Vec<Mat4> =
        (0..l.volume()).map(|x| std::array::from_fn(|mu| std::array::from_fn(|i| d[mu][i][x].clone()))).collect();
    Ok(metric_from_gradients(&grads))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(rng: &mut ChaCha8Rng) -> Rational {
        rat(rng.gen_range(-5..6), rng.gen_range(1..4))
    }

    fn random_connection(l: LatticeSpec, rng: &mut ChaCha8Rng) -> ConnectionGrid {
        let sites = (0..l.volume())
            .map(|_| {
                let mut w = zero_tensor3();
                for mu in 0..4 {
                    for i in 0..4 {
                        for j in i + 1..4 {
                            let v = r(rng);
                            w[mu][j][i] = -v.clone();
                            w[mu][i][j] = v;
                        }
                    }
                }
                w
            })
            .collect();
        ConnectionGrid { lattice: l, sites }
    }

    #[test]
    fn zero_inputs_give_zero_b() {
        let l = LatticeSpec::spatial(1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = random_connection(l, &mut rng);
        let zero_e = TetradGrid { lattice: l, sites: vec![zero_mat4()] };
        assert!(b_from_connection(&zero_e, &w).unwrap().sites[0].iter().flatten().flatten().all(Zero::is_zero));
        let zero_w = ConnectionGrid { lattice: l, sites: vec![zero_tensor3()] };
        let b = b_from_connection(&TetradGrid::identity(l), &zero_w).unwrap();
        assert!(b.sites[0].iter().flatten().flatten().all(Zero::is_zero));
    }

    #[test]
    fn single_component_against_expansion() {
        // Identity tetrad, only ω_1^{23} = −ω_1^{32} = 1.
        let l = LatticeSpec::spatial(1);
        let mut w = zero_tensor3();
        w[1][2][3] = int(1);
        w[1][3][2] = int(-1);
        let b = b_from_connection(&TetradGrid::identity(l), &ConnectionGrid { lattice: l, sites: vec![w] }).unwrap();
        let mut nonzero = Vec::new();
        for i in 0..4 {
            for al in 0..4 {
                for be in 0..4 {
                    if !b.sites[0][i][al][be].is_zero() {
                        nonzero.push((i, al, be, b.sites[0][i][al][be].clone()));
                    }
                }
            }
        }
        // Brute-force oracle over the full antisymmetrized sum.
        let mut oracle = Vec::new();
        for i in 0..4 {
            for al in 0..4 {
                for be in 0..4 {
                    let mut acc = Rational::zero();
                    for j in 0..4 {
                        for k in 0..4 {
                            for ll in 0..4 {
                                let s = eps4(i, j, k, ll);
                                let ej = |mu: usize| if mu == j { eta(j) } else { int(0) };
                                let wl = |mu: usize| &w_full(mu, k, ll) * eta(k) * eta(ll);
                                acc += int(s) * (ej(al) * wl(be) - ej(be) * wl(al));
                            }
                        }
                    }
                    let v = -rat(1, 2) * acc;
                    if !v.is_zero() {
                        oracle.push((i, al, be, v));
                    }
                }
            }
        }
        fn w_full(mu: usize, k: usize, l: usize) -> Rational {
            match (mu, k, l) {
                (1, 2, 3) => int(1),
                (1, 3, 2) => int(-1),
                _ => int(0),
            }
        }
        assert_eq!(nonzero, oracle);
        // Only B^1_{01} = −B^1_{10}: ε^{IJ23} with J = α forces {I, α} = {0, 1}, β = 1.
        assert_eq!(nonzero.len(), 2);
        assert_eq!((nonzero[0].0, nonzero[0].1, nonzero[0].2), (1, 0, 1));
    }

    #[test]
    fn b_is_antisymmetric_and_round_trips() {
        let l = LatticeSpec::spatial(2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let w = random_connection(l, &mut rng);
            let e = TetradGrid {
                lattice: l,
                sites: (0..l.volume())
                    .map(|_| {
                        std::array::from_fn(|i| {
                            std::array::from_fn(|mu| if i == mu { int(2) } else { int(0) } + r(&mut rng))
                        })
                    })
                    .collect(),
            };
            if e.sites.iter().any(|s| inverse_tetrad(s).is_none()) {
                continue;
            }
            let b = b_from_connection(&e, &w).unwrap();
            for s in &b.sites {
                for i in 0..4 {
                    for al in 0..4 {
                        for be in 0..4 {
                            assert_eq!(s[i][al][be], -s[i][be][al].clone());
                        }
                    }
                }
            }
            assert_eq!(connection_from_b(&e, &b).unwrap(), w);
        }
    }

    #[test]
    fn identity_tetrad_zero_b() {
        let l = LatticeSpec::spatial(1);
        let b = BGrid { lattice: l, sites: vec![zero_tensor3()] };
        let w = connection_from_b(&TetradGrid::identity(l), &b).unwrap();
        assert!(w.sites[0].iter().flatten().flatten().all(Zero::is_zero));
    }

    #[test]
    fn degenerate_tetrad_is_rejected() {
        let l = LatticeSpec::spatial(2);
        let mut e = TetradGrid::identity(l);
        e.sites[3][2] = std::array::from_fn(|_| int(0));
        let b = BGrid { lattice: l, sites: vec![zero_tensor3(); l.volume()] };
        assert_eq!(connection_from_b(&e, &b), Err(Error::DegenerateTetrad(3)));
    }

    #[test]
    fn minkowski_from_unit_gradients() {
        let grads = vec![std::array::from_fn(|mu| std::array::from_fn(|i| if mu == i { int(1) } else { int(0) })); 5];
        for g in metric_from_gradients(&grads) {
            for mu in 0..4 {
                for nu in 0..4 {
                    let expect = if mu == nu { eta(mu) } else { int(0) };
                    assert_eq!(g[mu][nu], expect);
                }
            }
        }
    }

    #[test]
    fn metric_of_constant_and_random_f() {
        let l = LatticeSpec::spacetime(2, 2);
        let c: [Vec<Rational>; 4] = std::array::from_fn(|i| vec![int(i as i64 + 3); l.volume()]);
        assert!(metric_from_f(&l, &c).unwrap().iter().flatten().flatten().all(Zero::is_zero));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f: [Vec<Rational>; 4] = std::array::from_fn(|_| (0..l.volume()).map(|_| r(&mut rng)).collect());
        let g = metric_from_f(&l, &f).unwrap();
        for (x, gx) in g.iter().enumerate() {
            for mu in 0..4 {
                for nu in 0..4 {
                    assert_eq!(gx[mu][nu], gx[nu][mu]);
                    // direct summation
                    let mut acc = Rational::zero();
                    for i in 0..4 {
                        let dm = &f[i][l.shift(x, mu, 1)] - &f[i][x];
                        let dn = &f[i][l.shift(x, nu, 1)] - &f[i][x];
                        acc += eta(i) * dm * dn;
                    }
                    assert_eq!(gx[mu][nu], acc);
                }
            }
            let m = SparseMatrix::from_dense(&gx.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
            assert!(crate::linalg::rank(&m) <= 4);
        }
    }
}

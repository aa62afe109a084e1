//! A random member of a family over `F_p`, `p = 2^61 - 1`, expanded as a
//! power series in the orbifold coordinates at one of its quotient points.
//!
//! The hypersurface equation is solved for the dependent coordinate by
//! fixed-point iteration, truncated at a weighted order. This gives the
//! actual order along `E` of a linear combination of monomials, which the
//! monomial-only bounds in [`crate::blowup`] cannot see (cancellation through
//! the equation). Coefficients are drawn from a seeded ChaCha stream; a
//! nonzero polynomial condition of degree `k` fails for them with probability
//! at most `k/p`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::catalog::FamilyRecord;
use crate::singularity::{Location, QuotientSingularity};
use crate::wps::{monomials_of_degree, Monomial};

pub const PRIME: u64 = (1 << 61) - 1;
pub const DEFAULT_SEED: u64 = 0x5eed_f0a0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenericError {
    #[error("the random member is not quasismooth at the chosen point (seed {0})")]
    Degenerate(u64),
    #[error("local expansion did not converge below order {0}")]
    NoConvergence(u32),
}

fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= PRIME {
        s - PRIME
    } else {
        s
    }
}

fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + PRIME - b
    }
}

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut out = 1;
    while e > 0 {
        if e & 1 == 1 {
            out = mul(out, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    out
}

fn inv(a: u64) -> u64 {
    pow(a, PRIME - 2)
}

/// Exponent triples of weighted order `<= cap`, densely indexed.
struct Grid {
    cap: u32,
    exps: Vec<[u32; 3]>,
    ord: Vec<u32>,
    dims: [usize; 3],
    lookup: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl Grid {
    fn new(lw: [u32; 3], cap: u32) -> Self {
        let dims = lw.map(|l| (cap / l) as usize + 1);
        let mut lookup = vec![NONE; dims[0] * dims[1] * dims[2]];
        let (mut exps, mut ord) = (Vec::new(), Vec::new());
        for a in 0..dims[0] as u32 {
            for b in 0..dims[1] as u32 {
                for c in 0..dims[2] as u32 {
                    let o = a * lw[0] + b * lw[1] + c * lw[2];
                    if o <= cap {
                        lookup[(a as usize * dims[1] + b as usize) * dims[2] + c as usize] =
                            exps.len() as u32;
                        exps.push([a, b, c]);
                        ord.push(o);
                    }
                }
            }
        }
        Grid { cap, exps, ord, dims, lookup }
    }

    fn index(&self, e: [u32; 3]) -> Option<usize> {
        if (0..3).any(|k| e[k] as usize >= self.dims[k]) {
            return None;
        }
        let i = self.lookup[(e[0] as usize * self.dims[1] + e[1] as usize) * self.dims[2] + e[2] as usize];
        (i != NONE).then_some(i as usize)
    }

    fn zero(&self) -> Vec<u64> {
        vec![0; self.exps.len()]
    }

    fn constant(&self, c: u64) -> Vec<u64> {
        let mut s = self.zero();
        s[0] = c;
        s
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = self.zero();
        let nb: Vec<usize> = (0..b.len()).filter(|&j| b[j] != 0).collect();
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            let (ei, oi) = (self.exps[i], self.ord[i]);
            for &j in &nb {
                if oi + self.ord[j] > self.cap {
                    continue;
                }
                let ej = self.exps[j];
                if let Some(k) = self.index([ei[0] + ej[0], ei[1] + ej[1], ei[2] + ej[2]]) {
                    out[k] = add(out[k], mul(ai, b[j]));
                }
            }
        }
        out
    }

    /// `s * T^e`, truncated.
    fn shift(&self, s: &[u64], e: [u32; 3]) -> Vec<u64> {
        let mut out = self.zero();
        for (i, &c) in s.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let ei = self.exps[i];
            if let Some(k) = self.index([ei[0] + e[0], ei[1] + e[1], ei[2] + e[2]]) {
                out[k] = c;
            }
        }
        out
    }
}

/// A random member near one quotient point, with the dependent coordinate
/// eliminated up to weighted order `cap / r`.
pub struct LocalModel {
    grid: Grid,
    transverse: [usize; 3],
    dependent: usize,
    /// Series of the dependent coordinate (`φ`, or `1 + φ` on a stratum).
    dep: Vec<u64>,
}

impl LocalModel {
    pub fn new(f: &FamilyRecord, s: &QuotientSingularity, cap: u32, seed: u64) -> Result<Self, GenericError> {
        let grid = Grid::new(s.local_weights, cap);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coeffs: Vec<(Monomial, u64)> = monomials_of_degree(&f.weights, f.degree)
            .into_iter()
            .map(|m| (m, rng.gen_range(1..PRIME)))
            .collect();
        let on_stratum = |m: &Monomial| s.transverse.iter().all(|&k| m.exp(k) == 0);
        let base = match s.location {
            Location::Vertex(_) => 0,
            Location::Edge(..) => {
                // move one root of the restricted form to x_dep = 1
                let idx: Vec<usize> = (0..coeffs.len()).filter(|&i| on_stratum(&coeffs[i].0)).collect();
                let rest = idx[1..].iter().fold(0, |acc, &i| add(acc, coeffs[i].1));
                coeffs[idx[0]].1 = sub(0, rest);
                1
            }
        };
        let gamma = coeffs
            .iter()
            .filter(|(m, _)| on_stratum(m) && (base == 1 || m.exp(s.dependent) == 1))
            .fold(0, |acc, (m, a)| add(acc, mul(m.exp(s.dependent) as u64, *a)));
        if gamma == 0 {
            return Err(GenericError::Degenerate(seed));
        }

        // F = sum_k x_dep^k F_k(T)
        let mut parts: BTreeMap<u32, Vec<u64>> = BTreeMap::new();
        for (m, a) in &coeffs {
            let e = s.transverse.map(|k| m.exp(k));
            if let Some(i) = grid.index(e) {
                let slot = parts.entry(m.exp(s.dependent)).or_insert_with(|| grid.zero());
                slot[i] = add(slot[i], *a);
            }
        }
        let gamma_inv = inv(gamma);
        let mut dep = grid.constant(base);
        let mut converged = false;
        for _ in 0..=cap + 1 {
            let residual = evaluate(&grid, &parts, &dep);
            if residual.iter().all(|&c| c == 0) {
                converged = true;
                break;
            }
            for (d, r) in dep.iter_mut().zip(&residual) {
                *d = sub(*d, mul(*r, gamma_inv));
            }
        }
        if !converged {
            return Err(GenericError::NoConvergence(cap));
        }
        Ok(LocalModel { grid, transverse: s.transverse, dependent: s.dependent, dep })
    }

    pub fn cap(&self) -> u32 {
        self.grid.cap
    }

    /// Series of the monomial `m` on the member, unit coordinate set to 1.
    fn expand(&self, m: &Monomial, dep_powers: &mut Vec<Vec<u64>>) -> Vec<u64> {
        let k = m.exp(self.dependent) as usize;
        while dep_powers.len() <= k {
            let next = match dep_powers.last() {
                None => self.grid.constant(1),
                Some(p) => self.grid.mul(p, &self.dep),
            };
            dep_powers.push(next);
        }
        self.grid.shift(&dep_powers[k], self.transverse.map(|v| m.exp(v)))
    }

    /// Whether a general combination `g` of the degree-`b` monomials with
    /// order at least `theta/r` along `E` exists and has, at order exactly
    /// `theta/r`, a term free of the coordinate `x_free`. With `x_free = x_0`
    /// this says `{g = 0}` has order exactly `theta/r` and meets the
    /// transform of `{x_0 = 0}` properly.
    pub fn meets_properly(&self, f: &FamilyRecord, b: u32, theta: u32, x_free: usize) -> bool {
        assert!(theta <= self.grid.cap, "order {theta} above expansion cap {}", self.grid.cap);
        let slot = self.transverse.iter().position(|&v| v == x_free);
        let monos = monomials_of_degree(&f.weights, b);
        let mut dep_powers = Vec::new();
        let cols: Vec<Vec<u64>> = monos.iter().map(|m| self.expand(m, &mut dep_powers)).collect();
        let n = cols.len();
        let mut low: Vec<Vec<u64>> = Vec::new();
        let mut lead: Vec<Vec<u64>> = Vec::new();
        for i in 0..self.grid.exps.len() {
            let o = self.grid.ord[i];
            if o > theta {
                continue;
            }
            let row: Vec<u64> = cols.iter().map(|c| c[i]).collect();
            if row.iter().all(|&x| x == 0) {
                continue;
            }
            if o < theta {
                low.push(row);
            } else if slot.is_none_or(|k| self.grid.exps[i][k] == 0) {
                lead.push(row);
            }
        }
        let kernel = kernel_basis(low, n);
        lead.iter().any(|row| {
            kernel.iter().any(|v| row.iter().zip(v).fold(0, |acc, (a, b)| add(acc, mul(*a, *b))) != 0)
        })
    }
}

fn evaluate(grid: &Grid, parts: &BTreeMap<u32, Vec<u64>>, dep: &[u64]) -> Vec<u64> {
    let mut out = grid.zero();
    let mut power = grid.constant(1);
    let mut k = 0;
    for (&e, fk) in parts {
        while k < e {
            power = grid.mul(&power, dep);
            k += 1;
        }
        let term = grid.mul(&power, fk);
        for (o, t) in out.iter_mut().zip(&term) {
            *o = add(*o, *t);
        }
    }
    out
}

/// Basis of `{v : M v = 0}` over `F_p`, `M` given by rows of length `n`.
fn kernel_basis(mut rows: Vec<Vec<u64>>, n: usize) -> Vec<Vec<u64>> {
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else { continue };
        rows.swap(rank, p);
        let s = inv(rows[rank][col]);
        for x in rows[rank].iter_mut() {
            *x = mul(*x, s);
        }
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[col] != 0 {
                let factor = row[col];
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x = sub(*x, mul(factor, *p));
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    (0..n)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![0; n];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = sub(0, rows[i][free]);
            }
            v
        })
        .collect()
}

//! Weighted projective space combinatorics for `P(w0, .., w4)`.
//!
//! Everything here works with exactly five homogeneous variables. Monomials
//! are plain exponent vectors; a "general member" of a linear system is
//! modelled by the full list of monomials of the right degree.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::WpsError;

/// Number of homogeneous coordinates.
pub const NVARS: usize = 5;

/// Weights of the five homogeneous coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Weights([u32; NVARS]);

impl Weights {
    /// Checked constructor: all weights positive and every four of them coprime.
    pub fn new(w: [u32; NVARS]) -> Result<Self, WpsError> {
        if let Some(i) = w.iter().position(|&wi| wi == 0) {
            return Err(WpsError::ZeroWeight { index: i });
        }
        for skip in 0..NVARS {
            let g = (0..NVARS).filter(|&k| k != skip).fold(0u32, |g, k| g.gcd(&w[k]));
            if g != 1 {
                return Err(WpsError::NotWellFormed { weights: w, skip, gcd: g });
            }
        }
        Ok(Weights(w))
    }

    pub fn as_array(&self) -> [u32; NVARS] {
        self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }

    /// Conventional coordinate names: `x,y,z,t,u` when only `w0 = 1`, and
    /// `x0,x1,..,y,z,..` when several weights equal one.
    pub fn var_names(&self) -> [String; NVARS] {
        let ones = self.0.iter().take_while(|&&w| w == 1).count();
        let mut names: [String; NVARS] = Default::default();
        if ones <= 1 {
            for (i, n) in ["x", "y", "z", "t", "u"].iter().enumerate() {
                names[i] = n.to_string();
            }
        } else {
            let tail = ["y", "z", "t", "u"];
            for (i, name) in names.iter_mut().enumerate() {
                *name = if i < ones { format!("x{i}") } else { tail[i - ones].to_string() };
            }
        }
        names
    }

    pub fn var_name(&self, i: usize) -> String {
        self.var_names()[i].clone()
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.0;
        write!(f, "P({},{},{},{},{})", w[0], w[1], w[2], w[3], w[4])
    }
}

/// Exponent vector of a monomial in the five coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial(pub [u32; NVARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; NVARS]);

    pub fn var(i: usize) -> Self {
        let mut e = [0; NVARS];
        e[i] = 1;
        Monomial(e)
    }

    pub fn pow_var(i: usize, k: u32) -> Self {
        let mut e = [0; NVARS];
        e[i] = k;
        Monomial(e)
    }

    pub fn exponents(&self) -> [u32; NVARS] {
        self.0
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn degree(&self, w: &Weights) -> u32 {
        self.0.iter().zip(w.iter()).map(|(&e, wi)| e * wi).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a += b;
        }
        Monomial(e)
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a = a.checked_sub(*b)?;
        }
        Some(Monomial(e))
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    /// Indices of the variables with nonzero exponent.
    pub fn support(&self) -> Vec<usize> {
        (0..NVARS).filter(|&i| self.0[i] > 0).collect()
    }

    pub fn supported_on(&self, vars: &[usize]) -> bool {
        (0..NVARS).all(|i| self.0[i] == 0 || vars.contains(&i))
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Render with the coordinate names of `w`, e.g. `x^3*z*t`.
    pub fn display(&self, w: &Weights) -> String {
        let names = w.var_names();
        let parts: Vec<String> = (0..NVARS)
            .filter(|&i| self.0[i] > 0)
            .map(|i| match self.0[i] {
                1 => names[i].clone(),
                k => format!("{}^{}", names[i], k),
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

/// Sort order used for every monomial list: descending lexicographic on the
/// exponent vector, so `x^4` precedes `y` and `z^6` precedes `u^2`.
pub fn sort_monomials(list: &mut [Monomial]) {
    list.sort_by(|a, b| b.cmp(a));
}

/// All monomials of weighted degree `d`, in descending lexicographic order.
pub fn monomials_of_degree(w: &Weights, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut e = [0u32; NVARS];
    enumerate(w, d, NVARS - 1, &mut e, &mut out, &(0..NVARS).collect::<Vec<_>>());
    sort_monomials(&mut out);
    out
}

/// Monomials of degree `d` whose support lies in `vars`.
pub fn restrict_to_stratum(w: &Weights, d: u32, vars: &[usize]) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut e = [0u32; NVARS];
    enumerate(w, d, NVARS - 1, &mut e, &mut out, vars);
    sort_monomials(&mut out);
    out
}

fn enumerate(
    w: &Weights,
    remaining: u32,
    idx: usize,
    e: &mut [u32; NVARS],
    out: &mut Vec<Monomial>,
    allowed: &[usize],
) {
    let wi = w.get(idx);
    let max = if allowed.contains(&idx) { remaining / wi } else { 0 };
    if idx == 0 {
        if remaining.is_multiple_of(wi) && (remaining == 0 || allowed.contains(&0)) {
            e[0] = remaining / wi;
            out.push(Monomial(*e));
            e[0] = 0;
        }
        return;
    }
    for k in (0..=max).rev() {
        e[idx] = k;
        enumerate(w, remaining - k * wi, idx - 1, e, out, allowed);
    }
    e[idx] = 0;
}

/// Componentwise minimum of a nonempty monomial list (the monomial gcd).
pub fn monomial_gcd(list: &[Monomial]) -> Option<Monomial> {
    let first = *list.first()?;
    Some(list.iter().fold(first, |acc, m| {
        let mut e = acc.0;
        for (a, b) in e.iter_mut().zip(m.0.iter()) {
            *a = (*a).min(*b);
        }
        Monomial(e)
    }))
}

/// Well-formed model of a weighted projective space: divide out the common
/// gcd, then for each coordinate divide the others by their joint gcd until
/// stable. `P(1,4)` becomes `P(1,1)`.
pub fn well_formed(weights: &[u32]) -> Vec<u32> {
    let mut q = weights.to_vec();
    if q.is_empty() {
        return q;
    }
    loop {
        let g = q.iter().fold(0u32, |g, &x| g.gcd(&x));
        if g > 1 {
            q.iter_mut().for_each(|x| *x /= g);
        }
        let mut changed = false;
        for i in 0..q.len() {
            let g = q.iter().enumerate().filter(|&(k, _)| k != i).fold(0u32, |g, (_, &x)| g.gcd(&x));
            if g > 1 {
                for (k, x) in q.iter_mut().enumerate() {
                    if k != i {
                        *x /= g;
                    }
                }
                changed = true;
            }
        }
        if !changed && q.iter().fold(0u32, |g, &x| g.gcd(&x)) == 1 {
            return q;
        }
    }
}

/// `P^n` when all normalized weights are one, otherwise `P(q0,..)`.
pub fn describe_wps(weights: &[u32]) -> String {
    let q = well_formed(weights);
    if q.iter().all(|&x| x == 1) {
        match q.len() - 1 {
            1 => "P^1".to_string(),
            n => format!("P^{n}"),
        }
    } else {
        let parts: Vec<String> = q.iter().map(|x| x.to_string()).collect();
        format!("P({})", parts.join(","))
    }
}

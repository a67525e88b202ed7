//! Restricted eigenvalues `κ²(J,c) = min νᵀΣν / ‖ν_J‖²` over the cone
//! `|ν_J̄|₁ ≤ c|ν_J|₁`.
//!
//! The cone is scale invariant, so each search fixes `|ν_J|₁ = 1` with a
//! sign pattern on `ν_J`. The feasible set is then a signed simplex times an
//! `ℓ₁` ball of radius `c`, and projected gradient with backtracking runs on
//! the ratio. Restarts cover sign patterns; the result is an upper estimate
//! bracketed by `λ_min(Σ)` and `λ_min(Σ_J)`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{ModelSet, StandardizedDesign};
use crate::error::{Error, Result};
use crate::linalg;
use crate::subsets;

pub const DEFAULT_RESTARTS: usize = 64;

const MAX_ITER: usize = 3000;
const PAIR_STARTS: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaEstimate {
    /// Estimated `κ²`.
    pub value: f64,
    /// `λ_min(Σ)`, floored at zero.
    pub lower_cert: f64,
    /// `κ²(J,0)`: `λ_min(Σ_J)`, or its minimum over sets for the uniform version.
    pub upper_cert: f64,
    pub restarts: usize,
    pub converged_fraction: f64,
    /// Minimising direction found, over all `p` coordinates.
    #[serde(skip)]
    pub witness: Vec<f64>,
}

impl KappaEstimate {
    pub fn kappa(&self) -> f64 {
        self.value.max(0.0).sqrt()
    }
}

pub fn kappa(
    design: &StandardizedDesign,
    j: &ModelSet,
    c: f64,
    restarts: usize,
) -> Result<KappaEstimate> {
    let gram = design.gram();
    let lower = linalg::min_eigenvalue(&gram).max(0.0);
    validate(j, c, design.p())?;
    Ok(kappa_gram(&gram, lower, j.as_slice(), c, restarts, &[]))
}

/// `κ²(J,c)` for every `c` in `cs`, each estimated independently.
pub fn kappa_profile(
    design: &StandardizedDesign,
    j: &ModelSet,
    cs: &[f64],
    restarts: usize,
) -> Result<Vec<KappaEstimate>> {
    let gram = design.gram();
    let lower = linalg::min_eigenvalue(&gram).max(0.0);
    for &c in cs {
        validate(j, c, design.p())?;
    }
    Ok(cs
        .iter()
        .map(|&c| kappa_gram(&gram, lower, j.as_slice(), c, restarts, &[]))
        .collect())
}

/// `κ²(s,c) = min_{|J|=s} κ²(J,c)`.
pub fn kappa_uniform(
    design: &StandardizedDesign,
    s: usize,
    c: f64,
    restarts: usize,
) -> Result<KappaEstimate> {
    let p = design.p();
    if s == 0 || s > p {
        return Err(Error::Domain(format!(
            "set size must lie in 1..={p}, got {s}"
        )));
    }
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!(
            "cone constant must be nonnegative, got {c}"
        )));
    }
    subsets::guard(subsets::binomial(p, s), subsets::KAPPA_SUBSET_LIMIT)?;
    let gram = design.gram();
    let lower = linalg::min_eigenvalue(&gram).max(0.0);
    let all: Vec<usize> = (0..p).collect();
    let mut sets = Vec::new();
    subsets::for_each_of_size(&all, s, |js| sets.push(js.to_vec()));
    let witnesses = spread_witnesses(&gram, s, c);
    let per_set: Vec<KappaEstimate> = sets
        .par_iter()
        .map(|js| {
            let extra: Vec<Vec<f64>> = witnesses
                .iter()
                .filter(|(j0, _)| j0 == js)
                .map(|(_, v)| v.clone())
                .collect();
            kappa_gram(&gram, lower, js, c, restarts, &extra)
        })
        .collect();
    let upper = sets
        .iter()
        .map(|js| linalg::min_eigenvalue(&linalg::select_square(&gram, js)))
        .fold(f64::INFINITY, f64::min)
        .max(0.0);
    let total: usize = per_set.iter().map(|k| k.restarts).sum();
    let converged: f64 = per_set
        .iter()
        .map(|k| k.converged_fraction * k.restarts as f64)
        .sum();
    let best = per_set
        .into_iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("at least one set");
    Ok(KappaEstimate {
        value: best.value.min(upper),
        lower_cert: lower,
        upper_cert: upper,
        restarts: total,
        converged_fraction: if total == 0 {
            1.0
        } else {
            converged / total as f64
        },
        witness: best.witness,
    })
}

/// `κ²(m,0) = min_{|K|=m} λ_min(Σ_K)`.
pub fn sparse_min_eigenvalue(design: &StandardizedDesign, m: usize) -> Result<f64> {
    let p = design.p();
    let m = m.min(p);
    subsets::guard(subsets::binomial(p, m), subsets::SUBSET_LIMIT)?;
    let gram = design.gram();
    let all: Vec<usize> = (0..p).collect();
    let mut best = f64::INFINITY;
    subsets::for_each_of_size(&all, m, |k| {
        best = best.min(linalg::min_eigenvalue(&linalg::select_square(&gram, k)));
    });
    Ok(best)
}

fn validate(j: &ModelSet, c: f64, p: usize) -> Result<()> {
    if j.is_empty() {
        return Err(Error::Domain(
            "restricted eigenvalue needs a nonempty set".into(),
        ));
    }
    if j.max_index().is_some_and(|m| m >= p) {
        return Err(Error::InvalidData(
            "set exceeds the number of predictors".into(),
        ));
    }
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!(
            "cone constant must be nonnegative, got {c}"
        )));
    }
    Ok(())
}

/// Sparse eigenvectors on sets of size `(⌊c⌋+1)s`, each assigned to the set
/// of its `s` largest coordinates, where it is feasible with constant `⌊c⌋`.
fn spread_witnesses(gram: &DMatrix<f64>, s: usize, c: f64) -> Vec<(Vec<usize>, Vec<f64>)> {
    let p = gram.nrows();
    if c < 1.0 {
        return Vec::new();
    }
    let m = ((c.floor() as usize + 1) * s).min(p);
    if m == s || subsets::binomial(p, m) > subsets::KAPPA_SUBSET_LIMIT {
        return Vec::new();
    }
    let all: Vec<usize> = (0..p).collect();
    let mut out = Vec::new();
    subsets::for_each_of_size(&all, m, |k| {
        let (_, v) = linalg::min_eigen(&linalg::select_square(gram, k));
        let mut nu = vec![0.0; p];
        for (i, &idx) in k.iter().enumerate() {
            nu[idx] = v[i];
        }
        let mut by_size: Vec<usize> = k.to_vec();
        by_size.sort_by(|&a, &b| nu[b].abs().total_cmp(&nu[a].abs()).then(a.cmp(&b)));
        let mut j0: Vec<usize> = by_size[..s].to_vec();
        j0.sort_unstable();
        out.push((j0, nu));
    });
    out
}

fn seed_for(j: &[usize], c: f64) -> u64 {
    let mut h = crate::simlab::splitmix64(c.to_bits());
    for &i in j {
        h = crate::simlab::splitmix64(h ^ i as u64);
    }
    h
}

pub(crate) fn kappa_gram(
    gram: &DMatrix<f64>,
    lower: f64,
    j: &[usize],
    c: f64,
    restarts: usize,
    extra: &[Vec<f64>],
) -> KappaEstimate {
    let p = gram.nrows();
    let jbar: Vec<usize> = (0..p).filter(|i| j.binary_search(i).is_err()).collect();
    let (upper, evec) = linalg::min_eigen(&linalg::select_square(gram, j));
    let upper = upper.max(0.0);
    let mut eig_nu = vec![0.0; p];
    for (k, &i) in j.iter().enumerate() {
        eig_nu[i] = evec[k];
    }
    if c == 0.0 || jbar.is_empty() {
        return KappaEstimate {
            value: upper.max(lower),
            lower_cert: lower,
            upper_cert: upper,
            restarts: 0,
            converged_fraction: 1.0,
            witness: eig_nu,
        };
    }

    let mut starts: Vec<Vec<f64>> = vec![eig_nu.clone()];
    let mut pairs: Vec<(f64, usize, usize)> = j
        .iter()
        .flat_map(|&a| jbar.iter().map(move |&b| (a, b)))
        .map(|(a, b)| (gram[(a, b)].abs(), a, b))
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    for &(_, a, b) in pairs.iter().take(PAIR_STARTS) {
        let mut nu = vec![0.0; p];
        nu[a] = 1.0;
        nu[b] = (-gram[(a, b)]).clamp(-c, c);
        starts.push(nu);
    }
    starts.extend(extra.iter().cloned());
    let mut rng = ChaCha8Rng::seed_from_u64(seed_for(j, c));
    let patterns = if j.len() <= 8 {
        1usize << (j.len() - 1)
    } else {
        0
    };
    for r in 0..restarts {
        let mut nu = vec![0.0; p];
        for (k, &i) in j.iter().enumerate() {
            let sign = if patterns > 0 {
                if k == 0 || (r % patterns) >> (k - 1) & 1 == 0 {
                    1.0
                } else {
                    -1.0
                }
            } else if rng.random::<bool>() {
                1.0
            } else {
                -1.0
            };
            nu[i] = sign * (rng.sample::<f64, _>(StandardNormal).abs() + 0.05);
        }
        let radius = if r % 4 == 0 {
            0.0
        } else {
            c * rng.random::<f64>()
        };
        let w: Vec<f64> = jbar
            .iter()
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let wl1: f64 = w.iter().map(|v| v.abs()).sum();
        let ul1: f64 = j.iter().map(|&i| nu[i].abs()).sum();
        for (k, &i) in jbar.iter().enumerate() {
            nu[i] = if wl1 > 0.0 {
                w[k] / wl1 * radius * ul1
            } else {
                0.0
            };
        }
        starts.push(nu);
    }

    let problem = Problem {
        gram,
        j,
        jbar: &jbar,
        c,
    };
    let mut best = (upper, eig_nu);
    let mut runs = 0usize;
    let mut converged = 0usize;
    for start in starts {
        let Some((f, nu, ok)) = problem.local_min(start) else {
            continue;
        };
        runs += 1;
        converged += usize::from(ok);
        if f < best.0 {
            best = (f, nu);
        }
    }
    KappaEstimate {
        value: best.0.min(upper).max(lower),
        lower_cert: lower,
        upper_cert: upper,
        restarts: runs,
        converged_fraction: if runs == 0 {
            1.0
        } else {
            converged as f64 / runs as f64
        },
        witness: best.1,
    }
}

struct Problem<'a> {
    gram: &'a DMatrix<f64>,
    j: &'a [usize],
    jbar: &'a [usize],
    c: f64,
}

impl Problem<'_> {
    fn quad(&self, nu: &[f64]) -> Vec<f64> {
        let p = nu.len();
        (0..p)
            .map(|a| (0..p).map(|b| self.gram[(a, b)] * nu[b]).sum())
            .collect()
    }

    fn value(&self, nu: &[f64]) -> f64 {
        let sn = self.quad(nu);
        let num: f64 = nu.iter().zip(&sn).map(|(a, b)| a * b).sum();
        let den: f64 = self.j.iter().map(|&i| nu[i] * nu[i]).sum();
        num / den
    }

    fn gradient(&self, nu: &[f64]) -> (f64, Vec<f64>) {
        let sn = self.quad(nu);
        let num: f64 = nu.iter().zip(&sn).map(|(a, b)| a * b).sum();
        let den: f64 = self.j.iter().map(|&i| nu[i] * nu[i]).sum();
        let f = num / den;
        let mut g: Vec<f64> = sn.iter().map(|v| 2.0 * v / den).collect();
        for &i in self.j {
            g[i] -= 2.0 * f * nu[i] / den;
        }
        (f, g)
    }

    fn project(&self, nu: &mut [f64], signs: &[f64]) {
        let mut u: Vec<f64> = self.j.iter().zip(signs).map(|(&i, s)| nu[i] * s).collect();
        project_simplex(&mut u, 1.0);
        for ((&i, s), v) in self.j.iter().zip(signs).zip(&u) {
            nu[i] = s * v;
        }
        let mut w: Vec<f64> = self.jbar.iter().map(|&i| nu[i]).collect();
        project_l1_ball(&mut w, self.c);
        for (&i, v) in self.jbar.iter().zip(&w) {
            nu[i] = *v;
        }
    }

    /// Projected gradient from `start`; `None` if the start has `ν_J = 0`.
    fn local_min(&self, mut nu: Vec<f64>) -> Option<(f64, Vec<f64>, bool)> {
        let scale: f64 = self.j.iter().map(|&i| nu[i].abs()).sum();
        if !(scale > 0.0) {
            return None;
        }
        for v in nu.iter_mut() {
            *v /= scale;
        }
        let signs: Vec<f64> = self
            .j
            .iter()
            .map(|&i| if nu[i] < 0.0 { -1.0 } else { 1.0 })
            .collect();
        self.project(&mut nu, &signs);
        let mut step = 1.0;
        let (mut f, mut g) = self.gradient(&nu);
        for _ in 0..MAX_ITER {
            let mut accepted = None;
            while step > 1e-18 {
                let mut cand: Vec<f64> = nu.iter().zip(&g).map(|(v, d)| v - step * d).collect();
                self.project(&mut cand, &signs);
                let d: Vec<f64> = cand.iter().zip(&nu).map(|(a, b)| a - b).collect();
                let lin: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
                let dd: f64 = d.iter().map(|v| v * v).sum();
                let fc = self.value(&cand);
                if fc <= f + lin + dd / (2.0 * step) + 1e-15 * f.abs() {
                    accepted = Some((cand, fc, dd));
                    break;
                }
                step *= 0.5;
            }
            let Some((cand, fc, dd)) = accepted else {
                return Some((f, nu, true));
            };
            let decrease = f - fc;
            nu = cand;
            (f, g) = self.gradient(&nu);
            if dd.sqrt() <= 1e-11 || decrease <= 1e-15 * f.abs().max(1e-300) {
                return Some((f, nu, true));
            }
            step = (step * 2.0).min(1e6);
        }
        Some((f, nu, false))
    }
}

/// Euclidean projection onto `{v ≥ 0, Σv = radius}`.
pub(crate) fn project_simplex(v: &mut [f64], radius: f64) {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - radius) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// Euclidean projection onto `{|v|₁ ≤ radius}`.
pub(crate) fn project_l1_ball(v: &mut [f64], radius: f64) {
    let l1: f64 = v.iter().map(|x| x.abs()).sum();
    if l1 <= radius {
        return;
    }
    if radius <= 0.0 {
        v.iter_mut().for_each(|x| *x = 0.0);
        return;
    }
    let mut a: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    project_simplex(&mut a, radius);
    for (x, m) in v.iter_mut().zip(a) {
        *x = x.signum() * m;
    }
}

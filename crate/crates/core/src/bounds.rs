//! Closed-form error-probability bounds with named assumption checks.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

#[cfg(not(feature = "swapped-constants"))]
pub const C1: f64 = 0.087_067_958_321_247_14; // 1/(3+6√2)
#[cfg(not(feature = "swapped-constants"))]
pub const C2: f64 = 0.085_786_437_626_904_95; // 1/(6+4√2)

#[cfg(feature = "swapped-constants")]
pub const C1: f64 = 0.085_786_437_626_904_95;
#[cfg(feature = "swapped-constants")]
pub const C2: f64 = 0.087_067_958_321_247_14;

/// Inputs shared by all evaluators. `kappa_T3` is `κ(T,3)` and `kappa_t3`
/// is `κ(t,3)`, not their squares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundInput {
    pub n: usize,
    pub p: usize,
    pub t: usize,
    /// Derived as `t + ⌊√t κ⁻²⌋` when absent.
    #[serde(default)]
    pub s: Option<usize>,
    pub sigma2: f64,
    pub r: f64,
    pub r_l: f64,
    pub a: f64,
    pub delta_s: f64,
    pub delta_t: f64,
    pub delta_p: f64,
    #[serde(rename = "kappa_T3")]
    pub kappa_big_t: f64,
    pub kappa_t3: f64,
    pub theta_min: f64,
}

impl BoundInput {
    pub fn validate(&self) -> Result<()> {
        let positive = [("sigma2", self.sigma2), ("r", self.r), ("r_l", self.r_l)];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite"
                )));
            }
        }
        let nonneg = [
            ("delta_s", self.delta_s),
            ("delta_t", self.delta_t),
            ("delta_p", self.delta_p),
            ("kappa_T3", self.kappa_big_t),
            ("kappa_t3", self.kappa_t3),
            ("theta_min", self.theta_min),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be nonnegative and finite"
                )));
            }
        }
        if !(self.a > 0.0 && self.a < 1.0) {
            return Err(Error::InvalidConfig("a must lie in (0,1)".into()));
        }
        if self.t < 1 || self.p < self.t + 1 {
            return Err(Error::InvalidConfig("need p >= t+1 >= 2".into()));
        }
        Ok(())
    }

    /// `s` as supplied, else `t + ⌊√t/κ²⌋`; `None` when `κ(T,3) = 0`.
    pub fn screening_size(&self) -> Option<usize> {
        if let Some(s) = self.s {
            return Some(s);
        }
        let k2 = self.kappa_big_t * self.kappa_big_t;
        if k2 <= 0.0 {
            return None;
        }
        let extra = ((self.t as f64).sqrt() / k2).floor();
        if extra.is_finite() && extra < 1e15 {
            Some(self.t + extra as usize)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assumption {
    pub name: String,
    pub holds: bool,
    #[serde(with = "extended_float")]
    pub lhs: f64,
    #[serde(with = "extended_float")]
    pub rhs: f64,
}

impl Assumption {
    fn le(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            holds: lhs <= rhs,
            lhs,
            rhs,
        }
    }

    fn lt(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            holds: lhs < rhs,
            lhs,
            rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub name: String,
    /// `min(raw, 1)`.
    pub value: f64,
    #[serde(with = "extended_float")]
    pub raw: f64,
    pub assumptions_ok: bool,
    pub failed_assumptions: Vec<String>,
    pub assumptions: Vec<Assumption>,
}

impl BoundResult {
    fn new(name: &str, raw: f64, assumptions: Vec<Assumption>) -> Self {
        let failed: Vec<String> = assumptions
            .iter()
            .filter(|a| !a.holds)
            .map(|a| a.name.clone())
            .collect();
        Self {
            name: name.into(),
            value: cap(raw),
            raw,
            assumptions_ok: failed.is_empty(),
            failed_assumptions: failed,
            assumptions,
        }
    }
}

fn cap(v: f64) -> f64 {
    if v.is_nan() {
        1.0
    } else {
        v.min(1.0)
    }
}

/// JSON has no infinities; these are written as `"inf"`, `"-inf"` or `"nan"`.
pub(crate) mod extended_float {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            v.serialize(s)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!(
                    "expected a number, \"inf\", \"-inf\" or \"nan\", got {other:?}"
                ))),
            },
        }
    }
}

/// `e^{-(1-a)u} (πu)^{-1/2}`, the shape shared by every bound.
fn gauss_tail(u: f64, shrink: f64) -> f64 {
    if u <= 0.0 {
        return f64::INFINITY;
    }
    (-shrink * u).exp() / (PI * u).sqrt()
}

/// `w_{xk} = e^{-x/2}(x/2)^{k/2-1}/Γ(k/2)`.
pub fn chi2_w(k: usize, x: f64) -> f64 {
    let h = k as f64 / 2.0;
    (-x / 2.0 + (h - 1.0) * (x / 2.0).ln() - ln_gamma(h)).exp()
}

/// Lower and upper bounds on `P(χ²_k ≥ x)`.
pub fn chi2_tail_sandwich(k: usize, x: f64) -> Result<(f64, f64)> {
    if k == 0 || !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "chi-square sandwich needs k >= 1 and x > 0, got k={k}, x={x}"
        )));
    }
    let kf = k as f64;
    if k > 1 && x <= kf - 2.0 {
        return Err(Error::Domain(format!(
            "chi-square sandwich needs x > k-2 for k > 1, got k={k}, x={x}"
        )));
    }
    let w = chi2_w(k, x);
    let l = x / (x - kf + 2.0);
    Ok(if k == 1 { (w * l, w) } else { (w, w * l) })
}

/// `P(χ²_k ≥ x)` as the regularized upper incomplete gamma `Q(k/2, x/2)`.
pub fn chi2_survival(k: usize, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let a = k as f64 / 2.0;
    let z = x / 2.0;
    let log_prefix = -z + a * z.ln() - ln_gamma(a);
    if z < a + 1.0 {
        // Series for P(a,z).
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..10_000 {
            ap += 1.0;
            term *= z / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        1.0 - sum * log_prefix.exp()
    } else {
        // Modified Lentz continued fraction for Q(a,z).
        let tiny = 1e-300;
        let mut b = z + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        log_prefix.exp() * h
    }
}

/// Bound on `P(𝒜ᶜ)`.
pub fn event_a_bound(p: usize, r_l: f64, sigma2: f64) -> f64 {
    cap(event_a_bound_raw(p, r_l, sigma2))
}

fn event_a_bound_raw(p: usize, r_l: f64, sigma2: f64) -> f64 {
    let u = r_l * r_l / (8.0 * sigma2);
    p as f64 * gauss_tail(u, 1.0)
}

fn standing(inp: &BoundInput) -> Vec<Assumption> {
    vec![
        Assumption::le("standing_p_gt_t", (inp.t + 1) as f64, inp.p as f64),
        Assumption::lt("a_in_unit_interval", 0.0, inp.a),
        Assumption::lt("a_below_one", inp.a, 1.0),
    ]
}

fn weak_correlation(inp: &BoundInput) -> Assumption {
    let s = inp.screening_size().map_or(f64::INFINITY, |s| s as f64);
    Assumption::le("weak_correlation_s_le_n", s, inp.n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Bounds {
    pub t1: BoundResult,
    pub t2: BoundResult,
    pub t3: BoundResult,
    pub t4: BoundResult,
}

impl Theorem1Bounds {
    pub fn iter(&self) -> impl Iterator<Item = &BoundResult> {
        [&self.t1, &self.t2, &self.t3, &self.t4].into_iter()
    }
}

pub fn theorem1_bounds(inp: &BoundInput) -> Theorem1Bounds {
    let (s2, a, t) = (inp.sigma2, inp.a, inp.t as f64);
    let lnp = (inp.p as f64).ln();
    let kappa4 = inp.kappa_big_t.powi(4);
    let rl2 = inp.r_l * inp.r_l;

    let mut a1 = standing(inp);
    a1.push(weak_correlation(inp));
    a1.push(Assumption::le("T1_lower", 8.0 * s2 * lnp / a, rl2));
    a1.push(Assumption::le(
        "T1_beta_min",
        rl2,
        C1 * C1 * kappa4 * inp.theta_min * inp.theta_min / t,
    ));
    let t1 = BoundResult::new("T1", gauss_tail(rl2 / (8.0 * s2), 1.0 - a), a1);

    let s = inp.screening_size();
    let mut a2 = standing(inp);
    a2.push(weak_correlation(inp));
    let sf = s.map_or(f64::INFINITY, |s| s as f64);
    a2.push(Assumption::le(
        "T2",
        s2 * lnp / a,
        C2 * inp.delta_s / (sf - t + 2.0),
    ));
    let t2 = BoundResult::new("T2", 1.5 * gauss_tail(C2 * inp.delta_s / s2, 1.0 - a), a2);

    let mut a3 = standing(inp);
    a3.push(Assumption::lt("T3a", inp.r, a * inp.delta_t / t));
    a3.push(Assumption::le(
        "T3b",
        8.0 * s2 * t.ln() / a,
        (1.0 - a).powi(2) * inp.delta_t,
    ));
    let u3 = (1.0 - a).powi(2) * inp.delta_t / (8.0 * s2);
    let t3 = BoundResult::new("T3", 0.5 * gauss_tail(u3, 1.0 - a), a3);

    let mut a4 = standing(inp);
    a4.push(Assumption::le("T4", 4.0 * s2 * lnp / a, inp.r));
    let t4 = BoundResult::new("T4", gauss_tail(inp.r / (2.0 * s2), 1.0 - a), a4);

    Theorem1Bounds { t1, t2, t3, t4 }
}

/// Ordering-error bound for OS.
pub fn theorem2_bound(inp: &BoundInput) -> BoundResult {
    let (s2, a, t) = (inp.sigma2, inp.a, inp.t as f64);
    let mut asm = standing(inp);
    asm.push(Assumption::le("p_le_n", inp.p as f64, inp.n as f64));
    asm.push(Assumption::le(
        "Th2",
        s2 * (t * (inp.p as f64 - t)).ln() / a,
        C2 * inp.delta_p,
    ));
    BoundResult::new("Th2", 1.5 * gauss_tail(C2 * inp.delta_p / s2, 1.0 - a), asm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Corollary {
    C1,
    C3,
}

pub fn corollary_bounds(inp: &BoundInput, which: Corollary) -> BoundResult {
    let (s2, a, t) = (inp.sigma2, inp.a, inp.t as f64);
    let lnp = (inp.p as f64).ln();
    let tail = gauss_tail(inp.r / (2.0 * s2), 1.0 - a);
    let mut asm = standing(inp);
    asm.push(Assumption::le("r_lower", 4.0 * s2 * lnp / a, inp.r));
    match which {
        Corollary::C1 => {
            let k2 = inp.kappa_big_t * inp.kappa_big_t;
            let rl2 = inp.r_l * inp.r_l;
            asm.push(weak_correlation(inp));
            asm.push(Assumption {
                name: "r_l_sq_eq_4r".into(),
                holds: (rl2 - 4.0 * inp.r).abs() <= 1e-9 * rl2.max(4.0 * inp.r),
                lhs: rl2,
                rhs: 4.0 * inp.r,
            });
            asm.push(Assumption::lt("a_below_1_minus_c1", a, 1.0 - C1));
            asm.push(Assumption::le(
                "C1_i_upper",
                inp.r,
                C1 * C1 / 4.0 * a * k2 * k2 * inp.theta_min.powi(2) / t,
            ));
            asm.push(Assumption::le(
                "C1_ii",
                inp.r,
                4.0 * C2 / 3.0 * k2 * inp.delta_s / t.sqrt(),
            ));
            BoundResult::new("C1", 4.0 * tail, asm)
        }
        Corollary::C3 => {
            asm.push(Assumption::le("p_le_n", inp.p as f64, inp.n as f64));
            asm.push(Assumption::lt("a_below_2c2", a, 2.0 * C2));
            asm.push(Assumption::le("C3_delta_t", inp.r, a * inp.delta_t / t));
            asm.push(Assumption::le("C3_delta_p", inp.r, 2.0 * C2 * inp.delta_p));
            BoundResult::new("C3", 3.0 * tail, asm)
        }
    }
}

/// Lower bound on the exhaustive-GIC selection error.
pub fn exhaustive_lower_bound(r: f64, sigma2: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    cap(r / (r + sigma2) * gauss_tail(r / (2.0 * sigma2), 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundLedger {
    pub screening_size: Option<usize>,
    pub c1: f64,
    pub c2: f64,
    pub event_a: BoundResult,
    pub theorem1: Theorem1Bounds,
    pub theorem2: BoundResult,
    pub corollary1: BoundResult,
    pub corollary3: BoundResult,
    pub exhaustive_lower: f64,
}

impl BoundLedger {
    pub fn results(&self) -> Vec<&BoundResult> {
        let mut v = vec![&self.event_a];
        v.extend(self.theorem1.iter());
        v.extend([&self.theorem2, &self.corollary1, &self.corollary3]);
        v
    }
}

pub fn evaluate_all(inp: &BoundInput) -> Result<BoundLedger> {
    inp.validate()?;
    let event_a = BoundResult::new(
        "event_A",
        event_a_bound_raw(inp.p, inp.r_l, inp.sigma2),
        Vec::new(),
    );
    Ok(BoundLedger {
        screening_size: inp.screening_size(),
        c1: C1,
        c2: C2,
        event_a,
        theorem1: theorem1_bounds(inp),
        theorem2: theorem2_bound(inp),
        corollary1: corollary_bounds(inp, Corollary::C1),
        corollary3: corollary_bounds(inp, Corollary::C3),
        exhaustive_lower: exhaustive_lower_bound(inp.r, inp.sigma2),
    })
}

//! Data model, the two parametrizations, standardization, and least squares.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg;

/// Residual sums of squares below this are treated as an exact fit.
pub const DEGENERATE_RSS: f64 = 1e-12;

/// Raw observations: `x` is `n × p`, rows are observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: DMatrix<f64>,
    y: DVector<f64>,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::InvalidData(format!(
                "design must have at least one row and one column, got {}x{}",
                x.nrows(),
                x.ncols()
            )));
        }
        if x.nrows() != y.len() {
            return Err(Error::InvalidData(format!(
                "design has {} rows but the response has {} entries",
                x.nrows(),
                y.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("design"));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("response"));
        }
        Ok(Self { x, y })
    }

    /// Builds a dataset from observation rows.
    pub fn from_rows(rows: &[Vec<f64>], y: &[f64]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::InvalidData("rows have different lengths".into()));
        }
        let x = DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j]);
        Self::new(x, DVector::from_column_slice(y))
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn into_parts(self) -> (DMatrix<f64>, DVector<f64>) {
        (self.x, self.y)
    }
}

/// How `H₀` acts: centering (with a free intercept) or the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parametrization {
    #[default]
    Practical,
    Formal,
}

impl Parametrization {
    /// Degrees of freedom consumed by `H₀`.
    pub fn offset(self) -> usize {
        match self {
            Parametrization::Practical => 1,
            Parametrization::Formal => 0,
        }
    }
}

impl fmt::Display for Parametrization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parametrization::Practical => "practical",
            Parametrization::Formal => "formal",
        })
    }
}

impl FromStr for Parametrization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "practical" => Ok(Parametrization::Practical),
            "formal" => Ok(Parametrization::Formal),
            other => Err(Error::Domain(format!("unknown parametrization {other:?}"))),
        }
    }
}

/// Sorted set of 0-based predictor indices.
///
/// Displayed and serialized 1-based, which is how users see predictors.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModelSet(Vec<usize>);

impl ModelSet {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn full(p: usize) -> Self {
        Self((0..p).collect())
    }

    /// Sorts and deduplicates.
    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        let mut v: Vec<usize> = it.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    /// From 1-based indices; rejects 0.
    pub fn from_one_based(idx: &[usize]) -> Result<Self> {
        if idx.contains(&0) {
            return Err(Error::InvalidData("predictor indices are 1-based".into()));
        }
        Ok(Self::from_indices(idx.iter().map(|i| i - 1)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    pub fn is_subset(&self, other: &ModelSet) -> bool {
        self.0.iter().all(|&j| other.contains(j))
    }

    pub fn with(&self, j: usize) -> Self {
        Self::from_indices(self.0.iter().copied().chain(std::iter::once(j)))
    }

    pub fn without(&self, j: usize) -> Self {
        Self(self.0.iter().copied().filter(|&i| i != j).collect())
    }

    pub fn union(&self, other: &ModelSet) -> Self {
        Self::from_indices(self.0.iter().chain(&other.0).copied())
    }

    pub fn difference(&self, other: &ModelSet) -> Self {
        Self(
            self.0
                .iter()
                .copied()
                .filter(|&i| !other.contains(i))
                .collect(),
        )
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.last().copied()
    }

    fn check(&self, p: usize) -> Result<()> {
        match self.max_index() {
            Some(j) if j >= p => Err(Error::InvalidData(format!(
                "predictor {} out of range 1..={p}",
                j + 1
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ModelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, j) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", j + 1)?;
        }
        f.write_str("}")
    }
}

impl Serialize for ModelSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModelSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        ModelSet::from_one_based(&v).map_err(serde::de::Error::custom)
    }
}

/// `(X₀, y₀, D)` for one parametrization.
#[derive(Debug, Clone)]
pub struct StandardizedDesign {
    x0: DMatrix<f64>,
    y0: DVector<f64>,
    scales: Vec<f64>,
    x_means: Vec<f64>,
    y_mean: f64,
    mode: Parametrization,
}

pub fn standardize(data: &Dataset, mode: Parametrization) -> Result<StandardizedDesign> {
    let (n, p) = (data.n(), data.p());
    let mut x0 = data.x().clone();
    let mut scales = Vec::with_capacity(p);
    let mut x_means = Vec::with_capacity(p);
    for j in 0..p {
        let mut col = x0.column_mut(j);
        let mean = match mode {
            Parametrization::Practical => col.sum() / n as f64,
            Parametrization::Formal => 0.0,
        };
        let raw_norm = col.norm();
        col.add_scalar_mut(-mean);
        let norm = col.norm();
        // Centering a constant column leaves rounding noise proportional to
        // its magnitude, so the cut-off is scaled by the raw norm.
        if !(norm >= 1e-12 * raw_norm.max(1.0)) {
            return Err(Error::ZeroNormColumn(j));
        }
        col /= norm;
        scales.push(norm);
        x_means.push(mean);
    }
    let y_mean = match mode {
        Parametrization::Practical => data.y().sum() / n as f64,
        Parametrization::Formal => 0.0,
    };
    let y0 = data.y().add_scalar(-y_mean);
    Ok(StandardizedDesign {
        x0,
        y0,
        scales,
        x_means,
        y_mean,
        mode,
    })
}

impl StandardizedDesign {
    pub fn n(&self) -> usize {
        self.x0.nrows()
    }

    pub fn p(&self) -> usize {
        self.x0.ncols()
    }

    /// `n − 1` in practical mode, `n` in formal mode.
    pub fn n_effective(&self) -> usize {
        self.n() - self.mode.offset()
    }

    pub fn x0(&self) -> &DMatrix<f64> {
        &self.x0
    }

    pub fn y0(&self) -> &DVector<f64> {
        &self.y0
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn x_means(&self) -> &[f64] {
        &self.x_means
    }

    pub fn y_mean(&self) -> f64 {
        self.y_mean
    }

    pub fn mode(&self) -> Parametrization {
        self.mode
    }

    /// `Σ = X₀ᵀX₀`.
    pub fn gram(&self) -> DMatrix<f64> {
        self.x0.tr_mul(&self.x0)
    }

    pub fn columns(&self, model: &ModelSet) -> DMatrix<f64> {
        linalg::select_columns(&self.x0, model.as_slice())
    }

    /// Same design with a different response (already on the raw scale).
    pub fn with_response(&self, y: &DVector<f64>) -> Result<Self> {
        if y.len() != self.n() {
            return Err(Error::InvalidData("response length mismatch".into()));
        }
        let y_mean = match self.mode {
            Parametrization::Practical => y.sum() / self.n() as f64,
            Parametrization::Formal => 0.0,
        };
        Ok(Self {
            y0: y.add_scalar(-y_mean),
            y_mean,
            ..self.clone()
        })
    }

    /// Reconstructs the raw design columns of `model`.
    pub fn raw_columns(&self, model: &ModelSet) -> DMatrix<f64> {
        let mut m = self.columns(model);
        for (k, j) in model.iter().enumerate() {
            let mut col = m.column_mut(k);
            col *= self.scales[j];
            col.add_scalar_mut(self.x_means[j]);
        }
        m
    }

    /// Converts coefficients on the `θ` scale to the `β` scale.
    pub fn to_beta(&self, model: &ModelSet, theta: &[f64]) -> Vec<f64> {
        model
            .iter()
            .zip(theta)
            .map(|(j, t)| t / self.scales[j])
            .collect()
    }

    /// Intercept implied by `β̂` on `model`; zero in formal mode.
    pub fn intercept(&self, model: &ModelSet, beta: &[f64]) -> f64 {
        match self.mode {
            Parametrization::Practical => {
                self.y_mean
                    - model
                        .iter()
                        .zip(beta)
                        .map(|(j, b)| self.x_means[j] * b)
                        .sum::<f64>()
            }
            Parametrization::Formal => 0.0,
        }
    }

    fn check_model(&self, model: &ModelSet) -> Result<()> {
        model.check(self.p())
    }

    fn basis(&self, model: &ModelSet) -> Result<DMatrix<f64>> {
        self.check_model(model)?;
        linalg::full_rank_basis(&self.columns(model))
            .ok_or_else(|| Error::RankDeficient(model.clone()))
    }

    pub fn export(&self) -> DesignExport {
        DesignExport {
            x0: self
                .x0
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
            y0: self.y0.iter().copied().collect(),
            scales: self.scales.clone(),
            mode: self.mode,
        }
    }
}

/// Debug dump of a standardized design; `x0` is row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignExport {
    pub x0: Vec<Vec<f64>>,
    pub y0: Vec<f64>,
    pub scales: Vec<f64>,
    pub mode: Parametrization,
}

/// `R_J`, the residual sum of squares of `y₀` on the columns of `model`.
pub fn rss(design: &StandardizedDesign, model: &ModelSet) -> Result<f64> {
    let basis = design.basis(model)?;
    Ok(linalg::residual_sq(&basis, design.y0()))
}

/// Least-squares fit on one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsFit {
    pub model: ModelSet,
    pub theta_hat: Vec<f64>,
    pub beta_hat: Vec<f64>,
    pub rss: f64,
    pub t_squared: Vec<f64>,
    pub df_resid: usize,
}

pub fn ls_fit(design: &StandardizedDesign, model: &ModelSet) -> Result<LsFit> {
    fit_least_squares(design, model, true)
}

/// Like [`ls_fit`] but an exact fit yields infinite `t²` instead of an error.
pub fn refit(design: &StandardizedDesign, model: &ModelSet) -> Result<LsFit> {
    fit_least_squares(design, model, false)
}

fn fit_least_squares(design: &StandardizedDesign, model: &ModelSet, strict: bool) -> Result<LsFit> {
    design.check_model(model)?;
    let k = model.len();
    let n_eff = design.n_effective();
    if k >= n_eff && k > 0 {
        return Err(Error::TooManyPredictors {
            size: k,
            n_effective: n_eff,
        });
    }
    let df_resid = n_eff - k;
    if k == 0 {
        return Ok(LsFit {
            model: model.clone(),
            theta_hat: Vec::new(),
            beta_hat: Vec::new(),
            rss: design.y0().norm_squared(),
            t_squared: Vec::new(),
            df_resid,
        });
    }
    let xj = design.columns(model);
    if linalg::full_rank_basis(&xj).is_none() {
        return Err(Error::RankDeficient(model.clone()));
    }
    let qr = xj.clone().qr();
    let r = qr.r();
    let qty = qr.q().tr_mul(design.y0());
    let theta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::RankDeficient(model.clone()))?;
    let resid = design.y0() - &xj * &theta;
    let rss = resid.norm_squared();
    if rss < DEGENERATE_RSS && strict {
        return Err(Error::DegenerateResidual(model.clone()));
    }
    // diag((RᵀR)⁻¹) is the squared row norms of R⁻¹.
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::RankDeficient(model.clone()))?;
    let sigma2_hat = rss / df_resid as f64;
    let t_squared = (0..k)
        .map(|i| {
            let v = r_inv.row(i).norm_squared();
            let t2 = theta[i] * theta[i] / (v * sigma2_hat);
            if t2.is_nan() {
                0.0
            } else {
                t2
            }
        })
        .collect();
    let theta_hat: Vec<f64> = theta.iter().copied().collect();
    Ok(LsFit {
        model: model.clone(),
        beta_hat: design.to_beta(model, &theta_hat),
        theta_hat,
        rss,
        t_squared,
        df_resid,
    })
}

/// Residual variance of the full model, used when `σ²` is not supplied.
pub fn full_model_sigma2(design: &StandardizedDesign) -> Result<f64> {
    let p = design.p();
    let n_eff = design.n_effective();
    if p >= n_eff {
        return Err(Error::TooManyPredictors {
            size: p,
            n_effective: n_eff,
        });
    }
    let r = rss(design, &ModelSet::full(p))?;
    Ok(r / (n_eff - p) as f64)
}

/// Checks `I − H̃_J = (I − H₀_J) H₀` on a fixed battery of probe vectors,
/// with `H̃_J` the projection on `[𝟙, X_J]` (practical) or `X_J` (formal).
pub fn projection_link_check(design: &StandardizedDesign, model: &ModelSet) -> Result<bool> {
    let basis0 = design.basis(model)?;
    let raw = design.raw_columns(model);
    let extended = match design.mode() {
        Parametrization::Practical => {
            let mut m = DMatrix::from_element(design.n(), model.len() + 1, 1.0);
            m.columns_mut(1, model.len()).copy_from(&raw);
            m
        }
        Parametrization::Formal => raw,
    };
    let basis_tilde =
        linalg::full_rank_basis(&extended).ok_or_else(|| Error::RankDeficient(model.clone()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_11_4e);
    for _ in 0..16 {
        let v = DVector::from_fn(design.n(), |_, _| rng.sample::<f64, _>(StandardNormal));
        let lhs = linalg::residual(&basis_tilde, &v);
        let h0v = match design.mode() {
            Parametrization::Practical => v.add_scalar(-v.mean()),
            Parametrization::Formal => v.clone(),
        };
        let rhs = linalg::residual(&basis0, &h0v);
        if (lhs - rhs).norm() > 1e-8 * v.norm() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;

    fn random_data(n: usize, p: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = DMatrix::from_fn(n, p, |_, _| {
            rng.sample::<f64, _>(StandardNormal) * 3.0 + 1.5
        });
        let y = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal) + 4.0);
        Dataset::new(x, y).unwrap()
    }

    /// `‖(I − X X⁺) y‖²` with the pseudo-inverse built explicitly.
    fn pinv_rss(x: &DMatrix<f64>, y: &DVector<f64>) -> f64 {
        if x.ncols() == 0 {
            return y.norm_squared();
        }
        let pinv = x.clone().pseudo_inverse(1e-14).unwrap();
        let h = x * pinv;
        (y - h * y).norm_squared()
    }

    #[test]
    fn formal_two_point_column() {
        let d = Dataset::from_rows(&[vec![1.0], vec![-1.0]], &[2.0, 0.0]).unwrap();
        let s = standardize(&d, Parametrization::Formal).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(s.x0()[(0, 0)], h, epsilon = 1e-15);
        assert_relative_eq!(s.x0()[(1, 0)], -h, epsilon = 1e-15);
        assert_relative_eq!(s.scales()[0], 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(s.y0().as_slice(), &[2.0, 0.0]);
    }

    #[test]
    fn practical_centers_then_scales() {
        let d = Dataset::from_rows(&[vec![1.0], vec![2.0], vec![3.0]], &[1.0, 5.0, 6.0]).unwrap();
        let s = standardize(&d, Parametrization::Practical).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(s.x0()[(0, 0)], -h, epsilon = 1e-15);
        assert_relative_eq!(s.x0()[(1, 0)], 0.0, epsilon = 1e-15);
        assert_relative_eq!(s.x0()[(2, 0)], h, epsilon = 1e-15);
        assert_relative_eq!(s.y0()[0], -3.0, epsilon = 1e-14);
        assert_eq!(s.n_effective(), 2);
    }

    #[test]
    fn constant_column_rejected() {
        let mut rows = vec![vec![0.0; 3]; 5];
        for (i, r) in rows.iter_mut().enumerate() {
            r[0] = i as f64;
            r[1] = 7.25e5;
            r[2] = (i * i) as f64;
        }
        let d = Dataset::from_rows(&rows, &[1.0; 5]).unwrap();
        assert!(matches!(
            standardize(&d, Parametrization::Practical),
            Err(Error::ZeroNormColumn(1))
        ));
        assert!(standardize(&d, Parametrization::Formal).is_ok());
    }

    #[test]
    fn rejects_non_finite_and_shape_errors() {
        assert!(Dataset::from_rows(&[vec![f64::NAN]], &[1.0]).is_err());
        assert!(Dataset::from_rows(&[vec![1.0]], &[f64::INFINITY]).is_err());
        assert!(Dataset::from_rows(&[vec![1.0], vec![1.0, 2.0]], &[1.0, 2.0]).is_err());
        assert!(Dataset::new(DMatrix::zeros(2, 1), DVector::zeros(3)).is_err());
    }

    #[test]
    fn empty_model_rss_is_response_norm() {
        let s = standardize(&random_data(8, 3, 1), Parametrization::Practical).unwrap();
        assert_eq!(rss(&s, &ModelSet::empty()).unwrap(), s.y0().norm_squared());
    }

    #[test]
    fn rss_matches_pseudo_inverse_oracle() {
        for mode in [Parametrization::Practical, Parametrization::Formal] {
            let s = standardize(&random_data(8, 4, 2), mode).unwrap();
            let m = ModelSet::from_indices([0, 2]);
            let want = pinv_rss(&s.columns(&m), s.y0());
            assert_relative_eq!(rss(&s, &m).unwrap(), want, epsilon = 1e-10);
        }
    }

    #[test]
    fn orthonormal_single_column_rss() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0]);
        let y = DVector::from_vec(vec![3.0, -1.0, 0.5, 2.0]);
        let s = standardize(&Dataset::new(x, y).unwrap(), Parametrization::Formal).unwrap();
        let c = s.x0().column(0).dot(s.y0());
        let got = rss(&s, &ModelSet::from_indices([0])).unwrap();
        assert_relative_eq!(got, s.y0().norm_squared() - c * c, epsilon = 1e-12);
        let fit = ls_fit(&s, &ModelSet::from_indices([0, 1])).unwrap();
        assert_relative_eq!(fit.theta_hat[0], c, epsilon = 1e-12);
        assert_relative_eq!(
            fit.theta_hat[1],
            s.x0().column(1).dot(s.y0()),
            epsilon = 1e-12
        );
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let mut d = random_data(10, 3, 3);
        let (mut x, y) = d.clone().into_parts();
        let c0 = x.column(0).into_owned();
        x.set_column(2, &(c0 * 2.0));
        d = Dataset::new(x, y).unwrap();
        let s = standardize(&d, Parametrization::Formal).unwrap();
        let m = ModelSet::from_indices([0, 2]);
        assert!(matches!(rss(&s, &m), Err(Error::RankDeficient(_))));
        assert!(matches!(ls_fit(&s, &m), Err(Error::RankDeficient(_))));
        assert!(rss(&s, &ModelSet::from_indices([0, 1])).is_ok());
    }

    #[test]
    fn exact_fit_is_degenerate() {
        let d = random_data(6, 2, 4);
        let (x, _) = d.into_parts();
        let y = x.column(0) * 2.0 - x.column(1) * 0.5;
        let s = standardize(&Dataset::new(x, y).unwrap(), Parametrization::Formal).unwrap();
        let m = ModelSet::from_indices([0, 1]);
        assert!(matches!(ls_fit(&s, &m), Err(Error::DegenerateResidual(_))));
        let f = refit(&s, &m).unwrap();
        assert!(f.rss < DEGENERATE_RSS);
    }

    #[test]
    fn too_many_predictors() {
        let s = standardize(&random_data(4, 3, 5), Parametrization::Practical).unwrap();
        assert!(matches!(
            ls_fit(&s, &ModelSet::full(3)),
            Err(Error::TooManyPredictors {
                size: 3,
                n_effective: 3
            })
        ));
    }

    #[test]
    fn link_check_examples() {
        let s = standardize(&random_data(10, 3, 6), Parametrization::Practical).unwrap();
        assert!(projection_link_check(&s, &ModelSet::from_indices([1])).unwrap());
        assert!(projection_link_check(&s, &ModelSet::empty()).unwrap());
        let f = standardize(&random_data(10, 3, 6), Parametrization::Formal).unwrap();
        assert!(projection_link_check(&f, &ModelSet::full(3)).unwrap());
    }

    #[test]
    fn intercept_reproduces_fitted_means() {
        let d = random_data(12, 3, 7);
        let s = standardize(&d, Parametrization::Practical).unwrap();
        let m = ModelSet::full(3);
        let f = ls_fit(&s, &m).unwrap();
        let a = s.intercept(&m, &f.beta_hat);
        let fitted = d.x() * DVector::from_vec(f.beta_hat.clone()) + DVector::from_element(12, a);
        let rss_raw = (d.y() - fitted).norm_squared();
        assert_relative_eq!(rss_raw, f.rss, max_relative = 1e-10);
    }

    #[test]
    fn model_set_display_and_serde_are_one_based() {
        let m = ModelSet::from_indices([4, 0, 2, 2]);
        assert_eq!(m.to_string(), "{1,3,5}");
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, "[1,3,5]");
        assert_eq!(serde_json::from_str::<ModelSet>(&json).unwrap(), m);
        assert!(serde_json::from_str::<ModelSet>("[0,1]").is_err());
    }

    #[test]
    fn export_is_row_major() {
        let s = standardize(&random_data(5, 2, 8), Parametrization::Formal).unwrap();
        let e = s.export();
        assert_eq!(e.x0.len(), 5);
        assert_eq!(e.x0[3][1], s.x0()[(3, 1)]);
        let back: DesignExport = serde_json::from_str(&serde_json::to_string(&e).unwrap()).unwrap();
        assert_eq!(back, e);
    }

    fn arb_case() -> impl Strategy<Value = (usize, usize, u64, bool)> {
        (3usize..7, 0u64..1000, any::<bool>()).prop_flat_map(|(p, seed, practical)| {
            (p + 3..p + 15).prop_map(move |n| (n, p, seed, practical))
        })
    }

    fn mode_of(practical: bool) -> Parametrization {
        if practical {
            Parametrization::Practical
        } else {
            Parametrization::Formal
        }
    }

    proptest! {
        #[test]
        fn standardized_invariants((n, p, seed, practical) in arb_case()) {
            let s = standardize(&random_data(n, p, seed), mode_of(practical)).unwrap();
            for j in 0..p {
                prop_assert!((s.x0().column(j).norm() - 1.0).abs() < 1e-10);
                if practical {
                    prop_assert!(s.x0().column(j).sum().abs() < 1e-8);
                }
            }
            if practical {
                prop_assert!(s.y0().sum().abs() < 1e-8);
            }
        }

        #[test]
        fn rescaling_columns_leaves_x0_unchanged(
            (n, p, seed, practical) in arb_case(),
            c in proptest::collection::vec(0.01f64..100.0, 7),
        ) {
            let d = random_data(n, p, seed);
            let (mut x, y) = d.clone().into_parts();
            for j in 0..p {
                let mut col = x.column_mut(j);
                col *= c[j];
            }
            let a = standardize(&d, mode_of(practical)).unwrap();
            let b = standardize(&Dataset::new(x, y).unwrap(), mode_of(practical)).unwrap();
            prop_assert!((a.x0() - b.x0()).amax() < 1e-12);
            prop_assert_eq!(a.y0(), b.y0());
        }

        #[test]
        fn nested_models_reduce_rss((n, p, seed, practical) in arb_case(), k in 0usize..3) {
            let s = standardize(&random_data(n, p, seed), mode_of(practical)).unwrap();
            let small = ModelSet::from_indices((0..p).filter(|j| j % 3 == k));
            let big = small.with((k + 1) % p);
            prop_assert!(rss(&s, &big).unwrap() <= rss(&s, &small).unwrap() + 1e-12);
        }

        #[test]
        fn t_squared_matches_rss_differences((n, p, seed, practical) in arb_case()) {
            let s = standardize(&random_data(n, p, seed), mode_of(practical)).unwrap();
            let m = ModelSet::from_indices((0..p).filter(|j| j % 2 == 0));
            let f = ls_fit(&s, &m).unwrap();
            prop_assert!((f.rss - rss(&s, &m).unwrap()).abs() < 1e-8);
            let resid = s.y0() - s.columns(&m) * DVector::from_vec(f.theta_hat.clone());
            prop_assert!((resid.norm_squared() - f.rss).abs() < 1e-8);
            for (k, j) in m.iter().enumerate() {
                let drop = rss(&s, &m.without(j)).unwrap();
                let lhs = f.t_squared[k] / f.df_resid as f64;
                let rhs = (drop - f.rss) / f.rss;
                prop_assert!((lhs - rhs).abs() <= 1e-8 * rhs.abs().max(1.0));
                prop_assert!(f.t_squared[k] >= 0.0);
                prop_assert!((f.beta_hat[k] - f.theta_hat[k] / s.scales()[j]).abs() < 1e-12);
            }
        }

        #[test]
        fn projection_link_holds((n, p, seed, practical) in arb_case(), mask in 0u32..64) {
            let s = standardize(&random_data(n, p, seed), mode_of(practical)).unwrap();
            let m = ModelSet::from_indices((0..p).filter(|j| mask & (1 << j) != 0));
            prop_assert!(projection_link_check(&s, &m).unwrap());
        }
    }
}

//! Truncated power series and polynomials over the quaternions.
//!
//! The indeterminate `z` commutes with the coefficients, so the product
//! of two series is the ordinary convolution with the factor order kept.
//! Evaluation comes in two flavours: left `Σ γᵏ f_k` and right `Σ f_k γᵏ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::{self, Quaternion};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Side> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(Error::InvalidInput(format!("unknown side '{other}'"))),
        }
    }
}

/// A point value together with its truncation error bound.
///
/// `err_bound` is `None` when the series carries no tail information.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: Quaternion,
    pub err_bound: Option<f64>,
}

impl Evaluation {
    pub fn exact(value: Quaternion) -> Self {
        Evaluation {
            value,
            err_bound: Some(0.0),
        }
    }

    /// Error bound with "unknown" mapped to infinity.
    pub fn bound(&self) -> f64 {
        self.err_bound.unwrap_or(f64::INFINITY)
    }
}

/// Anything that can be evaluated on the left or on the right.
pub trait Evaluate {
    fn evaluate(&self, gamma: Quaternion, side: Side) -> Result<Evaluation>;

    fn eval_left(&self, gamma: Quaternion) -> Result<Evaluation> {
        self.evaluate(gamma, Side::Left)
    }

    fn eval_right(&self, gamma: Quaternion) -> Result<Evaluation> {
        self.evaluate(gamma, Side::Right)
    }
}

/// Power series truncated at order `N` (coefficients `f_0 … f_N`).
///
/// `tail_ratio = Some(r)` asserts a geometric bound `|f_k| ≤ C·rᵏ`; the
/// constant `C` is taken as `max_k |f_k|/rᵏ` over the stored coefficients.
/// `Some(0.0)` marks a series that is exactly zero past its order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSeries")]
pub struct QSeries {
    coeffs: Vec<Quaternion>,
    order: usize,
    tail_ratio: Option<f64>,
}

#[derive(Deserialize)]
struct RawSeries {
    coeffs: Vec<Quaternion>,
    order: Option<usize>,
    #[serde(default)]
    tail_ratio: Option<f64>,
}

impl TryFrom<RawSeries> for QSeries {
    type Error = Error;
    fn try_from(raw: RawSeries) -> Result<Self> {
        if raw.coeffs.is_empty() {
            return Err(Error::InvalidInput(
                "series needs at least one coefficient".into(),
            ));
        }
        let order = raw.order.unwrap_or(raw.coeffs.len() - 1);
        let mut coeffs = raw.coeffs;
        if coeffs.len() > order + 1 {
            coeffs.truncate(order + 1);
        }
        coeffs.resize(order + 1, Quaternion::ZERO);
        QSeries::with_tail(coeffs, raw.tail_ratio)
    }
}

impl QSeries {
    /// Series with coefficients `coeffs` (order `len − 1`) and no tail data.
    pub fn new(coeffs: Vec<Quaternion>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        let order = coeffs.len() - 1;
        QSeries {
            coeffs,
            order,
            tail_ratio: None,
        }
    }

    pub fn with_tail(coeffs: Vec<Quaternion>, tail_ratio: Option<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput(
                "series needs at least one coefficient".into(),
            ));
        }
        if let Some(r) = tail_ratio {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::InvalidInput(format!(
                    "tail ratio {r} outside [0, 1)"
                )));
            }
        }
        let order = coeffs.len() - 1;
        Ok(QSeries {
            coeffs,
            order,
            tail_ratio,
        })
    }

    pub fn zero(order: usize) -> Self {
        QSeries {
            coeffs: vec![Quaternion::ZERO; order + 1],
            order,
            tail_ratio: Some(0.0),
        }
    }

    pub fn constant(q: Quaternion, order: usize) -> Self {
        let mut s = QSeries::zero(order);
        s.coeffs[0] = q;
        s
    }

    pub fn one(order: usize) -> Self {
        QSeries::constant(Quaternion::ONE, order)
    }

    /// `q·zᵏ`.
    pub fn monomial(q: Quaternion, k: usize, order: usize) -> Self {
        let mut s = QSeries::zero(order);
        if k <= order {
            s.coeffs[k] = q;
        }
        s
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn coeffs(&self) -> &[Quaternion] {
        &self.coeffs
    }

    /// Coefficient `k`, zero past the order.
    #[inline]
    pub fn coeff(&self, k: usize) -> Quaternion {
        self.coeffs.get(k).copied().unwrap_or(Quaternion::ZERO)
    }

    pub fn tail_ratio(&self) -> Option<f64> {
        self.tail_ratio
    }

    pub fn set_tail_ratio(&mut self, r: Option<f64>) {
        self.tail_ratio = r.map(|r| r.clamp(0.0, 1.0 - f64::EPSILON));
    }

    pub fn is_exact(&self) -> bool {
        self.tail_ratio == Some(0.0)
    }

    /// Keeps coefficients `0..=order`. Tail data survives.
    pub fn truncate(&self, order: usize) -> QSeries {
        let mut coeffs: Vec<Quaternion> = self.coeffs.iter().take(order + 1).copied().collect();
        let exact = self.is_exact();
        coeffs.resize(order + 1, Quaternion::ZERO);
        let tail = if order > self.order && !exact {
            None
        } else {
            self.tail_ratio
        };
        QSeries {
            coeffs,
            order,
            tail_ratio: tail,
        }
    }

    pub fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
            order: self.order,
            tail_ratio: self.tail_ratio,
        }
    }

    /// `q·f`.
    pub fn lmul(&self, q: Quaternion) -> QSeries {
        self.map(|c| q * c)
    }

    /// `f·q`.
    pub fn rmul(&self, q: Quaternion) -> QSeries {
        self.map(|c| c * q)
    }

    pub fn scale(&self, s: f64) -> QSeries {
        self.map(|c| c * s)
    }

    /// `z^k·f`, keeping the order.
    pub fn shift_up(&self, k: usize) -> QSeries {
        let mut out = QSeries::zero(self.order);
        for i in 0..=self.order {
            if i + k <= self.order {
                out.coeffs[i + k] = self.coeffs[i];
            }
        }
        out.tail_ratio = self.tail_ratio;
        out
    }

    pub fn add(&self, other: &QSeries) -> QSeries {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &QSeries) -> QSeries {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &QSeries, f: impl Fn(Quaternion, Quaternion) -> Quaternion) -> QSeries {
        let order = self.order.min(other.order);
        let coeffs = (0..=order)
            .map(|k| f(self.coeffs[k], other.coeffs[k]))
            .collect();
        QSeries {
            coeffs,
            order,
            tail_ratio: combine_tail(self.tail_ratio, other.tail_ratio),
        }
    }

    /// Cauchy product `f·g` with the factor order preserved.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        series_mul(self, other)
    }

    pub fn sharp(&self) -> QSeries {
        self.map(Quaternion::conj)
    }

    /// `Σ_{k≤N} |f_k|²`.
    pub fn h2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sq()).sum()
    }

    /// `max_k |f_k − g_k|` over the common order.
    pub fn max_diff(&self, other: &QSeries) -> f64 {
        let order = self.order.min(other.order);
        (0..=order)
            .map(|k| self.coeffs[k].dist(other.coeffs[k]))
            .fold(0.0, f64::max)
    }

    /// Largest imaginary part among the coefficients.
    pub fn max_imag(&self) -> f64 {
        self.coeffs.iter().map(|c| c.im_norm()).fold(0.0, f64::max)
    }

    /// Constant `C` of the tail bound `|f_k| ≤ C·rᵏ`.
    fn tail_constant(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let ln_r = r.ln();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(k, c)| c.norm().ln() - k as f64 * ln_r)
            .fold(f64::NEG_INFINITY, f64::max)
            .exp()
    }

    /// Truncation error bound at a point of modulus `m`, or `DivergenceRisk`.
    pub fn err_bound_at(&self, m: f64) -> Result<Option<f64>> {
        match self.tail_ratio {
            Some(0.0) => Ok(Some(0.0)),
            Some(r) => {
                let t = r * m;
                if t >= 1.0 {
                    return Err(Error::DivergenceRisk { product: t });
                }
                let c = self.tail_constant(r);
                let n1 = (self.order + 1) as f64;
                Ok(Some(c * (n1 * t.ln()).exp() / (1.0 - t)))
            }
            None => {
                if m > 1.0 {
                    return Err(Error::DivergenceRisk { product: m });
                }
                Ok(None)
            }
        }
    }

    /// `Σ γᵏ f_k` by Horner's rule.
    pub fn eval_left_value(&self, gamma: Quaternion) -> Quaternion {
        let mut acc = Quaternion::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = gamma * acc + *c;
        }
        acc
    }

    /// `Σ f_k γᵏ` by Horner's rule.
    pub fn eval_right_value(&self, gamma: Quaternion) -> Quaternion {
        let mut acc = Quaternion::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * gamma + *c;
        }
        acc
    }

    /// Left evaluation demanding a known error bound at most `tol`.
    pub fn eval_within(&self, gamma: Quaternion, side: Side, tol: f64) -> Result<Quaternion> {
        let e = self.evaluate(gamma, side)?;
        let bound = e.bound();
        if bound > tol {
            return Err(Error::TruncationInsufficient { bound, tol });
        }
        Ok(e.value)
    }

    /// Splits `f = g + h·ε` with `g`, `h` having coefficients in `C_α`.
    pub fn split(&self, alpha: Quaternion, eps: Quaternion) -> Result<(QSeries, QSeries)> {
        split_series(self, alpha, eps)
    }

    /// Quotient and remainder of `f = ρ_α·g + r` for `ρ_α = z − α`,
    /// by backward recursion from the top coefficient.
    pub fn div_rho_left(&self, alpha: Quaternion) -> (QSeries, Quaternion) {
        let n = self.order;
        if n == 0 {
            return (QSeries::zero(0), self.coeffs[0]);
        }
        let mut g = vec![Quaternion::ZERO; n];
        let mut next = Quaternion::ZERO;
        for k in (1..=n).rev() {
            next = self.coeffs[k] + alpha * next;
            g[k - 1] = next;
        }
        let rem = self.coeffs[0] + alpha * g[0];
        (
            QSeries {
                coeffs: g,
                order: n - 1,
                tail_ratio: self.tail_ratio,
            },
            rem,
        )
    }

    /// Quotient and remainder of `f = g·ρ_β + r`.
    pub fn div_rho_right(&self, beta: Quaternion) -> (QSeries, Quaternion) {
        let n = self.order;
        if n == 0 {
            return (QSeries::zero(0), self.coeffs[0]);
        }
        let mut g = vec![Quaternion::ZERO; n];
        let mut next = Quaternion::ZERO;
        for k in (1..=n).rev() {
            next = self.coeffs[k] + next * beta;
            g[k - 1] = next;
        }
        let rem = self.coeffs[0] + g[0] * beta;
        (
            QSeries {
                coeffs: g,
                order: n - 1,
                tail_ratio: self.tail_ratio,
            },
            rem,
        )
    }

    /// `Σ_k conj(g_k)·f_k`, the H² inner product `⟨f, g⟩`.
    pub fn inner(&self, g: &QSeries) -> Quaternion {
        let order = self.order.min(g.order);
        (0..=order)
            .map(|k| g.coeffs[k].conj() * self.coeffs[k])
            .sum()
    }
}

fn combine_tail(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        _ => None,
    }
}

impl Evaluate for QSeries {
    fn evaluate(&self, gamma: Quaternion, side: Side) -> Result<Evaluation> {
        let err_bound = self.err_bound_at(gamma.norm())?;
        let value = match side {
            Side::Left => self.eval_left_value(gamma),
            Side::Right => self.eval_right_value(gamma),
        };
        Ok(Evaluation { value, err_bound })
    }
}

/// Coefficient `k` of `f·g` is `Σ_{ℓ≤k} f_ℓ·g_{k−ℓ}`; the order is the smaller one.
pub fn series_mul(f: &QSeries, g: &QSeries) -> QSeries {
    let order = f.order.min(g.order);
    let mut coeffs = vec![Quaternion::ZERO; order + 1];
    for (l, &fl) in f.coeffs.iter().enumerate().take(order + 1) {
        if fl == Quaternion::ZERO {
            continue;
        }
        for (m, &gm) in g.coeffs.iter().enumerate().take(order + 1 - l) {
            coeffs[l + m] += fl * gm;
        }
    }
    QSeries {
        coeffs,
        order,
        tail_ratio: combine_tail(f.tail_ratio, g.tail_ratio),
    }
}

pub fn sharp(f: &QSeries) -> QSeries {
    f.sharp()
}

/// `(fg)^{el}(γ) = f^{el}(γ)·g^{el}(f^{el}(γ)⁻¹·γ·f^{el}(γ))`, and `0` when
/// `f^{el}(γ)` vanishes.
pub fn eval_product_left(
    f: &dyn Evaluate,
    g: &dyn Evaluate,
    gamma: Quaternion,
) -> Result<Evaluation> {
    let fe = f.eval_left(gamma)?;
    if is_zero_value(&fe) {
        return Ok(Evaluation {
            value: Quaternion::ZERO,
            err_bound: fe.err_bound,
        });
    }
    let point = fe.value.inv()? * gamma * fe.value;
    let ge = g.eval_left(point)?;
    let bound = combine_eval_bounds(&fe, &ge);
    Ok(Evaluation {
        value: fe.value * ge.value,
        err_bound: bound,
    })
}

/// `(fg)^{br}(γ) = f^{br}(g^{br}(γ)·γ·g^{br}(γ)⁻¹)·g^{br}(γ)`, and `0` when
/// `g^{br}(γ)` vanishes.
pub fn eval_product_right(
    f: &dyn Evaluate,
    g: &dyn Evaluate,
    gamma: Quaternion,
) -> Result<Evaluation> {
    let ge = g.eval_right(gamma)?;
    if is_zero_value(&ge) {
        return Ok(Evaluation {
            value: Quaternion::ZERO,
            err_bound: ge.err_bound,
        });
    }
    let point = ge.value * gamma * ge.value.inv()?;
    let fe = f.eval_right(point)?;
    let bound = combine_eval_bounds(&fe, &ge);
    Ok(Evaluation {
        value: fe.value * ge.value,
        err_bound: bound,
    })
}

/// Zero test `|value| ≤ max(1e−9, 10·err)`.
pub fn is_zero_value(e: &Evaluation) -> bool {
    let thresh = match e.err_bound {
        Some(b) => tol::ZERO_EVAL_FLOOR.max(10.0 * b),
        None => tol::ZERO_EVAL_FLOOR,
    };
    e.value.norm() <= thresh
}

fn combine_eval_bounds(a: &Evaluation, b: &Evaluation) -> Option<f64> {
    match (a.err_bound, b.err_bound) {
        (Some(ea), Some(eb)) => Some(ea * b.value.norm() + eb * a.value.norm() + ea * eb),
        _ => None,
    }
}

/// `k_α(z) = Σ ᾱᵏ zᵏ`, the kernel series at `α`.
pub fn kappa_series(alpha: Quaternion, order: usize) -> Result<QSeries> {
    let m = alpha.norm();
    if m >= 1.0 {
        return Err(Error::NodeOutsideBall { modulus: m });
    }
    let ac = alpha.conj();
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut p = Quaternion::ONE;
    for _ in 0..=order {
        coeffs.push(p);
        p *= ac;
    }
    QSeries::with_tail(coeffs, Some(m))
}

/// Closed-form `k_α^{el}(γ) = (1 − γ(α+ᾱ) + γ²|α|²)⁻¹(1 − γα)`.
pub fn kappa_eval_left(alpha: Quaternion, gamma: Quaternion) -> Result<Quaternion> {
    let d = Quaternion::ONE - gamma * (2.0 * alpha.w) + gamma * gamma * alpha.norm_sq();
    Ok(d.inv()? * (Quaternion::ONE - gamma * alpha))
}

/// Closed-form `k_α^{br}(γ) = (1 − αγ)(1 − γ(α+ᾱ) + γ²|α|²)⁻¹`.
pub fn kappa_eval_right(alpha: Quaternion, gamma: Quaternion) -> Result<Quaternion> {
    let d = Quaternion::ONE - gamma * (2.0 * alpha.w) + gamma * gamma * alpha.norm_sq();
    Ok((Quaternion::ONE - alpha * gamma) * d.inv()?)
}

/// Splits `f = g + h·ε` coefficientwise with coefficients of `g`, `h` in `C_α`.
pub fn split_series(f: &QSeries, alpha: Quaternion, eps: Quaternion) -> Result<(QSeries, QSeries)> {
    let u = quat::validate_split_inputs(alpha, eps, tol::DEFAULT_TOL)?;
    let (g, h): (Vec<_>, Vec<_>) = f
        .coeffs
        .iter()
        .map(|&c| quat::split_unchecked(c, u, eps))
        .unzip();
    Ok((
        QSeries {
            coeffs: g,
            order: f.order,
            tail_ratio: f.tail_ratio,
        },
        QSeries {
            coeffs: h,
            order: f.order,
            tail_ratio: f.tail_ratio,
        },
    ))
}

pub fn h2_norm_sq(f: &QSeries) -> f64 {
    f.h2_norm_sq()
}

/// Polynomial with its exact degree (trailing zeros trimmed).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<Quaternion>", into = "Vec<Quaternion>")]
pub struct Polynomial {
    coeffs: Vec<Quaternion>,
}

impl From<Vec<Quaternion>> for Polynomial {
    fn from(c: Vec<Quaternion>) -> Self {
        Polynomial::new(c)
    }
}

impl From<Polynomial> for Vec<Quaternion> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Quaternion>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Quaternion::ZERO) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(q: Quaternion) -> Self {
        Polynomial::new(vec![q])
    }

    /// `ρ_α(z) = z − α`.
    pub fn rho(alpha: Quaternion) -> Self {
        Polynomial::new(vec![-alpha, Quaternion::ONE])
    }

    /// `𝒳_{[α]}(z) = z² − 2·Re(α)·z + |α|²`.
    pub fn char_poly(alpha: Quaternion) -> Self {
        Polynomial::new(vec![
            Quaternion::real(alpha.norm_sq()),
            Quaternion::real(-2.0 * alpha.w),
            Quaternion::ONE,
        ])
    }

    pub fn coeffs(&self) -> &[Quaternion] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Quaternion {
        self.coeffs.get(k).copied().unwrap_or(Quaternion::ZERO)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self, tol: f64) -> bool {
        self.coeffs
            .last()
            .is_some_and(|c| c.dist(Quaternion::ONE) <= tol)
    }

    pub fn leading(&self) -> Quaternion {
        self.coeffs.last().copied().unwrap_or(Quaternion::ZERO)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut c = vec![Quaternion::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::new(c)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn lmul(&self, q: Quaternion) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| q * c).collect())
    }

    pub fn rmul(&self, q: Quaternion) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| c * q).collect())
    }

    pub fn sharp(&self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    pub fn eval_left(&self, gamma: Quaternion) -> Quaternion {
        let mut acc = Quaternion::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = gamma * acc + *c;
        }
        acc
    }

    pub fn eval_right(&self, gamma: Quaternion) -> Quaternion {
        let mut acc = Quaternion::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * gamma + *c;
        }
        acc
    }

    /// Series of order `order`; exact, so the tail ratio is zero.
    pub fn to_series(&self, order: usize) -> QSeries {
        let mut coeffs: Vec<Quaternion> = self.coeffs.iter().take(order + 1).copied().collect();
        coeffs.resize(order + 1, Quaternion::ZERO);
        let exact = self.coeffs.len() <= order + 1;
        QSeries {
            coeffs,
            order,
            tail_ratio: if exact { Some(0.0) } else { None },
        }
    }

    /// `max_k |p_k − q_k|`.
    pub fn max_diff(&self, other: &Polynomial) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| self.coeff(k).dist(other.coeff(k)))
            .fold(0.0, f64::max)
    }

    /// `self = q·d + r` with `deg r < deg d` (divisor on the right).
    pub fn div_rem_right(&self, d: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        let m = d
            .degree()
            .ok_or_else(|| Error::InvalidInput("division by zero polynomial".into()))?;
        let lead_inv = d.leading().inv()?;
        let mut rem = self.coeffs.clone();
        let n = rem.len();
        if n <= m {
            return Ok((Polynomial::zero(), self.clone()));
        }
        let mut q = vec![Quaternion::ZERO; n - m];
        for t in (0..n - m).rev() {
            let c = rem[t + m] * lead_inv;
            q[t] = c;
            for j in 0..=m {
                rem[t + j] -= c * d.coeffs[j];
            }
        }
        rem.truncate(m);
        Ok((Polynomial::new(q), Polynomial::new(rem)))
    }

    /// `self = d·q + r` with `deg r < deg d` (divisor on the left).
    pub fn div_rem_left(&self, d: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        let m = d
            .degree()
            .ok_or_else(|| Error::InvalidInput("division by zero polynomial".into()))?;
        let lead_inv = d.leading().inv()?;
        let mut rem = self.coeffs.clone();
        let n = rem.len();
        if n <= m {
            return Ok((Polynomial::zero(), self.clone()));
        }
        let mut q = vec![Quaternion::ZERO; n - m];
        for t in (0..n - m).rev() {
            let c = lead_inv * rem[t + m];
            q[t] = c;
            for j in 0..=m {
                rem[t + j] -= d.coeffs[j] * c;
            }
        }
        rem.truncate(m);
        Ok((Polynomial::new(q), Polynomial::new(rem)))
    }

    /// Formal inverse series, for an invertible constant term.
    pub fn formal_inverse(&self, order: usize) -> Result<QSeries> {
        let p0_inv = self.coeff(0).inv()?;
        let mut g = vec![Quaternion::ZERO; order + 1];
        g[0] = p0_inv;
        for k in 1..=order {
            let mut s = Quaternion::ZERO;
            for j in 1..=k.min(self.coeffs.len().saturating_sub(1)) {
                s += self.coeffs[j] * g[k - j];
            }
            g[k] = -(p0_inv * s);
        }
        QSeries::with_tail(g, None)
    }
}

impl Evaluate for Polynomial {
    fn evaluate(&self, gamma: Quaternion, side: Side) -> Result<Evaluation> {
        Ok(Evaluation::exact(match side {
            Side::Left => self.eval_left(gamma),
            Side::Right => self.eval_right(gamma),
        }))
    }
}

/// `ρ_{α₁}·ρ_{α₂}⋯ρ_{αₙ}`, multiplied left to right.
pub fn poly_from_factors(nodes: &[Quaternion]) -> Polynomial {
    nodes
        .iter()
        .fold(Polynomial::constant(Quaternion::ONE), |acc, &a| {
            acc.mul(&Polynomial::rho(a))
        })
}

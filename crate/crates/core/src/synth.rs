//! Synthesis of a zero-free `R` with `pR` a finite Blaschke product, from a
//! controllable stable pair `(A, v)` representing the monic polynomial `p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{
    companion_matrix, controllability_matrix, stein_residual, stein_solve, ControllablePair,
    QMatrix,
};
use crate::quat::Quaternion;
use crate::realize::Realization;
use crate::series::{series_mul, Polynomial, QSeries};
use crate::tol;

/// The finite Blaschke product `Θ = pR` as a realization and a truncated series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theta {
    pub realization: Realization,
    pub series: QSeries,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthResult {
    /// Polynomial represented by the pair.
    pub p: Polynomial,
    /// Gram matrix solving `P − APA* = vv*`.
    #[serde(rename = "P")]
    pub gram: QMatrix,
    /// `g = (I − A*)P⁻¹(I − A)⁻¹v`.
    pub g: QMatrix,
    /// `R(z) = eₙ*𝔠⁻¹P(I − zA*)⁻¹g`.
    #[serde(rename = "R")]
    pub r: QSeries,
    #[serde(rename = "Theta")]
    pub theta: Theta,
    /// Polynomial inverse of `R`.
    #[serde(rename = "Ginv")]
    pub ginv: Polynomial,
    /// `eₙ*𝔠⁻¹P𝔠^{−*}eₙ`.
    pub r_norm_sq: f64,
}

/// Residuals of the algebraic identities behind a synthesis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthChecks {
    /// `P − APA* = vv*`.
    pub stein: f64,
    /// `P⁻¹ − A*P⁻¹A = gg*`.
    pub stein_inverse: f64,
    /// `APg = −v + vv*P⁻¹(I − A)⁻¹v`.
    pub apg: f64,
    pub unitarity: f64,
    /// `‖pR − Θ‖∞` through the series order.
    pub product: f64,
    /// `‖G·R − 1‖∞` through the series order.
    pub inverse: f64,
}

/// `p(z) = zⁿ − e₁*(I − zF*)⁻¹𝔠⁻¹Aⁿv`, the polynomial a controllable pair represents.
pub fn pair_polynomial(pair: &ControllablePair) -> Result<Polynomial> {
    let n = pair.dim();
    let c = controllability_matrix(&pair.a, &pair.v)?;
    let c_inv = c.inverse_guarded("controllability matrix", tol::ILL_COND)?;
    let tail = &c_inv * &(&pair.a.pow(n) * &pair.v);
    let mut coeffs: Vec<Quaternion> = (0..n).map(|k| -tail.get(k, 0)).collect();
    coeffs.push(Quaternion::ONE);
    Ok(Polynomial::new(coeffs))
}

pub fn synthesize(a: &QMatrix, v: &QMatrix, order: usize) -> Result<SynthResult> {
    let pair = ControllablePair::new(a.clone(), v.clone())?;
    synthesize_pair(&pair, order)
}

pub fn synthesize_pair(pair: &ControllablePair, order: usize) -> Result<SynthResult> {
    let n = pair.dim();
    if n == 0 {
        return Err(Error::InvalidInput(
            "synthesis needs a pair of dimension at least 1".into(),
        ));
    }
    let a = &pair.a;
    let v = &pair.v;
    let radius = a.spectral_radius()?;
    if radius >= 1.0 - tol::STABILITY_MARGIN {
        return Err(Error::NotStable { radius });
    }
    let c = controllability_matrix(a, v)?;
    let c_inv = c.inverse_guarded("controllability matrix", tol::ILL_COND)?;
    let p = pair_polynomial(pair)?;

    let gram = stein_solve(a, v)?;
    let p_inv = gram.inverse_guarded("Gram matrix", tol::ILL_COND)?;
    let id = QMatrix::identity(n);
    let a_star = a.adjoint();
    let i_minus_a_inv = (&id - a).inverse()?;
    let g = &(&(&(&id - &a_star) * &p_inv) * &i_minus_a_inv) * v;

    let en = QMatrix::unit(n, n - 1).adjoint();
    let row = &(&en * &c_inv) * &gram;
    let mut r_coeffs = Vec::with_capacity(order + 1);
    let mut x = g.clone();
    for _ in 0..=order {
        r_coeffs.push((&row * &x).get(0, 0));
        x = &a_star * &x;
    }
    let r = QSeries::with_tail(r_coeffs, Some(radius))?;
    let r_norm_sq = (&(&row * &c_inv.adjoint()) * &en.adjoint()).get(0, 0).w;

    let half = gram.sqrt_psd()?;
    let inv_half = gram.inv_sqrt_pd()?;
    let d = Quaternion::ONE - (&(&v.adjoint() * &(&id - &a_star).inverse()?) * &g).get(0, 0);
    let realization = Realization::new(
        &(&half * &a_star) * &inv_half,
        &half * &g,
        &v.adjoint() * &inv_half,
        d,
    )?;
    let series = realization.series(order);
    let theta = Theta {
        realization,
        series,
    };

    let ginv = formal_inverse_polynomial(&p, &g, a, &c, &c_inv)?;
    Ok(SynthResult {
        p,
        gram,
        g,
        r,
        theta,
        ginv,
        r_norm_sq,
    })
}

/// `G(z) = p(z) − (z − 1)·g*(I − A)⁻¹𝔠(I − zF*)⁻¹(eₙ − F*𝔠⁻¹Aⁿv)`.
fn formal_inverse_polynomial(
    p: &Polynomial,
    g: &QMatrix,
    a: &QMatrix,
    c: &QMatrix,
    c_inv: &QMatrix,
) -> Result<Polynomial> {
    let n = a.rows();
    let id = QMatrix::identity(n);
    let f_star = QMatrix::shift(n).adjoint();
    let v = c.submatrix(0, 0, n, 1);
    let u = &(&g.adjoint() * &(&id - a).inverse()?) * c;
    let mut w = &QMatrix::unit(n, n - 1) - &(&(&f_star * c_inv) * &(&a.pow(n) * &v));
    let mut h = Vec::with_capacity(n);
    for _ in 0..n {
        h.push((&u * &w).get(0, 0));
        w = &f_star * &w;
    }
    let mut coeffs: Vec<Quaternion> = (0..=n).map(|k| p.coeff(k)).collect();
    for (k, hk) in h.iter().enumerate() {
        coeffs[k] += *hk;
        coeffs[k + 1] -= *hk;
    }
    Ok(Polynomial::new(coeffs))
}

impl SynthResult {
    pub fn degree(&self) -> usize {
        self.gram.rows()
    }

    pub fn checks(&self, pair: &ControllablePair) -> Result<SynthChecks> {
        let n = self.degree();
        let a = &pair.a;
        let v = &pair.v;
        let id = QMatrix::identity(n);
        let p_inv = self.gram.inverse()?;
        let stein = stein_residual(&self.gram, a, v);
        let lhs = &p_inv - &(&(&a.adjoint() * &p_inv) * a);
        let gg = &self.g * &self.g.adjoint();
        let stein_inverse = lhs.max_diff(&gg) / p_inv.max_abs().max(1.0);
        let apg = &(a * &self.gram) * &self.g;
        let i_minus_a_inv = (&id - a).inverse()?;
        let rhs = &(-v) + &(&(v * &v.adjoint()) * &(&(&p_inv * &i_minus_a_inv) * v));
        let order = self.r.order();
        let pr = series_mul(&self.p.to_series(order), &self.r);
        let gr = series_mul(&self.ginv.to_series(order), &self.r);
        Ok(SynthChecks {
            stein,
            stein_inverse,
            apg: apg.max_diff(&rhs),
            unitarity: self.theta.realization.unitarity_defect(),
            product: pr.max_diff(&self.theta.series),
            inverse: gr.max_diff(&QSeries::one(order)),
        })
    }
}

/// `(C_p, e₁)` for a monic polynomial with all zeros in the open unit ball.
pub fn pair_from_polynomial(p: &Polynomial) -> Result<ControllablePair> {
    let a = companion_matrix(p)?;
    let radius = a.spectral_radius()?;
    if radius >= 1.0 - tol::STABILITY_MARGIN {
        return Err(Error::NotStable { radius });
    }
    let n = a.rows();
    ControllablePair::new(a, QMatrix::unit(n, 0))
}

/// Lower-bidiagonal `A` with diagonal `γ` and subdiagonal ones, `v = e₁`;
/// the pair represents `ρ_{γ₁}⋯ρ_{γₙ}`.
pub fn pair_from_chain(gammas: &[Quaternion]) -> Result<ControllablePair> {
    let n = gammas.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty chain".into()));
    }
    let radius = gammas.iter().map(|g| g.norm()).fold(0.0, f64::max);
    if radius >= 1.0 - tol::STABILITY_MARGIN {
        return Err(Error::NotStable { radius });
    }
    let mut a = QMatrix::diag(gammas);
    for k in 1..n {
        a.set(k, k - 1, Quaternion::ONE);
    }
    ControllablePair::new(a, QMatrix::unit(n, 0))
}

/// Block-diagonal `A` and stacked `v`.
pub fn pair_direct_sum(pairs: &[ControllablePair]) -> Result<ControllablePair> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("empty direct sum".into()));
    }
    let blocks: Vec<&QMatrix> = pairs.iter().map(|p| &p.a).collect();
    let vs: Vec<&QMatrix> = pairs.iter().map(|p| &p.v).collect();
    ControllablePair::new(QMatrix::block_diag(&blocks), QMatrix::vstack(&vs)?)
}

/// `R̃ = R♯` from the synthesis on `p♯`, and `Θ̃ = R̃·p`.
pub fn conjugate_side(p: &Polynomial, order: usize) -> Result<(QSeries, QSeries)> {
    let pair = pair_from_polynomial(&p.sharp())?;
    let res = synthesize_pair(&pair, order)?;
    let rt = res.r.sharp();
    let theta = series_mul(&rt, &p.to_series(order));
    Ok((rt, theta))
}

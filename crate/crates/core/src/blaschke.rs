//! Blaschke factors, spherical factors and finite Blaschke products.
//!
//! `b_α(z) = (z − α)·k_α(z) = −α + (1 − |α|²)·Σ ᾱᵏ z^{k+1}`. A finite
//! product `b_{α₁}⋯b_{αₙ}·φ` is kept symbolically (nodes plus the right
//! unimodular constant) and evaluated with closed forms, factor by factor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::{ConjugacyClass, Quaternion};
use crate::series::{series_mul, Evaluate, Evaluation, Polynomial, QSeries, Side};
use crate::tol;

/// Tolerance for `|φ| = 1`.
pub const UNIMODULAR_TOL: f64 = 1e-12;

/// Class-membership tolerance selecting the `γ ∈ [α]` closed form.
const SAME_CLASS_EVAL_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlaschkeProduct {
    nodes: Vec<Quaternion>,
    phi: Quaternion,
}

#[derive(Deserialize)]
struct RawProduct {
    nodes: Vec<Quaternion>,
    #[serde(default = "one")]
    phi: Quaternion,
}

fn one() -> Quaternion {
    Quaternion::ONE
}

impl<'de> Deserialize<'de> for BlaschkeProduct {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawProduct::deserialize(d)?;
        BlaschkeProduct::new(raw.nodes, raw.phi).map_err(serde::de::Error::custom)
    }
}

/// One item of a product written with constants in arbitrary positions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Factor {
    Node(Quaternion),
    Constant(Quaternion),
}

impl BlaschkeProduct {
    pub fn new(nodes: Vec<Quaternion>, phi: Quaternion) -> Result<Self> {
        for a in &nodes {
            check_node(*a)?;
        }
        let m = phi.norm();
        if (m - 1.0).abs() > UNIMODULAR_TOL {
            return Err(Error::NotUnimodular { modulus: m });
        }
        Ok(BlaschkeProduct { nodes, phi })
    }

    /// Product with `φ = 1`.
    pub fn from_nodes(nodes: Vec<Quaternion>) -> Result<Self> {
        BlaschkeProduct::new(nodes, Quaternion::ONE)
    }

    pub fn constant(phi: Quaternion) -> Result<Self> {
        BlaschkeProduct::new(Vec::new(), phi)
    }

    /// Builds the product from factors with constants anywhere, moving each
    /// constant to the right end via `φ·b_α = b_{φαφ⁻¹}·φ`.
    pub fn from_factors(factors: &[Factor]) -> Result<Self> {
        let mut nodes: Vec<Quaternion> = Vec::new();
        let mut phi = Quaternion::ONE;
        for f in factors {
            match *f {
                Factor::Node(a) => nodes.push(phi * a * phi.inv()?),
                Factor::Constant(c) => phi *= c,
            }
        }
        BlaschkeProduct::new(nodes, phi)
    }

    pub fn nodes(&self) -> &[Quaternion] {
        &self.nodes
    }

    pub fn phi(&self) -> Quaternion {
        self.phi
    }

    pub fn degree(&self) -> usize {
        self.nodes.len()
    }

    pub fn max_node_modulus(&self) -> f64 {
        self.nodes.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Product `self·other`, renormalized with the constant on the right.
    pub fn mul(&self, other: &BlaschkeProduct) -> Result<BlaschkeProduct> {
        let mut f: Vec<Factor> = self.nodes.iter().map(|&a| Factor::Node(a)).collect();
        f.push(Factor::Constant(self.phi));
        f.extend(other.nodes.iter().map(|&a| Factor::Node(a)));
        f.push(Factor::Constant(other.phi));
        BlaschkeProduct::from_factors(&f)
    }

    pub fn series(&self, order: usize) -> QSeries {
        product_series(self, order)
    }

    pub fn eval(&self, gamma: Quaternion, side: Side) -> Result<Quaternion> {
        product_eval(self, gamma, side)
    }
}

impl Evaluate for BlaschkeProduct {
    fn evaluate(&self, gamma: Quaternion, side: Side) -> Result<Evaluation> {
        Ok(Evaluation::exact(product_eval(self, gamma, side)?))
    }
}

fn check_node(a: Quaternion) -> Result<()> {
    let m = a.norm();
    if !m.is_finite() || m >= 1.0 - tol::STABILITY_MARGIN {
        return Err(Error::NodeOutsideBall { modulus: m });
    }
    Ok(())
}

/// Coefficients `−α, (1−|α|²), (1−|α|²)ᾱ, (1−|α|²)ᾱ², …`.
pub fn factor_series(alpha: Quaternion, order: usize) -> Result<QSeries> {
    let m = alpha.norm();
    if m >= 1.0 {
        return Err(Error::NodeOutsideBall { modulus: m });
    }
    let d = 1.0 - alpha.norm_sq();
    let ac = alpha.conj();
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(-alpha);
    let mut p = Quaternion::real(d);
    for _ in 1..=order {
        coeffs.push(p);
        p *= ac;
    }
    QSeries::with_tail(coeffs, Some(m))
}

/// Closed-form factor evaluation for `|α| < 1`.
pub fn factor_eval(alpha: Quaternion, gamma: Quaternion, side: Side) -> Result<Quaternion> {
    let m = alpha.norm();
    if m >= 1.0 {
        return Err(Error::NodeOutsideBall { modulus: m });
    }
    factor_eval_closed(alpha, gamma, side)
}

/// Closed forms valid on the closed unit ball of nodes.
///
/// Left: `(1 − γ_ℓᾱ)⁻¹(γ_ℓ − α)` with `γ_ℓ = (1−γα)⁻¹γ(1−γα)`; right is
/// the mirror image. For `γ ∈ [α]` the reduced forms `(1−γ²)⁻¹(γ−α)` and
/// `(γ−α)(1−γ²)⁻¹` are used.
pub fn factor_eval_closed(alpha: Quaternion, gamma: Quaternion, side: Side) -> Result<Quaternion> {
    let one = Quaternion::ONE;
    let in_class = (gamma.w - alpha.w).abs() <= SAME_CLASS_EVAL_TOL
        && (gamma.im_norm() - alpha.im_norm()).abs() <= SAME_CLASS_EVAL_TOL;
    if in_class {
        let d = one - gamma * gamma;
        let dinv = guarded_inv(d)?;
        return Ok(match side {
            Side::Left => dinv * (gamma - alpha),
            Side::Right => (gamma - alpha) * dinv,
        });
    }
    let ac = alpha.conj();
    match side {
        Side::Left => {
            let t = one - gamma * alpha;
            let gl = guarded_inv(t)? * gamma * t;
            Ok(guarded_inv(one - gl * ac)? * (gl - alpha))
        }
        Side::Right => {
            let t = one - alpha * gamma;
            let gr = t * gamma * guarded_inv(t)?;
            Ok((gr - alpha) * guarded_inv(one - ac * gr)?)
        }
    }
}

fn guarded_inv(q: Quaternion) -> Result<Quaternion> {
    let m = q.norm();
    if m <= tol::POLE_TOL {
        return Err(Error::PoleHit { modulus: m });
    }
    q.inv()
}

/// Conjugated points `(γ_ℓ, γ_r)` of the factor at `α`.
pub fn conjugated_points(alpha: Quaternion, gamma: Quaternion) -> Result<(Quaternion, Quaternion)> {
    let one = Quaternion::ONE;
    let tl = one - gamma * alpha;
    let tr = one - alpha * gamma;
    Ok((guarded_inv(tl)? * gamma * tl, tr * gamma * guarded_inv(tr)?))
}

/// Inverse of `γ ↦ b_α(γ)` on either side.
///
/// Left: `γ_ℓ = (1 + wᾱ)⁻¹(α + w)`, then `γ = (1 − γ_ℓᾱ)⁻¹γ_ℓ(1 − γ_ℓᾱ)`.
/// Right: `γ_r = (α + w)(1 + ᾱw)⁻¹`, then `γ = (1 − ᾱγ_r)γ_r(1 − ᾱγ_r)⁻¹`.
pub fn factor_inverse(alpha: Quaternion, w: Quaternion, side: Side) -> Result<Quaternion> {
    let one = Quaternion::ONE;
    let ac = alpha.conj();
    match side {
        Side::Left => {
            let gl = guarded_inv(one + w * ac)? * (alpha + w);
            let t = one - gl * ac;
            Ok(guarded_inv(t)? * gl * t)
        }
        Side::Right => {
            let gr = (alpha + w) * guarded_inv(one + ac * w)?;
            let t = one - ac * gr;
            Ok(t * gr * guarded_inv(t)?)
        }
    }
}

/// `ℬ_{[α]} = b_α·b_ᾱ = 𝒳_{[α]}·(1 − 2Re(α)z + |α|²z²)⁻¹`, real coefficients.
pub fn spherical_factor(class: ConjugacyClass, order: usize) -> Result<QSeries> {
    let m = class.modulus();
    if m >= 1.0 {
        return Err(Error::NodeOutsideBall { modulus: m });
    }
    let alpha = class.representative();
    let denom = Polynomial::new(vec![
        Quaternion::ONE,
        Quaternion::real(-2.0 * class.re),
        Quaternion::real(alpha.norm_sq()),
    ]);
    let inv = denom.formal_inverse(order)?;
    let mut s = series_mul(&Polynomial::char_poly(alpha).to_series(order), &inv);
    // exact zeros in the imaginary slots
    s = s.map(|c| Quaternion::real(c.w));
    s.set_tail_ratio(Some(m));
    Ok(s)
}

/// `b_{α₁}⋯b_{αₙ}·φ` as a truncated series.
pub fn product_series(b: &BlaschkeProduct, order: usize) -> QSeries {
    let mut acc = QSeries::one(order);
    for &a in &b.nodes {
        // nodes are validated at construction
        let f = factor_series(a, order).expect("validated node");
        acc = series_mul(&acc, &f);
    }
    let mut out = acc.rmul(b.phi);
    let r = b.max_node_modulus();
    out.set_tail_ratio(Some(r));
    out
}

/// Closed-form evaluation of a validated product.
pub fn product_eval(b: &BlaschkeProduct, gamma: Quaternion, side: Side) -> Result<Quaternion> {
    eval_nodes(&b.nodes, b.phi, gamma, side)
}

/// Closed-form evaluation of `b_{α₁}⋯b_{αₙ}·φ` for nodes in the closed
/// unit ball, applying the product rule factor by factor.
///
/// Left: `w_k = b_{α_k}^{el}(γ_{k−1})`, `γ_k = w_k⁻¹γ_{k−1}w_k`. Right runs
/// from the constant towards `α₁` with `γ ↦ wγw⁻¹`. A vanishing factor
/// value short-circuits to zero.
pub fn eval_nodes(
    nodes: &[Quaternion],
    phi: Quaternion,
    gamma: Quaternion,
    side: Side,
) -> Result<Quaternion> {
    check_closed_ball(nodes, phi)?;
    match side {
        Side::Left => {
            let mut total = Quaternion::ONE;
            let mut point = gamma;
            for &a in nodes {
                let w = factor_eval_closed(a, point, Side::Left)?;
                if w.norm() <= tol::ZERO_EVAL_FLOOR {
                    return Ok(Quaternion::ZERO);
                }
                total *= w;
                point = w.inv()? * point * w;
            }
            Ok(total * phi)
        }
        Side::Right => {
            let mut total = phi;
            let mut point = phi * gamma * phi.inv()?;
            for &a in nodes.iter().rev() {
                let w = factor_eval_closed(a, point, Side::Right)?;
                if w.norm() <= tol::ZERO_EVAL_FLOOR {
                    return Ok(Quaternion::ZERO);
                }
                total = w * total;
                point = w * point * w.inv()?;
            }
            Ok(total)
        }
    }
}

/// Validates nodes in the closed unit ball (used only by raw evaluators).
pub fn check_closed_ball(nodes: &[Quaternion], phi: Quaternion) -> Result<()> {
    for a in nodes {
        let m = a.norm();
        if !m.is_finite() || m > 1.0 + tol::DEFAULT_TOL {
            return Err(Error::NodeOutsideBall { modulus: m });
        }
    }
    let m = phi.norm();
    if (m - 1.0).abs() > UNIMODULAR_TOL {
        return Err(Error::NotUnimodular { modulus: m });
    }
    Ok(())
}

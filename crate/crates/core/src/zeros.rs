//! Zeros inside a conjugacy class, spherical chains and spherical divisors.
//!
//! Within a nonreal class `V` a series either vanishes on all of `V`
//! (a spherical zero) or has at most one left and one right zero there,
//! both computable from the two values `f^{el}(α)`, `f^{el}(ᾱ)` at a
//! conjugate pair of representatives.

use serde::{Deserialize, Serialize};

use crate::blaschke::{product_eval, BlaschkeProduct};
use crate::error::{Error, Result};
use crate::quat::{same_class, ConjugacyClass, Quaternion};
use crate::series::{
    poly_from_factors, series_mul, Evaluate, Evaluation, Polynomial, QSeries, Side,
};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroKind {
    Spherical,
    Point,
}

/// Outcome of [`locate_in_class`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ZeroLocation {
    /// `f` vanishes on the whole class.
    Spherical,
    Point {
        left: Quaternion,
        right: Quaternion,
    },
}

fn vanishes(e: &Evaluation, tol: f64) -> bool {
    let t = match e.err_bound {
        Some(b) => tol.max(10.0 * b),
        None => tol,
    };
    e.value.norm() <= t
}

/// Left and right zero of `f` in `class`.
///
/// Uses the representative pair `α = re + i·im_norm`, `ᾱ`. If
/// `f^{el}(α) = 0 ≠ f^{el}(ᾱ)` the zeros are `α` and
/// `f^{el}(ᾱ)⁻¹·α·f^{el}(ᾱ)`; otherwise
/// `γ_ℓ = (ᾱf(α) + αf(ᾱ))(f(α) + f(ᾱ))⁻¹`,
/// `γ_r = (f(α) − f(ᾱ))⁻¹(ᾱf(α) − αf(ᾱ))`. Every candidate is checked
/// against its evaluation residual.
pub fn locate_in_class(f: &dyn Evaluate, class: ConjugacyClass, tol: f64) -> Result<ZeroLocation> {
    locate_with_representative(f, class, class.representative(), tol)
}

/// [`locate_in_class`] with an explicit representative `α ∈ class`.
pub fn locate_with_representative(
    f: &dyn Evaluate,
    class: ConjugacyClass,
    alpha: Quaternion,
    tol: f64,
) -> Result<ZeroLocation> {
    if !class.contains(alpha, tol::DEFAULT_TOL.max(tol)) {
        return Err(Error::InvalidInput(
            "representative is not in the class".into(),
        ));
    }
    let no_zero = |detail: String| Error::NoZeroInClass {
        re: class.re,
        im_norm: class.im_norm,
        detail,
    };
    if class.is_real(tol::DEFAULT_TOL) {
        let x = Quaternion::real(class.re);
        let e = f.eval_left(x)?;
        if vanishes(&e, tol) {
            return Ok(ZeroLocation::Point { left: x, right: x });
        }
        return Err(no_zero(format!("|f(x)| = {:e}", e.value.norm())));
    }
    let ac = alpha.conj();
    let fa = f.eval_left(alpha)?;
    let fb = f.eval_left(ac)?;
    let za = vanishes(&fa, tol);
    let zb = vanishes(&fb, tol);
    let (left, right) = if za && zb {
        return Ok(ZeroLocation::Spherical);
    } else if za {
        (alpha, fb.value.inv()? * alpha * fb.value)
    } else {
        let (a, b) = (fa.value, fb.value);
        let sum = a + b;
        let diff = a - b;
        if sum.norm() <= tol::NEAR_ZERO || diff.norm() <= tol::NEAR_ZERO {
            return Err(no_zero("degenerate evaluation pair".into()));
        }
        let gl = (ac * a + alpha * b) * sum.inv()?;
        let gr = diff.inv()? * (ac * a - alpha * b);
        (gl, gr)
    };
    let rl = f.eval_left(left)?;
    let rr = f.eval_right(right)?;
    if !vanishes(&rl, tol) || !vanishes(&rr, tol) {
        return Err(no_zero(format!(
            "candidate residuals {:e} (left), {:e} (right)",
            rl.value.norm(),
            rr.value.norm()
        )));
    }
    Ok(ZeroLocation::Point { left, right })
}

/// Same class throughout and no consecutive conjugate pair.
pub fn is_spherical_chain(seq: &[Quaternion], tol: f64) -> bool {
    let Some(first) = seq.first() else {
        return true;
    };
    seq.iter().all(|a| same_class(*first, *a, tol))
        && seq.windows(2).all(|w| w[1].dist(w[0].conj()) > tol)
}

/// Whether divisors are polynomials `ρ`, `𝒳` or Blaschke factors `b`, `ℬ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DivisorMode {
    Polynomial,
    Blaschke,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Divisor {
    Polynomial(Polynomial),
    Blaschke(BlaschkeProduct),
}

impl Divisor {
    pub fn series(&self, order: usize) -> QSeries {
        match self {
            Divisor::Polynomial(p) => p.to_series(order),
            Divisor::Blaschke(b) => b.series(order),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Divisor::Polynomial(p) => p.degree().unwrap_or(0),
            Divisor::Blaschke(b) => b.degree(),
        }
    }
}

/// Left and right spherical divisors of a series in one class.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalDivisors {
    pub class: ConjugacyClass,
    pub kind: ZeroKind,
    /// Spherical multiplicity `κ`.
    pub kappa: usize,
    /// Multiplicity of a real zero (zero for nonreal classes).
    pub real_multiplicity: usize,
    /// Representative used for the spherical factors.
    pub representative: Quaternion,
    pub left_chain: Vec<Quaternion>,
    /// `α̃₁, α̃₂, …` with `α̃₁` the right zero of `f`.
    pub right_chain: Vec<Quaternion>,
    pub left: Divisor,
    pub right: Divisor,
    /// `h` in `f = D_ℓ·h`.
    pub left_cofactor: QSeries,
    /// `g` in `f = g·D_r`.
    pub right_cofactor: QSeries,
    /// Largest coefficient error of `D_ℓ·h` and `g·D_r` against `f`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroReport {
    pub class: ConjugacyClass,
    pub kind: ZeroKind,
    pub kappa: usize,
    pub left_chain: Vec<Quaternion>,
    pub right_chain: Vec<Quaternion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_zero: Option<Quaternion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_zero: Option<Quaternion>,
}

impl SphericalDivisors {
    pub fn report(&self) -> ZeroReport {
        let point = self.kind == ZeroKind::Point;
        ZeroReport {
            class: self.class,
            kind: self.kind,
            kappa: self.kappa,
            left_chain: self.left_chain.clone(),
            right_chain: self.right_chain.clone(),
            left_zero: if point {
                self.left_chain.first().copied()
            } else {
                None
            },
            right_zero: if point {
                self.right_chain.first().copied()
            } else {
                None
            },
        }
    }
}

/// Options for [`spherical_divisors_with`].
#[derive(Clone, Copy, Debug)]
pub struct DivisorOptions {
    pub mode: DivisorMode,
    /// Element of the class used in place of `re + i·im_norm`.
    pub representative: Option<Quaternion>,
    /// Zero-test tolerance for extracted points.
    pub tol: f64,
    /// Per-coefficient remainder accepted when stripping spheres or real roots.
    pub strip_tol: f64,
}

impl Default for DivisorOptions {
    fn default() -> Self {
        DivisorOptions {
            mode: DivisorMode::Polynomial,
            representative: None,
            tol: tol::DEFAULT_TOL,
            strip_tol: tol::SPHERICAL_STRIP_TOL,
        }
    }
}

/// Spherical divisors of a series with polynomial (`ρ`, `𝒳`) or Blaschke
/// (`b`, `ℬ`) factors.
pub fn spherical_divisors(
    f: &QSeries,
    class: ConjugacyClass,
    mode: DivisorMode,
) -> Result<SphericalDivisors> {
    spherical_divisors_with(
        f,
        class,
        DivisorOptions {
            mode,
            ..DivisorOptions::default()
        },
    )
}

pub fn polynomial_spherical_divisors(
    p: &Polynomial,
    class: ConjugacyClass,
) -> Result<SphericalDivisors> {
    let deg = p
        .degree()
        .ok_or_else(|| Error::InvalidInput("zero polynomial".into()))?;
    spherical_divisors(&p.to_series(2 * deg + 2), class, DivisorMode::Polynomial)
}

/// Spherical divisors of a finite Blaschke product; the series is expanded
/// to an order where the neglected tail is below double precision.
pub fn blaschke_spherical_divisors(
    b: &BlaschkeProduct,
    class: ConjugacyClass,
) -> Result<SphericalDivisors> {
    blaschke_spherical_divisors_with(b, class, None)
}

pub fn blaschke_spherical_divisors_with(
    b: &BlaschkeProduct,
    class: ConjugacyClass,
    representative: Option<Quaternion>,
) -> Result<SphericalDivisors> {
    let order = adaptive_order(b.degree(), b.max_node_modulus());
    let opts = DivisorOptions {
        mode: DivisorMode::Blaschke,
        representative,
        ..DivisorOptions::default()
    };
    spherical_divisors_with(&b.series(order), class, opts)
}

/// Smallest `N` with `C(N+n, n)·r^N ≤ 1e−16`, at least `n + 16`, capped at 2048.
pub fn adaptive_order(n: usize, r: f64) -> usize {
    let floor = n + 16;
    if r <= 0.0 {
        return floor;
    }
    let ln_r = r.ln();
    let target = (1e-16f64).ln();
    let mut big_n = floor;
    while big_n < 2048 {
        let ln_binom: f64 = (1..=n).map(|i| ((big_n + i) as f64 / i as f64).ln()).sum();
        if ln_binom + big_n as f64 * ln_r <= target {
            break;
        }
        big_n += 1;
    }
    big_n
}

/// Divides `f = ρ_α·g` (or `b_α·h`) on the left; returns the quotient and remainder.
fn divide_left(f: &QSeries, alpha: Quaternion, mode: DivisorMode) -> (QSeries, Quaternion) {
    let (g, rem) = f.div_rho_left(alpha);
    match mode {
        DivisorMode::Polynomial => (g, rem),
        DivisorMode::Blaschke => {
            let order = g.order();
            let w = Polynomial::new(vec![Quaternion::ONE, -alpha.conj()]).to_series(order);
            (series_mul(&w, &g), rem)
        }
    }
}

/// Divides `f = g·ρ_β` (or `h·b_β`) on the right.
fn divide_right(f: &QSeries, beta: Quaternion, mode: DivisorMode) -> (QSeries, Quaternion) {
    let (g, rem) = f.div_rho_right(beta);
    match mode {
        DivisorMode::Polynomial => (g, rem),
        DivisorMode::Blaschke => {
            let order = g.order();
            let w = Polynomial::new(vec![Quaternion::ONE, -beta.conj()]).to_series(order);
            (series_mul(&g, &w), rem)
        }
    }
}

/// Strips `𝒳_V` (or `ℬ_V`) once if both remainders vanish.
fn strip_sphere(
    f: &QSeries,
    alpha: Quaternion,
    mode: DivisorMode,
    strip_tol: f64,
) -> Option<QSeries> {
    if f.order() < 2 {
        return None;
    }
    let (g, r1) = f.div_rho_left(alpha);
    let (h, r2) = g.div_rho_left(alpha.conj());
    if r1.norm() > strip_tol || r2.norm() > strip_tol {
        return None;
    }
    Some(match mode {
        DivisorMode::Polynomial => h,
        DivisorMode::Blaschke => {
            let q = Polynomial::new(vec![
                Quaternion::ONE,
                Quaternion::real(-2.0 * alpha.w),
                Quaternion::real(alpha.norm_sq()),
            ]);
            series_mul(&q.to_series(h.order()), &h)
        }
    })
}

/// Number of times `𝒳_V` divides `f·f♯`.
fn sharp_multiplicity(f: &QSeries, alpha: Quaternion, strip_tol: f64) -> usize {
    let mut ff = series_mul(f, &f.sharp());
    let mut m = 0;
    while let Some(next) = strip_sphere(&ff, alpha, DivisorMode::Polynomial, strip_tol) {
        ff = next;
        m += 1;
    }
    m
}

pub fn spherical_divisors_with(
    f: &QSeries,
    class: ConjugacyClass,
    opts: DivisorOptions,
) -> Result<SphericalDivisors> {
    let mode = opts.mode;
    let alpha = opts
        .representative
        .unwrap_or_else(|| class.representative());
    if !class.contains(alpha, tol::DEFAULT_TOL) {
        return Err(Error::InvalidInput(
            "representative is not in the class".into(),
        ));
    }
    if class.modulus() >= 1.0 && mode == DivisorMode::Blaschke {
        return Err(Error::NodeOutsideBall {
            modulus: class.modulus(),
        });
    }
    let no_zero = || Error::NoZeroInClass {
        re: class.re,
        im_norm: class.im_norm,
        detail: "f has no zeros in the class".into(),
    };

    if class.is_real(tol::DEFAULT_TOL) {
        let x = Quaternion::real(class.re);
        let mut h = f.clone();
        let mut pi = 0;
        while h.order() >= 1 {
            let (next, rem) = divide_left(&h, x, mode);
            if rem.norm() > opts.strip_tol {
                break;
            }
            h = next;
            pi += 1;
        }
        if pi == 0 {
            return Err(no_zero());
        }
        let chain = vec![x; pi];
        let divisor = make_divisor(mode, &[], &chain)?;
        let residual = f.max_diff(&series_mul(&divisor.series(h.order()), &h));
        return Ok(SphericalDivisors {
            class,
            kind: ZeroKind::Point,
            kappa: 0,
            real_multiplicity: pi,
            representative: x,
            left_chain: chain.clone(),
            right_chain: chain,
            left: divisor.clone(),
            right: divisor,
            left_cofactor: h.clone(),
            right_cofactor: h,
            residual,
        });
    }

    let mut core = f.clone();
    let mut kappa = 0;
    while let Some(next) = strip_sphere(&core, alpha, mode, opts.strip_tol) {
        core = next;
        kappa += 1;
    }
    let m = sharp_multiplicity(f, alpha, opts.strip_tol);
    let k = m.saturating_sub(2 * kappa);
    if kappa == 0 && k == 0 {
        return Err(no_zero());
    }

    let mut left_chain = Vec::with_capacity(k);
    let mut h = core.clone();
    for step in 0..k {
        let z = match locate_with_representative(&h, class, alpha, opts.tol) {
            Ok(ZeroLocation::Point { left, .. }) => left,
            Ok(ZeroLocation::Spherical) => {
                return Err(Error::ChainExtractionFailed(format!(
                    "unexpected spherical zero at left step {step}"
                )))
            }
            Err(e) => {
                return Err(Error::ChainExtractionFailed(format!(
                    "left step {step}: {e}"
                )))
            }
        };
        let (next, rem) = divide_left(&h, z, mode);
        if rem.norm() > opts.strip_tol {
            return Err(Error::ChainExtractionFailed(format!(
                "left remainder {:e} at step {step}",
                rem.norm()
            )));
        }
        left_chain.push(z);
        h = next;
    }

    let mut right_chain = Vec::with_capacity(k);
    let mut g = core;
    for step in 0..k {
        let z = match locate_with_representative(&g, class, alpha, opts.tol) {
            Ok(ZeroLocation::Point { right, .. }) => right,
            Ok(ZeroLocation::Spherical) => {
                return Err(Error::ChainExtractionFailed(format!(
                    "unexpected spherical zero at right step {step}"
                )))
            }
            Err(e) => {
                return Err(Error::ChainExtractionFailed(format!(
                    "right step {step}: {e}"
                )))
            }
        };
        let (next, rem) = divide_right(&g, z, mode);
        if rem.norm() > opts.strip_tol {
            return Err(Error::ChainExtractionFailed(format!(
                "right remainder {:e} at step {step}",
                rem.norm()
            )));
        }
        right_chain.push(z);
        g = next;
    }

    if k > 1 && (!is_spherical_chain(&left_chain, 1e-8) || !is_spherical_chain(&right_chain, 1e-8))
    {
        return Err(Error::ChainExtractionFailed(
            "extracted points do not form a spherical chain".into(),
        ));
    }

    let sphere: Vec<Quaternion> = (0..kappa).flat_map(|_| [alpha, alpha.conj()]).collect();
    let left = make_divisor(mode, &sphere, &left_chain)?;
    let reversed: Vec<Quaternion> = right_chain.iter().rev().copied().collect();
    let right = make_divisor(mode, &reversed, &sphere)?;
    let rl = f.max_diff(&series_mul(&left.series(h.order()), &h));
    let rr = f.max_diff(&series_mul(&g, &right.series(g.order())));
    Ok(SphericalDivisors {
        class,
        kind: if kappa > 0 {
            ZeroKind::Spherical
        } else {
            ZeroKind::Point
        },
        kappa,
        real_multiplicity: 0,
        representative: alpha,
        left_chain,
        right_chain,
        left,
        right,
        left_cofactor: h,
        right_cofactor: g,
        residual: rl.max(rr),
    })
}

fn make_divisor(mode: DivisorMode, first: &[Quaternion], second: &[Quaternion]) -> Result<Divisor> {
    let nodes: Vec<Quaternion> = first.iter().chain(second).copied().collect();
    Ok(match mode {
        DivisorMode::Polynomial => Divisor::Polynomial(poly_from_factors(&nodes)),
        DivisorMode::Blaschke => Divisor::Blaschke(BlaschkeProduct::from_nodes(nodes)?),
    })
}

/// `(z − α)²(z − β₁)(z − β₂)`, the least right common multiple of `ρ_α²`
/// and `ρ_β²`.
pub fn lrcm_double(alpha: Quaternion, beta: Quaternion) -> Result<Polynomial> {
    for q in [alpha, beta] {
        if q.is_real(tol::DEFAULT_TOL) {
            return Err(Error::RealInput {
                im_norm: q.im_norm(),
            });
        }
    }
    if same_class(alpha, beta, tol::DEFAULT_TOL) {
        return Err(Error::SimilarInputs);
    }
    let (b1, b2) = lrcm_nodes(alpha, beta)?;
    Ok(poly_from_factors(&[alpha, alpha, b1, b2]))
}

/// The nodes `β₁`, `β₂` of [`lrcm_double`].
pub fn lrcm_nodes(alpha: Quaternion, beta: Quaternion) -> Result<(Quaternion, Quaternion)> {
    let bb = beta * beta;
    let d1 = bb - beta * alpha * 2.0 + alpha * alpha;
    let b1 = d1.inv()? * beta * d1;
    let d2 = bb * 3.0 - beta * alpha * 4.0 + alpha * alpha + (alpha - beta) * b1 * 2.0;
    let b2 = d2.inv()? * beta * d2;
    Ok((b1, b2))
}

/// `b_{β₁}⋯b_{β_m}` with left zeros at the given pairwise non-similar points.
///
/// `β₁ = α₁` and `β_k = w⁻¹α_k w` with `w = (b_{β₁}⋯b_{β_{k−1}})^{el}(α_k)`.
pub fn prescribed_left_zeros(points: &[Quaternion]) -> Result<BlaschkeProduct> {
    for (i, a) in points.iter().enumerate() {
        for (j, b) in points.iter().enumerate().skip(i + 1) {
            if same_class(*a, *b, tol::DEFAULT_TOL) {
                return Err(Error::SimilarPointsUnsupported(i, j));
            }
        }
    }
    let mut nodes: Vec<Quaternion> = Vec::with_capacity(points.len());
    for (k, &a) in points.iter().enumerate() {
        if k == 0 {
            BlaschkeProduct::from_nodes(vec![a])?;
            nodes.push(a);
            continue;
        }
        let partial = BlaschkeProduct::from_nodes(nodes.clone())?;
        let w = product_eval(&partial, a, Side::Left)?;
        if w.norm() <= tol::ZERO_EVAL_FLOOR {
            return Err(Error::SimilarPointsUnsupported(0, k));
        }
        nodes.push(w.inv()? * a * w);
    }
    BlaschkeProduct::from_nodes(nodes)
}

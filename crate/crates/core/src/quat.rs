//! Quaternion scalars, conjugacy classes and the centralizer splitting.
//!
//! A quaternion `w + i·x + j·y + k·z` is stored by its four real
//! components. The conjugacy (similarity) class of `α` is the 2-sphere of
//! quaternions sharing `Re α` and `|α|`; the centralizer `C_α` of a nonreal
//! `α` is the real plane spanned by `1` and `α`, and its Euclidean
//! complement `C_α^⊥` is the set of intertwiners `ε` with `αε = εᾱ`.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use crate::tol::DEFAULT_TOL;
use crate::tol::NEAR_ZERO as INVERSE_FLOOR;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Quaternion::new(w, 0.0, 0.0, 0.0)
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Quaternion::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    #[inline]
    pub fn re(self) -> f64 {
        self.w
    }

    /// Imaginary part `i·x + j·y + k·z`.
    #[inline]
    pub fn im(self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    #[inline]
    pub fn im_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    #[inline]
    pub fn norm(self) -> f64 {
        // hypot-style scaling is unnecessary at the magnitudes used here
        self.norm_sq().sqrt()
    }

    #[inline]
    pub fn conj(self) -> Quaternion {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    /// Euclidean inner product on `ℍ ≅ ℝ⁴`.
    #[inline]
    pub fn dot(self, other: Quaternion) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn scale(self, s: f64) -> Quaternion {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    pub fn inv(self) -> Result<Quaternion> {
        let n2 = self.norm_sq();
        let n = n2.sqrt();
        if n <= INVERSE_FLOOR || !n.is_finite() {
            return Err(Error::NearZeroInverse { modulus: n });
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    pub fn is_real(self, tol: f64) -> bool {
        self.im_norm() <= tol
    }

    pub fn is_zero(self, tol: f64) -> bool {
        self.norm() <= tol
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// `h⁻¹·self·h`, an element of the same conjugacy class.
    pub fn conjugate_by(self, h: Quaternion) -> Result<Quaternion> {
        Ok(h.inv()? * self * h)
    }

    /// Unit vector in the direction of the imaginary part.
    pub fn im_unit(self) -> Result<Quaternion> {
        let n = self.im_norm();
        if n <= INVERSE_FLOOR {
            return Err(Error::RealInput { im_norm: n });
        }
        Ok(self.im().scale(1.0 / n))
    }

    pub fn powi(self, n: usize) -> Quaternion {
        let mut acc = Quaternion::ONE;
        for _ in 0..n {
            acc *= self;
        }
        acc
    }

    pub fn class(self) -> ConjugacyClass {
        ConjugacyClass::of(self)
    }

    /// True when `self` commutes with `alpha` to tolerance.
    pub fn commutes_with(self, alpha: Quaternion, tol: f64) -> bool {
        (self * alpha - alpha * self).norm() <= tol
    }

    pub fn dist(self, other: Quaternion) -> f64 {
        (self - other).norm()
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, o: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, s: f64) -> Quaternion {
        self.scale(s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q.scale(self)
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn div(self, s: f64) -> Quaternion {
        self.scale(1.0 / s)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, o: Quaternion) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    #[inline]
    fn sub_assign(&mut self, o: Quaternion) {
        *self = *self - o;
    }
}

impl MulAssign for Quaternion {
    #[inline]
    fn mul_assign(&mut self, o: Quaternion) {
        *self = *self * o;
    }
}

impl Sum for Quaternion {
    fn sum<I: Iterator<Item = Quaternion>>(iter: I) -> Quaternion {
        iter.fold(Quaternion::ZERO, |a, b| a + b)
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Quaternion::real(w)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.w, self.x, self.y, self.z)
    }
}

// JSON form is the plain array [w, x, y, z].
impl Serialize for Quaternion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Quaternion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let a = <[f64; 4]>::deserialize(d)?;
        Ok(Quaternion::from_array(a))
    }
}

/// The similarity class `[α] = {β : Re β = Re α, |Im β| = |Im α|}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyClass {
    pub re: f64,
    pub im_norm: f64,
}

impl ConjugacyClass {
    pub fn new(re: f64, im_norm: f64) -> Self {
        ConjugacyClass {
            re,
            im_norm: im_norm.abs(),
        }
    }

    pub fn of(q: Quaternion) -> Self {
        ConjugacyClass::new(q.w, q.im_norm())
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.im_norm <= tol
    }

    /// Common modulus of every element of the class.
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im_norm)
    }

    /// The complex representative `re + i·im_norm` (upper half choice).
    pub fn representative(&self) -> Quaternion {
        Quaternion::new(self.re, self.im_norm, 0.0, 0.0)
    }

    pub fn contains(&self, q: Quaternion, tol: f64) -> bool {
        (q.w - self.re).abs() <= tol && (q.im_norm() - self.im_norm).abs() <= tol
    }

    pub fn approx_eq(&self, other: &ConjugacyClass, tol: f64) -> bool {
        (self.re - other.re).abs() <= tol && (self.im_norm - other.im_norm).abs() <= tol
    }
}

/// `true` iff `|Re α − Re β| ≤ tol` and `||α| − |β|| ≤ tol`.
pub fn same_class(alpha: Quaternion, beta: Quaternion, tol: f64) -> bool {
    (alpha.w - beta.w).abs() <= tol && (alpha.norm() - beta.norm()).abs() <= tol
}

/// Orthonormal basis `(ε₁, ε₂)` of `C_α^⊥`.
///
/// Gram–Schmidt of `{j, k}` against `{1, Im α/|Im α|}`; when `j` lies in
/// `C_α` the candidates are `{i, k}` instead, and `i` is the last resort
/// when the second candidate collapses.
pub fn perp_basis(alpha: Quaternion) -> Result<(Quaternion, Quaternion)> {
    perp_basis_tol(alpha, DEFAULT_TOL)
}

pub fn perp_basis_tol(alpha: Quaternion, tol: f64) -> Result<(Quaternion, Quaternion)> {
    let im_norm = alpha.im_norm();
    if im_norm <= tol {
        return Err(Error::RealInput { im_norm });
    }
    let u = alpha.im().scale(1.0 / im_norm);
    // residual norms below this are treated as "candidate lies in C_α"
    const COLLAPSE: f64 = 1e-3;
    let residual = |c: Quaternion, basis: &[Quaternion]| -> Quaternion {
        let mut r = c - u.scale(c.dot(u));
        r.w = 0.0;
        for b in basis {
            r = r - b.scale(r.dot(*b));
        }
        r
    };
    let j_in_centralizer = residual(Quaternion::J, &[]).norm() < COLLAPSE;
    let candidates = if j_in_centralizer {
        [Quaternion::I, Quaternion::K, Quaternion::J]
    } else {
        [Quaternion::J, Quaternion::K, Quaternion::I]
    };
    let mut basis: Vec<Quaternion> = Vec::with_capacity(2);
    for c in candidates {
        let r = residual(c, &basis);
        let n = r.norm();
        if n >= COLLAPSE {
            basis.push(r.scale(1.0 / n));
            if basis.len() == 2 {
                break;
            }
        }
    }
    debug_assert_eq!(basis.len(), 2);
    Ok((basis[0], basis[1]))
}

/// Intertwining residual `|αε − εᾱ|`.
pub fn intertwining_residual(alpha: Quaternion, eps: Quaternion) -> f64 {
    (alpha * eps - eps * alpha.conj()).norm()
}

/// Orthogonal projection of `beta` onto the centralizer plane `C_α`.
pub(crate) fn project_centralizer(beta: Quaternion, alpha_unit_im: Quaternion) -> Quaternion {
    Quaternion::real(beta.w) + alpha_unit_im.scale(beta.dot(alpha_unit_im))
}

fn check_epsilon(alpha: Quaternion, eps: Quaternion, tol: f64) -> Result<()> {
    let residual = intertwining_residual(alpha, eps).max((eps.norm() - 1.0).abs());
    if residual > tol {
        return Err(Error::BadEpsilon { residual });
    }
    Ok(())
}

/// Splits `β = β₁ + β₂·ε` with `β₁, β₂ ∈ C_α`.
pub fn split_quaternion(
    beta: Quaternion,
    alpha: Quaternion,
    eps: Quaternion,
) -> Result<(Quaternion, Quaternion)> {
    split_quaternion_tol(beta, alpha, eps, DEFAULT_TOL)
}

pub fn split_quaternion_tol(
    beta: Quaternion,
    alpha: Quaternion,
    eps: Quaternion,
    tol: f64,
) -> Result<(Quaternion, Quaternion)> {
    let im_norm = alpha.im_norm();
    if im_norm <= tol {
        return Err(Error::RealInput { im_norm });
    }
    check_epsilon(alpha, eps, tol)?;
    let u = alpha.im().scale(1.0 / im_norm);
    Ok(split_unchecked(beta, u, eps))
}

/// Splitting with a precomputed unit imaginary direction and a validated ε.
pub(crate) fn split_unchecked(
    beta: Quaternion,
    unit_im: Quaternion,
    eps: Quaternion,
) -> (Quaternion, Quaternion) {
    let b1 = project_centralizer(beta, unit_im);
    let rest = beta - b1;
    // ε is unit, so ε⁻¹ = ε̄; project again to discard rounding outside C_α
    let b2 = project_centralizer(rest * eps.conj(), unit_im);
    (b1, b2)
}

pub(crate) fn validate_split_inputs(
    alpha: Quaternion,
    eps: Quaternion,
    tol: f64,
) -> Result<Quaternion> {
    let im_norm = alpha.im_norm();
    if im_norm <= tol {
        return Err(Error::RealInput { im_norm });
    }
    check_epsilon(alpha, eps, tol)?;
    Ok(alpha.im().scale(1.0 / im_norm))
}

//! Unitary state-space realizations `f(z) = D + zC(I − zA)⁻¹B`.

use serde::{Deserialize, Serialize};

use crate::blaschke::{product_series, BlaschkeProduct};
use crate::error::{Error, Result};
use crate::qmat::{solve_real_linear, QMatrix};
use crate::quat::Quaternion;
use crate::schur::rank_profile;
use crate::series::{kappa_series, series_mul, Evaluate, Evaluation, QSeries, Side};
use crate::tol;

/// `[[A, B], [C, D]]` with `A` n×n, `B` n×1, `C` 1×n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRealization")]
pub struct Realization {
    #[serde(rename = "A")]
    a: QMatrix,
    #[serde(rename = "B")]
    b: QMatrix,
    #[serde(rename = "C")]
    c: QMatrix,
    #[serde(rename = "D")]
    d: Quaternion,
}

#[derive(Deserialize)]
struct RawRealization {
    #[serde(rename = "A")]
    a: QMatrix,
    #[serde(rename = "B")]
    b: QMatrix,
    #[serde(rename = "C")]
    c: QMatrix,
    #[serde(rename = "D")]
    d: Quaternion,
}

impl TryFrom<RawRealization> for Realization {
    type Error = Error;
    fn try_from(r: RawRealization) -> Result<Self> {
        Realization::new(r.a, r.b, r.c, r.d)
    }
}

impl Realization {
    /// Checks shapes only; see [`Realization::validate`] for unitarity and stability.
    pub fn new(a: QMatrix, b: QMatrix, c: QMatrix, d: Quaternion) -> Result<Self> {
        let n = a.rows();
        if !a.is_square() || b.shape() != (n, 1) || c.shape() != (1, n) {
            return Err(Error::DimensionMismatch(format!(
                "realization blocks {:?}, {:?}, {:?}",
                a.shape(),
                b.shape(),
                c.shape()
            )));
        }
        Ok(Realization { a, b, c, d })
    }

    pub fn constant(d: Quaternion) -> Self {
        Realization {
            a: QMatrix::zeros(0, 0),
            b: QMatrix::zeros(0, 1),
            c: QMatrix::zeros(1, 0),
            d,
        }
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &QMatrix {
        &self.a
    }

    pub fn b(&self) -> &QMatrix {
        &self.b
    }

    pub fn c(&self) -> &QMatrix {
        &self.c
    }

    pub fn d(&self) -> Quaternion {
        self.d
    }

    /// The (n+1)×(n+1) block matrix.
    pub fn block(&self) -> QMatrix {
        let n = self.dim();
        let mut m = QMatrix::zeros(n + 1, n + 1);
        m.set_block(0, 0, &self.a);
        m.set_block(0, n, &self.b);
        m.set_block(n, 0, &self.c);
        m.set(n, n, self.d);
        m
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.block().unitarity_defect()
    }

    pub fn is_stable(&self) -> bool {
        self.dim() == 0 || self.a.is_stable(tol::STABILITY_MARGIN)
    }

    /// Errors unless the block matrix is unitary to `tol` and `A` is stable.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let defect = self.unitarity_defect();
        if defect > tol {
            return Err(Error::Numerical(format!(
                "realization not unitary: defect {defect:e}"
            )));
        }
        if !self.is_stable() {
            return Err(Error::NotStable {
                radius: self.a.spectral_radius()?,
            });
        }
        Ok(())
    }

    pub fn series(&self, order: usize) -> QSeries {
        realization_to_series(self, order)
    }

    /// `Υ(γ) = Σ γᵏ C Aᵏ`, solved from `Υ − γΥA = C`.
    pub fn upsilon(&self, gamma: Quaternion) -> Result<QMatrix> {
        let n = self.dim();
        let a = &self.a;
        let op = |x: &[Quaternion]| -> Vec<Quaternion> {
            (0..n)
                .map(|j| {
                    let xa: Quaternion = (0..n).map(|k| x[k] * a.get(k, j)).sum();
                    x[j] - gamma * xa
                })
                .collect()
        };
        let sol = solve_real_linear(n, op, &self.c.row_vec(0))?;
        Ok(QMatrix::row(&sol))
    }

    /// `Ψ(γ) = Σ Aᵏ B γᵏ`, solved from `Ψ − AΨγ = B`.
    fn psi(&self, gamma: Quaternion) -> Result<QMatrix> {
        let n = self.dim();
        let a = &self.a;
        let op = |x: &[Quaternion]| -> Vec<Quaternion> {
            (0..n)
                .map(|i| {
                    let ax: Quaternion = (0..n).map(|k| a.get(i, k) * x[k]).sum();
                    x[i] - ax * gamma
                })
                .collect()
        };
        let sol = solve_real_linear(n, op, &self.b.col_vec(0))?;
        Ok(QMatrix::column(&sol))
    }

    /// Closed-form evaluation: `D + γΥ(γ)B` on the left, `D + CΨ(γ)γ` on the right.
    pub fn eval(&self, gamma: Quaternion, side: Side) -> Result<Quaternion> {
        if self.dim() == 0 {
            return Ok(self.d);
        }
        match side {
            Side::Left => {
                let ub = &self.upsilon(gamma)? * &self.b;
                Ok(self.d + gamma * ub.get(0, 0))
            }
            Side::Right => {
                let cp = &self.c * &self.psi(gamma)?;
                Ok(self.d + cp.get(0, 0) * gamma)
            }
        }
    }

    /// `V·A·V*`, `V·B`, `C·V*`, `D` for a unitary `V`.
    pub fn transform(&self, v: &QMatrix) -> Result<Realization> {
        if v.shape() != self.a.shape() {
            return Err(Error::DimensionMismatch(
                "transform needs an n×n matrix".into(),
            ));
        }
        let vs = v.adjoint();
        Realization::new(&(v * &self.a) * &vs, v * &self.b, &self.c * &vs, self.d)
    }
}

impl Evaluate for Realization {
    fn evaluate(&self, gamma: Quaternion, side: Side) -> Result<Evaluation> {
        Ok(Evaluation::exact(self.eval(gamma, side)?))
    }
}

/// Realization of `b_{α₁}⋯b_{αₙ}φ`.
///
/// `A₁ = ᾱ₁`, `B₁ = C₁ = s₁`, `D₁ = −α₁` with `s_k = √(1 − |α_k|²)`, then
/// `A_{k+1} = [[A_k, s·B_k], [0, ᾱ_{k+1}]]`, `B_{k+1} = [−B_kα_{k+1}; s]`,
/// `C_{k+1} = [C_k, s·D_k]`, `D_{k+1} = −D_kα_{k+1}`; finally `B` and `D`
/// are multiplied by `φ` on the right.
pub fn build_realization(bp: &BlaschkeProduct) -> Realization {
    let nodes = bp.nodes();
    let phi = bp.phi();
    let n = nodes.len();
    if n == 0 {
        return Realization::constant(phi);
    }
    let mut a = QMatrix::zeros(n, n);
    let mut b = vec![Quaternion::ZERO; n];
    let mut c = vec![Quaternion::ZERO; n];
    let mut d = Quaternion::ONE;
    for (k, &alpha) in nodes.iter().enumerate() {
        let s = (1.0 - alpha.norm_sq()).max(0.0).sqrt();
        if k == 0 {
            a.set(0, 0, alpha.conj());
            b[0] = Quaternion::real(s);
            c[0] = Quaternion::real(s);
            d = -alpha;
            continue;
        }
        for (i, bi) in b.iter().enumerate().take(k) {
            a.set(i, k, *bi * s);
        }
        a.set(k, k, alpha.conj());
        for bi in b.iter_mut().take(k) {
            *bi = -(*bi * alpha);
        }
        b[k] = Quaternion::real(s);
        c[k] = d * s;
        d = -(d * alpha);
    }
    let b: Vec<Quaternion> = b.into_iter().map(|x| x * phi).collect();
    Realization {
        a,
        b: QMatrix::column(&b),
        c: QMatrix::row(&c),
        d: d * phi,
    }
}

/// `f₀ = D`, `f_j = C A^{j−1} B`; the tail ratio is the spectral radius of `A`.
pub fn realization_to_series(r: &Realization, order: usize) -> QSeries {
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(r.d);
    let n = r.dim();
    if n == 0 {
        coeffs.resize(order + 1, Quaternion::ZERO);
        return QSeries::with_tail(coeffs, Some(0.0)).expect("zero tail ratio");
    }
    let mut x = r.b.clone();
    for _ in 1..=order {
        coeffs.push((&r.c * &x).get(0, 0));
        x = &r.a * &x;
    }
    let tail = r.a.spectral_radius().ok().filter(|&rho| rho < 1.0);
    QSeries::with_tail(coeffs, tail).unwrap_or_else(|_| QSeries::new(Vec::new()))
}

/// Degree of a finite Blaschke product from its defect rank profile.
///
/// Uses `P_k` for `k ≤ K = order/2`; the degree is the value at which
/// `rank P_k` has stopped growing.
pub fn degree_of(f: &QSeries) -> Result<usize> {
    let big_k = f.order() / 2;
    if big_k < 2 {
        return Err(Error::NotSaturated(format!(
            "order {} too small for a rank profile",
            f.order()
        )));
    }
    let profile = rank_profile(&f.coeffs()[..big_k]);
    let n = profile[big_k - 1];
    if n >= big_k || profile[big_k - 2] != n {
        return Err(Error::NotSaturated(format!(
            "rank profile still climbing: {profile:?}"
        )));
    }
    Ok(n)
}

/// Same state dimension and coefficients agreeing to 1e−10 through `order`.
pub fn equivalent(r1: &Realization, r2: &Realization, order: usize) -> bool {
    r1.dim() == r2.dim() && r1.series(order).max_diff(&r2.series(order)) <= 1e-10
}

/// `√(1−|α₁|²)k_{α₁}` and `√(1−|α_j|²)b_{α₁}⋯b_{α_{j−1}}k_{α_j}`.
pub fn takenaka_basis(bp: &BlaschkeProduct, order: usize) -> Result<Vec<QSeries>> {
    let nodes = bp.nodes();
    let mut out = Vec::with_capacity(nodes.len());
    for (j, &alpha) in nodes.iter().enumerate() {
        let s = (1.0 - alpha.norm_sq()).sqrt();
        let k = kappa_series(alpha, order)?.scale(s);
        let prefix = BlaschkeProduct::from_nodes(nodes[..j].to_vec())?;
        out.push(series_mul(&product_series(&prefix, order), &k));
    }
    Ok(out)
}

/// Gram matrix `G_{ij} = ⟨e_j, e_i⟩` of a family of series.
pub fn gram(family: &[QSeries]) -> QMatrix {
    QMatrix::from_fn(family.len(), family.len(), |i, j| {
        family[j].inner(&family[i])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::factor_series;
    use proptest::prelude::*;

    const I: Quaternion = Quaternion::I;
    const J: Quaternion = Quaternion::J;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    #[test]
    fn scalar_factor() {
        let b = BlaschkeProduct::from_nodes(vec![Quaternion::real(0.5)]).unwrap();
        let r = build_realization(&b);
        let h = 3f64.sqrt() / 2.0;
        let expect = QMatrix::from_rows(&[
            vec![Quaternion::real(0.5), Quaternion::real(h)],
            vec![Quaternion::real(h), Quaternion::real(-0.5)],
        ])
        .unwrap();
        assert!(r.block().max_diff(&expect) < 1e-15);
        let s = r.series(4);
        assert!(s.coeff(1).dist(Quaternion::real(0.75)) < 1e-15);
        assert!(s.coeff(2).dist(Quaternion::real(0.375)) < 1e-15);
    }

    #[test]
    fn constant_product() {
        let phi = q(0.0, 0.6, 0.8, 0.0);
        let r = build_realization(&BlaschkeProduct::constant(phi).unwrap());
        assert_eq!(r.dim(), 0);
        assert_eq!(r.d(), phi);
        let s = r.series(5);
        assert!(s.max_diff(&QSeries::constant(phi, 5)) < 1e-15);
        assert!(r.unitarity_defect() < 1e-15);
        assert_eq!(degree_of(&s).unwrap(), 0);
    }

    #[test]
    fn pair_ij() {
        let b = BlaschkeProduct::from_nodes(vec![I * 0.5, J * 0.5]).unwrap();
        let r = build_realization(&b);
        assert!(r.a().get(0, 0).dist(-I * 0.5) < 1e-15);
        assert!(r.a().get(1, 1).dist(-J * 0.5) < 1e-15);
        assert!(r.a().get(1, 0).is_zero(0.0));
        assert!(r.unitarity_defect() < 1e-14);
        assert!(r.series(40).max_diff(&b.series(40)) < 1e-14);
        assert_eq!(degree_of(&b.series(64)).unwrap(), 2);
    }

    #[test]
    fn degree_examples() {
        assert_eq!(
            degree_of(&QSeries::monomial(Quaternion::ONE, 1, 32)).unwrap(),
            1
        );
        let f = series_mul(
            &factor_series(Quaternion::real(0.5), 64).unwrap(),
            &factor_series(I * 0.5, 64).unwrap(),
        );
        assert_eq!(degree_of(&f).unwrap(), 2);
        let k = kappa_series(Quaternion::real(0.5), 64).unwrap().scale(0.5);
        assert!(matches!(degree_of(&k), Err(Error::NotSaturated(_))));
    }

    #[test]
    fn equivalence() {
        let b = BlaschkeProduct::from_nodes(vec![q(0.1, 0.3, 0.0, -0.2), q(-0.2, 0.0, 0.4, 0.1)])
            .unwrap();
        let r = build_realization(&b);
        assert!(equivalent(&r, &r, 32));
        let c = 0.6f64;
        let s = 0.8f64;
        let v = QMatrix::from_rows(&[
            vec![Quaternion::real(c), J * s],
            vec![J * s, Quaternion::real(c)],
        ])
        .unwrap();
        assert!(v.is_unitary(1e-14));
        let rv = r.transform(&v).unwrap();
        assert!(rv.a().max_diff(r.a()) > 1e-3);
        assert!(equivalent(&r, &rv, 32));
        let r1 =
            build_realization(&BlaschkeProduct::from_nodes(vec![Quaternion::real(0.5)]).unwrap());
        let r2 = build_realization(&BlaschkeProduct::from_nodes(vec![I * 0.5]).unwrap());
        assert!(!equivalent(&r1, &r2, 16));
    }

    #[test]
    fn takenaka_examples() {
        let b = BlaschkeProduct::from_nodes(vec![Quaternion::real(0.5)]).unwrap();
        let t = takenaka_basis(&b, 128).unwrap();
        assert!((t[0].h2_norm_sq() - 1.0).abs() < 1e-14);
        assert!(
            takenaka_basis(&BlaschkeProduct::constant(Quaternion::ONE).unwrap(), 8)
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn closed_form_eval() {
        let b = BlaschkeProduct::from_nodes(vec![I * 0.5, J * 0.5]).unwrap();
        let r = build_realization(&b);
        for g in [q(0.1, 0.2, 0.3, 0.4), J, q(0.0, 0.6, 0.0, 0.8)] {
            for side in [Side::Left, Side::Right] {
                assert!(r.eval(g, side).unwrap().dist(b.eval(g, side).unwrap()) < 1e-12);
            }
        }
    }

    fn arb_node() -> impl Strategy<Value = Quaternion> {
        (
            -1.0..1.0f64,
            -1.0..1.0f64,
            -1.0..1.0f64,
            -1.0..1.0f64,
            0.0..0.8f64,
        )
            .prop_map(|(w, x, y, z, r)| {
                let v = q(w, x, y, z);
                let n = v.norm().max(1e-3);
                v * (r / n)
            })
    }

    fn arb_unit() -> impl Strategy<Value = Quaternion> {
        (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
            .prop_filter("nonzero", |(w, x, y, z)| {
                w * w + x * x + y * y + z * z > 1e-2
            })
            .prop_map(|(w, x, y, z)| q(w, x, y, z) * (1.0 / (w * w + x * x + y * y + z * z).sqrt()))
    }

    fn arb_product(max: usize) -> impl Strategy<Value = BlaschkeProduct> {
        (prop::collection::vec(arb_node(), 0..=max), arb_unit())
            .prop_map(|(n, phi)| BlaschkeProduct::new(n, phi).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn realization_invariants(b in arb_product(6)) {
            let r = build_realization(&b);
            prop_assert!(r.unitarity_defect() <= 1e-11);
            prop_assert!(r.is_stable());
            prop_assert!(r.series(64).max_diff(&b.series(64)) <= 1e-11);
            for k in 0..r.dim() {
                prop_assert!(r.a().get(k, k).dist(b.nodes()[k].conj()) < 1e-15);
            }
            let pair = crate::qmat::controllability_matrix(&r.a().adjoint(), &r.c().adjoint()).unwrap();
            prop_assert_eq!(pair.rank(), r.dim());
        }

        #[test]
        fn degree_matches_dimension(b in arb_product(6)) {
            let r = build_realization(&b);
            prop_assert_eq!(degree_of(&r.series(64)).unwrap(), r.dim());
        }

        #[test]
        fn upsilon_identity(b in arb_product(4), g in arb_node()) {
            let r = build_realization(&b);
            let f = r.eval(g, Side::Left).unwrap();
            let u = r.upsilon(g).unwrap();
            let uu = (&u * &u.adjoint()).get(0, 0).w;
            let lhs = 1.0 - f.norm_sq();
            prop_assert!((lhs - (1.0 - g.norm_sq()) * uu).abs() <= 1e-10);
        }

        #[test]
        fn takenaka_orthonormal(b in arb_product(4)) {
            let t = takenaka_basis(&b, 128).unwrap();
            let g = gram(&t);
            prop_assert!(g.max_diff(&QMatrix::identity(t.len())) <= 1e-9);
            let f = b.series(128);
            let n = b.degree();
            for e in &t {
                for m in 0..=(128 - n).min(40) {
                    prop_assert!(e.inner(&f.shift_up(m)).norm() <= 1e-8);
                }
            }
        }
    }
}

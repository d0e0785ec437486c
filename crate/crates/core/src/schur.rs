//! Toeplitz sections, contractivity tests, defect rank profiles and
//! recovery of a Blaschke product from its first coefficients.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::QMatrix;
use crate::quat::Quaternion;
use crate::realize::Realization;
use crate::series::QSeries;
use crate::tol;

/// Lower-triangular Toeplitz section `T` and defect `P = I − TT*`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToeplitzData {
    pub prefix: Vec<Quaternion>,
    #[serde(rename = "T")]
    pub t: QMatrix,
    #[serde(rename = "P")]
    pub p: QMatrix,
}

impl ToeplitzData {
    pub fn new(prefix: &[Quaternion]) -> Self {
        let t = toeplitz(prefix, prefix.len());
        let p = defect(&t);
        ToeplitzData {
            prefix: prefix.to_vec(),
            t,
            p,
        }
    }
}

/// `T_{jk} = f_{j−k}` for `j ≥ k`, using the first `k` entries of `prefix`.
pub fn toeplitz(prefix: &[Quaternion], k: usize) -> QMatrix {
    QMatrix::from_fn(k, k, |j, l| {
        if j >= l {
            prefix[j - l]
        } else {
            Quaternion::ZERO
        }
    })
}

/// `I − T·T*`, symmetrized.
pub fn defect(t: &QMatrix) -> QMatrix {
    (&QMatrix::identity(t.rows()) - &(t * &t.adjoint())).hermitian_part()
}

/// Whether `I − TT*` has no eigenvalue below `−tol`.
pub fn is_schur_prefix(prefix: &[Quaternion], tol: f64) -> bool {
    if prefix.is_empty() {
        return true;
    }
    let p = defect(&toeplitz(prefix, prefix.len()));
    p.min_eigenvalue().map(|m| m >= -tol).unwrap_or(false)
}

/// Errors with `NotSchur` when the prefix is not contractive.
pub fn check_schur_prefix(prefix: &[Quaternion], tol: f64) -> Result<()> {
    if prefix.is_empty() {
        return Ok(());
    }
    let min_eig = defect(&toeplitz(prefix, prefix.len())).min_eigenvalue()?;
    if min_eig < -tol {
        return Err(Error::NotSchur { min_eig });
    }
    Ok(())
}

/// Rank of a defect matrix; singular values below `RANK_RTOL·max(σ_max, 1)` count as zero.
pub fn defect_rank(p: &QMatrix) -> usize {
    let sv = p.singular_values();
    let scale = sv.first().copied().unwrap_or(0.0).max(1.0);
    sv.iter()
        .filter(|&&s| s > tol::RANK_RTOL * scale)
        .count()
        .div_ceil(2)
}

/// `rank P_k` for `k = 1, …, m`.
pub fn rank_profile(prefix: &[Quaternion]) -> Vec<usize> {
    (1..=prefix.len())
        .map(|k| defect_rank(&defect(&toeplitz(prefix, k))))
        .collect()
}

/// Output of [`recover`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Recovery {
    /// `C_g*`, the state matrix of the resolvent form.
    pub state: QMatrix,
    /// Companion matrix `C_g`.
    pub companion: QMatrix,
    #[serde(rename = "P")]
    pub p: QMatrix,
    #[serde(rename = "Y")]
    pub y: QMatrix,
    pub f0: Quaternion,
    /// Unitary realization `(P^{−1/2}C_g*P^{1/2}, P^{−1/2}Y, e₁*P^{1/2}, f₀)`.
    pub realization: Realization,
}

impl Recovery {
    pub fn degree(&self) -> usize {
        self.p.rows()
    }

    /// `G(z) = f₀ + Σ_j z^{j+1} e₁* (C_g*)^j Y`.
    pub fn series(&self, order: usize) -> QSeries {
        let n = self.degree();
        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(self.f0);
        if n == 0 {
            coeffs.resize(order + 1, Quaternion::ZERO);
            return QSeries::new(coeffs);
        }
        let mut x = self.y.clone();
        for _ in 1..=order {
            coeffs.push(x.get(0, 0));
            x = &self.state * &x;
        }
        let tail = self.state.spectral_radius().ok().filter(|&r| r < 1.0);
        QSeries::with_tail(coeffs, tail).unwrap_or_else(|_| QSeries::new(Vec::new()))
    }

    /// Residuals of `C_g*PC_g + YY* = P`, `C_g*Pe₁ + Yf̄₀ = 0`, `e₁*Pe₁ + |f₀|² = 1`.
    pub fn identities(&self) -> [f64; 3] {
        let n = self.degree();
        if n == 0 {
            return [0.0, 0.0, (self.f0.norm_sq() - 1.0).abs()];
        }
        let cs = &self.state;
        let c = &self.companion;
        let p = &self.p;
        let y = &self.y;
        let r1 = (&(&(cs * p) * c) + &(y * &y.adjoint())).max_diff(p);
        let e1 = QMatrix::unit(n, 0);
        let r2 = (&(&(cs * p) * &e1) + &y.rmul(self.f0.conj())).max_abs();
        let r3 = (p.get(0, 0).w + self.f0.norm_sq() - 1.0).abs();
        [r1, r2, r3]
    }
}

/// The unique Schur-class series with first coefficients `f₀, …, fₙ` when
/// `P_{n+1} ⪰ 0` and `rank P_{n+1} = rank P_n = n`.
pub fn recover(prefix: &[Quaternion]) -> Result<Recovery> {
    if prefix.is_empty() {
        return Err(Error::InvalidInput("empty prefix".into()));
    }
    let n = prefix.len() - 1;
    let f0 = prefix[0];
    let t_next = toeplitz(prefix, n + 1);
    let p_next = defect(&t_next);
    let min_eig = p_next.min_eigenvalue()?;
    if min_eig < -tol::PSD_TOL {
        return Err(Error::NotPsd { min_eig });
    }
    let rank_next = defect_rank(&p_next);
    let p = p_next.submatrix(0, 0, n, n);
    let rank_n = defect_rank(&p);
    if rank_next != n || rank_n != n {
        return Err(Error::RankConditionFailed {
            rank_next,
            rank_n,
            n,
        });
    }
    if n == 0 {
        return Ok(Recovery {
            state: QMatrix::zeros(0, 0),
            companion: QMatrix::zeros(0, 0),
            p,
            y: QMatrix::zeros(0, 1),
            f0,
            realization: Realization::constant(f0),
        });
    }
    let t = t_next.submatrix(0, 0, n, n);
    let x = QMatrix::column(&(1..=n).rev().map(|k| prefix[k].conj()).collect::<Vec<_>>());
    let y = QMatrix::column(&prefix[1..]);
    let p_inv = p.inverse_guarded("defect matrix", tol::ILL_COND)?;
    let last = &(&p_inv * &t) * &x;
    let mut companion = QMatrix::shift(n);
    companion.set_block(0, n - 1, &(-&last));
    let state = companion.adjoint();
    let half = p.sqrt_psd()?;
    let inv_half = p.inv_sqrt_pd()?;
    let a = &(&inv_half * &state) * &half;
    let b = &inv_half * &y;
    let c = &QMatrix::unit(n, 0).adjoint() * &half;
    let realization = Realization::new(a, b, c, f0)?;
    Ok(Recovery {
        state,
        companion,
        p,
        y,
        f0,
        realization,
    })
}

//! Seeded random generators for quaternions, products and matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::blaschke::BlaschkeProduct;
use crate::qmat::QMatrix;
use crate::quat::{ConjugacyClass, Quaternion};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gaussian-direction unit quaternion.
pub fn unit<R: Rng>(rng: &mut R) -> Quaternion {
    loop {
        let q = Quaternion::new(normal(rng), normal(rng), normal(rng), normal(rng));
        let n = q.norm();
        if n > 1e-6 {
            return q * (1.0 / n);
        }
    }
}

/// Unit purely imaginary quaternion.
pub fn unit_imaginary<R: Rng>(rng: &mut R) -> Quaternion {
    loop {
        let q = Quaternion::new(0.0, normal(rng), normal(rng), normal(rng));
        let n = q.norm();
        if n > 1e-6 {
            return q * (1.0 / n);
        }
    }
}

/// Uniform point of the ball of radius `max_modulus`.
pub fn in_ball<R: Rng>(rng: &mut R, max_modulus: f64) -> Quaternion {
    let r = max_modulus * rng.gen::<f64>().powf(0.25);
    unit(rng) * r
}

/// Point with modulus uniform in `[min, max]`.
pub fn in_shell<R: Rng>(rng: &mut R, min: f64, max: f64) -> Quaternion {
    unit(rng) * rng.gen_range(min..=max)
}

pub fn product<R: Rng>(rng: &mut R, degree: usize, max_modulus: f64) -> BlaschkeProduct {
    let nodes = (0..degree).map(|_| in_ball(rng, max_modulus)).collect();
    BlaschkeProduct::new(nodes, unit(rng)).expect("sampled nodes lie in the ball")
}

/// Random element of `class`.
pub fn in_class<R: Rng>(rng: &mut R, class: ConjugacyClass) -> Quaternion {
    Quaternion::real(class.re) + unit_imaginary(rng) * class.im_norm
}

/// Spherical chain of length `len` in `class`.
pub fn chain<R: Rng>(rng: &mut R, class: ConjugacyClass, len: usize) -> Vec<Quaternion> {
    let mut out: Vec<Quaternion> = Vec::with_capacity(len);
    while out.len() < len {
        let a = in_class(rng, class);
        if let Some(prev) = out.last() {
            if a.dist(prev.conj()) < 0.2 * class.im_norm.max(1e-3) {
                continue;
            }
        }
        out.push(a);
    }
    out
}

/// Unitary matrix from Gram–Schmidt on random columns.
pub fn unitary<R: Rng>(rng: &mut R, n: usize) -> QMatrix {
    let mut cols: Vec<Vec<Quaternion>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Quaternion> = (0..n).map(|_| unit(rng) * normal(rng)).collect();
        for u in &cols {
            let c: Quaternion = u.iter().zip(&v).map(|(a, b)| a.conj() * *b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= *ui * c;
            }
        }
        let norm = v.iter().map(|x| x.norm_sq()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        cols.push(v.into_iter().map(|x| x * (1.0 / norm)).collect());
    }
    QMatrix::from_fn(n, n, |i, j| cols[j][i])
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

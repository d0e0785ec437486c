//! Acceptance suite: one line per criterion, all at the pinned tolerances.

use std::time::Instant;

use qblaschke::blaschke::{eval_nodes, product_eval};
use qblaschke::qmat::controllability_matrix;
use qblaschke::realize::{build_realization, degree_of};
use qblaschke::sample;
use qblaschke::schur::{rank_profile, recover};
use qblaschke::series::{poly_from_factors, series_mul};
use qblaschke::synth::{pair_from_polynomial, synthesize, synthesize_pair};
use qblaschke::zeros::{
    blaschke_spherical_divisors, blaschke_spherical_divisors_with, is_spherical_chain,
    locate_in_class, lrcm_double, lrcm_nodes, ZeroLocation,
};
use qblaschke::{BlaschkeProduct, ConjugacyClass, QMatrix, QSeries, Quaternion, Side};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const I: Quaternion = Quaternion::I;
const J: Quaternion = Quaternion::J;
const K: Quaternion = Quaternion::K;

fn real(x: f64) -> Quaternion {
    Quaternion::real(x)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn c01_norm_fixture() -> Outcome {
    let f = QSeries::new(vec![real(0.5), K * 0.5]);
    let h = QSeries::new(vec![I, J]);
    let fh = series_mul(&f.truncate(2), &h.truncate(2)).h2_norm_sq();
    let hf = series_mul(&h.truncate(2), &f.truncate(2)).h2_norm_sq();
    ensure(
        (fh - 1.5).abs() <= 1e-15 && (hf - 0.5).abs() <= 1e-15,
        || format!("‖fh‖² = {fh}, ‖hf‖² = {hf}"),
    )?;
    Ok(format!("‖fh‖² = {fh}, ‖hf‖² = {hf}"))
}

/// Coefficients of `b_α` for a node in the closed ball.
fn raw_factor_series(alpha: Quaternion, order: usize) -> QSeries {
    let d = 1.0 - alpha.norm_sq();
    let mut coeffs = vec![-alpha];
    let mut p = real(d);
    for _ in 1..=order {
        coeffs.push(p);
        p *= alpha.conj();
    }
    QSeries::new(coeffs)
}

/// Left value of the order-128 series of `b_i·b_j` at `j`.
fn c02_series_value() -> Quaternion {
    let s = series_mul(&raw_factor_series(I, 128), &raw_factor_series(J, 128));
    s.eval_left_value(J)
}

fn c02_noncommutative_eval() -> Outcome {
    let nodes = [I, J];
    let right = eval_nodes(&nodes, Quaternion::ONE, J, Side::Right).map_err(err)?;
    let left = eval_nodes(&nodes, Quaternion::ONE, J, Side::Left).map_err(err)?;
    ensure(right.norm() <= 1e-12, || format!("right value {right}"))?;
    ensure(left.dist(K * 0.5) <= 1e-12, || {
        format!("closed-form left value {left}")
    })?;
    let series = c02_series_value();
    ensure(series.dist(K * 0.5) <= 1e-8, || {
        format!("closed form: right {right}, left {left}; order-128 series left value {series}, expected k/2")
    })?;
    Ok(format!("right {right}, left {left}, series {series}"))
}

fn c03_boundary_modulus() -> Outcome {
    let mut rng = sample::rng(3);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let deg = rng.gen_range(0..=6);
        let b = sample::product(&mut rng, deg, 0.95);
        for _ in 0..100 {
            let g = sample::unit(&mut rng);
            for side in [Side::Left, Side::Right] {
                let v = product_eval(&b, g, side).map_err(err)?;
                worst = worst.max((v.norm() - 1.0).abs());
            }
        }
    }
    ensure(worst <= 1e-10, || format!("max ||B(γ)| − 1| = {worst:e}"))?;
    Ok(format!("max ||B(γ)| − 1| = {worst:e}"))
}

fn c04_two_point_identity() -> Outcome {
    let mut rng = sample::rng(4);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let deg = rng.gen_range(0..=4);
        let b = sample::product(&mut rng, deg, 0.9);
        let g = sample::in_ball(&mut rng, 0.99);
        let l = product_eval(&b, g, Side::Left).map_err(err)?.norm_sq()
            + product_eval(&b, g.conj(), Side::Left)
                .map_err(err)?
                .norm_sq();
        let r = product_eval(&b, g, Side::Right).map_err(err)?.norm_sq()
            + product_eval(&b, g.conj(), Side::Right)
                .map_err(err)?
                .norm_sq();
        worst = worst.max((l - r).abs());
    }
    ensure(worst <= 1e-10, || format!("max difference {worst:e}"))?;
    Ok(format!("max difference {worst:e} over 1000 samples"))
}

fn c05_zero_localization() -> Outcome {
    let p = poly_from_factors(&[I, J]);
    let (left, right) = match locate_in_class(&p, I.class(), 1e-9).map_err(err)? {
        ZeroLocation::Point { left, right } => (left, right),
        ZeroLocation::Spherical => return Err("ρ_iρ_j reported spherical".into()),
    };
    let rl = p.eval_left(left).norm();
    let rr = p.eval_right(right).norm();
    ensure(left.dist(I) <= 1e-12 && right.dist(J) <= 1e-12, || {
        format!("zeros {left}, {right}")
    })?;
    ensure(rl <= 1e-12 && rr <= 1e-12, || {
        format!("residuals {rl:e}, {rr:e}")
    })?;
    let f = qblaschke::Polynomial::rho(J);
    match locate_in_class(&f, I.class(), 1e-9).map_err(err)? {
        ZeroLocation::Point { left, right } => {
            ensure(left.dist(J) <= 1e-12 && right.dist(J) <= 1e-12, || {
                format!("z − j zeros {left}, {right}")
            })?;
        }
        ZeroLocation::Spherical => return Err("z − j reported spherical".into()),
    }
    Ok(format!(
        "ρ_iρ_j: left {left}, right {right}; residuals {rl:e}, {rr:e}"
    ))
}

fn c06_synthesis_golden() -> Outcome {
    let res = synthesize(
        &QMatrix::scalar(real(0.5)),
        &QMatrix::scalar(Quaternion::ONE),
        64,
    )
    .map_err(err)?;
    let k = qblaschke::series::kappa_series(real(0.5), 64).map_err(err)?;
    let b = qblaschke::blaschke::factor_series(real(0.5), 64).map_err(err)?;
    let errs = [
        res.gram.get(0, 0).dist(real(4.0 / 3.0)),
        res.g.get(0, 0).dist(real(0.75)),
        res.r.max_diff(&k),
        res.theta.series.max_diff(&b),
        (res.r_norm_sq - 4.0 / 3.0).abs(),
    ];
    let worst = errs.iter().copied().fold(0.0, f64::max);
    ensure(worst <= 1e-12, || format!("errors {errs:?}"))?;
    Ok(format!("max error {worst:e}"))
}

fn c07_synthesis_scale() -> Outcome {
    let mut rng = sample::rng(7);
    let mut worst = [0.0f64; 4];
    for case in 0..25 {
        let deg = 1 + case % 6;
        let nodes: Vec<Quaternion> = (0..deg).map(|_| sample::in_ball(&mut rng, 0.8)).collect();
        let p = poly_from_factors(&nodes);
        let pair = pair_from_polynomial(&p).map_err(err)?;
        let res = synthesize_pair(&pair, 64).map_err(err)?;
        let c = res.checks(&pair).map_err(err)?;
        for (w, v) in worst
            .iter_mut()
            .zip([c.stein, c.unitarity, c.product, c.inverse])
        {
            *w = w.max(v);
        }
        let d = degree_of(&res.theta.series).map_err(err)?;
        ensure(d == deg, || {
            format!("case {case}: degree_of(Θ) = {d}, deg p = {deg}")
        })?;
        ensure(c.stein <= 1e-11, || {
            format!("case {case}: Stein residual {:e}", c.stein)
        })?;
        ensure(c.unitarity <= 1e-10, || {
            format!("case {case}: unitarity {:e}", c.unitarity)
        })?;
        ensure(c.product <= 1e-9, || {
            format!("case {case}: ‖pR − Θ‖ {:e}", c.product)
        })?;
        ensure(c.inverse <= 1e-9, || {
            format!("case {case}: ‖GR − 1‖ {:e}", c.inverse)
        })?;
    }
    Ok(format!(
        "Stein {:e}, unitarity {:e}, ‖pR − Θ‖ {:e}, ‖GR − 1‖ {:e}",
        worst[0], worst[1], worst[2], worst[3]
    ))
}

fn c08_realization_round_trip() -> Outcome {
    let mut rng = sample::rng(8);
    let mut worst = 0.0f64;
    for deg in 0..=8 {
        for _ in 0..3 {
            let b = sample::product(&mut rng, deg, 0.8);
            let r = build_realization(&b);
            let s = r.series(64);
            let diff = s.max_diff(&b.series(64));
            worst = worst.max(diff);
            ensure(diff <= 1e-11, || {
                format!("degree {deg}: series mismatch {diff:e}")
            })?;
            let d = degree_of(&s).map_err(err)?;
            ensure(d == deg, || format!("degree_of = {d}, expected {deg}"))?;
            let profile = rank_profile(&s.coeffs()[..32]);
            let expect: Vec<usize> = (1..=32).map(|k| k.min(deg)).collect();
            ensure(profile == expect, || {
                format!("degree {deg}: rank profile {profile:?}")
            })?;
        }
    }
    Ok(format!("27 products, max series mismatch {worst:e}"))
}

fn c09_recovery() -> Outcome {
    let z = recover(&[real(0.0), real(1.0)]).map_err(err)?;
    let e1 = z
        .series(32)
        .max_diff(&QSeries::monomial(Quaternion::ONE, 1, 32));
    let b = recover(&[real(-0.5), real(0.75)]).map_err(err)?;
    let e2 = b
        .series(32)
        .max_diff(&qblaschke::blaschke::factor_series(real(0.5), 32).map_err(err)?);
    ensure(e1 <= 1e-12 && e2 <= 1e-12, || {
        format!("fixtures {e1:e}, {e2:e}")
    })?;
    let mut rng = sample::rng(9);
    let mut worst = (0.0f64, 0.0f64);
    for case in 0..25 {
        let deg = 1 + case % 5;
        let bp = sample::product(&mut rng, deg, 0.8);
        let s = bp.series(64);
        let rec = recover(&s.coeffs()[..=deg]).map_err(err)?;
        let diff = rec.series(64).max_diff(&s);
        let ids = rec.identities().iter().copied().fold(0.0, f64::max);
        worst = (worst.0.max(diff), worst.1.max(ids));
        ensure(diff <= 1e-9, || {
            format!("case {case}: coefficient error {diff:e}")
        })?;
        ensure(ids <= 1e-10, || {
            format!("case {case}: identity residual {ids:e}")
        })?;
    }
    Ok(format!(
        "fixtures {e1:e}, {e2:e}; coefficients {:e}, identities {:e}",
        worst.0, worst.1
    ))
}

/// Product with a planted zero structure in `class`, padded with nodes from other classes.
fn planted_product<R: Rng>(
    rng: &mut R,
    kind: usize,
    class: ConjugacyClass,
) -> (BlaschkeProduct, usize) {
    let mut nodes = Vec::new();
    let planted = match kind {
        0 => {
            let x = real(class.re);
            nodes.extend([x, x]);
            2
        }
        1 => {
            let a = sample::in_class(rng, class);
            nodes.extend([a, a.conj()]);
            1
        }
        _ => {
            let len = rng.gen_range(2..=3);
            nodes.extend(sample::chain(rng, class, len));
            len
        }
    };
    let target = rng.gen_range(nodes.len()..=6);
    while nodes.len() < target {
        let a = sample::in_ball(rng, 0.7);
        if (a.w - class.re).hypot(a.im_norm() - class.im_norm) < 0.15 {
            continue;
        }
        if rng.gen_bool(0.5) {
            nodes.insert(0, a);
        } else {
            nodes.push(a);
        }
    }
    (
        BlaschkeProduct::new(nodes, sample::unit(rng)).expect("nodes in the ball"),
        planted,
    )
}

fn c10_spherical_divisors() -> Outcome {
    let mut rng = sample::rng(10);
    let mut worst = (0.0f64, 0.0f64);
    for case in 0..20 {
        let kind = case % 3;
        let class = if kind == 0 {
            ConjugacyClass::new(rng.gen_range(-0.6..0.6), 0.0)
        } else {
            ConjugacyClass::new(rng.gen_range(-0.3..0.3), rng.gen_range(0.3..0.6))
        };
        let (b, planted) = planted_product(&mut rng, kind, class);
        let d =
            blaschke_spherical_divisors(&b, class).map_err(|e| format!("case {case}: {e:?}"))?;
        let counted = match kind {
            0 => d.real_multiplicity,
            1 => d.kappa,
            _ => d.left_chain.len(),
        };
        ensure(counted >= planted, || {
            format!("case {case}: planted {planted}, found {counted}")
        })?;
        ensure(d.residual <= 1e-9, || {
            format!("case {case}: residual {:e}", d.residual)
        })?;
        if kind != 0 {
            ensure(
                is_spherical_chain(&d.left_chain, 1e-8) && is_spherical_chain(&d.right_chain, 1e-8),
                || format!("case {case}: chains do not validate"),
            )?;
            let other = sample::in_class(&mut rng, class);
            let d2 = blaschke_spherical_divisors_with(&b, class, Some(other)).map_err(err)?;
            let n = 48;
            let diff = d
                .left
                .series(n)
                .max_diff(&d2.left.series(n))
                .max(d.right.series(n).max_diff(&d2.right.series(n)));
            worst.1 = worst.1.max(diff);
            ensure(diff <= 1e-8, || {
                format!("case {case}: representative dependence {diff:e}")
            })?;
        }
        worst.0 = worst.0.max(d.residual);
    }
    Ok(format!(
        "residual {:e}, representative dependence {:e}",
        worst.0, worst.1
    ))
}

fn c11_controllability_stability() -> Outcome {
    let mut rng = sample::rng(11);
    for case in 0..50 {
        let n = 1 + case % 5;
        let u = sample::unitary(&mut rng, n + 1);
        let a = u.submatrix(0, 0, n, n);
        let v = u.submatrix(0, n, n, 1);
        let controllable = controllability_matrix(&a, &v).map_err(err)?.rank() == n;
        let stable = a.is_stable(1e-8);
        ensure(controllable && stable, || {
            format!("generic case {case}: controllable {controllable}, stable {stable}")
        })?;
    }
    for case in 0..50 {
        let n1 = 1 + case % 3;
        let m = 1 + case % 2;
        let u = sample::unitary(&mut rng, n1 + 1);
        let w = sample::unitary(&mut rng, m);
        let a1 = u.submatrix(0, 0, n1, n1);
        let v1 = u.submatrix(0, n1, n1, 1);
        let a = QMatrix::block_diag(&[&a1, &w]);
        let v = QMatrix::vstack(&[&v1, &QMatrix::zeros(m, 1)]).map_err(err)?;
        let rows =
            (&(&a * &a.adjoint()) + &(&v * &v.adjoint())).max_diff(&QMatrix::identity(n1 + m));
        ensure(rows <= 1e-12, || {
            format!("case {case}: AA* + vv* defect {rows:e}")
        })?;
        let rank = controllability_matrix(&a, &v).map_err(err)?.rank();
        ensure(rank < n1 + m, || {
            format!("case {case}: pair unexpectedly controllable")
        })?;
        ensure(!a.is_stable(1e-8), || {
            format!("case {case}: uncontrollable pair with stable A")
        })?;
    }
    Ok("50 controllable-and-stable, 50 uncontrollable-and-unstable".into())
}

fn c12_lrcm() -> Outcome {
    let mut rng = sample::rng(12);
    let fixed = [(I * 0.5, J * (1.0 / 3.0))];
    let mut pairs: Vec<(Quaternion, Quaternion)> = fixed.to_vec();
    while pairs.len() < 11 {
        let a = sample::in_shell(&mut rng, 0.2, 0.9);
        let b = sample::in_shell(&mut rng, 0.2, 0.9);
        if a.im_norm() < 0.1 || b.im_norm() < 0.1 || a.class().approx_eq(&b.class(), 0.05) {
            continue;
        }
        pairs.push((a, b));
    }
    let mut worst = 0.0f64;
    for (a, b) in pairs {
        let p = lrcm_double(a, b).map_err(err)?;
        for d in [poly_from_factors(&[a, a]), poly_from_factors(&[b, b])] {
            let (_, rem) = p.div_rem_left(&d).map_err(err)?;
            let r = rem.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
            worst = worst.max(r);
        }
        let (b1, b2) = lrcm_nodes(a, b).map_err(err)?;
        ensure(
            b1.class().approx_eq(&b.class(), 1e-12) && b2.class().approx_eq(&b.class(), 1e-12),
            || "β₁ or β₂ left the class of β".into(),
        )?;
    }
    ensure(worst <= 1e-10, || {
        format!("max division remainder {worst:e}")
    })?;
    Ok(format!("max division remainder {worst:e} over 11 pairs"))
}

/// Criteria whose printed target cannot be met; see the decisions record.
const KNOWN_INFEASIBLE: &[usize] = &[2];

fn boundary_pair_closed_form() {
    let nodes = [I, J];
    assert!(
        eval_nodes(&nodes, Quaternion::ONE, J, Side::Right)
            .unwrap()
            .norm()
            <= 1e-12
    );
    assert!(
        eval_nodes(&nodes, Quaternion::ONE, J, Side::Left)
            .unwrap()
            .dist(K * 0.5)
            <= 1e-12
    );
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("norm fixture", c01_norm_fixture),
        ("noncommutative evaluation", c02_noncommutative_eval),
        ("boundary modulus", c03_boundary_modulus),
        ("two-point modulus identity", c04_two_point_identity),
        ("zero localization", c05_zero_localization),
        ("synthesis golden case", c06_synthesis_golden),
        ("synthesis at scale", c07_synthesis_scale),
        ("realization round trip", c08_realization_round_trip),
        ("recovery", c09_recovery),
        ("spherical divisors", c10_spherical_divisors),
        (
            "controllability and stability",
            c11_controllability_stability,
        ),
        ("lrcm fixture", c12_lrcm),
    ];
    let mut unexpected = Vec::new();
    let mut failed = 0;
    for (idx, (name, run)) in criteria.iter().enumerate() {
        let num = idx + 1;
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(detail) => println!("criterion {num:2} PASS  {name} ({secs:.2}s): {detail}"),
            Err(detail) => println!("criterion {num:2} FAIL  {name} ({secs:.2}s): {detail}"),
        }
        if outcome.is_err() {
            failed += 1;
        }
        if outcome.is_err() && !KNOWN_INFEASIBLE.contains(&num) {
            unexpected.push(num);
        }
        assert!(secs < 60.0, "criterion {num} took {secs:.1}s");
    }
    // The order-128 series of b_i·b_j is the constant k, so its left value at j is k.
    let series = c02_series_value();
    assert!(
        series.dist(K) <= 1e-12,
        "criterion 2 series value changed: {series}"
    );
    assert!(unexpected.is_empty(), "failing criteria: {unexpected:?}");
    boundary_pair_closed_form();
    println!(
        "acceptance: {} of 12 criteria pass; known infeasible: {KNOWN_INFEASIBLE:?}",
        12 - failed
    );
}

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;

use trivortex::analytic::{hyperbola_m, hyperbola_n, predict_theta};
use trivortex::detector::rectangle_charge;
use trivortex::diffraction::{pinhole_field, rs_kernel, Pinhole};
use trivortex::lattice::{bounding_rectangle, classify, is_admissible};
use trivortex::wavefield::{
    farfield_value, spherical_superposition, subtract_background, ExactField, FarField,
};
use trivortex::{
    conic_from_arrangement, detect_vortices, enumerate_lattice, predict_all, predict_vortex,
    sample_grid, ConicClass, PinholeScreen, SourceArrangement, Window,
};

fn arr(r2: f64, r3: f64, theta3_deg: f64) -> SourceArrangement {
    SourceArrangement::new(1.0, r2, r3, theta3_deg.to_radians()).unwrap()
}

/// Non-collinear angles in degrees, at least 2 degrees from the axis.
fn theta3_deg() -> impl Strategy<Value = f64> {
    (2.0..178.0f64, any::<bool>()).prop_map(|(t, flip)| if flip { t + 180.0 } else { t })
}

fn arrangement() -> impl Strategy<Value = SourceArrangement> {
    (0.5..8.0f64, 0.5..8.0f64, theta3_deg()).prop_map(|(r2, r3, t)| arr(r2, r3, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn superposition_is_linear_in_amplitudes(
        a in arrangement(),
        amps in prop::array::uniform3(0.1..3.0f64),
        more in prop::array::uniform3(0.1..3.0f64),
        x in -40.0..40.0f64, y in -40.0..40.0f64, z in 5.0..100.0f64,
    ) {
        let p = [x, y, z];
        let sum = [amps[0] + more[0], amps[1] + more[1], amps[2] + more[2]];
        let whole = spherical_superposition(&a.with_amplitudes(sum), p).unwrap();
        let parts = spherical_superposition(&a.with_amplitudes(amps), p).unwrap()
            + spherical_superposition(&a.with_amplitudes(more), p).unwrap();
        let scale = sum.iter().sum::<f64>() / z;
        prop_assert!((whole - parts).norm() <= 1e-12 * scale);
    }

    #[test]
    fn isosceles_amplitude_is_mirror_symmetric(
        r in 0.5..8.0f64, t in theta3_deg(), phi in -PI..PI,
        x in -40.0..40.0f64, y in -40.0..40.0f64, z in 5.0..100.0f64,
    ) {
        // reflection across the bisector of the two arms swaps sources 2 and 3
        let a = arr(r, r, t).with_phases(phi, phi);
        let axis = 0.5 * t.to_radians();
        let (c, s) = ((2.0 * axis).cos(), (2.0 * axis).sin());
        let mirrored = [c * x + s * y, s * x - c * y, z];
        let u = spherical_superposition(&a, [x, y, z]).unwrap().norm();
        let v = spherical_superposition(&a, mirrored).unwrap().norm();
        prop_assert!((u - v).abs() <= 1e-10 * u.max(v).max(1.0 / z));
    }

    #[test]
    fn background_removal_keeps_every_amplitude(a in arrangement(), z0 in 5.0..200.0f64) {
        let g = sample_grid(&ExactField(a), Window::default_for(z0), 16, z0).unwrap();
        let b = subtract_background(&g, &a).unwrap();
        for (p, q) in g.values.iter().zip(&b.values) {
            prop_assert!((p.norm() - q.norm()).abs() <= 1e-15 * p.norm().max(1e-300));
        }
    }

    #[test]
    fn predictions_are_zeros_of_the_farfield(a in arrangement(), z0 in 5.0..500.0f64) {
        for p in predict_all(&a, z0).unwrap() {
            let r = (z0 * z0 + p.r_perp * p.r_perp).sqrt();
            let v = farfield_value(&a, p.r_perp, p.theta, z0).unwrap();
            prop_assert!(v.norm() < 1e-9 * 3.0 / r, "{p:?} |psi|={}", v.norm());
        }
    }

    #[test]
    fn predictions_scale_with_distance(a in arrangement(), z0 in 5.0..500.0f64) {
        let near = predict_all(&a, z0).unwrap();
        let far = predict_all(&a, 2.0 * z0).unwrap();
        prop_assert_eq!(near.len(), far.len());
        for (p, q) in near.iter().zip(&far) {
            prop_assert_eq!((p.m, p.n, p.branch), (q.m, q.n, q.branch));
            prop_assert!((p.theta - q.theta).abs() <= 1e-12 * p.theta.abs().max(1.0));
            prop_assert!((2.0 * p.r_perp - q.r_perp).abs() <= 1e-12 * q.r_perp);
        }
    }

    #[test]
    fn in_phase_predictions_come_in_pairs(a in arrangement(), m in -8i64..8, n in -8i64..8) {
        let found = predict_vortex(m, n, &a, 25.0).unwrap();
        prop_assert!(found.is_empty() || found.len() == 2);
        prop_assert_eq!(found.len() == 2, enumerate_lattice(&a).contains(&(m, n)));
        prop_assert_eq!(found.len() == 2, is_admissible(&a, m, n));
        if let [p, q] = found.as_slice() {
            prop_assert!((p.r_perp - q.r_perp).abs() <= 1e-12 * p.r_perp);
            let turn = (q.theta - p.theta).rem_euclid(TAU);
            prop_assert!((turn - PI).abs() < 1e-12);
        }
    }

    #[test]
    fn hyperbolas_meet_at_every_prediction(a in arrangement(), z0 in 5.0..500.0f64) {
        for (m, n) in enumerate_lattice(&a) {
            let theta = predict_theta(m, n, &a).unwrap();
            let rm = hyperbola_m(m, &a, z0, theta).unwrap().unwrap();
            let rn = hyperbola_n(n, &a, z0, theta).unwrap().unwrap();
            prop_assert!((rm - rn).abs() / rm < 1e-9);
        }
    }

    #[test]
    fn lattice_is_symmetric_about_collinearity(r2 in 0.5..8.0f64, r3 in 0.5..8.0f64, xi in 1.0..179.0f64) {
        prop_assert_eq!(enumerate_lattice(&arr(r2, r3, 180.0 - xi)), enumerate_lattice(&arr(r2, r3, 180.0 + xi)));
    }

    #[test]
    fn lattice_lies_inside_bounding_rectangle(a in arrangement(), phi2 in -TAU..TAU, phi3 in -TAU..TAU) {
        let a = a.with_phases(phi2, phi3);
        let rect = bounding_rectangle(&a);
        for (m, n) in enumerate_lattice(&a) {
            prop_assert!(rect.contains(m as f64, n as f64), "({m},{n}) outside {rect:?}");
        }
    }

    #[test]
    fn lattice_translates_with_phase(a in arrangement(), phi2 in -PI..PI, phi3 in -PI..PI) {
        let base = enumerate_lattice(&a.with_phases(phi2, phi3));
        let shifted = enumerate_lattice(&a.with_phases(phi2 + TAU, phi3));
        let expected: Vec<_> = base.iter().map(|&(m, n)| (m + 1, n)).collect();
        prop_assert_eq!(shifted, expected);
        let shifted = enumerate_lattice(&a.with_phases(phi2, phi3 - TAU));
        let expected: Vec<_> = base.iter().map(|&(m, n)| (m, n - 1)).collect();
        prop_assert_eq!(shifted, expected);
    }

    #[test]
    fn non_collinear_is_an_ellipse(a in arrangement()) {
        let d = conic_from_arrangement(&a);
        prop_assert_eq!(classify(&d), ConicClass::Ellipse);
        prop_assert!(d.big_delta < 0.0 && d.delta > 0.0 && d.big_delta / d.tau < 0.0);
    }

    #[test]
    fn pinhole_field_is_linear_in_weights(
        w1 in prop::array::uniform2(-2.0..2.0f64),
        w2 in prop::array::uniform2(-2.0..2.0f64),
        x in -20.0..20.0f64, y in -20.0..20.0f64, z in 1.0..100.0f64,
    ) {
        let screen = |w: [f64; 2]| {
            let holes = [(0.0, 0.0), (3.0, 0.0), (-1.0, 2.5)]
                .iter()
                .enumerate()
                .map(|(i, &(hx, hy))| Pinhole { x: hx, y: hy, weight: Complex64::new(w[0], w[1]) * (i as f64 + 1.0) })
                .collect();
            PinholeScreen::new(holes, TAU).unwrap()
        };
        let obs = [x, y, z];
        let whole = pinhole_field(&screen([w1[0] + w2[0], w1[1] + w2[1]]), obs).unwrap();
        let parts = pinhole_field(&screen(w1), obs).unwrap() + pinhole_field(&screen(w2), obs).unwrap();
        prop_assert!((whole - parts).norm() <= 1e-12 * (1.0 + whole.norm()));
    }

    #[test]
    fn kernel_satisfies_helmholtz(x in -10.0..10.0f64, y in -10.0..10.0f64, z in 3.0..30.0f64) {
        prop_assume!(x.hypot(y) > 0.5);
        let k = TAU;
        let h = 1.0 / 50.0;
        let f = |p: [f64; 3]| rs_kernel(p, (0.0, 0.0), k).unwrap();
        let c = f([x, y, z]);
        // fourth-order central stencil along each axis
        let mut lap = c * (-3.0 * 30.0);
        for axis in 0..3 {
            let at = |d: f64| {
                let mut p = [x, y, z];
                p[axis] += d;
                f(p)
            };
            lap += (at(h) + at(-h)) * 16.0 - (at(2.0 * h) + at(-2.0 * h));
        }
        let lap = lap / (12.0 * h * h);
        let residual = (lap + c * (k * k)).norm();
        prop_assert!(residual < 1e-3 * k * k * c.norm(), "residual {residual}");
    }
}

#[test]
fn farfield_error_shrinks_with_distance() {
    let a = arr(3.0, 3.0, 60.0);
    let mut previous = f64::INFINITY;
    for z0 in [25.0, 50.0, 100.0, 200.0, 400.0] {
        let w = Window::centered(0.4 * z0);
        let exact = sample_grid(&ExactField(a), w, 64, z0).unwrap();
        let far = sample_grid(&FarField(a), w, 64, z0).unwrap();
        let peak = exact.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let err = exact
            .values
            .iter()
            .zip(&far.values)
            .map(|(p, q)| (p - q).norm())
            .fold(0.0, f64::max)
            / peak;
        assert!(err < previous, "z0={z0}: {err} !< {previous}");
        previous = err;
    }
}

#[test]
fn ellipse_area_peaks_at_right_angle() {
    for (r2, r3) in [(3.0, 3.0), (3.0, 1.5), (0.7, 5.0)] {
        let area = |t: f64| {
            let d = conic_from_arrangement(&arr(r2, r3, t));
            d.s_plus * d.s_minus
        };
        let peak = area(90.0);
        for t in 1..180 {
            if t != 90 {
                assert!(area(t as f64) < peak, "r2={r2} r3={r3} theta3={t}");
            }
        }
    }
}

#[test]
fn family_ellipses_touch_rectangle_sides() {
    // Extremes of the conic along m: the n-quadratic of Q(m, n) = 0 has a
    // double root, so each side is touched once.
    for t in [30.0, 90.0, 150.0] {
        let a = arr(3.0, 2.0, t);
        let d = conic_from_arrangement(&a);
        let rect = bounding_rectangle(&a);
        // disc_n(m) = (h m + f)^2 - b (a m^2 + 2 g m + c)
        let (qa, qb, qc) = (
            d.h * d.h - d.b * d.a,
            2.0 * (d.h * d.f - d.b * d.g),
            d.f * d.f - d.b * d.c,
        );
        let root = (qb * qb - 4.0 * qa * qc).sqrt();
        let mut ms = [(-qb - root) / (2.0 * qa), (-qb + root) / (2.0 * qa)];
        ms.sort_by(f64::total_cmp);
        assert!(
            (ms[0] - (rect.center.0 - 0.5 * rect.width_m)).abs() < 1e-9,
            "theta3={t} {ms:?}"
        );
        assert!(
            (ms[1] - (rect.center.0 + 0.5 * rect.width_m)).abs() < 1e-9,
            "theta3={t} {ms:?}"
        );
        let (pa, pb, pc) = (
            d.h * d.h - d.a * d.b,
            2.0 * (d.h * d.g - d.a * d.f),
            d.g * d.g - d.a * d.c,
        );
        let root = (pb * pb - 4.0 * pa * pc).sqrt();
        let mut ns = [(-pb - root) / (2.0 * pa), (-pb + root) / (2.0 * pa)];
        ns.sort_by(f64::total_cmp);
        assert!(
            (ns[0] - (rect.center.1 - 0.5 * rect.width_n)).abs() < 1e-9,
            "theta3={t} {ns:?}"
        );
        assert!(
            (ns[1] - (rect.center.1 + 0.5 * rect.width_n)).abs() < 1e-9,
            "theta3={t} {ns:?}"
        );
    }
}

#[test]
fn hyperbola_has_vertical_asymptote() {
    let a = arr(3.0, 3.0, 60.0);
    assert_eq!(hyperbola_m(0, &a, 25.0, FRAC_PI_2).unwrap(), None);
    assert_eq!(
        hyperbola_n(0, &a, 25.0, a.theta3 + FRAC_PI_2).unwrap(),
        None
    );
}

fn farfield_grid(window: Window, res: usize) -> trivortex::FieldGrid {
    sample_grid(&FarField(arr(3.0, 3.0, 60.0)), window, res, 25.0).unwrap()
}

#[test]
fn super_loop_charge_is_enclosed_charge() {
    use rand::{Rng, SeedableRng};
    let grid = farfield_grid(Window::default_for(25.0), 256);
    let dets = detect_vortices(&grid).unwrap();
    assert!(!dets.is_empty());
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for _ in 0..200 {
        let r0 = rng.gen_range(0..250);
        let c0 = rng.gen_range(0..250);
        let r1 = rng.gen_range(r0 + 1..256);
        let c1 = rng.gen_range(c0 + 1..256);
        let enclosed: i64 = dets
            .iter()
            .filter(|d| (r0..r1).contains(&d.pixel.0) && (c0..c1).contains(&d.pixel.1))
            .map(|d| d.charge as i64)
            .sum();
        assert_eq!(
            rectangle_charge(&grid, r0, c0, r1, c1),
            enclosed,
            "({r0},{c0})-({r1},{c1})"
        );
    }
}

#[test]
fn spherical_fields_have_unit_charges() {
    for t in [30.0, 60.0, 120.0, 175.0] {
        let a = arr(3.0, 3.0, t);
        let grid = sample_grid(&ExactField(a), Window::centered(30.0), 256, 25.0).unwrap();
        assert!(
            detect_vortices(&grid)
                .unwrap()
                .iter()
                .all(|d| d.charge.abs() == 1),
            "theta3={t}"
        );
    }
}

#[test]
fn resolution_doubling_is_stable() {
    let w = Window::default_for(25.0);
    let coarse = detect_vortices(&farfield_grid(w, 128)).unwrap();
    let fine = detect_vortices(&farfield_grid(w, 256)).unwrap();
    let step = 2.0 * w.half_width / 128.0;
    assert_eq!(coarse.len(), fine.len());
    for c in &coarse {
        let f = fine
            .iter()
            .min_by(|a, b| {
                let da = (a.position.0 - c.position.0).hypot(a.position.1 - c.position.1);
                let db = (b.position.0 - c.position.0).hypot(b.position.1 - c.position.1);
                da.total_cmp(&db)
            })
            .unwrap();
        assert_eq!(f.charge, c.charge);
        assert!((f.position.0 - c.position.0).hypot(f.position.1 - c.position.1) < step);
    }
}

#[test]
fn detection_is_translation_covariant() {
    let base = Window::default_for(25.0);
    let res = 200;
    let step = 2.0 * base.half_width / res as f64;
    let (di, dj) = (7usize, 13usize);
    let shifted = Window {
        center_x: base.center_x + dj as f64 * step,
        center_y: base.center_y + di as f64 * step,
        ..base
    };
    let a = detect_vortices(&farfield_grid(base, res)).unwrap();
    let b = detect_vortices(&farfield_grid(shifted, res)).unwrap();
    // plaquettes present in both rasters
    let in_overlap = |row: usize, col: usize| row + 1 < res && col + 1 < res;
    let a: Vec<_> = a
        .iter()
        .filter(|d| d.pixel.0 >= di && d.pixel.1 >= dj)
        .collect();
    let b: Vec<_> = b
        .iter()
        .filter(|d| in_overlap(d.pixel.0 + di, d.pixel.1 + dj))
        .collect();
    assert!(!a.is_empty());
    assert_eq!(a.len(), b.len());
    for (p, q) in a.iter().zip(&b) {
        assert_eq!(p.charge, q.charge);
        assert_eq!((p.pixel.0 - di, p.pixel.1 - dj), q.pixel);
        assert!((p.position.0 - q.position.0).abs() < 1e-9);
        assert!((p.position.1 - q.position.1).abs() < 1e-9);
    }
}

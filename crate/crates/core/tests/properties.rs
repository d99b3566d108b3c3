//! Property tests for the transform, propagation and analysis invariants.

use num_complex::Complex64;
use proptest::prelude::*;
use slowlight::analysis::{grating_contrast, AnalysisWindow};
use slowlight::scenes::{binary_grating, GratingAxis, GratingSpec};
use slowlight::{
    eit_tf, free_space_tf, from_spectrum, propagate, to_spectrum, ComplexField, Grid2D,
    MediumParams,
};
use std::f64::consts::PI;

const LAMBDA: f64 = 794.979e-9;

fn q() -> f64 {
    2.0 * PI / LAMBDA
}

/// Direct O(N^2) double-sum DFT, the independent oracle for the transform.
fn naive_spectrum(field: &ComplexField, ix: usize, iy: usize) -> Complex64 {
    let g = field.grid();
    let mut acc = Complex64::new(0.0, 0.0);
    for ny in 0..g.ny() {
        for nx in 0..g.nx() {
            let phase = -2.0 * PI
                * (ix as f64 * nx as f64 / g.nx() as f64 + iy as f64 * ny as f64 / g.ny() as f64);
            acc += field.at(nx, ny) * Complex64::from_polar(1.0, phase);
        }
    }
    acc * g.dx() * g.dy()
}

fn complex_field_strategy(
    max_n: usize,
) -> impl Strategy<Value = (Grid2D, Vec<Complex64>, Vec<Complex64>)> {
    (2..max_n, 2..max_n, 1e-6..1e-5f64, 1e-6..1e-5f64).prop_flat_map(|(nx, ny, dx, dy)| {
        let n = nx * ny;
        let vals = prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n..=n);
        (vals.clone(), vals).prop_map(move |(a, b)| {
            let g = Grid2D::new(nx, ny, dx, dy).unwrap();
            let f: Vec<_> = a.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
            let h: Vec<_> = b.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
            (g, f, h)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_is_linear((g, a, b) in complex_field_strategy(24),
                           ca in -2.0..2.0f64, cb in -2.0..2.0f64) {
        let fa = ComplexField::new(g, a.clone()).unwrap();
        let fb = ComplexField::new(g, b.clone()).unwrap();
        let combo: Vec<_> = a.iter().zip(&b).map(|(x, y)| ca * x + cb * y).collect();
        let fc = ComplexField::new(g, combo).unwrap();
        let sa = to_spectrum(&fa);
        let sb = to_spectrum(&fb);
        let sc = to_spectrum(&fc);
        let scale = sa.values().iter().chain(sb.values())
            .map(|v| v.norm()).fold(1e-300, f64::max);
        for i in 0..g.len() {
            let lhs = sc.values()[i];
            let rhs = ca * sa.values()[i] + cb * sb.values()[i];
            prop_assert!((lhs - rhs).norm() <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn parseval_and_round_trip((g, a, _) in complex_field_strategy(24)) {
        let f = ComplexField::new(g, a).unwrap();
        let s = to_spectrum(&f);
        let rel = (s.power() - f.power()).abs() / f.power().max(1e-300);
        prop_assert!(rel < 1e-12, "Parseval violated: {rel}");
        let back = from_spectrum(&s);
        let scale = f.values().iter().map(|v| v.norm()).fold(1e-300, f64::max);
        for (x, y) in back.values().iter().zip(f.values()) {
            prop_assert!((x - y).norm() <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn propagation_is_linear_and_free_space_conserves_power(
        (g, a, b) in complex_field_strategy(20), l in -0.2..0.2f64) {
        let fa = ComplexField::new(g, a.clone()).unwrap();
        let fb = ComplexField::new(g, b.clone()).unwrap();
        let tf = free_space_tf(&g, q(), l);
        let pa = propagate(&fa, &tf).unwrap();
        let pb = propagate(&fb, &tf).unwrap();
        let combo: Vec<_> = a.iter().zip(&b).map(|(x, y)| 0.3 * x - 1.7 * y).collect();
        let pc = propagate(&ComplexField::new(g, combo).unwrap(), &tf).unwrap();
        let scale = pa.values().iter().chain(pb.values())
            .map(|v| v.norm()).fold(1e-300, f64::max).max(1.0);
        for i in 0..g.len() {
            let rhs = 0.3 * pa.values()[i] - 1.7 * pb.values()[i];
            prop_assert!((pc.values()[i] - rhs).norm() <= 1e-11 * scale);
        }
        // lossless propagation: power conserved
        let rel = (pa.power() - fa.power()).abs() / fa.power().max(1e-300);
        prop_assert!(rel < 1e-12);
        // reversibility
        let back = propagate(&pa, &free_space_tf(&g, q(), -l)).unwrap();
        for (x, y) in back.values().iter().zip(fa.values()) {
            prop_assert!((x - y).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn eit_slabs_compose((g, a, _) in complex_field_strategy(16),
                         l1 in 0.0..0.05f64, l2 in 0.0..0.05f64,
                         delta_frac in -1.5..1.5f64) {
        let gamma = 2.0 * PI * 70e3;
        let p = MediumParams::new(1.1e-3, gamma, 0.4 * gamma, delta_frac * gamma, 60.0, LAMBDA)
            .unwrap();
        let f = ComplexField::new(g, a).unwrap();
        let step1 = propagate(&f, &eit_tf(&g, &p, l1).unwrap()).unwrap();
        let step2 = propagate(&step1, &eit_tf(&g, &p, l2).unwrap()).unwrap();
        let direct = propagate(&f, &eit_tf(&g, &p, l1 + l2).unwrap()).unwrap();
        let scale = direct.values().iter().map(|v| v.norm()).fold(1e-300, f64::max).max(1.0);
        for (x, y) in step2.values().iter().zip(direct.values()) {
            prop_assert!((x - y).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn tilt_covariance(kx in -3e4..3e4f64, ky in -3e4..3e4f64,
                       tx in -4e-4..4e-4f64, ty in -4e-4..4e-4f64,
                       delta_frac in -2.0..2.0f64) {
        let gamma = 2.0 * PI * 70e3;
        let p0 = MediumParams::new(1.1e-3, gamma, 0.5 * gamma, delta_frac * gamma, 60.0, LAMBDA)
            .unwrap();
        let p = p0.with_pump_tilt([tx, ty]);
        let shifted = [kx - p.q() * tx, ky - p.q() * ty];
        prop_assert_eq!(p.chi_eit([kx, ky]), p0.chi_eit(shifted));
    }

    #[test]
    fn contrast_invariant_under_intensity_scaling(scale in 1e-3..1e3f64) {
        let g = Grid2D::new(620, 8, 4.88e-6, 4.88e-6).unwrap();
        let spec = GratingSpec {
            period: 62.0 * g.dx(),
            duty: 0.5,
            axis: GratingAxis::X,
            envelope: None,
        };
        let f = binary_grating(&g, &spec).unwrap();
        // a mildly structured intensity so C is not just +1
        let blurred = propagate(&f, &free_space_tf(&g, q(), 0.02)).unwrap();
        let win = AnalysisWindow::full();
        let c1 = grating_contrast(&blurred, &spec, &win).unwrap().contrast;
        let c2 = grating_contrast(&blurred.map(|v| scale * v), &spec, &win)
            .unwrap()
            .contrast;
        prop_assert!((c1 - c2).abs() <= 1e-12);
    }
}

#[test]
fn transform_matches_double_sum_oracle() {
    // small grid, exact comparison against the O(N^2) DFT
    let g = Grid2D::new(8, 6, 3e-6, 5e-6).unwrap();
    let f = ComplexField::from_fn(g, |x, y| {
        Complex64::new((x * 7e5).sin() + 0.4, (y * 9e5).cos() - 0.2)
    });
    let s = to_spectrum(&f);
    for iy in 0..g.ny() {
        for ix in 0..g.nx() {
            let expect = naive_spectrum(&f, ix, iy);
            let got = s.at(ix, iy);
            assert!(
                (got - expect).norm() <= 1e-12 * expect.norm().max(1e-12),
                "bin ({ix},{iy}): {got} vs {expect}"
            );
        }
    }
}

#[test]
fn shift_theorem_on_a_gaussian() {
    let g = Grid2D::new(64, 32, 8e-6, 8e-6).unwrap();
    let w0 = 80e-6;
    let f = ComplexField::from_fn(g, |x, y| {
        Complex64::new((-(x * x + y * y) / (w0 * w0)).exp(), 0.0)
    });
    // circular shift by one sample in x
    let mut shifted = vec![Complex64::default(); g.len()];
    for iy in 0..g.ny() {
        for ix in 0..g.nx() {
            shifted[g.idx((ix + 1) % g.nx(), iy)] = f.at(ix, iy);
        }
    }
    let fs = ComplexField::new(g, shifted).unwrap();
    let s0 = to_spectrum(&f);
    let s1 = to_spectrum(&fs);
    let scale = s0.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    for iy in 0..g.ny() {
        for ix in 0..g.nx() {
            // E(x - dx) picks up exp(-i kx dx), a unit-modulus linear phase
            let phase = Complex64::from_polar(1.0, -g.kx(ix) * g.dx());
            let expect = s0.at(ix, iy) * phase;
            assert!((s1.at(ix, iy) - expect).norm() <= 1e-12 * scale);
        }
    }
}

#[test]
fn quadratic_remainder_is_fourth_order() {
    // |chi_eit(k) - c0 - c2 k^2| = A k^4 with A stable under halving k
    let gamma = 2.0 * PI * 70e3;
    for sign in [-1.0, 1.0] {
        let mut p =
            MediumParams::new(1.1e-3, gamma, 0.0, sign * gamma, 60.0, LAMBDA).unwrap();
        p.gamma_p = p.gamma_p_for_group_velocity(p.q() * p.diffusion).unwrap();
        let qc = p.quadratic_coeffs().unwrap();
        let k0 = p.derived().k0;
        let rem = |k: f64| (p.chi_eit([k, 0.0]) - qc.c0 - qc.c2 * k * k).norm();
        let k = 0.05 * k0;
        let a1 = rem(k) / k.powi(4);
        let a2 = rem(k / 2.0) / (k / 2.0).powi(4);
        assert!(
            (a1 - a2).abs() / a1 < 0.05,
            "fitted quartic coefficient drifts: {a1} vs {a2}"
        );
        // order >= 4: halving k shrinks the remainder by ~16
        let ratio = rem(k) / rem(k / 2.0);
        assert!((ratio - 16.0).abs() < 1.0, "remainder ratio {ratio}");
    }
}

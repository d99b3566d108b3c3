//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the measured value (run with `-- --nocapture` to see them).
//!
//! All tolerances are pinned here, in code. Criteria run on the reference
//! cell: a 70 kHz EIT line over D = 1100 mm^2/s at 794.979 nm, optical
//! depth 2*alpha*L = 6 over the 50 mm cell, with the pump power set through
//! the targeted group velocity.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slowlight::analysis::{
    deflection_measurement, fd_taylor_c2, grating_contrast, rms_width, transmission_spectrum,
    AnalysisWindow,
};
use slowlight::scenes::{
    binary_grating, gaussian_beam, iris_filter, point_source, Envelope, GratingAxis, GratingSpec,
};
use slowlight::{
    eit_tf, free_space_tf, from_spectrum, normalize_uniform_loss, propagate, run_train,
    to_spectrum, ComplexField, EffectiveIndex, Grid2D, MediumParams, OpticalTrain, Segment,
};
use std::f64::consts::PI;

const LAMBDA: f64 = 794.979e-9;
const D: f64 = 1.1e-3;
const ALPHA: f64 = 60.0;
const CELL: f64 = 0.05;

fn gamma_khz(khz: f64) -> f64 {
    2.0 * PI * khz * 1e3
}

/// Cell tuned for diffraction elimination: delta = -gamma(70 kHz), v_g = qD.
fn elimination_cell() -> MediumParams {
    let gamma = gamma_khz(70.0);
    let mut p = MediumParams::new(D, gamma, 0.0, -gamma, ALPHA, LAMBDA).unwrap();
    p.gamma_p = p.gamma_p_for_group_velocity(p.q() * D).unwrap();
    p
}

/// Cell tuned for diffraction reversal: gamma = 30 kHz, v_g = qD/2.
fn lens_cell() -> MediumParams {
    let gamma = gamma_khz(30.0);
    let mut p = MediumParams::new(D, gamma, 0.0, -gamma, ALPHA, LAMBDA).unwrap();
    p.gamma_p = p.gamma_p_for_group_velocity(p.q() * D / 2.0).unwrap();
    p
}

fn reference_grid() -> Grid2D {
    Grid2D::new(1024, 1024, 5e-6, 5e-6).unwrap()
}

fn rel_l2(field: &ComplexField, reference: &ComplexField) -> f64 {
    let num: f64 = field
        .values()
        .iter()
        .zip(reference.values())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    let den: f64 = reference.values().iter().map(|v| v.norm_sqr()).sum();
    (num / den).sqrt()
}

struct Criterion {
    name: &'static str,
    failures: Vec<String>,
}

impl Criterion {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, label: &str, ok: bool, detail: String) {
        if !ok {
            self.failures.push(format!("{label}: {detail}"));
        }
        println!(
            "[{}] {} {} ({detail})",
            self.name,
            if ok { "PASS" } else { "FAIL" },
            label
        );
    }

    fn finish(self) {
        assert!(
            self.failures.is_empty(),
            "[{}] failed checks:\n  {}",
            self.name,
            self.failures.join("\n  ")
        );
    }
}

#[test]
fn criterion_01_derived_quantities() {
    let mut c = Criterion::new("criterion 1");
    let p = elimination_cell();
    let d = p.derived();
    c.check(
        "k0(70 kHz) = 20.0 1/mm +-1%",
        (d.k0 - 20_000.0).abs() / 20_000.0 <= 0.01,
        format!("k0 = {:.1} 1/m", d.k0),
    );
    let vg = d.group_velocity.unwrap();
    c.check(
        "v_g = qD = 8690 m/s +-2%",
        (vg - 8690.0).abs() / 8690.0 <= 0.02,
        format!("v_g = {vg:.1} m/s"),
    );
    let delay = p.group_delay(CELL).unwrap();
    c.check(
        "50 mm group delay = 5.75 us +-2%",
        (delay - 5.75e-6).abs() / 5.75e-6 <= 0.02,
        format!("delay = {:.4} us", delay * 1e6),
    );
    let k0_30 = MediumParams::new(D, gamma_khz(30.0), 0.0, 0.0, ALPHA, LAMBDA)
        .unwrap()
        .derived()
        .k0;
    c.check(
        "k0(30 kHz) = 13.1 1/mm +-2%",
        (k0_30 - 13_100.0).abs() / 13_100.0 <= 0.02,
        format!("k0 = {k0_30:.1} 1/m"),
    );
    c.finish();
}

#[test]
fn criterion_02_free_space_gaussian_oracle() {
    let mut c = Criterion::new("criterion 2");
    let g = reference_grid();
    let q = 2.0 * PI / LAMBDA;
    let w0 = 100e-6;
    let beam = gaussian_beam(&g, w0, [0.0, 0.0], [0.0, 0.0], q).unwrap();
    let out = propagate(&beam, &free_space_tf(&g, q, CELL)).unwrap();

    // analytic oracle: w(z) = w0 sqrt(1 + (z/zR)^2), RMS radius = w(z)/2
    let z_r = PI * w0 * w0 / LAMBDA;
    let w_z = w0 * (1.0 + (CELL / z_r).powi(2)).sqrt();
    let sigma = rms_width(&out, &AnalysisWindow::full()).unwrap();
    let rel = ((sigma[0] - w_z / 2.0) / (w_z / 2.0)).abs();
    c.check(
        "RMS width matches w(z) to 1e-6",
        rel < 1e-6,
        format!("w(z)/2 = {:.4} um, measured {:.4} um, rel {rel:.2e}", w_z * 5e5, sigma[0] * 1e6),
    );
    let drift = (out.power() - beam.power()).abs() / beam.power();
    c.check(
        "energy conserved to 1e-12",
        drift < 1e-12,
        format!("relative drift {drift:.2e}"),
    );
    c.finish();
}

#[test]
fn criterion_03_quadratic_cancellation() {
    let mut c = Criterion::new("criterion 3");
    let p = elimination_cell();
    let k0 = p.derived().k0;
    let q = p.q();
    let step = k0 / 100.0;

    let c2_elim = fd_taylor_c2(|k| p.chi_total([k, 0.0]), 0.0, step).unwrap();
    let bound = 1e-3 / (2.0 * q);
    c.check(
        "|c2| < 1e-3 x 1/(2q) at delta = -gamma, v_g = qD",
        c2_elim.norm() < bound,
        format!("|c2| = {:.3e} m, bound {bound:.3e} m", c2_elim.norm()),
    );

    let plus = p.with_delta(p.gamma);
    let c2_dbl = fd_taylor_c2(|k| plus.chi_total([k, 0.0]), 0.0, step).unwrap();
    let expect = -1.0 / q;
    let rel = ((c2_dbl.re - expect) / expect).abs().max(c2_dbl.im.abs() * q);
    c.check(
        "c2 = -1/q +-0.1% at delta = +gamma (double diffraction)",
        rel < 1e-3,
        format!("c2 = {:.6e} m, -1/q = {expect:.6e} m, rel {rel:.2e}", c2_dbl.re),
    );
    c.finish();
}

/// Band-limited test image shared by criteria 4 and 5: three discs pushed
/// through an iris at 0.2 k0.
fn band_limited_image(g: &Grid2D, k0: f64) -> ComplexField {
    let discs = [
        (-0.7e-3, -0.4e-3, 0.45e-3),
        (0.6e-3, 0.5e-3, 0.3e-3),
        (0.1e-3, -0.6e-3, 0.2e-3),
    ];
    let raw = ComplexField::from_fn(*g, |x, y| {
        let inside = discs
            .iter()
            .any(|&(cx, cy, r)| (x - cx).powi(2) + (y - cy).powi(2) <= r * r);
        Complex64::new(if inside { 1.0 } else { 0.0 }, 0.0)
    });
    iris_filter(&raw, 0.2 * k0).unwrap()
}

#[test]
fn criterion_04_elimination_of_diffraction() {
    let mut c = Criterion::new("criterion 4");
    let g = reference_grid();
    let p = elimination_cell();
    let input = band_limited_image(&g, p.derived().k0);

    let out = propagate(&input, &eit_tf(&g, &p, CELL).unwrap()).unwrap();
    let out = normalize_uniform_loss(&out, &p, CELL);
    let d_eit = rel_l2(&out, &input);
    c.check(
        "loss-normalized output within 1% of input",
        d_eit < 0.01,
        format!("relative L2 = {d_eit:.5}"),
    );

    let free = propagate(&input, &free_space_tf(&g, p.q(), CELL)).unwrap();
    let d_free = rel_l2(&free, &input);
    c.check(
        "free space differs by > 10x the EIT distance",
        d_free > 10.0 * d_eit,
        format!("free-space L2 = {d_free:.5}, ratio {:.1}", d_free / d_eit),
    );
    c.finish();
}

#[test]
fn criterion_05_doubling_of_diffraction() {
    let mut c = Criterion::new("criterion 5");
    let g = reference_grid();
    let p = elimination_cell().with_delta(gamma_khz(70.0));
    let input = band_limited_image(&g, p.derived().k0);

    let out = propagate(&input, &eit_tf(&g, &p, CELL).unwrap()).unwrap();
    let out = normalize_uniform_loss(&out, &p, CELL);
    let reference = propagate(&input, &free_space_tf(&g, p.q(), 2.0 * CELL)).unwrap();
    let d = rel_l2(&out, &reference);
    c.check(
        "EIT over L matches free space over 2L within 1%",
        d < 0.01,
        format!("relative L2 = {d:.5}"),
    );
    c.finish();
}

#[test]
fn criterion_06_talbot_grating_contrast() {
    let mut c = Criterion::new("criterion 6");
    let g = reference_grid();
    let p = elimination_cell();
    let spec = GratingSpec {
        period: 302e-6, // 3.3 lp/mm
        duty: 0.5,
        axis: GratingAxis::X,
        envelope: Some(Envelope {
            half_width: 1.8e-3,
            order: 4,
        }),
    };
    let talbot = slowlight::analysis::talbot_distance(spec.period, LAMBDA).unwrap();
    c.check(
        "Talbot distance ~ 230 mm (cell = ~L_T/4)",
        (talbot - 0.230).abs() / 0.230 < 0.01,
        format!("L_T = {:.1} mm", talbot * 1e3),
    );

    let input = binary_grating(&g, &spec).unwrap();
    let window = AnalysisWindow::centered(0.6 * 1.8e-3, f64::INFINITY);
    let contrast_of = |f: &ComplexField| grating_contrast(f, &spec, &window).unwrap().contrast;

    let free = propagate(&input, &free_space_tf(&g, p.q(), CELL)).unwrap();
    let c_free = contrast_of(&free);
    c.check(
        "free space at ~L_T/4: |C| < 0.2",
        c_free.abs() < 0.2,
        format!("C = {c_free:+.4}"),
    );

    let mut c_by_delta = Vec::new();
    for (label, delta) in [("-gamma", -p.gamma), ("0", 0.0), ("+gamma", p.gamma)] {
        let pd = p.with_delta(delta);
        let out = propagate(&input, &eit_tf(&g, &pd, CELL).unwrap()).unwrap();
        let out = normalize_uniform_loss(&out, &pd, CELL);
        c_by_delta.push((label, contrast_of(&out)));
    }
    let c_elim = c_by_delta[0].1;
    let c_zero = c_by_delta[1].1;
    let c_dbl = c_by_delta[2].1;

    c.check(
        "elimination at delta = -gamma: C >= 0.85",
        c_elim >= 0.85,
        format!("C = {c_elim:+.4}"),
    );
    c.check(
        "doubling at delta = +gamma: C <= -0.5",
        c_dbl <= -0.5,
        format!("C = {c_dbl:+.4}"),
    );
    c.check(
        "delta = 0 degraded relative to delta = -gamma",
        c_zero < c_elim,
        format!("C(0) = {c_zero:+.4} vs C(-gamma) = {c_elim:+.4}"),
    );
    c.finish();
}

#[test]
fn criterion_07_walk_off() {
    let mut c = Criterion::new("criterion 7");
    let g = reference_grid();
    let base = elimination_cell();
    let k0 = base.derived().k0;
    let q = base.q();
    let probe = gaussian_beam(&g, 800e-6, [0.0, 0.0], [0.0, 0.0], q).unwrap();

    let mut worst_ratio: (f64, f64) = (1.0, 0.0); // (ratio, at fraction)
    let mut worst_tilt = 0.0f64;
    let steps = 10;
    for i in 1..=steps {
        let frac = 0.1 * i as f64 / steps as f64;
        let theta_pump = frac * k0 / q;
        let p = base.with_pump_tilt([theta_pump, 0.0]);
        let out = propagate(&probe, &eit_tf(&g, &p, CELL).unwrap()).unwrap();
        let report = deflection_measurement(&probe, &out, CELL, q).unwrap();
        let ratio = report.theta_probe[0] / theta_pump;
        if (ratio - 1.0).abs() > (worst_ratio.0 - 1.0).abs() {
            worst_ratio = (ratio, frac);
        }
        worst_tilt = worst_tilt.max(report.residual_tilt[0].abs());
    }
    c.check(
        "theta_probe/theta_pump in [0.95, 1.05] up to q*theta = 0.1 k0",
        (0.95..=1.05).contains(&worst_ratio.0),
        format!("worst ratio {:.4} at {:.2} k0", worst_ratio.0, worst_ratio.1),
    );
    c.check(
        "residual carrier tilt < 0.02 mrad",
        worst_tilt < 0.02e-3,
        format!("worst |tilt| = {:.5} mrad", worst_tilt * 1e3),
    );

    // opposite detuning deflects the probe the other way
    let theta_pump = 0.05 * k0 / q;
    let p = base
        .with_delta(base.gamma)
        .with_pump_tilt([theta_pump, 0.0]);
    let out = propagate(&probe, &eit_tf(&g, &p, CELL).unwrap()).unwrap();
    let ratio =
        deflection_measurement(&probe, &out, CELL, q).unwrap().theta_probe[0] / theta_pump;
    c.check(
        "sign flips at delta = +gamma",
        (-1.05..=-0.95).contains(&ratio),
        format!("ratio = {ratio:+.4}"),
    );
    c.finish();
}

#[test]
fn criterion_08_negative_diffraction_lens() {
    let mut c = Criterion::new("criterion 8");
    let g = reference_grid();
    let p = lens_cell();
    match p.derived().n_eff.unwrap() {
        EffectiveIndex::Finite(n) => c.check(
            "n_eff = -1 at v_g = qD/2",
            (n + 1.0).abs() < 1e-9,
            format!("n_eff = {n:.6}"),
        ),
        EffectiveIndex::Singular => c.check("n_eff = -1 at v_g = qD/2", false, "singular".into()),
    }

    let source = point_source(&g, 200e-6).unwrap();
    let run_lens = |u: f64, v: f64| {
        let train = OpticalTrain::new(
            p.q(),
            vec![
                Segment::free_space(u),
                Segment::eit(p, CELL),
                Segment::free_space(v),
            ],
        )
        .unwrap();
        let out = run_train(&source, &train).unwrap().output;
        normalize_uniform_loss(&out, &p, CELL)
    };
    let centered = run_lens(0.025, 0.025);
    let offset = run_lens(0.010, 0.040);

    let window = AnalysisWindow::centered(0.75e-3, 0.75e-3);
    let s_in = rms_width(&source, &window).unwrap()[0];
    let s_out = rms_width(&centered, &window).unwrap()[0];
    let rel = ((s_out - s_in) / s_in).abs();
    c.check(
        "reconstructed RMS width within 25% of source",
        rel <= 0.25,
        format!("sigma_in = {:.1} um, sigma_out = {:.1} um, rel {rel:.3}", s_in * 1e6, s_out * 1e6),
    );

    let d = rel_l2(&offset, &centered);
    c.check(
        "cell reposition (u=10 mm, v=40 mm) changes output < 5%",
        d < 0.05,
        format!("relative L2 = {d:.2e}"),
    );
    c.finish();
}

#[test]
fn criterion_09_transmission_soft_check() {
    let mut c = Criterion::new("criterion 9");
    let p = elimination_cell();
    let gamma = p.gamma;
    let pts = transmission_spectrum(&p, &[-gamma, gamma, 50.0 * gamma], CELL);
    for (delta, t) in &pts[..2] {
        c.check(
            "T(+-gamma) within [0.5%, 5%]",
            (0.005..=0.05).contains(t),
            format!("T({:+.0} kHz) = {:.3}%", delta / (2.0 * PI * 1e3), t * 1e2),
        );
    }
    let t_far = pts[2].1;
    let e6 = (-6.0f64).exp();
    c.check(
        "T(delta >> gamma) ~ e^-6",
        ((t_far - e6) / e6).abs() < 0.01,
        format!("T = {:.4}%, e^-6 = {:.4}%", t_far * 1e2, e6 * 1e2),
    );
    c.finish();
}

#[test]
fn criterion_10_randomized_property_battery() {
    let mut c = Criterion::new("criterion 10");
    let mut rng = ChaCha8Rng::seed_from_u64(0x510_317);
    let q = 2.0 * PI / LAMBDA;

    let random_field = |rng: &mut ChaCha8Rng, g: Grid2D| {
        let values = (0..g.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        ComplexField::new(g, values).unwrap()
    };

    // Parseval up to 1024^2
    let mut worst = 0.0f64;
    for &(nx, ny) in &[(32usize, 48usize), (257, 129), (1024, 1024)] {
        let g = Grid2D::new(nx, ny, 5e-6, 7e-6).unwrap();
        let f = random_field(&mut rng, g);
        let s = to_spectrum(&f);
        worst = worst.max((s.power() - f.power()).abs() / f.power());
        let back = from_spectrum(&s);
        let err = rel_l2(&back, &f);
        worst = worst.max(err);
    }
    c.check(
        "Parseval + round trip to 1e-12 up to 1024^2",
        worst < 1e-12,
        format!("worst relative error {worst:.2e}"),
    );

    // linearity of transform and propagation
    let g = Grid2D::new(48, 40, 4e-6, 6e-6).unwrap();
    let fa = random_field(&mut rng, g);
    let fb = random_field(&mut rng, g);
    let (ca, cb) = (Complex64::new(0.8, -0.3), Complex64::new(-1.2, 0.5));
    let combo = ComplexField::new(
        g,
        fa.values()
            .iter()
            .zip(fb.values())
            .map(|(a, b)| ca * a + cb * b)
            .collect(),
    )
    .unwrap();
    let tf = free_space_tf(&g, q, 0.03);
    let lhs = propagate(&combo, &tf).unwrap();
    let rhs = ComplexField::new(
        g,
        propagate(&fa, &tf)
            .unwrap()
            .values()
            .iter()
            .zip(propagate(&fb, &tf).unwrap().values())
            .map(|(a, b)| ca * a + cb * b)
            .collect(),
    )
    .unwrap();
    let lin_err = rel_l2(&lhs, &rhs);
    c.check(
        "propagation linear to 1e-12",
        lin_err < 1e-12,
        format!("relative error {lin_err:.2e}"),
    );

    // composition and reversibility
    let p = elimination_cell();
    let two_step = propagate(
        &propagate(&fa, &eit_tf(&g, &p, 0.02).unwrap()).unwrap(),
        &eit_tf(&g, &p, 0.03).unwrap(),
    )
    .unwrap();
    let direct = propagate(&fa, &eit_tf(&g, &p, CELL).unwrap()).unwrap();
    let comp_err = rel_l2(&two_step, &direct);
    c.check(
        "EIT slab composition to 1e-12",
        comp_err < 1e-12,
        format!("relative error {comp_err:.2e}"),
    );
    let back = propagate(
        &propagate(&fa, &free_space_tf(&g, q, 0.04)).unwrap(),
        &free_space_tf(&g, q, -0.04),
    )
    .unwrap();
    let rev_err = rel_l2(&back, &fa);
    c.check(
        "free-space reversibility to 1e-12",
        rev_err < 1e-12,
        format!("relative error {rev_err:.2e}"),
    );

    // tilt covariance, random points
    let mut tilt_exact = true;
    for _ in 0..200 {
        let gamma = gamma_khz(70.0);
        let p0 = MediumParams::new(
            D,
            gamma,
            rng.gen_range(0.0..gamma),
            rng.gen_range(-2.0..2.0) * gamma,
            ALPHA,
            LAMBDA,
        )
        .unwrap();
        let tilt = [rng.gen_range(-5e-4..5e-4), rng.gen_range(-5e-4..5e-4)];
        let pt = p0.with_pump_tilt(tilt);
        let k = [rng.gen_range(-4e4..4e4), rng.gen_range(-4e4..4e4)];
        let shifted = [k[0] - pt.q() * tilt[0], k[1] - pt.q() * tilt[1]];
        tilt_exact &= pt.chi_eit(k) == p0.chi_eit(shifted);
    }
    c.check(
        "tilt covariance exact on 200 random points",
        tilt_exact,
        "bitwise equality".into(),
    );

    // contrast scaling invariance, random scales
    let gg = Grid2D::new(620, 8, 4.88e-6, 4.88e-6).unwrap();
    let spec = GratingSpec {
        period: 62.0 * gg.dx(),
        duty: 0.5,
        axis: GratingAxis::X,
        envelope: None,
    };
    let grating = binary_grating(&gg, &spec).unwrap();
    let blurred = propagate(&grating, &free_space_tf(&gg, q, 0.015)).unwrap();
    let win = AnalysisWindow::full();
    let c_ref = grating_contrast(&blurred, &spec, &win).unwrap().contrast;
    let mut scale_ok = true;
    for _ in 0..20 {
        let s = 10f64.powf(rng.gen_range(-3.0..3.0));
        let cs = grating_contrast(&blurred.map(|v| s * v), &spec, &win)
            .unwrap()
            .contrast;
        scale_ok &= (cs - c_ref).abs() <= 1e-12;
    }
    c.check(
        "contrast invariant under intensity scaling",
        scale_ok,
        format!("C = {c_ref:+.4} across 20 random scales"),
    );
    c.finish();
}

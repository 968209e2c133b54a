//! End-to-end acceptance gates. Each test prints exactly one PASS or FAIL
//! line (run with `--nocapture` to see the PASS lines) with the measured
//! numbers next to their thresholds.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fdf_core::config::{EquationKind, SimConfig};
use fdf_core::diagnostics::render_diagnostics;
use fdf_core::dispersion::{
    omega, resonance, verify_dispersion_bounds, verify_resonance_bounds, Dispersion, EquationSpec,
    Quantity, Regime, ResonanceSampler, Sign,
};
use fdf_core::dynamics::{default_dt, run, snapped_dt, RunOptions, RunPlan};
use fdf_core::experiments::{
    illposed_probe, illposed_probe_with_resolution, limit_study, scaling_check, transform_check,
};
use fdf_core::init;
use fdf_core::init::InitialData;
use fdf_core::spectral::{dealiased_power_derivative, inverse, transform, SpectralGrid, Spectrum};

fn gate(id: u32, name: &str, ok: bool, detail: String) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {id:02} {verdict} [{name}]: {detail}");
    assert!(ok, "criterion {id:02} [{name}] failed: {detail}");
}

/// The reference conservation run: defocusing depth-1 equation, small
/// Gaussian data on a 1024-point box of length 64 pi, integrated to t = 1
/// with the default step size.
fn reference_setup() -> (SpectralGrid, EquationSpec, fdf_core::spectral::Field, f64) {
    let grid = SpectralGrid::new(1024, 64.0 * PI).unwrap();
    let eq = EquationSpec::fdf(1.0).unwrap();
    let u0 = init::gaussian(&grid, 0.1, 2.0).unwrap();
    let dt = snapped_dt(1.0, default_dt(&grid, eq.dispersion));
    (grid, eq, u0, dt)
}

#[test]
fn criterion_01_conservation() {
    let start = Instant::now();
    let (_, eq, u0, dt) = reference_setup();
    let plan = RunPlan {
        dt,
        t_end: 1.0,
        output_every: 100,
        snapshot_times: vec![],
    };
    let out = run(&u0, &eq, &plan, &RunOptions::default()).unwrap();
    let first = out.records[0];
    let drift = |f: fn(&fdf_core::observables::InvariantRecord) -> f64| -> f64 {
        let base = f(&first);
        out.records
            .iter()
            .map(|r| ((f(r) - base) / base).abs())
            .fold(0.0, f64::max)
    };
    let mass_drift = drift(|r| r.mass);
    let l2_drift = drift(|r| r.l2);
    let h_drift = drift(|r| r.hamiltonian);
    let elapsed = start.elapsed().as_secs_f64();
    gate(
        1,
        "conservation",
        mass_drift <= 1e-12 && l2_drift <= 1e-10 && h_drift <= 1e-7 && elapsed <= 60.0,
        format!(
            "relative drifts over {} steps: mass {mass_drift:.2e} (<= 1e-12), \
             l2 {l2_drift:.2e} (<= 1e-10), hamiltonian {h_drift:.2e} (<= 1e-7); \
             {elapsed:.1} s (<= 60 s)",
            out.final_state.step_count
        ),
    );
}

#[test]
fn criterion_02_integrator_order() {
    // On the reference run the full default step rule is capped by phase
    // rotation at dt = 1/323, where the dt^4 error (~1e-15) drowns in
    // roundoff and refinement measures noise. The refinement base drops
    // only that cap, keeping the rule's accuracy scale 0.1 dx^2 L / (2 pi),
    // which puts the refinement signal four decades above the floor.
    let (grid, eq, u0, _) = reference_setup();
    let dx = grid.dx();
    let dt = snapped_dt(1.0, 0.1 * dx * dx * grid.length() / (2.0 * PI));
    let final_coeffs = |dt: f64| -> Vec<Complex64> {
        let plan = RunPlan {
            dt,
            t_end: 1.0,
            output_every: u64::MAX,
            snapshot_times: vec![],
        };
        let out = run(&u0, &eq, &plan, &RunOptions::default()).unwrap();
        transform(&out.final_state.field).coeffs().to_vec()
    };
    let coarse = final_coeffs(dt);
    let medium = final_coeffs(dt / 2.0);
    let fine = final_coeffs(dt / 4.0);
    let dist = |a: &[Complex64], b: &[Complex64]| -> f64 {
        (grid.length()
            * a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>())
        .sqrt()
    };
    let e1 = dist(&coarse, &medium);
    let e2 = dist(&medium, &fine);
    let order = (e1 / e2).log2();
    gate(
        2,
        "integrator order",
        (3.7..=4.3).contains(&order),
        format!("observed order {order:.3} in [3.7, 4.3] (e1 {e1:.3e}, e2 {e2:.3e}, dt {dt:.4e})"),
    );
}

#[test]
fn criterion_03_dispersion_bounds() {
    let start = Instant::now();
    let band = 2.0 * PI / 3.0;
    let mut ok = true;
    let mut details = Vec::new();
    for &delta in &[1.0, 4.0, 16.0] {
        let high = verify_dispersion_bounds(delta, 8.0 / delta, 4096.0, 4).unwrap();
        let hr = high
            .iter()
            .find(|r| r.regime == Regime::High && r.quantity == Quantity::Omega)
            .unwrap();
        let low = verify_dispersion_bounds(delta, 2.0_f64.powi(-20), 1.0 / (4.0 * delta), 4)
            .unwrap();
        let lr = low
            .iter()
            .find(|r| r.regime == Regime::Low && r.quantity == Quantity::Omega)
            .unwrap();
        ok &= hr.spread() <= 1.5 && lr.min_ratio >= 0.9 * band && lr.max_ratio <= 1.1 * band;
        details.push(format!(
            "delta {delta}: high spread {:.4} (<= 1.5) on {} samples, \
             low ratio/(2pi/3) in [{:.4}, {:.4}] (within [0.9, 1.1]) on {} samples",
            hr.spread(),
            hr.sample_count,
            lr.min_ratio / band,
            lr.max_ratio / band,
            lr.sample_count
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();
    ok &= elapsed <= 1.0;
    details.push(format!("{elapsed:.2} s (<= 1 s)"));
    gate(3, "dispersion bounds", ok, details.join("; "));
}

#[test]
fn criterion_04_resonance_bounds() {
    let sampler = ResonanceSampler::default();
    let report = verify_resonance_bounds(1.0, &sampler).unwrap();
    let triple = resonance(0.5, 1.0, 100.0, Dispersion::Fdf { delta: 1.0 }).abs();
    // Reference value from a 50-digit evaluation of the same four-term sum.
    let reference = 300.9990575569916;
    let ok = report.min_ratio >= 0.125
        && report.max_ratio <= 8.0
        && (triple - 301.0).abs() <= 0.5
        && (triple - reference).abs() <= 1e-9;
    gate(
        4,
        "resonance bounds",
        ok,
        format!(
            "|resonance|/(|x1+x2| |x3|) in [{:.4}, {:.4}] (within [0.125, 8]) over {} triples; \
             |resonance(0.5, 1, 100)| = {triple:.6} (301.0 +/- 0.5, reference {reference})",
            report.min_ratio, report.max_ratio, report.sample_count
        ),
    );
}

/// A study config around Gaussian data; the equation kind is the cubic
/// depth equation wherever a study consults it.
fn study_config(n: usize, length: f64, amplitude: f64, t_end: f64, dt: Option<f64>) -> SimConfig {
    SimConfig {
        equation: EquationKind::Mfdf,
        delta: Some(1.0),
        k: 2,
        sign: Sign::Defocusing,
        grid_n: n,
        grid_length: length,
        dt,
        t_end,
        output_every: 100,
        snapshot_times: vec![],
        init: InitialData::Gaussian {
            amplitude,
            sigma: 2.0,
        },
        seed: 0,
    }
}

#[test]
fn criterion_05_deep_water_limit() {
    let start = Instant::now();
    let config = study_config(1024, 64.0 * PI, 0.1, 1.0, None);
    let result = limit_study(&config, &[1.0, 2.0, 4.0, 8.0, 16.0], 0.5, false).unwrap();
    let decreasing = result.errors.windows(2).all(|w| w[0] > w[1]);
    let rate = result.fitted_rate.unwrap_or(f64::NAN);
    let elapsed = start.elapsed().as_secs_f64();
    gate(
        5,
        "deep-water limit",
        decreasing && (0.7..=1.3).contains(&rate) && elapsed <= 600.0,
        format!(
            "errors over depths 1..16: [{}] strictly decreasing: {decreasing}; \
             fitted rate {rate:.4} in [0.7, 1.3]; {elapsed:.1} s (<= 600 s)",
            result
                .errors
                .iter()
                .map(|e| format!("{e:.3e}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    );
}

#[test]
fn criterion_06_scaling_symmetry() {
    // An explicit coarse step keeps the discrepancy in the dt^4 regime,
    // so the refinement clause measures the integrator rather than
    // roundoff noise.
    let base_config = study_config(512, 32.0 * PI, 0.4, 1.0, Some(1.0 / 40.0));
    let base = scaling_check(&base_config, 2.0).unwrap();
    let fine_config = study_config(1024, 32.0 * PI, 0.4, 1.0, Some(1.0 / 80.0));
    let fine = scaling_check(&fine_config, 2.0).unwrap();
    let reduction = base / fine;
    gate(
        6,
        "scaling symmetry",
        base <= 1e-6 && reduction >= 8.0,
        format!(
            "lambda = 2 discrepancy {base:.3e} (<= 1e-6); halving dt and doubling modes \
             reduces it {reduction:.1}x (>= 8x, to {fine:.3e})"
        ),
    );
}

#[test]
fn criterion_07_depth_rescaling_transform() {
    let config = study_config(1024, 64.0 * PI, 0.1, 1.0, None);
    let identity = transform_check(&config, 3.0 / (2.0 * PI)).unwrap();
    let deep = transform_check(&config, 1.0).unwrap();
    gate(
        7,
        "depth-rescaling transform",
        identity <= 1e-12 && deep <= 1e-6,
        format!(
            "discrepancy {identity:.3e} at the unit-speed depth 3/(2 pi) (<= 1e-12); \
             {deep:.3e} at depth 1 (<= 1e-6)"
        ),
    );
}

#[test]
fn criterion_08_window_probe_growth() {
    let start = Instant::now();
    let expected = 2.0_f64.powf(1.0 - 2.0 * 0.25);
    let mut values = Vec::new();
    for &carrier in &[64.0, 128.0, 256.0, 512.0] {
        values.push(illposed_probe(carrier, 0.1, 0.25, 0.5, 4.0).unwrap().hs_value);
    }
    let ratios: Vec<f64> = values.windows(2).map(|w| w[1] / w[0]).collect();
    let ratios_ok = ratios.iter().all(|r| (r - expected).abs() <= 0.25 * expected);

    let doubled = illposed_probe_with_resolution(64.0, 0.1, 0.25, 0.5, 4.0, 256, 512).unwrap();
    let sensitivity = (doubled.hs_value - values[0]).abs() / values[0];

    let low = illposed_probe(64.0, 0.1, 0.75, 0.5, 4.0).unwrap().hs_value;
    let high = illposed_probe(128.0, 0.1, 0.75, 0.5, 4.0).unwrap().hs_value;
    let decays = high < low;

    let elapsed = start.elapsed().as_secs_f64();
    gate(
        8,
        "window probe growth",
        ratios_ok && sensitivity <= 0.01 && decays,
        format!(
            "carrier-doubling ratios at s = 1/4: [{}] all within 25% of {expected:.4}; \
             node-doubling sensitivity {sensitivity:.2e} (<= 0.01); \
             s = 3/4 ratio {:.4} < 1: {decays}; {elapsed:.1} s",
            ratios
                .iter()
                .map(|r| format!("{r:.4}"))
                .collect::<Vec<_>>()
                .join(", "),
            high / low
        ),
    );
}

#[test]
fn criterion_10_deterministic_diagnostics() {
    let pipeline = || -> String {
        let config = study_config(256, 32.0 * PI, 0.2, 0.25, None);
        let grid = config.grid().unwrap();
        let u0 = config.initial_field(&grid).unwrap();
        let eq = config.equation_spec().unwrap();
        let mut plan = config.run_plan(&grid, eq.dispersion);
        plan.output_every = 10;
        let out = run(&u0, &eq, &plan, &RunOptions::default()).unwrap();
        render_diagnostics(&out.records)
    };

    let reference = pipeline();
    let repeat = pipeline();
    let mut all_match = reference == repeat;
    let mut detail = vec![format!(
        "sequential repeat identical: {} ({} bytes)",
        reference == repeat,
        reference.len()
    )];
    for threads in [2, 4] {
        let outputs: Vec<String> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads).map(|_| scope.spawn(pipeline)).collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        let same = outputs.iter().all(|o| *o == reference);
        all_match &= same;
        detail.push(format!("{threads} concurrent runs identical: {same}"));
    }
    gate(10, "deterministic diagnostics", all_match, detail.join("; "));
}

#[test]
fn criterion_09_oracle_equivalence() {
    // Dealiased cubic derivative against a direct convolution oracle.
    let n = 32;
    let half = n / 2;
    let grid = SpectralGrid::new(n, 7.0).unwrap();
    let mut worst = 0.0_f64;
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
        coeffs[0] = Complex64::new(rng.gen_range(-0.1..0.1), 0.0);
        for j in 1..half {
            let c = Complex64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
            coeffs[j] = c;
            coeffs[n - j] = c.conj();
        }
        let u = inverse(&Spectrum::new(grid.clone(), coeffs.clone()).unwrap());
        let got = transform(&dealiased_power_derivative(&u, 2).unwrap());

        // Signed-mode lookup; modes outside the grid band are zero.
        let m = |j: i64| -> Complex64 {
            if j >= 0 && (j as usize) < half {
                coeffs[j as usize]
            } else if j < 0 && (-j as usize) < half {
                coeffs[(n as i64 + j) as usize]
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        let lo = -(half as i64) + 1;
        let hi = half as i64 - 1;
        for out_mode in lo..=hi {
            let mut cube = Complex64::new(0.0, 0.0);
            for j in lo..=hi {
                for l in lo..=hi {
                    cube += m(j) * m(l) * m(out_mode - j - l);
                }
            }
            let xi = 2.0 * PI * out_mode as f64 / grid.length();
            let want = Complex64::new(0.0, xi / 3.0) * cube;
            let idx = if out_mode >= 0 {
                out_mode as usize
            } else {
                (n as i64 + out_mode) as usize
            };
            worst = worst.max((got.coeffs()[idx] - want).norm());
        }
        worst = worst.max(got.coeffs()[half].norm());
    }

    // Resonance against a re-derivation of the symbol through tanh.
    let omega_ref = |xi: f64, delta: f64| -> f64 {
        if xi == 0.0 {
            0.0
        } else {
            let x = 2.0 * PI * delta * xi;
            xi * xi / x.tanh() - xi / (2.0 * PI * delta)
        }
    };
    let sampler = ResonanceSampler {
        seed: 7,
        count: 500,
        ..ResonanceSampler::default()
    };
    let mut worst_res = 0.0_f64;
    for (x1, x2, x3) in sampler.draw().unwrap() {
        let d = Dispersion::Fdf { delta: 1.0 };
        let via_omega = resonance(x1, x2, x3, d);
        let direct = omega_ref(x1, 1.0) + omega_ref(x2, 1.0) + omega_ref(x3, 1.0)
            - omega_ref(x1 + x2 + x3, 1.0);
        let scale = omega(x1, d).abs()
            + omega(x2, d).abs()
            + omega(x3, d).abs()
            + omega(x1 + x2 + x3, d).abs();
        worst_res = worst_res.max((via_omega - direct).abs() / scale.max(1.0));
    }

    let ok = worst <= 1e-12 && worst_res <= 1e-13;
    gate(
        9,
        "oracle equivalence",
        ok,
        format!(
            "cubic term vs convolution oracle: max coefficient gap {worst:.2e} (<= 1e-12) \
             over 20 seeds; resonance vs tanh re-derivation: max relative gap {worst_res:.2e} \
             (<= 1e-13) over 500 triples"
        ),
    );
}

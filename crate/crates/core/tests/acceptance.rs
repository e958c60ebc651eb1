//! Acceptance suite. Runs each criterion in turn and prints one
//! `PASS`/`FAIL` line per criterion; exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kgpho::oracle::{verify_level, verify_params, OracleConfig};
use kgpho::quad::integrate;
use kgpho::specfun::laguerre;
use kgpho::spectra::{
    free_field_level, ho_cardano, ho_residual, kg_ho_energy, kg_ho_series, landau_energy,
    nonrel_energy_with_fields, nonrel_ho_energy, nonrel_pho_energy, principal_level,
    solve_kg_energy, sweep_levels, CardanoVariant, SweepParam, SweepRange,
};
use kgpho::{Branch, Method, PhysicalSystem, RadialWaveFunction, SpectralParams};

/// Golden value from 40-digit bisection.
const KG_GOLDEN: f64 = 2.367_543_129_131_168_5;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_system(r: &mut ChaCha8Rng) -> PhysicalSystem {
    PhysicalSystem::new(
        r.gen_range(0.1..3.0),
        r.gen_range(0.5..3.0),
        r.gen_range(0.0..2.0),
        r.gen_range(-0.5..0.5),
    )
    .unwrap()
}

// 1. Every root of the relativistic equations satisfies the quantization
//    condition.
fn quantization_identity() {
    let mut r = rng(1);
    let mut roots = 0;
    for case in 0..50 {
        let sys = random_system(&mut r);
        let state = sys.state(r.gen_range(0..5), r.gen_range(-3..=3));
        let branch = if case % 2 == 0 { Branch::Positive } else { Branch::Negative };
        let levels = solve_kg_energy(&sys, &state, branch).unwrap();
        for l in &levels {
            assert!(
                l.residual.abs() <= 1e-12,
                "{sys:?} {state:?} {branch:?}: E = {}, residual {}",
                l.energy,
                l.residual
            );
        }
        roots += levels.len();
    }
    assert!(roots >= 50, "only {roots} roots over 50 systems");
}

// 2. Richardson-extrapolated finite differences reproduce 2(2n+1+β)γ.
fn oracle_agreement() {
    let mut r = rng(2);
    let cfg = OracleConfig {
        n_points: 8000,
        ..OracleConfig::default()
    };
    for _ in 0..25 {
        let beta: f64 = r.gen_range(0.5..4.0);
        let gamma: f64 = r.gen_range(0.2..5.0);
        for n in 0..4u32 {
            let params = SpectralParams {
                nu2: 2.0 * (2.0 * f64::from(n) + 1.0 + beta) * gamma,
                beta2: beta * beta,
                gamma2: gamma * gamma,
                branch: Branch::Positive,
            };
            let v = verify_params(&params, n, &cfg).unwrap();
            assert!(v.deviation <= 1e-6, "beta {beta} gamma {gamma} n {n}: {v:?}");
            assert!(
                (3.6..=4.4).contains(&v.convergence_ratio),
                "beta {beta} gamma {gamma} n {n}: ratio {}",
                v.convergence_ratio
            );
        }
    }
}

// 3. End-to-end relativistic level.
fn kg_level_end_to_end() {
    let sys = PhysicalSystem::new(1.0, 1.0, 0.0, 0.0).unwrap();
    let mut level = principal_level(&sys, &sys.state(0, 1), Method::Positive).unwrap();
    assert!(
        (level.energy - KG_GOLDEN).abs() <= 1e-12,
        "{} vs {KG_GOLDEN}",
        level.energy
    );
    let v = verify_level(&sys, &mut level, &OracleConfig::default()).unwrap();
    assert!(v.deviation <= 1e-5, "{v:?}");
    assert_eq!(level.oracle_dev, Some(v.deviation));
}

// 4. Landau levels against the oracle.
fn landau_limit() {
    let mut r = rng(4);
    for _ in 0..20 {
        let wc: f64 = r.gen_range(0.2..3.0);
        let xi: f64 = r.gen_range(0.0..1.0);
        let sys = PhysicalSystem::new(0.0, 1.0, wc, xi).unwrap();
        let state = sys.state(r.gen_range(0..4), r.gen_range(1..4));
        let mut level = free_field_level(&sys, &state).unwrap();
        let want = (f64::from(state.n) + state.m_eff + 0.5) * wc;
        assert!((level.energy - want).abs() <= 1e-14 * want);
        let v = verify_level(&sys, &mut level, &OracleConfig::default()).unwrap();
        assert!(v.deviation <= 1e-6, "{sys:?} {state:?}: {v:?}");

        // the negative branch at V0 = 0 is the same level
        let neg = principal_level(&sys, &state, Method::Negative).unwrap();
        assert_eq!(neg.energy, level.energy);
    }
}

// 5. Non-relativistic reductions.
fn nonrel_reductions() {
    let mut r = rng(5);
    for _ in 0..100 {
        let v0: f64 = r.gen_range(0.05..5.0);
        let rho0: f64 = r.gen_range(0.3..4.0);
        let n = r.gen_range(0..6);
        let m = r.gen_range(-4..=4);

        let sys = PhysicalSystem::new(v0, rho0, 0.0, 0.0).unwrap();
        let state = sys.state(n, m);
        let (with_fields, _) = nonrel_energy_with_fields(&sys, &state).unwrap();
        let pho = nonrel_pho_energy(&sys, &state).unwrap();
        let scale = pho.energy.abs().max(1.0);
        assert!(
            (with_fields.energy - pho.energy).abs() <= 1e-14 * scale,
            "{} vs {}",
            with_fields.energy,
            pho.energy
        );

        let wc: f64 = r.gen_range(0.1..3.0);
        let xi: f64 = r.gen_range(0.0..1.0);
        let sys = PhysicalSystem::new(0.0, rho0, wc, xi).unwrap();
        let state = sys.state(n, m.abs().max(1));
        let (with_fields, _) = nonrel_energy_with_fields(&sys, &state).unwrap();
        let landau = landau_energy(state.n, state.m_eff, wc).unwrap();
        assert!(
            (with_fields.energy - landau).abs() <= 1e-14 * landau,
            "{} vs {landau}",
            with_fields.energy
        );
    }
}

// 6. Harmonic limit: closed form, printed coefficient, series.
fn harmonic_limit() {
    let mut r = rng(6);
    let mut checked = 0;
    while checked < 100 {
        let v0: f64 = r.gen_range(0.01..5.0);
        let rho0: f64 = r.gen_range(0.3..3.0);
        let sys = PhysicalSystem::new(v0, rho0, 0.0, 0.0).unwrap();
        let state = sys.state(r.gen_range(0..6), r.gen_range(-4..=4));
        let (level, p) = kg_ho_energy(&sys, &state).unwrap();
        if 27.0 * p.k * p.n_prime * p.n_prime < 16.0 {
            continue;
        }
        let closed = p.closed_form_energy.unwrap();
        assert!(
            (closed - p.bisection_energy).abs() <= 1e-12 * closed,
            "k {} n' {}: {closed} vs {}",
            p.k,
            p.n_prime,
            p.bisection_energy
        );
        assert_eq!(level.energy, closed);
        checked += 1;
    }

    // negative control: coefficient 1 does not solve the energy equation
    let printed = ho_cardano(2.0, 1.0, CardanoVariant::UnitCoefficient).unwrap();
    let corrected = ho_cardano(2.0, 1.0, CardanoVariant::Corrected).unwrap();
    assert!(ho_residual(2.0, 1.0, printed).abs() > 0.1);
    assert!(ho_residual(2.0, 1.0, corrected).abs() < 1e-14);

    // series in λ₂ against the exact n′(λ₂) = λ₂√(1 + λ₂/2)/√k
    let sys = PhysicalSystem::new(1.3, 0.9, 0.0, 0.0).unwrap();
    let k = sys.spring_constant();
    for i in 1..=30 {
        let l2 = 0.01 * f64::from(i);
        let exact = l2 * (1.0 + 0.5 * l2).sqrt() / k.sqrt();
        let e1 = (kg_ho_series(&sys, l2, 1).unwrap() - exact).abs();
        let e3 = (kg_ho_series(&sys, l2, 3).unwrap() - exact).abs();
        assert!(e3 < e1, "lambda2 {l2}: order 3 error {e3}, order 1 error {e1}");
    }

    // first-order inversion λ₂ = n′√k is the non-relativistic level
    for n in 0..4 {
        for m in -2..=2 {
            let state = sys.state(n, m);
            let e_nr = nonrel_ho_energy(&sys, &state).unwrap().energy;
            let n_prime = 1.0 + f64::from(m.abs()) + 2.0 * f64::from(n);
            assert_eq!(e_nr, n_prime * k.sqrt());
            let back = kg_ho_series(&sys, e_nr, 1).unwrap();
            assert!((back - n_prime).abs() <= 4.0 * f64::EPSILON * n_prime);
        }
    }
}

/// `g″ + g′/r + (ν² − γ²r² − β²/r²) g`, relative to the largest term.
fn ode_residual(wf: &RadialWaveFunction, nu2: f64, r: f64) -> f64 {
    let (n, b, g) = (wf.n, wf.beta, wf.gamma);
    let x = g * r * r;
    let lag = |k: u32, a: f64| laguerre(k, a, x).unwrap();
    let c0 = lag(n, b);
    let dl = if n >= 1 { -lag(n - 1, b + 1.0) } else { 0.0 };
    let ddl = if n >= 2 { lag(n - 2, b + 2.0) } else { 0.0 };

    let a0 = r.powf(b);
    let a1 = b * r.powf(b - 1.0);
    let a2 = b * (b - 1.0) * r.powf(b - 2.0);
    let e0 = (-0.5 * x).exp();
    let e1 = -g * r * e0;
    let e2 = (g * g * r * r - g) * e0;
    let c1 = 2.0 * g * r * dl;
    let c2 = 2.0 * g * dl + 4.0 * g * g * r * r * ddl;

    let f = wf.norm * a0 * e0 * c0;
    let d1 = wf.norm * (a1 * e0 * c0 + a0 * e1 * c0 + a0 * e0 * c1);
    let d2 = wf.norm
        * (a2 * e0 * c0
            + a0 * e2 * c0
            + a0 * e0 * c2
            + 2.0 * (a1 * e1 * c0 + a1 * e0 * c1 + a0 * e1 * c1));
    let pot = (nu2 - g * g * r * r - b * b / (r * r)) * f;
    let res = d2 + d1 / r + pot;
    res.abs() / (d2.abs() + (d1 / r).abs() + pot.abs())
}

/// `∫₀^∞ x^α e^(−x) L_i L_j dx / √(h_i h_j)` with `x = t²`.
fn laguerre_overlap(i: u32, j: u32, alpha: f64) -> f64 {
    let top = i.max(j) as f64;
    let t_max = (4.0 * top + 2.0 * alpha + 80.0).sqrt();
    let integrand = |t: f64| {
        let x = t * t;
        if t == 0.0 {
            return 0.0;
        }
        2.0 * t * (alpha * x.ln() - x).exp() * laguerre(i, alpha, x).unwrap() * laguerre(j, alpha, x).unwrap()
    };
    let log_h = |k: u32| {
        statrs::function::gamma::ln_gamma(f64::from(k) + alpha + 1.0)
            - statrs::function::gamma::ln_gamma(f64::from(k) + 1.0)
    };
    let scale = (0.5 * (log_h(i) + log_h(j))).exp();
    integrate(integrand, 0.0, t_max, 1e-12 * scale) / scale
}

// 7. Wave functions of random solved states.
fn wave_functions() {
    let mut r = rng(7);
    let mut done = 0;
    while done < 30 {
        let sys = random_system(&mut r);
        let state = sys.state(r.gen_range(0..7), r.gen_range(-3..=3));
        let Ok(level) = principal_level(&sys, &state, Method::Positive) else {
            continue;
        };
        let wf = RadialWaveFunction::for_level(&sys, &level).unwrap();
        let n = wf.n;

        let norm = wf.numerical_norm(wf.default_r_max());
        assert!((norm - 1.0).abs() <= 1e-8, "{wf:?}: norm {norm}");
        // same integral with r = t², which removes the r^β cusp at the origin
        let t_max = wf.default_r_max().sqrt();
        let norm_t = integrate(|t| 2.0 * t.powi(3) * wf.eval(t * t).powi(2), 0.0, t_max, 1e-13);
        assert!((norm_t - 1.0).abs() <= 1e-8, "{wf:?}: norm {norm_t}");

        let nodes = wf.count_nodes(wf.node_r_max(), 256 * (n as usize + 1)).unwrap();
        assert_eq!(nodes.nodes, n as usize, "{wf:?}");
        assert!(!nodes.under_resolved);

        for j in [0, n.saturating_sub(1), n, n + 1] {
            let o = laguerre_overlap(n, j, wf.beta);
            let want = if j == n { 1.0 } else { 0.0 };
            assert!((o - want).abs() <= 1e-8, "alpha {} <{n}|{j}> = {o}", wf.beta);
        }

        let nu2 = 2.0 * (2.0 * f64::from(n) + 1.0 + wf.beta) * wf.gamma;
        let r_max = wf.node_r_max();
        for i in 1..=50 {
            let rr = r_max * f64::from(i) / 50.0;
            let res = ode_residual(&wf, nu2, rr);
            assert!(res <= 1e-6, "{wf:?} r {rr}: residual {res}");
        }
        done += 1;
    }
}

// 8. Field dependence of the m splitting and flux invariance.
fn splitting_and_flux() {
    let sys = PhysicalSystem::new(1.0, 1.0, 0.0, 0.0).unwrap();
    for method in [Method::Positive, Method::Nonrel] {
        let rows = sweep_levels(
            &sys,
            SweepParam::BField,
            SweepRange { lo: 0.0, hi: 1.0, steps: 2 },
            &[(0, 1), (0, 2)],
            method,
        )
        .unwrap();
        let d0 = rows[1].delta_e.unwrap();
        let d1 = rows[3].delta_e.unwrap();
        assert_eq!((rows[1].param, rows[3].param), (0.0, 1.0));
        assert!((d0 - d1).abs() > 1e-6, "{method:?}: {d0} vs {d1}");
    }

    let mut r = rng(8);
    for _ in 0..40 {
        let base = random_system(&mut r);
        let n = r.gen_range(0..4);
        let m = r.gen_range(-3..=3);
        let shifted = PhysicalSystem {
            flux_xi: base.flux_xi - 1.0,
            ..base
        };
        for method in [Method::Positive, Method::Nonrel] {
            let a = principal_level(&base, &base.state(n, m), method).unwrap().energy;
            let b = principal_level(&shifted, &shifted.state(n, m + 1), method)
                .unwrap()
                .energy;
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{base:?}: {a} vs {b}");
        }
    }
}

// 9. Identical CLI runs give byte-identical output.
fn cli_determinism() {
    let exe = env!("CARGO_BIN_EXE_kgpho");
    let runs: &[&[&str]] = &[
        &["spectrum", "--v0", "1", "--r0", "1", "--n", "0..2", "--m", "-2..2", "--format", "csv"],
        &["spectrum", "--v0", "0.7", "--b", "0.5", "--xi", "0.25", "--n", "0..1", "--m", "0..2", "--verify", "--format", "json"],
        &["spectrum", "--limit", "kg-ho", "--n", "0..3", "--m", "-1..1", "--format", "json"],
        &["wavefunction", "--n", "2", "--m", "1", "--b", "0.3", "--samples", "64"],
        &["sweep", "--param", "b", "--from", "0", "--to", "2", "--steps", "5", "--m", "0..1", "--format", "json"],
        &["verify", "--v0", "0", "--b", "1", "--branch", "negative", "--n", "0..1", "--m", "1..2"],
    ];
    let dir = tempfile::tempdir().unwrap();
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..3 {
            let path = dir.path().join(format!("run{i}_{rep}"));
            let status = Command::new(exe)
                .args(*args)
                .arg("--out")
                .arg(&path)
                .status()
                .unwrap();
            assert!(status.success(), "{args:?}: {status}");
            outputs.push(std::fs::read(&path).unwrap());
        }
        assert!(!outputs[0].is_empty());
        assert!(outputs.windows(2).all(|w| w[0] == w[1]), "{args:?} differs between runs");
    }
}

fn main() {
    let criteria: [(&str, fn(), Duration); 9] = [
        ("quantization identity", quantization_identity, Duration::from_secs(1)),
        ("oracle agreement", oracle_agreement, Duration::from_secs(30)),
        ("end-to-end KG level", kg_level_end_to_end, Duration::from_secs(5)),
        ("Landau limit", landau_limit, Duration::from_secs(30)),
        ("non-relativistic reductions", nonrel_reductions, Duration::from_secs(5)),
        ("harmonic closed form and series", harmonic_limit, Duration::from_secs(5)),
        ("wave functions", wave_functions, Duration::from_secs(20)),
        ("field-dependent splitting and flux shift", splitting_and_flux, Duration::from_secs(10)),
        ("CLI determinism", cli_determinism, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f));
        let elapsed = start.elapsed();
        let verdict = match outcome {
            Ok(()) if elapsed <= *budget => "PASS".to_string(),
            Ok(()) => format!("FAIL (over budget {budget:?})"),
            Err(_) => "FAIL".to_string(),
        };
        if !verdict.starts_with("PASS") {
            failed += 1;
        }
        println!(
            "[PRIMARY] criterion {}: {name} ... {verdict} ({:.2}s)",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

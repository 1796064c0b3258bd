//! Acceptance suite: one line per criterion, with its runtime.
//!
//! Reference values are computed here from closed forms (point-dipole force
//! on the axis, analytic zero crossings, Bell-state probabilities) rather
//! than taken from the library.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use sgflux::cli::{deflect, figure2, RunConfig};
use sgflux::deflection::{contract_force, required_moments};
use sgflux::dipole::{force_operator, interaction_hamiltonian, Position3};
use sgflux::epr::{joint_distribution, uniform_grid, BellState, EprScenario, LoopRepresentation, Outcome, Wing};
use sgflux::moments::{acceleration_profile, SpatialMoments, SweepSpec, WavePacket};
use sgflux::oracle::{commutator_convergence, run_oracle, OracleConfig};
use sgflux::spin::{embed, spin_dot, spin_generator, Axis, NamedState, Slot, TwoSpinOperator, C64};
use sgflux::units::{derive_length_unit, PhysicalParams};

type Verdict = Result<String, String>;

// CODATA 2018.
const MU0: f64 = 1.256_637_062_12e-6;
const HBAR: f64 = 1.054_571_817e-34;
const E: f64 = 1.602_176_634e-19;
const M_E: f64 = 9.109_383_701_5e-31;
const M_P: f64 = 1.672_621_923_69e-27;

fn ensure(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn kron2(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> [[C64; 4]; 4] {
    let mut out = [[c(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[i / 2][j / 2] * b[i % 2][j % 2];
        }
    }
    out
}

fn max_diff(a: &TwoSpinOperator, b: &[[C64; 4]; 4]) -> f64 {
    let m = a.to_array();
    (0..16).map(|k| (m[k / 4][k % 4] - b[k / 4][k % 4]).norm()).fold(0.0, f64::max)
}

/// Point force on `|up,up>` from the dipole formula, natural units:
/// `a_z = (9 z / r^5 - 15 z^3 / r^7) / (16 pi)`.
fn parallel_point_force(y: f64, z: f64) -> f64 {
    let r2 = y * y + z * z;
    (9.0 * z / r2.powf(2.5) - 15.0 * z.powi(3) / r2.powf(3.5)) / (16.0 * PI)
}

fn criterion_1() -> Verdict {
    let half = 0.5;
    let sx = [[c(0.0, 0.0), c(half, 0.0)], [c(half, 0.0), c(0.0, 0.0)]];
    let sy = [[c(0.0, 0.0), c(0.0, -half)], [c(0.0, half), c(0.0, 0.0)]];
    let sz = [[c(half, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-half, 0.0)]];
    let id = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
    let mut worst: f64 = 0.0;
    for (axis, m) in [(Axis::X, sx), (Axis::Y, sy), (Axis::Z, sz)] {
        worst = worst.max(max_diff(&embed(&spin_generator(axis), Slot::Particle), &kron2(&m, &id)));
        worst = worst.max(max_diff(&embed(&spin_generator(axis), Slot::Loop), &kron2(&id, &m)));
    }
    let mut comm: f64 = 0.0;
    for slot in [Slot::Particle, Slot::Loop] {
        for (a, b, z) in [(Axis::X, Axis::Y, Axis::Z), (Axis::Y, Axis::Z, Axis::X), (Axis::Z, Axis::X, Axis::Y)] {
            let lhs = embed(&spin_generator(a), slot).commutator(&embed(&spin_generator(b), slot));
            let rhs = embed(&spin_generator(z), slot).to_array().map(|row| row.map(|x| x * c(0.0, 1.0)));
            comm = comm.max(max_diff(&lhs, &rhs));
        }
    }
    // Spectrum of S.S and its eigenvectors.
    let mut ev = spin_dot().matrix().hermitian_eigenvalues().map_err(|e| e.to_string())?;
    ev.sort_by(f64::total_cmp);
    let spec = ev.iter().zip([-0.75, 0.25, 0.25, 0.25]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let vecs = [([0.0, h, -h, 0.0], -0.75), ([0.0, h, h, 0.0], 0.25), ([1.0, 0.0, 0.0, 0.0], 0.25), ([0.0, 0.0, 0.0, 1.0], 0.25)];
    let mut eig: f64 = 0.0;
    for (v, lam) in vecs {
        let v: Vec<C64> = v.iter().map(|&x| c(x, 0.0)).collect();
        let w = spin_dot().matrix().apply(&v).map_err(|e| e.to_string())?;
        eig = eig.max(w.iter().zip(&v).map(|(a, b)| (a - b * lam).norm()).fold(0.0, f64::max));
    }
    let all = worst.max(comm).max(spec).max(eig);
    ensure(all < 1e-12, format!("generators {worst:.1e}, commutators {comm:.1e}, spectrum {spec:.1e}, eigenvectors {eig:.1e}"))
}

fn criterion_2() -> Verdict {
    let f_op = force_operator(1.0);
    let h_op = interaction_hamiltonian(1.0);
    let mut orders = Vec::new();
    for at in [Position3::new(0.13, -0.21, 0.37), Position3::new(0.0, 0.3, 0.4), Position3::new(-0.5, 0.2, -0.25)] {
        let f = f_op.evaluate(at).map_err(|e| e.to_string())?.to_array();
        let err = |step: f64| -> Result<f64, String> {
            let hp = h_op.evaluate(at.offset(0.0, 0.0, step)).map_err(|e| e.to_string())?.to_array();
            let hm = h_op.evaluate(at.offset(0.0, 0.0, -step)).map_err(|e| e.to_string())?.to_array();
            let mut s: f64 = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    let grad = (hm[i][j] - hp[i][j]) / (2.0 * step);
                    s = s.max((grad - f[i][j]).norm());
                }
            }
            Ok(s)
        };
        orders.push((err(2e-3)? / err(1e-3)?).log2());
    }
    ensure(orders.iter().all(|o| (o - 2.0).abs() <= 0.2), format!("orders {orders:.4?}"))
}

fn criterion_3() -> Verdict {
    let z = 0.4;
    let s = figure2(&RunConfig::default()).map_err(|e| e.to_string())?.summary;
    let peak = parallel_point_force(0.0, z);
    let root = z * (2.0f64 / 3.0).sqrt();
    // Mean of the point force over the negative region by composite Simpson.
    let n = 4000;
    let hstep = 2.0 * root / n as f64;
    let mut integral = 0.0;
    for k in 0..=n {
        let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        integral += w * parallel_point_force(-root + k as f64 * hstep, z);
    }
    let analytic_mean = integral * hstep / 3.0 / (2.0 * root);
    let peak_ok = (s.center_acceleration - peak).abs() <= 0.01 * peak.abs();
    let cross_ok = s.crossings.len() == 2 && s.crossings.iter().all(|c| (c.abs() - 0.327).abs() <= 0.005);
    let avg_ok = (s.average + 2.22).abs() <= 0.1 * 2.22;
    ensure(
        peak_ok && cross_ok && avg_ok && (s.average - analytic_mean).abs() <= 0.01 * analytic_mean.abs(),
        format!(
            "a(0) {:.5} (closed form {peak:.5}), crossings {:.4?} (closed form +-{root:.4}), width {:.4}, mean {:.4} (closed form {analytic_mean:.4}, quoted -2.22)",
            s.center_acceleration, s.crossings, s.region_width, s.average
        ),
    )
}

fn criterion_4() -> Verdict {
    let sweep = SweepSpec::default();
    let par = acceleration_profile(&NamedState::Parallel.state(), &sweep, 1.0).map_err(|e| e.to_string())?;
    let anti = acceleration_profile(&NamedState::Antiparallel.state(), &sweep, 1.0).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (a, b) in par.values().zip(anti.values()) {
        worst = worst.max((a + b).abs() / a.abs().max(f64::MIN_POSITIVE));
    }
    let cfg = RunConfig { antiparallel: true, ..RunConfig::default() };
    let mirrored = figure2(&cfg).map_err(|e| e.to_string())?.profile;
    let same = mirrored.values().zip(anti.values()).all(|(a, b)| a == b);
    ensure(worst <= 1e-10 && same && par.values().count() == 201, format!("max relative |a_par + a_anti| {worst:.1e} over 201 samples"))
}

fn criterion_5() -> Verdict {
    let params = PhysicalParams::paper_preset();
    let tau = 1e-3;
    let l = derive_length_unit(&params, tau).map_err(|e| e.to_string())?.l;
    let mut worst: f64 = 0.0;
    for z in [0.3, 0.4, 0.8] {
        let packet = WavePacket::square(Position3::new(0.0, 0.0, z), 1e-3 * z).map_err(|e| e.to_string())?;
        let state = NamedState::Parallel.state();
        let m = SpatialMoments::for_packet(&packet, &required_moments(&state)).map_err(|e| e.to_string())?;
        let a_nat = contract_force(&state, &m, params.coupling_sign()).map_err(|e| e.to_string())?.a_z;
        let f_quantum = params.mass * a_nat * l / (tau * tau);
        // Coaxial dipoles: F = -3 mu0 m1 m2 / (2 pi d^4), with m1 m2 = alpha beta hbar^2 / 4.
        let m1m2 = params.alpha * params.beta * HBAR * HBAR / 4.0;
        let d = z * l;
        let f_classical = -3.0 * MU0 * m1m2 / (2.0 * PI * d.powi(4));
        worst = worst.max((f_quantum - f_classical).abs() / f_classical.abs());
    }
    ensure(worst <= 5e-3, format!("max relative deviation from the classical force {worst:.2e}"))
}

fn criterion_6() -> Verdict {
    let cfg = RunConfig::default();
    let params = PhysicalParams::paper_preset();
    let alpha = -E / (2.0 * M_E);
    let beta = 1e-6 * PI * 1e-12 / (HBAR / 2.0);
    let l_ref = (MU0 * (alpha * beta).abs() * HBAR * HBAR * 1e-6 / M_P).powf(0.2);
    let r = deflect(&cfg).map_err(|e| e.to_string())?;
    let e = &r.estimate;
    let ok = (3e-6..=3e-5).contains(&e.l)
        && (e.l - l_ref).abs() <= 1e-9 * l_ref
        && (2e5..=2e6).contains(&r.beta_over_alpha)
        && (r.beta_over_alpha.abs() - beta / alpha.abs()).abs() <= 1e-9 * r.beta_over_alpha
        && (1e-16..=1e-14).contains(&e.deflection)
        && (1e-9..=1e-7).contains(&e.interaction_time)
        && (params.mass - M_P).abs() < 1e-35;
    ensure(
        ok,
        format!(
            "l {:.3e} m, beta/alpha {:.3e}, deflection {:.3e} m, interaction time {:.3e} s at {} m/s",
            e.l, r.beta_over_alpha, e.deflection, e.interaction_time, e.speed
        ),
    )
}

fn criterion_7() -> Verdict {
    let cfg = OracleConfig::default();
    let r = run_oracle(&cfg, &PhysicalParams::paper_preset(), 1e-3).map_err(|e| e.to_string())?.report;
    let exponent = r.remainder.as_ref().map_or(f64::NAN, |x| x.exponent);
    let detail = format!(
        "{}^3 grid: a_fit {:.5} vs contracted {:.5} ({:.2}%), |v0 - kappa<p>| {:.1e} <= {:.1e}, exponent {exponent:.3}, B0 shift {:.1e} <= {:.1e}, norm drift {:.1e}",
        cfg.points_per_axis,
        r.fit.a,
        r.bch_acceleration,
        100.0 * r.acceleration_relative_error,
        r.velocity_error,
        r.velocity_tolerance,
        r.zeeman_acceleration_change,
        r.fit.sigma_a,
        r.norm_drift
    );
    let ok = r.acceleration_relative_error <= 0.05
        && r.velocity_error <= r.velocity_tolerance
        && (exponent - 3.0).abs() <= 0.3
        && r.zeeman_acceleration_change < r.fit.sigma_a
        && r.norm_drift < 1e-8
        && cfg.points_per_axis == 32;
    ensure(ok, detail)
}

fn criterion_8() -> Verdict {
    let mut orders = Vec::new();
    for g in [vec![0.0, 0.0, 1.0], vec![0.1, -0.3, 0.7, 0.5]] {
        let (_, order) = commutator_convergence(&g, 40, 4).map_err(|e| e.to_string())?;
        orders.push(order);
    }
    ensure(orders.iter().all(|o| (o - 2.0).abs() <= 0.2), format!("grid commutator orders {orders:.4?}"))
}

fn criterion_9() -> Verdict {
    let joint = |p: f64, rep| joint_distribution(&EprScenario::new(BellState::Singlet, p, p, rep).unwrap()).unwrap();
    let j = joint(0.1, LoopRepresentation::Coherent);
    let down = j.marginal(Wing::One, Outcome::Down);
    let cond = j.conditional(Wing::One, Outcome::Down).unwrap()[0];
    let half = joint(0.5, LoopRepresentation::Coherent);
    let half_cond = half.conditional(Wing::One, Outcome::Down).unwrap()[0];
    let half_marg = half.marginal(Wing::Two, Outcome::Up);
    let mut rep_diff: f64 = 0.0;
    let mut closed: f64 = 0.0;
    for p in uniform_grid(99) {
        let (a, b) = (joint(p, LoopRepresentation::Coherent), joint(p, LoopRepresentation::Mixture));
        for (x, y) in a.probs.iter().flatten().zip(b.probs.iter().flatten()) {
            rep_diff = rep_diff.max((x - y).abs());
        }
        // Singlet particles are always opposite; each wing reads "up" when
        // its loop agrees with its particle.
        let q = 1.0 - p;
        let want = [[p * q, 0.5 * (p * p + q * q)], [0.5 * (p * p + q * q), p * q]];
        for (x, y) in a.probs.iter().flatten().zip(want.iter().flatten()) {
            closed = closed.max((x - y).abs());
        }
    }
    let ok = down == 0.5
        && (cond - 0.82).abs() <= 1e-9
        && (half_cond - 0.5).abs() <= 1e-15
        && (half_marg - 0.5).abs() <= 1e-15
        && rep_diff <= 1e-12
        && closed <= 1e-12;
    ensure(
        ok,
        format!(
            "P(down@1) {down}, P(up@2|down@1) {cond:.12}, p=0.5: {half_cond} vs {half_marg}, coherent vs mixture {rep_diff:.1e}, closed form {closed:.1e}"
        ),
    )
}

fn run_cli(command: &str, out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_sgflux"))
        .args([command, "--preset", "paper-sec4", "--out"])
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!("{command} exited with {:?}: {}", status.status.code(), String::from_utf8_lossy(&status.stderr)));
    }
    Ok(())
}

fn criterion_10() -> Verdict {
    let (a, b) = (tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?);
    let commands = ["figure2", "deflect", "epr", "oracle", "selftest"];
    for cmd in commands {
        run_cli(cmd, a.path())?;
        run_cli(cmd, b.path())?;
    }
    let mut names: Vec<_> = std::fs::read_dir(a.path())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    let mut bytes = 0;
    for n in &names {
        let x = std::fs::read(a.path().join(n)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.path().join(n)).map_err(|e| format!("{n:?} missing in second run: {e}"))?;
        if x != y {
            return Err(format!("{n:?} differs between runs"));
        }
        bytes += x.len();
    }
    ensure(names.len() >= 9, format!("{} files, {bytes} bytes identical across two runs of {commands:?}", names.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict, Option<Duration>); 10] = [
        ("spin algebra exactness", criterion_1, Some(Duration::from_secs(1))),
        ("force is minus the z-gradient of H", criterion_2, Some(Duration::from_secs(1))),
        ("acceleration profile along y", criterion_3, Some(Duration::from_secs(10))),
        ("antiparallel mirror symmetry", criterion_4, Some(Duration::from_secs(10))),
        ("classical limit", criterion_5, Some(Duration::from_secs(5))),
        ("order-of-magnitude estimates", criterion_6, Some(Duration::from_secs(1))),
        ("grid oracle", criterion_7, Some(Duration::from_secs(300))),
        ("canonical commutator convergence", criterion_8, Some(Duration::from_secs(30))),
        ("EPR conditional statistics", criterion_9, Some(Duration::from_secs(1))),
        ("CLI determinism", criterion_10, None),
    ];
    let mut failed = 0;
    for (k, (name, f, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let over = budget.is_some_and(|b| took > b);
        let (tag, detail) = match (&verdict, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the {:?} budget", budget.unwrap())),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {tag} [{:>8.3}s] {name}: {detail}", k + 1, took.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

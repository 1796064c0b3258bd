//! Configuration, presets and the report-writing commands behind the `sgflux`
//! binary.
//!
//! Every command returns its report and writes plain-text data files (CSV
//! curves, JSON scalars) into an output directory. Numbers are written with
//! 12 significant digits and nothing time-dependent goes into a data file, so
//! identical configurations give byte-identical outputs.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::deflection::{classical_dipole_force, contract_force, required_moments};
use crate::dipole::{force_operator, interaction_hamiltonian, Position3};
use crate::epr::{
    correlation_sweep, joint_distribution, sweep_csv, uniform_grid, BellState, EprScenario, LoopRepresentation, Outcome,
    Wing,
};
use crate::error::{Error, Result};
use crate::moments::{
    acceleration_profile, region_average, zero_crossings, AccelerationProfile, RegionFilter, SpatialMoments, SweepSpec,
    WavePacket,
};
use crate::oracle::{commutator_convergence, run_oracle, OracleConfig, OracleReport};
use crate::output::{csv, json, write_text};
use crate::spin::{expectation, spin_dot, spin_generator, Axis, NamedState, SpinInput, TwoSpinOperator};
use crate::trajectory::{estimate, no_coupling, DeflectionEstimate};
use crate::units::{derive_length_unit, PhysicalParams};

/// Mean acceleration over the negative region quoted for the parallel case.
pub const REFERENCE_AVERAGE: f64 = -2.22;

/// Named parameter sets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum Preset {
    /// Hydrogen-like particle, 1 uA / 1 um loop, `tau = 1 ms`.
    #[default]
    #[serde(rename = "paper-sec4")]
    #[value(name = "paper-sec4")]
    PaperSec4,
}

impl Preset {
    pub fn params(self) -> PhysicalParams {
        match self {
            Preset::PaperSec4 => PhysicalParams::paper_preset(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EprConfig {
    pub bell_state: BellState,
    /// Probability of the "up" loop state, used on both wings.
    pub p: f64,
    /// Interior points of the `p` sweep.
    pub grid_points: usize,
    pub loop_representation: LoopRepresentation,
}

impl Default for EprConfig {
    fn default() -> Self {
        Self { bell_state: BellState::Singlet, p: 0.1, grid_points: 99, loop_representation: LoopRepresentation::Coherent }
    }
}

/// Everything a command needs. Missing keys take their defaults; unknown keys
/// are rejected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Named parameter set; used when `params` is absent.
    pub preset: Option<Preset>,
    pub params: Option<PhysicalParams>,
    /// Natural time unit, s.
    pub tau: f64,
    pub sweep: SweepSpec,
    /// Use `|up,down>` for the profile instead of `|up,up>`.
    pub antiparallel: bool,
    /// Forward speed through the deflecting region, m/s.
    pub speed: f64,
    pub speed_sweep: Vec<f64>,
    pub oracle: OracleConfig,
    pub epr: EprConfig,
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            preset: None,
            params: None,
            tau: 1e-3,
            sweep: SweepSpec::default(),
            antiparallel: false,
            speed: 1e3,
            speed_sweep: vec![250.0, 500.0, 1e3, 2e3, 3e3, 4e3],
            oracle: OracleConfig::default(),
            epr: EprConfig::default(),
            out_dir: None,
        }
    }
}

impl RunConfig {
    pub fn preset(preset: Preset) -> Self {
        Self { preset: Some(preset), ..Self::default() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Explicit `params` win over the preset; neither means the default preset.
    pub fn physical_params(&self) -> Result<PhysicalParams> {
        match (self.params, self.preset) {
            (Some(_), Some(_)) => Err(Error::Config("give either `params` or `preset`, not both".into())),
            (Some(p), None) => Ok(p),
            (None, preset) => Ok(preset.unwrap_or_default().params()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return bad("tau must be positive");
        }
        if !(self.speed > 0.0) || !self.speed.is_finite() || self.speed_sweep.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return bad("speeds must be positive");
        }
        if self.sweep.samples < 2 || !(self.sweep.y_max > self.sweep.y_min) || !(self.sweep.width > 0.0) {
            return bad("sweep needs samples >= 2, y_max > y_min and a positive width");
        }
        if !(0.0..=1.0).contains(&self.epr.p) || self.epr.grid_points == 0 {
            return bad("epr.p must lie in [0, 1] and epr.grid_points must be positive");
        }
        if self.oracle.remainder_windows.len() < 2 {
            return bad("oracle.remainder_windows needs at least two entries");
        }
        self.physical_params().map(|_| ())
    }
}

fn profile_state(antiparallel: bool) -> NamedState {
    if antiparallel {
        NamedState::Antiparallel
    } else {
        NamedState::Parallel
    }
}

/// Acceleration at a single packet position, natural units.
fn packet_acceleration(spin: &impl SpinInput, packet: &WavePacket, coupling: f64) -> Result<f64> {
    let keys = required_moments(spin);
    let m = SpatialMoments::for_packet(packet, &keys)?;
    Ok(contract_force(spin, &m, coupling)?.a_z)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Figure2Summary {
    pub spin: NamedState,
    pub x: f64,
    pub z: f64,
    pub width: f64,
    pub samples: usize,
    /// `a_z` at `y = 0`.
    pub center_acceleration: f64,
    /// Mean over the region where the force points towards the loop for
    /// parallel spins (negative) or away from it for antiparallel spins.
    pub average: f64,
    pub crossings: Vec<f64>,
    pub region_width: f64,
    pub reference_average: f64,
    pub relative_deviation: f64,
    pub within_ten_percent: bool,
}

pub struct Figure2 {
    pub profile: AccelerationProfile,
    pub summary: Figure2Summary,
}

pub fn figure2(cfg: &RunConfig) -> Result<Figure2> {
    let params = cfg.physical_params()?;
    let k = params.coupling_sign();
    let spin = profile_state(cfg.antiparallel);
    let state = spin.state();
    let sweep = cfg.sweep;
    let profile = acceleration_profile(&state, &sweep, k)?;
    // Parallel spins with a positive coupling are pulled towards the loop.
    let pulled = (k > 0.0) != cfg.antiparallel;
    let filter = if pulled { RegionFilter::NegativeOnly } else { RegionFilter::PositiveOnly };
    let average = region_average(&profile, filter)?;
    let crossings = zero_crossings(&profile);
    let region_width = match (crossings.first(), crossings.last()) {
        (Some(a), Some(b)) if crossings.len() >= 2 => b - a,
        _ => return Err(Error::EmptySelection("profile has fewer than two zero crossings".into())),
    };
    let center = WavePacket::new(Position3::new(sweep.x, 0.0, sweep.z), sweep.width, sweep.profile)?;
    let center_acceleration = packet_acceleration(&state, &center, k)?;
    let reference_average = if pulled { REFERENCE_AVERAGE } else { -REFERENCE_AVERAGE };
    let relative_deviation = (average - reference_average).abs() / reference_average.abs();
    let summary = Figure2Summary {
        spin,
        x: sweep.x,
        z: sweep.z,
        width: sweep.width,
        samples: sweep.samples,
        center_acceleration,
        average,
        crossings,
        region_width,
        reference_average,
        relative_deviation,
        within_ten_percent: relative_deviation <= 0.1,
    };
    Ok(Figure2 { profile, summary })
}

pub fn cmd_figure2(cfg: &RunConfig, out: &Path) -> Result<Figure2Summary> {
    let f = figure2(cfg)?;
    write_text(out, "figure2_profile.csv", &f.profile.to_csv())?;
    write_text(out, "figure2_summary.json", &json(&f.summary)?)?;
    Ok(f.summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeflectReport {
    pub estimate: DeflectionEstimate,
    pub beta_over_alpha: f64,
    /// `(speed, deflection)` for the configured speed sweep.
    pub speed_sweep: Vec<(f64, f64)>,
}

fn deflection_at(params: &PhysicalParams, cfg: &RunConfig, speed: f64, region: Option<(f64, f64)>) -> Result<DeflectionEstimate> {
    match region {
        None => Ok(no_coupling(cfg.tau, speed)),
        Some((avg, width)) => estimate(params, cfg.tau, speed, avg, width),
    }
}

pub fn deflect(cfg: &RunConfig) -> Result<DeflectReport> {
    let params = cfg.physical_params()?;
    // A loop without current has no moment and exerts no force.
    let region = if params.beta == 0.0 {
        None
    } else {
        let parallel = RunConfig { antiparallel: false, ..cfg.clone() };
        let s = figure2(&parallel)?.summary;
        Some((s.average, s.region_width))
    };
    let est = deflection_at(&params, cfg, cfg.speed, region)?;
    let speed_sweep = cfg
        .speed_sweep
        .iter()
        .map(|&v| deflection_at(&params, cfg, v, region).map(|e| (v, e.deflection)))
        .collect::<Result<Vec<_>>>()?;
    let beta_over_alpha = if params.alpha == 0.0 { 0.0 } else { params.beta / params.alpha };
    Ok(DeflectReport { estimate: est, beta_over_alpha, speed_sweep })
}

pub fn cmd_deflect(cfg: &RunConfig, out: &Path) -> Result<DeflectReport> {
    let r = deflect(cfg)?;
    write_text(out, "deflect.json", &json(&r)?)?;
    let rows = r.speed_sweep.iter().map(|&(v, d)| vec![v, d]);
    write_text(out, "deflect_speed_sweep.csv", &csv(&["speed", "deflection"], rows))?;
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EprReport {
    pub scenario: EprScenario,
    /// `joint[a][b]`, wing 1 outcome `a`, wing 2 outcome `b`, `0 = up`.
    pub joint: [[f64; 2]; 2],
    pub p_down_wing1: f64,
    pub p_up_wing2: f64,
    pub p_up_wing2_given_down_wing1: f64,
    /// Largest joint-probability difference between coherent and mixed loop
    /// states over the sweep grid.
    pub representation_max_difference: f64,
}

pub struct Epr {
    pub report: EprReport,
    pub sweep: Vec<(f64, f64)>,
}

pub fn epr(cfg: &RunConfig) -> Result<Epr> {
    let e = &cfg.epr;
    let scenario = EprScenario::new(e.bell_state, e.p, e.p, e.loop_representation)?;
    let joint = joint_distribution(&scenario)?;
    let grid = uniform_grid(e.grid_points);
    let sweep = correlation_sweep(&grid, e.bell_state)?;
    let mut diff: f64 = 0.0;
    for &p in &grid {
        let c = joint_distribution(&EprScenario::new(e.bell_state, p, p, LoopRepresentation::Coherent)?)?;
        let m = joint_distribution(&EprScenario::new(e.bell_state, p, p, LoopRepresentation::Mixture)?)?;
        for (a, b) in c.probs.iter().flatten().zip(m.probs.iter().flatten()) {
            diff = diff.max((a - b).abs());
        }
    }
    let report = EprReport {
        scenario,
        joint: joint.probs,
        p_down_wing1: joint.marginal(Wing::One, Outcome::Down),
        p_up_wing2: joint.marginal(Wing::Two, Outcome::Up),
        p_up_wing2_given_down_wing1: joint.conditional(Wing::One, Outcome::Down)?[0],
        representation_max_difference: diff,
    };
    Ok(Epr { report, sweep })
}

pub fn cmd_epr(cfg: &RunConfig, out: &Path) -> Result<EprReport> {
    let r = epr(cfg)?;
    write_text(out, "epr_sweep.csv", &sweep_csv(&r.sweep))?;
    write_text(out, "epr_scenario.json", &json(&r.report)?)?;
    Ok(r.report)
}

/// Runs the grid oracle and writes the report and both time series. Fails
/// with a numerical error after writing when a check does not pass.
pub fn cmd_oracle(cfg: &RunConfig, out: &Path) -> Result<OracleReport> {
    let params = cfg.physical_params()?;
    let o = run_oracle(&cfg.oracle, &params, cfg.tau)?;
    write_text(out, "oracle_report.json", &json(&o.report)?)?;
    let rows = o
        .series
        .samples
        .iter()
        .zip(&o.zeeman_series.samples)
        .map(|(a, b)| vec![a.t, a.z_expect, a.norm, b.z_expect, b.norm]);
    write_text(out, "oracle_series.csv", &csv(&["t", "z_expect", "norm", "z_expect_b0", "norm_b0"], rows))?;
    if !o.report.all_pass() {
        return Err(Error::CheckFailed("grid oracle disagrees with the perturbative force".into()));
    }
    Ok(o.report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
}

fn check(name: &str, outcome: Result<(bool, String)>) -> Check {
    match outcome {
        Ok((pass, detail)) => Check { name: name.into(), pass, detail },
        Err(e) => Check { name: name.into(), pass: false, detail: format!("error: {e}") },
    }
}

fn op_residual(a: &TwoSpinOperator, b: &TwoSpinOperator) -> f64 {
    (a.matrix() - b.matrix()).max_abs()
}

fn check_spin_algebra() -> Result<(bool, String)> {
    use crate::spin::{embed, Slot};
    let mut worst: f64 = 0.0;
    for slot in [Slot::Particle, Slot::Loop] {
        for (a, b, c) in [(Axis::X, Axis::Y, Axis::Z), (Axis::Y, Axis::Z, Axis::X), (Axis::Z, Axis::X, Axis::Y)] {
            let (sa, sb, sc) = (embed(&spin_generator(a), slot), embed(&spin_generator(b), slot), embed(&spin_generator(c), slot));
            let want = TwoSpinOperator::new(sc.matrix().scale(crate::spin::C64::new(0.0, 1.0)))?;
            worst = worst.max(op_residual(&sa.commutator(&sb), &want));
        }
    }
    let mut ev = spin_dot().matrix().hermitian_eigenvalues()?;
    ev.sort_by(f64::total_cmp);
    let spectrum = [-0.75, 0.25, 0.25, 0.25];
    let spec_err = ev.iter().zip(spectrum).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok((worst < 1e-12 && spec_err < 1e-12, format!("commutator residual {worst:e}, spectrum error {spec_err:e}")))
}

fn check_force_gradient() -> Result<(bool, String)> {
    let at = Position3::new(0.13, -0.21, 0.37);
    let f = force_operator(1.0).evaluate(at)?;
    let h = interaction_hamiltonian(1.0);
    let err = |step: f64| -> Result<f64> {
        let hp = h.evaluate(at.offset(0.0, 0.0, step))?;
        let hm = h.evaluate(at.offset(0.0, 0.0, -step))?;
        Ok(op_residual(&(&hm - &hp).scale(1.0 / (2.0 * step)), &f))
    };
    let order = (err(1e-3)? / err(5e-4)?).log2();
    Ok(((order - 2.0).abs() <= 0.2, format!("central-difference order {order:.4}")))
}

fn check_figure2(cfg: &RunConfig) -> Result<(bool, String)> {
    let s = figure2(&RunConfig { antiparallel: false, ..cfg.clone() })?.summary;
    let point = expectation(&force_operator(1.0).evaluate(Position3::new(0.0, 0.0, s.z))?, &NamedState::Parallel.state())?;
    let peak_ok = (s.center_acceleration - point).abs() <= 0.01 * point.abs();
    let cross_ok = s.crossings.len() == 2 && s.crossings.iter().all(|c| (c.abs() - 0.327).abs() <= 0.005);
    Ok((
        peak_ok && cross_ok && s.within_ten_percent,
        format!("a(0) {:.6}, crossings {:?}, average {:.4}", s.center_acceleration, s.crossings, s.average),
    ))
}

fn check_symmetry(cfg: &RunConfig) -> Result<(bool, String)> {
    let par = acceleration_profile(&NamedState::Parallel.state(), &cfg.sweep, 1.0)?;
    let anti = acceleration_profile(&NamedState::Antiparallel.state(), &cfg.sweep, 1.0)?;
    let worst = par
        .values()
        .zip(anti.values())
        .map(|(a, b)| if a == 0.0 { b.abs() } else { (a + b).abs() / a.abs() })
        .fold(0.0, f64::max);
    Ok((worst <= 1e-10, format!("max relative |a_par + a_anti| {worst:e}")))
}

fn check_classical_limit() -> Result<(bool, String)> {
    let z = 0.4;
    let packet = WavePacket::square(Position3::new(0.0, 0.0, z), 1e-4)?;
    let a = packet_acceleration(&NamedState::Parallel.state(), &packet, 1.0)?;
    // Natural units: mu0 alpha beta hbar^2 / m = 1, so m1 m2 / m = 1/4.
    let classical = classical_dipole_force(0.5, 0.5, z, 1.0)?;
    let rel = (a - classical).abs() / classical.abs();
    Ok((rel <= 5e-3, format!("quantum {a:.8}, classical {classical:.8}, relative {rel:e}")))
}

fn check_estimates(cfg: &RunConfig) -> Result<(bool, String)> {
    let params = cfg.physical_params()?;
    let l = derive_length_unit(&params, cfg.tau)?.l;
    let d = deflect(cfg)?;
    let ratio = d.beta_over_alpha;
    let e = &d.estimate;
    let pass = (3e-6..=3e-5).contains(&l)
        && (2e5..=2e6).contains(&ratio)
        && (1e-16..=1e-14).contains(&e.deflection)
        && (1e-9..=1e-7).contains(&e.interaction_time);
    Ok((pass, format!("l {l:e} m, beta/alpha {ratio:e}, deflection {:e} m, time {:e} s", e.deflection, e.interaction_time)))
}

fn check_oracle(cfg: &RunConfig) -> Result<(bool, String)> {
    let params = cfg.physical_params()?;
    let r = run_oracle(&cfg.oracle, &params, cfg.tau)?.report;
    let exponent = r.remainder.as_ref().map_or(f64::NAN, |x| x.exponent);
    Ok((
        r.all_pass(),
        format!(
            "relative error {:.4}, exponent {exponent:.3}, velocity error {:e}, B0 change {:e}, norm drift {:e}",
            r.acceleration_relative_error, r.velocity_error, r.zeeman_acceleration_change, r.norm_drift
        ),
    ))
}

fn check_commutator() -> Result<(bool, String)> {
    let (_, order) = commutator_convergence(&[0.1, -0.3, 0.7, 0.5], 40, 3)?;
    Ok(((order - 2.0).abs() <= 0.2, format!("grid commutator order {order:.4}")))
}

fn check_epr() -> Result<(bool, String)> {
    let joint = |p: f64, rep| joint_distribution(&EprScenario::new(BellState::Singlet, p, p, rep)?);
    let j = joint(0.1, LoopRepresentation::Coherent)?;
    let down = j.marginal(Wing::One, Outcome::Down);
    let cond = j.conditional(Wing::One, Outcome::Down)?[0];
    let half = joint(0.5, LoopRepresentation::Coherent)?;
    let hc = half.conditional(Wing::One, Outcome::Down)?[0];
    let hm = half.marginal(Wing::Two, Outcome::Up);
    let mut diff: f64 = 0.0;
    for p in uniform_grid(99) {
        let (c, m) = (joint(p, LoopRepresentation::Coherent)?, joint(p, LoopRepresentation::Mixture)?);
        for (a, b) in c.probs.iter().flatten().zip(m.probs.iter().flatten()) {
            diff = diff.max((a - b).abs());
        }
    }
    let pass = (down - 0.5).abs() <= 1e-12
        && (cond - 0.82).abs() <= 1e-9
        && (hc - 0.5).abs() <= 1e-12
        && (hm - 0.5).abs() <= 1e-12
        && diff <= 1e-12;
    Ok((pass, format!("P(down) {down}, P(up|down) {cond}, p=0.5 conditional {hc}, representation difference {diff:e}")))
}

/// Runs the invariant suite. Slow: includes one grid-oracle run.
pub fn selftest(cfg: &RunConfig) -> SelftestReport {
    let checks = vec![
        check("spin-algebra", check_spin_algebra()),
        check("force-gradient", check_force_gradient()),
        check("figure2", check_figure2(cfg)),
        check("antiparallel-symmetry", check_symmetry(cfg)),
        check("classical-limit", check_classical_limit()),
        check("deflection-estimates", check_estimates(cfg)),
        check("grid-oracle", check_oracle(cfg)),
        check("canonical-commutator", check_commutator()),
        check("epr", check_epr()),
    ];
    let passed = checks.iter().filter(|c| c.pass).count();
    let failed = checks.len() - passed;
    SelftestReport { checks, passed, failed }
}

/// Writes the report; failures are left to the caller.
pub fn cmd_selftest(cfg: &RunConfig, out: &Path) -> Result<SelftestReport> {
    let r = selftest(cfg);
    write_text(out, "selftest.json", &json(&r)?)?;
    Ok(r)
}

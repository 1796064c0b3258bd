//! EPR pair with a loop detector on each wing.
//!
//! The composite space is `particle1 (x) particle2 (x) loop1 (x) loop2`, each
//! factor ordered `(up, down)`, so the basis index is
//! `8 p1 + 4 p2 + 2 l1 + l2` with `0 = up`. A wing reports `up` when its
//! particle and loop are parallel and `down` when they are antiparallel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{ComplexMatrix, C64};
use crate::tolerances::WEIGHT_SUM;

pub const DIM: usize = 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BellState {
    #[default]
    Singlet,
    Triplet0,
    #[serde(rename = "triplet+")]
    TripletPlus,
    #[serde(rename = "triplet-")]
    TripletMinus,
}

impl BellState {
    /// Amplitudes over `(up up, up down, down up, down down)`.
    pub fn amplitudes(self) -> [f64; 4] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            BellState::Singlet => [0.0, h, -h, 0.0],
            BellState::Triplet0 => [0.0, h, h, 0.0],
            BellState::TripletPlus => [h, 0.0, 0.0, h],
            BellState::TripletMinus => [h, 0.0, 0.0, -h],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopRepresentation {
    /// `sqrt(p) |up> + sqrt(1 - p) |down>`
    #[default]
    Coherent,
    /// `diag(p, 1 - p)`
    Mixture,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EprScenario {
    #[serde(default)]
    pub bell_state: BellState,
    pub p1_up: f64,
    pub p2_up: f64,
    #[serde(default)]
    pub loop_representation: LoopRepresentation,
}

impl EprScenario {
    pub fn new(bell_state: BellState, p1_up: f64, p2_up: f64, loop_representation: LoopRepresentation) -> Result<Self> {
        let s = Self { bell_state, p1_up, p2_up, loop_representation };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for p in [self.p1_up, self.p2_up] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidInput(format!("loop probability {p} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Up,
    Down,
}

impl Outcome {
    fn index(self) -> usize {
        match self {
            Outcome::Up => 0,
            Outcome::Down => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wing {
    One,
    Two,
}

/// `probs[a][b]`: wing 1 outcome `a`, wing 2 outcome `b` (`0 = up`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub probs: [[f64; 2]; 2],
}

impl JointDistribution {
    pub fn new(probs: [[f64; 2]; 2]) -> Result<Self> {
        let sum: f64 = probs.iter().flatten().sum();
        if probs.iter().flatten().any(|&p| p < -WEIGHT_SUM) || (sum - 1.0).abs() > WEIGHT_SUM {
            return Err(Error::InvalidInput(format!("joint probabilities must be >= 0 and sum to 1, got sum {sum}")));
        }
        Ok(Self { probs })
    }

    pub fn get(&self, w1: Outcome, w2: Outcome) -> f64 {
        self.probs[w1.index()][w2.index()]
    }

    pub fn marginal(&self, wing: Wing, outcome: Outcome) -> f64 {
        let k = outcome.index();
        match wing {
            Wing::One => self.probs[k][0] + self.probs[k][1],
            Wing::Two => self.probs[0][k] + self.probs[1][k],
        }
    }

    /// Distribution `[P(up), P(down)]` of the other wing given `outcome` on
    /// `wing`.
    pub fn conditional(&self, wing: Wing, outcome: Outcome) -> Result<[f64; 2]> {
        let m = self.marginal(wing, outcome);
        if m <= 0.0 {
            return Err(Error::InvalidInput(format!("conditioning event {wing:?}={outcome:?} has zero probability")));
        }
        let k = outcome.index();
        Ok(match wing {
            Wing::One => [self.probs[k][0] / m, self.probs[k][1] / m],
            Wing::Two => [self.probs[0][k] / m, self.probs[1][k] / m],
        })
    }
}

fn loop_amplitudes(p: f64) -> [f64; 2] {
    [p.sqrt(), (1.0 - p).sqrt()]
}

/// Composite density matrix for the scenario.
pub fn build_state(scenario: &EprScenario) -> Result<ComplexMatrix> {
    scenario.validate()?;
    let bell = scenario.bell_state.amplitudes();
    let bell_rho = outer(&bell.map(|a| C64::new(a, 0.0)));
    let single = |p: f64| match scenario.loop_representation {
        LoopRepresentation::Coherent => outer(&loop_amplitudes(p).map(|a| C64::new(a, 0.0))),
        LoopRepresentation::Mixture => ComplexMatrix::from_diagonal(&[C64::new(p, 0.0), C64::new(1.0 - p, 0.0)]),
    };
    Ok(bell_rho.kron(&single(scenario.p1_up)).kron(&single(scenario.p2_up)))
}

/// Pure composite state for coherent loops.
pub fn build_pure_state(scenario: &EprScenario) -> Result<[C64; DIM]> {
    scenario.validate()?;
    let bell = scenario.bell_state.amplitudes();
    let (l1, l2) = (loop_amplitudes(scenario.p1_up), loop_amplitudes(scenario.p2_up));
    let mut psi = [C64::new(0.0, 0.0); DIM];
    for (k, v) in psi.iter_mut().enumerate() {
        let (p1, p2, a, b) = ((k >> 3) & 1, (k >> 2) & 1, (k >> 1) & 1, k & 1);
        *v = C64::new(bell[2 * p1 + p2] * l1[a] * l2[b], 0.0);
    }
    Ok(psi)
}

fn outer(v: &[C64]) -> ComplexMatrix {
    let n = v.len();
    let mut e = Vec::with_capacity(n * n);
    for a in v {
        for b in v {
            e.push(a * b.conj());
        }
    }
    ComplexMatrix::from_row_slice(n, n, &e)
}

/// Projector of `wing` onto the given outcome. Diagonal in the product basis.
pub fn projector(wing: Wing, outcome: Outcome) -> ComplexMatrix {
    let diag: Vec<C64> = (0..DIM)
        .map(|k| {
            let (p, l) = match wing {
                Wing::One => ((k >> 3) & 1, (k >> 1) & 1),
                Wing::Two => ((k >> 2) & 1, k & 1),
            };
            let parallel = p == l;
            let hit = parallel == (outcome == Outcome::Up);
            C64::new(if hit { 1.0 } else { 0.0 }, 0.0)
        })
        .collect();
    ComplexMatrix::from_diagonal(&diag)
}

pub fn joint_distribution(scenario: &EprScenario) -> Result<JointDistribution> {
    let rho = build_state(scenario)?;
    let mut probs = [[0.0; 2]; 2];
    for a in [Outcome::Up, Outcome::Down] {
        for b in [Outcome::Up, Outcome::Down] {
            let pab = &projector(Wing::One, a) * &projector(Wing::Two, b);
            probs[a.index()][b.index()] = (&rho * &pab).trace().re;
        }
    }
    JointDistribution::new(probs)
}

/// `P(up at wing 2 | down at wing 1)` with both loops at `p`.
pub fn correlation_sweep(p_grid: &[f64], bell_state: BellState) -> Result<Vec<(f64, f64)>> {
    p_grid
        .par_iter()
        .map(|&p| {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidInput(format!("sweep probability {p} outside (0, 1]")));
            }
            let s = EprScenario::new(bell_state, p, p, LoopRepresentation::Coherent)?;
            let c = joint_distribution(&s)?.conditional(Wing::One, Outcome::Down)?;
            Ok((p, c[0]))
        })
        .collect()
}

/// `p = k / (n + 1)` for `k = 1..=n`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|k| k as f64 / (n + 1) as f64).collect()
}

pub fn sweep_csv(rows: &[(f64, f64)]) -> String {
    crate::output::csv(&["p", "cond_up_given_down"], rows.iter().map(|&(p, c)| vec![p, c]))
}

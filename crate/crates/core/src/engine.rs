//! Time integration of the coverage controller against a reference density
//! that is periodically refitted to the team and steered toward the target.
//!
//! Time is organised in three nested levels:
//! - an Euler substep of length `dt` moves every agent;
//! - a *step* of `substeps` Euler substeps shares one set of cells and moments;
//! - a *window* of `delta_tau` seconds shares one reference path.

use crate::control::control_input;
use crate::density::{sample_mixture, DensityPath, GaussianMixture};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::geometry::{build_oavc, ConvexPolygon, COINCIDENT_TOL};
use crate::gmm::{self, FitResult};
use crate::linalg::Vec2;
use crate::mix_seed;
use crate::quadrature::{cell_moments, CellMoments, Grid, TriangleRule};
use crate::scenario::{InitialPlacement, Scenario};

/// Agents are kept this far inside the domain boundary.
const BOUNDARY_MARGIN: f64 = 1e-6;
/// Slack for the agent-in-own-cell check.
const CELL_TOL: f64 = 1e-9;

const STREAM_REFIT: u64 = 0x7265_6669;
const STREAM_METRIC: u64 = 0x6d65_7472;

#[derive(Clone, Debug)]
pub struct SimState {
    pub t: f64,
    /// Time at step 0; `t = origin + step·c·dt` exactly.
    pub origin: f64,
    /// Completed steps since the start of the run.
    pub step: usize,
    pub positions: Vec<Vec2>,
    pub path: DensityPath,
    /// Index of the current reference window.
    pub k: usize,
    /// Cells and moments for `positions` at time `t`.
    pub cells: Vec<ConvexPolygon>,
    pub moments: Vec<CellMoments>,
    /// Largest distance from an agent to the centroid of its cached cell.
    pub e_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    StepLimit,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::StepLimit => "step_limit",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub agent: usize,
    pub position: Vec2,
    /// Velocity actually applied over the following substep.
    pub velocity: Vec2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricRecord {
    pub t: f64,
    /// Locational cost under the reference density.
    pub h: f64,
    /// L2 distance from the team density to the reference density.
    pub l2_ref: Option<f64>,
    /// L2 distance from the team density to the target density.
    pub l2_final: Option<f64>,
    pub e_max: f64,
    pub window_k: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellSnapshot {
    pub t: f64,
    pub agent: usize,
    pub vertices: Vec<Vec2>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TeamFitRecord {
    pub tau: f64,
    pub k: usize,
    pub mixture: GaussianMixture,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub exec: Execution,
    /// Snapshot cells every this many windows; 0 keeps only the first and last.
    pub snapshot_every: usize,
    /// Overrides the scenario step budget.
    pub max_steps: Option<usize>,
    /// Compute the grid-based L2 metrics (the most expensive diagnostic).
    pub density_metrics: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            exec: Execution::Sequential,
            snapshot_every: 1,
            max_steps: None,
            density_metrics: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimOutput {
    pub status: RunStatus,
    pub steps: usize,
    pub final_time: f64,
    pub initial_positions: Vec<Vec2>,
    pub final_positions: Vec<Vec2>,
    pub trajectory: Vec<TrajectoryRecord>,
    pub metrics: Vec<MetricRecord>,
    pub cells: Vec<CellSnapshot>,
    pub team_fits: Vec<TeamFitRecord>,
}

pub struct Simulation<'a> {
    scenario: &'a Scenario,
    exec: Execution,
    rule: TriangleRule,
    steps_per_window: usize,
}

impl<'a> Simulation<'a> {
    pub fn new(scenario: &'a Scenario, exec: Execution) -> Result<Self> {
        scenario.validate()?;
        Ok(Simulation {
            scenario,
            exec,
            rule: TriangleRule::from_config(&scenario.quadrature)?,
            steps_per_window: scenario.steps_per_window(),
        })
    }

    pub fn scenario(&self) -> &Scenario {
        self.scenario
    }

    pub fn steps_per_window(&self) -> usize {
        self.steps_per_window
    }

    fn time_of(&self, step: usize) -> f64 {
        step as f64 * self.scenario.block()
    }

    fn initial_positions(&self) -> Result<Vec<Vec2>> {
        let s = self.scenario;
        let positions = match &s.initial {
            InitialPlacement::Explicit(p) => p.clone(),
            InitialPlacement::Sampled { mixture, .. } => {
                sample_mixture(mixture, s.agents, &s.domain, &s.obstacles, s.sample_seed())
                    .map_err(|e| Error::InfeasibleScenario(format!("initial sampling: {e}")))?
            }
        };
        self.check_placement(&positions)?;
        Ok(positions)
    }

    fn check_placement(&self, positions: &[Vec2]) -> Result<()> {
        let s = self.scenario;
        for (i, &p) in positions.iter().enumerate() {
            if !s.domain.contains(p) {
                return Err(Error::InfeasibleScenario(format!(
                    "agent {i} at {p:?} is outside the domain"
                )));
            }
            if let Some(j) = s.obstacles.iter().position(|o| o.contains(p)) {
                return Err(Error::AgentInObstacle {
                    obstacle: j,
                    x: p.x,
                    y: p.y,
                });
            }
            for (k, &q) in positions[..i].iter().enumerate() {
                if p.distance(q) <= COINCIDENT_TOL {
                    return Err(Error::DegenerateGenerators {
                        first: k,
                        second: i,
                    });
                }
            }
        }
        Ok(())
    }

    fn fit_team(&self, positions: &[Vec2], seed: u64) -> Result<FitResult> {
        gmm::fit(
            positions,
            self.scenario.final_mixture.len(),
            &self.scenario.em,
            seed,
        )
    }

    fn reference_path(&self, t0: f64, team: GaussianMixture) -> Result<DensityPath> {
        DensityPath::new(
            t0,
            team,
            self.scenario.final_mixture.clone(),
            self.scenario.rates,
        )
    }

    /// Start from given positions and reference path at the path's `t0`.
    ///
    /// The window counter starts at `K`, so the path is never refitted.
    pub fn start_from(&self, positions: Vec<Vec2>, path: DensityPath) -> Result<SimState> {
        if positions.len() != self.scenario.agents {
            return Err(Error::InvalidInput(format!(
                "{} positions for {} agents",
                positions.len(),
                self.scenario.agents
            )));
        }
        self.check_placement(&positions)?;
        let mut state = SimState {
            t: path.t0(),
            origin: path.t0(),
            step: 0,
            positions,
            path,
            k: self.scenario.timing.updates,
            cells: Vec::new(),
            moments: Vec::new(),
            e_max: f64::INFINITY,
        };
        self.refresh(&mut state)?;
        Ok(state)
    }

    /// Place the team, fit the first reference path and compute its cells.
    pub fn init(&self) -> Result<(SimState, FitResult)> {
        let positions = self.initial_positions()?;
        let fit = self.fit_team(&positions, mix_seed(self.scenario.seed, STREAM_REFIT, 0))?;
        let path = self.reference_path(0.0, fit.mixture.clone())?;
        let mut state = SimState {
            t: 0.0,
            origin: 0.0,
            step: 0,
            positions,
            path,
            k: 0,
            cells: Vec::new(),
            moments: Vec::new(),
            e_max: f64::INFINITY,
        };
        self.refresh(&mut state)?;
        Ok((state, fit))
    }

    /// Advance to the next reference window, refitting while `k ≤ K`.
    pub fn update_reference(&self, state: &mut SimState) -> Result<Option<FitResult>> {
        state.k += 1;
        if state.k > self.scenario.timing.updates {
            return Ok(None);
        }
        let seed = mix_seed(self.scenario.seed, STREAM_REFIT, state.k as u64);
        let fit = self.fit_team(&state.positions, seed)?;
        state.path = self.reference_path(state.t, fit.mixture.clone())?;
        Ok(Some(fit))
    }

    /// Recompute cells, moments and `e_max` for the current positions and time.
    pub fn refresh(&self, state: &mut SimState) -> Result<()> {
        let s = self.scenario;
        let reference = state.path.mixture_at(state.t)?;
        let positions = &state.positions;
        let rule = &self.rule;
        let per_agent = self.exec.try_map(s.agents, |i| {
            let cell = build_oavc(i, positions, &s.obstacles, &s.domain)?;
            let m = cell_moments(&cell, positions[i], &|q| reference.eval(q), rule).map_err(
                |e| match e {
                    Error::MassUnderflow { .. } => Error::InvariantViolation {
                        t: state.t,
                        message: format!("agent {i}: {e}"),
                    },
                    other => other,
                },
            )?;
            Ok::<_, Error>((cell, m))
        })?;
        (state.cells, state.moments) = per_agent.into_iter().unzip();
        state.e_max = max_centroid_distance(&state.positions, &state.moments);
        Ok(())
    }

    /// Locational cost of the cached cells, summed in agent order.
    pub fn cost(&self, state: &SimState) -> f64 {
        state.moments.iter().map(|m| m.cost).sum()
    }

    /// Integrate one step with the current moments held fixed.
    ///
    /// Each Euler substep moves an agent along the segment to its centroid and
    /// never past it, so the agent stays inside its convex cell.
    pub fn advance(
        &self,
        state: &mut SimState,
        trajectory: Option<&mut Vec<TrajectoryRecord>>,
    ) -> Result<()> {
        let s = self.scenario;
        let dt = s.timing.dt;
        let t_start = state.t;
        let mut records = trajectory;
        for sub in 0..s.timing.substeps {
            let t_sub = t_start + sub as f64 * dt;
            for i in 0..s.agents {
                let p = state.positions[i];
                let m = &state.moments[i];
                let u = control_input(p, m, &s.gains)?;
                let to_centroid = m.centroid - p;
                let mut delta = u * dt;
                if delta.norm() > to_centroid.norm() {
                    delta = to_centroid;
                }
                if let Some(out) = records.as_deref_mut() {
                    out.push(TrajectoryRecord {
                        t: t_sub,
                        agent: i,
                        position: p,
                        velocity: delta / dt,
                    });
                }
                state.positions[i] = s.domain.clamp_inside(p + delta, BOUNDARY_MARGIN);
            }
            self.check_safety(state, t_start + (sub + 1) as f64 * dt)?;
        }
        state.step += 1;
        state.t = state.origin + self.time_of(state.step);
        Ok(())
    }

    /// Advance one step, then refresh the caches at the new positions.
    pub fn inner_step(&self, state: &mut SimState) -> Result<()> {
        self.advance(state, None)?;
        self.refresh(state)
    }

    fn check_safety(&self, state: &SimState, t: f64) -> Result<()> {
        let violation = |message: String| Err(Error::InvariantViolation { t, message });
        for (i, &p) in state.positions.iter().enumerate() {
            if !p.is_finite() {
                return violation(format!("agent {i} position is not finite"));
            }
            for (j, o) in self.scenario.obstacles.iter().enumerate() {
                if p.distance(o.center) < o.radius {
                    return violation(format!("agent {i} entered obstacle {j}"));
                }
            }
            if !state.cells[i].contains(p, CELL_TOL) {
                return violation(format!("agent {i} left its cell"));
            }
            for k in 0..i {
                if p.distance(state.positions[k]) <= COINCIDENT_TOL {
                    return violation(format!("agents {k} and {i} collided"));
                }
            }
        }
        Ok(())
    }

    /// Initialize from the scenario and run to termination.
    pub fn run(&self, opts: &RunOptions) -> Result<SimOutput> {
        let (state, _) = self.init()?;
        self.run_from(state, opts)
    }

    /// Time from which a small `e_max` counts as convergence.
    ///
    /// Just after a refit the reference matches the team, so `e_max` is small
    /// without the team having gone anywhere. Only once the last reference has
    /// settled on the target does a small `e_max` mean the team has arrived.
    pub fn settled_at(&self) -> f64 {
        let s = self.scenario;
        self.time_of(s.timing.updates * self.steps_per_window) + s.rates.settling_time()
    }

    pub fn is_converged(&self, state: &SimState) -> bool {
        let settled = state.t >= self.settled_at()
            || (state.k >= self.scenario.timing.updates && state.path.is_stationary());
        settled && state.e_max < self.scenario.timing.epsilon
    }

    /// Run from a prepared state, e.g. one built with [`Simulation::start_from`].
    pub fn run_from(&self, mut state: SimState, opts: &RunOptions) -> Result<SimOutput> {
        let s = self.scenario;
        let max_steps = opts.max_steps.unwrap_or(s.timing.max_steps);
        let spw = self.steps_per_window;
        let final_mix = &s.final_mixture;
        let grid = Grid::from_config(s.domain, &s.quadrature);
        let final_samples = opts
            .density_metrics
            .then(|| grid.sample(self.exec, &|q| final_mix.eval(q)));

        let mut out = SimOutput {
            status: RunStatus::StepLimit,
            steps: 0,
            final_time: 0.0,
            initial_positions: state.positions.clone(),
            final_positions: Vec::new(),
            trajectory: Vec::new(),
            metrics: Vec::new(),
            cells: Vec::new(),
            team_fits: vec![fit_record(&state)],
        };
        let mut last_snapshot = None;

        loop {
            if state.step.is_multiple_of(spw) {
                let window = state.step / spw;
                if state.step > 0 {
                    if self.update_reference(&mut state)?.is_some() {
                        out.team_fits.push(fit_record(&state));
                    }
                    self.refresh(&mut state)?;
                }
                let due = if opts.snapshot_every == 0 {
                    window == 0
                } else {
                    window.is_multiple_of(opts.snapshot_every)
                };
                if due {
                    snapshot(&mut out.cells, &state);
                    last_snapshot = Some(state.step);
                }
            }
            if self.is_converged(&state) {
                out.status = RunStatus::Converged;
                break;
            }
            if state.step >= max_steps {
                break;
            }
            out.metrics
                .push(self.metrics(&state, &grid, final_samples.as_deref())?);
            self.advance(&mut state, Some(&mut out.trajectory))?;
            self.refresh(&mut state)?;
        }

        out.metrics
            .push(self.metrics(&state, &grid, final_samples.as_deref())?);
        if last_snapshot != Some(state.step) {
            snapshot(&mut out.cells, &state);
        }
        for (i, (&p, m)) in state.positions.iter().zip(&state.moments).enumerate() {
            out.trajectory.push(TrajectoryRecord {
                t: state.t,
                agent: i,
                position: p,
                velocity: control_input(p, m, &s.gains)?,
            });
        }
        out.steps = state.step;
        out.final_time = state.t;
        out.final_positions = state.positions;
        Ok(out)
    }

    fn metrics(
        &self,
        state: &SimState,
        grid: &Grid,
        final_samples: Option<&[f64]>,
    ) -> Result<MetricRecord> {
        let (l2_ref, l2_final) = match final_samples {
            Some(final_samples) => {
                let seed = mix_seed(self.scenario.seed, STREAM_METRIC, state.step as u64);
                let team = self.fit_team(&state.positions, seed)?.mixture;
                let reference = state.path.mixture_at(state.t)?;
                let team_s = grid.sample(self.exec, &|q| team.eval(q));
                let ref_s = grid.sample(self.exec, &|q| reference.eval(q));
                (
                    Some(grid.l2(&team_s, &ref_s)),
                    Some(grid.l2(&team_s, final_samples)),
                )
            }
            None => (None, None),
        };
        Ok(MetricRecord {
            t: state.t,
            h: self.cost(state),
            l2_ref,
            l2_final,
            e_max: state.e_max,
            window_k: state.k,
        })
    }
}

fn fit_record(state: &SimState) -> TeamFitRecord {
    TeamFitRecord {
        tau: state.path.t0(),
        k: state.k,
        mixture: state.path.initial().clone(),
    }
}

fn snapshot(out: &mut Vec<CellSnapshot>, state: &SimState) {
    for (i, c) in state.cells.iter().enumerate() {
        out.push(CellSnapshot {
            t: state.t,
            agent: i,
            vertices: c.vertices.clone(),
        });
    }
}

fn max_centroid_distance(positions: &[Vec2], moments: &[CellMoments]) -> f64 {
    positions
        .iter()
        .zip(moments)
        .map(|(p, m)| p.distance(m.centroid))
        .fold(0.0, f64::max)
}

/// Run a scenario with default options.
pub fn run(scenario: &Scenario) -> Result<SimOutput> {
    Simulation::new(scenario, Execution::Sequential)?.run(&RunOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{Gaussian, Rates};
    use crate::geometry::Rect;
    use crate::linalg::SymMat2;
    use crate::quadrature::QuadratureConfig;
    use crate::scenario::{parse_scenario, Timing};

    fn single_agent(p: Vec2) -> Scenario {
        let target = GaussianMixture::single(Gaussian::new(Vec2::ZERO, SymMat2::IDENTITY).unwrap());
        Scenario {
            domain: Rect::new(-4.0, 4.0, -4.0, 4.0).unwrap(),
            obstacles: Vec::new(),
            agents: 1,
            initial: InitialPlacement::Explicit(vec![p]),
            final_mixture: target,
            rates: Rates::default(),
            gains: Default::default(),
            timing: Timing {
                max_steps: 400,
                ..Timing::default()
            },
            quadrature: QuadratureConfig {
                subdivisions: 4,
                grid_nx: 32,
                grid_ny: 32,
                ..QuadratureConfig::default()
            },
            em: Default::default(),
            seed: 0,
        }
    }

    fn static_path(s: &Scenario) -> DensityPath {
        DensityPath::new(
            0.0,
            s.final_mixture.clone(),
            s.final_mixture.clone(),
            s.rates,
        )
        .unwrap()
    }

    #[test]
    fn single_agent_approaches_center_monotonically() {
        let s = single_agent(Vec2::new(3.0, -2.5));
        let sim = Simulation::new(&s, Execution::Sequential).unwrap();
        let state = sim
            .start_from(vec![Vec2::new(3.0, -2.5)], static_path(&s))
            .unwrap();
        let out = sim.run_from(state, &RunOptions::default()).unwrap();
        assert_eq!(out.status, RunStatus::Converged);
        let d: Vec<f64> = out.trajectory.iter().map(|r| r.position.norm()).collect();
        assert!(d.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(out.final_positions[0].norm() < s.timing.epsilon);
    }

    #[test]
    fn agent_at_centroid_stops_at_step_zero() {
        let s = single_agent(Vec2::ZERO);
        let sim = Simulation::new(&s, Execution::Sequential).unwrap();
        let state = sim.start_from(vec![Vec2::ZERO], static_path(&s)).unwrap();
        assert!(state.e_max < 1e-9);
        let out = sim.run_from(state, &RunOptions::default()).unwrap();
        assert_eq!((out.status, out.steps), (RunStatus::Converged, 0));
        assert_eq!(out.metrics.len(), 1);
    }

    #[test]
    fn moving_reference_is_not_converged_early() {
        let s = single_agent(Vec2::ZERO);
        let sim = Simulation::new(&s, Execution::Sequential).unwrap();
        let start =
            GaussianMixture::single(Gaussian::new(Vec2::new(1.0, 1.0), SymMat2::IDENTITY).unwrap());
        let path = DensityPath::new(0.0, start, s.final_mixture.clone(), s.rates).unwrap();
        let state = sim.start_from(vec![Vec2::new(1.0, 1.0)], path).unwrap();
        assert!(state.e_max < s.timing.epsilon);
        assert!(!sim.is_converged(&state));
    }

    const TWO_LOBES: &str = "\
domain = -10 10 -10 10
obstacle.1.center = 0 3
obstacle.1.radius = 1
agents = 6
initial_mixture.component.1.mean = -4 5
initial_mixture.component.1.cov = 1 0 1
initial_mixture.component.1.weight = 0.5
initial_mixture.component.2.mean = 4 5
initial_mixture.component.2.cov = 1 0.2 1
initial_mixture.component.2.weight = 0.5
final_mixture.component.1.mean = -3 -4
final_mixture.component.1.cov = 1.5 0 1.5
final_mixture.component.1.weight = 0.5
final_mixture.component.2.mean = 3 -4
final_mixture.component.2.cov = 1.5 0 1.5
final_mixture.component.2.weight = 0.5
time.updates = 4
time.max_steps = 60
quadrature.subdivisions = 4
quadrature.grid_nx = 40
quadrature.grid_ny = 40
seed = 3
";

    #[test]
    fn refits_stop_after_k_and_time_is_exact() {
        let s = parse_scenario(TWO_LOBES).unwrap();
        let sim = Simulation::new(&s, Execution::Sequential).unwrap();
        let out = sim.run(&RunOptions::default()).unwrap();
        let ks: Vec<usize> = out.team_fits.iter().map(|f| f.k).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, 4]);
        for (f, k) in out.team_fits.iter().zip(0..) {
            assert_eq!(f.tau, (k * sim.steps_per_window()) as f64 * s.block());
        }
        for (i, m) in out.metrics.iter().enumerate() {
            assert_eq!(m.t, i as f64 * s.block());
            assert_eq!(m.window_k, i / sim.steps_per_window());
        }
        assert_eq!(out.steps, 60);
        assert_eq!(out.status, RunStatus::StepLimit);
    }

    #[test]
    fn runs_are_reproducible_in_both_modes() {
        let s = parse_scenario(TWO_LOBES).unwrap();
        let opts = RunOptions {
            max_steps: Some(25),
            ..RunOptions::default()
        };
        let a = Simulation::new(&s, Execution::Sequential)
            .unwrap()
            .run(&opts)
            .unwrap();
        let b = Simulation::new(&s, Execution::Sequential)
            .unwrap()
            .run(&opts)
            .unwrap();
        let c = Simulation::new(&s, Execution::Parallel)
            .unwrap()
            .run(&opts)
            .unwrap();
        for other in [&b, &c] {
            assert_eq!(a.trajectory, other.trajectory);
            assert_eq!(a.metrics, other.metrics);
            assert_eq!(a.cells, other.cells);
            assert_eq!(a.team_fits, other.team_fits);
        }
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let mut s = single_agent(Vec2::ZERO);
        s.obstacles
            .push(crate::geometry::Disk::new(Vec2::new(0.5, 0.0), 1.0).unwrap());
        let sim = Simulation::new(&s, Execution::Sequential).unwrap();
        assert!(matches!(
            sim.init(),
            Err(Error::AgentInObstacle { obstacle: 0, .. })
        ));
    }
}

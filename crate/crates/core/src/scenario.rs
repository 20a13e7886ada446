//! Scenario description and its flat key-value text format.
//!
//! ```text
//! # comments start with '#'
//! domain = -20 20 -20 20
//! obstacle.1.center = 0 0
//! obstacle.1.radius = 1.5
//! agents = 10
//! initial_mixture.component.1.mean = 3 12
//! initial_mixture.component.1.cov = 0.2 -0.6 3     # a11 a12 a22
//! initial_mixture.component.1.weight = 1
//! final_mixture.component.1.mean = 1 1
//! final_mixture.component.1.cov = 0.7 0.2 0.5
//! final_mixture.component.1.weight = 1
//! ```
//!
//! Indexed sections are 1-based and must be contiguous. Every other key has a
//! default; see [`Scenario::to_config_string`] for the full list.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::control::Gains;
use crate::density::{Gaussian, GaussianMixture, Rates, WEIGHT_TOL};
use crate::error::{Error, Result};
use crate::geometry::{Disk, Rect};
use crate::gmm::EmConfig;
use crate::linalg::{SymMat2, Vec2};
use crate::quadrature::QuadratureConfig;

/// Tolerance for `delta_tau` being a whole number of `c·dt` blocks.
const WINDOW_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum InitialPlacement {
    Explicit(Vec<Vec2>),
    /// Rejection-sampled from a mixture; `seed` falls back to the scenario seed.
    Sampled {
        mixture: GaussianMixture,
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Timing {
    /// Euler step (s).
    pub dt: f64,
    /// Euler substeps per cell/moment refresh.
    pub substeps: usize,
    /// Reference-density update period (s).
    pub delta_tau: f64,
    /// Last update index `K` that refits the team density.
    pub updates: usize,
    /// Convergence threshold on the largest agent-to-centroid distance (m).
    pub epsilon: f64,
    /// Budget of cell refresh blocks.
    pub max_steps: usize,
}

impl Default for Timing {
    fn default() -> Self {
        Timing {
            dt: 0.01,
            substeps: 5,
            delta_tau: 0.5,
            updates: 100,
            epsilon: 0.05,
            max_steps: 20_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub domain: Rect,
    pub obstacles: Vec<Disk>,
    pub agents: usize,
    pub initial: InitialPlacement,
    pub final_mixture: GaussianMixture,
    pub rates: Rates,
    pub gains: Gains,
    pub timing: Timing,
    pub quadrature: QuadratureConfig,
    pub em: EmConfig,
    pub seed: u64,
}

impl Scenario {
    /// Length of one cell refresh block, `c·dt`.
    pub fn block(&self) -> f64 {
        self.timing.substeps as f64 * self.timing.dt
    }

    pub fn steps_per_window(&self) -> usize {
        (self.timing.delta_tau / self.block()).round() as usize
    }

    pub fn sample_seed(&self) -> u64 {
        match self.initial {
            InitialPlacement::Sampled { seed: Some(s), .. } => s,
            _ => self.seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.timing;
        if self.agents == 0 {
            return Err(Error::scenario("agents", "need at least one agent"));
        }
        if self.agents < self.final_mixture.len() {
            return Err(Error::scenario(
                "agents",
                format!(
                    "{} agents cannot be fitted with {} components",
                    self.agents,
                    self.final_mixture.len()
                ),
            ));
        }
        if let InitialPlacement::Explicit(p) = &self.initial {
            if p.len() != self.agents {
                return Err(Error::scenario(
                    "initial.position",
                    format!("{} positions for {} agents", p.len(), self.agents),
                ));
            }
        }
        if !(t.dt > 0.0 && t.dt.is_finite()) {
            return Err(Error::scenario("time.dt", "must be positive"));
        }
        if t.substeps == 0 {
            return Err(Error::scenario("time.substeps", "must be at least 1"));
        }
        if !(t.delta_tau > 0.0 && t.delta_tau.is_finite()) {
            return Err(Error::scenario("time.delta_tau", "must be positive"));
        }
        let blocks = (t.delta_tau / self.block()).round();
        if blocks < 1.0 || (t.delta_tau - blocks * self.block()).abs() > WINDOW_TOL {
            return Err(Error::scenario(
                "time.delta_tau",
                format!(
                    "{} is not a multiple of substeps*dt = {}",
                    t.delta_tau,
                    self.block()
                ),
            ));
        }
        if !(t.epsilon > 0.0) {
            return Err(Error::scenario("time.epsilon", "must be positive"));
        }
        if t.max_steps == 0 {
            return Err(Error::scenario("time.max_steps", "must be at least 1"));
        }
        for (name, v) in [
            ("rates.a", self.rates.a),
            ("rates.b", self.rates.b),
            ("rates.alpha", self.rates.alpha),
        ] {
            if !(v < 0.0 && v.is_finite()) {
                return Err(Error::scenario(
                    name,
                    format!("{v} must be strictly negative"),
                ));
            }
        }
        self.gains
            .validate()
            .map_err(|e| Error::scenario("gains", e.to_string()))?;
        self.quadrature
            .validate()
            .map_err(|e| Error::scenario("quadrature", e.to_string()))?;
        self.em
            .validate()
            .map_err(|e| Error::scenario("em", e.to_string()))?;
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::scenario("file", format!("cannot read {}: {e}", path.display())))?;
        parse_scenario(&text)
    }

    /// Full serialization including defaults; floats round-trip exactly.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let d = &self.domain;
        let _ = writeln!(
            s,
            "domain = {:?} {:?} {:?} {:?}",
            d.xmin, d.xmax, d.ymin, d.ymax
        );
        for (i, o) in self.obstacles.iter().enumerate() {
            let _ = writeln!(
                s,
                "obstacle.{}.center = {:?} {:?}",
                i + 1,
                o.center.x,
                o.center.y
            );
            let _ = writeln!(s, "obstacle.{}.radius = {:?}", i + 1, o.radius);
        }
        let _ = writeln!(s, "agents = {}", self.agents);
        match &self.initial {
            InitialPlacement::Explicit(ps) => {
                for (i, p) in ps.iter().enumerate() {
                    let _ = writeln!(s, "initial.position.{} = {:?} {:?}", i + 1, p.x, p.y);
                }
            }
            InitialPlacement::Sampled { mixture, seed } => {
                write_mixture(&mut s, "initial_mixture", mixture);
                if let Some(seed) = seed {
                    let _ = writeln!(s, "initial.seed = {seed}");
                }
            }
        }
        write_mixture(&mut s, "final_mixture", &self.final_mixture);
        let r = &self.rates;
        let _ = writeln!(
            s,
            "rates.a = {:?}\nrates.b = {:?}\nrates.alpha = {:?}",
            r.a, r.b, r.alpha
        );
        let g = &self.gains;
        let _ = writeln!(s, "gains.k0 = {:?}\ngains.k1 = {:?}", g.k0, g.k1);
        if let Some(u) = g.u_max {
            let _ = writeln!(s, "gains.u_max = {u:?}");
        }
        let t = &self.timing;
        let _ = writeln!(
            s,
            "time.dt = {:?}\ntime.substeps = {}\ntime.delta_tau = {:?}\ntime.updates = {}\ntime.epsilon = {:?}\ntime.max_steps = {}",
            t.dt, t.substeps, t.delta_tau, t.updates, t.epsilon, t.max_steps
        );
        let q = &self.quadrature;
        let _ = writeln!(
            s,
            "quadrature.triangle_order = {}\nquadrature.subdivisions = {}\nquadrature.grid_nx = {}\nquadrature.grid_ny = {}",
            q.triangle_order, q.subdivisions, q.grid_nx, q.grid_ny
        );
        let e = &self.em;
        let _ = writeln!(
            s,
            "em.max_iters = {}\nem.rel_tol = {:?}\nem.cov_floor = {:?}\nem.restarts = {}",
            e.max_iters, e.rel_tol, e.cov_floor, e.n_restarts
        );
        let _ = writeln!(s, "seed = {}", self.seed);
        s
    }
}

fn write_mixture(s: &mut String, section: &str, mix: &GaussianMixture) {
    for (j, (g, w)) in mix.components().iter().zip(mix.weights()).enumerate() {
        let (m, c) = (g.mean(), g.cov());
        let _ = writeln!(
            s,
            "{section}.component.{}.mean = {:?} {:?}",
            j + 1,
            m.x,
            m.y
        );
        let _ = writeln!(
            s,
            "{section}.component.{}.cov = {:?} {:?} {:?}",
            j + 1,
            c.a11,
            c.a12,
            c.a22
        );
        let _ = writeln!(s, "{section}.component.{}.weight = {w:?}", j + 1);
    }
}

/// Key/value table with consumption tracking, so leftovers can be reported.
struct Table {
    entries: BTreeMap<String, (usize, String)>,
}

impl Table {
    fn parse(text: &str) -> Result<Table> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::scenario(format!("line {}", lineno + 1), "expected `key = value`")
            })?;
            let key = key.trim().to_string();
            if entries
                .insert(key.clone(), (lineno + 1, value.trim().to_string()))
                .is_some()
            {
                return Err(Error::scenario(key, "given more than once"));
            }
        }
        Ok(Table { entries })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key).map(|(_, v)| v)
    }

    fn floats(&mut self, key: &str, n: usize) -> Result<Option<Vec<f64>>> {
        let Some(v) = self.take(key) else {
            return Ok(None);
        };
        let vals = v
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::scenario(key, format!("`{v}`: {e}")))?;
        if vals.len() != n || vals.iter().any(|x| !x.is_finite()) {
            return Err(Error::scenario(
                key,
                format!("expected {n} finite number(s), got `{v}`"),
            ));
        }
        Ok(Some(vals))
    }

    fn float(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.floats(key, 1)?.map_or(default, |v| v[0]))
    }

    fn require_floats(&mut self, key: &str, n: usize) -> Result<Vec<f64>> {
        self.floats(key, n)?
            .ok_or_else(|| Error::scenario(key, "missing required field"))
    }

    fn integer<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.take(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| Error::scenario(key, format!("`{v}`: {e}")))
            })
            .transpose()
    }

    /// Largest contiguous 1-based index present under `prefix.<i>.`.
    fn count(&self, prefix: &str) -> Result<usize> {
        let mut idx: Vec<usize> = Vec::new();
        for key in self.entries.keys() {
            if let Some(rest) = key.strip_prefix(prefix) {
                let num = rest.split('.').next().unwrap_or("");
                let i: usize = num
                    .parse()
                    .map_err(|_| Error::scenario(key.clone(), "expected a numeric index"))?;
                idx.push(i);
            }
        }
        idx.sort_unstable();
        idx.dedup();
        for (expect, &got) in (1..).zip(&idx) {
            if got != expect {
                return Err(Error::scenario(
                    format!("{prefix}{expect}"),
                    "indices must be contiguous and start at 1",
                ));
            }
        }
        Ok(idx.len())
    }
}

fn parse_mixture(t: &mut Table, section: &str) -> Result<Option<GaussianMixture>> {
    let prefix = format!("{section}.component.");
    let m = t.count(&prefix)?;
    if m == 0 {
        return Ok(None);
    }
    let mut comps = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for j in 1..=m {
        let key = |f: &str| format!("{prefix}{j}.{f}");
        let mean = t.require_floats(&key("mean"), 2)?;
        let cov = t.require_floats(&key("cov"), 3)?;
        let weight = t.require_floats(&key("weight"), 1)?[0];
        let cov = SymMat2::new(cov[0], cov[1], cov[2]);
        let g = Gaussian::new(Vec2::new(mean[0], mean[1]), cov).map_err(|_| {
            Error::scenario(key("cov"), format!("{cov:?} is not positive definite"))
        })?;
        comps.push(g);
        weights.push(weight);
    }
    let total: f64 = weights.iter().sum();
    if weights.iter().any(|w| *w < 0.0) || (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::scenario(
            section,
            format!("weights {weights:?} are not on the probability simplex"),
        ));
    }
    GaussianMixture::new(comps, weights)
        .map(Some)
        .map_err(|e| Error::scenario(section, e.to_string()))
}

/// Parse and validate a scenario, filling defaults.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut t = Table::parse(text)?;

    let d = t.require_floats("domain", 4)?;
    let domain =
        Rect::new(d[0], d[1], d[2], d[3]).map_err(|e| Error::scenario("domain", e.to_string()))?;

    let n_obs = t.count("obstacle.")?;
    let mut obstacles = Vec::with_capacity(n_obs);
    for i in 1..=n_obs {
        let c = t.require_floats(&format!("obstacle.{i}.center"), 2)?;
        let r = t.require_floats(&format!("obstacle.{i}.radius"), 1)?[0];
        obstacles.push(
            Disk::new(Vec2::new(c[0], c[1]), r)
                .map_err(|e| Error::scenario(format!("obstacle.{i}.radius"), e.to_string()))?,
        );
    }

    let agents: usize = t
        .integer("agents")?
        .ok_or_else(|| Error::scenario("agents", "missing required field"))?;

    let n_pos = t.count("initial.position.")?;
    let initial_seed: Option<u64> = t.integer("initial.seed")?;
    let initial_mix = parse_mixture(&mut t, "initial_mixture")?;
    let initial = match (n_pos, initial_mix) {
        (0, Some(mixture)) => InitialPlacement::Sampled {
            mixture,
            seed: initial_seed,
        },
        (0, None) => {
            return Err(Error::scenario(
                "initial",
                "give either initial.position.<i> or initial_mixture",
            ))
        }
        (_, Some(_)) => {
            return Err(Error::scenario(
                "initial",
                "initial.position and initial_mixture are mutually exclusive",
            ))
        }
        (n, None) => {
            let mut ps = Vec::with_capacity(n);
            for i in 1..=n {
                let p = t.require_floats(&format!("initial.position.{i}"), 2)?;
                ps.push(Vec2::new(p[0], p[1]));
            }
            InitialPlacement::Explicit(ps)
        }
    };

    let final_mixture = parse_mixture(&mut t, "final_mixture")?
        .ok_or_else(|| Error::scenario("final_mixture", "missing required section"))?;

    let dr = Rates::default();
    let rates = Rates {
        a: t.float("rates.a", dr.a)?,
        b: t.float("rates.b", dr.b)?,
        alpha: t.float("rates.alpha", dr.alpha)?,
    };
    let dg = Gains::default();
    let gains = Gains {
        k0: t.float("gains.k0", dg.k0)?,
        k1: t.float("gains.k1", dg.k1)?,
        u_max: t.floats("gains.u_max", 1)?.map(|v| v[0]),
    };
    let dt = Timing::default();
    let timing = Timing {
        dt: t.float("time.dt", dt.dt)?,
        substeps: t.integer("time.substeps")?.unwrap_or(dt.substeps),
        delta_tau: t.float("time.delta_tau", dt.delta_tau)?,
        updates: t.integer("time.updates")?.unwrap_or(dt.updates),
        epsilon: t.float("time.epsilon", dt.epsilon)?,
        max_steps: t.integer("time.max_steps")?.unwrap_or(dt.max_steps),
    };
    let dq = QuadratureConfig::default();
    let quadrature = QuadratureConfig {
        triangle_order: t
            .integer("quadrature.triangle_order")?
            .unwrap_or(dq.triangle_order),
        subdivisions: t
            .integer("quadrature.subdivisions")?
            .unwrap_or(dq.subdivisions),
        grid_nx: t.integer("quadrature.grid_nx")?.unwrap_or(dq.grid_nx),
        grid_ny: t.integer("quadrature.grid_ny")?.unwrap_or(dq.grid_ny),
    };
    let de = EmConfig::default();
    let em = EmConfig {
        max_iters: t.integer("em.max_iters")?.unwrap_or(de.max_iters),
        rel_tol: t.float("em.rel_tol", de.rel_tol)?,
        cov_floor: t.float("em.cov_floor", de.cov_floor)?,
        n_restarts: t.integer("em.restarts")?.unwrap_or(de.n_restarts),
    };
    let seed = t.integer("seed")?.unwrap_or(0);

    if let Some((key, (line, _))) = t.entries.iter().next() {
        return Err(Error::scenario(
            key.clone(),
            format!("unknown key on line {line}"),
        ));
    }

    let scenario = Scenario {
        domain,
        obstacles,
        agents,
        initial,
        final_mixture,
        rates,
        gains,
        timing,
        quadrature,
        em,
        seed,
    };
    scenario.validate()?;
    Ok(scenario)
}

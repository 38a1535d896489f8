//! Global-best particle swarm optimizer over a box-bounded real vector space.
//!
//! Particles are updated one after another within an iteration and the global
//! best is refreshed as soon as any particle improves on it. Personal and
//! global bests only move on strict improvement. The random coefficients
//! `r1`, `r2` are drawn once per particle per iteration and shared by all of
//! that particle's dimensions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PsoError {
    #[error("invalid swarm configuration: {0}")]
    Config(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoConfig {
    pub inertia: f64,
    pub c1: f64,
    pub c2: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub pos_min: f64,
    pub pos_max: f64,
    pub n_particles: usize,
    pub max_iterations: usize,
    /// The search stops once the global best fitness is at or below this.
    /// Stored as the string `"inf"` when unbounded.
    #[serde(with = "extended_f64")]
    pub target_fitness: f64,
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            inertia: 1.4,
            c1: 2.0,
            c2: 2.0,
            v_min: -0.01,
            v_max: 0.01,
            pos_min: 0.0,
            pos_max: 1.0,
            n_particles: 5,
            max_iterations: 500,
            target_fitness: 3.0,
            seed: 0,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<(), PsoError> {
        let finite = [
            ("inertia", self.inertia),
            ("c1", self.c1),
            ("c2", self.c2),
            ("v_min", self.v_min),
            ("v_max", self.v_max),
            ("pos_min", self.pos_min),
            ("pos_max", self.pos_max),
        ];
        if let Some((name, v)) = finite.iter().find(|(_, v)| !v.is_finite()) {
            return Err(PsoError::Config(format!("{name} must be finite, got {v}")));
        }
        if self.v_min >= self.v_max {
            return Err(PsoError::Config(format!(
                "v_min ({}) must be below v_max ({})",
                self.v_min, self.v_max
            )));
        }
        if self.pos_min >= self.pos_max {
            return Err(PsoError::Config(format!(
                "pos_min ({}) must be below pos_max ({})",
                self.pos_min, self.pos_max
            )));
        }
        if self.n_particles == 0 {
            return Err(PsoError::Config("n_particles must be at least 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(PsoError::Config("max_iterations must be at least 1".into()));
        }
        if self.target_fitness.is_nan() {
            return Err(PsoError::Config("target_fitness must not be NaN".into()));
        }
        Ok(())
    }

    fn clamp_velocity(&self, v: f64) -> f64 {
        v.clamp(self.v_min, self.v_max)
    }

    fn clamp_position(&self, x: f64) -> f64 {
        x.clamp(self.pos_min, self.pos_max)
    }
}

mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&x.to_string())
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(x) => Ok(x),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwarmResult {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    pub iterations_used: usize,
    pub converged: bool,
}

fn check_dim(expected: usize, found: usize) -> Result<(), PsoError> {
    if expected == found {
        Ok(())
    } else {
        Err(PsoError::DimensionMismatch { expected, found })
    }
}

/// `ω·v + c1·r1·(p_best − x) + c2·r2·(g_best − x)`, clamped to the velocity box.
pub fn update_velocity(
    config: &PsoConfig,
    v: &[f64],
    x: &[f64],
    p_best: &[f64],
    g_best: &[f64],
    r1: f64,
    r2: f64,
) -> Result<Vec<f64>, PsoError> {
    let dim = v.len();
    check_dim(dim, x.len())?;
    check_dim(dim, p_best.len())?;
    check_dim(dim, g_best.len())?;
    Ok((0..dim)
        .map(|j| {
            let raw = config.inertia * v[j]
                + config.c1 * r1 * (p_best[j] - x[j])
                + config.c2 * r2 * (g_best[j] - x[j]);
            config.clamp_velocity(raw)
        })
        .collect())
}

pub fn update_position(x: &[f64], v: &[f64], config: &PsoConfig) -> Result<Vec<f64>, PsoError> {
    check_dim(x.len(), v.len())?;
    Ok(x.iter()
        .zip(v)
        .map(|(xi, vi)| config.clamp_position(xi + vi))
        .collect())
}

/// Swarm state that can be advanced one iteration at a time.
#[derive(Debug, Clone)]
pub struct Swarm {
    config: PsoConfig,
    particles: Vec<Particle>,
    global_best_position: Vec<f64>,
    global_best_fitness: f64,
    iterations: usize,
    rng: ChaCha8Rng,
}

impl Swarm {
    /// Evaluates the initial positions and seeds personal and global bests.
    pub fn new<F>(
        config: PsoConfig,
        dim: usize,
        initial_positions: Vec<Vec<f64>>,
        initial_velocities: Vec<Vec<f64>>,
        fitness: &mut F,
    ) -> Result<Self, PsoError>
    where
        F: FnMut(&[f64]) -> f64,
    {
        config.validate()?;
        if dim == 0 {
            return Err(PsoError::Config("dimension must be at least 1".into()));
        }
        for (what, list) in [
            ("initial positions", &initial_positions),
            ("initial velocities", &initial_velocities),
        ] {
            if list.len() != config.n_particles {
                return Err(PsoError::Config(format!(
                    "{what}: expected {} entries, got {}",
                    config.n_particles,
                    list.len()
                )));
            }
            for row in list.iter() {
                check_dim(dim, row.len())?;
            }
        }
        let in_box = |xs: &[f64], lo: f64, hi: f64| xs.iter().all(|x| (lo..=hi).contains(x));
        if !initial_positions
            .iter()
            .all(|p| in_box(p, config.pos_min, config.pos_max))
        {
            return Err(PsoError::Config("initial position outside bounds".into()));
        }
        if !initial_velocities
            .iter()
            .all(|v| in_box(v, config.v_min, config.v_max))
        {
            return Err(PsoError::Config("initial velocity outside bounds".into()));
        }

        let particles: Vec<Particle> = initial_positions
            .into_iter()
            .zip(initial_velocities)
            .map(|(position, velocity)| {
                let f = fitness(&position);
                Particle {
                    best_position: position.clone(),
                    position,
                    velocity,
                    best_fitness: f,
                }
            })
            .collect();

        let mut best = 0;
        for (i, p) in particles.iter().enumerate().skip(1) {
            if p.best_fitness < particles[best].best_fitness {
                best = i;
            }
        }

        Ok(Self {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            global_best_position: particles[best].best_position.clone(),
            global_best_fitness: particles[best].best_fitness,
            particles,
            config,
            iterations: 0,
        })
    }

    /// One full pass over the particles.
    pub fn step<F>(&mut self, fitness: &mut F)
    where
        F: FnMut(&[f64]) -> f64,
    {
        for p in &mut self.particles {
            let r1: f64 = self.rng.gen();
            let r2: f64 = self.rng.gen();
            // Dimensions were checked on construction.
            p.velocity = update_velocity(
                &self.config,
                &p.velocity,
                &p.position,
                &p.best_position,
                &self.global_best_position,
                r1,
                r2,
            )
            .expect("swarm dimensions are consistent");
            p.position = update_position(&p.position, &p.velocity, &self.config)
                .expect("swarm dimensions are consistent");

            let f = fitness(&p.position);
            if f < p.best_fitness {
                p.best_fitness = f;
                p.best_position.clone_from(&p.position);
            }
            if f < self.global_best_fitness {
                self.global_best_fitness = f;
                self.global_best_position.clone_from(&p.position);
            }
        }
        self.iterations += 1;
    }

    pub fn is_converged(&self) -> bool {
        self.global_best_fitness <= self.config.target_fitness
    }

    pub fn is_finished(&self) -> bool {
        self.is_converged() || self.iterations >= self.config.max_iterations
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn config(&self) -> &PsoConfig {
        &self.config
    }

    pub fn global_best(&self) -> (&[f64], f64) {
        (&self.global_best_position, self.global_best_fitness)
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn into_result(self) -> SwarmResult {
        SwarmResult {
            converged: self.is_converged(),
            best_position: self.global_best_position,
            best_fitness: self.global_best_fitness,
            iterations_used: self.iterations,
        }
    }
}

/// Runs the swarm until the target fitness or the iteration cap is reached.
pub fn optimize<F>(
    config: &PsoConfig,
    dim: usize,
    initial_positions: Vec<Vec<f64>>,
    initial_velocities: Vec<Vec<f64>>,
    mut fitness: F,
) -> Result<SwarmResult, PsoError>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut swarm = Swarm::new(
        config.clone(),
        dim,
        initial_positions,
        initial_velocities,
        &mut fitness,
    )?;
    while !swarm.is_finished() {
        swarm.step(&mut fitness);
    }
    Ok(swarm.into_result())
}

//! Synthetic population/case tensors with an injected outbreak of known
//! location, for checking detectors against ground truth.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::eval::Truth;
use crate::math;
use crate::neighbors::NeighborMatrix;
use crate::tensor::{CountTensor, Mode, ModeKind};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "snake_case"))]
pub enum Layout {
    /// Rook adjacency on a `rows × cols` lattice; region `r * cols + c`.
    Grid { rows: usize, cols: usize },
    /// Points uniform in the unit square, adjacent when closer than `radius`.
    RandomGeometric { n: usize, radius: f64 },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Injection {
    /// Must be connected; the first region is reported as the center.
    pub regions: Vec<usize>,
    /// Inclusive time steps.
    pub window: (usize, usize),
    pub relative_risk: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SynthConfig {
    pub layout: Layout,
    pub time_steps: usize,
    /// Mean population per region and time step.
    pub population: f64,
    /// Relative spread of region populations around the mean, in `[0, 1)`.
    pub population_spread: f64,
    /// Linear population growth per time step (0.012 is 1.2 % a step).
    pub growth: f64,
    /// Expected cases per person and time step.
    pub rate: f64,
    /// Levels of an extra attribute mode; 0 leaves the tensors two-way.
    pub attribute_levels: usize,
    pub injection: Injection,
    pub seed: u64,
}

impl SynthConfig {
    /// 5 × 5 grid, 12 steps, a two-region block at relative risk 3 over
    /// steps 6..=8.
    pub fn grid_default(seed: u64) -> Self {
        Self {
            layout: Layout::Grid { rows: 5, cols: 5 },
            time_steps: 12,
            population: 10_000.0,
            population_spread: 0.3,
            growth: 0.0,
            rate: 0.002,
            attribute_levels: 0,
            injection: Injection {
                regions: vec![12, 13],
                window: (6, 8),
                relative_risk: 3.0,
            },
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    pub population: CountTensor,
    pub cases: CountTensor,
    pub neighbors: NeighborMatrix,
    pub coords: Vec<(f64, f64)>,
    pub truth: Truth,
}

const LAYOUT_STREAM: u64 = 0;
const POPULATION_STREAM: u64 = 1;
const CASE_STREAM: u64 = 2;

fn stream(seed: u64, s: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(s);
    rng
}

type Geometry = (Vec<String>, Vec<(f64, f64)>, NeighborMatrix);

fn layout(cfg: &Layout, seed: u64) -> Result<Geometry> {
    match *cfg {
        Layout::Grid { rows, cols } => {
            let n = rows * cols;
            let mut pairs = Vec::new();
            let mut coords = Vec::with_capacity(n);
            let mut labels = Vec::with_capacity(n);
            for r in 0..rows {
                for c in 0..cols {
                    let i = r * cols + c;
                    labels.push(format!("g{r}_{c}"));
                    coords.push((c as f64, r as f64));
                    if c + 1 < cols {
                        pairs.push((i, i + 1));
                    }
                    if r + 1 < rows {
                        pairs.push((i, i + cols));
                    }
                }
            }
            Ok((labels, coords, NeighborMatrix::from_pairs(n, &pairs)?))
        }
        Layout::RandomGeometric { n, radius } => {
            if !(radius > 0.0) {
                return Err(Error::InvalidConfig("radius must be positive".into()));
            }
            let mut rng = stream(seed, LAYOUT_STREAM);
            let coords: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
            let mut pairs = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    let dx = coords[i].0 - coords[j].0;
                    let dy = coords[i].1 - coords[j].1;
                    if math::sqrt(dx * dx + dy * dy) < radius {
                        pairs.push((i, j));
                    }
                }
            }
            let labels = (0..n).map(|i| format!("n{i}")).collect();
            Ok((labels, coords, NeighborMatrix::from_pairs(n, &pairs)?))
        }
    }
}

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> Result<f64> {
    if mean <= 0.0 {
        return Ok(0.0);
    }
    Poisson::new(mean)
        .map(|d| d.sample(rng))
        .map_err(|e| Error::InvalidConfig(format!("poisson mean {mean}: {e}")))
}

/// Draws a population tensor and a case tensor. Population cells are whole
/// numbers; cases are Poisson with mean `rate · population`, multiplied by
/// the relative risk inside the injected block. Deterministic in `seed`.
pub fn generate(cfg: &SynthConfig) -> Result<SynthData> {
    if cfg.time_steps == 0 {
        return Err(Error::InvalidConfig("time_steps must be positive".into()));
    }
    if !(cfg.population > 0.0) || !(cfg.rate >= 0.0) || !(cfg.growth >= 0.0) {
        return Err(Error::InvalidConfig(
            "population must be positive, rate and growth non-negative".into(),
        ));
    }
    if !(0.0..1.0).contains(&cfg.population_spread) {
        return Err(Error::InvalidConfig("population_spread must lie in [0, 1)".into()));
    }
    let (labels, coords, nb) = layout(&cfg.layout, cfg.seed)?;
    let n = labels.len();
    if n == 0 {
        return Err(Error::InvalidConfig("layout has no regions".into()));
    }
    let inj = &cfg.injection;
    if !(inj.relative_risk >= 1.0) {
        return Err(Error::InvalidConfig("relative risk must be at least 1".into()));
    }
    if inj.regions.iter().any(|&r| r >= n) {
        return Err(Error::InvalidConfig("injected region out of range".into()));
    }
    if inj.window.0 > inj.window.1 || inj.window.1 >= cfg.time_steps {
        return Err(Error::InvalidConfig("injection window out of range".into()));
    }
    if !nb.is_connected(&inj.regions) {
        return Err(Error::InvalidConfig(
            "injected regions must form a non-empty connected set".into(),
        ));
    }

    let mut modes = vec![
        Mode::new(ModeKind::Space, "region", labels),
        Mode::indexed(ModeKind::Time, "time", cfg.time_steps),
    ];
    if cfg.attribute_levels > 0 {
        modes.push(Mode::new(
            ModeKind::Attribute,
            "group",
            (0..cfg.attribute_levels).map(|a| format!("a{a}")).collect(),
        ));
    }

    let mut rng = stream(cfg.seed, POPULATION_STREAM);
    let region_pop: Vec<f64> = (0..n)
        .map(|_| cfg.population * (1.0 + cfg.population_spread * rng.random_range(-1.0..1.0)))
        .collect();
    let levels = cfg.attribute_levels.max(1);
    let raw: Vec<f64> = (0..levels).map(|_| rng.random_range(0.5..1.5)).collect();
    let wsum: f64 = raw.iter().sum();
    let level_share: Vec<f64> = raw.iter().map(|w| w / wsum).collect();

    let population = CountTensor::from_fn(modes.clone(), |i| {
        let share = if cfg.attribute_levels > 0 { level_share[i[2]] } else { 1.0 };
        let p = region_pop[i[0]] * (1.0 + cfg.growth * i[1] as f64) * share;
        libm::round(p).max(1.0)
    })?;

    let mut rng = stream(cfg.seed, CASE_STREAM);
    let mut values = Vec::with_capacity(population.values().len());
    let dims = population.dims();
    for (off, &p) in population.values().iter().enumerate() {
        let s = off % dims[0];
        let t = (off / dims[0]) % dims[1];
        let inside = inj.regions.contains(&s) && (inj.window.0..=inj.window.1).contains(&t);
        let rr = if inside { inj.relative_risk } else { 1.0 };
        values.push(poisson(&mut rng, cfg.rate * p * rr)?);
    }
    let cases = CountTensor::new(modes, values)?;

    Ok(SynthData {
        population,
        cases,
        neighbors: nb,
        coords,
        truth: Truth {
            regions: inj.regions.clone(),
            window: inj.window,
            center: inj.regions[0],
        },
    })
}

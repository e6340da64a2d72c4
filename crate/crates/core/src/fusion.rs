//! Target localization by fusing noisy distance and bearing readings.
//!
//! Three sensors each report a distance `D_i` and a bearing `B_i` to the
//! target. Over a square grid of candidate positions the unnormalized
//! posterior is the product of six Gaussian likelihoods (a flat prior drops
//! out):
//!
//! ```text
//! p(x, y | D, B)  ∝  Π_i  N(D_i; mu_d, 5 + mu_d / 10) · N(B_i; mu_b, 14.0626°)
//! ```
//!
//! where `mu_d` and `mu_b` are the distance and viewing angle from sensor `i`
//! to the cell. The exact posterior is computed in the log domain; the
//! stochastic one scales each factor grid into `[0, 1]`, drives six SBGs per
//! cell into a 5-gate `AND` tree and decodes the counters.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use rand_distr::{Distribution, Normal};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::mtj::MtjParams;
use crate::netlist::{evaluate, Netlist};
use crate::rng::{derive_seed_indexed, stream_rng};

pub const SIGMA_DISTANCE_BASE: f64 = 5.0;
pub const SIGMA_DISTANCE_SLOPE: f64 = 0.1;
pub const SIGMA_BEARING_DEG: f64 = 14.0626;
/// Plane span covered by every grid, independent of resolution.
pub const DEFAULT_EXTENT: f64 = 64.0;
pub const DEFAULT_SENSOR_POSITIONS: [(f64, f64); 3] = [(0.0, 0.0), (0.0, 32.0), (32.0, 0.0)];
pub const DEFAULT_TRUE_POSITION: (f64, f64) = (28.0, 29.0);
/// Seed for the synthesized readings of the shipped scenario.
pub const DEFAULT_READING_SEED: u64 = 23;
/// Independent factor grids per cell: distance and bearing for each of three sensors.
pub const FACTORS_PER_CELL: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensorSpec {
    pub position: (f64, f64),
    /// Distance reading `D_i` (plane units).
    pub distance: f64,
    /// Bearing reading `B_i` (degrees, counter-clockwise from +x).
    pub bearing_deg: f64,
    pub sigma_distance_base: f64,
    pub sigma_distance_slope: f64,
    pub sigma_bearing_deg: f64,
}

impl SensorSpec {
    pub fn new(position: (f64, f64), distance: f64, bearing_deg: f64) -> Self {
        SensorSpec {
            position,
            distance,
            bearing_deg,
            sigma_distance_base: SIGMA_DISTANCE_BASE,
            sigma_distance_slope: SIGMA_DISTANCE_SLOPE,
            sigma_bearing_deg: SIGMA_BEARING_DEG,
        }
    }

    pub fn distance_to(&self, p: (f64, f64)) -> f64 {
        (p.0 - self.position.0).hypot(p.1 - self.position.1)
    }

    /// Standard deviation of the distance reading when the true distance is `mu`.
    pub fn distance_sigma(&self, mu: f64) -> f64 {
        self.sigma_distance_base + self.sigma_distance_slope * mu
    }

    /// Viewing angle to `p` in degrees, `None` when `p` is the sensor position.
    pub fn viewing_angle(&self, p: (f64, f64)) -> Option<f64> {
        let (dx, dy) = (p.0 - self.position.0, p.1 - self.position.1);
        if dx == 0.0 && dy == 0.0 {
            None
        } else {
            Some(dy.atan2(dx).to_degrees())
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.sigma_distance_base > 0.0
            && self.sigma_distance_slope >= 0.0
            && self.sigma_bearing_deg > 0.0
            && [self.position.0, self.position.1, self.distance, self.bearing_deg]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid sensor {self:?}")))
        }
    }
}

/// Wrap an angle difference in degrees into `(-180, 180]`.
pub fn wrap_degrees(d: f64) -> f64 {
    let r = (d + 180.0).rem_euclid(360.0) - 180.0;
    if r == -180.0 {
        180.0
    } else {
        r
    }
}

/// Square grid; cell `(i, j)` sits at plane point `(i * s, j * s)` with
/// `s = extent / size`, so every resolution covers the same region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub size: usize,
    pub extent: f64,
}

impl GridSpec {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::invalid("grid size must be at least 1"));
        }
        Ok(GridSpec {
            size,
            extent: DEFAULT_EXTENT,
        })
    }

    pub fn spacing(&self) -> f64 {
        self.extent / self.size as f64
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        let s = self.spacing();
        (i as f64 * s, j as f64 * s)
    }

    pub fn cells(&self) -> usize {
        self.size * self.size
    }

    /// Cell nearest to a plane point.
    pub fn cell_of(&self, p: (f64, f64)) -> (usize, usize) {
        let s = self.spacing();
        let idx = |v: f64| ((v / s).round().max(0.0) as usize).min(self.size - 1);
        (idx(p.0), idx(p.1))
    }
}

fn ln_gaussian(x: f64, mu: f64, sigma: f64) -> f64 {
    let z = (x - mu) / sigma;
    -0.5 * z * z - (sigma * (2.0 * PI).sqrt()).ln()
}

fn ln_distance_likelihood(sensor: &SensorSpec, cell: (f64, f64)) -> f64 {
    let mu = sensor.distance_to(cell);
    ln_gaussian(sensor.distance, mu, sensor.distance_sigma(mu))
}

/// Returns the log density and whether the cell coincides with the sensor.
fn ln_bearing_likelihood(sensor: &SensorSpec, cell: (f64, f64)) -> (f64, bool) {
    match sensor.viewing_angle(cell) {
        Some(mu) => (
            ln_gaussian(wrap_degrees(sensor.bearing_deg - mu), 0.0, sensor.sigma_bearing_deg),
            false,
        ),
        None => (ln_gaussian(0.0, 0.0, sensor.sigma_bearing_deg), true),
    }
}

/// `p(D_i | cell)`: Gaussian density of the distance reading with mean equal
/// to the sensor-to-cell distance and standard deviation `5 + mu / 10`.
pub fn distance_likelihood(sensor: &SensorSpec, cell: (f64, f64)) -> f64 {
    ln_distance_likelihood(sensor, cell).exp()
}

/// `p(B_i | cell)`, per degree, on the wrapped angle residual. At the sensor
/// position the viewing angle is undefined and the peak density is returned.
pub fn bearing_likelihood(sensor: &SensorSpec, cell: (f64, f64)) -> f64 {
    ln_bearing_likelihood(sensor, cell).0.exp()
}

/// The six per-cell likelihood factors, each a row-major `size x size` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorGrids {
    pub size: usize,
    /// Ordered distance, bearing for sensor 1, then sensor 2, ...
    pub factors: Vec<Vec<f64>>,
    /// Cells where a bearing factor fell back to its peak because the cell
    /// coincides with a sensor.
    pub flagged_cells: Vec<(usize, usize)>,
}

/// Per-factor log-likelihood grids and the flagged cells.
type LnGrids = (Vec<Vec<f64>>, Vec<(usize, usize)>);

fn ln_factor_grids(sensors: &[SensorSpec], grid: &GridSpec) -> Result<LnGrids> {
    if sensors.is_empty() {
        return Err(Error::invalid("at least one sensor is required"));
    }
    for s in sensors {
        s.validate()?;
    }
    let mut flagged = Vec::new();
    let mut grids = Vec::with_capacity(2 * sensors.len());
    for s in sensors {
        let mut d = Vec::with_capacity(grid.cells());
        let mut b = Vec::with_capacity(grid.cells());
        for i in 0..grid.size {
            for j in 0..grid.size {
                let c = grid.cell_center(i, j);
                d.push(ln_distance_likelihood(s, c));
                let (lb, coincident) = ln_bearing_likelihood(s, c);
                if coincident && !flagged.contains(&(i, j)) {
                    flagged.push((i, j));
                }
                b.push(lb);
            }
        }
        grids.push(d);
        grids.push(b);
    }
    Ok((grids, flagged))
}

/// Raw likelihood densities for every cell.
pub fn likelihood_grids(sensors: &[SensorSpec], grid: &GridSpec) -> Result<FactorGrids> {
    let (ln, flagged_cells) = ln_factor_grids(sensors, grid)?;
    Ok(FactorGrids {
        size: grid.size,
        factors: ln.into_iter().map(|g| g.into_iter().map(f64::exp).collect()).collect(),
        flagged_cells,
    })
}

/// Divide every factor grid by its own maximum so each lies in `[0, 1]` with
/// peak exactly 1. The normalized product is unchanged.
pub fn scale_likelihoods(grids: &FactorGrids) -> Result<FactorGrids> {
    let factors = grids
        .factors
        .iter()
        .enumerate()
        .map(|(k, g)| {
            if g.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::invalid(format!("factor grid {k} has a negative or non-finite entry")));
            }
            let max = g.iter().copied().fold(0.0, f64::max);
            if max <= 0.0 {
                return Err(Error::invalid(format!("factor grid {k} is all zero")));
            }
            Ok(g.iter().map(|v| v / max).collect())
        })
        .collect::<Result<_>>()?;
    Ok(FactorGrids {
        size: grids.size,
        factors,
        flagged_cells: grids.flagged_cells.clone(),
    })
}

/// Normalized distribution over a square grid, row-major with `x` index outer.
#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorGrid {
    size: usize,
    values: Vec<f64>,
}

impl PosteriorGrid {
    /// Normalize nonnegative weights.
    pub fn from_weights(size: usize, weights: Vec<f64>) -> Result<Self> {
        if size == 0 || weights.len() != size * size {
            return Err(Error::invalid(format!(
                "{} weights do not fill a {size}x{size} grid",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid("weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::Degenerate("all weights are zero".into()));
        }
        Ok(PosteriorGrid {
            size,
            values: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn uniform(size: usize) -> Result<Self> {
        Self::from_weights(size, vec![1.0; size * size])
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }

    /// Cell with the largest mass; ties go to the first in row-major order.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (k, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = k;
            }
        }
        (best / self.size, best % self.size)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Exact posterior: product of all likelihood factors per cell, normalized.
/// Accumulated as log densities and shifted by the maximum before
/// exponentiating, so fine grids cannot underflow.
pub fn exact_posterior(sensors: &[SensorSpec], grid: &GridSpec) -> Result<PosteriorGrid> {
    let (ln, _) = ln_factor_grids(sensors, grid)?;
    let mut log_post = vec![0.0; grid.cells()];
    for g in &ln {
        for (acc, v) in log_post.iter_mut().zip(g) {
            *acc += v;
        }
    }
    let max = log_post.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::Degenerate(
            "likelihood product is zero or non-finite everywhere".into(),
        ));
    }
    PosteriorGrid::from_weights(grid.size, log_post.into_iter().map(|l| (l - max).exp()).collect())
}

fn source_id(i: usize, j: usize, k: usize) -> String {
    format!("c{i}_{j}_f{k}")
}

fn and_id(i: usize, j: usize, k: usize) -> String {
    format!("c{i}_{j}_a{k}")
}

/// Per cell: six probability sources (scaled likelihood factors) reduced by
/// a balanced tree of five `AND` gates into one counter.
pub fn build_fusion_netlist(sensors: &[SensorSpec], grid: &GridSpec) -> Result<Netlist> {
    let scaled = scale_likelihoods(&likelihood_grids(sensors, grid)?)?;
    fusion_netlist_from_factors(&scaled)
}

/// Build the per-cell `AND` trees from factor grids already in `[0, 1]`.
pub fn fusion_netlist_from_factors(scaled: &FactorGrids) -> Result<Netlist> {
    if scaled.factors.len() != FACTORS_PER_CELL {
        return Err(Error::invalid(format!(
            "fusion circuit takes {FACTORS_PER_CELL} factor grids, got {}",
            scaled.factors.len()
        )));
    }
    let size = scaled.size;
    let mut n = Netlist::new();
    for i in 0..size {
        for j in 0..size {
            let cell = i * size + j;
            for (k, g) in scaled.factors.iter().enumerate() {
                n.add_probability_source(source_id(i, j, k), g[cell]);
            }
            n.add_and(and_id(i, j, 0), source_id(i, j, 0), source_id(i, j, 1));
            n.add_and(and_id(i, j, 1), source_id(i, j, 2), source_id(i, j, 3));
            n.add_and(and_id(i, j, 2), source_id(i, j, 4), source_id(i, j, 5));
            n.add_and(and_id(i, j, 3), and_id(i, j, 0), and_id(i, j, 1));
            n.add_and(and_id(i, j, 4), and_id(i, j, 3), and_id(i, j, 2));
            n.add_output(and_id(i, j, 4));
        }
    }
    Ok(n)
}

/// Evaluate a fusion netlist and normalize the per-cell counters.
///
/// The netlist's outputs must be the cells in row-major order, as produced by
/// [`build_fusion_netlist`].
pub fn stochastic_posterior(
    netlist: &Netlist,
    length: usize,
    master_seed: u64,
    params: &MtjParams,
) -> Result<PosteriorGrid> {
    let cells = netlist.outputs.len();
    let size = (cells as f64).sqrt().round() as usize;
    if size * size != cells || cells == 0 {
        return Err(Error::invalid(format!("{cells} outputs do not form a square grid")));
    }
    let result = evaluate(netlist, length, master_seed, params)?;
    let counts: Vec<f64> = result.outputs.iter().map(|o| o.popcount as f64).collect();
    if counts.iter().all(|&c| c == 0.0) {
        return Err(Error::Degenerate(format!(
            "every counter is zero at length {length}; increase the bitstream length"
        )));
    }
    PosteriorGrid::from_weights(size, counts)
}

/// Additive smoothing applied to the stochastic distribution before KL.
pub fn kl_smoothing(length: usize, size: usize) -> f64 {
    1.0 / (10.0 * length as f64 * (size * size) as f64)
}

/// `D(p || q) = Σ p ln(p / q)` in nats, after adding `smoothing` to every
/// cell of `q` and renormalizing. Cells with `p = 0` contribute nothing.
pub fn kl_divergence(p: &PosteriorGrid, q: &PosteriorGrid, smoothing: f64) -> Result<f64> {
    if p.size != q.size {
        return Err(Error::invalid(format!(
            "grid shapes differ: {0}x{0} vs {1}x{1}",
            p.size, q.size
        )));
    }
    if !(smoothing.is_finite() && smoothing >= 0.0) {
        return Err(Error::invalid("smoothing must be finite and nonnegative"));
    }
    let z: f64 = q.values.iter().map(|v| v + smoothing).sum();
    let mut d = 0.0;
    for (&pv, &qv) in p.values.iter().zip(&q.values) {
        if pv > 0.0 {
            d += pv * (pv * z / (qv + smoothing)).ln();
        }
    }
    Ok(d.max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeatmapFormat {
    Csv,
    Pgm,
}

/// `x,y,prob` rows with cell indices.
pub fn heatmap_csv(grid: &PosteriorGrid) -> String {
    let mut s = String::from("x,y,prob\n");
    for i in 0..grid.size {
        for j in 0..grid.size {
            writeln!(s, "{i},{j},{}", grid.get(i, j)).unwrap();
        }
    }
    s
}

/// Binary 8-bit PGM scaled so the largest cell is 255. `x` runs left to
/// right and `y` bottom to top.
pub fn heatmap_pgm(grid: &PosteriorGrid, comment: Option<&str>) -> Vec<u8> {
    let mut out = b"P5\n".to_vec();
    if let Some(c) = comment {
        for line in c.lines() {
            out.extend_from_slice(format!("# {line}\n").as_bytes());
        }
    }
    out.extend_from_slice(format!("{0} {0}\n255\n", grid.size).as_bytes());
    let max = grid.max();
    for row in (0..grid.size).rev() {
        for col in 0..grid.size {
            let v = if max > 0.0 { grid.get(col, row) / max } else { 0.0 };
            out.push((v * 255.0).round().clamp(0.0, 255.0) as u8);
        }
    }
    out
}

pub fn export_heatmap(grid: &PosteriorGrid, path: impl AsRef<Path>, format: HeatmapFormat) -> Result<()> {
    let path = path.as_ref();
    let bytes = match format {
        HeatmapFormat::Csv => heatmap_csv(grid).into_bytes(),
        HeatmapFormat::Pgm => heatmap_pgm(grid, None),
    };
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Read the CSV written by [`heatmap_csv`]. Lines starting with `#` are skipped.
pub fn read_heatmap_csv(text: &str) -> Result<PosteriorGrid> {
    let mut cells = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == "x,y,prob" {
            continue;
        }
        let bad = || Error::invalid(format!("heatmap line {}: cannot parse '{line}'", n + 1));
        let mut parts = line.split(',');
        let (Some(x), Some(y), Some(p), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
            return Err(bad());
        };
        let x: usize = x.trim().parse().map_err(|_| bad())?;
        let y: usize = y.trim().parse().map_err(|_| bad())?;
        let p: f64 = p.trim().parse().map_err(|_| bad())?;
        cells.push((x, y, p));
    }
    let size = (cells.len() as f64).sqrt().round() as usize;
    if size == 0 || size * size != cells.len() {
        return Err(Error::invalid(format!("{} cells do not form a square grid", cells.len())));
    }
    let mut values = vec![f64::NAN; size * size];
    for (x, y, p) in cells {
        if x >= size || y >= size || !values[x * size + y].is_nan() {
            return Err(Error::invalid(format!("cell ({x}, {y}) out of range or repeated")));
        }
        values[x * size + y] = p;
    }
    PosteriorGrid::from_weights(size, values)
}

/// A complete localization problem.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub sensors: Vec<SensorSpec>,
    pub grid: GridSpec,
    pub true_position: Option<(f64, f64)>,
    /// Seed the readings were synthesized with, if they were.
    pub seed: u64,
}

/// Draw each sensor's readings from its own noise law at `target`.
pub fn synthesize_readings(positions: &[(f64, f64)], target: (f64, f64), seed: u64) -> Result<Vec<SensorSpec>> {
    positions
        .iter()
        .enumerate()
        .map(|(k, &pos)| {
            let mut s = SensorSpec::new(pos, 0.0, 0.0);
            draw_readings(&mut s, target, seed, k)?;
            Ok(s)
        })
        .collect()
}

/// Sensor `index` draws from the stream `(seed, index)`, distance first.
fn draw_readings(s: &mut SensorSpec, target: (f64, f64), seed: u64, index: usize) -> Result<()> {
    let mu_d = s.distance_to(target);
    let mu_b = s
        .viewing_angle(target)
        .ok_or_else(|| Error::invalid("target coincides with a sensor"))?;
    let mut rng = stream_rng(derive_seed_indexed(seed, index as u64));
    let nd = Normal::new(mu_d, s.distance_sigma(mu_d)).map_err(|e| Error::invalid(e.to_string()))?;
    let nb = Normal::new(mu_b, s.sigma_bearing_deg).map_err(|e| Error::invalid(e.to_string()))?;
    s.distance = nd.sample(&mut rng).max(0.0);
    s.bearing_deg = wrap_degrees(nb.sample(&mut rng));
    Ok(())
}

/// Three sensors at (0,0), (0,32), (32,0), target at (28,29), 64x64 grid and
/// readings synthesized with [`DEFAULT_READING_SEED`].
pub fn default_scenario() -> Scenario {
    let sensors = synthesize_readings(&DEFAULT_SENSOR_POSITIONS, DEFAULT_TRUE_POSITION, DEFAULT_READING_SEED)
        .expect("default scenario is well formed");
    Scenario {
        sensors,
        grid: GridSpec::new(64).expect("nonzero"),
        true_position: Some(DEFAULT_TRUE_POSITION),
        seed: DEFAULT_READING_SEED,
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    grid: usize,
    #[serde(default = "default_extent")]
    extent: f64,
    seed: u64,
    true_position: Option<[f64; 2]>,
    #[serde(default = "default_sigma_base")]
    sigma_distance_base: f64,
    #[serde(default = "default_sigma_slope")]
    sigma_distance_slope: f64,
    #[serde(default = "default_sigma_bearing")]
    sigma_bearing_deg: f64,
    sensor: Vec<SensorEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SensorEntry {
    position: [f64; 2],
    distance: Option<f64>,
    bearing_deg: Option<f64>,
}

fn default_extent() -> f64 {
    DEFAULT_EXTENT
}
fn default_sigma_base() -> f64 {
    SIGMA_DISTANCE_BASE
}
fn default_sigma_slope() -> f64 {
    SIGMA_DISTANCE_SLOPE
}
fn default_sigma_bearing() -> f64 {
    SIGMA_BEARING_DEG
}

impl Scenario {
    /// Parse a scenario file. Sensors without explicit readings get readings
    /// synthesized from `true_position` and `seed`.
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let cfg_err = |message: String| Error::Config {
            path: origin.to_path_buf(),
            message,
        };
        let f: ScenarioFile = toml::from_str(text).map_err(|e| cfg_err(e.to_string()))?;
        if f.sensor.is_empty() {
            return Err(cfg_err("at least one [[sensor]] is required".into()));
        }
        if !f.extent.is_finite() || f.extent <= 0.0 {
            return Err(cfg_err("extent must be positive".into()));
        }
        let grid = GridSpec {
            size: GridSpec::new(f.grid).map_err(|e| cfg_err(e.to_string()))?.size,
            extent: f.extent,
        };
        let true_position = f.true_position.map(|[x, y]| (x, y));
        let mut sensors = Vec::with_capacity(f.sensor.len());
        for (k, e) in f.sensor.iter().enumerate() {
            let pos = (e.position[0], e.position[1]);
            let mut s = SensorSpec {
                position: pos,
                distance: e.distance.unwrap_or(0.0),
                bearing_deg: e.bearing_deg.unwrap_or(0.0),
                sigma_distance_base: f.sigma_distance_base,
                sigma_distance_slope: f.sigma_distance_slope,
                sigma_bearing_deg: f.sigma_bearing_deg,
            };
            match (e.distance, e.bearing_deg) {
                (Some(_), Some(_)) => {}
                (None, None) => {
                    let target = true_position.ok_or_else(|| {
                        cfg_err(format!("sensor {} has no readings and no true_position is given", k + 1))
                    })?;
                    draw_readings(&mut s, target, f.seed, k).map_err(|e| cfg_err(e.to_string()))?;
                }
                _ => return Err(cfg_err(format!("sensor {} needs both distance and bearing_deg", k + 1))),
            }
            s.validate().map_err(|e| cfg_err(e.to_string()))?;
            sensors.push(s);
        }
        Ok(Scenario {
            sensors,
            grid,
            true_position,
            seed: f.seed,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    /// Same sensors and readings on a grid of another resolution.
    pub fn with_grid_size(&self, size: usize) -> Result<Self> {
        Ok(Scenario {
            grid: GridSpec {
                size: GridSpec::new(size)?.size,
                extent: self.grid.extent,
            },
            ..self.clone()
        })
    }
}

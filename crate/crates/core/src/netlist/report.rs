use std::fmt;

use super::Netlist;

/// Timing and energy constants of one SBG cycle.
///
/// One cycle is reset (10 ns) + write (5 ns) + read and margins, 40 ns in
/// total. The per-cycle energy is a placeholder used only to produce an
/// order-of-magnitude estimate; it is not calibrated against any measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostModel {
    pub cycle_ns: f64,
    pub e_cycle_pj: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            cycle_ns: 40.0,
            e_cycle_pj: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResourceReport {
    pub n_sbg: usize,
    pub n_and: usize,
    pub n_mux: usize,
    pub n_counters: usize,
    pub length: usize,
    /// All SBGs and gates run in parallel, so latency is one cycle per bit.
    pub latency_ns: f64,
    /// Unvalidated estimate: `n_sbg * length * e_cycle`.
    pub energy_est_pj: f64,
}

pub fn resource_report(netlist: &Netlist, length: usize, cost: &CostModel) -> ResourceReport {
    let n_sbg = netlist.sources.len();
    ResourceReport {
        n_sbg,
        n_and: netlist.and_count(),
        n_mux: netlist.mux_count(),
        n_counters: netlist.outputs.len(),
        length,
        latency_ns: cost.cycle_ns * length as f64,
        energy_est_pj: n_sbg as f64 * length as f64 * cost.e_cycle_pj,
    }
}

impl fmt::Display for ResourceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n_sbg={} n_and={} n_mux={} n_counters={} length={} latency_ns={} energy_est_pj={} (estimate, unvalidated)",
            self.n_sbg,
            self.n_and,
            self.n_mux,
            self.n_counters,
            self.length,
            self.latency_ns,
            self.energy_est_pj
        )
    }
}

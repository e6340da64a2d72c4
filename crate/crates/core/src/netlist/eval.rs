use std::fmt::Write as _;

use rayon::prelude::*;

use super::validate::{check_structure, NodeRef};
use super::{validate, GateKind, Netlist, SourceValue};
use crate::bitstream::{and_gate, mux_gate, Bitstream, Probability};
use crate::error::{Error, Result};
use crate::mtj::{generate, voltage_for_probability, MtjParams, SbgNode};
use crate::rng::derive_seed;

#[derive(Clone, Debug, PartialEq)]
pub struct OutputValue {
    pub id: String,
    pub stream: Bitstream,
    /// Counter decode, `popcount / length`.
    pub probability: Probability,
    pub popcount: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult {
    pub outputs: Vec<OutputValue>,
    pub length: usize,
    pub master_seed: u64,
    /// Probability sources whose target lay outside the SBG window and were
    /// generated at the nearest window edge instead.
    pub clamped_sources: Vec<String>,
}

impl EvalResult {
    pub fn get(&self, id: &str) -> Option<&OutputValue> {
        self.outputs.iter().find(|o| o.id == id)
    }

    /// `output_id,probability,popcount,length`, one row per output.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("output_id,probability,popcount,length\n");
        for o in &self.outputs {
            writeln!(s, "{},{},{},{}", o.id, o.probability, o.popcount, self.length).unwrap();
        }
        s
    }
}

/// Generate the stream for one source. Returns the stream and whether the
/// requested probability had to be clamped into the device window.
fn source_stream(
    id: &str,
    value: SourceValue,
    length: usize,
    master_seed: u64,
    params: &MtjParams,
) -> Result<(Bitstream, bool)> {
    let seed = derive_seed(master_seed, id);
    let (volts, clamped) = match value {
        // Constant levels need no junction.
        SourceValue::Probability(0.0) => return Ok((Bitstream::zeros(length)?, false)),
        SourceValue::Probability(1.0) => return Ok((Bitstream::ones(length)?, false)),
        SourceValue::Probability(p) => {
            let sol = voltage_for_probability(Probability::new(p)?, params);
            (sol.volts, sol.clamped)
        }
        SourceValue::Voltage(v) => (v, false),
    };
    let node = SbgNode::new(id, volts, seed, *params)?;
    Ok((generate(&node, length)?, clamped))
}

/// Simulate `length` SBG cycles of every source and propagate through the gates.
///
/// Each source draws from its own generator seeded by `(master_seed, id)`, so
/// results are independent of evaluation order and of how many threads rayon
/// uses. Gate evaluation is word-parallel and bit-identical to evaluating
/// each bit position separately.
pub fn evaluate(netlist: &Netlist, length: usize, master_seed: u64, params: &MtjParams) -> Result<EvalResult> {
    if length < 1 {
        return Err(Error::invalid("stream length must be at least 1"));
    }
    validate(netlist, params)?;
    let st = check_structure(netlist);

    let generated: Vec<(Bitstream, bool)> = netlist
        .sources
        .par_iter()
        .map(|s| source_stream(&s.id, s.value, length, master_seed, params))
        .collect::<Result<_>>()?;
    let clamped_sources = netlist
        .sources
        .iter()
        .zip(&generated)
        .filter(|(_, (_, c))| *c)
        .map(|(s, _)| s.id.clone())
        .collect();
    let sources: Vec<Bitstream> = generated.into_iter().map(|(b, _)| b).collect();

    let mut gates: Vec<Option<Bitstream>> = vec![None; netlist.gates.len()];
    for &gi in &st.order {
        let fetch = |name: &str| -> &Bitstream {
            match st.index[name] {
                NodeRef::Source(i) => &sources[i],
                NodeRef::Gate(j) => gates[j].as_ref().expect("dependency evaluated first"),
            }
        };
        let out = match &netlist.gates[gi].kind {
            GateKind::And { a, b } => and_gate(fetch(a), fetch(b))?,
            GateKind::Mux { a, b, sel } => mux_gate(fetch(a), fetch(b), fetch(sel))?,
        };
        gates[gi] = Some(out);
    }

    let outputs = netlist
        .outputs
        .iter()
        .map(|o| {
            let stream = match st.index[o.id.as_str()] {
                NodeRef::Source(i) => sources[i].clone(),
                NodeRef::Gate(j) => gates[j].clone().expect("evaluated"),
            };
            OutputValue {
                id: o.id.clone(),
                probability: stream.estimate(),
                popcount: stream.popcount(),
                stream,
            }
        })
        .collect();

    Ok(EvalResult {
        outputs,
        length,
        master_seed,
        clamped_sources,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse;
    use proptest::prelude::*;

    fn params() -> MtjParams {
        MtjParams::default()
    }

    #[test]
    fn constant_sources() {
        let n = parse("sbg a p=1.0\nsbg b p=1.0\nand c a b\nout c").unwrap();
        let r = evaluate(&n, 256, 1, &params()).unwrap();
        assert_eq!(r.outputs[0].probability.value(), 1.0);
        assert!(r.clamped_sources.is_empty());
    }

    #[test]
    fn product_of_halves() {
        let n = parse("sbg a p=0.5\nsbg b p=0.5\nand c a b\nout c").unwrap();
        let r = evaluate(&n, 4096, 7, &params()).unwrap();
        let p = r.get("c").unwrap().probability.value();
        assert!((p - 0.25).abs() <= 0.02, "p = {p}");
        assert_eq!(r.get("c").unwrap().popcount as f64 / 4096.0, p);
    }

    #[test]
    fn determinism_across_thread_counts() {
        let n = parse("sbg a p=0.3\nsbg b v=1.3\nsbg s p=0.6\nmux m a b s\nand x m a\nout x\nout m").unwrap();
        let reference = evaluate(&n, 1000, 42, &params()).unwrap();
        for threads in [1, 2, 5] {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            let r = pool.install(|| evaluate(&n, 1000, 42, &params()).unwrap());
            assert_eq!(r, reference);
        }
        assert_ne!(evaluate(&n, 1000, 43, &params()).unwrap(), reference);
    }

    #[test]
    fn clamped_sources_reported() {
        let n = parse("sbg a p=0.001\nsbg b p=0.999\nand c a b\nout c").unwrap();
        let r = evaluate(&n, 64, 0, &params()).unwrap();
        assert_eq!(r.clamped_sources, vec!["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn invalid_inputs() {
        let n = parse("sbg a p=0.5\nout a").unwrap();
        assert!(matches!(evaluate(&n, 0, 0, &params()), Err(Error::InvalidInput(_))));
        let bad = parse("sbg a p=1.5\nout a").unwrap();
        assert!(matches!(evaluate(&bad, 8, 0, &params()), Err(Error::Validation(_))));
    }

    #[test]
    fn csv_export() {
        let n = parse("sbg a p=1\nout a").unwrap();
        let r = evaluate(&n, 8, 0, &params()).unwrap();
        assert_eq!(r.to_csv(), "output_id,probability,popcount,length\na,1,8,8\n");
    }

    /// Random DAG over at most 10 nodes, as (sources, gates) where every
    /// gate input index points at an earlier node.
    /// Source probabilities and gates `(is_and, a, b, sel)` over earlier nodes.
    type Dag = (Vec<f64>, Vec<(bool, usize, usize, usize)>);

    fn arb_dag() -> impl Strategy<Value = Dag> {
        (1usize..5).prop_flat_map(|n_src| {
            (
                prop::collection::vec(0.0f64..=1.0, n_src),
                prop::collection::vec((any::<bool>(), any::<usize>(), any::<usize>(), any::<usize>()), 0..=(10 - n_src)),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_manual_gate_application((probs, gates) in arb_dag(), seed in any::<u64>(), len in 1usize..300) {
            let p = params();
            let mut n = Netlist::new();
            let mut streams = Vec::new();
            for (i, &pr) in probs.iter().enumerate() {
                let id = format!("s{i}");
                n.add_probability_source(id.clone(), pr);
                streams.push(source_stream(&id, SourceValue::Probability(pr), len, seed, &p).unwrap().0);
            }
            let name = |k: usize| if k < probs.len() { format!("s{k}") } else { format!("g{}", k - probs.len()) };
            for (i, &(is_and, a, b, c)) in gates.iter().enumerate() {
                let total = probs.len() + i;
                let (a, b, c) = (a % total, b % total, c % total);
                let out = if is_and {
                    n.add_and(format!("g{i}"), name(a), name(b));
                    and_gate(&streams[a], &streams[b]).unwrap()
                } else {
                    n.add_mux(format!("g{i}"), name(a), name(b), name(c));
                    mux_gate(&streams[a], &streams[b], &streams[c]).unwrap()
                };
                streams.push(out);
            }
            for k in 0..streams.len() {
                n.add_output(name(k));
            }
            let r = evaluate(&n, len, seed, &p).unwrap();
            for (k, o) in r.outputs.iter().enumerate() {
                prop_assert_eq!(&o.stream, &streams[k]);
            }
            // prefix property
            let k = len.div_ceil(2);
            let short = evaluate(&n, k, seed, &p).unwrap();
            for (full, pre) in r.outputs.iter().zip(&short.outputs) {
                prop_assert_eq!(full.stream.prefix(k).unwrap(), pre.stream.clone());
            }
        }
    }
}

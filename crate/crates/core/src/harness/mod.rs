//! Traces, workload generators, configuration and the multi-mode runner.

pub mod config;
pub mod gen;
pub mod trace;

pub use config::{Config, ConfigError};
pub use gen::{generate, line_of_class, DataClass, GenParams, WorkloadKind};
pub use trace::{parse_trace, parse_trace_str, write_trace, TraceError, TraceRecord};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::codec::{packed_size, PAYLOAD_BYTES};
use crate::controller::{BandwidthLedger, Mode, SimError, SimStats, Simulator, StorageAudit};
use crate::predictor::LlpStats;
use crate::{Line, GROUP_LINES};

#[derive(Debug, Clone, PartialEq)]
pub struct ModeResult {
    pub mode: Mode,
    pub ledger: BandwidthLedger,
    pub stats: SimStats,
    pub llp: LlpStats,
    pub lit_overflows: u64,
    pub inverted_writes: u64,
    pub storage: StorageAudit,
}

/// Fraction of touched pairs and quads whose compressed size fits a budget.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Histogram {
    pub pairs: u64,
    pub pairs_fit_64: u64,
    pub pairs_fit_60: u64,
    pub quads: u64,
    pub quads_fit_64: u64,
    pub quads_fit_60: u64,
}

impl Histogram {
    /// Measured on the last value each touched line holds in the trace;
    /// untouched neighbours count as zero lines.
    pub fn from_trace(trace: &[TraceRecord]) -> Self {
        let mut last: BTreeMap<u64, Line> = BTreeMap::new();
        for r in trace {
            let a = r.line_addr();
            match (r.write, r.data) {
                (true, Some(d)) => {
                    last.insert(a, d);
                }
                (false, Some(d)) => {
                    last.entry(a).or_insert(d);
                }
                _ => {
                    last.entry(a).or_insert_with(Line::zero);
                }
            }
        }
        let get = |a: u64| last.get(&a).copied().unwrap_or_default();
        let mut h = Histogram::default();
        let pairs: BTreeSet<u64> = last.keys().map(|a| a / 2).collect();
        for p in pairs {
            let s = packed_size(&[get(2 * p), get(2 * p + 1)]);
            h.pairs += 1;
            h.pairs_fit_64 += (s <= 64) as u64;
            h.pairs_fit_60 += (s <= PAYLOAD_BYTES) as u64;
        }
        let quads: BTreeSet<u64> = last.keys().map(|a| a / GROUP_LINES).collect();
        for q in quads {
            let lines: Vec<Line> = (0..4).map(|i| get(q * 4 + i)).collect();
            let s = packed_size(&lines);
            h.quads += 1;
            h.quads_fit_64 += (s <= 64) as u64;
            h.quads_fit_60 += (s <= PAYLOAD_BYTES) as u64;
        }
        h
    }

    fn frac(n: u64, d: u64) -> f64 {
        if d == 0 {
            0.0
        } else {
            n as f64 / d as f64
        }
    }

    pub fn rows(&self) -> [(&'static str, f64); 6] {
        [
            ("pairs", self.pairs as f64),
            ("pair_fit_64", Self::frac(self.pairs_fit_64, self.pairs)),
            ("pair_fit_60", Self::frac(self.pairs_fit_60, self.pairs)),
            ("quads", self.quads as f64),
            ("quad_fit_64", Self::frac(self.quads_fit_64, self.quads)),
            ("quad_fit_60", Self::frac(self.quads_fit_60, self.quads)),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsReport {
    pub modes: Vec<ModeResult>,
    /// Uncompressed total used for normalisation.
    pub baseline_accesses: u64,
    pub histogram: Histogram,
    pub latency_per_access: f64,
}

impl StatsReport {
    pub fn mode(&self, m: Mode) -> Option<&ModeResult> {
        self.modes.iter().find(|r| r.mode == m)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("mode,counter,value\n");
        for r in &self.modes {
            let m = r.mode.name();
            for (k, v) in r.ledger.entries() {
                writeln!(s, "{m},{k},{v}").unwrap();
            }
            let total = r.ledger.total_accesses();
            let norm = if self.baseline_accesses == 0 {
                0.0
            } else {
                total as f64 / self.baseline_accesses as f64
            };
            writeln!(s, "{m},total_accesses,{total}").unwrap();
            writeln!(s, "{m},normalized_accesses,{norm:.6}").unwrap();
            writeln!(s, "{m},llc_hits,{}", r.stats.hits).unwrap();
            writeln!(s, "{m},llc_misses,{}", r.stats.misses).unwrap();
            writeln!(s, "{m},llc_hit_rate,{:.6}", r.stats.hit_rate()).unwrap();
            writeln!(s, "{m},llp_predictions,{}", r.llp.predictions).unwrap();
            writeln!(s, "{m},llp_accuracy,{:.6}", r.llp.accuracy()).unwrap();
            writeln!(s, "{m},lit_overflows,{}", r.lit_overflows).unwrap();
            writeln!(s, "{m},inverted_writes,{}", r.inverted_writes).unwrap();
            writeln!(
                s,
                "{m},latency_proxy_ns,{:.1}",
                total as f64 * self.latency_per_access
            )
            .unwrap();
        }
        for (k, v) in self.histogram.rows() {
            writeln!(s, "histogram,{k},{v:.6}").unwrap();
        }
        s
    }
}

/// Replay `trace` under one mode.
pub fn run_mode(cfg: &Config, trace: &[TraceRecord], mode: Mode) -> Result<ModeResult, SimError> {
    let mut sim = Simulator::new(cfg.sim_config(mode))?;
    for r in trace {
        sim.access(r.core, r.write, r.line_addr(), r.data)?;
    }
    let c = sim.controller();
    Ok(ModeResult {
        mode,
        ledger: *c.ledger(),
        stats: *sim.stats(),
        llp: *c.llp_stats(),
        lit_overflows: c.lit().overflow_count(),
        inverted_writes: c.inverted_writes(),
        storage: c.storage_audit(),
    })
}

/// Replay `trace` under each mode, one thread per mode. The uncompressed
/// baseline is also run when not requested.
pub fn run(cfg: &Config, trace: &[TraceRecord], modes: &[Mode]) -> Result<StatsReport, SimError> {
    let mut all: Vec<Mode> = modes.to_vec();
    all.dedup();
    let need_baseline = !all.contains(&Mode::Uncompressed);
    if need_baseline {
        all.push(Mode::Uncompressed);
    }
    let results: Vec<Result<ModeResult, SimError>> = std::thread::scope(|s| {
        let handles: Vec<_> = all
            .iter()
            .map(|&m| s.spawn(move || run_mode(cfg, trace, m)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("mode thread panicked"))
            .collect()
    });
    let mut results = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let baseline = results
        .iter()
        .find(|r| r.mode == Mode::Uncompressed)
        .map(|r| r.ledger.total_accesses())
        .unwrap_or(0);
    if need_baseline {
        results.retain(|r| r.mode != Mode::Uncompressed);
    }
    Ok(StatsReport {
        modes: results,
        baseline_accesses: baseline,
        histogram: Histogram::from_trace(trace),
        latency_per_access: cfg.latency_per_access,
    })
}

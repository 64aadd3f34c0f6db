//! Deterministic synthetic workloads.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::trace::TraceRecord;
use crate::Line;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WorkloadKind {
    /// Sequential passes over 4:1-compressible lines.
    SeqCompressible,
    /// Uniform random accesses to random data.
    RandomIncompressible,
    /// One compressibility class per 4KB page; pages in random order, lines
    /// sequential within a page.
    PageHomogeneous,
    /// A single pass of compressible first-touch reads, some followed by a
    /// write; nothing is read twice.
    LowReuseCompressible,
    /// One of the above per core on disjoint regions, interleaved.
    Mixed,
}

impl WorkloadKind {
    pub const ALL: [WorkloadKind; 5] = [
        WorkloadKind::SeqCompressible,
        WorkloadKind::RandomIncompressible,
        WorkloadKind::PageHomogeneous,
        WorkloadKind::LowReuseCompressible,
        WorkloadKind::Mixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WorkloadKind::SeqCompressible => "seq_compressible",
            WorkloadKind::RandomIncompressible => "random_incompressible",
            WorkloadKind::PageHomogeneous => "page_homogeneous",
            WorkloadKind::LowReuseCompressible => "low_reuse_compressible",
            WorkloadKind::Mixed => "mixed",
        }
    }
}

impl fmt::Display for WorkloadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WorkloadKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        WorkloadKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown workload `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    /// Footprint in lines (per core for `mixed`).
    pub lines: u64,
    pub passes: u32,
    /// Probability that an access after the first touch is a write.
    pub write_fraction: f64,
    /// Cores used by `mixed`.
    pub cores: u8,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            lines: 1 << 16,
            passes: 2,
            write_fraction: 0.0,
            cores: 4,
        }
    }
}

/// Compressibility class of generated data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataClass {
    /// Four lines fit one 60-byte payload.
    Quad,
    /// Two lines fit, four do not.
    Pair,
    Random,
}

fn words_in(rng: &mut impl Rng, lo: i32, hi: i32) -> Line {
    let mut w = [0u32; 16];
    for x in &mut w {
        *x = rng.random_range(lo..=hi) as u32;
    }
    Line::from_words(&w)
}

pub fn line_of_class(rng: &mut impl RngCore, class: DataClass) -> Line {
    match class {
        DataClass::Quad => words_in(rng, -8, 7),
        DataClass::Pair => {
            let mut l = words_in(rng, -128, 127);
            // Keep at least one word outside the 4-bit range.
            let mut w = l.words();
            w[0] = 100;
            l = Line::from_words(&w);
            l
        }
        DataClass::Random => {
            let mut b = [0u8; 64];
            rng.fill_bytes(&mut b);
            Line(b)
        }
    }
}

fn rec(core: u8, write: bool, line: u64, data: Option<Line>) -> TraceRecord {
    TraceRecord {
        seq: 0,
        core,
        write,
        addr: line * 64,
        data,
    }
}

/// First touch reads with data; later touches write with probability
/// `write_fraction`, otherwise read without data.
struct Emitter {
    touched: HashSet<u64>,
    out: Vec<TraceRecord>,
    write_fraction: f64,
}

impl Emitter {
    fn new(write_fraction: f64) -> Self {
        Emitter {
            touched: HashSet::new(),
            out: Vec::new(),
            write_fraction,
        }
    }

    fn touch(&mut self, rng: &mut ChaCha8Rng, line: u64, class: DataClass) {
        if self.touched.insert(line) {
            let d = line_of_class(rng, class);
            self.out.push(rec(0, false, line, Some(d)));
        } else if self.write_fraction > 0.0 && rng.random_bool(self.write_fraction) {
            let d = line_of_class(rng, class);
            self.out.push(rec(0, true, line, Some(d)));
        } else {
            self.out.push(rec(0, false, line, None));
        }
    }
}

pub fn generate(kind: WorkloadKind, p: &GenParams, seed: u64) -> Vec<TraceRecord> {
    let mut t = match kind {
        WorkloadKind::Mixed => mixed(p, seed),
        k => single(k, p, seed),
    };
    for (i, r) in t.iter_mut().enumerate() {
        r.seq = i as u64;
    }
    t
}

fn single(kind: WorkloadKind, p: &GenParams, seed: u64) -> Vec<TraceRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = Emitter::new(p.write_fraction);
    let n = p.lines;
    match kind {
        WorkloadKind::SeqCompressible => {
            for _ in 0..p.passes {
                for a in 0..n {
                    e.touch(&mut rng, a, DataClass::Quad);
                }
            }
        }
        WorkloadKind::RandomIncompressible => {
            for _ in 0..n * p.passes as u64 {
                let a = rng.random_range(0..n);
                e.touch(&mut rng, a, DataClass::Random);
            }
        }
        WorkloadKind::PageHomogeneous => {
            const PAGE_LINES: u64 = 64;
            let pages = n.div_ceil(PAGE_LINES);
            let classes: Vec<DataClass> = (0..pages)
                .map(|_| {
                    [DataClass::Quad, DataClass::Pair, DataClass::Random][rng.random_range(0..3)]
                })
                .collect();
            let mut order: Vec<u64> = (0..pages).collect();
            for _ in 0..p.passes {
                order.shuffle(&mut rng);
                for &pg in &order {
                    for a in pg * PAGE_LINES..((pg + 1) * PAGE_LINES).min(n) {
                        e.touch(&mut rng, a, classes[pg as usize]);
                    }
                }
            }
        }
        WorkloadKind::LowReuseCompressible => {
            for a in 0..n {
                e.touch(&mut rng, a, DataClass::Quad);
                if p.write_fraction > 0.0 && rng.random_bool(p.write_fraction) {
                    let d = line_of_class(&mut rng, DataClass::Quad);
                    e.out.push(rec(0, true, a, Some(d)));
                }
            }
        }
        WorkloadKind::Mixed => unreachable!("handled by mixed()"),
    }
    e.out
}

fn mixed(p: &GenParams, seed: u64) -> Vec<TraceRecord> {
    const KINDS: [WorkloadKind; 4] = [
        WorkloadKind::SeqCompressible,
        WorkloadKind::PageHomogeneous,
        WorkloadKind::RandomIncompressible,
        WorkloadKind::LowReuseCompressible,
    ];
    let cores = p.cores.max(1);
    let streams: Vec<Vec<TraceRecord>> = (0..cores)
        .map(|c| {
            let mut s = single(
                KINDS[c as usize % KINDS.len()],
                p,
                seed.wrapping_add(c as u64),
            );
            for r in &mut s {
                r.core = c;
                r.addr += c as u64 * p.lines * 64;
            }
            s
        })
        .collect();
    let longest = streams.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = Vec::with_capacity(streams.iter().map(Vec::len).sum());
    for i in 0..longest {
        for s in &streams {
            if let Some(r) = s.get(i) {
                out.push(r.clone());
            }
        }
    }
    out
}

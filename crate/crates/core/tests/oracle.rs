//! Every mode replayed against the ground-truth shadow, with structural
//! audits and ledger invariants.

mod common;

use common::{random_trace, with_tail, Shadow};
use cram_core::controller::{ControllerConfig, Mode, SimConfig, Simulator};
use cram_core::harness::{generate, run, Config, GenParams, WorkloadKind};
use cram_core::llc::CacheConfig;
use cram_core::marker::{LitOverflow, MarkerBits, MarkerConfig, MarkerMode};
use cram_core::Line;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MEMORY_LINES: u64 = 1 << 14;

fn small_llc() -> CacheConfig {
    CacheConfig {
        capacity: 32 << 10,
        assoc: 8,
        sampled_fraction: 0.1,
    }
}

fn sim(mode: Mode, markers: MarkerConfig, overflow: LitOverflow, seed: u64) -> Simulator {
    Simulator::new(SimConfig {
        mode,
        llc: small_llc(),
        ctrl: ControllerConfig {
            memory_lines: MEMORY_LINES,
            markers,
            lit_overflow: overflow,
            seed,
            ..ControllerConfig::default()
        },
    })
    .unwrap()
}

fn marker_variants() -> Vec<(MarkerConfig, LitOverflow)> {
    let m = |mode, bits, per_line_il| MarkerConfig {
        mode,
        bits,
        per_line_il,
    };
    vec![
        (
            m(MarkerMode::PerLine, MarkerBits::B32, false),
            LitOverflow::Rekey,
        ),
        (
            m(MarkerMode::PerLine, MarkerBits::B32, true),
            LitOverflow::MemoryMapped,
        ),
        (
            m(MarkerMode::Fixed, MarkerBits::B32, true),
            LitOverflow::MemoryMapped,
        ),
        (
            m(MarkerMode::Fixed, MarkerBits::B32, false),
            LitOverflow::MemoryMapped,
        ),
        (
            m(MarkerMode::PerLine, MarkerBits::B8, false),
            LitOverflow::MemoryMapped,
        ),
        (
            m(MarkerMode::PerLine, MarkerBits::B8, true),
            LitOverflow::Rekey,
        ),
    ]
}

fn replay_audited(sim: &mut Simulator, seed: u64, ops: usize) -> Shadow {
    let trace = random_trace(seed, ops, MEMORY_LINES, 600);
    let mut sh = Shadow::default();
    for (i, r) in trace.iter().enumerate() {
        sh.step(sim, r.core, r.write, r.line_addr(), r.data)
            .unwrap_or_else(|e| panic!("op {i}: {e}"));
        if i % 2500 == 0 {
            sh.audit(sim).unwrap_or_else(|e| panic!("op {i}: {e}"));
        }
    }
    sim.flush().unwrap();
    sh.audit(sim).unwrap();
    sh
}

#[test]
fn every_mode_and_marker_variant_matches_shadow() {
    for (markers, overflow) in marker_variants() {
        for mode in Mode::ALL {
            for seed in 0..2 {
                let mut s = sim(mode, markers, overflow, seed);
                let sh = replay_audited(&mut s, 100 + seed, 12_000);
                assert!(sh.checked_values > 12_000, "{mode} {markers:?}");
            }
        }
    }
}

#[test]
fn reads_after_flush_return_ground_truth() {
    for mode in Mode::ALL {
        let mut s = sim(mode, MarkerConfig::default(), LitOverflow::Rekey, 7);
        let mut sh = replay_audited(&mut s, 9, 8_000);
        for a in 0..MEMORY_LINES / 4 {
            sh.step(&mut s, 0, false, a, None).unwrap();
        }
    }
}

#[test]
fn misses_equal_demand_reads_and_second_probes_are_bounded() {
    for mode in Mode::ALL {
        let mut s = sim(mode, MarkerConfig::default(), LitOverflow::Rekey, 3);
        replay_audited(&mut s, 5, 20_000);
        let st = s.stats();
        let l = s.controller().ledger();
        let p = s.controller().llp_stats();
        assert_eq!(st.hits + st.misses, 20_000, "{mode}");
        assert_eq!(st.misses, l.demand_data, "{mode}");
        let wrong = p.predictions - p.first_probe_hits;
        assert!(
            l.second_access >= wrong && l.second_access <= 2 * wrong,
            "{mode}"
        );
        if !mode.implicit() {
            assert_eq!(l.second_access, 0);
            assert_eq!(l.lit_bitmap_accesses, 0);
        }
        if mode != Mode::Explicit {
            assert_eq!(l.metadata_reads + l.metadata_writes, 0, "{mode}");
        }
        if mode == Mode::Uncompressed {
            assert_eq!(l.clean_writebacks + l.invalidates, 0);
        }
    }
}

#[test]
fn ledger_never_decreases() {
    let trace = random_trace(11, 6_000, MEMORY_LINES, 300);
    for mode in Mode::ALL {
        let mut s = sim(mode, MarkerConfig::default(), LitOverflow::Rekey, 1);
        let mut prev = s.controller().ledger().values();
        for r in &trace {
            s.access(r.core, r.write, r.line_addr(), r.data).unwrap();
            let cur = s.controller().ledger().values();
            assert!(prev.iter().zip(cur).all(|(a, b)| *a <= b), "{mode}");
            prev = cur;
        }
    }
}

fn small_config() -> Config {
    Config {
        llc: small_llc(),
        ctrl: ControllerConfig {
            memory_lines: MEMORY_LINES,
            ..ControllerConfig::default()
        },
        ..Config::default()
    }
}

#[test]
fn ideal_never_exceeds_static_on_random_traces() {
    let cfg = small_config();
    for seed in 0..100 {
        let trace = random_trace(1000 + seed, 3_000, MEMORY_LINES, 200);
        let rep = run(&cfg, &trace, &[Mode::Ideal, Mode::CramStatic]).unwrap();
        let ideal = rep.mode(Mode::Ideal).unwrap().ledger.total_accesses();
        let stat = rep.mode(Mode::CramStatic).unwrap().ledger.total_accesses();
        assert!(ideal <= stat, "seed {seed}: ideal {ideal} > static {stat}");
    }
}

#[test]
fn compressible_reuse_orders_modes() {
    let mut cfg = small_config();
    cfg.gen = GenParams {
        lines: 4096,
        passes: 24,
        write_fraction: 0.0,
        cores: 1,
    };
    let trace = generate(WorkloadKind::SeqCompressible, &cfg.gen, 2);
    let rep = run(&cfg, &trace, &Mode::ALL).unwrap();
    let t = |m| rep.mode(m).unwrap().ledger.total_accesses() as f64;
    for m in Mode::ALL {
        eprintln!("{m}: {}", t(m));
    }
    assert!(t(Mode::Ideal) <= t(Mode::CramStatic));
    assert!(t(Mode::Ideal) <= t(Mode::CramDynamic));
    assert!(t(Mode::CramStatic) < t(Mode::Uncompressed));
    // Sampled-set share plus warm-up tolerance.
    assert!(t(Mode::CramDynamic) <= t(Mode::Uncompressed).max(t(Mode::CramStatic)) * 1.03);
}

#[test]
fn incompressible_data_costs_nothing_extra() {
    let mut cfg = small_config();
    cfg.gen = GenParams {
        lines: 8192,
        passes: 3,
        write_fraction: 0.2,
        cores: 1,
    };
    let trace = generate(WorkloadKind::RandomIncompressible, &cfg.gen, 4);
    let rep = run(&cfg, &trace, &[Mode::CramStatic, Mode::CramDynamic]).unwrap();
    let base = rep.baseline_accesses as f64;
    for m in [Mode::CramStatic, Mode::CramDynamic] {
        let t = rep.mode(m).unwrap().ledger.total_accesses() as f64;
        assert!((t - base).abs() <= 0.03 * base, "{m}: {t} vs {base}");
    }
}

#[test]
fn rekey_preserves_every_line_in_memory() {
    let mut s = sim(
        Mode::CramStatic,
        MarkerConfig::default(),
        LitOverflow::Rekey,
        21,
    );
    let mut sh = Shadow::default();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    // Compressible background so memory holds every slot kind.
    for a in 0..2048u64 {
        let d = if rng.random_bool(0.5) {
            Line::zero()
        } else {
            common::mixed_line(&mut rng)
        };
        sh.step(&mut s, 0, true, a, Some(d)).unwrap();
    }
    s.flush().unwrap();
    // Enough colliding lines to overflow the table several times.
    for a in 2048..2048 + 80u64 {
        let ms = s.controller().markers().markers(a);
        let tail = if a % 2 == 0 { ms.m2 } else { ms.m4 };
        let d = with_tail(&mut rng, tail);
        sh.step(&mut s, 1, true, a, Some(d)).unwrap();
        if a % 8 == 0 {
            s.flush().unwrap();
        }
    }
    s.flush().unwrap();
    assert!(s.controller().ledger().rekey_events > 0);
    sh.audit(&s).unwrap();
    for a in 0..2048 + 80u64 {
        sh.step(&mut s, 0, false, a, None).unwrap();
    }
}

#[test]
fn fixed_markers_cannot_rekey_away_collisions() {
    let markers = MarkerConfig {
        mode: MarkerMode::Fixed,
        ..MarkerConfig::default()
    };
    let mut s = sim(Mode::CramStatic, markers, LitOverflow::Rekey, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut err = None;
    for a in 0..64u64 {
        let d = with_tail(&mut rng, 0x2222_2222);
        s.access(0, true, a * 4, Some(d)).unwrap();
        if let Err(e) = s.flush() {
            err = Some(e);
            break;
        }
    }
    assert!(
        matches!(err, Some(cram_core::controller::SimError::RekeyFailed(_))),
        "{err:?}"
    );
}

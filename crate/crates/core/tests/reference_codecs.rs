//! Independent size models for FPC, BDI and the packer, compared with the
//! library encoders.

use cram_core::codec::{
    bdi_compress, fpc_compress, hybrid_compress, pack_group, packed_size, Algo, PackLevel,
    PAYLOAD_BYTES,
};
use cram_core::Line;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Smallest data field, in bits, that represents `w`.
fn fpc_word_bits(w: u32) -> u32 {
    let s = w as i32 as i64;
    let lo = (w & 0xffff) as u16 as i16 as i64;
    let hi = (w >> 16) as u16 as i16 as i64;
    let b = w.to_le_bytes();
    let mut best = 32;
    if w == 0 {
        best = 0;
    } else if (-8..8).contains(&s) {
        best = 4;
    } else if (-128..128).contains(&s) || b.iter().all(|&x| x == b[0]) {
        best = 8;
    } else if (-32768..32768).contains(&s)
        || w & 0xffff == 0
        || ((-128..128).contains(&lo) && (-128..128).contains(&hi))
    {
        best = 16;
    }
    best
}

/// Codeword size (tag byte included) of the reference FPC encoder.
fn ref_fpc_size(l: &Line) -> usize {
    let bits: u32 = 16 * 3 + l.words().iter().map(|&w| fpc_word_bits(w)).sum::<u32>();
    let body = bits.div_ceil(8) as usize;
    if body >= 64 {
        65
    } else {
        body + 1
    }
}

fn elems(l: &Line, width: usize) -> Vec<i128> {
    l.0.chunks_exact(width)
        .map(|c| {
            let mut v: u128 = 0;
            for (i, &b) in c.iter().enumerate() {
                v |= (b as u128) << (8 * i);
            }
            v as i128
        })
        .collect()
}

/// Codeword size of the reference BDI encoder: exhaustive over variants.
fn ref_bdi_size(l: &Line) -> usize {
    if l.0.iter().all(|&b| b == 0) {
        return 2;
    }
    let e8 = elems(l, 8);
    if e8.iter().all(|&x| x == e8[0]) {
        return 10;
    }
    let mut best = 65;
    for (bw, dw) in [(8usize, 1usize), (8, 2), (8, 4), (4, 1), (4, 2), (2, 1)] {
        let e = elems(l, bw);
        let modulus: i128 = 1 << (8 * bw);
        let ok = e.iter().all(|&x| {
            // Delta taken modulo the base width, then read as signed.
            let mut d = (x - e[0]).rem_euclid(modulus);
            if d >= modulus / 2 {
                d -= modulus;
            }
            let lim: i128 = 1 << (8 * dw - 1);
            (-lim..lim).contains(&d)
        });
        if ok {
            best = best.min(1 + 1 + bw + e.len() * dw);
        }
    }
    best
}

fn small_words(rng: &mut impl Rng, lo: i32, hi: i32) -> Line {
    let w: [u32; 16] = std::array::from_fn(|_| rng.random_range(lo..=hi) as u32);
    Line::from_words(&w)
}

fn structured(rng: &mut ChaCha8Rng) -> Line {
    match rng.random_range(0..6) {
        0 => small_words(rng, -8, 7),
        1 => small_words(rng, -128, 127),
        2 => small_words(rng, -40000, 40000),
        3 => {
            let base: u64 = rng.random();
            let mut b = [0u8; 64];
            for (i, c) in b.chunks_exact_mut(8).enumerate() {
                let d = rng.random_range(-200i64..200) * (i as i64 % 2);
                c.copy_from_slice(&base.wrapping_add(d as u64).to_le_bytes());
            }
            Line(b)
        }
        4 => {
            let w: [u32; 16] = std::array::from_fn(|_| {
                let k: u8 = rng.random();
                u32::from_le_bytes([k; 4]) * rng.random_range(0..2)
            });
            Line::from_words(&w)
        }
        _ => {
            let mut b = [0u8; 64];
            rng.fill_bytes(&mut b);
            Line(b)
        }
    }
}

#[test]
fn small_word_line_fpc_size_matches_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20_000 {
        let l = small_words(&mut rng, -8, 7);
        let cw = fpc_compress(&l);
        assert_eq!(cw.size(), ref_fpc_size(&l));
        // Sixteen 4-bit fields at most: 6 prefix bytes plus 8 data bytes.
        assert!(cw.size() <= 15);
    }
}

#[test]
fn fpc_sizes_match_reference_on_structured_lines() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50_000 {
        let l = structured(&mut rng);
        assert_eq!(fpc_compress(&l).size(), ref_fpc_size(&l), "{l:?}");
    }
}

#[test]
fn bdi_sizes_match_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut b8d1 = [0u8; 64];
    for (i, c) in b8d1.chunks_exact_mut(8).enumerate() {
        c.copy_from_slice(&(0x1000u64 + i as u64).to_le_bytes());
    }
    let l = Line(b8d1);
    assert_eq!(bdi_compress(&l).size(), ref_bdi_size(&l));
    assert_eq!(bdi_compress(&l).body[0], 2);
    for _ in 0..50_000 {
        let l = structured(&mut rng);
        assert_eq!(bdi_compress(&l).size(), ref_bdi_size(&l), "{l:?}");
    }
}

#[test]
fn hybrid_is_smaller_of_references() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20_000 {
        let l = structured(&mut rng);
        let f = ref_fpc_size(&l);
        let b = ref_bdi_size(&l);
        let h = hybrid_compress(&l);
        assert_eq!(h.size(), f.min(b));
        if f <= b && f < 65 {
            assert_eq!(h.algo, Algo::Fpc);
        }
    }
    assert_eq!(
        hybrid_compress(&Line::zero()).size(),
        ref_bdi_size(&Line::zero())
    );
}

#[test]
fn packer_budget_matches_reference_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20_000 {
        let lines: Vec<Line> = (0..4).map(|_| structured(&mut rng)).collect();
        for (n, level) in [(2, PackLevel::X2), (4, PackLevel::X4)] {
            let sum: usize = lines[..n]
                .iter()
                .map(|l| ref_fpc_size(l).min(ref_bdi_size(l)))
                .sum();
            assert_eq!(packed_size(&lines[..n]), sum);
            let p = pack_group(&lines[..n], level).unwrap();
            assert_eq!(p.is_some(), sum <= PAYLOAD_BYTES);
        }
    }
}

/// A line whose FPC body is exactly `body` bytes: `k` distinct nonzero words
/// of 4 bits, the rest zero.
fn fpc_body(body: usize) -> Line {
    const SMALL: [i32; 16] = [1, 2, 3, 4, 5, 6, 7, -1, -2, -3, -4, -5, -6, -7, -8, 1];
    let k = (body - 6) * 2;
    let w: [u32; 16] = std::array::from_fn(|i| if i < k { SMALL[i] as u32 } else { 0 });
    Line::from_words(&w)
}

#[test]
fn four_lines_of_equal_size_fit_iff_budget_allows() {
    for body in [8usize, 10, 12, 14] {
        let l = fpc_body(body);
        let cw = hybrid_compress(&l);
        assert_eq!(cw.body.len(), body, "body {body}");
        let fits = 4 * (body + 1) <= 60;
        assert_eq!(
            pack_group(&[l; 4], PackLevel::X4).unwrap().is_some(),
            fits,
            "body {body}"
        );
    }
    // One more byte per line overflows.
    let mut w = [3u32; 16];
    w[15] = 100;
    let l = Line::from_words(&w);
    assert_eq!(hybrid_compress(&l).size(), 16);
    assert!(pack_group(&[l; 4], PackLevel::X4).unwrap().is_none());
}

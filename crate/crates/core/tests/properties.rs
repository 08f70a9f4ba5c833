//! Invariants checked on random configurations near the flat interface.

use isi_core::lattice::{c3, dist2, star_adjacent, BoxDims, Coord};
use isi_core::pillars::{increments, spine_from_increments, Pillar};
use isi_core::sampler::Chain;
use isi_core::spins::SpinConfig;
use isi_core::stats::{gamma_log, m_star_log, pillar_heights, wilson, TailTable};
use isi_core::walls::{decompose, represent};
use isi_core::interface::Interface;
use proptest::prelude::*;

const D: BoxDims = BoxDims { n: 3, m: 3, h: 3 };

/// Flip a random subset of the cells in the three layers around height 0.
fn perturbed() -> impl Strategy<Value = SpinConfig> {
    proptest::collection::vec(proptest::bool::weighted(0.2), 36 * 3).prop_map(|bits| {
        let mut s = SpinConfig::ground(D);
        let mut k = 0;
        for z in [-1, 1, 3] {
            for x in (-5..=5).step_by(2) {
                for y in (-5..=5).step_by(2) {
                    if bits[k] {
                        s.flip(c3(x, y, z)).unwrap();
                    }
                    k += 1;
                }
            }
        }
        s
    })
}

fn cell() -> impl Strategy<Value = Coord> {
    (0..6i32, 0..6i32, 0..6i32).prop_map(|(x, y, z)| c3(2 * x - 5, 2 * y - 5, 2 * z - 5))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn delta_energy_matches_difference(s in perturbed(), c in cell()) {
        let t = s.flipped(c).unwrap();
        prop_assert_eq!(s.delta_energy(c).unwrap(), t.energy() - s.energy());
    }

    #[test]
    fn star_adjacency_is_symmetric(a in cell(), b in cell()) {
        prop_assert_eq!(star_adjacent(a, b), star_adjacent(b, a));
        prop_assert_eq!(dist2(a, b), dist2(b, a));
    }

    #[test]
    fn represent_then_reconstruct(s in perturbed()) {
        let i = Interface::extract_unchecked(&s);
        let rep = represent(&i).unwrap();
        prop_assert_eq!(rep.reconstruct().unwrap(), i.clone());
        // the interface of its own spin field is itself
        prop_assert_eq!(Interface::extract_unchecked(&i.spins_of().unwrap()), i);
    }

    #[test]
    fn wall_identities(s in perturbed()) {
        let i = Interface::extract_unchecked(&s);
        let dec = decompose(&i).unwrap();
        prop_assert_eq!(dec.wall_face_count() + dec.ceiling_face_count(), i.len());
        let base = (4 * D.n * D.m) as i64;
        prop_assert_eq!(dec.total_excess(), i.len() as i64 - base);
        let mut sum = 0;
        for w in &dec.walls {
            let m = w.excess();
            prop_assert_eq!(m, w.len() as i64 - w.standardize().shape().proj_face_count() as i64);
            prop_assert!(2 * m >= w.len() as i64);
            sum += m;
        }
        prop_assert_eq!(sum, dec.total_excess());
    }

    #[test]
    fn batch_heights_match_single_pillars(s in perturbed()) {
        let xs = D.base_faces();
        let hs = pillar_heights(&s, &xs, 0);
        for (x, h) in xs.iter().zip(hs) {
            prop_assert_eq!(h, Pillar::from_spins(&s, *x, 0).hgt());
        }
    }

    #[test]
    fn spine_round_trip(s in perturbed(), a in 0..6i32, b in 0..6i32) {
        let p = Pillar::from_spins(&s, c3(2 * a - 5, 2 * b - 5, 0), 0);
        let spine = p.split().spine;
        if let Some(seq) = increments(&spine) {
            prop_assert_eq!(spine_from_increments(&seq), spine);
        }
    }

    #[test]
    fn tail_tables_merge_and_decrease(xs in proptest::collection::vec(0i64..8, 0..40),
                                      ys in proptest::collection::vec(0i64..8, 0..40)) {
        let fill = |v: &[i64]| {
            let mut t = TailTable::new(5);
            v.iter().for_each(|&h| t.add(h));
            t
        };
        let (a, b) = (fill(&xs), fill(&ys));
        let mut ab = a.clone();
        ab.merge(&b).unwrap();
        let mut ba = b.clone();
        ba.merge(&a).unwrap();
        prop_assert_eq!(&ab.counts, &ba.counts);
        prop_assert_eq!(ab.total, (xs.len() + ys.len()) as u64);
        prop_assert!(ab.counts.windows(2).all(|w| w[0] >= w[1]));
        let all: Vec<i64> = xs.iter().chain(&ys).copied().collect();
        prop_assert_eq!(fill(&all).counts, ab.counts);
    }

    #[test]
    fn wilson_brackets_estimate(n in 1u64..5000, frac in 0.0f64..=1.0) {
        let k = (frac * n as f64).floor() as u64;
        let (lo, hi) = wilson(k, n, 1.96);
        let p = k as f64 / n as f64;
        prop_assert!(0.0 <= lo && lo <= p + 1e-12 && p <= hi + 1e-12 && hi <= 1.0);
    }

    #[test]
    fn m_star_grows_with_s(incs in proptest::collection::vec(0.5f64..6.0, 1..12),
                           ls in 0.0f64..30.0, dl in 0.0f64..10.0, beta in 0.5f64..2.0) {
        let mut alpha = Vec::new();
        let mut acc = 0.0;
        for d in incs {
            acc += d;
            alpha.push(acc);
        }
        let (Ok(a), Ok(b)) = (m_star_log(ls, &alpha, beta), m_star_log(ls + dl, &alpha, beta)) else {
            return Ok(());
        };
        prop_assert!(a <= b);
        // alpha at the centering height exceeds log s - 2 beta
        let g = gamma_log(ls, &alpha, beta).unwrap();
        prop_assert!(g < (2.0 * beta).exp() * (1.0 + 1e-12));
    }
}

#[test]
fn chains_are_reproducible() {
    let run = |stream| {
        let mut ch = Chain::new(&SpinConfig::ground(D), 0.7, 42, stream);
        ch.sweeps(20);
        ch.config()
    };
    assert_eq!(run(0), run(0));
    assert_ne!(run(0), run(1));
}

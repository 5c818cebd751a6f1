#![allow(dead_code)]

use gateassign::{Flight, Minutes, Schedule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn sched(times: &[(Minutes, Minutes)]) -> Schedule {
    Schedule::new(
        times
            .iter()
            .enumerate()
            .map(|(i, &(a, d))| Flight::new(format!("F{}", i + 1), a, d).unwrap())
            .collect(),
    )
    .unwrap()
}

/// Small dense instance: arrivals packed into a few hours so that a handful
/// of gates is contested.
pub fn random_schedule(rng: &mut ChaCha8Rng, n: usize) -> Schedule {
    let times: Vec<_> = (0..n)
        .map(|_| {
            let a = rng.random_range(0..=400);
            let stay = rng.random_range(10..=90);
            (a, a + stay)
        })
        .collect();
    sched(&times)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

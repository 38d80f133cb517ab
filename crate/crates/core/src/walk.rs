//! Exact walk counts `W(n, x)`: the number of `n`-step nearest-neighbour walks
//! from `0` to `x`, i.e. the heat kernel `p(n, x)` scaled by `(2d)^n`.
//!
//! Counts are invariant under the hyperoctahedral group (signed coordinate
//! permutations), so they are stored once per orbit. An orbit is represented by
//! its sorted vector of absolute values.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::Result;
use crate::lattice::l1_norm;
use crate::limits;
use crate::rational::factorial;

/// Orbit representatives of `B_R` under signed permutations.
#[derive(Debug)]
pub struct OrbitSpace {
    dim: usize,
    radius: usize,
    reps: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    orbit_sizes: Vec<BigUint>,
    // (representative of x + s, number of generators s landing there)
    neighbors: Vec<Vec<(usize, u32)>>,
}

/// Sorted (non-increasing) absolute values.
pub fn canonical(x: &[i64]) -> Vec<u32> {
    let mut r: Vec<u32> = x.iter().map(|v| v.unsigned_abs() as u32).collect();
    r.sort_unstable_by(|a, b| b.cmp(a));
    r
}

fn orbit_size(rep: &[u32]) -> BigUint {
    let nonzero = rep.iter().filter(|&&v| v != 0).count();
    let mut size = factorial(rep.len() as u64);
    let mut i = 0;
    while i < rep.len() {
        let j = (i..rep.len()).find(|&j| rep[j] != rep[i]).unwrap_or(rep.len());
        size /= factorial((j - i) as u64);
        i = j;
    }
    size << nonzero
}

impl OrbitSpace {
    pub fn new(dim: usize, radius: usize) -> Result<Self> {
        limits::check_dimension(dim)?;
        let mut reps = Vec::new();
        fn rec(dim: usize, left: u32, cap: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if prefix.len() == dim {
                out.push(prefix.clone());
                return;
            }
            for v in 0..=left.min(cap) {
                prefix.push(v);
                rec(dim, left - v, v, prefix, out);
                prefix.pop();
            }
        }
        rec(dim, radius as u32, radius as u32, &mut Vec::new(), &mut reps);
        let index: HashMap<Vec<u32>, usize> =
            reps.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();
        let orbit_sizes = reps.iter().map(|r| orbit_size(r)).collect();
        let neighbors = reps
            .par_iter()
            .map(|r| {
                let mut acc: Vec<(usize, u32)> = Vec::new();
                for l in 0..dim {
                    for delta in [-1i64, 1] {
                        let moved: Vec<i64> = r
                            .iter()
                            .enumerate()
                            .map(|(i, &v)| v as i64 + if i == l { delta } else { 0 })
                            .collect();
                        if l1_norm(&moved) as usize > radius {
                            continue;
                        }
                        let j = index[&canonical(&moved)];
                        match acc.iter_mut().find(|(k, _)| *k == j) {
                            Some(entry) => entry.1 += 1,
                            None => acc.push((j, 1)),
                        }
                    }
                }
                acc
            })
            .collect();
        Ok(OrbitSpace {
            dim,
            radius,
            reps,
            index,
            orbit_sizes,
            neighbors,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn representative(&self, i: usize) -> &[u32] {
        &self.reps[i]
    }

    pub fn orbit_size(&self, i: usize) -> &BigUint {
        &self.orbit_sizes[i]
    }

    /// Orbit index of `x`, if `x` lies in the ball.
    pub fn index_of(&self, x: &[i64]) -> Option<usize> {
        if x.len() != self.dim || l1_norm(x) as usize > self.radius {
            return None;
        }
        self.index.get(&canonical(x)).copied()
    }

    fn origin_counts(&self) -> Vec<BigUint> {
        let mut counts = vec![BigUint::zero(); self.len()];
        counts[self.index[&vec![0; self.dim]]] = BigUint::one();
        counts
    }

    // W(n+1, r) = Σ_s W(n, r + s); entries beyond the radius are zero while n < R.
    fn step(&self, counts: &[BigUint]) -> Vec<BigUint> {
        self.neighbors
            .par_iter()
            .map(|nbrs| {
                nbrs.iter().fold(BigUint::zero(), |acc, &(j, m)| {
                    if counts[j].is_zero() {
                        acc
                    } else if m == 1 {
                        acc + &counts[j]
                    } else {
                        acc + &counts[j] * m
                    }
                })
            })
            .collect()
    }
}

/// `W(n, ·)` on `B_n` (or a larger ball).
#[derive(Clone, Debug)]
pub struct WalkCountTable {
    space: Arc<OrbitSpace>,
    steps: usize,
    counts: Vec<BigUint>,
}

impl WalkCountTable {
    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn space(&self) -> &Arc<OrbitSpace> {
        &self.space
    }

    /// Count for the orbit with index `i`.
    pub fn orbit_count(&self, i: usize) -> &BigUint {
        &self.counts[i]
    }

    pub fn count(&self, x: &[i64]) -> BigUint {
        match self.space.index_of(x) {
            Some(i) => self.counts[i].clone(),
            None => BigUint::zero(),
        }
    }

    /// `Σ_x W(n, x)`, which is `(2d)^n`.
    pub fn total(&self) -> BigUint {
        self.counts
            .iter()
            .zip(&self.space.orbit_sizes)
            .map(|(c, s)| c * s)
            .sum()
    }
}

/// Yields `W(0, ·), W(1, ·), …, W(R, ·)` over a shared orbit space of radius `R`.
pub struct WalkCounter {
    space: Arc<OrbitSpace>,
    next_step: usize,
    current: Option<Vec<BigUint>>,
}

impl WalkCounter {
    pub fn new(dim: usize, max_steps: usize) -> Result<Self> {
        limits::check_cells(dim, max_steps)?;
        let space = Arc::new(OrbitSpace::new(dim, max_steps)?);
        Ok(WalkCounter {
            space,
            next_step: 0,
            current: None,
        })
    }

    pub fn space(&self) -> &Arc<OrbitSpace> {
        &self.space
    }
}

impl Iterator for WalkCounter {
    type Item = WalkCountTable;

    fn next(&mut self) -> Option<WalkCountTable> {
        if self.next_step > self.space.radius {
            return None;
        }
        let counts = match &self.current {
            None => self.space.origin_counts(),
            Some(prev) => self.space.step(prev),
        };
        let table = WalkCountTable {
            space: self.space.clone(),
            steps: self.next_step,
            counts: counts.clone(),
        };
        self.current = Some(counts);
        self.next_step += 1;
        Some(table)
    }
}

pub fn walk_counts(dim: usize, steps: usize) -> Result<WalkCountTable> {
    Ok(WalkCounter::new(dim, steps)?.last().expect("at least one step"))
}

//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use hae_core::outlier::{IsoNode, RandomSource};
use hae_core::rng::Rng;
use hae_core::StateVector;
use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::StandardNormal;

// ---------------------------------------------------------------- forest tape

#[derive(Debug, Clone, PartialEq)]
pub enum Draw {
    Index { n: usize, value: usize },
    Unit(f64),
}

/// Forwards to a real generator and records every draw.
pub struct Recorder<'a> {
    pub inner: &'a mut Rng,
    pub tape: Vec<Draw>,
}

impl RandomSource for Recorder<'_> {
    fn index(&mut self, n: usize) -> usize {
        let value = RandomSource::index(self.inner, n);
        self.tape.push(Draw::Index { n, value });
        value
    }

    fn unit(&mut self) -> f64 {
        let u = RandomSource::unit(self.inner);
        self.tape.push(Draw::Unit(u));
        u
    }
}

/// Replays a tape, checking that draws are requested in the recorded shape.
pub struct Replay {
    tape: Vec<Draw>,
    pos: usize,
}

impl Replay {
    pub fn new(tape: Vec<Draw>) -> Self {
        Self { tape, pos: 0 }
    }

    pub fn exhausted(&self) -> bool {
        self.pos == self.tape.len()
    }

    fn next(&mut self) -> Draw {
        let d = self.tape.get(self.pos).cloned().expect("tape exhausted");
        self.pos += 1;
        d
    }

    fn index(&mut self, n: usize) -> usize {
        match self.next() {
            Draw::Index { n: m, value } if m == n => value,
            other => panic!("expected an index draw over {n}, tape has {other:?}"),
        }
    }

    fn unit(&mut self) -> f64 {
        match self.next() {
            Draw::Unit(u) => u,
            other => panic!("expected a unit draw, tape has {other:?}"),
        }
    }
}

#[derive(Debug, PartialEq)]
pub enum RefNode {
    Split { feature: usize, threshold: f64, left: Box<RefNode>, right: Box<RefNode> },
    Leaf { size: usize, depth: usize },
}

/// Straightforward recursive isolation-tree builder operating on point
/// copies rather than index lists.
pub fn reference_tree(points: Vec<Vec<f64>>, depth: usize, limit: usize, tape: &mut Replay) -> RefNode {
    if points.len() <= 1 || depth >= limit {
        return RefNode::Leaf { size: points.len(), depth };
    }
    let width = points[0].len();
    let varying: Vec<usize> = (0..width).filter(|&f| points.iter().any(|p| p[f] != points[0][f])).collect();
    if varying.is_empty() {
        return RefNode::Leaf { size: points.len(), depth };
    }
    let feature = varying[tape.index(varying.len())];
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in &points {
        lo = lo.min(p[feature]);
        hi = hi.max(p[feature]);
    }
    let u = tape.unit();
    let mut threshold = lo + u * (hi - lo);
    if threshold <= lo || threshold > hi {
        threshold = hi;
    }
    let mut left = Vec::new();
    let mut right = Vec::new();
    for p in points {
        if p[feature] < threshold {
            left.push(p);
        } else {
            right.push(p);
        }
    }
    RefNode::Split {
        feature,
        threshold,
        left: Box::new(reference_tree(left, depth + 1, limit, tape)),
        right: Box::new(reference_tree(right, depth + 1, limit, tape)),
    }
}

/// Node-for-node comparison; returns the number of nodes on success.
pub fn same_tree(a: &IsoNode, b: &RefNode) -> Result<usize, String> {
    match (a, b) {
        (IsoNode::Leaf { size, depth }, RefNode::Leaf { size: s, depth: d }) if size == s && depth == d => Ok(1),
        (
            IsoNode::Split { feature, threshold, left, right },
            RefNode::Split { feature: f, threshold: t, left: l, right: r },
        ) if feature == f && threshold.to_bits() == t.to_bits() => Ok(1 + same_tree(left, l)? + same_tree(right, r)?),
        _ => Err(format!("node mismatch: {a:?} vs {b:?}")),
    }
}

// ---------------------------------------------------------------- DBSCAN

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Density reachability by brute force: core points within `eps` of each
/// other are merged with union-find; components are numbered by their
/// lowest-index core; a non-core point joins the first component owning a
/// core within `eps`, or is noise.
pub fn dbscan_oracle(data: &[Vec<f64>], eps: f64, min_samples: usize) -> Vec<i64> {
    let n = data.len();
    let core: Vec<bool> =
        (0..n).map(|i| (0..n).filter(|&j| dist(&data[i], &data[j]) <= eps).count() >= min_samples).collect();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if core[i] && core[j] && dist(&data[i], &data[j]) <= eps {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut component_label = vec![-1i64; n];
    let mut next = 0;
    let mut labels = vec![-1i64; n];
    for i in 0..n {
        if core[i] {
            let root = find(&mut parent, i);
            if component_label[root] < 0 {
                component_label[root] = next;
                next += 1;
            }
            labels[i] = component_label[root];
        }
    }
    for i in 0..n {
        if !core[i] {
            labels[i] =
                (0..n).filter(|&j| core[j] && dist(&data[i], &data[j]) <= eps).map(|j| labels[j]).min().unwrap_or(-1);
        }
    }
    labels
}

/// Relabels clusters by order of first appearance; noise stays −1.
pub fn canonical(labels: &[i64]) -> Vec<i64> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|&l| {
            if l < 0 {
                -1
            } else {
                let k = map.len() as i64;
                *map.entry(l).or_insert(k)
            }
        })
        .collect()
}

/// 200 points: a few Gaussian blobs of varying spread plus uniform clutter.
pub fn clustered_instance(rng: &mut Rng) -> (Vec<Vec<f64>>, f64, usize) {
    let n_blobs = rng.random_range(2..=4);
    let centers: Vec<(f64, f64, f64)> = (0..n_blobs)
        .map(|_| (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0), rng.random_range(0.3..1.5)))
        .collect();
    let mut data = Vec::with_capacity(200);
    for i in 0..200 {
        if i % 10 == 9 {
            data.push(vec![rng.random_range(-15.0..15.0), rng.random_range(-15.0..15.0)]);
        } else {
            let (cx, cy, s) = centers[i % n_blobs];
            data.push(vec![
                cx + s * rng.sample::<f64, _>(StandardNormal),
                cy + s * rng.sample::<f64, _>(StandardNormal),
            ]);
        }
    }
    let eps = rng.random_range(0.4..1.6);
    let min_samples = rng.random_range(2..=8);
    (data, eps, min_samples)
}

// ---------------------------------------------------------------- states

pub fn random_state(n_qubits: usize, rng: &mut Rng) -> StateVector {
    let amps: Vec<Complex64> = (0..1usize << n_qubits)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

/// Purity of qubit `k` via the full density matrix `|ψ⟩⟨ψ|` and an explicit
/// partial trace over all other qubits.
#[allow(clippy::needless_range_loop)]
pub fn purity_by_partial_trace(state: &StateVector, k: usize) -> f64 {
    let psi = state.amplitudes();
    let dim = psi.len();
    let rho: Vec<Vec<Complex64>> = (0..dim).map(|i| (0..dim).map(|j| psi[i] * psi[j].conj()).collect()).collect();
    let mut reduced = [[Complex64::new(0.0, 0.0); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for rest in 0..dim {
                if (rest >> k) & 1 != 0 {
                    continue;
                }
                let i = rest | (a << k);
                let j = rest | (b << k);
                reduced[a][b] += rho[i][j];
            }
        }
    }
    let mut tr = Complex64::new(0.0, 0.0);
    for a in 0..2 {
        for b in 0..2 {
            tr += reduced[a][b] * reduced[b][a];
        }
    }
    tr.re
}

/// `2 (1 − mean purity)` from the partial-trace oracle.
pub fn meyer_wallach_oracle(state: &StateVector) -> f64 {
    let n = state.n_qubits();
    2.0 * (1.0 - (0..n).map(|k| purity_by_partial_trace(state, k)).sum::<f64>() / n as f64)
}

/// Central finite difference of a vector-valued function along coordinate `i`.
pub fn central_difference(f: impl Fn(&[f64]) -> Vec<f64>, at: &[f64], i: usize, h: f64) -> Vec<f64> {
    let mut up = at.to_vec();
    let mut down = at.to_vec();
    up[i] += h;
    down[i] -= h;
    f(&up).iter().zip(f(&down)).map(|(a, b)| (a - b) / (2.0 * h)).collect()
}

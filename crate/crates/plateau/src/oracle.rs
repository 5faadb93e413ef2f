//! Brute-force verification backend: dense statevector simulation,
//! parameter-shift gradients, and gradient-variance estimation by Monte
//! Carlo sampling or exact trigonometric-grid quadrature.
//!
//! Everything here is deliberately independent of the tensor-network
//! contraction engine: the only shared code is the circuit description
//! itself.  The oracle is what pins down normalization conventions — any
//! bookkeeping error in the contraction shows up as a mismatch against
//! [`grid_variance`], which is exact.
//!
//! # Why a 3-node grid is exact
//!
//! With every gate either a CNOT, a Hadamard, or a rotation `exp(-iθV/2)`
//! with involutory `V`, the expectation `⟨H⟩(θ)` is a degree-1 trigonometric
//! polynomial in each angle separately: `a + b cos θ_j + c sin θ_j`.  The
//! parameter-shift gradient equals the true derivative, and its square has
//! trigonometric degree ≤ 2 per angle, so the uniform average over
//! `[-π, π]` equals the average over any three equally spaced nodes.  We use
//! `θ_j ∈ {-2π/3, 0, 2π/3}` and recover `(a, b, c)` per axis from the three
//! node values, which yields every parameter's variance from a single sweep
//! of the `3^M` grid over the observable's causal cone.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::{causal_cone, Circuit, Gate, Observable, ParamId, SiteCoeffs};
use crate::error::{Error, Result};

/// Hard cap on simulated qubits (2^20 amplitudes ≈ 16 MiB).
pub const MAX_QUBITS: usize = 20;

/// Cap on causal-cone parameters for the exact grid (3^16 ≈ 4.3·10^7 nodes).
///
/// This covers every 4-qubit instance of the three families; anything larger
/// is rejected rather than silently truncated.
pub const GRID_PARAM_CAP: usize = 16;

/// Quadrature nodes: three equally spaced angles.
pub const GRID_NODES: [f64; 3] = [
    -2.0 * std::f64::consts::FRAC_PI_3,
    0.0,
    2.0 * std::f64::consts::FRAC_PI_3,
];

/// How a variance value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Exact tensor-network contraction.
    Tn,
    /// Closed-form analytic branch.
    Closed,
    /// Monte Carlo sampling of the statevector oracle.
    Mc,
    /// Exact trigonometric-grid quadrature of the statevector oracle.
    Grid,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Method::Tn => "tn",
            Method::Closed => "closed",
            Method::Mc => "mc",
            Method::Grid => "grid",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "tn" => Ok(Method::Tn),
            "closed" => Ok(Method::Closed),
            "mc" => Ok(Method::Mc),
            "grid" => Ok(Method::Grid),
            other => Err(format!("unknown method '{other}'")),
        }
    }
}

/// A gradient-variance estimate with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceEstimate {
    /// The variance value.
    pub value: f64,
    /// Standard error (0 for exact methods).
    pub stderr: f64,
    /// Producing method.
    pub method: Method,
    /// Sample count (grid: number of quadrature nodes).
    pub samples: u64,
    /// RNG seed (0 for deterministic methods).
    pub seed: u64,
}

/// Dense state of `n` qubits: `2^n` complex amplitudes.
///
/// Register `r` (1-based) maps to bit `r - 1` of the amplitude index.
#[derive(Debug, Clone)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n ≤ 20` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n_qubits: n,
                cap: MAX_QUBITS,
            });
        }
        let mut amps = vec![Complex64::ZERO; 1 << n];
        amps[0] = Complex64::ONE;
        Ok(StateVector { n, amps })
    }

    /// Number of qubits.
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Amplitudes in index order.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Squared norm (should stay 1 to machine precision).
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Apply a general single-qubit operator `[[m00, m01], [m10, m11]]`.
    fn apply_1q(&mut self, bit: usize, m: [Complex64; 4]) {
        let stride = 1 << bit;
        let len = self.amps.len();
        let mut base = 0;
        while base < len {
            for i in base..base + stride {
                let a0 = self.amps[i];
                let a1 = self.amps[i + stride];
                self.amps[i] = m[0] * a0 + m[1] * a1;
                self.amps[i + stride] = m[2] * a0 + m[3] * a1;
            }
            base += 2 * stride;
        }
    }

    /// `exp(-iθX/2)` on 0-based `bit`.
    pub fn rx(&mut self, bit: usize, theta: f64) {
        let c = Complex64::new((theta / 2.0).cos(), 0.0);
        let s = Complex64::new(0.0, -(theta / 2.0).sin());
        self.apply_1q(bit, [c, s, s, c]);
    }

    /// `exp(-iθZ/2)` on 0-based `bit`.
    pub fn rz(&mut self, bit: usize, theta: f64) {
        let p0 = Complex64::from_polar(1.0, -theta / 2.0);
        let p1 = Complex64::from_polar(1.0, theta / 2.0);
        let stride = 1 << bit;
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= if i & stride == 0 { p0 } else { p1 };
        }
    }

    /// Hadamard on 0-based `bit`.
    pub fn h(&mut self, bit: usize) {
        let r = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.apply_1q(bit, [r, r, r, -r]);
    }

    /// CNOT with 0-based control and target bits.
    pub fn cnot(&mut self, control: usize, target: usize) {
        let c = 1 << control;
        let t = 1 << target;
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    /// Apply `σ = k0 I + k1 X + k2 Y + k3 Z` on 0-based `bit`.
    fn site_op(&mut self, bit: usize, [k0, k1, k2, k3]: SiteCoeffs) {
        let m = [
            Complex64::new(k0 + k3, 0.0),
            Complex64::new(k1, -k2),
            Complex64::new(k1, k2),
            Complex64::new(k0 - k3, 0.0),
        ];
        self.apply_1q(bit, m);
    }

    fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Maps circuit registers onto statevector bits, optionally restricted to a
/// causal cone (registers outside the cone cannot change the expectation and
/// are dropped entirely).
struct Simulator<'c> {
    circuit: &'c Circuit,
    /// register -> bit; absent registers are outside the simulated cone.
    bits: BTreeMap<usize, usize>,
    /// Indices into `circuit.gates()` that get applied.
    gate_indices: Vec<usize>,
}

impl<'c> Simulator<'c> {
    fn full(circuit: &'c Circuit) -> Self {
        let bits = (1..=circuit.n_qubits()).map(|r| (r, r - 1)).collect();
        Simulator {
            circuit,
            bits,
            gate_indices: (0..circuit.gates().len()).collect(),
        }
    }

    fn cone(circuit: &'c Circuit, observable: &Observable) -> Result<Self> {
        let cone = causal_cone(circuit, observable)?;
        let bits = cone
            .registers
            .iter()
            .enumerate()
            .map(|(bit, &reg)| (reg, bit))
            .collect();
        Ok(Simulator {
            circuit,
            bits,
            gate_indices: cone.gate_indices.into_iter().collect(),
        })
    }

    fn n_bits(&self) -> usize {
        self.bits.len()
    }

    fn apply(&self, psi: &mut StateVector, gate_idx: usize, theta: &[f64]) {
        let gate = &self.circuit.gates()[gate_idx];
        match *gate {
            Gate::Rx { target, param } => {
                let pos = self.circuit.param_position(param).expect("param of gate");
                psi.rx(self.bits[&target], theta[pos]);
            }
            Gate::Rz { target, param } => {
                let pos = self.circuit.param_position(param).expect("param of gate");
                psi.rz(self.bits[&target], theta[pos]);
            }
            Gate::Cnot { control, target } => psi.cnot(self.bits[&control], self.bits[&target]),
            Gate::H { target } => psi.h(self.bits[&target]),
        }
    }

    fn run(&self, theta: &[f64]) -> Result<StateVector> {
        let mut psi = StateVector::zero(self.n_bits())?;
        for &idx in &self.gate_indices {
            self.apply(&mut psi, idx, theta);
        }
        Ok(psi)
    }

    fn expectation(&self, psi: &StateVector, observable: &Observable) -> f64 {
        let mut phi = psi.clone();
        for (&site, &coeffs) in observable.sites() {
            match self.bits.get(&site) {
                Some(&bit) => phi.site_op(bit, coeffs),
                // Site outside the simulated cone: its register is still in
                // |0⟩, so σ contributes the scalar ⟨0|σ|0⟩ = k0 + k3.
                None => {
                    let s = coeffs[0] + coeffs[3];
                    for a in phi.amps.iter_mut() {
                        *a *= s;
                    }
                }
            }
        }
        psi.inner(&phi).re
    }
}

fn check_theta(circuit: &Circuit, theta: &[f64]) -> Result<()> {
    if theta.len() != circuit.param_count() {
        return Err(Error::ThetaLengthMismatch {
            expected: circuit.param_count(),
            got: theta.len(),
        });
    }
    Ok(())
}

/// `⟨ψ(θ)|H|ψ(θ)⟩` for a product observable.
///
/// ```
/// use plateau::circuit::{build_ansatz, Family, Observable};
/// use plateau::oracle::expectation;
///
/// let c = build_ansatz(Family::QMps, 2).unwrap();
/// let theta = vec![0.0; c.param_count()];
/// let z1 = expectation(&c, &Observable::z(1), &theta).unwrap();
/// assert!((z1 - 1.0).abs() < 1e-12);
/// let x1 = expectation(&c, &Observable::x(1), &theta).unwrap();
/// assert!(x1.abs() < 1e-12);
/// ```
pub fn expectation(circuit: &Circuit, observable: &Observable, theta: &[f64]) -> Result<f64> {
    check_theta(circuit, theta)?;
    observable.check_sites(circuit.n_qubits())?;
    let sim = Simulator::full(circuit);
    let psi = sim.run(theta)?;
    Ok(sim.expectation(&psi, observable))
}

/// Expectation of a weighted sum of product terms.
pub fn expectation_sum(
    circuit: &Circuit,
    terms: &[(f64, Observable)],
    theta: &[f64],
) -> Result<f64> {
    let mut total = 0.0;
    for (w, obs) in terms {
        total += w * expectation(circuit, obs, theta)?;
    }
    Ok(total)
}

/// Parameter-shift gradient `½(⟨H⟩_{θ+π/2 e_p} − ⟨H⟩_{θ−π/2 e_p})`.
pub fn param_shift_grad(
    circuit: &Circuit,
    observable: &Observable,
    theta: &[f64],
    param: ParamId,
) -> Result<f64> {
    check_theta(circuit, theta)?;
    let pos = circuit.param_position(param)?;
    let mut shifted = theta.to_vec();
    shifted[pos] = theta[pos] + std::f64::consts::FRAC_PI_2;
    let plus = expectation(circuit, observable, &shifted)?;
    shifted[pos] = theta[pos] - std::f64::consts::FRAC_PI_2;
    let minus = expectation(circuit, observable, &shifted)?;
    Ok(0.5 * (plus - minus))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Per-sample RNG derived from `(seed, sample index)` so that results do not
/// depend on how samples are scheduled across threads.
fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(index)))
}

/// Full Monte Carlo statistics of the gradient over `θ ~ U[-π, π]^M`.
#[derive(Debug, Clone, Copy)]
pub struct McStats {
    /// Sample mean of the gradient.
    pub mean: f64,
    /// Standard error of the mean.
    pub mean_stderr: f64,
    /// Unbiased sample variance of the gradient.
    pub variance: f64,
    /// Standard error of the variance estimate (fourth-moment formula).
    pub variance_stderr: f64,
    /// Number of samples.
    pub samples: u64,
    /// Seed used.
    pub seed: u64,
}

/// Monte Carlo gradient statistics; deterministic for a fixed seed and
/// independent of thread scheduling (per-sample counter-based RNG plus
/// fixed-order chunk reduction).
pub fn mc_gradient_stats(
    circuit: &Circuit,
    observable: &Observable,
    param: ParamId,
    samples: u64,
    seed: u64,
) -> Result<McStats> {
    if samples < 2 {
        return Err(Error::TooFewSamples(samples as usize));
    }
    circuit.param_position(param)?;
    observable.check_sites(circuit.n_qubits())?;

    // Restrict simulation to the causal cone; out-of-cone angles are still
    // drawn so the sample stream is independent of the observable.
    let sim = Simulator::cone(circuit, observable)?;
    let pos = circuit.param_position(param)?;
    let m = circuit.param_count();

    const CHUNK: u64 = 1024;
    let chunks: Vec<u64> = (0..samples.div_ceil(CHUNK)).collect();
    let partials: Vec<[f64; 4]> = chunks
        .par_iter()
        .map(|&chunk| {
            let mut sums = [0.0f64; 4];
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(samples);
            let mut theta = vec![0.0f64; m];
            for i in lo..hi {
                let mut rng = sample_rng(seed, i);
                for t in theta.iter_mut() {
                    *t = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                }
                let base = theta[pos];
                theta[pos] = base + std::f64::consts::FRAC_PI_2;
                let plus = sim.expectation(&sim.run(&theta).expect("cone fits cap"), observable);
                theta[pos] = base - std::f64::consts::FRAC_PI_2;
                let minus = sim.expectation(&sim.run(&theta).expect("cone fits cap"), observable);
                theta[pos] = base;
                let g = 0.5 * (plus - minus);
                let g2 = g * g;
                sums[0] += g;
                sums[1] += g2;
                sums[2] += g2 * g;
                sums[3] += g2 * g2;
            }
            sums
        })
        .collect();

    // Fixed-order reduction keeps the result bit-stable across runs.
    let mut s = [0.0f64; 4];
    for p in partials {
        for (acc, v) in s.iter_mut().zip(p) {
            *acc += v;
        }
    }
    let n = samples as f64;
    let mean = s[0] / n;
    // Central moments from raw power sums.
    let m2 = s[1] / n - mean * mean;
    let m3 = s[2] / n - 3.0 * mean * s[1] / n + 2.0 * mean.powi(3);
    let m4 = s[3] / n - 4.0 * mean * s[2] / n + 6.0 * mean * mean * s[1] / n
        - 3.0 * mean.powi(4);
    let variance = m2 * n / (n - 1.0);
    let variance_stderr = ((m4 - (n - 3.0) / (n - 1.0) * m2 * m2).max(0.0) / n).sqrt();
    let _ = m3;
    Ok(McStats {
        mean,
        mean_stderr: (m2.max(0.0) / n).sqrt(),
        variance,
        variance_stderr,
        samples,
        seed,
    })
}

/// Monte Carlo estimate of `Var[∂_{j,k}⟨H⟩]`.
pub fn mc_variance(
    circuit: &Circuit,
    observable: &Observable,
    param: ParamId,
    samples: u64,
    seed: u64,
) -> Result<VarianceEstimate> {
    let stats = mc_gradient_stats(circuit, observable, param, samples, seed)?;
    Ok(VarianceEstimate {
        value: stats.variance,
        stderr: stats.variance_stderr,
        method: Method::Mc,
        samples,
        seed,
    })
}

/// Exact variance and mean of the gradient for one parameter, from the grid
/// sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridEntry {
    /// Which parameter.
    pub param: ParamId,
    /// Exact `Var[∂⟨H⟩]` (up to floating-point roundoff).
    pub variance: f64,
    /// Exact `E[∂⟨H⟩]` (analytically zero; returned as computed).
    pub mean: f64,
}

/// Result of one exact quadrature sweep: every parameter of the circuit,
/// with out-of-cone parameters reported as exact zeros.
#[derive(Debug, Clone)]
pub struct GridSweep {
    /// One entry per circuit parameter, in linear parameter order.
    pub entries: Vec<GridEntry>,
    /// Number of quadrature nodes evaluated (`3^M` over the cone).
    pub nodes: u64,
}

impl GridSweep {
    /// Look up one parameter's entry.
    pub fn get(&self, param: ParamId) -> Option<&GridEntry> {
        self.entries.iter().find(|e| e.param == param)
    }
}

/// Exact gradient variance for every parameter of `circuit` w.r.t. one
/// product observable, via one shared `3^M` quadrature over the causal cone.
pub fn grid_sweep(circuit: &Circuit, observable: &Observable) -> Result<GridSweep> {
    observable.check_sites(circuit.n_qubits())?;
    let sim = Simulator::cone(circuit, observable)?;

    // Cone parameters in gate order.
    let cone_params: Vec<ParamId> = sim
        .gate_indices
        .iter()
        .filter_map(|&idx| circuit.gates()[idx].param())
        .collect();
    let m = cone_params.len();
    if m > GRID_PARAM_CAP {
        return Err(Error::GridTooLarge {
            m,
            cap: GRID_PARAM_CAP,
        });
    }

    // Segment the cone's gate list by parameterized rotations: segment s
    // holds the gates strictly after rotation s-1 and up to (including)
    // rotation s... organised as: prefix (before first rotation), then for
    // each rotation its trailing non-rotation gates.
    let mut segments: Vec<Vec<usize>> = vec![Vec::new()];
    for &idx in &sim.gate_indices {
        if circuit.gates()[idx].param().is_some() {
            segments.push(Vec::new());
        } else {
            segments.last_mut().unwrap().push(idx);
        }
    }
    let rotation_gate: Vec<usize> = sim
        .gate_indices
        .iter()
        .copied()
        .filter(|&idx| circuit.gates()[idx].param().is_some())
        .collect();

    let total: u64 = 3u64.pow(m as u32);
    let mut f = vec![0.0f64; total as usize];

    // theta vector carries only values for cone params (full-length vector
    // with non-cone entries unused at 0).
    let mut theta0 = vec![0.0f64; circuit.param_count()];
    // Depth-first fill of the leaf array, reusing the statevector prefix at
    // each level.  Parallelises over the first `split` ternary digits.
    let split = m.min(if m >= 9 { 2 } else { 0 });
    let prefixes = 3usize.pow(split as u32);
    let leaf_block = (total as usize) / prefixes;

    {
        let cone_params = &cone_params;
        let segments = &segments;
        let rotation_gate = &rotation_gate;
        let sim = &sim;
        let circuit_ref = circuit;

        let run_subtree = |prefix: usize, out: &mut [f64], theta: &mut [f64]| {
            // State after the global prefix segment.
            let mut psi = StateVector::zero(sim.n_bits()).expect("cone fits cap");
            for &idx in &segments[0] {
                sim.apply(&mut psi, idx, theta);
            }
            // Apply the first `split` digits of this prefix.
            let mut digits = prefix;
            let mut stack = vec![psi];
            for level in 0..split {
                let digit = (digits / 3usize.pow((split - 1 - level) as u32)) % 3;
                let mut psi = stack.last().unwrap().clone();
                let pos = circuit_ref
                    .param_position(cone_params[level])
                    .expect("cone param");
                theta[pos] = GRID_NODES[digit];
                sim.apply(&mut psi, rotation_gate[level], theta);
                for &idx in &segments[level + 1] {
                    sim.apply(&mut psi, idx, theta);
                }
                stack.push(psi);
            }
            digits = 0;
            let _ = digits;
            // Sequential DFS over the remaining levels.
            fn dfs(
                level: usize,
                m: usize,
                psi: &StateVector,
                theta: &mut [f64],
                out: &mut [f64],
                cursor: &mut usize,
                sim: &Simulator<'_>,
                circuit: &Circuit,
                cone_params: &[ParamId],
                rotation_gate: &[usize],
                segments: &[Vec<usize>],
                observable: &Observable,
            ) {
                if level == m {
                    out[*cursor] = sim.expectation(psi, observable);
                    *cursor += 1;
                    return;
                }
                let pos = circuit.param_position(cone_params[level]).expect("param");
                for node in GRID_NODES {
                    let mut next = psi.clone();
                    theta[pos] = node;
                    sim.apply(&mut next, rotation_gate[level], theta);
                    for &idx in &segments[level + 1] {
                        sim.apply(&mut next, idx, theta);
                    }
                    dfs(
                        level + 1,
                        m,
                        &next,
                        theta,
                        out,
                        cursor,
                        sim,
                        circuit,
                        cone_params,
                        rotation_gate,
                        segments,
                        observable,
                    );
                }
            }
            let mut cursor = 0usize;
            dfs(
                split,
                m,
                stack.last().unwrap(),
                theta,
                out,
                &mut cursor,
                sim,
                circuit_ref,
                cone_params,
                rotation_gate,
                segments,
                observable,
            );
            debug_assert_eq!(cursor, out.len());
        };

        if prefixes > 1 {
            f.par_chunks_mut(leaf_block)
                .enumerate()
                .for_each(|(prefix, out)| {
                    let mut theta = theta0.clone();
                    run_subtree(prefix, out, &mut theta);
                });
        } else {
            run_subtree(0, &mut f, &mut theta0);
        }
    }

    // Per-parameter reduction: recover a + b cos θ + c sin θ along each axis
    // and accumulate Var = E[(−b sin θ + c cos θ)²] = ½ E[b² + c²].
    let sqrt3 = 3.0f64.sqrt();
    let mut entries: Vec<GridEntry> = Vec::with_capacity(circuit.param_count());
    let mut cone_results: BTreeMap<ParamId, (f64, f64)> = BTreeMap::new();
    for (axis, &param) in cone_params.iter().enumerate() {
        let stride = 3usize.pow((m - 1 - axis) as u32);
        let mut var_sum = 0.0f64;
        let mut mean_sum = 0.0f64;
        let outer = 3usize.pow(axis as u32);
        for o in 0..outer {
            let base_o = o * 3 * stride;
            for inner in 0..stride {
                let base = base_o + inner;
                let f1 = f[base];
                let f2 = f[base + stride];
                let f3 = f[base + 2 * stride];
                let a = (f1 + f2 + f3) / 3.0;
                let b = f2 - a;
                let c = (f3 - f1) / sqrt3;
                var_sum += 0.5 * (b * b + c * c);
                // Mean of the gradient over the three nodes (zero up to
                // roundoff; summed explicitly rather than assumed).
                for node in GRID_NODES {
                    mean_sum += -b * node.sin() + c * node.cos();
                }
            }
        }
        let combos = (outer * stride) as f64;
        cone_results.insert(param, (var_sum / combos, mean_sum / (combos * 3.0)));
    }
    for &param in circuit.params() {
        let (variance, mean) = cone_results.get(&param).copied().unwrap_or((0.0, 0.0));
        entries.push(GridEntry {
            param,
            variance,
            mean,
        });
    }
    Ok(GridSweep {
        entries,
        nodes: total,
    })
}

/// Exact `Var[∂_{j,k}⟨H⟩]` by trigonometric-grid quadrature.
///
/// Parameters outside the observable's causal cone yield exactly zero.
pub fn grid_variance(
    circuit: &Circuit,
    observable: &Observable,
    param: ParamId,
) -> Result<VarianceEstimate> {
    circuit.param_position(param)?;
    let sweep = grid_sweep(circuit, observable)?;
    let entry = sweep.get(param).expect("every param has an entry");
    Ok(VarianceEstimate {
        value: entry.variance,
        stderr: 0.0,
        method: Method::Grid,
        samples: sweep.nodes,
        seed: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_ansatz, Family};

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn zero_angles_trivial_expectations() {
        let c = build_ansatz(Family::QMps, 2).unwrap();
        let theta = vec![0.0; c.param_count()];
        assert!(approx(
            expectation(&c, &Observable::z(1), &theta).unwrap(),
            1.0,
            1e-12
        ));
        assert!(approx(
            expectation(&c, &Observable::x(1), &theta).unwrap(),
            0.0,
            1e-12
        ));
        // Identity observable: empty site map.
        let id = Observable::from_sites(Default::default());
        assert!(approx(expectation(&c, &id, &theta).unwrap(), 1.0, 1e-12));
    }

    #[test]
    fn norm_preserved_across_random_gates() {
        let c = build_ansatz(Family::QMera, 8, ).unwrap();
        let mut rng = sample_rng(7, 0);
        for _ in 0..20 {
            let theta: Vec<f64> = (0..c.param_count())
                .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect();
            let sim = Simulator::full(&c);
            let psi = sim.run(&theta).unwrap();
            assert!(approx(psi.norm_sqr(), 1.0, 1e-12));
        }
    }

    #[test]
    fn param_shift_matches_finite_difference() {
        let c = build_ansatz(Family::QMps, 3).unwrap();
        let obs = Observable::x(2);
        let mut rng = sample_rng(13, 1);
        for trial in 0..5 {
            let theta: Vec<f64> = (0..c.param_count())
                .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect();
            for &param in [ParamId::new(1, 1), ParamId::new(2, 3), ParamId::new(3, 1)].iter() {
                let g = param_shift_grad(&c, &obs, &theta, param).unwrap();
                let pos = c.param_position(param).unwrap();
                let h = 1e-5;
                let mut t = theta.clone();
                t[pos] += h;
                let fp = expectation(&c, &obs, &t).unwrap();
                t[pos] = theta[pos] - h;
                let fm = expectation(&c, &obs, &t).unwrap();
                let fd = (fp - fm) / (2.0 * h);
                assert!(approx(g, fd, 1e-6), "trial {trial}, param {param}: {g} vs {fd}");
            }
        }
    }

    #[test]
    fn grid_zero_outside_cone() {
        let c = build_ansatz(Family::QMps, 5).unwrap();
        let est = grid_variance(&c, &Observable::x(2), ParamId::new(4, 1)).unwrap();
        assert_eq!(est.value, 0.0);
        let est = grid_variance(&c, &Observable::x(2), ParamId::new(3, 3)).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn mc_is_seed_deterministic() {
        let c = build_ansatz(Family::QMps, 3).unwrap();
        let obs = Observable::x(3);
        let a = mc_variance(&c, &obs, ParamId::new(1, 1), 2000, 42).unwrap();
        let b = mc_variance(&c, &obs, ParamId::new(1, 1), 2000, 42).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.stderr, b.stderr);
        let c2 = mc_variance(&c, &obs, ParamId::new(1, 1), 2000, 43).unwrap();
        assert_ne!(a.value, c2.value);
    }

    #[test]
    fn mc_agrees_with_grid() {
        let c = build_ansatz(Family::QMps, 3).unwrap();
        let obs = Observable::x(3);
        let grid = grid_variance(&c, &obs, ParamId::new(1, 1)).unwrap();
        let mc = mc_variance(&c, &obs, ParamId::new(1, 1), 20_000, 7).unwrap();
        assert!(
            (mc.value - grid.value).abs() <= 4.0 * mc.stderr,
            "mc {} vs grid {} (stderr {})",
            mc.value,
            grid.value,
            mc.stderr
        );
    }

    #[test]
    fn grid_cap_enforced() {
        // qMPS(5) with X5 has a 22-parameter cone: must be rejected.
        let c = build_ansatz(Family::QMps, 5).unwrap();
        let err = grid_variance(&c, &Observable::x(5), ParamId::new(1, 1)).unwrap_err();
        assert!(matches!(err, Error::GridTooLarge { .. }));
    }
}

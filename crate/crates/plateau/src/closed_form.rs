//! Closed-form gradient variances: analytic branches, transfer-matrix
//! recursions, bounds, and power-law fitting utilities.
//!
//! Everything here is evaluated directly from analytic expressions,
//! independent of the contraction engine in [`crate::zx`]; the test suites
//! cross-check the two against each other and against the brute-force
//! oracle.  All formulas are for parameters addressed as `(j, 1)` — the
//! first rotation on register `j` — with angles drawn uniformly from
//! `[-π, π]`.

use crate::circuit::Family;
use crate::error::{Error, Result};

/// `(3/8)^e`, the per-block decay factor of the variance recursions.
fn decay(e: u32) -> f64 {
    0.375f64.powi(e as i32)
}

// ============================================================================
// qMPS branches
// ============================================================================

/// `Var[∂_{j,1}⟨X_i⟩]` on the `N`-qubit staircase ansatz, all branches.
///
/// Case list (`d = 3/8`):
///
/// * `i = N`: `¼ d^{N-1}` for `j < N`; `1/8 + ¼ d^{N-1}` for `j = N`.
/// * `i < N`, `j < i` or `j = i = 1`: `(11/64) d^{i-1}`.
/// * `i < N`, `j = i > 1`: `3/128 + (33/512) d^{i-2}`.
/// * `i < N`, `j = i + 1`: `3/64` for `i = 1`, else `3/128 + (3/64) d^{i-1}`.
/// * `j > i + 1`: exactly 0 (outside the causal cone).
pub fn var_qmps_x(n: usize, i: usize, j: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidQubitCount {
            family: Family::QMps,
            requirement: "N >= 2",
            n_qubits: n,
        });
    }
    let check = |r: usize| -> Result<()> {
        if r == 0 || r > n {
            Err(Error::RegisterOutOfRange {
                register: r,
                n_qubits: n,
            })
        } else {
            Ok(())
        }
    };
    check(i)?;
    check(j)?;
    let v = if i == n {
        let tail = 0.25 * decay(n as u32 - 1);
        if j == n {
            0.125 + tail
        } else {
            tail
        }
    } else if j > i + 1 {
        0.0
    } else if j == i + 1 {
        if i == 1 {
            3.0 / 64.0
        } else {
            3.0 / 128.0 + (3.0 / 64.0) * decay(i as u32 - 1)
        }
    } else if j == i && i > 1 {
        3.0 / 128.0 + (33.0 / 512.0) * decay(i as u32 - 2)
    } else {
        // j < i, or j = i = 1.
        (11.0 / 64.0) * decay(i as u32 - 1)
    };
    Ok(v)
}

/// `Var[∂_{1,1}⟨X_i X_{i+1}⟩]` on the `N`-qubit staircase ansatz:
/// `c_i (3/8)^i` with `c_i = 37/96` for `i = N-1` and `61/512` otherwise.
pub fn var_qmps_xx(n: usize, i: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidQubitCount {
            family: Family::QMps,
            requirement: "N >= 2",
            n_qubits: n,
        });
    }
    if i == 0 || i + 1 > n {
        return Err(Error::RegisterOutOfRange {
            register: i + 1,
            n_qubits: n,
        });
    }
    let c = if i == n - 1 { 37.0 / 96.0 } else { 61.0 / 512.0 };
    Ok(c * decay(i as u32))
}

// ============================================================================
// qTTN transfer recursion
// ============================================================================

/// The 2×2 transfer matrix `M = ¼·[[3, 8], [1, 8]]` driving the coefficient
/// pair `(α_k, β_k)` of the tree recursion, together with its spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QttnTransfer {
    /// The matrix entries, row-major.
    pub matrix: [[f64; 2]; 2],
}

impl Default for QttnTransfer {
    fn default() -> Self {
        Self::new()
    }
}

impl QttnTransfer {
    /// The canonical transfer matrix.
    pub fn new() -> Self {
        QttnTransfer {
            matrix: [[0.75, 2.0], [0.25, 2.0]],
        }
    }

    /// Initial coefficient pair `u₀ = ¼·[3, 1]`.
    pub fn u0(&self) -> [f64; 2] {
        [0.75, 0.25]
    }

    /// Exact determinant (rational arithmetic: `(3·8 − 8·1)/16 = 1`).
    pub fn det(&self) -> f64 {
        let m = self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Eigenvalues `(λ₁, λ₂)` with `λ₁ < λ₂`; `λ₁λ₂ = 1`, `λ₁+λ₂ = 11/4`.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let m = self.matrix;
        let tr = m[0][0] + m[1][1];
        let disc = (tr * tr - 4.0 * self.det()).sqrt();
        ((tr - disc) / 2.0, (tr + disc) / 2.0)
    }

    /// Apply the transfer to a coefficient pair.
    pub fn apply(&self, [a, b]: [f64; 2]) -> [f64; 2] {
        let m = self.matrix;
        [m[0][0] * a + m[0][1] * b, m[1][0] * a + m[1][1] * b]
    }
}

/// `Var[∂_{1,1}⟨X_N⟩]` on the depth-`n` tree ansatz (`N = 2ⁿ`): `¼ (3/8)ⁿ`.
pub fn var_qttn_xn(n: u32) -> f64 {
    0.25 * decay(n)
}

/// Exact `Var[∂_{1,1}⟨X₁⟩]` on the depth-`n` tree ansatz:
/// `(α_{n-1} + 8 β_{n-1}) / 4^{n+2}` with `α₀ = 3`, `β₀ = 1` and
/// `α_{k+1} = ¼(3α_k + 8β_k)`, `β_{k+1} = ¼(α_k + 8β_k)`.
pub fn var_qttn_x1(n: u32) -> f64 {
    let (mut a, mut b) = (3.0f64, 1.0f64);
    for _ in 1..n {
        let (na, nb) = (0.25 * (3.0 * a + 8.0 * b), 0.25 * (a + 8.0 * b));
        a = na;
        b = nb;
    }
    (a + 8.0 * b) / 4.0f64.powi(n as i32 + 2)
}

/// Leading-order asymptotic of [`var_qttn_x1`]: the dominant-eigenvalue
/// projection `q (w₁ + 8 w₂) λ₂^{n-1} / 4^{n+2}`, so the exact value divided
/// by this tends to 1 from below as `n` grows.
pub fn var_qttn_x1_asymptotic(n: u32) -> f64 {
    let t = QttnTransfer::new();
    let (_, l2) = t.eigenvalues();
    // Eigenvector for λ₂: (¾ − λ₂) w₁ + 2 w₂ = 0  ⇒  w = [2, λ₂ − ¾].
    let w = [2.0, l2 - 0.75];
    // Decompose [3, 1] = p·w₁ + q·w₂ (w₁ the other eigenvector).
    let (l1, _) = t.eigenvalues();
    let w1 = [2.0, l1 - 0.75];
    // Solve [w1 w] [p q]ᵀ = [3 1]ᵀ.
    let det = w1[0] * w[1] - w[0] * w1[1];
    let q = (w1[0] * 1.0 - w1[1] * 3.0) / det;
    q * (w[0] + 8.0 * w[1]) * l2.powi(n as i32 - 1) / 4.0f64.powi(n as i32 + 2)
}

// ============================================================================
// qMERA bounds and reference table
// ============================================================================

/// Analytic lower bound `¼ (3/8)^{2n}` for `Var[∂_{1,1}⟨X_N⟩]` on the
/// depth-`n` MERA-inspired ansatz.
pub fn var_qmera_lower(n: u32) -> f64 {
    0.25 * decay(2 * n)
}

/// Reference `(lower, upper)` gradient variances of the qMERA ansatz:
/// `Var[∂_{1,1}⟨X_N⟩]` (widest cone) and `Var[∂_{1,1}⟨X₁⟩]` (narrowest
/// cone), tabulated to four significant figures from exact contraction.
pub fn qmera_reference(n_qubits: usize) -> Result<(f64, f64)> {
    match n_qubits {
        2 => Ok((0.09375, 0.1719)),
        4 => Ok((0.02335, 0.05313)),
        8 => Ok((0.002385, 0.02004)),
        16 => Ok((0.0005448, 0.006687)),
        _ => Err(Error::NotCovered(format!(
            "qMERA reference table has N in {{2, 4, 8, 16}}, got {n_qubits}"
        ))),
    }
}

/// Lower bound for `k`-local observables: `¼ (3/8)^{k·log₂N}` on the tree
/// ansatz and `¼ (3/8)^{2k·log₂N}` on the MERA-inspired ansatz.  No such
/// closed bound exists for the staircase ansatz.
pub fn klocal_lower_bound(family: Family, n_qubits: usize, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::NotCovered("k must be at least 1".into()));
    }
    if n_qubits < 2 || !n_qubits.is_power_of_two() {
        return Err(Error::InvalidQubitCount {
            family,
            requirement: "N = 2^n with n >= 1",
            n_qubits: n_qubits,
        });
    }
    let n = n_qubits.trailing_zeros();
    match family {
        Family::QTtn => Ok(0.25 * decay(k * n)),
        Family::QMera => Ok(0.25 * decay(2 * k * n)),
        _ => Err(Error::NotCovered(format!(
            "no k-local variance bound for the {family} family"
        ))),
    }
}

// ============================================================================
// Tail bound and scaling fits
// ============================================================================

/// Chebyshev tail bound `P(|∂⟨H⟩| ≥ κ) ≤ min(1, Var/κ²)` for the mean-zero
/// gradient.
pub fn chebyshev_tail(variance: f64, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::NotCovered(format!(
            "Chebyshev threshold must be positive, got {kappa}"
        )));
    }
    if variance < 0.0 {
        return Err(Error::NotCovered(format!(
            "variance must be non-negative, got {variance}"
        )));
    }
    Ok((variance / (kappa * kappa)).min(1.0))
}

/// Result of a log-log power-law regression `variance ≈ prefactor · N^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    /// Fitted exponent (slope in log-log space).
    pub exponent: f64,
    /// Fitted prefactor (exp of the log-log intercept).
    pub prefactor: f64,
    /// Coefficient of determination of the log-log regression.
    pub r_squared: f64,
}

/// Ordinary least squares on `(ln N, ln variance)`.
///
/// Requires at least two points with positive coordinates.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 2 {
        return Err(Error::TooFewSamples(points.len()));
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(n, v) in points {
        if !(n > 0.0 && v > 0.0) {
            return Err(Error::NotCovered(format!(
                "power-law fit needs positive points, got ({n}, {v})"
            )));
        }
        xs.push(n.ln());
        ys.push(v.ln());
    }
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::NotCovered(
            "power-law fit needs at least two distinct N values".into(),
        ));
    }
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(PowerLawFit {
        exponent,
        prefactor: intercept.exp(),
        r_squared,
    })
}

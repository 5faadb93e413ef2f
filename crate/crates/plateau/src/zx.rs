//! Exact contraction of the gradient-variance tensor network.
//!
//! For rotations `exp(-iθV/2)` with uniformly random angles, both the squared
//! expectation and the squared gradient are obtained by averaging four copies
//! of the circuit (ket and conjugated bra, twice).  Averaging a rotation over
//! its angle turns the four-copy gate into a small fixed superoperator, and
//! the whole variance becomes a tensor network with one 16-dimensional leg
//! per qubit register.  This module contracts that network two ways:
//!
//! * [`doubled`] — the four-copy network contracted directly over the causal
//!   cone (16-dimensional register legs).  Exact by construction, with no
//!   free normalization; used as the internal reference.
//! * [`letter`] — the compressed three-letter register algebra: every
//!   averaged rotation carries a 3-valued label, Hadamard edges become a
//!   fixed 3×3 matrix, and the differentiated parameter is pinned to the
//!   second letter by the [`letter::PrimitiveTensor::P2`] projection.  The
//!   letter layer houses the transfer maps driving the closed-form
//!   recursions and is tested against the identities that survive exact
//!   validation; production numbers always come from the doubled engine.
//!
//! [`contract_variance_tn`] is the public entry point.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::circuit::{causal_cone, Circuit, Gate, Observable, ParamId, SiteCoeffs};
use crate::error::{Error, Result};

pub use letter::{
    apply_m_edge, block_map, observable_vector, transfer_down, transfer_up, BlockMap,
    PrimitiveTensor, RegisterVector, TransferMap, M_DOWN, M_UP,
};

// ============================================================================
// Four-copy reference engine
// ============================================================================

pub mod doubled {
    //! Dense four-copy contraction over the causal cone.
    //!
    //! Per register the state space is `(ket ⊗ bra-conj) ⊗ (ket ⊗ bra-conj)`,
    //! i.e. 16-dimensional.  Averaging a rotation `R(θ) ⊗ R̄(θ)` over
    //! `θ ~ U[-π, π]` leaves `A ⊗ A + ½(B ⊗ B + C ⊗ C)` where
    //! `R ⊗ R̄ = A + B cos θ + C sin θ`; the differentiated rotation leaves
    //! `½(B ⊗ B + C ⊗ C)` (the gradient is `−B sin θ + C cos θ`).  CNOT acts
    //! as the same permutation on all four copies, so on the paired index it
    //! is simply `target ^= control`.

    use super::*;

    /// Rotation axis of a parameterized gate.
    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum Axis {
        X,
        Z,
    }

    fn rot2(axis: Axis, theta: f64) -> [Complex64; 4] {
        let c = Complex64::new((theta / 2.0).cos(), 0.0);
        match axis {
            Axis::X => {
                let s = Complex64::new(0.0, -(theta / 2.0).sin());
                [c, s, s, c]
            }
            Axis::Z => [
                Complex64::from_polar(1.0, -theta / 2.0),
                Complex64::ZERO,
                Complex64::ZERO,
                Complex64::from_polar(1.0, theta / 2.0),
            ],
        }
    }

    /// `R(θ) ⊗ conj(R(θ))` as a 4×4 matrix on the (ket, bra-conj) pair.
    fn pair_op(axis: Axis, theta: f64) -> [[Complex64; 4]; 4] {
        let r = rot2(axis, theta);
        let rb = [r[0].conj(), r[1].conj(), r[2].conj(), r[3].conj()];
        let mut m = [[Complex64::ZERO; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        m[i * 2 + k][j * 2 + l] = r[i * 2 + j] * rb[k * 2 + l];
                    }
                }
            }
        }
        m
    }

    /// Decompose the θ-dependence `F(θ) = A + B cos θ + C sin θ` from three
    /// equally spaced nodes (exact: `F` has trigonometric degree 1).
    fn trig_components(axis: Axis) -> [[[Complex64; 4]; 4]; 3] {
        let t = 2.0 * std::f64::consts::FRAC_PI_3;
        let f1 = pair_op(axis, -t);
        let f2 = pair_op(axis, 0.0);
        let f3 = pair_op(axis, t);
        let mut a = [[Complex64::ZERO; 4]; 4];
        let mut b = [[Complex64::ZERO; 4]; 4];
        let mut c = [[Complex64::ZERO; 4]; 4];
        let s3 = 3.0f64.sqrt();
        for i in 0..4 {
            for j in 0..4 {
                let avg = (f1[i][j] + f2[i][j] + f3[i][j]) / 3.0;
                a[i][j] = avg;
                b[i][j] = f2[i][j] - avg;
                c[i][j] = (f3[i][j] - f1[i][j]) / s3;
            }
        }
        [a, b, c]
    }

    /// 16×16 real superoperator from `A ⊗ A + ½(B ⊗ B + C ⊗ C)` (averaged) or
    /// `½(B ⊗ B + C ⊗ C)` (differentiated).
    fn four_copy(axis: Axis, differentiated: bool) -> [f64; 256] {
        let [a, b, c] = trig_components(axis);
        let mut out = [0.0f64; 256];
        for i1 in 0..4 {
            for j1 in 0..4 {
                for i2 in 0..4 {
                    for j2 in 0..4 {
                        let mut v = 0.5 * (b[i1][j1] * b[i2][j2] + c[i1][j1] * c[i2][j2]);
                        if !differentiated {
                            v += a[i1][j1] * a[i2][j2];
                        }
                        debug_assert!(v.im.abs() < 1e-14);
                        out[(i1 * 4 + i2) * 16 + (j1 * 4 + j2)] = v.re;
                    }
                }
            }
        }
        out
    }

    /// Precomputed four-copy superoperators.
    pub struct FourCopyOps {
        /// Angle-averaged rotations, indexed by axis.
        pub avg: [Box<[f64; 256]>; 2],
        /// Angle-averaged squared-gradient rotations, indexed by axis.
        pub deriv: [Box<[f64; 256]>; 2],
        /// Hadamard on all four copies.
        pub h4: Box<[f64; 256]>,
    }

    fn axis_index(axis: Axis) -> usize {
        match axis {
            Axis::X => 0,
            Axis::Z => 1,
        }
    }

    impl FourCopyOps {
        fn new() -> Self {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let h2 = [h, h, h, -h];
            let mut h4 = Box::new([0.0f64; 256]);
            // H ⊗ H ⊗ H ⊗ H with the (k1, b1, k2, b2) bit layout.
            for row in 0..16usize {
                for col in 0..16usize {
                    let mut v = 1.0;
                    for bit in 0..4 {
                        let r = (row >> (3 - bit)) & 1;
                        let c = (col >> (3 - bit)) & 1;
                        v *= h2[r * 2 + c];
                    }
                    h4[row * 16 + col] = v;
                }
            }
            FourCopyOps {
                avg: [
                    Box::new(four_copy(Axis::X, false)),
                    Box::new(four_copy(Axis::Z, false)),
                ],
                deriv: [
                    Box::new(four_copy(Axis::X, true)),
                    Box::new(four_copy(Axis::Z, true)),
                ],
                h4,
            }
        }

        /// Shared instance.
        pub fn get() -> &'static FourCopyOps {
            static OPS: std::sync::OnceLock<FourCopyOps> = std::sync::OnceLock::new();
            OPS.get_or_init(FourCopyOps::new)
        }

        /// The averaged or differentiated rotation superoperator.
        pub fn rotation(&self, axis: Axis, differentiated: bool) -> &[f64; 256] {
            let i = axis_index(axis);
            if differentiated {
                &self.deriv[i]
            } else {
                &self.avg[i]
            }
        }
    }

    /// Closure row for an unmeasured register: `tr ⊗ tr` on the two pairs.
    pub fn identity_row() -> [f64; 16] {
        let mut row = [0.0; 16];
        for (d, r) in row.iter_mut().enumerate() {
            let (k1, b1, k2, b2) = (d >> 3 & 1, d >> 2 & 1, d >> 1 & 1, d & 1);
            if k1 == b1 && k2 == b2 {
                *r = 1.0;
            }
        }
        row
    }

    /// Closure row for a measured site `σ = k0 I + k1 X + k2 Y + k3 Z`:
    /// `⟨σ⟩² = Σ σ[b1,k1] σ[b2,k2] v[k1 b1 k2 b2]`.
    pub fn site_row(coeffs: SiteCoeffs) -> Result<[f64; 16]> {
        let [k0, k1, k2, k3] = coeffs;
        let sigma = [
            [Complex64::new(k0 + k3, 0.0), Complex64::new(k1, -k2)],
            [Complex64::new(k1, k2), Complex64::new(k0 - k3, 0.0)],
        ];
        let mut row = [0.0; 16];
        for (d, r) in row.iter_mut().enumerate() {
            let (k1i, b1, k2i, b2) = (d >> 3 & 1, d >> 2 & 1, d >> 1 & 1, d & 1);
            let v = sigma[b1][k1i] * sigma[b2][k2i];
            if v.im.abs() > 1e-12 {
                return Err(Error::NotCovered(
                    "site operators mixing Y with other Paulis".into(),
                ));
            }
            *r = v.re;
        }
        Ok(row)
    }

    /// Frontier state over open registers, 16 dimensions per register.
    struct Frontier {
        /// Open registers in slot order; slot `i` has index stride `16^i`.
        slots: Vec<usize>,
        state: Vec<f64>,
    }

    impl Frontier {
        fn new() -> Self {
            Frontier {
                slots: Vec::new(),
                state: vec![1.0],
            }
        }

        fn slot_of(&self, register: usize) -> Option<usize> {
            self.slots.iter().position(|&r| r == register)
        }

        /// Open a register in the four-copy `|0…0⟩` state (index 0).
        fn open(&mut self, register: usize) {
            self.slots.push(register);
            self.state.resize(self.state.len() * 16, 0.0);
        }

        fn apply_1reg(&mut self, register: usize, m: &[f64; 256]) {
            let s = self.slot_of(register).expect("register open");
            let stride = 16usize.pow(s as u32);
            let len = self.state.len();
            let mut scratch = [0.0f64; 16];
            let mut base = 0;
            while base < len {
                for inner in base..base + stride {
                    for (d, sc) in scratch.iter_mut().enumerate() {
                        *sc = self.state[inner + d * stride];
                    }
                    for r in 0..16 {
                        let mut acc = 0.0;
                        for (d, sc) in scratch.iter().enumerate() {
                            acc += m[r * 16 + d] * sc;
                        }
                        self.state[inner + r * stride] = acc;
                    }
                }
                base += stride * 16;
            }
        }

        /// CNOT on all four copies: a permutation `target ^= control`.
        fn apply_cnot(&mut self, control: usize, target: usize) {
            let sc = self.slot_of(control).expect("control open");
            let st = self.slot_of(target).expect("target open");
            let stride_c = 16usize.pow(sc as u32);
            let stride_t = 16usize.pow(st as u32);
            let mut out = vec![0.0f64; self.state.len()];
            for (idx, &v) in self.state.iter().enumerate() {
                let dc = (idx / stride_c) % 16;
                let dt = (idx / stride_t) % 16;
                let new_idx = idx - dt * stride_t + (dt ^ dc) * stride_t;
                out[new_idx] = v;
            }
            self.state = out;
        }

        /// Contract one register against a closure row, removing its slot.
        fn close(&mut self, register: usize, row: &[f64; 16]) {
            let s = self.slot_of(register).expect("register open");
            let stride = 16usize.pow(s as u32);
            let len = self.state.len();
            let mut out = vec![0.0f64; len / 16];
            let mut base = 0;
            let mut written = 0;
            while base < len {
                for inner in base..base + stride {
                    let mut acc = 0.0;
                    for (d, r) in row.iter().enumerate() {
                        acc += r * self.state[inner + d * stride];
                    }
                    out[written] = acc;
                    written += 1;
                }
                base += stride * 16;
            }
            // Remove slot s; higher slots shift down, which the linear
            // reindexing above already reflects (stride-16 block removed).
            self.slots.remove(s);
            self.state = out;
        }
    }

    /// Exact `Var[∂_param ⟨observable⟩]` by dense four-copy contraction.
    ///
    /// `param = None` computes `E[⟨observable⟩²]` instead (all rotations
    /// averaged, none differentiated) — useful for self-tests.
    pub fn contract(
        circuit: &Circuit,
        observable: &Observable,
        param: Option<ParamId>,
    ) -> Result<f64> {
        observable.check_sites(circuit.n_qubits())?;
        let deriv_gate = match param {
            Some(p) => {
                let idx = circuit.param_gate_index(p)?;
                let cone = causal_cone(circuit, observable)?;
                if !cone.gate_indices.contains(&idx) {
                    return Ok(0.0);
                }
                Some(idx)
            }
            None => None,
        };
        let cone = causal_cone(circuit, observable)?;
        let ops = FourCopyOps::get();

        // Last cone gate touching each register, to close eagerly.
        let mut last_touch: BTreeMap<usize, usize> = BTreeMap::new();
        for &idx in &cone.gate_indices {
            let (a, b) = circuit.gates()[idx].registers();
            last_touch.insert(a, idx);
            if let Some(b) = b {
                last_touch.insert(b, idx);
            }
        }

        let mut frontier = Frontier::new();
        for &idx in &cone.gate_indices {
            let gate = &circuit.gates()[idx];
            let (a, b) = gate.registers();
            for reg in [Some(a), b].into_iter().flatten() {
                if frontier.slot_of(reg).is_none() {
                    frontier.open(reg);
                }
            }
            match *gate {
                Gate::Rx { target, .. } => {
                    frontier.apply_1reg(
                        target,
                        ops.rotation(Axis::X, deriv_gate == Some(idx)),
                    );
                }
                Gate::Rz { target, .. } => {
                    frontier.apply_1reg(
                        target,
                        ops.rotation(Axis::Z, deriv_gate == Some(idx)),
                    );
                }
                Gate::Cnot { control, target } => frontier.apply_cnot(control, target),
                Gate::H { target } => frontier.apply_1reg(target, &ops.h4),
            }
            for reg in [Some(a), b].into_iter().flatten() {
                if last_touch[&reg] == idx {
                    let row = match observable.sites().get(&reg) {
                        Some(&coeffs) => site_row(coeffs)?,
                        None => identity_row(),
                    };
                    frontier.close(reg, &row);
                }
            }
        }
        debug_assert!(frontier.slots.is_empty());
        let mut value = frontier.state[0];
        // Observable sites whose register never appears in the cone (e.g.
        // all gates on that register are outside it) contribute ⟨0|σ|0⟩².
        for (&site, &coeffs) in observable.sites() {
            if !last_touch.contains_key(&site) {
                let s = coeffs[0] + coeffs[3];
                value *= s * s;
            }
        }
        Ok(value)
    }
}

// ============================================================================
// Letter-space algebra
// ============================================================================

pub mod letter {
    //! The three-letter register algebra.
    //!
    //! Every angle-averaged rotation contributes a 3-valued letter index;
    //! register legs carry vectors over the basis `v₁₃ = [1,0,1]`,
    //! `v₂ = [0,1,0]`, `v₁₃⁻ = [1,0,−1]`.  Hadamard edges act as the fixed
    //! symmetric matrix `M = ¼[[1,1,1],[1,1,−1],[1,−1,1]]`; the
    //! differentiated parameter's copy tensor is replaced by the `P₂`
    //! projection, which pins its letter to the second basis direction.

    use super::*;

    /// Coefficients over the basis `{v₁₃, v₂, v₁₃⁻}`.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct RegisterVector {
        /// Coefficient of `v₁₃ = [1, 0, 1]`.
        pub c13: f64,
        /// Coefficient of `v₂ = [0, 1, 0]`.
        pub c2: f64,
        /// Coefficient of `v₁₃⁻ = [1, 0, −1]`.
        pub c13m: f64,
    }

    impl RegisterVector {
        /// Construct from basis coefficients.
        pub fn new(c13: f64, c2: f64, c13m: f64) -> Self {
            RegisterVector { c13, c2, c13m }
        }

        /// `v₁₃`.
        pub const V13: RegisterVector = RegisterVector {
            c13: 1.0,
            c2: 0.0,
            c13m: 0.0,
        };
        /// `v₂`.
        pub const V2: RegisterVector = RegisterVector {
            c13: 0.0,
            c2: 1.0,
            c13m: 0.0,
        };
        /// `v₁₃⁻`.
        pub const V13M: RegisterVector = RegisterVector {
            c13: 0.0,
            c2: 0.0,
            c13m: 1.0,
        };

        /// Standard-basis components `[a, b, c]`.
        pub fn to_standard(self) -> [f64; 3] {
            [
                self.c13 + self.c13m,
                self.c2,
                self.c13 - self.c13m,
            ]
        }

        /// From standard-basis components.
        pub fn from_standard([a, b, c]: [f64; 3]) -> Self {
            RegisterVector {
                c13: (a + c) / 2.0,
                c2: b,
                c13m: (a - c) / 2.0,
            }
        }

    }

    /// The primitive tensors of the variance network.
    #[derive(Debug, Clone, PartialEq)]
    pub enum PrimitiveTensor {
        /// `Σ_{i=0..2} |i⟩^⊗in ⟨i|^⊗out` — the parameter's letter spider.
        CopyTensor {
            /// Incoming legs.
            arity_in: usize,
            /// Outgoing legs.
            arity_out: usize,
        },
        /// The 3×3 Hadamard-edge matrix `¼[[1,1,1],[1,1,−1],[1,−1,1]]`.
        MMatrix,
        /// `Σ_i |i⟩^⊗in ⟨1|` — pins the differentiated parameter's letter.
        P2 {
            /// Incoming legs.
            arity_in: usize,
        },
        /// Scalar boundary weight.
        BoundaryDot(f64),
        /// Observable boundary vector `u`.
        ObservableVector(RegisterVector),
    }

    /// The Hadamard-edge matrix `M` (standard basis).
    pub fn m_matrix() -> [[f64; 3]; 3] {
        [
            [0.25, 0.25, 0.25],
            [0.25, 0.25, -0.25],
            [0.25, -0.25, 0.25],
        ]
    }

    /// Apply `2M` in the `{v₁₃, v₂, v₁₃⁻}` basis:
    /// `v₁₃ ↦ v₁₃`, `v₂ ↦ ½(v₂ + v₁₃⁻)`, `v₁₃⁻ ↦ v₂`.
    pub fn apply_m_edge(v: RegisterVector) -> RegisterVector {
        let [a, b, c] = v.to_standard();
        let m = m_matrix();
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = 2.0 * (m[i][0] * a + m[i][1] * b + m[i][2] * c);
        }
        RegisterVector::from_standard(out)
    }

    /// Observable boundary vector:
    /// `u = 2k₀²·v₁₃ + 2(k₁² + k₃²)·v₂ + 2k₂²·v₁₃⁻`.
    pub fn observable_vector(coeffs: SiteCoeffs) -> RegisterVector {
        let [k0, k1, k2, k3] = coeffs;
        RegisterVector::new(2.0 * k0 * k0, 2.0 * (k1 * k1 + k3 * k3), 2.0 * k2 * k2)
    }

    /// A 3×3 transfer map on register coefficient triples.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct TransferMap(pub [[f64; 3]; 3]);

    /// Transfer toward the canonical centre:
    /// `(c₁₃, c₂, c₁₃⁻) ↦ (c₁₃ + c₁₃⁻/4, 3c₂/8, 0)`.
    pub const M_UP: TransferMap = TransferMap([
        [1.0, 0.0, 0.25],
        [0.0, 0.375, 0.0],
        [0.0, 0.0, 0.0],
    ]);

    /// Transfer away from the canonical centre:
    /// `(c₁₃, c₂, c₁₃⁻) ↦ (c₁₃, c₂/8 + c₁₃⁻, c₂/8)`.
    pub const M_DOWN: TransferMap = TransferMap([
        [1.0, 0.0, 0.0],
        [0.0, 0.125, 1.0],
        [0.0, 0.125, 0.0],
    ]);

    impl TransferMap {
        /// Apply to a coefficient triple.
        pub fn apply(&self, v: RegisterVector) -> RegisterVector {
            let x = [v.c13, v.c2, v.c13m];
            let mut out = [0.0; 3];
            for (i, o) in out.iter_mut().enumerate() {
                for (j, xj) in x.iter().enumerate() {
                    *o += self.0[i][j] * xj;
                }
            }
            RegisterVector::new(out[0], out[1], out[2])
        }
    }

    /// Apply [`M_UP`].
    pub fn transfer_up(v: RegisterVector) -> RegisterVector {
        M_UP.apply(v)
    }

    /// Apply [`M_DOWN`].
    pub fn transfer_down(v: RegisterVector) -> RegisterVector {
        M_DOWN.apply(v)
    }

    // ------------------------------------------------------------------
    // Letter-network contraction engine
    // ------------------------------------------------------------------

    /// 9×9 action of one entangling block on a pair of register triples.
    #[derive(Debug, Clone, PartialEq)]
    pub struct BlockMap(pub [[f64; 9]; 9]);

    /// The letter tensors of one two-register block, contracted densely:
    /// copy tensors for the four core rotations (the second rotation on the
    /// control wire fuses with the CNOT's control spider), `M` on each
    /// Hadamard edge, and the trailing copy tensors on the control wire.
    ///
    /// Input/output index order: `top ⊗ bottom` (standard letter basis).
    /// Normalized by the single global scalar 2 so that the closed pair
    /// `v₁₃ ⊗ v₁₃` is an exact fixed point (trace preservation).
    pub fn block_map() -> &'static BlockMap {
        static MAP: std::sync::OnceLock<BlockMap> = std::sync::OnceLock::new();
        MAP.get_or_init(|| {
            let mut out = [[0.0f64; 9]; 9];
            for t_in in 0..3 {
                for b_in in 0..3 {
                    let mut top = [0.0; 3];
                    top[t_in] = 1.0;
                    let mut bottom = [0.0; 3];
                    bottom[b_in] = 1.0;
                    let pairs = contract_block(
                        &top,
                        &bottom,
                        &BlockShape {
                            trailing_top: true,
                            trailing_bottom: false,
                        },
                        None,
                    );
                    for t_out in 0..3 {
                        for b_out in 0..3 {
                            out[t_out * 3 + b_out][t_in * 3 + b_in] =
                                2.0 * pairs[t_out][b_out];
                        }
                    }
                }
            }
            BlockMap(out)
        })
    }

    /// Which rotation of the block is differentiated (letter pinned to 2).
    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub(super) enum BlockSlot {
        TopOpen(usize),    // 0 = RX, 1 = RZ (fused with the control spider)
        BottomOpen(usize), // 0 = RX, 1 = RZ
        TopTrail(usize),   // 0 = RX, 1 = RZ
        BottomTrail(usize),
    }

    #[derive(Debug, Clone, Copy)]
    pub(super) struct BlockShape {
        pub trailing_top: bool,
        pub trailing_bottom: bool,
    }

    fn edge(v: &[f64; 3]) -> [f64; 3] {
        // Hadamard edge, normalized as 2M (trace-preserving: v13 fixed).
        let m = m_matrix();
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                *o += 2.0 * m[i][j] * vj;
            }
        }
        out
    }

    fn copy2(v: &[f64; 3], pinned: bool) -> [f64; 3] {
        if pinned {
            let mut out = [0.0; 3];
            out[1] = v[1];
            out
        } else {
            *v
        }
    }

    /// Contract one block in letter space.
    ///
    /// Inputs are the standard-basis letter vectors on the two wires just
    /// before the block's first rotations (input Hadamard edges already
    /// consumed upstream).  Returns the joint output `out[top][bottom]` over
    /// standard letter indices; wires without trailing rotations exit right
    /// after the CNOT spiders.
    pub(super) fn contract_block(
        top_in: &[f64; 3],
        bottom_in: &[f64; 3],
        shape: &BlockShape,
        deriv: Option<BlockSlot>,
    ) -> [[f64; 3]; 3] {
        let pin = |slot: BlockSlot| deriv == Some(slot);

        // Top wire: RX(t1) -M- [RZ(t2) fused with control copy].
        let t1 = copy2(top_in, pin(BlockSlot::TopOpen(0)));
        let t1e = edge(&t1);
        // Bottom wire: RX(b1) -M- RZ(b2) -M- target spider.
        let b1 = copy2(bottom_in, pin(BlockSlot::BottomOpen(0)));
        let b2 = copy2(&edge(&b1), pin(BlockSlot::BottomOpen(1)));
        let b2e = edge(&b2);

        // Fused control copy F (letter f): legs t1e, connector, continuation.
        // Target copy T (letter g): legs b2e, connector (one Hadamard edge),
        // continuation.  Connector edge: one Hadamard edge (2M).
        let m = m_matrix();
        let mut joint = [[0.0f64; 3]; 3]; // joint[f][g]
        for f in 0..3 {
            if pin(BlockSlot::TopOpen(1)) && f != 1 {
                continue;
            }
            for (g, row) in m.iter().enumerate() {
                joint[f][g] = t1e[f] * b2e[g] * 2.0 * row[f];
            }
        }

        // Continuations.
        let mut out = [[0.0f64; 3]; 3];
        for f in 0..3 {
            for g in 0..3 {
                if joint[f][g] == 0.0 {
                    continue;
                }
                let mut top = [0.0; 3];
                top[f] = 1.0;
                if shape.trailing_top {
                    let t3 = copy2(&edge(&top), pin(BlockSlot::TopTrail(0)));
                    let t4 = copy2(&edge(&t3), pin(BlockSlot::TopTrail(1)));
                    top = t4;
                }
                let mut bottom = [0.0; 3];
                bottom[g] = 1.0;
                if shape.trailing_bottom {
                    let b3 = copy2(&edge(&bottom), pin(BlockSlot::BottomTrail(0)));
                    let b4 = copy2(&edge(&b3), pin(BlockSlot::BottomTrail(1)));
                    bottom = b4;
                }
                for (t, tv) in top.iter().enumerate() {
                    for (b, bv) in bottom.iter().enumerate() {
                        out[t][b] += joint[f][g] * tv * bv;
                    }
                }
            }
        }
        out
    }
}

// ============================================================================
// Public contraction API
// ============================================================================

/// Exact `Var[∂_{j,k}⟨H⟩]` for a product observable, by contracting the
/// variance tensor network over the observable's causal cone.
///
/// Parameters outside the causal cone return exactly 0.
pub fn contract_variance_tn(
    circuit: &Circuit,
    observable: &Observable,
    param: ParamId,
) -> Result<f64> {
    circuit.param_position(param)?;
    doubled::contract(circuit, observable, Some(param))
}

/// [`contract_variance_tn`] for every parameter of the circuit.
pub fn contract_variance_all_params(
    circuit: &Circuit,
    observable: &Observable,
) -> Result<BTreeMap<ParamId, f64>> {
    let mut out = BTreeMap::new();
    for &p in circuit.params() {
        out.insert(p, contract_variance_tn(circuit, observable, p)?);
    }
    Ok(out)
}

//! Circuit construction for the qMPS, qTTN and qMERA ansätze.
//!
//! The three families are built gate-for-gate as drawn in their defining
//! figures, over the gate set `{R_X, R_Z, CNOT, H}` with every rotation angle
//! an independent variational parameter.  Parameters are addressed by
//! [`ParamId`]: the pair `(j, k)` names the `k`-th rotation encountered on
//! qubit register `j` in circuit order.
//!
//! Conventions fixed here (the closed forms' `(j, k)` indexing depends on them):
//!
//! * Registers are 1-based and numbered top-to-bottom.
//! * Inside a two-qubit block the gate order is: the `R_X` pair, the `R_Z`
//!   pair, the CNOT with control on the top wire, then the trailing
//!   rotations (again `R_X` before `R_Z` per wire).
//! * Gates apply left-to-right to `|0…0⟩`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ansatz family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Staircase of two-qubit blocks (matrix-product-state inspired).
    QMps,
    /// Binary tree of two-qubit blocks (tree-tensor-network inspired).
    QTtn,
    /// Tree interleaved with disentangling layers (MERA inspired).
    QMera,
    /// Hand-assembled circuit.
    Custom,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::QMps => "qmps",
            Family::QTtn => "qttn",
            Family::QMera => "qmera",
            Family::Custom => "custom",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "qmps" => Ok(Family::QMps),
            "qttn" => Ok(Family::QTtn),
            "qmera" => Ok(Family::QMera),
            "custom" => Ok(Family::Custom),
            other => Err(format!("unknown ansatz family '{other}'")),
        }
    }
}

/// `(register j, ordinal k)` address of one rotation parameter.
///
/// `k` counts only rotation gates on register `j`, in circuit order, starting
/// at 1.  For any fixed circuit this addressing is a bijection onto the set
/// of rotation gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ParamId {
    /// 1-based register index `j`.
    pub register: usize,
    /// 1-based ordinal `k` among the rotations on register `j`.
    pub ordinal: usize,
}

impl ParamId {
    /// Shorthand constructor.
    pub fn new(register: usize, ordinal: usize) -> Self {
        Self { register, ordinal }
    }
}

impl fmt::Display for ParamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.register, self.ordinal)
    }
}

/// One operation of a custom-circuit script (see [`Circuit::custom`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    /// Parameterized `R_X` rotation on a register.
    Rx(usize),
    /// Parameterized `R_Z` rotation on a register.
    Rz(usize),
    /// Controlled-NOT `(control, target)`.
    Cnot(usize, usize),
    /// Hadamard on a register.
    H(usize),
}

/// One gate of a circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    /// `exp(-i θ X / 2)` on `target`.
    Rx { target: usize, param: ParamId },
    /// `exp(-i θ Z / 2)` on `target`.
    Rz { target: usize, param: ParamId },
    /// Controlled-NOT.
    Cnot { control: usize, target: usize },
    /// Hadamard.
    H { target: usize },
}

impl Gate {
    /// Registers the gate acts on.
    pub fn registers(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::Rx { target, .. } | Gate::Rz { target, .. } | Gate::H { target } => {
                (target, None)
            }
            Gate::Cnot { control, target } => (control, Some(target)),
        }
    }

    /// Parameter id if this is a rotation gate.
    pub fn param(&self) -> Option<ParamId> {
        match *self {
            Gate::Rx { param, .. } | Gate::Rz { param, .. } => Some(param),
            _ => None,
        }
    }
}

/// Depth-level annotation (one entry per structural layer of qTTN/qMERA).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layer {
    /// Human-readable label, e.g. `"cg-2"` or `"dis-3"`.
    pub label: String,
    /// Range of indices into [`Circuit::gates`] covered by the layer.
    pub gates: std::ops::Range<usize>,
}

/// An ordered gate list over `n_qubits` registers.
///
/// Immutable after construction; all operations on it are pure functions.
#[derive(Debug, Clone)]
pub struct Circuit {
    family: Family,
    n_qubits: usize,
    gates: Vec<Gate>,
    layers: Vec<Layer>,
    /// Linear parameter order = order of rotation gates in `gates`.
    params: Vec<ParamId>,
    /// Inverse of `params`.
    param_index: BTreeMap<ParamId, usize>,
    /// Gate index of each parameter's rotation gate.
    param_gate: BTreeMap<ParamId, usize>,
}

impl Circuit {
    /// Family tag.
    pub fn family(&self) -> Family {
        self.family
    }

    /// Number of qubit registers `N`.
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Gates in application order.
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Structural layer annotations (empty for qMPS/custom).
    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Number of variational parameters `M`.
    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    /// Parameters in linear (gate) order.
    pub fn params(&self) -> &[ParamId] {
        &self.params
    }

    /// Linear index of a parameter, i.e. its position in [`Self::params`].
    pub fn param_position(&self, param: ParamId) -> Result<usize> {
        self.param_index
            .get(&param)
            .copied()
            .ok_or(Error::UnknownParam { param })
    }

    /// Index into [`Self::gates`] of the rotation carrying `param`.
    pub fn param_gate_index(&self, param: ParamId) -> Result<usize> {
        self.param_gate
            .get(&param)
            .copied()
            .ok_or(Error::UnknownParam { param })
    }

    /// Assemble a custom circuit from an operation script.
    ///
    /// Rotation parameters are assigned `(register, ordinal)` ids in script
    /// order, exactly as for the built-in families.
    pub fn custom(n_qubits: usize, ops: &[Op]) -> Result<Self> {
        let mut b = Builder::new(n_qubits);
        let check = |r: usize| -> Result<()> {
            if r == 0 || r > n_qubits {
                Err(Error::RegisterOutOfRange {
                    register: r,
                    n_qubits,
                })
            } else {
                Ok(())
            }
        };
        for &op in ops {
            match op {
                Op::Rx(t) => {
                    check(t)?;
                    b.rx(t);
                }
                Op::Rz(t) => {
                    check(t)?;
                    b.rz(t);
                }
                Op::Cnot(c, t) => {
                    check(c)?;
                    check(t)?;
                    if c == t {
                        return Err(Error::RegisterOutOfRange {
                            register: t,
                            n_qubits,
                        });
                    }
                    b.cnot(c, t);
                }
                Op::H(t) => {
                    check(t)?;
                    b.gates.push(Gate::H { target: t });
                }
            }
        }
        Ok(Self::from_builder(Family::Custom, n_qubits, b))
    }

    fn from_builder(family: Family, n_qubits: usize, b: Builder) -> Self {
        let mut params = Vec::new();
        let mut param_index = BTreeMap::new();
        let mut param_gate = BTreeMap::new();
        for (idx, gate) in b.gates.iter().enumerate() {
            if let Some(p) = gate.param() {
                param_index.insert(p, params.len());
                param_gate.insert(p, idx);
                params.push(p);
            }
        }
        debug_assert_eq!(params.len(), param_index.len(), "ParamId must be unique");
        Circuit {
            family,
            n_qubits,
            gates: b.gates,
            layers: b.layers,
            params,
            param_index,
            param_gate,
        }
    }
}

/// Incrementally assembles a gate list, assigning `(j, k)` ordinals.
struct Builder {
    gates: Vec<Gate>,
    layers: Vec<Layer>,
    rotations_seen: Vec<usize>, // per register, 1-based index 0 unused
}

impl Builder {
    fn new(n_qubits: usize) -> Self {
        Builder {
            gates: Vec::new(),
            layers: Vec::new(),
            rotations_seen: vec![0; n_qubits + 1],
        }
    }

    fn next_param(&mut self, register: usize) -> ParamId {
        self.rotations_seen[register] += 1;
        ParamId::new(register, self.rotations_seen[register])
    }

    fn rx(&mut self, target: usize) {
        let param = self.next_param(target);
        self.gates.push(Gate::Rx { target, param });
    }

    fn rz(&mut self, target: usize) {
        let param = self.next_param(target);
        self.gates.push(Gate::Rz { target, param });
    }

    fn cnot(&mut self, control: usize, target: usize) {
        self.gates.push(Gate::Cnot { control, target });
    }

    /// Entangling block core: `R_X` pair, `R_Z` pair, CNOT (control on top).
    fn block_core(&mut self, top: usize, bottom: usize) {
        self.rx(top);
        self.rx(bottom);
        self.rz(top);
        self.rz(bottom);
        self.cnot(top, bottom);
    }

    /// Trailing rotation pair on one wire: `R_X` then `R_Z`.
    fn trailing(&mut self, wire: usize) {
        self.rx(wire);
        self.rz(wire);
    }

    fn layer(&mut self, label: &str, start: usize) {
        self.layers.push(Layer {
            label: label.to_string(),
            gates: start..self.gates.len(),
        });
    }
}

/// Build one of the three ansatz circuits.
///
/// * qMPS requires `N ≥ 2` and has `6(N-2) + 8` parameters.
/// * qTTN and qMERA require `N = 2^n`, `n ≥ 1`.
///
/// ```
/// use plateau::circuit::{build_ansatz, Family};
///
/// let c = build_ansatz(Family::QMps, 3).unwrap();
/// assert_eq!(c.param_count(), 14);
/// ```
pub fn build_ansatz(family: Family, n_qubits: usize) -> Result<Circuit> {
    match family {
        Family::QMps => build_qmps(n_qubits),
        Family::QTtn => build_qttn(n_qubits),
        Family::QMera => build_qmera(n_qubits),
        Family::Custom => Err(Error::InvalidQubitCount {
            family,
            requirement: "a concrete family (custom circuits are hand-assembled)",
            n_qubits,
        }),
    }
}

/// Staircase ansatz: blocks `U_1 … U_{N-1}`, block `U_j` on wires `(j, j+1)`.
///
/// Blocks `j < N-1` carry 6 rotations (trailing pair on the top wire only);
/// the last block carries 8 (trailing pair on both wires).
pub fn build_qmps(n_qubits: usize) -> Result<Circuit> {
    if n_qubits < 2 {
        return Err(Error::InvalidQubitCount {
            family: Family::QMps,
            requirement: "N >= 2",
            n_qubits,
        });
    }
    let mut b = Builder::new(n_qubits);
    for j in 1..n_qubits {
        let start = b.gates.len();
        b.block_core(j, j + 1);
        b.trailing(j);
        if j == n_qubits - 1 {
            b.trailing(j + 1);
        }
        b.layer(&format!("block-{j}"), start);
    }
    Ok(Circuit::from_builder(Family::QMps, n_qubits, b))
}

fn require_power_of_two(family: Family, n_qubits: usize) -> Result<u32> {
    if n_qubits >= 2 && n_qubits.is_power_of_two() {
        Ok(n_qubits.trailing_zeros())
    } else {
        Err(Error::InvalidQubitCount {
            family,
            requirement: "N = 2^n with n >= 1",
            n_qubits,
        })
    }
}

/// Binary-tree ansatz on `N = 2^n` qubits.
///
/// The root block acts on `(1, N/2 + 1)`, then the construction recurses
/// into each half; level-`n` (leaf) blocks carry the trailing rotation pairs
/// on both wires.
pub fn build_qttn(n_qubits: usize) -> Result<Circuit> {
    let n = require_power_of_two(Family::QTtn, n_qubits)?;
    let mut b = Builder::new(n_qubits);
    // Breadth-first over levels so gates group into depth layers.
    for level in 1..=n {
        let start = b.gates.len();
        let span = n_qubits >> (level - 1);
        for block in 0..(1usize << (level - 1)) {
            let top = 1 + block * span;
            let bottom = top + span / 2;
            b.block_core(top, bottom);
            if level == n {
                b.trailing(top);
                b.trailing(bottom);
            }
        }
        b.layer(&format!("level-{level}"), start);
    }
    Ok(Circuit::from_builder(Family::QTtn, n_qubits, b))
}

/// Wires first entangled at coarse-graining level `m`, paired for the
/// disentangling layers.  Level 1 introduces the root pair `(1, N/2 + 1)`;
/// level `m >= 2` introduces one wire per level-`m` block, paired left to
/// right.
fn mera_level_pairs(n_qubits: usize, m: u32) -> Vec<(usize, usize)> {
    if m == 1 {
        return vec![(1, 1 + n_qubits / 2)];
    }
    let span = n_qubits >> (m - 1);
    let wires: Vec<usize> = (0..(1usize << (m - 1)))
        .map(|block| 1 + block * span + span / 2)
        .collect();
    wires.chunks_exact(2).map(|p| (p[0], p[1])).collect()
}

/// MERA-inspired ansatz on `N = 2^n` qubits.
///
/// Alternates coarse-graining layers (wired exactly as the qTTN levels, all
/// blocks 4-rotation cores) with disentangling layers.  Disentangling layer
/// `l >= 2` acts after coarse-graining layer `l` and carries one block for
/// every adjacent pair of wires introduced at each level `m <= l` — the root
/// pair, then the level-2 pair, and so on, so the CNOTs on the pairs
/// introduced at level `l` itself come last.  A final `R_X R_Z` pair acts on
/// every register before measurement.
pub fn build_qmera(n_qubits: usize) -> Result<Circuit> {
    let n = require_power_of_two(Family::QMera, n_qubits)?;
    let mut b = Builder::new(n_qubits);
    for level in 1..=n {
        let start = b.gates.len();
        let span = n_qubits >> (level - 1);
        for block in 0..(1usize << (level - 1)) {
            let top = 1 + block * span;
            b.block_core(top, top + span / 2);
        }
        b.layer(&format!("cg-{level}"), start);
        if level >= 2 {
            let start = b.gates.len();
            for m in 1..=level {
                for (top, bottom) in mera_level_pairs(n_qubits, m) {
                    b.block_core(top, bottom);
                }
            }
            b.layer(&format!("dis-{level}"), start);
        }
    }
    let start = b.gates.len();
    for wire in 1..=n_qubits {
        b.trailing(wire);
    }
    b.layer("trailing", start);
    Ok(Circuit::from_builder(Family::QMera, n_qubits, b))
}

/// Per-site Pauli mixture coefficients `(k0, k1, k2, k3)` for
/// `σ = k0·I + k1·X + k2·Y + k3·Z`.
pub type SiteCoeffs = [f64; 4];

/// A product observable `⊗_i σ_i`; registers absent from `sites` carry the
/// identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    sites: BTreeMap<usize, SiteCoeffs>,
}

impl Observable {
    /// Build from explicit per-site coefficient quadruples.
    pub fn from_sites(sites: BTreeMap<usize, SiteCoeffs>) -> Self {
        Observable { sites }
    }

    /// Single-site Pauli `X` on register `i`.
    pub fn x(i: usize) -> Self {
        Self::single(i, [0.0, 1.0, 0.0, 0.0])
    }

    /// Single-site Pauli `Y` on register `i`.
    pub fn y(i: usize) -> Self {
        Self::single(i, [0.0, 0.0, 1.0, 0.0])
    }

    /// Single-site Pauli `Z` on register `i`.
    pub fn z(i: usize) -> Self {
        Self::single(i, [0.0, 0.0, 0.0, 1.0])
    }

    /// Two-local product `X_i X_{i+1}`.
    pub fn xx(i: usize) -> Self {
        Self::x(i).product(&Self::x(i + 1))
    }

    /// `k`-local product `X_{i_1} ⊗ … ⊗ X_{i_k}`.
    pub fn x_on(sites: &[usize]) -> Self {
        let mut map = BTreeMap::new();
        for &i in sites {
            map.insert(i, [0.0, 1.0, 0.0, 0.0]);
        }
        Observable { sites: map }
    }

    fn single(i: usize, coeffs: SiteCoeffs) -> Self {
        let mut sites = BTreeMap::new();
        sites.insert(i, coeffs);
        Observable { sites }
    }

    /// Tensor product with another observable on disjoint sites.
    ///
    /// # Panics
    /// Panics if the two observables share a site.
    pub fn product(&self, other: &Observable) -> Self {
        let mut sites = self.sites.clone();
        for (&i, &c) in &other.sites {
            let clash = sites.insert(i, c);
            assert!(clash.is_none(), "site {i} appears in both factors");
        }
        Observable { sites }
    }

    /// Non-identity sites and their coefficient quadruples.
    pub fn sites(&self) -> &BTreeMap<usize, SiteCoeffs> {
        &self.sites
    }

    /// Largest register the observable touches (0 if none).
    pub fn max_site(&self) -> usize {
        self.sites.keys().next_back().copied().unwrap_or(0)
    }

    /// Canonical string form, e.g. `"X:2"` or `"X:2*X:3"`.
    ///
    /// Only defined for observables whose every site is a pure Pauli.
    pub fn canonical_string(&self) -> Option<String> {
        let mut parts = Vec::new();
        for (&i, &[k0, k1, k2, k3]) in &self.sites {
            let letter = match (k0, k1, k2, k3) {
                (0.0, 1.0, 0.0, 0.0) => 'X',
                (0.0, 0.0, 1.0, 0.0) => 'Y',
                (0.0, 0.0, 0.0, 1.0) => 'Z',
                _ => return None,
            };
            parts.push(format!("{letter}:{i}"));
        }
        Some(parts.join("*"))
    }

    /// Parse the `P:i` grammar with `*`-joined factors, e.g. `"X:2*X:3"`.
    pub fn parse(input: &str) -> Result<Self> {
        let err = |reason: &str| Error::InvalidObservable {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let mut sites = BTreeMap::new();
        for part in input.split('*') {
            let (letter, idx) = part
                .trim()
                .split_once(':')
                .ok_or_else(|| err("expected 'P:i' with P in {X,Y,Z}"))?;
            let coeffs = match letter.trim() {
                "X" | "x" => [0.0, 1.0, 0.0, 0.0],
                "Y" | "y" => [0.0, 0.0, 1.0, 0.0],
                "Z" | "z" => [0.0, 0.0, 0.0, 1.0],
                _ => return Err(err("Pauli letter must be X, Y or Z")),
            };
            let i: usize = idx
                .trim()
                .parse()
                .map_err(|_| err("site index must be a positive integer"))?;
            if i == 0 {
                return Err(err("site indices are 1-based"));
            }
            if sites.insert(i, coeffs).is_some() {
                return Err(err("site repeated"));
            }
        }
        if sites.is_empty() {
            return Err(err("empty observable"));
        }
        Ok(Observable { sites })
    }

    /// Validate the observable against a circuit's register range.
    pub fn check_sites(&self, n_qubits: usize) -> Result<()> {
        for &i in self.sites.keys() {
            if i == 0 || i > n_qubits {
                return Err(Error::RegisterOutOfRange {
                    register: i,
                    n_qubits,
                });
            }
        }
        Ok(())
    }
}

/// Weighted product terms of the transverse-field Ising chain
/// `-J Σ Z_i Z_{i+1} - h Σ X_i` on an open chain of `n` qubits.
pub fn ising_terms(n: usize, j: f64, h: f64) -> Vec<(f64, Observable)> {
    let mut terms = Vec::new();
    for i in 1..n {
        terms.push((-j, Observable::z(i).product(&Observable::z(i + 1))));
    }
    for i in 1..=n {
        terms.push((-h, Observable::x(i)));
    }
    terms
}

/// Weighted product terms of the Heisenberg chain
/// `(1/4) Σ X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1}` on an open chain.
pub fn heisenberg_terms(n: usize) -> Vec<(f64, Observable)> {
    let mut terms = Vec::new();
    for i in 1..n {
        let next = i + 1;
        terms.push((0.25, Observable::x(i).product(&Observable::x(next))));
        terms.push((0.25, Observable::y(i).product(&Observable::y(next))));
        terms.push((0.25, Observable::z(i).product(&Observable::z(next))));
    }
    terms
}

/// The backward light cone of an observable through a circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalCone {
    /// Registers that can influence the measured sites.
    pub registers: BTreeSet<usize>,
    /// Indices into [`Circuit::gates`] inside the cone, ascending.
    pub gate_indices: BTreeSet<usize>,
}

/// Backward light-cone traversal from the observable's sites.
///
/// Walking the gate list in reverse, a gate is in the cone iff it touches a
/// currently active register; a two-qubit gate then activates both of its
/// registers.
pub fn causal_cone(circuit: &Circuit, observable: &Observable) -> Result<CausalCone> {
    observable.check_sites(circuit.n_qubits())?;
    let mut active: BTreeSet<usize> = observable.sites().keys().copied().collect();
    let mut gate_indices = BTreeSet::new();
    for (idx, gate) in circuit.gates().iter().enumerate().rev() {
        let (a, b) = gate.registers();
        let touches = active.contains(&a) || b.is_some_and(|b| active.contains(&b));
        if touches {
            gate_indices.insert(idx);
            active.insert(a);
            if let Some(b) = b {
                active.insert(b);
            }
        }
    }
    Ok(CausalCone {
        registers: active,
        gate_indices,
    })
}

/// True iff the parameter is causally disconnected from the observable, i.e.
/// its rotation gate lies outside [`causal_cone`].
///
/// For such parameters the gradient is identically zero for every `θ`.
pub fn variance_is_zero(
    family: Family,
    n_qubits: usize,
    observable: &Observable,
    param: ParamId,
) -> Result<bool> {
    let circuit = build_ansatz(family, n_qubits)?;
    variance_is_zero_in(&circuit, observable, param)
}

/// [`variance_is_zero`] against an already-built circuit.
pub fn variance_is_zero_in(
    circuit: &Circuit,
    observable: &Observable,
    param: ParamId,
) -> Result<bool> {
    let gate_idx = circuit.param_gate_index(param)?;
    let cone = causal_cone(circuit, observable)?;
    Ok(!cone.gate_indices.contains(&gate_idx))
}

#[derive(Serialize, Deserialize)]
struct GateJson {
    kind: String,
    targets: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    param: Option<[usize; 2]>,
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    family: Family,
    n_qubits: usize,
    gates: Vec<GateJson>,
}

impl Circuit {
    /// Serialize to the stable JSON document
    /// `{family, n_qubits, gates: [{kind, targets, param: [j, k]}]}`.
    pub fn to_json(&self) -> String {
        let gates = self
            .gates
            .iter()
            .map(|g| match *g {
                Gate::Rx { target, param } => GateJson {
                    kind: "rx".into(),
                    targets: vec![target],
                    param: Some([param.register, param.ordinal]),
                },
                Gate::Rz { target, param } => GateJson {
                    kind: "rz".into(),
                    targets: vec![target],
                    param: Some([param.register, param.ordinal]),
                },
                Gate::Cnot { control, target } => GateJson {
                    kind: "cnot".into(),
                    targets: vec![control, target],
                    param: None,
                },
                Gate::H { target } => GateJson {
                    kind: "h".into(),
                    targets: vec![target],
                    param: None,
                },
            })
            .collect();
        let doc = CircuitJson {
            family: self.family,
            n_qubits: self.n_qubits,
            gates,
        };
        serde_json::to_string_pretty(&doc).expect("circuit serialization cannot fail")
    }
}

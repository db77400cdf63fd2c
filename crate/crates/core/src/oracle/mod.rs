//! Brute-force ground truth for small circuits.
//!
//! X/MCX circuits permute computational basis states without phases, so the
//! classical map `f` determines everything: statevector simulation is an
//! index permutation, and safety of a dirty qubit `q` is the statement that
//! `f` acts as `V ⊗ I_q`: bit `q` is always preserved and no other output bit
//! depends on the input value of `q`.

mod density;

use num_complex::Complex64;
use thiserror::Error;

pub use density::{reduced_density, ReducedDensity};

use crate::circuit::{FlatCircuit, Gate, QubitId};

/// Numeric tolerance for every matrix comparison in this module.
pub const TOLERANCE: f64 = 1e-9;
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 20;
pub const STATEVECTOR_CAP: usize = 14;
pub const RESTORATION_CAP: usize = 13;
pub const BELL_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("circuit has {qubits} qubits; this check supports at most {cap}")]
    TooManyQubits { qubits: usize, cap: usize },
    #[error("state has {len} amplitudes but the circuit needs {expected}")]
    DimensionMismatch { len: usize, expected: usize },
}

/// Computational basis state; entry `i` is the value of qubit `i`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisState(pub Vec<bool>);

impl BasisState {
    pub fn zeros(n: usize) -> Self {
        BasisState(vec![false; n])
    }

    pub fn from_bits(bits: u64, n: usize) -> Self {
        BasisState((0..n).map(|i| bits >> i & 1 == 1).collect())
    }

    /// Packs into an integer with qubit `i` at bit `i`. Requires `len <= 64`.
    pub fn to_bits(&self) -> u64 {
        assert!(self.0.len() <= 64);
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | u64::from(b) << i)
    }

    pub fn get(&self, q: QubitId) -> bool {
        self.0[q.index()]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::fmt::Display for BasisState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn apply_classical(c: &FlatCircuit, x: &BasisState) -> BasisState {
    assert_eq!(
        x.len(),
        c.num_qubits(),
        "basis state length must match qubit count"
    );
    let mut bits = x.0.clone();
    for g in &c.gates {
        match g {
            Gate::Not { target } => bits[target.index()] ^= true,
            Gate::Mcx { controls, target } => {
                if controls.iter().all(|q| bits[q.index()]) {
                    bits[target.index()] ^= true;
                }
            }
        }
    }
    BasisState(bits)
}

/// The circuit compiled to bitmask operations on `u64` states.
#[derive(Debug, Clone)]
pub struct ClassicalMap {
    n: usize,
    ops: Vec<(u64, u64)>,
}

impl ClassicalMap {
    /// Fails above 63 qubits.
    pub fn new(c: &FlatCircuit) -> Result<Self, OracleError> {
        if c.num_qubits() > 63 {
            return Err(OracleError::TooManyQubits {
                qubits: c.num_qubits(),
                cap: 63,
            });
        }
        let ops = c
            .gates
            .iter()
            .map(|g| {
                let ctrl = g.controls().iter().fold(0u64, |m, q| m | 1 << q.0);
                (ctrl, 1u64 << g.target().0)
            })
            .collect();
        Ok(ClassicalMap {
            n: c.num_qubits(),
            ops,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn apply(&self, mut x: u64) -> u64 {
        for &(ctrl, tgt) in &self.ops {
            if x & ctrl == ctrl {
                x ^= tgt;
            }
        }
        x
    }

    /// `table[x] = f(x)` over all `2^n` states.
    pub fn table(&self) -> Vec<u64> {
        (0..1u64 << self.n).map(|x| self.apply(x)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Safety {
    Safe,
    /// Lexicographically smallest input violating the condition.
    Unsafe(BasisState),
}

impl Safety {
    pub fn is_safe(&self) -> bool {
        matches!(self, Safety::Safe)
    }
}

pub fn exhaustive_safe(c: &FlatCircuit, q: QubitId) -> Result<Safety, OracleError> {
    exhaustive_safe_with_cap(c, q, DEFAULT_EXHAUSTIVE_CAP)
}

/// Safe iff for every input `x`: bit `q` of `f(x)` equals `x_q`, and `f(x)`
/// and `f(x with q flipped)` agree on every bit other than `q`.
pub fn exhaustive_safe_with_cap(
    c: &FlatCircuit,
    q: QubitId,
    cap: usize,
) -> Result<Safety, OracleError> {
    let n = c.num_qubits();
    if n > cap.min(63) {
        return Err(OracleError::TooManyQubits { qubits: n, cap });
    }
    let f = ClassicalMap::new(c)?;
    let qbit = 1u64 << q.0;
    for k in 0..1u64 << n {
        // visit inputs in lexicographic order of (x_0, x_1, ..., x_{n-1})
        let x = if n == 0 {
            0
        } else {
            k.reverse_bits() >> (64 - n)
        };
        let fx = f.apply(x);
        if (fx ^ x) & qbit != 0 || (fx ^ f.apply(x ^ qbit)) & !qbit != 0 {
            return Ok(Safety::Unsafe(BasisState::from_bits(x, n)));
        }
    }
    Ok(Safety::Safe)
}

/// Whether `x` violates safety of `q` under `c`.
pub fn violates(c: &FlatCircuit, q: QubitId, x: &BasisState) -> bool {
    let fx = apply_classical(c, x);
    let mut flipped = x.clone();
    flipped.0[q.index()] ^= true;
    let fy = apply_classical(c, &flipped);
    fx.get(q) != x.get(q) || (0..x.len()).any(|i| i != q.index() && fx.0[i] != fy.0[i])
}

/// Dense state vector; bit `i` of an index is the value of qubit `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Amplitudes(pub Vec<Complex64>);

impl Amplitudes {
    pub fn basis(x: &BasisState) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); 1 << x.len()];
        v[x.to_bits() as usize] = Complex64::new(1.0, 0.0);
        Amplitudes(v)
    }

    pub fn num_qubits(&self) -> usize {
        self.0.len().trailing_zeros() as usize
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }
}

fn permute(table: &[u64], psi: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for (x, a) in psi.iter().enumerate() {
        out[table[x] as usize] = *a;
    }
    out
}

pub fn simulate_statevector(c: &FlatCircuit, psi: &Amplitudes) -> Result<Amplitudes, OracleError> {
    let n = c.num_qubits();
    if n > STATEVECTOR_CAP {
        return Err(OracleError::TooManyQubits {
            qubits: n,
            cap: STATEVECTOR_CAP,
        });
    }
    if psi.0.len() != 1 << n {
        return Err(OracleError::DimensionMismatch {
            len: psi.0.len(),
            expected: 1 << n,
        });
    }
    let table = ClassicalMap::new(c)?.table();
    Ok(Amplitudes(permute(&table, &psi.0)))
}

/// One-qubit pure states used by the restoration checks.
pub mod states {
    use num_complex::Complex64;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    pub fn zero() -> [Complex64; 2] {
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
    }

    pub fn one() -> [Complex64; 2] {
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
    }

    pub fn plus() -> [Complex64; 2] {
        [Complex64::new(H, 0.0), Complex64::new(H, 0.0)]
    }

    pub fn minus() -> [Complex64; 2] {
        [Complex64::new(H, 0.0), Complex64::new(-H, 0.0)]
    }

    pub fn plus_i() -> [Complex64; 2] {
        [Complex64::new(H, 0.0), Complex64::new(0.0, H)]
    }

    /// |0⟩, |1⟩, |+⟩, |+i⟩, |−⟩.
    pub fn five() -> [[Complex64; 2]; 5] {
        [zero(), one(), plus(), plus_i(), minus()]
    }
}

fn projector(phi: &[Complex64]) -> ReducedDensity {
    let dim = phi.len();
    let mut data = Vec::with_capacity(dim * dim);
    for r in phi {
        for c in phi {
            data.push(r * c.conj());
        }
    }
    ReducedDensity { dim, data }
}

/// Insert `bit` at position `pos` of `rest`, shifting higher bits up.
fn insert_bit(rest: u64, pos: u32, bit: bool) -> u64 {
    let low = rest & ((1 << pos) - 1);
    let high = (rest >> pos) << (pos + 1);
    high | u64::from(bit) << pos | low
}

/// True iff `q` prepared in `phi` ends in `|phi⟩⟨phi|` for every basis state
/// of the other qubits.
pub fn check_state_restoration(
    c: &FlatCircuit,
    q: QubitId,
    phi: [Complex64; 2],
) -> Result<bool, OracleError> {
    let n = c.num_qubits();
    if n > RESTORATION_CAP {
        return Err(OracleError::TooManyQubits {
            qubits: n,
            cap: RESTORATION_CAP,
        });
    }
    let table = ClassicalMap::new(c)?.table();
    let target = projector(&phi);
    let zero = Complex64::new(0.0, 0.0);
    for env in 0..1u64 << (n - 1) {
        let mut psi = vec![zero; 1 << n];
        psi[insert_bit(env, q.0, false) as usize] = phi[0];
        psi[insert_bit(env, q.0, true) as usize] = phi[1];
        let out = permute(&table, &psi);
        let rho = reduced_density(&Amplitudes(out), &[q]);
        if rho.max_distance(&target) > TOLERANCE {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff a Bell pair between `q` and a fresh outside qubit survives the
/// circuit for every basis state of the remaining qubits.
pub fn check_bell_preservation(c: &FlatCircuit, q: QubitId) -> Result<bool, OracleError> {
    let n = c.num_qubits();
    if n > BELL_CAP {
        return Err(OracleError::TooManyQubits {
            qubits: n,
            cap: BELL_CAP,
        });
    }
    let table = ClassicalMap::new(c)?.table();
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let bell = projector(&[h, zero, zero, h]);
    let ancilla = QubitId(n as u32);
    let low_mask = (1u64 << n) - 1;
    let ext_table: Vec<u64> = (0..1u64 << (n + 1))
        .map(|x| (x & !low_mask) | table[(x & low_mask) as usize])
        .collect();
    for env in 0..1u64 << (n - 1) {
        let mut psi = vec![zero; 1 << (n + 1)];
        for b in [false, true] {
            let x = insert_bit(env, q.0, b) | u64::from(b) << n;
            psi[x as usize] = h;
        }
        let out = permute(&ext_table, &psi);
        let rho = reduced_density(&Amplitudes(out), &[q, ancilla]);
        if rho.max_distance(&bell) > TOLERANCE {
            return Ok(false);
        }
    }
    Ok(true)
}

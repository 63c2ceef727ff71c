//! Exact statevector simulation with two engines behind one interface:
//! a dense array for small systems and a sparse associative map that
//! exploits the low support of DQI states before the final Hadamards.
//!
//! Bit convention (fixed everywhere): qubit `i` is the bit at position
//! `qubit_count - 1 - i` of a basis-state index, i.e. qubit 0 is the most
//! significant bit and the leftmost character of a bitstring.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::circuit::{Circuit, Gate, Register};
use crate::error::{Error, Result};

/// Hard ceiling for the dense engine (16 bytes per amplitude).
pub const DENSE_QUBIT_LIMIT: usize = 26;
/// Hard ceiling for the sparse engine (keys are `u64`, support is what
/// actually bounds memory).
pub const SPARSE_QUBIT_LIMIT: usize = 34;
/// `Engine::Auto` prefers dense up to this width.
pub const AUTO_DENSE_MAX: usize = 20;

/// Amplitudes below this magnitude are dropped by the sparse engine to keep
/// rounding dust from inflating the support.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Simulation engine selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Engine {
    Dense,
    Sparse,
    Auto,
}

impl Engine {
    fn resolve(self, qubit_count: usize) -> Result<ResolvedEngine> {
        match self {
            Engine::Dense => {
                if qubit_count > DENSE_QUBIT_LIMIT {
                    Err(Error::Infeasible(format!(
                        "dense engine supports at most {DENSE_QUBIT_LIMIT} qubits, circuit has {qubit_count}"
                    )))
                } else {
                    Ok(ResolvedEngine::Dense)
                }
            }
            Engine::Sparse => {
                if qubit_count > SPARSE_QUBIT_LIMIT {
                    Err(Error::Infeasible(format!(
                        "sparse engine supports at most {SPARSE_QUBIT_LIMIT} qubits, circuit has {qubit_count}"
                    )))
                } else {
                    Ok(ResolvedEngine::Sparse)
                }
            }
            Engine::Auto => {
                if qubit_count <= AUTO_DENSE_MAX {
                    Ok(ResolvedEngine::Dense)
                } else {
                    Engine::Sparse.resolve(qubit_count)
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ResolvedEngine {
    Dense,
    Sparse,
}

#[derive(Clone, Debug)]
enum Amps {
    Dense(Vec<Complex64>),
    Sparse(HashMap<u64, Complex64>),
}

/// A pure state as a map from basis indices to complex amplitudes.
#[derive(Clone, Debug)]
pub struct QuantumState {
    qubit_count: usize,
    amps: Amps,
}

/// Parse a bitstring (qubit 0 leftmost) into a basis index.
pub fn index_of_bitstring(s: &str) -> Result<u64> {
    let mut idx = 0u64;
    for c in s.chars() {
        idx = (idx << 1)
            | match c {
                '0' => 0,
                '1' => 1,
                _ => return Err(Error::Parse(format!("invalid bit character {c:?}"))),
            };
    }
    Ok(idx)
}

/// Render a basis index as a bitstring of `qubit_count` bits.
pub fn bitstring_of_index(idx: u64, qubit_count: usize) -> String {
    (0..qubit_count)
        .map(|i| if (idx >> (qubit_count - 1 - i)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

impl QuantumState {
    /// Basis state `|index>`.
    pub fn basis(qubit_count: usize, index: u64, engine: Engine) -> Result<Self> {
        assert!(qubit_count >= 1 && qubit_count <= 63);
        assert!(index < (1u64 << qubit_count));
        let amps = match engine.resolve(qubit_count)? {
            ResolvedEngine::Dense => {
                let mut v = vec![Complex64::ZERO; 1usize << qubit_count];
                v[index as usize] = Complex64::ONE;
                Amps::Dense(v)
            }
            ResolvedEngine::Sparse => {
                let mut m = HashMap::new();
                m.insert(index, Complex64::ONE);
                Amps::Sparse(m)
            }
        };
        Ok(Self { qubit_count, amps })
    }

    /// Sparse state from explicit amplitudes; duplicate indices accumulate
    /// and negligible entries are pruned. No normalization is applied.
    pub fn from_amplitudes(
        qubit_count: usize,
        entries: impl IntoIterator<Item = (u64, Complex64)>,
    ) -> Self {
        let mut m: HashMap<u64, Complex64> = HashMap::new();
        for (idx, amp) in entries {
            *m.entry(idx).or_insert(Complex64::ZERO) += amp;
        }
        m.retain(|_, amp| amp.norm() > PRUNE_THRESHOLD);
        Self { qubit_count, amps: Amps::Sparse(m) }
    }

    /// Basis state from a bitstring label (must have `qubit_count` bits).
    pub fn basis_from_bits(qubit_count: usize, bits: &str, engine: Engine) -> Result<Self> {
        if bits.len() != qubit_count {
            return Err(Error::DimensionMismatch(format!(
                "initial label has {} bits, circuit has {qubit_count} qubits",
                bits.len()
            )));
        }
        Self::basis(qubit_count, index_of_bitstring(bits)?, engine)
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.amps, Amps::Sparse(_))
    }

    pub fn amplitude(&self, index: u64) -> Complex64 {
        match &self.amps {
            Amps::Dense(v) => v[index as usize],
            Amps::Sparse(m) => m.get(&index).copied().unwrap_or(Complex64::ZERO),
        }
    }

    /// Number of stored nonzero amplitudes.
    pub fn support(&self) -> usize {
        match &self.amps {
            Amps::Dense(v) => v.iter().filter(|a| a.norm_sqr() > 0.0).count(),
            Amps::Sparse(m) => m.len(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        match &self.amps {
            Amps::Dense(v) => v.iter().map(|a| a.norm_sqr()).sum(),
            Amps::Sparse(m) => m.values().map(|a| a.norm_sqr()).sum(),
        }
    }

    /// Nonzero entries sorted by basis index.
    pub fn entries_sorted(&self) -> Vec<(u64, Complex64)> {
        let mut out: Vec<(u64, Complex64)> = match &self.amps {
            Amps::Dense(v) => v
                .iter()
                .enumerate()
                .filter(|(_, a)| a.norm_sqr() > 0.0)
                .map(|(i, a)| (i as u64, *a))
                .collect(),
            Amps::Sparse(m) => m.iter().map(|(&k, &v)| (k, v)).collect(),
        };
        out.sort_unstable_by_key(|(k, _)| *k);
        out
    }

    fn bit(index: u64, qubit: usize, qubit_count: usize) -> bool {
        (index >> (qubit_count - 1 - qubit)) & 1 == 1
    }

    fn mask(qubit: usize, qubit_count: usize) -> u64 {
        1u64 << (qubit_count - 1 - qubit)
    }

    /// Apply a single gate in place.
    pub fn apply_gate(&mut self, gate: &Gate) {
        let q = self.qubit_count;
        match gate {
            Gate::X(t) => self.apply_controlled_x(&[], *t),
            Gate::Cnot { control, target } => self.apply_controlled_x(&[*control], *target),
            Gate::Mcx { controls, target } => self.apply_controlled_x(controls, *target),
            Gate::Swap(a, b) => {
                let (ma, mb) = (Self::mask(*a, q), Self::mask(*b, q));
                self.permute(|idx| {
                    let (ba, bb) = (idx & ma != 0, idx & mb != 0);
                    if ba != bb {
                        idx ^ ma ^ mb
                    } else {
                        idx
                    }
                });
            }
            Gate::Z(t) => {
                let m = Self::mask(*t, q);
                self.phase(|idx| if idx & m != 0 { -Complex64::ONE } else { Complex64::ONE });
            }
            Gate::Rz(t, theta) => {
                let m = Self::mask(*t, q);
                let (p0, p1) = (
                    Complex64::from_polar(1.0, -theta / 2.0),
                    Complex64::from_polar(1.0, theta / 2.0),
                );
                self.phase(|idx| if idx & m != 0 { p1 } else { p0 });
            }
            Gate::H(t) => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let mat = [
                    [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
                    [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
                ];
                self.apply_controlled_1q(&[], *t, &mat);
            }
            Gate::Rx(t, theta) => {
                let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                let mat = [
                    [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
                    [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
                ];
                self.apply_controlled_1q(&[], *t, &mat);
            }
            Gate::Ry(t, theta) => self.apply_controlled_1q(&[], *t, &ry_matrix(*theta)),
            Gate::CRy { control, target, theta } => {
                self.apply_controlled_1q(&[*control], *target, &ry_matrix(*theta))
            }
            Gate::CCRy { control1, control2, target, theta } => {
                self.apply_controlled_1q(&[*control1, *control2], *target, &ry_matrix(*theta))
            }
        }
    }

    fn controls_mask(&self, controls: &[usize]) -> u64 {
        controls.iter().map(|&c| Self::mask(c, self.qubit_count)).fold(0, |a, b| a | b)
    }

    fn apply_controlled_x(&mut self, controls: &[usize], target: usize) {
        let cm = self.controls_mask(controls);
        let tm = Self::mask(target, self.qubit_count);
        self.permute(|idx| if idx & cm == cm { idx ^ tm } else { idx });
    }

    /// Remap basis indices through an involution-free bijection.
    fn permute(&mut self, f: impl Fn(u64) -> u64) {
        match &mut self.amps {
            Amps::Dense(v) => {
                let mut out = vec![Complex64::ZERO; v.len()];
                for (idx, amp) in v.iter().enumerate() {
                    if amp.norm_sqr() > 0.0 {
                        out[f(idx as u64) as usize] = *amp;
                    }
                }
                *v = out;
            }
            Amps::Sparse(m) => {
                let mut out = HashMap::with_capacity(m.len());
                for (&idx, &amp) in m.iter() {
                    out.insert(f(idx), amp);
                }
                *m = out;
            }
        }
    }

    fn phase(&mut self, f: impl Fn(u64) -> Complex64) {
        match &mut self.amps {
            Amps::Dense(v) => {
                for (idx, amp) in v.iter_mut().enumerate() {
                    *amp *= f(idx as u64);
                }
            }
            Amps::Sparse(m) => {
                for (&idx, amp) in m.iter_mut() {
                    *amp *= f(idx);
                }
            }
        }
    }

    /// Apply a 2x2 matrix to `target`, controlled on all of `controls`.
    fn apply_controlled_1q(&mut self, controls: &[usize], target: usize, mat: &[[Complex64; 2]; 2]) {
        let cm = self.controls_mask(controls);
        let tm = Self::mask(target, self.qubit_count);
        match &mut self.amps {
            Amps::Dense(v) => {
                for idx0 in 0..v.len() as u64 {
                    if idx0 & tm != 0 || idx0 & cm != cm {
                        continue;
                    }
                    let idx1 = idx0 | tm;
                    let a0 = v[idx0 as usize];
                    let a1 = v[idx1 as usize];
                    v[idx0 as usize] = mat[0][0] * a0 + mat[0][1] * a1;
                    v[idx1 as usize] = mat[1][0] * a0 + mat[1][1] * a1;
                }
            }
            Amps::Sparse(m) => {
                let mut out = HashMap::with_capacity(m.len() * 2);
                for (&idx, &amp) in m.iter() {
                    if idx & cm != cm {
                        out.insert(idx, amp);
                        continue;
                    }
                    let idx0 = idx & !tm;
                    let idx1 = idx | tm;
                    // both partners read from the old map, so visiting a pair
                    // twice writes the same values twice
                    let a0 = m.get(&idx0).copied().unwrap_or(Complex64::ZERO);
                    let a1 = m.get(&idx1).copied().unwrap_or(Complex64::ZERO);
                    let n0 = mat[0][0] * a0 + mat[0][1] * a1;
                    let n1 = mat[1][0] * a0 + mat[1][1] * a1;
                    if n0.norm() > PRUNE_THRESHOLD {
                        out.insert(idx0, n0);
                    }
                    if n1.norm() > PRUNE_THRESHOLD {
                        out.insert(idx1, n1);
                    }
                }
                *m = out;
            }
        }
    }

    /// Apply every gate of `c` in order.
    pub fn apply_circuit(&mut self, c: &Circuit) {
        assert_eq!(c.qubit_count, self.qubit_count, "circuit width mismatch");
        for gate in &c.gates {
            self.apply_gate(gate);
        }
    }

    /// Condition on a register holding `value` (a bitstring of the register
    /// width). Returns the renormalized state and the probability mass of
    /// the event; zero mass is an error rather than a division by zero.
    pub fn postselect(&self, reg: &Register, value: &str) -> Result<(QuantumState, f64)> {
        if value.len() != reg.size {
            return Err(Error::DimensionMismatch(format!(
                "postselect value has {} bits, register {:?} has {}",
                value.len(),
                reg.name,
                reg.size
            )));
        }
        let want = index_of_bitstring(value)?;
        let shift = self.qubit_count - (reg.offset + reg.size);
        let mask = ((1u64 << reg.size) - 1) << shift;
        let selected = want << shift;

        let mut mass = 0.0;
        let mut kept: Vec<(u64, Complex64)> = Vec::new();
        match &self.amps {
            Amps::Dense(v) => {
                for (idx, amp) in v.iter().enumerate() {
                    if (idx as u64) & mask == selected {
                        mass += amp.norm_sqr();
                        if amp.norm_sqr() > 0.0 {
                            kept.push((idx as u64, *amp));
                        }
                    }
                }
            }
            Amps::Sparse(m) => {
                for (&idx, &amp) in m.iter() {
                    if idx & mask == selected {
                        mass += amp.norm_sqr();
                        kept.push((idx, amp));
                    }
                }
            }
        }
        if mass <= 0.0 {
            return Err(Error::ZeroPostselection);
        }
        let scale = 1.0 / mass.sqrt();
        let amps = match &self.amps {
            Amps::Dense(_) => {
                let mut v = vec![Complex64::ZERO; 1usize << self.qubit_count];
                for (idx, amp) in kept {
                    v[idx as usize] = amp * scale;
                }
                Amps::Dense(v)
            }
            Amps::Sparse(_) => {
                Amps::Sparse(kept.into_iter().map(|(idx, amp)| (idx, amp * scale)).collect())
            }
        };
        Ok((QuantumState { qubit_count: self.qubit_count, amps }, mass))
    }

    /// Marginal probability distribution over one register, keyed by the
    /// register-local basis index.
    pub fn register_distribution(&self, reg: &Register) -> BTreeMap<u64, f64> {
        let shift = self.qubit_count - (reg.offset + reg.size);
        let mask = (1u64 << reg.size) - 1;
        let mut dist = BTreeMap::new();
        for (idx, amp) in self.entries_sorted() {
            let key = (idx >> shift) & mask;
            *dist.entry(key).or_insert(0.0) += amp.norm_sqr();
        }
        dist
    }

    /// Full-state probability distribution keyed by basis index.
    pub fn distribution(&self) -> BTreeMap<u64, f64> {
        self.entries_sorted().into_iter().map(|(idx, a)| (idx, a.norm_sqr())).collect()
    }

    /// I.i.d. measurement shots in the computational basis. Deterministic
    /// for a fixed seed; the generator is ChaCha12, which is stable across
    /// platforms.
    pub fn sample(&self, shots: u64, seed: u64) -> MeasurementRecord {
        assert!(shots >= 1, "need at least one shot");
        let entries = self.entries_sorted();
        let mut cumulative = Vec::with_capacity(entries.len());
        let mut acc = 0.0;
        for (idx, amp) in &entries {
            acc += amp.norm_sqr();
            cumulative.push((*idx, acc));
        }
        let total = acc;
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut outcomes: BTreeMap<String, u64> = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = rng.random::<f64>() * total;
            let pos = cumulative.partition_point(|(_, c)| *c <= u);
            let idx = cumulative[pos.min(cumulative.len() - 1)].0;
            *outcomes.entry(bitstring_of_index(idx, self.qubit_count)).or_insert(0) += 1;
        }
        MeasurementRecord { shots, outcomes, seed }
    }

    /// Debug CSV dump `(bitstring, re, im)` sorted by bitstring.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("bitstring,re,im\n");
        for (idx, amp) in self.entries_sorted() {
            s.push_str(&format!(
                "{},{:.17e},{:.17e}\n",
                bitstring_of_index(idx, self.qubit_count),
                amp.re,
                amp.im
            ));
        }
        s
    }

    /// Largest per-amplitude deviation from `other` after removing a global
    /// phase (fixed on this state's largest amplitude).
    pub fn max_deviation_up_to_phase(&self, other: &QuantumState) -> f64 {
        assert_eq!(self.qubit_count, other.qubit_count);
        let reference = self
            .entries_sorted()
            .into_iter()
            .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()));
        let Some((ref_idx, ref_amp)) = reference else {
            return other.norm_sqr().sqrt();
        };
        let other_ref = other.amplitude(ref_idx);
        if other_ref.norm() == 0.0 {
            return ref_amp.norm();
        }
        let phase = (ref_amp / ref_amp.norm()) * (other_ref.conj() / other_ref.norm());
        // max over the union of supports
        let mut dev: f64 = 0.0;
        for (idx, amp) in self.entries_sorted() {
            dev = dev.max((amp - phase * other.amplitude(idx)).norm());
        }
        for (idx, amp) in other.entries_sorted() {
            dev = dev.max((self.amplitude(idx) - phase * amp).norm());
        }
        dev
    }
}

fn ry_matrix(theta: f64) -> [[Complex64; 2]; 2] {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

/// Run `c` from a basis-state label with the requested engine.
pub fn run_with(c: &Circuit, initial: &str, engine: Engine) -> Result<QuantumState> {
    let mut state = QuantumState::basis_from_bits(c.qubit_count, initial, engine)?;
    state.apply_circuit(c);
    debug_assert!(
        (state.norm_sqr() - 1.0).abs() < 1e-9,
        "norm drifted to {}",
        state.norm_sqr()
    );
    Ok(state)
}

/// Run `c` from a basis-state label with automatic engine selection.
pub fn run(c: &Circuit, initial: &str) -> Result<QuantumState> {
    run_with(c, initial, Engine::Auto)
}

/// Run `c` from the all-zeros state.
pub fn run_from_zeros(c: &Circuit) -> Result<QuantumState> {
    run(c, &"0".repeat(c.qubit_count))
}

/// Total-variation distance between two distributions over basis indices.
pub fn tv_distance(p: &BTreeMap<u64, f64>, q: &BTreeMap<u64, f64>) -> f64 {
    let mut keys: Vec<u64> = p.keys().chain(q.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    0.5 * keys
        .iter()
        .map(|k| (p.get(k).unwrap_or(&0.0) - q.get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

/// Measurement outcomes of repeated shots.
#[derive(Clone, Debug, Serialize)]
pub struct MeasurementRecord {
    pub shots: u64,
    pub outcomes: BTreeMap<String, u64>,
    pub seed: u64,
}

impl MeasurementRecord {
    /// CSV rendering `(bitstring, count)`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("bitstring,count\n");
        for (bits, count) in &self.outcomes {
            s.push_str(&format!("{bits},{count}\n"));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serialization cannot fail")
    }
}

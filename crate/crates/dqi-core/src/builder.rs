//! Synthesis of the DQI pipeline stages and a definitional (formula-level)
//! oracle for the ideal state after each stage.
//!
//! Register layout (identical across stages): error register on qubits
//! `0..m`, syndrome register on qubits `m..m+n`. The unary convention is
//! `unary(k) = 1^k 0^(m-k)`, i.e. `k` ones in the lowest-index qubits.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;

use crate::circuit::{
    binomial, binomial_sum, ccry_exact_expansion, cry_expansion, Circuit, Gate, StageName,
};
use crate::error::{Error, Result};
use crate::f2linalg::{for_each_combination, mat_vec, rref_with_trace, BitMatrix, BitVector, RowOp};
use crate::instances::XorsatInstance;
use crate::simulator::{Engine, QuantumState};
use crate::weights::WeightVector;

/// Which decoding circuit the pipeline uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum DecoderKind {
    Gje,
    Lookup,
}

impl DecoderKind {
    pub fn stage(&self) -> StageName {
        match self {
            DecoderKind::Gje => StageName::GaussJordanElimination,
            DecoderKind::Lookup => StageName::LookupTable,
        }
    }
}

/// Default ceiling on `sum_{k<=ell} C(n,k)` for the lookup decoder.
pub const DEFAULT_LOOKUP_CAP: u64 = 4096;

/// Full pipeline description.
#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub instance: XorsatInstance,
    pub ell: usize,
    pub decoder: DecoderKind,
    pub lookup_cap: u64,
}

impl PipelineConfig {
    pub fn new(instance: XorsatInstance, ell: usize, decoder: DecoderKind) -> Self {
        Self { instance, ell, decoder, lookup_cap: DEFAULT_LOOKUP_CAP }
    }

    pub fn m(&self) -> usize {
        self.instance.m()
    }

    pub fn n(&self) -> usize {
        self.instance.n()
    }

    pub fn qubit_count(&self) -> usize {
        self.m() + self.n()
    }
}

/// Empty circuit with the standard error/syndrome register layout.
pub fn pipeline_circuit(m: usize, n: usize) -> Circuit {
    Circuit::with_registers(&[("error", m), ("syndrome", n)])
}

/// The bitstring `1^k 0^(m-k)` padded to the full register width.
pub fn unary_label(k: usize, m: usize, n: usize) -> String {
    let mut s = String::with_capacity(m + n);
    s.extend(std::iter::repeat('1').take(k));
    s.extend(std::iter::repeat('0').take(m - k + n));
    s
}

fn error_index(y: &BitVector, n: usize) -> u64 {
    y.as_index() << n
}

// ---------------------------------------------------------------------------
// Stage builders
// ---------------------------------------------------------------------------

/// Unary amplitude encoding: prepares `sum_k w_k |unary(k)>` on the error
/// register with an excitation chain of one RY plus `ell` controlled RYs
/// (expanded to 2ell+1 RY and 2ell CNOT).
///
/// When a prefix of `w` already carries all probability mass, the remaining
/// rotation angles are 0; the trailing controlled rotation always has angle
/// 0 and exists to keep the published gate counts.
pub fn build_uae(w: &WeightVector, m: usize, n: usize) -> Circuit {
    let ell = w.ell();
    assert!(ell <= m, "degree must not exceed the register size");
    let mut c = pipeline_circuit(m, n);
    if ell == 0 {
        return c;
    }

    // residual mass sqrt(sum_{j>=k} w_j^2) ahead of each rotation
    let mut residual = vec![0.0; ell + 2];
    for k in (0..=ell).rev() {
        residual[k] = (residual[k + 1] * residual[k + 1] + w.w[k] * w.w[k]).sqrt();
    }
    let angle = |k: usize| -> f64 {
        if residual[k] < 1e-300 {
            0.0
        } else {
            2.0 * (w.w[k] / residual[k]).clamp(-1.0, 1.0).acos()
        }
    };

    c.push(Gate::Ry(0, angle(0)));
    for k in 1..=ell {
        if k == m {
            // unary(m) is all-ones; there is no qubit m to rotate and the
            // angle is forced to 0 anyway
            break;
        }
        c.extend(cry_expansion(k - 1, k, angle(k)));
    }
    c
}

/// The split-block angle: rotation by `-2 arccos(sqrt(s/l))` realizes the
/// amplitude split `sqrt(s/l) |stay> + sqrt(1 - s/l) |shift>`.
fn split_angle(s: usize, l: usize) -> f64 {
    -2.0 * ((s as f64 / l as f64).sqrt().clamp(-1.0, 1.0)).acos()
}

/// Two-qubit split block: an exact two-level rotation between `|01>` and
/// `|10>` on `(a, b)`, built as CNOT / controlled-RY / CNOT (4 CNOT + 2 RY
/// once expanded).
fn scs2(c: &mut Circuit, a: usize, b: usize, theta: f64) {
    c.push(Gate::Cnot { control: b, target: a });
    c.extend(cry_expansion(a, b, theta));
    c.push(Gate::Cnot { control: b, target: a });
}

/// Three-qubit split block: an exact two-level rotation between `|011>` and
/// `|110>` on `(x, y, z)`, built as CNOT / doubly-controlled-RY / CNOT
/// (10 CNOT + 6 RY once expanded).
fn scs3(c: &mut Circuit, x: usize, y: usize, z: usize, theta: f64) {
    c.push(Gate::Cnot { control: z, target: x });
    c.extend(ccry_exact_expansion(x, y, z, theta));
    c.push(Gate::Cnot { control: z, target: x });
}

/// Compact form of the three-qubit split block with the doubly-controlled
/// rotation kept atomic; transpiling it into the rotation basis yields the
/// 4-CNOT + 3-RY realization.
pub fn scs3_compact(x: usize, y: usize, z: usize, theta: f64) -> Vec<Gate> {
    vec![
        Gate::Cnot { control: z, target: x },
        Gate::CCRy { control1: x, control2: y, target: z, theta },
        Gate::Cnot { control: z, target: x },
    ]
}

/// One split-cycle-split stage acting on the window of `span` qubits
/// starting at `offset`, with excitation budget `h`.
fn scs_stage(c: &mut Circuit, offset: usize, span: usize, h: usize) {
    scs2(c, offset + 1, offset, split_angle(1, span));
    for l in 2..=h {
        scs3(c, offset + l, offset + l - 1, offset, split_angle(l, span));
    }
}

/// Dicke preparation: maps `unary(k)` to the Dicke state `|D(m,k)>` for
/// every `k <= ell`. Built as the inductive split-block cascade: stages of
/// budget `ell` descending over windows `m, m-1, ..., ell+1`, then stages of
/// shrinking budget over windows `ell, ..., 2`.
pub fn build_dicke(m: usize, ell: usize, n: usize) -> Circuit {
    assert!(ell <= m, "require ell <= m");
    let mut c = pipeline_circuit(m, n);
    if ell == 0 {
        return c;
    }
    for span in (ell + 1..=m).rev() {
        scs_stage(&mut c, m - span, span, ell);
    }
    for span in (2..=ell).rev() {
        scs_stage(&mut c, m - span, span, span - 1);
    }
    c
}

/// Phase encoding: a Z on error qubit `j` for every `v_j = 1`.
pub fn build_phase(v: &BitVector, n: usize) -> Circuit {
    let m = v.len();
    let mut c = pipeline_circuit(m, n);
    for j in 0..m {
        if v.get(j) {
            c.push(Gate::Z(j));
        }
    }
    c
}

/// Constraint encoding: computes `|y>|0> -> |y>|B^T y>` with one CNOT per
/// 1-entry of `B`, control on error qubit `j`, target on syndrome qubit `i`
/// for `B^T[i][j] = 1`.
pub fn build_constraint(b: &BitMatrix) -> Circuit {
    let (m, n) = (b.rows(), b.cols());
    let mut c = pipeline_circuit(m, n);
    for i in 0..n {
        for j in 0..m {
            if b.get(j, i) {
                c.push(Gate::Cnot { control: j, target: m + i });
            }
        }
    }
    c
}

/// Gauss-Jordan decoder: compiles the classical elimination trace of `B^T`
/// to SWAP/CNOT on the syndrome register, uncomputes the error register
/// through the pivots, then replays the inverse trace so the syndrome
/// register ends back in `|B^T y>`.
///
/// For full-column-rank `B^T` the net action on `|y>|B^T y>` is
/// `|0>|B^T y>` for every `y`; rank deficiency leaves the unrecoverable
/// errors' residuals in the error register.
pub fn build_gje_decoder(b: &BitMatrix) -> Circuit {
    let (m, n) = (b.rows(), b.cols());
    let mut c = pipeline_circuit(m, n);
    let rref = rref_with_trace(&b.transpose());

    let op_gate = |op: &RowOp| match *op {
        RowOp::Swap(i, j) => Gate::Swap(m + i, m + j),
        RowOp::AddRow { src, dst } => Gate::Cnot { control: m + src, target: m + dst },
    };

    for op in &rref.trace.ops {
        c.push(op_gate(op));
    }
    for (row, col) in rref.pivots() {
        c.push(Gate::Cnot { control: m + row, target: col });
    }
    for op in &rref.trace.inverse().ops {
        c.push(op_gate(op));
    }
    c
}

/// The classical syndrome-to-error table behind the lookup decoder.
#[derive(Clone, Debug)]
pub struct LookupTable {
    /// Keyed by the syndrome bitstring read as a binary number.
    pub entries: BTreeMap<u64, BitVector>,
    /// Number of weight-bounded error patterns whose syndrome was already
    /// claimed by a smaller pattern.
    pub collisions: usize,
}

/// Precompute the decode table over all error patterns of weight `<= ell`.
/// A syndrome claimed by several patterns keeps the minimum-weight one,
/// ties broken by the lexicographically smallest bitstring.
pub fn lookup_table(b: &BitMatrix, ell: usize) -> LookupTable {
    let m = b.rows();
    let bt = b.transpose();
    let mut entries: BTreeMap<u64, BitVector> = BTreeMap::new();
    let mut collisions = 0;
    for weight in 0..=ell.min(m) {
        for_each_combination(m, weight, |idx| {
            let mut y = BitVector::zeros(m);
            for &i in idx {
                y.set(i, true);
            }
            let s = mat_vec(&bt, &y).expect("dimensions fixed by construction");
            let key = s.as_index();
            match entries.get(&key) {
                None => {
                    entries.insert(key, y);
                }
                Some(existing) => {
                    collisions += 1;
                    // earlier weights win; within a weight keep the smaller string
                    if existing.weight() == weight && y.as_index() < existing.as_index() {
                        entries.insert(key, y);
                    }
                }
            }
        });
    }
    LookupTable { entries, collisions }
}

/// Lookup-table decoder: for every syndrome/error pair, X-conjugation turns
/// the syndrome's zero bits into ones so that multi-controlled X gates over
/// the full syndrome register can flip exactly the error bits of the stored
/// pattern.
pub fn build_lookup_decoder(b: &BitMatrix, ell: usize, cap: u64) -> Result<(Circuit, LookupTable)> {
    let (m, n) = (b.rows(), b.cols());
    let pattern_count = binomial_sum(n, ell);
    if pattern_count > cap {
        return Err(Error::Infeasible(format!(
            "lookup table needs {pattern_count} syndrome patterns, cap is {cap}"
        )));
    }
    let table = lookup_table(b, ell);
    let mut c = pipeline_circuit(m, n);
    let syndrome_qubits: Vec<usize> = (m..m + n).collect();
    for (&key, y) in &table.entries {
        if y.is_zero() {
            continue;
        }
        let zero_bits: Vec<usize> =
            (0..n).filter(|&i| (key >> (n - 1 - i)) & 1 == 0).map(|i| m + i).collect();
        for &q in &zero_bits {
            c.push(Gate::X(q));
        }
        for j in y.ones_indices() {
            c.push(Gate::Mcx { controls: syndrome_qubits.clone(), target: j });
        }
        for &q in &zero_bits {
            c.push(Gate::X(q));
        }
    }
    Ok((c, table))
}

/// Hadamard transform: one H per syndrome qubit, depth 1.
pub fn build_hadamard(m: usize, n: usize) -> Circuit {
    let mut c = pipeline_circuit(m, n);
    for i in 0..n {
        c.push(Gate::H(m + i));
    }
    c
}

/// The per-stage circuits of one pipeline, plus their composition.
#[derive(Clone, Debug)]
pub struct StageCircuits {
    pub uae: Circuit,
    pub dicke: Circuit,
    pub phase: Circuit,
    pub constraint: Circuit,
    pub decode: Circuit,
    pub hadamard: Circuit,
    pub full: Circuit,
    pub lookup: Option<LookupTable>,
}

impl StageCircuits {
    pub fn build(cfg: &PipelineConfig, w: &WeightVector) -> Result<Self> {
        let (m, n) = (cfg.m(), cfg.n());
        let uae = build_uae(w, m, n);
        let dicke = build_dicke(m, cfg.ell, n);
        let phase = build_phase(&cfg.instance.v, n);
        let constraint = build_constraint(&cfg.instance.b);
        let (decode, lookup) = match cfg.decoder {
            DecoderKind::Gje => (build_gje_decoder(&cfg.instance.b), None),
            DecoderKind::Lookup => {
                let (c, t) = build_lookup_decoder(&cfg.instance.b, cfg.ell, cfg.lookup_cap)?;
                (c, Some(t))
            }
        };
        let hadamard = build_hadamard(m, n);
        let mut full = pipeline_circuit(m, n);
        for stage in [&uae, &dicke, &phase, &constraint, &decode, &hadamard] {
            full.append_circuit(stage);
        }
        Ok(Self { uae, dicke, phase, constraint, decode, hadamard, full, lookup })
    }

    /// Stage circuits in execution order with their names.
    pub fn ordered(&self, decoder: DecoderKind) -> Vec<(StageName, &Circuit)> {
        vec![
            (StageName::UnaryAmplitudeEncoding, &self.uae),
            (StageName::DickeStatePreparation, &self.dicke),
            (StageName::PhaseEncoding, &self.phase),
            (StageName::ConstraintEncoding, &self.constraint),
            (decoder.stage(), &self.decode),
            (StageName::HadamardTransform, &self.hadamard),
        ]
    }
}

// ---------------------------------------------------------------------------
// Definitional oracle
// ---------------------------------------------------------------------------

/// Pipeline checkpoints for the definitional oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleStage {
    AfterUae,
    AfterDicke,
    AfterPhase,
    AfterConstraint,
    AfterDecode,
    AfterHadamard,
}

impl OracleStage {
    pub const ALL: [OracleStage; 6] = [
        OracleStage::AfterUae,
        OracleStage::AfterDicke,
        OracleStage::AfterPhase,
        OracleStage::AfterConstraint,
        OracleStage::AfterDecode,
        OracleStage::AfterHadamard,
    ];
}

/// The decoder's classical action, used by the oracle to model both the
/// decoded branch and the residual branches of unrecoverable errors.
#[derive(Clone, Debug)]
pub enum DecoderModel {
    Gje { reduced: BitMatrix, pivots: Vec<(usize, usize)> },
    Lookup { table: BTreeMap<u64, BitVector> },
}

impl DecoderModel {
    pub fn for_config(cfg: &PipelineConfig) -> DecoderModel {
        match cfg.decoder {
            DecoderKind::Gje => {
                let rref = rref_with_trace(&cfg.instance.b.transpose());
                DecoderModel::Gje { reduced: rref.reduced.clone(), pivots: rref.pivots() }
            }
            DecoderKind::Lookup => {
                DecoderModel::Lookup { table: lookup_table(&cfg.instance.b, cfg.ell).entries }
            }
        }
    }

    /// The error register content after decoding `|y>|B^T y>`; zero iff the
    /// decoder recovers `y` exactly.
    pub fn residual(&self, y: &BitVector, syndrome: &BitVector) -> BitVector {
        match self {
            DecoderModel::Gje { reduced, pivots } => {
                let gy = mat_vec(reduced, y).expect("dimensions fixed by construction");
                let mut out = y.clone();
                for &(row, col) in pivots {
                    if gy.get(row) {
                        out.set(col, !out.get(col));
                    }
                }
                out
            }
            DecoderModel::Lookup { table } => {
                let mut out = y.clone();
                if let Some(pattern) = table.get(&syndrome.as_index()) {
                    out.xor_assign(pattern);
                }
                out
            }
        }
    }
}

/// Construct, directly from the stage formulas (no gates), the exact state
/// at a pipeline checkpoint. Exhaustive over the `sum_{k<=ell} C(m,k)`
/// weight-bounded error patterns; intended for `m <= 20`.
pub fn definitional_oracle_stage(
    cfg: &PipelineConfig,
    w: &WeightVector,
    stage: OracleStage,
) -> QuantumState {
    let (m, n) = (cfg.m(), cfg.n());
    assert!(m <= 20, "oracle enumerates weight-bounded errors; m too large");
    let ell = cfg.ell;
    let bt = cfg.instance.b.transpose();
    let decoder = DecoderModel::for_config(cfg);
    let hadamard_scale = 1.0 / (1u64 << n) as f64;
    let mut amps: HashMap<u64, Complex64> = HashMap::new();

    for k in 0..=ell {
        let dicke_norm = 1.0 / (binomial(m, k) as f64).sqrt();
        for_each_combination(m, k, |idx| {
            let mut y = BitVector::zeros(m);
            for &i in idx {
                y.set(i, true);
            }
            match stage {
                OracleStage::AfterUae => {
                    // only the unary patterns appear
                    return;
                }
                OracleStage::AfterDicke => {
                    *amps.entry(error_index(&y, n)).or_insert(Complex64::ZERO) +=
                        Complex64::new(w.w[k] * dicke_norm, 0.0);
                }
                OracleStage::AfterPhase => {
                    let sign = if cfg.instance.v.dot(&y) { -1.0 } else { 1.0 };
                    *amps.entry(error_index(&y, n)).or_insert(Complex64::ZERO) +=
                        Complex64::new(sign * w.w[k] * dicke_norm, 0.0);
                }
                OracleStage::AfterConstraint
                | OracleStage::AfterDecode
                | OracleStage::AfterHadamard => {
                    let sign = if cfg.instance.v.dot(&y) { -1.0 } else { 1.0 };
                    let coeff = sign * w.w[k] * dicke_norm;
                    let s = mat_vec(&bt, &y).expect("dimensions fixed by construction");
                    let error_part = match stage {
                        OracleStage::AfterConstraint => y.clone(),
                        _ => decoder.residual(&y, &s),
                    };
                    let base = error_index(&error_part, n);
                    if stage == OracleStage::AfterHadamard {
                        let s_idx = s.as_index();
                        for x in 0..(1u64 << n) {
                            let sign_x =
                                if (s_idx & x).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                            *amps.entry(base | x).or_insert(Complex64::ZERO) +=
                                Complex64::new(coeff * sign_x * hadamard_scale.sqrt(), 0.0);
                        }
                    } else {
                        *amps.entry(base | s.as_index()).or_insert(Complex64::ZERO) +=
                            Complex64::new(coeff, 0.0);
                    }
                }
            }
        });
        if stage == OracleStage::AfterUae && k <= m {
            let idx = if k == 0 { 0 } else { (((1u64 << k) - 1) << (m - k)) << n };
            *amps.entry(idx).or_insert(Complex64::ZERO) += Complex64::new(w.w[k], 0.0);
        }
    }
    QuantumState::from_amplitudes(m + n, amps)
}

/// The final pre-measurement state per the stage formulas.
pub fn definitional_oracle(cfg: &PipelineConfig, w: &WeightVector) -> QuantumState {
    definitional_oracle_stage(cfg, w, OracleStage::AfterHadamard)
}

// ---------------------------------------------------------------------------
// Pipeline execution
// ---------------------------------------------------------------------------

/// Gate-level execution trace of the full pipeline.
#[derive(Debug)]
pub struct PipelineRun {
    /// Support of the state after each stage, in execution order.
    pub stage_support: Vec<(StageName, usize)>,
    pub final_state: QuantumState,
    pub max_support: usize,
}

/// Run the six stage circuits in order, tracking state support per stage.
pub fn run_pipeline(cfg: &PipelineConfig, w: &WeightVector, engine: Engine) -> Result<PipelineRun> {
    let stages = StageCircuits::build(cfg, w)?;
    let mut state =
        QuantumState::basis_from_bits(cfg.qubit_count(), &unary_label(0, cfg.m(), cfg.n()), engine)?;
    let mut stage_support = Vec::new();
    let mut max_support = 0;
    for (name, circuit) in stages.ordered(cfg.decoder) {
        state.apply_circuit(circuit);
        let support = state.support();
        max_support = max_support.max(support);
        stage_support.push((name, support));
    }
    Ok(PipelineRun { stage_support, final_state: state, max_support })
}

/// Postselect the error register on all-zeros and marginalize onto the
/// syndrome register. Returns the solution distribution keyed by the
/// assignment bitstring index and the postselection probability.
pub fn postselected_solution_distribution(
    state: &QuantumState,
    m: usize,
    n: usize,
) -> Result<(BTreeMap<u64, f64>, f64)> {
    let error_reg = crate::circuit::Register::new("error", 0, m);
    let (post, prob) = state.postselect(&error_reg, &"0".repeat(m))?;
    let syndrome_reg = crate::circuit::Register::new("syndrome", m, n);
    Ok((post.register_distribution(&syndrome_reg), prob))
}

/// Average satisfied fraction `<s>/m` of a solution distribution.
pub fn measured_satisfied_fraction(
    inst: &XorsatInstance,
    dist: &BTreeMap<u64, f64>,
) -> f64 {
    let m = inst.m() as f64;
    dist.iter()
        .map(|(&x, &p)| {
            let xv = crate::instances::index_to_bitvector(x, inst.n());
            p * crate::instances::satisfied_count(inst, &xv) as f64
        })
        .sum::<f64>()
        / m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;
    use crate::instances::MaxCutGraph;
    use crate::simulator::{index_of_bitstring, run, run_from_zeros};
    use crate::weights::xorsat_weights;

    #[test]
    fn uae_counts_match_table() {
        for ell in 1..=3 {
            let w = xorsat_weights(6, ell).unwrap();
            let c = build_uae(&w, 6, 1);
            let r = c.count_gates("uae");
            assert_eq!(r.count(GateKind::Ry), (2 * ell + 1) as u64, "ell={ell}");
            assert_eq!(r.count(GateKind::Cnot), (2 * ell) as u64, "ell={ell}");
            assert_eq!(c.depth(), 3 * ell + 1, "ell={ell}");
        }
    }

    #[test]
    fn uae_trivial_weights_are_identity() {
        let w = WeightVector { w: vec![1.0, 0.0], eigenvalue: 0.0 };
        let c = build_uae(&w, 3, 0);
        let s = run_from_zeros(&c).unwrap();
        assert!((s.amplitude(0).re - 1.0).abs() < 1e-12);
        // every rotation angle is 0
        for g in &c.gates {
            if let Gate::Ry(_, theta) = g {
                assert_eq!(*theta, 0.0);
            }
        }
    }

    #[test]
    fn uae_equal_weights_single_split() {
        let w = WeightVector { w: vec![0.5f64.sqrt(), 0.5f64.sqrt()], eigenvalue: 0.0 };
        let c = build_uae(&w, 4, 0);
        let s = run_from_zeros(&c).unwrap();
        let v = 0.5f64.sqrt();
        assert!((s.amplitude(index_of_bitstring("0000").unwrap()).re - v).abs() < 1e-12);
        assert!((s.amplitude(index_of_bitstring("1000").unwrap()).re - v).abs() < 1e-12);
    }

    #[test]
    fn uae_matches_oracle_amplitudes() {
        let w = xorsat_weights(5, 2).unwrap();
        let c = build_uae(&w, 5, 0);
        let s = run_from_zeros(&c).unwrap();
        assert!((s.amplitude(index_of_bitstring("00000").unwrap()).re - w.w[0]).abs() < 1e-10);
        assert!((s.amplitude(index_of_bitstring("10000").unwrap()).re - w.w[1]).abs() < 1e-10);
        assert!((s.amplitude(index_of_bitstring("11000").unwrap()).re - w.w[2]).abs() < 1e-10);
        assert_eq!(s.support(), 3);
    }

    #[test]
    fn dicke_m3_k1_uniform() {
        let c = build_dicke(3, 1, 0);
        let s = run(&c, "100").unwrap();
        let v = (1.0f64 / 3.0).sqrt();
        for bits in ["100", "010", "001"] {
            let a = s.amplitude(index_of_bitstring(bits).unwrap());
            assert!((a.re - v).abs() < 1e-10, "|{bits}>: {a}");
        }
    }

    #[test]
    fn dicke_m4_k2_uniform() {
        let c = build_dicke(4, 2, 0);
        let s = run(&c, "1100").unwrap();
        let v = (1.0f64 / 6.0).sqrt();
        let mut seen = 0;
        for idx in 0..16u64 {
            let a = s.amplitude(idx);
            if idx.count_ones() == 2 {
                assert!((a.re - v).abs() < 1e-10, "index {idx}: {a}");
                seen += 1;
            } else {
                assert!(a.norm() < 1e-10, "index {idx} should be empty: {a}");
            }
        }
        assert_eq!(seen, 6);
    }

    #[test]
    fn dicke_counts_m5_ell2() {
        let c = build_dicke(5, 2, 0);
        let r = c.count_gates("dicke");
        assert_eq!(r.count(GateKind::Cnot), 46);
        assert_eq!(r.count(GateKind::Ry), 26);
    }

    #[test]
    fn dicke_ell0_empty() {
        assert!(build_dicke(4, 0, 0).is_empty());
    }

    #[test]
    fn phase_encoding_flips_marked() {
        let v = BitVector::from_bits(&[0, 1, 0]);
        let c = build_phase(&v, 0);
        assert_eq!(c.len(), 1);
        let mut probe = Circuit::new(3);
        probe.push(Gate::X(1));
        probe.append_circuit(&c);
        let s = run_from_zeros(&probe).unwrap();
        assert!((s.amplitude(index_of_bitstring("010").unwrap()).re + 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_encoding_empty_and_full() {
        assert!(build_phase(&BitVector::zeros(4), 0).is_empty());
        let c = build_phase(&BitVector::ones(4), 0);
        assert_eq!(c.len(), 4);
        assert_eq!(c.depth(), 1);
    }

    #[test]
    fn constraint_identity_copies() {
        let b = BitMatrix::identity(3);
        let c = build_constraint(&b);
        assert_eq!(c.len(), 3);
        for y_idx in 0..8u64 {
            let label = format!("{}000", crate::simulator::bitstring_of_index(y_idx, 3));
            let s = run(&c, &label).unwrap();
            let expect = (y_idx << 3) | y_idx;
            assert!((s.amplitude(expect).re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constraint_zero_rows_empty() {
        // B with no ones produces no gates (not a legal instance, but the
        // builder is total)
        let b = BitMatrix::zeros(2, 2);
        assert!(build_constraint(&b).is_empty());
    }

    #[test]
    fn constraint_matches_mat_vec_on_paper_instance() {
        let inst = XorsatInstance::paper_6bit();
        let c = build_constraint(&inst.b);
        assert_eq!(c.len() as usize, inst.b.count_ones());
        let bt = inst.b.transpose();
        let y = BitVector::unit(6, 1);
        let s_expect = mat_vec(&bt, &y).unwrap();
        let label = format!("{y}{}", "0".repeat(6));
        let s = run(&c, &label).unwrap();
        let expect_idx = (y.as_index() << 6) | s_expect.as_index();
        assert!((s.amplitude(expect_idx).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gje_identity_is_uncompute_only() {
        let b = BitMatrix::identity(4);
        let c = build_gje_decoder(&b);
        assert_eq!(c.len(), 4);
        assert!(c.gates.iter().all(|g| matches!(g, Gate::Cnot { .. })));
    }

    #[test]
    fn gje_clears_error_register_for_invertible_b() {
        // fixed invertible 5x5
        let b = BitMatrix::from_rows(&[
            vec![1, 1, 0, 0, 1],
            vec![0, 1, 1, 0, 0],
            vec![0, 0, 1, 1, 0],
            vec![1, 0, 0, 1, 0],
            vec![0, 0, 0, 1, 1],
        ]);
        assert_eq!(b.rank(), 5);
        let constraint = build_constraint(&b);
        let decode = build_gje_decoder(&b);
        let bt = b.transpose();
        for y_idx in 0..32u64 {
            let y = crate::instances::index_to_bitvector(y_idx, 5);
            let mut full = pipeline_circuit(5, 5);
            full.append_circuit(&constraint);
            full.append_circuit(&decode);
            let label = format!("{y}{}", "0".repeat(5));
            let s = run(&full, &label).unwrap();
            let expect = mat_vec(&bt, &y).unwrap().as_index();
            assert!(
                (s.amplitude(expect).re - 1.0).abs() < 1e-9,
                "y = {y}: error register not cleared or syndrome not restored"
            );
        }
    }

    #[test]
    fn lookup_identity_3x3() {
        let b = BitMatrix::identity(3);
        let (c, table) = build_lookup_decoder(&b, 1, 64).unwrap();
        assert_eq!(table.entries.len(), 4); // zero plus three unit patterns
        assert_eq!(table.collisions, 0);
        // each nonzero entry: one MCX plus X-conjugation on the two zero bits
        let r = c.count_gates("lookup");
        assert_eq!(r.count(GateKind::Mcx), 3);
        assert_eq!(r.count(GateKind::X), 12);
        let constraint = build_constraint(&b);
        for y_idx in [0u64, 1, 2, 4] {
            let y = crate::instances::index_to_bitvector(y_idx, 3);
            let mut full = pipeline_circuit(3, 3);
            full.append_circuit(&constraint);
            full.append_circuit(&c);
            let label = format!("{y}000");
            let s = run(&full, &label).unwrap();
            assert!((s.amplitude(y_idx).re - 1.0).abs() < 1e-9, "y = {y}");
        }
    }

    #[test]
    fn lookup_cap_enforced() {
        let b = BitMatrix::identity(8);
        assert!(matches!(build_lookup_decoder(&b, 2, 10), Err(Error::Infeasible(_))));
    }

    #[test]
    fn lookup_counts_within_bounds() {
        let g = MaxCutGraph::cycle(5);
        let inst = crate::instances::maxcut_to_xorsat(&g).unwrap();
        let (c, _) = build_lookup_decoder(&inst.b, 2, 4096).unwrap();
        let r = c.count_gates("lookup");
        assert!(r.count(GateKind::X) <= 160);
        assert!(r.count(GateKind::Mcx) <= 80);
    }

    #[test]
    fn hadamard_stage_shape() {
        let c = build_hadamard(2, 6);
        assert_eq!(c.len(), 6);
        assert_eq!(c.depth(), 1);
        let mut twice = c.clone();
        twice.append_circuit(&c);
        let s = run_from_zeros(&twice).unwrap();
        assert!((s.amplitude(0).re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn unary_labels() {
        assert_eq!(unary_label(0, 4, 2), "000000");
        assert_eq!(unary_label(2, 4, 2), "110000");
    }

    #[test]
    fn oracle_uae_stage_is_unary_superposition() {
        let g = MaxCutGraph::cycle(5);
        let inst = crate::instances::maxcut_to_xorsat(&g).unwrap();
        let w = xorsat_weights(5, 2).unwrap();
        let cfg = PipelineConfig::new(inst, 2, DecoderKind::Gje);
        let st = definitional_oracle_stage(&cfg, &w, OracleStage::AfterUae);
        assert_eq!(st.support(), 3);
        let idx = index_of_bitstring(&unary_label(1, 5, 5)).unwrap();
        assert!((st.amplitude(idx).re - w.w[1]).abs() < 1e-12);
    }

    #[test]
    fn oracle_invertible_all_recoverable() {
        let b = BitMatrix::from_rows(&[
            vec![1, 1, 0, 0, 1],
            vec![0, 1, 1, 0, 0],
            vec![0, 0, 1, 1, 0],
            vec![1, 0, 0, 1, 0],
            vec![0, 0, 0, 1, 1],
        ]);
        let inst = XorsatInstance::new(b, BitVector::ones(5)).unwrap();
        let cfg = PipelineConfig::new(inst, 2, DecoderKind::Gje);
        let w = xorsat_weights(5, 2).unwrap();
        let st = definitional_oracle_stage(&cfg, &w, OracleStage::AfterDecode);
        // all mass on error register zero
        for (idx, amp) in st.entries_sorted() {
            assert!(idx >> 5 == 0 || amp.norm() < 1e-12, "residual branch at {idx}");
        }
    }
}

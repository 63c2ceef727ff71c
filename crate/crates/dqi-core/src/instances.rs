//! Max-XORSAT instances, the MaxCut reduction, and classical ground truth.
//!
//! An instance is a pair `(B, v)` with `B` an `m x n` binary matrix and
//! `v` an `m`-bit vector; the objective counts satisfied minus unsatisfied
//! constraints: `f(x) = sum_i (-1)^(v_i + b_i . x)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2linalg::{BitMatrix, BitVector};

/// A Max-XORSAT instance over GF(2). `p` and `r` are fixed to 2 and 1.
#[derive(Clone, Debug)]
pub struct XorsatInstance {
    pub b: BitMatrix,
    pub v: BitVector,
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    m: usize,
    n: usize,
    #[serde(rename = "B")]
    b: Vec<Vec<u8>>,
    v: Vec<u8>,
}

impl XorsatInstance {
    pub fn new(b: BitMatrix, v: BitVector) -> Result<Self> {
        if v.len() != b.rows() {
            return Err(Error::InvalidInstance(format!(
                "v has length {}, expected m = {}",
                v.len(),
                b.rows()
            )));
        }
        for r in 0..b.rows() {
            if b.row_weight(r) == 0 {
                return Err(Error::InvalidInstance(format!("row {r} of B is all-zero")));
            }
        }
        Ok(Self { b, v })
    }

    /// Number of constraints (rows of `B`).
    pub fn m(&self) -> usize {
        self.b.rows()
    }

    /// Number of variables (columns of `B`).
    pub fn n(&self) -> usize {
        self.b.cols()
    }

    /// Parse the instance JSON format
    /// `{"m": int, "n": int, "B": [[0|1,...],...], "v": [0|1,...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: InstanceJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("instance json: {e}")))?;
        if raw.b.len() != raw.m {
            return Err(Error::Parse(format!(
                "B has {} rows, header says m = {}",
                raw.b.len(),
                raw.m
            )));
        }
        if raw.b.iter().any(|row| row.len() != raw.n) {
            return Err(Error::Parse(format!("every row of B must have n = {} entries", raw.n)));
        }
        if raw.v.len() != raw.m {
            return Err(Error::Parse(format!(
                "v has {} entries, header says m = {}",
                raw.v.len(),
                raw.m
            )));
        }
        if raw.b.iter().flatten().chain(raw.v.iter()).any(|&e| e > 1) {
            return Err(Error::Parse("entries of B and v must be 0 or 1".into()));
        }
        Self::new(BitMatrix::from_rows(&raw.b), BitVector::from_bits(&raw.v))
    }

    pub fn to_json(&self) -> String {
        let raw = InstanceJson {
            m: self.m(),
            n: self.n(),
            b: self.b.to_rows(),
            v: self.v.to_bits(),
        };
        serde_json::to_string_pretty(&raw).expect("instance serialization cannot fail")
    }

    /// The 6-bit worked example: a MaxCut instance on 6 vertices where the
    /// third variable appears in no constraint.
    pub fn paper_6bit() -> Self {
        let b = BitMatrix::from_rows(&[
            vec![1, 0, 0, 0, 0, 1],
            vec![1, 1, 0, 0, 0, 0],
            vec![0, 1, 0, 0, 1, 0],
            vec![0, 1, 0, 1, 0, 0],
            vec![0, 1, 0, 0, 0, 1],
            vec![0, 0, 0, 1, 0, 1],
        ]);
        Self::new(b, BitVector::ones(6)).expect("fixed instance is valid")
    }
}

/// A simple undirected graph for MaxCut.
#[derive(Clone, Debug)]
pub struct MaxCutGraph {
    pub vertex_count: usize,
    /// Edges `(u, w)` with `u < w`, no duplicates.
    pub edges: Vec<(usize, usize)>,
}

impl MaxCutGraph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        let mut normalized = Vec::with_capacity(edges.len());
        for (u, w) in edges {
            if u == w {
                return Err(Error::InvalidInstance(format!("self-loop at vertex {u}")));
            }
            if u >= vertex_count || w >= vertex_count {
                return Err(Error::InvalidInstance(format!(
                    "edge ({u}, {w}) out of range for {vertex_count} vertices"
                )));
            }
            let e = (u.min(w), u.max(w));
            if !seen.insert(e) {
                return Err(Error::InvalidInstance(format!("duplicate edge ({}, {})", e.0, e.1)));
            }
            normalized.push(e);
        }
        Ok(Self { vertex_count, edges: normalized })
    }

    /// Cycle graph `C_n`: vertices `0..n`, edges `(i, i+1 mod n)`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, edges).expect("cycle edges are valid")
    }

    /// Disjoint union of two graphs (vertex indices of `other` shifted).
    pub fn disjoint_union(&self, other: &MaxCutGraph) -> Self {
        let offset = self.vertex_count;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(u, w)| (u + offset, w + offset)));
        Self::new(self.vertex_count + other.vertex_count, edges).expect("shifted edges are valid")
    }

    /// Parse the edge-list text format: header `n_vertices n_edges`, then one
    /// `u w` pair per line, 0-indexed.
    pub fn parse_edgelist(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty edge list".into()))?;
        let mut parts = header.split_whitespace();
        let n: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad edge-list header".into()))?;
        let m: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad edge-list header".into()))?;
        let mut edges = Vec::with_capacity(m);
        for (i, line) in lines.enumerate() {
            let mut parts = line.split_whitespace();
            let u: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad edge on line {}", i + 2)))?;
            let w: usize = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad edge on line {}", i + 2)))?;
            edges.push((u, w));
        }
        if edges.len() != m {
            return Err(Error::Parse(format!(
                "header says {m} edges, found {}",
                edges.len()
            )));
        }
        Self::new(n, edges)
    }

    pub fn to_edgelist(&self) -> String {
        let mut s = format!("{} {}\n", self.vertex_count, self.edges.len());
        for (u, w) in &self.edges {
            s.push_str(&format!("{u} {w}\n"));
        }
        s
    }

    /// Number of edges crossing the partition encoded by `x`.
    pub fn cut_size(&self, x: &BitVector) -> usize {
        assert_eq!(x.len(), self.vertex_count);
        self.edges.iter().filter(|&&(u, w)| x.get(u) != x.get(w)).count()
    }
}

/// Reduce MaxCut to Max-XORSAT: one constraint `x_u + x_w = 1` per edge,
/// so `B` has one row per edge with two 1s and `v` is all-ones.
pub fn maxcut_to_xorsat(g: &MaxCutGraph) -> Result<XorsatInstance> {
    if g.edges.is_empty() {
        return Err(Error::InvalidInstance("graph has no edges".into()));
    }
    let mut b = BitMatrix::zeros(g.edges.len(), g.vertex_count);
    for (i, &(u, w)) in g.edges.iter().enumerate() {
        b.set(i, u, true);
        b.set(i, w, true);
    }
    XorsatInstance::new(b, BitVector::ones(g.edges.len()))
}

/// Objective value `f(x) = sum_i (-1)^(v_i + b_i . x)`, an integer in
/// `{-m, -m+2, ..., m}`. The satisfied-constraint count is `(f + m) / 2`.
pub fn objective(inst: &XorsatInstance, x: &BitVector) -> i64 {
    assert_eq!(x.len(), inst.n(), "objective: x must have n bits");
    let mut f = 0i64;
    for i in 0..inst.m() {
        let parity = inst.v.get(i) ^ inst.b.row(i).dot(x);
        f += if parity { -1 } else { 1 };
    }
    f
}

/// Number of satisfied constraints for assignment `x`.
pub fn satisfied_count(inst: &XorsatInstance, x: &BitVector) -> usize {
    ((objective(inst, x) + inst.m() as i64) / 2) as usize
}

/// Exhaustive objective table with maximum and argmax set.
#[derive(Clone, Debug)]
pub struct ObjectiveTable {
    /// `f[x]` indexed by the bitstring of `x` read as a binary number.
    pub f: Vec<i64>,
    pub max_value: i64,
    /// Basis indices achieving the maximum.
    pub argmax: Vec<u64>,
}

/// Enumerate `f` over all `2^n` assignments (requires `n <= 24`).
pub fn brute_force_optimum(inst: &XorsatInstance) -> ObjectiveTable {
    let n = inst.n();
    assert!(n <= 24, "brute force limited to n <= 24");
    let size = 1usize << n;
    let mut f = Vec::with_capacity(size);
    for idx in 0..size {
        let x = index_to_bitvector(idx as u64, n);
        f.push(objective(inst, &x));
    }
    let max_value = *f.iter().max().expect("table nonempty");
    let argmax = f
        .iter()
        .enumerate()
        .filter(|(_, &v)| v == max_value)
        .map(|(i, _)| i as u64)
        .collect();
    ObjectiveTable { f, max_value, argmax }
}

/// Bit `0` of the bitstring is the most significant bit of `idx`.
pub fn index_to_bitvector(idx: u64, n: usize) -> BitVector {
    let mut x = BitVector::zeros(n);
    for i in 0..n {
        if (idx >> (n - 1 - i)) & 1 == 1 {
            x.set(i, true);
        }
    }
    x
}

/// Expected fraction of satisfied constraints under optimal weights:
/// `(sqrt((l/m)(1 - r/p)) + sqrt((r/p)(1 - l/m)))^2` when `r/p <= 1 - l/m`,
/// and 1 otherwise.
pub fn expected_satisfied_fraction(m: usize, ell: usize, p: u32, r: u32) -> f64 {
    assert!(ell >= 1 && ell <= m);
    let lm = ell as f64 / m as f64;
    let rp = r as f64 / p as f64;
    if rp <= 1.0 - lm {
        let s = (lm * (1.0 - rp)).sqrt() + (rp * (1.0 - lm)).sqrt();
        s * s
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn triangle_reduction() {
        let g = MaxCutGraph::new(3, vec![(0, 1), (0, 2), (1, 2)]).unwrap();
        let inst = maxcut_to_xorsat(&g).unwrap();
        assert_eq!(inst.b.to_rows(), vec![vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]);
        assert_eq!(inst.v, BitVector::ones(3));
    }

    #[test]
    fn single_edge_reduction() {
        let g = MaxCutGraph::new(2, vec![(0, 1)]).unwrap();
        let inst = maxcut_to_xorsat(&g).unwrap();
        assert_eq!(inst.b.to_rows(), vec![vec![1, 1]]);
        assert_eq!(inst.v, BitVector::ones(1));
    }

    #[test]
    fn path_reduction() {
        let g = MaxCutGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let inst = maxcut_to_xorsat(&g).unwrap();
        assert_eq!(inst.b.to_rows(), vec![vec![1, 1, 0], vec![0, 1, 1]]);
    }

    #[test]
    fn duplicate_edges_rejected() {
        assert!(MaxCutGraph::new(3, vec![(0, 1), (1, 0)]).is_err());
        assert!(MaxCutGraph::new(3, vec![(1, 1)]).is_err());
    }

    #[test]
    fn objective_paper_instance_all_zero() {
        let inst = XorsatInstance::paper_6bit();
        let x = BitVector::zeros(6);
        // every term is (-1)^(1+0) = -1
        assert_eq!(objective(&inst, &x), -6);
    }

    #[test]
    fn objective_matches_cut_count() {
        let g = MaxCutGraph::new(3, vec![(0, 1), (0, 2), (1, 2)]).unwrap();
        let inst = maxcut_to_xorsat(&g).unwrap();
        let x = BitVector::from_bits(&[0, 1, 0]);
        assert_eq!(objective(&inst, &x), 2 * g.cut_size(&x) as i64 - 3);
        assert_eq!(objective(&inst, &x), 1);
    }

    #[test]
    fn maxcut_objective_complement_symmetric() {
        let g = MaxCutGraph::cycle(5);
        let inst = maxcut_to_xorsat(&g).unwrap();
        for idx in 0..32u64 {
            let x = index_to_bitvector(idx, 5);
            let not_x = index_to_bitvector(!idx & 31, 5);
            assert_eq!(objective(&inst, &x), objective(&inst, &not_x));
        }
    }

    #[test]
    fn brute_force_single_edge() {
        let g = MaxCutGraph::new(2, vec![(0, 1)]).unwrap();
        let table = brute_force_optimum(&maxcut_to_xorsat(&g).unwrap());
        assert_eq!(table.max_value, 1);
        // "01" = 1, "10" = 2
        assert_eq!(table.argmax, vec![1, 2]);
    }

    #[test]
    fn brute_force_triangle() {
        let g = MaxCutGraph::new(3, vec![(0, 1), (0, 2), (1, 2)]).unwrap();
        let table = brute_force_optimum(&maxcut_to_xorsat(&g).unwrap());
        // best cut is 2 of 3 edges: f = 2*2 - 3 = 1
        assert_eq!(table.max_value, 1);
        assert_eq!(table.argmax.len(), 6);
    }

    #[test]
    fn objective_sums_to_zero() {
        let table = brute_force_optimum(&XorsatInstance::paper_6bit());
        assert_eq!(table.f.iter().sum::<i64>(), 0);
    }

    #[test]
    fn eq7_values() {
        assert_eq!(expected_satisfied_fraction(6, 6, 2, 1), 1.0);
        let v = expected_satisfied_fraction(6, 2, 2, 1);
        let expected = ((1.0f64 / 6.0).sqrt() + (1.0f64 / 3.0).sqrt()).powi(2);
        assert_abs_diff_eq!(v, expected, epsilon = 1e-15);
        assert_abs_diff_eq!(v, 0.9714045207910317, epsilon = 1e-12);
        // boundary r/p = 1 - l/m gives exactly 1
        assert_abs_diff_eq!(expected_satisfied_fraction(6, 3, 2, 1), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(expected_satisfied_fraction(10, 2, 2, 1), 0.9, epsilon = 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let inst = XorsatInstance::paper_6bit();
        let parsed = XorsatInstance::from_json(&inst.to_json()).unwrap();
        assert_eq!(parsed.b, inst.b);
        assert_eq!(parsed.v, inst.v);
        assert!(XorsatInstance::from_json("{\"m\":1,\"n\":2,\"B\":[[0,0]],\"v\":[1]}").is_err());
    }

    #[test]
    fn edgelist_round_trip() {
        let g = MaxCutGraph::cycle(5);
        let parsed = MaxCutGraph::parse_edgelist(&g.to_edgelist()).unwrap();
        assert_eq!(parsed.edges, g.edges);
        assert!(MaxCutGraph::parse_edgelist("3 2\n0 1\n").is_err());
    }
}

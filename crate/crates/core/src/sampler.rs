//! Monte Carlo MBQC simulation: qubits carry single-qubit Bloch operators
//! inside growing cylinders, each diagonal gate is replaced by a sampled branch
//! of a separable decomposition, and measurements are sampled from the
//! resulting product operators.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomposer::{axis_decomposition, ProductBasis, SepDecomposition};
use crate::error::{Error, Result};
use crate::growth::{is_cyl_separable, is_identity_phase, lambda_of_phi, thermal_shrink, GrowthQuery};
use crate::pauli::{apply_gate, canonicalize_gate, product_matrix, BlochOp, CanonicalGate, DiagonalGate};
use crate::state_spaces::{cylinder_extremals, Cylinder, DEFAULT_N_ANGLES};

pub const DEFAULT_ETA: f64 = 1e-3;
/// Grid on which endpoint operators are snapped before decomposition (and cache lookup).
pub const QUANTUM: f64 = 1e-9;
/// Round-off allowance on the final radius in the admission test.
pub const ADMISSION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub id: u64,
    /// Explicit Bloch operator; takes precedence over `theta`/`azimuth`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bloch: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default)]
    pub azimuth: f64,
    /// Temperature; `null` or absent means a pure input.
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
}

impl NodeSpec {
    pub fn pure(id: u64, theta: f64, azimuth: f64) -> Self {
        Self { id, bloch: None, theta: Some(theta), azimuth, temperature: None }
    }

    pub fn input(&self) -> Result<BlochOp<f64>> {
        let op = match (self.bloch, self.theta) {
            (Some([x, y, z]), _) => BlochOp::new(x, y, z)?,
            (None, Some(theta)) => {
                if !theta.is_finite() || !self.azimuth.is_finite() {
                    return Err(Error::NonFinite);
                }
                BlochOp::pure(theta, self.azimuth)
            }
            (None, None) => return Err(Error::Graph(format!("node {} needs \"theta\" or \"bloch\"", self.id))),
        };
        Ok(match self.temperature {
            Some(t) => op.shrink(thermal_shrink(t)?),
            None => op,
        })
    }

    pub fn is_thermal(&self) -> bool {
        self.temperature.is_some_and(|t| t > 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub a: u64,
    pub b: u64,
    /// Canonical phase of `V_φ = diag(1, 1, 1, e^{iφ})`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    /// Raw diagonal phases `[φ1, φ2, φ3, φ4]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phis: Option<[f64; 4]>,
    /// Per-endpoint radius growth `[g_a, g_b]`; defaults to `λ(φ)` on both sides.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<[f64; 2]>,
}

impl EdgeSpec {
    pub fn canonical(a: u64, b: u64, phi: f64) -> Self {
        Self { a, b, phi: Some(phi), phis: None, growth: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub nodes: Vec<NodeSpec>,
    #[serde(default)]
    pub edges: Vec<EdgeSpec>,
}

/// A gate resolved to node indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreparedGate {
    pub a: usize,
    pub b: usize,
    pub raw: DiagonalGate<f64>,
    pub canonical: CanonicalGate<f64>,
    pub growth: (f64, f64),
}

/// Validated graph: node inputs by index and gates in canonical order.
#[derive(Debug, Clone)]
pub struct Instance {
    pub ids: Vec<u64>,
    pub inputs: Vec<BlochOp<f64>>,
    pub thermal: bool,
    pub gates: Vec<PreparedGate>,
}

impl Instance {
    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }

    pub fn degree(&self, n: usize) -> usize {
        self.gates.iter().filter(|g| g.a == n || g.b == n).count()
    }
}

impl GraphSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Resolve ids, canonicalize gates and sort the edge list.
    pub fn prepare(&self) -> Result<Instance> {
        let mut ids = Vec::with_capacity(self.nodes.len());
        let mut inputs = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            if ids.contains(&n.id) {
                return Err(Error::Graph(format!("duplicate node id {}", n.id)));
            }
            ids.push(n.id);
            inputs.push(n.input()?);
        }
        let index = |id: u64| ids.iter().position(|&x| x == id).ok_or_else(|| Error::Graph(format!("edge references unknown node {id}")));
        let mut gates = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            if e.a == e.b {
                return Err(Error::Graph(format!("self-loop on node {}", e.a)));
            }
            let raw = match (e.phi, e.phis) {
                (Some(phi), None) => DiagonalGate::from_phases([0.0, 0.0, 0.0, phi])?,
                (None, Some(p)) => DiagonalGate::from_phases(p)?,
                _ => return Err(Error::Graph(format!("edge {}-{} needs exactly one of \"phi\" or \"phis\"", e.a, e.b))),
            };
            let canonical = canonicalize_gate(&raw);
            let growth = match e.growth {
                None => {
                    let l = lambda_of_phi(canonical.phi);
                    (l, l)
                }
                Some([ga, gb]) => {
                    if !(ga > 0.0 && gb > 0.0) || !is_cyl_separable(&GrowthQuery::new(1.0 / ga, 1.0 / gb, canonical.phi)?) {
                        return Err(Error::Graph(format!("edge {}-{}: growth [{ga}, {gb}] is not cylinder separable", e.a, e.b)));
                    }
                    (ga, gb)
                }
            };
            gates.push(PreparedGate { a: index(e.a)?, b: index(e.b)?, raw, canonical, growth });
        }
        gates.sort_by_key(|g| (g.a.min(g.b), g.a.max(g.b)));
        let thermal = self.nodes.iter().any(NodeSpec::is_thermal);
        Ok(Instance { ids, inputs, thermal, gates })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Z,
    XY,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub qubit: u64,
    pub basis: Basis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    /// Prior step indices whose outcome bits are XORed; a 1 adds `π` to the angle.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flip_on: Vec<usize>,
}

impl Step {
    pub fn z(qubit: u64) -> Self {
        Self { qubit, basis: Basis::Z, angle: None, flip_on: Vec::new() }
    }

    pub fn xy(qubit: u64, angle: f64, flip_on: Vec<usize>) -> Self {
        Self { qubit, basis: Basis::XY, angle: Some(angle), flip_on }
    }

    /// Measurement axis given prior outcome bits.
    pub fn axis(&self, bits: &[u8]) -> ([f64; 3], Option<f64>) {
        match self.basis {
            Basis::Z => ([0.0, 0.0, 1.0], None),
            Basis::XY => {
                let flip = self.flip_on.iter().fold(0u8, |acc, &i| acc ^ bits[i]);
                let a = self.angle.unwrap_or(0.0) + if flip == 1 { std::f64::consts::PI } else { 0.0 };
                ([a.cos(), a.sin(), 0.0], Some(a))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementProgram {
    pub steps: Vec<Step>,
}

impl MeasurementProgram {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Check the program against an instance; returns node indices per step.
    pub fn resolve(&self, inst: &Instance) -> Result<Vec<usize>> {
        let mut used = vec![false; inst.ids.len()];
        let mut out = Vec::with_capacity(self.steps.len());
        for (k, s) in self.steps.iter().enumerate() {
            let n = inst.index_of(s.qubit).ok_or_else(|| Error::Program(format!("step {k}: unknown qubit {}", s.qubit)))?;
            if used[n] {
                return Err(Error::Program(format!("step {k}: qubit {} already measured", s.qubit)));
            }
            used[n] = true;
            match s.basis {
                Basis::Z if !s.flip_on.is_empty() => {
                    return Err(Error::Program(format!("step {k}: flip_on only applies to XY steps")));
                }
                Basis::XY => match s.angle {
                    Some(a) if a.is_finite() => {}
                    _ => return Err(Error::Program(format!("step {k}: XY step needs a finite angle"))),
                },
                Basis::Z => {}
            }
            if let Some(&bad) = s.flip_on.iter().find(|&&i| i >= k) {
                return Err(Error::Program(format!("step {k}: flip_on references step {bad}, which does not precede it")));
            }
            out.push(n);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeAdmission {
    pub id: u64,
    pub degree: usize,
    pub initial_radius: f64,
    pub final_radius: f64,
    /// `1 − final_radius`.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissionReport {
    pub accepted: bool,
    pub eta: f64,
    pub nodes: Vec<NodeAdmission>,
    pub violating: Vec<u64>,
}

/// Per-node budget check `r(n) · Π_{e∋n} g_e (1+η) ≤ 1`.
pub fn validate_run(inst: &Instance, eta: f64) -> Result<AdmissionReport> {
    if !(eta >= 0.0) {
        return Err(Error::InvalidArgument(format!("eta must be >= 0 (got {eta})")));
    }
    let mut final_r: Vec<f64> = inst.inputs.iter().map(|p| p.radius()).collect();
    for g in &inst.gates {
        if is_identity_phase(g.canonical.phi) {
            continue;
        }
        final_r[g.a] *= g.growth.0 * (1.0 + eta);
        final_r[g.b] *= g.growth.1 * (1.0 + eta);
    }
    let nodes: Vec<NodeAdmission> = (0..inst.ids.len())
        .map(|n| NodeAdmission {
            id: inst.ids[n],
            degree: inst.degree(n),
            initial_radius: inst.inputs[n].radius(),
            final_radius: final_r[n],
            slack: 1.0 - final_r[n],
        })
        .collect();
    let violating: Vec<u64> = nodes.iter().filter(|n| n.final_radius > 1.0 + ADMISSION_TOL).map(|n| n.id).collect();
    Ok(AdmissionReport { accepted: violating.is_empty(), eta, nodes, violating })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub eta: f64,
    pub n_angles: usize,
    /// LP slack for each gate decomposition.
    pub lp_eps: f64,
    /// Apply gates in reverse canonical order (for order-invariance checks).
    pub reverse_edges: bool,
    pub use_cache: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { eta: DEFAULT_ETA, n_angles: DEFAULT_N_ANGLES, lp_eps: 1e-9, reverse_edges: false, use_cache: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub qubit: u64,
    pub basis: Basis,
    /// Effective XY angle after adaptive flips.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    pub bit: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub seed: u64,
    pub shot: u64,
    pub outcomes: Vec<Outcome>,
    /// Gates resolved by sampling a decomposition branch.
    pub branches: usize,
    /// Largest number of terms among the decompositions sampled.
    pub max_terms: usize,
}

impl ShotRecord {
    /// Outcome bits in program order, e.g. `"010"`.
    pub fn bitstring(&self) -> String {
        self.outcomes.iter().map(|o| if o.bit == 0 { '0' } else { '1' }).collect()
    }
}

type CacheKey = [i64; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct FullKey {
    ops: CacheKey,
    phi: u64,
    ra: u64,
    rb: u64,
}

fn snap(v: f64) -> i64 {
    (v / QUANTUM).round() as i64
}

fn unsnap(q: i64) -> f64 {
    q as f64 * QUANTUM
}

/// Thread-safe memo of decompositions in the rotated frame.
#[derive(Debug, Default)]
pub struct DecompCache {
    map: RwLock<HashMap<FullKey, Arc<SepDecomposition<f64>>>>,
}

impl DecompCache {
    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Admitted instance plus program, ready to draw shots.
#[derive(Debug)]
pub struct Simulator {
    inst: Instance,
    prog: MeasurementProgram,
    targets: Vec<usize>,
    config: SamplerConfig,
    admission: AdmissionReport,
    cache: DecompCache,
}

impl Simulator {
    /// Refuses instances outside the admitted regime with [`Error::Rejected`].
    pub fn new(g: &GraphSpec, prog: &MeasurementProgram, config: SamplerConfig) -> Result<Self> {
        let inst = g.prepare()?;
        let targets = prog.resolve(&inst)?;
        let admission = validate_run(&inst, config.eta)?;
        if !admission.accepted {
            return Err(Error::Rejected(admission.violating.iter().map(|&i| i as usize).collect()));
        }
        Ok(Self { inst, prog: prog.clone(), targets, config, admission, cache: DecompCache::default() })
    }

    pub fn admission(&self) -> &AdmissionReport {
        &self.admission
    }

    pub fn instance(&self) -> &Instance {
        &self.inst
    }

    pub fn cache_len(&self) -> usize {
        self.cache.len()
    }

    fn decomposition(&self, key: FullKey) -> Result<Arc<SepDecomposition<f64>>> {
        if self.config.use_cache {
            if let Some(d) = self.cache.map.read().unwrap().get(&key) {
                return Ok(d.clone());
            }
        }
        let a = BlochOp::new(unsnap(key.ops[0]), 0.0, unsnap(key.ops[1]))?;
        let b = BlochOp::new(unsnap(key.ops[2]), 0.0, unsnap(key.ops[3]))?;
        let phi = f64::from_bits(key.phi);
        let d = match axis_decomposition(&a, &b, phi) {
            Some(d) => d,
            None => {
                let (ra, rb) = (f64::from_bits(key.ra), f64::from_bits(key.rb));
                let oa = cylinder_extremals(ra, self.config.n_angles, 0.0)?;
                let ob = cylinder_extremals(rb, self.config.n_angles, 0.0)?;
                let target = apply_gate(phi, &product_matrix(&a, &b));
                ProductBasis::new(&oa, &ob)
                    .decompose(&target, self.config.lp_eps)?
                    .feasible()
                    .ok_or_else(|| Error::MarginTooSmall { residual: self.config.eta })?
            }
        };
        d.verify()?;
        let d = Arc::new(d);
        if self.config.use_cache {
            self.cache.map.write().unwrap().entry(key).or_insert_with(|| d.clone());
        }
        Ok(d)
    }

    pub fn run_shot(&self, seed: u64, shot: u64) -> Result<ShotRecord> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shot);
        let mut ops = self.inst.inputs.clone();
        let mut budget: Vec<f64> = ops.iter().map(|p| p.radius()).collect();
        let (mut branches, mut max_terms) = (0, 0);
        let order: Box<dyn Iterator<Item = &PreparedGate>> = if self.config.reverse_edges {
            Box::new(self.inst.gates.iter().rev())
        } else {
            Box::new(self.inst.gates.iter())
        };
        for g in order {
            let c = g.canonical;
            if !is_identity_phase(c.phi) {
                let (pa, pb) = (ops[g.a], ops[g.b]);
                let (az_a, az_b) = (pa.y.atan2(pa.x), pb.y.atan2(pb.x));
                let ra = budget[g.a] * g.growth.0 * (1.0 + self.config.eta);
                let rb = budget[g.b] * g.growth.1 * (1.0 + self.config.eta);
                let key = FullKey {
                    ops: [snap(pa.radius()), snap(pa.z), snap(pb.radius()), snap(pb.z)],
                    phi: c.phi.to_bits(),
                    ra: ra.to_bits(),
                    rb: rb.to_bits(),
                };
                let d = self.decomposition(key)?;
                let t = &d.terms[d.pick(rng.random::<f64>())];
                ops[g.a] = t.a.rotate_z(az_a);
                ops[g.b] = t.b.rotate_z(az_b);
                budget[g.a] = ra;
                budget[g.b] = rb;
                branches += 1;
                max_terms = max_terms.max(d.terms.len());
                debug_assert!(Cylinder { r: ra }.contains(&ops[g.a], 1e-9) && Cylinder { r: rb }.contains(&ops[g.b], 1e-9));
            }
            ops[g.a] = ops[g.a].rotate_z(c.local_a);
            ops[g.b] = ops[g.b].rotate_z(c.local_b);
        }
        let mut bits: Vec<u8> = Vec::with_capacity(self.prog.steps.len());
        let mut outcomes = Vec::with_capacity(self.prog.steps.len());
        for (s, &n) in self.prog.steps.iter().zip(&self.targets) {
            let (m, angle) = s.axis(&bits);
            let p_plus = ops[n].born_plus(m);
            if !(-1e-9..=1.0 + 1e-9).contains(&p_plus) {
                return Err(Error::Program(format!("outcome probability {p_plus} outside [0, 1] on qubit {}", s.qubit)));
            }
            let bit = u8::from(rng.random::<f64>() >= p_plus);
            bits.push(bit);
            outcomes.push(Outcome { qubit: s.qubit, basis: s.basis, angle, bit });
        }
        Ok(ShotRecord { seed, shot, outcomes, branches, max_terms })
    }

    /// Shots `0..n_shots`, each on its own stream of `seed`; order matches shot index.
    pub fn run_batch(&self, n_shots: u64, seed: u64) -> Result<Vec<ShotRecord>> {
        (0..n_shots).into_par_iter().map(|i| self.run_shot(seed, i)).collect()
    }
}

/// Outcome-bitstring frequencies.
pub fn empirical_distribution(records: &[ShotRecord]) -> BTreeMap<String, f64> {
    let mut counts: BTreeMap<String, f64> = BTreeMap::new();
    for r in records {
        *counts.entry(r.bitstring()).or_default() += 1.0;
    }
    let n = records.len() as f64;
    counts.values_mut().for_each(|c| *c /= n);
    counts
}

/// Total variation distance `½ Σ |p − q|` over the union of supports.
pub fn tv_distance(p: &BTreeMap<String, f64>, q: &BTreeMap<String, f64>) -> f64 {
    let mut s = 0.0;
    for (k, v) in p {
        s += (v - q.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, v) in q {
        if !p.contains_key(k) {
            s += v.abs();
        }
    }
    0.5 * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn path(n: u64, theta: f64, phi: f64) -> GraphSpec {
        GraphSpec {
            nodes: (0..n).map(|i| NodeSpec::pure(i, theta, 0.0)).collect(),
            edges: (1..n).map(|i| EdgeSpec::canonical(i - 1, i, phi)).collect(),
        }
    }

    fn cubic_graph(theta: f64) -> GraphSpec {
        // triangular prism
        let e = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)];
        GraphSpec {
            nodes: (0..6).map(|i| NodeSpec::pure(i, theta, 0.0)).collect(),
            edges: e.iter().map(|&(a, b)| EdgeSpec::canonical(a, b, PI)).collect(),
        }
    }

    #[test]
    fn json_formats() {
        let g = GraphSpec::from_json(r#"{"nodes":[{"id":0,"theta":0.11,"azimuth":0.0,"T":null},{"id":1,"theta":0.1}],"edges":[{"a":0,"b":1,"phi":3.14159265}]}"#).unwrap();
        let inst = g.prepare().unwrap();
        assert_eq!(inst.gates.len(), 1);
        assert!((inst.inputs[0].radius() - 0.11f64.sin()).abs() < 1e-15);
        let g = GraphSpec::from_json(r#"{"nodes":[{"id":0,"theta":0.1},{"id":1,"theta":0.1}],"edges":[{"a":0,"b":1,"phis":[0.1,0.2,0.3,0.4]}]}"#).unwrap();
        let c = g.prepare().unwrap().gates[0].canonical;
        assert!((c.phi - 0.0).abs() < 1e-12 || (c.phi - 2.0 * PI).abs() < 1e-12);
        let p = MeasurementProgram::from_json(r#"{"steps":[{"qubit":0,"basis":"Z"},{"qubit":1,"basis":"XY","angle":1.5707963,"flip_on":[0]}]}"#).unwrap();
        assert_eq!(p.steps[1].flip_on, vec![0]);
        assert!(MeasurementProgram::from_json(r#"{"steps":[{"qubit":0,"basis":"X"}]}"#).is_err());
    }

    #[test]
    fn graph_errors() {
        let mut g = path(2, 0.1, PI);
        g.edges[0].b = 0;
        assert!(matches!(g.prepare(), Err(Error::Graph(_))));
        let mut g = path(2, 0.1, PI);
        g.edges[0].b = 9;
        assert!(g.prepare().is_err());
        let mut g = path(2, 0.1, PI);
        g.edges[0].phis = Some([0.0; 4]);
        assert!(g.prepare().is_err());
        let mut g = path(2, 0.1, PI);
        g.edges[0].growth = Some([1.5, 1.5]);
        assert!(g.prepare().is_err());
        g.edges[0].growth = Some([4.0, 1.8]);
        assert!(g.prepare().is_ok());
    }

    #[test]
    fn program_errors() {
        let inst = path(3, 0.1, PI).prepare().unwrap();
        let twice = MeasurementProgram { steps: vec![Step::z(0), Step::z(0)] };
        assert!(matches!(twice.resolve(&inst), Err(Error::Program(_))));
        let forward = MeasurementProgram { steps: vec![Step::xy(0, 0.0, vec![1]), Step::z(1)] };
        assert!(forward.resolve(&inst).is_err());
        let z_flip = MeasurementProgram { steps: vec![Step::z(0), Step { flip_on: vec![0], ..Step::z(1) }] };
        assert!(z_flip.resolve(&inst).is_err());
        let unknown = MeasurementProgram { steps: vec![Step::z(7)] };
        assert!(unknown.resolve(&inst).is_err());
    }

    #[test]
    fn admission_examples() {
        let lam = lambda_of_phi(PI);
        let r = lam.powi(-3);
        let g = cubic_graph(r.asin());
        let rep = validate_run(&g.prepare().unwrap(), 0.0).unwrap();
        assert!(rep.accepted);
        assert!(rep.nodes.iter().all(|n| n.degree == 3 && n.slack.abs() < 1e-12));

        let rep = validate_run(&cubic_graph(0.2f64.asin()).prepare().unwrap(), 0.0).unwrap();
        assert!(!rep.accepted);
        assert_eq!(rep.violating.len(), 6);

        let lonely = GraphSpec { nodes: vec![NodeSpec::pure(0, PI / 2.0, 0.0)], edges: vec![] };
        assert!(validate_run(&lonely.prepare().unwrap(), DEFAULT_ETA).unwrap().accepted);

        let prog = MeasurementProgram { steps: vec![Step::z(0)] };
        let err = Simulator::new(&cubic_graph(0.2f64.asin()), &prog, SamplerConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Rejected(v) if v.len() == 6));
    }

    #[test]
    fn single_node_born_rule() {
        let theta: f64 = 0.9;
        let g = GraphSpec { nodes: vec![NodeSpec::pure(0, theta, 0.0)], edges: vec![] };
        let prog = MeasurementProgram { steps: vec![Step::xy(0, 0.0, vec![])] };
        let sim = Simulator::new(&g, &prog, SamplerConfig::default()).unwrap();
        let recs = sim.run_batch(20_000, 3).unwrap();
        let p0 = empirical_distribution(&recs)["0"];
        assert!((p0 - (1.0 + theta.sin()) / 2.0).abs() < 0.015, "{p0}");
    }

    #[test]
    fn poles_are_fixed() {
        let g = path(2, 0.0, PI);
        let prog = MeasurementProgram { steps: vec![Step::z(0), Step::z(1)] };
        let sim = Simulator::new(&g, &prog, SamplerConfig::default()).unwrap();
        for r in sim.run_batch(200, 1).unwrap() {
            assert_eq!(r.bitstring(), "00");
        }
    }

    #[test]
    fn batch_is_deterministic() {
        let g = path(3, 0.1, PI);
        let prog = MeasurementProgram { steps: (0..3).map(|q| Step::xy(q, 0.0, vec![])).collect() };
        let sim = Simulator::new(&g, &prog, SamplerConfig::default()).unwrap();
        assert!(sim.run_batch(0, 1).unwrap().is_empty());
        let a = sim.run_batch(500, 42).unwrap();
        let fresh = Simulator::new(&g, &prog, SamplerConfig { use_cache: false, ..Default::default() }).unwrap();
        let b = fresh.run_batch(500, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sim.run_batch(500, 43).unwrap());
        assert!(sim.cache_len() > 0 && sim.cache_len() < 100);
        assert!(a.iter().all(|r| r.branches == 2 && r.max_terms <= 17));
    }

    #[test]
    fn zero_phase_edges_are_free() {
        let g = path(3, 1.2, 0.0);
        let rep = validate_run(&g.prepare().unwrap(), DEFAULT_ETA).unwrap();
        assert!(rep.accepted && rep.nodes.iter().all(|n| (n.final_radius - 1.2f64.sin()).abs() < 1e-15));
    }

    #[test]
    fn tv_helper() {
        let p: BTreeMap<String, f64> = [("0".to_string(), 0.5), ("1".to_string(), 0.5)].into();
        let q: BTreeMap<String, f64> = [("0".to_string(), 1.0)].into();
        assert!((tv_distance(&p, &q) - 0.5).abs() < 1e-15);
        assert_eq!(tv_distance(&p, &p), 0.0);
    }

    #[test]
    fn shot_record_json_roundtrip() {
        let r = ShotRecord {
            seed: 1,
            shot: 2,
            outcomes: vec![Outcome { qubit: 0, basis: Basis::XY, angle: Some(0.5), bit: 1 }],
            branches: 3,
            max_terms: 9,
        };
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<ShotRecord>(&s).unwrap(), r);
    }
}

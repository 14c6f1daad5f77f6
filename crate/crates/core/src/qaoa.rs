//! Exact statevector execution of the Max-Cut QAOA ansatz.
//!
//! The ansatz starts from the uniform superposition and applies, for each
//! round `k`, the phase separator `exp(-i gamma_k H_P)` with `H_P = -C`
//! (a phase `exp(+i gamma_k cut(s))` on basis state `s`) followed by the
//! mixer `exp(-i beta_k X)` on every qubit.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::Bitstring;
use crate::error::{Error, Result};
use crate::graphs::GraphInstance;
use crate::hamiltonian::{diagonal_cost_table, DiagonalCostTable};
use crate::seeds::stream_rng;

/// Angles for `p` rounds of the ansatz, in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzParams {
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
}

impl AnsatzParams {
    pub fn new(betas: Vec<f64>, gammas: Vec<f64>) -> Result<Self> {
        if betas.is_empty() || betas.len() != gammas.len() {
            return Err(Error::Contract(format!(
                "need equal, non-zero numbers of betas and gammas (got {} and {})",
                betas.len(),
                gammas.len()
            )));
        }
        Ok(AnsatzParams { betas, gammas })
    }

    pub fn uniform(rounds: usize, beta: f64, gamma: f64) -> Self {
        AnsatzParams {
            betas: vec![beta; rounds],
            gammas: vec![gamma; rounds],
        }
    }

    pub fn rounds(&self) -> usize {
        self.betas.len()
    }

    /// `[betas..., gammas...]`, the layout the minimizer works on.
    pub fn to_flat(&self) -> Vec<f64> {
        self.betas.iter().chain(&self.gammas).copied().collect()
    }

    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if !flat.len().is_multiple_of(2) {
            return Err(Error::Contract("flat angle vector must have even length".into()));
        }
        let (b, g) = flat.split_at(flat.len() / 2);
        AnsatzParams::new(b.to_vec(), g.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    pub fn uniform(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Statevector {
            num_qubits,
            amps: vec![a; dim],
        }
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Statevector { num_qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::Contract("amplitude count must be a power of two".into()));
        }
        let num_qubits = amps.len().trailing_zeros() as usize;
        Ok(Statevector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Multiplies each amplitude by `phases[cut]` of its basis state.
    pub(crate) fn apply_cut_phases(&mut self, cuts: &[u32], phases: &[Complex64]) {
        for (a, &c) in self.amps.iter_mut().zip(cuts) {
            *a *= phases[c as usize];
        }
    }

    /// `exp(-i theta X)` on one qubit.
    pub(crate) fn apply_rx(&mut self, qubit: usize, theta: f64) {
        let (s, c) = theta.sin_cos();
        let stride = 1usize << qubit;
        for block in self.amps.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a0, *a1);
                *a0 = Complex64::new(c * x.re + s * y.im, c * x.im - s * y.re);
                *a1 = Complex64::new(c * y.re + s * x.im, c * y.im - s * x.re);
            }
        }
    }

    /// `exp(-i theta sum_q X_q)`.
    pub(crate) fn apply_mixer(&mut self, theta: f64) {
        for q in 0..self.num_qubits {
            self.apply_rx(q, theta);
        }
    }

    fn apply_rzz(&mut self, a: usize, b: usize, gamma: f64) {
        let phase = Complex64::from_polar(1.0, gamma);
        for (idx, amp) in self.amps.iter_mut().enumerate() {
            if ((idx >> a) ^ (idx >> b)) & 1 == 1 {
                *amp *= phase;
            }
        }
    }

    /// Pauli `code` (1 = X, 2 = Y, 3 = Z) on `qubit`, up to a global phase.
    fn apply_pauli(&mut self, qubit: usize, code: u8) {
        if code == 2 || code == 3 {
            for (idx, amp) in self.amps.iter_mut().enumerate() {
                if (idx >> qubit) & 1 == 1 {
                    *amp = -*amp;
                }
            }
        }
        if code == 1 || code == 2 {
            let stride = 1usize << qubit;
            for block in self.amps.chunks_exact_mut(stride << 1) {
                let (lo, hi) = block.split_at_mut(stride);
                lo.swap_with_slice(hi);
            }
        }
    }
}

fn check_limit(g: &GraphInstance, limit: usize) -> Result<()> {
    if g.num_nodes() > limit {
        return Err(Error::ResourceLimit {
            what: "statevector simulation",
            requested: g.num_nodes(),
            limit,
        });
    }
    Ok(())
}

fn cut_phases(max_cut: usize, gamma: f64) -> Vec<Complex64> {
    (0..=max_cut).map(|c| Complex64::from_polar(1.0, gamma * c as f64)).collect()
}

pub fn evolve_ansatz(g: &GraphInstance, params: &AnsatzParams, limit: usize) -> Result<Statevector> {
    check_limit(g, limit)?;
    let table = diagonal_cost_table(g, limit)?;
    Ok(evolve_with_table(&table, g.num_edges(), params))
}

/// Ansatz evolution reusing a precomputed cost table.
pub fn evolve_with_table(table: &DiagonalCostTable, num_edges: usize, params: &AnsatzParams) -> Statevector {
    let mut state = Statevector::uniform(table.num_qubits());
    for (&beta, &gamma) in params.betas.iter().zip(&params.gammas) {
        state.apply_cut_phases(table.cut_sizes(), &cut_phases(num_edges, gamma));
        state.apply_mixer(beta);
    }
    state
}

/// Measured bitstrings and their multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSet {
    num_bits: usize,
    shots: u64,
    counts: BTreeMap<Bitstring, u64>,
}

impl SampleSet {
    pub fn from_counts(num_bits: usize, counts: BTreeMap<Bitstring, u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::Contract("sample set needs at least one outcome".into()));
        }
        for (b, &c) in &counts {
            if b.len() != num_bits || c == 0 {
                return Err(Error::Contract(format!("invalid entry {b} x {c} for {num_bits}-bit samples")));
            }
        }
        let shots = counts.values().sum();
        Ok(SampleSet {
            num_bits,
            shots,
            counts,
        })
    }

    /// Builds a sample set from basis indices, one per shot.
    pub fn from_indices(num_bits: usize, outcomes: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut tally: HashMap<u64, u64> = HashMap::new();
        for o in outcomes {
            *tally.entry(o).or_default() += 1;
        }
        let counts = tally
            .into_iter()
            .map(|(idx, c)| (Bitstring::from_index(idx, num_bits), c))
            .collect();
        SampleSet::from_counts(num_bits, counts)
    }

    pub fn from_bitstrings(num_bits: usize, outcomes: impl IntoIterator<Item = Bitstring>) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for b in outcomes {
            *counts.entry(b).or_insert(0) += 1;
        }
        SampleSet::from_counts(num_bits, counts)
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn counts(&self) -> &BTreeMap<Bitstring, u64> {
        &self.counts
    }

    /// Empirical distribution.
    pub fn distribution(&self) -> BTreeMap<Bitstring, f64> {
        let n = self.shots as f64;
        self.counts.iter().map(|(b, &c)| (b.clone(), c as f64 / n)).collect()
    }
}

fn cumulative(probabilities: &[f64]) -> Vec<f64> {
    probabilities
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect()
}

fn draw(cdf: &[f64], rng: &mut impl Rng) -> u64 {
    let total = *cdf.last().expect("non-empty distribution");
    let u = rng.random::<f64>() * total;
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1) as u64
}

/// I.i.d. computational-basis measurements of `state`.
pub fn sample(state: &Statevector, shots: u64, seed: u64) -> SampleSet {
    assert!(shots >= 1, "need at least one shot");
    let cdf = cumulative(&state.probabilities());
    let mut rng = stream_rng(seed, 0);
    SampleSet::from_indices(state.num_qubits(), (0..shots).map(|_| draw(&cdf, &mut rng)))
        .expect("shots >= 1 gives a non-empty sample set")
}

/// One- and two-qubit depolarizing-style error probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p1) || !(0.0..=1.0).contains(&p2) {
            return Err(Error::Config(format!("noise probabilities must lie in [0, 1], got ({p1}, {p2})")));
        }
        Ok(NoiseModel { p1, p2 })
    }

    pub fn noiseless() -> Self {
        NoiseModel { p1: 0.0, p2: 0.0 }
    }

    /// One-qubit 0.003 and two-qubit 0.03, the rates of a typical QV-32 class device.
    pub fn qv32_preset() -> Self {
        NoiseModel { p1: 0.003, p2: 0.03 }
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1 == 0.0 && self.p2 == 0.0
    }
}

#[derive(Debug, Clone, Copy)]
enum Gate {
    H(usize),
    Rzz(usize, usize, f64),
    Rx(usize, f64),
}

fn ansatz_gates(g: &GraphInstance, params: &AnsatzParams) -> Vec<Gate> {
    let n = g.num_nodes();
    let mut gates: Vec<Gate> = (0..n).map(Gate::H).collect();
    for (&beta, &gamma) in params.betas.iter().zip(&params.gammas) {
        gates.extend(g.edges().iter().map(|&(a, b)| Gate::Rzz(a, b, gamma)));
        gates.extend((0..n).map(|q| Gate::Rx(q, beta)));
    }
    gates
}

/// Samples the ansatz under stochastic Pauli noise, one trajectory per shot.
///
/// After every gate a uniformly random non-identity Pauli hits the touched
/// qubits with probability `p1` (one-qubit gates) or `p2` (two-qubit gates).
/// Shots whose trajectory draws no error are sampled from the ideal state.
/// Each shot owns RNG stream `shot + 1` of `seed`, so results do not depend on
/// thread scheduling.
pub fn noisy_sample(
    g: &GraphInstance,
    params: &AnsatzParams,
    shots: u64,
    noise: NoiseModel,
    seed: u64,
    limit: usize,
) -> Result<SampleSet> {
    let ideal = evolve_ansatz(g, params, limit)?;
    if noise.is_noiseless() {
        return Ok(sample(&ideal, shots, seed));
    }
    let n = g.num_nodes();
    let cdf = cumulative(&ideal.probabilities());
    let gates = ansatz_gates(g, params);
    let outcomes: Vec<u64> = (0..shots)
        .into_par_iter()
        .map(|shot| {
            let mut rng = stream_rng(seed, shot + 1);
            let errors: Vec<(usize, u8, u8)> = gates
                .iter()
                .enumerate()
                .filter_map(|(k, gate)| match gate {
                    Gate::Rzz(..) => (rng.random::<f64>() < noise.p2).then(|| {
                        let code = rng.random_range(1..16u8);
                        (k, code % 4, code / 4)
                    }),
                    _ => (rng.random::<f64>() < noise.p1).then(|| (k, rng.random_range(1..4u8), 0)),
                })
                .collect();
            if errors.is_empty() {
                return draw(&cdf, &mut rng);
            }
            let state = run_trajectory(n, &gates, &errors);
            draw(&cumulative(&state.probabilities()), &mut rng)
        })
        .collect();
    SampleSet::from_indices(n, outcomes)
}

fn run_trajectory(n: usize, gates: &[Gate], errors: &[(usize, u8, u8)]) -> Statevector {
    // The H layer acting on |0...0> is the uniform state; Paulis drawn on that
    // layer commute with the H gates on other qubits.
    let mut state = Statevector::uniform(n);
    let mut pending = errors.iter().peekable();
    for (k, gate) in gates.iter().enumerate() {
        match *gate {
            Gate::H(_) => {}
            Gate::Rzz(a, b, gamma) => state.apply_rzz(a, b, gamma),
            Gate::Rx(q, beta) => state.apply_rx(q, beta),
        }
        while let Some(&&(at, first, second)) = pending.peek() {
            if at != k {
                break;
            }
            match *gate {
                Gate::Rzz(a, b, _) => {
                    if first != 0 {
                        state.apply_pauli(a, first);
                    }
                    if second != 0 {
                        state.apply_pauli(b, second);
                    }
                }
                Gate::H(q) | Gate::Rx(q, _) => state.apply_pauli(q, first),
            }
            pending.next();
        }
    }
    state
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fidelity {
    pub raw: f64,
    pub normalized: f64,
}

/// Hellinger fidelity of measured counts against an ideal dense distribution,
/// plus the version rescaled so the uniform distribution scores 0.
///
/// When the ideal distribution is itself uniform the rescaling is undefined
/// and the raw value is reported for both.
pub fn hellinger_fidelities(measured: &SampleSet, ideal: &[f64]) -> Result<Fidelity> {
    if measured.shots() == 0 {
        return Err(Error::Contract("empty sample set".into()));
    }
    if ideal.len() != 1usize << measured.num_bits().min(63) {
        return Err(Error::Contract(format!(
            "ideal distribution has {} entries, expected 2^{}",
            ideal.len(),
            measured.num_bits()
        )));
    }
    let shots = measured.shots() as f64;
    let overlap: f64 = measured
        .counts()
        .iter()
        .map(|(b, &c)| {
            let idx = b.to_index().expect("dense outcome space") as usize;
            (c as f64 / shots * ideal[idx]).sqrt()
        })
        .sum();
    let raw = (overlap * overlap).min(1.0);
    let uniform_overlap: f64 = ideal.iter().map(|p| p.sqrt()).sum::<f64>();
    let u = (uniform_overlap * uniform_overlap / ideal.len() as f64).min(1.0);
    let normalized = if 1.0 - u < 1e-12 {
        raw
    } else {
        ((raw - u) / (1.0 - u)).clamp(0.0, 1.0)
    };
    Ok(Fidelity { raw, normalized })
}

/// Gate counts and idealized depth of the ansatz circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitResources {
    pub width: usize,
    pub two_qubit_gate_count: usize,
    /// Initial Hadamard layer plus every mixer rotation.
    pub one_qubit_gate_count: usize,
    pub mixer_gate_count: usize,
    pub algorithmic_depth: usize,
}

/// Greedy layering of edge gates: each edge goes into the first layer where
/// neither endpoint is busy.
pub fn edge_layers(g: &GraphInstance) -> usize {
    let mut layers: Vec<Vec<bool>> = Vec::new();
    for &(a, b) in g.edges() {
        match layers.iter_mut().find(|busy| !busy[a] && !busy[b]) {
            Some(busy) => {
                busy[a] = true;
                busy[b] = true;
            }
            None => {
                let mut busy = vec![false; g.num_nodes()];
                busy[a] = true;
                busy[b] = true;
                layers.push(busy);
            }
        }
    }
    layers.len()
}

pub fn circuit_resources(g: &GraphInstance, rounds: usize) -> CircuitResources {
    let n = g.num_nodes();
    CircuitResources {
        width: n,
        two_qubit_gate_count: rounds * g.num_edges(),
        one_qubit_gate_count: n + rounds * n,
        mixer_gate_count: rounds * n,
        algorithmic_depth: 1 + rounds * (edge_layers(g) + 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::generate_3_regular;
    use crate::hamiltonian::DEFAULT_STATEVECTOR_LIMIT as LIMIT;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn single_edge() -> GraphInstance {
        GraphInstance::new(2, [(0, 1)]).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(AnsatzParams::new(vec![1.0], vec![]).is_err());
        assert!(AnsatzParams::new(vec![], vec![]).is_err());
        let p = AnsatzParams::new(vec![0.1, 0.2], vec![0.3, 0.4]).unwrap();
        assert_eq!(AnsatzParams::from_flat(&p.to_flat()).unwrap(), p);
    }

    #[test]
    fn zero_angles_leave_uniform_state() {
        let g = generate_3_regular(6, 0).unwrap();
        let s = evolve_ansatz(&g, &AnsatzParams::uniform(3, 0.0, 0.0), LIMIT).unwrap();
        for p in s.probabilities() {
            assert!((p - 1.0 / 64.0).abs() < 1e-14);
        }
    }

    #[test]
    fn evolution_preserves_norm() {
        let g = generate_3_regular(8, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p = rng.random_range(1..4);
            let params = AnsatzParams::new(
                (0..p).map(|_| rng.random_range(0.0..3.2)).collect(),
                (0..p).map(|_| rng.random_range(0.0..6.3)).collect(),
            )
            .unwrap();
            let s = evolve_ansatz(&g, &params, LIMIT).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn single_edge_optimum_concentrates_on_cut_states() {
        let g = single_edge();
        let s = evolve_ansatz(&g, &AnsatzParams::uniform(1, 3.0 * std::f64::consts::PI / 8.0, std::f64::consts::FRAC_PI_2), LIMIT)
            .unwrap();
        let p = s.probabilities();
        assert!((p[1] + p[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn over_limit_is_a_resource_error() {
        let g = generate_3_regular(10, 0).unwrap();
        assert!(matches!(
            evolve_ansatz(&g, &AnsatzParams::uniform(1, 1.0, 1.0), 8),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn sampling_basis_state_and_counts() {
        let s = sample(&Statevector::basis(2, 2), 500, 1);
        assert_eq!(s.shots(), 500);
        assert_eq!(s.counts().len(), 1);
        assert_eq!(s.counts().keys().next().unwrap().to_string(), "01");
        let u = sample(&Statevector::uniform(5), 777, 9);
        assert_eq!(u.counts().values().sum::<u64>(), 777);
        assert_eq!(sample(&Statevector::uniform(5), 777, 9), u);
    }

    #[test]
    fn uniform_sampling_passes_chi_square() {
        // 15 degrees of freedom, 0.999 quantile = 37.697
        let n = 4;
        let shots = 100_000u64;
        let s = sample(&Statevector::uniform(n), shots, 42);
        let expected = shots as f64 / 16.0;
        let chi2: f64 = (0..16u64)
            .map(|i| {
                let obs = *s.counts().get(&Bitstring::from_index(i, n)).unwrap_or(&0) as f64;
                (obs - expected).powi(2) / expected
            })
            .sum();
        assert!(chi2 < 37.697, "chi2 = {chi2}");
    }

    #[test]
    fn fidelity_edge_cases() {
        let ideal = [0.25; 4];
        let exact = SampleSet::from_indices(2, [0, 1, 2, 3]).unwrap();
        let f = hellinger_fidelities(&exact, &[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(f.raw < 0.5 + 1e-12);
        let peaked = SampleSet::from_indices(2, [0, 0, 3, 3]).unwrap();
        let f = hellinger_fidelities(&peaked, &[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((f.raw - 1.0).abs() < 1e-12 && (f.normalized - 1.0).abs() < 1e-12);
        let f = hellinger_fidelities(&exact, &[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(f.normalized.abs() < 1e-12);
        let disjoint = SampleSet::from_indices(2, [1, 2]).unwrap();
        assert_eq!(hellinger_fidelities(&disjoint, &[0.5, 0.0, 0.0, 0.5]).unwrap().raw, 0.0);
        assert!(hellinger_fidelities(&exact, &ideal[..2]).is_err());
    }

    #[test]
    fn fidelity_improves_with_shots() {
        let g = generate_3_regular(10, 2).unwrap();
        let state = evolve_ansatz(&g, &AnsatzParams::uniform(2, 1.0, 1.0), LIMIT).unwrap();
        let ideal = state.probabilities();
        let mean = |shots| {
            (0..5)
                .map(|seed| hellinger_fidelities(&sample(&state, shots, seed), &ideal).unwrap().raw)
                .sum::<f64>()
                / 5.0
        };
        assert!(mean(5000) > mean(1000));
    }

    #[test]
    fn zero_noise_matches_ideal_sampler() {
        let g = generate_3_regular(6, 5).unwrap();
        let params = AnsatzParams::uniform(2, 0.4, 0.9);
        let a = noisy_sample(&g, &params, 1000, NoiseModel::noiseless(), 3, LIMIT).unwrap();
        let b = sample(&evolve_ansatz(&g, &params, LIMIT).unwrap(), 1000, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn full_noise_scrambles() {
        let g = generate_3_regular(6, 5).unwrap();
        let params = AnsatzParams::uniform(4, 0.4, 0.9);
        let ideal = evolve_ansatz(&g, &params, LIMIT).unwrap().probabilities();
        let s = noisy_sample(&g, &params, 20_000, NoiseModel::new(1.0, 1.0).unwrap(), 8, LIMIT).unwrap();
        let f = hellinger_fidelities(&s, &ideal).unwrap();
        assert!(f.normalized < 0.05, "normalized fidelity {}", f.normalized);
    }

    #[test]
    fn noisy_sampling_is_deterministic() {
        let g = generate_3_regular(6, 5).unwrap();
        let params = AnsatzParams::uniform(2, 0.4, 0.9);
        let noise = NoiseModel::qv32_preset();
        assert_eq!(
            noisy_sample(&g, &params, 300, noise, 4, LIMIT).unwrap(),
            noisy_sample(&g, &params, 300, noise, 4, LIMIT).unwrap()
        );
        assert!(NoiseModel::new(1.5, 0.0).is_err());
    }

    #[test]
    fn trajectory_without_errors_matches_dense_evolution() {
        let g = generate_3_regular(6, 5).unwrap();
        let params = AnsatzParams::uniform(2, 0.4, 0.9);
        let traj = run_trajectory(6, &ansatz_gates(&g, &params), &[]);
        let dense = evolve_ansatz(&g, &params, LIMIT).unwrap();
        for (a, b) in traj.probabilities().iter().zip(dense.probabilities()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn resources_match_circuit_structure() {
        let g6 = generate_3_regular(6, 0).unwrap();
        let r = circuit_resources(&g6, 2);
        assert_eq!((r.two_qubit_gate_count, r.mixer_gate_count, r.one_qubit_gate_count), (18, 12, 18));
        let k4 = GraphInstance::complete(4);
        let r = circuit_resources(&k4, 1);
        assert_eq!((r.two_qubit_gate_count, r.mixer_gate_count), (6, 4));
        let g = generate_3_regular(10, 3).unwrap();
        let d: Vec<usize> = (1..=3).map(|p| circuit_resources(&g, p).algorithmic_depth).collect();
        assert_eq!(d[1] - d[0], d[2] - d[1]);
        assert_eq!(edge_layers(&k4), 3);
    }
}

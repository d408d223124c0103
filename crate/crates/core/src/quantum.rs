//! Classically emulated quantum HDC: phase-encoded statevectors whose
//! algebra is equivalent to the bipolar operations.
//!
//! A bipolar hypervector maps to the relative phases of a uniform
//! superposition: amplitude `j` is `v_j / √D` (phase 0 for +1, phase π for
//! −1). Binding is a diagonal ±1 phase oracle, permutation a cyclic shift of
//! the computational basis (equal to a Fourier-diagonal-inverse-Fourier
//! construction, which [`qpermute_spectral`] implements as the independent
//! route), bundling an average of states with the squared norm reported as
//! the post-selection success probability that amplitude amplification
//! would boost, and similarity the real part of the inner product —
//! estimated, in sampled mode, through the Hadamard-test outcome
//! distribution.
//!
//! Everything operates on dense statevectors; no gate synthesis is involved.
//! Registers force power-of-two lengths, so encoding pads with +1 components
//! and records the original dimension.

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;

use crate::classification::ClassifierConfig;
use crate::encoding::FeatureEncoder;
use crate::error::{HdcError, Result};
use crate::hypervector::{Form, Hypervector};
use crate::{par, rng};

/// A unit-norm complex statevector over `2^n_qubits` basis states.
#[derive(Debug, Clone)]
pub struct PhaseState {
    amplitudes: Vec<Complex64>,
    n_qubits: usize,
    /// Original hypervector dimension when padding was applied at encoding.
    source_dim: Option<usize>,
    provenance: Vec<String>,
}

impl PhaseState {
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn source_dim(&self) -> Option<usize> {
        self.source_dim
    }

    /// Operations applied to reach this state.
    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn from_amplitudes(
        amplitudes: Vec<Complex64>,
        source_dim: Option<usize>,
        provenance: Vec<String>,
    ) -> Self {
        let n_qubits = amplitudes.len().trailing_zeros() as usize;
        Self {
            amplitudes,
            n_qubits,
            source_dim,
            provenance,
        }
    }
}

fn next_power_of_two(n: usize) -> usize {
    n.next_power_of_two()
}

/// Pad a bipolar vector with +1 components up to a power of two.
fn padded_components(v: &Hypervector) -> Result<Vec<i32>> {
    if v.form() != Form::Bipolar {
        return Err(HdcError::InvalidForm {
            expected: Form::Bipolar.name(),
            found: v.form().name(),
        });
    }
    let target = next_power_of_two(v.dim());
    let mut values = v.values().to_vec();
    values.resize(target, 1);
    Ok(values)
}

/// Phase-encode a bipolar hypervector into a uniform-magnitude statevector.
pub fn qencode(v: &Hypervector) -> Result<PhaseState> {
    let values = padded_components(v)?;
    let dim = values.len();
    let scale = 1.0 / (dim as f64).sqrt();
    let amplitudes = values
        .iter()
        .map(|&x| Complex64::new(x as f64 * scale, 0.0))
        .collect();
    let source_dim = (dim != v.dim()).then_some(v.dim());
    let provenance = vec![match source_dim {
        Some(d) => format!("qencode(dim={dim}, padded_from={d})"),
        None => format!("qencode(dim={dim})"),
    }];
    Ok(PhaseState::from_amplitudes(
        amplitudes, source_dim, provenance,
    ))
}

/// Diagonal ±1 phase oracle: multiply each amplitude by the corresponding
/// bipolar component. Unitary (norm-preserving) and an involution.
pub fn qbind(state: &PhaseState, b: &Hypervector) -> Result<PhaseState> {
    let values = padded_components(b)?;
    if values.len() != state.len() {
        return Err(HdcError::DimensionMismatch {
            left: state.len(),
            right: values.len(),
        });
    }
    let amplitudes = state
        .amplitudes
        .iter()
        .zip(&values)
        .map(|(a, &s)| a * s as f64)
        .collect();
    let mut provenance = state.provenance.clone();
    provenance.push("qbind".to_string());
    Ok(PhaseState::from_amplitudes(
        amplitudes,
        state.source_dim,
        provenance,
    ))
}

/// Average the states and renormalize, reporting the squared norm of the
/// raw average — the LCU post-selection probability that oblivious
/// amplitude amplification boosts. Exact cancellation is an error.
pub fn qbundle(states: &[PhaseState]) -> Result<(PhaseState, f64)> {
    if states.is_empty() {
        return Err(HdcError::EmptyInput("qbundle of zero states"));
    }
    let dim = states[0].len();
    for s in states {
        if s.len() != dim {
            return Err(HdcError::DimensionMismatch {
                left: dim,
                right: s.len(),
            });
        }
    }
    let m = states.len() as f64;
    let mut raw = vec![Complex64::new(0.0, 0.0); dim];
    for s in states {
        for (r, a) in raw.iter_mut().zip(&s.amplitudes) {
            *r += a;
        }
    }
    for r in raw.iter_mut() {
        *r /= m;
    }
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Err(HdcError::DestructiveCancellation);
    }
    let success_probability = norm * norm;
    let amplitudes = raw.into_iter().map(|a| a / norm).collect();
    let provenance = vec![format!("qbundle(m={})", states.len())];
    Ok((
        PhaseState::from_amplitudes(amplitudes, states[0].source_dim, provenance),
        success_probability,
    ))
}

/// Cyclic shift of the computational basis: the amplitude at index `i`
/// moves to `(i + k) mod 2^n`, the same rotation convention as
/// `Hypervector::permute`.
pub fn qpermute(state: &PhaseState, k: i64) -> PhaseState {
    let dim = state.len() as i64;
    let shift = k.rem_euclid(dim) as usize;
    let mut amplitudes = state.amplitudes.clone();
    amplitudes.rotate_right(shift);
    let mut provenance = state.provenance.clone();
    provenance.push(format!("qpermute(k={k})"));
    PhaseState::from_amplitudes(amplitudes, state.source_dim, provenance)
}

/// The same basis shift realized spectrally: Fourier transform, diagonal
/// phase `e^{−2πi·k·m/2^n}`, inverse Fourier transform. Kept as the
/// independent route for verifying [`qpermute`].
pub fn qpermute_spectral(state: &PhaseState, k: i64) -> PhaseState {
    let dim = state.len();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(dim);
    let ifft = planner.plan_fft_inverse(dim);

    let mut buf: Vec<Complex64> = state.amplitudes.clone();
    fft.process(&mut buf);
    let shift = k.rem_euclid(dim as i64) as f64;
    for (m, a) in buf.iter_mut().enumerate() {
        let angle = -std::f64::consts::TAU * shift * m as f64 / dim as f64;
        *a *= Complex64::from_polar(1.0, angle);
    }
    ifft.process(&mut buf);
    let scale = 1.0 / dim as f64;
    for a in buf.iter_mut() {
        *a *= scale;
    }
    let mut provenance = state.provenance.clone();
    provenance.push(format!("qpermute_spectral(k={k})"));
    PhaseState::from_amplitudes(buf, state.source_dim, provenance)
}

/// How similarity is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimilarityMode {
    /// The exact real part of the inner product.
    Exact,
    /// Hadamard-test emulation: seeded Bernoulli draws from the outcome
    /// distribution `P(0) = (1 + Re⟨ψ|φ⟩)/2`.
    Sampled { shots: usize, seed: u64 },
}

/// Real part of ⟨ψ|φ⟩, exact or shot-sampled.
pub fn qsimilarity(psi: &PhaseState, phi: &PhaseState, mode: SimilarityMode) -> Result<f64> {
    let exact = qsimilarity_exact(psi, phi)?;
    match mode {
        SimilarityMode::Exact => Ok(exact),
        SimilarityMode::Sampled { shots, seed } => {
            if shots < 1 {
                return Err(HdcError::InvalidParameter(
                    "sampled similarity needs at least 1 shot".into(),
                ));
            }
            let p0 = ((1.0 + exact) / 2.0).clamp(0.0, 1.0);
            let mut rng = rng::rng_from(rng::derive(seed, rng::tag::HADAMARD));
            let zeros = (0..shots).filter(|_| rng.random::<f64>() < p0).count();
            Ok(2.0 * zeros as f64 / shots as f64 - 1.0)
        }
    }
}

pub fn qsimilarity_exact(psi: &PhaseState, phi: &PhaseState) -> Result<f64> {
    if psi.len() != phi.len() {
        return Err(HdcError::DimensionMismatch {
            left: psi.len(),
            right: phi.len(),
        });
    }
    Ok(psi
        .amplitudes
        .iter()
        .zip(&phi.amplitudes)
        .map(|(a, b)| (a.conj() * b).re)
        .sum())
}

/// Supervised classifier over phase-encoded records: each class state is
/// the quantum bundle of its members' encoded states.
#[derive(Debug, Clone)]
pub struct QuantumClassificationModel {
    config: ClassifierConfig,
    encoder: FeatureEncoder,
    classes: Vec<String>,
    class_states: Vec<PhaseState>,
    success_probabilities: Vec<f64>,
}

impl QuantumClassificationModel {
    pub fn fit(
        matrix: &[Vec<f64>],
        labels: &[String],
        feature_names: &[String],
        config: ClassifierConfig,
    ) -> Result<Self> {
        if matrix.is_empty() {
            return Err(HdcError::EmptyInput("training set is empty"));
        }
        if matrix.len() != labels.len() {
            return Err(HdcError::InvalidInput(format!(
                "{} rows but {} labels",
                matrix.len(),
                labels.len()
            )));
        }
        let encoder = crate::classification::build_encoder(matrix, feature_names, &config)?;
        let mut classes: Vec<String> = labels.to_vec();
        classes.sort();
        classes.dedup();
        if classes.len() < 2 {
            return Err(HdcError::SingleClass);
        }
        let encodings = encoder.encode_batch(matrix)?;
        let states = par::map_slice(&encodings, qencode)
            .into_iter()
            .collect::<Result<Vec<_>>>()?;

        let mut class_states = Vec::with_capacity(classes.len());
        let mut success_probabilities = Vec::with_capacity(classes.len());
        for class in &classes {
            let members: Vec<PhaseState> = states
                .iter()
                .zip(labels)
                .filter(|(_, l)| *l == class)
                .map(|(s, _)| s.clone())
                .collect();
            let (state, probability) = qbundle(&members)?;
            class_states.push(state);
            success_probabilities.push(probability);
        }
        Ok(Self {
            config,
            encoder,
            classes,
            class_states,
            success_probabilities,
        })
    }

    /// Predicted label plus per-class similarity, ties to the earlier class.
    /// In sampled mode each class runs its own Hadamard-test stream, derived
    /// from the mode's seed and the class index.
    pub fn predict(&self, x: &[f64], mode: SimilarityMode) -> Result<(String, Vec<(String, f64)>)> {
        let query = qencode(&self.encoder.encode_record(x)?)?;
        let scores = self
            .class_states
            .iter()
            .enumerate()
            .map(|(c, s)| {
                let class_mode = match mode {
                    SimilarityMode::Exact => SimilarityMode::Exact,
                    SimilarityMode::Sampled { shots, seed } => SimilarityMode::Sampled {
                        shots,
                        seed: rng::derive2(seed, rng::tag::HADAMARD, c as u64),
                    },
                };
                qsimilarity(s, &query, class_mode)
            })
            .collect::<Result<Vec<f64>>>()?;
        let mut best = 0;
        for (c, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = c;
            }
        }
        let report = self.classes.iter().cloned().zip(scores).collect();
        Ok((self.classes[best].clone(), report))
    }

    pub fn config(&self) -> &ClassifierConfig {
        &self.config
    }

    pub fn encoder(&self) -> &FeatureEncoder {
        &self.encoder
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn class_states(&self) -> &[PhaseState] {
        &self.class_states
    }

    /// Per-class LCU post-selection probabilities recorded at fit time.
    pub fn success_probabilities(&self) -> &[f64] {
        &self.success_probabilities
    }

    pub(crate) fn from_parts(
        config: ClassifierConfig,
        encoder: FeatureEncoder,
        classes: Vec<String>,
        class_states: Vec<PhaseState>,
        success_probabilities: Vec<f64>,
    ) -> Self {
        Self {
            config,
            encoder,
            classes,
            class_states,
            success_probabilities,
        }
    }

    pub(crate) fn state_parts(state: &PhaseState) -> (&[Complex64], Option<usize>) {
        (&state.amplitudes, state.source_dim)
    }

    pub(crate) fn state_from_parts(
        amplitudes: Vec<Complex64>,
        source_dim: Option<usize>,
    ) -> PhaseState {
        PhaseState::from_amplitudes(amplitudes, source_dim, vec!["loaded".to_string()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypervector::bundle;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn states_close(a: &PhaseState, b: &PhaseState, tol: f64) -> bool {
        a.len() == b.len()
            && a.amplitudes
                .iter()
                .zip(&b.amplitudes)
                .all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn qencode_uniform_superposition() {
        let v = Hypervector::from_bipolar(vec![1, 1, 1, 1]).unwrap();
        let state = qencode(&v).unwrap();
        for a in state.amplitudes() {
            assert!(close(a.re, 0.5, 1e-15) && a.im == 0.0);
        }
        assert_eq!(state.source_dim(), None);
    }

    #[test]
    fn qencode_phase_flips_and_padding() {
        let v = Hypervector::from_bipolar(vec![1, -1, 1, -1]).unwrap();
        let state = qencode(&v).unwrap();
        let expected = [0.5, -0.5, 0.5, -0.5];
        for (a, e) in state.amplitudes().iter().zip(expected) {
            assert!(close(a.re, e, 1e-15));
        }
        // non-power-of-two dimensions pad with +1 and record the source
        let v10 = Hypervector::random(10, 3).unwrap();
        let padded = qencode(&v10).unwrap();
        assert_eq!(padded.len(), 16);
        assert_eq!(padded.source_dim(), Some(10));
        assert!(close(padded.norm(), 1.0, 1e-12));
        let mag = 1.0 / 4.0;
        assert!(padded
            .amplitudes()
            .iter()
            .all(|a| close(a.norm(), mag, 1e-12)));
    }

    #[test]
    fn qbind_matches_classical_bind() {
        let a = Hypervector::random(256, 1).unwrap();
        let b = Hypervector::random(256, 2).unwrap();
        let via_quantum = qbind(&qencode(&a).unwrap(), &b).unwrap();
        let via_classical = qencode(&a.bind(&b).unwrap()).unwrap();
        assert!(states_close(&via_quantum, &via_classical, 1e-12));
        // involution
        let back = qbind(&via_quantum, &b).unwrap();
        assert!(states_close(&back, &qencode(&a).unwrap(), 1e-12));
        // identity under the all-ones oracle
        let ones = Hypervector::from_bipolar(vec![1; 256]).unwrap();
        let same = qbind(&qencode(&a).unwrap(), &ones).unwrap();
        assert!(states_close(&same, &qencode(&a).unwrap(), 1e-15));
    }

    #[test]
    fn qbind_preserves_norm_exactly() {
        let a = Hypervector::random(128, 5).unwrap();
        let b = Hypervector::random(128, 6).unwrap();
        let state = qencode(&a).unwrap();
        assert_eq!(qbind(&state, &b).unwrap().norm(), state.norm());
    }

    #[test]
    fn qbundle_of_identical_states_is_identity() {
        let a = qencode(&Hypervector::random(64, 7).unwrap()).unwrap();
        let (bundled, p) = qbundle(&[a.clone(), a.clone(), a.clone()]).unwrap();
        assert!(states_close(&bundled, &a, 1e-12));
        assert!(close(p, 1.0, 1e-12));
    }

    #[test]
    fn qbundle_detects_destructive_cancellation() {
        let a = Hypervector::random(64, 8).unwrap();
        let pos = qencode(&a).unwrap();
        let neg = qencode(&a.negate()).unwrap();
        assert!(matches!(
            qbundle(&[pos, neg]),
            Err(HdcError::DestructiveCancellation)
        ));
    }

    #[test]
    fn qbundle_approximates_classical_majority() {
        let vs: Vec<Hypervector> = (0..5)
            .map(|i| Hypervector::random(1024, 100 + i).unwrap())
            .collect();
        let states = vs.iter().map(|v| qencode(v).unwrap()).collect::<Vec<_>>();
        let (bundled, _) = qbundle(&states).unwrap();
        let refs: Vec<&Hypervector> = vs.iter().collect();
        // odd count: majority sign has no ties
        let majority = bundle(&refs).unwrap().normalize(0).unwrap();
        let sim = qsimilarity_exact(&bundled, &qencode(&majority).unwrap()).unwrap();
        assert!(sim > 0.7, "similarity {sim}");
    }

    #[test]
    fn qpermute_identities_and_classical_agreement() {
        let a = Hypervector::random(128, 9).unwrap();
        let state = qencode(&a).unwrap();
        assert!(states_close(&qpermute(&state, 0), &state, 1e-15));
        assert!(states_close(&qpermute(&state, 128), &state, 1e-15));
        let rotated = qpermute(&state, 17);
        let classical = qencode(&a.permute(17)).unwrap();
        assert!(states_close(&rotated, &classical, 1e-12));
        assert_eq!(rotated.norm(), state.norm());
    }

    #[test]
    fn qpermute_matches_spectral_route() {
        for n in [2usize, 8, 64] {
            let v = Hypervector::random(n, n as u64).unwrap();
            let state = qencode(&v).unwrap();
            for k in [-3i64, 0, 1, (n / 2) as i64, n as i64 + 5] {
                let direct = qpermute(&state, k);
                let spectral = qpermute_spectral(&state, k);
                assert!(states_close(&direct, &spectral, 1e-9), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn qsimilarity_equals_classical_cosine() {
        let a = Hypervector::random(512, 10).unwrap();
        let b = Hypervector::random(512, 11).unwrap();
        let sa = qencode(&a).unwrap();
        let sb = qencode(&b).unwrap();
        assert!(close(qsimilarity_exact(&sa, &sa).unwrap(), 1.0, 1e-12));
        let expected = a.cosine(&b).unwrap();
        assert!(close(qsimilarity_exact(&sa, &sb).unwrap(), expected, 1e-12));
    }

    #[test]
    fn sampled_similarity_concentrates_with_shots() {
        let a = qencode(&Hypervector::random(256, 12).unwrap()).unwrap();
        let b = qencode(&Hypervector::random(256, 13).unwrap()).unwrap();
        let exact = qsimilarity_exact(&a, &b).unwrap();
        let mut errors = Vec::new();
        for shots in [100usize, 10_000] {
            let mut total = 0.0;
            let trials = 20;
            for t in 0..trials {
                let est = qsimilarity(&a, &b, SimilarityMode::Sampled { shots, seed: t }).unwrap();
                total += (est - exact).abs();
            }
            errors.push(total / trials as f64);
        }
        assert!(errors[1] < errors[0], "errors {errors:?}");
        assert!(qsimilarity(&a, &b, SimilarityMode::Sampled { shots: 0, seed: 0 }).is_err());
    }

    #[test]
    fn quantum_classifier_one_row_per_class() {
        let matrix = vec![vec![0.1, 0.2, 0.3], vec![0.9, 0.8, 0.7]];
        let labels = vec!["a".to_string(), "b".to_string()];
        let names: Vec<String> = (0..3).map(|i| format!("f{i}")).collect();
        let config = ClassifierConfig {
            dim: 1024,
            levels: 4,
            ..ClassifierConfig::default()
        };
        let model = QuantumClassificationModel::fit(&matrix, &labels, &names, config).unwrap();
        assert_eq!(model.success_probabilities(), &[1.0, 1.0]);
        for (row, label) in matrix.iter().zip(&labels) {
            let (pred, scores) = model.predict(row, SimilarityMode::Exact).unwrap();
            assert_eq!(&pred, label);
            let own = scores.iter().find(|(l, _)| l == label).unwrap().1;
            assert!(close(own, 1.0, 1e-12));
        }
    }
}

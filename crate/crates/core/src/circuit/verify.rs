//! Verification of the encoders against literal codeword lists.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::encode::{
    dof_cnot, encoding_ops, lower, multiplexed_encode, multiplexed_encoding_gates,
    prepare_two_qubit_qutrit, qubit_encoding_gates, qutrit_encode, six_photon_encode,
    photon_pair_cnot, toffoli_mode_split, QubitOp,
};
use super::gates::{self, Dof};
use super::{circuit_unitary, operator_error, CircuitError, PureState, C64};

pub const FIDELITY_TOLERANCE: f64 = 1e-10;
pub const OPERATOR_TOLERANCE: f64 = 1e-10;

pub const QUTRIT_CODEWORDS: [[&str; 3]; 3] = [
    ["000", "111", "222"],
    ["012", "120", "201"],
    ["021", "102", "210"],
];

pub const SIX_PHOTON_CODEWORDS: [[&str; 3]; 3] = [
    ["HHHHHH", "VHVHVH", "VVVVVV"],
    ["HHVHVV", "VHVVHH", "VVHHVH"],
    ["HHVVVH", "VHHHVV", "VVVHHH"],
];

pub const MULTIPLEXED_CODEWORDS: [[&str; 3]; 3] = [
    ["HS HS HS", "VS VS VS", "VL VL VL"],
    ["HS VS VL", "VS VL HS", "VL HS VS"],
    ["HS VL VS", "VS HS VL", "VL VS HS"],
];

fn parse_qutrits(s: &str) -> Vec<usize> {
    s.chars().map(|c| c.to_digit(3).expect("qutrit digit") as usize).collect()
}

fn parse_polarizations(s: &str) -> Vec<usize> {
    s.chars().map(|c| usize::from(c == 'V')).collect()
}

fn parse_photons(s: &str) -> Vec<usize> {
    s.split_whitespace()
        .map(|m| {
            let b = m.as_bytes();
            2 * usize::from(b[0] == b'V') + usize::from(b[1] == b'L')
        })
        .collect()
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn codeword(radices: &[usize], terms: &[&str; 3], parse: fn(&str) -> Vec<usize>) -> PureState {
    let terms: Vec<(C64, Vec<usize>)> = terms.iter().map(|t| (one(), parse(t))).collect();
    PureState::superposition(radices, &terms)
}

pub fn qutrit_codeword(j: usize) -> PureState {
    codeword(&[3; 3], &QUTRIT_CODEWORDS[j], parse_qutrits)
}

pub fn six_photon_codeword(j: usize) -> PureState {
    codeword(&[2; 6], &SIX_PHOTON_CODEWORDS[j], parse_polarizations)
}

pub fn multiplexed_codeword(j: usize) -> PureState {
    codeword(&[4; 3], &MULTIPLEXED_CODEWORDS[j], parse_photons)
}

/// `alpha|0>_L + beta|1>_L + gamma|2>_L` built directly.
pub fn logical_state(codewords: &[PureState; 3], amps: [C64; 3]) -> PureState {
    let radices = codewords[0].radices().to_vec();
    let v = codewords
        .iter()
        .zip(amps)
        .fold(nalgebra::DVector::zeros(codewords[0].amplitudes().len()), |acc, (c, a)| {
            acc + c.amplitudes() * a
        });
    PureState::from_amplitudes(&radices, v.iter().copied().collect()).expect("same dimension")
}

pub fn random_qutrit(rng: &mut impl Rng) -> [C64; 3] {
    let mut v = [C64::new(0.0, 0.0); 3];
    for a in &mut v {
        *a = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.map(|a| a / n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Passes when at least `1 - tolerance`.
    Fidelity,
    /// Passes when at most the tolerance.
    OperatorError,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub metric: Metric,
    pub value: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn fidelity(&mut self, name: impl Into<String>, value: f64) {
        self.0.push(Check {
            name: name.into(),
            metric: Metric::Fidelity,
            value,
            passed: value >= 1.0 - FIDELITY_TOLERANCE,
        });
    }

    fn error(&mut self, name: impl Into<String>, value: f64) {
        self.0.push(Check {
            name: name.into(),
            metric: Metric::OperatorError,
            value,
            passed: value <= OPERATOR_TOLERANCE,
        });
    }
}

type Encoder = fn(C64, C64, C64) -> Result<PureState, CircuitError>;

fn basis_inputs() -> [[C64; 3]; 3] {
    let z = C64::new(0.0, 0.0);
    [[one(), z, z], [z, one(), z], [z, z, one()]]
}

fn encoder_checks(
    out: &mut Checks,
    label: &str,
    encode: Encoder,
    codewords: [PureState; 3],
    inputs: &[[C64; 3]],
) -> Result<(), CircuitError> {
    let mut encoded = Vec::new();
    for (j, amps) in basis_inputs().into_iter().enumerate() {
        let s = encode(amps[0], amps[1], amps[2])?;
        out.fidelity(format!("{label}: logical |{j}>"), s.fidelity(&codewords[j]));
        encoded.push(s);
    }
    let mut gram = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let expect = if i == j { 1.0 } else { 0.0 };
            gram = gram.max((encoded[i].inner(&encoded[j]) - C64::new(expect, 0.0)).norm());
        }
    }
    out.error(format!("{label}: codeword inner products"), gram);
    let mut worst = 1.0f64;
    let mut norm_drift = 0.0f64;
    for amps in inputs {
        let s = encode(amps[0], amps[1], amps[2])?;
        norm_drift = norm_drift.max((s.norm() - 1.0).abs());
        worst = worst.min(s.fidelity(&logical_state(&codewords, *amps)));
    }
    out.fidelity(format!("{label}: random inputs"), worst);
    out.error(format!("{label}: norm preserved"), norm_drift);
    Ok(())
}

fn qubit_of(photon: usize, dof: Dof) -> usize {
    2 * photon + usize::from(dof == Dof::TimeBin)
}

/// Run every check with random inputs drawn from `seed`.
pub fn verify_circuits(seed: u64) -> Result<VerificationReport, CircuitError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs: Vec<[C64; 3]> = (0..50).map(|_| random_qutrit(&mut rng)).collect();
    let mut out = Checks::default();

    encoder_checks(&mut out, "qutrit_encode", qutrit_encode, [0, 1, 2].map(qutrit_codeword), &inputs)?;

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let two = |a: f64, b: f64, t: f64| prepare_two_qubit_qutrit(C64::new(a, 0.0), C64::new(b, 0.0), t);
    let expected = |a: C64, b: C64, t: f64| {
        PureState::from_amplitudes(&[2, 2], vec![a, b * t.cos(), C64::new(0.0, 0.0), b * t.sin()])
            .expect("four amplitudes")
    };
    let e = expected(C64::new(s, 0.0), C64::new(s, 0.0), 0.0);
    out.fidelity("two-qubit qutrit: rotation off", two(s, s, 0.0)?.fidelity(&e));
    let e = expected(C64::new(0.6, 0.0), C64::new(0.8, 0.0), std::f64::consts::FRAC_PI_2);
    out.fidelity("two-qubit qutrit: full rotation", two(0.6, 0.8, std::f64::consts::FRAC_PI_2)?.fidelity(&e));
    let prepared = two(s, s, std::f64::consts::FRAC_PI_4)?;
    let target = [s, 0.5, 0.0, 0.5];
    let amp_err = prepared
        .amplitudes()
        .iter()
        .zip(target)
        .map(|(a, t)| (a - C64::new(t, 0.0)).norm())
        .fold(0.0, f64::max);
    out.error("two-qubit qutrit: equal split amplitudes", amp_err);
    let mut worst = 1.0f64;
    for _ in 0..20 {
        let [a, b, _] = random_qutrit(&mut rng);
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (a, b) = (a / n, b / n);
        let t = rng.gen_range(0.0..std::f64::consts::PI);
        worst = worst.min(prepare_two_qubit_qutrit(a, b, t)?.fidelity(&expected(a, b, t)));
    }
    out.fidelity("two-qubit qutrit: random inputs", worst);

    encoder_checks(&mut out, "six_photon_encode", six_photon_encode, [0, 1, 2].map(six_photon_codeword), &inputs)?;
    encoder_checks(&mut out, "multiplexed_encode", multiplexed_encode, [0, 1, 2].map(multiplexed_codeword), &inputs)?;

    let mut worst = 1.0f64;
    for amps in &inputs {
        let six = six_photon_encode(amps[0], amps[1], amps[2])?;
        let mux = multiplexed_encode(amps[0], amps[1], amps[2])?.reshaped(&[2; 6])?;
        worst = worst.min(six.fidelity(&mux));
    }
    out.fidelity("multiplexed equals six-photon under DOF relabeling", worst);

    let dofs = [Dof::Polarization, Dof::TimeBin];
    for c in dofs {
        for t in dofs {
            let name = |what: &str| format!("CNOT {c:?} -> {t:?}: {what}");
            let u = circuit_unitary(&[4, 4], &photon_pair_cnot(c, t));
            let ideal = circuit_unitary(&[2; 4], &[gates::cnot(qubit_of(0, c), qubit_of(1, t))]);
            out.error(name("matches ideal"), operator_error(&u, &ideal));
            let id = DMatrix::<C64>::identity(16, 16);
            out.error(name("involutive"), operator_error(&(&u * &u), &id));
            let reversed = circuit_unitary(&[4, 4], &dof_cnot(1, c, 0, t));
            let ideal = circuit_unitary(&[2; 4], &[gates::cnot(qubit_of(1, c), qubit_of(0, t))]);
            out.error(name("reversed photons"), operator_error(&reversed, &ideal));
        }
    }
    let native = photon_pair_cnot(Dof::Polarization, Dof::Polarization);
    out.error(
        "CNOT Polarization -> Polarization: single native gate",
        if native.len() == 1 { 0.0 } else { f64::INFINITY },
    );

    let split = circuit_unitary(&[4, 4], &toffoli_mode_split());
    let ideal = circuit_unitary(&[2; 4], &[gates::toffoli(2, 3, 0)]);
    out.error("mode-split Toffoli: full operator", operator_error(&split, &ideal));
    // pol1, pol2, tb2 block with tb1 = S.
    let idx = |k: usize| ((k >> 2) & 1) * 8 + (k & 3);
    let sub = DMatrix::from_fn(8, 8, |i, j| split[(idx(i), idx(j))]);
    let toffoli8 = circuit_unitary(&[2; 3], &[gates::toffoli(1, 2, 0)]);
    out.error("mode-split Toffoli: pol1 x pol2 x tb2 block", operator_error(&sub, &toffoli8));
    let flipped = PureState::basis(&[4, 4], &[gates::H_S, gates::V_L]).run(&toffoli_mode_split());
    out.fidelity(
        "mode-split Toffoli: both controls flip",
        flipped.fidelity(&PureState::basis(&[4, 4], &[gates::V_S, gates::V_L])),
    );
    let kept = PureState::basis(&[4, 4], &[gates::H_S, gates::V_S]).run(&toffoli_mode_split());
    out.fidelity(
        "mode-split Toffoli: S branch untouched",
        kept.fidelity(&PureState::basis(&[4, 4], &[gates::H_S, gates::V_S])),
    );

    for (c, tdof) in [(0, 2), (1, 2), (0, 3), (1, 3)] {
        let same = if tdof == 2 { 3 } else { 2 };
        let op = QubitOp::Toffoli(c, same, tdof);
        let lowered = circuit_unitary(&[4, 4], &lower(op)?);
        let ideal = circuit_unitary(&[2; 4], &[gates::toffoli(c, same, tdof)]);
        out.error(format!("lowered Toffoli {op:?}"), operator_error(&lowered, &ideal));
    }

    let mut all_ops = Vec::new();
    for op in encoding_ops() {
        let ideal = circuit_unitary(&[2; 6], &[super::encode::qubit_gate(op)]);
        let photonic = circuit_unitary(&[4; 3], &lower(op)?);
        all_ops.push(operator_error(&ideal, &photonic));
    }
    out.error("every encoding gate lowered exactly", all_ops.into_iter().fold(0.0, f64::max));

    let unitarity = qubit_encoding_gates()
        .iter()
        .chain(multiplexed_encoding_gates().iter())
        .map(|g| g.unitarity_error())
        .fold(0.0, f64::max);
    out.error("all encoding gates unitary", unitarity);

    Ok(VerificationReport { seed, checks: out.0 })
}

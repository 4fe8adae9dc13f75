//! Encoders for the three-qutrit code and their qubit and photonic realizations.
//!
//! Qutrits map to qubit pairs as 0 -> |00>, 1 -> |10>, 2 -> |11>
//! (|HH>, |VH>, |VV>). Pair `i` holds qubits `2i` and `2i + 1`; in the
//! multiplexed encoder those are the polarization and time bin of photon `i`.

use std::f64::consts::FRAC_PI_4;

use super::gates::{self, Dof, H_S, V_L, V_S};
use super::{check_normalized, CircuitError, Gate, PureState, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitOp {
    X(usize),
    Cnot(usize, usize),
    Toffoli(usize, usize, usize),
}

/// Add (`up`) or subtract one on the pair `(a, b)` when qubit `c` is set.
fn controlled_step(c: usize, (a, b): (usize, usize), up: bool) -> [QubitOp; 3] {
    use QubitOp::*;
    if up {
        [Toffoli(c, a, b), Toffoli(c, b, a), Cnot(c, a)]
    } else {
        [Cnot(c, a), Toffoli(c, b, a), Toffoli(c, a, b)]
    }
}

/// `target <- target +/- control (mod 3)` on qubit pairs.
fn pair_add(control: (usize, usize), target: (usize, usize), up: bool) -> Vec<QubitOp> {
    let mut ops = controlled_step(control.0, target, up).to_vec();
    ops.extend(controlled_step(control.1, target, up));
    ops
}

/// The qubit-level encoding circuit acting on three prepared pairs.
pub fn encoding_ops() -> Vec<QubitOp> {
    let (p1, p2, p3) = ((0, 1), (2, 3), (4, 5));
    let mut ops = pair_add(p1, p2, false);
    ops.extend(pair_add(p3, p2, true));
    ops.extend(pair_add(p3, p1, true));
    ops
}

pub fn qubit_gate(op: QubitOp) -> Gate {
    match op {
        QubitOp::X(q) => gates::x(q),
        QubitOp::Cnot(c, t) => gates::cnot(c, t),
        QubitOp::Toffoli(c1, c2, t) => gates::toffoli(c1, c2, t),
    }
}

fn photon_dof(q: usize) -> (usize, Dof) {
    (q / 2, if q.is_multiple_of(2) { Dof::Polarization } else { Dof::TimeBin })
}

/// CNOT between arbitrary DOFs of two photons, built from the native
/// polarization CNOT and single-photon mode swaps.
pub fn dof_cnot(control: usize, cdof: Dof, target: usize, tdof: Dof) -> Vec<Gate> {
    match (cdof, tdof) {
        (Dof::Polarization, Dof::Polarization) => vec![gates::native_cnot(control, target)],
        (Dof::Polarization, Dof::TimeBin) => vec![
            gates::swap_levels(target, H_S, V_L),
            gates::native_cnot(control, target),
            gates::swap_levels(target, H_S, V_L),
        ],
        (Dof::TimeBin, rest) => {
            let mut out = vec![gates::dof_swap(control)];
            out.extend(dof_cnot(control, Dof::Polarization, target, rest));
            out.push(gates::dof_swap(control));
            out
        }
    }
}

/// CNOT between two photons, photon 0 controlling photon 1.
pub fn photon_pair_cnot(control: Dof, target: Dof) -> Vec<Gate> {
    dof_cnot(0, control, 1, target)
}

/// Toffoli with controls (pol, tb = L) of photon 1 and target pol of photon 0.
pub fn toffoli_mode_split() -> Vec<Gate> {
    vec![gates::mode_split_cnot(1, 0)]
}

/// Toffoli whose target shares a photon with one control. Single-qubit
/// rotations around one mode-split CNOT.
fn split_toffoli(other: usize, odof: Dof, photon: usize, tdof: Dof) -> Vec<Gate> {
    let mut core = vec![gates::pol_hadamard(other), gates::pol_hadamard(photon)];
    core.push(gates::mode_split_cnot(photon, other));
    core.extend([gates::pol_hadamard(other), gates::pol_hadamard(photon)]);
    let wrap = |inner: Vec<Gate>, swap: Gate| {
        let mut v = vec![swap.clone()];
        v.extend(inner);
        v.push(swap);
        v
    };
    if tdof == Dof::TimeBin {
        core = wrap(core, gates::dof_swap(photon));
    }
    if odof == Dof::TimeBin {
        core = wrap(core, gates::dof_swap(other));
    }
    core
}

/// Intra-photon gate from a qubit gate whose qubits all sit on one photon.
fn local_photon_gate(photon: usize, op: QubitOp) -> Gate {
    let gate = qubit_gate(op);
    let remap: Vec<usize> = gate.targets().iter().map(|q| q % 2).collect();
    let local = Gate::new("local", &remap, &vec![2; remap.len()], gate.matrix().clone());
    let m = super::circuit_unitary(&[2, 2], &[local]);
    Gate::new(format!("{}@{photon}", gate.name), &[photon], &[4], m)
}

/// Photonic realization of one qubit gate.
pub fn lower(op: QubitOp) -> Result<Vec<Gate>, CircuitError> {
    match op {
        QubitOp::X(q) => {
            let (p, dof) = photon_dof(q);
            Ok(vec![gates::flip(p, dof)])
        }
        QubitOp::Cnot(c, t) => {
            let ((pc, dc), (pt, dt)) = (photon_dof(c), photon_dof(t));
            if pc == pt {
                Ok(vec![local_photon_gate(pc, op)])
            } else {
                Ok(dof_cnot(pc, dc, pt, dt))
            }
        }
        QubitOp::Toffoli(c1, c2, t) => {
            let (pt, dt) = photon_dof(t);
            let (p1, d1) = photon_dof(c1);
            let (p2, d2) = photon_dof(c2);
            match (p1 == pt, p2 == pt) {
                (true, true) => Ok(vec![local_photon_gate(pt, op)]),
                (false, true) => Ok(split_toffoli(p1, d1, pt, dt)),
                (true, false) => Ok(split_toffoli(p2, d2, pt, dt)),
                (false, false) => Err(CircuitError::UnsupportedLayout(vec![c1, c2, t])),
            }
        }
    }
}

fn qutrit_amplitudes(alpha: C64, beta: C64, gamma: C64) -> Result<[C64; 3], CircuitError> {
    let amps = [alpha, beta, gamma];
    check_normalized(&amps)?;
    Ok(amps)
}

/// Three-qutrit encoding of `alpha|0> + beta|1> + gamma|2>`.
pub fn qutrit_encode(alpha: C64, beta: C64, gamma: C64) -> Result<PureState, CircuitError> {
    let amps = qutrit_amplitudes(alpha, beta, gamma)?;
    let psi = PureState::from_amplitudes(&[3], amps.to_vec())?;
    let zero = PureState::basis(&[3], &[0]);
    let uniform = PureState::from_amplitudes(&[3], vec![C64::new(1.0 / 3f64.sqrt(), 0.0); 3])?;
    let state = psi.tensor(&zero).tensor(&uniform);
    Ok(state.run(&[
        gates::qutrit_sub(0, 1),
        gates::qutrit_add(2, 1),
        gates::qutrit_add(2, 0),
    ]))
}

/// `alpha|00> + beta cos(theta)|01> + beta sin(theta)|11>` from `(alpha|0> + beta|1>)|0>`.
pub fn prepare_two_qubit_qutrit(alpha: C64, beta: C64, theta: f64) -> Result<PureState, CircuitError> {
    check_normalized(&[alpha, beta])?;
    let input = PureState::from_amplitudes(&[2], vec![alpha, beta])?.tensor(&PureState::basis(&[2], &[0]));
    Ok(input.run(&[
        gates::cnot(0, 1),
        gates::rotation(1, theta).controlled_by(0, 2, &[1]),
        gates::cnot(0, 1),
        gates::swap(0, 1),
    ]))
}

/// Preparation parameters `(alpha, b, theta, phi)` with
/// `b cos(theta) = beta` and `e^{i phi} b sin(theta) = gamma`.
fn split_parameters(alpha: C64, beta: C64, gamma: C64) -> (C64, C64, f64, f64) {
    let rest = (beta.norm_sqr() + gamma.norm_sqr()).sqrt();
    let b = C64::from_polar(rest, beta.arg());
    let theta = gamma.norm().atan2(beta.norm());
    (alpha, b, theta, gamma.arg() - beta.arg())
}

fn uniform_parameters() -> (C64, C64, f64, f64) {
    (
        C64::new(1.0 / 3f64.sqrt(), 0.0),
        C64::new((2.0 / 3.0f64).sqrt(), 0.0),
        FRAC_PI_4,
        0.0,
    )
}

pub fn qubit_encoding_gates() -> Vec<Gate> {
    encoding_ops().into_iter().map(qubit_gate).collect()
}

/// Six-qubit (six polarized photons) encoding.
pub fn six_photon_encode(alpha: C64, beta: C64, gamma: C64) -> Result<PureState, CircuitError> {
    let [alpha, beta, gamma] = qutrit_amplitudes(alpha, beta, gamma)?;
    let (a, b, theta, phi) = split_parameters(alpha, beta, gamma);
    let (ua, ub, utheta, _) = uniform_parameters();
    let first = prepare_two_qubit_qutrit(a, b, theta)?;
    let third = prepare_two_qubit_qutrit(ua, ub, utheta)?;
    let state = first
        .tensor(&PureState::basis(&[2, 2], &[0, 0]))
        .tensor(&third);
    let mut circuit = vec![
        gates::swap(0, 1),
        gates::phase(1, phi).controlled_by(0, 2, &[1]),
        gates::swap(4, 5),
    ];
    circuit.extend(qubit_encoding_gates());
    Ok(state.run(&circuit))
}

/// One photon carrying `alpha H_S + b cos V_S + e^{i phi} b sin V_L`.
fn photon_qutrit_gates(photon: usize, theta: f64, phi: f64) -> Vec<Gate> {
    vec![
        gates::swap_levels(photon, V_S, V_L),
        gates::late_branch_rotation(photon, theta),
        gates::dof_swap(photon),
        gates::level_phase(photon, V_L, phi),
    ]
}

fn photon_input(alpha: C64, b: C64) -> PureState {
    let mut amps = vec![C64::new(0.0, 0.0); 4];
    amps[H_S] = alpha;
    amps[V_S] = b;
    PureState::from_amplitudes(&[4], amps).expect("four levels")
}

pub fn multiplexed_encoding_gates() -> Vec<Gate> {
    encoding_ops()
        .into_iter()
        .flat_map(|op| lower(op).expect("every encoding gate has a lowering"))
        .collect()
}

/// Three photons, each carrying one qutrit in polarization and time bin.
pub fn multiplexed_encode(alpha: C64, beta: C64, gamma: C64) -> Result<PureState, CircuitError> {
    let [alpha, beta, gamma] = qutrit_amplitudes(alpha, beta, gamma)?;
    let (a, b, theta, phi) = split_parameters(alpha, beta, gamma);
    let (ua, ub, utheta, uphi) = uniform_parameters();
    let state = photon_input(a, b)
        .tensor(&PureState::basis(&[4], &[H_S]))
        .tensor(&photon_input(ua, ub));
    let mut circuit = photon_qutrit_gates(0, theta, phi);
    circuit.extend(photon_qutrit_gates(2, utheta, uphi));
    circuit.extend(multiplexed_encoding_gates());
    Ok(state.run(&circuit))
}

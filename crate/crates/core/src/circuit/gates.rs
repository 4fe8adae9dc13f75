//! Gate library for qubits, qutrits and two-DOF photons.

use nalgebra::DMatrix;

use super::{Gate, C64};

pub const H_S: usize = 0;
pub const H_L: usize = 1;
pub const V_S: usize = 2;
pub const V_L: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dof {
    Polarization,
    TimeBin,
}

impl Dof {
    /// Value of this qubit in a photon level.
    pub fn bit(self, level: usize) -> usize {
        match self {
            Dof::Polarization => level >> 1,
            Dof::TimeBin => level & 1,
        }
    }

    fn flip(self, level: usize) -> usize {
        match self {
            Dof::Polarization => level ^ 2,
            Dof::TimeBin => level ^ 1,
        }
    }
}

fn real(rows: usize, data: &[f64]) -> DMatrix<C64> {
    DMatrix::from_row_iterator(rows, rows, data.iter().map(|&x| C64::new(x, 0.0)))
}

pub fn x(q: usize) -> Gate {
    Gate::permutation("x", &[q], &[2], |d| vec![1 - d[0]])
}

pub fn hadamard(q: usize) -> Gate {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Gate::new("h", &[q], &[2], real(2, &[s, s, s, -s]))
}

/// `[[cos, sin], [-sin, cos]]`, so `|1> -> sin|0> + cos|1>`.
pub fn rotation(q: usize, theta: f64) -> Gate {
    let (s, c) = theta.sin_cos();
    Gate::new("ry", &[q], &[2], real(2, &[c, s, -s, c]))
}

/// Phase `e^{i phi}` on `|1>`.
pub fn phase(q: usize, phi: f64) -> Gate {
    let mut m = DMatrix::identity(2, 2);
    m[(1, 1)] = C64::from_polar(1.0, phi);
    Gate::new("phase", &[q], &[2], m)
}

pub fn cnot(c: usize, t: usize) -> Gate {
    x(t).controlled_by(c, 2, &[1])
}

pub fn toffoli(c1: usize, c2: usize, t: usize) -> Gate {
    cnot(c2, t).controlled_by(c1, 2, &[1])
}

pub fn swap(a: usize, b: usize) -> Gate {
    Gate::permutation("swap", &[a, b], &[2, 2], |d| vec![d[1], d[0]])
}

/// `t <- t + c (mod 3)`.
pub fn qutrit_add(c: usize, t: usize) -> Gate {
    Gate::permutation("cadd3", &[c, t], &[3, 3], |d| vec![d[0], (d[1] + d[0]) % 3])
}

/// `t <- t - c (mod 3)`.
pub fn qutrit_sub(c: usize, t: usize) -> Gate {
    Gate::permutation("csub3", &[c, t], &[3, 3], |d| vec![d[0], (d[1] + 3 - d[0]) % 3])
}

/// Exchange two modes of one photon.
pub fn swap_levels(photon: usize, a: usize, b: usize) -> Gate {
    Gate::permutation(format!("swap{a}{b}"), &[photon], &[4], |d| {
        let l = d[0];
        vec![if l == a {
            b
        } else if l == b {
            a
        } else {
            l
        }]
    })
}

/// Exchanges the photon's polarization and time-bin qubits (`H_L <-> V_S`).
pub fn dof_swap(photon: usize) -> Gate {
    swap_levels(photon, H_L, V_S)
}

pub fn flip(photon: usize, dof: Dof) -> Gate {
    Gate::permutation("flip", &[photon], &[4], |d| vec![dof.flip(d[0])])
}

pub fn pol_hadamard(photon: usize) -> Gate {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = DMatrix::zeros(4, 4);
    for tb in 0..2 {
        let (h, v) = (tb, 2 + tb);
        m[(h, h)] = C64::new(s, 0.0);
        m[(h, v)] = C64::new(s, 0.0);
        m[(v, h)] = C64::new(s, 0.0);
        m[(v, v)] = C64::new(-s, 0.0);
    }
    Gate::new("pol_h", &[photon], &[4], m)
}

/// Phase `e^{i phi}` on a single mode.
pub fn level_phase(photon: usize, level: usize, phi: f64) -> Gate {
    let mut m = DMatrix::identity(4, 4);
    m[(level, level)] = C64::from_polar(1.0, phi);
    Gate::new("phase", &[photon], &[4], m)
}

/// Polarization rotation on the L branch: `V_L -> cos H_L + sin V_L`.
pub fn late_branch_rotation(photon: usize, theta: f64) -> Gate {
    let (s, c) = theta.sin_cos();
    let mut m = DMatrix::identity(4, 4);
    m[(H_L, H_L)] = C64::new(s, 0.0);
    m[(V_L, H_L)] = C64::new(-c, 0.0);
    m[(H_L, V_L)] = C64::new(c, 0.0);
    m[(V_L, V_L)] = C64::new(s, 0.0);
    Gate::new("late_rot", &[photon], &[4], m)
}

/// Native photon-photon interaction: CNOT from the control's polarization
/// onto the target's polarization.
pub fn native_cnot(control: usize, target: usize) -> Gate {
    Gate::permutation("pol_cnot", &[control, target], &[4, 4], |d| {
        let t = if Dof::Polarization.bit(d[0]) == 1 {
            Dof::Polarization.flip(d[1])
        } else {
            d[1]
        };
        vec![d[0], t]
    })
}

/// Optical-switch split of `split` by time bin, with the native CNOT
/// (`split` polarization onto `target` polarization) on the L branch only.
pub fn mode_split_cnot(split: usize, target: usize) -> Gate {
    Gate::permutation("split_cnot", &[split, target], &[4, 4], |d| {
        let active = d[0] == V_L;
        vec![d[0], if active { Dof::Polarization.flip(d[1]) } else { d[1] }]
    })
}

#[cfg(test)]
mod tests {
    use super::super::{circuit_unitary, PureState};
    use super::*;

    #[test]
    fn all_gates_unitary() {
        let gates = [
            x(0),
            hadamard(0),
            rotation(0, 0.3),
            phase(0, 1.1),
            cnot(0, 1),
            toffoli(0, 1, 2),
            swap(0, 1),
            qutrit_add(0, 1),
            qutrit_sub(1, 0),
            dof_swap(0),
            pol_hadamard(0),
            level_phase(0, V_L, 0.4),
            late_branch_rotation(0, 0.7),
            native_cnot(0, 1),
            mode_split_cnot(1, 0),
        ];
        for g in &gates {
            assert!(g.unitarity_error() < 1e-12, "{}", g.name);
        }
    }

    #[test]
    fn qutrit_cx_table() {
        let cx = qutrit_sub(0, 1);
        for (c, t) in [(0, 0), (1, 2), (2, 1)] {
            let s = PureState::basis(&[3, 3], &[c, 0]).run(std::slice::from_ref(&cx));
            assert_eq!(s.amplitude(&[c, t]).re, 1.0);
        }
    }

    #[test]
    fn pol_hadamard_matches_qubit_hadamard() {
        let photon = circuit_unitary(&[4], &[pol_hadamard(0)]);
        let qubits = circuit_unitary(&[2, 2], &[hadamard(0)]);
        assert!((photon - qubits).norm() < 1e-15);
    }

    #[test]
    fn dof_swap_is_qubit_swap() {
        let photon = circuit_unitary(&[4], &[dof_swap(0)]);
        let qubits = circuit_unitary(&[2, 2], &[swap(0, 1)]);
        assert_eq!(photon, qubits);
    }
}

//! Mixed-radix state-vector simulation of the small encoding circuits.
//!
//! Subsystem 0 is the most significant digit of a basis index. A
//! multiplexed photon is one radix-4 subsystem with digit `2 * pol + tb`
//! (H = 0, V = 1, S = 0, L = 1), so its flat index agrees with the
//! qubit pair (pol, tb).

use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

pub mod encode;
pub mod gates;
pub mod verify;

pub type C64 = Complex<f64>;

pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
pub enum CircuitError {
    #[error("input amplitudes have squared norm {0}, expected 1")]
    NonNormalizedInput(f64),
    #[error("expected {expected} amplitudes, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no photonic lowering for a gate on qubits {0:?}")]
    UnsupportedLayout(Vec<usize>),
}

pub fn check_normalized(amps: &[C64]) -> Result<(), CircuitError> {
    let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if (n - 1.0).abs() > NORM_TOLERANCE {
        return Err(CircuitError::NonNormalizedInput(n));
    }
    Ok(())
}

fn dimension(radices: &[usize]) -> usize {
    radices.iter().product()
}

fn strides(radices: &[usize]) -> Vec<usize> {
    let mut s = vec![1; radices.len()];
    for i in (0..radices.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * radices[i + 1];
    }
    s
}

/// Mixed-radix digits of `index`, most significant first.
pub fn digits(mut index: usize, radices: &[usize]) -> Vec<usize> {
    let mut d = vec![0; radices.len()];
    for i in (0..radices.len()).rev() {
        d[i] = index % radices[i];
        index /= radices[i];
    }
    d
}

pub fn index_of(digits: &[usize], radices: &[usize]) -> usize {
    digits.iter().zip(radices).fold(0, |acc, (&d, &r)| acc * r + d)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    radices: Vec<usize>,
    amplitudes: DVector<C64>,
}

impl PureState {
    pub fn basis(radices: &[usize], digits: &[usize]) -> Self {
        let mut amps = DVector::zeros(dimension(radices));
        amps[index_of(digits, radices)] = C64::new(1.0, 0.0);
        PureState {
            radices: radices.to_vec(),
            amplitudes: amps,
        }
    }

    pub fn from_amplitudes(radices: &[usize], amps: Vec<C64>) -> Result<Self, CircuitError> {
        let expected = dimension(radices);
        if amps.len() != expected {
            return Err(CircuitError::DimensionMismatch {
                expected,
                found: amps.len(),
            });
        }
        Ok(PureState {
            radices: radices.to_vec(),
            amplitudes: DVector::from_vec(amps),
        })
    }

    /// Normalized sum of weighted basis states.
    pub fn superposition(radices: &[usize], terms: &[(C64, Vec<usize>)]) -> Self {
        let mut amps = DVector::zeros(dimension(radices));
        for (c, d) in terms {
            amps[index_of(d, radices)] += *c;
        }
        PureState {
            radices: radices.to_vec(),
            amplitudes: amps,
        }
        .normalized()
    }

    pub fn tensor(&self, other: &PureState) -> Self {
        let mut radices = self.radices.clone();
        radices.extend(&other.radices);
        let amps = self.amplitudes.kronecker(&other.amplitudes);
        PureState {
            radices,
            amplitudes: amps,
        }
    }

    pub fn radices(&self) -> &[usize] {
        &self.radices
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, digits: &[usize]) -> C64 {
        self.amplitudes[index_of(digits, &self.radices)]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.amplitudes /= C64::new(n, 0.0);
        }
        self
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|<self|other>|^2`; insensitive to global phase.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        if self.radices != other.radices {
            return 0.0;
        }
        self.inner(other).norm_sqr()
    }

    /// Same amplitudes read under different radices of equal total dimension.
    pub fn reshaped(&self, radices: &[usize]) -> Result<Self, CircuitError> {
        Self::from_amplitudes(radices, self.amplitudes.iter().copied().collect())
    }

    pub fn apply(&mut self, gate: &Gate) {
        let strides = strides(&self.radices);
        let offsets: Vec<usize> = (0..gate.matrix.nrows())
            .map(|j| {
                digits(j, &gate.radices)
                    .iter()
                    .zip(&gate.targets)
                    .map(|(&d, &t)| d * strides[t])
                    .sum()
            })
            .collect();
        let mut local = DVector::<C64>::zeros(offsets.len());
        for base in 0..self.amplitudes.len() {
            let on_zero = gate
                .targets
                .iter()
                .all(|&t| (base / strides[t]).is_multiple_of(self.radices[t]));
            if !on_zero {
                continue;
            }
            for (j, &o) in offsets.iter().enumerate() {
                local[j] = self.amplitudes[base + o];
            }
            let out = &gate.matrix * &local;
            for (j, &o) in offsets.iter().enumerate() {
                self.amplitudes[base + o] = out[j];
            }
        }
    }

    pub fn run(mut self, gates: &[Gate]) -> Self {
        for g in gates {
            self.apply(g);
        }
        self
    }
}

/// A unitary on an ordered list of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub name: String,
    targets: Vec<usize>,
    radices: Vec<usize>,
    matrix: DMatrix<C64>,
}

impl Gate {
    /// # Panics
    /// If the matrix does not match the target radices or targets repeat.
    pub fn new(name: impl Into<String>, targets: &[usize], radices: &[usize], matrix: DMatrix<C64>) -> Self {
        let dim = dimension(radices);
        assert_eq!(targets.len(), radices.len());
        assert_eq!((matrix.nrows(), matrix.ncols()), (dim, dim));
        for (i, t) in targets.iter().enumerate() {
            assert!(!targets[..i].contains(t), "repeated target {t}");
        }
        Gate {
            name: name.into(),
            targets: targets.to_vec(),
            radices: radices.to_vec(),
            matrix,
        }
    }

    /// Basis permutation `|x> -> |f(x)>` on the targets' digits.
    pub fn permutation(
        name: impl Into<String>,
        targets: &[usize],
        radices: &[usize],
        f: impl Fn(&[usize]) -> Vec<usize>,
    ) -> Self {
        let dim = dimension(radices);
        let mut m = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let image = f(&digits(j, radices));
            m[(index_of(&image, radices), j)] = C64::new(1.0, 0.0);
        }
        Gate::new(name, targets, radices, m)
    }

    /// Apply `self` only when subsystem `control` holds one of `active`.
    pub fn controlled_by(&self, control: usize, radix: usize, active: &[usize]) -> Self {
        let inner = self.matrix.nrows();
        let dim = radix * inner;
        let mut m = DMatrix::identity(dim, dim);
        for &v in active {
            m.view_mut((v * inner, v * inner), (inner, inner))
                .copy_from(&self.matrix);
        }
        let mut targets = vec![control];
        targets.extend(&self.targets);
        let mut radices = vec![radix];
        radices.extend(&self.radices);
        Gate::new(format!("c[{control}]{}", self.name), &targets, &radices, m)
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn unitarity_error(&self) -> f64 {
        let n = self.matrix.nrows();
        (self.matrix.adjoint() * &self.matrix - DMatrix::<C64>::identity(n, n)).norm()
    }
}

/// Full operator of a gate sequence on `radices`; column `j` is the image of basis `j`.
pub fn circuit_unitary(radices: &[usize], gates: &[Gate]) -> DMatrix<C64> {
    let dim = dimension(radices);
    let mut u = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let out = PureState::basis(radices, &digits(j, radices)).run(gates);
        u.set_column(j, out.amplitudes());
    }
    u
}

/// Frobenius norm of `a - b`.
pub fn operator_error(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).norm()
}

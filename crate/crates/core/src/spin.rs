//! Spin-1/2 operators and states.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{kron, DimensionSpec, Operator, StateVector, C64};

fn qubit(label: &str) -> DimensionSpec {
    DimensionSpec::single(label, 2).expect("qubit dims are valid")
}

fn op(label: &str, entries: [C64; 4]) -> Operator {
    Operator::new(qubit(label), DMatrix::from_row_slice(2, 2, &entries)).expect("2x2 operator")
}

const O: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub fn sigma_x(label: &str) -> Operator {
    op(label, [O, ONE, ONE, O])
}

pub fn sigma_y(label: &str) -> Operator {
    op(label, [O, -I, I, O])
}

pub fn sigma_z(label: &str) -> Operator {
    op(label, [ONE, O, O, -ONE])
}

pub fn identity(label: &str) -> Operator {
    Operator::identity(qubit(label))
}

/// Projector `|psi><psi|` as an operator.
pub fn projector(state: &StateVector) -> Operator {
    let a = state.amplitudes();
    Operator::new(state.dims().clone(), a * a.adjoint()).expect("projector dims")
}

/// `cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>`.
pub fn spin_state(label: &str, theta: f64, phi: f64) -> StateVector {
    let amps = [C64::new((theta / 2.0).cos(), 0.0), C64::from_polar((theta / 2.0).sin(), phi)];
    StateVector::from_slice(qubit(label), &amps).expect("unit spinor")
}

pub fn up(label: &str) -> StateVector {
    StateVector::from_slice(qubit(label), &[ONE, O]).expect("unit spinor")
}

pub fn down(label: &str) -> StateVector {
    StateVector::from_slice(qubit(label), &[O, ONE]).expect("unit spinor")
}

pub fn plus_x(label: &str) -> StateVector {
    spin_state(label, std::f64::consts::FRAC_PI_2, 0.0)
}

pub fn minus_x(label: &str) -> StateVector {
    spin_state(label, std::f64::consts::FRAC_PI_2, std::f64::consts::PI)
}

/// `(|00> + |11>)/sqrt 2`.
pub fn bell_phi_plus(a: &str, b: &str) -> StateVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let dims = DimensionSpec::new([(a, 2), (b, 2)]).expect("distinct labels");
    StateVector::new(dims, DVector::from_column_slice(&[C64::new(s, 0.0), O, O, C64::new(s, 0.0)])).expect("unit state")
}

/// `cos(theta)|up,down> - e^{i phi} sin(theta)|down,up>`; the singlet is
/// `theta = pi/4, phi = 0`. Spans the `C_z = -1` eigenspace.
pub fn anticorrelated(a: &str, b: &str, theta: f64, phi: f64) -> Result<StateVector> {
    let dims = DimensionSpec::new([(a, 2), (b, 2)])?;
    StateVector::new(
        dims,
        DVector::from_column_slice(&[O, C64::new(theta.cos(), 0.0), -C64::from_polar(theta.sin(), phi), O]),
    )
}

pub fn singlet(a: &str, b: &str) -> StateVector {
    anticorrelated(a, b, std::f64::consts::FRAC_PI_4, 0.0).expect("distinct labels")
}

/// Correlation operator `(sigma_z)_a (sigma_z)_b`.
pub fn correlation_z(a: &str, b: &str) -> Result<Operator> {
    kron(&sigma_z(a), &sigma_z(b))
}

/// Named single-qubit observable used in configuration files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn operator(self, label: &str) -> Operator {
        match self {
            Pauli::X => sigma_x(label),
            Pauli::Y => sigma_y(label),
            Pauli::Z => sigma_z(label),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::X => "x",
            Pauli::Y => "y",
            Pauli::Z => "z",
        };
        f.write_str(s)
    }
}

impl FromStr for Pauli {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" | "sx" | "sigma_x" => Ok(Pauli::X),
            "y" | "sy" | "sigma_y" => Ok(Pauli::Y),
            "z" | "sz" | "sigma_z" => Ok(Pauli::Z),
            other => Err(Error::Config(format!("unknown Pauli observable `{other}`"))),
        }
    }
}

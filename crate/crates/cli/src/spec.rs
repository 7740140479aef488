//! Gate specifications accepted on the command line.

use gatepower::linalg::c;
use gatepower::{CartanForm, CartanParams, Mat4, NamedGate, SU2Params, Unitary4};

use crate::error::{CliError, CliResult};

/// Unitarity tolerance for explicitly typed matrices.
pub const MATRIX_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum GateSpec {
    Named(NamedGate),
    Matrix(Mat4),
    Cartan(CartanForm),
}

/// Splits on commas and whitespace and parses every token as a float.
pub fn parse_numbers(s: &str) -> CliResult<Vec<f64>> {
    s.split(|ch: char| ch == ',' || ch.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| CliError::Parse(format!("`{t}` is not a number"))))
        .collect()
}

impl GateSpec {
    pub fn parse_named(s: &str) -> CliResult<Self> {
        Ok(GateSpec::Named(s.parse::<NamedGate>()?))
    }

    /// 16 row-major entries, each given as a `re, im` pair.
    pub fn parse_matrix(s: &str) -> CliResult<Self> {
        let v = parse_numbers(s)?;
        if v.len() != 32 {
            return Err(CliError::Parse(format!("a matrix needs 32 numbers (16 re,im pairs), got {}", v.len())));
        }
        let m = Mat4(std::array::from_fn(|i| std::array::from_fn(|j| c(v[8 * i + 2 * j], v[8 * i + 2 * j + 1]))));
        Ok(GateSpec::Matrix(m))
    }

    /// Kernel coefficients (ax, ay, az), optionally followed by the angles
    /// (θ, φ, ψ) of U_A and U_B (9 numbers) or of V_A, V_B, U_A, U_B
    /// (15 numbers).
    pub fn parse_cartan(s: &str) -> CliResult<Self> {
        let v = parse_numbers(s)?;
        let su = |k: usize| SU2Params::new(v[k], v[k + 1], v[k + 2]);
        let alpha = CartanParams::new(v.first().copied().unwrap_or(0.0), v.get(1).copied().unwrap_or(0.0), v.get(2).copied().unwrap_or(0.0));
        let id = SU2Params::identity();
        let form = match v.len() {
            3 => CartanForm::kernel_only(alpha),
            9 => CartanForm { ua: su(3), ub: su(6), alpha, va: id, vb: id },
            15 => CartanForm { va: su(3), vb: su(6), ua: su(9), ub: su(12), alpha },
            n => return Err(CliError::Parse(format!("Cartan parameters come in 3, 9 or 15 numbers, got {n}"))),
        };
        Ok(GateSpec::Cartan(form))
    }

    /// Builds a spec from the mutually exclusive gate flags.
    pub fn from_flags(gate: Option<&str>, matrix: Option<&str>, cartan: Option<&str>) -> CliResult<Self> {
        match (gate, matrix, cartan) {
            (Some(g), None, None) => Self::parse_named(g),
            (None, Some(m), None) => Self::parse_matrix(m),
            (None, None, Some(p)) => Self::parse_cartan(p),
            (None, None, None) => Err(CliError::Usage("one of --gate, --matrix or --cartan is required".into())),
            _ => Err(CliError::Usage("--gate, --matrix and --cartan are mutually exclusive".into())),
        }
    }

    pub fn unitary(&self) -> CliResult<Unitary4> {
        Ok(match self {
            GateSpec::Named(g) => g.unitary(),
            GateSpec::Matrix(m) => Unitary4::with_tolerance(*m, MATRIX_TOL)?,
            GateSpec::Cartan(f) => f.unitary(),
        })
    }

    pub fn label(&self) -> String {
        match self {
            GateSpec::Named(g) => g.label().to_string(),
            GateSpec::Matrix(_) => "matrix".to_string(),
            GateSpec::Cartan(f) => {
                format!("cartan({:.4}, {:.4}, {:.4})", f.alpha.ax, f.alpha.ay, f.alpha.az)
            }
        }
    }
}

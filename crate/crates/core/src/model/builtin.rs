use crate::linalg::{c64, outer, ComplexMatrix, C64};
use crate::superop::SuperOp;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuiltinError {
    #[error("unknown builtin `{0}`")]
    Unknown(String),
    #[error("builtin `{name}` takes {expected} argument(s), got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("builtin `{name}` is only defined for dimension {required}, model has {dim}")]
    Dimension {
        name: String,
        required: usize,
        dim: usize,
    },
    #[error("state vector has length {found}, expected {expected}")]
    VectorLength { expected: usize, found: usize },
    #[error("state vector cannot be normalized")]
    NotNormalizable,
}

pub const BUILTIN_NAMES: [&str; 7] = [
    "identity",
    "zero",
    "pauli_x",
    "pauli_y",
    "pauli_z",
    "proj",
    "set_state",
];

/// Instantiates a named primitive channel on a `dim`-dimensional space.
///
/// | name        | Kraus set                    |
/// |-------------|------------------------------|
/// | `identity`  | `{I}`                        |
/// | `zero`      | `{}`                         |
/// | `pauli_x`   | `{X}` (qubits only)          |
/// | `pauli_y`   | `{Y}` (qubits only)          |
/// | `pauli_z`   | `{Z}` (qubits only)          |
/// | `proj(v)`   | `{|v⟩⟨v|}`, `v` normalized   |
/// | `set_state(v)` | `{|v⟩⟨i| : i = 0..d}`     |
pub fn builtin_superop(name: &str, args: &[Vec<C64>], dim: usize) -> Result<SuperOp, BuiltinError> {
    let arity = match name {
        "identity" | "zero" | "pauli_x" | "pauli_y" | "pauli_z" => 0,
        "proj" | "set_state" => 1,
        other => return Err(BuiltinError::Unknown(other.to_string())),
    };
    if args.len() != arity {
        return Err(BuiltinError::Arity {
            name: name.to_string(),
            expected: arity,
            found: args.len(),
        });
    }
    let qubit_only = |m: ComplexMatrix| {
        if dim == 2 {
            Ok(SuperOp::from_kraus(vec![m]).expect("2×2 Kraus operator"))
        } else {
            Err(BuiltinError::Dimension {
                name: name.to_string(),
                required: 2,
                dim,
            })
        }
    };
    let zero = c64(0.0, 0.0);
    let one = c64(1.0, 0.0);
    let i = c64(0.0, 1.0);
    match name {
        "identity" => Ok(SuperOp::identity(dim)),
        "zero" => Ok(SuperOp::zero(dim)),
        "pauli_x" => qubit_only(ComplexMatrix::from_row_slice(2, 2, &[zero, one, one, zero])),
        "pauli_y" => qubit_only(ComplexMatrix::from_row_slice(2, 2, &[zero, -i, i, zero])),
        "pauli_z" => qubit_only(ComplexMatrix::from_row_slice(2, 2, &[one, zero, zero, -one])),
        "proj" => {
            let v = normalized(&args[0], dim)?;
            Ok(SuperOp::from_kraus(vec![outer(&v, &v)]).expect("square projector"))
        }
        "set_state" => {
            let v = normalized(&args[0], dim)?;
            let kraus = (0..dim)
                .map(|k| {
                    let mut basis = vec![zero; dim];
                    basis[k] = one;
                    outer(&v, &basis)
                })
                .collect();
            Ok(SuperOp::from_kraus(kraus).expect("square Kraus operators"))
        }
        _ => unreachable!(),
    }
}

fn normalized(v: &[C64], dim: usize) -> Result<Vec<C64>, BuiltinError> {
    if v.len() != dim {
        return Err(BuiltinError::VectorLength {
            expected: dim,
            found: v.len(),
        });
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !norm.is_finite() || norm < 1e-12 {
        return Err(BuiltinError::NotNormalizable);
    }
    Ok(v.iter().map(|z| z / norm).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::superop::real_matrix;

    fn v(re: &[f64]) -> Vec<C64> {
        re.iter().map(|&x| c64(x, 0.0)).collect()
    }

    #[test]
    fn proj_zero_is_e0() {
        let e0 = builtin_superop("proj", &[v(&[1.0, 0.0])], 2).unwrap();
        assert_eq!(e0.kraus().unwrap(), &[real_matrix(2, &[1.0, 0.0, 0.0, 0.0])]);
    }

    #[test]
    fn set_state_plus_matches_kraus_pair() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let f = builtin_superop("set_state", &[v(&[h, h])], 2).unwrap();
        let expected = SuperOp::from_kraus(vec![
            real_matrix(2, &[h, 0.0, h, 0.0]),
            real_matrix(2, &[0.0, h, 0.0, h]),
        ])
        .unwrap();
        assert!(max_abs_diff(f.matrix_rep(), expected.matrix_rep()) < 1e-15);
        // Hand-rounded amplitudes are normalized away.
        let g = builtin_superop("set_state", &[v(&[0.70710678, 0.70710678])], 2).unwrap();
        assert!(g.eqsim(&SuperOp::identity(2), 1e-14));
    }

    #[test]
    fn zero_has_zero_trace_operator() {
        let z = builtin_superop("zero", &[], 3).unwrap();
        assert_eq!(z.trace_operator().into_matrix(), ComplexMatrix::zeros(3, 3));
    }

    #[test]
    fn paulis_are_unitary() {
        for name in ["pauli_x", "pauli_y", "pauli_z"] {
            let p = builtin_superop(name, &[], 2).unwrap();
            assert!(p.eqsim(&SuperOp::identity(2), 1e-15));
            assert!(p.compose(&p).unwrap().matrix_rep() == &ComplexMatrix::identity(4, 4));
        }
    }

    #[test]
    fn errors() {
        assert_eq!(builtin_superop("hadamard", &[], 2).unwrap_err(), BuiltinError::Unknown("hadamard".into()));
        assert!(matches!(builtin_superop("proj", &[], 2), Err(BuiltinError::Arity { .. })));
        assert!(matches!(builtin_superop("identity", &[v(&[1.0, 0.0])], 2), Err(BuiltinError::Arity { .. })));
        assert_eq!(builtin_superop("proj", &[v(&[0.0, 0.0])], 2).unwrap_err(), BuiltinError::NotNormalizable);
        assert!(matches!(builtin_superop("proj", &[v(&[1.0])], 2), Err(BuiltinError::VectorLength { .. })));
        assert!(matches!(builtin_superop("pauli_x", &[], 3), Err(BuiltinError::Dimension { .. })));
    }
}

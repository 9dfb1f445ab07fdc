//! `--state` argument: a builtin name or a path to a JSON state file.
//!
//! Builtins:
//!
//! | name                | state                                        |
//! |---------------------|----------------------------------------------|
//! | `w`                 | three-qubit W state                          |
//! | `ghz:N`             | N-qubit GHZ state                            |
//! | `maxent:N:D`        | maximally entangled state of N qudits        |
//! | `werner:N:D:P`      | Werner mixture with fraction P               |
//! | `product:N:D`       | `|0...0>` on N qudits                        |
//! | `classical:N:D`     | `(1/D) sum_i |i...i><i...i|`                 |
//! | `mixed:N:D`         | `I / D^N`                                    |

use std::path::Path;

use sepgeo::states::{max_entangled, validate, w_state, werner, PureKet};
use sepgeo::{ComplexMatrix, DensityMatrix, Error, SubsystemDims};

use crate::CliError;

pub fn load_state(spec: &str) -> Result<DensityMatrix, CliError> {
    match parse_builtin(spec) {
        Some(result) => result,
        None => load_file(Path::new(spec)),
    }
}

fn parse_builtin(spec: &str) -> Option<Result<DensityMatrix, CliError>> {
    let mut parts = spec.split(':');
    let name = parts.next()?;
    let args: Vec<&str> = parts.collect();
    let arity = match name {
        "w" => 0,
        "ghz" => 1,
        "maxent" | "product" | "classical" | "mixed" => 2,
        "werner" => 3,
        _ => return None,
    };
    Some(build(name, &args, arity, spec))
}

fn build(name: &str, args: &[&str], arity: usize, spec: &str) -> Result<DensityMatrix, CliError> {
    if args.len() != arity {
        return Err(CliError::usage(format!(
            "state '{spec}': '{name}' takes {arity} parameter(s)"
        )));
    }
    let int = |k: usize| -> Result<usize, CliError> {
        args[k].parse().map_err(|_| {
            CliError::usage(format!("state '{spec}': '{}' is not an integer", args[k]))
        })
    };
    let state = match name {
        "w" => Ok(w_state()),
        "ghz" => max_entangled(int(0)?, 2),
        "maxent" => max_entangled(int(0)?, int(1)?),
        "werner" => {
            let p: f64 = args[2].parse().map_err(|_| {
                CliError::usage(format!("state '{spec}': '{}' is not a number", args[2]))
            })?;
            werner(int(0)?, int(1)?, p)
        }
        "product" => product(int(0)?, int(1)?),
        "classical" => classical(int(0)?, int(1)?),
        "mixed" => SubsystemDims::uniform(int(0)?, int(1)?).map(DensityMatrix::maximally_mixed),
        _ => unreachable!("arity table covers every builtin"),
    };
    state.map_err(|e| CliError::usage(format!("state '{spec}': {e}")))
}

fn product(n: usize, d: usize) -> Result<DensityMatrix, Error> {
    let dims = SubsystemDims::uniform(n, d)?;
    PureKet::basis(dims.total(), 0)?.to_density(dims)
}

fn classical(n: usize, d: usize) -> Result<DensityMatrix, Error> {
    let dims = SubsystemDims::uniform(n, d)?;
    let mut diag = vec![0.0; dims.total()];
    for i in 0..d {
        diag[dims.encode(&vec![i; n])] = 1.0 / d as f64;
    }
    validate(ComplexMatrix::from_real_diagonal(&diag), dims)
}

fn load_file(path: &Path) -> Result<DensityMatrix, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::usage(format!(
            "'{}' is neither a builtin state nor a readable file: {e}",
            path.display()
        ))
    })?;
    let (matrix, dims) = sepgeo::linalg::matrix_from_json(&text)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let dims = dims.ok_or_else(|| {
        CliError::usage(format!(
            "{}: state files must carry \"dims\"",
            path.display()
        ))
    })?;
    validate(matrix, dims).map_err(|e| CliError::domain(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_parse() {
        assert_eq!(load_state("w").unwrap().order(), 8);
        assert_eq!(load_state("ghz:4").unwrap().order(), 16);
        assert_eq!(load_state("maxent:2:3").unwrap().order(), 9);
        assert_eq!(load_state("werner:2:2:0.25").unwrap().order(), 4);
        assert!(load_state("product:2:2").unwrap().is_pure());
        assert!(!load_state("classical:2:2").unwrap().is_pure());
        assert_eq!(load_state("mixed:3:2").unwrap().order(), 8);
    }

    #[test]
    fn bad_builtins_are_usage_errors() {
        for spec in [
            "ghz",
            "ghz:x",
            "maxent:2",
            "werner:2:2:1.5",
            "ghz:11",
            "w:1",
        ] {
            let err = load_state(spec).unwrap_err();
            assert_eq!(err.code, 2, "{spec}");
        }
        assert_eq!(load_state("/no/such/file.json").unwrap_err().code, 2);
    }
}

//! Flag parsing: complex numbers as "re,im", triples separated by ';'.

use num_complex::Complex64;
use prym_core::numerics::ToleranceConfig;

use crate::commands::CliError;

pub fn complex(text: &str) -> Result<Complex64, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [re, im] = parts.as_slice() else {
        return Err(CliError::parse(format!("expected \"re,im\", got {text:?}")));
    };
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| CliError::parse(format!("not a number: {s:?} in {text:?}")))
    };
    Ok(Complex64::new(num(re)?, num(im)?))
}

pub fn triple(text: &str) -> Result<[Complex64; 3], CliError> {
    let parts: Vec<&str> = text.split(';').collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(CliError::parse(format!(
            "expected three values \"re,im;re,im;re,im\", got {}",
            parts.len()
        )));
    };
    Ok([complex(a)?, complex(b)?, complex(c)?])
}

/// `--tol` wins over `PRYM_TOL`, which wins over the defaults.
pub fn tolerance(flag: Option<&str>, env: Option<&str>) -> Result<ToleranceConfig, CliError> {
    match flag.or(env) {
        None => Ok(ToleranceConfig::default()),
        Some(text) => ToleranceConfig::parse(text).map_err(|e| CliError {
            code: "InvalidTolerance".into(),
            message: format!("{e} (from {text:?})"),
            exit: 2,
        }),
    }
}

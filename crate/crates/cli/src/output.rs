//! CSV writers. Floats carry 17 significant digits so that conservation can
//! be checked from the files alone.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use landau_core::thermo::InvariantsRecord;

pub const DIAGNOSTICS_HEADER: [&str; 11] = [
    "step",
    "time",
    "mass",
    "momentum_x",
    "momentum_y",
    "energy",
    "entropy",
    "free_energy",
    "entropy_increment",
    "solver_iterations",
    "residual_norm",
];

#[derive(Debug, thiserror::Error)]
#[error("cannot write {path}: {source}")]
pub struct OutputError {
    pub path: PathBuf,
    pub source: std::io::Error,
}

/// Shortest round-trippable text is not fixed-width; `{:.16e}` always gives
/// one leading digit plus 16 decimals.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct DiagnosticsWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl DiagnosticsWriter {
    pub fn create(path: &Path) -> Result<Self, OutputError> {
        let wrap = |source| OutputError {
            path: path.to_path_buf(),
            source,
        };
        let mut out = BufWriter::new(File::create(path).map_err(wrap)?);
        writeln!(out, "{}", DIAGNOSTICS_HEADER.join(",")).map_err(wrap)?;
        Ok(Self {
            path: path.to_path_buf(),
            out,
        })
    }

    pub fn row(
        &mut self,
        step: usize,
        inv: &InvariantsRecord,
        entropy_increment: f64,
        iterations: usize,
        residual: f64,
    ) -> Result<(), OutputError> {
        let floats = [
            inv.time,
            inv.mass,
            inv.momentum[0],
            inv.momentum[1],
            inv.energy,
            inv.entropy,
            inv.free_energy,
            entropy_increment,
        ];
        let mut line = step.to_string();
        for x in floats {
            line.push(',');
            line.push_str(&fmt_float(x));
        }
        line.push_str(&format!(",{iterations},{}", fmt_float(residual)));
        writeln!(self.out, "{line}")
            .and_then(|_| self.out.flush())
            .map_err(|source| OutputError {
                path: self.path.clone(),
                source,
            })
    }
}

/// Writes `v1,v2,f` per degree of freedom.
pub fn write_snapshot(path: &Path, coords: &[[f64; 2]], f: &[f64]) -> Result<(), OutputError> {
    let wrap = |source| OutputError {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(wrap)?);
    writeln!(out, "v1,v2,f").map_err(wrap)?;
    for (c, v) in coords.iter().zip(f) {
        writeln!(
            out,
            "{},{},{}",
            fmt_float(c[0]),
            fmt_float(c[1]),
            fmt_float(*v)
        )
        .map_err(wrap)?;
    }
    out.flush().map_err(wrap)
}

/// Two-column `key,value` file.
pub fn write_key_values(path: &Path, rows: &[(&str, String)]) -> Result<(), OutputError> {
    let wrap = |source| OutputError {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(wrap)?);
    writeln!(out, "key,value").map_err(wrap)?;
    for (k, v) in rows {
        writeln!(out, "{k},{v}").map_err(wrap)?;
    }
    out.flush().map_err(wrap)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_significant_digits() {
        let s = fmt_float(0.1);
        let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17);
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
        let third = 1.0 / 3.0;
        assert_eq!(fmt_float(third).parse::<f64>().unwrap(), third);
    }
}

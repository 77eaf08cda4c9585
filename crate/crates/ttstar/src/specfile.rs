//! JSON form of a potential. Complex numbers are `[re, im]` pairs; unknown keys are rejected.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use ttstar_core::potential::{EulerData, ExpTerm, Monomial, PotentialSpec};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialFile {
    pub coeff: [f64; 2],
    pub powers: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentialFile {
    pub coeff: [f64; 2],
    pub powers: Vec<u32>,
    pub linear_form: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EulerFile {
    pub degrees: Vec<f64>,
    pub shifts: Vec<f64>,
    pub d: f64,
    #[serde(rename = "d_F")]
    pub d_f: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldSpecFile {
    pub dim: usize,
    pub monomials: Vec<MonomialFile>,
    #[serde(default)]
    pub exponentials: Vec<ExponentialFile>,
    pub euler: EulerFile,
    pub normal_form: bool,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn cplx(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl From<&PotentialSpec> for ManifoldSpecFile {
    fn from(spec: &PotentialSpec) -> Self {
        let e = spec.euler();
        Self {
            dim: spec.dim(),
            monomials: spec
                .monomials()
                .iter()
                .map(|m| MonomialFile { coeff: pair(m.coeff), powers: m.powers.clone() })
                .collect(),
            exponentials: spec
                .exponentials()
                .iter()
                .map(|x| ExponentialFile {
                    coeff: pair(x.coeff),
                    powers: x.powers.clone(),
                    linear_form: x.linear_form.iter().copied().map(pair).collect(),
                })
                .collect(),
            euler: EulerFile { degrees: e.degrees.clone(), shifts: e.shifts.clone(), d: e.d, d_f: e.d_f },
            normal_form: spec.normal_form(),
        }
    }
}

impl ManifoldSpecFile {
    /// Validated spec; shape and metric errors come from [`PotentialSpec::new`].
    pub fn to_spec(&self) -> Result<PotentialSpec, CliError> {
        let monomials =
            self.monomials.iter().map(|m| Monomial { coeff: cplx(m.coeff), powers: m.powers.clone() }).collect();
        let exponentials = self
            .exponentials
            .iter()
            .map(|x| ExpTerm {
                coeff: cplx(x.coeff),
                powers: x.powers.clone(),
                linear_form: x.linear_form.iter().copied().map(cplx).collect(),
            })
            .collect();
        let e = &self.euler;
        let euler = EulerData { degrees: e.degrees.clone(), shifts: e.shifts.clone(), d: e.d, d_f: e.d_f };
        Ok(PotentialSpec::new(self.dim, monomials, exponentials, euler, self.normal_form)?)
    }
}

pub fn parse_spec(text: &str) -> Result<PotentialSpec, CliError> {
    let file: ManifoldSpecFile = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    file.to_spec()
}

pub fn load_spec(path: &Path) -> Result<PotentialSpec, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_spec(&text)
}

/// Pretty JSON with a trailing newline; floats use the shortest exact representation.
pub fn write_spec(spec: &PotentialSpec) -> String {
    let mut s = serde_json::to_string_pretty(&ManifoldSpecFile::from(spec)).expect("spec serialises");
    s.push('\n');
    s
}

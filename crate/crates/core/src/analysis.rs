//! A model at fixed parameter values with a chosen perturbation: the shared
//! starting point of polygon, amoeba, scaling and encircling experiments.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lindblad::{build_liouvillian, char_poly, generic_perturbation, spectral_vars, ModelSpec, OMEGA};
use crate::numlab::CMatrix;
use crate::polycore::{GaussRational, MultiPoly, PolyMatrix, Vars};
use crate::tropgeo::NewtonPolygon;

/// Perturbation direction `L1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Perturbation {
    /// `∂L/∂param`
    Param(String),
    /// Seeded random Gaussian-integer matrix.
    Generic { seed: u64 },
}

impl fmt::Display for Perturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Perturbation::Param(p) => write!(f, "{p}"),
            Perturbation::Generic { seed } => write!(f, "generic:{seed}"),
        }
    }
}

/// Accepts `generic`, `generic:<seed>` (default seed 42) or a parameter name.
impl FromStr for Perturbation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "generic" => Ok(Perturbation::Generic { seed: 42 }),
            Some(("generic", seed)) => seed
                .parse()
                .map(|seed| Perturbation::Generic { seed })
                .map_err(|_| Error::InvalidArgument(format!("bad seed `{seed}`"))),
            None if !s.is_empty() => Ok(Perturbation::Param(s.to_string())),
            _ => Err(Error::InvalidArgument(format!("bad perturbation `{s}`"))),
        }
    }
}

/// Checks that `bindings` names only model parameters and covers all of them.
pub fn check_bindings(spec: &ModelSpec, bindings: &BTreeMap<String, GaussRational>) -> Result<()> {
    if let Some(unknown) = bindings.keys().find(|k| !spec.params.contains(k)) {
        return Err(Error::UnknownParameter(unknown.clone()));
    }
    let missing: Vec<String> = spec
        .params
        .iter()
        .filter(|p| !bindings.contains_key(*p))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(Error::UnboundParameters(missing));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct Experiment {
    pub spec: ModelSpec,
    pub vars: Vars,
    /// Liouvillian with every parameter bound, over the spectral variables.
    pub liouvillian: PolyMatrix,
    /// Perturbation matrix with every parameter bound.
    pub perturbation: PolyMatrix,
    pub omega0: GaussRational,
}

impl Experiment {
    /// Fails with a precondition error unless `omega0` is an exact
    /// eigenvalue of the bound Liouvillian.
    pub fn new(
        spec: &ModelSpec,
        bindings: &BTreeMap<String, GaussRational>,
        omega0: GaussRational,
        perturbation: &Perturbation,
    ) -> Result<Self> {
        check_bindings(spec, bindings)?;
        let vars = spectral_vars(&spec.params)?;
        let symbolic = build_liouvillian(spec)?.matrix.embed(&vars)?;
        let liouvillian = symbolic.substitute_values(bindings)?;
        let n = liouvillian.nrows();
        let l1 = match perturbation {
            Perturbation::Param(p) => {
                if !spec.params.contains(p) {
                    return Err(Error::UnknownParameter(p.clone()));
                }
                symbolic.derivative(p)?.substitute_values(bindings)?
            }
            Perturbation::Generic { seed } => generic_perturbation(n, *seed, &vars),
        };
        let exp = Self {
            spec: spec.clone(),
            vars,
            liouvillian,
            perturbation: l1,
            omega0,
        };
        let unperturbed = exp.unperturbed_char_poly()?;
        if !unperturbed.constant_term().is_zero() {
            return Err(Error::Precondition(format!(
                "omega0 = {} is not an eigenvalue at these parameters",
                exp.omega0
            )));
        }
        Ok(exp)
    }

    fn shift(&self) -> MultiPoly {
        MultiPoly::constant(&self.vars, self.omega0.clone())
    }

    /// `det(L − (ω + ω0)·I)`
    pub fn unperturbed_char_poly(&self) -> Result<MultiPoly> {
        char_poly(&self.liouvillian, None, &self.shift())
    }

    /// `det(L + ε·L1 − (ω + ω0)·I)`
    pub fn shifted_char_poly(&self) -> Result<MultiPoly> {
        char_poly(&self.liouvillian, Some(&self.perturbation), &self.shift())
    }

    pub fn polygon(&self) -> Result<NewtonPolygon> {
        NewtonPolygon::from_poly(&self.shifted_char_poly()?)
    }

    /// Algebraic multiplicity of `omega0`.
    pub fn algebraic_multiplicity(&self) -> Result<u32> {
        Ok(self.unperturbed_char_poly()?.min_degree_in(OMEGA)?.unwrap_or(0))
    }

    pub fn numeric(&self) -> Result<(CMatrix, CMatrix)> {
        Ok((
            CMatrix::from_poly_matrix(&self.liouvillian)?,
            CMatrix::from_poly_matrix(&self.perturbation)?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{builtin_model, BuiltinModel};

    #[test]
    fn perturbation_parsing() {
        assert_eq!("generic".parse::<Perturbation>().unwrap(), Perturbation::Generic { seed: 42 });
        assert_eq!("generic:7".parse::<Perturbation>().unwrap(), Perturbation::Generic { seed: 7 });
        assert_eq!("J".parse::<Perturbation>().unwrap(), Perturbation::Param("J".into()));
        assert!("generic:x".parse::<Perturbation>().is_err());
    }

    #[test]
    fn binding_checks() {
        let (spec, _) = builtin_model(BuiltinModel::Qubit).unwrap();
        let mut b = BTreeMap::new();
        b.insert("J".to_string(), GaussRational::one());
        assert!(matches!(check_bindings(&spec, &b), Err(Error::UnboundParameters(v)) if v.len() == 2));
        b.insert("K".to_string(), GaussRational::one());
        assert!(matches!(check_bindings(&spec, &b), Err(Error::UnknownParameter(_))));
    }

    #[test]
    fn omega0_must_be_an_eigenvalue() {
        let (spec, _) = builtin_model(BuiltinModel::Qubit).unwrap();
        let mut b = BTreeMap::new();
        b.insert("gamma_e".to_string(), GaussRational::one());
        b.insert("gamma_f".to_string(), GaussRational::zero());
        b.insert("J".to_string(), GaussRational::real("1/4".parse().unwrap()));
        let p = Perturbation::Param("J".into());
        assert!(matches!(
            Experiment::new(&spec, &b, GaussRational::one(), &p),
            Err(Error::Precondition(_))
        ));
        let e = Experiment::new(&spec, &b, GaussRational::real("-1/2".parse().unwrap()), &p).unwrap();
        assert_eq!(e.algebraic_multiplicity().unwrap(), 4);
    }
}

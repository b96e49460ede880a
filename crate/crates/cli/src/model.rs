use std::collections::BTreeMap;
use std::path::Path;

use liouville_ep_core::exprparse::parse_expr;
use liouville_ep_core::lindblad::{builtin_model, BuiltinModel, Jump, ModelSpec};
use liouville_ep_core::polycore::{GaussRational, PolyMatrix, Rational, Vars};
use liouville_ep_core::Error as CoreError;
use serde::Deserialize;

use crate::CliError;

/// On-disk model description. Matrix entries and rates are expression
/// strings over `params`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    pub dim: usize,
    pub params: Vec<String>,
    pub hamiltonian: Vec<Vec<String>>,
    pub jumps: Vec<ChannelFile>,
    #[serde(default)]
    pub losses: Vec<ChannelFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub rate: String,
    pub operator: Vec<Vec<String>>,
}

fn matrix(rows: &[Vec<String>], vars: &Vars, what: &str) -> Result<PolyMatrix, CliError> {
    let parsed = rows
        .iter()
        .enumerate()
        .map(|(r, row)| {
            row.iter()
                .enumerate()
                .map(|(c, e)| parse_expr(e, vars).map_err(|err| CliError::at(format!("{what}[{r}][{c}]"), err)))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PolyMatrix::from_rows(vars, parsed)?)
}

fn channels(list: &[ChannelFile], vars: &Vars, what: &str) -> Result<Vec<Jump>, CliError> {
    list.iter()
        .enumerate()
        .map(|(k, ch)| {
            Ok(Jump {
                rate: parse_expr(&ch.rate, vars).map_err(|e| CliError::at(format!("{what}[{k}].rate"), e))?,
                operator: matrix(&ch.operator, vars, &format!("{what}[{k}].operator"))?,
            })
        })
        .collect()
}

impl ModelFile {
    pub fn into_spec(self) -> Result<ModelSpec, CliError> {
        let vars = Vars::new(&self.params)?;
        let h = matrix(&self.hamiltonian, &vars, "hamiltonian")?;
        if h.nrows() != self.dim {
            return Err(CoreError::DimensionMismatch(format!(
                "dim is {} but the hamiltonian has {} rows",
                self.dim,
                h.nrows()
            ))
            .into());
        }
        let jumps = channels(&self.jumps, &vars, "jumps")?;
        let losses = channels(&self.losses, &vars, "losses")?;
        Ok(ModelSpec::new(self.name, self.params, h, jumps, losses)?)
    }
}

/// A built-in model name or a path to a JSON model file.
pub fn load(model: &str) -> Result<ModelSpec, CliError> {
    if let Ok(builtin) = model.parse::<BuiltinModel>() {
        return Ok(builtin_model(builtin)?.0);
    }
    let path = Path::new(model);
    if !path.exists() {
        return Err(CoreError::UnknownModel(model.to_string()).into());
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    let file: ModelFile = serde_json::from_str(&text).map_err(|e| CliError::ModelFile(path.display().to_string(), e))?;
    file.into_spec()
}

/// An exact rational such as `1/4`, `0.25` or `-3`.
pub fn exact_rational(text: &str) -> Result<GaussRational, CliError> {
    text.trim()
        .parse::<Rational>()
        .map(GaussRational::real)
        .map_err(|_| CliError::Usage(format!("`{text}` is not an exact rational (use forms like 1/4, 0.25, -3)")))
}

/// Parses repeated `name=value` bindings.
pub fn bindings(raw: &[String]) -> Result<BTreeMap<String, GaussRational>, CliError> {
    let mut out = BTreeMap::new();
    for b in raw {
        let (name, value) = b
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("binding `{b}` is not of the form name=value")))?;
        let name = name.trim().to_string();
        if out.insert(name.clone(), exact_rational(value)?).is_some() {
            return Err(CliError::Usage(format!("parameter `{name}` bound twice")));
        }
    }
    Ok(out)
}

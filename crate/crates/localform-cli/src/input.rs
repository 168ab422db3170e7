//! Resolving fields, elements and lattices from command-line arguments.

use anyhow::{Context, Result};
use localform::bong::{build_lattice, LatticeForm, LatticeSpec};
use localform::padic::catalog_spec;
use localform::{catalog, ClassSet, Error, Field, Lattice, PadicElement, TowerSpec};
use std::sync::Arc;

/// Inline JSON when the argument starts with `{`, otherwise a file path.
fn json_text(arg: &str) -> Result<String> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("cannot read '{arg}'"))
    }
}

fn field_value(v: &serde_json::Value) -> Result<Arc<Field>> {
    match v {
        serde_json::Value::String(name) => Ok(catalog(name)?),
        other => {
            let spec: TowerSpec = serde_json::from_value(other.clone())
                .map_err(|e| Error::Parse(format!("field spec: {e}")))?;
            let name = other.get("name").and_then(|n| n.as_str()).unwrap_or("custom");
            Ok(Field::construct(name, &spec)?)
        }
    }
}

/// A catalog name, an inline JSON tower spec, or a path to one.
pub fn field_arg(arg: &str) -> Result<Arc<Field>> {
    if catalog_spec(arg).is_some() {
        return Ok(catalog(arg)?);
    }
    if !arg.trim_start().starts_with('{') && !std::path::Path::new(arg).exists() {
        return Err(Error::UnknownField(arg.to_string()).into());
    }
    let v: serde_json::Value =
        serde_json::from_str(&json_text(arg)?).map_err(|e| Error::Parse(format!("field spec: {e}")))?;
    field_value(&v)
}

pub fn element(k: &Field, s: &str) -> Result<PadicElement> {
    Ok(k.parse(s)?)
}

/// The subgroup generated by the square classes of comma-separated elements.
pub fn class_set(k: &Field, gens: &str) -> Result<ClassSet> {
    let t = k.classes();
    let mut s = ClassSet::trivial();
    for g in gens.split(',').map(str::trim).filter(|g| !g.is_empty()) {
        s.insert(t.canonical(k, &element(k, g)?)?);
    }
    Ok(s.closure())
}

/// A lattice from `--lattice` JSON or from `--bong` entries. `--field`
/// overrides the field named in the JSON.
pub fn lattice_arg(field: Option<&str>, lattice: Option<&str>, bong: Option<&str>) -> Result<Lattice> {
    match (lattice, bong) {
        (Some(l), _) => {
            let text = json_text(l)?;
            let spec: LatticeSpec =
                serde_json::from_str(&text).map_err(|e| Error::Parse(format!("lattice '{l}': {e}")))?;
            let k = match field {
                Some(f) => field_arg(f)?,
                None => field_value(&spec.field)?,
            };
            Ok(build_lattice(&k, &spec.form)?)
        }
        (None, Some(b)) => {
            let k = field_arg(field.unwrap_or("Q2"))?;
            let xs = b.split(',').map(|x| x.trim().to_string()).collect();
            Ok(build_lattice(&k, &LatticeForm::Bong(xs))?)
        }
        (None, None) => Err(Error::Parse("missing --lattice or --bong".into()).into()),
    }
}

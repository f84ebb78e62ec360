//! JSON encoding of basic objects.
//!
//! Atoms become `{"uset": name, "i": index}`, tuples plain arrays, sets
//! `{"set": [...]}` and maps `{"map": [[k, v], ...]}`. Unit is `null`.

use serde_json::{json, Map as JsonMap, Value as Json};

use super::{Uset, Value};
use crate::error::{Error, Result};

pub fn value_to_json(v: &Value) -> Json {
    match v {
        Value::Unit => Json::Null,
        Value::Bool(b) => Json::Bool(*b),
        Value::Int(i) => json!(i),
        Value::Text(s) => Json::String(s.to_string()),
        Value::Atom(a) => json!({ "uset": &*a.uset().name(), "i": a.index() }),
        Value::Tuple(c) => Json::Array(c.iter().map(value_to_json).collect()),
        Value::Set(c) => json!({ "set": c.iter().map(value_to_json).collect::<Vec<_>>() }),
        Value::Map(p) => json!({
            "map": p
                .iter()
                .map(|(k, v)| json!([value_to_json(k), value_to_json(v)]))
                .collect::<Vec<_>>()
        }),
    }
}

/// Decodes a value; `resolve` maps a uset name to its handle since names are
/// not unique across the registry.
pub fn value_from_json(j: &Json, resolve: &dyn Fn(&str) -> Option<Uset>) -> Result<Value> {
    Ok(match j {
        Json::Null => Value::Unit,
        Json::Bool(b) => Value::Bool(*b),
        Json::Number(n) => Value::Int(
            n.as_i64()
                .ok_or_else(|| Error::Spec(format!("{n} is not a 64-bit integer")))?,
        ),
        Json::String(s) => Value::text(s),
        Json::Array(items) => Value::tuple(
            items
                .iter()
                .map(|i| value_from_json(i, resolve))
                .collect::<Result<Vec<_>>>()?,
        ),
        Json::Object(obj) => decode_object(obj, resolve)?,
    })
}

fn decode_object(obj: &JsonMap<String, Json>, resolve: &dyn Fn(&str) -> Option<Uset>) -> Result<Value> {
    if let (Some(name), Some(i)) = (obj.get("uset"), obj.get("i")) {
        let name = name
            .as_str()
            .ok_or_else(|| Error::Spec("atom uset must be a string".into()))?;
        let uset = resolve(name).ok_or_else(|| Error::Spec(format!("unknown uset `{name}`")))?;
        let index = i
            .as_u64()
            .and_then(|i| u32::try_from(i).ok())
            .filter(|&i| i < uset.size())
            .ok_or_else(|| Error::Spec(format!("bad atom index {i} for uset `{name}`")))?;
        return Ok(uset.atom(index).into());
    }
    if let Some(Json::Array(items)) = obj.get("set") {
        let items = items
            .iter()
            .map(|i| value_from_json(i, resolve))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Value::set(items));
    }
    if let Some(Json::Array(pairs)) = obj.get("map") {
        let pairs = pairs
            .iter()
            .map(|p| match p.as_array().map(Vec::as_slice) {
                Some([k, v]) => Ok((value_from_json(k, resolve)?, value_from_json(v, resolve)?)),
                _ => Err(Error::Spec("map entries must be [key, value] pairs".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        return Value::map(pairs).map_err(|e| Error::Spec(e.to_string()));
    }
    Err(Error::Spec(format!(
        "cannot decode object {}",
        Json::Object(obj.clone())
    )))
}

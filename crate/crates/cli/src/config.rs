//! Run configuration: a JSON document whose keys match the long flag names
//! of a subcommand (underscores for dashes). Flags given on the command line
//! win over the file; unknown keys are rejected.

use std::path::Path;

use anyhow::{bail, Context};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use isi_core::lattice::{c3, BoxDims, Coord};

/// Overlay the non-null fields of `flags` on the object in `file`.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, file: Option<&Path>) -> anyhow::Result<T> {
    let Some(path) = file else { return Ok(serde_json::from_value(serde_json::to_value(flags)?)?) };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let base: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let Value::Object(mut obj) = base else { bail!("{}: config must be a JSON object", path.display()) };
    let Value::Object(over) = serde_json::to_value(flags)? else { unreachable!("args serialize to objects") };
    for (k, v) in over {
        if !v.is_null() && v != Value::Bool(false) {
            obj.insert(k, v);
        } else {
            obj.entry(k).or_insert(v);
        }
    }
    serde_json::from_value(Value::Object(obj)).with_context(|| format!("invalid config {}", path.display()))
}

/// The resolved config echoed into outputs.
pub fn echo<T: Serialize>(cmd: &str, cfg: &T) -> Value {
    let mut m = Map::new();
    m.insert("command".into(), Value::String(cmd.into()));
    m.insert("args".into(), serde_json::to_value(cfg).unwrap_or(Value::Null));
    Value::Object(m)
}

/// "n,m,H" or "n" (cube-like with H = n).
pub fn parse_box(s: &str) -> anyhow::Result<BoxDims> {
    let v: Vec<i32> = s.split(',').map(|t| t.trim().parse()).collect::<Result<_, _>>()?;
    match v[..] {
        [n] if n >= 1 => Ok(BoxDims::cube(n)),
        [n, m, h] if n >= 1 && m >= 1 && h >= 1 => Ok(BoxDims::new(n, m, h)),
        _ => bail!("box must be n or n,m,H with positive entries, got {s}"),
    }
}

/// "a,b": the base face whose lower corner is (a, b).
pub fn parse_face(s: &str) -> anyhow::Result<Coord> {
    let v: Vec<i32> = s.split(',').map(|t| t.trim().parse()).collect::<Result<_, _>>()?;
    match v[..] {
        [a, b] => Ok(c3(2 * a + 1, 2 * b + 1, 0)),
        _ => bail!("face must be a,b, got {s}"),
    }
}

/// "lo..hi" or "hi" (meaning 1..hi).
pub fn parse_range(s: &str) -> anyhow::Result<(usize, usize)> {
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse()?, b.trim().trim_start_matches('=').parse()?),
        None => (1, s.trim().parse()?),
    };
    if lo < 1 || hi < lo {
        bail!("bad range {s}");
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsing() {
        assert_eq!(parse_box("8").unwrap(), BoxDims::new(8, 8, 8));
        assert_eq!(parse_box("12,12,6").unwrap(), BoxDims::new(12, 12, 6));
        assert!(parse_box("0").is_err());
        assert_eq!(parse_face("0,0").unwrap(), c3(1, 1, 0));
        assert_eq!(parse_face("-1,2").unwrap(), c3(-1, 5, 0));
        assert_eq!(parse_range("1..3").unwrap(), (1, 3));
        assert_eq!(parse_range("4").unwrap(), (1, 4));
        assert!(parse_range("3..1").is_err());
    }
}

//! Flag/config merging and small argument parsers.

use std::path::Path;

use anyhow::{Context, Result};
use hardedge::Error;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

/// Fills every flag left unset from the JSON config at `path`. The config
/// is either a bare parameter object or a run manifest, whose recorded
/// parameters are then replayed.
pub fn merge<T: Serialize + DeserializeOwned>(flags: T, path: Option<&Path>, command: &str) -> Result<T> {
    let Some(path) = path else { return Ok(flags) };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut doc: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("config {} is not JSON: {e}", path.display())))?;
    if let Some(recorded) = doc.get("command").and_then(Value::as_str) {
        if recorded != command {
            return Err(Error::Config(format!("manifest was written by '{recorded}', not '{command}'")).into());
        }
    }
    if let Some(p) = doc.get("parameters") {
        doc = p.clone();
    }
    let Value::Object(mut base) = doc else {
        return Err(Error::Config("config must be a JSON object".into()).into());
    };
    let Value::Object(over) = serde_json::to_value(&flags)? else {
        unreachable!("argument structs serialize to objects")
    };
    for (k, v) in over {
        if !v.is_null() {
            base.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(base)).map_err(|e| Error::Config(format!("config: {e}")).into())
}

/// `lo:hi:count`, count >= 1 equispaced points including both ends.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("grid '{s}' is not lo:hi:count"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts[..] else { return Err(bad().into()) };
    let (lo, hi): (f64, f64) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    if count == 0 || !lo.is_finite() || !hi.is_finite() || (count == 1 && lo != hi) {
        return Err(bad().into());
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..count).map(|i| if i + 1 == count { hi } else { lo + (hi - lo) * i as f64 / (count - 1) as f64 }).collect())
}

/// `lo:hi` with lo < hi.
pub fn parse_range(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::Config(format!("range '{s}' is not lo:hi with lo < hi"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let (lo, hi): (f64, f64) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(bad().into());
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, Default, PartialEq, Serialize, Deserialize)]
    #[serde(default, deny_unknown_fields)]
    struct Args {
        n: Option<usize>,
        eps: Option<Vec<f64>>,
    }

    fn write(text: &str) -> tempfile::NamedTempFile {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), text).unwrap();
        f
    }

    #[test]
    fn flags_win_over_config() {
        let f = write(r#"{"n": 10, "eps": [0.5]}"#);
        let merged = merge(Args { n: Some(3), eps: None }, Some(f.path()), "sample").unwrap();
        assert_eq!(merged, Args { n: Some(3), eps: Some(vec![0.5]) });
    }

    #[test]
    fn manifests_replay_their_parameters() {
        let f = write(r#"{"command": "sample", "parameters": {"n": 7}}"#);
        assert_eq!(merge(Args::default(), Some(f.path()), "sample").unwrap().n, Some(7));
        assert!(merge(Args::default(), Some(f.path()), "kernel").is_err());
        let typo = write(r#"{"m": 7}"#);
        assert!(merge(Args::default(), Some(typo.path()), "sample").is_err());
    }

    #[test]
    fn grids_and_ranges() {
        assert_eq!(parse_grid("0:8:5").unwrap(), vec![0.0, 2.0, 4.0, 6.0, 8.0]);
        assert_eq!(parse_grid("-3:3:3").unwrap(), vec![-3.0, 0.0, 3.0]);
        assert_eq!(parse_grid("1:1:1").unwrap(), vec![1.0]);
        for bad in ["0:1", "0:1:0", "a:1:2", "0:1:1"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
        assert_eq!(parse_range("-1:2.5").unwrap(), (-1.0, 2.5));
        assert!(parse_range("2:1").is_err());
    }
}

use crate::error::{Error, Result};

/// Parses `NAME=VALUE`. The split is at the last `=`, so names may contain
/// one; the value must be a finite number.
pub fn parse_condition(s: &str) -> Result<(String, f64)> {
    let (name, value) = s
        .rsplit_once('=')
        .ok_or_else(|| Error::Parse(format!("expected NAME=VALUE, got `{s}`")))?;
    let name = name.trim();
    if name.is_empty() {
        return Err(Error::Parse(format!("missing variable name in `{s}`")));
    }
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("`{}` is not a number", value.trim())))?;
    if !value.is_finite() {
        return Err(Error::Parse(format!("value in `{s}` is not finite")));
    }
    Ok((name.to_string(), value))
}

/// Splits a comma-separated name list. Blank input gives an empty list;
/// blank entries between commas are rejected.
pub fn parse_name_list(s: &str) -> Result<Vec<String>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|p| {
            let p = p.trim();
            if p.is_empty() {
                Err(Error::Parse(format!("empty name in list `{s}`")))
            } else {
                Ok(p.to_string())
            }
        })
        .collect()
}

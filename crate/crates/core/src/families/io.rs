//! Family text format: a header line `n=<int>`, then one set per line in the
//! comma-list form. An empty line is the empty set.

use super::SetFamily;
use crate::error::{Error, Result};
use crate::lattice::SubsetWord;

pub fn serialize_family(family: &SetFamily) -> String {
    let mut out = format!("n={}\n", family.n());
    for s in family.iter() {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    out
}

pub fn parse_family(text: &str) -> Result<SetFamily> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("missing header line n=<int>".into()))?;
    let n: usize = header
        .trim()
        .strip_prefix("n=")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?;
    let mut fam = SetFamily::new(n);
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        let set =
            SubsetWord::parse(n, line).map_err(|e| Error::Parse(format!("line {lineno}: {e}")))?;
        if !fam.insert(set)? {
            return Err(Error::Parse(format!(
                "line {lineno}: duplicate set {{{}}}",
                line.trim()
            )));
        }
    }
    Ok(fam)
}

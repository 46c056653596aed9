use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::lacunary::LacunarySet;
use crate::romanoff::GapStatistics;
use crate::window::WindowRecord;

/// Every CSV starts with `# schema: romanoff-lab/<table>/v<version>`.
pub const SCHEMA_PREFIX: &str = "# schema: romanoff-lab";

/// Writes `bytes` to a temporary file next to `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn windows_csv(records: &[WindowRecord]) -> String {
    let mut s = format!("{SCHEMA_PREFIX}/windows/v1\nx,h,R,Q,S,cs_bound\n");
    for r in records {
        writeln!(
            s,
            "{},{},{},{},{},{}",
            r.x,
            r.h,
            r.r,
            r.q,
            r.s,
            r.cs_bound()
        )
        .unwrap();
    }
    s
}

pub fn gaps_csv(stats: &GapStatistics) -> String {
    let mut s = format!("{SCHEMA_PREFIX}/gaps/v1\nm,s_m,gap,normalized\n");
    for row in &stats.rows {
        writeln!(s, "{},{},{},{}", row.m, row.s_m, row.gap, row.normalized).unwrap();
    }
    s
}

/// A one-line JSON header `{s, r, lambda, count}` followed by one element per line.
pub fn lacunary_listing(set: &LacunarySet) -> String {
    let header = serde_json::json!({
        "s": set.params().s(),
        "r": set.params().r(),
        "lambda": set.params().lambda(),
        "count": set.len(),
    });
    let mut s = format!("{header}\n");
    for v in set.values() {
        writeln!(s, "{v}").unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lacunary::LacunaryParams;

    #[test]
    fn listing_header() {
        let set = LacunarySet::generate(LacunaryParams::new(vec![2.0, 2.0]).unwrap(), 16).unwrap();
        assert_eq!(
            lacunary_listing(&set),
            "{\"count\":3,\"lambda\":1.0,\"r\":[2.0,2.0],\"s\":2}\n4\n18\n32\n"
        );
    }

    #[test]
    fn windows_schema_line() {
        let csv = windows_csv(&[WindowRecord {
            x: 20,
            h: 2,
            r: 2,
            q: 4,
            s: 1,
        }]);
        assert_eq!(
            csv,
            "# schema: romanoff-lab/windows/v1\nx,h,R,Q,S,cs_bound\n20,2,2,4,1,1\n"
        );
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
    }
}

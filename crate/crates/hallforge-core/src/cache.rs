//! Persistent orbit-table cache with integrity checking.
//!
//! Layout: one JSON file per classified space at
//! `<dir>/<quiver-hash>/<p>/<dims>.json`, containing the class labels,
//! canonical representatives, orbit sizes and automorphism counts, plus a
//! SHA-256 checksum of the payload.
//!
//! The cache is *advisory*: a loaded entry is never trusted as the source
//! of truth.  Loading verifies the checksum, rebuilds the classification
//! from scratch, and asserts that the recomputation reproduces the stored
//! labels exactly; any deviation (bit rot, manual edits, or an entry
//! produced by different code) surfaces as [`Error::Cache`] rather than
//! silently flowing into results.  `gc` removes entries that fail these
//! checks; `inspect` lists entries with their status.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::quiver::{dims_label, Quiver};
use crate::repspace::{OrbitTable, RepSpace};

const SCHEMA_VERSION: u64 = 1;

/// Path of the cache entry for a space.
pub fn entry_path(dir: &Path, quiver_hash: &str, p: u64, dims: &[usize]) -> PathBuf {
    dir.join(quiver_hash)
        .join(p.to_string())
        .join(format!("{}.json", dims_label(dims)))
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Serialize the payload (everything but the checksum) canonically.
/// `serde_json` maps iterate in sorted key order, so `to_string` is
/// deterministic.
fn payload_string(payload: &Value) -> Result<String> {
    Ok(serde_json::to_string(payload)?)
}

fn table_payload(table: &OrbitTable) -> Value {
    let space = table.space();
    let classes: Vec<Value> = table
        .classes()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            json!({
                "label": format!("{}:{}", dims_label(space.dims()), i),
                "rep": c.rep,
                "orbit_size": c.orbit_size.to_string(),
                "aut_order": c.aut_order.to_string(),
            })
        })
        .collect();
    json!({
        "schema": SCHEMA_VERSION,
        "quiver": space.quiver().canonical_json(),
        "quiver_hash": space.quiver().hash_hex(),
        "p": space.p(),
        "dims": space.dims(),
        "group_order": table.group_order().to_string(),
        "point_count": space.point_count().to_string(),
        "classes": classes,
    })
}

/// Write (or overwrite) the cache entry for a built table.
pub fn store(dir: &Path, table: &OrbitTable) -> Result<()> {
    let space = table.space();
    let path = entry_path(dir, &space.quiver().hash_hex(), space.p() as u64, space.dims());
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let payload = table_payload(table);
    let checksum = sha256_hex(payload_string(&payload)?.as_bytes());
    let mut full = payload;
    full["checksum"] = Value::String(checksum);
    fs::write(&path, serde_json::to_string_pretty(&full)?)?;
    Ok(())
}

/// Parse an entry file and verify its checksum; returns the payload.
fn read_verified(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)?;
    let mut value: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Cache(format!("{}: unparsable json ({e})", path.display())))?;
    let stored = value
        .as_object_mut()
        .and_then(|m| m.remove("checksum"))
        .and_then(|c| c.as_str().map(str::to_owned))
        .ok_or_else(|| Error::Cache(format!("{}: missing checksum", path.display())))?;
    let actual = sha256_hex(payload_string(&value)?.as_bytes());
    if stored != actual {
        return Err(Error::Cache(format!("{}: checksum mismatch", path.display())));
    }
    Ok(value)
}

/// Compare a cached payload against a freshly built table.
fn payload_matches(payload: &Value, table: &OrbitTable) -> bool {
    *payload == table_payload(table)
}

/// Load the entry for `space` if present: verify the checksum, rebuild the
/// classification, and insist the recomputation reproduces the stored
/// data exactly.  `Ok(None)` when no entry exists.
pub fn load_or_build(dir: &Path, space: &RepSpace) -> Result<Option<OrbitTable>> {
    let path = entry_path(dir, &space.quiver().hash_hex(), space.p() as u64, space.dims());
    if !path.exists() {
        return Ok(None);
    }
    let payload = read_verified(&path)?;
    // Header must describe this very space.
    let header_ok = payload.get("schema").and_then(Value::as_u64) == Some(SCHEMA_VERSION)
        && payload.get("quiver_hash").and_then(Value::as_str)
            == Some(space.quiver().hash_hex().as_str())
        && payload.get("p").and_then(Value::as_u64) == Some(space.p() as u64)
        && payload.get("dims").cloned() == Some(json!(space.dims()));
    if !header_ok {
        return Err(Error::Cache(format!(
            "{}: header does not match the requested space",
            path.display()
        )));
    }
    let rebuilt = OrbitTable::build(space.clone())?;
    if !payload_matches(&payload, &rebuilt) {
        return Err(Error::Cache(format!(
            "{}: stale entry; recomputation produced different classes (run cache gc)",
            path.display()
        )));
    }
    Ok(Some(rebuilt))
}

/// Summary of one cache entry, as reported by [`inspect`].
#[derive(Clone, Debug)]
pub struct EntryInfo {
    pub path: PathBuf,
    pub bytes: u64,
    pub quiver_hash: String,
    pub p: u64,
    pub dims: Vec<usize>,
    pub n_classes: usize,
    pub status: EntryStatus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryStatus {
    /// Checksum valid and recomputation reproduces the stored classes.
    Verified,
    /// Checksum valid but the space is too large to re-verify here.
    ChecksumOnly(String),
    /// Entry is corrupt or stale.
    Invalid(String),
}

fn json_files_under(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d)? {
            let path = entry?.path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "json") {
                out.push(path);
            }
        }
    }
    out.sort();
    Ok(out)
}

fn examine(path: &Path) -> EntryInfo {
    let bytes = fs::metadata(path).map(|m| m.len()).unwrap_or(0);
    let mut info = EntryInfo {
        path: path.to_path_buf(),
        bytes,
        quiver_hash: String::new(),
        p: 0,
        dims: Vec::new(),
        n_classes: 0,
        status: EntryStatus::Invalid("unexamined".into()),
    };
    let payload = match read_verified(path) {
        Ok(p) => p,
        Err(e) => {
            info.status = EntryStatus::Invalid(e.to_string());
            return info;
        }
    };
    info.quiver_hash = payload
        .get("quiver_hash")
        .and_then(Value::as_str)
        .unwrap_or("")
        .to_string();
    info.p = payload.get("p").and_then(Value::as_u64).unwrap_or(0);
    info.dims = payload
        .get("dims")
        .and_then(|d| serde_json::from_value(d.clone()).ok())
        .unwrap_or_default();
    info.n_classes = payload
        .get("classes")
        .and_then(Value::as_array)
        .map_or(0, Vec::len);

    // Full verification: rebuild from the embedded quiver description.
    let quiver = match payload
        .get("quiver")
        .ok_or_else(|| Error::Cache("missing quiver".into()))
        .and_then(Quiver::from_canonical_json)
    {
        Ok(q) => q,
        Err(e) => {
            info.status = EntryStatus::Invalid(format!("bad quiver description: {e}"));
            return info;
        }
    };
    if quiver.hash_hex() != info.quiver_hash {
        info.status = EntryStatus::Invalid("quiver hash does not match description".into());
        return info;
    }
    let space = match RepSpace::new(&quiver, &info.dims, info.p) {
        Ok(s) => s,
        Err(e) => {
            info.status = EntryStatus::ChecksumOnly(format!("cannot rebuild: {e}"));
            return info;
        }
    };
    match OrbitTable::build(space) {
        Ok(table) => {
            if payload_matches(&payload, &table) {
                info.status = EntryStatus::Verified;
            } else {
                info.status = EntryStatus::Invalid("stale: recomputation disagrees".into());
            }
        }
        Err(e) => info.status = EntryStatus::ChecksumOnly(format!("cannot rebuild: {e}")),
    }
    info
}

/// List every entry under `dir` with its verification status.
pub fn inspect(dir: &Path) -> Result<Vec<EntryInfo>> {
    if !dir.exists() {
        return Err(Error::Cache(format!("no such cache directory: {}", dir.display())));
    }
    Ok(json_files_under(dir)?.iter().map(|p| examine(p)).collect())
}

/// Remove corrupt and stale entries under `dir`; returns (kept, removed).
pub fn gc(dir: &Path) -> Result<(Vec<EntryInfo>, Vec<EntryInfo>)> {
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for info in inspect(dir)? {
        match &info.status {
            EntryStatus::Invalid(_) => {
                fs::remove_file(&info.path)?;
                removed.push(info);
            }
            _ => kept.push(info),
        }
    }
    Ok((kept, removed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repspace::Session;

    #[test]
    fn round_trip_and_warm_load() {
        let dir = tempfile::tempdir().unwrap();
        let q = Quiver::a2();
        let cold = Session::with_cache_dir(2, dir.path()).unwrap();
        let t1 = cold.table(&q, &[1, 1]).unwrap();
        assert_eq!(cold.stats().tables_built, 1);

        // A fresh session finds the entry on disk and re-verifies it.
        let warm = Session::with_cache_dir(2, dir.path()).unwrap();
        let t2 = warm.table(&q, &[1, 1]).unwrap();
        assert_eq!(warm.stats().tables_from_disk, 1);
        assert_eq!(t1.n_classes(), t2.n_classes());
        for (a, b) in t1.classes().iter().zip(t2.classes()) {
            assert_eq!(a.rep, b.rep);
            assert_eq!(a.orbit_size, b.orbit_size);
            assert_eq!(a.aut_order, b.aut_order);
        }
    }

    #[test]
    fn corruption_is_detected_and_collected() {
        let dir = tempfile::tempdir().unwrap();
        let q = Quiver::a2();
        {
            let s = Session::with_cache_dir(3, dir.path()).unwrap();
            s.table(&q, &[1, 1]).unwrap();
            s.table(&q, &[1, 0]).unwrap();
        }
        let path = entry_path(dir.path(), &q.hash_hex(), 3, &[1, 1]);
        assert!(path.exists());

        // Flip bytes: checksum must fail, load must error, gc must remove.
        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, text.replace("orbit_size", "orbit_sizx")).unwrap();
        let s = Session::with_cache_dir(3, dir.path()).unwrap();
        let err = s.table(&q, &[1, 1]).unwrap_err();
        assert!(matches!(err, Error::Cache(_)), "got: {err}");

        let (kept, removed) = gc(dir.path()).unwrap();
        assert_eq!(removed.len(), 1);
        assert_eq!(kept.len(), 1);
        assert!(!path.exists());

        // After gc the table can be rebuilt and cached again.
        let s2 = Session::with_cache_dir(3, dir.path()).unwrap();
        assert!(s2.table(&q, &[1, 1]).is_ok());
    }

    #[test]
    fn stale_entries_fail_verification() {
        let dir = tempfile::tempdir().unwrap();
        let q = Quiver::a2();
        {
            let s = Session::with_cache_dir(2, dir.path()).unwrap();
            s.table(&q, &[1, 1]).unwrap();
        }
        // Tamper with a class payload and re-stamp a valid checksum: the
        // rebuild comparison must still catch it.
        let path = entry_path(dir.path(), &q.hash_hex(), 2, &[1, 1]);
        let mut value: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        value["classes"][0]["aut_order"] = Value::String("999".into());
        value.as_object_mut().unwrap().remove("checksum");
        let checksum = sha256_hex(payload_string(&value).unwrap().as_bytes());
        value["checksum"] = Value::String(checksum);
        fs::write(&path, serde_json::to_string_pretty(&value).unwrap()).unwrap();

        let s = Session::with_cache_dir(2, dir.path()).unwrap();
        let err = s.table(&q, &[1, 1]).unwrap_err();
        assert!(matches!(err, Error::Cache(_)));
        let infos = inspect(dir.path()).unwrap();
        assert_eq!(infos.len(), 1);
        assert!(matches!(infos[0].status, EntryStatus::Invalid(_)));
    }
}

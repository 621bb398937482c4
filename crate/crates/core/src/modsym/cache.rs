//! Plain-text on-disk cache for Manin symbol spaces.
//!
//! Format (one item per line, decimal text):
//!
//! ```text
//! mtlab-manin-space v1
//! key <sha256 of "v1:<N>">
//! level <N>
//! p1 <number of P^1 elements>
//! coords <i> <j>:<num>/<den> ...      (one line per P^1 element)
//! basis <P^1 index> ...
//! cusps <a>/<c> ...
//! boundary <top> <bottom>            (one line per P^1 element)
//! cuspidal <num>/<den> ...           (one line per basis vector)
//! end
//! ```

use super::p1::P1List;
use super::space::ManinSymbolSpace;
use crate::error::{Error, Result};
use crate::linalg::rational::{SparseVec, Q};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const FORMAT_VERSION: &str = "v1";
const HEADER: &str = "mtlab-manin-space v1";

pub fn cache_key(level: u64) -> String {
    let mut h = Sha256::new();
    h.update(format!("{FORMAT_VERSION}:{level}").as_bytes());
    hex::encode(h.finalize())
}

pub fn cache_path(dir: &Path, level: u64) -> PathBuf {
    dir.join(format!("space-{level}-{}.txt", &cache_key(level)[..16]))
}

fn q_str(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn parse_q(s: &str) -> Result<Q> {
    let (n, d) = s.split_once('/').ok_or_else(|| Error::Cache(format!("bad rational {s}")))?;
    let n = n.parse().map_err(|_| Error::Cache(format!("bad numerator {n}")))?;
    let d = d.parse().map_err(|_| Error::Cache(format!("bad denominator {d}")))?;
    Ok(Q::new(n, d))
}

pub fn serialize(space: &ManinSymbolSpace) -> String {
    let mut s = String::new();
    writeln!(s, "{HEADER}").unwrap();
    writeln!(s, "key {}", cache_key(space.level)).unwrap();
    writeln!(s, "level {}", space.level).unwrap();
    writeln!(s, "p1 {}", space.p1.len()).unwrap();
    for (i, c) in space.coords.iter().enumerate() {
        write!(s, "coords {i}").unwrap();
        for (j, x) in c {
            write!(s, " {j}:{}", q_str(x)).unwrap();
        }
        s.push('\n');
    }
    write!(s, "basis").unwrap();
    for b in &space.basis_reps {
        write!(s, " {b}").unwrap();
    }
    s.push('\n');
    write!(s, "cusps").unwrap();
    for (a, c) in &space.cusps {
        write!(s, " {a}/{c}").unwrap();
    }
    s.push('\n');
    for (t, b) in &space.boundary {
        writeln!(s, "boundary {t} {b}").unwrap();
    }
    for v in &space.cuspidal_basis {
        write!(s, "cuspidal").unwrap();
        for x in v {
            write!(s, " {}", q_str(x)).unwrap();
        }
        s.push('\n');
    }
    writeln!(s, "end").unwrap();
    s
}

pub fn deserialize(text: &str, level: u64) -> Result<ManinSymbolSpace> {
    let mut lines = text.lines();
    if lines.next() != Some(HEADER) {
        return Err(Error::Cache("unknown cache format".into()));
    }
    let key = lines.next().and_then(|l| l.strip_prefix("key ")).unwrap_or("");
    if key != cache_key(level) {
        return Err(Error::Cache("cache key mismatch".into()));
    }
    let lv: u64 = lines
        .next()
        .and_then(|l| l.strip_prefix("level "))
        .and_then(|x| x.parse().ok())
        .ok_or_else(|| Error::Cache("missing level".into()))?;
    if lv != level {
        return Err(Error::Cache("level mismatch".into()));
    }
    let p1 = P1List::new(level);
    let np1: usize = lines
        .next()
        .and_then(|l| l.strip_prefix("p1 "))
        .and_then(|x| x.parse().ok())
        .ok_or_else(|| Error::Cache("missing p1 size".into()))?;
    if np1 != p1.len() {
        return Err(Error::Cache("P^1 size mismatch".into()));
    }
    let mut coords = Vec::with_capacity(np1);
    let mut basis_reps = Vec::new();
    let mut cusps = Vec::new();
    let mut boundary = Vec::with_capacity(np1);
    let mut cuspidal_basis = Vec::new();
    let mut ended = false;
    for line in lines {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("coords") => {
                it.next();
                let mut v = SparseVec::new();
                for tok in it {
                    let (j, x) = tok.split_once(':').ok_or_else(|| Error::Cache(format!("bad entry {tok}")))?;
                    let j: usize = j.parse().map_err(|_| Error::Cache(format!("bad index {j}")))?;
                    v.insert(j, parse_q(x)?);
                }
                coords.push(v);
            }
            Some("basis") => {
                for tok in it {
                    basis_reps.push(tok.parse().map_err(|_| Error::Cache(format!("bad basis {tok}")))?);
                }
            }
            Some("cusps") => {
                for tok in it {
                    let (a, c) = tok.split_once('/').ok_or_else(|| Error::Cache(format!("bad cusp {tok}")))?;
                    let a = a.parse().map_err(|_| Error::Cache(format!("bad cusp {tok}")))?;
                    let c = c.parse().map_err(|_| Error::Cache(format!("bad cusp {tok}")))?;
                    cusps.push((a, c));
                }
            }
            Some("boundary") => {
                let t = it.next().and_then(|x| x.parse().ok());
                let b = it.next().and_then(|x| x.parse().ok());
                match (t, b) {
                    (Some(t), Some(b)) => boundary.push((t, b)),
                    _ => return Err(Error::Cache(format!("bad boundary line {line}"))),
                }
            }
            Some("cuspidal") => {
                cuspidal_basis.push(it.map(parse_q).collect::<Result<Vec<_>>>()?);
            }
            Some("end") => {
                ended = true;
                break;
            }
            _ => return Err(Error::Cache(format!("unexpected line {line}"))),
        }
    }
    if !ended || coords.len() != np1 || boundary.len() != np1 {
        return Err(Error::Cache("truncated cache file".into()));
    }
    Ok(ManinSymbolSpace { level, p1, coords, basis_reps, cusps, boundary, cuspidal_basis })
}

/// Load the space from `dir` if a valid cache entry exists, else build and store it.
pub fn load_or_build(dir: Option<&Path>, level: u64) -> Result<ManinSymbolSpace> {
    let Some(dir) = dir else {
        return Ok(ManinSymbolSpace::new(level));
    };
    let path = cache_path(dir, level);
    if let Ok(text) = std::fs::read_to_string(&path) {
        match deserialize(&text, level) {
            Ok(s) => return Ok(s),
            Err(e) => log::warn!("ignoring cache {}: {e}", path.display()),
        }
    }
    let space = ManinSymbolSpace::new(level);
    std::fs::create_dir_all(dir)?;
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serialize(&space))?;
    std::fs::rename(&tmp, &path)?;
    Ok(space)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = ManinSymbolSpace::new(37);
        let text = serialize(&s);
        let t = deserialize(&text, 37).unwrap();
        assert_eq!(serialize(&t), text);
        assert!(deserialize(&text, 38).is_err());
        assert!(deserialize(&text.replace("end\n", ""), 37).is_err());
    }

    #[test]
    fn load_or_build_writes_then_reads() {
        let dir = tempfile::tempdir().unwrap();
        let a = load_or_build(Some(dir.path()), 11).unwrap();
        assert!(cache_path(dir.path(), 11).exists());
        let b = load_or_build(Some(dir.path()), 11).unwrap();
        assert_eq!(serialize(&a), serialize(&b));
    }
}

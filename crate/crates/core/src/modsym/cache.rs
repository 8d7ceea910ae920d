//! On-disk cache of eigensymbol value tables, one checksummed JSON file per curve.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::curve::CurveData;
use super::p1::P1List;
use super::symbol::PlusEigenSymbol;
use crate::error::{Error, Result};

pub const CACHE_VERSION: &str = "plus-eigensymbol-v1";
pub const CACHE_DIR_ENV: &str = "IWASAWA_CACHE_DIR";

#[derive(Debug, Serialize, Deserialize)]
struct Payload {
    version: String,
    curve: CurveData,
    reps: Vec<(u64, u64)>,
    values: Vec<String>,
    hecke_primes: Vec<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CacheFile {
    payload: Payload,
    sha256: String,
}

fn checksum(payload: &Payload) -> Result<String> {
    Ok(hex::encode(Sha256::digest(serde_json::to_vec(payload)?)))
}

/// Flag, then the environment variable, then `.cache`.
pub fn resolve_cache_dir(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(".cache"))
}

pub fn cache_path(dir: &Path, curve: &CurveData) -> PathBuf {
    dir.join(format!("{}_{}.json", curve.label, curve.conductor))
}

pub fn store(dir: &Path, symbol: &PlusEigenSymbol) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let payload = Payload {
        version: CACHE_VERSION.into(),
        curve: symbol.curve.clone(),
        reps: symbol.p1().reps().to_vec(),
        values: symbol.values().iter().map(BigInt::to_string).collect(),
        hecke_primes: symbol.hecke_primes.clone(),
    };
    let sha256 = checksum(&payload)?;
    let path = cache_path(dir, &symbol.curve);
    // Write then rename so a crash never leaves a half-written file under the real name.
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_vec_pretty(&CacheFile { payload, sha256 })?)?;
    fs::rename(&tmp, &path)?;
    Ok(path)
}

pub fn load(dir: &Path, curve: &CurveData) -> Result<PlusEigenSymbol> {
    let path = cache_path(dir, curve);
    let shown = path.display().to_string();
    let text = match fs::read(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(Error::CacheMiss(shown)),
        Err(e) => return Err(e.into()),
    };
    let file: CacheFile =
        serde_json::from_slice(&text).map_err(|e| Error::CorruptCache(format!("{shown}: {e}")))?;
    if checksum(&file.payload)? != file.sha256 {
        return Err(Error::CorruptCache(format!("{shown}: checksum mismatch")));
    }
    let p = file.payload;
    if p.version != CACHE_VERSION || p.curve != *curve {
        // Stale but intact: recompute rather than fail.
        return Err(Error::CacheMiss(shown));
    }
    if p.reps != P1List::new(curve.conductor).reps() {
        return Err(Error::CorruptCache(format!("{shown}: P^1 ordering differs")));
    }
    let values = p
        .values
        .iter()
        .map(|v| v.parse::<BigInt>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::CorruptCache(format!("{shown}: {e}")))?;
    PlusEigenSymbol::from_values(curve.clone(), values, p.hecke_primes)
        .map_err(|e| Error::CorruptCache(format!("{shown}: {e}")))
}

/// Cached symbol if present, otherwise computed and stored. A corrupt file is an error.
pub fn load_or_compute(dir: Option<&Path>, curve: &CurveData) -> Result<PlusEigenSymbol> {
    let Some(dir) = dir else {
        return PlusEigenSymbol::compute(curve);
    };
    match load(dir, curve) {
        Ok(s) => Ok(s),
        Err(Error::CacheMiss(_)) => {
            let s = PlusEigenSymbol::compute(curve)?;
            store(dir, &s)?;
            Ok(s)
        }
        Err(e) => Err(e),
    }
}

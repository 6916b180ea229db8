//! Content-addressed on-disk matrix cache.
//!
//! File layout (all integers little-endian):
//!
//! ```text
//! "TWDMAT01"            8-byte magic
//! mode: u8              0 = exact, 1 = approx
//! tol: f64              approx tolerance the entry was computed at (0 for exact)
//! rows: u64, cols: u64
//! entries, row-major:
//!   exact   num_len: u64, num bytes (two's complement), den_len: u64, den bytes
//!   approx  re: f64, im: f64
//! sha256 of everything above (32 bytes)
//! ```
//!
//! Files are named by the sha256 of the key and written via temp-file + rename.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalars::{Complex64, Field, Rational, Scalar};

const MAGIC: &[u8; 8] = b"TWDMAT01";
pub const CACHE_ENV: &str = "TWINDUAL_CACHE";

#[derive(Clone, Debug, PartialEq)]
pub struct CacheKey {
    pub n: usize,
    pub q: String,
    pub r: usize,
    pub basis: String,
    pub kind: String,
    pub exact: bool,
    /// Ignored for exact entries.
    pub tol: f64,
}

impl CacheKey {
    pub fn digest(&self) -> String {
        let tol = if self.exact { 0.0 } else { self.tol };
        let text = format!(
            "n={};q={};r={};basis={};kind={};mode={};tol={:e}",
            self.n,
            self.q,
            self.r,
            self.basis,
            self.kind,
            if self.exact { "exact" } else { "approx" },
            tol
        );
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[derive(Clone, Debug)]
pub struct MatrixCache {
    dir: PathBuf,
}

impl MatrixCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        MatrixCache { dir: dir.into() }
    }

    /// `$TWINDUAL_CACHE` if set, otherwise `fallback`.
    pub fn from_env_or(fallback: impl Into<PathBuf>) -> Self {
        match std::env::var_os(CACHE_ENV) {
            Some(dir) if !dir.is_empty() => MatrixCache::new(dir),
            _ => MatrixCache::new(fallback),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!("{}.twm", key.digest()))
    }

    pub fn store<F: Field>(&self, key: &CacheKey, m: &Matrix<F>) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let bytes = encode(m, key.tol);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(&bytes)?;
        tmp.as_file().sync_all()?;
        let path = self.path(key);
        tmp.persist(&path).map_err(|e| Error::Io(e.error))?;
        Ok(path)
    }

    /// `Ok(None)` on a miss. A corrupt entry is removed, logged and treated as a miss.
    pub fn lookup<F: Field>(&self, key: &CacheKey) -> Result<Option<Matrix<F>>> {
        let path = self.path(key);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        match decode::<F>(&bytes, key) {
            Ok(m) => Ok(Some(m)),
            Err(why) => {
                log::warn!("corrupt cache entry {}: {why}; recomputing", path.display());
                let _ = fs::remove_file(&path);
                Ok(None)
            }
        }
    }

    pub fn get_or_compute<F: Field>(&self, key: &CacheKey, compute: impl FnOnce() -> Result<Matrix<F>>) -> Result<Matrix<F>> {
        if let Some(m) = self.lookup(key)? {
            return Ok(m);
        }
        let m = compute()?;
        self.store(key, &m)?;
        Ok(m)
    }
}

fn encode<F: Field>(m: &Matrix<F>, tol: f64) -> Vec<u8> {
    let mut out = Vec::with_capacity(32 + 16 * m.entries().len());
    out.extend_from_slice(MAGIC);
    out.push(if F::EXACT { 0 } else { 1 });
    out.extend_from_slice(&(if F::EXACT { 0.0 } else { tol }).to_le_bytes());
    out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    for x in m.entries() {
        match x.to_scalar() {
            Scalar::Exact(r) => {
                for part in [r.numer(), r.denom()] {
                    let b = part.to_signed_bytes_le();
                    out.extend_from_slice(&(b.len() as u64).to_le_bytes());
                    out.extend_from_slice(&b);
                }
            }
            Scalar::Approx(c) => {
                out.extend_from_slice(&c.re.to_le_bytes());
                out.extend_from_slice(&c.im.to_le_bytes());
            }
        }
    }
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], String> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or("truncated")?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> std::result::Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> std::result::Result<f64, String> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

fn decode<F: Field>(bytes: &[u8], key: &CacheKey) -> std::result::Result<Matrix<F>, String> {
    if bytes.len() < MAGIC.len() + 32 {
        return Err("truncated".into());
    }
    let (body, digest) = bytes.split_at(bytes.len() - 32);
    if Sha256::digest(body).as_slice() != digest {
        return Err("checksum mismatch".into());
    }
    let mut rd = Reader { bytes: body, pos: 0 };
    if rd.take(8)? != MAGIC {
        return Err("bad magic".into());
    }
    let exact = match rd.take(1)?[0] {
        0 => true,
        1 => false,
        b => return Err(format!("unknown mode byte {b}")),
    };
    if exact != F::EXACT {
        return Err("arithmetic mode mismatch".into());
    }
    let tol = rd.f64()?;
    if !exact && tol != key.tol {
        return Err(format!("tolerance {tol:e} differs from requested {:e}", key.tol));
    }
    let rows = rd.u64()? as usize;
    let cols = rd.u64()? as usize;
    let count = rows.checked_mul(cols).ok_or("size overflow")?;
    let mut data = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        let s = if exact {
            let mut parts = [BigInt::default(), BigInt::default()];
            for p in &mut parts {
                let len = rd.u64()? as usize;
                *p = BigInt::from_signed_bytes_le(rd.take(len)?);
            }
            let [num, den] = parts;
            if den == BigInt::from(0) {
                return Err("zero denominator".into());
            }
            Scalar::Exact(Rational::new(num, den))
        } else {
            Scalar::Approx(Complex64::new(rd.f64()?, rd.f64()?))
        };
        data.push(F::from_scalar(&s).ok_or("scalar mode mismatch")?);
    }
    if rd.pos != body.len() {
        return Err("trailing bytes".into());
    }
    Matrix::from_vec(rows, cols, data).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rational;

    fn key(q: &str, exact: bool, tol: f64) -> CacheKey {
        CacheKey { n: 4, q: q.into(), r: 2, basis: "u".into(), kind: "s1".into(), exact, tol }
    }

    #[test]
    fn exact_round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let cache = MatrixCache::new(dir.path());
        let m = Matrix::from_fn(3, 2, |i, j| rational(i as i64 - 7, j as i64 + 3) * rational(1 << 40, 1));
        let k = key("4/1", true, 1e-9);
        cache.store(&k, &m).unwrap();
        assert_eq!(cache.lookup::<Rational>(&k).unwrap(), Some(m.clone()));
        assert_eq!(encode(&cache.lookup::<Rational>(&k).unwrap().unwrap(), 0.0), encode(&m, 0.0));
    }

    #[test]
    fn keys_separate_q_and_tolerance() {
        assert_ne!(key("4/1", true, 1e-9).digest(), key("9/1", true, 1e-9).digest());
        assert_ne!(key("4/1", false, 1e-9).digest(), key("4/1", false, 1e-6).digest());
        assert_eq!(key("4/1", true, 1e-9).digest(), key("4/1", true, 1e-6).digest());

        let dir = tempfile::tempdir().unwrap();
        let cache = MatrixCache::new(dir.path());
        let m = Matrix::<Complex64>::identity(2);
        cache.store(&key("4/1", false, 1e-9), &m).unwrap();
        assert!(cache.lookup::<Complex64>(&key("4/1", false, 1e-6)).unwrap().is_none());
        assert!(cache.lookup::<Complex64>(&key("4/1", false, 1e-9)).unwrap().is_some());
    }

    #[test]
    fn corrupt_entry_recomputes() {
        let dir = tempfile::tempdir().unwrap();
        let cache = MatrixCache::new(dir.path());
        let k = key("4/1", true, 0.0);
        let m = Matrix::<Rational>::identity(3);
        let path = cache.store(&k, &m).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes[20] ^= 0xff;
        fs::write(&path, bytes).unwrap();
        assert!(cache.lookup::<Rational>(&k).unwrap().is_none());
        let got = cache.get_or_compute(&k, || Ok(m.clone())).unwrap();
        assert_eq!(got, m);
        assert_eq!(cache.lookup::<Rational>(&k).unwrap(), Some(m));
    }
}

//! Content-addressed store of computed results.
//!
//! Each record lives in `<dir>/<key>.json`, where the key hashes the curve
//! data that affects results together with the request descriptor. A record
//! also carries a digest of its payload; a record whose digest, curve hash or
//! descriptor does not match is treated as a miss.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use toprec_core::curve::{CurveDocument, RationalDoc, SpectralCurve};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub curve_hash: String,
    pub descriptor: String,
    pub engine_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_order: Option<i64>,
    pub payload: Value,
    pub digest: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn payload_digest(descriptor: &str, payload: &Value) -> String {
    let text = serde_json::to_string(payload).expect("json values serialize");
    sha256_hex(format!("{descriptor}\n{text}").as_bytes())
}

/// Hash of `y`, `dx`, the expansion points and the frame order override.
pub fn curve_hash(curve: &SpectralCurve, order: Option<i64>) -> String {
    #[derive(Serialize)]
    struct Hashed<'a> {
        y: RationalDoc,
        dx: RationalDoc,
        expansion_points: &'a [toprec_core::curve::ExpansionPointDoc],
        order: Option<i64>,
    }
    let doc = document_points(curve);
    let h = Hashed {
        y: RationalDoc::from_function(&curve.y),
        dx: RationalDoc::from_function(&curve.rho),
        expansion_points: &doc,
        order,
    };
    sha256_hex(serde_json::to_string(&h).expect("serializable").as_bytes())
}

fn document_points(curve: &SpectralCurve) -> Vec<toprec_core::curve::ExpansionPointDoc> {
    use toprec_core::curve::{ExpansionPointDoc, WeightDoc};
    curve
        .expansion_points
        .iter()
        .map(|p| ExpansionPointDoc {
            name: p.name.clone(),
            location: p.weight.point.to_string(),
            weight: WeightDoc {
                rational: RationalDoc::from_function(&p.weight.rational),
                exponent: (!p.weight.exponent.is_zero()).then(|| RationalDoc::from_function(&p.weight.exponent)),
                index: p.weight.index,
            },
        })
        .collect()
}

impl ResultRecord {
    pub fn new(curve_hash: String, descriptor: String, frame_order: Option<i64>, payload: Value) -> Self {
        let digest = payload_digest(&descriptor, &payload);
        Self {
            curve_hash,
            descriptor,
            engine_version: ENGINE_VERSION.to_string(),
            frame_order,
            payload,
            digest,
        }
    }

    fn is_intact(&self) -> bool {
        self.digest == payload_digest(&self.descriptor, &self.payload) && self.engine_version == ENGINE_VERSION
    }
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, curve_hash: &str, descriptor: &str) -> PathBuf {
        let key = sha256_hex(format!("{curve_hash}\n{descriptor}").as_bytes());
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, curve_hash: &str, descriptor: &str) -> Option<ResultRecord> {
        let text = fs::read_to_string(self.path(curve_hash, descriptor)).ok()?;
        let record: ResultRecord = serde_json::from_str(&text).ok()?;
        (record.is_intact() && record.curve_hash == curve_hash && record.descriptor == descriptor).then_some(record)
    }

    /// Writes to a temporary file in the same directory, then renames.
    pub fn store(&self, record: &ResultRecord) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(&record.curve_hash, &record.descriptor);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, serde_json::to_string_pretty(record).expect("serializable"))?;
        fs::rename(&tmp, &path)
    }
}

/// Parses a curve document and reports its cache directory setting, if any.
pub fn settings_of(text: &str) -> (Option<i64>, Option<String>) {
    match CurveDocument::from_json(text) {
        Ok(doc) => match doc.settings {
            Some(s) => (s.order, s.cache),
            None => (None, None),
        },
        Err(_) => (None, None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use toprec_core::curve::builtin_curve;

    #[test]
    fn hashes_distinguish_curves_and_orders() {
        let a = builtin_curve("airy").unwrap();
        let g = builtin_curve("gaussian").unwrap();
        assert_ne!(curve_hash(&a, None), curve_hash(&g, None));
        assert_ne!(curve_hash(&a, None), curve_hash(&a, Some(20)));
        assert_eq!(curve_hash(&a, None), curve_hash(&a.clone(), None));
    }

    #[test]
    fn tampered_records_are_misses() {
        let dir = std::env::temp_dir().join(format!("toprec-cache-test-{}", std::process::id()));
        let cache = Cache::new(&dir);
        let rec = ResultRecord::new("h".into(), "omega 0 3".into(), Some(8), serde_json::json!({"coeff": "1/2"}));
        cache.store(&rec).unwrap();
        assert_eq!(cache.load("h", "omega 0 3"), Some(rec.clone()));
        assert_eq!(cache.load("h", "omega 1 1"), None);
        let path = cache.path("h", "omega 0 3");
        let text = fs::read_to_string(&path).unwrap().replace("1/2", "1/3");
        fs::write(&path, text).unwrap();
        assert_eq!(cache.load("h", "omega 0 3"), None);
        fs::remove_dir_all(dir).unwrap();
    }
}

//! Serialization: CSV tables, JSON documents and the on-disk measure cache.
//!
//! CSV floats are written with 17 significant digits in scientific notation
//! and a `.` decimal separator. JSON floats use the shortest representation
//! that parses back to the same bits.

use std::fmt::Write as _;
use std::fs::{self, File, OpenOptions};
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{IntersectionNumbers, OddGraph, Stratification};
use crate::jacobi::{JacobiMode, JacobiSequence};
use crate::qclt::ConvergenceTable;
use crate::spectral::{gauss_measure_with_tolerance, SpectralMeasure};
use crate::walk::AmplitudeSeries;

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable overriding the cache directory.
pub const CACHE_DIR_ENV: &str = "ODDWALK_CACHE_DIR";

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn series_csv(series: &AmplitudeSeries) -> String {
    let mut out = String::from("t,m,re_q,im_q,prob_stratum,prob_vertex\n");
    for (t, row) in series.t_grid.iter().zip(&series.amplitudes) {
        for (m, q) in row.iter().enumerate() {
            let p = q.norm_sqr();
            let pv = series
                .strata_sizes
                .as_ref()
                .map(|s| fmt_f64(p / s[m]))
                .unwrap_or_default();
            writeln!(out, "{},{m},{},{},{},{pv}", fmt_f64(*t), fmt_f64(q.re), fmt_f64(q.im), fmt_f64(p)).unwrap();
        }
    }
    out
}

pub fn convergence_csv(table: &ConvergenceTable) -> String {
    let mut out = String::from("k,m,t,re_finite,im_finite,re_limit,im_limit,gap\n");
    for r in &table.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.k,
            r.m,
            fmt_f64(r.t),
            fmt_f64(r.finite.re),
            fmt_f64(r.finite.im),
            fmt_f64(r.limit.re),
            fmt_f64(r.limit.im),
            fmt_f64(r.gap)
        )
        .unwrap();
    }
    out
}

pub fn jacobi_csv(jac: &JacobiSequence) -> String {
    let mut out = String::from("i,omega,alpha\n");
    for i in 1..=jac.levels() {
        let omega = if i < jac.levels() { jac.omega_at(i).to_string() } else { String::new() };
        writeln!(out, "{i},{omega},{}", jac.alpha_at(i)).unwrap();
    }
    out
}

pub fn measure_csv(measure: &SpectralMeasure) -> String {
    let mut out = String::from("x,w\n");
    for a in &measure.atoms {
        writeln!(out, "{},{}", fmt_f64(a.x), fmt_f64(a.w)).unwrap();
    }
    out
}

/// Vertex, edge and stratum summary of a constructed graph.
#[derive(Debug, Clone, Serialize)]
pub struct GraphSummary {
    pub k: usize,
    pub ground_set_size: usize,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub degree: usize,
    pub origin: usize,
    pub origin_mask: u32,
    pub diameter: usize,
    pub strata_sizes: Vec<usize>,
    pub intersection: IntersectionNumbers,
}

impl GraphSummary {
    pub fn new(graph: &OddGraph, strat: &Stratification, inter: IntersectionNumbers) -> Self {
        Self {
            k: graph.k(),
            ground_set_size: graph.ground_set_size(),
            vertex_count: graph.vertex_count(),
            edge_count: graph.edge_count(),
            degree: graph.neighbors(0).len(),
            origin: strat.origin,
            origin_mask: graph.mask(strat.origin),
            diameter: strat.diameter(),
            strata_sizes: strat.sizes(),
            intersection: inter,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("stratum,size,a,b,c\n");
        let inter = &self.intersection;
        for (i, size) in self.strata_sizes.iter().enumerate() {
            writeln!(out, "{i},{size},{},{},{}", inter.a[i], inter.b[i], inter.c[i]).unwrap();
        }
        out
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Serialize, Deserialize)]
struct CachedMeasure {
    schema_version: u32,
    #[serde(flatten)]
    measure: SpectralMeasure,
}

pub fn measure_to_json(measure: &SpectralMeasure) -> Result<String> {
    to_json(&CachedMeasure {
        schema_version: SCHEMA_VERSION,
        measure: measure.clone(),
    })
}

/// Parses a measure document; documents from another schema version are
/// rejected.
pub fn measure_from_json(text: &str) -> Result<SpectralMeasure> {
    let doc: CachedMeasure = serde_json::from_str(text)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::InvalidArgument(format!(
            "measure schema version {} (expected {SCHEMA_VERSION})",
            doc.schema_version
        )));
    }
    Ok(doc.measure)
}

/// Writes `contents` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, contents)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(contents.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Directory of spectral measures keyed by `(mode, k, levels)`.
#[derive(Debug, Clone)]
pub struct MeasureCache {
    dir: PathBuf,
}

struct LockGuard(PathBuf);

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

impl MeasureCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, mode: JacobiMode, k: Option<usize>, levels: usize) -> PathBuf {
        let k = k.map_or_else(|| "inf".to_string(), |k| k.to_string());
        self.dir.join(format!("measure-{mode}-k{k}-n{levels}.json"))
    }

    /// Cached measure, if present and written under the current schema.
    pub fn load(&self, mode: JacobiMode, k: Option<usize>, levels: usize) -> Option<SpectralMeasure> {
        let text = fs::read_to_string(self.path_for(mode, k, levels)).ok()?;
        match measure_from_json(&text) {
            Ok(m) if m.mode == mode && m.k == k && m.n == levels => Some(m),
            _ => None,
        }
    }

    fn lock(&self) -> Result<LockGuard> {
        fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(".lock");
        for _ in 0..100 {
            match OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(_) => return Ok(LockGuard(path)),
                Err(e) if e.kind() == ErrorKind::AlreadyExists => thread::sleep(Duration::from_millis(20)),
                Err(e) => return Err(e.into()),
            }
        }
        Err(Error::CacheLocked { path })
    }

    pub fn store(&self, measure: &SpectralMeasure) -> Result<PathBuf> {
        let _guard = self.lock()?;
        let path = self.path_for(measure.mode, measure.k, measure.n);
        let tmp = path.with_extension("json.tmp");
        {
            let mut f = File::create(&tmp)?;
            f.write_all(measure_to_json(measure)?.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Returns the cached measure or computes and stores it. The flag is
    /// `true` on a cache hit.
    pub fn get_or_compute(&self, jac: &JacobiSequence, levels: usize, tolerance: f64) -> Result<(SpectralMeasure, bool)> {
        if let Some(m) = self.load(jac.mode, jac.k, levels) {
            return Ok((m, true));
        }
        let m = gauss_measure_with_tolerance(jac, levels, tolerance)?;
        self.store(&m)?;
        Ok((m, false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::closed_form_intersection;
    use crate::jacobi::jacobi_from_intersection;
    use crate::spectral::gauss_measure;
    use proptest::prelude::*;

    fn k4_measure() -> (JacobiSequence, SpectralMeasure) {
        let jac = jacobi_from_intersection(&closed_form_intersection(4).unwrap(), JacobiMode::Exact).unwrap();
        let m = gauss_measure(&jac, 4).unwrap();
        (jac, m)
    }

    #[test]
    fn json_shape() {
        let (_, m) = k4_measure();
        let v: serde_json::Value = serde_json::from_str(&measure_to_json(&m).unwrap()).unwrap();
        assert_eq!(v["mode"], "exact");
        assert_eq!(v["k"], 4);
        assert_eq!(v["n"], 4);
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert!(v["atoms"][0]["x"].is_f64() && v["atoms"][0]["w"].is_f64());
    }

    #[test]
    fn stale_schema_is_rejected() {
        let (_, m) = k4_measure();
        let text = measure_to_json(&m).unwrap().replace("\"schema_version\": 1", "\"schema_version\": 0");
        assert!(measure_from_json(&text).is_err());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = MeasureCache::new(dir.path().join("c"));
        let (jac, m) = k4_measure();
        let (first, hit) = cache.get_or_compute(&jac, 4, 1e-10).unwrap();
        assert!(!hit);
        let (second, hit) = cache.get_or_compute(&jac, 4, 1e-10).unwrap();
        assert!(hit);
        assert_eq!(first, m);
        for (a, b) in second.atoms.iter().zip(&m.atoms) {
            assert_eq!(a.x.to_bits(), b.x.to_bits());
            assert_eq!(a.w.to_bits(), b.w.to_bits());
        }
        assert!(!dir.path().join("c/.lock").exists());
    }

    #[test]
    fn stale_cache_entry_is_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let cache = MeasureCache::new(dir.path());
        let (jac, _) = k4_measure();
        let path = cache.path_for(jac.mode, jac.k, 4);
        fs::write(&path, "{\"schema_version\": 0}").unwrap();
        let (_, hit) = cache.get_or_compute(&jac, 4, 1e-10).unwrap();
        assert!(!hit);
        assert!(cache.load(jac.mode, jac.k, 4).is_some());
    }

    #[test]
    fn held_lock_blocks_writers() {
        let dir = tempfile::tempdir().unwrap();
        let cache = MeasureCache::new(dir.path());
        fs::write(dir.path().join(".lock"), "").unwrap();
        let (_, m) = k4_measure();
        assert!(matches!(cache.store(&m), Err(Error::CacheLocked { .. })));
    }

    #[test]
    fn csv_headers_and_format() {
        let (jac, _) = k4_measure();
        assert!(jacobi_csv(&jac).starts_with("i,omega,alpha\n1,4,0\n"));
        assert!(jacobi_csv(&jac).ends_with("4,,2\n"));
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    proptest! {
        #[test]
        fn measure_json_is_bit_exact(xs in proptest::collection::vec((-1e3f64..1e3, 1e-300f64..1.0), 1..20)) {
            let m = SpectralMeasure {
                mode: JacobiMode::Limit,
                k: None,
                n: xs.len(),
                atoms: xs.iter().map(|&(x, w)| crate::spectral::Atom { x, w }).collect(),
            };
            let back = measure_from_json(&measure_to_json(&m).unwrap()).unwrap();
            for (a, b) in back.atoms.iter().zip(&m.atoms) {
                prop_assert_eq!(a.x.to_bits(), b.x.to_bits());
                prop_assert_eq!(a.w.to_bits(), b.w.to_bits());
            }
        }

        #[test]
        fn csv_floats_round_trip(x in proptest::num::f64::NORMAL) {
            prop_assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}

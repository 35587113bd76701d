//! On-disk formats.
//!
//! A field file is one ASCII header line `QGF1 nx ny lx ly time` followed by
//! `nx·ny` little-endian `f64` values, y index outer. Floats in headers and
//! CSV files use Rust's shortest round-trip formatting, so every value reads
//! back bit for bit.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use qgles_core::dynamics::StepDiagnostics;
use qgles_core::sgs::Histogram;
use qgles_core::spectral::SineCoeffs;
use qgles_core::{Field, Grid, SgsSeries, SgsStats, Trajectory};

use crate::error::{LabError, LabResult};

const MAGIC: &str = "QGF1";

/// Float text used in headers and CSV output.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn encode_field(f: &Field, time: f64) -> Vec<u8> {
    let g = f.grid();
    let header = format!(
        "{MAGIC} {} {} {} {} {}\n",
        g.nx(),
        g.ny(),
        num(g.lx()),
        num(g.ly()),
        num(time)
    );
    let mut out = Vec::with_capacity(header.len() + 8 * g.len());
    out.extend_from_slice(header.as_bytes());
    for v in f.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_field(bytes: &[u8], path: &Path) -> LabResult<(Field, f64)> {
    let bad = |msg: &str| LabError::format(path, msg);
    let end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| bad("missing header line"))?;
    let header = std::str::from_utf8(&bytes[..end]).map_err(|_| bad("header is not ASCII"))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 6 || parts[0] != MAGIC {
        return Err(bad("expected header `QGF1 nx ny lx ly time`"));
    }
    let int = |s: &str| s.parse::<usize>().map_err(|_| bad("bad node count in header"));
    let float = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number in header"));
    let (nx, ny) = (int(parts[1])?, int(parts[2])?);
    let (lx, ly, time) = (float(parts[3])?, float(parts[4])?, float(parts[5])?);
    let grid = Grid::new(nx, ny, lx, ly).map_err(|e| bad(&e.to_string()))?;
    let body = &bytes[end + 1..];
    if body.len() != 8 * grid.len() {
        return Err(bad(&format!(
            "expected {} data bytes, found {}",
            8 * grid.len(),
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let field = Field::from_values(grid, values).map_err(|e| bad(&e.to_string()))?;
    Ok((field, time))
}

pub fn write_field(path: &Path, f: &Field, time: f64) -> LabResult<()> {
    fs::write(path, encode_field(f, time)).map_err(|e| LabError::io(path, e))
}

pub fn read_field(path: &Path) -> LabResult<(Field, f64)> {
    let bytes = fs::read(path).map_err(|e| LabError::io(path, e))?;
    decode_field(&bytes, path)
}

pub fn create_dir(dir: &Path) -> LabResult<()> {
    fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> LabResult<()> {
    let csv_err = |e: csv::Error| LabError::format(path, e.to_string());
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| LabError::io(path, e))
}

/// Reads a CSV written by [`write_csv`] as header plus rows of floats.
pub fn read_csv(path: &Path) -> LabResult<(Vec<String>, Vec<Vec<f64>>)> {
    let csv_err = |e: csv::Error| LabError::format(path, e.to_string());
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => LabError::io(path, std::io::Error::other(e.to_string())),
        _ => csv_err(e),
    })?;
    let header = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| LabError::format(path, format!("not a number: `{s}`")))
            })
            .collect::<LabResult<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// Ordered `key = value` lines written as `manifest.txt`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub entries: Vec<(String, String)>,
}

impl Manifest {
    pub const FILE: &'static str = "manifest.txt";

    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn write(&self, dir: &Path) -> LabResult<()> {
        let path = dir.join(Self::FILE);
        let mut text = String::new();
        for (k, v) in &self.entries {
            text.push_str(&format!("{k} = {v}\n"));
        }
        fs::write(&path, text).map_err(|e| LabError::io(&path, e))
    }

    pub fn read(dir: &Path) -> LabResult<Self> {
        let path = dir.join(Self::FILE);
        let text = fs::read_to_string(&path).map_err(|e| LabError::io(&path, e))?;
        let mut m = Self::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| LabError::format(&path, format!("bad manifest line `{line}`")))?;
            m.entries.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(m)
    }
}

fn numbered(dir: &Path, prefix: &str, k: usize) -> PathBuf {
    dir.join(format!("{prefix}_{k:06}.qgf"))
}

fn read_numbered(dir: &Path, prefix: &str, count: usize) -> LabResult<(Vec<f64>, Vec<Field>)> {
    let mut times = Vec::with_capacity(count);
    let mut fields = Vec::with_capacity(count);
    for k in 0..count {
        let (f, t) = read_field(&numbered(dir, prefix, k))?;
        times.push(t);
        fields.push(f);
    }
    Ok((times, fields))
}

fn manifest_count(m: &Manifest, dir: &Path) -> LabResult<usize> {
    m.get("snapshots")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| LabError::format(&dir.join(Manifest::FILE), "missing `snapshots` count"))
}

pub const DIAGNOSTICS_HEADER: [&str; 5] = ["t", "enstrophy", "energy", "lemma1_bound", "cfl"];

pub fn diagnostics_rows(d: &[StepDiagnostics]) -> Vec<Vec<String>> {
    d.iter()
        .map(|d| {
            vec![
                num(d.t),
                num(d.enstrophy),
                num(d.energy),
                num(d.lemma1_bound),
                num(d.cfl),
            ]
        })
        .collect()
}

/// Writes snapshots `q_NNNNNN.qgf`, `diagnostics.csv` and a manifest that
/// extends `manifest`.
pub fn write_trajectory(dir: &Path, traj: &Trajectory, manifest: Manifest) -> LabResult<()> {
    create_dir(dir)?;
    for (k, (t, q)) in traj.times().iter().zip(traj.snapshots()).enumerate() {
        write_field(&numbered(dir, "q", k), q, *t)?;
    }
    write_csv(
        &dir.join("diagnostics.csv"),
        &DIAGNOSTICS_HEADER,
        &diagnostics_rows(traj.diagnostics()),
    )?;
    manifest.with("snapshots", traj.len()).write(dir)
}

/// Reads back the snapshots of [`write_trajectory`] (diagnostics are not
/// reloaded).
pub fn read_trajectory(dir: &Path) -> LabResult<Trajectory> {
    let m = Manifest::read(dir)?;
    let (times, fields) = read_numbered(dir, "q", manifest_count(&m, dir)?)?;
    let grid = *fields
        .first()
        .ok_or_else(|| LabError::format(dir, "trajectory has no snapshots"))?
        .grid();
    let mut traj = Trajectory::new(grid);
    for (t, f) in times.into_iter().zip(fields) {
        traj.push_snapshot(t, f)?;
    }
    Ok(traj)
}

pub fn write_series(dir: &Path, series: &SgsSeries, manifest: Manifest) -> LabResult<()> {
    create_dir(dir)?;
    for (k, (t, r)) in series.times().iter().zip(series.fields()).enumerate() {
        write_field(&numbered(dir, "R", k), r, *t)?;
    }
    manifest
        .with("delta", num(series.delta()))
        .with("snapshots", series.len())
        .write(dir)
}

pub fn read_series(dir: &Path) -> LabResult<SgsSeries> {
    let m = Manifest::read(dir)?;
    let delta = m
        .get("delta")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| LabError::format(&dir.join(Manifest::FILE), "missing `delta`"))?;
    let (times, fields) = read_numbered(dir, "R", manifest_count(&m, dir)?)?;
    let grid = *fields
        .first()
        .ok_or_else(|| LabError::format(dir, "series has no snapshots"))?
        .grid();
    Ok(SgsSeries::from_parts(grid, delta, times, fields)?)
}

pub fn write_stats(dir: &Path, stats: &SgsStats, manifest: Manifest) -> LabResult<()> {
    create_dir(dir)?;
    write_field(&dir.join("mean.qgf"), &stats.mean_field, 0.0)?;
    write_field(&dir.join("std.qgf"), &stats.std_field, 0.0)?;
    let s = &stats.spatial_spectrum;
    let mut rows = Vec::with_capacity(s.data.len());
    for k2 in 1..=s.n2 {
        for k1 in 1..=s.n1 {
            rows.push(vec![k1.to_string(), k2.to_string(), num(s.get(k1, k2))]);
        }
    }
    write_csv(&dir.join("spectrum.csv"), &["k1", "k2", "variance"], &rows)?;
    let h = &stats.histogram;
    let rows: Vec<Vec<String>> = h
        .counts
        .iter()
        .enumerate()
        .map(|(b, c)| vec![num(h.edges[b]), num(h.edges[b + 1]), c.to_string()])
        .collect();
    write_csv(&dir.join("histogram.csv"), &["lower", "upper", "count"], &rows)?;
    let (mean_abs, std) = stats.basin_mean_abs_mean_and_std();
    write_csv(
        &dir.join("tau.csv"),
        &["tau", "sample_dt", "samples", "basin_mean_abs_mean", "basin_mean_std"],
        &[vec![
            num(stats.tau),
            num(stats.sample_dt),
            stats.samples.to_string(),
            num(mean_abs),
            num(std),
        ]],
    )?;
    manifest.write(dir)
}

pub fn read_stats(dir: &Path) -> LabResult<SgsStats> {
    let (mean_field, _) = read_field(&dir.join("mean.qgf"))?;
    let (std_field, _) = read_field(&dir.join("std.qgf"))?;
    let g = *mean_field.grid();
    let mut spectrum = SineCoeffs::zeros(g.nx() - 2, g.ny() - 2);
    let path = dir.join("spectrum.csv");
    let (_, rows) = read_csv(&path)?;
    if rows.len() != spectrum.data.len() {
        return Err(LabError::format(&path, "spectrum size does not match the grid"));
    }
    for row in &rows {
        let (k1, k2) = (row[0] as usize, row[1] as usize);
        if !(1..=spectrum.n1).contains(&k1) || !(1..=spectrum.n2).contains(&k2) {
            return Err(LabError::format(&path, "mode index out of range"));
        }
        spectrum.set(k1, k2, row[2]);
    }
    let (_, rows) = read_csv(&dir.join("histogram.csv"))?;
    let mut edges: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    edges.extend(rows.last().map(|r| r[1]));
    let histogram = Histogram {
        edges,
        counts: rows.iter().map(|r| r[2] as u64).collect(),
    };
    let path = dir.join("tau.csv");
    let (_, rows) = read_csv(&path)?;
    let row = rows.first().ok_or_else(|| LabError::format(&path, "empty"))?;
    Ok(SgsStats {
        mean_field,
        std_field,
        tau: row[0],
        sample_dt: row[1],
        spatial_spectrum: spectrum,
        histogram,
        samples: row[2] as usize,
    })
}

/// Writes raw bytes, creating parent directories.
pub fn write_bytes(path: &Path, bytes: &[u8]) -> LabResult<()> {
    if let Some(parent) = path.parent() {
        create_dir(parent)?;
    }
    let mut file = fs::File::create(path).map_err(|e| LabError::io(path, e))?;
    file.write_all(bytes).map_err(|e| LabError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use qgles_core::rng::{member_rng, white_noise_dirichlet};

    #[test]
    fn field_round_trip_is_bit_exact() {
        let g = Grid::new(9, 7, 1.3, 0.7).unwrap();
        let mut f = white_noise_dirichlet(g, &mut member_rng(4, 0));
        f.set(3, 3, 1e-310);
        f.set(4, 3, -0.0);
        let bytes = encode_field(&f, 0.1 + 0.2);
        let (back, t) = decode_field(&bytes, Path::new("mem")).unwrap();
        assert_eq!(t.to_bits(), (0.1f64 + 0.2).to_bits());
        assert_eq!(back.grid(), f.grid());
        for (a, b) in back.values().iter().zip(f.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert!(bytes.starts_with(b"QGF1 9 7 "));
    }

    #[test]
    fn rejects_corrupt_files() {
        let g = Grid::unit_square(5).unwrap();
        let bytes = encode_field(&Field::zeros(g), 0.0);
        let p = Path::new("x.qgf");
        assert!(decode_field(&bytes[..bytes.len() - 1], p).is_err());
        assert!(decode_field(b"QGF2 5 5 1 1 0\n", p).is_err());
        assert!(decode_field(b"no newline", p).is_err());
    }
}

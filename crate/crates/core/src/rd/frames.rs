use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::grid::PolarGrid;
use crate::error::{Error, Result};
use crate::pattern::FrameDiagnostics;

pub const FORMAT: &str = "thdisk-frameset";
pub const LAYOUT: &str = "time-major/ring-major/theta-minor, little-endian float64";
pub const MANIFEST: &str = "manifest.json";
pub const DIAGNOSTICS: &str = "diagnostics.csv";

/// Contents of `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub version: u32,
    pub layout: String,
    pub grid: PolarGrid,
    pub model: String,
    pub params: serde_json::Value,
    pub species: Vec<String>,
    pub times: Vec<f64>,
    /// One raw file per time; each holds every species, species-major.
    pub files: Vec<String>,
    #[serde(default)]
    pub diagnostics: Option<DiagnosticsInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsInfo {
    pub file: String,
    pub species: String,
    pub rings: Vec<usize>,
    pub n_max: usize,
}

/// Time-stamped fields on a polar grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSet {
    pub grid: PolarGrid,
    pub model: String,
    pub params: serde_json::Value,
    pub species: Vec<String>,
    pub times: Vec<f64>,
    /// `frames[k]` has length species·Nr·Nθ.
    pub frames: Vec<Vec<f64>>,
}

impl FrameSet {
    pub fn new(grid: PolarGrid, model: impl Into<String>, params: serde_json::Value, species: Vec<String>) -> Self {
        FrameSet { grid, model: model.into(), params, species, times: Vec::new(), frames: Vec::new() }
    }

    pub fn frame_len(&self) -> usize {
        self.species.len() * self.grid.len()
    }

    pub fn push(&mut self, time: f64, data: Vec<f64>) -> Result<()> {
        if data.len() != self.frame_len() {
            return Err(Error::DimensionMismatch { expected: self.frame_len(), got: data.len() });
        }
        if let Some(&last) = self.times.last() {
            if !(time > last) {
                return Err(Error::Domain(format!("frame time {time} not after {last}")));
            }
        }
        self.times.push(time);
        self.frames.push(data);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Field of species `s` at frame `k`.
    pub fn field(&self, k: usize, s: usize) -> &[f64] {
        let n = self.grid.len();
        &self.frames[k][s * n..(s + 1) * n]
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s == name)
    }

    fn manifest(&self, diag: Option<&FrameDiagnostics>, diag_species: usize) -> Manifest {
        Manifest {
            format: FORMAT.into(),
            version: 1,
            layout: LAYOUT.into(),
            grid: self.grid,
            model: self.model.clone(),
            params: self.params.clone(),
            species: self.species.clone(),
            times: self.times.clone(),
            files: (0..self.len()).map(frame_name).collect(),
            diagnostics: diag.map(|d| DiagnosticsInfo {
                file: DIAGNOSTICS.into(),
                species: self.species.get(diag_species).cloned().unwrap_or_default(),
                rings: d.rings.clone(),
                n_max: d.n_max,
            }),
        }
    }

    /// Writes the frame set into `dir` through a sibling temporary directory
    /// renamed into place, so a failed write leaves nothing behind. An existing
    /// `dir` is replaced only if it is empty or holds a frame set.
    pub fn write_dir(&self, dir: &Path, diag: Option<&FrameDiagnostics>, diag_species: usize) -> Result<()> {
        let tmp = temp_sibling(dir)?;
        let result = (|| -> Result<()> {
            fs::create_dir_all(&tmp).map_err(|e| Error::io(&tmp, e))?;
            for (k, frame) in self.frames.iter().enumerate() {
                let path = tmp.join(frame_name(k));
                let mut bytes = Vec::with_capacity(frame.len() * 8);
                for v in frame {
                    bytes.extend_from_slice(&v.to_le_bytes());
                }
                fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
            }
            if let Some(d) = diag {
                let path = tmp.join(DIAGNOSTICS);
                let mut buf = Vec::new();
                d.write_csv(&mut buf).map_err(|e| Error::io(&path, e))?;
                fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
            }
            let path = tmp.join(MANIFEST);
            let text = serde_json::to_string_pretty(&self.manifest(diag, diag_species))?;
            fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
            replace_dir(&tmp, dir)
        })();
        if result.is_err() {
            let _ = fs::remove_dir_all(&tmp);
        }
        result
    }

    /// Reads a directory written by [`Self::write_dir`].
    pub fn read_dir(dir: &Path) -> Result<(FrameSet, Manifest)> {
        let mpath = dir.join(MANIFEST);
        let text = fs::read_to_string(&mpath).map_err(|e| Error::io(&mpath, e))?;
        let man: Manifest = serde_json::from_str(&text)?;
        if man.format != FORMAT || man.layout != LAYOUT {
            return Err(Error::Config(format!("{} is not a {FORMAT} manifest", mpath.display())));
        }
        man.grid.validate()?;
        if man.files.len() != man.times.len() {
            return Err(Error::Config("manifest files and times differ in length".into()));
        }
        let mut fs_out = FrameSet::new(man.grid, man.model.clone(), man.params.clone(), man.species.clone());
        for (t, name) in man.times.iter().zip(&man.files) {
            let path = dir.join(name);
            let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            if bytes.len() != fs_out.frame_len() * 8 {
                return Err(Error::DimensionMismatch { expected: fs_out.frame_len() * 8, got: bytes.len() });
            }
            let data = bytes
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
                .collect();
            fs_out.push(*t, data)?;
        }
        Ok((fs_out, man))
    }
}

fn frame_name(k: usize) -> String {
    format!("frame_{k:06}.f64")
}

fn temp_sibling(dir: &Path) -> Result<PathBuf> {
    let name = dir
        .file_name()
        .ok_or_else(|| Error::Config(format!("output path {} has no final component", dir.display())))?;
    let parent = match dir.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent).map_err(|e| Error::io(&parent, e))?;
    let tmp = parent.join(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    if tmp.exists() {
        fs::remove_dir_all(&tmp).map_err(|e| Error::io(&tmp, e))?;
    }
    Ok(tmp)
}

/// Files whose presence marks a directory as an earlier output of this crate.
pub const OUTPUT_MARKERS: [&str; 3] = [MANIFEST, "curves.csv", "report.json"];

/// Writes `files` into `dir` through a sibling temporary directory renamed
/// into place. An existing `dir` is replaced only if it is empty or an
/// earlier output.
pub fn write_output_dir(dir: &Path, files: &[(&str, Vec<u8>)]) -> Result<()> {
    let tmp = temp_sibling(dir)?;
    let result = (|| -> Result<()> {
        fs::create_dir_all(&tmp).map_err(|e| Error::io(&tmp, e))?;
        for (name, bytes) in files {
            let path = tmp.join(name);
            fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        }
        replace_dir(&tmp, dir)
    })();
    if result.is_err() {
        let _ = fs::remove_dir_all(&tmp);
    }
    result
}

/// Moves `tmp` to `dir`, replacing an empty directory or an earlier output.
fn replace_dir(tmp: &Path, dir: &Path) -> Result<()> {
    if dir.exists() {
        let empty = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?.next().is_none();
        let ours = OUTPUT_MARKERS.iter().any(|m| dir.join(m).is_file());
        if !(empty || ours) {
            return Err(Error::Config(format!("{} exists and is not an earlier output", dir.display())));
        }
        fs::remove_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::rename(tmp, dir).map_err(|e| Error::io(dir, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FrameSet {
        let g = PolarGrid::new(1.0, 2, 8).unwrap();
        let mut f = FrameSet::new(g, "test", serde_json::json!({"k": 1}), vec!["u".into(), "v".into()]);
        for k in 0..3 {
            f.push(k as f64 * 0.5, (0..32).map(|i| (i * (k + 1)) as f64 * 0.25).collect()).unwrap();
        }
        f
    }

    #[test]
    fn roundtrip_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("frames");
        let f = sample();
        f.write_dir(&out, None, 0).unwrap();
        let (g, man) = FrameSet::read_dir(&out).unwrap();
        assert_eq!(f, g);
        assert_eq!(man.files[2], "frame_000002.f64");
        assert_eq!(fs::metadata(out.join("frame_000000.f64")).unwrap().len(), 32 * 8);
        // overwrite an earlier output
        f.write_dir(&out, None, 0).unwrap();
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn refuses_foreign_directory() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("keep.txt"), "x").unwrap();
        assert!(sample().write_dir(dir.path(), None, 0).is_err());
        assert!(dir.path().join("keep.txt").exists());
        let leftovers = fs::read_dir(dir.path().parent().unwrap())
            .unwrap()
            .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().contains(".tmp-"))
            .count();
        assert_eq!(leftovers, 0);
    }

    #[test]
    fn times_must_increase() {
        let mut f = sample();
        assert!(f.push(0.5, vec![0.0; 32]).is_err());
        assert!(f.push(5.0, vec![0.0; 3]).is_err());
    }
}

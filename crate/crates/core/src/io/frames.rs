use std::fs;
use std::path::{Path, PathBuf};

use crate::dataset::{Dataset, FeatureMatrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{write_atomically, write_labels};

/// Equal-sized 8-bit grayscale frames, each flattened row-major into one
/// column of a `width·height × frame_count` matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameDataset {
    pub width: usize,
    pub height: usize,
    pixels: Vec<u8>,
    labels: Option<Vec<bool>>,
}

impl FrameDataset {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        let d = width * height;
        if d == 0 || !pixels.len().is_multiple_of(d) {
            return Err(Error::shape(format!(
                "{} pixels do not split into {width}x{height} frames",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<bool>) -> Result<Self> {
        if labels.len() != self.frame_count() {
            return Err(Error::shape(format!(
                "{} labels for {} frames",
                labels.len(),
                self.frame_count()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Pixels per frame.
    pub fn dim(&self) -> usize {
        self.width * self.height
    }

    pub fn frame_count(&self) -> usize {
        self.pixels.len() / self.dim()
    }

    pub fn frame(&self, i: usize) -> &[u8] {
        &self.pixels[i * self.dim()..(i + 1) * self.dim()]
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn labels(&self) -> Option<&[bool]> {
        self.labels.as_deref()
    }

    pub fn to_dataset<S: Scalar>(&self) -> Result<Dataset<S>> {
        let values = self.pixels.iter().map(|&p| S::of_usize(p as usize)).collect();
        let ds = Dataset::new(FeatureMatrix::from_column_major(
            self.dim(),
            self.frame_count(),
            values,
        )?)?;
        match &self.labels {
            Some(l) => ds.with_labels(l.clone()),
            None => Ok(ds),
        }
    }
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Option<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).ok()?.parse().ok()
    }
}

/// Reads a binary (P5) or ASCII (P2) PGM with `maxval <= 255`.
/// Returns `(width, height, pixels)` in row-major order.
pub fn read_pgm(path: impl AsRef<Path>) -> Result<(usize, usize, Vec<u8>)> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let bad = |m: &str| Error::format(path, m.to_string());
    let binary = match bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => return Err(bad("unsupported format: expected a P2 or P5 PGM")),
    };
    let mut h = Header { bytes: &bytes, pos: 2 };
    let width = h.number().ok_or_else(|| bad("missing width"))?;
    let height = h.number().ok_or_else(|| bad("missing height"))?;
    let maxval = h.number().ok_or_else(|| bad("missing maxval"))?;
    if width == 0 || height == 0 {
        return Err(bad("empty image"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(bad("unsupported maxval: only 8-bit images are read"));
    }
    let count = width * height;
    let pixels = if binary {
        // exactly one whitespace byte separates the header from the raster
        let start = h.pos + 1;
        let raster = bytes.get(start..start + count).ok_or_else(|| bad("truncated raster"))?;
        raster.to_vec()
    } else {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let v = h.number().ok_or_else(|| bad("truncated or malformed raster"))?;
            out.push(u8::try_from(v).map_err(|_| bad("pixel value above 255"))?);
        }
        out
    };
    if pixels.iter().any(|&p| p as usize > maxval) {
        return Err(bad("pixel value above maxval"));
    }
    Ok((width, height, pixels))
}

/// Writes a binary P5 PGM with `maxval = 255`.
pub fn write_pgm(path: impl AsRef<Path>, width: usize, height: usize, pixels: &[u8]) -> Result<()> {
    let path = path.as_ref();
    if pixels.len() != width * height {
        return Err(Error::shape(format!(
            "{} pixels for a {width}x{height} image",
            pixels.len()
        )));
    }
    write_atomically(path, |out| {
        write!(out, "P5\n{width} {height}\n255\n")?;
        out.write_all(pixels)
    })
}

fn is_pgm(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm") || e.eq_ignore_ascii_case("pnm"))
}

/// Loads every `.pgm`/`.pnm` file in `dir`, in lexicographic filename
/// order, as one frame each. Other files are ignored.
pub fn load_frames(dir: impl AsRef<Path>) -> Result<FrameDataset> {
    let dir = dir.as_ref();
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|entry| entry.map(|e| e.path()).map_err(|e| Error::io(dir, e)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|p| p.is_file() && is_pgm(p))
        .collect();
    paths.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    if paths.len() < 2 {
        return Err(Error::format(
            dir,
            format!("need at least 2 PGM frames, found {}", paths.len()),
        ));
    }
    let (width, height, mut pixels) = read_pgm(&paths[0])?;
    pixels.reserve(width * height * (paths.len() - 1));
    for p in &paths[1..] {
        let (w, h, frame) = read_pgm(p)?;
        if (w, h) != (width, height) {
            return Err(Error::format(p, format!("frame is {w}x{h}, expected {width}x{height}")));
        }
        pixels.extend_from_slice(&frame);
    }
    FrameDataset::new(width, height, pixels)
}

/// Writes `frame_0000.pgm`, `frame_0001.pgm`, ... into `dir`, plus
/// `labels.txt` when the frames carry labels. Files are staged in a sibling
/// temporary directory first, so a failure leaves `dir` untouched.
pub fn write_frames(frames: &FrameDataset, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    let parent = match dir.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    let staging = tempfile::Builder::new()
        .prefix(".frames-")
        .tempdir_in(parent)
        .map_err(|e| Error::io(parent, e))?;
    let mut names = Vec::with_capacity(frames.frame_count() + 1);
    for i in 0..frames.frame_count() {
        let name = format!("frame_{i:04}.pgm");
        write_pgm(staging.path().join(&name), frames.width, frames.height, frames.frame(i))?;
        names.push(name);
    }
    if let Some(labels) = frames.labels() {
        write_labels(labels, staging.path().join("labels.txt"))?;
        names.push("labels.txt".to_string());
    }
    if !dir.exists() {
        let staged = staging.keep();
        return fs::rename(&staged, dir).map_err(|e| {
            let _ = fs::remove_dir_all(&staged);
            Error::io(dir, e)
        });
    }
    for name in names {
        fs::rename(staging.path().join(&name), dir.join(&name)).map_err(|e| Error::io(dir.join(&name), e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_with_comments() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.pgm");
        fs::write(&p, "P2\n# a comment\n3 2\n255\n0 1 2\n# mid\n3 4 255\n").unwrap();
        assert_eq!(read_pgm(&p).unwrap(), (3, 2, vec![0, 1, 2, 3, 4, 255]));
    }

    #[test]
    fn binary_roundtrip_and_rejections() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.pgm");
        write_pgm(&p, 2, 2, &[10, 32, 200, 0]).unwrap();
        assert_eq!(read_pgm(&p).unwrap(), (2, 2, vec![10, 32, 200, 0]));

        fs::write(&p, "P6\n1 1\n255\n\0\0\0").unwrap();
        assert!(read_pgm(&p).unwrap_err().to_string().contains("unsupported format"));
        fs::write(&p, b"P5\n2 2\n255\n\x01").unwrap();
        assert!(read_pgm(&p).unwrap_err().to_string().contains("truncated"));
        fs::write(&p, "P2\n1 1\n65535\n300\n").unwrap();
        assert!(read_pgm(&p).unwrap_err().to_string().contains("maxval"));
    }

    #[test]
    fn frames_in_filename_order() {
        let dir = tempfile::tempdir().unwrap();
        write_pgm(dir.path().join("b.pgm"), 2, 2, &[2, 2, 2, 2]).unwrap();
        write_pgm(dir.path().join("a.pgm"), 2, 2, &[1, 2, 3, 4]).unwrap();
        write_pgm(dir.path().join("c.pgm"), 2, 2, &[9, 9, 9, 9]).unwrap();
        fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        let frames = load_frames(dir.path()).unwrap();
        assert_eq!((frames.dim(), frames.frame_count()), (4, 3));
        let ds: Dataset<f64> = frames.to_dataset().unwrap();
        assert_eq!(ds.values().column(0), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(ds.values().column(2), &[9.0; 4]);
    }

    #[test]
    fn mixed_sizes_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write_pgm(dir.path().join("a.pgm"), 2, 2, &[1, 2, 3, 4]).unwrap();
        write_pgm(dir.path().join("b.pgm"), 1, 2, &[1, 2]).unwrap();
        let err = load_frames(dir.path()).unwrap_err().to_string();
        assert!(err.contains("expected 2x2"), "{err}");
    }

    #[test]
    fn too_few_frames() {
        let dir = tempfile::tempdir().unwrap();
        write_pgm(dir.path().join("a.pgm"), 2, 2, &[1, 2, 3, 4]).unwrap();
        assert!(load_frames(dir.path()).is_err());
    }
}

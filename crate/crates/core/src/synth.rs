//! Seeded synthetic datasets with planted outliers.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::{Dataset, FeatureMatrix};
use crate::error::{Error, Result};
use crate::io::FrameDataset;
use crate::scalar::Scalar;

/// One tight Gaussian cluster plus far-away planted outliers.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSpec {
    pub n_normal: usize,
    pub n_outliers: usize,
    pub center: Vec<f64>,
    /// Standard deviation of the normal points along every axis.
    pub spread: f64,
    /// Minimum outlier distance from `center`, in units of `spread`.
    pub outlier_offset: f64,
    pub seed: u64,
}

impl ClusterSpec {
    /// 16 normal points and 4 outliers in 2-D around `(100, 100)`.
    pub fn planted(seed: u64) -> Self {
        Self {
            n_normal: 16,
            n_outliers: 4,
            center: vec![100.0, 100.0],
            spread: 2.0,
            outlier_offset: 20.0,
            seed,
        }
    }

    pub fn dims(&self) -> usize {
        self.center.len()
    }

    fn validate(&self) -> Result<()> {
        if self.center.is_empty() || self.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("cluster center needs at least one finite coordinate"));
        }
        if !(self.spread.is_finite() && self.spread > 0.0) {
            return Err(Error::invalid(format!("spread must be positive, got {}", self.spread)));
        }
        if self.outlier_offset.is_nan() || self.outlier_offset < 10.0 {
            return Err(Error::invalid(format!(
                "outlier offset must be at least 10, got {}",
                self.outlier_offset
            )));
        }
        if self.n_outliers >= self.n_normal {
            return Err(Error::invalid(format!(
                "need fewer outliers ({}) than normal points ({})",
                self.n_outliers, self.n_normal
            )));
        }
        if self.n_normal + self.n_outliers < 2 {
            return Err(Error::invalid("need at least 2 points"));
        }
        Ok(())
    }
}

fn unit_direction(rng: &mut ChaCha8Rng, dims: usize, sign: f64) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..dims)
            .map(|_| sign * rng.sample::<f64, _>(StandardNormal).abs())
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 {
            v.iter_mut().for_each(|x| *x /= norm);
            return v;
        }
    }
}

/// Normal points are `center + spread·N(0, I)`. Outliers sit at
/// `outlier_offset·spread·(1 + U[0, 0.5))` from the center, alternately
/// below and above the cluster in every feature, in a random direction
/// within that orthant. Outliers occupy seeded positions among the objects.
pub fn make_clusters<S: Scalar>(spec: &ClusterSpec) -> Result<Dataset<S>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_normal + spec.n_outliers;
    let dims = spec.dims();

    let mut labels = vec![false; n];
    for i in sample(&mut rng, n, spec.n_outliers) {
        labels[i] = true;
    }

    let mut planted = 0usize;
    let mut values = Vec::with_capacity(n * dims);
    for &outlier in &labels {
        if outlier {
            let sign = if planted.is_multiple_of(2) { -1.0 } else { 1.0 };
            planted += 1;
            let dir = unit_direction(&mut rng, dims, sign);
            let radius = spec.outlier_offset * spec.spread * (1.0 + 0.5 * rng.random::<f64>());
            values.extend(spec.center.iter().zip(&dir).map(|(c, u)| S::of_f64(c + radius * u)));
        } else {
            values.extend(spec.center.iter().map(|c| {
                let z: f64 = rng.sample(StandardNormal);
                S::of_f64(c + spec.spread * z)
            }));
        }
    }
    Dataset::new(FeatureMatrix::from_column_major(dims, n, values)?)?.with_labels(labels)
}

/// Rectangle whose intensities shift by `delta` in anomalous frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Patch {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
    pub delta: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameSpec {
    pub width: usize,
    pub height: usize,
    pub n_normal: usize,
    pub n_anomalous: usize,
    /// Per-pixel noise is uniform on `[-noise_amplitude, noise_amplitude]`.
    pub noise_amplitude: f64,
    pub patch: Patch,
    pub seed: u64,
}

impl FrameSpec {
    /// 60 normal and 3 anomalous 40×30 frames, 10×10 patch brightened by 80.
    pub fn sequence(seed: u64) -> Self {
        Self {
            width: 40,
            height: 30,
            n_normal: 60,
            n_anomalous: 3,
            noise_amplitude: 10.0,
            patch: Patch {
                x: 15,
                y: 10,
                width: 10,
                height: 10,
                delta: 80,
            },
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::invalid("frames need a non-zero size"));
        }
        let p = &self.patch;
        if p.x + p.width > self.width || p.y + p.height > self.height {
            return Err(Error::invalid(format!(
                "patch {}x{} at ({}, {}) leaves the {}x{} frame",
                p.width, p.height, p.x, p.y, self.width, self.height
            )));
        }
        if self.n_anomalous >= self.n_normal {
            return Err(Error::invalid(format!(
                "need fewer anomalous ({}) than normal frames ({})",
                self.n_anomalous, self.n_normal
            )));
        }
        if self.n_normal + self.n_anomalous < 2 {
            return Err(Error::invalid("need at least 2 frames"));
        }
        if !(self.noise_amplitude.is_finite() && self.noise_amplitude >= 0.0) {
            return Err(Error::invalid("noise amplitude must be finite and non-negative"));
        }
        Ok(())
    }
}

fn gradient(x: usize, y: usize, width: usize, height: usize) -> f64 {
    let fx = if width > 1 { x as f64 / (width - 1) as f64 } else { 0.0 };
    let fy = if height > 1 {
        y as f64 / (height - 1) as f64
    } else {
        0.0
    };
    60.0 + 60.0 * (fx + fy)
}

/// Frames are a diagonal gradient plus uniform noise, rounded and clamped to
/// `[0, 255]`; anomalous frames additionally shift the patch by its delta.
pub fn make_frames(spec: &FrameSpec) -> Result<FrameDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_normal + spec.n_anomalous;
    let mut labels = vec![false; n];
    for i in sample(&mut rng, n, spec.n_anomalous) {
        labels[i] = true;
    }
    let p = spec.patch;
    let a = spec.noise_amplitude;
    let mut pixels = Vec::with_capacity(n * spec.width * spec.height);
    for &anomalous in &labels {
        for y in 0..spec.height {
            for x in 0..spec.width {
                let noise = if a > 0.0 { rng.random_range(-a..=a) } else { 0.0 };
                let mut v = gradient(x, y, spec.width, spec.height) + noise;
                let inside = (p.x..p.x + p.width).contains(&x) && (p.y..p.y + p.height).contains(&y);
                if anomalous && inside {
                    v += f64::from(p.delta);
                }
                pixels.push(v.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    FrameDataset::new(spec.width, spec.height, pixels)?.with_labels(labels)
}

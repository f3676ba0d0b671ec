//! Seeded synthetic grayscale sequences.
//!
//! All randomness is integer draws from ChaCha8, so a seed yields the same
//! bytes on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ubssvc_core::Frame;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Slowly drifting 16x16 tiles; within each group of `block` frames a
    /// 2x2 cell carries texture in at most `active` frames, so every Haar
    /// detail column of a group has at most `active` nonzeros.
    SparseDetail,
    /// Independent uniform pixels. Dense everywhere.
    Noise,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sparse-detail" => Ok(Preset::SparseDetail),
            "noise" => Ok(Preset::Noise),
            _ => Err(Error::Config(format!("unknown preset {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub preset: Preset,
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub seed: u64,
    /// Frames per mixing group (`n`).
    pub block: usize,
    /// Textured frames allowed per cell and group (`m - 1`).
    pub active: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            preset: Preset::SparseDetail,
            width: 176,
            height: 144,
            frames: 40,
            seed: 1,
            block: 4,
            active: 2,
        }
    }
}

const TILE: usize = 16;

pub fn generate(p: &GenParams) -> Result<Vec<Frame>> {
    if p.width == 0 || p.height == 0 || p.frames == 0 || p.block == 0 {
        return Err(Error::Config(
            "width, height, frames and block must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let planes = match p.preset {
        Preset::Noise => (0..p.frames)
            .map(|_| {
                (0..p.width * p.height)
                    .map(|_| rng.random::<u8>() as i32)
                    .collect()
            })
            .collect(),
        Preset::SparseDetail => sparse_detail(&mut rng, p),
    };
    planes
        .into_iter()
        .map(|px: Vec<i32>| {
            Frame::new(p.width, p.height, px.into_iter().map(f64::from).collect())
                .map_err(Error::from)
        })
        .collect()
}

fn sparse_detail(rng: &mut ChaCha8Rng, p: &GenParams) -> Vec<Vec<i32>> {
    let (w, h) = (p.width, p.height);
    let tiles_x = w.div_ceil(TILE);
    let tiles_y = h.div_ceil(TILE);
    let tiles: Vec<(i32, i32)> = (0..tiles_x * tiles_y)
        .map(|_| (rng.random_range(56..=200), rng.random_range(-1..=1)))
        .collect();
    let mut planes: Vec<Vec<i32>> = (0..p.frames)
        .map(|f| {
            let phase = (f % 16) as i32;
            (0..w * h)
                .map(|i| {
                    let (x, y) = (i % w, i / w);
                    let (base, drift) = tiles[(y / TILE) * tiles_x + x / TILE];
                    base + drift * phase
                })
                .collect()
        })
        .collect();

    let active = p.active.min(p.block);
    let mut members: Vec<usize> = (0..p.block).collect();
    for g in (0..p.frames).step_by(p.block) {
        let group_len = p.block.min(p.frames - g);
        for cy in (0..h).step_by(2) {
            for cx in (0..w).step_by(2) {
                let k = rng.random_range(0..=active);
                // partial Fisher-Yates picks k distinct members
                for i in 0..k {
                    let j = rng.random_range(i..p.block);
                    members.swap(i, j);
                }
                for &member in &members[..k] {
                    let texture: [i32; 4] = std::array::from_fn(|_| rng.random_range(-24..=24));
                    if member >= group_len {
                        continue;
                    }
                    let plane = &mut planes[g + member];
                    for (t, (dx, dy)) in texture.iter().zip([(0, 0), (1, 0), (0, 1), (1, 1)]) {
                        let (x, y) = (cx + dx, cy + dy);
                        if x < w && y < h {
                            plane[y * w + x] += t;
                        }
                    }
                }
            }
        }
    }
    planes
}

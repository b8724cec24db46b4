//! Block-wise piecewise-linear envelope construction.
//!
//! The signal is truncated to a whole number of fixed-size blocks
//! (default 100 samples). Each block contributes its maximum and minimum
//! sample as anchor points, placed at the first index attaining each
//! extremum. One curve is threaded through all anchors in index order by
//! linear interpolation; before the first anchor and after the last the
//! curve holds the nearest anchor value.

use crate::error::{Error, Result};
use crate::signal::AudioClip;

/// Default block size in samples.
pub const DEFAULT_BLOCK_SIZE: usize = 100;

/// Extrema of one block: value and first-occurrence position of the block
/// maximum and minimum, with positions as absolute sample indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockExtrema {
    pub block_index: usize,
    pub max_pos: usize,
    pub max_val: f64,
    pub min_pos: usize,
    pub min_val: f64,
}

/// A per-sample piecewise-linear envelope together with the anchor points
/// the curve passes through.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    values: Vec<f64>,
    anchors: Vec<(usize, f64)>,
    block_size: usize,
}

impl Envelope {
    /// Per-sample envelope values; length is an exact multiple of the
    /// block size.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Anchor points as `(sample index, amplitude)`, strictly increasing in
    /// index. The envelope passes through each anchor exactly.
    pub fn anchors(&self) -> &[(usize, f64)] {
        &self.anchors
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Builds an envelope directly from precomputed values and anchors.
    /// Exposed for tests and alternative anchor rules; validates the type
    /// invariants.
    pub fn from_parts(
        values: Vec<f64>,
        anchors: Vec<(usize, f64)>,
        block_size: usize,
    ) -> Result<Self> {
        if block_size == 0 {
            return Err(Error::InvalidParam {
                name: "block_size",
                reason: "must be positive".into(),
            });
        }
        if values.is_empty() || !values.len().is_multiple_of(block_size) {
            return Err(Error::NotBlockAligned {
                len: values.len(),
                block_size,
            });
        }
        if anchors.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidParam {
                name: "anchors",
                reason: "indices must be strictly increasing".into(),
            });
        }
        if anchors
            .iter()
            .any(|&(i, v)| i >= values.len() || values[i] != v)
        {
            return Err(Error::InvalidParam {
                name: "anchors",
                reason: "every anchor must lie on the curve".into(),
            });
        }
        Ok(Self {
            values,
            anchors,
            block_size,
        })
    }
}

/// Keeps the leading `floor(len / block_size) * block_size` samples.
pub fn truncate_to_block_multiple(clip: &AudioClip, block_size: usize) -> Result<AudioClip> {
    if block_size == 0 {
        return Err(Error::InvalidParam {
            name: "block_size",
            reason: "must be positive".into(),
        });
    }
    if clip.len() < block_size {
        return Err(Error::ClipTooShort {
            len: clip.len(),
            block_size,
        });
    }
    let keep = (clip.len() / block_size) * block_size;
    clip.slice(0, keep)
}

/// Scans each block for its maximum and minimum sample. Ties resolve to the
/// first occurrence. The clip length must be an exact multiple of
/// `block_size`.
pub fn block_extrema(clip: &AudioClip, block_size: usize) -> Result<Vec<BlockExtrema>> {
    if block_size == 0 {
        return Err(Error::InvalidParam {
            name: "block_size",
            reason: "must be positive".into(),
        });
    }
    if clip.is_empty() || !clip.len().is_multiple_of(block_size) {
        return Err(Error::NotBlockAligned {
            len: clip.len(),
            block_size,
        });
    }
    let extrema = clip
        .samples()
        .chunks_exact(block_size)
        .enumerate()
        .map(|(block_index, block)| {
            let base = block_index * block_size;
            let mut max_pos = base;
            let mut max_val = block[0];
            let mut min_pos = base;
            let mut min_val = block[0];
            for (offset, &value) in block.iter().enumerate().skip(1) {
                if value > max_val {
                    max_val = value;
                    max_pos = base + offset;
                }
                if value < min_val {
                    min_val = value;
                    min_pos = base + offset;
                }
            }
            BlockExtrema {
                block_index,
                max_pos,
                max_val,
                min_pos,
                min_val,
            }
        })
        .collect();
    Ok(extrema)
}

/// Constructs the full envelope of a clip.
///
/// The clip is truncated to a block multiple, per-block extrema become
/// anchors ordered by sample index (a constant block contributes a single
/// anchor), and the envelope is linear between consecutive anchors with
/// constant extension before the first and after the last anchor.
pub fn build_envelope(clip: &AudioClip, block_size: usize) -> Result<Envelope> {
    let truncated = truncate_to_block_multiple(clip, block_size)?;
    let extrema = block_extrema(&truncated, block_size)?;

    let mut anchors: Vec<(usize, f64)> = Vec::with_capacity(extrema.len() * 2);
    for e in &extrema {
        if e.max_pos == e.min_pos {
            anchors.push((e.max_pos, e.max_val));
        } else if e.max_pos < e.min_pos {
            anchors.push((e.max_pos, e.max_val));
            anchors.push((e.min_pos, e.min_val));
        } else {
            anchors.push((e.min_pos, e.min_val));
            anchors.push((e.max_pos, e.max_val));
        }
    }

    let len = truncated.len();
    let mut values = vec![0.0; len];

    let (first_idx, first_val) = anchors[0];
    values[..first_idx].fill(first_val);
    for pair in anchors.windows(2) {
        let (i0, v0) = pair[0];
        let (i1, v1) = pair[1];
        values[i0] = v0;
        let run = (i1 - i0) as f64;
        for (offset, value) in values[i0 + 1..i1].iter_mut().enumerate() {
            *value = v0 + (offset + 1) as f64 * (v1 - v0) / run;
        }
    }
    let (last_idx, last_val) = *anchors.last().expect("at least one block");
    values[last_idx..].fill(last_val);

    Ok(Envelope {
        values,
        anchors,
        block_size,
    })
}

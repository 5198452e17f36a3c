use super::{CorpusError, RepresentationMatrix, SegmentRecord};

/// Positions within this distance of an integer frame boundary snap to it, so
/// decimal times like 0.06 s at 50 frames/s land on frame 3 rather than 3.0000000000000004.
const SNAP: f64 = 1e-6;

fn snapped(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < SNAP {
        r
    } else {
        x
    }
}

/// Half-open frame range `[floor(t_s·fs/s), ceil(t_e·fs/s))`, with the end
/// clamped to the matrix height. Segments shorter than a frame map to the
/// single frame at the start index.
pub fn frame_range(
    rows: usize,
    frame_rate: f64,
    t_start: f64,
    t_end: f64,
) -> Result<(usize, usize), CorpusError> {
    let start = snapped(t_start * frame_rate).floor().max(0.0) as usize;
    let mut end = snapped(t_end * frame_rate).ceil().max(0.0) as usize;
    if start >= rows {
        return Err(CorpusError::BeyondExtent { start, rows });
    }
    if end <= start {
        end = start + 1;
    }
    let end = end.min(rows);
    if end <= start {
        return Err(CorpusError::EmptySlice);
    }
    Ok((start, end))
}

/// Average-pool the rows of `r` covered by the segment.
pub fn slice_and_pool(r: &RepresentationMatrix, seg: &SegmentRecord) -> Result<Vec<f64>, CorpusError> {
    seg.validate()?;
    let (start, end) = frame_range(r.rows(), r.frame_rate(), seg.t_start, seg.t_end)?;
    let mut acc = vec![0.0f64; r.cols()];
    for t in start..end {
        for (a, &v) in acc.iter_mut().zip(r.row(t)) {
            *a += v as f64;
        }
    }
    let n = (end - start) as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    Ok(acc)
}

use super::skin::SkinnedFrame;
use super::AnimError;

/// Vertex-wise distances between two frames, relative to a length scale
/// (the rest mesh's bounding-box diagonal).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorReport {
    pub linf: f64,
    pub mean: f64,
    pub linf_abs: f64,
    pub worst_vertex: usize,
}

pub fn compare_frames(reference: &SkinnedFrame, test: &SkinnedFrame, scale: f64) -> Result<ErrorReport, AnimError> {
    if reference.positions.len() != test.positions.len() {
        return Err(AnimError::FrameMismatch(reference.positions.len(), test.positions.len()));
    }
    let mut linf_abs = 0.0;
    let mut worst_vertex = 0;
    let mut sum = 0.0;
    for (m, (a, b)) in reference.positions.iter().zip(&test.positions).enumerate() {
        let d = (a - b).norm();
        sum += d;
        if d > linf_abs {
            linf_abs = d;
            worst_vertex = m;
        }
    }
    let n = reference.positions.len().max(1) as f64;
    let scale = if scale > 0.0 { scale } else { 1.0 };
    Ok(ErrorReport {
        linf: linf_abs / scale,
        mean: sum / n / scale,
        linf_abs,
        worst_vertex,
    })
}

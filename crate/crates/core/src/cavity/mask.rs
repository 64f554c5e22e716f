//! The masked-diffusion threshold for k-XORSAT from the scalar
//! determination recursion `q <- 1 - (1-t) exp(-k a q^{k-1})`.

use super::CavityError;

/// Closed form: `alpha_mask(k) = (1/k) ((k-1)/(k-2))^{k-2}` for k >= 3.
pub fn alpha_mask_closed_form(k: usize) -> Result<f64, CavityError> {
    if k < 3 {
        return Err(CavityError::KTooSmall(k));
    }
    let kf = k as f64;
    Ok(((kf - 1.0) / (kf - 2.0)).powi(k as i32 - 2) / kf)
}

/// The degenerate fixed point where the recursion map has triple contact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskDegeneratePoint {
    pub q_star: f64,
    pub t_star: f64,
    pub alpha_mask: f64,
}

/// Critical point of the recursion: `q* = (k-2)/(k-1)`,
/// `t* = 1 - e^{(k-2)/(k-1)} / (k-1)`.
pub fn mask_degenerate_point(k: usize) -> Result<MaskDegeneratePoint, CavityError> {
    let alpha_mask = alpha_mask_closed_form(k)?;
    let kf = k as f64;
    let q_star = (kf - 2.0) / (kf - 1.0);
    let t_star = 1.0 - q_star.exp() / (kf - 1.0);
    Ok(MaskDegeneratePoint { q_star, t_star, alpha_mask })
}

/// Fixed points reached from below and above, and their separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskGap {
    pub q_from_0: f64,
    pub q_from_1: f64,
    pub gap: f64,
}

fn recursion_map(k: usize, alpha: f64, t: f64, q: f64) -> f64 {
    1.0 - (1.0 - t) * (-(k as f64) * alpha * q.powi(k as i32 - 1)).exp()
}

/// Iterates the recursion from q = 0 and q = 1. The two sequences are
/// monotone towards the extreme fixed points and never cross; iteration
/// stops once they meet, both settle, or `max_iters` is hit.
pub fn mask_recursion_gap(k: usize, alpha: f64, t: f64, max_iters: usize, tol: f64) -> MaskGap {
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for _ in 0..max_iters {
        let lo_next = recursion_map(k, alpha, t, lo);
        let hi_next = recursion_map(k, alpha, t, hi);
        let step = (lo_next - lo).abs().max((hi_next - hi).abs());
        lo = lo_next;
        hi = hi_next;
        if hi - lo < tol || step < tol {
            break;
        }
    }
    MaskGap { q_from_0: lo, q_from_1: hi, gap: (hi - lo).max(0.0) }
}

/// Numeric estimate of the largest alpha such that the recursion has a
/// unique fixed point for every t in [0, 1], by bisection to accuracy
/// `tol`.
///
/// Uniqueness is tested through the fold condition rather than by
/// iterating on a t grid: a second fixed point appears exactly when some
/// fixed point has slope one. Parameterizing fixed points by their
/// location q (with `t(q) = 1 - (1-q) e^{k a q^{k-1}}`), the slope there
/// is `(1-q) k a (k-1) q^{k-2}`, so multiple fixed points exist for some
/// admissible t iff that slope exceeds one at a q with `t(q) >= 0`. A
/// uniform t grid cannot see this: the bistable t-window shrinks like
/// (alpha - alpha_mask)^{3/2} near the threshold, far below any fixed
/// grid resolution.
pub fn estimate_alpha_mask_numeric(k: usize, tol: f64) -> Result<f64, CavityError> {
    if k < 3 {
        return Err(CavityError::KTooSmall(k));
    }
    const GRID: usize = 200_000;
    let kf = k as f64;
    let has_fold = |alpha: f64| -> bool {
        (1..GRID).any(|i| {
            let q = i as f64 / GRID as f64;
            let slope = (1.0 - q) * kf * alpha * (kf - 1.0) * q.powi(k as i32 - 2);
            let t_of_q = 1.0 - (1.0 - q) * (kf * alpha * q.powi(k as i32 - 1)).exp();
            slope > 1.0 && t_of_q >= 0.0
        })
    };
    let mut lo = 0.05f64;
    let mut hi = 1.0f64;
    debug_assert!(!has_fold(lo));
    debug_assert!(has_fold(hi));
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if has_fold(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

//! Reference thresholds for k-XORSAT and the SAT anchors.

/// Sampling and structural thresholds for one clause size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdRow {
    pub k: usize,
    /// Masked discrete diffusion with random ordering.
    pub alpha_mask: f64,
    /// Continuous diffusion with identity weights.
    pub alpha_diff: f64,
    /// Dynamical (2-core) transition; reversed-leaf ordering works up to here.
    pub alpha_d: f64,
}

/// k-XORSAT thresholds, k = 3..=10.
pub const XORSAT_THRESHOLDS: [ThresholdRow; 8] = [
    ThresholdRow { k: 3, alpha_mask: 0.666667, alpha_diff: 0.736, alpha_d: 0.818469 },
    ThresholdRow { k: 4, alpha_mask: 0.562500, alpha_diff: 0.632, alpha_d: 0.772280 },
    ThresholdRow { k: 5, alpha_mask: 0.474074, alpha_diff: 0.531, alpha_d: 0.701780 },
    ThresholdRow { k: 6, alpha_mask: 0.406901, alpha_diff: 0.511, alpha_d: 0.637081 },
    ThresholdRow { k: 7, alpha_mask: 0.355474, alpha_diff: 0.396, alpha_d: 0.581775 },
    ThresholdRow { k: 8, alpha_mask: 0.315203, alpha_diff: 0.384, alpha_d: 0.534997 },
    ThresholdRow { k: 9, alpha_mask: 0.282944, alpha_diff: 0.366, alpha_d: 0.495255 },
    ThresholdRow { k: 10, alpha_mask: 0.256578, alpha_diff: 0.350, alpha_d: 0.461197 },
];

/// 4-SAT anchor: masked-diffusion threshold with random ordering.
pub const SAT_ALPHA_MASK_K4: f64 = 8.05;
/// 4-SAT anchor: dynamical phase transition.
pub const SAT_ALPHA_D_K4: f64 = 9.38;

pub fn threshold_row(k: usize) -> Option<&'static ThresholdRow> {
    XORSAT_THRESHOLDS.iter().find(|r| r.k == k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_strictly_ordered() {
        for row in &XORSAT_THRESHOLDS {
            assert!(row.alpha_mask < row.alpha_diff, "k = {}", row.k);
            assert!(row.alpha_diff < row.alpha_d, "k = {}", row.k);
        }
        assert!(SAT_ALPHA_MASK_K4 < SAT_ALPHA_D_K4);
    }

    #[test]
    fn thresholds_decrease_in_k() {
        for pair in XORSAT_THRESHOLDS.windows(2) {
            assert!(pair[1].alpha_mask < pair[0].alpha_mask);
            assert!(pair[1].alpha_d < pair[0].alpha_d);
        }
    }
}

use rand::Rng;

use crate::rng;
use crate::{CMatrix, Complex64};

/// K×L block of unit-average-power QPSK symbols. `amplitude` scales the
/// block when it is used as the desired received signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolBlock {
    pub matrix: CMatrix,
    pub amplitude: f64,
}

impl SymbolBlock {
    pub fn qpsk(users: usize, frame_length: usize, seed: u64) -> SymbolBlock {
        let mut rng = rng::stream(seed, 0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let matrix = CMatrix::from_fn(users, frame_length, |_, _| {
            let re = if rng.random::<bool>() { s } else { -s };
            let im = if rng.random::<bool>() { s } else { -s };
            Complex64::new(re, im)
        });
        SymbolBlock { matrix, amplitude: 1.0 }
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> SymbolBlock {
        self.amplitude = amplitude;
        self
    }

    /// The desired received block, `amplitude · S`.
    pub fn desired(&self) -> CMatrix {
        &self.matrix * Complex64::new(self.amplitude, 0.0)
    }

    pub fn users(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn frame_length(&self) -> usize {
        self.matrix.ncols()
    }

    /// Empirical mean of |s|² over the block.
    pub fn mean_power(&self) -> f64 {
        crate::linalg::frobenius_sq(&self.matrix) / (self.matrix.len() as f64)
    }
}

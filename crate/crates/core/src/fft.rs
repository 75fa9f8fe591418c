//! 2D complex DFT on `[row, col]` arrays.
//!
//! Rows are transformed in parallel. Each 1D transform is executed by the
//! same plan with private scratch, so results do not depend on how rows are
//! scheduled across threads.

use std::sync::Arc;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftDirection, FftPlanner};

/// Unnormalised forward transform, inverse scaled by `1/(N₁N₂)`.
pub struct Fft2 {
    rows: usize,
    cols: usize,
    fwd_row: Arc<dyn Fft<f64>>,
    inv_row: Arc<dyn Fft<f64>>,
    fwd_col: Arc<dyn Fft<f64>>,
    inv_col: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(rows: usize, cols: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            rows,
            cols,
            fwd_row: planner.plan_fft(cols, FftDirection::Forward),
            inv_row: planner.plan_fft(cols, FftDirection::Inverse),
            fwd_col: planner.plan_fft(rows, FftDirection::Forward),
            inv_col: planner.plan_fft(rows, FftDirection::Inverse),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn forward(&self, data: &mut Array2<Complex64>) {
        self.run(data, &self.fwd_row, &self.fwd_col);
    }

    pub fn inverse(&self, data: &mut Array2<Complex64>) {
        self.run(data, &self.inv_row, &self.inv_col);
        let scale = 1.0 / (self.rows * self.cols) as f64;
        data.par_mapv_inplace(|v| v * scale);
    }

    fn run(&self, data: &mut Array2<Complex64>, row_plan: &Arc<dyn Fft<f64>>, col_plan: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.dim(), (self.rows, self.cols), "array shape does not match plan");
        if !data.is_standard_layout() {
            *data = data.as_standard_layout().into_owned();
        }
        transform_rows(data, row_plan);
        if self.rows > 1 {
            let mut t = data.t().as_standard_layout().into_owned();
            transform_rows(&mut t, col_plan);
            data.assign(&t.t());
        }
    }
}

fn transform_rows(data: &mut Array2<Complex64>, plan: &Arc<dyn Fft<f64>>) {
    let len = plan.len();
    let scratch_len = plan.get_inplace_scratch_len();
    data.axis_iter_mut(Axis(0)).into_par_iter().for_each_init(
        || vec![Complex64::new(0.0, 0.0); scratch_len],
        |scratch, mut row| {
            let slice = row.as_slice_mut().expect("standard layout rows are contiguous");
            debug_assert_eq!(slice.len(), len);
            plan.process_with_scratch(slice, scratch);
        },
    );
}

//! Cerjan-style absorbing layer.

use crate::error::{Error, Result};
use crate::model::{Field, WaveState};

/// Precomputed taper `g(d) = exp(-(decay (width - d))^2)` for cells whose
/// distance `d` to the nearest grid edge is below `width`.
#[derive(Debug, Clone)]
pub struct Sponge {
    width: usize,
    nx: usize,
    nz: usize,
    /// `taper[d]` for `d < width`.
    taper: Vec<f32>,
}

impl Sponge {
    pub fn new(nx: usize, nz: usize, width: usize, decay: f64) -> Result<Self> {
        if !(decay > 0.0 && decay <= 1.0) {
            return Err(Error::Config(format!("sponge decay must lie in (0, 1], got {decay}")));
        }
        if width > 0 && 2 * width >= nx.min(nz) {
            return Err(Error::Config(format!(
                "sponge width {width} must be below half the smaller grid dimension ({})",
                nx.min(nz)
            )));
        }
        let taper = (0..width)
            .map(|d| {
                let x = decay * (width - d) as f64;
                (-x * x).exp() as f32
            })
            .collect();
        Ok(Sponge {
            width,
            nx,
            nz,
            taper,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Multiplies every field by the taper inside the layer; the interior is untouched.
    pub fn apply(&self, state: &mut WaveState) {
        if self.width == 0 {
            return;
        }
        let (nx, nz, w) = (self.nx, self.nz, self.width);
        for f in Field::ALL {
            let data = state.field_mut(f);
            for (j, row) in data.chunks_mut(nx).enumerate() {
                let dz = j.min(nz - 1 - j);
                if dz < w {
                    for (i, v) in row.iter_mut().enumerate() {
                        let d = dz.min(i).min(nx - 1 - i);
                        *v *= self.taper[d];
                    }
                } else {
                    for (i, v) in row[..w].iter_mut().enumerate() {
                        *v *= self.taper[i];
                    }
                    for (i, v) in row[nx - w..].iter_mut().enumerate() {
                        *v *= self.taper[w - 1 - i];
                    }
                }
            }
        }
    }
}

/// One-shot sponge application.
pub fn apply_sponge(state: &mut WaveState, width: usize, decay: f64) -> Result<()> {
    Sponge::new(state.geometry.nx, state.geometry.nz, width, decay)?.apply(state);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{allocate_state, GridGeometry};

    fn filled(n: usize) -> WaveState {
        let mut s = allocate_state(GridGeometry::new(n, n, 10.0).unwrap(), 1).unwrap();
        for f in Field::ALL {
            s.field_mut(f).fill(1.0);
        }
        s
    }

    #[test]
    fn zero_width_is_identity() {
        let mut s = filled(20);
        let before = s.clone();
        apply_sponge(&mut s, 0, 0.015).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn interior_untouched_and_edges_tapered() {
        let n = 50;
        let mut s = filled(n);
        apply_sponge(&mut s, 10, 0.05).unwrap();
        for f in Field::ALL {
            let d = s.field(f);
            for j in 10..n - 10 {
                for i in 10..n - 10 {
                    assert_eq!(d[j * n + i], 1.0);
                }
            }
            let edge = (-(0.05f64 * 10.0).powi(2)).exp() as f32;
            assert_eq!(d[0], edge);
            assert_eq!(d[25 * n], edge);
            assert_eq!(d[25 * n + n - 1], edge);
            assert_eq!(d[(n - 1) * n + 25], edge);
            // One cell in from the left edge on a middle row.
            assert_eq!(d[25 * n + 1], (-(0.05f64 * 9.0).powi(2)).exp() as f32);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut s = filled(20);
        assert!(apply_sponge(&mut s, 10, 0.015).is_err());
        assert!(apply_sponge(&mut s, 5, 0.0).is_err());
        assert!(apply_sponge(&mut s, 5, 1.5).is_err());
    }
}

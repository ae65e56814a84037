//! Uniform cell-centred mesh on `(0, L)` and the discrete norms used
//! throughout the crate.
//!
//! Cell `i` covers `[i dx, (i+1) dx]` and carries the average of the field
//! over that cell. Faces between cells `i` and `i+1` are the interior faces;
//! the two boundary faces carry no flux.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n_cells: usize,
    length: f64,
    dx: f64,
    centers: Vec<f64>,
}

impl Grid {
    pub fn new(n_cells: usize, length: f64) -> Result<Self> {
        if n_cells < 2 {
            return Err(Error::TooFewCells(n_cells));
        }
        if !length.is_finite() || length <= 0.0 {
            return Err(Error::InvalidLength(length));
        }
        let dx = length / n_cells as f64;
        let centers = (0..n_cells).map(|i| (i as f64 + 0.5) * dx).collect();
        Ok(Self {
            n_cells,
            length,
            dx,
            centers,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn cell_centers(&self) -> &[f64] {
        &self.centers
    }

    /// Samples `profile` at every cell centre.
    pub fn sample(&self, profile: impl Fn(f64) -> f64) -> Vec<f64> {
        self.centers.iter().map(|&x| profile(x)).collect()
    }

    /// Discrete eigenvalue of `-D2` (mirrored Neumann stencil) for the cosine
    /// mode `cos(k pi x / L)`: `(2 - 2 cos(k pi dx / L)) / dx^2`.
    pub fn neumann_eigenvalue(&self, mode: usize) -> f64 {
        let theta = mode as f64 * std::f64::consts::PI * self.dx / self.length;
        (2.0 - 2.0 * theta.cos()) / (self.dx * self.dx)
    }

    pub(crate) fn check_len(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.n_cells {
            return Err(Error::DimensionMismatch {
                expected: self.n_cells,
                actual: u.len(),
            });
        }
        Ok(())
    }
}

pub(crate) fn check_finite(u: &[f64]) -> Result<()> {
    match u.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            index,
            value: u[index],
        }),
        None => Ok(()),
    }
}

/// `dx * sum(u)`, the midpoint quadrature of the integral of `u`.
pub fn discrete_mass(u: &[f64], grid: &Grid) -> Result<f64> {
    grid.check_len(u)?;
    check_finite(u)?;
    Ok(mass_unchecked(u, grid.dx()))
}

#[inline]
pub(crate) fn mass_unchecked(u: &[f64], dx: f64) -> f64 {
    dx * u.iter().sum::<f64>()
}

/// `<u, v> = dx * sum(u_i v_i)`.
pub fn inner(u: &[f64], v: &[f64], grid: &Grid) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    grid.dx() * u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
}

/// Cell norm `||u||_2 = sqrt(dx * sum(u_i^2))`.
pub fn l2_norm(u: &[f64], grid: &Grid) -> f64 {
    inner(u, u, grid).sqrt()
}

/// Face norm of the forward difference,
/// `||D+ u||_2^2 = dx * sum_faces ((u_{i+1} - u_i) / dx)^2`.
pub fn grad_l2_norm(u: &[f64], grid: &Grid) -> f64 {
    let dx = grid.dx();
    let s: f64 = u
        .windows(2)
        .map(|w| {
            let d = (w[1] - w[0]) / dx;
            d * d
        })
        .sum();
    (dx * s).sqrt()
}

/// Mirrored Neumann second difference, ghost cells `u_{-1} = u_0` and
/// `u_N = u_{N-1}`.
pub fn second_difference(u: &[f64], grid: &Grid) -> Vec<f64> {
    let n = u.len();
    let inv_dx2 = 1.0 / (grid.dx() * grid.dx());
    (0..n)
        .map(|i| {
            let left = if i == 0 { u[0] } else { u[i - 1] };
            let right = if i + 1 == n { u[n - 1] } else { u[i + 1] };
            (right - 2.0 * u[i] + left) * inv_dx2
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn four_cells_on_unit_interval() {
        let g = Grid::new(4, 1.0).unwrap();
        assert_eq!(g.dx(), 0.25);
        assert_eq!(g.cell_centers(), &[0.125, 0.375, 0.625, 0.875]);
    }

    #[test]
    fn two_pi_domain() {
        let l = 2.0 * std::f64::consts::PI;
        let g = Grid::new(1000, l).unwrap();
        assert_eq!(g.dx(), l / 1000.0);
        assert_relative_eq!(g.dx() * 1000.0, l, max_relative = 4.0 * f64::EPSILON);
        let c = g.cell_centers();
        assert!(c.windows(2).all(|w| w[0] < w[1]));
        assert!(c[0] > 0.0 && c[999] < l);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(matches!(Grid::new(1, 1.0), Err(Error::TooFewCells(1))));
        assert!(matches!(Grid::new(0, 1.0), Err(Error::TooFewCells(0))));
        assert!(Grid::new(4, 0.0).is_err());
        assert!(Grid::new(4, -1.0).is_err());
        assert!(Grid::new(4, f64::NAN).is_err());
        assert!(Grid::new(4, f64::INFINITY).is_err());
    }

    #[test]
    fn mass_of_constants_and_zero() {
        let g = Grid::new(37, 2.5).unwrap();
        assert_relative_eq!(discrete_mass(&vec![1.0; 37], &g).unwrap(), 2.5, max_relative = 1e-14);
        assert_eq!(discrete_mass(&vec![0.0; 37], &g).unwrap(), 0.0);
    }

    #[test]
    fn mass_of_linear_profile_is_exact() {
        let g = Grid::new(10, 1.0).unwrap();
        let u = g.sample(|x| x);
        assert_relative_eq!(discrete_mass(&u, &g).unwrap(), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn mass_rejects_bad_input() {
        let g = Grid::new(3, 1.0).unwrap();
        assert!(matches!(
            discrete_mass(&[1.0, f64::NAN, 0.0], &g),
            Err(Error::NonFinite { index: 1, .. })
        ));
        assert!(matches!(
            discrete_mass(&[1.0, 2.0], &g),
            Err(Error::DimensionMismatch { expected: 3, actual: 2 })
        ));
    }

    #[test]
    fn second_difference_kills_constants() {
        let g = Grid::new(9, 1.3).unwrap();
        assert!(second_difference(&[4.2; 9], &g).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ramp_gradient_norm_uses_interior_faces() {
        let g = Grid::new(8, 2.0).unwrap();
        let u = g.sample(|x| 3.0 * x);
        // 7 interior faces, slope 3: dx * 7 * 9
        assert_relative_eq!(grad_l2_norm(&u, &g).powi(2), 9.0 * (2.0 - g.dx()), max_relative = 1e-13);
    }
}

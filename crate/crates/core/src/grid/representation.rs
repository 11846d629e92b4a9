use super::{Field2D, GridError, Rect};
use crate::blowup::Direction;
use crate::indicial::eigen_rate_alpha;

/// Value of a finite-atom representation and whether it is a positive solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// False for the empty measure, whose sum is identically 0.
    pub positive: bool,
}

/// `Σ μᵢ e^{α⟨x,ξᵢ⟩}` for `p = 2` (so `α = √λ`).
pub fn representation_quadrature(
    atoms: &[(Direction, f64)],
    p: f64,
    lambda: f64,
    x: &[f64],
) -> Result<Quadrature, GridError> {
    if p != 2.0 {
        return Err(GridError::Domain(format!(
            "the exponential representation holds only for p = 2, got p = {p}"
        )));
    }
    let alpha = eigen_rate_alpha(lambda, p).map_err(|e| GridError::Domain(e.to_string()))?;
    let mut value = 0.0;
    for (xi, mu) in atoms {
        if !(*mu > 0.0) {
            return Err(GridError::Domain(format!("atom weights must be positive, got {mu}")));
        }
        if xi.dim() != x.len() {
            return Err(GridError::Domain(format!(
                "atom direction has dimension {}, point has {}",
                xi.dim(),
                x.len()
            )));
        }
        let dot: f64 = xi.as_slice().iter().zip(x).map(|(a, b)| a * b).sum();
        value += mu * (alpha * dot).exp();
    }
    Ok(Quadrature {
        value,
        positive: !atoms.is_empty(),
    })
}

/// The quadrature sampled on a 2-D grid.
pub fn representation_field(atoms: &[(Direction, f64)], lambda: f64, rect: &Rect, h: f64) -> Result<Field2D, GridError> {
    if atoms.is_empty() {
        return Err(GridError::NotPositive);
    }
    representation_quadrature(atoms, 2.0, lambda, &[0.0, 0.0])?;
    Field2D::sample(rect, h, |x, y| {
        representation_quadrature(atoms, 2.0, lambda, &[x, y])
            .expect("atoms validated above")
            .value
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::p_laplace_residual;

    #[test]
    fn dirac_mass_is_exponential() {
        let xi = Direction::new(vec![0.6, 0.8]).unwrap();
        let q = representation_quadrature(&[(xi, 1.0)], 2.0, 4.0, &[1.0, 2.0]).unwrap();
        assert!((q.value - (2.0 * 2.2f64).exp()).abs() < 1e-12 * q.value);
        assert!(q.positive);
    }

    #[test]
    fn antipodal_pair_is_cosh() {
        let atoms = [(Direction::axis(2, 0), 1.0), (Direction::new(vec![-1.0, 0.0]).unwrap(), 1.0)];
        let q = representation_quadrature(&atoms, 2.0, 1.0, &[0.7, 3.0]).unwrap();
        assert!((q.value - 2.0 * 0.7f64.cosh()).abs() < 1e-14);
        let errs: Vec<f64> = [1.0 / 16.0, 1.0 / 32.0]
            .iter()
            .map(|&h| {
                let f = representation_field(&atoms, 1.0, &Rect::unit_square(), h).unwrap();
                p_laplace_residual(&f, 2.0, 1.0, 0.0).sup_norm()
            })
            .collect();
        assert!(errs[0] / errs[1] > 3.8);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(representation_quadrature(&[], 3.0, 1.0, &[0.0, 0.0]).is_err());
        let empty = representation_quadrature(&[], 2.0, 1.0, &[0.0, 0.0]).unwrap();
        assert_eq!(empty, Quadrature { value: 0.0, positive: false });
        assert!(matches!(
            representation_field(&[], 1.0, &Rect::unit_square(), 0.25),
            Err(GridError::NotPositive)
        ));
        assert!(representation_quadrature(&[(Direction::axis(2, 0), -1.0)], 2.0, 1.0, &[0.0, 0.0]).is_err());
    }
}

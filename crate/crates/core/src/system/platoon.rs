use num_complex::Complex;

use super::{Network, OutputSelector};
use crate::error::{Error, Result};
use crate::linalg::BandedMatrix;
use crate::scalar::Real;

/// Coupling pattern of a vehicle string.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Symmetry<T> {
    /// Predecessor following only: `beta_p = beta_d = 1`.
    Directed,
    /// Equal weight to predecessor and follower: `beta_p = beta_d = 0`.
    Bidirectional,
    /// Asymmetry weights for the position and velocity couplings.
    Custom { beta_p: T, beta_d: T },
}

/// Vehicle string with relative position and velocity feedback plus absolute
/// velocity feedback of weight `alpha`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlatoonSpec<T> {
    pub n: usize,
    pub symmetry: Symmetry<T>,
    pub alpha: T,
}

impl<T: Real> PlatoonSpec<T> {
    pub fn new(n: usize, symmetry: Symmetry<T>, alpha: T) -> Self {
        Self { n, symmetry, alpha }
    }

    pub fn beta_p(&self) -> T {
        match self.symmetry {
            Symmetry::Directed => T::one(),
            Symmetry::Bidirectional => T::zero(),
            Symmetry::Custom { beta_p, .. } => beta_p,
        }
    }

    pub fn beta_d(&self) -> T {
        match self.symmetry {
            Symmetry::Directed => T::one(),
            Symmetry::Bidirectional => T::zero(),
            Symmetry::Custom { beta_d, .. } => beta_d,
        }
    }
}

/// Tridiagonal Laplacian of the string for asymmetry weight `beta`.
///
/// Row `k` encodes `(1 + beta)(x_{k-1} - x_k) - (1 - beta)(x_k - x_{k+1})`
/// with the missing neighbour dropped in the first and last rows.
pub fn string_laplacian<T: Real>(n: usize, beta: T) -> Result<BandedMatrix<T>> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!("a string needs at least 2 agents, got {n}")));
    }
    let one = T::one();
    let re = |v: T| Complex::new(v, T::zero());
    let ahead = one + beta;
    let behind = one - beta;
    let sub = vec![re(-ahead); n - 1];
    let mut diag = vec![re(ahead + behind); n];
    let sup = vec![re(-behind); n - 1];
    diag[0] = re(behind);
    diag[n - 1] = re(ahead);
    BandedMatrix::from_diagonals(n, 1, 1, &[sub, diag, sup])
}

/// Builds the closed-loop network with outputs
/// `(x_1 - x_2, x_{n/2} - x_{n/2 + 1}, x_{n-1} - x_n)` (1-based, `n/2` floored).
/// Coinciding gaps of very short platoons appear once.
pub fn build_platoon<T: Real>(spec: &PlatoonSpec<T>) -> Result<Network<T>> {
    let n = spec.n;
    if n < 2 {
        return Err(Error::InvalidSpec(format!(
            "a platoon needs at least 2 vehicles, got {n}"
        )));
    }
    if !(spec.alpha >= T::zero()) {
        return Err(Error::InvalidSpec(format!(
            "alpha must be nonnegative, got {}",
            spec.alpha
        )));
    }
    let lp = string_laplacian(n, spec.beta_p())?;
    let ld = string_laplacian(n, spec.beta_d())?;
    let mut gaps = vec![0, n / 2 - 1, n - 2];
    gaps.dedup();
    let selector = OutputSelector::gaps(&gaps);
    Network::new(lp, ld, spec.alpha, selector)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(m: &BandedMatrix<f64>) -> Vec<Vec<f64>> {
        let d = m.to_dense();
        (0..d.rows()).map(|i| d.row(i).iter().map(|z| z.re).collect()).collect()
    }

    #[test]
    fn directed_rows() {
        let net = build_platoon(&PlatoonSpec::new(3, Symmetry::Directed, 0.1)).unwrap();
        assert_eq!(
            rows(net.lp()),
            vec![vec![0., 0., 0.], vec![-2., 2., 0.], vec![0., -2., 2.]]
        );
        assert_eq!(net.lp(), net.ld());
    }

    #[test]
    fn bidirectional_rows() {
        let net = build_platoon(&PlatoonSpec::new(3, Symmetry::Bidirectional, 0.1)).unwrap();
        assert_eq!(
            rows(net.lp()),
            vec![vec![1., -1., 0.], vec![-1., 2., -1.], vec![0., -1., 1.]]
        );
    }

    #[test]
    fn custom_zero_is_bidirectional() {
        let a = build_platoon(&PlatoonSpec::new(
            7,
            Symmetry::Custom {
                beta_p: 0.0,
                beta_d: 0.0,
            },
            0.1,
        ))
        .unwrap();
        let b = build_platoon(&PlatoonSpec::new(7, Symmetry::Bidirectional, 0.1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn selector_uses_floor_half() {
        let net = build_platoon(&PlatoonSpec::new(7, Symmetry::Directed, 0.1)).unwrap();
        let firsts: Vec<usize> = net.selector().rows().iter().map(|r| r[0].0).collect();
        // x_1 - x_2, x_3 - x_4, x_6 - x_7
        assert_eq!(firsts, vec![0, 2, 5]);
    }

    #[test]
    fn too_short_string_is_rejected() {
        assert!(matches!(
            build_platoon(&PlatoonSpec::new(1, Symmetry::Directed, 0.1)),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn two_vehicles_have_one_gap() {
        let net = build_platoon(&PlatoonSpec::new(2, Symmetry::Bidirectional, 0.1)).unwrap();
        assert_eq!(net.selector().len(), 1);
    }
}

use std::io::Write;

use super::{AnySystem, IoSystem, Network, NetworkInput, NetworkSystem, OutputSelector, StateSpace};
use crate::error::{Error, Result};
use crate::linalg::BandedMatrix;
use crate::scalar::Real;

/// Widest combined bandwidth accepted for the blocks of a detected network.
const MAX_NETWORK_BAND: usize = 16;

/// Parses the plain-text format: a header `N P Q`, then the row-major real
/// entries of `A`, `B` and `C`, all whitespace separated.
///
/// Systems in second-order companion form are returned as networks.
pub fn read_system<T: Real>(text: &str) -> Result<AnySystem<T>> {
    let mut tokens = text.split_whitespace();
    let mut dim = |what: &str| -> Result<usize> {
        let tok = tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("missing {what} in header")))?;
        tok.parse()
            .map_err(|_| Error::Parse(format!("bad {what} `{tok}` in header")))
    };
    let (n, p, q) = (dim("N")?, dim("P")?, dim("Q")?);
    let expected = n * n + n * p + q * n;
    let values = tokens
        .enumerate()
        .map(|(k, tok)| {
            tok.parse::<f64>()
                .map_err(|_| Error::Parse(format!("entry {} is not a number: `{tok}`", k + 1)))
                .and_then(|v| {
                    if v.is_finite() {
                        Ok(T::of(v))
                    } else {
                        Err(Error::Parse(format!("entry {} is not finite", k + 1)))
                    }
                })
        })
        .collect::<Result<Vec<T>>>()?;
    if values.len() != expected {
        return Err(Error::Parse(format!(
            "expected {expected} entries for N={n} P={p} Q={q}, found {}",
            values.len()
        )));
    }
    let (a, rest) = values.split_at(n * n);
    let (b, c) = rest.split_at(n * p);
    let sys = StateSpace::from_real(n, p, q, a, b, c)?;
    Ok(match detect_network(&sys) {
        Some(net) => AnySystem::Network(net),
        None => AnySystem::Dense(sys),
    })
}

/// Writes `sys` in the plain-text format with 17 significant digits.
///
/// Fails on complex entries or systems too large to form densely.
pub fn write_system<T: Real, W: Write>(sys: &AnySystem<T>, out: &mut W) -> std::io::Result<()> {
    let dense = sys
        .dense()
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidInput, "system too large to write densely"))?;
    if !dense.is_real() {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "only real systems can be written",
        ));
    }
    writeln!(
        out,
        "{} {} {}",
        dense.state_dim(),
        dense.input_dim(),
        dense.output_dim()
    )?;
    for m in [dense.a(), dense.b(), dense.c()] {
        for i in 0..m.rows() {
            let row: Vec<String> = m.row(i).iter().map(|z| format!("{:.16e}", z.re)).collect();
            writeln!(out, "{}", row.join(" "))?;
        }
    }
    Ok(())
}

/// Recognizes `A = [0 I; -K -D]` with banded `K`, `D` and an output matrix
/// that reads positions only; the input is kept as identity or dense.
pub fn detect_network<T: Real>(sys: &StateSpace<T>) -> Option<NetworkSystem<T>> {
    let dim = sys.state_dim();
    if dim < 4 || dim % 2 != 0 || !sys.is_real() {
        return None;
    }
    let n = dim / 2;
    let a = sys.a();
    if !a.block(0, 0, n, n).is_zero() || !a.block(0, n, n, n).is_identity() {
        return None;
    }
    let c = sys.c();
    if !c.block(0, n, c.rows(), n).is_zero() {
        return None;
    }
    let stiffness = BandedMatrix::from_dense(&a.block(n, 0, n, n).scale_real(-T::one())).ok()?;
    let damping = BandedMatrix::from_dense(&a.block(n, n, n, n).scale_real(-T::one())).ok()?;
    for m in [&stiffness, &damping] {
        if m.lower_bandwidth() + m.upper_bandwidth() > MAX_NETWORK_BAND {
            return None;
        }
    }
    let selector = OutputSelector::new(
        (0..c.rows())
            .map(|i| {
                c.row(i)[..n]
                    .iter()
                    .enumerate()
                    .filter(|(_, z)| z.re != T::zero())
                    .map(|(j, z)| (j, z.re))
                    .collect()
            })
            .collect(),
    );
    let network = Network::new(stiffness, damping, T::zero(), selector).ok()?;
    let input = if sys.b().is_identity() {
        NetworkInput::Identity
    } else {
        NetworkInput::Dense(sys.b().clone())
    };
    NetworkSystem::new(network, input).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CMatrix, NormKind};
    use crate::system::{build_platoon, PlatoonSpec, Symmetry};
    use num_complex::Complex;

    #[test]
    fn reads_example() {
        let sys: AnySystem<f64> = read_system("2 1 1\n0 1\n-1 -2\n0 1\n1 0\n").unwrap();
        match sys {
            AnySystem::Dense(s) => {
                assert_eq!(s.a(), &CMatrix::from_real(2, 2, &[0., 1., -1., -2.]).unwrap())
            }
            AnySystem::Network(_) => panic!("2-state system is not a network"),
        }
    }

    #[test]
    fn rejects_short_input() {
        assert!(matches!(read_system::<f64>("2 1 1\n0 1 2"), Err(Error::Parse(_))));
        assert!(matches!(read_system::<f64>("x"), Err(Error::Parse(_))));
        assert!(matches!(read_system::<f64>("1 1 1 1 1 nan"), Err(Error::Parse(_))));
    }

    #[test]
    fn platoon_round_trip_is_detected() {
        let net = build_platoon(&PlatoonSpec::new(8, Symmetry::Directed, 0.1)).unwrap();
        let sys: AnySystem<f64> = NetworkSystem::new(net, NetworkInput::Identity).unwrap().into();
        let mut buf = Vec::new();
        write_system(&sys, &mut buf).unwrap();
        let back: AnySystem<f64> = read_system(std::str::from_utf8(&buf).unwrap()).unwrap();
        let AnySystem::Network(back_net) = &back else {
            panic!("companion structure not detected");
        };
        assert_eq!(back_net.input(), &NetworkInput::Identity);
        let s = Complex::new(0.05, 1.0);
        for kind in [NormKind::P1, NormKind::P2, NormKind::PInf] {
            assert_eq!(
                back.transfer_norm(s, kind).unwrap(),
                sys.transfer_norm(s, kind).unwrap()
            );
            assert_eq!(back.a_norm(kind), sys.a_norm(kind));
        }
    }
}

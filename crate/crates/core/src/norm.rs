//! Norms on ℝᵈ used to measure bar lengths.
//!
//! A quadrilateral norm is given by two independent covectors `F₁`, `F₂`:
//! `‖x‖ = max(|F₁·x|, |F₂·x|)`. Its unit ball has the four facets `±Fᵢ·x = 1`
//! and every nonzero direction off the cone boundaries `|F₁·x| = |F₂·x|` lies
//! in the cone of exactly one facet pair, its colour.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Facet {
    F1,
    F2,
}

impl Facet {
    pub fn other(self) -> Facet {
        match self {
            Facet::F1 => Facet::F2,
            Facet::F2 => Facet::F1,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Facet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Facet::F1 => "F1",
            Facet::F2 => "F2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormError {
    #[error("direction lies on a boundary between facet cones")]
    ConeBoundary,
    #[error("zero difference vector")]
    ZeroVector,
    #[error("invalid norm: {0}")]
    Invalid(String),
    #[error("operation needs a quadrilateral norm")]
    NotPolyhedral,
    #[error("expected a vector of dimension {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Norm {
    Linf,
    L1,
    /// ℓᵖ with `1 < p < ∞`, `p ≠ 2`.
    Lp(f64),
    Quadrilateral {
        facets: [[BigRational; 2]; 2],
    },
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn dot(a: &[BigRational; 2], x: &[BigRational]) -> BigRational {
    &a[0] * &x[0] + &a[1] * &x[1]
}

impl Norm {
    pub fn lp(p: f64) -> Result<Norm, NormError> {
        if !(p.is_finite() && p > 1.0 && p != 2.0) {
            return Err(NormError::Invalid(format!("p = {p} (need 1 < p < ∞, p ≠ 2)")));
        }
        Ok(Norm::Lp(p))
    }

    pub fn quadrilateral(f1: [BigRational; 2], f2: [BigRational; 2]) -> Result<Norm, NormError> {
        let det = &f1[0] * &f2[1] - &f1[1] * &f2[0];
        if det.is_zero() {
            return Err(NormError::Invalid("facet covectors are dependent".into()));
        }
        Ok(Norm::Quadrilateral { facets: [f1, f2] })
    }

    pub fn is_polyhedral(&self) -> bool {
        !matches!(self, Norm::Lp(_))
    }

    /// The two facet covectors of a quadrilateral norm.
    pub fn facets(&self) -> Option<[[BigRational; 2]; 2]> {
        match self {
            Norm::Linf => Some([[q(1), q(0)], [q(0), q(1)]]),
            Norm::L1 => Some([[q(1), q(1)], [q(1), q(-1)]]),
            Norm::Quadrilateral { facets } => Some(facets.clone()),
            Norm::Lp(_) => None,
        }
    }

    /// Checks that the norm is defined on ℝᵈ.
    pub fn check_dimension(&self, d: usize) -> Result<(), NormError> {
        match self {
            Norm::Lp(_) if d >= 2 => Ok(()),
            Norm::Lp(_) => Err(NormError::Dimension { expected: 2, got: d }),
            _ if d == 2 => Ok(()),
            _ => Err(NormError::Dimension { expected: 2, got: d }),
        }
    }

    /// Whether the rotation by `2π/n` in the first coordinate plane is an
    /// isometry.
    pub fn rotation_invariant(&self, n: usize) -> bool {
        match n {
            1 | 2 => true,
            4 => match self.facets() {
                None => true,
                Some(f) => {
                    // A covector (a, b) composed with the quarter turn is (b, −a).
                    let turned = |c: &[BigRational; 2]| [c[1].clone(), -c[0].clone()];
                    let in_set = |c: [BigRational; 2]| {
                        f.iter().any(|g| {
                            (g[0] == c[0] && g[1] == c[1]) || (g[0] == -c[0].clone() && g[1] == -c[1].clone())
                        })
                    };
                    in_set(turned(&f[0])) && in_set(turned(&f[1]))
                }
            },
            _ => false,
        }
    }

    /// Facet colour of a difference vector.
    pub fn colour(&self, delta: &[BigRational]) -> Result<Facet, NormError> {
        let f = self.facets().ok_or(NormError::NotPolyhedral)?;
        if delta.len() != 2 {
            return Err(NormError::Dimension {
                expected: 2,
                got: delta.len(),
            });
        }
        if delta.iter().all(Zero::is_zero) {
            return Err(NormError::ZeroVector);
        }
        let a = dot(&f[0], delta).abs();
        let b = dot(&f[1], delta).abs();
        match a.cmp(&b) {
            std::cmp::Ordering::Greater => Ok(Facet::F1),
            std::cmp::Ordering::Less => Ok(Facet::F2),
            std::cmp::Ordering::Equal => Err(NormError::ConeBoundary),
        }
    }

    /// True when the norm is differentiable at `delta`.
    pub fn is_smooth_at(&self, delta: &[BigRational]) -> bool {
        match self {
            Norm::Lp(_) => delta.iter().any(|x| !x.is_zero()),
            _ => self.colour(delta).is_ok(),
        }
    }

    /// Exact support covector `sgn(Fᵢ·δ)·Fᵢ` of the facet cone containing
    /// `delta`.
    pub fn exact_covector(&self, delta: &[BigRational]) -> Result<Vec<BigRational>, NormError> {
        let facet = self.colour(delta)?;
        let f = self.facets().ok_or(NormError::NotPolyhedral)?;
        let c = &f[facet.index()];
        let s = dot(c, delta);
        Ok(if s.is_positive() {
            c.to_vec()
        } else {
            vec![-c[0].clone(), -c[1].clone()]
        })
    }

    /// Gradient of the norm at `delta` in floating point.
    pub fn float_covector(&self, delta: &[f64]) -> Result<Vec<f64>, NormError> {
        if delta.iter().all(|&x| x == 0.0) {
            return Err(NormError::ZeroVector);
        }
        match self {
            Norm::Lp(p) => {
                let norm = delta.iter().map(|x| x.abs().powf(*p)).sum::<f64>().powf(1.0 / p);
                Ok(delta
                    .iter()
                    .map(|x| x.signum() * (x.abs() / norm).powf(p - 1.0))
                    .collect())
            }
            _ => {
                let f = self.facets().expect("polyhedral");
                let f: Vec<[f64; 2]> = f
                    .iter()
                    .map(|c| [crate::rational::to_f64(&c[0]), crate::rational::to_f64(&c[1])])
                    .collect();
                let a = f[0][0] * delta[0] + f[0][1] * delta[1];
                let b = f[1][0] * delta[0] + f[1][1] * delta[1];
                if a.abs() == b.abs() {
                    return Err(NormError::ConeBoundary);
                }
                let (c, s) = if a.abs() > b.abs() { (f[0], a) } else { (f[1], b) };
                Ok(vec![c[0] * s.signum(), c[1] * s.signum()])
            }
        }
    }

    /// A direction `x` with `F_facet·x = 1` and `F_other·x = 0`, deep inside
    /// the cone of the given colour.
    pub fn facet_direction(&self, facet: Facet) -> Result<[BigRational; 2], NormError> {
        let e = match facet {
            Facet::F1 => [q(1), q(0)],
            Facet::F2 => [q(0), q(1)],
        };
        self.solve(&e)
    }

    /// The two directions spanning the cone boundaries, `|F₁·x| = |F₂·x|`.
    pub fn boundary_directions(&self) -> Result<[[BigRational; 2]; 2], NormError> {
        Ok([self.solve(&[q(1), q(1)])?, self.solve(&[q(1), q(-1)])?])
    }

    /// `(F₁·x, F₂·x)`.
    pub fn facet_coordinates(&self, x: &[BigRational]) -> Result<[BigRational; 2], NormError> {
        let f = self.facets().ok_or(NormError::NotPolyhedral)?;
        Ok([dot(&f[0], x), dot(&f[1], x)])
    }

    /// The point with the given facet coordinates.
    pub fn from_facet_coordinates(&self, r: &[BigRational; 2]) -> Result<[BigRational; 2], NormError> {
        self.solve(r)
    }

    /// Solves `F₁·x = r₀`, `F₂·x = r₁`.
    fn solve(&self, r: &[BigRational; 2]) -> Result<[BigRational; 2], NormError> {
        let f = self.facets().ok_or(NormError::NotPolyhedral)?;
        let det = &f[0][0] * &f[1][1] - &f[0][1] * &f[1][0];
        Ok([
            (&r[0] * &f[1][1] - &f[0][1] * &r[1]) / &det,
            (&f[0][0] * &r[1] - &r[0] * &f[1][0]) / &det,
        ])
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NormRepr {
    Named(String),
    P { p: f64 },
    Facets { facets: [[Q; 2]; 2] },
}

impl Serialize for Norm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            Norm::Linf => NormRepr::Named("linf".into()),
            Norm::L1 => NormRepr::Named("l1".into()),
            Norm::Lp(p) => NormRepr::P { p: *p },
            Norm::Quadrilateral { facets } => NormRepr::Facets {
                facets: facets.clone().map(|c| c.map(Q)),
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Norm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Norm, D::Error> {
        use serde::de::Error;
        match NormRepr::deserialize(d)? {
            NormRepr::Named(n) => match n.to_ascii_lowercase().as_str() {
                "linf" | "l_inf" | "max" => Ok(Norm::Linf),
                "l1" => Ok(Norm::L1),
                other => Err(D::Error::custom(format!("unknown norm {other:?}"))),
            },
            NormRepr::P { p } => Norm::lp(p).map_err(D::Error::custom),
            NormRepr::Facets { facets } => {
                let [a, b] = facets.map(|c| c.map(|x| x.0));
                Norm::quadrilateral(a, b).map_err(D::Error::custom)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64, y: i64) -> Vec<BigRational> {
        vec![q(x), q(y)]
    }

    #[test]
    fn linf_covectors() {
        let n = Norm::Linf;
        assert_eq!(n.exact_covector(&v(3, 1)).unwrap(), v(1, 0));
        assert_eq!(n.exact_covector(&v(-1, -3)).unwrap(), v(0, -1));
        assert_eq!(n.exact_covector(&v(2, 2)), Err(NormError::ConeBoundary));
        assert_eq!(n.colour(&v(-1, 3)).unwrap(), Facet::F2);
        assert_eq!(n.colour(&v(3, 1)).unwrap(), n.colour(&v(-3, -1)).unwrap());
    }

    #[test]
    fn l1_covector_is_facet_normal() {
        // ‖(3+t, 1+s)‖₁ = 4 + t + s near (3, 1).
        assert_eq!(Norm::L1.exact_covector(&v(3, 1)).unwrap(), v(1, 1));
        assert_eq!(Norm::L1.colour(&v(3, 0)), Err(NormError::ConeBoundary));
    }

    #[test]
    fn lp_gradient_matches_finite_difference() {
        let n = Norm::lp(3.0).unwrap();
        let f = |x: f64, y: f64| (x.abs().powi(3) + y.abs().powi(3)).cbrt();
        let g = n.float_covector(&[1.5, -0.7]).unwrap();
        let h = 1e-6;
        assert!((g[0] - (f(1.5 + h, -0.7) - f(1.5 - h, -0.7)) / (2.0 * h)).abs() < 1e-6);
        assert!((g[1] - (f(1.5, -0.7 + h) - f(1.5, -0.7 - h)) / (2.0 * h)).abs() < 1e-6);
        assert!(Norm::lp(2.0).is_err());
        assert!(Norm::lp(1.0).is_err());
    }

    #[test]
    fn facet_and_boundary_directions() {
        for n in [Norm::Linf, Norm::L1] {
            let x1 = n.facet_direction(Facet::F1).unwrap();
            assert_eq!(n.colour(&x1).unwrap(), Facet::F1);
            let x2 = n.facet_direction(Facet::F2).unwrap();
            assert_eq!(n.colour(&x2).unwrap(), Facet::F2);
            for b in n.boundary_directions().unwrap() {
                assert_eq!(n.colour(&b), Err(NormError::ConeBoundary));
            }
        }
    }

    #[test]
    fn rotation_invariance() {
        assert!(Norm::Linf.rotation_invariant(4));
        assert!(Norm::L1.rotation_invariant(4));
        let skew = Norm::quadrilateral([q(1), q(0)], [q(1), q(2)]).unwrap();
        assert!(skew.rotation_invariant(2));
        assert!(!skew.rotation_invariant(4));
        assert!(!Norm::Linf.rotation_invariant(3));
    }

    #[test]
    fn json_forms() {
        let n: Norm = serde_json::from_str(r#""linf""#).unwrap();
        assert_eq!(n, Norm::Linf);
        let n: Norm = serde_json::from_str(r#"{"p": 3}"#).unwrap();
        assert_eq!(n, Norm::Lp(3.0));
        let n: Norm = serde_json::from_str(r#"{"facets": [[1, 0], ["1/2", 1]]}"#).unwrap();
        assert!(matches!(n, Norm::Quadrilateral { .. }));
        assert_eq!(
            serde_json::to_string(&n).unwrap(),
            r#"{"facets":[["1","0"],["1/2","1"]]}"#
        );
        assert!(serde_json::from_str::<Norm>(r#"{"facets": [[1, 0], [2, 0]]}"#).is_err());
    }
}

//! Jacobi polynomials for BC_n and the χ_l-spherical functions.
//!
//! `P_ν(m)` is the monic (in the orbit sum `m_ν`) element of
//! `span{m_κ : κ ≼ ν}` orthogonal to every `m_κ` with `κ ≺ ν` under the weight
//! `δ_m`. At dominant even `ν` it realizes
//! `F(ν + ρ(m), m; Z) = P_ν(m; Z) / P_ν(m; 0)`.
//!
//! Spherical functions on line bundles use the shift `m_+(l)` and the twist
//! `η_l(Z) = Π_j cosh(Z_j)^{|l|}`:
//! `ψ_{μ,l}(Y) = η_l(iY) P_{μ-|l|(1,…,1)}(m_+(l); iY) / P(0)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergeom::{f_eval, SpectralParam, TubePoint};
use crate::quadrature::TorusGrid;
use crate::rank1::f_rank1;
use crate::rootdata::{rho, shift_multiplicity, Multiplicity, RootDatum, ShiftSign};
use crate::transform::delta_density;
use crate::weights::{is_in_lambda_l, lower_set, DominantWeight};

type C = Complex64;

/// Condition number (of the column-scaled sample matrix) above which
/// Gram–Schmidt is refused.
pub const MAX_CONDITION: f64 = 1e9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Series,
    Rank1,
    Poly,
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" => Ok(Backend::Series),
            "rank1" => Ok(Backend::Rank1),
            "poly" => Ok(Backend::Poly),
            _ => Err(Error::Domain(format!("unknown backend {s:?}"))),
        }
    }
}

/// `Σ_{w∈W} cos⟨wν, Y⟩`, the torus value of the orbit sum over the full group.
pub fn orbit_sum_eval(rd: &RootDatum, nu: &[i64], y: &[f64]) -> f64 {
    rd.weyl()
        .iter()
        .map(|w| {
            let wn = w.act(nu);
            wn.iter().zip(y).map(|(&a, b)| a as f64 * b).sum::<f64>().cos()
        })
        .sum()
}

/// `Σ_{w∈W} exp⟨wν, X + iY⟩`.
pub fn orbit_sum_complex(rd: &RootDatum, nu: &[i64], z: &TubePoint) -> C {
    let zc = z.coords();
    rd.weyl()
        .iter()
        .map(|w| {
            let wn = w.act(nu);
            wn.iter().zip(&zc).map(|(&a, b)| b * a as f64).sum::<C>().exp()
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiPoly {
    pub mu: Vec<i64>,
    pub m: Multiplicity,
    /// Dominated weights, `μ` included, in height-then-lex order.
    pub basis: Vec<Vec<i64>>,
    pub coeffs: Vec<f64>,
    pub condition: f64,
}

impl JacobiPoly {
    pub fn eval_torus(&self, rd: &RootDatum, y: &[f64]) -> f64 {
        self.basis.iter().zip(&self.coeffs).map(|(nu, c)| c * orbit_sum_eval(rd, nu, y)).sum()
    }

    pub fn eval(&self, rd: &RootDatum, z: &TubePoint) -> C {
        self.basis.iter().zip(&self.coeffs).map(|(nu, c)| orbit_sum_complex(rd, nu, z) * *c).sum()
    }

    pub fn value_at_identity(&self, rd: &RootDatum) -> f64 {
        self.coeffs.iter().sum::<f64>() * rd.weyl_size() as f64
    }

    pub fn coefficient(&self, nu: &[i64]) -> Option<f64> {
        self.basis.iter().position(|b| b == nu).map(|i| self.coeffs[i])
    }
}

/// Gauss order per cell used when no grid is supplied.
pub fn default_order(mu: &[i64]) -> usize {
    let h: i64 = mu.iter().sum();
    16 + 2 * h.max(0) as usize
}

pub fn jacobi_poly(rd: &RootDatum, m: &Multiplicity, mu: &[i64]) -> Result<JacobiPoly> {
    let grid = TorusGrid::alcove(rd.rank, default_order(mu))?;
    jacobi_poly_on(rd, m, mu, &grid)
}

pub fn jacobi_poly_on(rd: &RootDatum, m: &Multiplicity, mu: &[i64], grid: &TorusGrid) -> Result<JacobiPoly> {
    if mu.len() != rd.rank || !is_in_lambda_l(rd, mu, 0) {
        return Err(Error::NotInLattice { mu: mu.to_vec(), l: 0 });
    }
    let basis = lower_set(mu);
    let lower: Vec<&Vec<i64>> = basis.iter().filter(|nu| nu.as_slice() != mu).collect();
    let sqrt_w: Vec<f64> = grid
        .points
        .iter()
        .zip(&grid.weights)
        .map(|(p, w)| (w * delta_density(rd, m, p)).sqrt())
        .collect();
    let sample = |nu: &[i64]| -> DVector<f64> {
        DVector::from_iterator(
            grid.len(),
            grid.points.iter().zip(&sqrt_w).map(|(p, s)| s * orbit_sum_eval(rd, nu, p)),
        )
    };
    let target = sample(mu);
    let mut coeffs = vec![0.0; basis.len()];
    let mut condition = 1.0;
    if !lower.is_empty() {
        let mut a = DMatrix::zeros(grid.len(), lower.len());
        let mut scale = Vec::with_capacity(lower.len());
        for (j, nu) in lower.iter().enumerate() {
            let col = sample(nu);
            let s = col.norm();
            scale.push(s);
            a.set_column(j, &(col / s));
        }
        let svd = a.svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        condition = smax / smin;
        if !(condition < MAX_CONDITION) {
            return Err(Error::IllConditioned(condition));
        }
        let x = svd.solve(&target, 0.0).map_err(|e| Error::Domain(e.to_string()))?;
        for (j, nu) in lower.iter().enumerate() {
            let i = basis.iter().position(|b| b == *nu).expect("basis member");
            coeffs[i] = -x[j] / scale[j];
        }
    }
    let top = basis.iter().position(|b| b.as_slice() == mu).expect("μ in its lower set");
    coeffs[top] = 1.0;
    Ok(JacobiPoly { mu: mu.to_vec(), m: *m, basis, coeffs, condition })
}

/// `η_l(Z)^{±1}` with `η_l(Z) = Π_j cosh(Z_j)^{|l|}`.
pub fn eta_eval(rd: &RootDatum, l: i64, sign: ShiftSign, z: &TubePoint) -> Result<C> {
    let k = l.unsigned_abs() as i32;
    let mut out = C::new(1.0, 0.0);
    if k == 0 {
        return Ok(out);
    }
    for (j, zj) in z.coords().into_iter().enumerate().take(rd.rank) {
        let ch = zj.cosh();
        match sign {
            ShiftSign::Plus => out *= ch.powi(k),
            ShiftSign::Minus => {
                if ch.norm() < 1e-15 {
                    return Err(Error::Pole(format!("cosh(ε_{}(Z)) = 0", j + 1)));
                }
                out *= ch.powi(-k);
            }
        }
    }
    Ok(out)
}

/// `η_l(iY) = Π_j cos(y_j)^{|l|}`, real on the torus.
pub fn eta_torus(l: i64, y: &[f64]) -> f64 {
    let k = l.unsigned_abs() as i32;
    y.iter().map(|v| v.cos().powi(k)).product()
}

fn lattice_offset(lambda: &SpectralParam, rho: &[f64]) -> Option<Vec<i64>> {
    lambda
        .lambda
        .iter()
        .zip(rho)
        .map(|(l, r)| {
            let v = l.re - r;
            let k = v.round();
            ((v - k).abs() < 1e-9 && l.im.abs() < 1e-9).then_some(k as i64)
        })
        .collect()
}

/// `φ_{λ,l}(Z) = η_l^±(Z) · F(λ, m_±(l); Z)` with `η_l^+ = η_l`, `η_l^- = η_l^{-1}`.
pub fn phi_spherical(
    rd: &RootDatum,
    l: i64,
    lambda: &SpectralParam,
    z: &TubePoint,
    variant: ShiftSign,
    backend: Backend,
) -> Result<C> {
    let m = shift_multiplicity(&rd.mult, l, variant);
    let eta_sign = variant;
    let f = match backend {
        Backend::Series => f_eval(rd, &m, lambda, z, 1e-12)?.value,
        Backend::Rank1 => {
            if rd.rank != 1 {
                return Err(Error::Domain("rank1 backend needs n = 1".into()));
            }
            f_rank1(&m, lambda.lambda[0], z.coords()[0])?
        }
        Backend::Poly => {
            if variant == ShiftSign::Minus && l != 0 {
                return Err(Error::Domain("polynomial backend needs the + shift (δ_{m_-} is not integrable)".into()));
            }
            let nu = lattice_offset(lambda, &rho(rd.rank, &m))
                .filter(|nu| is_in_lambda_l(rd, nu, 0))
                .ok_or_else(|| Error::Domain("polynomial backend needs λ - ρ(m_+) in Λ_0^+".into()))?;
            let p = jacobi_poly(rd, &m, &nu)?;
            p.eval(rd, z) / p.value_at_identity(rd)
        }
    };
    Ok(eta_eval(rd, l, eta_sign, z)? * f)
}

/// `ψ_{μ,l}` restricted to the torus, with its polynomial factored out so it
/// can be reused on many points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalFunction {
    pub weight: DominantWeight,
    pub poly: JacobiPoly,
    pub p0: f64,
}

impl SphericalFunction {
    pub fn new(rd: &RootDatum, mu: &DominantWeight) -> Result<Self> {
        Self::with_order(rd, mu, default_order(&mu.mu))
    }

    pub fn with_order(rd: &RootDatum, mu: &DominantWeight, order: usize) -> Result<Self> {
        if !is_in_lambda_l(rd, &mu.mu, mu.l) {
            return Err(Error::NotInLattice { mu: mu.mu.clone(), l: mu.l });
        }
        let m_plus = shift_multiplicity(&rd.mult, mu.l, ShiftSign::Plus);
        let grid = TorusGrid::alcove(rd.rank, order)?;
        let poly = jacobi_poly_on(rd, &m_plus, &mu.untwisted(), &grid)?;
        // evaluated on the same path as `scalar_part` so that ψ(0) = 1 exactly
        let p0 = poly.eval_torus(rd, &vec![0.0; rd.rank]);
        Ok(SphericalFunction { weight: mu.clone(), poly, p0 })
    }

    /// `P(Y)/P(0)`, the W-invariant factor of `ψ`.
    pub fn scalar_part(&self, rd: &RootDatum, y: &[f64]) -> f64 {
        self.poly.eval_torus(rd, y) / self.p0
    }

    pub fn eval(&self, rd: &RootDatum, y: &[f64]) -> f64 {
        eta_torus(self.weight.l, y) * self.scalar_part(rd, y)
    }
}

pub fn psi_spherical(rd: &RootDatum, l: i64, mu: &DominantWeight, y: &[f64]) -> Result<f64> {
    if mu.l != l {
        return Err(Error::Mismatch(format!("weight carries l = {}, asked for l = {l}", mu.l)));
    }
    Ok(SphericalFunction::new(rd, mu)?.eval(rd, y))
}

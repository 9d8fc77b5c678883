//! χ_l-spherical transform on the torus, synthesis, bump sections and
//! exponential-type fitting.
//!
//! Sections are stored through their W-invariant scalar part `g` (so
//! `f|_B = η_l g`). The measure is `η_l² δ_m` on the torus normalized to total
//! `δ_m`-mass one, so `⟨a, b⟩ = Σ w (η a)(η b)^* δ_m / Σ w δ_m` and
//! `d(μ) = 1/⟨ψ_μ, ψ_μ⟩`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergeom::SpectralParam;
use crate::jacobi::{eta_torus, Backend, SphericalFunction};
use crate::par;
use crate::quadrature::TorusGrid;
use crate::rank1::f_rank1_torus;
use crate::rootdata::{rho, shift_multiplicity, Multiplicity, RootDatum, ShiftSign};
use crate::weights::{is_in_lambda_l, DominantWeight};

type C = Complex64;

/// `Π_{α∈Σ⁺} |sin α(Y)|^{m_α}`, with the short and long factors of each
/// coordinate combined as `|sin y|^{m_s+m_l} |2 cos y|^{m_l}`.
pub fn delta_density(rd: &RootDatum, m: &Multiplicity, y: &[f64]) -> f64 {
    let mut out = 1.0;
    for (j, &yj) in y.iter().enumerate().take(rd.rank) {
        out *= yj.sin().abs().powf(m.short + m.long) * (2.0 * yj.cos()).abs().powf(m.long);
        for &yi in &y[..j] {
            out *= ((yj - yi).sin() * (yj + yi).sin()).abs().powf(m.medium);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledSection {
    pub grid: Arc<TorusGrid>,
    /// Scalar part `g` on the grid points.
    pub values: Vec<C>,
    pub l: i64,
    pub support_radius: Option<f64>,
}

impl SampledSection {
    pub fn from_fn(grid: Arc<TorusGrid>, l: i64, f: impl Fn(&[f64]) -> C + Sync + Send) -> Self {
        let values = par::map(&grid.points, |p| f(p));
        SampledSection { grid, values, l, support_radius: None }
    }

    pub fn scale(&self, a: C) -> Self {
        SampledSection { values: self.values.iter().map(|v| v * a).collect(), ..self.clone() }
    }

    pub fn add(&self, other: &SampledSection) -> Result<Self> {
        check_compatible(self, other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(SampledSection { values, support_radius: None, ..self.clone() })
    }
}

fn check_compatible(a: &SampledSection, b: &SampledSection) -> Result<()> {
    if a.l != b.l {
        return Err(Error::Mismatch(format!("bundle parameters {} and {}", a.l, b.l)));
    }
    if !(Arc::ptr_eq(&a.grid, &b.grid) || a.grid.same_rule(&b.grid)) {
        return Err(Error::Mismatch("sections live on different grids".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    pub l: i64,
    pub entries: Vec<(DominantWeight, C)>,
}

impl CoefficientVector {
    pub fn get(&self, mu: &[i64]) -> Option<C> {
        self.entries.iter().find(|(w, _)| w.mu == mu).map(|(_, c)| *c)
    }
}

/// Per-grid measure data for one space and bundle.
#[derive(Clone, Debug)]
pub struct Measure {
    pub rd: RootDatum,
    pub l: i64,
    pub grid: Arc<TorusGrid>,
    eta: Vec<f64>,
    /// `w δ_m / Σ w δ_m`
    weights: Vec<f64>,
}

impl Measure {
    pub fn new(rd: &RootDatum, l: i64, grid: Arc<TorusGrid>) -> Result<Self> {
        if grid.rank != rd.rank {
            return Err(Error::Mismatch(format!("grid rank {} vs space rank {}", grid.rank, rd.rank)));
        }
        let delta: Vec<f64> = grid.points.iter().map(|p| delta_density(rd, &rd.mult, p)).collect();
        let mass = grid.integrate(&delta);
        let weights = grid.weights.iter().zip(&delta).map(|(w, d)| w * d / mass).collect();
        let eta = grid.points.iter().map(|p| eta_torus(l, p)).collect();
        Ok(Measure { rd: rd.clone(), l, grid, eta, weights })
    }

    /// `⟨η a, η b⟩` for scalar parts given on the grid.
    pub fn pair(&self, a: &[C], b: &[C]) -> C {
        let mut s = C::new(0.0, 0.0);
        for k in 0..a.len() {
            s += a[k] * b[k].conj() * (self.weights[k] * self.eta[k] * self.eta[k]);
        }
        s
    }

    pub fn pair_real(&self, a: &[C], b: &[f64]) -> C {
        let mut s = C::new(0.0, 0.0);
        for k in 0..a.len() {
            s += a[k] * (b[k] * self.weights[k] * self.eta[k] * self.eta[k]);
        }
        s
    }

    /// Scalar parts `P(Y)/P(0)` of `ψ_{μ,l}` on the grid.
    pub fn psi_table(&self, mu: &DominantWeight) -> Result<Vec<f64>> {
        let sf = SphericalFunction::new(&self.rd, mu)?;
        Ok(self.grid.points.iter().map(|p| sf.scalar_part(&self.rd, p)).collect())
    }

    pub fn dimension(&self, mu: &DominantWeight) -> Result<f64> {
        let t = self.psi_table(mu)?;
        let s: f64 = (0..t.len()).map(|k| t[k] * t[k] * self.weights[k] * self.eta[k] * self.eta[k]).sum();
        Ok(1.0 / s)
    }
}

pub fn inner_product(rd: &RootDatum, a: &SampledSection, b: &SampledSection) -> Result<C> {
    check_compatible(a, b)?;
    let meas = Measure::new(rd, a.l, a.grid.clone())?;
    Ok(meas.pair(&a.values, &b.values))
}

/// Grid used when a quantity is requested without one.
pub fn default_grid(rank: usize) -> Arc<TorusGrid> {
    let order = if rank == 1 { 128 } else { 32 };
    Arc::new(TorusGrid::alcove(rank, order).expect("rank 1 or 2"))
}

pub fn empirical_dimension(rd: &RootDatum, l: i64, mu: &DominantWeight) -> Result<f64> {
    if mu.l != l {
        return Err(Error::Mismatch(format!("weight carries l = {}, asked for l = {l}", mu.l)));
    }
    Measure::new(rd, l, default_grid(rd.rank))?.dimension(mu)
}

pub fn forward_transform(rd: &RootDatum, f: &SampledSection, mus: &[DominantWeight]) -> Result<CoefficientVector> {
    let meas = Measure::new(rd, f.l, f.grid.clone())?;
    forward_with(&meas, f, mus)
}

pub fn forward_with(meas: &Measure, f: &SampledSection, mus: &[DominantWeight]) -> Result<CoefficientVector> {
    for mu in mus {
        if mu.l != f.l {
            return Err(Error::Mismatch(format!("weight l = {} vs section l = {}", mu.l, f.l)));
        }
    }
    let vals = par::map(mus, |mu| -> Result<C> { Ok(meas.pair_real(&f.values, &meas.psi_table(mu)?)) });
    let mut entries = Vec::with_capacity(mus.len());
    for (mu, v) in mus.iter().zip(vals) {
        entries.push((mu.clone(), v?));
    }
    Ok(CoefficientVector { l: f.l, entries })
}

/// `Σ_μ d(μ) c_μ ψ_μ` with `d(μ)` computed on the same grid.
pub fn synthesize(rd: &RootDatum, coeffs: &CoefficientVector, grid: Arc<TorusGrid>) -> Result<SampledSection> {
    let meas = Measure::new(rd, coeffs.l, grid.clone())?;
    let parts = par::map(&coeffs.entries, |(mu, c)| -> Result<Vec<C>> {
        let t = meas.psi_table(mu)?;
        let d = 1.0 / meas.pair_real(&t.iter().map(|&v| C::new(v, 0.0)).collect::<Vec<_>>(), &t).re;
        Ok(t.iter().map(|&v| c * (d * v)).collect())
    });
    let mut values = vec![C::new(0.0, 0.0); grid.len()];
    for p in parts {
        for (acc, v) in values.iter_mut().zip(p?) {
            *acc += v;
        }
    }
    Ok(SampledSection { grid, values, l: coeffs.l, support_radius: None })
}

/// Largest bump radius whose ball stays inside `Ω = {|α(Y)| < π}`.
pub fn max_bump_radius(_rd: &RootDatum) -> f64 {
    // the long roots 2ε_j have the largest norm
    FRAC_PI_2
}

fn wrap(y: f64) -> f64 {
    let t = y.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

pub fn bump_profile(r: f64, y: &[f64]) -> f64 {
    let s: f64 = y.iter().map(|v| wrap(*v).powi(2)).sum::<f64>() / (r * r);
    if s < 1.0 {
        (-1.0 / (1.0 - s)).exp()
    } else {
        0.0
    }
}

/// `g(Y) = Σ_w exp(-1/(1 - ‖wY‖²/r²))` on `‖Y‖ < r` (coordinates taken mod 2π).
pub fn make_bump(rd: &RootDatum, l: i64, r: f64, grid: Arc<TorusGrid>) -> Result<SampledSection> {
    if !(r > 0.0 && r < max_bump_radius(rd)) {
        return Err(Error::Domain(format!("bump radius {r} must lie in (0, {})", max_bump_radius(rd))));
    }
    let values = grid
        .points
        .iter()
        .map(|p| C::new(rd.weyl().iter().map(|w| bump_profile(r, &w.act(p))).sum(), 0.0))
        .collect();
    Ok(SampledSection { grid, values, l, support_radius: Some(r) })
}

/// `λ ↦ Σ w (f δ_m) φ_{λ+ρ,l} / Σ w δ_m`, extending the transform off the lattice.
pub fn extended_transform(rd: &RootDatum, f: &SampledSection, lambda: &SpectralParam, backend: Backend) -> Result<C> {
    let meas = Measure::new(rd, f.l, f.grid.clone())?;
    extended_with(&meas, f, lambda, backend)
}

pub fn extended_with(meas: &Measure, f: &SampledSection, lambda: &SpectralParam, backend: Backend) -> Result<C> {
    let rd = &meas.rd;
    match backend {
        Backend::Rank1 => {
            if rd.rank != 1 {
                return Err(Error::Domain("rank1 backend needs n = 1".into()));
            }
            let m_plus = shift_multiplicity(&rd.mult, f.l, ShiftSign::Plus);
            let arg = lambda.lambda[0] + rho(1, &rd.mult)[0];
            let mut s = C::new(0.0, 0.0);
            for (k, p) in meas.grid.points.iter().enumerate() {
                let g = f.values[k];
                if g == C::new(0.0, 0.0) || meas.weights[k] == 0.0 {
                    continue;
                }
                let phi_scalar = f_rank1_torus(&m_plus, arg, p[0])?;
                s += g * phi_scalar * (meas.weights[k] * meas.eta[k] * meas.eta[k]);
            }
            Ok(s)
        }
        Backend::Poly => {
            let mu: Option<Vec<i64>> = lambda
                .lambda
                .iter()
                .map(|l| ((l.re - l.re.round()).abs() < 1e-9 && l.im.abs() < 1e-9).then(|| l.re.round() as i64))
                .collect();
            let mu = mu
                .filter(|mu| is_in_lambda_l(rd, mu, f.l))
                .ok_or_else(|| Error::Domain("polynomial backend needs λ in Λ_l^+".into()))?;
            let w = DominantWeight::new(rd, mu, f.l);
            Ok(meas.pair_real(&f.values, &meas.psi_table(&w)?))
        }
        Backend::Series => Err(Error::Domain("series backend does not reach the torus".into())),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeModel {
    /// `log|S| ≈ a + τ t`
    Linear,
    /// `log|S| ≈ a + τ t + b √t`
    SqrtCorrected,
    /// `log|S| ≈ a + τ t - √(2 τ t) + c log t`, the Laplace asymptotics of a
    /// transform of a bump with edge profile `exp(-r/(2(r-|y|)))`.
    BumpLaplace,
}

impl std::str::FromStr for TypeModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(TypeModel::Linear),
            "sqrt" | "sqrt_corrected" => Ok(TypeModel::SqrtCorrected),
            "laplace" | "bump_laplace" => Ok(TypeModel::BumpLaplace),
            _ => Err(Error::Domain(format!("unknown type model {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeFit {
    pub model: TypeModel,
    pub tau: f64,
    /// RMS residual of the fit in `log|S|`.
    pub residual: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Least squares with the given basis columns; returns (coefficients, rms).
fn lstsq(cols: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, f64) {
    let a = nalgebra::DMatrix::from_fn(y.len(), cols.len(), |i, j| cols[j][i]);
    let b = nalgebra::DVector::from_column_slice(y);
    let x = a.clone().svd(true, true).solve(&b, 1e-14).expect("svd solve");
    let r = &a * &x - b;
    (x.iter().copied().collect(), (r.norm_squared() / y.len() as f64).sqrt())
}

pub fn fit_samples(samples: &[(f64, f64)], model: TypeModel) -> TypeFit {
    let t: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let ones = vec![1.0; t.len()];
    let (tau, residual) = match model {
        TypeModel::Linear => {
            let (x, r) = lstsq(&[ones, t.clone()], &y);
            (x[1], r)
        }
        TypeModel::SqrtCorrected => {
            let st = t.iter().map(|v| v.sqrt()).collect();
            let (x, r) = lstsq(&[ones, t.clone(), st], &y);
            (x[1], r)
        }
        TypeModel::BumpLaplace => {
            let lt: Vec<f64> = t.iter().map(|v| v.ln()).collect();
            let resid = |tau: f64| {
                let z: Vec<f64> = t.iter().zip(&y).map(|(ti, yi)| yi - tau * ti + (2.0 * tau * ti).sqrt()).collect();
                lstsq(&[ones.clone(), lt.clone()], &z).1
            };
            // coarse scan, then golden-section refinement around the best cell
            let (lo, hi, steps) = (1e-3, 4.0, 400);
            let h = (hi - lo) / steps as f64;
            let best = (0..=steps)
                .map(|k| lo + k as f64 * h)
                .min_by(|a, b| resid(*a).total_cmp(&resid(*b)))
                .expect("nonempty scan");
            let (mut a, mut b) = ((best - h).max(lo), (best + h).min(hi));
            let g = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..80 {
                let c = b - g * (b - a);
                let d = a + g * (b - a);
                if resid(c) < resid(d) {
                    b = d;
                } else {
                    a = c;
                }
            }
            let tau = 0.5 * (a + b);
            (tau, resid(tau))
        }
    };
    TypeFit { model, tau, residual, samples: samples.to_vec() }
}

/// Samples `log|S(i t ξ)|` at `count` equispaced `t` in `t_range` and fits the
/// exponential type. Rank one only.
pub fn fit_exponential_type(
    rd: &RootDatum,
    f: &SampledSection,
    xi: f64,
    t_range: (f64, f64),
    count: usize,
    model: TypeModel,
) -> Result<TypeFit> {
    if rd.rank != 1 {
        return Err(Error::Domain("exponential-type fitting is implemented at rank one".into()));
    }
    let meas = Measure::new(rd, f.l, f.grid.clone())?;
    let ts: Vec<f64> = (0..count)
        .map(|k| t_range.0 + (t_range.1 - t_range.0) * k as f64 / (count.max(2) - 1) as f64)
        .collect();
    let vals = par::map(&ts, |&t| {
        extended_with(&meas, f, &SpectralParam::new(vec![C::new(0.0, t * xi)]), Backend::Rank1)
    });
    let mut samples = Vec::new();
    let mut any_above = false;
    for (t, v) in ts.iter().zip(vals) {
        let a = v?.norm();
        if a >= 1e-280 {
            any_above = true;
        }
        if a > 0.0 {
            samples.push((*t, a.ln()));
        }
    }
    if !any_above {
        return Err(Error::Underflow);
    }
    Ok(fit_samples(&samples, model))
}

/// The rank-one scalar part `F(λ + ρ(m), m_+(l); iy)` on the torus.
pub fn phi_scalar_rank1(m: &Multiplicity, l: i64, lambda: C, y: f64) -> Result<C> {
    let m_plus = shift_multiplicity(m, l, ShiftSign::Plus);
    f_rank1_torus(&m_plus, lambda + rho(1, m)[0], y)
}

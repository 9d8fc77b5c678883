//! Harish-Chandra series, the c-function and the symmetrized hypergeometric
//! function `F(λ, m; exp Z) = Σ_w c(wλ, m) Φ(wλ, m; exp Z)`.
//!
//! Series coefficients come from the radial eigen-equation
//! `(2⟨κ,λ⟩ - ⟨κ,κ⟩) Γ_κ = 2 Σ_α m_α Σ_{k≥1} ⟨λ - ρ - κ + 2kα, α⟩ Γ_{κ-2kα}`
//! over all BC_n positive roots. A lattice point `κ` in the cone spanned by
//! `2Σ⁺` is stored through its tail sums `t_k = ½ Σ_{j≥k} κ_j ≥ 0`; its height
//! (sum of simple-root coordinates) is `2 Σ_k t_k`.

use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::rootdata::{rho, rho_vector, Multiplicity, Orbit, RhoMode, Root, RootDatum};
use crate::special::{factorial, ln_gamma, nonpositive_integer};

type C = Complex64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralParam {
    pub lambda: Vec<C>,
}

impl SpectralParam {
    pub fn new(lambda: Vec<C>) -> Self {
        SpectralParam { lambda }
    }

    pub fn real(v: &[f64]) -> Self {
        SpectralParam { lambda: v.iter().map(|&x| C::new(x, 0.0)).collect() }
    }

    pub fn from_parts(re: &[f64], im: &[f64]) -> Self {
        SpectralParam { lambda: re.iter().zip(im).map(|(&a, &b)| C::new(a, b)).collect() }
    }

    pub fn rank(&self) -> usize {
        self.lambda.len()
    }

    pub fn pair(&self, v: &[f64]) -> C {
        self.lambda.iter().zip(v).map(|(l, x)| l * x).sum()
    }
}

/// `Z = X + iY`: `X` in the chamber (growth direction), `Y` on the torus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubePoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl TubePoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        TubePoint { x, y }
    }

    pub fn torus(y: Vec<f64>) -> Self {
        TubePoint { x: vec![0.0; y.len()], y }
    }

    pub fn real(x: Vec<f64>) -> Self {
        let n = x.len();
        TubePoint { x, y: vec![0.0; n] }
    }

    pub fn coords(&self) -> Vec<C> {
        self.x.iter().zip(&self.y).map(|(&a, &b)| C::new(a, b)).collect()
    }

    /// Smallest value of a simple root of B_n on `X`; all positive roots are
    /// at least this large.
    pub fn chamber_margin(&self) -> f64 {
        let mut m = self.x[0];
        for w in self.x.windows(2) {
            m = m.min(w[1] - w[0]);
        }
        m
    }

    /// Largest `|α(Y)|` over all BC_n roots.
    pub fn torus_extent(&self) -> f64 {
        let mut m: f64 = 0.0;
        for (j, &yj) in self.y.iter().enumerate() {
            m = m.max(2.0 * yj.abs());
            for &yi in &self.y[..j] {
                m = m.max((yj - yi).abs()).max((yj + yi).abs());
            }
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub tol: f64,
    pub x_min: f64,
    /// Cap on the height `Σ_j j κ_j` of series terms.
    pub max_height: usize,
    pub resonance_tol: f64,
}

impl SeriesConfig {
    pub fn for_rank(n: usize) -> Self {
        SeriesConfig {
            tol: 1e-12,
            x_min: 0.2,
            max_height: if n <= 1 { 240 } else { 256 },
            resonance_tol: 1e-9,
        }
    }
}

fn tails_of(root: &Root) -> Vec<i64> {
    let n = root.coords.len();
    let mut out = vec![0; n];
    let mut acc = 0;
    for j in (0..n).rev() {
        acc += root.coords[j];
        out[j] = acc;
    }
    out
}

fn kappa_from_tails(t: &[u32]) -> Vec<i64> {
    let n = t.len();
    (0..n).map(|j| 2 * (t[j] as i64 - if j + 1 < n { t[j + 1] as i64 } else { 0 })).collect()
}

/// Compositions of `total` into `n` nonnegative parts, lexicographically.
fn compositions(n: usize, total: u32) -> Vec<Vec<u32>> {
    fn go(n: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for v in 0..=left {
            prefix.push(v);
            go(n, left - v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, total, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug)]
struct RootData {
    coords: Vec<f64>,
    tails: Vec<i64>,
    mult: f64,
    lambda_rho: C,
}

/// Coefficients `Γ_κ` of the Harish-Chandra series, filled by increasing height.
#[derive(Clone, Debug)]
pub struct GammaTable {
    pub lambda: SpectralParam,
    pub m: Multiplicity,
    n: usize,
    roots: Vec<RootData>,
    resonance_tol: f64,
    tails: Vec<Vec<u32>>,
    values: Vec<C>,
    index: HashMap<Vec<u32>, usize>,
    /// Start offsets in `tails` of each level `T = Σ t_k`.
    level_start: Vec<usize>,
}

impl GammaTable {
    pub fn new(rd: &RootDatum, m: &Multiplicity, lambda: &SpectralParam, resonance_tol: f64) -> Self {
        let n = rd.rank;
        let rho = rho(n, m);
        let lr: Vec<C> = lambda.lambda.iter().zip(&rho).map(|(l, r)| l - r).collect();
        let roots = rd
            .carrier_roots()
            .into_iter()
            .filter(|r| m.of(r.orbit) != 0.0)
            .map(|r| {
                let coords: Vec<f64> = r.coords.iter().map(|&c| c as f64).collect();
                let lambda_rho = lr.iter().zip(&coords).map(|(a, b)| a * b).sum();
                RootData { tails: tails_of(&r), mult: m.of(r.orbit), coords, lambda_rho }
            })
            .collect();
        let zero = vec![0u32; n];
        let mut index = HashMap::new();
        index.insert(zero.clone(), 0);
        GammaTable {
            lambda: lambda.clone(),
            m: *m,
            n,
            roots,
            resonance_tol,
            tails: vec![zero],
            values: vec![C::new(1.0, 0.0)],
            index,
            level_start: vec![0, 1],
        }
    }

    /// Highest height fully present.
    pub fn max_height(&self) -> usize {
        2 * (self.level_start.len() - 2)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, kappa: &[i64]) -> Option<C> {
        let n = self.n;
        let mut t = vec![0u32; n];
        let mut acc = 0i64;
        for j in (0..n).rev() {
            acc += kappa[j];
            if acc < 0 || acc % 2 != 0 {
                return None;
            }
            t[j] = (acc / 2) as u32;
        }
        self.index.get(&t).map(|&i| self.values[i])
    }

    /// Iterates `(κ, Γ_κ)` in height order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<i64>, C)> + '_ {
        self.tails.iter().zip(&self.values).map(|(t, v)| (kappa_from_tails(t), *v))
    }

    pub fn extend_to(&mut self, max_height: usize) -> Result<()> {
        let target = (max_height / 2) as u32;
        let lambda = self.lambda.lambda.clone();
        while ((self.level_start.len() - 2) as u32) < target {
            let level = (self.level_start.len() - 1) as u32;
            for t in compositions(self.n, level) {
                let kappa = kappa_from_tails(&t);
                let kk: f64 = kappa.iter().map(|&k| (k * k) as f64).sum();
                let kl: C = kappa.iter().zip(&lambda).map(|(&k, l)| l * k as f64).sum();
                let coef = kl * 2.0 - kk;
                let mut rhs = C::new(0.0, 0.0);
                for root in &self.roots {
                    let mut step = 1i64;
                    loop {
                        let mut pred = Vec::with_capacity(self.n);
                        let mut ok = true;
                        for (tk, rk) in t.iter().zip(&root.tails) {
                            let v = *tk as i64 - step * rk;
                            if v < 0 {
                                ok = false;
                                break;
                            }
                            pred.push(v as u32);
                        }
                        if !ok {
                            break;
                        }
                        let idx = self.index[&pred];
                        let g = self.values[idx];
                        if g != C::new(0.0, 0.0) {
                            let pk = kappa_from_tails(&pred);
                            let pa: f64 = pk.iter().zip(&root.coords).map(|(&a, b)| a as f64 * b).sum();
                            rhs += (root.lambda_rho - pa) * g * (2.0 * root.mult);
                        }
                        step += 1;
                    }
                }
                let value = if rhs == C::new(0.0, 0.0) {
                    rhs
                } else if coef.norm() <= self.resonance_tol * kk.max(1.0) {
                    return Err(Error::ResonantParameter { kappa, size: coef.norm() });
                } else {
                    rhs / coef
                };
                self.index.insert(t.clone(), self.values.len());
                self.tails.push(t);
                self.values.push(value);
            }
            self.level_start.push(self.values.len());
        }
        Ok(())
    }
}

pub fn gamma_table(
    rd: &RootDatum,
    m: &Multiplicity,
    lambda: &SpectralParam,
    max_height: usize,
) -> Result<GammaTable> {
    let mut t = GammaTable::new(rd, m, lambda, SeriesConfig::for_rank(rd.rank).resonance_tol);
    t.extend_to(max_height)?;
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: C,
    /// Size of the last two height blocks relative to `1 + |sum|`.
    pub achieved: f64,
    pub height: usize,
}

/// Partial sums of `Φ` using the heights already in `table`.
pub fn phi_eval(table: &GammaTable, z: &TubePoint, tol: f64) -> Result<SeriesValue> {
    phi_sum(table, z, tol, SeriesConfig::for_rank(table.n).x_min)
}

fn check_margin(z: &TubePoint, x_min: f64) -> Result<()> {
    let margin = z.chamber_margin();
    if margin < x_min {
        return Err(Error::Domain(format!(
            "chamber margin {margin} below x_min = {x_min}; the series needs min α(X) ≥ x_min"
        )));
    }
    Ok(())
}

fn phi_sum(table: &GammaTable, z: &TubePoint, tol: f64, x_min: f64) -> Result<SeriesValue> {
    check_margin(z, x_min)?;
    let n = table.n;
    let zc = z.coords();
    let rho = rho(n, &table.m);
    let lead: C = table
        .lambda
        .lambda
        .iter()
        .zip(&rho)
        .zip(&zc)
        .map(|((l, r), zz)| (l - r) * zz)
        .sum();
    // d_k = exp(-2(Z_k - Z_{k-1})), Z_0 = 0
    let levels = table.level_start.len() - 1;
    let d: Vec<C> = (0..n)
        .map(|k| {
            let prev = if k == 0 { C::new(0.0, 0.0) } else { zc[k - 1] };
            (-(zc[k] - prev) * 2.0).exp()
        })
        .collect();
    let powers: Vec<Vec<C>> = d
        .iter()
        .map(|&dk| {
            let mut v = Vec::with_capacity(levels);
            let mut p = C::new(1.0, 0.0);
            for _ in 0..levels {
                v.push(p);
                p *= dk;
            }
            v
        })
        .collect();
    let mut sum = C::new(0.0, 0.0);
    let mut blocks: Vec<f64> = Vec::new();
    let mut block = C::new(0.0, 0.0);
    for level in 0..levels {
        for i in table.level_start[level]..table.level_start[level + 1] {
            let g = table.values[i];
            if g == C::new(0.0, 0.0) {
                continue;
            }
            let mut term = g;
            for (k, &tk) in table.tails[i].iter().enumerate() {
                term *= powers[k][tk as usize];
            }
            block += term;
        }
        // blocks span two levels, i.e. height width 4
        if level % 2 == 0 {
            sum += block;
            blocks.push(block.norm());
            block = C::new(0.0, 0.0);
            let b = blocks.len();
            if b >= 3 {
                let recent = blocks[b - 1] + blocks[b - 2];
                if recent < tol * (1.0 + sum.norm()) {
                    return Ok(SeriesValue {
                        value: lead.exp() * sum,
                        achieved: recent / (1.0 + sum.norm()),
                        height: 2 * level,
                    });
                }
            }
        }
    }
    let last = blocks.iter().rev().take(2).sum::<f64>();
    Err(Error::NoConvergence { max_height: table.max_height(), last_block: last })
}

/// Accumulates `Π Γ(a_0 + a_1 t)^{±1}` as `exp(log_coeff) · t^order` for `t → 0`.
#[derive(Clone, Copy, Debug)]
struct Laurent {
    log_coeff: C,
    order: i32,
}

impl Laurent {
    fn one() -> Self {
        Laurent { log_coeff: C::new(0.0, 0.0), order: 0 }
    }

    fn gamma(&mut self, a0: f64, a1: f64, power: i32) {
        match nonpositive_integer(C::new(a0, 0.0)) {
            Some(k) => {
                // Γ(-k + a1 t) ≈ (-1)^k / (k! a1 t)
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let lc = C::new(sign / (factorial(k) * a1), 0.0).ln();
                self.log_coeff += lc * power as f64;
                self.order -= power;
            }
            None => self.log_coeff += ln_gamma(C::new(a0, 0.0)) * power as f64,
        }
    }
}

struct CFactor {
    root: Vec<f64>,
    norm_sq: f64,
    m_alpha: f64,
    m_double: f64,
    has_double: bool,
}

fn c_factors(rd: &RootDatum, m: &Multiplicity) -> Vec<CFactor> {
    rd.carrier_roots()
        .into_iter()
        .filter(|r| r.orbit != Orbit::Long)
        .map(|r| {
            let short = r.orbit == Orbit::Short;
            CFactor {
                norm_sq: r.norm_sq() as f64,
                root: r.coords.iter().map(|&c| c as f64).collect(),
                m_alpha: m.of(r.orbit),
                m_double: if short { m.long } else { 0.0 },
                has_double: short,
            }
        })
        .collect()
}

/// `log c̃(ρ(m))` defined through the limit along `m + t(1,1,1)`, which is
/// finite and nonzero even when individual Gamma factors hit poles or zeros.
fn ln_normalizer(rd: &RootDatum, m: &Multiplicity) -> Result<C> {
    let n = rd.rank;
    let rho0 = rho(n, m);
    let rho1 = rho(n, &Multiplicity::new(1.0, 1.0, 1.0));
    let mut acc = Laurent::one();
    for f in c_factors(rd, m) {
        let l0 = f.root.iter().zip(&rho0).map(|(a, b)| a * b).sum::<f64>() / f.norm_sq;
        let l1 = f.root.iter().zip(&rho1).map(|(a, b)| a * b).sum::<f64>() / f.norm_sq;
        acc.log_coeff -= C::new(l0 * LN_2, 0.0);
        acc.gamma(l0, l1, 1);
        acc.gamma(0.5 * (0.5 * f.m_alpha + 1.0 + l0), 0.5 * (0.5 + l1), -1);
        let dm = if f.has_double { 1.0 } else { 0.0 };
        acc.gamma(0.5 * (0.5 * f.m_alpha + f.m_double + l0), 0.5 * (0.5 + dm + l1), -1);
    }
    if acc.order != 0 {
        return Err(Error::Pole(format!(
            "c-function normalizer has order {} at m = {:?}",
            acc.order, m
        )));
    }
    Ok(acc.log_coeff)
}

/// Normalized c-function `c(λ, m) = c̃(λ, m) / c̃(ρ(m), m)` where
/// `c̃(λ) = Π_α 2^{-λ_α} Γ(λ_α) / (Γ(½(½m_α + 1 + λ_α)) Γ(½(½m_α + m_{2α} + λ_α)))`
/// over the short and medium positive roots, `λ_α = ⟨λ,α⟩/⟨α,α⟩`.
pub fn c_normalized(rd: &RootDatum, m: &Multiplicity, lambda: &SpectralParam) -> Result<C> {
    let ln_norm = ln_normalizer(rd, m)?;
    let mut ln_num = C::new(0.0, 0.0);
    for f in c_factors(rd, m) {
        let la = lambda.pair(&f.root) / f.norm_sq;
        if nonpositive_integer(la).is_some() {
            return Err(Error::Pole(format!("Γ(λ_α) at λ_α = {la}")));
        }
        let d1 = (la + 0.5 * f.m_alpha + 1.0) * 0.5;
        let d2 = (la + 0.5 * f.m_alpha + f.m_double) * 0.5;
        if nonpositive_integer(d1).is_some() || nonpositive_integer(d2).is_some() {
            return Ok(C::new(0.0, 0.0));
        }
        ln_num += -la * LN_2 + ln_gamma(la) - ln_gamma(d1) - ln_gamma(d2);
    }
    Ok((ln_num - ln_norm).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FEval {
    pub value: C,
    /// True when λ was resonant and the value is the average over `λ ± δ`.
    pub perturbed: bool,
    pub achieved: f64,
    pub height: usize,
}

struct Symmetrized {
    terms: Vec<(C, GammaTable)>,
}

impl Symmetrized {
    fn build(rd: &RootDatum, m: &Multiplicity, lambda: &SpectralParam, cfg: &SeriesConfig) -> Result<Self> {
        let mut terms = Vec::new();
        for w in rd.weyl() {
            let wl = SpectralParam::new(w.act(&lambda.lambda));
            let c = c_normalized(rd, m, &wl)?;
            if c == C::new(0.0, 0.0) {
                continue;
            }
            let mut table = GammaTable::new(rd, m, &wl, cfg.resonance_tol);
            table.extend_to(cfg.max_height.min(48))?;
            terms.push((c, table));
        }
        Ok(Symmetrized { terms })
    }

    fn eval(&mut self, z: &TubePoint, cfg: &SeriesConfig) -> Result<SeriesValue> {
        let mut total = C::new(0.0, 0.0);
        let mut achieved: f64 = 0.0;
        let mut height = 0;
        for (c, table) in &mut self.terms {
            let v = loop {
                match phi_sum(table, z, cfg.tol, cfg.x_min) {
                    Ok(v) => break v,
                    Err(Error::NoConvergence { .. }) if table.max_height() < cfg.max_height => {
                        let next = (2 * table.max_height()).min(cfg.max_height);
                        table.extend_to(next)?;
                    }
                    Err(e) => return Err(e),
                }
            };
            total += *c * v.value;
            achieved = achieved.max(v.achieved);
            height = height.max(v.height);
        }
        Ok(SeriesValue { value: total, achieved, height })
    }
}

fn perturbation(n: usize) -> Vec<f64> {
    let norm = ((1..=n).map(|j| (j * j) as f64).sum::<f64>()).sqrt();
    (1..=n).map(|j| 1e-6 * j as f64 / norm).collect()
}

fn shifted(lambda: &SpectralParam, d: &[f64], s: f64) -> SpectralParam {
    SpectralParam::new(lambda.lambda.iter().zip(d).map(|(l, x)| l + s * x).collect())
}

fn retryable(e: &Error) -> bool {
    matches!(e, Error::ResonantParameter { .. } | Error::Pole(_))
}

/// `F(λ, m; ·)` for a fixed λ, reusable across many points.
///
/// On resonance or a c-function pole the evaluator switches to the symmetric
/// average of `λ + δ` and `λ - δ` with `δ = 1e-6 (1,…,n)/‖(1,…,n)‖`; the odd
/// part of the error cancels, leaving O(|δ|²).
pub struct FEvaluator {
    rd: RootDatum,
    m: Multiplicity,
    lambda: SpectralParam,
    cfg: SeriesConfig,
    exact: Option<Symmetrized>,
    pair: Option<(Symmetrized, Symmetrized)>,
}

impl FEvaluator {
    pub fn new(rd: &RootDatum, m: &Multiplicity, lambda: &SpectralParam, cfg: SeriesConfig) -> Result<Self> {
        if lambda.rank() != rd.rank {
            return Err(Error::Domain(format!("λ has {} coordinates, rank is {}", lambda.rank(), rd.rank)));
        }
        let mut ev = FEvaluator { rd: rd.clone(), m: *m, lambda: lambda.clone(), cfg, exact: None, pair: None };
        match Symmetrized::build(rd, m, lambda, &cfg) {
            Ok(s) => ev.exact = Some(s),
            Err(e) if retryable(&e) => ev.switch_to_pair()?,
            Err(e) => return Err(e),
        }
        Ok(ev)
    }

    fn switch_to_pair(&mut self) -> Result<()> {
        let d = perturbation(self.rd.rank);
        let plus = Symmetrized::build(&self.rd, &self.m, &shifted(&self.lambda, &d, 1.0), &self.cfg)?;
        let minus = Symmetrized::build(&self.rd, &self.m, &shifted(&self.lambda, &d, -1.0), &self.cfg)?;
        self.exact = None;
        self.pair = Some((plus, minus));
        Ok(())
    }

    pub fn perturbed(&self) -> bool {
        self.pair.is_some()
    }

    pub fn eval(&mut self, z: &TubePoint) -> Result<FEval> {
        if z.x.len() != self.rd.rank || z.y.len() != self.rd.rank {
            return Err(Error::Domain("tube point has the wrong rank".into()));
        }
        if let Some(s) = self.exact.as_mut() {
            match s.eval(z, &self.cfg) {
                Ok(v) => return Ok(FEval { value: v.value, perturbed: false, achieved: v.achieved, height: v.height }),
                Err(e) if retryable(&e) => self.switch_to_pair()?,
                Err(e) => return Err(e),
            }
        }
        let (plus, minus) = self.pair.as_mut().expect("perturbed pair");
        let a = plus.eval(z, &self.cfg)?;
        let b = minus.eval(z, &self.cfg)?;
        Ok(FEval {
            value: (a.value + b.value) * 0.5,
            perturbed: true,
            achieved: a.achieved.max(b.achieved),
            height: a.height.max(b.height),
        })
    }
}

pub fn f_eval(rd: &RootDatum, m: &Multiplicity, lambda: &SpectralParam, z: &TubePoint, tol: f64) -> Result<FEval> {
    let cfg = SeriesConfig { tol, ..SeriesConfig::for_rank(rd.rank) };
    FEvaluator::new(rd, m, lambda, cfg)?.eval(z)
}

pub fn estimate_constant(eps: f64) -> f64 {
    2.0 + 2.0 * ((PI - eps) / 2.0).tan()
}

/// `|W|^{1/2} exp(-min_w Im wλ(Y) + (C/2) max_w wρ̃(Y) + max_w Re wλ(X))`
/// with `C = 2 + 2 tan((π - ε)/2)` and `ρ̃ = ½ Σ |m_α| α`.
pub fn estimate_bound(rd: &RootDatum, m: &Multiplicity, lambda: &SpectralParam, z: &TubePoint, eps: f64) -> Result<f64> {
    let extent = z.torus_extent();
    if extent > PI - eps + 1e-12 {
        return Err(Error::Domain(format!("max |α(Y)| = {extent} exceeds π - ε = {}", PI - eps)));
    }
    let rho_t = rho_vector(rd, m, RhoMode::RhoTilde);
    let mut min_im = f64::INFINITY;
    let mut max_rho = f64::NEG_INFINITY;
    let mut max_re = f64::NEG_INFINITY;
    for w in rd.weyl() {
        let wl = SpectralParam::new(w.act(&lambda.lambda));
        min_im = min_im.min(wl.pair(&z.y).im);
        max_re = max_re.max(wl.pair(&z.x).re);
        let wr = w.act(&rho_t);
        max_rho = max_rho.max(wr.iter().zip(&z.y).map(|(a, b)| a * b).sum());
    }
    let c = estimate_constant(eps);
    Ok((rd.weyl_size() as f64).sqrt() * (-min_im + 0.5 * c * max_rho + max_re).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateGrid {
    pub points: usize,
    pub seed: u64,
    /// λ coordinates are drawn from `[-b, b] + i[-b, b]`.
    pub lambda_box: f64,
    /// Chamber gaps are drawn from `[x_min, x_min + x_spread]`.
    pub x_spread: f64,
    pub report_tol: f64,
}

impl Default for EstimateGrid {
    fn default() -> Self {
        EstimateGrid { points: 200, seed: 7, lambda_box: 3.0, x_spread: 0.6, report_tol: 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    pub lambda: SpectralParam,
    pub z: TubePoint,
    pub abs_f: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub m: Multiplicity,
    pub eps: f64,
    pub evaluated: usize,
    pub skipped: usize,
    pub failures: usize,
    pub max_ratio: f64,
    pub argmax: Option<usize>,
    pub rows: Vec<EstimateRow>,
}

pub fn sample_estimate_points(n: usize, grid: &EstimateGrid, eps: f64, x_min: f64) -> Vec<(SpectralParam, TubePoint)> {
    let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
    let half = 0.5 * (PI - eps);
    let mut out = Vec::with_capacity(grid.points);
    while out.len() < grid.points {
        let b = grid.lambda_box;
        let lambda = SpectralParam::new(
            (0..n).map(|_| C::new(rng.random_range(-b..b), rng.random_range(-b..b))).collect(),
        );
        let mut x = Vec::with_capacity(n);
        let mut acc = 0.0;
        for _ in 0..n {
            acc += x_min + rng.random_range(0.0..grid.x_spread);
            x.push(acc);
        }
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-half..half)).collect();
        let z = TubePoint::new(x, y);
        if z.torus_extent() <= PI - eps {
            out.push((lambda, z));
        }
    }
    out
}

pub fn verify_estimate(rd: &RootDatum, m: &Multiplicity, grid: &EstimateGrid, eps: f64) -> EstimateReport {
    let cfg = SeriesConfig { tol: 1e-10, x_min: 0.25, ..SeriesConfig::for_rank(rd.rank) };
    let pts = sample_estimate_points(rd.rank, grid, eps, cfg.x_min);
    let results = par::map(&pts, |(lambda, z)| -> Result<EstimateRow> {
        let f = FEvaluator::new(rd, m, lambda, cfg)?.eval(z)?;
        let bound = estimate_bound(rd, m, lambda, z, eps)?;
        let abs_f = f.value.norm();
        Ok(EstimateRow { lambda: lambda.clone(), z: z.clone(), abs_f, bound, ratio: abs_f / bound })
    });
    let mut rows = Vec::new();
    let mut skipped = 0;
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(_) => skipped += 1,
        }
    }
    let mut max_ratio = f64::NEG_INFINITY;
    let mut argmax = None;
    let mut failures = 0;
    for (i, r) in rows.iter().enumerate() {
        if r.ratio > max_ratio {
            max_ratio = r.ratio;
            argmax = Some(i);
        }
        if !(r.ratio <= 1.0 + grid.report_tol) {
            failures += 1;
        }
    }
    EstimateReport { m: *m, eps, evaluated: rows.len(), skipped, failures, max_ratio, argmax, rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::{build_root_system, Case};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn rd1() -> RootDatum {
        build_root_system(1, Case::II, Multiplicity::new(2.0, 0.0, 1.0)).unwrap()
    }

    fn rd2() -> RootDatum {
        build_root_system(2, Case::II, Multiplicity::new(2.0, 2.0, 1.0)).unwrap()
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(1, 5), vec![vec![5]]);
        assert_eq!(compositions(2, 3).len(), 4);
        assert_eq!(compositions(3, 4).len(), 15);
    }

    #[test]
    fn table_basics() {
        let m = Multiplicity::new(0.0, 0.0, 1.0);
        let t = gamma_table(&rd1(), &m, &SpectralParam::real(&[3.0]), 12).unwrap();
        assert_eq!(t.get(&[0]), Some(c(1.0, 0.0)));
        assert_eq!(t.get(&[4]), Some(c(1.0, 0.0)));
        assert_eq!(t.get(&[2]), Some(c(0.0, 0.0)));
        assert_eq!(t.get(&[8]), Some(c(0.0, 0.0)));
        assert_eq!(t.max_height(), 12);
        let zero = gamma_table(&rd2(), &Multiplicity::ZERO, &SpectralParam::real(&[0.3, 1.7]), 20).unwrap();
        for (k, v) in zero.entries() {
            if k.iter().any(|&x| x != 0) {
                assert_eq!(v, c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn resonance_is_reported() {
        // 2⟨κ,λ⟩ = ⟨κ,κ⟩ at κ = 2, λ = 1 with a nonzero right-hand side
        let m = Multiplicity::new(2.0, 0.0, 1.0);
        let err = gamma_table(&rd1(), &m, &SpectralParam::real(&[1.0]), 10).unwrap_err();
        assert!(matches!(err, Error::ResonantParameter { .. }), "{err}");
    }

    #[test]
    fn degenerate_phi_and_f() {
        let lam = SpectralParam::new(vec![c(0.4, 1.2), c(-1.1, 0.3)]);
        let z = TubePoint::new(vec![0.4, 1.0], vec![0.2, -0.5]);
        let t = gamma_table(&rd2(), &Multiplicity::ZERO, &lam, 40).unwrap();
        let v = phi_eval(&t, &z, 1e-14).unwrap().value;
        let e: C = lam.lambda.iter().zip(z.coords()).map(|(l, zz)| l * zz).sum::<C>().exp();
        assert!((v - e).norm() < 1e-14 * e.norm());
        let f = f_eval(&rd1(), &Multiplicity::ZERO, &SpectralParam::real(&[2.0]), &TubePoint::real(vec![0.5]), 1e-12)
            .unwrap();
        assert!((f.value - c(1f64.cosh(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn margin_is_enforced() {
        let m = Multiplicity::new(2.0, 2.0, 1.0);
        let lam = SpectralParam::new(vec![c(0.4, 1.2), c(-1.1, 0.3)]);
        let err = f_eval(&rd2(), &m, &lam, &TubePoint::real(vec![0.5, 0.6]), 1e-10).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn c_at_zero_multiplicity() {
        for r in [rd1(), rd2()] {
            let lam = SpectralParam::new((0..r.rank).map(|j| c(0.3 + j as f64, -0.7)).collect());
            let v = c_normalized(&r, &Multiplicity::ZERO, &lam).unwrap();
            assert!((v - c(1.0 / r.weyl_size() as f64, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn c_is_one_at_rho() {
        let m = Multiplicity::new(2.3, 1.7, 0.9);
        for r in [rd1(), rd2()] {
            let v = c_normalized(&r, &m, &SpectralParam::real(&rho(r.rank, &m))).unwrap();
            assert!((v - c(1.0, 0.0)).norm() < 1e-13, "{v}");
        }
    }

    #[test]
    fn normalizer_finite_for_shifted() {
        for m in [(2.0, 2.0, 1.0), (0.0, 1.0, 1.0), (-2.0, 1.0, 3.0), (4.0, 2.0, -1.0), (2.0, 1.0, -1.0)] {
            let m = Multiplicity::new(m.0, m.1, m.2);
            let r = rd2();
            let rho = rho(2, &m);
            let lam = SpectralParam::real(&[rho[0] + 0.37, rho[1] - 0.21]);
            assert!(c_normalized(&r, &m, &lam).is_ok());
            assert!(ln_normalizer(&r, &m).is_ok(), "{m:?}");
        }
    }

    #[test]
    fn conjugation_symmetry() {
        let m = Multiplicity::new(2.0, 2.0, 1.0);
        let lam = SpectralParam::real(&[0.7, 2.3]);
        let z = TubePoint::new(vec![0.5, 1.2], vec![0.3, -0.4]);
        let zc = TubePoint::new(z.x.clone(), z.y.iter().map(|v| -v).collect());
        let a = f_eval(&rd2(), &m, &lam, &z, 1e-12).unwrap().value;
        let b = f_eval(&rd2(), &m, &lam, &zc, 1e-12).unwrap().value;
        assert!((a - b.conj()).norm() < 1e-10 * (1.0 + a.norm()));
    }

    #[test]
    fn estimate_bound_examples() {
        let r = rd2();
        let m = r.mult;
        let lam = SpectralParam::real(&[0.5, -1.5]);
        let z = TubePoint::real(vec![0.3, 0.9]);
        let b = estimate_bound(&r, &m, &lam, &z, 0.3).unwrap();
        // max_w Re wλ(X) = 1.5·0.9 + 0.5·0.3
        assert!((b - 8f64.sqrt() * (1.35f64 + 0.15).exp()).abs() < 1e-12);
        let zero = estimate_bound(&r, &m, &SpectralParam::real(&[0.0, 0.0]), &TubePoint::real(vec![0.0, 0.0]), 0.3);
        assert!((zero.unwrap() - 8f64.sqrt()).abs() < 1e-14);
        let z = TubePoint::new(vec![0.3, 0.9], vec![0.4, -0.9]);
        let lam = SpectralParam::new(vec![c(0.3, 1.0), c(-0.2, 0.5)]);
        let a = estimate_bound(&r, &m, &lam, &z, 0.3).unwrap();
        let b = estimate_bound(&r, &m, &lam, &z, 0.15).unwrap();
        assert!(b >= a);
        let far = TubePoint::new(vec![0.3, 0.9], vec![1.0, -1.5]);
        assert!(estimate_bound(&r, &m, &lam, &far, 0.3).is_err());
    }
}

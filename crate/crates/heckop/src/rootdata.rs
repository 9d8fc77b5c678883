//! BC_n root data in the ε basis (taken orthonormal), multiplicities and the
//! hyperoctahedral Weyl group.
//!
//! The positive chamber is `0 < x_1 < ... < x_n`. Positive roots are
//! `ε_j` (short), `ε_j ± ε_i` for `i < j` (medium) and `2ε_j` (long).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    /// Type C_n, modelled as BC_n with `m_s = 0`.
    I,
    /// Type BC_n.
    II,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orbit {
    Short,
    Medium,
    Long,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Root {
    pub coords: Vec<i64>,
    pub orbit: Orbit,
}

impl Root {
    pub fn norm_sq(&self) -> i64 {
        self.coords.iter().map(|c| c * c).sum()
    }

    pub fn pair(&self, v: &[f64]) -> f64 {
        self.coords.iter().zip(v).map(|(&c, x)| c as f64 * x).sum()
    }
}

/// One multiplicity per Weyl orbit. Shifted multiplicities may be negative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Multiplicity {
    pub short: f64,
    pub medium: f64,
    pub long: f64,
}

impl Multiplicity {
    pub const ZERO: Multiplicity = Multiplicity { short: 0.0, medium: 0.0, long: 0.0 };

    pub fn new(short: f64, medium: f64, long: f64) -> Self {
        Multiplicity { short, medium, long }
    }

    pub fn of(&self, orbit: Orbit) -> f64 {
        match orbit {
            Orbit::Short => self.short,
            Orbit::Medium => self.medium,
            Orbit::Long => self.long,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.short == 0.0 && self.medium == 0.0 && self.long == 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftSign {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoMode {
    Rho,
    RhoTilde,
    RhoS,
}

/// Signed permutation acting by `(wλ)_{perm[j]} = signs[j] * λ_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WeylElement {
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
}

impl WeylElement {
    pub fn identity(n: usize) -> Self {
        WeylElement { perm: (0..n).collect(), signs: vec![1; n] }
    }

    pub fn minus_identity(n: usize) -> Self {
        WeylElement { perm: (0..n).collect(), signs: vec![-1; n] }
    }

    pub fn rank(&self) -> usize {
        self.perm.len()
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let n = self.rank();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        for j in 0..n {
            let k = other.perm[j];
            perm[j] = self.perm[k];
            signs[j] = self.signs[k] * other.signs[j];
        }
        WeylElement { perm, signs }
    }

    pub fn inverse(&self) -> WeylElement {
        let n = self.rank();
        let mut perm = vec![0; n];
        let mut signs = vec![1; n];
        for j in 0..n {
            perm[self.perm[j]] = j;
            signs[self.perm[j]] = self.signs[j];
        }
        WeylElement { perm, signs }
    }

    pub fn act<T>(&self, v: &[T]) -> Vec<T>
    where
        T: Copy + std::ops::Neg<Output = T> + Default,
    {
        let mut out = vec![T::default(); v.len()];
        for (j, &x) in v.iter().enumerate() {
            out[self.perm[j]] = if self.signs[j] < 0 { -x } else { x };
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootDatum {
    pub rank: usize,
    pub case: Case,
    pub mult: Multiplicity,
    pub positive_roots: Vec<Root>,
    #[serde(skip)]
    weyl: Vec<WeylElement>,
}

impl RootDatum {
    pub fn weyl_size(&self) -> usize {
        self.weyl.len()
    }

    pub fn weyl(&self) -> &[WeylElement] {
        &self.weyl
    }

    /// All BC_n positive roots regardless of case. Hypergeometric code works on
    /// this carrier so that shifted multiplicities with `m_s != 0` make sense in
    /// Case I as well.
    pub fn carrier_roots(&self) -> Vec<Root> {
        bc_positive_roots(self.rank, true)
    }
}

fn bc_positive_roots(n: usize, with_short: bool) -> Vec<Root> {
    let unit = |j: usize, s: i64| {
        let mut v = vec![0; n];
        v[j] = s;
        v
    };
    let mut roots = Vec::new();
    if with_short {
        for j in 0..n {
            roots.push(Root { coords: unit(j, 1), orbit: Orbit::Short });
        }
    }
    for j in 0..n {
        for i in 0..j {
            for s in [-1, 1] {
                let mut v = unit(j, 1);
                v[i] = s;
                roots.push(Root { coords: v, orbit: Orbit::Medium });
            }
        }
    }
    for j in 0..n {
        roots.push(Root { coords: unit(j, 2), orbit: Orbit::Long });
    }
    roots
}

pub fn build_root_system(n: usize, case: Case, m: Multiplicity) -> Result<RootDatum> {
    if n == 0 {
        return Err(Error::InvalidRank(n));
    }
    if case == Case::I && m.short != 0.0 {
        return Err(Error::CaseIShort(m.short));
    }
    Ok(RootDatum {
        rank: n,
        case,
        mult: m,
        positive_roots: bc_positive_roots(n, case == Case::II),
        weyl: generate_weyl(n),
    })
}

pub fn weyl_elements(rd: &RootDatum) -> Vec<WeylElement> {
    rd.weyl.clone()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn generate_weyl(n: usize) -> Vec<WeylElement> {
    let mut out = Vec::with_capacity((1 << n) * (1..=n).product::<usize>());
    for perm in permutations(n) {
        for mask in 0..(1u32 << n) {
            let signs = (0..n).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect();
            out.push(WeylElement { perm: perm.clone(), signs });
        }
    }
    out
}

/// Closed form `ρ_j = m_s/2 + m_l + m_m (j-1)` (1-based `j`).
pub fn rho(n: usize, m: &Multiplicity) -> Vec<f64> {
    (0..n).map(|j| 0.5 * m.short + m.long + m.medium * j as f64).collect()
}

/// ½ Σ m_α α over the BC carrier, with `|m_α|` for `RhoTilde`, or
/// ½ Σ ε_j for `RhoS`.
pub fn rho_vector(rd: &RootDatum, m: &Multiplicity, mode: RhoMode) -> Vec<f64> {
    let mut out = vec![0.0; rd.rank];
    for root in rd.carrier_roots() {
        let w = match mode {
            RhoMode::Rho => m.of(root.orbit),
            RhoMode::RhoTilde => m.of(root.orbit).abs(),
            RhoMode::RhoS => {
                if root.orbit == Orbit::Short {
                    1.0
                } else {
                    0.0
                }
            }
        };
        for (o, &c) in out.iter_mut().zip(&root.coords) {
            *o += 0.5 * w * c as f64;
        }
    }
    out
}

pub fn shift_multiplicity(m: &Multiplicity, l: i64, sign: ShiftSign) -> Multiplicity {
    let d = 2.0 * l.unsigned_abs() as f64;
    match sign {
        ShiftSign::Plus => Multiplicity::new(m.short - d, m.medium, m.long + d),
        ShiftSign::Minus => Multiplicity::new(m.short + d, m.medium, m.long - d),
    }
}

/// Membership in M_≥: for the unmultiplicable positive roots (medium and long)
/// `m_α ≥ 0` and `m_α + m_{α/2} ≥ 0`.
pub fn in_m_ge(rd: &RootDatum, m: &Multiplicity) -> bool {
    let medium_ok = rd.rank < 2 || m.medium >= 0.0;
    medium_ok && m.long >= 0.0 && m.long + m.short >= 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rd(n: usize, case: Case, m: (f64, f64, f64)) -> RootDatum {
        build_root_system(n, case, Multiplicity::new(m.0, m.1, m.2)).unwrap()
    }

    #[test]
    fn root_counts() {
        let r = rd(2, Case::II, (2.0, 2.0, 1.0));
        assert_eq!(r.positive_roots.len(), 6);
        for n in 1..=4 {
            assert_eq!(rd(n, Case::II, (1.0, 1.0, 1.0)).positive_roots.len(), n * (n + 1));
            assert_eq!(rd(n, Case::I, (0.0, 1.0, 1.0)).positive_roots.len(), n * n);
        }
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            build_root_system(0, Case::II, Multiplicity::ZERO),
            Err(Error::InvalidRank(0))
        );
        assert!(matches!(
            build_root_system(2, Case::I, Multiplicity::new(2.0, 1.0, 1.0)),
            Err(Error::CaseIShort(_))
        ));
    }

    #[test]
    fn weyl_group_is_closed() {
        for n in 1..=3 {
            let r = rd(n, Case::II, (1.0, 1.0, 1.0));
            let w = r.weyl();
            assert_eq!(w.len(), (1 << n) * (1..=n).product::<usize>());
            assert!(w.contains(&WeylElement::minus_identity(n)));
            for a in w {
                assert!(w.contains(&a.inverse()));
                assert_eq!(a.compose(&a.inverse()), WeylElement::identity(n));
                for b in w {
                    assert!(w.contains(&a.compose(b)));
                }
            }
        }
    }

    #[test]
    fn composition_matches_action() {
        let r = rd(3, Case::II, (1.0, 1.0, 1.0));
        let v = [1.0, -2.5, 4.0];
        for a in r.weyl().iter().step_by(7) {
            for b in r.weyl().iter().step_by(5) {
                assert_eq!(a.compose(b).act(&v), a.act(&b.act(&v)));
            }
        }
    }

    #[test]
    fn weyl_preserves_roots_and_orbits() {
        for n in 1..=3 {
            let r = rd(n, Case::II, (1.0, 1.0, 1.0));
            let roots = r.carrier_roots();
            for w in r.weyl() {
                for a in &roots {
                    let image = w.act(&a.coords);
                    let neg: Vec<i64> = image.iter().map(|c| -c).collect();
                    let hit = roots
                        .iter()
                        .find(|b| b.coords == image || b.coords == neg)
                        .expect("image is a root");
                    assert_eq!(hit.orbit, a.orbit);
                }
            }
        }
    }

    #[test]
    fn rho_examples() {
        let r = rd(2, Case::II, (2.0, 2.0, 1.0));
        assert_eq!(rho_vector(&r, &r.mult, RhoMode::Rho), vec![2.0, 4.0]);
        assert_eq!(rho_vector(&r, &Multiplicity::ZERO, RhoMode::Rho), vec![0.0, 0.0]);
        assert_eq!(rho_vector(&r, &r.mult, RhoMode::RhoS), vec![0.5, 0.5]);
        let r1 = rd(1, Case::II, (4.0, 0.0, -1.0));
        assert_eq!(rho_vector(&r1, &r1.mult, RhoMode::RhoTilde), vec![3.0]);
    }

    #[test]
    fn rho_closed_form_and_shift() {
        for n in 1..=3 {
            let r = rd(n, Case::II, (1.0, 1.0, 1.0));
            for m in [(2.0, 2.0, 1.0), (0.0, 1.0, 1.0), (8.0, 6.0, 1.0), (-2.0, 1.0, 3.0)] {
                let m = Multiplicity::new(m.0, m.1, m.2);
                assert_eq!(rho_vector(&r, &m, RhoMode::Rho), rho(n, &m));
                for l in 0..=3 {
                    let plus = rho(n, &shift_multiplicity(&m, l, ShiftSign::Plus));
                    let minus = rho(n, &shift_multiplicity(&m, l, ShiftSign::Minus));
                    let base = rho(n, &m);
                    for j in 0..n {
                        assert_eq!(plus[j], base[j] + l as f64);
                        assert_eq!(minus[j], base[j] - l as f64);
                    }
                }
            }
        }
    }

    #[test]
    fn shifts() {
        let m = Multiplicity::new(2.0, 2.0, 1.0);
        assert_eq!(shift_multiplicity(&m, 1, ShiftSign::Plus), Multiplicity::new(0.0, 2.0, 3.0));
        assert_eq!(shift_multiplicity(&m, -1, ShiftSign::Minus), Multiplicity::new(4.0, 2.0, -1.0));
        assert_eq!(shift_multiplicity(&m, 0, ShiftSign::Minus), m);
    }

    #[test]
    fn m_ge_predicate() {
        let r = rd(2, Case::I, (0.0, 1.0, 1.0));
        assert!(in_m_ge(&r, &Multiplicity::new(-2.0, 1.0, 3.0)));
        assert!(!in_m_ge(&r, &Multiplicity::new(4.0, 2.0, -1.0)));
        assert!(in_m_ge(&r, &r.mult));
        assert!(!in_m_ge(&r, &Multiplicity::new(-4.0, 1.0, 3.0)));
    }
}

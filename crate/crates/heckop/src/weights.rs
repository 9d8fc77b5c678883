//! Highest-weight lattices Λ_l^+ and fundamental spherical weights.

use serde::{Deserialize, Serialize};

use crate::rootdata::{Case, RootDatum};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DominantWeight {
    pub mu: Vec<i64>,
    pub l: i64,
    /// 0 in Case I, `l` in Case II. Carried along, never used in formulas.
    pub mu0: i64,
}

impl DominantWeight {
    pub fn new(rd: &RootDatum, mu: Vec<i64>, l: i64) -> Self {
        let mu0 = match rd.case {
            Case::I => 0,
            Case::II => l,
        };
        DominantWeight { mu, l, mu0 }
    }

    pub fn height(&self) -> i64 {
        self.mu.iter().sum()
    }

    /// `μ - |l|·(1,…,1)`, the untwisted weight in Λ_0^+.
    pub fn untwisted(&self) -> Vec<i64> {
        let s = self.l.abs();
        self.mu.iter().map(|m| m - s).collect()
    }
}

pub fn is_in_lambda_l(rd: &RootDatum, mu: &[i64], l: i64) -> bool {
    if mu.len() != rd.rank {
        return false;
    }
    let first = mu[0] - l.abs();
    first >= 0 && first % 2 == 0 && mu.windows(2).all(|w| w[1] >= w[0] && (w[1] - w[0]) % 2 == 0)
}

fn nondecreasing_even(n: usize, max_height: i64) -> Vec<Vec<i64>> {
    fn go(n: usize, lo: i64, budget: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let remaining = (n - prefix.len()) as i64;
        let mut v = lo;
        while v * remaining <= budget {
            prefix.push(v);
            go(n, v, budget - v, prefix, out);
            prefix.pop();
            v += 2;
        }
    }
    let mut out = Vec::new();
    if max_height >= 0 {
        go(n, 0, max_height, &mut Vec::new(), &mut out);
    }
    out
}

fn sort_by_height(v: &mut [Vec<i64>]) {
    v.sort_by(|a, b| (a.iter().sum::<i64>(), a).cmp(&(b.iter().sum::<i64>(), b)));
}

/// Λ_0^+ points of height at most `max_height`, in height-then-lex order.
pub fn lambda0_points(n: usize, max_height: i64) -> Vec<Vec<i64>> {
    let mut v = nondecreasing_even(n, max_height);
    sort_by_height(&mut v);
    v
}

/// All μ ∈ Λ_l^+ with `Σ μ_j ≤ max_height`, sorted by height then lexicographically.
pub fn enumerate_lambda_l(rd: &RootDatum, l: i64, max_height: i64) -> Vec<DominantWeight> {
    let n = rd.rank;
    let s = l.abs();
    lambda0_points(n, max_height - n as i64 * s)
        .into_iter()
        .map(|nu| DominantWeight::new(rd, nu.iter().map(|x| x + s).collect(), l))
        .collect()
}

/// Simple roots of the unmultiplicable system: `2ε_1` and `ε_k - ε_{k-1}`.
pub fn simple_roots(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|k| {
            let mut v = vec![0; n];
            if k == 0 {
                v[0] = 2;
            } else {
                v[k] = 1;
                v[k - 1] = -1;
            }
            v
        })
        .collect()
}

/// `ω_j = 2(ε_j + … + ε_n)`; integral in this normalization.
pub fn fundamental_weights(rd: &RootDatum) -> Vec<Vec<i64>> {
    let n = rd.rank;
    (0..n).map(|j| (0..n).map(|i| if i >= j { 2 } else { 0 }).collect()).collect()
}

/// Dominance: `ν ≼ μ` iff `μ - ν` is a nonnegative combination of positive
/// roots, i.e. all tail sums of `μ - ν` are nonnegative.
pub fn dominated(nu: &[i64], mu: &[i64]) -> bool {
    let mut tail = 0;
    for j in (0..mu.len()).rev() {
        tail += mu[j] - nu[j];
        if tail < 0 {
            return false;
        }
    }
    true
}

/// `{ν ∈ Λ_0^+ : ν ≼ μ}` in height-then-lex order (includes `μ`).
pub fn lower_set(mu: &[i64]) -> Vec<Vec<i64>> {
    let h: i64 = mu.iter().sum();
    lambda0_points(mu.len(), h).into_iter().filter(|nu| dominated(nu, mu)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::{build_root_system, Multiplicity};

    fn rd(n: usize) -> RootDatum {
        build_root_system(n, Case::II, Multiplicity::new(2.0, 2.0, 1.0)).unwrap()
    }

    fn mus(v: Vec<DominantWeight>) -> Vec<Vec<i64>> {
        v.into_iter().map(|d| d.mu).collect()
    }

    #[test]
    fn membership_examples() {
        assert!(is_in_lambda_l(&rd(2), &[1, 3], 1));
        assert!(!is_in_lambda_l(&rd(2), &[2, 3], 1));
        assert!(!is_in_lambda_l(&rd(1), &[3], 0));
        assert!(is_in_lambda_l(&rd(1), &[3], -1));
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(mus(enumerate_lambda_l(&rd(1), 1, 5)), vec![vec![1], vec![3], vec![5]]);
        assert_eq!(mus(enumerate_lambda_l(&rd(1), 0, 4)), vec![vec![0], vec![2], vec![4]]);
        assert_eq!(mus(enumerate_lambda_l(&rd(2), 0, 2)), vec![vec![0, 0], vec![0, 2]]);
        let w = &enumerate_lambda_l(&rd(2), 1, 6)[0];
        assert_eq!((w.mu.clone(), w.mu0), (vec![1, 1], 1));
    }

    fn brute(n: usize, l: i64, h: i64) -> Vec<Vec<i64>> {
        let r = rd(n);
        let mut out = Vec::new();
        let mut idx = vec![0i64; n];
        loop {
            if idx.iter().sum::<i64>() <= h && is_in_lambda_l(&r, &idx, l) {
                out.push(idx.clone());
            }
            let mut k = 0;
            loop {
                if k == n {
                    sort_by_height(&mut out);
                    return out;
                }
                idx[k] += 1;
                if idx[k] <= h {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for n in 1..=3 {
            for l in -1..=3 {
                assert_eq!(mus(enumerate_lambda_l(&rd(n), l, 12)), brute(n, l, 12), "n={n} l={l}");
            }
        }
    }

    #[test]
    fn fundamental_weights_are_dual() {
        for n in 1..=4 {
            let w = fundamental_weights(&rd(n));
            for (i, beta) in simple_roots(n).iter().enumerate() {
                let bb: i64 = beta.iter().map(|x| x * x).sum();
                for (j, om) in w.iter().enumerate() {
                    let p: i64 = om.iter().zip(beta).map(|(a, b)| a * b).sum();
                    assert_eq!(p, if i == j { bb } else { 0 }, "n={n}");
                }
            }
        }
        assert_eq!(fundamental_weights(&rd(1)), vec![vec![2]]);
    }

    #[test]
    fn fundamental_weights_span_lambda0() {
        let r = rd(2);
        let w = fundamental_weights(&r);
        let mut span = Vec::new();
        for k1 in 0..=8 {
            for k2 in 0..=8 {
                let v: Vec<i64> = (0..2).map(|i| k1 * w[0][i] + k2 * w[1][i]).collect();
                if v.iter().sum::<i64>() <= 8 {
                    span.push(v);
                }
            }
        }
        sort_by_height(&mut span);
        assert_eq!(span, mus(enumerate_lambda_l(&r, 0, 8)));
    }

    #[test]
    fn lower_sets() {
        assert_eq!(lower_set(&[4]), vec![vec![0], vec![2], vec![4]]);
        assert_eq!(lower_set(&[0, 4]), vec![vec![0, 0], vec![0, 2], vec![0, 4], vec![2, 2]]);
        assert_eq!(lower_set(&[2, 2]), vec![vec![0, 0], vec![0, 2], vec![2, 2]]);
        assert!(!dominated(&[0, 4], &[2, 2]));
    }
}

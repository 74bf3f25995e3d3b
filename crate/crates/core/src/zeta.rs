//! Local cotype zeta factors, their coefficients, and the Euler products
//! built from them (corank densities, residues, θ_d, squarefree density).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::factorize;
use crate::error::{Error, Result};
use crate::euler::{euler_product, exact_product, EulerProductValue, LogBound};
use crate::groups::Partition;
use crate::poly::IntPolynomial;
use crate::qcomb::{descent_poly_inclusion_exclusion, q_binomial, DescentSet};

/// Largest `d` accepted by [`local_factor`] unless a cap is given.
pub const DEFAULT_LOCAL_FACTOR_CAP: usize = 16;

/// Euler products with a cutoff at most this also carry the exact
/// truncated product.
pub const EXACT_CUTOFF_LIMIT: u64 = 100;

/// Inner product length for the squarefree density.
pub const SQUAREFREE_INNER_TERMS: u32 = 64;

/// `Σ_λ w_{d,λ}(q) Π_{j∈λ} t_j / Π_{j=1}^{d}(1 − t_j)` with `λ` running over
/// subsets of `{1, …, d−1}`, keyed by bitmask (bit `j−1` for `j`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalFactor {
    d: usize,
    numerator: BTreeMap<u64, IntPolynomial>,
}

pub fn local_factor(d: usize) -> Result<LocalFactor> {
    local_factor_with_cap(d, DEFAULT_LOCAL_FACTOR_CAP)
}

pub fn local_factor_with_cap(d: usize, cap: usize) -> Result<LocalFactor> {
    if d == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    if d > cap {
        return Err(Error::CapExceeded {
            what: "local factor dimension",
            value: d as u64,
            cap: cap as u64,
        });
    }
    let numerator = DescentSet::all(d)
        .map(|l| (l.mask(), descent_poly_inclusion_exclusion(&l)))
        .collect();
    Ok(LocalFactor { d, numerator })
}

impl LocalFactor {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn numerator(&self) -> &BTreeMap<u64, IntPolynomial> {
        &self.numerator
    }

    pub fn term(&self, lambda: &DescentSet) -> Option<&IntPolynomial> {
        self.numerator.get(&lambda.mask())
    }

    /// Coefficient of `p^{−ν₁s₁−⋯−ν_d s_d}` read off from the series
    /// expansion in the `t_j`.
    ///
    /// The monomial `Π t_j^{e_j}` with `e_j = ν_j − ν_{j+1}` is the only one
    /// contributing; its coefficient is `Σ_{λ ⊆ supp e} w_{d,λ}(q)`. Undoing
    /// `t_j = p^{j(d−j)} p^{−(s₁+⋯+s_j)}` and `q = p^{−1}` gives the count.
    pub fn coefficient(&self, p: u64, nu: &[u32]) -> Result<BigInt> {
        let nu = check_exponents(self.d, nu)?;
        let e: Vec<u32> = (0..self.d).map(|j| nu[j] - nu.get(j + 1).copied().unwrap_or(0)).collect();
        let support: u64 = (0..self.d - 1).filter(|&j| e[j] > 0).fold(0, |m, j| m | 1 << j);
        let series: IntPolynomial = self
            .numerator
            .iter()
            .filter(|(&mask, _)| mask & !support == 0)
            .map(|(_, w)| w.clone())
            .sum();
        let shift: u64 = (1..=self.d).map(|j| e[j - 1] as u64 * (j * (self.d - j)) as u64).sum();
        let pinv = BigRational::new(BigInt::one(), BigInt::from(p));
        let pe = num_traits::pow(BigInt::from(p), shift as usize);
        let value = series.eval(&pinv) * BigRational::from_integer(pe);
        if !value.is_integer() {
            return Err(Error::Internal(format!("series coefficient {value} is not an integer")));
        }
        Ok(value.to_integer())
    }
}

fn fmt_monomial(mask: u64) -> String {
    let vars: Vec<String> = (0..64).filter(|j| mask >> j & 1 == 1).map(|j| format!("t{}", j + 1)).collect();
    vars.join("·")
}

impl fmt::Display for LocalFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .numerator
            .iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(&mask, w)| {
                if mask == 0 {
                    w.to_string()
                } else if w.is_one() {
                    fmt_monomial(mask)
                } else if w.term_count() == 1 {
                    format!("{w}·{}", fmt_monomial(mask))
                } else {
                    format!("({w})·{}", fmt_monomial(mask))
                }
            })
            .collect();
        if terms.len() == 1 {
            write!(f, "{}", terms[0])?;
        } else {
            write!(f, "({})", terms.join(" + "))?;
        }
        f.write_str(" / ")?;
        let den: Vec<String> = (1..=self.d).map(|j| format!("(1−t{j})")).collect();
        if self.d == 1 {
            write!(f, "{}", den[0])
        } else {
            write!(f, "({})", den.concat())
        }
    }
}

/// Pads `ν` with zeros to length `d` and checks it is weakly decreasing.
fn check_exponents(d: usize, nu: &[u32]) -> Result<Vec<u32>> {
    if nu.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::NotWeaklyDecreasing(nu.to_vec()));
    }
    if nu.len() > d {
        if nu[d..].iter().any(|&x| x != 0) {
            return Err(Error::Invalid(format!("exponent tuple {nu:?} is longer than d = {d}")));
        }
        return Ok(nu[..d].to_vec());
    }
    let mut v = nu.to_vec();
    v.resize(d, 0);
    Ok(v)
}

/// Number of sublattices of `ℤ^d` with cotype `(p^{ν₁}, …, p^{ν_d})`:
/// `Π_{i≥1} p^{ν′_{i+1}(d−ν′_i)} [d−ν′_{i+1} choose ν′_i−ν′_{i+1}]_p`.
pub fn local_coefficient(d: usize, p: u64, nu: &[u32]) -> Result<BigInt> {
    if d == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    let nu = check_exponents(d, nu)?;
    let conj = Partition::from_unsorted(nu).conjugate();
    let pb = BigInt::from(p);
    let mut acc = BigInt::one();
    for i in 1..=conj.rank() {
        let (a, b) = (conj.part(i) as usize, conj.part(i + 1) as usize);
        acc *= num_traits::pow(pb.clone(), b * (d - a));
        acc *= q_binomial(d - b, (a - b) as i64).eval_int(&pb);
    }
    Ok(acc)
}

/// Number of sublattices of `ℤ^d` of index `n`, multiplied together from
/// the local coefficients at each prime power dividing `n`.
pub fn dirichlet_coefficient(d: usize, n: u64) -> Result<BigInt> {
    if d == 0 || n == 0 {
        return Err(Error::Domain("d and n must be positive".into()));
    }
    let mut acc = BigInt::one();
    for (p, e) in factorize(n) {
        let mut local = BigInt::zero();
        for nu in Partition::of_size(e).into_iter().filter(|l| l.rank() <= d) {
            local += local_coefficient(d, p, nu.parts())?;
        }
        acc *= local;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Exact p-local factors

fn check_corank(d: usize, m: usize, allow_zero: bool) -> Result<()> {
    let lo = usize::from(!allow_zero);
    if d == 0 || m < lo || m > d {
        return Err(Error::Domain(format!("need {lo} ≤ m ≤ d with d ≥ 1, got d = {d}, m = {m}")));
    }
    Ok(())
}

fn rat_pinv(p: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(p))
}

/// `Π_{j=from}^{to}(1 − p^{−j})`
fn phi_product(p: u64, from: usize, to: usize) -> BigRational {
    let x = rat_pinv(p);
    let one = BigRational::one();
    (from..=to).map(|j| &one - num_traits::pow(x.clone(), j)).fold(BigRational::one(), |a, b| a * b)
}

/// `Σ_{i=0}^{m} [d choose i]_{1/p} p^{−i²} / Π_{j=1}^{i}(1 − p^{−j})`
fn corank_sum(d: usize, m: usize, p: u64) -> BigRational {
    let x = rat_pinv(p);
    (0..=m)
        .map(|i| q_binomial(d, i as i64).eval(&x) * num_traits::pow(x.clone(), i * i) / phi_product(p, 1, i))
        .fold(BigRational::zero(), |a, b| a + b)
}

/// p-factor of the density of sublattices of corank at most `m`:
/// `Π_{j=1}^{d}(1 − p^{−j}) Σ_{i=0}^{m} [d choose i]_{1/p} p^{−i²} / Π_{j≤i}(1 − p^{−j})`.
pub fn corank_density_p_factor(d: usize, m: usize, p: u64) -> Result<BigRational> {
    check_corank(d, m, true)?;
    Ok(phi_product(p, 1, d) * corank_sum(d, m, p))
}

/// p-local factor of the corank-`m` residue at `s = d`:
/// `(1 − p^{−1}) Σ_{i=0}^{m} [d choose i]_{1/p} p^{−i²} / Π_{j≤i}(1 − p^{−j})`.
pub fn corank_local_factor_at_pole(d: usize, m: usize, p: u64) -> Result<BigRational> {
    check_corank(d, m, false)?;
    Ok(phi_product(p, 1, 1) * corank_sum(d, m, p))
}

/// `Z_d(p, m) = [p,d] Σ_{i=0}^{m} p^{−i²} [p,d] / ([p,i]² [p,d−i])` with
/// `[p,n] = Π_{j=1}^{n}(1 − p^{−j})`: the chance that a uniform `d × d`
/// matrix over `𝔽_p` has corank at most `m`.
pub fn stanley_wang_zd(d: usize, p: u64, m: usize) -> Result<BigRational> {
    check_corank(d, m, true)?;
    let x = rat_pinv(p);
    let pd = phi_product(p, 1, d);
    let sum = (0..=m)
        .map(|i| {
            let pi = phi_product(p, 1, i);
            num_traits::pow(x.clone(), i * i) * &pd / (&pi * &pi * phi_product(p, 1, d - i))
        })
        .fold(BigRational::zero(), |a, b| a + b);
    Ok(pd * sum)
}

/// `1 + (p^{d−1} − 1) / (p^{d+1} − p^d)`
pub fn theta_p_factor(d: usize, p: u64) -> Result<BigRational> {
    if d < 2 {
        return Err(Error::Domain(format!("θ_d needs d ≥ 2, got {d}")));
    }
    let pb = BigInt::from(p);
    let num = num_traits::pow(pb.clone(), d - 1) - 1u32;
    let den = num_traits::pow(pb.clone(), d + 1) - num_traits::pow(pb, d);
    Ok(BigRational::one() + BigRational::new(num, den))
}

/// `Π_{j=2}^{terms}(1 − p^{−j})`
pub fn squarefree_p_factor(p: u64, terms: u32) -> BigRational {
    phi_product(p, 2, terms as usize)
}

// ---------------------------------------------------------------------------
// Floating p-local logs
//
// Each is assembled from `ln_1p` of small pieces, so the error in a single
// log is a few ulps of the pieces rather than of 1.

fn log_phi(x: f64, from: usize, to: usize) -> f64 {
    (from..=to).map(|j| (-x.powi(j as i32)).ln_1p()).sum()
}

fn log_corank_sum(d: usize, m: usize, x: f64) -> f64 {
    let mut s = 0.0;
    let mut binom = 1.0;
    let mut phi = 1.0;
    for i in 1..=m {
        binom *= (1.0 - x.powi((d - i + 1) as i32)) / (1.0 - x.powi(i as i32));
        phi *= 1.0 - x.powi(i as i32);
        s += binom * x.powi((i * i) as i32) / phi;
    }
    s.ln_1p()
}

// Bounds on |log f(p)| for p > 5, checked numerically in the tests below.
const DENSITY_BOUND: LogBound = LogBound { c: 4.0, s: 4.0 };
const PHI2_BOUND: LogBound = LogBound { c: 1.3, s: 2.0 };
const THETA_BOUND: LogBound = LogBound { c: 1.3, s: 2.0 };

fn attach_exact<F>(mut v: EulerProductValue, factor: F) -> Result<EulerProductValue>
where
    F: Fn(u64) -> Result<BigRational>,
{
    if v.prime_cutoff <= EXACT_CUTOFF_LIMIT {
        v.exact_rational = Some(exact_product(v.prime_cutoff, factor)?);
    }
    Ok(v)
}

/// Proportion of sublattices of `ℤ^d` with corank at most `m`.
pub fn corank_density(d: usize, m: usize, cutoff: u64) -> Result<EulerProductValue> {
    check_corank(d, m, false)?;
    if m == d {
        // every p-factor is exactly 1
        let mut v = euler_product(cutoff, &[], |_| 0.0)?;
        v.tail_bound = 0.0;
        return attach_exact(v, |_| Ok(BigRational::one()));
    }
    let v = euler_product(cutoff, &[DENSITY_BOUND], |p| {
        let x = 1.0 / p as f64;
        log_phi(x, 1, d) + log_corank_sum(d, m, x)
    })?;
    attach_exact(v, |p| corank_density_p_factor(d, m, p))
}

/// Residue at `s = d` of the zeta function counting sublattices of corank
/// at most `m`.
pub fn corank_zeta_residue(d: usize, m: usize, cutoff: u64) -> Result<EulerProductValue> {
    check_corank(d, m, false)?;
    let bounds: &[LogBound] = if m == d { &[PHI2_BOUND] } else { &[DENSITY_BOUND, PHI2_BOUND] };
    let v = euler_product(cutoff, bounds, |p| {
        let x = 1.0 / p as f64;
        (-x).ln_1p() + log_corank_sum(d, m, x)
    })?;
    attach_exact(v, |p| corank_local_factor_at_pole(d, m, p))
}

/// `θ_d = Π_p (1 + (p^{d−1} − 1)/(p^{d+1} − p^d))`
pub fn theta_d(d: usize, cutoff: u64) -> Result<EulerProductValue> {
    if d < 2 {
        return Err(Error::Domain(format!("θ_d needs d ≥ 2, got {d}")));
    }
    let v = euler_product(cutoff, &[THETA_BOUND], |p| {
        let x = 1.0 / p as f64;
        // (p^{d−1} − 1)/(p^d (p − 1)) = x² (1 − x^{d−1}) / (1 − x)
        let c = x * x * (1.0 - x.powi(d as i32 - 1)) / (1.0 - x);
        c.ln_1p()
    })?;
    attach_exact(v, |p| theta_p_factor(d, p))
}

/// `Π_{j=2}^{64}(1 − p^{−j})` in floating point.
pub fn squarefree_local_factor(p: u64) -> f64 {
    log_phi(1.0 / p as f64, 2, SQUAREFREE_INNER_TERMS as usize).exp()
}

/// Density of sublattices of squarefree index among all sublattices,
/// `Π_p Π_{j≥2}(1 − p^{−j})`, with the inner product cut at `j = 64`.
pub fn squarefree_density(cutoff: u64) -> Result<EulerProductValue> {
    let n = SQUAREFREE_INNER_TERMS as usize;
    let mut v = euler_product(cutoff, &[PHI2_BOUND], |p| log_phi(1.0 / p as f64, 2, n))?;
    // dropped j > 64, over every prime: Σ_p 2 p^{−65} ≤ 4 · 2^{−65}
    let inner = 4.0 * 2f64.powi(-65);
    v.tail_bound += v.value * inner.exp_m1();
    attach_exact(v, |p| Ok(squarefree_p_factor(p, SQUAREFREE_INNER_TERMS)))
}

/// Spot values of the exact p-factors, for reports.
#[derive(Clone, Debug, Serialize)]
pub struct PFactorSpot {
    pub p: u64,
    #[serde(serialize_with = "crate::serde_util::rational_str")]
    pub exact: BigRational,
    pub value: f64,
}

pub fn stanley_wang_spots(d: usize, m: usize, primes: &[u64]) -> Result<Vec<PFactorSpot>> {
    primes
        .iter()
        .map(|&p| {
            let exact = stanley_wang_zd(d, p, m)?;
            let value = num_traits::ToPrimitive::to_f64(&exact).unwrap_or(f64::NAN);
            Ok(PFactorSpot { p, exact, value })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::divisors;
    use num_traits::ToPrimitive;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn local_factor_display() {
        assert_eq!(local_factor(1).unwrap().to_string(), "1 / (1−t1)");
        assert_eq!(local_factor(2).unwrap().to_string(), "(1 + q·t1) / ((1−t1)(1−t2))");
        let lf3 = local_factor(3).unwrap();
        assert_eq!(lf3.numerator().len(), 4);
        assert!(matches!(local_factor_with_cap(5, 4), Err(Error::CapExceeded { .. })));
        assert!(local_factor(0).is_err());
    }

    #[test]
    fn d3_numerator() {
        // w_{3,{1}} = q + q², w_{3,{2}} = q + q², w_{3,{1,2}} = q³
        let lf = local_factor(3).unwrap();
        let n = lf.numerator();
        assert_eq!(n[&0b01], IntPolynomial::from_i64s(&[0, 1, 1]));
        assert_eq!(n[&0b10], IntPolynomial::from_i64s(&[0, 1, 1]));
        assert_eq!(n[&0b11], IntPolynomial::from_i64s(&[0, 0, 0, 1]));
    }

    #[test]
    fn coefficient_examples() {
        for d in 1..6 {
            assert_eq!(local_coefficient(d, 2, &[]).unwrap(), BigInt::one());
        }
        for p in [2u64, 3, 5, 7] {
            assert_eq!(local_coefficient(2, p, &[1, 0]).unwrap(), BigInt::from(p + 1));
        }
        assert!(matches!(local_coefficient(3, 2, &[0, 1]), Err(Error::NotWeaklyDecreasing(_))));
        // ℤ² ⊇ 2ℤ² is the only sublattice of cotype (2,2)
        assert_eq!(local_coefficient(2, 2, &[1, 1]).unwrap(), BigInt::one());
    }

    #[test]
    fn series_matches_product_formula() {
        for d in 1..=5 {
            let lf = local_factor(d).unwrap();
            for p in [2u64, 3, 5] {
                for n in 0..=5 {
                    for nu in Partition::of_size(n).into_iter().filter(|l| l.rank() <= d) {
                        assert_eq!(
                            lf.coefficient(p, nu.parts()).unwrap(),
                            local_coefficient(d, p, nu.parts()).unwrap(),
                            "d={d} p={p} nu={nu}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn dirichlet_matches_divisor_sums() {
        // d = 2: σ(n); d = 3: Σ_{ab | n} b · (n/(ab))² style convolution
        for n in 1..200u64 {
            let sigma: u64 = divisors(n).iter().sum();
            assert_eq!(dirichlet_coefficient(2, n).unwrap(), BigInt::from(sigma));
        }
        assert_eq!(dirichlet_coefficient(3, 2).unwrap(), BigInt::from(7));
        assert_eq!(dirichlet_coefficient(2, 6).unwrap(), BigInt::from(12));
        assert_eq!(dirichlet_coefficient(5, 1).unwrap(), BigInt::one());
        let table = crate::arith::sublattice_count_table(4, 300);
        for n in 1..300u64 {
            assert_eq!(dirichlet_coefficient(4, n).unwrap(), BigInt::from(table[n as usize]));
        }
    }

    #[test]
    fn pole_factor_examples() {
        for p in [2u64, 3, 5, 7] {
            let v = corank_local_factor_at_pole(2, 1, p).unwrap();
            let pp = (p * p) as i64;
            assert_eq!(v, rat(pp + 1, pp));
            assert_eq!(corank_local_factor_at_pole(3, 1, p).unwrap(), theta_p_factor(3, p).unwrap());
        }
        assert_eq!(theta_p_factor(3, 2).unwrap(), rat(11, 8));
        assert!(corank_local_factor_at_pole(3, 0, 2).is_err());
        assert!(corank_local_factor_at_pole(3, 4, 2).is_err());
    }

    #[test]
    fn full_rank_density_factor_is_one() {
        for d in 1..=6 {
            for p in [2u64, 3, 5] {
                assert_eq!(corank_density_p_factor(d, d, p).unwrap(), BigRational::one());
                assert_eq!(stanley_wang_zd(d, p, d).unwrap(), BigRational::one());
            }
        }
    }

    #[test]
    fn stanley_wang_small() {
        assert_eq!(stanley_wang_zd(2, 2, 1).unwrap(), rat(15, 16));
        assert_eq!(stanley_wang_zd(2, 2, 1).unwrap(), corank_density_p_factor(2, 1, 2).unwrap());
        assert_eq!(stanley_wang_zd(3, 3, 2).unwrap(), corank_density_p_factor(3, 2, 3).unwrap());
        // corank 0 is the chance of an invertible matrix
        assert_eq!(stanley_wang_zd(2, 2, 0).unwrap(), rat(3, 8));
    }

    #[test]
    fn log_bounds_hold() {
        for p in crate::arith::primes_up_to(400).into_iter().filter(|&p| p > 5) {
            let x = 1.0 / p as f64;
            for d in 2..=30 {
                for m in 1..d {
                    let l = log_phi(x, 1, d) + log_corank_sum(d, m, x);
                    assert!(l.abs() <= DENSITY_BOUND.c * x.powf(DENSITY_BOUND.s), "p={p} d={d} m={m}");
                }
                let l = log_phi(x, 2, d);
                assert!(l.abs() <= PHI2_BOUND.c * x * x);
                let t = theta_p_factor(d, p).unwrap().to_f64().unwrap().ln();
                assert!(t.abs() <= THETA_BOUND.c * x * x);
            }
        }
    }

    #[test]
    fn theta_two_is_zeta_ratio() {
        let v = theta_d(2, 100_000).unwrap();
        let truth = 15.0 / std::f64::consts::PI.powi(2);
        assert!(v.contains(truth), "{v:?}");
        let r = corank_zeta_residue(2, 1, 100_000).unwrap();
        assert!((r.value - v.value).abs() <= r.tail_bound + v.tail_bound + 1e-12);
    }

    #[test]
    fn full_residue_is_zeta_two() {
        let v = corank_zeta_residue(2, 2, 100_000).unwrap();
        assert!(v.contains(std::f64::consts::PI.powi(2) / 6.0), "{v:?}");
    }

    #[test]
    fn density_full_rank_is_one() {
        let v = corank_density(4, 4, 1000).unwrap();
        assert_eq!(v.value, 1.0);
        assert_eq!(v.tail_bound, 0.0);
    }

    #[test]
    fn exact_attached_for_small_cutoff() {
        let v = corank_density(3, 1, 7).unwrap();
        let e = v.exact_rational.clone().unwrap();
        assert!((e.to_f64().unwrap() - v.value).abs() < 1e-14);
        let expected: BigRational = [2u64, 3, 5, 7].iter().map(|&p| corank_density_p_factor(3, 1, p).unwrap()).product();
        assert_eq!(e, expected);
        assert!(corank_density(3, 1, 1000).unwrap().exact_rational.is_none());
    }

    #[test]
    fn squarefree_values() {
        assert!((squarefree_local_factor(2) - 0.5776).abs() < 1e-4);
        let a = squarefree_density(1_000).unwrap();
        let b = squarefree_density(10_000).unwrap();
        assert!(b.value < a.value);
        assert!(a.contains(b.value));
    }

    #[test]
    fn domain_errors() {
        assert!(corank_density(3, 0, 100).is_err());
        assert!(corank_density(3, 4, 100).is_err());
        assert!(theta_d(1, 100).is_err());
        assert!(stanley_wang_zd(3, 2, 4).is_err());
        assert!(corank_density(3, 1, 2).is_err());
    }
}

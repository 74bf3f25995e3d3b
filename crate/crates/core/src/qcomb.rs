//! q-analogues and permutation descent polynomials.
//!
//! Everything here lives in ℤ[q]. The descent polynomials `w_{d,λ}(q)` are
//! the numerator coefficients of the local cotype zeta factor, and they are
//! computed three independent ways (subset inclusion-exclusion, permutation
//! enumeration, and a determinant of q-binomials) so that each route can
//! check the others.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::IntPolynomial;

/// Largest `d` for which [`descent_poly_permutations`] will walk all of `S_d`.
pub const DEFAULT_PERMUTATION_CAP: usize = 9;

/// `[n]_q = 1 + q + … + q^{n−1}`
pub fn q_int(n: usize) -> IntPolynomial {
    IntPolynomial::from_coeffs(vec![BigInt::one(); n])
}

/// `[n]_q! = [n]_q [n−1]_q ⋯ [2]_q`
pub fn q_factorial(n: usize) -> IntPolynomial {
    (2..=n).map(q_int).product()
}

/// Gaussian binomial `[n choose k]_q`; zero when `k < 0` or `k > n`.
///
/// Computed as a quotient of q-factorials. The division is exact in ℤ[q];
/// a remainder would mean an arithmetic bug, and panics.
pub fn q_binomial(n: usize, k: i64) -> IntPolynomial {
    try_q_binomial(n, k).expect("q-factorial quotient must be exact")
}

pub fn try_q_binomial(n: usize, k: i64) -> Result<IntPolynomial> {
    if k < 0 || k as usize > n {
        return Ok(IntPolynomial::zero());
    }
    let k = k as usize;
    let k = k.min(n - k);
    // [n]!/([k]![n-k]!) = ([n][n-1]…[n-k+1]) / [k]!
    let num: IntPolynomial = (n - k + 1..=n).map(q_int).product();
    num.div_exact(&q_factorial(k))
}

/// `[m₁+⋯+m_k]_q! / ([m₁]_q! ⋯ [m_k]_q!)`
pub fn q_multinomial(parts: &[usize]) -> IntPolynomial {
    let total: usize = parts.iter().sum();
    let den: IntPolynomial = parts.iter().map(|&m| q_factorial(m)).product();
    q_factorial(total)
        .div_exact(&den)
        .expect("q-multinomial quotient must be exact")
}

/// A set `λ ⊆ {1, …, d−1}` stored strictly decreasing, `λ₁ > λ₂ > … > λ_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DescentSet {
    d: usize,
    elements: Vec<usize>,
}

impl DescentSet {
    /// Accepts elements in any order; duplicates and out-of-range values are
    /// rejected.
    pub fn new(d: usize, elements: &[usize]) -> Result<Self> {
        if d == 0 {
            return Err(Error::Invalid("ambient dimension must be positive".into()));
        }
        let mut e = elements.to_vec();
        e.sort_unstable_by(|a, b| b.cmp(a));
        if e.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid(format!("repeated element in {elements:?}")));
        }
        if let Some(&bad) = e.iter().find(|&&x| x == 0 || x >= d) {
            return Err(Error::Invalid(format!(
                "descent {bad} outside 1..={} for d = {d}",
                d - 1
            )));
        }
        Ok(Self { d, elements: e })
    }

    pub fn empty(d: usize) -> Self {
        Self {
            d,
            elements: Vec::new(),
        }
    }

    /// Bit `j−1` of `mask` set means `j ∈ λ`.
    pub fn from_mask(d: usize, mask: u64) -> Self {
        let elements = (1..d).rev().filter(|j| mask >> (j - 1) & 1 == 1).collect();
        Self { d, elements }
    }

    pub fn mask(&self) -> u64 {
        self.elements.iter().fold(0, |m, j| m | 1 << (j - 1))
    }

    /// All `2^{d−1}` subsets of `{1, …, d−1}`, in mask order.
    pub fn all(d: usize) -> impl Iterator<Item = DescentSet> {
        let n = if d == 0 { 0 } else { 1u64 << (d - 1) };
        (0..n).map(move |m| DescentSet::from_mask(d, m))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Gap vector `(m₀, …, m_k)` with `λ₀ = d`, `λ_{k+1} = 0`.
    pub fn gaps(&self) -> Vec<usize> {
        gaps(self.d, &self.elements)
    }

    /// Subsets `μ ⊆ λ`.
    pub fn subsets(&self) -> impl Iterator<Item = DescentSet> + '_ {
        let k = self.elements.len();
        (0..1u64 << k).map(move |bits| DescentSet {
            d: self.d,
            elements: (0..k)
                .filter(|i| bits >> i & 1 == 1)
                .map(|i| self.elements[i])
                .collect(),
        })
    }
}

impl fmt::Display for DescentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

fn gaps(d: usize, decreasing: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(decreasing.len() + 1);
    let mut prev = d;
    for &x in decreasing.iter().chain(std::iter::once(&0)) {
        out.push(prev - x);
        prev = x;
    }
    out
}

/// `⟮d over λ⟯` for a strictly decreasing `λ ⊆ {1, …, d}`. Unlike
/// [`DescentSet`] this admits `d` itself, which the corank identities need.
fn q_binom_gaps(d: usize, decreasing: &[usize]) -> IntPolynomial {
    if decreasing.is_empty() {
        return IntPolynomial::one();
    }
    q_multinomial(&gaps(d, decreasing))
}

/// `⟮d over λ⟯`: the q-multinomial of the gap vector, and 1 for `λ = ∅`.
pub fn q_binom_subset(lambda: &DescentSet) -> IntPolynomial {
    q_binom_gaps(lambda.d, &lambda.elements)
}

/// A permutation of `{1, …, d}` in one-line notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d + 1];
        for &x in &images {
            if x == 0 || x > d || seen[x] {
                return Err(Error::Invalid(format!("{images:?} is not a permutation of 1..={d}")));
            }
            seen[x] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            images: (1..=d).collect(),
        }
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Advance to the lexicographically next permutation; `false` after the last.
    pub fn next_lex(&mut self) -> bool {
        next_permutation(&mut self.images)
    }
}

fn next_permutation(a: &mut [usize]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// `D′(π) = { i : π(i) > π(i+1) }`
pub fn descents(pi: &Permutation) -> DescentSet {
    let d = pi.len();
    DescentSet::from_mask(d, descent_mask(&pi.images))
}

fn descent_mask(images: &[usize]) -> u64 {
    images
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] > w[1])
        .fold(0, |m, (i, _)| m | 1 << i)
}

/// Number of pairs `i < j` with `π(i) > π(j)`.
pub fn inversions(pi: &Permutation) -> usize {
    count_inversions(&pi.images)
}

fn count_inversions(a: &[usize]) -> usize {
    let mut inv = 0;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if a[i] > a[j] {
                inv += 1;
            }
        }
    }
    inv
}

/// `w_{d,λ}(q) = Σ_{μ⊆λ} (−1)^{|λ|−|μ|} ⟮d over μ⟯`
pub fn descent_poly_inclusion_exclusion(lambda: &DescentSet) -> IntPolynomial {
    let mut acc = IntPolynomial::zero();
    for mu in lambda.subsets() {
        let term = q_binom_subset(&mu);
        if (lambda.len() - mu.len()) % 2 == 0 {
            acc += &term;
        } else {
            acc -= &term;
        }
    }
    acc
}

/// `w_{d,λ}(q) = Σ_{π ∈ S_d, D′(π) = λ} q^{inv(π)}`, by walking all of `S_d`.
pub fn descent_poly_permutations(lambda: &DescentSet, cap: usize) -> Result<IntPolynomial> {
    let d = lambda.d;
    if d > cap {
        return Err(Error::CapExceeded {
            what: "d (permutation enumeration)",
            value: d as u64,
            cap: cap as u64,
        });
    }
    let target = lambda.mask();
    let mut counts: Vec<i64> = Vec::new();
    let mut images: Vec<usize> = (1..=d).collect();
    loop {
        if descent_mask(&images) == target {
            let inv = count_inversions(&images);
            if counts.len() <= inv {
                counts.resize(inv + 1, 0);
            }
            counts[inv] += 1;
        }
        if !next_permutation(&mut images) {
            break;
        }
    }
    Ok(IntPolynomial::from_i64s(&counts))
}

/// Inversion generating functions for every descent class of `S_d` in one
/// pass, keyed by descent mask.
pub fn descent_polys_all_permutations(d: usize, cap: usize) -> Result<BTreeMap<u64, IntPolynomial>> {
    if d > cap {
        return Err(Error::CapExceeded {
            what: "d (permutation enumeration)",
            value: d as u64,
            cap: cap as u64,
        });
    }
    let mut counts: BTreeMap<u64, Vec<i64>> = BTreeMap::new();
    let mut images: Vec<usize> = (1..=d).collect();
    loop {
        let inv = count_inversions(&images);
        let v = counts.entry(descent_mask(&images)).or_default();
        if v.len() <= inv {
            v.resize(inv + 1, 0);
        }
        v[inv] += 1;
        if !next_permutation(&mut images) {
            break;
        }
    }
    Ok(counts
        .into_iter()
        .map(|(m, c)| (m, IntPolynomial::from_i64s(&c)))
        .collect())
}

/// `w_{d,λ}(q) = det( ⟮d−λ_{i+1} over λ_j−λ_{i+1}⟯ )_{0≤i,j≤k}` with
/// `λ₀ = d`, `λ_{k+1} = 0`.
pub fn descent_poly_determinant(lambda: &DescentSet) -> IntPolynomial {
    let d = lambda.d;
    let mut ext = Vec::with_capacity(lambda.len() + 2);
    ext.push(d);
    ext.extend_from_slice(&lambda.elements);
    ext.push(0);
    let k = lambda.len();
    let mut m: Vec<Vec<IntPolynomial>> = (0..=k)
        .map(|i| {
            (0..=k)
                .map(|j| q_binomial(d - ext[i + 1], ext[j] as i64 - ext[i + 1] as i64))
                .collect()
        })
        .collect();
    bareiss_determinant(&mut m)
}

/// Fraction-free Gaussian elimination over ℤ[q]. Destroys `m`.
pub fn bareiss_determinant(m: &mut [Vec<IntPolynomial>]) -> IntPolynomial {
    let n = m.len();
    if n == 0 {
        return IntPolynomial::one();
    }
    let mut negate = false;
    let mut prev = IntPolynomial::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return IntPolynomial::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                m[i][j] = num
                    .div_exact(&prev)
                    .expect("Bareiss quotients are exact in an integral domain");
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// Both sides of `Σ_{k=0}^{n} ⟮n,k⟯ q^{k²+ek} Π_{j=k+1+e}^{n+e}(1−q^j) = 1`.
pub fn lemma_qid_sides(n: usize, e: usize) -> (IntPolynomial, IntPolynomial) {
    let mut lhs = IntPolynomial::zero();
    for k in 0..=n {
        let tail: IntPolynomial = (k + 1 + e..=n + e).map(IntPolynomial::one_minus_q_pow).product();
        let term = &q_binomial(n, k as i64).shift(k * k + e * k) * &tail;
        lhs += &term;
    }
    (lhs, IntPolynomial::one())
}

pub fn verify_lemma_qid(n: usize, e: usize) -> bool {
    let (l, r) = lemma_qid_sides(n, e);
    l == r
}

/// Both sides of
/// `Σ_{μ⊆{1..i−1}} ⟮d over μ∪{i}⟯ Π_{j∈μ} q^{j²} Π_{j∉μ}(1−q^{j²})
///  = ⟮d,i⟯ Π_{j=1}^{i} (1−q^{j²})/(1−q^j)`.
pub fn lemma_qid2_sides(d: usize, i: usize) -> Result<(IntPolynomial, IntPolynomial)> {
    if i < 1 || i > d {
        return Err(Error::Domain(format!("need 1 <= i <= d, got i = {i}, d = {d}")));
    }
    let below = i - 1;
    let mut lhs = IntPolynomial::zero();
    for bits in 0u64..1 << below {
        let mut set = vec![i];
        let mut weight = IntPolynomial::one();
        for j in (1..=below).rev() {
            if bits >> (j - 1) & 1 == 1 {
                set.push(j);
                weight = weight.shift(j * j);
            } else {
                weight = &weight * &IntPolynomial::one_minus_q_pow(j * j);
            }
        }
        lhs += &(&q_binom_gaps(d, &set) * &weight);
    }
    let num: IntPolynomial = (1..=i).map(|j| IntPolynomial::one_minus_q_pow(j * j)).product();
    let den: IntPolynomial = (1..=i).map(IntPolynomial::one_minus_q_pow).product();
    let rhs = &q_binomial(d, i as i64) * &num.div_exact(&den)?;
    Ok((lhs, rhs))
}

pub fn verify_lemma_qid2(d: usize, i: usize) -> Result<bool> {
    let (l, r) = lemma_qid2_sides(d, i)?;
    Ok(l == r)
}

//! Sublattices of ℤ^d: Hermite normal form enumeration, Smith normal form,
//! and exact cotype tallies.
//!
//! A full-rank sublattice is stored by its unique upper-triangular column
//! basis: positive diagonal, and each entry above the diagonal in row `i`
//! reduced into `[0, a_ii)`. Enumerating those matrices for every ordered
//! factorization `n = a₁ ⋯ a_d` lists each sublattice of index `n` exactly
//! once; there are `Π a_i^{d−i}` of them per diagonal.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{ordered_factorizations, sublattice_count_table, valuation};
use crate::error::{Error, Result};
use crate::finite::{count_tuples, ExplicitGroup};
use crate::groups::{generating_tuples_closed_form, Partition};

/// Default ceiling on the number of matrices one enumeration may visit.
pub const DEFAULT_MATRIX_CAP: u64 = 100_000_000;

/// Largest ambient dimension the enumerator supports.
pub const MAX_ENUM_DIM: usize = 6;

// ---------------------------------------------------------------------------
// Smith normal form

/// Invariant factors `s₁ | s₂ | ⋯ | s_r` (all positive) and the number of
/// zero diagonal entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SmithForm {
    #[serde(serialize_with = "bigints_str")]
    pub diag: Vec<BigInt>,
    pub free_rank: usize,
}

fn bigints_str<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// Type of the p-Sylow subgroup of the torsion part of the cokernel.
    pub fn p_part(&self, p: u64) -> Partition {
        let p = BigInt::from(p);
        let parts = self
            .diag
            .iter()
            .map(|s| {
                let mut s = s.clone();
                let mut e = 0;
                while (&s % &p).is_zero() {
                    s /= &p;
                    e += 1;
                }
                e
            })
            .collect();
        Partition::from_unsorted(parts)
    }
}

/// Diagonalizes the `rows × cols` row-major matrix `a` in place by unimodular
/// row and column operations, pivoting on the smallest nonzero entry. On
/// return `a[t][t]` for `t < rank` are positive with `a[t][t] | a[t+1][t+1]`;
/// the return value is the rank.
///
/// With `modulus = Some(D)`, entries are reduced mod `D` as they are formed.
/// That is only sound when `D·ℤ^rows` lies in the column span (e.g. `D` a
/// multiple of the determinant of a nonsingular square matrix); the caller
/// then reads the invariant factors as `gcd(a[t][t], D)`, and `D` for any
/// diagonal position past the returned rank.
pub fn snf_in_place<T>(a: &mut [T], rows: usize, cols: usize, modulus: Option<&T>) -> usize
where
    T: Integer + Signed + Clone,
{
    assert_eq!(a.len(), rows * cols);
    let n = rows.min(cols);
    let reduce = |x: &mut T| {
        if let Some(m) = modulus {
            *x = x.clone() % m.clone();
        }
    };
    let mut t = 0;
    while t < n {
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let v = &a[i * cols + j];
                if !v.is_zero() && best.is_none_or(|(bi, bj)| v.abs() < a[bi * cols + bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        swap_rows(a, cols, t, pi);
        swap_cols(a, rows, cols, t, pj);
        loop {
            let piv = a[t * cols + t].clone();
            let mut leftover = None;
            for i in t + 1..rows {
                if a[i * cols + t].is_zero() {
                    continue;
                }
                let q = a[i * cols + t].clone() / piv.clone();
                for j in t..cols {
                    let sub = q.clone() * a[t * cols + j].clone();
                    let x = &mut a[i * cols + j];
                    *x = x.clone() - sub;
                    reduce(x);
                }
                if !a[i * cols + t].is_zero() {
                    leftover = Some((i, t));
                }
            }
            for j in t + 1..cols {
                if a[t * cols + j].is_zero() {
                    continue;
                }
                let q = a[t * cols + j].clone() / piv.clone();
                for i in t..rows {
                    let sub = q.clone() * a[i * cols + t].clone();
                    let x = &mut a[i * cols + j];
                    *x = x.clone() - sub;
                    reduce(x);
                }
                if !a[t * cols + j].is_zero() {
                    leftover = Some((t, j));
                }
            }
            if let Some((i, j)) = leftover {
                // a remainder smaller than the pivot: make it the pivot
                if i != t {
                    swap_rows(a, cols, t, i);
                } else {
                    swap_cols(a, rows, cols, t, j);
                }
                continue;
            }
            let bad_row = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !(a[i * cols + j].clone() % piv.clone()).is_zero())
            });
            match bad_row {
                Some(i) => {
                    for j in t..cols {
                        let add = a[i * cols + j].clone();
                        let x = &mut a[t * cols + j];
                        *x = x.clone() + add;
                        reduce(x);
                    }
                }
                None => break,
            }
        }
        if a[t * cols + t].is_negative() {
            a[t * cols + t] = -a[t * cols + t].clone();
        }
        if a[t * cols + t].is_zero() {
            // only reachable under a modulus: the pivot vanished mod D
            break;
        }
        t += 1;
    }
    t
}

fn swap_rows<T>(a: &mut [T], cols: usize, r1: usize, r2: usize) {
    if r1 != r2 {
        for j in 0..cols {
            a.swap(r1 * cols + j, r2 * cols + j);
        }
    }
}

fn swap_cols<T>(a: &mut [T], rows: usize, cols: usize, c1: usize, c2: usize) {
    if c1 != c2 {
        for i in 0..rows {
            a.swap(i * cols + c1, i * cols + c2);
        }
    }
}

/// Smith normal form of an integer matrix (any shape, any rank).
pub fn smith_normal_form(m: &[Vec<BigInt>]) -> Result<SmithForm> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::Invalid("ragged matrix".into()));
    }
    let mut a: Vec<BigInt> = m.iter().flatten().cloned().collect();
    let rank = snf_in_place(&mut a, rows, cols, None);
    let diag = (0..rank).map(|t| a[t * cols + t].clone()).collect();
    Ok(SmithForm {
        diag,
        free_rank: rows.min(cols) - rank,
    })
}

/// Smith normal form of a square `i128` matrix given row-major.
pub fn smith_normal_form_i128(m: &[i128], d: usize) -> SmithForm {
    let mut a = m.to_vec();
    let rank = snf_in_place(&mut a, d, d, None);
    SmithForm {
        diag: (0..rank).map(|t| BigInt::from(a[t * d + t])).collect(),
        free_rank: d - rank,
    }
}

// ---------------------------------------------------------------------------
// Cotypes

/// `(α₁, …, α_d)` with `α_{i+1} | α_i` and `ℤ^d/Λ ≅ ⊕ ℤ/α_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cotype {
    alpha: Vec<u64>,
}

impl Cotype {
    pub fn new(alpha: Vec<u64>) -> Result<Self> {
        if alpha.iter().any(|&a| a == 0) {
            return Err(Error::Invalid(format!("cotype entries must be positive: {alpha:?}")));
        }
        if alpha.windows(2).any(|w| w[0] % w[1] != 0) {
            return Err(Error::Invalid(format!("{alpha:?} is not a divisibility chain")));
        }
        Ok(Self { alpha })
    }

    pub fn trivial(d: usize) -> Self {
        Self { alpha: vec![1; d] }
    }

    /// From SNF invariant factors listed smallest first; the list is reversed
    /// and padded with ones up to `d`.
    fn from_smith_increasing(d: usize, increasing: &[u64]) -> Self {
        let mut alpha: Vec<u64> = increasing.iter().rev().copied().collect();
        alpha.resize(d, 1);
        Self { alpha }
    }

    pub fn alpha(&self) -> &[u64] {
        &self.alpha
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn index(&self) -> u128 {
        self.alpha.iter().map(|&a| a as u128).product()
    }

    /// Largest `i` with `α_i ≠ 1`; 0 for the trivial cotype.
    pub fn corank(&self) -> usize {
        self.alpha.iter().rposition(|&a| a != 1).map_or(0, |i| i + 1)
    }

    /// Exponents of `p` in `α`, i.e. the type of the p-Sylow subgroup.
    pub fn p_part(&self, p: u64) -> Partition {
        Partition::from_unsorted(self.alpha.iter().map(|&a| valuation(a, p)).collect())
    }
}

impl fmt::Display for Cotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, a) in self.alpha.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

// ---------------------------------------------------------------------------
// Hermite bases

/// Upper-triangular column basis of a full-rank sublattice, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HermiteBasis {
    dim: usize,
    entries: Vec<BigInt>,
}

impl HermiteBasis {
    pub fn new(dim: usize, entries: Vec<BigInt>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::Invalid(format!("need {dim}x{dim} entries")));
        }
        for i in 0..dim {
            let diag = &entries[i * dim + i];
            if !diag.is_positive() {
                return Err(Error::Invalid(format!("diagonal entry {i} is not positive")));
            }
            for j in 0..dim {
                let e = &entries[i * dim + j];
                let ok = match j.cmp(&i) {
                    std::cmp::Ordering::Less => e.is_zero(),
                    std::cmp::Ordering::Equal => true,
                    std::cmp::Ordering::Greater => !e.is_negative() && e < diag,
                };
                if !ok {
                    return Err(Error::Invalid(format!("entry ({i},{j}) = {e} violates the normal form")));
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn from_i64(dim: usize, entries: &[i64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// `k·ℤ^d`
    pub fn scalar(dim: usize, k: u64) -> Self {
        let mut entries = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = BigInt::from(k);
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.dim).map(<[BigInt]>::to_vec).collect()
    }

    /// `[ℤ^d : Λ]`, the product of the diagonal.
    pub fn index(&self) -> BigInt {
        (0..self.dim).map(|i| self.entry(i, i).clone()).product()
    }

    /// Whether `v` lies in the column span, by back substitution.
    pub fn contains_vector(&self, v: &[BigInt]) -> bool {
        let mut r = v.to_vec();
        for i in (0..self.dim).rev() {
            let (c, rem) = r[i].div_rem(self.entry(i, i));
            if !rem.is_zero() {
                return false;
            }
            for (k, rk) in r.iter_mut().enumerate().take(i + 1) {
                *rk -= &c * self.entry(k, i);
            }
        }
        true
    }

    /// Whether `other ⊆ self`.
    pub fn contains(&self, other: &HermiteBasis) -> bool {
        (0..other.dim).all(|j| {
            let col: Vec<BigInt> = (0..other.dim).map(|i| other.entry(i, j).clone()).collect();
            self.contains_vector(&col)
        })
    }
}

pub fn cotype_of(b: &HermiteBasis) -> Result<Cotype> {
    let snf = smith_normal_form(&b.rows())?;
    let inc: Vec<u64> = snf
        .diag
        .iter()
        .map(|s| s.to_u64().ok_or_else(|| Error::Invalid(format!("invariant factor {s} exceeds u64"))))
        .collect::<Result<_>>()?;
    Ok(Cotype::from_smith_increasing(b.dim, &inc))
}

// ---------------------------------------------------------------------------
// Enumeration

/// Number of Hermite bases with the given diagonal.
fn hnf_count_for_diagonal(diag: &[u64]) -> u128 {
    let d = diag.len();
    diag.iter()
        .enumerate()
        .map(|(i, &a)| (a as u128).saturating_pow((d - 1 - i) as u32))
        .fold(1u128, u128::saturating_mul)
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_ENUM_DIM {
        return Err(Error::Invalid(format!("dimension must be in 1..={MAX_ENUM_DIM}, got {d}")));
    }
    Ok(())
}

/// Streams every sublattice of `ℤ^d` of index exactly `n`, once each.
pub fn enumerate_hnf(d: usize, n: u64, cap: u64) -> Result<HnfIter> {
    check_dim(d)?;
    if n == 0 {
        return Err(Error::Invalid("index must be positive".into()));
    }
    let diagonals = ordered_factorizations(n, d);
    let total: u128 = diagonals.iter().map(|g| hnf_count_for_diagonal(g)).sum();
    if total > cap as u128 {
        return Err(Error::ResourceLimit(format!(
            "{total} Hermite bases of index {n} in dimension {d} exceed the cap {cap}"
        )));
    }
    Ok(HnfIter {
        d,
        diagonals,
        next_diag: 0,
        current: None,
    })
}

pub struct HnfIter {
    d: usize,
    diagonals: Vec<Vec<u64>>,
    next_diag: usize,
    current: Option<Odometer>,
}

/// Walks the off-diagonal entries of one diagonal in mixed radix.
struct Odometer {
    mat: Vec<i64>,
    slots: Vec<(usize, i64)>,
    fresh: bool,
}

impl Odometer {
    fn new(d: usize, diag: &[u64]) -> Self {
        let mut mat = vec![0i64; d * d];
        let mut slots = Vec::new();
        for i in 0..d {
            mat[i * d + i] = diag[i] as i64;
            for j in i + 1..d {
                if diag[i] > 1 {
                    slots.push((i * d + j, diag[i] as i64));
                }
            }
        }
        Self {
            mat,
            slots,
            fresh: true,
        }
    }

    fn advance(&mut self) -> bool {
        if self.fresh {
            self.fresh = false;
            return true;
        }
        for &(pos, radix) in &self.slots {
            self.mat[pos] += 1;
            if self.mat[pos] < radix {
                return true;
            }
            self.mat[pos] = 0;
        }
        false
    }
}

impl Iterator for HnfIter {
    type Item = HermiteBasis;

    fn next(&mut self) -> Option<HermiteBasis> {
        loop {
            if let Some(od) = &mut self.current {
                if od.advance() {
                    return Some(HermiteBasis {
                        dim: self.d,
                        entries: od.mat.iter().map(|&x| BigInt::from(x)).collect(),
                    });
                }
            }
            let diag = self.diagonals.get(self.next_diag)?;
            self.current = Some(Odometer::new(self.d, diag));
            self.next_diag += 1;
        }
    }
}

/// Cotypes of every Hermite basis with this diagonal, tallied by `α`.
fn tally_diagonal(d: usize, diag: &[u64]) -> HashMap<[u64; MAX_ENUM_DIM], u64> {
    let det: i64 = diag.iter().product::<u64>() as i64;
    let mut od = Odometer::new(d, diag);
    let mut scratch = [0i64; MAX_ENUM_DIM * MAX_ENUM_DIM];
    let mut out: HashMap<[u64; MAX_ENUM_DIM], u64> = HashMap::new();
    while od.advance() {
        let a = &mut scratch[..d * d];
        a.copy_from_slice(&od.mat);
        let rank = snf_in_place(a, d, d, Some(&det));
        let mut key = [1u64; MAX_ENUM_DIM];
        // α is the invariant-factor list reversed: largest first
        for t in 0..d {
            let s = if t < rank {
                num_integer::gcd(a[t * d + t], det) as u64
            } else {
                det as u64
            };
            key[d - 1 - t] = s;
        }
        *out.entry(key).or_insert(0) += 1;
    }
    out
}

/// Exact cotype counts over all sublattices of index `< bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CotypeTally {
    pub d: usize,
    pub bound: u64,
    pub counts: BTreeMap<Cotype, u64>,
}

impl CotypeTally {
    /// `N_d(X)`
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// `N_d^{(m)}(X)`: sublattices of corank at most `m`.
    pub fn corank_at_most(&self, m: usize) -> u64 {
        self.counts
            .iter()
            .filter(|(c, _)| c.corank() <= m)
            .map(|(_, &n)| n)
            .sum()
    }

    pub fn count(&self, c: &Cotype) -> u64 {
        self.counts.get(c).copied().unwrap_or(0)
    }

    /// Counts restricted to sublattices of exactly index `n`.
    pub fn at_index(&self, n: u64) -> BTreeMap<Cotype, u64> {
        self.counts
            .iter()
            .filter(|(c, _)| c.index() == n as u128)
            .map(|(c, &k)| (c.clone(), k))
            .collect()
    }

    pub fn export(&self) -> TallyExport {
        TallyExport {
            d: self.d,
            bound: self.bound,
            bound_convention: BOUND_CONVENTION,
            total: self.total(),
            corank_at_most: (0..=self.d).map(|m| self.corank_at_most(m)).collect(),
            rows: self
                .counts
                .iter()
                .map(|(c, &count)| TallyRow {
                    alpha: c.alpha.clone(),
                    corank: c.corank(),
                    index: c.index() as u64,
                    count,
                })
                .collect(),
        }
    }

    /// CSV with `#`-prefixed header lines for the run parameters, then
    /// `alpha,corank,index,count` rows; `alpha` entries are `;`-separated.
    pub fn to_csv(&self) -> String {
        let by_corank: Vec<String> = (0..=self.d).map(|m| self.corank_at_most(m).to_string()).collect();
        let mut s = format!(
            "# d={}\n# X={}\n# bound: {}\n# total={}\n# corank_at_most={}\nalpha,corank,index,count\n",
            self.d,
            self.bound,
            BOUND_CONVENTION,
            self.total(),
            by_corank.join(";")
        );
        for (c, n) in &self.counts {
            let alpha: Vec<String> = c.alpha.iter().map(u64::to_string).collect();
            s.push_str(&format!("{},{},{},{}\n", alpha.join(";"), c.corank(), c.index(), n));
        }
        s
    }
}

pub const BOUND_CONVENTION: &str = "index < X (strict)";

#[derive(Clone, Debug, Serialize)]
pub struct TallyExport {
    pub d: usize,
    pub bound: u64,
    pub bound_convention: &'static str,
    pub total: u64,
    /// `N_d^{(m)}(X)` for `m = 0, …, d`.
    pub corank_at_most: Vec<u64>,
    pub rows: Vec<TallyRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TallyRow {
    pub alpha: Vec<u64>,
    pub corank: usize,
    pub index: u64,
    pub count: u64,
}

/// Number of sublattices of index `< bound`, from the convolution table.
pub fn count_below(d: usize, bound: u64) -> u128 {
    sublattice_count_table(d, bound).iter().sum()
}

fn tally_diagonals(d: usize, bound: u64, diagonals: Vec<Vec<u64>>) -> CotypeTally {
    let merged = diagonals
        .par_iter()
        .map(|diag| tally_diagonal(d, diag))
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    let counts = merged
        .into_iter()
        .map(|(k, v)| (Cotype { alpha: k[..d].to_vec() }, v))
        .collect();
    CotypeTally { d, bound, counts }
}

/// Exact cotype counts over every sublattice of `ℤ^d` with index `< bound`.
pub fn tally_cotypes(d: usize, bound: u64, cap: u64) -> Result<CotypeTally> {
    check_dim(d)?;
    if bound == 0 {
        return Err(Error::Invalid("bound X must be positive".into()));
    }
    let total = count_below(d, bound);
    if total > cap as u128 {
        return Err(Error::ResourceLimit(format!(
            "{total} sublattices of index < {bound} in dimension {d} exceed the cap {cap}"
        )));
    }
    if (bound as u128).saturating_mul(bound as u128) > i64::MAX as u128 {
        return Err(Error::ResourceLimit(format!("bound {bound} too large for machine arithmetic")));
    }
    let diagonals: Vec<Vec<u64>> = (1..bound).flat_map(|n| ordered_factorizations(n, d)).collect();
    Ok(tally_diagonals(d, bound, diagonals))
}

/// Exact cotype counts over the sublattices of index exactly `n`.
pub fn tally_index(d: usize, n: u64, cap: u64) -> Result<CotypeTally> {
    check_dim(d)?;
    let diagonals = ordered_factorizations(n, d);
    let total: u128 = diagonals.iter().map(|g| hnf_count_for_diagonal(g)).sum();
    if total > cap as u128 {
        return Err(Error::ResourceLimit(format!(
            "{total} sublattices of index {n} in dimension {d} exceed the cap {cap}"
        )));
    }
    let mut t = tally_diagonals(d, n + 1, diagonals);
    t.counts.retain(|c, _| c.index() == n as u128);
    Ok(t)
}

// ---------------------------------------------------------------------------
// Generating tuples

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TupleCountMode {
    BruteForce,
    ClosedForm,
    /// Brute force when `(ℤ/p^{λ₁})^d` has at most `budget` elements.
    Auto { budget: u64 },
}

/// Tuples `(x₁, …, x_r)` of `G* = (ℤ/p^{λ₁})^d` with `ord(x_i) = p^{λ_i}`
/// spanning a subgroup of type `λ`.
pub fn count_generating_tuples(d: usize, p: u64, lambda: &Partition, mode: TupleCountMode) -> Result<BigInt> {
    if lambda.rank() > d {
        return Err(Error::RankExceedsD {
            rank: lambda.rank(),
            d,
        });
    }
    if lambda.is_empty() {
        return Ok(BigInt::one());
    }
    let ambient = (p as u128).checked_pow(lambda.largest() * d as u32);
    let brute = match mode {
        TupleCountMode::BruteForce => true,
        TupleCountMode::ClosedForm => false,
        TupleCountMode::Auto { budget } => ambient.is_some_and(|a| a <= budget as u128),
    };
    if !brute {
        return Ok(generating_tuples_closed_form(p, lambda, d));
    }
    let modulus = p.pow(lambda.largest());
    let g = ExplicitGroup::new(&vec![modulus; d])?;
    let orders: Vec<u64> = lambda.parts().iter().map(|&l| p.pow(l)).collect();
    let target: u64 = orders.iter().product();
    let want = lambda.parts().to_vec();
    let n = count_tuples(
        &g,
        &orders,
        target as usize,
        &|i, ord| ord == orders[i],
        &|h| ExplicitGroup::size(h) as u64 == target && g.p_subgroup_type(p, h) == want,
    );
    Ok(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn snf_examples() {
        let id = smith_normal_form(&bi(&[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(id.diag, ints(&[1, 1]));
        assert_eq!(id.free_rank, 0);
        let s = smith_normal_form(&bi(&[&[4, 0], &[0, 6]])).unwrap();
        assert_eq!(s.diag, ints(&[2, 12]));
        let z = smith_normal_form(&bi(&[&[0, 0], &[0, 0]])).unwrap();
        assert_eq!(z.free_rank, 2);
        assert!(z.diag.is_empty());
        let sing = smith_normal_form(&bi(&[&[2, 4], &[1, 2]])).unwrap();
        assert_eq!(sing.diag, ints(&[1]));
        assert_eq!(sing.free_rank, 1);
        let rect = smith_normal_form(&bi(&[&[2, 4, 6]])).unwrap();
        assert_eq!(rect.diag, ints(&[2]));
        assert!(smith_normal_form(&bi(&[&[1, 2], &[3]])).is_err());
    }

    #[test]
    fn snf_nontrivial() {
        // classic example with invariant factors 2, 6, 12
        let m = bi(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith_normal_form(&m).unwrap();
        assert_eq!(s.diag, ints(&[2, 6, 12]));
    }

    #[test]
    fn cotype_examples() {
        let id = HermiteBasis::from_i64(3, &[1, 0, 0, 0, 1, 0, 0, 0, 1]).unwrap();
        let c = cotype_of(&id).unwrap();
        assert_eq!(c.alpha(), &[1, 1, 1]);
        assert_eq!(c.corank(), 0);
        let two = HermiteBasis::scalar(2, 2);
        let c = cotype_of(&two).unwrap();
        assert_eq!(c.alpha(), &[2, 2]);
        assert_eq!(c.corank(), 2);
        let b = HermiteBasis::from_i64(2, &[1, 0, 0, 4]).unwrap();
        let c = cotype_of(&b).unwrap();
        assert_eq!(c.alpha(), &[4, 1]);
        assert_eq!(c.corank(), 1);
    }

    #[test]
    fn cotype_validation() {
        assert!(Cotype::new(vec![4, 2, 1]).is_ok());
        assert!(Cotype::new(vec![4, 3]).is_err());
        assert!(Cotype::new(vec![2, 4]).is_err());
        assert!(Cotype::new(vec![0]).is_err());
        let c = Cotype::new(vec![12, 2, 1]).unwrap();
        assert_eq!(c.index(), 24);
        assert_eq!(c.p_part(2).parts(), &[2, 1]);
        assert_eq!(c.p_part(3).parts(), &[1]);
        assert_eq!(c.to_string(), "(12,2,1)");
    }

    #[test]
    fn hermite_validation() {
        assert!(HermiteBasis::from_i64(2, &[2, 2, 0, 1]).is_err());
        assert!(HermiteBasis::from_i64(2, &[2, 1, 1, 1]).is_err());
        assert!(HermiteBasis::from_i64(2, &[0, 0, 0, 1]).is_err());
        assert!(HermiteBasis::from_i64(2, &[2, 1, 0, 3]).is_ok());
    }

    #[test]
    fn enumeration_counts() {
        let one: Vec<_> = enumerate_hnf(1, 7, DEFAULT_MATRIX_CAP).unwrap().collect();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].entry(0, 0), &BigInt::from(7));
        assert_eq!(enumerate_hnf(2, 2, DEFAULT_MATRIX_CAP).unwrap().count(), 3);
        assert_eq!(enumerate_hnf(2, 4, DEFAULT_MATRIX_CAP).unwrap().count(), 7);
        assert!(matches!(enumerate_hnf(3, 64, 10), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn enumerated_bases_are_valid_and_distinct() {
        let all: Vec<HermiteBasis> = enumerate_hnf(3, 12, DEFAULT_MATRIX_CAP).unwrap().collect();
        let set: std::collections::HashSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        for b in &all {
            let checked = HermiteBasis::new(3, b.entries.clone()).unwrap();
            assert_eq!(checked.index(), BigInt::from(12));
            let c = cotype_of(b).unwrap();
            assert_eq!(c.index(), 12);
        }
    }

    #[test]
    fn tally_examples() {
        let t = tally_cotypes(2, 3, DEFAULT_MATRIX_CAP).unwrap();
        assert_eq!(t.total(), 4);
        for d in 1..5 {
            let t = tally_cotypes(d, 2, DEFAULT_MATRIX_CAP).unwrap();
            assert_eq!(t.total(), 1);
            assert_eq!(t.count(&Cotype::trivial(d)), 1);
        }
        let t = tally_cotypes(2, 5, DEFAULT_MATRIX_CAP).unwrap();
        assert_eq!(t.count(&Cotype::new(vec![2, 2]).unwrap()), 1);
        assert_eq!(t.total(), 15);
        assert!(matches!(tally_cotypes(3, 100, 1000), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn fast_tally_matches_bigint_path() {
        for d in 1..=4 {
            for n in 1..=24u64 {
                let t = tally_index(d, n, DEFAULT_MATRIX_CAP).unwrap();
                let mut slow: BTreeMap<Cotype, u64> = BTreeMap::new();
                for b in enumerate_hnf(d, n, DEFAULT_MATRIX_CAP).unwrap() {
                    *slow.entry(cotype_of(&b).unwrap()).or_insert(0) += 1;
                }
                assert_eq!(t.counts, slow, "d={d} n={n}");
            }
        }
    }

    #[test]
    fn containment() {
        let two = HermiteBasis::scalar(2, 2);
        let four = HermiteBasis::scalar(2, 4);
        assert!(two.contains(&four));
        assert!(!four.contains(&two));
        let b = HermiteBasis::from_i64(2, &[2, 1, 0, 2]).unwrap();
        assert!(b.contains(&four));
        assert!(!two.contains(&b));
        assert!(b.contains_vector(&ints(&[1, 2])));
        assert!(!b.contains_vector(&ints(&[1, 0])));
    }

    #[test]
    fn generating_tuple_examples() {
        for p in [2u64, 3, 5] {
            let l = Partition::new(&[1]).unwrap();
            let n = count_generating_tuples(1, p, &l, TupleCountMode::BruteForce).unwrap();
            assert_eq!(n, BigInt::from(p - 1));
        }
        let l = Partition::new(&[1]).unwrap();
        assert_eq!(count_generating_tuples(2, 2, &l, TupleCountMode::BruteForce).unwrap(), BigInt::from(3));
        let l = Partition::new(&[1, 1]).unwrap();
        assert_eq!(count_generating_tuples(2, 2, &l, TupleCountMode::BruteForce).unwrap(), BigInt::from(6));
        assert_eq!(count_generating_tuples(2, 2, &l, TupleCountMode::ClosedForm).unwrap(), BigInt::from(6));
        let l3 = Partition::new(&[1, 1, 1]).unwrap();
        assert!(count_generating_tuples(2, 2, &l3, TupleCountMode::ClosedForm).is_err());
    }
}

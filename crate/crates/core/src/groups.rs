//! Finite abelian p-groups: types, automorphism orders, embeddings, and the
//! Cohen–Lenstra masses.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::finite::{count_tuples, ExplicitGroup};
use crate::zeta::local_coefficient;

/// Number of factors kept in `Π_{i≥1}(1 − p^{−i})` before the tail bound
/// takes over.
pub const DEFAULT_PRODUCT_TERMS: u32 = 64;

/// A partition `λ₁ ≥ λ₂ ≥ … ≥ λ_r > 0`, possibly empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Zero parts are dropped; the rest must already be weakly decreasing.
    pub fn new(parts: &[u32]) -> Result<Self> {
        let parts: Vec<u32> = parts.iter().copied().filter(|&x| x > 0).collect();
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invalid(format!("{parts:?} is not weakly decreasing")));
        }
        Ok(Self(parts))
    }

    /// Sorts the parts into weakly decreasing order.
    pub fn from_unsorted(mut parts: Vec<u32>) -> Self {
        parts.retain(|&x| x > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self(parts)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn largest(&self) -> u32 {
        self.0.first().copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `i`-th part (1-based), zero past the rank.
    pub fn part(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    /// Parts padded with zeros to length `d`.
    pub fn padded(&self, d: usize) -> Vec<u32> {
        let mut v = self.0.clone();
        v.resize(d.max(v.len()), 0);
        v
    }

    pub fn conjugate(&self) -> Partition {
        conjugate(self)
    }

    /// All partitions with largest part `≤ max_part` and at most `max_rank`
    /// parts, the empty partition included.
    pub fn all_bounded(max_part: u32, max_rank: usize) -> Vec<Partition> {
        fn rec(max_part: u32, slots: usize, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
            out.push(Partition(prefix.clone()));
            if slots == 0 {
                return;
            }
            for x in 1..=max_part {
                prefix.push(x);
                rec(x, slots - 1, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(max_part, max_rank, &mut Vec::new(), &mut out);
        out.sort();
        out
    }

    /// All partitions of `n`.
    pub fn of_size(n: u32) -> Vec<Partition> {
        fn rec(rest: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition(prefix.clone()));
                return;
            }
            for x in 1..=max_part.min(rest) {
                prefix.push(x);
                rec(rest - x, x, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// `λ′_i = #{ j : λ_j ≥ i }`
pub fn conjugate(lambda: &Partition) -> Partition {
    Partition(
        (1..=lambda.largest())
            .map(|i| lambda.0.iter().filter(|&&x| x >= i).count() as u32)
            .collect(),
    )
}

/// Isomorphism type `ℤ/p^{λ₁} × ⋯ × ℤ/p^{λ_r}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AbelianPGroupType {
    p: u64,
    lambda: Partition,
}

impl AbelianPGroupType {
    pub fn new(p: u64, lambda: Partition) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        Ok(Self { p, lambda })
    }

    pub fn trivial(p: u64) -> Result<Self> {
        Self::new(p, Partition::empty())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn lambda(&self) -> &Partition {
        &self.lambda
    }

    pub fn rank(&self) -> usize {
        self.lambda.rank()
    }

    pub fn order(&self) -> BigInt {
        num_traits::pow(BigInt::from(self.p), self.lambda.size() as usize)
    }

    pub fn explicit(&self) -> Result<ExplicitGroup> {
        ExplicitGroup::of_type(self.p, self.lambda.parts())
    }
}

impl fmt::Display for AbelianPGroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} {}", self.p, self.lambda)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AutMethod {
    /// `p^{Σ λ′_i²} Π_i Π_{j=1}^{m_i}(1 − p^{−j})`, `m_i` the multiplicity of
    /// part size `i`.
    ClosedForm,
    /// Solved from the count of generating tuples of `(ℤ/p^{λ₁})^r` divided by
    /// the number of subgroups of that type.
    TupleIdentity,
}

pub fn aut_order(g: &AbelianPGroupType, via: AutMethod) -> BigInt {
    match via {
        AutMethod::ClosedForm => aut_order_closed_form(g),
        AutMethod::TupleIdentity => aut_order_tuple_identity(g, g.rank()),
    }
}

fn aut_order_closed_form(g: &AbelianPGroupType) -> BigInt {
    let p = BigInt::from(g.p);
    let conj = g.lambda.conjugate();
    let mut exp: u64 = conj.parts().iter().map(|&c| (c as u64) * (c as u64)).sum();
    let mut acc = BigInt::one();
    // multiplicity of part size i is λ′_i − λ′_{i+1}
    for i in 1..=g.lambda.largest() as usize {
        let m = (conj.part(i) - conj.part(i + 1)) as u64;
        for j in 1..=m {
            acc *= num_traits::pow(p.clone(), j as usize) - 1u32;
        }
        exp -= m * (m + 1) / 2;
    }
    acc * num_traits::pow(p, exp as usize)
}

/// `|Aut(G)| = |G|^d Π_{j=0}^{r−1}(1 − p^{j−d}) / #{H ≤ (ℤ/p^{λ₁})^d : H ≅ G}`
/// for any `d ≥ rank(G)`.
pub fn aut_order_tuple_identity(g: &AbelianPGroupType, d: usize) -> BigInt {
    let d = d.max(g.rank()).max(1);
    let tuples = generating_tuples_closed_form(g.p, &g.lambda, d);
    let nu = g.lambda.padded(d);
    let subgroups = local_coefficient(d, g.p, &nu).expect("partition parts are weakly decreasing");
    debug_assert!((&tuples % &subgroups).is_zero());
    tuples / subgroups
}

/// `Π_{j=0}^{r−1} (p^{λ_{j+1} d} − p^j p^{(λ_{j+1}−1) d})`: tuples in
/// `(ℤ/p^{λ₁})^d` of exact orders `p^{λ_i}` spanning a subgroup of type `λ`.
pub fn generating_tuples_closed_form(p: u64, lambda: &Partition, d: usize) -> BigInt {
    let p = BigInt::from(p);
    lambda
        .parts()
        .iter()
        .enumerate()
        .map(|(j, &l)| {
            let full = num_traits::pow(p.clone(), l as usize * d);
            let lower = num_traits::pow(p.clone(), j + (l as usize - 1) * d);
            full - lower
        })
        .product()
}

/// Counts automorphisms by enumerating images of the standard generators:
/// tuples `(x₁, …, x_r)` with `p^{λ_i} x_i = 0` that span all of `G`.
pub fn aut_order_brute_force(g: &AbelianPGroupType) -> Result<BigInt> {
    if g.rank() == 0 {
        return Ok(BigInt::one());
    }
    let grp = g.explicit()?;
    let bounds: Vec<u64> = g.lambda.parts().iter().map(|&l| g.p.pow(l)).collect();
    let target = grp.order();
    let n = count_tuples(
        &grp,
        &bounds,
        target,
        &|i, ord| bounds[i] % ord == 0,
        &|h| ExplicitGroup::size(h) == target,
    );
    Ok(BigInt::from(n))
}

/// `H ↪ G`: componentwise `λ_i(H) ≤ λ_i(G)`.
pub fn embeds(h: &AbelianPGroupType, g: &AbelianPGroupType) -> Result<bool> {
    if h.p != g.p {
        return Err(Error::PrimeMismatch(h.p, g.p));
    }
    Ok(embeds_partition(&h.lambda, &g.lambda))
}

pub fn embeds_partition(h: &Partition, g: &Partition) -> bool {
    h.rank() <= g.rank() && h.parts().iter().zip(g.parts()).all(|(a, b)| a <= b)
}

/// Searches every subgroup of `G` for one of `H`'s type.
pub fn embeds_brute_force(h: &AbelianPGroupType, g: &AbelianPGroupType) -> Result<bool> {
    if h.p != g.p {
        return Err(Error::PrimeMismatch(h.p, g.p));
    }
    let grp = g.explicit()?;
    let want = h.lambda.parts().to_vec();
    Ok(grp
        .all_subgroups()
        .iter()
        .any(|s| grp.p_subgroup_type(g.p, s) == want))
}

/// `Π_{i=1}^{terms}(1 − p^{−i})` in floating point, with the bound
/// `|log Π_{i>terms}(1 − p^{−i})| ≤ 2 p^{−(terms+1)} / (1 − p^{−1})`.
pub fn euler_phi_product(p: u64, from: u32, terms: u32) -> (f64, f64) {
    let x = 1.0 / p as f64;
    let mut prod = 1.0;
    for i in from..=terms {
        prod *= 1.0 - x.powi(i as i32);
    }
    let log_tail = 2.0 * x.powi(terms as i32 + 1) / (1.0 - x);
    (prod, log_tail)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClMass {
    /// `|Aut(G)|^{−1}`, exact.
    #[serde(serialize_with = "crate::serde_util::rational_str")]
    pub inv_aut: BigRational,
    /// `Π_{i=1}^{terms}(1 − p^{−i})`.
    pub truncated_product: f64,
    pub product_terms: u32,
    pub value: f64,
    /// Absolute bound on `|value − true mass|` from truncating the product.
    pub tail_bound: f64,
}

/// Cohen–Lenstra mass `|Aut(G)|^{−1} Π_{i≥1}(1 − p^{−i})`.
pub fn cohen_lenstra_mass(g: &AbelianPGroupType) -> ClMass {
    cohen_lenstra_mass_with(g, DEFAULT_PRODUCT_TERMS)
}

pub fn cohen_lenstra_mass_with(g: &AbelianPGroupType, terms: u32) -> ClMass {
    let aut = aut_order(g, AutMethod::ClosedForm);
    let inv_aut = BigRational::new(BigInt::one(), aut);
    let (prod, log_tail) = euler_phi_product(g.p, 1, terms);
    let value = inv_aut.to_f64().unwrap_or(0.0) * prod;
    ClMass {
        inv_aut,
        truncated_product: prod,
        product_terms: terms,
        value,
        tail_bound: value * log_tail.exp_m1(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RankMass {
    #[serde(serialize_with = "crate::serde_util::rational_str")]
    pub exact: BigRational,
    pub value: f64,
}

/// `|Aut(G)|^{−1} Π_{j=1}^{d}(1−p^{−j}) Π_{j=d−r+1}^{d}(1−p^{−j})`
pub fn rank_d_mass(g: &AbelianPGroupType, d: usize) -> Result<RankMass> {
    let r = g.rank();
    if r > d {
        return Err(Error::RankExceedsD { rank: r, d });
    }
    let p = BigInt::from(g.p);
    let one_minus = |j: usize| {
        let pj = num_traits::pow(p.clone(), j);
        BigRational::new(&pj - 1u32, pj)
    };
    let mut exact = BigRational::new(BigInt::one(), aut_order(g, AutMethod::ClosedForm));
    for j in 1..=d {
        exact *= one_minus(j);
    }
    for j in d - r + 1..=d {
        exact *= one_minus(j);
    }
    let value = exact.to_f64().unwrap_or(f64::NAN);
    Ok(RankMass { exact, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(p: u64, parts: &[u32]) -> AbelianPGroupType {
        AbelianPGroupType::new(p, Partition::new(parts).unwrap()).unwrap()
    }

    #[test]
    fn conjugates() {
        assert_eq!(conjugate(&Partition::empty()), Partition::empty());
        assert_eq!(conjugate(&Partition::new(&[3, 1]).unwrap()).parts(), &[2, 1, 1]);
        assert_eq!(conjugate(&Partition::new(&[2, 2]).unwrap()).parts(), &[2, 2]);
        for l in Partition::all_bounded(4, 4) {
            assert_eq!(l.conjugate().conjugate(), l);
            assert_eq!(l.conjugate().size(), l.size());
        }
    }

    #[test]
    fn partition_validation_and_counts() {
        assert!(Partition::new(&[1, 2]).is_err());
        assert_eq!(Partition::new(&[2, 1, 0]).unwrap().parts(), &[2, 1]);
        // p(n) for n = 0..8
        let counts: Vec<usize> = (0..8).map(|n| Partition::of_size(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15]);
    }

    #[test]
    fn aut_order_examples() {
        for p in [2, 3, 5, 7] {
            assert_eq!(aut_order(&g(p, &[1]), AutMethod::ClosedForm), BigInt::from(p - 1));
            assert_eq!(aut_order(&g(p, &[1]), AutMethod::TupleIdentity), BigInt::from(p - 1));
        }
        assert_eq!(aut_order(&g(2, &[1, 1]), AutMethod::ClosedForm), BigInt::from(6));
        assert_eq!(aut_order_brute_force(&g(2, &[1, 1])).unwrap(), BigInt::from(6));
        // Aut(ℤ/4 × ℤ/2) has order 8
        assert_eq!(aut_order(&g(2, &[2, 1]), AutMethod::ClosedForm), BigInt::from(8));
        assert_eq!(aut_order(&g(2, &[2, 1]), AutMethod::TupleIdentity), BigInt::from(8));
        assert_eq!(aut_order_brute_force(&g(2, &[2, 1])).unwrap(), BigInt::from(8));
        assert_eq!(aut_order(&g(3, &[]), AutMethod::ClosedForm), BigInt::one());
        assert_eq!(aut_order(&g(3, &[]), AutMethod::TupleIdentity), BigInt::one());
    }

    #[test]
    fn tuple_identity_independent_of_ambient_rank() {
        for l in Partition::all_bounded(3, 3) {
            let grp = g(2, l.parts());
            let base = aut_order(&grp, AutMethod::ClosedForm);
            for d in grp.rank()..grp.rank() + 3 {
                assert_eq!(aut_order_tuple_identity(&grp, d), base, "{l} d={d}");
            }
        }
    }

    #[test]
    fn embedding_examples() {
        let trivial = g(2, &[]);
        assert!(embeds(&trivial, &g(2, &[3, 1])).unwrap());
        assert!(!embeds(&g(2, &[2]), &g(2, &[1, 1])).unwrap());
        assert!(!embeds_brute_force(&g(2, &[2]), &g(2, &[1, 1])).unwrap());
        assert!(embeds(&g(2, &[1, 1]), &g(2, &[2, 1])).unwrap());
        assert!(embeds_brute_force(&g(2, &[1, 1]), &g(2, &[2, 1])).unwrap());
        assert!(matches!(embeds(&g(2, &[1]), &g(3, &[1])), Err(Error::PrimeMismatch(2, 3))));
    }

    #[test]
    fn cl_mass_examples() {
        let m = cohen_lenstra_mass(&g(2, &[]));
        assert!((m.value - 0.288_788_095_1).abs() < 1e-10, "{}", m.value);
        assert!(m.tail_bound < 1e-18);
        for p in [2u64, 3, 5] {
            let t = cohen_lenstra_mass(&g(p, &[]));
            let c = cohen_lenstra_mass(&g(p, &[1]));
            assert_eq!(&c.inv_aut / &t.inv_aut, BigRational::new(1.into(), BigInt::from(p - 1)));
        }
    }

    #[test]
    fn cl_partial_sums_increase_below_one() {
        let p = 2;
        let mut prev = 0.0;
        for n in 0..=4 {
            let s: f64 = (0..=n)
                .flat_map(Partition::of_size)
                .map(|l| cohen_lenstra_mass(&g(p, l.parts())).value)
                .sum();
            assert!(s > prev && s < 1.0);
            prev = s;
        }
    }

    #[test]
    fn rank_mass_examples() {
        for p in [2u64, 3] {
            let pr = BigInt::from(p);
            let om = |j: u32| {
                let pj = num_traits::pow(pr.clone(), j as usize);
                BigRational::new(&pj - 1u32, pj)
            };
            for d in 1..4usize {
                let want: BigRational = (1..=d as u32).map(om).product();
                assert_eq!(rank_d_mass(&g(p, &[]), d).unwrap().exact, want);
            }
            let got = rank_d_mass(&g(p, &[1]), 1).unwrap().exact;
            assert_eq!(got, om(1) * om(1) / BigRational::from_integer(BigInt::from(p - 1)));
        }
        assert!(matches!(
            rank_d_mass(&g(2, &[1, 1, 1]), 2),
            Err(Error::RankExceedsD { rank: 3, d: 2 })
        ));
    }
}

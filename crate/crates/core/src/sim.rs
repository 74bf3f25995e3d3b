//! Random cokernels: the bounded-entry matrix model and the uniform
//! sublattice model, exact finite-X probabilities, and a statistical harness
//! comparing empirical tallies with predicted masses.
//!
//! Trial `i` draws from `ChaCha8Rng` seeded with the master seed and switched
//! to stream `i`, so a table depends only on its configuration and never on
//! the number of worker threads.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{is_prime, ordered_factorizations, sublattice_count_table};
use crate::error::{Error, Result};
use crate::groups::{embeds_partition, rank_d_mass, AbelianPGroupType, Partition};
use crate::lattice::{
    cotype_of, count_below, smith_normal_form, Cotype, HermiteBasis, SmithForm, MAX_ENUM_DIM,
};
use crate::zeta::{local_coefficient, stanley_wang_zd};

/// Label for singular samples, which have a free part in the cokernel.
pub const INFINITE_LABEL: &str = "free part present";
/// Label collecting every outcome not listed separately.
pub const OTHER_LABEL: &str = "other";

/// Largest `X` accepted by the uniform sublattice sampler by default.
pub const DEFAULT_SUBLATTICE_BOUND: u64 = 1_000_000;
/// Largest matrix count walked in exhaustive mode.
pub const MAX_EXHAUSTIVE: u64 = 10_000_000;
/// Default per-cell significance threshold, in standard deviations.
pub const DEFAULT_SIGMA: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Entries uniform on `[−k, k]`.
    Matrix { k: u64 },
    /// Uniform over sublattices of index `< bound`.
    Sublattice { bound: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleConfig {
    pub d: usize,
    pub model: Model,
    pub trials: u64,
    pub master_seed: u64,
    pub p: u64,
    /// Types with a part above this are reported as [`OTHER_LABEL`].
    pub exponent_cap: Option<u32>,
}

impl SampleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d > MAX_ENUM_DIM {
            return Err(Error::Invalid(format!("d must be in 1..={MAX_ENUM_DIM}, got {}", self.d)));
        }
        if self.trials == 0 {
            return Err(Error::Invalid("at least one trial is required".into()));
        }
        if !is_prime(self.p) {
            return Err(Error::Invalid(format!("{} is not prime", self.p)));
        }
        match self.model {
            Model::Matrix { k } if k == 0 => Err(Error::Invalid("entry bound k must be at least 1".into())),
            Model::Matrix { k } if k > i64::MAX as u64 / 4 => Err(Error::Invalid(format!("entry bound {k} too large"))),
            Model::Sublattice { bound } if bound < 2 => Err(Error::Invalid("index bound X must be at least 2".into())),
            _ => Ok(()),
        }
    }

    fn rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(trial);
        rng
    }

    fn label(&self, lambda: &Partition) -> String {
        match self.exponent_cap {
            Some(c) if lambda.largest() > c => OTHER_LABEL.to_string(),
            _ => lambda.to_string(),
        }
    }
}

/// One matrix draw: its Smith form and, when nonsingular, the type of the
/// p-Sylow subgroup of the cokernel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CokernelSample {
    pub smith: SmithForm,
    pub p_type: Option<Partition>,
}

impl CokernelSample {
    fn from_matrix(rows: &[Vec<BigInt>], p: u64) -> Result<Self> {
        let smith = smith_normal_form(rows)?;
        let p_type = (smith.free_rank == 0).then(|| smith.p_part(p));
        Ok(Self { smith, p_type })
    }
}

fn sample_matrix(cfg: &SampleConfig, k: u64, trial: u64) -> Result<CokernelSample> {
    let mut rng = cfg.rng(trial);
    let k = k as i64;
    let rows: Vec<Vec<BigInt>> = (0..cfg.d)
        .map(|_| (0..cfg.d).map(|_| BigInt::from(rng.random_range(-k..=k))).collect())
        .collect();
    CokernelSample::from_matrix(&rows, cfg.p)
}

/// Draws `cfg.trials` matrices with entries uniform on `[−k, k]`.
pub fn sample_cokernel_type(cfg: &SampleConfig) -> Result<Vec<CokernelSample>> {
    cfg.validate()?;
    let Model::Matrix { k } = cfg.model else {
        return Err(Error::Invalid("matrix sampling needs the matrix model".into()));
    };
    (0..cfg.trials).into_par_iter().map(|t| sample_matrix(cfg, k, t)).collect()
}

/// Every one of the `(2k+1)^{d²}` matrices once, in lexicographic order.
pub fn exhaustive_cokernel_types(d: usize, k: u64, p: u64) -> Result<Vec<CokernelSample>> {
    let side = 2 * k + 1;
    let total = side.checked_pow((d * d) as u32).filter(|&t| t <= MAX_EXHAUSTIVE).ok_or_else(|| {
        Error::ResourceLimit(format!("({side})^{} matrices exceed the exhaustive limit {MAX_EXHAUSTIVE}", d * d))
    })?;
    (0..total)
        .into_par_iter()
        .map(|mut code| {
            let mut entries = Vec::with_capacity(d * d);
            for _ in 0..d * d {
                entries.push(BigInt::from((code % side) as i64 - k as i64));
                code /= side;
            }
            let rows: Vec<Vec<BigInt>> = entries.chunks(d).map(<[BigInt]>::to_vec).collect();
            CokernelSample::from_matrix(&rows, p)
        })
        .collect()
}

/// Draws a uniform sublattice of index `< bound`: an index `n` with weight
/// equal to the number of sublattices of index `n`, then a diagonal with
/// weight `Π a_i^{d−i}`, then uniform off-diagonal entries.
pub struct SublatticeSampler {
    d: usize,
    cumulative: Vec<u128>,
}

impl SublatticeSampler {
    pub fn new(d: usize, bound: u64, max_bound: u64) -> Result<Self> {
        if d == 0 || d > MAX_ENUM_DIM {
            return Err(Error::Invalid(format!("d must be in 1..={MAX_ENUM_DIM}, got {d}")));
        }
        if bound < 2 {
            return Err(Error::Invalid("index bound X must be at least 2".into()));
        }
        if bound > max_bound {
            return Err(Error::ResourceLimit(format!("index bound {bound} exceeds the limit {max_bound}")));
        }
        let table = sublattice_count_table(d, bound);
        if table.iter().any(|&x| x == u128::MAX) {
            return Err(Error::ResourceLimit(format!("sublattice counts below {bound} overflow")));
        }
        let mut acc = 0u128;
        let cumulative = table
            .iter()
            .map(|&a| {
                acc = acc.saturating_add(a);
                acc
            })
            .collect();
        Ok(Self { d, cumulative })
    }

    pub fn total(&self) -> u128 {
        self.cumulative.last().copied().unwrap_or(0)
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> HermiteBasis {
        let u = rng.random_range(0..self.total());
        // first n with cumulative[n] > u
        let n = self.cumulative.partition_point(|&c| c <= u) as u64;
        let diags = ordered_factorizations(n, self.d);
        let weights: Vec<u128> = diags
            .iter()
            .map(|g| {
                g.iter()
                    .enumerate()
                    .map(|(i, &a)| (a as u128).pow((self.d - 1 - i) as u32))
                    .product()
            })
            .collect();
        let mut v = rng.random_range(0..weights.iter().sum::<u128>());
        let mut pick = 0;
        for (i, &w) in weights.iter().enumerate() {
            if v < w {
                pick = i;
                break;
            }
            v -= w;
        }
        let diag = &diags[pick];
        let d = self.d;
        let mut entries = vec![BigInt::zero(); d * d];
        for i in 0..d {
            entries[i * d + i] = BigInt::from(diag[i]);
            for j in i + 1..d {
                entries[i * d + j] = BigInt::from(rng.random_range(0..diag[i]));
            }
        }
        HermiteBasis::new(d, entries).expect("sampled entries are in normal form")
    }
}

/// Cotypes of `cfg.trials` uniform sublattices of index `< X`.
pub fn sample_uniform_sublattice(cfg: &SampleConfig) -> Result<Vec<Cotype>> {
    cfg.validate()?;
    let Model::Sublattice { bound } = cfg.model else {
        return Err(Error::Invalid("sublattice sampling needs the sublattice model".into()));
    };
    let sampler = SublatticeSampler::new(cfg.d, bound, DEFAULT_SUBLATTICE_BOUND)?;
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| cotype_of(&sampler.draw(&mut cfg.rng(t))))
        .collect()
}

// ---------------------------------------------------------------------------
// Exact probabilities at finite X

/// Probability that a uniform sublattice of index `< X` lies inside `L`.
/// Sublattices of `L` correspond to sublattices of `ℤ^d` with index scaled
/// by `D = [ℤ^d : L]`, so only the counting function is needed.
pub fn containment_probability_exact(l: &HermiteBasis, bound: u64) -> Result<BigRational> {
    let d = l.dim();
    let big_d = l
        .index()
        .to_u64()
        .ok_or_else(|| Error::ResourceLimit("index of L exceeds u64".into()))?;
    if bound < 2 {
        return Err(Error::Invalid("index bound X must be at least 2".into()));
    }
    if bound <= big_d {
        return Ok(BigRational::zero());
    }
    let inside = count_below(d, (bound - 1) / big_d + 1);
    let all = count_below(d, bound);
    Ok(BigRational::new(BigInt::from(inside), BigInt::from(all)))
}

/// The same probability by walking every sublattice of index `< X`.
pub fn containment_probability_brute(l: &HermiteBasis, bound: u64, cap: u64) -> Result<BigRational> {
    let d = l.dim();
    let (mut inside, mut all) = (0u64, 0u64);
    for n in 1..bound {
        for m in crate::lattice::enumerate_hnf(d, n, cap)? {
            all += 1;
            inside += u64::from(l.contains(&m));
        }
    }
    Ok(BigRational::new(inside.into(), all.into()))
}

/// Probability that `G` embeds in the p-part of `ℤ^d/Λ` for `Λ` uniform of
/// index `< X`. Sublattices split as a p-power part of cotype `μ`, counted
/// by the local coefficient, times a part of index prime to `p`.
pub fn embed_probability_exact(d: usize, g: &AbelianPGroupType, bound: u64) -> Result<BigRational> {
    if d == 0 || bound < 2 {
        return Err(Error::Invalid("need d ≥ 1 and X ≥ 2".into()));
    }
    let p = g.p();
    let table = sublattice_count_table(d, bound);
    if table.iter().any(|&x| x == u128::MAX) {
        return Err(Error::ResourceLimit(format!("sublattice counts below {bound} overflow")));
    }
    // coprime[y] = number of sublattices of index ≤ y prime to p
    let mut coprime = vec![BigInt::zero(); bound as usize];
    for n in 1..bound as usize {
        coprime[n] = coprime[n - 1].clone();
        if n as u64 % p != 0 {
            coprime[n] += BigInt::from(table[n]);
        }
    }
    let mut hits = BigInt::zero();
    let mut pe = 1u64;
    let mut e = 0u32;
    while pe < bound {
        for mu in Partition::of_size(e).into_iter().filter(|m| m.rank() <= d) {
            if embeds_partition(g.lambda(), &mu) {
                let rest = &coprime[((bound - 1) / pe) as usize];
                hits += local_coefficient(d, p, mu.parts())? * rest;
            }
        }
        e += 1;
        pe = match pe.checked_mul(p) {
            Some(x) => x,
            None => break,
        };
    }
    let all: u128 = table.iter().sum();
    Ok(BigRational::new(hits, BigInt::from(all)))
}

// ---------------------------------------------------------------------------
// Tables and comparison

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EmpiricalTable {
    pub counts: BTreeMap<String, u64>,
    pub trials: u64,
}

impl EmpiricalTable {
    pub fn from_labels<I: IntoIterator<Item = String>>(labels: I) -> Self {
        let mut t = Self::default();
        for l in labels {
            *t.counts.entry(l).or_insert(0) += 1;
            t.trials += 1;
        }
        t
    }

    pub fn frequencies(&self) -> BTreeMap<String, f64> {
        self.counts
            .iter()
            .map(|(l, &c)| (l.clone(), c as f64 / self.trials as f64))
            .collect()
    }

    /// Samples outside the singular bucket.
    pub fn nonsingular(&self) -> u64 {
        self.trials - self.counts.get(INFINITE_LABEL).copied().unwrap_or(0)
    }

    /// Relabels anything outside `keep` as [`OTHER_LABEL`].
    pub fn collapse(&self, keep: &[String]) -> Self {
        Self::from_counts(self.counts.iter().map(|(l, &c)| {
            let l = if l == INFINITE_LABEL || keep.contains(l) { l.clone() } else { OTHER_LABEL.to_string() };
            (l, c)
        }))
    }

    fn from_counts<I: IntoIterator<Item = (String, u64)>>(it: I) -> Self {
        let mut t = Self::default();
        for (l, c) in it {
            *t.counts.entry(l).or_insert(0) += c;
            t.trials += c;
        }
        t
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("label,count\n");
        for (l, c) in &self.counts {
            s.push_str(&format!("\"{l}\",{c}\n"));
        }
        s
    }
}

/// Tally of p-Sylow types, singular draws in their own bucket.
pub fn type_table(cfg: &SampleConfig, samples: &[CokernelSample]) -> EmpiricalTable {
    EmpiricalTable::from_labels(samples.iter().map(|s| match &s.p_type {
        Some(l) => cfg.label(l),
        None => INFINITE_LABEL.to_string(),
    }))
}

pub fn rank_label(r: usize) -> String {
    format!("rank {r}")
}

/// Tally of the p-rank of the cokernel.
pub fn rank_table(samples: &[CokernelSample]) -> EmpiricalTable {
    EmpiricalTable::from_labels(samples.iter().map(|s| match &s.p_type {
        Some(l) => rank_label(l.rank()),
        None => INFINITE_LABEL.to_string(),
    }))
}

/// Tally of p-Sylow types of sampled cotypes.
pub fn cotype_table(cfg: &SampleConfig, cotypes: &[Cotype]) -> EmpiricalTable {
    EmpiricalTable::from_labels(cotypes.iter().map(|c| cfg.label(&c.p_part(cfg.p))))
}

/// Predicted p-rank distribution: `Z_d(p, r) − Z_d(p, r−1)`.
pub fn rank_theory(d: usize, p: u64) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    let mut prev = BigRational::zero();
    for r in 0..=d {
        let z = stanley_wang_zd(d, p, r)?;
        out.insert(rank_label(r), (&z - &prev).to_f64().unwrap_or(f64::NAN));
        prev = z;
    }
    Ok(out)
}

/// Predicted p-Sylow type masses for types with parts `≤ max_part`, the
/// remaining mass under [`OTHER_LABEL`].
pub fn type_theory(d: usize, p: u64, max_part: u32) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    let mut total = 0.0;
    for l in Partition::all_bounded(max_part, d) {
        let g = AbelianPGroupType::new(p, l.clone())?;
        let v = rank_d_mass(&g, d)?.value;
        total += v;
        out.insert(l.to_string(), v);
    }
    out.insert(OTHER_LABEL.to_string(), (1.0 - total).max(0.0));
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct LabelRow {
    pub label: String,
    pub count: u64,
    pub freq: f64,
    pub theory: f64,
    pub z: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    /// Draws compared, i.e. excluding the singular bucket.
    pub compared: u64,
    pub excluded_singular: u64,
    pub tv_distance: f64,
    pub sigma_threshold: f64,
    pub per_label: Vec<LabelRow>,
    pub verdict: bool,
    pub note: String,
}

/// `(c − nπ)/√(nπ(1−π))`; a degenerate `π ∈ {0, 1}` gives 0 on exact
/// agreement and infinity otherwise.
pub fn binomial_z(count: u64, n: u64, pi: f64) -> f64 {
    let mean = n as f64 * pi;
    let var = n as f64 * pi * (1.0 - pi);
    if var <= 0.0 {
        return if (count as f64 - mean).abs() < 0.5 { 0.0 } else { f64::INFINITY };
    }
    (count as f64 - mean) / var.sqrt()
}

/// Compares nonsingular draws against `theory`. Every observed label must
/// have a predicted probability; unobserved predicted labels count as zero.
pub fn compare_to_theory(emp: &EmpiricalTable, theory: &BTreeMap<String, f64>, sigma: f64) -> Result<ComparisonReport> {
    let missing: Vec<&String> = emp
        .counts
        .keys()
        .filter(|l| l.as_str() != INFINITE_LABEL && !theory.contains_key(*l))
        .collect();
    if !missing.is_empty() {
        return Err(Error::LabelMismatch(format!("no prediction for {missing:?}")));
    }
    let n = emp.nonsingular();
    let mut tv = 0.0;
    let mut rows = Vec::new();
    for (label, &pi) in theory {
        let count = emp.counts.get(label).copied().unwrap_or(0);
        let freq = if n == 0 { 0.0 } else { count as f64 / n as f64 };
        tv += (freq - pi).abs();
        rows.push(LabelRow {
            label: label.clone(),
            count,
            freq,
            theory: pi,
            z: binomial_z(count, n, pi),
        });
    }
    let verdict = n > 0 && rows.iter().all(|r| r.z.abs() <= sigma);
    Ok(ComparisonReport {
        compared: n,
        excluded_singular: emp.trials - n,
        tv_distance: tv / 2.0,
        sigma_threshold: sigma,
        verdict,
        note: format!(
            "{} cells each tested at {sigma} sigma without multiple-comparison correction; \
             a Bonferroni bound on the family false-alarm rate is {} times the per-cell rate",
            rows.len(),
            rows.len()
        ),
        per_label: rows,
    })
}

/// `P(p-rank ≤ m)` from a rank table against `Z_d(p, m)`.
#[derive(Clone, Debug, Serialize)]
pub struct RankBand {
    pub m: usize,
    pub count: u64,
    pub compared: u64,
    pub freq: f64,
    pub theory: f64,
    pub z: f64,
    pub pass: bool,
}

pub fn rank_bands(emp: &EmpiricalTable, d: usize, p: u64, sigma: f64) -> Result<Vec<RankBand>> {
    let n = emp.nonsingular();
    (0..=d)
        .map(|m| {
            let count: u64 = (0..=m).map(|r| emp.counts.get(&rank_label(r)).copied().unwrap_or(0)).sum();
            let theory = stanley_wang_zd(d, p, m)?.to_f64().unwrap_or(f64::NAN);
            let z = binomial_z(count, n, theory);
            Ok(RankBand {
                m,
                count,
                compared: n,
                freq: count as f64 / n as f64,
                theory,
                z,
                pass: z.abs() <= sigma,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(d: usize, model: Model, trials: u64) -> SampleConfig {
        SampleConfig {
            d,
            model,
            trials,
            master_seed: 7,
            p: 2,
            exponent_cap: None,
        }
    }

    #[test]
    fn exhaustive_one_by_one() {
        let all = exhaustive_cokernel_types(1, 1, 2).unwrap();
        assert_eq!(all.len(), 3);
        let trivial = all.iter().filter(|s| s.p_type.as_ref().is_some_and(Partition::is_empty)).count();
        assert_eq!(trivial, 2);
        assert_eq!(all.iter().filter(|s| s.p_type.is_none()).count(), 1);
    }

    #[test]
    fn one_by_one_p_part() {
        let c = cfg(1, Model::Matrix { k: 50 }, 200);
        for s in sample_cokernel_type(&c).unwrap() {
            if let Some(l) = &s.p_type {
                let a = s.smith.diag[0].to_u64().unwrap();
                assert_eq!(l.size(), crate::arith::valuation(a, 2));
            }
        }
    }

    #[test]
    fn reproducible_across_thread_counts() {
        let c = cfg(2, Model::Matrix { k: 100 }, 2000);
        let a = sample_cokernel_type(&c).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| sample_cokernel_type(&c).unwrap());
        assert_eq!(a, b);
        let s = cfg(2, Model::Sublattice { bound: 50 }, 500);
        assert_eq!(sample_uniform_sublattice(&s).unwrap(), pool.install(|| sample_uniform_sublattice(&s).unwrap()));
    }

    #[test]
    fn containment_examples() {
        let l = HermiteBasis::scalar(1, 2);
        assert_eq!(containment_probability_exact(&l, 11).unwrap(), BigRational::new(1.into(), 2.into()));
        assert!(containment_probability_exact(&l, 2).unwrap().is_zero());
        let l4 = HermiteBasis::scalar(2, 2);
        assert!(containment_probability_exact(&l4, 4).unwrap().is_zero());
        for x in [5u64, 13, 30] {
            for l in [
                HermiteBasis::scalar(2, 2),
                HermiteBasis::from_i64(2, &[2, 1, 0, 3]).unwrap(),
                HermiteBasis::from_i64(2, &[1, 0, 0, 3]).unwrap(),
            ] {
                assert_eq!(
                    containment_probability_exact(&l, x).unwrap(),
                    containment_probability_brute(&l, x, 1 << 20).unwrap()
                );
            }
        }
    }

    #[test]
    fn embed_matches_tally() {
        for (d, bound) in [(2usize, 60u64), (3, 30)] {
            let tally = crate::lattice::tally_cotypes(d, bound, 1 << 24).unwrap();
            for p in [2u64, 3] {
                for parts in [&[][..], &[1], &[1, 1], &[2], &[2, 1]] {
                    let g = AbelianPGroupType::new(p, Partition::new(parts).unwrap()).unwrap();
                    let hits: u64 = tally
                        .counts
                        .iter()
                        .filter(|(c, _)| embeds_partition(g.lambda(), &c.p_part(p)))
                        .map(|(_, &n)| n)
                        .sum();
                    let want = BigRational::new(hits.into(), tally.total().into());
                    assert_eq!(embed_probability_exact(d, &g, bound).unwrap(), want, "d={d} p={p} {parts:?}");
                }
            }
        }
    }

    #[test]
    fn uniform_sampler_small_cases() {
        // d = 2, X = 3: four sublattices, three of cotype (2,1)
        let c = cfg(2, Model::Sublattice { bound: 3 }, 20_000);
        let draws = sample_uniform_sublattice(&c).unwrap();
        let hits = draws.iter().filter(|x| x.alpha() == [2, 1]).count() as u64;
        assert!(binomial_z(hits, 20_000, 0.75).abs() < 4.0);
        let one = cfg(1, Model::Sublattice { bound: 10 }, 1000);
        assert!(sample_uniform_sublattice(&one).unwrap().iter().all(|c| c.corank() <= 1));
        let big = cfg(2, Model::Sublattice { bound: DEFAULT_SUBLATTICE_BOUND + 1 }, 1);
        assert!(matches!(sample_uniform_sublattice(&big), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn comparison_basics() {
        let emp = EmpiricalTable::from_labels(["a", "a", "b", "b"].map(String::from));
        let theory: BTreeMap<String, f64> = [("a".to_string(), 0.5), ("b".to_string(), 0.5)].into();
        let r = compare_to_theory(&emp, &theory, 4.0).unwrap();
        assert_eq!(r.tv_distance, 0.0);
        assert!(r.verdict);
        let partial: BTreeMap<String, f64> = [("a".to_string(), 1.0)].into();
        assert!(matches!(compare_to_theory(&emp, &partial, 4.0), Err(Error::LabelMismatch(_))));
        let f = emp.frequencies();
        assert!((f.values().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(cfg(2, Model::Matrix { k: 0 }, 1).validate().is_err());
        assert!(cfg(2, Model::Matrix { k: 1 }, 0).validate().is_err());
        assert!(cfg(2, Model::Sublattice { bound: 1 }, 1).validate().is_err());
        let mut c = cfg(2, Model::Matrix { k: 1 }, 1);
        c.p = 4;
        assert!(c.validate().is_err());
    }

    #[test]
    fn rank_theory_sums_to_one() {
        let t = rank_theory(3, 2).unwrap();
        assert!((t.values().sum::<f64>() - 1.0).abs() < 1e-12);
        let ty = type_theory(2, 2, 3).unwrap();
        assert!((ty.values().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

//! Bundled identity checks. Each suite compares two independent routes and
//! records the first disagreement it meets as a counterexample.

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::Result;
use crate::groups::{aut_order, aut_order_brute_force, AbelianPGroupType, AutMethod, Partition};
use crate::lattice::{tally_index, Cotype, DEFAULT_MATRIX_CAP};
use crate::poly::IntPolynomial;
use crate::qcomb::{
    descent_poly_determinant, descent_poly_inclusion_exclusion, descent_polys_all_permutations,
    lemma_qid2_sides, lemma_qid_sides, DescentSet, DEFAULT_PERMUTATION_CAP,
};
use crate::zeta::{corank_density_p_factor, local_coefficient, stanley_wang_zd};

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub checks: u64,
    pub failures: u64,
    /// First failing case, if any.
    pub counterexample: Option<String>,
}

impl VerifyReport {
    fn new(suite: &str) -> Self {
        Self {
            suite: suite.to_string(),
            checks: 0,
            failures: 0,
            counterexample: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(describe());
            }
        }
    }
}

/// Perturbs the first right-hand side a suite computes, so the failure path
/// can be exercised end to end.
#[derive(Clone, Copy, Debug, Default)]
pub struct Fault(pub bool);

impl Fault {
    fn apply_poly(&mut self, p: IntPolynomial) -> IntPolynomial {
        if std::mem::take(&mut self.0) {
            p + IntPolynomial::one()
        } else {
            p
        }
    }

    fn apply_int(&mut self, n: BigInt) -> BigInt {
        if std::mem::take(&mut self.0) {
            n + 1
        } else {
            n
        }
    }
}

/// Both q-identities: the first for `n ≤ n_max, e ≤ e_max`, the second for
/// `1 ≤ i ≤ d ≤ d_max`.
pub fn verify_qident(n_max: usize, e_max: usize, d_max: usize, mut fault: Fault) -> Result<VerifyReport> {
    let mut r = VerifyReport::new("qident");
    for n in 0..=n_max {
        for e in 0..=e_max {
            let (lhs, rhs) = lemma_qid_sides(n, e);
            let rhs = fault.apply_poly(rhs);
            r.record(lhs == rhs, || format!("n={n} e={e}: lhs = {lhs}, rhs = {rhs}"));
        }
    }
    for d in 1..=d_max {
        for i in 1..=d {
            let (lhs, rhs) = lemma_qid2_sides(d, i)?;
            let rhs = fault.apply_poly(rhs);
            r.record(lhs == rhs, || format!("d={d} i={i}: lhs = {lhs}, rhs = {rhs}"));
        }
    }
    Ok(r)
}

/// Inclusion-exclusion, permutation and determinant descent polynomials
/// agree for every descent set, `d ≤ d_max`.
pub fn verify_descent(d_max: usize, mut fault: Fault) -> Result<VerifyReport> {
    let mut r = VerifyReport::new("descent");
    for d in 1..=d_max {
        let perms = if d <= DEFAULT_PERMUTATION_CAP {
            Some(descent_polys_all_permutations(d, DEFAULT_PERMUTATION_CAP)?)
        } else {
            None
        };
        for lambda in DescentSet::all(d) {
            let ie = descent_poly_inclusion_exclusion(&lambda);
            let det = fault.apply_poly(descent_poly_determinant(&lambda));
            r.record(ie == det, || format!("d={d} λ={lambda}: inclusion-exclusion {ie}, determinant {det}"));
            if let Some(perms) = &perms {
                let pm = perms.get(&lambda.mask()).cloned().unwrap_or_else(IntPolynomial::zero);
                r.record(ie == pm, || format!("d={d} λ={lambda}: inclusion-exclusion {ie}, permutations {pm}"));
            }
        }
    }
    Ok(r)
}

/// The product formula for the local coefficient against an exact tally of
/// sublattices of index `p^e`, `e ≤ e_max`.
pub fn verify_oracle(d: usize, p: u64, e_max: u32, mut fault: Fault) -> Result<VerifyReport> {
    let mut r = VerifyReport::new("oracle");
    for e in 0..=e_max {
        let tally = tally_index(d, p.pow(e), DEFAULT_MATRIX_CAP)?;
        let mut covered = 0u64;
        for nu in Partition::of_size(e).into_iter().filter(|l| l.rank() <= d) {
            let alpha: Vec<u64> = nu.padded(d).iter().map(|&x| p.pow(x)).collect();
            let cotype = Cotype::new(alpha)?;
            let counted = tally.count(&cotype);
            covered += counted;
            let formula = fault.apply_int(local_coefficient(d, p, nu.parts())?);
            r.record(formula == BigInt::from(counted), || {
                format!("d={d} p={p} ν={nu}: formula {formula}, enumeration {counted}")
            });
        }
        let total = tally.total();
        r.record(covered == total, || {
            format!("d={d} index {}: {total} sublattices but only {covered} have p-power cotypes", p.pow(e))
        });
    }
    Ok(r)
}

/// Closed-form, generating-tuple and brute-force automorphism counts for
/// every p-group type of order `≤ max_order`.
pub fn verify_autorder(primes: &[u64], max_order: u64, mut fault: Fault) -> Result<VerifyReport> {
    let mut r = VerifyReport::new("autorder");
    for &p in primes {
        let mut e = 0u32;
        while p.checked_pow(e).is_some_and(|o| o <= max_order) {
            for lambda in Partition::of_size(e) {
                let g = AbelianPGroupType::new(p, lambda.clone())?;
                let closed = aut_order(&g, AutMethod::ClosedForm);
                let tuple = fault.apply_int(aut_order(&g, AutMethod::TupleIdentity));
                let brute = aut_order_brute_force(&g)?;
                r.record(closed == tuple, || format!("p={p} λ={lambda}: closed form {closed}, tuple identity {tuple}"));
                r.record(closed == brute, || format!("p={p} λ={lambda}: closed form {closed}, brute force {brute}"));
            }
            e += 1;
        }
    }
    Ok(r)
}

/// Stanley–Wang corank probabilities against the density p-factors, as
/// exact rationals, for `d ≤ d_max` and every `m ≤ d`.
pub fn verify_zidentity(d_max: usize, primes: &[u64], mut fault: Fault) -> Result<VerifyReport> {
    let mut r = VerifyReport::new("zidentity");
    for d in 1..=d_max {
        for m in 0..=d {
            for &p in primes {
                let sw = stanley_wang_zd(d, p, m)?;
                let mut density = corank_density_p_factor(d, m, p)?;
                if std::mem::take(&mut fault.0) {
                    density += num_rational::BigRational::from_integer(1.into());
                }
                r.record(sw == density, || format!("d={d} m={m} p={p}: Z = {sw}, density factor = {density}"));
            }
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass() {
        assert!(verify_qident(5, 3, 4, Fault(false)).unwrap().passed());
        assert!(verify_descent(5, Fault(false)).unwrap().passed());
        assert!(verify_oracle(3, 2, 3, Fault(false)).unwrap().passed());
        assert!(verify_autorder(&[2, 3], 16, Fault(false)).unwrap().passed());
        assert!(verify_zidentity(4, &[2, 3], Fault(false)).unwrap().passed());
    }

    #[test]
    fn fault_is_reported() {
        let reports = [
            verify_qident(2, 1, 2, Fault(true)).unwrap(),
            verify_descent(3, Fault(true)).unwrap(),
            verify_oracle(2, 2, 2, Fault(true)).unwrap(),
            verify_autorder(&[2], 8, Fault(true)).unwrap(),
            verify_zidentity(2, &[2], Fault(true)).unwrap(),
        ];
        for r in reports {
            assert_eq!(r.failures, 1, "{}", r.suite);
            assert!(r.counterexample.is_some());
        }
    }
}

use std::collections::BTreeMap;

use serde::Serialize;

use cotype::euler::EulerProductValue;
use cotype::lattice::tally_cotypes;
use cotype::qcomb::DescentSet;
use cotype::sim::{
    compare_to_theory, cotype_table, exhaustive_cokernel_types, rank_bands, rank_label, rank_table,
    rank_theory, sample_cokernel_type, sample_uniform_sublattice, type_table, type_theory, ComparisonReport,
    EmpiricalTable, Model, RankBand, SampleConfig,
};
use cotype::verify::{verify_autorder, verify_descent, verify_oracle, verify_qident, verify_zidentity, Fault};
use cotype::zeta::{
    corank_density, corank_zeta_residue, local_coefficient, local_factor, stanley_wang_spots, theta_d, PFactorSpot,
};
use cotype::{Error, Result};

use crate::{Command, DensityArgs, Outcome, SimModel, Suite, TallyArgs, TallyFormat, ZetaAction, ZetaArgs};

const EXACT: &str = "exact";
const TRUNCATED: &str = "truncated Euler product with tail bound";
const SPOT_PRIMES: [u64; 4] = [2, 3, 5, 7];

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("output serializes") + "\n"
}

fn done(primary: String) -> Outcome {
    Outcome {
        primary,
        summary: None,
        verify_failed: None,
    }
}

pub fn run(cmd: &Command, cap: u64) -> Result<Outcome> {
    match cmd {
        Command::Tally(a) => tally(a, cap),
        Command::Density(a) => density(a),
        Command::Verify(v) => verify(&v.suite, Fault(v.inject_fault)),
        Command::Simulate(s) => simulate(&s.model),
        Command::Zeta(z) => zeta(z),
        Command::Replay(_) => Err(Error::Invalid("replay is handled by the driver".into())),
    }
}

#[derive(Serialize)]
struct TallySummary {
    d: usize,
    bound: u64,
    bound_convention: &'static str,
    total: u64,
    corank_at_most: Vec<u64>,
}

fn tally(a: &TallyArgs, cap: u64) -> Result<Outcome> {
    let t = tally_cotypes(a.d, a.x, cap)?;
    let export = t.export();
    let summary = TallySummary {
        d: export.d,
        bound: export.bound,
        bound_convention: export.bound_convention,
        total: export.total,
        corank_at_most: export.corank_at_most.clone(),
    };
    let primary = match a.format {
        TallyFormat::Json => json(&export),
        TallyFormat::Csv => t.to_csv(),
    };
    Ok(Outcome {
        primary,
        summary: Some(json(&summary)),
        verify_failed: None,
    })
}

#[derive(Serialize)]
struct Tagged<T: Serialize> {
    provenance: &'static str,
    #[serde(flatten)]
    inner: T,
}

fn tag_euler(v: EulerProductValue) -> Tagged<EulerProductValue> {
    let provenance = if v.tail_bound == 0.0 { EXACT } else { TRUNCATED };
    Tagged { provenance, inner: v }
}

#[derive(Serialize)]
struct DensityReport {
    d: usize,
    m: usize,
    prime_cutoff: u64,
    corank_density: Tagged<EulerProductValue>,
    corank_zeta_residue: Tagged<EulerProductValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta_d: Option<Tagged<EulerProductValue>>,
    local_z: Vec<Tagged<PFactorSpot>>,
}

fn density(a: &DensityArgs) -> Result<Outcome> {
    let theta = if a.m == 1 && a.d >= 2 {
        Some(tag_euler(theta_d(a.d, a.cutoff)?))
    } else {
        None
    };
    let report = DensityReport {
        d: a.d,
        m: a.m,
        prime_cutoff: a.cutoff,
        corank_density: tag_euler(corank_density(a.d, a.m, a.cutoff)?),
        corank_zeta_residue: tag_euler(corank_zeta_residue(a.d, a.m, a.cutoff)?),
        theta_d: theta,
        local_z: stanley_wang_spots(a.d, a.m, &SPOT_PRIMES)?
            .into_iter()
            .map(|s| Tagged {
                provenance: EXACT,
                inner: s,
            })
            .collect(),
    };
    Ok(done(json(&report)))
}

fn verify(suite: &Suite, fault: Fault) -> Result<Outcome> {
    let report = match suite {
        Suite::Qident { n, e, d } => verify_qident(*n, *e, *d, fault)?,
        Suite::Descent { d } => verify_descent(*d, fault)?,
        Suite::Oracle { d, p, emax } => verify_oracle(*d, *p, *emax, fault)?,
        Suite::Autorder { max_order, primes } => verify_autorder(primes, *max_order, fault)?,
        Suite::Zidentity { d, primes } => verify_zidentity(*d, primes, fault)?,
    };
    let failed = (!report.passed()).then(|| report.counterexample.clone().unwrap_or_default());
    Ok(Outcome {
        primary: json(&report),
        summary: None,
        verify_failed: failed,
    })
}

#[derive(Serialize)]
struct Section {
    empirical: EmpiricalTable,
    theory: BTreeMap<String, f64>,
    comparison: ComparisonReport,
}

fn section(emp: EmpiricalTable, theory: BTreeMap<String, f64>, sigma: f64) -> Result<Section> {
    let comparison = compare_to_theory(&emp, &theory, sigma)?;
    Ok(Section {
        empirical: emp,
        theory,
        comparison,
    })
}

#[derive(Serialize)]
struct SimReport {
    config: SampleConfig,
    exhaustive: bool,
    rank: Section,
    rank_bands: Vec<RankBand>,
    types: Section,
    /// Exact outcome fractions, exhaustive mode only.
    #[serde(skip_serializing_if = "Option::is_none")]
    exact_frequencies: Option<BTreeMap<String, String>>,
    verdict: bool,
}

fn exact_fractions(t: &EmpiricalTable) -> BTreeMap<String, String> {
    t.counts
        .iter()
        .map(|(l, &c)| {
            let r = num_rational::Ratio::new(c, t.trials);
            (l.clone(), format!("{}/{}", r.numer(), r.denom()))
        })
        .collect()
}

fn simulate(model: &SimModel) -> Result<Outcome> {
    let report = match *model {
        SimModel::Matrix {
            d,
            k,
            p,
            trials,
            seed,
            exhaustive,
            max_part,
            sigma,
        } => {
            let mut cfg = SampleConfig {
                d,
                model: Model::Matrix { k },
                trials: trials.max(1),
                master_seed: seed,
                p,
                exponent_cap: Some(max_part),
            };
            cfg.validate()?;
            let samples = if exhaustive {
                let s = exhaustive_cokernel_types(d, k, p)?;
                cfg.trials = s.len() as u64;
                s
            } else {
                sample_cokernel_type(&cfg)?
            };
            let ranks = rank_table(&samples);
            let types = type_table(&cfg, &samples);
            let exact = exhaustive.then(|| {
                let mut m = exact_fractions(&ranks);
                m.extend(exact_fractions(&types));
                m
            });
            finish(cfg, exhaustive, ranks, types, exact, sigma)?
        }
        SimModel::Sublattice {
            d,
            x,
            p,
            trials,
            seed,
            max_part,
            sigma,
        } => {
            let cfg = SampleConfig {
                d,
                model: Model::Sublattice { bound: x },
                trials,
                master_seed: seed,
                p,
                exponent_cap: Some(max_part),
            };
            let cotypes = sample_uniform_sublattice(&cfg)?;
            let ranks = EmpiricalTable::from_labels(cotypes.iter().map(|c| rank_label(c.p_part(p).rank())));
            let types = cotype_table(&cfg, &cotypes);
            finish(cfg, false, ranks, types, None, sigma)?
        }
    };
    Ok(done(json(&report)))
}

fn finish(
    cfg: SampleConfig,
    exhaustive: bool,
    ranks: EmpiricalTable,
    types: EmpiricalTable,
    exact: Option<BTreeMap<String, String>>,
    sigma: f64,
) -> Result<SimReport> {
    let max_part = cfg.exponent_cap.unwrap_or(3);
    let bands = rank_bands(&ranks, cfg.d, cfg.p, sigma)?;
    let rank = section(ranks, rank_theory(cfg.d, cfg.p)?, sigma)?;
    let types = section(types, type_theory(cfg.d, cfg.p, max_part)?, sigma)?;
    let verdict = rank.comparison.verdict && types.comparison.verdict;
    Ok(SimReport {
        config: cfg,
        exhaustive,
        rank,
        rank_bands: bands,
        types,
        exact_frequencies: exact,
        verdict,
    })
}

#[derive(Serialize)]
struct LocalFactorJson {
    d: usize,
    local_factor: String,
    numerator: Vec<NumeratorTerm>,
}

#[derive(Serialize)]
struct NumeratorTerm {
    lambda: String,
    w: String,
}

#[derive(Serialize)]
struct CoeffJson {
    d: usize,
    p: u64,
    nu: Vec<u32>,
    provenance: &'static str,
    coefficient: String,
}

fn zeta(z: &ZetaArgs) -> Result<Outcome> {
    match &z.action {
        ZetaAction::PrintLocal { json: as_json } => {
            let lf = local_factor(z.d)?;
            if *as_json {
                let numerator = lf
                    .numerator()
                    .iter()
                    .map(|(&mask, w)| NumeratorTerm {
                        lambda: DescentSet::from_mask(z.d, mask).to_string(),
                        w: w.to_string(),
                    })
                    .collect();
                Ok(done(json(&LocalFactorJson {
                    d: z.d,
                    local_factor: lf.to_string(),
                    numerator,
                })))
            } else {
                Ok(done(format!("{lf}\n")))
            }
        }
        ZetaAction::Coeff { p, nu, json: as_json } => {
            if !cotype::arith::is_prime(*p) {
                return Err(Error::Invalid(format!("{p} is not prime")));
            }
            let c = local_coefficient(z.d, *p, nu)?;
            if *as_json {
                Ok(done(json(&CoeffJson {
                    d: z.d,
                    p: *p,
                    nu: nu.clone(),
                    provenance: EXACT,
                    coefficient: c.to_string(),
                })))
            } else {
                Ok(done(format!("{c}\n")))
            }
        }
    }
}

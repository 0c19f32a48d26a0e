//! The verification suites run by `verify`: subadditivity and the block
//! bound for every potential of a scenario, and the measure-kernel checks.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::Point;
use crate::error::{Error, Result};
use crate::measures::{check_empirical_recursion, check_metric_axioms, WeakStarMetric, KERNEL_TOL};
use crate::potentials::{
    check_subadditivity, lemma_sub_check, SubadditivePotential, LEMMA_SUB_TOL, SUBADDITIVITY_TOL,
};
use crate::scenarios::Scenario;

pub const SUBADDITIVITY_SAMPLES: usize = 1000;
/// Upper bound on `n + m` in the subadditivity samples, and on `n` in the
/// block-bound and recursion checks.
pub const VERIFY_HORIZON: usize = 1000;
pub const LEMMA_BLOCKS: [usize; 4] = [1, 2, 5, 10];
pub const LEMMA_POINTS: usize = 100;
pub const METRIC_TRIPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Subadditivity,
    LemmaSub,
    MetricAxioms,
    EmpiricalRecursion,
}

impl Check {
    pub const ALL: [Check; 4] = [
        Check::Subadditivity,
        Check::LemmaSub,
        Check::MetricAxioms,
        Check::EmpiricalRecursion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Subadditivity => "subadditivity",
            Check::LemmaSub => "lemma-sub",
            Check::MetricAxioms => "metric-axioms",
            Check::EmpiricalRecursion => "empirical-recursion",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::unknown("check", s, Check::ALL.map(Check::name)))
    }
}

/// One line of a verification run: the worst observed defect for one check
/// on one target, against its tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub check: Check,
    /// Potential label, `l=<l>:<label>`, or the metric/system label.
    pub target: String,
    pub statistic: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Runs `checks` on `scenario`. Sampling is seeded by `seed`; `x0` is the
/// base point of the recursion check (a seeded sample if absent).
pub fn run_checks(
    scenario: &Scenario,
    checks: &[Check],
    seed: u64,
    x0: Option<Point>,
) -> Result<Vec<CheckOutcome>> {
    run_checks_on(scenario, &scenario.potentials, checks, seed, x0)
}

/// As [`run_checks`], with the potential suites applied to `potentials`
/// instead of the scenario's own. Tabulated potentials are checked up to
/// the end of their table.
pub fn run_checks_on(
    scenario: &Scenario,
    potentials: &[SubadditivePotential],
    checks: &[Check],
    seed: u64,
    x0: Option<Point>,
) -> Result<Vec<CheckOutcome>> {
    let system = &scenario.system;
    let space = system.space();
    let metric = WeakStarMetric::default_for(space);
    let mut out = Vec::new();
    for &check in checks {
        match check {
            Check::Subadditivity => {
                for phi in potentials {
                    let r = check_subadditivity(
                        phi,
                        system,
                        SUBADDITIVITY_SAMPLES,
                        VERIFY_HORIZON,
                        seed,
                    )?;
                    out.push(CheckOutcome {
                        check,
                        target: phi.label().to_string(),
                        statistic: r.max_violation,
                        tolerance: SUBADDITIVITY_TOL,
                        passed: r.passed,
                    });
                }
            }
            Check::LemmaSub => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let points: Vec<Point> =
                    (0..LEMMA_POINTS).map(|_| space.sample(&mut rng)).collect();
                for phi in potentials {
                    let top = phi
                        .max_horizon()
                        .map_or(VERIFY_HORIZON, |h| h.min(VERIFY_HORIZON));
                    let horizons: Vec<usize> = (1..=top).collect();
                    for l in LEMMA_BLOCKS.into_iter().filter(|&l| 2 * l <= top) {
                        let r = lemma_sub_check(phi, system, l, &points, &horizons)?;
                        out.push(CheckOutcome {
                            check,
                            target: format!("l={l}:{}", phi.label()),
                            statistic: r.max_violation,
                            tolerance: LEMMA_SUB_TOL,
                            passed: r.passed,
                        });
                    }
                }
            }
            Check::MetricAxioms => {
                let r = check_metric_axioms(&metric, METRIC_TRIPLES, seed)?;
                out.push(CheckOutcome {
                    check,
                    target: format!("dist*:{space}"),
                    statistic: r.max_triangle_violation,
                    tolerance: KERNEL_TOL,
                    passed: r.passed,
                });
            }
            Check::EmpiricalRecursion => {
                let x = match x0 {
                    Some(x) => x,
                    None => space.sample(&mut ChaCha8Rng::seed_from_u64(seed)),
                };
                let r = check_empirical_recursion(system, &metric, x, VERIFY_HORIZON)?;
                out.push(CheckOutcome {
                    check,
                    target: system.label().to_string(),
                    statistic: r.max_defect,
                    tolerance: KERNEL_TOL,
                    passed: r.passed,
                });
            }
        }
    }
    Ok(out)
}

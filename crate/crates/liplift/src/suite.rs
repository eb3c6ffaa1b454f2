//! Randomized property battery behind `liplift suite`.

use std::sync::Arc;

use liplift_core::lifting::{composition_norm_bound, LiftingMatrix, LipOperator};
use liplift_core::{
    build_lifting, composition_lifting, continuity_modulus_check, scalar, verify_commutation,
    DeLeeuwMatrix, FreeVector, LipschitzFunction, PointMap, PointedMetricSpace, SpaceRef,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cli::{CliError, Tolerances};
use crate::format;
use crate::text::TextScalar;

/// Continuity triples sampled per trial.
pub const CONTINUITY_TRIALS: usize = 5;

#[derive(Clone, Debug)]
pub struct SuiteConfig<S> {
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub inject_fault: bool,
    pub tolerances: Tolerances<S>,
}

#[derive(Clone, Debug)]
pub struct Failure<S> {
    /// Name of the library operation whose property failed.
    pub property: &'static str,
    pub trial: usize,
    pub observed: S,
    pub threshold: S,
    /// The fixture that failed, in the text file formats.
    pub witness: String,
}

#[derive(Clone, Debug)]
pub enum SuiteResult<S> {
    Passed { checks: usize },
    Failed(Failure<S>),
}

/// Adds one to the first entry, so that the lifting no longer commutes.
pub fn corrupt<S: TextScalar>(
    lifting: &LiftingMatrix<S>,
    domain: &SpaceRef<S>,
    codomain: &SpaceRef<S>,
) -> LiftingMatrix<S> {
    let mut matrix = lifting.matrix().clone();
    if matrix.rows() > 0 && matrix.cols() > 0 {
        matrix[(0, 0)] = matrix[(0, 0)].clone() + S::one();
    }
    LiftingMatrix::new(domain, codomain, matrix).expect("shape unchanged")
}

struct Trial<'a, S> {
    index: usize,
    tols: &'a Tolerances<S>,
    checks: usize,
    spaces: Vec<(&'static str, SpaceRef<S>)>,
    operator: Option<LipOperator<S>>,
    lifting: Option<LiftingMatrix<S>>,
}

impl<S: TextScalar> Trial<'_, S> {
    /// Fails when `observed > threshold`.
    fn check(
        &mut self,
        property: &'static str,
        observed: S,
        threshold: S,
    ) -> Result<(), Failure<S>> {
        self.checks += 1;
        if observed.exceeds(&threshold) {
            return Err(Failure {
                property,
                trial: self.index,
                observed,
                threshold,
                witness: self.witness(),
            });
        }
        Ok(())
    }

    fn witness(&self) -> String {
        let mut out = String::new();
        for (name, space) in &self.spaces {
            out.push_str(&format!("space {name}\n"));
            out.push_str(&format::write_space(space));
        }
        if let Some(op) = &self.operator {
            out.push_str(&format::write_operator(op, "domain", "codomain"));
        }
        if let (Some(op), Some(l)) = (&self.operator, &self.lifting) {
            out.push_str(&format::write_lifting(
                l,
                op.domain(),
                op.codomain(),
                "domain",
                "codomain",
            ));
        }
        out
    }
}

fn random_nonzero<S: TextScalar>(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> S {
    loop {
        let r = S::sample(rng, lo, hi);
        if !r.is_zero() {
            return r;
        }
    }
}

pub fn run_suite<S: TextScalar>(config: &SuiteConfig<S>) -> Result<SuiteResult<S>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let tols = &config.tolerances;
    let sizes = &config.sizes;
    let mut checks = 0;
    for t in 0..config.trials {
        let m_size = sizes[t % sizes.len()];
        let n_size = sizes[(t / sizes.len() + t) % sizes.len()];
        let mut trial = Trial {
            index: t,
            tols,
            checks: 0,
            spaces: Vec::new(),
            operator: None,
            lifting: None,
        };
        match run_trial(&mut rng, &mut trial, m_size, n_size, config) {
            Ok(()) => checks += trial.checks,
            Err(TrialError::Failed(f)) => return Ok(SuiteResult::Failed(f)),
            Err(TrialError::Cli(e)) => return Err(e),
        }
    }
    Ok(SuiteResult::Passed { checks })
}

enum TrialError<S> {
    Failed(Failure<S>),
    Cli(CliError),
}

impl<S> From<Failure<S>> for TrialError<S> {
    fn from(f: Failure<S>) -> Self {
        TrialError::Failed(f)
    }
}

impl<S> From<liplift_core::Error> for TrialError<S> {
    fn from(e: liplift_core::Error) -> Self {
        TrialError::Cli(e.into())
    }
}

impl<S> From<liplift_core::MetricError> for TrialError<S> {
    fn from(e: liplift_core::MetricError) -> Self {
        TrialError::Cli(liplift_core::Error::from(e).into())
    }
}

fn run_trial<S: TextScalar>(
    rng: &mut ChaCha8Rng,
    trial: &mut Trial<'_, S>,
    m_size: usize,
    n_size: usize,
    config: &SuiteConfig<S>,
) -> Result<(), TrialError<S>> {
    let tols = trial.tols;
    let m: SpaceRef<S> = Arc::new(PointedMetricSpace::random(rng, m_size)?);
    let n: SpaceRef<S> = Arc::new(PointedMetricSpace::random(rng, n_size)?);
    trial.spaces = vec![("domain", m.clone()), ("codomain", n.clone())];

    let f = LipschitzFunction::random(rng, m.clone());
    let embedded = DeLeeuwMatrix::new(m.clone()).apply(&f)?;
    let defect = (scalar::max_abs(&embedded) - f.lip_norm()).abs();
    trial.check("apply_de_leeuw", defect, tols.tol.clone())?;

    let mu = FreeVector::random(rng, m.clone());
    trial.check("duality_gap", mu.duality_gap()?, tols.gap_tol.clone())?;

    let op = LipOperator::random(rng, m.clone(), n.clone());
    let norm = op.operator_norm()?;
    let mut lifting = build_lifting(&op, &tols.epsilon)?;
    if config.inject_fault {
        lifting = corrupt(&lifting, &m, &n);
    }
    trial.operator = Some(op.clone());
    trial.lifting = Some(lifting.clone());

    let unit = LipschitzFunction::random_unit_ball(rng, m.clone());
    let image_norm = op.apply(&unit)?.lip_norm();
    trial.check("operator_norm", image_norm, norm.clone() + tols.tol.clone())?;

    let com = verify_commutation(&op, &lifting)?;
    trial.check("verify_commutation", com.residual, tols.tol.clone())?;

    let bound = norm + tols.epsilon.clone() + tols.tol.clone();
    trial.check("lifting_norm", lifting.norm(), bound)?;

    let seed = config.seed ^ (trial.index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    let violation = continuity_modulus_check(&op, CONTINUITY_TRIALS, seed)?;
    trial.check("continuity_modulus_check", violation, tols.tol.clone())?;

    // Composition with a bijection onto the domain.
    let source: SpaceRef<S> = Arc::new(PointedMetricSpace::random(rng, m_size)?);
    let gamma = PointMap::random_bijection(rng, source.clone(), m.clone()).expect("equal sizes");
    let r: S = random_nonzero(rng, -2.0, 2.0);
    let comp = LipOperator::composition(&gamma, &r)?;
    let mut explicit = composition_lifting(&gamma, &r)?;
    if config.inject_fault {
        explicit = corrupt(&explicit, &m, &source);
    }
    trial.spaces = vec![("domain", m.clone()), ("codomain", source.clone())];
    trial.operator = Some(comp.clone());
    trial.lifting = Some(explicit.clone());
    let com = verify_commutation(&comp, &explicit)?;
    trial.check("verify_commutation", com.residual, tols.tol.clone())?;
    let bound = composition_norm_bound(&gamma, &r);
    let miss = (explicit.norm() - bound.clone()).abs();
    trial.check("composition_lifting", miss, tols.tol.clone())?;
    let generic = build_lifting(&comp, &tols.epsilon)?;
    trial.lifting = Some(generic.clone());
    trial.check("build_lifting", generic.norm(), bound + tols.tol.clone())?;
    Ok(())
}

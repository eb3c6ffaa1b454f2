//! Argument surface and command implementations.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use liplift_core::lifting::{assemble_lifting, lifting_row, LiftingMatrix, LipOperator};
use liplift_core::{
    build_lifting, composition_lifting, lp, verify_commutation, DeLeeuwMatrix, FreeVector,
    LinearProgram, LpError, LpOptions, MetricError, PairSet, PointMap, PointedMetricSpace,
    Rational, Scalar, Sense, SpaceRef,
};
use rayon::prelude::*;
use thiserror::Error;

use crate::format::{self, FormatError, InputFile};
use crate::report::RunReport;
use crate::suite;
use crate::text::TextScalar;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_METRIC: u8 = 2;
pub const EXIT_USAGE: u8 = 3;
pub const EXIT_LP: u8 = 4;
pub const EXIT_SUITE: u8 = 5;

#[derive(Parser, Debug)]
#[command(
    name = "liplift",
    version,
    about = "Lipschitz norms, free-space norms and operator liftings on finite pointed metric spaces"
)]
pub struct Cli {
    /// Arithmetic used for every computation.
    #[arg(long, value_enum, default_value_t = Mode::Float, global = true)]
    pub mode: Mode,

    /// Tolerance for residuals and norm comparisons (float mode only; rational mode uses 0).
    #[arg(long, default_value_t = 1e-8, global = true)]
    pub tol: f64,

    /// Tolerance for free-norm duality gaps (float mode only).
    #[arg(long, default_value_t = 1e-9, global = true)]
    pub gap_tol: f64,

    /// Slack allowed above the operator norm when accepting a lifting.
    #[arg(long, default_value = "0", global = true, allow_hyphen_values = true)]
    pub epsilon: String,

    /// Seed of the `suite` battery.
    #[arg(long, default_value_t = 42, global = true)]
    pub seed: u64,

    /// Append matrices and witnesses to the report.
    #[arg(long, global = true)]
    pub emit_matrices: bool,

    /// Write the simplex pivot log of the free-norm LP to FILE (`freenorm` only).
    #[arg(long, value_name = "FILE", global = true)]
    pub lp_trace: Option<PathBuf>,

    /// Worker threads for per-pair lifting LPs.
    #[arg(long, default_value_t = 1, global = true)]
    pub jobs: usize,

    /// Largest number of points accepted in any space.
    #[arg(long, env = "LIPLIFT_MAX_POINTS", default_value_t = liplift_core::metric_space::DEFAULT_POINT_CAP, global = true)]
    pub max_points: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Float,
    Rational,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a space file and check the metric axioms.
    Validate { space: PathBuf },
    /// Lipschitz norm of a function file.
    Lipnorm { function: PathBuf },
    /// Free norm, minimal molecular representation and duality gap of a free-vector file.
    Freenorm { vector: PathBuf },
    /// De Leeuw matrix of a space, optionally applied to a function.
    Deleeuw {
        space: PathBuf,
        #[arg(long)]
        function: Option<PathBuf>,
    },
    /// Operator norm of an operator file, with the attaining pair and witness.
    Opnorm { operator: PathBuf },
    /// Build a minimal lifting of an operator and check it.
    Lift {
        operator: PathBuf,
        /// Write the lifting file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Composition operator f -> r (f o gamma) from SOURCE to TARGET and its explicit lifting.
    LiftCompose {
        /// Space on which gamma is defined.
        source: PathBuf,
        /// Space gamma maps into.
        target: PathBuf,
        /// Target labels of gamma, one per source point in file order.
        #[arg(long, value_delimiter = ',', required = true)]
        map: Vec<String>,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        r: String,
    },
    /// Check a lifting file against an operator file.
    Verify { operator: PathBuf, lifting: PathBuf },
    /// Generate the ultrametric cube {0,1}^depth.
    GenUltrametric {
        #[arg(long)]
        depth: u32,
        /// Write the space file here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized property battery.
    Suite {
        /// Point counts drawn for the random spaces.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Corrupt every lifting before it is checked.
        #[arg(long)]
        inject_fault: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Lipnorm { .. } => "lipnorm",
            Command::Freenorm { .. } => "freenorm",
            Command::Deleeuw { .. } => "deleeuw",
            Command::Opnorm { .. } => "opnorm",
            Command::Lift { .. } => "lift",
            Command::LiftCompose { .. } => "lift-compose",
            Command::Verify { .. } => "verify",
            Command::GenUltrametric { .. } => "gen-ultrametric",
            Command::Suite { .. } => "suite",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Format(FormatError),
    #[error("{message} (witness: {witness})")]
    Metric { message: String, witness: String },
    #[error("linear program failed: {0}")]
    Lp(LpError),
    #[error("{0}")]
    Core(liplift_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl From<liplift_core::Error> for CliError {
    fn from(e: liplift_core::Error) -> Self {
        match e {
            liplift_core::Error::Lp(e) => CliError::Lp(e),
            e => CliError::Core(e),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Metric {
                path,
                labels,
                source,
            } => CliError::Metric {
                message: format!("{path}: {source}"),
                witness: metric_witness(&source, &labels),
            },
            e => CliError::Format(e),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Metric { .. } => EXIT_METRIC,
            CliError::Lp(_) => EXIT_LP,
            _ => EXIT_USAGE,
        }
    }
}

/// Witness points of a metric violation, by label.
pub fn metric_witness(err: &MetricError, labels: &[String]) -> String {
    let l = |i: &usize| labels.get(*i).cloned().unwrap_or_else(|| format!("#{i}"));
    match err {
        MetricError::NonzeroDiagonal { i } => l(i),
        MetricError::AsymmetricMatrix { i, j }
        | MetricError::NegativeDistance { i, j }
        | MetricError::ZeroDistanceDistinctPoints { i, j } => format!("{} {}", l(i), l(j)),
        MetricError::TriangleViolation { i, j, k } => format!("{} {} {}", l(i), l(j), l(k)),
        MetricError::DuplicateLabel { first, second } => format!("{} {}", l(first), l(second)),
        other => other.to_string(),
    }
}

pub struct Outcome {
    pub report: RunReport,
    pub code: u8,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match cli.mode {
        Mode::Float => Runner::<f64>::new(cli)?.run(),
        Mode::Rational => Runner::<Rational>::new(cli)?.run(),
    }
}

/// Effective tolerances of a run.
#[derive(Clone, Debug)]
pub struct Tolerances<S> {
    pub tol: S,
    pub gap_tol: S,
    pub epsilon: S,
}

impl<S: TextScalar> Tolerances<S> {
    pub fn echo(&self, report: &mut RunReport) {
        report.set("tol", self.tol.render());
        report.set("gap_tol", self.gap_tol.render());
        report.set("epsilon", self.epsilon.render());
    }
}

struct Runner<'a, S> {
    cli: &'a Cli,
    tols: Tolerances<S>,
    report: RunReport,
}

fn mode_name<S: Scalar>() -> &'static str {
    S::MODE
}

fn pair_label<S: Scalar>(space: &PointedMetricSpace<S>, (x, y): (usize, usize)) -> String {
    format!("({},{})", space.label(x), space.label(y))
}

fn lines<I: IntoIterator<Item = String>>(items: I) -> String {
    items.into_iter().map(|l| l + "\n").collect()
}

fn labelled<S: TextScalar>(space: &PointedMetricSpace<S>, values: &[S]) -> String {
    lines(
        space
            .non_base_points()
            .zip(values)
            .map(|(p, v)| format!("{} {}", space.label(p), v.render())),
    )
}

fn pairs_with_values<S: TextScalar>(
    space: &PointedMetricSpace<S>,
    pairs: &PairSet,
    values: &[S],
) -> String {
    lines(
        pairs
            .iter()
            .zip(values)
            .map(|(pair, v)| format!("{} {}", pair_label(space, pair), v.render())),
    )
}

fn matrix_rows<S: TextScalar>(m: &liplift_core::Matrix<S>) -> String {
    lines(m.iter_rows().map(|row| {
        row.iter()
            .map(TextScalar::render)
            .collect::<Vec<_>>()
            .join(" ")
    }))
}

/// Lifting rows keyed by codomain pair, columns listed first.
fn lifting_body<S: TextScalar>(
    lifting: &LiftingMatrix<S>,
    domain: &PointedMetricSpace<S>,
    codomain: &PointedMetricSpace<S>,
) -> String {
    let text = format::write_lifting(lifting, domain, codomain, "-", "-");
    text.split_once('\n')
        .map(|(_, rest)| rest.to_string())
        .unwrap_or_default()
}

/// Path to `target` as it should be written in a file placed at `file`.
fn reference_from(file: &Path, target: &str) -> String {
    let target = Path::new(target);
    let dir = file
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let canonical = |p: &Path| fs::canonicalize(p).ok();
    if let (Some(dir), Some(abs)) = (canonical(dir), canonical(target)) {
        if let Ok(rel) = abs.strip_prefix(&dir) {
            return rel.display().to_string();
        }
        return abs.display().to_string();
    }
    target.display().to_string()
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

impl<'a, S: TextScalar> Runner<'a, S> {
    fn new(cli: &'a Cli) -> Result<Self, CliError> {
        let float_tol = |name: &str, v: f64| -> Result<S, CliError> {
            if !(v.is_finite() && v >= 0.0) {
                return Err(CliError::Usage(format!(
                    "--{name} must be a nonnegative number"
                )));
            }
            Ok(if S::EXACT {
                S::zero()
            } else {
                S::from_f64(v).expect("finite")
            })
        };
        let tol = float_tol("tol", cli.tol)?;
        let gap_tol = float_tol("gap-tol", cli.gap_tol)?;
        let epsilon =
            S::parse_token(&cli.epsilon).map_err(|m| CliError::Usage(format!("--epsilon: {m}")))?;
        if epsilon.is_negative() {
            return Err(CliError::Usage("--epsilon must be nonnegative".into()));
        }
        if cli.jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        let tols = Tolerances {
            tol,
            gap_tol,
            epsilon,
        };
        let mut report = RunReport::new(cli.command.name(), mode_name::<S>());
        tols.echo(&mut report);
        Ok(Self { cli, tols, report })
    }

    fn run(mut self) -> Result<Outcome, CliError> {
        let code = match &self.cli.command {
            Command::Validate { space } => self.validate(space)?,
            Command::Lipnorm { function } => self.lipnorm(function)?,
            Command::Freenorm { vector } => self.freenorm(vector)?,
            Command::Deleeuw { space, function } => self.deleeuw(space, function.as_deref())?,
            Command::Opnorm { operator } => self.opnorm(operator)?,
            Command::Lift { operator, out } => self.lift(operator, out.as_deref())?,
            Command::LiftCompose {
                source,
                target,
                map,
                r,
            } => self.lift_compose(source, target, map, r)?,
            Command::Verify { operator, lifting } => self.verify(operator, lifting)?,
            Command::GenUltrametric { depth, out } => {
                self.gen_ultrametric(*depth, out.as_deref())?
            }
            Command::Suite {
                sizes,
                trials,
                inject_fault,
            } => self.suite(sizes, *trials, *inject_fault)?,
        };
        Ok(Outcome {
            report: self.report,
            code,
        })
    }

    fn emit(&self) -> bool {
        self.cli.emit_matrices
    }

    fn check_cap(&self, space: &PointedMetricSpace<S>) -> Result<(), CliError> {
        if space.len() > self.cli.max_points {
            return Err(CliError::Usage(
                MetricError::CapExceeded {
                    points: space.len(),
                    cap: self.cli.max_points,
                }
                .to_string(),
            ));
        }
        Ok(())
    }

    fn status(&mut self, ok: bool) -> u8 {
        self.report.set("status", if ok { "ok" } else { "failed" });
        if ok {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }

    fn inputs(&mut self, files: &[InputFile]) {
        self.report.inputs(files);
    }

    fn validate(&mut self, path: &Path) -> Result<u8, CliError> {
        let input = format::read_input(path)?;
        self.report.input(&input);
        match format::parse_space::<S>(&input) {
            Ok(space) => {
                self.check_cap(&space)?;
                self.report.set("status", "valid");
                self.report.set("points", space.len());
                self.report.set("base", space.label(space.base()));
                self.report.set("ultrametric", space.is_ultrametric());
                let diameter = space
                    .distances()
                    .iter_rows()
                    .flatten()
                    .fold(S::zero(), |acc, d| S::max_of(acc, d.clone()));
                self.report.set("diameter", diameter.render());
                if self.emit() {
                    self.report.block("space", format::write_space(&space));
                }
                Ok(EXIT_OK)
            }
            Err(FormatError::Metric { labels, source, .. }) => {
                self.report.set("status", "invalid");
                self.report.set("violation", &source);
                self.report.set("witness", metric_witness(&source, &labels));
                Ok(EXIT_METRIC)
            }
            Err(e) => Err(e.into()),
        }
    }

    fn space(&mut self, path: &Path) -> Result<SpaceRef<S>, CliError> {
        let loaded = format::load_space::<S>(path)?;
        self.inputs(&loaded.inputs);
        self.check_cap(&loaded.value)?;
        Ok(loaded.value)
    }

    fn lipnorm(&mut self, path: &Path) -> Result<u8, CliError> {
        let loaded = format::load_function::<S>(path)?;
        self.inputs(&loaded.inputs);
        let f = loaded.value;
        self.check_cap(f.space())?;
        let space = f.space().clone();
        let image = liplift_core::apply_de_leeuw(&f);
        let pairs = space.pair_set();
        self.report.set("lip_norm", f.lip_norm().render());
        let mut best: Option<(usize, &S)> = None;
        for (i, v) in image.iter().enumerate() {
            if best.is_none_or(|(_, b)| v.abs() > b.abs()) {
                best = Some((i, v));
            }
        }
        if let Some((i, _)) = best {
            self.report
                .set("attained_at", pair_label(&space, pairs.get(i)));
        }
        if self.emit() {
            self.report
                .block("de_leeuw_image", pairs_with_values(&space, &pairs, &image));
        }
        Ok(EXIT_OK)
    }

    fn freenorm(&mut self, path: &Path) -> Result<u8, CliError> {
        let loaded = format::load_free_vector::<S>(path)?;
        self.inputs(&loaded.inputs);
        let mu = loaded.value;
        self.check_cap(mu.space())?;
        let space = mu.space().clone();
        let norm = mu.free_norm_with_witness()?;
        let rep = mu.optimal_representation()?;
        let gap = (norm.value.clone() - rep.l1_value.clone()).abs();
        self.report.set("free_norm", norm.value.render());
        self.report.set("min_l1", rep.l1_value.render());
        self.report.set("duality_gap", gap.render());
        if let Some(trace) = &self.cli.lp_trace {
            self.trace_free_norm(&mu, trace)?;
        }
        if self.emit() {
            self.report
                .block("witness", labelled(&space, norm.witness.values()));
            let support: Vec<String> = rep
                .pairs
                .iter()
                .zip(&rep.coeffs)
                .filter(|(_, c)| !c.is_zero())
                .map(|(pair, c)| format!("{} {}", pair_label(&space, pair), c.render()))
                .collect();
            self.report.block("decomposition", lines(support));
        }
        let ok = !gap.exceeds(&self.tols.gap_tol);
        Ok(self.status(ok))
    }

    /// Re-solves the free-norm LP with pivot logging enabled.
    fn trace_free_norm(&mut self, mu: &FreeVector<S>, path: &Path) -> Result<(), CliError> {
        let log = if mu.space().dim() == 0 {
            String::from("no variables: the space has a single point\n")
        } else {
            let (g, h) = liplift_core::free_space::lipschitz_ball(mu.space());
            let program = LinearProgram::new(Sense::Maximize, mu.coeffs().to_vec())
                .with_ineq(g, h)
                .all_free();
            let opts = LpOptions {
                trace: true,
                ..LpOptions::default()
            };
            lp::solve_lp_with(&program, &opts)
                .map_err(CliError::Lp)?
                .trace
                .unwrap_or_default()
        };
        write_file(path, &log)?;
        self.report.set("lp_trace", path.display());
        Ok(())
    }

    fn deleeuw(&mut self, space: &Path, function: Option<&Path>) -> Result<u8, CliError> {
        let space = self.space(space)?;
        let matrix = DeLeeuwMatrix::new(space.clone());
        self.report.set("rows", matrix.matrix().rows());
        self.report.set("cols", matrix.matrix().cols());
        self.report.set("rank", matrix.matrix().rank());
        let mut ok = true;
        if let Some(path) = function {
            let loaded = format::load_function::<S>(path)?;
            self.inputs(&loaded.inputs);
            let f = loaded.value;
            let image = matrix.apply(&f)?;
            let max_abs = liplift_core::scalar::max_abs(&image);
            let lip = f.lip_norm();
            let defect = (max_abs.clone() - lip.clone()).abs();
            self.report.set("lip_norm", lip.render());
            self.report.set("image_max_abs", max_abs.render());
            self.report.set("isometry_defect", defect.render());
            ok = !defect.exceeds(&self.tols.tol);
            if self.emit() {
                self.report.block(
                    "de_leeuw_image",
                    pairs_with_values(&space, matrix.pairs(), &image),
                );
            }
        }
        if self.emit() {
            let mut body = String::from("columns");
            for p in space.non_base_points() {
                body.push(' ');
                body.push_str(space.label(p));
            }
            body.push('\n');
            for (pair, row) in matrix.pairs().iter().zip(matrix.matrix().iter_rows()) {
                let values: Vec<String> = row.iter().map(TextScalar::render).collect();
                body.push_str(
                    &format!("{} {}\n", pair_label(&space, pair), values.join(" "))
                        .replace(" \n", "\n"),
                );
            }
            self.report.block("matrix de_leeuw", body);
        }
        Ok(self.status(ok))
    }

    fn operator(&mut self, path: &Path) -> Result<(LipOperator<S>, Vec<InputFile>), CliError> {
        let loaded = format::load_operator::<S>(path)?;
        self.inputs(&loaded.inputs);
        self.check_cap(loaded.value.domain())?;
        self.check_cap(loaded.value.codomain())?;
        Ok((loaded.value, loaded.inputs))
    }

    fn opnorm(&mut self, path: &Path) -> Result<u8, CliError> {
        let (op, _) = self.operator(path)?;
        let cert = op.operator_norm_certificate()?;
        self.report.set("operator_norm", cert.norm.render());
        if let Some(pair) = cert.pair {
            self.report
                .set("attained_at", pair_label(op.codomain(), pair));
        }
        self.report
            .set("witness_lip_norm", cert.witness.lip_norm().render());
        let image = op.apply(&cert.witness)?;
        self.report
            .set("witness_image_lip_norm", image.lip_norm().render());
        if self.emit() {
            self.report
                .block("matrix operator", matrix_rows(op.matrix()));
            self.report
                .block("witness", labelled(op.domain(), cert.witness.values()));
        }
        Ok(EXIT_OK)
    }

    fn build(&self, op: &LipOperator<S>) -> Result<LiftingMatrix<S>, CliError> {
        if self.cli.jobs == 1 {
            return Ok(build_lifting(op, &self.tols.epsilon)?);
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.cli.jobs)
            .build()
            .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
        let pairs: Vec<(usize, usize)> = op.codomain().pair_set().iter().collect();
        let opts = LpOptions::default();
        let rows = pool.install(|| {
            pairs
                .par_iter()
                .map(|&(p, q)| lifting_row(op, p, q, &opts))
                .collect::<liplift_core::Result<Vec<_>>>()
        })?;
        Ok(assemble_lifting(op, rows)?)
    }

    /// Reports the lifting checks and returns whether they hold.
    fn check_lifting(
        &mut self,
        op: &LipOperator<S>,
        lifting: &LiftingMatrix<S>,
    ) -> Result<bool, CliError> {
        let norm = op.operator_norm()?;
        let lnorm = lifting.norm();
        let com = verify_commutation(op, lifting)?;
        let bound = norm.clone() + self.tols.epsilon.clone() + self.tols.tol.clone();
        let residual_ok = !com.residual.exceeds(&self.tols.tol);
        let bound_ok = !lnorm.exceeds(&bound);
        self.report.set("operator_norm", norm.render());
        self.report.set("lifting_norm", lnorm.render());
        self.report
            .set("commutation_residual", com.residual.render());
        self.report.set("basis_bound", com.basis_bound.render());
        self.report.set("lifting_rank", lifting.rank());
        self.report.set("residual_ok", residual_ok);
        self.report.set("norm_bound_ok", bound_ok);
        if self.emit() {
            self.report.block(
                "matrix lifting",
                lifting_body(lifting, op.domain(), op.codomain()),
            );
        }
        Ok(residual_ok && bound_ok)
    }

    fn lift(&mut self, path: &Path, out: Option<&Path>) -> Result<u8, CliError> {
        let (op, inputs) = self.operator(path)?;
        let lifting = self.build(&op)?;
        let ok = self.check_lifting(&op, &lifting)?;
        if let Some(out) = out {
            let text = format::write_lifting(
                &lifting,
                op.domain(),
                op.codomain(),
                &reference_from(out, &inputs[1].path),
                &reference_from(out, &inputs[2].path),
            );
            write_file(out, &text)?;
            self.report.set("lifting_file", out.display());
        }
        Ok(self.status(ok))
    }

    fn lift_compose(
        &mut self,
        source: &Path,
        target: &Path,
        map: &[String],
        r: &str,
    ) -> Result<u8, CliError> {
        let n_space = self.space(source)?;
        let m_space = self.space(target)?;
        let r = S::parse_token(r).map_err(|m| CliError::Usage(format!("--r: {m}")))?;
        let images = map
            .iter()
            .map(|label| {
                m_space.index_of(label).ok_or_else(|| {
                    CliError::Usage(format!("--map: unknown target label `{label}`"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let gamma = PointMap::new(n_space.clone(), m_space.clone(), images)?;
        let op = LipOperator::composition(&gamma, &r)?;
        let explicit = composition_lifting(&gamma, &r)?;
        let bound = liplift_core::lifting::composition_norm_bound(&gamma, &r);
        let generic = build_lifting(&op, &self.tols.epsilon)?;
        self.report.set("r", r.render());
        self.report.set("composition_bound", bound.render());
        let ok = self.check_lifting(&op, &explicit)?;
        let explicit_norm = explicit.norm();
        let generic_norm = generic.norm();
        let exact_ok = !(explicit_norm.clone() - bound.clone())
            .abs()
            .exceeds(&self.tols.tol);
        let generic_ok = !generic_norm.exceeds(&(bound + self.tols.tol.clone()));
        self.report
            .set("generic_lifting_norm", generic_norm.render());
        self.report.set("bound_attained", exact_ok);
        self.report.set("generic_within_bound", generic_ok);
        Ok(self.status(ok && exact_ok && generic_ok))
    }

    fn verify(&mut self, operator: &Path, lifting: &Path) -> Result<u8, CliError> {
        let (op, _) = self.operator(operator)?;
        let loaded = format::load_lifting::<S>(lifting)?;
        self.inputs(&loaded.inputs);
        let (domain, codomain, lifting) = loaded.value;
        if *domain != **op.domain() || *codomain != **op.codomain() {
            return Err(CliError::Usage(
                "lifting file and operator file refer to different spaces".into(),
            ));
        }
        let ok = self.check_lifting(&op, &lifting)?;
        Ok(self.status(ok))
    }

    fn gen_ultrametric(&mut self, depth: u32, out: Option<&Path>) -> Result<u8, CliError> {
        let space = PointedMetricSpace::<S>::ultrametric_cube(depth, self.cli.max_points)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let ultra = space.is_ultrametric();
        self.report.set("depth", depth);
        self.report.set("points", space.len());
        self.report.set("ultrametric", ultra);
        let text = format::write_space(&space);
        if let Some(out) = out {
            write_file(out, &text)?;
            self.report.set("space_file", out.display());
        }
        if self.emit() {
            self.report.block("space", text);
        }
        Ok(self.status(ultra))
    }

    fn suite(
        &mut self,
        sizes: &[usize],
        trials: usize,
        inject_fault: bool,
    ) -> Result<u8, CliError> {
        if sizes.is_empty() {
            return Err(CliError::Usage(
                "--sizes must list at least one size".into(),
            ));
        }
        if let Some(&bad) = sizes.iter().find(|&&n| n == 0 || n > self.cli.max_points) {
            return Err(CliError::Usage(format!(
                "--sizes: {bad} is outside 1..={}",
                self.cli.max_points
            )));
        }
        self.report.set("seed", self.cli.seed);
        self.report.set(
            "sizes",
            sizes
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(","),
        );
        self.report.set("trials", trials);
        self.report.set("inject_fault", inject_fault);
        let config = suite::SuiteConfig {
            seed: self.cli.seed,
            sizes: sizes.to_vec(),
            trials,
            inject_fault,
            tolerances: self.tols.clone(),
        };
        match suite::run_suite(&config)? {
            suite::SuiteResult::Passed { checks } => {
                self.report.set("checks", checks);
                self.report.set("status", "ok");
                Ok(EXIT_OK)
            }
            suite::SuiteResult::Failed(failure) => {
                self.report.set("status", "failed");
                self.report.set("failed_property", failure.property);
                self.report.set("trial", failure.trial);
                self.report.set("observed", failure.observed.render());
                self.report.set("threshold", failure.threshold.render());
                self.report.block("witness", failure.witness);
                Ok(EXIT_SUITE)
            }
        }
    }
}

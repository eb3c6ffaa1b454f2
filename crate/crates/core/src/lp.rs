//! Dense two-phase simplex with Bland's rule.
//!
//! Problems are stated in the general form
//!
//! ```text
//! optimize   c . x
//! subject to A x  = b
//!            G x <= h
//!            x_j >= l_j   (or x_j free)
//! ```
//!
//! and reduced internally to `min c' y, A' y = b', y >= 0` by shifting
//! bounded variables, splitting free ones and adding one slack per
//! inequality. Pivoting uses Bland's smallest-index rule for both the
//! entering and the leaving variable, so the result is a deterministic
//! function of the input.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::error::LpError;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Feasibility and duality tolerance of the float backend.
pub const FLOAT_FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LinearProgram<S> {
    pub sense: Sense,
    pub objective: Vec<S>,
    pub eq_matrix: Matrix<S>,
    pub eq_rhs: Vec<S>,
    pub ineq_matrix: Matrix<S>,
    pub ineq_rhs: Vec<S>,
    /// `Some(l)` for `x_j >= l`, `None` for a free variable.
    pub lower_bounds: Vec<Option<S>>,
}

impl<S: Scalar> LinearProgram<S> {
    /// A problem over `n` nonnegative variables with no constraints yet.
    pub fn new(sense: Sense, objective: Vec<S>) -> Self {
        let n = objective.len();
        Self {
            sense,
            objective,
            eq_matrix: Matrix::zeros(0, n),
            eq_rhs: Vec::new(),
            ineq_matrix: Matrix::zeros(0, n),
            ineq_rhs: Vec::new(),
            lower_bounds: vec![Some(S::zero()); n],
        }
    }

    pub fn with_eq(mut self, a: Matrix<S>, b: Vec<S>) -> Self {
        self.eq_matrix = a;
        self.eq_rhs = b;
        self
    }

    pub fn with_ineq(mut self, g: Matrix<S>, h: Vec<S>) -> Self {
        self.ineq_matrix = g;
        self.ineq_rhs = h;
        self
    }

    pub fn with_lower_bounds(mut self, bounds: Vec<Option<S>>) -> Self {
        self.lower_bounds = bounds;
        self
    }

    pub fn all_free(self) -> Self {
        let n = self.objective.len();
        self.with_lower_bounds(vec![None; n])
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn check_dimensions(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.eq_matrix.cols() != n && self.eq_matrix.rows() > 0 {
            return Err(LpError::DimensionMismatch("equality matrix columns"));
        }
        if self.eq_matrix.rows() != self.eq_rhs.len() {
            return Err(LpError::DimensionMismatch("equality right-hand side"));
        }
        if self.ineq_matrix.cols() != n && self.ineq_matrix.rows() > 0 {
            return Err(LpError::DimensionMismatch("inequality matrix columns"));
        }
        if self.ineq_matrix.rows() != self.ineq_rhs.len() {
            return Err(LpError::DimensionMismatch("inequality right-hand side"));
        }
        if self.lower_bounds.len() != n {
            return Err(LpError::DimensionMismatch("lower bounds"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct LpOptions {
    pub max_iterations: usize,
    /// Record every pivot and tableau in [`LpSolution::trace`].
    pub trace: bool,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            trace: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution<S> {
    pub status: LpStatus,
    /// Objective value in the caller's sense (`Optimal` only).
    pub value: Option<S>,
    /// Basic optimal point (`Optimal`), empty otherwise.
    pub primal: Vec<S>,
    /// Multipliers of the equality rows (`Optimal`).
    pub eq_duals: Vec<S>,
    /// Multipliers of the inequality rows (`Optimal`).
    pub ineq_duals: Vec<S>,
    /// `b . y_eq + h . y_ineq + sum_j l_j (c_j - (A^T y)_j)` over bounded
    /// variables; equals `value` at optimality.
    pub dual_value: Option<S>,
    /// `Unbounded`: an improving ray in the original variables.
    /// `Infeasible`: phase-one multipliers over the equality rows followed by
    /// the inequality rows.
    pub certificate: Option<Vec<S>>,
    pub iterations: usize,
    pub trace: Option<String>,
}

impl<S: Scalar> LpSolution<S> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

pub fn solve_lp<S: Scalar>(lp: &LinearProgram<S>) -> Result<LpSolution<S>, LpError> {
    solve_lp_with(lp, &LpOptions::default())
}

pub fn solve_lp_with<S: Scalar>(
    lp: &LinearProgram<S>,
    opts: &LpOptions,
) -> Result<LpSolution<S>, LpError> {
    lp.check_dimensions()?;
    let std = StandardForm::build(lp);
    let mut tab = Tableau::phase_one(&std, opts);

    tab.run(Phase::One)?;
    let infeasibility = -tab.objective_rhs();
    if exceeds_feasibility_tol(&infeasibility) {
        let farkas = tab.row_multipliers(|_| S::one());
        let certificate = std.unflip(&farkas);
        return Ok(tab.finish(LpSolution {
            status: LpStatus::Infeasible,
            value: None,
            primal: Vec::new(),
            eq_duals: Vec::new(),
            ineq_duals: Vec::new(),
            dual_value: None,
            certificate: Some(certificate),
            iterations: 0,
            trace: None,
        }));
    }
    tab.drive_out_artificials()?;
    tab.install_costs(&std.cost);

    if let Some(entering) = tab.run(Phase::Two)? {
        let ray_std = tab.ray(entering);
        let mut ray = std.to_original(&ray_std, false);
        if ray.iter().all(|v| v.is_zero()) {
            ray = ray_std;
        }
        return Ok(tab.finish(LpSolution {
            status: LpStatus::Unbounded,
            value: None,
            primal: Vec::new(),
            eq_duals: Vec::new(),
            ineq_duals: Vec::new(),
            dual_value: None,
            certificate: Some(ray),
            iterations: 0,
            trace: None,
        }));
    }

    let y_std = tab.row_multipliers(|_| S::zero());
    let mut y = std.unflip(&y_std);
    if lp.sense == Sense::Maximize {
        y = y.into_iter().map(|v| -v).collect();
    }
    let primal = std.to_original(&tab.basic_solution(), true);
    let value = dot(&lp.objective, &primal);
    let eq_rows = lp.eq_matrix.rows();
    let ineq_duals = y.split_off(eq_rows);
    let eq_duals = y;
    let dual_value = dual_objective(lp, &eq_duals, &ineq_duals);
    Ok(tab.finish(LpSolution {
        status: LpStatus::Optimal,
        value: Some(value),
        primal,
        eq_duals,
        ineq_duals,
        dual_value: Some(dual_value),
        certificate: None,
        iterations: 0,
        trace: None,
    }))
}

fn exceeds_feasibility_tol<S: Scalar>(residual: &S) -> bool {
    if S::EXACT {
        residual.is_positive()
    } else {
        residual.to_f64() > FLOAT_FEASIBILITY_TOL
    }
}

/// Reduced costs `c_j - (A^T y_eq + G^T y_ineq)_j` of the original variables.
pub fn reduced_costs<S: Scalar>(lp: &LinearProgram<S>, eq_duals: &[S], ineq_duals: &[S]) -> Vec<S> {
    (0..lp.num_vars())
        .map(|j| {
            let mut r = lp.objective[j].clone();
            for (i, y) in eq_duals.iter().enumerate() {
                r = r - y.clone() * lp.eq_matrix[(i, j)].clone();
            }
            for (i, y) in ineq_duals.iter().enumerate() {
                r = r - y.clone() * lp.ineq_matrix[(i, j)].clone();
            }
            r
        })
        .collect()
}

fn dual_objective<S: Scalar>(lp: &LinearProgram<S>, eq_duals: &[S], ineq_duals: &[S]) -> S {
    let mut v = dot(eq_duals, &lp.eq_rhs) + dot(ineq_duals, &lp.ineq_rhs);
    for (r, l) in reduced_costs(lp, eq_duals, ineq_duals)
        .into_iter()
        .zip(&lp.lower_bounds)
    {
        if let Some(l) = l {
            v = v + r * l.clone();
        }
    }
    v
}

pub(crate) fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// How an original variable maps onto standard-form columns.
#[derive(Clone, Debug)]
enum VarMap<S> {
    Shifted { col: usize, lower: S },
    Split { pos: usize, neg: usize },
}

struct StandardForm<S> {
    a: Matrix<S>,
    b: Vec<S>,
    cost: Vec<S>,
    vars: Vec<VarMap<S>>,
    /// `-1` where a row was negated to make its right-hand side nonnegative.
    flips: Vec<bool>,
}

impl<S: Scalar> StandardForm<S> {
    fn build(lp: &LinearProgram<S>) -> Self {
        let n = lp.num_vars();
        let mut vars = Vec::with_capacity(n);
        let mut ncols = 0;
        for bound in &lp.lower_bounds {
            match bound {
                Some(l) => {
                    vars.push(VarMap::Shifted {
                        col: ncols,
                        lower: l.clone(),
                    });
                    ncols += 1;
                }
                None => {
                    vars.push(VarMap::Split {
                        pos: ncols,
                        neg: ncols + 1,
                    });
                    ncols += 2;
                }
            }
        }
        let m_eq = lp.eq_matrix.rows();
        let m_in = lp.ineq_matrix.rows();
        let slack0 = ncols;
        ncols += m_in;
        let m = m_eq + m_in;

        let sign = match lp.sense {
            Sense::Minimize => S::one(),
            Sense::Maximize => -S::one(),
        };
        let mut cost = vec![S::zero(); ncols];
        for (j, v) in vars.iter().enumerate() {
            let c = sign.clone() * lp.objective[j].clone();
            match v {
                VarMap::Shifted { col, .. } => cost[*col] = c,
                VarMap::Split { pos, neg } => {
                    cost[*pos] = c.clone();
                    cost[*neg] = -c;
                }
            }
        }

        let mut a = Matrix::zeros(m, ncols);
        let mut b = Vec::with_capacity(m);
        for i in 0..m {
            let (row, rhs) = if i < m_eq {
                (lp.eq_matrix.row(i), &lp.eq_rhs[i])
            } else {
                (lp.ineq_matrix.row(i - m_eq), &lp.ineq_rhs[i - m_eq])
            };
            let mut rhs = rhs.clone();
            for (j, v) in vars.iter().enumerate() {
                let coef = &row[j];
                if coef.is_zero() {
                    continue;
                }
                match v {
                    VarMap::Shifted { col, lower } => {
                        a[(i, *col)] = coef.clone();
                        rhs = rhs - coef.clone() * lower.clone();
                    }
                    VarMap::Split { pos, neg } => {
                        a[(i, *pos)] = coef.clone();
                        a[(i, *neg)] = -coef.clone();
                    }
                }
            }
            if i >= m_eq {
                a[(i, slack0 + i - m_eq)] = S::one();
            }
            b.push(rhs);
        }
        let mut flips = vec![false; m];
        for i in 0..m {
            if b[i].is_negative() {
                flips[i] = true;
                b[i] = -b[i].clone();
                for v in a.row_mut(i) {
                    *v = -v.clone();
                }
            }
        }
        Self {
            a,
            b,
            cost,
            vars,
            flips,
        }
    }

    fn unflip(&self, y: &[S]) -> Vec<S> {
        y.iter()
            .zip(&self.flips)
            .map(|(v, &f)| if f { -v.clone() } else { v.clone() })
            .collect()
    }

    /// Maps a standard-form vector back; `shift` adds the lower bounds
    /// (points) or omits them (directions).
    fn to_original(&self, y: &[S], shift: bool) -> Vec<S> {
        self.vars
            .iter()
            .map(|v| match v {
                VarMap::Shifted { col, lower } => {
                    if shift {
                        lower.clone() + y[*col].clone()
                    } else {
                        y[*col].clone()
                    }
                }
                VarMap::Split { pos, neg } => y[*pos].clone() - y[*neg].clone(),
            })
            .collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Phase {
    One,
    Two,
}

/// `rows x (structural + artificial + 1)` tableau with the reduced-cost row
/// stored last. Column `width - 1` is the right-hand side.
struct Tableau<'o, S> {
    t: Matrix<S>,
    basis: Vec<usize>,
    structural: usize,
    iterations: usize,
    opts: &'o LpOptions,
    log: Option<String>,
}

impl<'o, S: Scalar> Tableau<'o, S> {
    fn phase_one(std: &StandardForm<S>, opts: &'o LpOptions) -> Self {
        let m = std.a.rows();
        let n = std.a.cols();
        let width = n + m + 1;
        let mut t = Matrix::zeros(m + 1, width);
        for i in 0..m {
            for j in 0..n {
                t[(i, j)] = std.a[(i, j)].clone();
            }
            t[(i, n + i)] = S::one();
            t[(i, width - 1)] = std.b[i].clone();
        }
        // Phase-one costs: 1 on artificials; price out the artificial basis.
        for j in 0..n {
            let mut r = S::zero();
            for i in 0..m {
                r = r - t[(i, j)].clone();
            }
            t[(m, j)] = r;
        }
        let mut rhs = S::zero();
        for i in 0..m {
            rhs = rhs - t[(i, width - 1)].clone();
        }
        t[(m, width - 1)] = rhs;
        let mut tab = Self {
            t,
            basis: (n..n + m).collect(),
            structural: n,
            iterations: 0,
            opts,
            log: opts.trace.then(String::new),
        };
        tab.dump("phase 1 start");
        tab
    }

    fn m(&self) -> usize {
        self.basis.len()
    }

    fn rhs_col(&self) -> usize {
        self.t.cols() - 1
    }

    fn objective_rhs(&self) -> S {
        self.t[(self.m(), self.rhs_col())].clone()
    }

    fn is_artificial(&self, col: usize) -> bool {
        col >= self.structural
    }

    /// Runs simplex iterations; returns the entering column of an unbounded
    /// direction, if one is found.
    fn run(&mut self, phase: Phase) -> Result<Option<usize>, LpError> {
        let m = self.m();
        let entering_limit = match phase {
            Phase::One => self.structural + m,
            Phase::Two => self.structural,
        };
        loop {
            if self.iterations >= self.opts.max_iterations {
                return Err(LpError::IterationLimit(self.opts.max_iterations));
            }
            let Some(enter) = (0..entering_limit).find(|&j| self.t[(m, j)].is_clearly_negative())
            else {
                return Ok(None);
            };
            let rhs = self.rhs_col();
            let mut leave: Option<(usize, S)> = None;
            for i in 0..m {
                let a = &self.t[(i, enter)];
                if !a.is_clearly_positive() {
                    continue;
                }
                let ratio = self.t[(i, rhs)].clone() / a.clone();
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((k, best)) => {
                        if ratio < best || (ratio == best && self.basis[i] < self.basis[k]) {
                            Some((i, ratio))
                        } else {
                            Some((k, best))
                        }
                    }
                };
            }
            let Some((row, _)) = leave else {
                if phase == Phase::One {
                    // Phase one is bounded below by zero; a missing ratio is numerical.
                    return Err(LpError::NumericalBreakdown {
                        iteration: self.iterations,
                    });
                }
                return Ok(Some(enter));
            };
            self.pivot(row, enter)?;
            if let Some(log) = self.log.as_mut() {
                let _ = writeln!(
                    log,
                    "{phase:?} iteration {}: enter {enter}, leave row {row}",
                    self.iterations
                );
            }
            self.dump("tableau");
        }
    }

    fn pivot(&mut self, row: usize, col: usize) -> Result<(), LpError> {
        let width = self.t.cols();
        let p = self.t[(row, col)].clone();
        if p.abs() <= S::pivot_tol() {
            return Err(LpError::NumericalBreakdown {
                iteration: self.iterations,
            });
        }
        for j in 0..width {
            self.t[(row, j)] = self.t[(row, j)].clone() / p.clone();
        }
        self.t[(row, col)] = S::one();
        for i in 0..self.t.rows() {
            if i == row {
                continue;
            }
            let f = self.t[(i, col)].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..width {
                let delta = f.clone() * self.t[(row, j)].clone();
                self.t[(i, j)] = self.t[(i, j)].clone() - delta;
            }
            self.t[(i, col)] = S::zero();
        }
        self.basis[row] = col;
        self.iterations += 1;
        self.clean_rhs()
    }

    /// Float only: clamp rounding noise on the right-hand side, and fail if
    /// any entry drifted clearly negative.
    fn clean_rhs(&mut self) -> Result<(), LpError> {
        if S::EXACT {
            return Ok(());
        }
        let rhs = self.rhs_col();
        for i in 0..self.m() {
            let v = &self.t[(i, rhs)];
            if v.is_negative() {
                if v.to_f64() < -FLOAT_FEASIBILITY_TOL {
                    return Err(LpError::NumericalBreakdown {
                        iteration: self.iterations,
                    });
                }
                self.t[(i, rhs)] = S::zero();
            }
        }
        Ok(())
    }

    /// Pivots basic artificials (all at level zero after a feasible phase one)
    /// onto structural columns. Rows with no structural entry are redundant and
    /// keep their artificial, which can never leave or re-enter.
    fn drive_out_artificials(&mut self) -> Result<(), LpError> {
        for i in 0..self.m() {
            if !self.is_artificial(self.basis[i]) {
                continue;
            }
            if let Some(j) = (0..self.structural).find(|&j| {
                self.t[(i, j)].is_clearly_positive() || self.t[(i, j)].is_clearly_negative()
            }) {
                self.pivot(i, j)?;
            }
        }
        Ok(())
    }

    /// Replaces the reduced-cost row with phase-two costs priced against the
    /// current basis. Artificial columns cost zero.
    fn install_costs(&mut self, cost: &[S]) {
        let m = self.m();
        let width = self.t.cols();
        let cost_of = |j: usize| {
            if j < cost.len() {
                cost[j].clone()
            } else {
                S::zero()
            }
        };
        for j in 0..width {
            let mut r = if j < width - 1 { cost_of(j) } else { S::zero() };
            for i in 0..m {
                let cb = cost_of(self.basis[i]);
                if !cb.is_zero() {
                    r = r - cb * self.t[(i, j)].clone();
                }
            }
            self.t[(m, j)] = r;
        }
        self.dump("phase 2 start");
    }

    /// Simplex multipliers `y = c_B B^-1` read off the artificial columns,
    /// whose reduced cost is `c_art - y_i`.
    fn row_multipliers(&self, artificial_cost: impl Fn(usize) -> S) -> Vec<S> {
        let m = self.m();
        (0..m)
            .map(|i| artificial_cost(i) - self.t[(m, self.structural + i)].clone())
            .collect()
    }

    fn basic_solution(&self) -> Vec<S> {
        let mut x = vec![S::zero(); self.structural];
        let rhs = self.rhs_col();
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.structural {
                x[b] = self.t[(i, rhs)].clone();
            }
        }
        x
    }

    fn ray(&self, enter: usize) -> Vec<S> {
        let mut d = vec![S::zero(); self.structural];
        d[enter] = S::one();
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.structural {
                d[b] = -self.t[(i, enter)].clone();
            }
        }
        d
    }

    fn dump(&mut self, title: &str) {
        let Some(log) = self.log.as_mut() else { return };
        let _ = writeln!(log, "-- {title} (basis {:?})", self.basis);
        for row in self.t.iter_rows() {
            for (k, v) in row.iter().enumerate() {
                let _ = write!(log, "{}{v}", if k == 0 { "" } else { " " });
            }
            let _ = writeln!(log);
        }
    }

    fn finish(self, mut sol: LpSolution<S>) -> LpSolution<S> {
        sol.iterations = self.iterations;
        sol.trace = self.log;
        sol
    }
}

/// Minimum-ℓ¹ solution of `A x = b`.
#[derive(Clone, Debug)]
pub struct L1Solution<S> {
    pub coeffs: Vec<S>,
    pub value: S,
    /// Equality multipliers: `|A^T y|_inf <= 1` and `b . y = value`.
    pub dual: Vec<S>,
}

/// Minimizes `sum |x_i|` subject to `A x = b` through the split
/// `x = x+ - x-`, `x+, x- >= 0`.
pub fn min_l1<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Result<L1Solution<S>, LpError> {
    min_l1_with(a, b, &LpOptions::default())
}

pub fn min_l1_with<S: Scalar>(
    a: &Matrix<S>,
    b: &[S],
    opts: &LpOptions,
) -> Result<L1Solution<S>, LpError> {
    let n = a.cols();
    if n == 0 {
        return Err(LpError::DimensionMismatch(
            "min_l1 needs at least one column",
        ));
    }
    if a.rows() != b.len() {
        return Err(LpError::DimensionMismatch("min_l1 right-hand side"));
    }
    let mut split = Matrix::zeros(a.rows(), 2 * n);
    for i in 0..a.rows() {
        for j in 0..n {
            split[(i, j)] = a[(i, j)].clone();
            split[(i, n + j)] = -a[(i, j)].clone();
        }
    }
    let lp = LinearProgram::new(Sense::Minimize, vec![S::one(); 2 * n]).with_eq(split, b.to_vec());
    let sol = solve_lp_with(&lp, opts)?;
    match sol.status {
        LpStatus::Infeasible => Err(LpError::NoPreimage),
        LpStatus::Unbounded => Err(LpError::Unbounded),
        LpStatus::Optimal => {
            let coeffs = (0..n)
                .map(|j| sol.primal[j].clone() - sol.primal[n + j].clone())
                .collect();
            Ok(L1Solution {
                coeffs,
                value: sol.value.expect("optimal solutions carry a value"),
                dual: sol.eq_duals,
            })
        }
    }
}

/// Maximum of a linear functional over a polytope.
#[derive(Clone, Debug)]
pub struct MaxSolution<S> {
    pub argmax: Vec<S>,
    pub value: S,
    /// Nonnegative multipliers of the rows of `G`; `G^T w = c`, `h . w = value`.
    pub multipliers: Vec<S>,
}

/// Maximizes `c . x` over `{x free : G x <= h}`.
pub fn max_linear<S: Scalar>(c: &[S], g: &Matrix<S>, h: &[S]) -> Result<MaxSolution<S>, LpError> {
    max_linear_with(c, g, h, &LpOptions::default())
}

pub fn max_linear_with<S: Scalar>(
    c: &[S],
    g: &Matrix<S>,
    h: &[S],
    opts: &LpOptions,
) -> Result<MaxSolution<S>, LpError> {
    if g.cols() != c.len() && g.rows() > 0 {
        return Err(LpError::DimensionMismatch("max_linear constraint columns"));
    }
    let lp = LinearProgram::new(Sense::Maximize, c.to_vec())
        .with_ineq(g.clone(), h.to_vec())
        .all_free();
    let sol = solve_lp_with(&lp, opts)?;
    match sol.status {
        LpStatus::Infeasible => Err(LpError::Infeasible),
        LpStatus::Unbounded => Err(LpError::Unbounded),
        LpStatus::Optimal => Ok(MaxSolution {
            argmax: sol.primal,
            value: sol.value.expect("optimal solutions carry a value"),
            multipliers: sol.ineq_duals,
        }),
    }
}

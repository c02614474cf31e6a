//! Pseudo-bosonic Parseval frames on a uniform grid over `[-L, L]`.
//!
//! With `K f = m f`, `T f = f(· − α)` and `X* = TK`, the families
//! `φ_n = X* e_n`, `ψ_n = X^{-1} e_n`, `φ̃_n = q e_n`, `ψ̃_n = e_n / q`,
//! `q(x) = √(1 − |m(x − α)|²)`, are built from Hermite functions `e_n`.
//! Multiplication and grid-aligned translation are exact on samples; only
//! the derivative in `c = (x + d/dx)/√2` carries discretization error.

use crate::error::{FrameError, Result};
use crate::linalg::CVec;
use crate::scalar::{cabs, creal, lit, to_f64, tol, Real, C};

/// Minimum number of grid nodes.
pub const MIN_POINTS: usize = 64;
/// Margin added to the classical turning point `√(2n+1)` when sizing `L`.
pub const DOMAIN_MARGIN: f64 = 6.0;
/// `|m|` and `q` must stay above this on every node.
pub const DEGENERACY_FLOOR: f64 = 1e-8;
/// Biorthogonality defect accepted when building families.
pub const BIORTHOGONALITY_TOLERANCE: f64 = 1e-9;
/// Slack added to the Hermite-tail bound on the Parseval residual.
pub const PARSEVAL_SLACK: f64 = 1e-8;

/// Uniform nodes `x_i = −L + i h`, `h = 2L/(P − 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid<T> {
    half_width: T,
    points: usize,
    spacing: T,
}

impl<T: Real> Grid<T> {
    pub fn new(half_width: T, points: usize) -> Result<Self> {
        if points < MIN_POINTS {
            return Err(FrameError::InvalidGrid(format!(
                "need at least {MIN_POINTS} nodes, got {points}"
            )));
        }
        if !(half_width.is_finite() && half_width > T::zero()) {
            return Err(FrameError::InvalidGrid(format!(
                "half-width must be positive, got {}",
                to_f64(half_width)
            )));
        }
        let spacing = (half_width + half_width) / lit((points - 1) as f64);
        Ok(Self {
            half_width,
            points,
            spacing,
        })
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    /// `−L + j h` for any integer `j`, including positions off the grid.
    pub fn node(&self, j: i64) -> T {
        -self.half_width + lit::<T>(j as f64) * self.spacing
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.points as i64).map(|j| self.node(j)).collect()
    }

    /// Nodes shifted right by `cells`: `x_i − cells·h`, evaluated as `node(i − cells)`.
    pub fn shifted_nodes(&self, cells: i64) -> Vec<T> {
        (0..self.points as i64).map(|j| self.node(j - cells)).collect()
    }

    /// The integer `k` with `α = k h`.
    pub fn cells_for_shift(&self, alpha: T) -> Result<usize> {
        let k = (alpha / self.spacing).round();
        if k < T::zero() || (alpha - k * self.spacing).abs() > lit::<T>(1e-9) * self.spacing {
            return Err(FrameError::OffGridShift(to_f64(alpha)));
        }
        Ok(to_f64(k) as usize)
    }

    /// Same interval with the spacing halved (`2P − 1` nodes).
    pub fn refined(&self) -> Self {
        Self::new(self.half_width, 2 * self.points - 1).expect("refining a valid grid")
    }
}

/// Samples of a function on a [`Grid`], with the trapezoid inner product
/// `⟨f, g⟩ = h Σ conj(f_i) g_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<T: Real> {
    grid: Grid<T>,
    samples: CVec<T>,
}

impl<T: Real> GridFunction<T> {
    pub fn new(grid: Grid<T>, samples: CVec<T>) -> Result<Self> {
        if samples.len() != grid.points {
            return Err(FrameError::LengthMismatch {
                expected: grid.points,
                found: samples.len(),
            });
        }
        if let Some(i) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(FrameError::NonFinite(i));
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: Grid<T>) -> Self {
        Self {
            grid,
            samples: CVec::zeros(grid.points),
        }
    }

    pub fn from_fn(grid: Grid<T>, f: impl Fn(T) -> C<T>) -> Result<Self> {
        Self::new(grid, CVec::from_iterator(grid.points, grid.nodes().into_iter().map(f)))
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn samples(&self) -> &CVec<T> {
        &self.samples
    }

    pub fn inner(&self, other: &Self) -> C<T> {
        self.samples.dotc(&other.samples) * creal(self.grid.spacing)
    }

    pub fn norm(&self) -> T {
        self.samples.norm() * self.grid.spacing.sqrt()
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.map(|z| z * s),
        }
    }

    /// `self + s·other`.
    pub fn axpy(&mut self, s: C<T>, other: &Self) {
        self.samples.axpy(s, &other.samples, creal(T::one()));
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            grid: self.grid,
            samples: &self.samples - &other.samples,
        }
    }

    /// Pointwise product with `values`.
    pub fn multiply(&self, values: &CVec<T>) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.component_mul(values),
        }
    }

    /// Fourth-order central difference with zero extension beyond the ends.
    pub fn derivative(&self) -> Self {
        let p = self.samples.len();
        let s = &self.samples;
        let at = |j: isize| -> C<T> {
            if j < 0 || j as usize >= p {
                creal(T::zero())
            } else {
                s[j as usize]
            }
        };
        let denom = creal(lit::<T>(12.0) * self.grid.spacing);
        let eight = creal(lit::<T>(8.0));
        let samples = CVec::from_fn(p, |i, _| {
            let i = i as isize;
            (at(i - 2) - eight * at(i - 1) + eight * at(i + 1) - at(i + 2)) / denom
        });
        Self {
            grid: self.grid,
            samples,
        }
    }

    /// `(x f + f′)/√2`.
    pub fn apply_c(&self) -> Self {
        self.apply_c_sign(T::one())
    }

    /// `(x f − f′)/√2`.
    pub fn apply_c_star(&self) -> Self {
        self.apply_c_sign(-T::one())
    }

    fn apply_c_sign(&self, sign: T) -> Self {
        let d = self.derivative();
        let r = lit::<T>(std::f64::consts::FRAC_1_SQRT_2);
        let nodes = self.grid.nodes();
        let samples = CVec::from_fn(self.samples.len(), |i, _| {
            (self.samples[i] * nodes[i] + d.samples[i] * sign) * r
        });
        Self {
            grid: self.grid,
            samples,
        }
    }
}

fn require_domain<T: Real>(n: usize, available: T) -> Result<()> {
    let required = ((2 * n + 1) as f64).sqrt() + DOMAIN_MARGIN;
    if to_f64(available) < required {
        return Err(FrameError::InsufficientDomain {
            n,
            required,
            half_width: to_f64(available),
        });
    }
    Ok(())
}

/// Hermite functions `e_0 … e_{count−1}` at the given abscissae, by the
/// normalized three-term recurrence.
pub fn hermite_values<T: Real>(count: usize, xs: &[T]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let c0 = T::pi().powf(lit(-0.25));
    out.push(xs.iter().map(|&x| c0 * (-(x * x) * lit(0.5)).exp()).collect());
    if count > 1 {
        let s2 = lit::<T>(2.0).sqrt();
        out.push(xs.iter().zip(&out[0]).map(|(&x, &e0)| s2 * x * e0).collect());
    }
    for k in 1..count.saturating_sub(1) {
        let a = lit::<T>(2.0 / (k + 1) as f64).sqrt();
        let b = lit::<T>(k as f64 / (k + 1) as f64).sqrt();
        let next = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| a * x * out[k][i] - b * out[k - 1][i])
            .collect();
        out.push(next);
    }
    out
}

/// `e_n` sampled on the grid.
pub fn hermite_state<T: Real>(n: usize, grid: &Grid<T>) -> Result<GridFunction<T>> {
    Ok(hermite_states(n + 1, grid, 0)?.pop().expect("n + 1 states"))
}

/// `e_n(x − k h)` for `n < count`.
pub fn hermite_states<T: Real>(count: usize, grid: &Grid<T>, shift_cells: usize) -> Result<Vec<GridFunction<T>>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let shift = lit::<T>(shift_cells as f64) * grid.spacing;
    require_domain(count - 1, grid.half_width - shift)?;
    let xs = grid.shifted_nodes(shift_cells as i64);
    hermite_values(count, &xs)
        .into_iter()
        .map(|v| GridFunction::new(*grid, CVec::from_iterator(v.len(), v.into_iter().map(creal))))
        .collect()
}

/// Smooth complex weight `m` with `0 < |m| < 1`.
#[derive(Clone, Debug, PartialEq)]
pub enum MProfile<T: Real> {
    Constant(C<T>),
    /// `base + amplitude · exp(−(x/width)²)`.
    GaussianBump {
        base: C<T>,
        amplitude: C<T>,
        width: T,
    },
    /// Samples at `start + j·step`, linearly interpolated and held constant
    /// beyond the ends. The derivative is taken numerically.
    Tabulated {
        start: T,
        step: T,
        values: Vec<C<T>>,
    },
}

/// How `m′` was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeSource {
    Analytic,
    FiniteDifference,
}

impl DerivativeSource {
    pub fn as_str(self) -> &'static str {
        match self {
            DerivativeSource::Analytic => "analytic",
            DerivativeSource::FiniteDifference => "finite-difference",
        }
    }
}

impl<T: Real> MProfile<T> {
    pub fn value(&self, x: T) -> C<T> {
        match self {
            MProfile::Constant(c) => *c,
            MProfile::GaussianBump { base, amplitude, width } => {
                let u = x / *width;
                *base + *amplitude * (-(u * u)).exp()
            }
            MProfile::Tabulated { start, step, values } => {
                let t = (x - *start) / *step;
                let last = values.len() - 1;
                if t <= T::zero() {
                    values[0]
                } else if t >= lit((last) as f64) {
                    values[last]
                } else {
                    let j = to_f64(t.floor()) as usize;
                    let frac = t - lit(j as f64);
                    values[j] * (T::one() - frac) + values[j + 1] * frac
                }
            }
        }
    }

    pub fn derivative_source(&self) -> DerivativeSource {
        match self {
            MProfile::Tabulated { .. } => DerivativeSource::FiniteDifference,
            _ => DerivativeSource::Analytic,
        }
    }

    /// `m′(x)`; profiles without a closed form use a fourth-order central
    /// difference with step `step`.
    pub fn derivative(&self, x: T, step: T) -> C<T> {
        match self {
            MProfile::Constant(_) => creal(T::zero()),
            MProfile::GaussianBump { amplitude, width, .. } => {
                let u = x / *width;
                *amplitude * ((-(u * u)).exp() * lit::<T>(-2.0) * u / *width)
            }
            MProfile::Tabulated { .. } => {
                let eight = lit::<T>(8.0);
                let two = lit::<T>(2.0);
                (self.value(x - two * step) - self.value(x - step) * eight + self.value(x + step) * eight
                    - self.value(x + two * step))
                    / creal(lit::<T>(12.0) * step)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            MProfile::GaussianBump { width, .. } if !(*width > T::zero()) => {
                Err(FrameError::DegenerateWeight("bump width must be positive".into()))
            }
            MProfile::Tabulated { step, values, .. } if values.len() < 2 || !(*step > T::zero()) => Err(
                FrameError::DegenerateWeight("a table needs two or more values and a positive step".into()),
            ),
            _ => Ok(()),
        }
    }
}

/// The weight `m`, the shift `α = k h`, and the bounds of `|m|` observed on
/// the nodes `x_i` and `x_i − α`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSpec<T: Real> {
    profile: MProfile<T>,
    alpha_cells: usize,
    grid: Grid<T>,
    m_lo: T,
    m_hi: T,
}

impl<T: Real> WeightSpec<T> {
    pub fn new(profile: MProfile<T>, alpha_cells: usize, grid: Grid<T>) -> Result<Self> {
        profile.validate()?;
        if alpha_cells >= grid.points {
            return Err(FrameError::InvalidGrid(format!(
                "shift of {alpha_cells} cells does not fit in {} nodes",
                grid.points
            )));
        }
        let (mut lo, mut hi) = (T::max_value().unwrap_or_else(|| lit(f64::MAX)), T::zero());
        for x in grid.nodes().into_iter().chain(grid.shifted_nodes(alpha_cells as i64)) {
            let a = cabs(profile.value(x));
            lo = lo.min(a);
            hi = hi.max(a);
        }
        let floor = lit::<T>(DEGENERACY_FLOOR);
        if !(lo > floor) || !(T::one() - hi * hi > floor * floor) {
            return Err(FrameError::DegenerateWeight(format!(
                "|m| ranges over [{:e}, {:e}] on the nodes; need 0 < |m| < 1",
                to_f64(lo),
                to_f64(hi)
            )));
        }
        Ok(Self {
            profile,
            alpha_cells,
            grid,
            m_lo: lo,
            m_hi: hi,
        })
    }

    pub fn profile(&self) -> &MProfile<T> {
        &self.profile
    }

    pub fn alpha_cells(&self) -> usize {
        self.alpha_cells
    }

    pub fn alpha(&self) -> T {
        lit::<T>(self.alpha_cells as f64) * self.grid.spacing
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn bounds(&self) -> (T, T) {
        (self.m_lo, self.m_hi)
    }

    /// The same weight on the refined grid with the same `α`.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.profile.clone(), 2 * self.alpha_cells, self.grid.refined())
    }

    /// `m(x_i)`.
    pub fn m_on_nodes(&self) -> CVec<T> {
        self.sample(0, |x| self.profile.value(x))
    }

    /// `m(x_i − α)`.
    pub fn m_shifted(&self) -> CVec<T> {
        self.sample(self.alpha_cells as i64, |x| self.profile.value(x))
    }

    /// `m′(x_i − α)`.
    pub fn dm_shifted(&self) -> CVec<T> {
        let step = self.grid.spacing;
        self.sample(self.alpha_cells as i64, |x| self.profile.derivative(x, step))
    }

    /// `q(x_i) = √(1 − |m(x_i − α)|²)`.
    pub fn q(&self) -> CVec<T> {
        self.m_shifted().map(|m| creal((T::one() - m.norm_sqr()).sqrt()))
    }

    fn sample(&self, cells: i64, f: impl Fn(T) -> C<T>) -> CVec<T> {
        let xs = self.grid.shifted_nodes(cells);
        CVec::from_iterator(xs.len(), xs.into_iter().map(f))
    }
}

/// Exact index shift `(T f)_i = f_{i−k}` with zero fill; negative `k` shifts left.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Translation {
    pub cells: i64,
}

impl Translation {
    pub fn apply<T: Real>(&self, f: &GridFunction<T>) -> GridFunction<T> {
        let p = f.samples.len() as i64;
        let samples = CVec::from_fn(p as usize, |i, _| {
            let j = i as i64 - self.cells;
            if (0..p).contains(&j) {
                f.samples[j as usize]
            } else {
                creal(T::zero())
            }
        });
        GridFunction { grid: f.grid, samples }
    }
}

/// Pointwise multiplication.
#[derive(Clone, Debug, PartialEq)]
pub struct Multiplication<T: Real> {
    pub values: CVec<T>,
}

impl<T: Real> Multiplication<T> {
    pub fn apply(&self, f: &GridFunction<T>) -> GridFunction<T> {
        f.multiply(&self.values)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            values: self.values.map(|z| z.conj()),
        }
    }
}

/// `T f = f(· − α)`.
pub fn op_t<T: Real>(spec: &WeightSpec<T>) -> Translation {
    Translation {
        cells: spec.alpha_cells as i64,
    }
}

/// `K f = m f`.
pub fn op_k<T: Real>(spec: &WeightSpec<T>) -> Multiplication<T> {
    Multiplication {
        values: spec.m_on_nodes(),
    }
}

/// `X* = T K`.
pub fn op_x_star<T: Real>(spec: &WeightSpec<T>, f: &GridFunction<T>) -> GridFunction<T> {
    op_t(spec).apply(&op_k(spec).apply(f))
}

/// `X = K* T^{-1}`, i.e. `X f = conj(m) f(· + α)`.
pub fn op_x<T: Real>(spec: &WeightSpec<T>, f: &GridFunction<T>) -> GridFunction<T> {
    let back = Translation {
        cells: -(spec.alpha_cells as i64),
    };
    op_k(spec).adjoint().apply(&back.apply(f))
}

/// Largest deviation of `X*X f` from `|m(x − α)|² f` and of `X X* f` from
/// `|m|² f`, over nodes untouched by the zero fill.
pub fn multiplication_identity_defects<T: Real>(spec: &WeightSpec<T>, f: &GridFunction<T>) -> (T, T) {
    let k = spec.alpha_cells;
    let p = f.samples.len();
    let xsx = op_x_star(spec, &op_x(spec, f));
    let xxs = op_x(spec, &op_x_star(spec, f));
    let ms = spec.m_shifted();
    let m = spec.m_on_nodes();
    let mut d1 = T::zero();
    let mut d2 = T::zero();
    for i in 0..p {
        if i >= k {
            d1 = d1.max(cabs(xsx.samples[i] - f.samples[i] * ms[i].norm_sqr()));
        }
        if i + k < p {
            d2 = d2.max(cabs(xxs.samples[i] - f.samples[i] * m[i].norm_sqr()));
        }
    }
    (d1, d2)
}

/// The four families up to order `N − 1`, together with the Hermite states
/// they are built from.
#[derive(Clone, Debug)]
pub struct PBFamily<T: Real> {
    pub spec: WeightSpec<T>,
    pub phi: Vec<GridFunction<T>>,
    pub psi: Vec<GridFunction<T>>,
    pub phit: Vec<GridFunction<T>>,
    pub psit: Vec<GridFunction<T>>,
    /// `e_n` on the nodes.
    pub hermite: Vec<GridFunction<T>>,
}

impl<T: Real> PBFamily<T> {
    pub fn order(&self) -> usize {
        self.phi.len()
    }

    pub fn grid(&self) -> &Grid<T> {
        self.spec.grid()
    }

    /// `max |⟨φ_m, ψ_n⟩ − δ_mn|` and the same for `(φ̃, ψ̃)`.
    pub fn biorthogonality_defects(&self) -> (T, T) {
        (gram_defect(&self.phi, &self.psi), gram_defect(&self.phit, &self.psit))
    }

    /// `max |⟨φ_m, ψ̃_n⟩|`; not expected to vanish.
    pub fn cross_overlap(&self) -> T {
        let mut worst = T::zero();
        for a in &self.phi {
            for b in &self.psit {
                worst = worst.max(cabs(a.inner(b)));
            }
        }
        worst
    }

    /// `max |⟨e_m, e_n⟩ − δ_mn|` for the unshifted Hermite states.
    pub fn hermite_defect(&self) -> T {
        gram_defect(&self.hermite, &self.hermite)
    }
}

fn gram_defect<T: Real>(a: &[GridFunction<T>], b: &[GridFunction<T>]) -> T {
    let mut worst = T::zero();
    for (m, fm) in a.iter().enumerate() {
        for (n, gn) in b.iter().enumerate() {
            let target = if m == n { T::one() } else { T::zero() };
            worst = worst.max(cabs(fm.inner(gn) - creal(target)));
        }
    }
    worst
}

/// Builds `φ_n, ψ_n, φ̃_n, ψ̃_n` for `n < order`.
pub fn build_families<T: Real>(spec: &WeightSpec<T>, order: usize) -> Result<PBFamily<T>> {
    if order == 0 {
        return Err(FrameError::EmptyFamily);
    }
    let grid = *spec.grid();
    let hermite = hermite_states(order, &grid, 0)?;
    let shifted = hermite_states(order, &grid, spec.alpha_cells)?;
    let ms = spec.m_shifted();
    let inv_conj = ms.map(|m| creal(T::one()) / m.conj());
    let q = spec.q();
    let inv_q = q.map(|v| creal(T::one()) / v);
    let family = PBFamily {
        phi: shifted.iter().map(|e| e.multiply(&ms)).collect(),
        psi: shifted.iter().map(|e| e.multiply(&inv_conj)).collect(),
        phit: hermite.iter().map(|e| e.multiply(&q)).collect(),
        psit: hermite.iter().map(|e| e.multiply(&inv_q)).collect(),
        hermite,
        spec: spec.clone(),
    };
    let (d1, d2) = family.biorthogonality_defects();
    let worst = d1.max(d2);
    let limit = tol::<T>(BIORTHOGONALITY_TOLERANCE);
    if worst > limit {
        return Err(FrameError::InvariantViolated {
            invariant: "biorthogonality",
            value: to_f64(worst),
            tolerance: to_f64(limit),
        });
    }
    Ok(family)
}

/// `‖f − Σ_{n<N}(⟨φ_n,f⟩φ_n + ⟨φ̃_n,f⟩φ̃_n)‖` with its a-priori bound
/// `‖(I − P_N) X f‖ + ‖(I − P_N) q f‖`, `P_N` the Hermite projector.
#[derive(Clone, Copy, Debug)]
pub struct ParsevalReport<T> {
    pub residual: T,
    pub tail_bound: T,
    /// `Σ |⟨φ_n,f⟩|² + |⟨φ̃_n,f⟩|²` over the truncation.
    pub captured_energy: T,
    pub norm_squared: T,
}

impl<T: Real> ParsevalReport<T> {
    pub fn within_bound(&self) -> bool {
        self.residual <= self.tail_bound + lit(PARSEVAL_SLACK)
    }
}

fn hermite_tail<T: Real>(hermite: &[GridFunction<T>], g: &GridFunction<T>) -> T {
    let mut rest = g.clone();
    for e in hermite {
        let c = e.inner(g);
        rest.axpy(-c, e);
    }
    rest.norm()
}

pub fn parseval_residual<T: Real>(family: &PBFamily<T>, f: &GridFunction<T>) -> Result<ParsevalReport<T>> {
    if f.grid != *family.grid() {
        return Err(FrameError::InvalidGrid(
            "function and family live on different grids".into(),
        ));
    }
    let mut recon = GridFunction::zeros(f.grid);
    let mut captured = T::zero();
    for v in family.phi.iter().chain(&family.phit) {
        let c = v.inner(f);
        captured += c.norm_sqr();
        recon.axpy(c, v);
    }
    let residual = f.sub(&recon).norm();
    let xf = op_x(&family.spec, f);
    let qf = f.multiply(&family.spec.q());
    let tail_bound = hermite_tail(&family.hermite, &xf) + hermite_tail(&family.hermite, &qf);
    let norm = f.norm();
    Ok(ParsevalReport {
        residual,
        tail_bound,
        captured_energy: captured,
        norm_squared: norm * norm,
    })
}

/// `a = c + s_a`, `b = c* + s_b` with pointwise shifts `s_a`, `s_b`.
#[derive(Clone, Debug)]
pub struct LadderPair<T: Real> {
    pub a_shift: CVec<T>,
    pub b_shift: CVec<T>,
    pub derivative_source: DerivativeSource,
}

impl<T: Real> LadderPair<T> {
    pub fn apply_a(&self, f: &GridFunction<T>) -> GridFunction<T> {
        let mut out = f.apply_c();
        out.samples += f.samples.component_mul(&self.a_shift);
        out
    }

    pub fn apply_b(&self, f: &GridFunction<T>) -> GridFunction<T> {
        let mut out = f.apply_c_star();
        out.samples += f.samples.component_mul(&self.b_shift);
        out
    }

    /// `N = b a`.
    pub fn apply_number(&self, f: &GridFunction<T>) -> GridFunction<T> {
        self.apply_b(&self.apply_a(f))
    }
}

fn check_floor<T: Real>(values: &CVec<T>, what: &str) -> Result<()> {
    let floor = lit::<T>(DEGENERACY_FLOOR);
    if let Some(i) = values.iter().position(|z| !(cabs(*z) >= floor)) {
        return Err(FrameError::DegenerateWeight(format!(
            "{what} = {:e} at node {i}",
            to_f64(cabs(values[i]))
        )));
    }
    Ok(())
}

/// `a_φ = c − (α + m′(x−α)/m(x−α))/√2`, `b_φ = c* − (α − m′(x−α)/m(x−α))/√2`.
pub fn ladder_phi<T: Real>(spec: &WeightSpec<T>) -> Result<LadderPair<T>> {
    let m = spec.m_shifted();
    check_floor(&m, "|m(x − α)|")?;
    let log_dm = spec.dm_shifted().component_div(&m);
    let r = creal(lit::<T>(std::f64::consts::FRAC_1_SQRT_2));
    let alpha = creal(spec.alpha());
    Ok(LadderPair {
        a_shift: log_dm.map(|l| -(alpha + l) * r),
        b_shift: log_dm.map(|l| -(alpha - l) * r),
        derivative_source: spec.profile.derivative_source(),
    })
}

/// `a_φ̃ = c − (q′/q)/√2`, `b_φ̃ = c* + (q′/q)/√2` with
/// `q′/q = −Re(conj(m) m′)(x − α) / q²`.
pub fn ladder_tilde<T: Real>(spec: &WeightSpec<T>) -> Result<LadderPair<T>> {
    let q = spec.q();
    check_floor(&q, "q")?;
    let m = spec.m_shifted();
    let dm = spec.dm_shifted();
    let r = lit::<T>(std::f64::consts::FRAC_1_SQRT_2);
    let log_dq: Vec<T> = (0..q.len())
        .map(|i| -(m[i].conj() * dm[i]).re / q[i].re.powi(2))
        .collect();
    Ok(LadderPair {
        a_shift: CVec::from_iterator(q.len(), log_dq.iter().map(|&l| creal(-l * r))),
        b_shift: CVec::from_iterator(q.len(), log_dq.iter().map(|&l| creal(l * r))),
        derivative_source: spec.profile.derivative_source(),
    })
}

/// Relative ladder residuals at order `n`, e.g. `‖a φ_n − √n φ_{n−1}‖ / ‖φ_n‖`.
#[derive(Clone, Copy, Debug)]
pub struct LadderResiduals<T> {
    pub n: usize,
    pub a_phi: T,
    pub b_phi: T,
    pub a_tilde: T,
    pub b_tilde: T,
}

impl<T: Real> LadderResiduals<T> {
    pub fn max(&self) -> T {
        self.a_phi.max(self.b_phi).max(self.a_tilde).max(self.b_tilde)
    }
}

fn lowering_residual<T: Real>(op: &LadderPair<T>, fam: &[GridFunction<T>], n: usize) -> T {
    let mut r = op.apply_a(&fam[n]);
    if n > 0 {
        r.axpy(creal(-lit::<T>(n as f64).sqrt()), &fam[n - 1]);
    }
    r.norm() / fam[n].norm()
}

fn raising_residual<T: Real>(op: &LadderPair<T>, fam: &[GridFunction<T>], n: usize) -> T {
    let mut r = op.apply_b(&fam[n]);
    r.axpy(creal(-lit::<T>((n + 1) as f64).sqrt()), &fam[n + 1]);
    r.norm() / fam[n].norm()
}

/// Residuals for every `n < N − 1` (raising needs `φ_{n+1}`).
pub fn ladder_residuals<T: Real>(
    family: &PBFamily<T>,
    phi_ops: &LadderPair<T>,
    tilde_ops: &LadderPair<T>,
) -> Vec<LadderResiduals<T>> {
    (0..family.order().saturating_sub(1))
        .map(|n| LadderResiduals {
            n,
            a_phi: lowering_residual(phi_ops, &family.phi, n),
            b_phi: raising_residual(phi_ops, &family.phi, n),
            a_tilde: lowering_residual(tilde_ops, &family.phit, n),
            b_tilde: raising_residual(tilde_ops, &family.phit, n),
        })
        .collect()
}

/// `tol(n) = safety · C · h⁴ · max(n, 1)^{3/2}` with `C` fitted to the
/// constant-weight ladder residuals on the same grid, shift and order.
#[derive(Clone, Copy, Debug)]
pub struct DiscretizationTolerance<T> {
    pub constant: T,
    pub spacing: T,
    pub safety: T,
}

/// Constant weight used for calibration.
pub const CALIBRATION_WEIGHT: f64 = 0.6;
/// Multiplier applied on top of the calibrated constant.
pub const CALIBRATION_SAFETY: f64 = 4.0;

impl<T: Real> DiscretizationTolerance<T> {
    pub fn calibrate(grid: &Grid<T>, alpha_cells: usize, order: usize) -> Result<Self> {
        let spec = WeightSpec::new(MProfile::Constant(creal(lit(CALIBRATION_WEIGHT))), alpha_cells, *grid)?;
        let family = build_families(&spec, order)?;
        let rows = ladder_residuals(&family, &ladder_phi(&spec)?, &ladder_tilde(&spec)?);
        let h4 = grid.spacing.powi(4);
        let constant = rows.iter().fold(T::zero(), |acc, r| {
            let n = lit::<T>(r.n.max(1) as f64);
            acc.max(r.max() / (h4 * n * n.sqrt()))
        });
        Ok(Self {
            constant,
            spacing: grid.spacing,
            safety: lit(CALIBRATION_SAFETY),
        })
    }

    pub fn at(&self, n: usize) -> T {
        let nf = lit::<T>(n.max(1) as f64);
        self.safety * self.constant * self.spacing.powi(4) * nf * nf.sqrt()
    }
}

/// `‖N_φ φ_n − n φ_n‖/‖φ_n‖` and the tilde analogue.
#[derive(Clone, Copy, Debug)]
pub struct NumberResiduals<T> {
    pub phi: T,
    pub tilde: T,
}

pub fn number_check<T: Real>(
    family: &PBFamily<T>,
    phi_ops: &LadderPair<T>,
    tilde_ops: &LadderPair<T>,
    n: usize,
) -> Result<NumberResiduals<T>> {
    if n + 1 >= family.order() {
        return Err(FrameError::IndexOutOfRange {
            index: n,
            len: family.order().saturating_sub(1),
        });
    }
    let eig = creal(-lit::<T>(n as f64));
    let residual = |ops: &LadderPair<T>, v: &GridFunction<T>| {
        let mut r = ops.apply_number(v);
        r.axpy(eig, v);
        r.norm() / v.norm()
    };
    Ok(NumberResiduals {
        phi: residual(phi_ops, &family.phi[n]),
        tilde: residual(tilde_ops, &family.phit[n]),
    })
}

/// `H = H₁ + H₂` with `H₁ = Σ E_n ⟨φ_n,·⟩φ_n` and `H₂ = Σ Ẽ_n ⟨φ̃_n,·⟩φ̃_n`,
/// where `Ẽ_n` is the weight of `Φ_{−(n+1)} = φ̃_n`.
#[derive(Clone, Debug)]
pub struct SplitHamiltonian<'a, T: Real> {
    family: &'a PBFamily<T>,
    e_phi: Vec<T>,
    e_tilde: Vec<T>,
}

/// Consistency of the split Hamiltonian on the truncated span.
#[derive(Clone, Copy, Debug)]
pub struct SplitConsistency<T> {
    /// `max_j ‖H₁ψ_j − E_j φ_j‖`.
    pub dual_eigen_defect: T,
    /// `max_{k,j} |⟨ψ_k, H₁ψ_j⟩ − E_j δ_kj|`.
    pub dual_matrix_defect: T,
    /// `max |M − M*|` for `M_kj = ⟨Φ_k, H Φ_j⟩`, relative to `max |M|`.
    pub hermiticity_defect: T,
}

pub fn split_hamiltonian<'a, T: Real>(
    family: &'a PBFamily<T>,
    e_phi: Vec<T>,
    e_tilde: Vec<T>,
) -> Result<SplitHamiltonian<'a, T>> {
    for e in [&e_phi, &e_tilde] {
        if e.len() != family.order() {
            return Err(FrameError::LengthMismatch {
                expected: family.order(),
                found: e.len(),
            });
        }
        if let Some(i) = e.iter().position(|v| !v.is_finite()) {
            return Err(FrameError::NonFinite(i));
        }
    }
    Ok(SplitHamiltonian { family, e_phi, e_tilde })
}

impl<T: Real> SplitHamiltonian<'_, T> {
    fn apply_part(vectors: &[GridFunction<T>], weights: &[T], f: &GridFunction<T>) -> GridFunction<T> {
        let mut out = GridFunction::zeros(f.grid);
        for (v, &e) in vectors.iter().zip(weights) {
            out.axpy(v.inner(f) * e, v);
        }
        out
    }

    pub fn apply_h1(&self, f: &GridFunction<T>) -> GridFunction<T> {
        Self::apply_part(&self.family.phi, &self.e_phi, f)
    }

    pub fn apply_h2(&self, f: &GridFunction<T>) -> GridFunction<T> {
        Self::apply_part(&self.family.phit, &self.e_tilde, f)
    }

    pub fn apply(&self, f: &GridFunction<T>) -> GridFunction<T> {
        let mut out = self.apply_h1(f);
        out.samples += self.apply_h2(f).samples;
        out
    }

    pub fn consistency(&self) -> SplitConsistency<T> {
        let fam = self.family;
        let mut eigen = T::zero();
        let mut matrix = T::zero();
        for (j, psi_j) in fam.psi.iter().enumerate() {
            let h1 = self.apply_h1(psi_j);
            eigen = eigen.max(h1.sub(&fam.phi[j].scale(creal(self.e_phi[j]))).norm());
            for (k, psi_k) in fam.psi.iter().enumerate() {
                let target = if k == j { self.e_phi[j] } else { T::zero() };
                matrix = matrix.max(cabs(psi_k.inner(&h1) - creal(target)));
            }
        }
        let span: Vec<&GridFunction<T>> = fam.phi.iter().chain(&fam.phit).collect();
        let images: Vec<GridFunction<T>> = span.iter().map(|v| self.apply(v)).collect();
        let mut scale = T::zero();
        let mut asym = T::zero();
        for (k, vk) in span.iter().enumerate() {
            for (j, vj) in span.iter().enumerate() {
                let mkj = vk.inner(&images[j]);
                let mjk = vj.inner(&images[k]);
                scale = scale.max(cabs(mkj));
                asym = asym.max(cabs(mkj - mjk.conj()));
            }
        }
        SplitConsistency {
            dual_eigen_defect: eigen,
            dual_matrix_defect: matrix,
            hermiticity_defect: if scale > T::zero() { asym / scale } else { T::zero() },
        }
    }
}

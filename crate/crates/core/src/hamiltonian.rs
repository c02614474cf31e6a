//! Frame-generated Hamiltonians `H = Σ_j E_j ⟨φ_j, ·⟩ φ_j` at finite
//! truncation: assembly, dense spectra, the quasi-eigenvalue test through
//! the Naimark complement, point-spectrum certificates in `ℓ²(J)`, the
//! Riesz/frame-sequence split, the `B` operator and domain diagnostics.

use crate::error::{FrameError, Result};
use crate::frame::{require_parseval, synthesis, DilationResult, Frame, Vector, SQRT_FLOOR};
use crate::linalg::{
    hermitian_eigen, hermitian_norm, identity, pd_inv_sqrt, psd_pinv_sqrt, psd_sqrt, singular_values, spectral_norm,
    symmetrize, CMat, CVec,
};
use crate::scalar::{creal, lit, to_f64, tol, Real, C};

/// Residual bound for dense eigenpairs, relative to `‖H‖`.
pub const EIGEN_RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Quasi-eigenvalue residual threshold.
pub const QUASI_EIGEN_TOLERANCE: f64 = 1e-9;
/// Relative nullspace threshold for point-spectrum certificates.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-9;
/// Gram condition number above which a subfamily is not accepted as Riesz.
pub const RIESZ_CONDITION_LIMIT: f64 = 1e8;
/// Fitted partial-sum growth exponent above which a diagnostic reports divergence.
pub const GROWTH_EXPONENT_THRESHOLD: f64 = 0.05;

/// Real weights aligned with the frame labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Weights<T: Real>(Vec<T>);

impl<T: Real> Weights<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(FrameError::NonFinite(i));
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sup_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    fn diagonal(&self, shift: T) -> CVec<T> {
        CVec::from_iterator(self.0.len(), self.0.iter().map(|&e| creal(e - shift)))
    }
}

impl From<Weights<f64>> for Vec<f64> {
    fn from(w: Weights<f64>) -> Self {
        w.0
    }
}

fn check_lengths<T: Real>(frame: &Frame<T>, weights: &Weights<T>) -> Result<()> {
    if frame.len() != weights.len() {
        return Err(FrameError::LengthMismatch {
            expected: frame.len(),
            found: weights.len(),
        });
    }
    Ok(())
}

/// `V diag(w) V*` for a `d × J` synthesis matrix.
fn weighted_outer<T: Real>(synth: &CMat<T>, w: &CVec<T>) -> CMat<T> {
    let mut scaled = synth.clone();
    for (mut col, &wj) in scaled.column_iter_mut().zip(w.iter()) {
        col *= wj;
    }
    scaled * synth.adjoint()
}

/// Dense Hermitian matrix of `Σ_j E_j ⟨φ_j, ·⟩ φ_j`, with its generating data.
#[derive(Clone, Debug)]
pub struct FrameHamiltonian<T: Real> {
    matrix: CMat<T>,
    frame: Frame<T>,
    weights: Weights<T>,
}

impl<T: Real> FrameHamiltonian<T> {
    pub fn matrix(&self) -> &CMat<T> {
        &self.matrix
    }

    pub fn frame(&self) -> &Frame<T> {
        &self.frame
    }

    pub fn weights(&self) -> &Weights<T> {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Spectral norm.
    pub fn norm(&self) -> T {
        hermitian_norm(&self.matrix)
    }

    pub fn apply(&self, f: &Vector<T>) -> Result<Vector<T>> {
        if f.dim() != self.dim() {
            return Err(FrameError::DimensionMismatch {
                expected: self.dim(),
                found: f.dim(),
            });
        }
        Vector::from_dvector(&self.matrix * f.coeffs())
    }

    /// `⟨f, Hf⟩`.
    pub fn expectation(&self, f: &Vector<T>) -> Result<C<T>> {
        Ok(f.inner(&self.apply(f)?))
    }
}

/// `H = (A + A*)/2` with `A = Σ_j E_j φ_j φ_j*`.
pub fn assemble<T: Real>(frame: &Frame<T>, weights: &Weights<T>) -> Result<FrameHamiltonian<T>> {
    check_lengths(frame, weights)?;
    let a = weighted_outer(frame.synthesis_matrix(), &weights.diagonal(T::zero()));
    Ok(FrameHamiltonian {
        matrix: symmetrize(&a),
        frame: frame.clone(),
        weights: weights.clone(),
    })
}

/// Full eigendecomposition with per-pair residuals `‖Hv − λv‖`.
#[derive(Clone, Debug)]
pub struct SpectrumReport<T: Real> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Vec<Vector<T>>,
    pub residuals: Vec<T>,
}

/// One row of a multiplicity-grouped spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumCluster<T> {
    pub mu: T,
    pub multiplicity: usize,
    pub residual: T,
}

impl<T: Real> SpectrumReport<T> {
    /// Groups eigenvalues closer than `gap` into clusters; `mu` is the mean
    /// and `residual` the worst residual in the cluster.
    pub fn clusters(&self, gap: T) -> Vec<SpectrumCluster<T>> {
        let mut out: Vec<(Vec<T>, T)> = Vec::new();
        for (&lambda, &r) in self.eigenvalues.iter().zip(&self.residuals) {
            match out.last_mut() {
                Some((members, worst)) if lambda - *members.last().unwrap() <= gap => {
                    members.push(lambda);
                    *worst = worst.max(r);
                }
                _ => out.push((vec![lambda], r)),
            }
        }
        out.into_iter()
            .map(|(members, residual)| {
                let k = members.len();
                let sum = members.into_iter().fold(T::zero(), |a, b| a + b);
                SpectrumCluster {
                    mu: sum / lit(k as f64),
                    multiplicity: k,
                    residual,
                }
            })
            .collect()
    }

    pub fn max_residual(&self) -> T {
        self.residuals.iter().fold(T::zero(), |a, &b| a.max(b))
    }
}

/// Dense spectrum of any Hermitian matrix, checking `‖Hv − λv‖ ≤ 1e-10 ‖H‖`.
pub fn spectrum_of_matrix<T: Real>(matrix: &CMat<T>) -> Result<SpectrumReport<T>> {
    let (values, vectors) = hermitian_eigen(matrix);
    let norm = values.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    let limit = tol::<T>(EIGEN_RESIDUAL_TOLERANCE) * norm;
    let mut eigenvectors = Vec::with_capacity(values.len());
    let mut residuals = Vec::with_capacity(values.len());
    for (k, &lambda) in values.iter().enumerate() {
        let v = vectors.column(k).into_owned();
        let r = (matrix * &v - v.scale(lambda)).norm();
        if r > limit {
            return Err(FrameError::InvariantViolated {
                invariant: "dense eigenpair residual",
                value: to_f64(r),
                tolerance: to_f64(limit),
            });
        }
        residuals.push(r);
        eigenvectors.push(Vector::from_dvector(v)?);
    }
    Ok(SpectrumReport {
        eigenvalues: values,
        eigenvectors,
        residuals,
    })
}

pub fn dense_spectrum<T: Real>(h: &FrameHamiltonian<T>) -> Result<SpectrumReport<T>> {
    spectrum_of_matrix(&h.matrix)
}

/// Outcome of the quasi-eigenvalue test for one frame index.
#[derive(Clone, Copy, Debug)]
pub struct QuasiEigenCheck<T> {
    pub is_eigenpair: bool,
    /// `‖Σ_j E_j ⟨ψ_j, ψ_n⟩ φ_j‖`.
    pub residual: T,
    /// `Σ_j E_j² |⟨ψ_j, ψ_n⟩|²`, finite at any truncation.
    pub weighted_overlap: T,
    /// `‖Hφ_n − E_n φ_n‖`.
    pub eigen_residual: T,
}

/// Tests whether `φ_n` is an eigenvector of `H` with eigenvalue `E_n` through
/// the complementary frame: it is exactly when `Σ_j E_j ⟨ψ_j, ψ_n⟩ φ_j = 0`.
pub fn quasi_eigenpair_check<T: Real>(
    dilation: &DilationResult<T>,
    weights: &Weights<T>,
    n: usize,
) -> Result<QuasiEigenCheck<T>> {
    let phi = &dilation.phi;
    check_lengths(phi, weights)?;
    if n >= phi.len() {
        return Err(FrameError::IndexOutOfRange {
            index: n,
            len: phi.len(),
        });
    }
    let e = weights.as_slice();
    let psi = dilation.psi.synthesis_matrix();
    let overlaps: CVec<T> = psi.ad_mul(&psi.column(n).into_owned());
    let weighted = CVec::from_iterator(overlaps.len(), overlaps.iter().zip(e).map(|(o, &ej)| o.scale(ej)));
    let residual = (phi.synthesis_matrix() * &weighted).norm();
    let weighted_overlap = weighted.norm_squared();

    let h = assemble(phi, weights)?;
    let phi_n = phi.vector(n);
    let eigen_residual = (h.matrix() * phi_n.coeffs() - phi_n.coeffs().scale(e[n])).norm();

    let limit = tol::<T>(QUASI_EIGEN_TOLERANCE);
    let is_eigenpair = residual <= limit;
    if is_eigenpair && eigen_residual > limit {
        return Err(FrameError::InvariantViolated {
            invariant: "quasi-eigenpair implies H φ_n = E_n φ_n",
            value: to_f64(eigen_residual),
            tolerance: to_f64(limit),
        });
    }
    Ok(QuasiEigenCheck {
        is_eigenpair,
        residual,
        weighted_overlap,
        eigen_residual,
    })
}

/// A sequence `c` in the range of the analysis operator whose weighted image
/// `((E_j − μ) c_j)` is orthogonal to that range.
#[derive(Clone, Debug)]
pub struct EigCertificate<T: Real> {
    pub mu: T,
    pub c: CVec<T>,
    /// `‖(I − P_R) c‖`.
    pub defect_in_range: T,
    /// `‖P_R diag(E − μ) c‖`.
    pub defect_orthogonal: T,
    /// `Σ_j c_j φ_j`.
    pub eigvec: Vector<T>,
    /// Smallest singular value of `P_R diag(E − μ) P_R` on `range(P_R)`.
    pub smallest_singular_value: T,
}

/// Searches for a point-spectrum certificate at `μ`. Returns `None` when the
/// compressed operator has no numerical nullspace.
pub fn point_spectrum_certificate<T: Real>(
    frame: &Frame<T>,
    weights: &Weights<T>,
    mu: T,
) -> Result<Option<EigCertificate<T>>> {
    check_lengths(frame, weights)?;
    require_parseval(frame)?;
    let theta = frame.analysis_matrix();
    // Orthonormal basis of range(θ): θ S^{-1/2}.
    let s_inv_half = pd_inv_sqrt(&frame.frame_operator(), tol(SQRT_FLOOR))?;
    let basis = &theta * s_inv_half;
    let projector = symmetrize(&(&basis * basis.adjoint()));
    let shifted = weights.diagonal(mu);
    let shifted_basis = CMat::from_fn(basis.nrows(), basis.ncols(), |r, c| basis[(r, c)] * shifted[r]);
    let compressed = symmetrize(&basis.ad_mul(&shifted_basis));

    let (values, vectors) = hermitian_eigen(&compressed);
    let Some((k, sigma)) = values
        .iter()
        .map(|v| v.abs())
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
    else {
        return Ok(None);
    };
    let scale = weights.sup_abs().max(T::one());
    if sigma > tol::<T>(CERTIFICATE_TOLERANCE) * scale {
        return Ok(None);
    }
    let c = &basis * vectors.column(k);
    let in_range = (&c - &projector * &c).norm();
    let weighted = c.component_mul(&shifted);
    let orthogonal = (&projector * &weighted).norm();
    let eigvec = synthesis(frame, &c)?;

    let h = assemble(frame, weights)?;
    let eig_residual = (h.matrix() * eigvec.coeffs() - eigvec.coeffs().scale(mu)).norm();
    let limit = tol::<T>(1e-8) * scale;
    if eig_residual > limit {
        return Err(FrameError::InvariantViolated {
            invariant: "certificate eigenvector residual",
            value: to_f64(eig_residual),
            tolerance: to_f64(limit),
        });
    }
    Ok(Some(EigCertificate {
        mu,
        c,
        defect_in_range: in_range,
        defect_orthogonal: orthogonal,
        eigvec,
        smallest_singular_value: sigma,
    }))
}

/// `H = A₀ + A₁` for a split of the index set into a Riesz basis `J₀` and a
/// remainder `J₁`.
#[derive(Clone, Debug)]
pub struct RieszSplit<T: Real> {
    /// `S₀^{1/2} H_{eE₀} S₀^{1/2}`.
    pub riesz_part: CMat<T>,
    /// `(I − S₀)^{1/2} H_{eE₁} (I − S₀)^{1/2}`.
    pub frame_part: CMat<T>,
    pub hamiltonian: FrameHamiltonian<T>,
    /// Condition number of the Gram matrix of `{φ_j : j ∈ J₀}`.
    pub gram_condition: T,
    /// Parseval defect of `{e_j : j ∈ J₁}` as a frame of `range(I − S₀)`.
    pub complement_parseval_defect: T,
}

fn validate_partition(len: usize, j0: &[usize], j1: &[usize]) -> Result<()> {
    let mut seen = vec![false; len];
    for &j in j0.iter().chain(j1) {
        if j >= len {
            return Err(FrameError::IndexOutOfRange { index: j, len });
        }
        if seen[j] {
            return Err(FrameError::InvalidPartition(format!("index {j} appears twice")));
        }
        seen[j] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(FrameError::InvalidPartition(format!("index {missing} is not covered")));
    }
    Ok(())
}

/// Rebuilds `H` through the Riesz basis `{φ_j : j ∈ J₀}` and the frame
/// sequence `{φ_j : j ∈ J₁}` (positions are zero-based).
///
/// `e_j = S₀^{-1/2} φ_j` is an orthonormal basis for `j ∈ J₀`; for `j ∈ J₁`
/// the vectors `e_j = ((I − S₀)^{1/2})^+ φ_j` form a Parseval frame of
/// `range(I − S₀)`. Eigenvalues of `I − S₀` below `1e-12` count as zero.
pub fn riesz_split_assemble<T: Real>(
    frame: &Frame<T>,
    weights: &Weights<T>,
    j0: &[usize],
    j1: &[usize],
) -> Result<RieszSplit<T>> {
    check_lengths(frame, weights)?;
    validate_partition(frame.len(), j0, j1)?;
    require_parseval(frame)?;
    let d = frame.dim();
    if j0.len() != d {
        return Err(FrameError::NotRieszSubfamily(format!(
            "{} members cannot form a basis of a {d}-dimensional space",
            j0.len()
        )));
    }
    let synth = frame.synthesis_matrix();
    let e = weights.as_slice();
    let v0 = synth.select_columns(j0);
    let v1 = synth.select_columns(j1);
    let e0 = CVec::from_iterator(j0.len(), j0.iter().map(|&j| creal(e[j])));
    let e1 = CVec::from_iterator(j1.len(), j1.iter().map(|&j| creal(e[j])));

    let sv = singular_values(&v0);
    let (top, bottom) = (sv[0], sv[d - 1]);
    let condition = if bottom > T::zero() {
        (top / bottom).powi(2)
    } else {
        T::max_value().unwrap_or_else(|| lit(f64::MAX))
    };
    if !(condition < lit(RIESZ_CONDITION_LIMIT)) {
        return Err(FrameError::NotRieszSubfamily(format!(
            "Gram condition number {:e} exceeds {RIESZ_CONDITION_LIMIT:e}",
            to_f64(condition)
        )));
    }

    let floor = tol::<T>(SQRT_FLOOR);
    let s0 = symmetrize(&(&v0 * v0.adjoint()));
    let s0_half = psd_sqrt(&s0, floor)?;
    let basis0 = pd_inv_sqrt(&s0, floor)? * &v0;
    let riesz_part = symmetrize(&(&s0_half * weighted_outer(&basis0, &e0) * &s0_half));

    let rest = symmetrize(&(identity::<T>(d) - &s0));
    let rest_half = psd_sqrt(&rest, floor)?;
    let rest_pinv_half = psd_pinv_sqrt(&rest, floor);
    let basis1 = &rest_pinv_half * &v1;
    let frame_part = symmetrize(&(&rest_half * weighted_outer(&basis1, &e1) * &rest_half));

    let range_projector = symmetrize(&(&rest_half * &rest_pinv_half));
    let complement_parseval_defect = hermitian_norm(&(symmetrize(&(&basis1 * basis1.adjoint())) - range_projector));

    let matrix = symmetrize(&(&riesz_part + &frame_part));
    Ok(RieszSplit {
        riesz_part,
        frame_part,
        hamiltonian: FrameHamiltonian {
            matrix,
            frame: frame.clone(),
            weights: weights.clone(),
        },
        gram_condition: condition,
        complement_parseval_defect,
    })
}

/// `B = Σ_j E_j ⟨φ_j, ·⟩ ψ_j : K → M` as an `m × d` matrix.
#[derive(Clone, Debug)]
pub struct BOperator<T: Real> {
    pub matrix: CMat<T>,
    pub norm: T,
}

pub fn b_operator_matrix<T: Real>(dilation: &DilationResult<T>, weights: &Weights<T>) -> Result<BOperator<T>> {
    check_lengths(&dilation.phi, weights)?;
    let psi = dilation.psi.synthesis_matrix();
    let phi = dilation.phi.synthesis_matrix();
    let w = weights.diagonal(T::zero());
    let mut scaled = psi.clone();
    for (mut col, &wj) in scaled.column_iter_mut().zip(w.iter()) {
        col *= wj;
    }
    let matrix = scaled * phi.adjoint();
    let norm = spectral_norm(&matrix);
    Ok(BOperator { matrix, norm })
}

/// Caller's statement about the weights beyond the truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailClass {
    Bounded,
    Unbounded,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundednessReport<T> {
    /// `sup |E_j|` over the supplied data.
    pub sup_abs: T,
    pub declared: TailClass,
    pub truncation: usize,
}

/// Pure diagnostic: the observed supremum plus the declared asymptotic class.
/// Bounded weights give a bounded self-adjoint `H` with norm at most `sup |E_j|`.
pub fn classify_boundedness<T: Real>(weights: &Weights<T>, declared: TailClass) -> BoundednessReport<T> {
    BoundednessReport {
        sup_abs: weights.sup_abs(),
        declared,
        truncation: weights.len(),
    }
}

/// Partial sums `Σ_{j<N} E_j² |⟨φ_j, f⟩|²` along a schedule of `N`.
#[derive(Clone, Debug)]
pub struct GrowthTrace<T> {
    pub checkpoints: Vec<usize>,
    pub partial_sums: Vec<T>,
    /// Least-squares slope of `ln S` against `ln N` over the upper half of
    /// the checkpoints.
    pub exponent: T,
    pub divergent: bool,
}

/// `1, 2, 4, …` up to and including `max` (appended if not a power of `ratio`).
pub fn geometric_schedule(max: usize, ratio: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = 1usize;
    while n < max {
        out.push(n);
        n = n.saturating_mul(ratio.max(2));
    }
    if max > 0 {
        out.push(max);
    }
    out
}

fn fit_exponent<T: Real>(checkpoints: &[usize], sums: &[T]) -> T {
    let pts: Vec<(f64, f64)> = checkpoints
        .iter()
        .zip(sums)
        .skip(checkpoints.len() / 2)
        .filter(|(_, s)| to_f64(**s) > 0.0)
        .map(|(&n, s)| ((n as f64).ln(), to_f64(*s).ln()))
        .collect();
    if pts.len() < 2 {
        return T::zero();
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    lit(sxy / sxx)
}

/// Streams `(φ_j, E_j)` pairs and records the minimal-domain partial sums
/// for `f` at each checkpoint (counted in consumed pairs).
pub fn domain_growth_diagnostic<T, I>(terms: I, f: &Vector<T>, schedule: &[usize]) -> Result<GrowthTrace<T>>
where
    T: Real,
    I: IntoIterator<Item = (Vector<T>, T)>,
{
    let mut checkpoints = schedule.to_vec();
    checkpoints.sort_unstable();
    checkpoints.dedup();
    let max = checkpoints.last().copied().unwrap_or(0);
    let mut partial_sums = Vec::with_capacity(checkpoints.len());
    let mut next = 0;
    let mut sum = T::zero();
    let mut consumed = 0usize;
    for (phi, e) in terms.into_iter().take(max) {
        if phi.dim() != f.dim() {
            return Err(FrameError::DimensionMismatch {
                expected: f.dim(),
                found: phi.dim(),
            });
        }
        let c = phi.inner(f);
        sum += e * e * c.norm_sqr();
        consumed += 1;
        while next < checkpoints.len() && checkpoints[next] == consumed {
            partial_sums.push(sum);
            next += 1;
        }
    }
    if consumed < max {
        return Err(FrameError::LengthMismatch {
            expected: max,
            found: consumed,
        });
    }
    let exponent = fit_exponent(&checkpoints, &partial_sums);
    Ok(GrowthTrace {
        divergent: exponent > lit(GROWTH_EXPONENT_THRESHOLD),
        checkpoints,
        partial_sums,
        exponent,
    })
}

/// The pairs `(e_n / n, n²)` and `(√(1 − 1/n²) e_n, 0)` for `n = 1..=dim`,
/// interleaved. Their union is a Parseval frame of `C^dim` for which the
/// minimal and maximal domains differ in the limit.
pub fn split_diagonal_terms<T: Real>(dim: usize) -> impl Iterator<Item = (Vector<T>, T)> {
    (1..=dim).flat_map(move |n| {
        let nf: T = lit(n as f64);
        let a = T::one() / nf;
        let b = (T::one() - a * a).sqrt();
        let member = |value: T| {
            let mut c = CVec::zeros(dim);
            c[n - 1] = creal(value);
            Vector::from_dvector(c).expect("finite entries")
        };
        let (small, large) = (member(a), member(b));
        [(small, nf * nf), (large, T::zero())]
    })
}

/// Materialized form of [`split_diagonal_terms`], labelled `n` and `-n`.
pub fn split_diagonal_frame<T: Real>(dim: usize) -> Result<(Frame<T>, Weights<T>)> {
    let mut vectors = Vec::with_capacity(2 * dim);
    let mut weights = Vec::with_capacity(2 * dim);
    let mut labels = Vec::with_capacity(2 * dim);
    for (k, (v, e)) in split_diagonal_terms::<T>(dim).enumerate() {
        let n = (k / 2 + 1) as i64;
        labels.push(if k % 2 == 0 { n } else { -n });
        vectors.push(v);
        weights.push(e);
    }
    Ok((Frame::with_labels(vectors, labels)?, Weights::new(weights)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{naimark_dilate, parseval_defect};
    use crate::linalg::max_abs_entry;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn rv(values: &[f64]) -> Vector<f64> {
        Vector::from_real(values).unwrap()
    }

    fn cc2() -> Frame<f64> {
        let s = 0.5f64.sqrt();
        Frame::new(vec![rv(&[0.5, -0.5]), rv(&[-0.5, 0.5]), rv(&[s, s])]).unwrap()
    }

    fn w(values: &[f64]) -> Weights<f64> {
        Weights::new(values.to_vec()).unwrap()
    }

    fn cc2_dilation() -> DilationResult<f64> {
        let s = 0.5f64.sqrt();
        let psi = Frame::new(vec![rv(&[s]), rv(&[s]), rv(&[0.0])]).unwrap();
        DilationResult::from_complement(cc2(), psi).unwrap()
    }

    #[test]
    fn assemble_examples() {
        let h = assemble(&Frame::orthonormal_basis(2), &w(&[1.0, 2.0])).unwrap();
        assert_eq!(h.matrix()[(0, 0)], creal(1.0));
        assert_eq!(h.matrix()[(1, 1)], creal(2.0));
        assert_eq!(h.matrix()[(0, 1)], creal(0.0));

        let zero = assemble(&cc2(), &w(&[0.0, 0.0, 0.0])).unwrap();
        assert_eq!(max_abs_entry(zero.matrix()), 0.0);

        let h = assemble(&cc2(), &w(&[1.0, 3.0, 5.0])).unwrap();
        let expected = CMat::from_row_slice(2, 2, &[3.5, 1.5, 1.5, 3.5].map(creal));
        assert!(max_abs_entry(&(h.matrix() - expected)) < 1e-14);
        assert!(assemble(&cc2(), &w(&[1.0])).is_err());
    }

    #[test]
    fn dense_spectrum_examples() {
        let h = assemble(&Frame::orthonormal_basis(2), &w(&[1.0, 2.0])).unwrap();
        assert_eq!(dense_spectrum(&h).unwrap().eigenvalues, vec![1.0, 2.0]);
        let h = assemble(&cc2(), &w(&[1.0, 3.0, 5.0])).unwrap();
        let s = dense_spectrum(&h).unwrap();
        assert!((s.eigenvalues[0] - 2.0).abs() < 1e-13);
        assert!((s.eigenvalues[1] - 5.0).abs() < 1e-13);
    }

    #[test]
    fn clusters_group_multiplicities() {
        let h = assemble(&Frame::orthonormal_basis(3), &w(&[1.0, 1.0, 2.0])).unwrap();
        let c = dense_spectrum(&h).unwrap().clusters(1e-9);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].multiplicity, 2);
        assert!((c[0].mu - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quasi_eigen_examples() {
        let dil = cc2_dilation();
        let e = w(&[1.0, 3.0, 5.0]);
        let top = quasi_eigenpair_check(&dil, &e, 2).unwrap();
        assert!(top.is_eigenpair);
        assert_eq!(top.residual, 0.0);
        let first = quasi_eigenpair_check(&dil, &e, 0).unwrap();
        assert!(!first.is_eigenpair);
        assert!((first.residual - 0.5f64.sqrt()).abs() < 1e-14);
        assert!(quasi_eigenpair_check(&dil, &e, 3).is_err());
    }

    #[test]
    fn unit_norm_member_is_quasi_eigen() {
        // {e1, e2/√2, e2/√2}: the first member has norm one.
        let s = 0.5f64.sqrt();
        let f = Frame::new(vec![rv(&[1.0, 0.0]), rv(&[0.0, s]), rv(&[0.0, s])]).unwrap();
        let mut rng = StdRng::seed_from_u64(5);
        let dil = naimark_dilate(&f, &mut rng).unwrap();
        let check = quasi_eigenpair_check(&dil, &w(&[4.0, 1.0, 2.0]), 0).unwrap();
        assert!(check.is_eigenpair);
        assert!(check.residual < 1e-14);
    }

    #[test]
    fn certificate_examples() {
        let e = w(&[1.0, 3.0, 5.0]);
        let c2 = point_spectrum_certificate(&cc2(), &e, 2.0)
            .unwrap()
            .expect("certificate at 2");
        let v = c2.eigvec.coeffs();
        assert!((v[0] + v[1]).norm() < 1e-12 * v.norm());
        assert!(c2.defect_in_range < 1e-12 && c2.defect_orthogonal < 1e-12);
        let c5 = point_spectrum_certificate(&cc2(), &e, 5.0)
            .unwrap()
            .expect("certificate at 5");
        let v = c5.eigvec.coeffs();
        assert!((v[0] - v[1]).norm() < 1e-12 * v.norm());
        assert!(point_spectrum_certificate(&cc2(), &e, 1.0).unwrap().is_none());
    }

    #[test]
    fn riesz_split_examples() {
        let e = w(&[1.0, 3.0, 5.0]);
        let split = riesz_split_assemble(&cc2(), &e, &[0, 2], &[1]).unwrap();
        let h = assemble(&cc2(), &e).unwrap();
        assert!(max_abs_entry(&(split.hamiltonian.matrix() - h.matrix())) < 1e-12);
        assert!(split.complement_parseval_defect < 1e-12);

        let onb = Frame::orthonormal_basis(3);
        let e = w(&[1.0, 2.0, 3.0]);
        let split = riesz_split_assemble(&onb, &e, &[0, 1, 2], &[]).unwrap();
        assert!(max_abs_entry(&(split.hamiltonian.matrix() - assemble(&onb, &e).unwrap().matrix())) < 1e-14);
    }

    #[test]
    fn riesz_split_rejects_bad_subfamilies() {
        let e = w(&[1.0, 3.0, 5.0]);
        // φ1 = −φ2 are collinear.
        assert!(matches!(
            riesz_split_assemble(&cc2(), &e, &[0, 1], &[2]),
            Err(FrameError::NotRieszSubfamily(_))
        ));
        assert!(matches!(
            riesz_split_assemble(&cc2(), &e, &[0], &[1, 2]),
            Err(FrameError::NotRieszSubfamily(_))
        ));
        assert!(matches!(
            riesz_split_assemble(&cc2(), &e, &[0, 2], &[2]),
            Err(FrameError::InvalidPartition(_))
        ));
    }

    #[test]
    fn b_operator_examples() {
        let b = b_operator_matrix(&cc2_dilation(), &w(&[1.0, 3.0, 5.0])).unwrap();
        assert_eq!(b.matrix.shape(), (1, 2));
        let s = 0.5f64.sqrt();
        assert!((b.matrix[(0, 0)] - creal(-s)).norm() < 1e-15);
        assert!((b.matrix[(0, 1)] - creal(s)).norm() < 1e-15);
        assert!((b.norm - 1.0).abs() < 1e-14);

        let mut rng = StdRng::seed_from_u64(1);
        let onb = naimark_dilate(&Frame::<f64>::orthonormal_basis(2), &mut rng).unwrap();
        let b = b_operator_matrix(&onb, &w(&[1.0, 2.0])).unwrap();
        assert_eq!(b.matrix.nrows(), 0);
        assert_eq!(b.norm, 0.0);
    }

    #[test]
    fn boundedness_examples() {
        let harmonic: Vec<f64> = (1..=50).map(|n| 1.0 / n as f64).collect();
        let r = classify_boundedness(&w(&harmonic), TailClass::Bounded);
        assert_eq!(r.sup_abs, 1.0);
        let squares: Vec<f64> = (1..=30).map(|n| (n * n) as f64).collect();
        let r = classify_boundedness(&w(&squares), TailClass::Unbounded);
        assert_eq!(r.sup_abs, 900.0);
        assert_eq!(r.declared, TailClass::Unbounded);
        assert_eq!(classify_boundedness(&w(&[-2.5; 4]), TailClass::Bounded).sup_abs, 2.5);
    }

    #[test]
    fn split_diagonal_frame_is_parseval() {
        let (f, e) = split_diagonal_frame::<f64>(6).unwrap();
        assert!(parseval_defect(&f) < 1e-15);
        assert_eq!(f.labels()[..4], [1, -1, 2, -2]);
        assert_eq!(e.as_slice()[4], 9.0);
    }

    #[test]
    fn growth_of_single_basis_vector_is_flat() {
        let f = Vector::basis(64, 0);
        let trace = domain_growth_diagnostic(split_diagonal_terms::<f64>(64), &f, &geometric_schedule(128, 2)).unwrap();
        assert!(trace.partial_sums.iter().all(|&s| s == 1.0));
        assert!(!trace.divergent);
    }

    #[test]
    fn schedule_shape() {
        assert_eq!(geometric_schedule(10, 2), vec![1, 2, 4, 8, 10]);
        assert_eq!(geometric_schedule(8, 2), vec![1, 2, 4, 8]);
    }
}

//! Finite Parseval frames: analysis and synthesis operators, excess, Naimark
//! dilation, projected orthonormal bases and the Riesz-pair construction
//! `X*e_n ∪ (I − X*X)^{1/2} e_n`.
//!
//! Inner products are conjugate-linear in the first argument. A frame of `J`
//! vectors in `C^d` is stored as its `d × J` synthesis matrix, whose `j`-th
//! column is `φ_j`; the analysis matrix is its adjoint.

use rand::Rng;

use crate::error::{FrameError, Result};
use crate::linalg::{
    hermitian_eigen, hermitian_norm, identity, max_abs_entry, numerical_rank, orthonormal_completion, pd_inv_sqrt,
    psd_sqrt, spectral_norm, symmetrize, CMat, CVec,
};
use crate::scalar::{cabs, creal, to_f64, tol, Real, C};

/// Relative singular-value cutoff used for rank decisions.
pub const RANK_TOLERANCE: f64 = 1e-10;
/// Largest Parseval defect accepted by operations that require a PF.
pub const PARSEVAL_TOLERANCE: f64 = 1e-10;
/// Eigenvalue floor for matrix square roots.
pub const SQRT_FLOOR: f64 = 1e-12;

/// Coefficients of a vector with respect to the reference orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector<T: Real> {
    coeffs: CVec<T>,
}

impl<T: Real> Vector<T> {
    pub fn new(coeffs: Vec<C<T>>) -> Result<Self> {
        Self::from_dvector(CVec::from_vec(coeffs))
    }

    pub fn from_dvector(coeffs: CVec<T>) -> Result<Self> {
        if let Some(i) = coeffs.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(FrameError::NonFinite(i));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(values: &[T]) -> Result<Self> {
        Self::new(values.iter().map(|&v| creal(v)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            coeffs: CVec::zeros(dim),
        }
    }

    /// `k`-th reference basis vector (zero-based).
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.coeffs[k] = creal(T::one());
        v
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &CVec<T> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> CVec<T> {
        self.coeffs
    }

    pub fn norm(&self) -> T {
        self.coeffs.norm()
    }

    /// `⟨self, other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> C<T> {
        self.coeffs.dotc(&other.coeffs)
    }
}

/// Ordered family of vectors of a common dimension, with index labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame<T: Real> {
    synthesis: CMat<T>,
    labels: Vec<i64>,
}

impl<T: Real> Frame<T> {
    /// Builds a frame labelled `1..=J`.
    pub fn new(vectors: Vec<Vector<T>>) -> Result<Self> {
        let labels = (1..=vectors.len() as i64).collect();
        Self::with_labels(vectors, labels)
    }

    pub fn with_labels(vectors: Vec<Vector<T>>, labels: Vec<i64>) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(FrameError::EmptyFamily);
        };
        let dim = first.dim();
        if let Some(bad) = vectors.iter().find(|v| v.dim() != dim) {
            return Err(FrameError::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        let synthesis = CMat::from_fn(dim, vectors.len(), |r, c| vectors[c].coeffs[r]);
        Self::from_synthesis(synthesis, labels)
    }

    /// Wraps a `d × J` matrix whose columns are the frame vectors.
    pub fn from_synthesis(synthesis: CMat<T>, labels: Vec<i64>) -> Result<Self> {
        if synthesis.ncols() == 0 {
            return Err(FrameError::EmptyFamily);
        }
        if labels.len() != synthesis.ncols() {
            return Err(FrameError::LengthMismatch {
                expected: synthesis.ncols(),
                found: labels.len(),
            });
        }
        if let Some(i) = synthesis.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(FrameError::NonFinite(i));
        }
        Ok(Self { synthesis, labels })
    }

    /// Reference orthonormal basis of `C^d`.
    pub fn orthonormal_basis(dim: usize) -> Self {
        Self {
            synthesis: identity(dim),
            labels: (1..=dim as i64).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.synthesis.nrows()
    }

    pub fn len(&self) -> usize {
        self.synthesis.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    /// Member at position `j` (zero-based).
    pub fn vector(&self, j: usize) -> Vector<T> {
        Vector {
            coeffs: self.synthesis.column(j).into_owned(),
        }
    }

    pub fn vectors(&self) -> Vec<Vector<T>> {
        (0..self.len()).map(|j| self.vector(j)).collect()
    }

    /// `d × J`, columns `φ_j`.
    pub fn synthesis_matrix(&self) -> &CMat<T> {
        &self.synthesis
    }

    /// `J × d`, rows `φ_j*`.
    pub fn analysis_matrix(&self) -> CMat<T> {
        self.synthesis.adjoint()
    }

    /// `S = Σ_j φ_j φ_j*`.
    pub fn frame_operator(&self) -> CMat<T> {
        symmetrize(&(&self.synthesis * self.synthesis.adjoint()))
    }

    /// `G_{jk} = ⟨φ_j, φ_k⟩`.
    pub fn gram(&self) -> CMat<T> {
        self.synthesis.adjoint() * &self.synthesis
    }

    pub fn norms(&self) -> Vec<T> {
        self.synthesis.column_iter().map(|c| c.norm()).collect()
    }

    /// Members at the given positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> Result<Self> {
        if let Some(&bad) = positions.iter().find(|&&p| p >= self.len()) {
            return Err(FrameError::IndexOutOfRange {
                index: bad,
                len: self.len(),
            });
        }
        let synthesis = self.synthesis.select_columns(positions);
        let labels = positions.iter().map(|&p| self.labels[p]).collect();
        Self::from_synthesis(synthesis, labels)
    }
}

/// Spectral norm of `S − I`; zero exactly for a Parseval frame.
pub fn parseval_defect<T: Real>(frame: &Frame<T>) -> T {
    hermitian_norm(&(frame.frame_operator() - identity::<T>(frame.dim())))
}

pub(crate) fn require_parseval<T: Real>(frame: &Frame<T>) -> Result<T> {
    let defect = parseval_defect(frame);
    let limit = tol::<T>(PARSEVAL_TOLERANCE);
    if defect > limit {
        return Err(FrameError::NotParseval {
            defect: to_f64(defect),
            tolerance: to_f64(limit),
        });
    }
    Ok(defect)
}

/// `θ f = (⟨φ_j, f⟩)_j`.
pub fn analysis<T: Real>(frame: &Frame<T>, f: &Vector<T>) -> Result<CVec<T>> {
    if f.dim() != frame.dim() {
        return Err(FrameError::DimensionMismatch {
            expected: frame.dim(),
            found: f.dim(),
        });
    }
    Ok(frame.synthesis.ad_mul(&f.coeffs))
}

/// `θ* c = Σ_j c_j φ_j`.
pub fn synthesis<T: Real>(frame: &Frame<T>, c: &CVec<T>) -> Result<Vector<T>> {
    if c.len() != frame.len() {
        return Err(FrameError::LengthMismatch {
            expected: frame.len(),
            found: c.len(),
        });
    }
    Ok(Vector {
        coeffs: &frame.synthesis * c,
    })
}

/// `J − rank`, the number of members removable while keeping a complete set.
pub fn excess<T: Real>(frame: &Frame<T>) -> Result<usize> {
    let rank = numerical_rank(&frame.synthesis, tol(RANK_TOLERANCE));
    if rank < frame.dim() {
        return Err(FrameError::IncompleteFamily { rank, dim: frame.dim() });
    }
    Ok(frame.len() - rank)
}

/// A Naimark dilation: `h_j = φ_j ⊕ ψ_j` is an orthonormal basis of `K ⊕ M`.
#[derive(Clone, Debug)]
pub struct DilationResult<T: Real> {
    pub phi: Frame<T>,
    /// Complementary Parseval frame in `M = C^m` (`m` may be zero).
    pub psi: Frame<T>,
    pub h: Frame<T>,
    pub m: usize,
}

impl<T: Real> DilationResult<T> {
    /// Assembles a dilation from a frame and a proposed complement, checking
    /// that the stacked family is orthonormal.
    pub fn from_complement(phi: Frame<T>, psi: Frame<T>) -> Result<Self> {
        if psi.len() != phi.len() {
            return Err(FrameError::LengthMismatch {
                expected: phi.len(),
                found: psi.len(),
            });
        }
        let (d, m, j) = (phi.dim(), psi.dim(), phi.len());
        let stacked = CMat::from_fn(d + m, j, |r, c| {
            if r < d {
                phi.synthesis[(r, c)]
            } else {
                psi.synthesis[(r - d, c)]
            }
        });
        let h = Frame::from_synthesis(stacked, phi.labels.clone())?;
        let defect = max_abs_entry(&(h.gram() - identity::<T>(j)));
        let limit = tol::<T>(1e-12);
        if defect > limit {
            return Err(FrameError::InvariantViolated {
                invariant: "Gram(h) = I",
                value: to_f64(defect),
                tolerance: to_f64(limit),
            });
        }
        Ok(Self { phi, psi, h, m })
    }

    /// Largest deviation of `Gram(h)` from the identity.
    pub fn gram_defect(&self) -> T {
        max_abs_entry(&(self.h.gram() - identity::<T>(self.h.len())))
    }
}

/// Completes the orthonormal columns of the analysis matrix to a unitary;
/// the new columns, read row by row, give the complementary frame.
///
/// The complement is unique only up to a unitary on `M`; callers should
/// compare Gram matrices, not coordinates.
pub fn naimark_dilate<T: Real, R: Rng + ?Sized>(frame: &Frame<T>, rng: &mut R) -> Result<DilationResult<T>> {
    let defect = require_parseval(frame)?;
    let rank = numerical_rank(&frame.synthesis, tol(RANK_TOLERANCE));
    let m = frame.len() - rank;
    let theta = frame.analysis_matrix();
    let completion = orthonormal_completion(&theta, m, rng);
    let psi = Frame::from_synthesis(completion.adjoint(), frame.labels.clone())?;

    let (d, j) = (frame.dim(), frame.len());
    let stacked = CMat::from_fn(d + m, j, |r, c| {
        if r < d {
            frame.synthesis[(r, c)]
        } else {
            psi.synthesis[(r - d, c)]
        }
    });
    let h = Frame::from_synthesis(stacked, frame.labels.clone())?;
    let result = DilationResult {
        phi: frame.clone(),
        psi,
        h,
        m,
    };
    let gram_defect = result.gram_defect();
    let limit = tol::<T>(1e-12) + defect * T::from_subset(&4.0);
    if gram_defect > limit {
        return Err(FrameError::InvariantViolated {
            invariant: "Gram(h) = I",
            value: to_f64(gram_defect),
            tolerance: to_f64(limit),
        });
    }
    Ok(result)
}

/// The family `{P e_n}` written in an orthonormal basis of `range(P)`.
///
/// When `P` is the identity the reference basis is kept. Otherwise each basis
/// vector of the range is phase-normalized so its largest entry is real and
/// positive, which makes the output deterministic.
pub fn project_onb<T: Real>(projector: &CMat<T>) -> Result<Frame<T>> {
    let d = projector.nrows();
    if projector.ncols() != d {
        return Err(FrameError::DimensionMismatch {
            expected: d,
            found: projector.ncols(),
        });
    }
    if d == 0 {
        return Err(FrameError::EmptyFamily);
    }
    let limit = tol::<T>(1e-12);
    let asym = max_abs_entry(&(projector - projector.adjoint()));
    let idem = spectral_norm(&(projector * projector - projector));
    let residual = asym.max(idem);
    if residual > limit {
        return Err(FrameError::NotProjector {
            residual: to_f64(residual),
        });
    }
    let (values, vectors) = hermitian_eigen(projector);
    let half = T::from_subset(&0.5);
    let range: Vec<usize> = (0..d).filter(|&i| values[i] > half).collect();
    if range.is_empty() {
        return Err(FrameError::IncompleteFamily { rank: 0, dim: d });
    }
    let basis = if range.len() == d {
        identity::<T>(d)
    } else {
        let mut q = vectors.select_columns(&range);
        for mut col in q.column_iter_mut() {
            let pivot = col
                .iter()
                .copied()
                .max_by(|a, b| cabs(*a).partial_cmp(&cabs(*b)).unwrap_or(std::cmp::Ordering::Equal))
                .unwrap_or_else(|| creal(T::one()));
            let phase = pivot.conj().unscale(cabs(pivot));
            for z in col.iter_mut() {
                *z *= phase;
            }
        }
        q
    };
    Frame::from_synthesis(basis.adjoint() * projector, (1..=d as i64).collect())
}

/// `Θ Θ*`, the orthogonal projector of `ℓ²(J)` onto the range of the analysis
/// operator. Its complement projects onto the range of the complementary
/// frame's analysis operator, which is the kernel of synthesis.
pub fn range_projector<T: Real>(frame: &Frame<T>) -> Result<CMat<T>> {
    require_parseval(frame)?;
    Ok(symmetrize(&frame.gram()))
}

/// Which half of the Riesz-pair construction applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `‖X*X‖ < 1`: `{X*e_n} ∪ {(I − X*X)^{1/2} e_n}` is Parseval.
    Contractive,
    /// `X*X > 1`: `{X^{-1}e_n} ∪ {(I − (X*X)^{-1})^{1/2} e_n}` is Parseval.
    Expansive,
}

/// Four biorthogonal families built from an invertible `X`.
///
/// In the contractive branch `riesz = {X*e_n}` with dual `{X^{-1}e_n}` and
/// `complement = {(I − X*X)^{1/2} e_n}` with dual `{(I − X*X)^{-1/2} e_n}`.
/// In the expansive branch the roles swap: `riesz = {X^{-1}e_n}` with dual
/// `{X*e_n}`, and the complement is built from `I − (X*X)^{-1}`.
#[derive(Clone, Debug)]
pub struct RieszPairFamilies<T: Real> {
    pub branch: Branch,
    pub x: CMat<T>,
    pub riesz: Frame<T>,
    pub riesz_dual: Frame<T>,
    pub complement: Frame<T>,
    pub complement_dual: Frame<T>,
}

fn biorthogonality_defect<T: Real>(a: &Frame<T>, b: &Frame<T>) -> T {
    max_abs_entry(&(a.synthesis.ad_mul(&b.synthesis) - identity::<T>(a.len())))
}

impl<T: Real> RieszPairFamilies<T> {
    /// `riesz ∪ complement`, labelled `0..d` then `-1..=-d`.
    pub fn union(&self) -> Frame<T> {
        let d = self.riesz.dim();
        let cols: Vec<_> = self
            .riesz
            .synthesis
            .column_iter()
            .chain(self.complement.synthesis.column_iter())
            .collect();
        let labels = (0..d as i64).chain((1..=d as i64).map(|k| -k)).collect();
        Frame {
            synthesis: CMat::from_columns(&cols),
            labels,
        }
    }

    /// Max entrywise deviations of `⟨riesz_m, riesz_dual_n⟩` and
    /// `⟨complement_m, complement_dual_n⟩` from `δ_{mn}`.
    pub fn biorthogonality_defects(&self) -> (T, T) {
        (
            biorthogonality_defect(&self.riesz, &self.riesz_dual),
            biorthogonality_defect(&self.complement, &self.complement_dual),
        )
    }
}

pub fn riesz_pair_families<T: Real>(x: &CMat<T>) -> Result<RieszPairFamilies<T>> {
    let d = x.nrows();
    if x.ncols() != d {
        return Err(FrameError::DimensionMismatch {
            expected: d,
            found: x.ncols(),
        });
    }
    if d == 0 {
        return Err(FrameError::EmptyFamily);
    }
    let floor = tol::<T>(SQRT_FLOOR);
    let u = symmetrize(&x.ad_mul(x));
    let (values, _) = hermitian_eigen(&u);
    let (lo, hi) = (values[0], values[d - 1]);
    if lo <= floor {
        return Err(FrameError::NotInvertible);
    }
    let x_inv = x.clone().try_inverse().ok_or(FrameError::NotInvertible)?;
    let one = T::one();
    let labels: Vec<i64> = (0..d as i64).collect();
    let frame = |m: CMat<T>| Frame::from_synthesis(m, labels.clone());

    let (branch, riesz, riesz_dual, reduced) = if hi < one - floor {
        (Branch::Contractive, x.adjoint(), x_inv.clone(), identity::<T>(d) - &u)
    } else if lo > one + floor {
        let u_inv = u.clone().try_inverse().ok_or(FrameError::NotInvertible)?;
        (
            Branch::Expansive,
            x_inv.clone(),
            x.adjoint(),
            identity::<T>(d) - symmetrize(&u_inv),
        )
    } else {
        return Err(FrameError::MixedBranch {
            min: to_f64(lo),
            max: to_f64(hi),
        });
    };
    let complement = psd_sqrt(&reduced, floor)?;
    let complement_dual = pd_inv_sqrt(&reduced, floor)?;
    Ok(RieszPairFamilies {
        branch,
        x: x.clone(),
        riesz: frame(riesz)?,
        riesz_dual: frame(riesz_dual)?,
        complement: frame(complement)?,
        complement_dual: frame(complement_dual)?,
    })
}

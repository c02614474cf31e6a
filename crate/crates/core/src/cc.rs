//! The Casazza–Christensen block frame: on `C^n` the `n + 1` vectors
//! `φ_j = e_j − (1/n) Σ e_i` (`j ≤ n`) and `φ_{n+1} = n^{-1/2} Σ e_i`.
//!
//! Each block Hamiltonian has the top weight `E_{n+1}` as an eigenvalue
//! (eigenvector `φ_{n+1}`) and `n − 1` further eigenvalues solving the
//! secular equation `Σ_i 1/(E_i − μ) = 0`, interlacing `E_1 < … < E_n`.

use nalgebra::DMatrix;

use crate::error::{FrameError, Result};
use crate::frame::{DilationResult, Frame, Vector};
use crate::hamiltonian::{assemble, FrameHamiltonian, SpectrumReport, Weights};
use crate::linalg::{CMat, CVec};
use crate::scalar::{creal, lit, to_f64, tol, RadicalScalar, Real};

/// Adjacent weights closer than this fraction of the span are rejected.
pub const DEGENERACY_GAP: f64 = 1e-10;
/// Bound on `|g(μ)| / g'(μ)` relative to the span at an accepted root.
pub const SECULAR_RESIDUAL_TOLERANCE: f64 = 1e-9;
/// Eigenpair residual bound relative to `‖H‖`.
pub const BLOCK_RESIDUAL_TOLERANCE: f64 = 1e-9;

fn require_block_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(FrameError::InvalidBlock("block size must be at least 1".into()));
    }
    Ok(())
}

/// `n × (n+1)` synthesis matrix of the block frame in any radical scalar.
pub fn cc_frame_matrix<S: RadicalScalar>(n: usize) -> Result<DMatrix<S>> {
    require_block_size(n)?;
    let nn = n as i64;
    let off = S::ratio(-1, nn);
    let diag = S::ratio(nn - 1, nn);
    let top = S::sqrt_of(n as u64) * S::ratio(1, nn);
    Ok(DMatrix::from_fn(n, n + 1, |r, c| {
        if c == n {
            top.clone()
        } else if r == c {
            diag.clone()
        } else {
            off.clone()
        }
    }))
}

/// The block frame of `C^n`, labelled `1..=n+1`.
pub fn cc_frame<T: Real>(n: usize) -> Result<Frame<T>> {
    require_block_size(n)?;
    let nf: T = lit(n as f64);
    let off = -T::one() / nf;
    let diag = T::one() + off;
    let top = T::one() / nf.sqrt();
    let synth = CMat::from_fn(n, n + 1, |r, c| {
        creal(if c == n {
            top
        } else if r == c {
            diag
        } else {
            off
        })
    });
    Frame::from_synthesis(synth, (1..=n as i64 + 1).collect())
}

/// Complementary Parseval frame of `C^1`: `ψ_j = n^{-1/2}` for `j ≤ n`,
/// `ψ_{n+1} = 0`.
pub fn cc_complementary<T: Real>(n: usize) -> Result<Frame<T>> {
    require_block_size(n)?;
    let value = creal(T::one() / lit::<T>(n as f64).sqrt());
    let synth = CMat::from_fn(1, n + 1, |_, c| if c < n { value } else { creal(T::zero()) });
    Frame::from_synthesis(synth, (1..=n as i64 + 1).collect())
}

/// The block frame together with its explicit one-dimensional complement.
pub fn cc_dilation<T: Real>(n: usize) -> Result<DilationResult<T>> {
    DilationResult::from_complement(cc_frame(n)?, cc_complementary(n)?)
}

fn require_strict<T: Real>(e: &[T]) -> Result<()> {
    if let Some(i) = e.iter().position(|v| !v.is_finite()) {
        return Err(FrameError::NonFinite(i));
    }
    if let Some(i) = e.windows(2).position(|w| w[1] <= w[0]) {
        return Err(FrameError::DegenerateWeights(format!(
            "E[{i}] = {} is not below E[{}] = {}",
            to_f64(e[i]),
            i + 1,
            to_f64(e[i + 1])
        )));
    }
    Ok(())
}

/// One block: size `n` and strictly increasing weights `E_1 < … < E_{n+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CCBlock<T: Real> {
    n: usize,
    e: Vec<T>,
}

impl<T: Real> CCBlock<T> {
    pub fn new(n: usize, e: Vec<T>) -> Result<Self> {
        require_block_size(n)?;
        if e.len() != n + 1 {
            return Err(FrameError::InvalidBlock(format!(
                "block of size {n} needs {} weights, got {}",
                n + 1,
                e.len()
            )));
        }
        require_strict(&e)?;
        Ok(Self { n, e })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn e(&self) -> &[T] {
        &self.e
    }

    pub fn weights(&self) -> Weights<T> {
        Weights::new(self.e.clone()).expect("validated finite")
    }

    pub fn frame(&self) -> Frame<T> {
        cc_frame(self.n).expect("validated size")
    }

    pub fn hamiltonian(&self) -> FrameHamiltonian<T> {
        assemble(&self.frame(), &self.weights()).expect("matching lengths")
    }
}

/// Roots of `Σ_i 1/(E_i − μ) = 0`, one per gap of the weights.
#[derive(Clone, Debug)]
pub struct SecularSolution<T> {
    pub roots: Vec<T>,
    pub brackets: Vec<(T, T)>,
    /// `|Σ_i 1/(E_i − μ)|` at each root.
    pub residuals: Vec<T>,
    /// `|g(μ)| / g'(μ)` divided by `E_n − E_1`: a Newton estimate of the
    /// distance to the exact root, relative to the span.
    pub scaled_residuals: Vec<T>,
    /// Each root as `(k, δ)` with `μ = E_k + δ` and `E_k` the nearer pole.
    /// Differences `E_j − μ` formed from these keep full relative accuracy.
    pub anchors: Vec<(usize, T)>,
}

impl<T: Real> SecularSolution<T> {
    /// `E_j − μ_r` for weight `j` and root `r`.
    pub fn pole_distance(&self, e: &[T], j: usize, r: usize) -> T {
        let (k, delta) = self.anchors[r];
        (e[j] - e[k]) - delta
    }
}

/// `(g, g')` at `μ = E_k + δ`, with differences taken relative to `E_k`.
fn secular_eval<T: Real>(e: &[T], k: usize, delta: T) -> (T, T) {
    let mut g = T::zero();
    let mut dg = T::zero();
    for &ei in e {
        let diff = (ei - e[k]) - delta;
        let inv = T::one() / diff;
        g += inv;
        dg += inv * inv;
    }
    (g, dg)
}

/// Bisection in every open gap `(E_i, E_{i+1})`. `g` increases from `−∞` to
/// `+∞` across each gap, so the sign of `g` at the midpoint picks the half.
pub fn secular_roots<T: Real>(e: &[T]) -> Result<SecularSolution<T>> {
    if e.is_empty() {
        return Err(FrameError::InvalidBlock("no weights".into()));
    }
    require_strict(e)?;
    let k = e.len();
    let mut out = SecularSolution {
        roots: Vec::with_capacity(k.saturating_sub(1)),
        brackets: Vec::with_capacity(k.saturating_sub(1)),
        residuals: Vec::with_capacity(k.saturating_sub(1)),
        scaled_residuals: Vec::with_capacity(k.saturating_sub(1)),
        anchors: Vec::with_capacity(k.saturating_sub(1)),
    };
    if k == 1 {
        return Ok(out);
    }
    let span = e[k - 1] - e[0];
    if let Some(i) = e.windows(2).position(|w| w[1] - w[0] < lit::<T>(DEGENERACY_GAP) * span) {
        return Err(FrameError::DegenerateWeights(format!(
            "gap between E[{i}] and E[{}] is below {DEGENERACY_GAP:e} of the span",
            i + 1
        )));
    }
    let half: T = lit(0.5);
    for i in 0..k - 1 {
        let gap = e[i + 1] - e[i];
        let (anchor, mut lo, mut hi) = if secular_eval(e, i, gap * half).0 >= T::zero() {
            (i, T::zero(), gap * half)
        } else {
            (i + 1, -(gap * half), T::zero())
        };
        // Bisect until the midpoint stops moving.
        for _ in 0..400 {
            let mid = (lo + hi) * half;
            if mid <= lo || mid >= hi {
                break;
            }
            if secular_eval(e, anchor, mid).0 < T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let delta = (lo + hi) * half;
        let (g, dg) = secular_eval(e, anchor, delta);
        let scaled = g.abs() / dg / span;
        let limit = tol::<T>(SECULAR_RESIDUAL_TOLERANCE);
        if !(scaled <= limit) {
            return Err(FrameError::InvariantViolated {
                invariant: "secular root residual",
                value: to_f64(scaled),
                tolerance: to_f64(limit),
            });
        }
        out.roots.push(e[anchor] + delta);
        out.anchors.push((anchor, delta));
        out.brackets.push((e[i], e[i + 1]));
        out.residuals.push(g.abs());
        out.scaled_residuals.push(scaled);
    }
    Ok(out)
}

/// Origin of a block eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenKind {
    /// Root of the secular equation.
    Secular,
    /// The top weight `E_{n+1}`.
    Top,
}

impl EigenKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EigenKind::Secular => "secular",
            EigenKind::Top => "top",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CCEigenpair<T: Real> {
    pub lambda: T,
    pub kind: EigenKind,
    /// Unit eigenvector.
    pub vector: Vector<T>,
    /// `‖Hv − λv‖`.
    pub residual: T,
    /// `‖Hf − λf‖ / ‖f‖` for the unnormalized closed-form vector.
    pub relative_residual: T,
}

#[derive(Clone, Debug)]
pub struct CCSpectrum<T: Real> {
    /// Ascending; the top weight is last.
    pub pairs: Vec<CCEigenpair<T>>,
    pub secular: SecularSolution<T>,
}

impl<T: Real> CCSpectrum<T> {
    pub fn eigenvalues(&self) -> Vec<T> {
        self.pairs.iter().map(|p| p.lambda).collect()
    }

    pub fn to_report(&self) -> SpectrumReport<T> {
        SpectrumReport {
            eigenvalues: self.eigenvalues(),
            eigenvectors: self.pairs.iter().map(|p| p.vector.clone()).collect(),
            residuals: self.pairs.iter().map(|p| p.residual).collect(),
        }
    }
}

/// Closed-form spectrum of one block: eigenvectors `Σ_i e_i / (E_i − μ_j)`
/// for the secular roots and `φ_{n+1}` for `E_{n+1}`. For `n = 1` the first
/// frame vector vanishes and only `E_2` remains.
pub fn cc_block_spectrum<T: Real>(block: &CCBlock<T>) -> Result<CCSpectrum<T>> {
    let n = block.n;
    let e = &block.e;
    let secular = secular_roots(&e[..n])?;
    let h = block.hamiltonian();
    let top_value = e[n];

    let mut raw: Vec<(T, EigenKind, CVec<T>)> = secular
        .roots
        .iter()
        .enumerate()
        .map(|(r, &mu)| {
            let f = CVec::from_fn(n, |j, _| creal(T::one() / secular.pole_distance(&e[..n], j, r)));
            (mu, EigenKind::Secular, f)
        })
        .collect();
    raw.push((top_value, EigenKind::Top, block.frame().vector(n).into_coeffs()));

    let norm = raw.iter().fold(T::zero(), |acc, (l, _, _)| acc.max(l.abs()));
    let limit = tol::<T>(BLOCK_RESIDUAL_TOLERANCE) * norm.max(T::one());
    let mut pairs = Vec::with_capacity(raw.len());
    for (lambda, kind, f) in raw {
        let fnorm = f.norm();
        let relative_residual = (h.matrix() * &f - f.scale(lambda)).norm() / fnorm;
        let v = f.unscale(fnorm);
        let residual = (h.matrix() * &v - v.scale(lambda)).norm();
        if residual > limit {
            return Err(FrameError::InvariantViolated {
                invariant: "block eigenpair residual",
                value: to_f64(residual),
                tolerance: to_f64(limit),
            });
        }
        pairs.push(CCEigenpair {
            lambda,
            kind,
            vector: Vector::from_dvector(v)?,
            residual,
            relative_residual,
        });
    }
    Ok(CCSpectrum { pairs, secular })
}

/// Truncated annihilator on `C^n`: `a e_1 = 0`, `a e_j = √(j−1) e_{j−1}`.
pub fn ladder_a<S: RadicalScalar>(n: usize) -> Result<DMatrix<S>> {
    require_block_size(n)?;
    Ok(DMatrix::from_fn(n, n, |r, c| {
        if c == r + 1 {
            S::sqrt_of(c as u64)
        } else {
            S::zero()
        }
    }))
}

/// `a*`; the entries are real so this is the transpose.
pub fn ladder_a_star<S: RadicalScalar>(n: usize) -> Result<DMatrix<S>> {
    Ok(ladder_a::<S>(n)?.transpose())
}

/// Matrix product that skips zero entries of the left factor; exact
/// arithmetic on sparse ladder matrices stays cheap this way.
fn product<S: RadicalScalar>(a: &DMatrix<S>, b: &DMatrix<S>) -> DMatrix<S> {
    let mut out = DMatrix::from_element(a.nrows(), b.ncols(), S::zero());
    for r in 0..a.nrows() {
        for k in 0..a.ncols() {
            let x = &a[(r, k)];
            if x.is_zero() {
                continue;
            }
            for c in 0..b.ncols() {
                let y = &b[(k, c)];
                if !y.is_zero() {
                    out[(r, c)] += x.clone() * y.clone();
                }
            }
        }
    }
    out
}

/// `[a, a*] = a a* − a* a`.
pub fn ladder_commutator<S: RadicalScalar>(n: usize) -> Result<DMatrix<S>> {
    let a = ladder_a::<S>(n)?;
    let a_star = ladder_a_star::<S>(n)?;
    Ok(product(&a, &a_star) - product(&a_star, &a))
}

/// `I − n P_n` with `P_n` the projector on `e_n`.
pub fn truncation_defect<S: RadicalScalar>(n: usize) -> Result<DMatrix<S>> {
    require_block_size(n)?;
    let mut m = DMatrix::from_fn(n, n, |r, c| if r == c { S::one() } else { S::zero() });
    m[(n - 1, n - 1)] = S::ratio(1 - n as i64, 1);
    Ok(m)
}

/// `a* a = diag(0, 1, …, n−1)`.
pub fn number_operator<S: RadicalScalar>(n: usize) -> Result<DMatrix<S>> {
    let a = ladder_a::<S>(n)?;
    Ok(product(&ladder_a_star::<S>(n)?, &a))
}

/// `ẽ = (1/n) Σ_{i<n} √i e_i`, the common term in `a φ_j`.
fn ladder_shift_vector<T: Real>(n: usize) -> CVec<T> {
    let nf: T = lit(n as f64);
    CVec::from_fn(n, |i, _| {
        if i + 1 < n {
            creal(lit::<T>((i + 1) as f64).sqrt() / nf)
        } else {
            creal(T::zero())
        }
    })
}

/// `a φ_j` from the closed form (`j` is one-based):
/// `−ẽ` for `j = 1`, `√(j−1) φ_{j−1} + √((j−1)/n) φ_{n+1} − ẽ` for
/// `2 ≤ j ≤ n`, and `√n ẽ` for `j = n+1`.
pub fn ladder_action_on_frame<T: Real>(n: usize, j: usize) -> Result<Vector<T>> {
    require_block_size(n)?;
    if j == 0 || j > n + 1 {
        return Err(FrameError::IndexOutOfRange { index: j, len: n + 1 });
    }
    let frame = cc_frame::<T>(n)?;
    let shift = ladder_shift_vector::<T>(n);
    let nf: T = lit(n as f64);
    let v = if j == 1 {
        -shift
    } else if j <= n {
        let s: T = lit::<T>((j - 1) as f64).sqrt();
        frame.vector(j - 2).into_coeffs().scale(s) + frame.vector(n).into_coeffs().scale(s / nf.sqrt()) - shift
    } else {
        shift.scale(nf.sqrt())
    };
    Vector::from_dvector(v)
}

/// `V_{n+1} : C^{n+1} → C^n` with `V e_j = φ_j^{(n)}`; the block frame
/// matrix itself.
pub fn vertical_v<S: RadicalScalar>(n: usize) -> Result<DMatrix<S>> {
    cc_frame_matrix(n)
}

/// `(V V*, V* V)` computed in the given scalar.
pub fn vertical_products<S: RadicalScalar>(n: usize) -> Result<(DMatrix<S>, DMatrix<S>)> {
    let v = vertical_v::<S>(n)?;
    let vt = v.transpose();
    Ok((product(&v, &vt), product(&vt, &v)))
}

/// Blocks of a direct sum `⊕ K_n`, with all weights strictly increasing in
/// block order.
#[derive(Clone, Debug)]
pub struct CCFamily<T: Real> {
    blocks: Vec<CCBlock<T>>,
}

impl<T: Real> CCFamily<T> {
    pub fn new(blocks: Vec<CCBlock<T>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(FrameError::EmptyFamily);
        }
        for (b, pair) in blocks.windows(2).enumerate() {
            let last = *pair[0].e.last().expect("non-empty block");
            if pair[1].e[0] <= last {
                return Err(FrameError::DegenerateWeights(format!(
                    "block {} starts at {} which does not exceed the end {} of block {b}",
                    b + 1,
                    to_f64(pair[1].e[0]),
                    to_f64(last)
                )));
            }
        }
        Ok(Self { blocks })
    }

    /// Blocks of the given sizes with weights `1, 2, 3, …` in global order.
    pub fn ranked(sizes: &[usize]) -> Result<Self> {
        let mut next = 1.0;
        let mut blocks = Vec::with_capacity(sizes.len());
        for &n in sizes {
            let e = (0..=n).map(|k| lit(next + k as f64)).collect();
            next += (n + 1) as f64;
            blocks.push(CCBlock::new(n, e)?);
        }
        Self::new(blocks)
    }

    pub fn blocks(&self) -> &[CCBlock<T>] {
        &self.blocks
    }

    /// Frame of `⊕_{b < count} K_{n_b}` with block-diagonal synthesis,
    /// labelled `1..` in global order, and the concatenated weights.
    pub fn truncated_frame(&self, count: usize) -> Result<(Frame<T>, Weights<T>)> {
        if count == 0 || count > self.blocks.len() {
            return Err(FrameError::IndexOutOfRange {
                index: count,
                len: self.blocks.len(),
            });
        }
        let blocks = &self.blocks[..count];
        let dim: usize = blocks.iter().map(|b| b.n).sum();
        let len: usize = blocks.iter().map(|b| b.n + 1).sum();
        let mut synth = CMat::zeros(dim, len);
        let mut weights = Vec::with_capacity(len);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            synth
                .view_mut((r0, c0), (b.n, b.n + 1))
                .copy_from(b.frame().synthesis_matrix());
            weights.extend_from_slice(&b.e);
            r0 += b.n;
            c0 += b.n + 1;
        }
        let frame = Frame::from_synthesis(synth, (1..=len as i64).collect())?;
        Ok((frame, Weights::new(weights)?))
    }
}

/// Block-diagonal Hamiltonian over the first `count` blocks.
pub fn direct_sum_hamiltonian<T: Real>(family: &CCFamily<T>, count: usize) -> Result<FrameHamiltonian<T>> {
    let (frame, weights) = family.truncated_frame(count)?;
    assemble(&frame, &weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{excess, naimark_dilate, parseval_defect};
    use crate::hamiltonian::dense_spectrum;
    use crate::linalg::max_abs_entry;
    use crate::surd::Surd;
    use num_traits::{One, Zero};
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn close(a: &CVec<f64>, b: &[f64], eps: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, &y)| (x - creal(y)).norm() <= eps)
    }

    #[test]
    fn frame_examples() {
        let f1 = cc_frame::<f64>(1).unwrap();
        assert!(close(f1.vector(0).coeffs(), &[0.0], 0.0));
        assert!(close(f1.vector(1).coeffs(), &[1.0], 0.0));
        let f2 = cc_frame::<f64>(2).unwrap();
        let s = 0.5f64.sqrt();
        assert!(close(f2.vector(0).coeffs(), &[0.5, -0.5], 0.0));
        assert!(close(f2.vector(1).coeffs(), &[-0.5, 0.5], 0.0));
        assert!(close(f2.vector(2).coeffs(), &[s, s], 1e-15));
        for n in 1..=30 {
            let f = cc_frame::<f64>(n).unwrap();
            assert!(parseval_defect(&f) <= 1e-14, "n = {n}");
            assert_eq!(excess(&f).unwrap(), 1);
        }
        assert!(cc_frame::<f64>(0).is_err());
    }

    #[test]
    fn exact_frame_is_parseval() {
        for n in 1..=12 {
            let v = cc_frame_matrix::<Surd>(n).unwrap();
            let s = product(&v, &v.transpose());
            for r in 0..n {
                for c in 0..n {
                    let expected = if r == c { Surd::one() } else { Surd::zero() };
                    assert_eq!(s[(r, c)], expected);
                }
            }
        }
    }

    #[test]
    fn complementary_examples() {
        let s = 0.5f64.sqrt();
        let psi = cc_complementary::<f64>(2).unwrap();
        assert!(close(&psi.synthesis_matrix().row(0).transpose(), &[s, s, 0.0], 1e-15));
        let d = cc_dilation::<f64>(3).unwrap();
        assert!(d.gram_defect() <= 1e-15);
    }

    #[test]
    fn complement_matches_naimark_up_to_phase() {
        // A rank-one complement is unique up to a unimodular factor.
        let n = 5;
        let mut rng = StdRng::seed_from_u64(42);
        let generic = naimark_dilate(&cc_frame::<f64>(n).unwrap(), &mut rng).unwrap();
        assert_eq!(generic.m, 1);
        let explicit = cc_complementary::<f64>(n).unwrap();
        let a = generic.psi.synthesis_matrix();
        let b = explicit.synthesis_matrix();
        let phase = a[(0, 0)] / b[(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!(max_abs_entry(&(a - b.map(|z| z * phase))) < 1e-12);
    }

    #[test]
    fn secular_examples() {
        let s = secular_roots(&[1.0f64, 3.0]).unwrap();
        assert!((s.roots[0] - 2.0).abs() < 1e-13);
        let s = secular_roots(&[0.0f64, 1.0, 2.0]).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!((s.roots[0] - (1.0 - r)).abs() < 1e-12);
        assert!((s.roots[1] - (1.0 + r)).abs() < 1e-12);
        assert!(matches!(
            secular_roots(&[1.0, 1.0, 2.0]),
            Err(FrameError::DegenerateWeights(_))
        ));
        assert!(matches!(
            secular_roots(&[2.0, 1.0]),
            Err(FrameError::DegenerateWeights(_))
        ));
        let msg = secular_roots(&[0.0, 1.0, 1.0 + 1e-12]).unwrap_err().to_string();
        assert!(msg.contains("degenerate weights unsupported in secular solver"));
    }

    #[test]
    fn block_spectrum_examples() {
        let s = 0.5f64.sqrt();
        let sp = cc_block_spectrum(&CCBlock::new(2, vec![1.0f64, 3.0, 5.0]).unwrap()).unwrap();
        assert!((sp.pairs[0].lambda - 2.0).abs() < 1e-13);
        assert_eq!(sp.pairs[0].kind, EigenKind::Secular);
        assert!(close(sp.pairs[0].vector.coeffs(), &[-s, s], 1e-13));
        assert_eq!(sp.pairs[1].lambda, 5.0);
        assert_eq!(sp.pairs[1].kind, EigenKind::Top);
        assert!(close(sp.pairs[1].vector.coeffs(), &[s, s], 1e-15));

        let sp = cc_block_spectrum(&CCBlock::new(3, vec![0.0, 1.0, 2.0, 7.0]).unwrap()).unwrap();
        let r = 1.0 / 3f64.sqrt();
        let ev = sp.eigenvalues();
        for (a, b) in ev.iter().zip([1.0 - r, 1.0 + r, 7.0f64]) {
            assert!((a - b).abs() < 1e-12);
        }

        let sp = cc_block_spectrum(&CCBlock::new(1, vec![-4.0, 9.0]).unwrap()).unwrap();
        assert_eq!(sp.eigenvalues(), vec![9.0]);
        assert!(close(sp.pairs[0].vector.coeffs(), &[1.0], 0.0));
    }

    #[test]
    fn block_validation() {
        assert!(CCBlock::new(2, vec![1.0, 2.0]).is_err());
        assert!(CCBlock::new(2, vec![1.0, 3.0, 2.0]).is_err());
        assert!(CCBlock::new(0, vec![1.0]).is_err());
    }

    #[test]
    fn ladder_examples() {
        let c = ladder_commutator::<f64>(2).unwrap();
        assert_eq!(c, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        let c = ladder_commutator::<Surd>(3).unwrap();
        let diag = [1, 1, -2].map(Surd::integer);
        assert_eq!(
            c,
            DMatrix::from_fn(3, 3, |r, k| if r == k { diag[r].clone() } else { Surd::zero() })
        );
        let a = ladder_a::<f64>(2).unwrap();
        assert_eq!(a.column(0).iter().copied().collect::<Vec<_>>(), vec![0.0, 0.0]);
        assert_eq!(a.column(1).iter().copied().collect::<Vec<_>>(), vec![1.0, 0.0]);
        let num = number_operator::<Surd>(6).unwrap();
        for k in 0..6 {
            assert_eq!(num[(k, k)], Surd::integer(k as i128));
        }
    }

    #[test]
    fn exact_commutator_small() {
        for n in 1..=20 {
            assert_eq!(
                ladder_commutator::<Surd>(n).unwrap(),
                truncation_defect::<Surd>(n).unwrap()
            );
        }
    }

    #[test]
    fn ladder_action_examples() {
        let s = 0.5f64.sqrt();
        let top = ladder_action_on_frame::<f64>(2, 3).unwrap();
        assert!(close(top.coeffs(), &[s, 0.0], 1e-15));
        let first = ladder_action_on_frame::<f64>(2, 1).unwrap();
        assert!(close(first.coeffs(), &[-0.5, 0.0], 1e-15));
        assert!(ladder_action_on_frame::<f64>(2, 4).is_err());
        assert!(ladder_action_on_frame::<f64>(2, 0).is_err());
    }

    #[test]
    fn ladder_action_matches_matrix_product() {
        for n in 1..=20 {
            let a = ladder_a::<f64>(n).unwrap().map(creal);
            let f = cc_frame::<f64>(n).unwrap();
            for j in 1..=n + 1 {
                let direct = &a * f.vector(j - 1).coeffs();
                let formula = ladder_action_on_frame::<f64>(n, j).unwrap();
                assert!((direct - formula.coeffs()).norm() <= 1e-13, "n = {n}, j = {j}");
            }
        }
    }

    #[test]
    fn vertical_examples() {
        let (vv, vtv) = vertical_products::<Surd>(2).unwrap();
        assert_eq!(
            vv,
            DMatrix::from_fn(2, 2, |r, c| if r == c { Surd::one() } else { Surd::zero() })
        );
        assert_eq!(product(&vtv, &vtv), vtv);
        let trace = (0..3).fold(Surd::zero(), |acc, k| acc + vtv[(k, k)].clone());
        assert_eq!(trace, Surd::integer(2));
        let v = vertical_v::<f64>(4).unwrap();
        let f = cc_frame::<f64>(4).unwrap();
        for j in 0..5 {
            assert!(close(f.vector(j).coeffs(), v.column(j).as_slice(), 0.0));
        }
    }

    #[test]
    fn direct_sum_examples() {
        let family = CCFamily::<f64>::ranked(&[1, 2]).unwrap();
        let h = direct_sum_hamiltonian(&family, 2).unwrap();
        let dense = dense_spectrum(&h).unwrap().eigenvalues;
        // Block weights (1, 2) and (3, 4, 5): spectrum {2} ∪ {3.5, 5}.
        for (a, b) in dense.iter().zip([2.0, 3.5, 5.0f64]) {
            assert!((a - b).abs() < 1e-12);
        }
        let single = CCFamily::new(vec![CCBlock::new(2, vec![1.0, 3.0, 5.0]).unwrap()]).unwrap();
        let h = direct_sum_hamiltonian(&single, 1).unwrap();
        let expected = assemble(&cc_frame(2).unwrap(), &Weights::new(vec![1.0, 3.0, 5.0]).unwrap()).unwrap();
        assert_eq!(h.matrix(), expected.matrix());
        let overlap = vec![
            CCBlock::new(1, vec![1.0, 5.0]).unwrap(),
            CCBlock::new(1, vec![4.0, 6.0]).unwrap(),
        ];
        assert!(CCFamily::new(overlap).is_err());
    }

    proptest! {
        #[test]
        fn interlacing_and_dense_agreement(
            n in 2usize..24,
            gaps in proptest::collection::vec(0.05f64..3.0, 24),
            start in -10.0f64..10.0,
        ) {
            let mut e = vec![start];
            for g in &gaps[..n] {
                e.push(e.last().unwrap() + g);
            }
            let block = CCBlock::new(n, e.clone()).unwrap();
            let sp = cc_block_spectrum(&block).unwrap();
            for (j, &mu) in sp.secular.roots.iter().enumerate() {
                prop_assert!(e[j] < mu && mu < e[j + 1]);
            }
            let mut ours = sp.eigenvalues();
            ours.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let dense = dense_spectrum(&block.hamiltonian()).unwrap().eigenvalues;
            for (a, b) in ours.iter().zip(&dense) {
                prop_assert!((a - b).abs() <= 1e-9);
            }
            for p in &sp.pairs {
                prop_assert!(p.relative_residual <= 1e-8);
            }
        }
    }
}

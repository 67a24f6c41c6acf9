//! Lie-algebra closure of skew-Hermitian generators, with classification.
//!
//! The closure treats skew-Hermitian N x N matrices as a real vector space of
//! dimension N^2 (real and imaginary parts stacked), orthonormalizes with
//! modified Gram-Schmidt plus one re-orthogonalization pass, and commutates
//! worklist elements pairwise until nothing new appears, the dimension
//! saturates, or the commutator budget runs out.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{commutator_matrix, DenseOperator, SKEW_HERMITIAN_TOL};

/// Default relative tolerance for linear-independence tests.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Candidates with pre-projection norm below this are treated as zero.
const ZERO_NORM_FLOOR: f64 = 1e-13;
/// |trace| below this counts as traceless.
const TRACE_TOL: f64 = 1e-9;
/// Eigenvalues of the constraint Gramian below this mark kernel candidates.
const KERNEL_EIG_TOL: f64 = 1e-10;
/// Max |g^T J + J g| entry allowed for an invariant form.
const FORM_RESIDUAL_TOL: f64 = 1e-9;
/// Smallest singular value of a normalized form required for nondegeneracy.
const FORM_SINGULAR_TOL: f64 = 1e-8;

/// Candidates are orthogonalized in blocks of this many columns so the
/// projections run as matrix-matrix products.
const CHUNK: usize = 256;

/// Default commutator budget for an N x N closure.
pub fn default_budget(dim: usize) -> usize {
    4usize.saturating_mul(dim.pow(2).saturating_mul(dim.pow(2)))
}

/// Orthonormal basis (Hilbert-Schmidt sense) of a generated Lie algebra of
/// skew-Hermitian matrices.
#[derive(Debug, Clone)]
pub struct LieBasis {
    dim_space: usize,
    elements: Vec<DenseOperator>,
    complete: bool,
    tol: f64,
    commutators_used: usize,
}

/// Classification outcome for a complete closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlgebraKind {
    /// The full algebra u(N).
    FullU,
    /// The traceless algebra su(N).
    Su,
    /// Conjugate of the compact symplectic algebra sp(N/2).
    SymplecticIso,
    /// None of the recognized cases.
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraClass {
    pub kind: AlgebraKind,
    pub operator_controllable: bool,
    pub state_controllable: bool,
}

impl AlgebraClass {
    fn from_kind(kind: AlgebraKind) -> Self {
        let (op, state) = match kind {
            AlgebraKind::FullU | AlgebraKind::Su => (true, true),
            AlgebraKind::SymplecticIso => (false, true),
            AlgebraKind::Other => (false, false),
        };
        AlgebraClass { kind, operator_controllable: op, state_controllable: state }
    }
}

/// Generate an HS-orthonormal basis of the smallest real Lie algebra of
/// skew-Hermitian matrices containing `generators`.
///
/// `budget` caps the number of commutator evaluations; exhausting it yields a
/// truncated basis with `complete() == false` rather than an error.
pub fn closure(generators: &[DenseOperator], budget: usize, tol: f64) -> Result<LieBasis> {
    if generators.is_empty() {
        return Err(Error::spec("closure", "generator list must be nonempty"));
    }
    let n = generators[0].dim();
    for (index, g) in generators.iter().enumerate() {
        if g.dim() != n {
            return Err(Error::DimensionMismatch { left: n, right: g.dim() });
        }
        let dev = g.skew_hermitian_deviation();
        if dev > SKEW_HERMITIAN_TOL {
            return Err(Error::NotSkewHermitian { index, deviation: dev });
        }
    }
    let n2 = n * n;
    let len = 2 * n2;
    // Commutators are traceless, so traceless generators confine the whole
    // algebra to the traceless subspace and su(N) saturates the dimension.
    let all_traceless = generators.iter().all(|g| g.trace().norm() < TRACE_TOL);
    let cap = if all_traceless { n2 - 1 } else { n2 };

    let mut span = SpanBuilder::new(len, cap, tol);
    let mut mats: Vec<DMatrix<Complex64>> = Vec::new();

    // Seed with the generators (no budget cost).
    for block in generators.chunks(CHUNK) {
        let mut pres = Vec::with_capacity(block.len());
        for (c, g) in block.iter().enumerate() {
            let norm = span.load_candidate(c, g.matrix());
            pres.push(norm);
        }
        span.absorb_block(block.len(), &pres, &mut mats, n);
        if span.k == cap {
            break;
        }
    }

    let mut used = 0usize;
    let mut exhausted_with_work_left = false;
    let mut i = 1;
    'outer: while i < mats.len() && span.k < cap {
        let mut j0 = 0;
        while j0 < i {
            let want = (i - j0).min(CHUNK);
            let take = want.min(budget - used);
            if take == 0 {
                exhausted_with_work_left = true;
                break 'outer;
            }
            let mut pres = Vec::with_capacity(take);
            for (c, j) in (j0..j0 + take).enumerate() {
                let cand = commutator_matrix(&mats[i], &mats[j]);
                pres.push(span.load_candidate(c, &cand));
            }
            used += take;
            span.absorb_block(take, &pres, &mut mats, n);
            if span.k == cap {
                break 'outer;
            }
            if take < want {
                exhausted_with_work_left = true;
                break 'outer;
            }
            j0 += take;
        }
        i += 1;
    }
    let complete = span.k == cap || !exhausted_with_work_left;

    let elements = mats.into_iter().map(DenseOperator::from_matrix).collect();
    Ok(LieBasis { dim_space: n, elements, complete, tol, commutators_used: used })
}

impl LieBasis {
    /// Matrix dimension N of the represented operators.
    pub fn dim_space(&self) -> usize {
        self.dim_space
    }

    /// Number of basis elements (the real dimension of the spanned algebra).
    pub fn dimension(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[DenseOperator] {
        &self.elements
    }

    /// Whether the closure terminated by itself (worklist empty or dimension
    /// saturated) rather than by budget exhaustion.
    pub fn complete(&self) -> bool {
        self.complete
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn commutators_used(&self) -> usize {
        self.commutators_used
    }

    /// Membership test: true iff the residual of `op` after projection onto
    /// the span is below `tol` times its norm. The zero matrix is a member.
    pub fn contains(&self, op: &DenseOperator) -> Result<bool> {
        if op.dim() != self.dim_space {
            return Err(Error::DimensionMismatch { left: op.dim(), right: self.dim_space });
        }
        let mut v = vectorize(op.matrix());
        let pre = norm(&v);
        if pre <= ZERO_NORM_FLOOR {
            return Ok(true);
        }
        let basis_vecs: Vec<Vec<f64>> =
            self.elements.iter().map(|e| vectorize(e.matrix())).collect();
        for _ in 0..2 {
            for b in &basis_vecs {
                let c = dot(b, &v);
                axpy(-c, b, &mut v);
            }
        }
        Ok(norm(&v) < self.tol * pre)
    }

    /// Classify a complete closure against the recognized algebra cases.
    pub fn classify(&self) -> Result<AlgebraClass> {
        if !self.complete {
            return Err(Error::IncompleteBasis { commutators: self.commutators_used });
        }
        let n = self.dim_space;
        let n2 = n * n;
        if self.dimension() == n2 {
            return Ok(AlgebraClass::from_kind(AlgebraKind::FullU));
        }
        let all_traceless = self.elements.iter().all(|e| e.trace().norm() < TRACE_TOL);
        if self.dimension() == n2 - 1 && all_traceless {
            return Ok(AlgebraClass::from_kind(AlgebraKind::Su));
        }
        if n % 2 == 0
            && self.dimension() == (n / 2) * (n + 1)
            && self.invariant_antisymmetric_form().is_some()
        {
            return Ok(AlgebraClass::from_kind(AlgebraKind::SymplecticIso));
        }
        Ok(AlgebraClass::from_kind(AlgebraKind::Other))
    }

    /// Search for an antisymmetric J with g^T J + J g = 0 for every basis
    /// element g, nondegenerate after normalizing ||J||_F = 1.
    ///
    /// The antisymmetry constraint is built into the parametrization; the
    /// kernel of the stacked linear constraints is found through the
    /// constraint Gramian, and every candidate is verified against the raw
    /// residual before being returned.
    pub fn invariant_antisymmetric_form(&self) -> Option<DMatrix<Complex64>> {
        let n = self.dim_space;
        if n < 2 || self.elements.is_empty() {
            return None;
        }
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|j| ((j + 1)..n).map(move |k| (j, k))).collect();
        let p = pairs.len();
        let inv_sqrt2 = Complex64::new(1.0 / std::f64::consts::SQRT_2, 0.0);
        let antisym_basis: Vec<DMatrix<Complex64>> = pairs
            .iter()
            .map(|&(j, k)| {
                let mut b = DMatrix::<Complex64>::zeros(n, n);
                b[(j, k)] = inv_sqrt2;
                b[(k, j)] = -inv_sqrt2;
                b
            })
            .collect();

        let mut gram = DMatrix::<Complex64>::zeros(p, p);
        for g in &self.elements {
            let gt = g.matrix().transpose();
            let mut m = DMatrix::<Complex64>::zeros(n * n, p);
            for (col, b) in antisym_basis.iter().enumerate() {
                let constraint = &gt * b + b * g.matrix();
                m.column_mut(col).copy_from_slice(constraint.as_slice());
            }
            gram += m.ad_mul(&m);
        }

        let eigen = nalgebra::SymmetricEigen::new(gram);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));
        for idx in order {
            if eigen.eigenvalues[idx] > KERNEL_EIG_TOL {
                break;
            }
            let coeffs = eigen.eigenvectors.column(idx);
            let mut j_mat = DMatrix::<Complex64>::zeros(n, n);
            for (k, b) in antisym_basis.iter().enumerate() {
                j_mat += b * coeffs[k];
            }
            let norm_j = j_mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm_j <= ZERO_NORM_FLOOR {
                continue;
            }
            j_mat /= Complex64::new(norm_j, 0.0);
            let residual = self
                .elements
                .iter()
                .map(|g| {
                    let r = g.matrix().transpose() * &j_mat + &j_mat * g.matrix();
                    r.iter().map(|z| z.norm()).fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if residual >= FORM_RESIDUAL_TOL {
                continue;
            }
            let svd = j_mat.clone().svd(false, false);
            let smallest = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
            if smallest > FORM_SINGULAR_TOL {
                return Some(j_mat);
            }
        }
        None
    }

    /// Max deviation of the Gram matrix from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let vecs: Vec<Vec<f64>> = self.elements.iter().map(|e| vectorize(e.matrix())).collect();
        let mut worst = 0.0f64;
        for (i, a) in vecs.iter().enumerate() {
            for (j, b) in vecs.iter().enumerate() {
                let g = dot(a, b);
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - expect).abs());
            }
        }
        worst
    }
}

/// Incremental orthonormal span over real vectorizations, with block
/// projection against the accepted columns.
struct SpanBuilder {
    len: usize,
    cap: usize,
    tol: f64,
    k: usize,
    cols: DMatrix<f64>,
    block: DMatrix<f64>,
    coeffs: DMatrix<f64>,
}

impl SpanBuilder {
    fn new(len: usize, cap: usize, tol: f64) -> Self {
        SpanBuilder {
            len,
            cap,
            tol,
            k: 0,
            cols: DMatrix::zeros(len, cap),
            block: DMatrix::zeros(len, CHUNK),
            coeffs: DMatrix::zeros(cap, CHUNK),
        }
    }

    /// Copy a candidate matrix into block column `c`; returns its norm.
    fn load_candidate(&mut self, c: usize, m: &DMatrix<Complex64>) -> f64 {
        let n2 = self.len / 2;
        let src = m.as_slice();
        debug_assert_eq!(src.len(), n2);
        let dst = &mut self.block.column_mut(c);
        let mut acc = 0.0;
        for (r, z) in src.iter().enumerate() {
            dst[r] = z.re;
            dst[r + n2] = z.im;
            acc += z.norm_sqr();
        }
        acc.sqrt()
    }

    /// Orthogonalize the first `count` block columns against the span and
    /// against each other; accept survivors into the span and into `mats`.
    fn absorb_block(
        &mut self,
        count: usize,
        pres: &[f64],
        mats: &mut Vec<DMatrix<Complex64>>,
        n: usize,
    ) {
        if count == 0 {
            return;
        }
        // Two projection passes against the accepted columns.
        if self.k > 0 {
            for _ in 0..2 {
                // coeffs[0..k, 0..count] = cols[.., 0..k]^T * block[.., 0..count]
                unsafe {
                    matrixmultiply::dgemm(
                        self.k,
                        self.len,
                        count,
                        1.0,
                        self.cols.as_slice().as_ptr(),
                        self.len as isize,
                        1,
                        self.block.as_slice().as_ptr(),
                        1,
                        self.len as isize,
                        0.0,
                        self.coeffs.as_mut_slice().as_mut_ptr(),
                        1,
                        self.cap as isize,
                    );
                }
                // block -= cols[.., 0..k] * coeffs
                unsafe {
                    matrixmultiply::dgemm(
                        self.len,
                        self.k,
                        count,
                        -1.0,
                        self.cols.as_slice().as_ptr(),
                        1,
                        self.len as isize,
                        self.coeffs.as_slice().as_ptr(),
                        1,
                        self.cap as isize,
                        1.0,
                        self.block.as_mut_slice().as_mut_ptr(),
                        1,
                        self.len as isize,
                    );
                }
            }
        }
        // Sequential Gram-Schmidt within the block: candidates only need
        // projecting against vectors accepted from this same block, since the
        // GEMM passes already removed the older span components.
        let mut fresh: Vec<Vec<f64>> = Vec::new();
        let block = self.block.as_mut_slice();
        for c in 0..count {
            if self.k + fresh.len() == self.cap {
                break;
            }
            if pres[c] <= ZERO_NORM_FLOOR {
                continue;
            }
            let v = &mut block[c * self.len..(c + 1) * self.len];
            for _ in 0..2 {
                for b in &fresh {
                    let coef = dot(b, v);
                    axpy(-coef, b, v);
                }
            }
            let post = norm(v);
            if post > self.tol * pres[c] {
                let inv = 1.0 / post;
                fresh.push(v.iter().map(|&x| x * inv).collect());
            }
        }
        for v in fresh {
            self.cols.column_mut(self.k).copy_from_slice(&v);
            mats.push(devectorize(&v, n));
            self.k += 1;
        }
    }
}

fn vectorize(m: &DMatrix<Complex64>) -> Vec<f64> {
    let n2 = m.len();
    let mut v = vec![0.0; 2 * n2];
    for (r, z) in m.as_slice().iter().enumerate() {
        v[r] = z.re;
        v[r + n2] = z.im;
    }
    v
}

fn devectorize(v: &[f64], n: usize) -> DMatrix<Complex64> {
    let n2 = n * n;
    DMatrix::from_iterator(n, n, (0..n2).map(|r| Complex64::new(v[r], v[r + n2])))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{pauli_matrix, skew_hermitian_basis, PauliLabel};

    fn i_pauli(l: PauliLabel) -> DenseOperator {
        pauli_matrix(l).times_i()
    }

    fn kron(a: &DenseOperator, b: &DenseOperator) -> DenseOperator {
        a.kron(b)
    }

    fn i_pauli_pair(a: PauliLabel, b: PauliLabel) -> DenseOperator {
        kron(&pauli_matrix(a), &pauli_matrix(b)).times_i()
    }

    /// Test-only rank oracle: SVD rank of the stacked real vectorizations.
    fn svd_rank(ops: &[DenseOperator]) -> usize {
        let len = 2 * ops[0].dim() * ops[0].dim();
        let mut stack = DMatrix::<f64>::zeros(ops.len(), len);
        for (r, op) in ops.iter().enumerate() {
            for (c, x) in vectorize(op.matrix()).into_iter().enumerate() {
                stack[(r, c)] = x;
            }
        }
        let svd = stack.svd(false, false);
        let max = svd.singular_values.iter().copied().fold(0.0, f64::max);
        svd.singular_values.iter().filter(|&&s| s > 1e-9 * max.max(1.0)).count()
    }

    #[test]
    fn su2_closure_has_dimension_three() {
        let basis =
            closure(&[i_pauli(PauliLabel::X), i_pauli(PauliLabel::Y)], 1000, DEFAULT_TOL).unwrap();
        assert_eq!(basis.dimension(), 3);
        assert!(basis.complete());
        assert_eq!(svd_rank(basis.elements()), 3);
        assert!(basis.gram_deviation() < 10.0 * DEFAULT_TOL);
    }

    #[test]
    fn u2_closure_has_dimension_four() {
        let gens =
            [i_pauli(PauliLabel::X), i_pauli(PauliLabel::Y), DenseOperator::identity(2).times_i()];
        let basis = closure(&gens, 1000, DEFAULT_TOL).unwrap();
        assert_eq!(basis.dimension(), 4);
    }

    #[test]
    fn single_generator_closure_is_one_dimensional() {
        let basis = closure(&[i_pauli(PauliLabel::Z)], 1000, DEFAULT_TOL).unwrap();
        assert_eq!(basis.dimension(), 1);
        assert!(basis.complete());
    }

    #[test]
    fn heisenberg_with_local_u2_saturates_u4() {
        let heis = i_pauli_pair(PauliLabel::X, PauliLabel::X)
            .add(&i_pauli_pair(PauliLabel::Y, PauliLabel::Y))
            .unwrap()
            .add(&i_pauli_pair(PauliLabel::Z, PauliLabel::Z))
            .unwrap();
        let mut gens = vec![heis];
        for op in [
            DenseOperator::identity(2).times_i(),
            i_pauli(PauliLabel::X),
            i_pauli(PauliLabel::Y),
            i_pauli(PauliLabel::Z),
        ] {
            gens.push(kron(&op, &DenseOperator::identity(2)));
        }
        let basis = closure(&gens, default_budget(4), DEFAULT_TOL).unwrap();
        assert_eq!(basis.dimension(), 16);
        assert_eq!(svd_rank(basis.elements()), 16);
    }

    #[test]
    fn closure_rejects_bad_input() {
        assert!(closure(&[], 10, DEFAULT_TOL).is_err());
        let mixed = [i_pauli(PauliLabel::X), DenseOperator::identity(4).times_i()];
        assert!(matches!(
            closure(&mixed, 10, DEFAULT_TOL),
            Err(Error::DimensionMismatch { .. })
        ));
        let not_skew = [pauli_matrix(PauliLabel::X)];
        assert!(matches!(
            closure(&not_skew, 10, DEFAULT_TOL),
            Err(Error::NotSkewHermitian { .. })
        ));
    }

    #[test]
    fn budget_exhaustion_marks_incomplete() {
        // su(2) needs one commutator to finish; budget 0 leaves it truncated.
        let gens = [i_pauli(PauliLabel::X), i_pauli(PauliLabel::Y)];
        let basis = closure(&gens, 0, DEFAULT_TOL).unwrap();
        assert!(!basis.complete());
        assert_eq!(basis.dimension(), 2);
        assert!(matches!(basis.classify(), Err(Error::IncompleteBasis { .. })));
    }

    #[test]
    fn contains_examples() {
        let basis =
            closure(&[i_pauli(PauliLabel::X), i_pauli(PauliLabel::Y)], 1000, DEFAULT_TOL).unwrap();
        assert!(basis.contains(&i_pauli(PauliLabel::Z)).unwrap());
        assert!(!basis.contains(&DenseOperator::identity(2).times_i()).unwrap());
        assert!(basis.contains(&DenseOperator::zeros(2)).unwrap());
        // every generator is a member
        assert!(basis.contains(&i_pauli(PauliLabel::X)).unwrap());
        assert!(basis.contains(&i_pauli(PauliLabel::Y)).unwrap());
    }

    #[test]
    fn classify_su2_and_u2() {
        let su2 =
            closure(&[i_pauli(PauliLabel::X), i_pauli(PauliLabel::Y)], 1000, DEFAULT_TOL).unwrap();
        let class = su2.classify().unwrap();
        assert_eq!(class.kind, AlgebraKind::Su);
        assert!(class.operator_controllable && class.state_controllable);

        let u2 = closure(
            &[i_pauli(PauliLabel::X), i_pauli(PauliLabel::Y), DenseOperator::identity(2).times_i()],
            1000,
            DEFAULT_TOL,
        )
        .unwrap();
        assert_eq!(u2.classify().unwrap().kind, AlgebraKind::FullU);
    }

    /// Basis of the compact symplectic algebra sp(n) in block form
    /// [[X, Y], [-conj(Y), conj(X)]] with X skew-Hermitian and Y symmetric.
    /// Built directly from the constraint, independent of the closure.
    pub(crate) fn sp_basis_direct(n: usize) -> Vec<DenseOperator> {
        let mut out = Vec::new();
        for x in skew_hermitian_basis(n) {
            let mut g = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
            for r in 0..n {
                for c in 0..n {
                    g[(r, c)] = x.matrix()[(r, c)];
                    g[(n + r, n + c)] = x.matrix()[(r, c)].conj();
                }
            }
            out.push(DenseOperator::from_matrix(g));
        }
        let mut sym = Vec::new();
        for j in 0..n {
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            m[(j, j)] = Complex64::new(1.0, 0.0);
            sym.push(m);
        }
        let s = 1.0 / std::f64::consts::SQRT_2;
        for j in 0..n {
            for k in (j + 1)..n {
                let mut m = DMatrix::<Complex64>::zeros(n, n);
                m[(j, k)] = Complex64::new(s, 0.0);
                m[(k, j)] = Complex64::new(s, 0.0);
                sym.push(m);
            }
        }
        for base in sym {
            for phase in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
                let y = &base * phase;
                let mut g = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
                for r in 0..n {
                    for c in 0..n {
                        g[(r, n + c)] = y[(r, c)];
                        g[(n + r, c)] = -y[(r, c)].conj();
                    }
                }
                out.push(DenseOperator::from_matrix(g));
            }
        }
        out
    }

    #[test]
    fn sp2_closure_classifies_symplectic() {
        let gens = sp_basis_direct(2);
        assert_eq!(gens.len(), 10);
        for g in &gens {
            assert!(g.is_skew_hermitian(1e-12));
        }
        let basis = closure(&gens, default_budget(4), DEFAULT_TOL).unwrap();
        assert_eq!(basis.dimension(), 10);
        let class = basis.classify().unwrap();
        assert_eq!(class.kind, AlgebraKind::SymplecticIso);
        assert!(class.state_controllable);
        assert!(!class.operator_controllable);

        let j = basis.invariant_antisymmetric_form().expect("sp(2) preserves a form");
        // normalized J has all singular values 1/2
        let svd = j.clone().svd(false, false);
        for s in svd.singular_values.iter() {
            assert!((s - 0.5).abs() < 1e-9, "singular value {s}");
        }
        for g in basis.elements() {
            let r = g.matrix().transpose() * &j + &j * g.matrix();
            let worst = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(worst < 1e-9, "constraint residual {worst}");
        }
    }

    #[test]
    fn full_u4_has_no_invariant_form() {
        let mut gens = Vec::new();
        for a in [PauliLabel::I, PauliLabel::X, PauliLabel::Y, PauliLabel::Z] {
            for b in [PauliLabel::I, PauliLabel::X, PauliLabel::Y, PauliLabel::Z] {
                gens.push(i_pauli_pair(a, b));
            }
        }
        let basis = closure(&gens, default_budget(4), DEFAULT_TOL).unwrap();
        assert_eq!(basis.dimension(), 16);
        assert!(basis.invariant_antisymmetric_form().is_none());
    }

    #[test]
    fn su2_invariant_form_is_standard() {
        let basis = closure(
            &[i_pauli(PauliLabel::X), i_pauli(PauliLabel::Y), i_pauli(PauliLabel::Z)],
            1000,
            DEFAULT_TOL,
        )
        .unwrap();
        // su(2) = sp(1): the unique antisymmetric form in dimension 2.
        let j = basis.invariant_antisymmetric_form().expect("su(2) preserves a form");
        let ratio = j[(0, 1)];
        assert!(ratio.norm() > 0.5);
        assert!((j[(1, 0)] + ratio).norm() < 1e-12);
        assert!(j[(0, 0)].norm() < 1e-12 && j[(1, 1)].norm() < 1e-12);
        // precedence still reports SU, not the symplectic coincidence
        assert_eq!(basis.classify().unwrap().kind, AlgebraKind::Su);
    }

    #[test]
    fn traceless_generators_stay_traceless_and_capped() {
        let gens = [i_pauli(PauliLabel::X), i_pauli(PauliLabel::Y)];
        let basis = closure(&gens, 1000, DEFAULT_TOL).unwrap();
        for e in basis.elements() {
            assert!(e.trace().norm() < 1e-9);
        }
        assert!(basis.dimension() <= 3);
    }

    #[test]
    fn closure_dimension_invariant_under_shuffle_and_mixing() {
        // deterministic LCG for shuffles/mixes
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state
        };
        let base: Vec<DenseOperator> = vec![
            i_pauli_pair(PauliLabel::X, PauliLabel::X)
                .add(&i_pauli_pair(PauliLabel::Y, PauliLabel::Y))
                .unwrap(),
            kron(&pauli_matrix(PauliLabel::X), &pauli_matrix(PauliLabel::I)).times_i(),
            kron(&pauli_matrix(PauliLabel::Y), &pauli_matrix(PauliLabel::I)).times_i(),
            kron(&pauli_matrix(PauliLabel::I), &pauli_matrix(PauliLabel::Z)).times_i(),
        ];
        let reference = closure(&base, default_budget(4), DEFAULT_TOL).unwrap().dimension();
        for _ in 0..5 {
            // shuffle
            let mut shuffled = base.clone();
            for i in (1..shuffled.len()).rev() {
                let j = (next() % (i as u64 + 1)) as usize;
                shuffled.swap(i, j);
            }
            let dim = closure(&shuffled, default_budget(4), DEFAULT_TOL).unwrap().dimension();
            assert_eq!(dim, reference);

            // invertible real mixing (random triangular with unit diagonal,
            // then a permutation: always invertible)
            let k = base.len();
            let mut mixed: Vec<DenseOperator> = Vec::with_capacity(k);
            for i in 0..k {
                let mut acc = base[i].clone();
                for j in 0..i {
                    let c = ((next() % 2000) as f64 / 1000.0) - 1.0;
                    acc = acc.add(&base[j].scale(c)).unwrap();
                }
                mixed.push(acc);
            }
            let dim = closure(&mixed, default_budget(4), DEFAULT_TOL).unwrap().dimension();
            assert_eq!(dim, reference);
        }
    }

    #[test]
    fn canonical_generating_sets_saturate_full_u() {
        // N = 2: paulis + identity
        let n2 = closure(
            &[i_pauli(PauliLabel::X), i_pauli(PauliLabel::Y), DenseOperator::identity(2).times_i()],
            default_budget(2),
            DEFAULT_TOL,
        )
        .unwrap();
        assert_eq!(n2.classify().unwrap().kind, AlgebraKind::FullU);

        // N = 4: one-site paulis + coupling + identity
        let gens4 = vec![
            i_pauli_pair(PauliLabel::X, PauliLabel::I),
            i_pauli_pair(PauliLabel::Y, PauliLabel::I),
            i_pauli_pair(PauliLabel::I, PauliLabel::X),
            i_pauli_pair(PauliLabel::I, PauliLabel::Y),
            i_pauli_pair(PauliLabel::Z, PauliLabel::Z),
            DenseOperator::identity(4).times_i(),
        ];
        let b4 = closure(&gens4, default_budget(4), DEFAULT_TOL).unwrap();
        assert_eq!(b4.dimension(), 16);
        assert_eq!(b4.classify().unwrap().kind, AlgebraKind::FullU);

        // N = 8: three qubits on a line
        let triple = |a: PauliLabel, b: PauliLabel, c: PauliLabel| {
            kron(&kron(&pauli_matrix(a), &pauli_matrix(b)), &pauli_matrix(c)).times_i()
        };
        let mut gens8 = vec![DenseOperator::identity(8).times_i()];
        for l in [PauliLabel::X, PauliLabel::Y] {
            gens8.push(triple(l, PauliLabel::I, PauliLabel::I));
            gens8.push(triple(PauliLabel::I, l, PauliLabel::I));
            gens8.push(triple(PauliLabel::I, PauliLabel::I, l));
        }
        gens8.push(triple(PauliLabel::Z, PauliLabel::Z, PauliLabel::I));
        gens8.push(triple(PauliLabel::I, PauliLabel::Z, PauliLabel::Z));
        let b8 = closure(&gens8, default_budget(8), DEFAULT_TOL).unwrap();
        assert_eq!(b8.dimension(), 64);
        assert_eq!(b8.classify().unwrap().kind, AlgebraKind::FullU);
        assert_eq!(svd_rank(b8.elements()), 64);
    }
}

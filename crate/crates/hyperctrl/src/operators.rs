//! Dense tensor-product operator algebra on composite Hilbert spaces.
//!
//! Subsystems are identified by positive integers; tensor factors are always
//! ordered by ascending subsystem id, so every embedding is canonical and the
//! resulting matrices are reproducible entry for entry.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute entrywise tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Absolute entrywise tolerance for accepting a matrix as skew-Hermitian.
pub const SKEW_HERMITIAN_TOL: f64 = 1e-10;

/// One of the four single-qubit Pauli operators (identity included).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliLabel {
    I,
    X,
    Y,
    Z,
}

impl PauliLabel {
    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'I' => Ok(PauliLabel::I),
            'X' => Ok(PauliLabel::X),
            'Y' => Ok(PauliLabel::Y),
            'Z' => Ok(PauliLabel::Z),
            other => Err(Error::UnknownPauli(other.to_string())),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            PauliLabel::I => 'I',
            PauliLabel::X => 'X',
            PauliLabel::Y => 'Y',
            PauliLabel::Z => 'Z',
        }
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// The 2x2 matrix of a Pauli label.
pub fn pauli_matrix(label: PauliLabel) -> DenseOperator {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let entries = match label {
        PauliLabel::I => [one, z, z, one],
        PauliLabel::X => [z, one, one, z],
        PauliLabel::Y => [z, i, -i, z],
        PauliLabel::Z => [one, z, z, -one],
    };
    // nalgebra fills column-major; Pauli matrices are symmetric in layout
    // except Y, where the column-major order above encodes [[0,-i],[i,0]].
    DenseOperator::from_matrix(DMatrix::from_column_slice(2, 2, &entries))
}

/// Layout of a composite system: ordered subsystem ids with their local
/// Hilbert-space dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsystemLayout {
    subsystems: Vec<(u32, usize)>,
}

impl SubsystemLayout {
    /// Build a layout from (id, dim) pairs. Ids must be unique and positive,
    /// dims at least 2; the list is stored sorted by id.
    pub fn new(pairs: impl IntoIterator<Item = (u32, usize)>) -> Result<Self> {
        let mut subsystems: Vec<(u32, usize)> = pairs.into_iter().collect();
        if subsystems.is_empty() {
            return Err(Error::spec("subsystems", "layout must contain at least one subsystem"));
        }
        subsystems.sort_by_key(|&(id, _)| id);
        for window in subsystems.windows(2) {
            if window[0].0 == window[1].0 {
                return Err(Error::spec(
                    "subsystems",
                    format!("duplicate subsystem id {}", window[0].0),
                ));
            }
        }
        for &(id, dim) in &subsystems {
            if id == 0 {
                return Err(Error::spec("subsystems", "subsystem ids must be positive"));
            }
            if dim < 2 {
                return Err(Error::spec(
                    "subsystems",
                    format!("subsystem {id} has dimension {dim}; must be at least 2"),
                ));
            }
        }
        let mut total: usize = 1;
        for &(_, dim) in &subsystems {
            total = total.checked_mul(dim).ok_or_else(|| {
                Error::Resource("total Hilbert-space dimension overflows usize".into())
            })?;
        }
        Ok(SubsystemLayout { subsystems })
    }

    pub fn subsystems(&self) -> &[(u32, usize)] {
        &self.subsystems
    }

    pub fn ids(&self) -> BTreeSet<u32> {
        self.subsystems.iter().map(|&(id, _)| id).collect()
    }

    pub fn contains(&self, id: u32) -> bool {
        self.subsystems.binary_search_by_key(&id, |&(i, _)| i).is_ok()
    }

    pub fn dim_of(&self, id: u32) -> Option<usize> {
        self.subsystems
            .binary_search_by_key(&id, |&(i, _)| i)
            .ok()
            .map(|idx| self.subsystems[idx].1)
    }

    /// Product of the local dimensions over `ids` (1 for the empty set).
    pub fn space_dim(&self, ids: &BTreeSet<u32>) -> Result<usize> {
        let mut total: usize = 1;
        for &id in ids {
            let d = self
                .dim_of(id)
                .ok_or_else(|| Error::spec("space", format!("unknown subsystem id {id}")))?;
            total = total
                .checked_mul(d)
                .ok_or_else(|| Error::Resource("space dimension overflows usize".into()))?;
        }
        Ok(total)
    }

    pub fn total_dim(&self) -> usize {
        self.subsystems.iter().map(|&(_, d)| d).product()
    }
}

/// Payload of a Hamiltonian summand: a Pauli string on qubit subsystems, or
/// an explicit Hermitian matrix on the support (factors in ascending id order).
#[derive(Debug, Clone, PartialEq)]
pub enum TermPayload {
    Pauli(BTreeMap<u32, PauliLabel>),
    Matrix(DMatrix<Complex64>),
}

/// One Hermitian summand of a Hamiltonian together with its support.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTerm {
    support: BTreeSet<u32>,
    payload: TermPayload,
    coeff: f64,
}

impl OperatorTerm {
    pub fn pauli(letters: BTreeMap<u32, PauliLabel>, coeff: f64) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::spec("term", "Pauli string must touch at least one subsystem"));
        }
        let support = letters.keys().copied().collect();
        Ok(OperatorTerm { support, payload: TermPayload::Pauli(letters), coeff })
    }

    pub fn explicit(
        support: BTreeSet<u32>,
        matrix: DMatrix<Complex64>,
        coeff: f64,
    ) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::spec("term", "support must be nonempty"));
        }
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::spec(
                "term.matrix",
                format!("matrix is {}x{}, expected square", matrix.nrows(), matrix.ncols()),
            ));
        }
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian { context: "term.matrix".into(), deviation: dev });
        }
        Ok(OperatorTerm { support, payload: TermPayload::Matrix(matrix), coeff })
    }

    pub fn support(&self) -> &BTreeSet<u32> {
        &self.support
    }

    pub fn payload(&self) -> &TermPayload {
        &self.payload
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    /// Check the term against a layout: known ids, Pauli letters only on
    /// dim-2 subsystems, explicit matrix dimension matching the support.
    pub fn validate(&self, layout: &SubsystemLayout) -> Result<()> {
        for &id in &self.support {
            if !layout.contains(id) {
                return Err(Error::spec("term", format!("unknown node {id}")));
            }
        }
        match &self.payload {
            TermPayload::Pauli(letters) => {
                for &id in letters.keys() {
                    if layout.dim_of(id) != Some(2) {
                        return Err(Error::spec(
                            "term.pauli",
                            format!("Pauli letter on subsystem {id}, which is not dimension 2"),
                        ));
                    }
                }
            }
            TermPayload::Matrix(m) => {
                let expected = layout.space_dim(&self.support)?;
                if m.nrows() != expected {
                    return Err(Error::spec(
                        "term.matrix",
                        format!(
                            "matrix dimension {} does not match support dimension {expected}",
                            m.nrows()
                        ),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// A dense complex matrix acting on some tensor space.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Self {
        assert_eq!(matrix.nrows(), matrix.ncols(), "operators must be square");
        DenseOperator { matrix }
    }

    pub fn zeros(dim: usize) -> Self {
        DenseOperator { matrix: DMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        DenseOperator { matrix: DMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    /// Multiply by the imaginary unit (turns a Hermitian operator into a
    /// skew-Hermitian generator).
    pub fn times_i(&self) -> DenseOperator {
        DenseOperator { matrix: &self.matrix * Complex64::new(0.0, 1.0) }
    }

    pub fn scale(&self, factor: f64) -> DenseOperator {
        DenseOperator { matrix: &self.matrix * Complex64::new(factor, 0.0) }
    }

    pub fn add(&self, other: &DenseOperator) -> Result<DenseOperator> {
        check_same_dim(self, other)?;
        Ok(DenseOperator { matrix: &self.matrix + &other.matrix })
    }

    pub fn kron(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator { matrix: self.matrix.kronecker(&other.matrix) }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Max absolute entry of M - M^†.
    pub fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.matrix)
    }

    /// Max absolute entry of M + M^†.
    pub fn skew_hermitian_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        let n = self.matrix.nrows();
        for i in 0..n {
            for j in 0..n {
                let d = (self.matrix[(i, j)] + self.matrix[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn is_skew_hermitian(&self, tol: f64) -> bool {
        self.skew_hermitian_deviation() <= tol
    }

    /// Frobenius norm; agrees with the Hilbert-Schmidt norm.
    pub fn hs_norm(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

fn check_same_dim(a: &DenseOperator, b: &DenseOperator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    Ok(())
}

/// Commutator AB - BA.
pub fn commutator(a: &DenseOperator, b: &DenseOperator) -> Result<DenseOperator> {
    check_same_dim(a, b)?;
    Ok(DenseOperator { matrix: commutator_matrix(&a.matrix, &b.matrix) })
}

/// Commutator on raw matrices, via two zgemm calls: C = AB, then C -= BA.
pub(crate) fn commutator_matrix(
    a: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    let n = a.nrows();
    let mut c = DMatrix::<Complex64>::zeros(n, n);
    zgemm(1.0, a, b, 0.0, &mut c);
    zgemm(-1.0, b, a, 1.0, &mut c);
    c
}

/// C = alpha * A * B + beta * C on column-major complex buffers.
fn zgemm(
    alpha: f64,
    a: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
    beta: f64,
    c: &mut DMatrix<Complex64>,
) {
    let (m, k) = (a.nrows(), a.ncols());
    let n = b.ncols();
    debug_assert_eq!(b.nrows(), k);
    debug_assert_eq!((c.nrows(), c.ncols()), (m, n));
    use matrixmultiply::{zgemm as mm_zgemm, CGemmOption};
    // Complex64 is repr(C) { re: f64, im: f64 }, layout-compatible with [f64; 2].
    unsafe {
        mm_zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            m,
            k,
            n,
            [alpha, 0.0],
            a.as_slice().as_ptr() as *const [f64; 2],
            1,
            m as isize,
            b.as_slice().as_ptr() as *const [f64; 2],
            1,
            k as isize,
            [beta, 0.0],
            c.as_mut_slice().as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
}

/// Hilbert-Schmidt inner product Re tr(A^† B).
pub fn hs_inner(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    check_same_dim(a, b)?;
    let mut acc = 0.0;
    for (x, y) in a.matrix.iter().zip(b.matrix.iter()) {
        acc += x.re * y.re + x.im * y.im;
    }
    Ok(acc)
}

/// Embed an operator supported on `support` into the space spanned by
/// `space` (ascending id order), acting as identity elsewhere.
///
/// The support may be non-contiguous inside the space; the embedding fills
/// exactly the entries whose row and column indices agree on all factors
/// outside the support.
pub fn embed(
    op: &DenseOperator,
    support: &BTreeSet<u32>,
    space: &BTreeSet<u32>,
    layout: &SubsystemLayout,
) -> Result<DenseOperator> {
    if !support.is_subset(space) {
        return Err(Error::spec(
            "embed",
            format!("support {support:?} is not contained in the target space {space:?}"),
        ));
    }
    let d_support = layout.space_dim(support)?;
    if op.dim() != d_support {
        return Err(Error::DimensionMismatch { left: op.dim(), right: d_support });
    }
    let dims: Vec<(u32, usize)> = space
        .iter()
        .map(|&id| (id, layout.dim_of(id).expect("space ids validated by space_dim")))
        .collect();
    let d_space = layout.space_dim(space)?;

    // Strides of each factor in the space index (ascending id order, row-major
    // digits: first id is the most significant).
    let mut strides = vec![0usize; dims.len()];
    let mut acc = 1usize;
    for (pos, &(_, d)) in dims.iter().enumerate().rev() {
        strides[pos] = acc;
        acc *= d;
    }
    let support_pos: Vec<usize> =
        dims.iter().enumerate().filter(|(_, (id, _))| support.contains(id)).map(|(p, _)| p).collect();
    let rest_pos: Vec<usize> =
        dims.iter().enumerate().filter(|(_, (id, _))| !support.contains(id)).map(|(p, _)| p).collect();
    let d_rest = d_space / d_support;

    // index(space) = sum over factors digit * stride; enumerate support digit
    // combinations and rest digit combinations separately.
    let expand = |digits: &[usize], positions: &[usize]| -> usize {
        digits.iter().zip(positions).map(|(&dg, &p)| dg * strides[p]).sum()
    };
    let all_digit_tuples = |positions: &[usize]| -> Vec<Vec<usize>> {
        let mut tuples = vec![Vec::new()];
        for &p in positions {
            let d = dims[p].1;
            let mut next = Vec::with_capacity(tuples.len() * d);
            for t in &tuples {
                for dg in 0..d {
                    let mut t2 = t.clone();
                    t2.push(dg);
                    next.push(t2);
                }
            }
            tuples = next;
        }
        tuples
    };

    let support_offsets: Vec<usize> =
        all_digit_tuples(&support_pos).iter().map(|t| expand(t, &support_pos)).collect();
    let rest_offsets: Vec<usize> =
        all_digit_tuples(&rest_pos).iter().map(|t| expand(t, &rest_pos)).collect();
    debug_assert_eq!(support_offsets.len(), d_support);
    debug_assert_eq!(rest_offsets.len(), d_rest);

    let mut out = DMatrix::<Complex64>::zeros(d_space, d_space);
    for (a, &ra) in support_offsets.iter().enumerate() {
        for (b, &rb) in support_offsets.iter().enumerate() {
            let v = op.matrix[(a, b)];
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            for &t in &rest_offsets {
                out[(ra + t, rb + t)] = v;
            }
        }
    }
    Ok(DenseOperator { matrix: out })
}

/// Materialize a term on the given space: coefficient times the payload
/// embedded with identities on `space \ support`.
pub fn term_matrix(
    term: &OperatorTerm,
    space: &BTreeSet<u32>,
    layout: &SubsystemLayout,
) -> Result<DenseOperator> {
    if !term.support().is_subset(space) {
        return Err(Error::spec(
            "term",
            format!("term support {:?} is not contained in the space {space:?}", term.support()),
        ));
    }
    term.validate(layout)?;
    let op = match term.payload() {
        TermPayload::Pauli(letters) => {
            // Build directly as a Kronecker product over the space in id order.
            let mut acc = DenseOperator::from_matrix(DMatrix::identity(1, 1));
            for &id in space {
                let factor = match letters.get(&id) {
                    Some(&l) => pauli_matrix(l),
                    None => DenseOperator::identity(layout.dim_of(id).unwrap()),
                };
                acc = acc.kron(&factor);
            }
            acc
        }
        TermPayload::Matrix(m) => {
            let payload = DenseOperator::from_matrix(m.clone());
            embed(&payload, term.support(), space, layout)?
        }
    };
    Ok(op.scale(term.coeff()))
}

/// HS-orthonormal basis of the skew-Hermitian d x d matrices (a basis of
/// u(d) as a real vector space): i E_kk, (E_jk - E_kj)/sqrt2,
/// i (E_jk + E_kj)/sqrt2.
pub fn skew_hermitian_basis(dim: usize) -> Vec<DenseOperator> {
    let z = Complex64::new(0.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let s = Complex64::new(1.0 / std::f64::consts::SQRT_2, 0.0);
    let mut out = Vec::with_capacity(dim * dim);
    for k in 0..dim {
        let mut m = DMatrix::from_element(dim, dim, z);
        m[(k, k)] = i;
        out.push(DenseOperator::from_matrix(m));
    }
    for j in 0..dim {
        for k in (j + 1)..dim {
            let mut m = DMatrix::from_element(dim, dim, z);
            m[(j, k)] = s;
            m[(k, j)] = -s;
            out.push(DenseOperator::from_matrix(m));
            let mut m = DMatrix::from_element(dim, dim, z);
            m[(j, k)] = i * s;
            m[(k, j)] = i * s;
            out.push(DenseOperator::from_matrix(m));
        }
    }
    out
}

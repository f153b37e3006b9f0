//! Dense complex linear algebra shared by every other module.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Everything here is a pure
//! function; randomness always comes from an explicitly seeded generator.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type Rng64 = ChaCha8Rng;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Tolerance for constructed objects (unitaries, Clifford relations).
pub const TOL_CONSTRUCTION: f64 = 1e-12;
/// Tolerance for Hermiticity checks on computed operators.
pub const TOL_HERMITIAN: f64 = 1e-10;
/// Tolerance for reconstruction identities.
pub const TOL_RECONSTRUCTION: f64 = 1e-9;

pub fn rng_from_seed(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.nrows();
    for i in 0..n {
        for j in i..n {
            if (m[(i, j)] - m[(j, i)].conj()).norm() > tol {
                return false;
            }
        }
    }
    true
}

/// `‖U†U − I‖_∞`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let p = u.adjoint() * u;
    max_abs_diff(&p, &identity(u.ncols()))
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Kronecker product, `(a ⊗ b)[(i·p + k, j·q + l)] = a[(i,j)]·b[(k,l)]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Dense complex product routed through four real GEMMs.
///
/// nalgebra only dispatches real scalar types to its blocked kernel; for the
/// operator sizes used by the spectral action this is an order of magnitude
/// faster than the generic complex product.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(a.ncols(), b.nrows(), "matmul inner dimension mismatch");
    if a.nrows() * a.ncols() * b.ncols() < 32 * 32 * 32 {
        return a * b;
    }
    let ar = a.map(|z| z.re);
    let ai = a.map(|z| z.im);
    let br = b.map(|z| z.re);
    let bi = b.map(|z| z.im);
    let mut re = &ar * &br;
    re.gemm(-1.0, &ai, &bi, 1.0);
    let mut im = &ar * &bi;
    im.gemm(1.0, &ai, &br, 1.0);
    re.zip_map(&im, Complex64::new)
}

/// Haar-distributed `n×n` unitary from the given generator.
///
/// Ginibre matrix, Householder QR, then the diagonal of R is made real
/// positive by absorbing its phases into Q.
pub fn haar_unitary_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidDimension("haar_unitary needs n >= 1".into()));
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z = ComplexMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * scale, im * scale)
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

pub fn haar_unitary(n: usize, seed: u64) -> Result<ComplexMatrix> {
    haar_unitary_with(n, &mut rng_from_seed(seed))
}

/// Random Hermitian matrix with independent Gaussian entries (GUE scaling).
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let mut m = zeros(n, n);
    for i in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        m[(i, i)] = Complex64::new(d, 0.0);
        for j in (i + 1)..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

pub fn random_complex<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    })
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Columns of the returned matrix are the matching eigenvectors.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !is_hermitian(m, TOL_HERMITIAN) {
        return Err(Error::ContractViolation(
            "eig_hermitian called on a non-Hermitian matrix".into(),
        ));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), zeros(0, 0)));
    }
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Eigenvalues only, ascending.
pub fn eigvals_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !is_hermitian(m, TOL_HERMITIAN) {
        return Err(Error::ContractViolation(
            "eigvals_hermitian called on a non-Hermitian matrix".into(),
        ));
    }
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// `exp(i·t·h)` for Hermitian `h`.
pub fn expi_hermitian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let (vals, vecs) = eig_hermitian(h)?;
    let n = vals.len();
    let mut scaled = vecs.clone();
    for (j, &lam) in vals.iter().enumerate() {
        let ph = Complex64::from_polar(1.0, t * lam);
        for i in 0..n {
            scaled[(i, j)] *= ph;
        }
    }
    Ok(scaled * vecs.adjoint())
}

/// Nearest unitary by modified Gram–Schmidt on the columns.
pub fn reunitarize(u: &mut ComplexMatrix) {
    let n = u.ncols();
    for j in 0..n {
        for k in 0..j {
            let proj: Complex64 = (0..u.nrows()).map(|i| u[(i, k)].conj() * u[(i, j)]).sum();
            for i in 0..u.nrows() {
                let v = u[(i, k)];
                u[(i, j)] -= proj * v;
            }
        }
        let norm: f64 = (0..u.nrows()).map(|i| u[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..u.nrows() {
            u[(i, j)] /= norm;
        }
    }
}

/// Euclidean Clifford generators `c_1..c_d` with `{c_μ, c_ν} = 2δ_{μν}`.
#[derive(Clone, Debug)]
pub struct CliffordSet {
    pub dim: usize,
    pub generators: Vec<ComplexMatrix>,
    /// Chirality element, only for even `dim`.
    pub grading: Option<ComplexMatrix>,
}

impl CliffordSet {
    pub fn spinor_dim(&self) -> usize {
        self.generators[0].nrows()
    }

    pub fn generator(&self, mu: usize) -> &ComplexMatrix {
        &self.generators[mu]
    }
}

fn pauli() -> [ComplexMatrix; 3] {
    let s1 = ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]);
    let s2 = ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]);
    let s3 = ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    [s1, s2, s3]
}

/// Jordan–Wigner construction of the Clifford generators for `d ∈ {2,3,4}`.
///
/// All entries lie in `{0, ±1, ±i}` so the defining relations hold exactly.
pub fn clifford(d: usize) -> Result<CliffordSet> {
    let [s1, s2, s3] = pauli();
    let id2 = identity(2);
    let generators = match d {
        2 => vec![s1, s2],
        3 => vec![s1, s2, s3],
        4 => vec![
            kron(&s1, &id2),
            kron(&s2, &id2),
            kron(&s3, &pauli()[0]),
            kron(&s3, &pauli()[1]),
        ],
        _ => {
            return Err(Error::Unsupported(format!(
                "Clifford generators for d = {d}; supported d are 2, 3, 4"
            )))
        }
    };
    let grading = if d.is_multiple_of(2) {
        let prod = generators.iter().skip(1).fold(generators[0].clone(), |acc, c| &acc * c);
        let n = prod.nrows();
        [ONE, I, -ONE, -I]
            .into_iter()
            .map(|ph| prod.map(|z| z * ph))
            .find(|g| is_hermitian(g, TOL_CONSTRUCTION) && max_abs_diff(&(g * g), &identity(n)) < TOL_CONSTRUCTION)
    } else {
        None
    };
    Ok(CliffordSet {
        dim: d,
        generators,
        grading,
    })
}

/// Orthonormal basis of `u(n)` under `⟨X,Y⟩ = tr(X†Y)`, all anti-Hermitian.
///
/// Order: diagonal `i·E_kk`, then for each `k < l` the symmetric
/// `i(E_kl + E_lk)/√2` followed by the antisymmetric `(E_kl − E_lk)/√2`.
pub fn lie_basis(n: usize) -> Vec<ComplexMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(n * n);
    for k in 0..n {
        let mut m = zeros(n, n);
        m[(k, k)] = I;
        basis.push(m);
    }
    for k in 0..n {
        for l in (k + 1)..n {
            let mut sym = zeros(n, n);
            sym[(k, l)] = I * h;
            sym[(l, k)] = I * h;
            basis.push(sym);
            let mut anti = zeros(n, n);
            anti[(k, l)] = Complex64::new(h, 0.0);
            anti[(l, k)] = Complex64::new(-h, 0.0);
            basis.push(anti);
        }
    }
    basis
}

/// Vector 2-norm of a complex slice.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

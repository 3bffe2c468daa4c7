//! Dense complex-matrix kernel: operator construction, tensor products,
//! superoperator vectorization, matrix exponentials, and the eigen/null-space
//! primitives consumed by the model, dynamics, and exploration layers.
//!
//! Everything here is generic over a [`ComplexScalar`] so the whole stack can
//! be instantiated at single or double precision.

use crate::error::{Error, Result};
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, EigValsh, Factorize, Lapack, Scalar, Solve, UPLO};
use num_traits::{Float, One, ToPrimitive, Zero};

/// Scalar type over which all kernels are generic: a complex LAPACK scalar
/// (`Complex<f32>` or `Complex<f64>`) whose associated `Real` type is an IEEE
/// float. The `Complex = Self` constraint rules out the real LAPACK scalars.
pub trait ComplexScalar: Scalar<Complex = Self> + Lapack {}

impl<T> ComplexScalar for T where T: Scalar<Complex = T> + Lapack {}

/// The imaginary unit as a `C`.
pub fn i_unit<C: ComplexScalar>() -> C {
    C::complex(C::Real::zero(), C::Real::one())
}

/// Convert a non-negative integer to the real type of `C`.
fn real_of<C: ComplexScalar>(k: usize) -> C::Real {
    C::real(k)
}

fn two_re<C: ComplexScalar>() -> C::Real {
    C::Real::one() + C::Real::one()
}

fn to_f64<R: ToPrimitive>(x: R) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Number of bosonic Fock levels kept for the sensor mode.
///
/// At least two levels are required; resolving an order-`n` correlation needs
/// `n_max >= n + 1` (one guard level above the highest photon sector probed).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockTruncation {
    n_max: usize,
}

impl FockTruncation {
    /// Validated constructor; rejects `n_max < 2`.
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::InvalidParams(format!(
                "Fock truncation needs n_max >= 2, got {n_max}"
            )));
        }
        Ok(Self { n_max })
    }

    /// Number of levels kept (`|0>` through `|n_max - 1>`).
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Whether correlations of the given order are resolvable with one guard
    /// level to spare.
    pub fn supports_order(&self, order: usize) -> bool {
        self.n_max > order
    }
}

/// Lowering and raising operators of the two-level emitter in the basis
/// `{|g>, |e>}`: returns `(sigma, sigma_dagger)` with `sigma = |g><e|`.
pub fn sigma_ops<C: ComplexScalar>() -> (Array2<C>, Array2<C>) {
    let mut sigma = Array2::<C>::zeros((2, 2));
    sigma[(0, 1)] = C::one();
    let sigma_dag = dagger(&sigma);
    (sigma, sigma_dag)
}

/// Truncated bosonic ladder operators: returns `(a, a_dagger)` with
/// `a|n> = sqrt(n)|n-1>`. Truncation artifacts are confined to the top level:
/// `[a, a_dagger]` equals the identity except in its last diagonal entry.
/// Invalid truncations are unrepresentable (see [`FockTruncation::new`]).
pub fn boson_ops<C: ComplexScalar>(trunc: FockTruncation) -> (Array2<C>, Array2<C>) {
    let n = trunc.n_max();
    let mut a = Array2::<C>::zeros((n, n));
    for k in 1..n {
        a[(k - 1, k)] = C::from_real(Float::sqrt(real_of::<C>(k)));
    }
    let a_dag = dagger(&a);
    (a, a_dag)
}

/// Conjugate transpose.
pub fn dagger<C: ComplexScalar>(m: &Array2<C>) -> Array2<C> {
    m.t().mapv(|x| x.conj())
}

/// Hermitian part `(M + M^dagger)/2`.
pub fn hermitize<C: ComplexScalar>(m: &Array2<C>) -> Array2<C> {
    let md = dagger(m);
    (m + &md).mapv(|x| x.div_real(two_re::<C>()))
}

/// True iff `M` is square and `max |M - M^dagger|` (entrywise) is below `tol`.
pub fn is_hermitian<C: ComplexScalar>(m: &Array2<C>, tol: C::Real) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let md = dagger(m);
    m.iter()
        .zip(md.iter())
        .all(|(x, y)| (*x - *y).abs() <= tol)
}

/// Matrix trace.
pub fn trace<C: ComplexScalar>(m: &Array2<C>) -> C {
    m.diag().iter().copied().sum()
}

/// Kronecker product; dimensions multiply.
pub fn kron<C: ComplexScalar>(a: &Array2<C>, b: &Array2<C>) -> Array2<C> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::<C>::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Column-stacking vectorization: `vec(M)[j*d + i] = M[i, j]`.
pub fn vec_col<C: ComplexScalar>(m: &Array2<C>) -> Array1<C> {
    let (rows, cols) = m.dim();
    Array1::from_shape_fn(rows * cols, |k| m[(k % rows, k / rows)])
}

/// Inverse of [`vec_col`] for a square matrix of dimension `d`.
pub fn unvec_col<C: ComplexScalar>(v: &Array1<C>, d: usize) -> Result<Array2<C>> {
    if v.len() != d * d {
        return Err(Error::DimensionMismatch(format!(
            "cannot reshape a length-{} vector into a {d}x{d} matrix",
            v.len()
        )));
    }
    Ok(Array2::from_shape_fn((d, d), |(i, j)| v[j * d + i]))
}

/// Build the Liouvillian `L` acting on column-stacked density matrices for
/// the master equation (written in the `d rho/dt = i[rho, H] + ...`
/// convention, equivalent to the common `-i[H, rho]` form):
///
/// ```text
/// d rho/dt = i[rho, H] + sum_k (rate_k/2)(2 J_k rho J_k'  -  J_k'J_k rho  -  rho J_k'J_k)
/// ```
///
/// Using `vec(A X B) = (B^T kron A) vec(X)`, the coherent part maps to
/// `-i (I kron H - H^T kron I)` and each dissipator to
/// `(rate/2)(2 conj(J) kron J - I kron J'J - (J'J)^T kron I)`.
pub fn vectorize_superop<C: ComplexScalar>(
    h: &Array2<C>,
    jumps: &[(C::Real, Array2<C>)],
) -> Result<Array2<C>> {
    let d = h.nrows();
    if h.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian must be square, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let id = Array2::<C>::eye(d);
    let minus_i = -i_unit::<C>();
    let ht = h.t().to_owned();
    let mut l = (kron(&id, h) - kron(&ht, &id)).mapv(|x| minus_i * x);
    for (rate, j) in jumps {
        if j.dim() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "jump operator is {}x{}, expected {d}x{d}",
                j.nrows(),
                j.ncols()
            )));
        }
        let jd = dagger(j);
        let jdj = jd.dot(j);
        let jdjt = jdj.t().to_owned();
        let j_conj = j.mapv(|x| x.conj());
        let sandwich = kron(&j_conj, j).mapv(|x| x.mul_real(two_re::<C>()));
        let term = sandwich - kron(&id, &jdj) - kron(&jdjt, &id);
        let half_rate = *rate / two_re::<C>();
        l = l + term.mapv(|x| x.mul_real(half_rate));
    }
    Ok(l)
}

/// Maximum absolute column sum (the induced 1-norm).
pub fn one_norm<C: ComplexScalar>(m: &Array2<C>) -> C::Real {
    let mut best = C::Real::zero();
    for col in m.columns() {
        let s = col.iter().fold(C::Real::zero(), |acc, x| acc + x.abs());
        if s > best {
            best = s;
        }
    }
    best
}

/// Matrix exponential by degree-13 diagonal Pade approximation with scaling
/// and squaring (coefficients and threshold from the standard algorithm).
pub fn expm<C: ComplexScalar>(a: &Array2<C>) -> Result<Array2<C>> {
    let d = a.nrows();
    if a.ncols() != d {
        return Err(Error::DimensionMismatch(format!(
            "expm needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA_13: f64 = 5.371920351148152;
    let norm = to_f64(one_norm(a));
    if !norm.is_finite() {
        return Err(Error::Numerical("expm input has non-finite entries".into()));
    }
    let s: i32 = if norm <= THETA_13 {
        0
    } else {
        (norm / THETA_13).log2().ceil() as i32
    };
    let factor = Float::powi(two_re::<C>(), -s);
    let a_s = a.mapv(|x| x.mul_real(factor));

    let b = |k: usize| C::real(B[k]);
    let scaled = |m: &Array2<C>, c: C::Real| m.mapv(|x| x.mul_real(c));
    let id = Array2::<C>::eye(d);
    let a2 = a_s.dot(&a_s);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);

    let w1 = scaled(&a6, b(13)) + scaled(&a4, b(11)) + scaled(&a2, b(9));
    let w2 = a6.dot(&w1) + scaled(&a6, b(7)) + scaled(&a4, b(5)) + scaled(&a2, b(3))
        + scaled(&id, b(1));
    let u = a_s.dot(&w2);
    let z1 = scaled(&a6, b(12)) + scaled(&a4, b(10)) + scaled(&a2, b(8));
    let v = a6.dot(&z1) + scaled(&a6, b(6)) + scaled(&a4, b(4)) + scaled(&a2, b(2))
        + scaled(&id, b(0));

    let lhs = &v - &u;
    let rhs = &v + &u;
    let factorized = lhs.factorize()?;
    let mut x = Array2::<C>::zeros((d, d));
    for j in 0..d {
        let col = factorized.solve(&rhs.column(j).to_owned())?;
        x.column_mut(j).assign(&col);
    }
    for _ in 0..s {
        x = x.dot(&x);
    }
    Ok(x)
}

/// Eigenvector of `L` for the eigenvalue of smallest magnitude, provided that
/// eigenvalue is the *unique* one within tolerance of zero.
///
/// The tolerance is `max(1e-9, 50 * eps * ||L||_1)`, which reduces to the
/// fixed `1e-9` for double precision at the problem scales of this crate and
/// widens appropriately for single precision.
pub fn kernel_eigvec<C: ComplexScalar>(l: &Array2<C>) -> Result<Array1<C>> {
    let (vals, vecs) = l.eig()?;
    let floor = C::real(1e-9);
    let scaled = C::Real::epsilon() * one_norm(l) * C::real(50);
    let tol = if scaled > floor { scaled } else { floor };
    let mut best = 0usize;
    let mut best_abs = C::Real::infinity();
    let mut within = 0usize;
    for (k, lam) in vals.iter().enumerate() {
        let a = lam.abs();
        if a < tol {
            within += 1;
        }
        if a < best_abs {
            best_abs = a;
            best = k;
        }
    }
    match within {
        0 => Err(Error::NoSteadyState {
            smallest: to_f64(best_abs),
            tol: to_f64(tol),
        }),
        1 => Ok(vecs.column(best).to_owned()),
        n => Err(Error::DegenerateSteadyState {
            count: n,
            tol: to_f64(tol),
        }),
    }
}

/// Steady-state extraction: the kernel vector of `L`, reshaped, Hermitized,
/// normalized to unit trace, and returned in vectorized form.
pub fn null_space_vector<C: ComplexScalar>(l: &Array2<C>) -> Result<Array1<C>> {
    let v = kernel_eigvec(l)?;
    let d2 = v.len();
    let d = (d2 as f64).sqrt().round() as usize;
    if d * d != d2 {
        return Err(Error::DimensionMismatch(format!(
            "Liouvillian dimension {d2} is not a perfect square"
        )));
    }
    let rho = hermitize(&unvec_col(&v, d)?);
    let tr = trace(&rho);
    let scale = one_norm(&rho);
    if tr.abs() <= C::Real::epsilon() * scale * C::real(100) {
        return Err(Error::Numerical(
            "steady-state candidate has vanishing trace".into(),
        ));
    }
    Ok(vec_col(&rho.mapv(|x| x / tr)))
}

/// Similarity transform of `L` by the positive diagonal `diag(w)`:
/// returns `L'` with `L'_{pq} = L_{pq} w_q / w_p`. If `v'` is a kernel vector
/// of `L'`, then `w .* v'` is a kernel vector of `L`. Used to equilibrate
/// Liouvillians whose steady state spans many orders of magnitude.
pub fn scaled_similarity<C: ComplexScalar>(
    l: &Array2<C>,
    w: &Array1<C::Real>,
) -> Result<Array2<C>> {
    let d = l.nrows();
    if l.ncols() != d || w.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "similarity scaling needs a square matrix and a matching weight vector, got {}x{} and length {}",
            l.nrows(),
            l.ncols(),
            w.len()
        )));
    }
    if w.iter().any(|x| !(*x > C::Real::zero()) || !x.is_finite()) {
        return Err(Error::InvalidParams(
            "similarity weights must be positive and finite".into(),
        ));
    }
    Ok(Array2::from_shape_fn((d, d), |(p, q)| {
        l[(p, q)].mul_real(w[q] / w[p])
    }))
}

/// Diagonals of a joint emitter⊗sensor state traced over the sensor: the
/// reduced 2x2 emitter state. Basis ordering is `index = m * n_max + n` with
/// `m` the emitter level and `n` the Fock level.
pub fn partial_trace_sensor<C: ComplexScalar>(
    rho: &Array2<C>,
    n_max: usize,
) -> Result<Array2<C>> {
    let d = 2 * n_max;
    if rho.dim() != (d, d) {
        return Err(Error::DimensionMismatch(format!(
            "expected a {d}x{d} joint state for n_max = {n_max}, got {}x{}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let mut out = Array2::<C>::zeros((2, 2));
    for m in 0..2 {
        for mp in 0..2 {
            let mut acc = C::zero();
            for n in 0..n_max {
                acc += rho[(m * n_max + n, mp * n_max + n)];
            }
            out[(m, mp)] = acc;
        }
    }
    Ok(out)
}

/// Smallest eigenvalue of a (numerically) Hermitian matrix.
pub fn min_eigval_hermitian<C: ComplexScalar>(m: &Array2<C>) -> Result<C::Real> {
    let vals = m.eigvalsh(UPLO::Lower)?;
    Ok(vals
        .iter()
        .fold(C::Real::infinity(), |acc, x| if *x < acc { *x } else { acc }))
}

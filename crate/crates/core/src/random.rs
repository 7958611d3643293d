//! Seeded generators for random complexes, bases and exact sequences.
//!
//! Every property suite draws from a [`ChaCha8Rng`] seeded by the caller so that runs are
//! reproducible.

use rand::Rng;
pub use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

use crate::chain::{homology_basis_default, ChainComplex, HomologyBasis};
use crate::field::{rational, Rational, Scalar};
use crate::matrix::Matrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small rational `p/q` with `|p| <= bound` and `1 <= q <= 3`.
pub fn small_rational(rng: &mut impl Rng, bound: i64) -> Rational {
    rational(rng.gen_range(-bound..=bound), rng.gen_range(1..=3))
}

pub fn small_integer<F: Scalar>(rng: &mut impl Rng, bound: i64) -> F {
    F::from_i64(rng.gen_range(-bound..=bound))
}

pub fn random_matrix<F: Scalar>(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix<F> {
    Matrix::from_fn(rows, cols, |_, _| F::from_rational(&small_rational(rng, 4)))
}

pub fn random_invertible<F: Scalar>(rng: &mut impl Rng, n: usize) -> Matrix<F> {
    loop {
        let m = random_matrix(rng, n, n);
        if m.rank() == n {
            return m;
        }
    }
}

/// Random skew-symmetric nondegenerate matrix of even size.
pub fn random_skew_nondegenerate<F: Scalar>(rng: &mut impl Rng, n: usize) -> Matrix<F> {
    loop {
        let a: Matrix<F> = random_matrix(rng, n, n);
        let m = a.sub(&a.transpose()).expect("square");
        if m.rank() == n {
            return m;
        }
    }
}

/// A random complex with degrees `0..=len` and each `dim C_p <= max_dim`.
///
/// Each boundary factors through the kernel of the previous one; columns of the factor are
/// zeroed at random so that the homology varies.
pub fn random_complex<F: Scalar>(rng: &mut impl Rng, len: usize, max_dim: usize) -> ChainComplex<F> {
    let dims: Vec<usize> = (0..=len).map(|_| rng.gen_range(0..=max_dim)).collect();
    let mut boundaries: Vec<Matrix<F>> = Vec::with_capacity(len);
    for p in 1..=len {
        let kernel = match boundaries.last() {
            Some(prev) => prev.kernel_basis(),
            None => Matrix::identity(dims[0]),
        };
        let mut coeffs: Matrix<F> = random_matrix(rng, kernel.cols(), dims[p]);
        for j in 0..dims[p] {
            if rng.gen_bool(0.3) {
                for i in 0..kernel.cols() {
                    coeffs[(i, j)] = F::zero();
                }
            }
        }
        boundaries.push(kernel.dot(&coeffs));
    }
    let bases = dims.iter().map(|&d| random_invertible(rng, d)).collect();
    ChainComplex::with_bases(dims, boundaries, bases).expect("random complex is valid")
}

/// A random homology basis: the default one, mixed by an invertible matrix and shifted
/// by boundaries.
pub fn random_homology_basis<F: Scalar>(rng: &mut impl Rng, c: &ChainComplex<F>) -> HomologyBasis<F> {
    let default = homology_basis_default(c);
    let bases = default
        .bases
        .iter()
        .enumerate()
        .map(|(p, h)| {
            let mix = random_invertible(rng, h.cols());
            let b = c.boundary(p + 1);
            let shift = b.dot(&random_matrix(rng, b.cols(), h.cols()));
            h.dot(&mix).add(&shift).expect("same shape")
        })
        .collect();
    HomologyBasis { bases }
}

/// A short exact sequence `0 → A → B → D → 0` with compatible chain bases.
pub struct RandomTriple<F> {
    pub a: ChainComplex<F>,
    pub b: ChainComplex<F>,
    pub d: ChainComplex<F>,
    pub inclusion: Vec<Matrix<F>>,
    pub projection: Vec<Matrix<F>>,
}

/// Builds `B` on `A ⊕ D` with boundary `[[∂A, X], [0, ∂D]]`, then changes coordinates in `B`.
///
/// `X_p = ∂A_p Y_p - Y_{p-1} ∂D_p` plus, in one degree, a rank-one term `z fᵀ` with `z` an
/// `A`-cycle and `f` vanishing on `D`-boundaries, which makes the extension non-split.
pub fn random_short_exact<F: Scalar>(rng: &mut impl Rng, len: usize, max_dim: usize) -> RandomTriple<F> {
    let a: ChainComplex<F> = random_complex(rng, len, max_dim);
    let d: ChainComplex<F> = random_complex(rng, len, max_dim);
    let (da, dd) = (a.dims().to_vec(), d.dims().to_vec());
    let y: Vec<Matrix<F>> = (0..=len).map(|p| random_matrix(rng, da[p], dd[p])).collect();
    let twist_degree = if len >= 1 { rng.gen_range(1..=len) } else { 0 };
    let mut boundaries = Vec::with_capacity(len);
    for p in 1..=len {
        let mut x = a.boundary(p).dot(&y[p]).sub(&y[p - 1].dot(&d.boundary(p))).expect("shape");
        if p == twist_degree {
            let zs = a.boundary(p - 1).kernel_basis();
            let fs = d.boundary(p + 1).transpose().kernel_basis();
            if zs.cols() > 0 && fs.cols() > 0 {
                let z = zs.dot(&random_matrix(rng, zs.cols(), 1));
                let f = fs.dot(&random_matrix(rng, fs.cols(), 1));
                x = x.add(&z.dot(&f.transpose())).expect("shape");
            }
        }
        let top = a.boundary(p).hstack(&x).expect("rows");
        let bottom = Matrix::zeros(dd[p - 1], da[p]).hstack(&d.boundary(p)).expect("rows");
        boundaries.push(top.vstack(&bottom).expect("cols"));
    }
    let mut dims = Vec::with_capacity(len + 1);
    let mut inclusion = Vec::with_capacity(len + 1);
    let mut projection = Vec::with_capacity(len + 1);
    let mut bases = Vec::with_capacity(len + 1);
    let mut coords = Vec::with_capacity(len + 1);
    for p in 0..=len {
        let n = da[p] + dd[p];
        dims.push(n);
        let p_mat: Matrix<F> = random_invertible(rng, n);
        let p_inv = p_mat.inverse().expect("invertible");
        let i = Matrix::identity(da[p]).vstack(&Matrix::zeros(dd[p], da[p])).expect("cols");
        let q = Matrix::zeros(dd[p], da[p]).hstack(&Matrix::identity(dd[p])).expect("rows");
        inclusion.push(p_mat.dot(&i));
        projection.push(q.dot(&p_inv));
        let s = random_matrix(rng, da[p], dd[p]);
        let top = a.chain_bases()[p].hstack(&s).expect("rows");
        let bottom = Matrix::zeros(dd[p], da[p]).hstack(&d.chain_bases()[p]).expect("rows");
        bases.push(p_mat.dot(&top.vstack(&bottom).expect("cols")));
        coords.push((p_mat, p_inv));
    }
    let boundaries = boundaries
        .into_iter()
        .enumerate()
        .map(|(k, m)| coords[k].0.dot(&m).dot(&coords[k + 1].1))
        .collect();
    let b = ChainComplex::with_bases(dims, boundaries, bases).expect("random extension is valid");
    RandomTriple { a, b, d, inclusion, projection }
}

/// `count` sub-seeds derived from one seed.
pub fn random_seed_list(seed: u64, count: usize) -> Vec<u64> {
    let mut r = rng(seed);
    (0..count).map(|_| r.gen()).collect()
}

pub fn random_rational_vec(rng: &mut impl Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| small_rational(rng, 4)).collect()
}

/// A random symplectic complex of length 2 with `dim C_1 = 2l <= 2 max_half` and random
/// chain bases.
///
/// The middle pairing is `Pᵀ J P`; `∂_1 = [X | 0] P` has isotropic row space for the inverse
/// pairing, and `∂_2 = -W_1⁻¹ ∂_1ᵀ W_0` is forced by boundary compatibility.
pub fn random_symplectic_complex<F: Scalar>(
    rng: &mut impl Rng,
    max_half: usize,
) -> crate::symplectic::SymplecticChainComplex<F> {
    let k = rng.gen_range(0..=max_half.min(3));
    let l = rng.gen_range(1..=max_half);
    let m = 2 * l;
    let w0: Matrix<F> = random_invertible(rng, k);
    let p: Matrix<F> = random_invertible(rng, m);
    let w1 = p.transpose().dot(&crate::matrix::standard_symplectic(l)).dot(&p);
    let x: Matrix<F> = if rng.gen_bool(0.2) { Matrix::zeros(k, l) } else { random_matrix(rng, k, l) };
    let d1 = x.hstack(&Matrix::zeros(k, l)).expect("rows").dot(&p);
    let d2 = w1.inverse().expect("invertible").dot(&d1.transpose()).dot(&w0).neg();
    let dims = vec![k, m, k];
    let bases = dims.iter().map(|&d| random_invertible(rng, d)).collect();
    let c = ChainComplex::with_bases(dims, vec![d1, d2], bases).expect("valid complex");
    crate::symplectic::SymplecticChainComplex::new(c, vec![w0, w1]).expect("valid pairings")
}

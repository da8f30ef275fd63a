//! The path complex: Λ-level differentials, allowed forms `A^p`, the working
//! spaces `Ω^p`, the closure-repaired differentials and (co)homology ranks.
//!
//! Forms on allowed paths are stored in *allowed coordinates*: a vector
//! indexed by the lexicographic list of allowed `p`-paths. Subspaces such as
//! `Ω^p` are orthonormal frames in those coordinates.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::digraph::{allowed_slice, enumerate_allowed, Digraph, ElementaryPath};
use crate::error::{Error, Result};
use crate::linalg::{self, Tolerances};
use crate::sparse::SparseMatrix;

/// Number of vertex tuples of length `len` over `n` vertices, if it fits.
pub fn lambda_len(n: usize, len: usize) -> Option<usize> {
    n.checked_pow(len as u32)
}

/// Lexicographic rank of a vertex tuple among all tuples of the same length.
pub fn encode(path: &[usize], n: usize) -> usize {
    path.iter().fold(0, |acc, &v| acc * n + v)
}

pub fn decode(mut code: usize, n: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = code % n;
        code /= n;
    }
    out
}

fn sign(q: usize) -> i64 {
    if q.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn sign_f(q: usize) -> f64 {
    sign(q) as f64
}

/// Coordinates for `p`-forms: either every elementary path (`Λ^p`) or only
/// the allowed ones (`A^p`), always in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub enum PathBasis {
    Full { n: usize, dim: usize },
    Allowed { dim: usize, paths: Vec<ElementaryPath>, index: HashMap<Vec<usize>, usize> },
}

impl PathBasis {
    pub fn full(n: usize, dim: usize) -> Self {
        PathBasis::Full { n, dim }
    }

    pub fn allowed(g: &Digraph, dim: usize) -> Self {
        let paths = enumerate_allowed(g, dim);
        let index = paths.iter().enumerate().map(|(i, p)| (p.0.clone(), i)).collect();
        PathBasis::Allowed { dim, paths, index }
    }

    pub fn dim(&self) -> usize {
        match self {
            PathBasis::Full { dim, .. } | PathBasis::Allowed { dim, .. } => *dim,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            PathBasis::Full { n, dim } => lambda_len(*n, dim + 1).expect("Λ basis too large to index"),
            PathBasis::Allowed { paths, .. } => paths.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index_of(&self, path: &[usize]) -> Option<usize> {
        match self {
            PathBasis::Full { n, dim } => {
                (path.len() == dim + 1 && path.iter().all(|&v| v < *n)).then(|| encode(path, *n))
            }
            PathBasis::Allowed { index, .. } => index.get(path).copied(),
        }
    }

    pub fn path(&self, i: usize) -> ElementaryPath {
        match self {
            PathBasis::Full { n, dim } => ElementaryPath(decode(i, *n, dim + 1)),
            PathBasis::Allowed { paths, .. } => paths[i].clone(),
        }
    }

    /// Allowed paths; empty for a full basis.
    pub fn allowed_paths(&self) -> &[ElementaryPath] {
        match self {
            PathBasis::Full { .. } => &[],
            PathBasis::Allowed { paths, .. } => paths,
        }
    }
}

/// A `p`-form: coefficients over an explicit path basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    pub basis: Arc<PathBasis>,
    pub coeffs: DVector<f64>,
}

impl Cochain {
    pub fn new(basis: Arc<PathBasis>, coeffs: DVector<f64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), got: coeffs.len() });
        }
        Ok(Cochain { basis, coeffs })
    }

    pub fn zeros(basis: Arc<PathBasis>) -> Self {
        let len = basis.len();
        Cochain { basis, coeffs: DVector::zeros(len) }
    }

    /// Indicator of a single basis path.
    pub fn indicator(basis: Arc<PathBasis>, path: &[usize]) -> Result<Self> {
        let i = basis.index_of(path).ok_or_else(|| Error::NotAllowed { path: path.to_vec(), dim: basis.dim() })?;
        let mut c = Self::zeros(basis);
        c.coeffs[i] = 1.0;
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn dot(&self, other: &Cochain) -> f64 {
        self.coeffs.dot(&other.coeffs)
    }

    /// Coefficient on `path`, zero if the path is not in the basis.
    pub fn value(&self, path: &[usize]) -> f64 {
        self.basis.index_of(path).map(|i| self.coeffs[i]).unwrap_or(0.0)
    }

    pub fn with_coeffs(&self, coeffs: DVector<f64>) -> Cochain {
        assert_eq!(coeffs.len(), self.coeffs.len());
        Cochain { basis: self.basis.clone(), coeffs }
    }
}

/// A subspace of forms: an orthonormal frame in the coordinates of `ambient`.
#[derive(Debug, Clone)]
pub struct Subspace {
    pub ambient: Arc<PathBasis>,
    /// Columns form an orthonormal basis of the subspace.
    pub frame: DMatrix<f64>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn ambient_len(&self) -> usize {
        self.frame.nrows()
    }

    /// Frame coordinates `Fᵀx` of an ambient vector.
    pub fn coords(&self, x: &DVector<f64>) -> DVector<f64> {
        self.frame.transpose() * x
    }

    /// Ambient vector `Fc` of frame coordinates.
    pub fn embed(&self, c: &DVector<f64>) -> DVector<f64> {
        &self.frame * c
    }

    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        linalg::project(&self.frame, x)
    }

    /// `‖x - Px‖`.
    pub fn residual(&self, x: &DVector<f64>) -> f64 {
        (x - self.project(x)).norm()
    }

    /// `‖FᵀF - I‖_max`.
    pub fn orthonormality_defect(&self) -> f64 {
        let k = self.dim();
        linalg::max_abs(&(self.frame.transpose() * &self.frame - DMatrix::identity(k, k)))
    }

    /// Frame coordinates of a cochain, or an error when it lies outside.
    pub fn coords_checked(&self, f: &Cochain, tol: &Tolerances) -> Result<DVector<f64>> {
        if f.coeffs.len() != self.ambient_len() {
            return Err(Error::DimensionMismatch { expected: self.ambient_len(), got: f.coeffs.len() });
        }
        let residual = self.residual(&f.coeffs);
        if residual > tol.membership * f.norm().max(1.0) {
            return Err(Error::NotInSubspace { residual });
        }
        Ok(self.coords(&f.coeffs))
    }
}

/// A Λ-level operator between full path bases.
#[derive(Debug, Clone)]
pub struct LambdaOperator {
    pub n: usize,
    pub from_dim: usize,
    pub to_dim: Option<usize>,
    pub matrix: SparseMatrix<i64>,
}

impl LambdaOperator {
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        self.matrix.to_f64().mul_vec(f)
    }
}

/// Exterior differential `Λ^p → Λ^{p+1}`:
/// `df(i_0⋯i_{p+1}) = Σ_q (-1)^q f(i_0⋯î_q⋯i_{p+1})`.
pub fn build_d(g: &Digraph, p: usize) -> LambdaOperator {
    build_d_n(g.n_vertices(), p)
}

pub fn build_d_n(n: usize, p: usize) -> LambdaOperator {
    let rows = lambda_len(n, p + 2).expect("Λ^{p+1} too large");
    let cols = lambda_len(n, p + 1).expect("Λ^p too large");
    let mut triplets = Vec::with_capacity(rows * (p + 2));
    for code in 0..rows {
        let w = decode(code, n, p + 2);
        for q in 0..p + 2 {
            let mut u = w.clone();
            u.remove(q);
            triplets.push((code, encode(&u, n), sign(q)));
        }
    }
    LambdaOperator { n, from_dim: p, to_dim: Some(p + 1), matrix: SparseMatrix::from_triplets(rows, cols, triplets) }
}

/// Boundary `Λ^p → Λ^{p-1}` by vertex insertion:
/// `∂f(i_0⋯i_{p-1}) = Σ_{k∈V} Σ_{q=0}^{p} (-1)^q f(i_0⋯i_{q-1} k i_q⋯i_{p-1})`.
///
/// For `p = 0` this is the zero map onto the trivial space.
pub fn build_boundary(g: &Digraph, p: usize) -> LambdaOperator {
    build_boundary_n(g.n_vertices(), p)
}

pub fn build_boundary_n(n: usize, p: usize) -> LambdaOperator {
    let cols = lambda_len(n, p + 1).expect("Λ^p too large");
    if p == 0 {
        return LambdaOperator { n, from_dim: 0, to_dim: None, matrix: SparseMatrix::zeros(0, cols) };
    }
    let rows = lambda_len(n, p).expect("Λ^{p-1} too large");
    let mut triplets = Vec::with_capacity(rows * n * (p + 1));
    for code in 0..rows {
        let u = decode(code, n, p);
        for k in 0..n {
            for q in 0..=p {
                let mut w = u.clone();
                w.insert(q, k);
                triplets.push((code, encode(&w, n), sign(q)));
            }
        }
    }
    LambdaOperator { n, from_dim: p, to_dim: Some(p - 1), matrix: SparseMatrix::from_triplets(rows, cols, triplets) }
}

/// `A^p` as a coordinate subspace of `Λ^p`.
pub fn allowed_subspace(g: &Digraph, p: usize) -> Subspace {
    let full = Arc::new(PathBasis::full(g.n_vertices(), p));
    let allowed = enumerate_allowed(g, p);
    let mut frame = DMatrix::zeros(full.len(), allowed.len());
    for (j, path) in allowed.iter().enumerate() {
        frame[(encode(&path.0, g.n_vertices()), j)] = 1.0;
    }
    Subspace { ambient: full, frame }
}

/// `d` on allowed coordinates: `A^p → A^{p+1}`. Terms on non-allowed faces
/// vanish because the input is supported on allowed paths.
pub fn d_allowed(from: &PathBasis, to: &PathBasis) -> SparseMatrix<f64> {
    let mut triplets = Vec::new();
    for (row, w) in to.allowed_paths().iter().enumerate() {
        for q in 0..w.0.len() {
            if let Some(col) = from.index_of(&w.omit(q).0) {
                triplets.push((row, col, sign_f(q)));
            }
        }
    }
    SparseMatrix::from_triplets(to.len(), from.len(), triplets)
}

/// Rows of `∂` (insertion form) at the non-allowed `(p-1)`-paths that can
/// receive mass from allowed `p`-paths, as a matrix on `A^p` coordinates.
fn boundary_leak_rows(g: &Digraph, basis: &PathBasis) -> SparseMatrix<f64> {
    let n = g.n_vertices();
    let mut targets = BTreeSet::new();
    for u in basis.allowed_paths() {
        if u.0.len() < 2 {
            continue;
        }
        for q in 0..u.0.len() {
            let x = u.omit(q);
            if !allowed_slice(g, &x.0) {
                targets.insert(x.0);
            }
        }
    }
    let mut triplets = Vec::new();
    for (row, x) in targets.iter().enumerate() {
        for k in 0..n {
            for q in 0..=x.len() {
                let mut w = x.clone();
                w.insert(q, k);
                if let Some(col) = basis.index_of(&w) {
                    triplets.push((row, col, sign_f(q)));
                }
            }
        }
    }
    SparseMatrix::from_triplets(targets.len(), basis.len(), triplets)
}

/// Rows of `d` at the non-allowed `(p+1)`-paths reachable from allowed
/// `p`-paths by one insertion, as a matrix on `A^p` coordinates.
fn differential_leak_rows(g: &Digraph, basis: &PathBasis) -> SparseMatrix<f64> {
    let n = g.n_vertices();
    let mut targets = BTreeSet::new();
    for u in basis.allowed_paths() {
        for q in 0..=u.0.len() {
            for k in 0..n {
                let w = u.insert(q, k);
                if !allowed_slice(g, &w.0) {
                    targets.insert(w.0);
                }
            }
        }
    }
    let mut triplets = Vec::new();
    for (row, w) in targets.iter().enumerate() {
        for r in 0..w.len() {
            let mut u = w.clone();
            u.remove(r);
            if let Some(col) = basis.index_of(&u) {
                triplets.push((row, col, sign_f(r)));
            }
        }
    }
    SparseMatrix::from_triplets(targets.len(), basis.len(), triplets)
}

/// Stacked constraints cutting `Ω^p` out of `A^p`.
pub fn omega_constraints(g: &Digraph, basis: &PathBasis) -> DMatrix<f64> {
    let d_rows = differential_leak_rows(g, basis).to_dense();
    if basis.dim() == 0 {
        return d_rows;
    }
    let b_rows = boundary_leak_rows(g, basis).to_dense();
    let mut stacked = DMatrix::zeros(d_rows.nrows() + b_rows.nrows(), basis.len());
    stacked.view_mut((0, 0), d_rows.shape()).copy_from(&d_rows);
    stacked.view_mut((d_rows.nrows(), 0), b_rows.shape()).copy_from(&b_rows);
    stacked
}

/// The restriction of `d` to `D^p = {f ∈ Ω^p : df ∈ Ω^{p+1}}`, written in the
/// orthonormal frames of `D^p` and `Ω^{p+1}`.
#[derive(Debug, Clone)]
pub struct RestrictedDifferential {
    pub p: usize,
    pub domain: Subspace,
    pub codomain: Subspace,
    /// `dim Ω^{p+1} × dim D^p`.
    pub matrix: DMatrix<f64>,
    /// `dim Ω^p - dim D^p`.
    pub closure_defect: usize,
    /// Distance of `d(D^p)` from `Ω^{p+1}`; zero up to rounding.
    pub image_residual: f64,
    pub rank: usize,
}

impl RestrictedDifferential {
    pub fn nullity(&self) -> usize {
        self.domain.dim() - self.rank
    }
}

/// Everything the Hodge, heat and report layers need for dimensions `0..=top`.
#[derive(Debug, Clone)]
pub struct PathComplex {
    graph: Digraph,
    top: usize,
    tol: Tolerances,
    /// `A^p` for `p ≤ top + 1`.
    allowed: Vec<Arc<PathBasis>>,
    /// `d: A^p → A^{p+1}` for `p ≤ top`.
    d: Vec<SparseMatrix<f64>>,
    /// `Ω^p` for `p ≤ top + 1`.
    omega: Vec<Subspace>,
    /// `d^p` on `D^p` for `p ≤ top`.
    restricted: Vec<RestrictedDifferential>,
}

impl PathComplex {
    pub fn new(g: &Digraph, top: usize) -> Self {
        Self::with_tolerances(g, top, Tolerances::default())
    }

    pub fn with_tolerances(g: &Digraph, top: usize, tol: Tolerances) -> Self {
        let allowed: Vec<Arc<PathBasis>> =
            (0..=top + 1).into_par_iter().map(|p| Arc::new(PathBasis::allowed(g, p))).collect();
        let d: Vec<SparseMatrix<f64>> =
            (0..=top).into_par_iter().map(|p| d_allowed(&allowed[p], &allowed[p + 1])).collect();
        let omega: Vec<Subspace> = allowed
            .par_iter()
            .map(|basis| {
                let frame = linalg::nullspace(&omega_constraints(g, basis), &tol);
                Subspace { ambient: basis.clone(), frame }
            })
            .collect();
        let restricted = (0..=top).into_par_iter().map(|p| restrict(g, p, &allowed, &d[p], &omega, &tol)).collect();
        PathComplex { graph: g.clone(), top, tol, allowed, d, omega, restricted }
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    fn check(&self, p: usize, limit: usize) {
        assert!(p <= limit, "dimension {p} beyond the built range (top = {})", self.top);
    }

    pub fn allowed_basis(&self, p: usize) -> &Arc<PathBasis> {
        self.check(p, self.top + 1);
        &self.allowed[p]
    }

    /// `d: A^p → A^{p+1}` in allowed coordinates.
    pub fn d(&self, p: usize) -> &SparseMatrix<f64> {
        self.check(p, self.top);
        &self.d[p]
    }

    pub fn omega(&self, p: usize) -> &Subspace {
        self.check(p, self.top + 1);
        &self.omega[p]
    }

    pub fn restricted_d(&self, p: usize) -> &RestrictedDifferential {
        self.check(p, self.top);
        &self.restricted[p]
    }

    /// `dim ker d^n - dim im d^{n-1}` on the repaired complex.
    pub fn cohomology_dim(&self, n: usize) -> usize {
        let kernel = self.restricted_d(n).nullity();
        let image = if n == 0 { 0 } else { self.restricted_d(n - 1).rank };
        kernel - image
    }

    pub fn cohomology_dims(&self) -> Vec<usize> {
        (0..=self.top).map(|n| self.cohomology_dim(n)).collect()
    }
}

fn restrict(
    g: &Digraph,
    p: usize,
    allowed: &[Arc<PathBasis>],
    d: &SparseMatrix<f64>,
    omega: &[Subspace],
    tol: &Tolerances,
) -> RestrictedDifferential {
    let source = &omega[p];
    let target = &omega[p + 1];
    let image = d.mul_dense(&source.frame);
    // df stays allowed on Ω^p; it lies in Ω^{p+1} iff ∂df has no mass on
    // non-allowed p-paths.
    let leak = boundary_leak_rows(g, &allowed[p + 1]);
    let constraint = leak.mul_dense(&image);
    let inner = linalg::nullspace(&constraint, tol);
    let domain_frame = &source.frame * &inner;
    let image = d.mul_dense(&domain_frame);
    let matrix = target.frame.transpose() * &image;
    let image_residual = (&image - &target.frame * &matrix).norm();
    let rank = linalg::rank(&matrix, tol);
    RestrictedDifferential {
        p,
        closure_defect: source.dim() - domain_frame.ncols(),
        domain: Subspace { ambient: source.ambient.clone(), frame: domain_frame },
        codomain: target.clone(),
        matrix,
        image_residual,
        rank,
    }
}

/// `Ω^p` of `g` with default tolerances.
pub fn omega_subspace(g: &Digraph, p: usize) -> Subspace {
    let basis = Arc::new(PathBasis::allowed(g, p));
    let frame = linalg::nullspace(&omega_constraints(g, &basis), &Tolerances::default());
    Subspace { ambient: basis, frame }
}

pub fn restricted_d(g: &Digraph, p: usize) -> RestrictedDifferential {
    PathComplex::new(g, p).restricted_d(p).clone()
}

pub fn cohomology_dim(g: &Digraph, n: usize) -> usize {
    PathComplex::new(g, n).cohomology_dim(n)
}

/// Ranks of the chain-side path complex `Ω_p = {v ∈ A_p : ∂v ∈ A_{p-1}}`,
/// where `∂e_{i_0⋯i_p} = Σ_q (-1)^q e_{i_0⋯î_q⋯i_p}`.
#[derive(Debug, Clone, Serialize)]
pub struct ChainHomology {
    /// `dim Ω_p` for `p ≤ top + 1`.
    pub omega_dims: Vec<usize>,
    /// Rank of `∂_p: Ω_p → Ω_{p-1}` for `p ≤ top + 1` (`∂_0 = 0`).
    pub boundary_ranks: Vec<usize>,
    /// Betti numbers `b_p` for `p ≤ top`.
    pub betti: Vec<usize>,
}

pub fn chain_homology(g: &Digraph, top: usize) -> ChainHomology {
    chain_homology_with(g, top, &Tolerances::default())
}

pub fn chain_homology_with(g: &Digraph, top: usize, tol: &Tolerances) -> ChainHomology {
    let bases: Vec<PathBasis> = (0..=top + 1).map(|p| PathBasis::allowed(g, p)).collect();
    // Chain omission ∂ on allowed coordinates is the transpose of d on allowed coordinates.
    let frames: Vec<DMatrix<f64>> = bases
        .iter()
        .map(|basis| {
            if basis.dim() == 0 {
                return DMatrix::identity(basis.len(), basis.len());
            }
            linalg::nullspace(&chain_leak_rows(g, basis).to_dense(), tol)
        })
        .collect();
    let mut boundary_ranks = vec![0];
    for p in 1..=top + 1 {
        let omission = d_allowed(&bases[p - 1], &bases[p]).transpose();
        let m = frames[p - 1].transpose() * omission.mul_dense(&frames[p]);
        boundary_ranks.push(linalg::rank(&m, tol));
    }
    let omega_dims: Vec<usize> = frames.iter().map(|f| f.ncols()).collect();
    let betti = (0..=top).map(|p| omega_dims[p] - boundary_ranks[p] - boundary_ranks[p + 1]).collect();
    ChainHomology { omega_dims, boundary_ranks, betti }
}

/// Omission rows at non-allowed `(p-1)`-paths, on `A_p` coordinates.
fn chain_leak_rows(g: &Digraph, basis: &PathBasis) -> SparseMatrix<f64> {
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut row_index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut triplets = Vec::new();
    for (col, u) in basis.allowed_paths().iter().enumerate() {
        for q in 0..u.0.len() {
            let x = u.omit(q).0;
            if allowed_slice(g, &x) {
                continue;
            }
            let next = rows.len();
            let row = *row_index.entry(x.clone()).or_insert_with(|| {
                rows.push(x);
                next
            });
            triplets.push((row, col, sign_f(q)));
        }
    }
    SparseMatrix::from_triplets(rows.len(), basis.len(), triplets)
}

pub fn chain_homology_dim(g: &Digraph, n: usize) -> usize {
    chain_homology(g, n).betti[n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::Digraph;

    fn g1() -> Digraph {
        Digraph::new(2, [(0, 1)]).unwrap()
    }
    fn k2() -> Digraph {
        Digraph::new(2, [(0, 1), (1, 0)]).unwrap()
    }
    fn t3() -> Digraph {
        Digraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn codes_are_lexicographic() {
        assert_eq!(encode(&[1, 0, 2], 3), 11);
        assert_eq!(decode(11, 3, 3), vec![1, 0, 2]);
        let b = PathBasis::full(2, 1);
        let paths: Vec<_> = (0..4).map(|i| b.path(i).0).collect();
        assert_eq!(paths, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn d_of_vertex_indicator() {
        let d0 = build_d_n(2, 0);
        // f = δ_0, df(01) = f(1) - f(0) = -1.
        let df = d0.apply(&[1.0, 0.0]);
        assert_eq!(df[encode(&[0, 1], 2)], -1.0);
        assert_eq!(df[encode(&[1, 0], 2)], 1.0);
        assert_eq!(df[encode(&[0, 0], 2)], 0.0);
        // Constants are closed.
        assert!(d0.apply(&[3.0, 3.0]).iter().all(|&x| x == 0.0));
        assert!(build_d_n(2, 1).matrix.matmul(&d0.matrix).is_zero());
    }

    #[test]
    fn boundary_of_edge_indicator() {
        let b1 = build_boundary_n(2, 1);
        let mut g = vec![0.0; 4];
        g[encode(&[0, 1], 2)] = 1.0;
        let bg = b1.apply(&g);
        assert_eq!(bg, vec![-1.0, 1.0]);
        assert!(build_boundary_n(3, 1).matrix.matmul(&build_boundary_n(3, 2).matrix).is_zero());
        assert_eq!(build_boundary_n(3, 0).matrix.rows(), 0);
    }

    #[test]
    fn boundary_is_transpose_of_d() {
        for n in 1..4 {
            for p in 0..3 {
                assert_eq!(build_boundary_n(n, p + 1).matrix, build_d_n(n, p).matrix.transpose());
            }
        }
    }

    #[test]
    fn allowed_subspace_dims() {
        assert_eq!(allowed_subspace(&g1(), 1).dim(), 1);
        assert_eq!(allowed_subspace(&t3(), 2).dim(), 3);
        assert_eq!(allowed_subspace(&t3(), 0).dim(), 3);
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega_subspace(&g1(), 0).dim(), 1);
        assert_eq!(omega_subspace(&g1(), 1).dim(), 0);
        assert_eq!(omega_subspace(&k2(), 0).dim(), 2);
        assert_eq!(omega_subspace(&k2(), 1).dim(), 2);
        // Coordinate subspaces keep the identity frame.
        assert_eq!(omega_subspace(&k2(), 0).frame, DMatrix::identity(2, 2));
        let consts = omega_subspace(&g1(), 0);
        let c = consts.frame.column(0);
        assert!((c[0] - c[1]).abs() < 1e-12);
    }

    #[test]
    fn restricted_differentials() {
        let r = restricted_d(&g1(), 0);
        assert_eq!((r.domain.dim(), r.rank, r.closure_defect), (1, 0, 0));
        let r = restricted_d(&k2(), 0);
        assert_eq!((r.domain.dim(), r.rank, r.closure_defect), (2, 1, 0));
        // Every 1-path of the edgeless digraph is non-allowed, so df = 0
        // forces constants.
        let empty = Digraph::new(3, []).unwrap();
        let r = restricted_d(&empty, 0);
        assert_eq!((r.domain.dim(), r.rank), (1, 0));
    }

    #[test]
    fn cohomology_examples() {
        let c = PathComplex::new(&g1(), 1);
        assert_eq!(c.cohomology_dims(), vec![1, 0]);
        assert_eq!(cohomology_dim(&k2(), 0), 1);
        // Non-allowed (0,2) ties the components together.
        assert_eq!(cohomology_dim(&k2().disjoint_union(&k2()), 0), 1);
    }

    #[test]
    fn chain_homology_examples() {
        let t = chain_homology(&t3(), 1);
        assert_eq!(t.betti, vec![1, 1]);
        assert_eq!(t.omega_dims[2], 0);
        let tr = Digraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(chain_homology(&tr, 2).betti, vec![1, 0, 0]);
        let sq = Digraph::new(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let h = chain_homology(&sq, 1);
        assert_eq!(h.betti[1], 0);
        assert_eq!(h.omega_dims[2], 1);
        assert_eq!(chain_homology_dim(&k2().disjoint_union(&k2()), 0), 2);
    }
}

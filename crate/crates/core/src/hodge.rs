//! The Hodge Laplacian on `Ω^p`, harmonic forms, the orthogonal Hodge
//! decomposition and the spectral Green's operator.
//!
//! All matrices live in the orthonormal `Ω^p` frame. With `U` the matrix of
//! `d: Ω^p → A^{p+1}` and `L` the matrix of the repaired `d^{p-1}` from
//! `D^{p-1}` into `Ω^p`, the Laplacian is
//!
//! ```text
//! Δ = UᵀU + LLᵀ        (δd + dδ, δ the metric adjoint of d)
//! ```
//!
//! which is symmetric positive semidefinite with `ker Δ = ker U ∩ ker Lᵀ`,
//! a space of the same dimension as the cohomology of the repaired complex.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::complex::{Cochain, PathComplex, Subspace};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::linalg::{self, SortedEigen, Tolerances};

/// Eigendecomposition of a Laplacian with its zero threshold.
#[derive(Debug, Clone)]
pub struct SpectralData {
    /// Ascending.
    pub eigenvalues: DVector<f64>,
    /// Orthonormal eigenvectors as columns, matching `eigenvalues`.
    pub eigenvectors: DMatrix<f64>,
    /// Eigenvalues at or below this count as zero.
    pub zero_threshold: f64,
}

impl SpectralData {
    pub fn new(delta: &DMatrix<f64>, tol: &Tolerances) -> Self {
        let SortedEigen { values, vectors } = linalg::sym_eigen(delta);
        let lambda_max = values.iter().copied().fold(1.0, f64::max);
        SpectralData { eigenvalues: values, eigenvectors: vectors, zero_threshold: tol.zero_eig_rel * lambda_max }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Number of eigenvalues counted as zero.
    pub fn kernel_dim(&self) -> usize {
        self.eigenvalues.iter().filter(|&&l| l <= self.zero_threshold).count()
    }

    /// Smallest eigenvalue above the zero threshold.
    pub fn lambda1(&self) -> Option<f64> {
        self.eigenvalues.iter().copied().find(|&l| l > self.zero_threshold)
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(0.0, f64::max)
    }

    pub fn kernel_frame(&self) -> DMatrix<f64> {
        let k = self.kernel_dim();
        self.eigenvectors.columns(0, k).into_owned()
    }

    /// `Q f(Λ) Qᵀ` for a scalar function applied to the spectrum.
    pub fn apply_fn(&self, f: impl Fn(f64, bool) -> f64) -> DMatrix<f64> {
        let n = self.len();
        let mut scaled = self.eigenvectors.clone();
        for j in 0..n {
            let l = self.eigenvalues[j];
            let s = f(l, l <= self.zero_threshold);
            scaled.column_mut(j).scale_mut(s);
        }
        scaled * self.eigenvectors.transpose()
    }

    /// `‖QΛQᵀ - Δ‖_F`.
    pub fn reconstruction_error(&self, delta: &DMatrix<f64>) -> f64 {
        (self.apply_fn(|l, _| l) - delta).norm()
    }
}

/// The Laplacian on `Ω^p` together with its pieces.
#[derive(Debug, Clone)]
pub struct LaplacianBundle {
    pub p: usize,
    pub omega: Subspace,
    /// `d: Ω^p → A^{p+1}` (rows in allowed `(p+1)`-coordinates).
    pub up: DMatrix<f64>,
    /// Repaired `d^{p-1}`: `D^{p-1} → Ω^p` (columns in the `D^{p-1}` frame).
    pub down: DMatrix<f64>,
    /// `δ: A^{p+1} → Ω^p`, the metric adjoint of `up`.
    pub codifferential: DMatrix<f64>,
    /// `δd = UᵀU`.
    pub delta_plus: DMatrix<f64>,
    /// `dδ = LLᵀ`.
    pub delta_minus: DMatrix<f64>,
    pub delta: DMatrix<f64>,
    pub spectral: SpectralData,
    /// Orthonormal basis of `im d^{p-1}` in frame coordinates.
    pub exact_frame: DMatrix<f64>,
    /// Orthonormal basis of `im δ` in frame coordinates.
    pub coexact_frame: DMatrix<f64>,
    /// `dim Ω^p - dim D^p`.
    pub closure_defect: usize,
    pub tol: Tolerances,
}

/// Orthogonal splitting `f = harmonic + d_exact + delta_exact`.
#[derive(Debug, Clone)]
pub struct HodgeParts {
    pub input: Cochain,
    pub harmonic: Cochain,
    pub d_exact: Cochain,
    pub delta_exact: Cochain,
}

impl HodgeParts {
    pub fn reconstruction_residual(&self) -> f64 {
        (&self.input.coeffs - &self.harmonic.coeffs - &self.d_exact.coeffs - &self.delta_exact.coeffs).norm()
    }

    /// Largest `|⟨a, b⟩|` over the three pairs of parts.
    pub fn max_pairwise_inner(&self) -> f64 {
        let (h, e, c) = (&self.harmonic, &self.d_exact, &self.delta_exact);
        [h.dot(e), h.dot(c), e.dot(c)].iter().fold(0.0, |a, x| a.max(x.abs()))
    }
}

/// Dimensions summarising a Laplacian, used by reports.
#[derive(Debug, Clone, Serialize)]
pub struct HodgeSummary {
    pub p: usize,
    pub omega_dim: usize,
    pub harmonic_dim: usize,
    pub exact_dim: usize,
    pub coexact_dim: usize,
    pub closure_defect: usize,
    pub eigenvalues: Vec<f64>,
}

impl LaplacianBundle {
    pub fn new(cx: &PathComplex, p: usize) -> Self {
        let tol = *cx.tolerances();
        let omega = cx.omega(p).clone();
        let up = cx.d(p).mul_dense(&omega.frame);
        let down = if p == 0 {
            DMatrix::zeros(omega.dim(), 0)
        } else {
            let r = cx.restricted_d(p - 1);
            // Image of D^{p-1} in Ω^p-frame coordinates.
            omega.frame.transpose() * cx.d(p - 1).mul_dense(&r.domain.frame)
        };
        let codifferential = up.transpose();
        let delta_plus = linalg::symmetrize(&(&codifferential * &up));
        let delta_minus = linalg::symmetrize(&(&down * down.transpose()));
        let delta = &delta_plus + &delta_minus;
        let spectral = SpectralData::new(&delta, &tol);
        let exact_frame = linalg::column_space(&down, &tol);
        let coexact_frame = linalg::column_space(&codifferential, &tol);
        LaplacianBundle {
            p,
            closure_defect: cx.restricted_d(p).closure_defect,
            omega,
            up,
            down,
            codifferential,
            delta_plus,
            delta_minus,
            delta,
            spectral,
            exact_frame,
            coexact_frame,
            tol,
        }
    }

    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    pub fn basis(&self) -> &std::sync::Arc<crate::complex::PathBasis> {
        &self.omega.ambient
    }

    /// `FΔFᵀ`: the Laplacian in allowed coordinates (zero off `Ω^p`).
    pub fn ambient_delta(&self) -> DMatrix<f64> {
        &self.omega.frame * &self.delta * self.omega.frame.transpose()
    }

    /// Frame coordinates of a cochain that must lie in `Ω^p`.
    pub fn coords(&self, f: &Cochain) -> Result<DVector<f64>> {
        self.omega.coords_checked(f, &self.tol)
    }

    pub fn cochain(&self, coords: &DVector<f64>) -> Cochain {
        Cochain { basis: self.omega.ambient.clone(), coeffs: self.omega.embed(coords) }
    }

    pub fn apply(&self, f: &Cochain) -> Result<Cochain> {
        let c = self.coords(f)?;
        Ok(self.cochain(&(&self.delta * c)))
    }

    /// Orthogonal projector onto `ker Δ` in frame coordinates.
    pub fn harmonic_projector(&self) -> DMatrix<f64> {
        self.spectral.apply_fn(|_, zero| if zero { 1.0 } else { 0.0 })
    }

    /// Moore–Penrose pseudo-inverse of `Δ` in frame coordinates.
    pub fn green_matrix(&self) -> DMatrix<f64> {
        self.spectral.apply_fn(|l, zero| if zero { 0.0 } else { 1.0 / l })
    }

    /// `H^p` as a subspace of allowed coordinates.
    pub fn harmonic_basis(&self) -> Subspace {
        Subspace { ambient: self.omega.ambient.clone(), frame: &self.omega.frame * self.spectral.kernel_frame() }
    }

    pub fn hodge_decompose(&self, f: &Cochain) -> Result<HodgeParts> {
        let c = self.coords(f)?;
        let harmonic = self.harmonic_projector() * &c;
        let exact = linalg::project(&self.exact_frame, &c);
        let coexact = linalg::project(&self.coexact_frame, &c);
        Ok(HodgeParts {
            input: f.clone(),
            harmonic: self.cochain(&harmonic),
            d_exact: self.cochain(&exact),
            delta_exact: self.cochain(&coexact),
        })
    }

    /// `‖df‖` for `f ∈ Ω^p`.
    pub fn closedness_residual(&self, f: &Cochain) -> Result<f64> {
        let c = self.coords(f)?;
        Ok((&self.up * c).norm())
    }

    /// The harmonic form cohomologous to a closed `f`; it has the least norm
    /// in the class `f + im d`.
    pub fn harmonic_representative(&self, f: &Cochain) -> Result<Cochain> {
        let residual = self.closedness_residual(f)?;
        if residual > self.tol.membership * f.norm().max(1.0) {
            return Err(Error::NotClosed { residual });
        }
        let c = self.coords(f)?;
        Ok(self.cochain(&(self.harmonic_projector() * c)))
    }

    /// `G(f) = Δ⁺f`, orthogonal to harmonic forms, with `ΔG(f) = f - H(f)`.
    pub fn green_spectral(&self, f: &Cochain) -> Result<Cochain> {
        let c = self.coords(f)?;
        Ok(self.cochain(&(self.green_matrix() * c)))
    }

    /// `|⟨Δf, f⟩ - ‖df‖² - ‖δf‖²|`.
    pub fn energy_identity_residual(&self, f: &Cochain) -> Result<f64> {
        let c = self.coords(f)?;
        let lhs = (&self.delta * &c).dot(&c);
        let df = (&self.up * &c).norm_squared();
        let delta_f = (self.down.transpose() * &c).norm_squared();
        Ok((lhs - df - delta_f).abs())
    }

    pub fn summary(&self) -> HodgeSummary {
        HodgeSummary {
            p: self.p,
            omega_dim: self.dim(),
            harmonic_dim: self.spectral.kernel_dim(),
            exact_dim: self.exact_frame.ncols(),
            coexact_dim: self.coexact_frame.ncols(),
            closure_defect: self.closure_defect,
            eigenvalues: self.spectral.eigenvalues.iter().copied().collect(),
        }
    }
}

/// Builds `Δ` on `Ω^p` for a standalone digraph.
pub fn laplacian(g: &Digraph, p: usize) -> LaplacianBundle {
    LaplacianBundle::new(&PathComplex::new(g, p), p)
}

pub fn harmonic_basis(g: &Digraph, p: usize) -> Subspace {
    laplacian(g, p).harmonic_basis()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn k2() -> Digraph {
        Digraph::new(2, [(0, 1), (1, 0)]).unwrap()
    }

    fn cochain(b: &LaplacianBundle, v: DVector<f64>) -> Cochain {
        Cochain::new(b.basis().clone(), v).unwrap()
    }

    #[test]
    fn k2_laplacian_matches_classical_form() {
        let b = laplacian(&k2(), 0);
        let f = cochain(&b, dvector![1.0, 0.0]);
        // 2(m(x)f(x) - Σ_{y~x} f(y)) with m ≡ 1.
        assert!((b.apply(&f).unwrap().coeffs - dvector![2.0, -2.0]).norm() < 1e-12);
        assert!((b.spectral.eigenvalues.clone() - dvector![0.0, 4.0]).norm() < 1e-12);
    }

    #[test]
    fn constants_are_harmonic() {
        for g in [k2(), Digraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap(), Digraph::new(2, [(0, 1)]).unwrap()] {
            let b = laplacian(&g, 0);
            let ones = cochain(&b, DVector::from_element(g.n_vertices(), 1.0));
            assert!(b.apply(&ones).unwrap().norm() < 1e-12);
        }
        // Ω^0 of G1 is the constants, so Δ vanishes there.
        let b = laplacian(&Digraph::new(2, [(0, 1)]).unwrap(), 0);
        assert_eq!(b.dim(), 1);
        assert!(b.delta.norm() < 1e-12);
    }

    #[test]
    fn harmonic_basis_examples() {
        let h = harmonic_basis(&k2(), 0);
        assert_eq!(h.dim(), 1);
        let v = h.frame.column(0);
        assert!((v[0].abs() - 0.5f64.sqrt()).abs() < 1e-12 && (v[0] - v[1]).abs() < 1e-12);
        assert_eq!(harmonic_basis(&Digraph::new(3, []).unwrap(), 0).dim(), 1);
    }

    #[test]
    fn k2_decomposition() {
        let b = laplacian(&k2(), 0);
        let parts = b.hodge_decompose(&cochain(&b, dvector![1.0, 0.0])).unwrap();
        assert!((parts.harmonic.coeffs.clone() - dvector![0.5, 0.5]).norm() < 1e-12);
        assert!(parts.d_exact.norm() < 1e-12);
        assert!((parts.delta_exact.coeffs.clone() - dvector![0.5, -0.5]).norm() < 1e-12);
        assert!(parts.reconstruction_residual() < 1e-12);
    }

    #[test]
    fn k2_green() {
        let b = laplacian(&k2(), 0);
        let g = b.green_spectral(&cochain(&b, dvector![1.0, 0.0])).unwrap();
        assert!((g.coeffs - dvector![0.125, -0.125]).norm() < 1e-12);
        let h = cochain(&b, dvector![1.0, 1.0]);
        assert!(b.green_spectral(&h).unwrap().norm() < 1e-12);
    }

    #[test]
    fn rejects_forms_outside_omega() {
        let g1 = Digraph::new(2, [(0, 1)]).unwrap();
        let b = laplacian(&g1, 0);
        let f = cochain(&b, dvector![1.0, 0.0]);
        assert!(matches!(b.hodge_decompose(&f), Err(Error::NotInSubspace { .. })));
    }

    #[test]
    fn non_closed_form_rejected() {
        let b = laplacian(&k2(), 0);
        let f = cochain(&b, dvector![1.0, 0.0]);
        assert!(matches!(b.harmonic_representative(&f), Err(Error::NotClosed { .. })));
    }

    #[test]
    fn trivial_omega_is_not_an_error() {
        let g1 = Digraph::new(2, [(0, 1)]).unwrap();
        let b = laplacian(&g1, 1);
        assert_eq!(b.dim(), 0);
        let zero = cochain(&b, dvector![0.0]);
        assert_eq!(b.hodge_decompose(&zero).unwrap().harmonic.norm(), 0.0);
        assert_eq!(b.green_spectral(&zero).unwrap().norm(), 0.0);
    }
}

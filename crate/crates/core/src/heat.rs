//! Heat semigroup `T_t = exp(-tΔ)` on `Ω^p`, trajectories, stochastic
//! completeness, decay rate and the Green's operator by quadrature.

use nalgebra::{DMatrix, DVector};
use serde::{Serialize, Serializer};

use crate::complex::Cochain;
use crate::error::{Error, Result};
use crate::hodge::LaplacianBundle;

#[derive(Debug, Clone)]
pub struct HeatOperator {
    pub t: f64,
    pub p: usize,
    /// `Q exp(-tΛ) Qᵀ` in the `Ω^p` frame.
    pub matrix: DMatrix<f64>,
}

pub fn heat_operator(b: &LaplacianBundle, t: f64) -> Result<HeatOperator> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let matrix =
        if t == 0.0 { DMatrix::identity(b.dim(), b.dim()) } else { b.spectral.apply_fn(|l, _| (-t * l).exp()) };
    Ok(HeatOperator { t, p: b.p, matrix })
}

impl HeatOperator {
    pub fn apply(&self, b: &LaplacianBundle, u: &Cochain) -> Result<Cochain> {
        let c = b.coords(u)?;
        Ok(b.cochain(&(&self.matrix * c)))
    }

    /// Kernel entries `p(t, x, y)` in allowed coordinates, `F T Fᵀ`.
    ///
    /// These are the fundamental solution only when `Ω^p = A^p`; otherwise
    /// they depend on the frame and [`FundamentalSolution::frame`] says so.
    pub fn fundamental_solution(&self, b: &LaplacianBundle) -> FundamentalSolution {
        let full = b.dim() == b.basis().len();
        let kernel = if full {
            // Ω^p = A^p: use the identity frame so entries are basis independent.
            &b.omega.frame * &self.matrix * b.omega.frame.transpose()
        } else {
            self.matrix.clone()
        };
        FundamentalSolution { t: self.t, frame: if full { FrameKind::Allowed } else { FrameKind::Omega }, kernel }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    /// Rows and columns are allowed elementary paths.
    Allowed,
    /// Rows and columns are the orthonormal `Ω^p` frame vectors.
    Omega,
}

#[derive(Debug, Clone)]
pub struct FundamentalSolution {
    pub t: f64,
    pub frame: FrameKind,
    pub kernel: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct HeatTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Cochain>,
    pub norms: Vec<f64>,
    /// `‖u(t) - H(u0)‖`.
    pub dist_to_harmonic: Vec<f64>,
}

impl HeatTrajectory {
    /// Largest increase between consecutive norms (`0` when non-increasing).
    pub fn max_norm_increase(&self) -> f64 {
        self.norms.windows(2).fold(0.0, |a, w| a.max(w[1] - w[0]))
    }

    /// `t,norm,dist_to_harmonic` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,norm,dist_to_harmonic\n");
        for i in 0..self.times.len() {
            out.push_str(&format!("{},{},{}\n", self.times[i], self.norms[i], self.dist_to_harmonic[i]));
        }
        out
    }

    /// One row per time: `t` followed by every allowed-path coefficient.
    pub fn states_csv(&self) -> String {
        // Path labels contain commas, so they are quoted.
        let mut out = String::from("t");
        if let Some(s) = self.states.first() {
            for i in 0..s.basis.len() {
                out.push_str(&format!(",\"{}\"", s.basis.path(i)));
            }
        }
        out.push('\n');
        for (t, s) in self.times.iter().zip(&self.states) {
            out.push_str(&t.to_string());
            for v in s.coeffs.iter() {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

pub fn evolve(b: &LaplacianBundle, u0: &Cochain, times: &[f64]) -> Result<HeatTrajectory> {
    if let Some(&t) = times.iter().find(|t| t.is_nan() || **t < 0.0) {
        return Err(Error::NegativeTime(t));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("times must be ascending".into()));
    }
    let c = b.coords(u0)?;
    let h = b.harmonic_projector() * &c;
    let q = &b.spectral.eigenvectors;
    let spectral_coords = q.transpose() * &c;
    let mut traj = HeatTrajectory { times: times.to_vec(), states: vec![], norms: vec![], dist_to_harmonic: vec![] };
    for &t in times {
        let scaled = DVector::from_iterator(
            spectral_coords.len(),
            spectral_coords.iter().zip(b.spectral.eigenvalues.iter()).map(|(&a, &l)| a * (-t * l).exp()),
        );
        let ut = q * scaled;
        traj.norms.push(ut.norm());
        traj.dist_to_harmonic.push((&ut - &h).norm());
        traj.states.push(b.cochain(&ut));
    }
    Ok(traj)
}

/// `‖(u(t+h) - u(t-h)) / 2h + Δu(t)‖`.
pub fn finite_difference_residual(b: &LaplacianBundle, u0: &Cochain, t: f64, h: f64) -> Result<f64> {
    let traj = evolve(b, u0, &[t - h, t, t + h])?;
    let c: Vec<DVector<f64>> = traj.states.iter().map(|s| b.coords(s)).collect::<Result<_>>()?;
    Ok(((&c[2] - &c[0]) / (2.0 * h) + &b.delta * &c[1]).norm())
}

/// `lim_{t→∞} T_t u0`, the harmonic projection of `u0`.
pub fn harmonic_limit(b: &LaplacianBundle, u0: &Cochain) -> Result<Cochain> {
    let c = b.coords(u0)?;
    Ok(b.cochain(&(b.harmonic_projector() * c)))
}

#[derive(Debug, Clone, Serialize)]
pub struct StochasticCompleteness {
    pub t: f64,
    /// `false` when the hypotheses (p = 0, connected) fail; the deviation is
    /// still measured.
    pub applicable: bool,
    /// `max_x |Σ_y p(t,x,y) - 1|` in allowed coordinates.
    pub max_row_sum_deviation: f64,
}

/// Row-sum deviation of `F T_t Fᵀ` in allowed coordinates, at any degree.
pub fn row_sum_deviation(b: &LaplacianBundle, t: f64) -> Result<f64> {
    let op = heat_operator(b, t)?;
    let n = b.basis().len();
    if n == 0 {
        return Ok(0.0);
    }
    let k = &b.omega.frame * &op.matrix * b.omega.frame.transpose();
    let ones = DVector::from_element(n, 1.0);
    let sums = k * ones;
    Ok(sums.iter().fold(0.0, |a, s| a.max((s - 1.0).abs())))
}

pub fn stochastic_completeness(b: &LaplacianBundle, connected: bool, t: f64) -> Result<StochasticCompleteness> {
    let full = b.dim() == b.basis().len();
    Ok(StochasticCompleteness {
        t,
        applicable: b.p == 0 && connected && full,
        max_row_sum_deviation: row_sum_deviation(b, t)?,
    })
}

/// `|Σ_x u(t,x) - Σ_x u0(x)|`.
pub fn mass_defect(b: &LaplacianBundle, u0: &Cochain, t: f64) -> Result<f64> {
    let ut = heat_operator(b, t)?.apply(b, u0)?;
    Ok((ut.coeffs.sum() - u0.coeffs.sum()).abs())
}

#[derive(Debug, Clone)]
pub struct GreenQuadrature {
    pub value: Cochain,
    pub t_max: f64,
    pub n_steps: usize,
    /// `e^{-λ₁ t_max} / λ₁ · ‖f - Hf‖`.
    pub tail_bound: f64,
    /// Trapezoid error bound `t_max h² / 12 · max ‖d²/dt² (T_t f - Hf)‖`.
    pub discretization_bound: f64,
}

impl GreenQuadrature {
    pub fn total_bound(&self) -> f64 {
        self.tail_bound + self.discretization_bound
    }
}

/// `t_max = max(10, 20/λ₁)`, `n_steps = 4096`.
pub fn default_quadrature(b: &LaplacianBundle) -> (f64, usize) {
    let t_max = match b.spectral.lambda1() {
        Some(l) => (20.0 / l).max(10.0),
        None => 10.0,
    };
    (t_max, 4096)
}

/// Composite trapezoid rule for `∫₀^{t_max} (T_t f - Hf) dt`.
pub fn green_quadrature(b: &LaplacianBundle, f: &Cochain, t_max: f64, n_steps: usize) -> Result<GreenQuadrature> {
    if n_steps < 2 {
        return Err(Error::InvalidArgument(format!("n_steps must be at least 2, got {n_steps}")));
    }
    if t_max.is_nan() || t_max <= 0.0 {
        return Err(Error::InvalidArgument(format!("t_max must be positive, got {t_max}")));
    }
    let c = b.coords(f)?;
    let q = &b.spectral.eigenvectors;
    let a = q.transpose() * &c;
    let lambdas = &b.spectral.eigenvalues;
    let zero = b.spectral.zero_threshold;
    let h = t_max / n_steps as f64;
    let mut acc = DVector::zeros(a.len());
    for i in 0..=n_steps {
        let t = i as f64 * h;
        let w = if i == 0 || i == n_steps { 0.5 * h } else { h };
        for j in 0..a.len() {
            if lambdas[j] > zero {
                acc[j] += w * a[j] * (-t * lambdas[j]).exp();
            }
        }
    }
    let non_harmonic: f64 =
        a.iter().zip(lambdas.iter()).filter(|(_, &l)| l > zero).map(|(x, _)| x * x).sum::<f64>().sqrt();
    let lambda1 = b.spectral.lambda1();
    let tail_bound = lambda1.map_or(0.0, |l| (-l * t_max).exp() / l * non_harmonic);
    let lambda_max = b.spectral.lambda_max();
    let discretization_bound = t_max * h * h / 12.0 * lambda_max * lambda_max * non_harmonic;
    Ok(GreenQuadrature { value: b.cochain(&(q * acc)), t_max, n_steps, tail_bound, discretization_bound })
}

/// `λ₁`, or the infinite sentinel when `Δ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralGap {
    Finite(f64),
    Infinite,
}

impl SpectralGap {
    pub fn value(self) -> f64 {
        match self {
            SpectralGap::Finite(l) => l,
            SpectralGap::Infinite => f64::INFINITY,
        }
    }
}

impl Serialize for SpectralGap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SpectralGap::Finite(l) => s.serialize_f64(*l),
            SpectralGap::Infinite => s.serialize_str("inf"),
        }
    }
}

pub fn spectral_gap(b: &LaplacianBundle) -> SpectralGap {
    b.spectral.lambda1().map_or(SpectralGap::Infinite, SpectralGap::Finite)
}

/// Decay rate from a least-squares fit of `log ‖T_t f - Hf‖` on
/// `t ∈ [4/λ₁, 12/λ₁]`. `None` when the gap is infinite or `f` is harmonic.
pub fn empirical_gap(b: &LaplacianBundle, f: &Cochain) -> Result<Option<f64>> {
    let Some(l1) = b.spectral.lambda1() else { return Ok(None) };
    let n = 32;
    let times: Vec<f64> = (0..n).map(|i| (4.0 + 8.0 * i as f64 / (n - 1) as f64) / l1).collect();
    let traj = evolve(b, f, &times)?;
    let pts: Vec<(f64, f64)> =
        times.iter().zip(&traj.dist_to_harmonic).filter(|(_, &d)| d > 0.0).map(|(&t, &d)| (t, d.ln())).collect();
    if pts.len() < 2 {
        return Ok(None);
    }
    let m = pts.len() as f64;
    let (st, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t, b + y));
    let (mt, my) = (st / m, sy / m);
    let (cov, var) = pts.iter().fold((0.0, 0.0), |(c, v), (t, y)| (c + (t - mt) * (y - my), v + (t - mt) * (t - mt)));
    Ok(Some(-cov / var))
}

/// Residual of `‖T_{t+2h}α - T_tα‖² = (‖T_{t+2h}α‖ - ‖T_tα‖)² - 2(‖T_{t+h}α‖² - ‖T_{t+2h}α‖‖T_tα‖)`.
pub fn cauchy_tail_residual(b: &LaplacianBundle, alpha: &Cochain, t: f64, h: f64) -> Result<f64> {
    let traj = evolve(b, alpha, &[t, t + h, t + 2.0 * h])?;
    let [a, m, z] = [&traj.states[0], &traj.states[1], &traj.states[2]];
    let lhs = (&z.coeffs - &a.coeffs).norm_squared();
    let (na, nm, nz) = (a.norm(), m.norm(), z.norm());
    let rhs = (nz - na).powi(2) - 2.0 * (nm * nm - nz * na);
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::Digraph;
    use crate::hodge::laplacian;
    use nalgebra::dvector;

    fn k2() -> LaplacianBundle {
        laplacian(&Digraph::new(2, [(0, 1), (1, 0)]).unwrap(), 0)
    }

    fn e0(b: &LaplacianBundle) -> Cochain {
        Cochain::new(b.basis().clone(), dvector![1.0, 0.0]).unwrap()
    }

    #[test]
    fn k2_closed_form() {
        let b = k2();
        assert_eq!(heat_operator(&b, 0.0).unwrap().matrix, DMatrix::identity(2, 2));
        for t in [0.1, 0.5, 2.0] {
            let u = heat_operator(&b, t).unwrap().apply(&b, &e0(&b)).unwrap();
            let e = (-4.0 * t).exp();
            assert!((u.coeffs - dvector![0.5 + 0.5 * e, 0.5 - 0.5 * e]).norm() < 1e-12);
        }
        assert!(matches!(heat_operator(&b, -1.0), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn k2_limits_and_gap() {
        let b = k2();
        let lim = harmonic_limit(&b, &e0(&b)).unwrap();
        assert!((lim.coeffs - dvector![0.5, 0.5]).norm() < 1e-12);
        assert!((spectral_gap(&b).value() - 4.0).abs() < 1e-12);
        let fit = empirical_gap(&b, &e0(&b)).unwrap().unwrap();
        assert!((fit - 4.0).abs() < 1e-6);
        let empty = laplacian(&Digraph::new(3, []).unwrap(), 0);
        assert_eq!(spectral_gap(&empty), SpectralGap::Infinite);
        assert_eq!(serde_json::to_string(&SpectralGap::Infinite).unwrap(), "\"inf\"");
    }

    #[test]
    fn k2_completeness() {
        let b = k2();
        for t in [0.0, 0.3, 5.0] {
            let sc = stochastic_completeness(&b, true, t).unwrap();
            assert!(sc.applicable && sc.max_row_sum_deviation < 1e-10);
            assert!(mass_defect(&b, &e0(&b), t).unwrap() < 1e-12);
        }
    }

    #[test]
    fn k2_green_by_quadrature() {
        let b = k2();
        let q = green_quadrature(&b, &e0(&b), 10.0, 10_000).unwrap();
        assert!((q.value.coeffs.clone() - dvector![0.125, -0.125]).norm() < q.total_bound() + 1e-6);
        let coarse = green_quadrature(&b, &e0(&b), 10.0, 200).unwrap();
        let fine = green_quadrature(&b, &e0(&b), 10.0, 400).unwrap();
        let exact = b.green_spectral(&e0(&b)).unwrap();
        let ratio = (coarse.value.coeffs - &exact.coeffs).norm() / (fine.value.coeffs - &exact.coeffs).norm();
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn trajectory_checks() {
        let b = k2();
        let traj = evolve(&b, &e0(&b), &[0.0, 0.1, 0.5, 1.0, 3.0]).unwrap();
        assert!(traj.max_norm_increase() <= 1e-12);
        assert!(traj.to_csv().starts_with("t,norm,dist_to_harmonic\n0,"));
        assert_eq!(traj.to_csv().lines().count(), 6);
        assert!(finite_difference_residual(&b, &e0(&b), 0.5, 1e-3).unwrap() < 1e-4);
        assert!(cauchy_tail_residual(&b, &e0(&b), 0.2, 0.3).unwrap() < 1e-9);
        assert!(evolve(&b, &e0(&b), &[1.0, 0.5]).is_err());
    }
}

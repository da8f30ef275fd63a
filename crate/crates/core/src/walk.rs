//! Oriented allowed `d`-paths, the signed neighbour relation, the
//! valence-weighted metric, upper and lower Laplacians, and the lazy random
//! walk with its expectation process.
//!
//! The neighbour relation is read off the expansion of `∂(d f)(v)` in which
//! `f` and the intermediate `(d+1)`-paths range over allowed paths only:
//! for every allowed coface `z = insert_q(v, k)` and every `r ≠ q` with
//! `w = omit_r(z)` allowed, `σ·w` is a neighbour of `v` with
//! `σ = (-1)^{q+r+1}`. Neighbours are kept as a multiset, so `m(v)` counts
//! repetitions. The same expansion contributes `c(v)` (the number of allowed
//! cofaces, up to self-pairings) to the diagonal; the composed operator
//! `∂ ∘ d_ω` agrees with the neighbour-sum formula exactly when `c = m`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{d_allowed, PathBasis};
use crate::digraph::{allowed_slice, Digraph, ElementaryPath};
use crate::error::{Error, Result};
use crate::linalg::{self, Tolerances};
use crate::sparse::SparseMatrix;

fn parity(k: usize) -> i8 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `±e_path`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OrientedState {
    pub path: ElementaryPath,
    pub sign: i8,
}

impl OrientedState {
    pub fn opposite(&self) -> OrientedState {
        OrientedState { path: self.path.clone(), sign: -self.sign }
    }
}

/// `sign · e_target`, with `target` an index into the allowed `d`-paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NeighborEntry {
    pub target: usize,
    pub sign: i8,
}

#[derive(Debug, Clone)]
pub struct SignedNeighborTable {
    pub d: usize,
    /// Allowed `d`-paths; states are `(index, ±1)`.
    pub basis: Arc<PathBasis>,
    pub coface_basis: Arc<PathBasis>,
    /// Neighbour multiset of each allowed `d`-path; `m(v)` is its length.
    pub entries: Vec<Vec<NeighborEntry>>,
    /// `c(v)`: coefficient of `f(v)/m(v)` in `∂(d f)(v)`.
    pub diagonal: Vec<i64>,
}

/// A disagreement between the derived relation and the printed index ranges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NeighborMismatch {
    pub path: ElementaryPath,
    pub neighbor: OrientedState,
    /// `true` when only the derived relation contains the pair.
    pub derived_only: bool,
}

impl SignedNeighborTable {
    /// Builds the table without validating valences.
    pub fn build(g: &Digraph, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("the walk needs d ≥ 1".into()));
        }
        let basis = Arc::new(PathBasis::allowed(g, d));
        let coface_basis = Arc::new(PathBasis::allowed(g, d + 1));
        let n = basis.len();
        let mut entries = vec![Vec::new(); n];
        let mut diagonal = vec![0i64; n];
        // Every allowed coface z, with each pair (q, r) of omitted positions.
        for z in coface_basis.allowed_paths() {
            let faces: Vec<Option<usize>> = (0..=d + 1).map(|q| basis.index_of(&z.omit(q).0)).collect();
            for q in 0..=d + 1 {
                let Some(v) = faces[q] else { continue };
                diagonal[v] += 1;
                for r in (0..=d + 1).filter(|&r| r != q) {
                    let Some(w) = faces[r] else { continue };
                    // Cross coefficient (-1)^{q+r}; the neighbour carries the opposite sign.
                    let sigma = -parity(q + r);
                    if w == v {
                        diagonal[v] -= sigma as i64;
                    } else {
                        entries[v].push(NeighborEntry { target: w, sign: sigma });
                    }
                }
            }
        }
        for e in &mut entries {
            e.sort();
        }
        Ok(SignedNeighborTable { d, basis, coface_basis, entries, diagonal })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn path(&self, i: usize) -> ElementaryPath {
        self.basis.path(i)
    }

    pub fn index_of(&self, path: &ElementaryPath) -> Option<usize> {
        self.basis.index_of(&path.0)
    }

    pub fn valence(&self, i: usize) -> usize {
        self.entries[i].len()
    }

    pub fn valences(&self) -> Vec<usize> {
        self.entries.iter().map(Vec::len).collect()
    }

    /// `M`, the largest valence.
    pub fn max_valence(&self) -> usize {
        self.entries.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Valence → number of allowed `d`-paths with that valence.
    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for e in &self.entries {
            *h.entry(e.len()).or_insert(0) += 1;
        }
        h
    }

    /// Paths whose diagonal count differs from their valence.
    pub fn irregular(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.diagonal[i] != self.valence(i) as i64).collect()
    }

    /// `c(v) = m(v)` everywhere, so the composed and explicit `Δ⁺` agree.
    pub fn is_regular(&self) -> bool {
        self.irregular().is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::InvalidArgument(format!("no allowed {}-paths", self.d)));
        }
        if let Some(i) = (0..self.len()).find(|&i| self.valence(i) == 0) {
            return Err(Error::ZeroValence { path: self.path(i).0, dim: self.d });
        }
        Ok(())
    }

    /// Classes of allowed `d`-paths joined by neighbour chains (orientation ignored).
    pub fn components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (v, es) in self.entries.iter().enumerate() {
            for e in es {
                let (a, b) = (find(&mut parent, v), find(&mut parent, e.target));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        (0..self.len()).filter(|&i| find(&mut parent, i) == i).count()
    }

    pub fn is_d_connected(&self) -> bool {
        self.components() <= 1
    }

    /// Compares the derived relation with the literal definition that inserts
    /// `k` at `q ∈ {0..d}` and omits original position `r ∈ {0..d}`, without
    /// requiring the intermediate path to be allowed. Pairs are compared as sets.
    pub fn printed_definition_mismatches(&self, g: &Digraph) -> Vec<NeighborMismatch> {
        let d = self.d;
        let mut out = Vec::new();
        for v in 0..self.len() {
            let path = self.path(v);
            let derived: BTreeSet<(usize, i8)> = self.entries[v].iter().map(|e| (e.target, e.sign)).collect();
            let mut printed = BTreeSet::new();
            for k in 0..g.n_vertices() {
                for q in 0..=d {
                    for r in 0..=d {
                        let z = path.insert(q, k);
                        // Original position r sits at r (r < q) or r + 1 (r ≥ q) after insertion.
                        let (pos, sign) = if r < q { (r, -parity(q + r)) } else { (r + 1, parity(q + r)) };
                        let w = z.omit(pos);
                        if let Some(wi) = self.basis.index_of(&w.0) {
                            if wi != v {
                                printed.insert((wi, sign));
                            }
                        }
                    }
                }
            }
            for &(w, s) in derived.symmetric_difference(&printed) {
                out.push(NeighborMismatch {
                    path: path.clone(),
                    neighbor: OrientedState { path: self.path(w), sign: s },
                    derived_only: derived.contains(&(w, s)),
                });
            }
        }
        out
    }

    /// `w ∈ N(v)` with sign `σ` exactly as often as `v ∈ N(w)` with sign `σ`.
    pub fn is_symmetric(&self) -> bool {
        let mut count: BTreeMap<(usize, usize, i8), i64> = BTreeMap::new();
        for (v, es) in self.entries.iter().enumerate() {
            for e in es {
                *count.entry((v, e.target, e.sign)).or_insert(0) += 1;
                *count.entry((e.target, v, e.sign)).or_insert(0) -= 1;
            }
        }
        count.values().all(|&c| c == 0)
    }

    pub fn metric(&self) -> WeightedMetric {
        WeightedMetric { d: self.d, basis: self.basis.clone(), valence: self.valences() }
    }
}

/// Builds and validates the table (every allowed `d`-path needs `m(v) ≥ 1`).
pub fn signed_neighbors(g: &Digraph, d: usize) -> Result<SignedNeighborTable> {
    let t = SignedNeighborTable::build(g, d)?;
    t.validate()?;
    Ok(t)
}

/// `ω(w) = 1/m(w)` on allowed `d`-paths and `1` elsewhere.
#[derive(Debug, Clone)]
pub struct WeightedMetric {
    pub d: usize,
    basis: Arc<PathBasis>,
    valence: Vec<usize>,
}

impl WeightedMetric {
    pub fn weight(&self, path: &[usize]) -> f64 {
        if path.len() != self.d + 1 {
            return 1.0;
        }
        match self.basis.index_of(path) {
            Some(i) if self.valence[i] > 0 => 1.0 / self.valence[i] as f64,
            _ => 1.0,
        }
    }

    /// Weights of the allowed `d`-paths.
    pub fn weights(&self) -> DVector<f64> {
        DVector::from_iterator(self.valence.len(), self.valence.iter().map(|&m| 1.0 / m.max(1) as f64))
    }

    pub fn inner(&self, f: &DVector<f64>, g: &DVector<f64>) -> f64 {
        f.iter().zip(g.iter()).zip(self.weights().iter()).map(|((a, b), w)| w * a * b).sum()
    }

    pub fn norm(&self, f: &DVector<f64>) -> f64 {
        self.inner(f, f).sqrt()
    }
}

/// `d_ω: (k-1)-forms → k-forms`, `df(z) = ω(z)^{-1} Σ_q (-1)^q ω(omit_q z) f(omit_q z)`,
/// between arbitrary bases.
pub fn weighted_d_between(metric: &WeightedMetric, from: &PathBasis, to: &PathBasis) -> SparseMatrix<f64> {
    assert_eq!(from.dim() + 1, to.dim());
    let mut triplets = Vec::new();
    for i in 0..to.len() {
        let z = to.path(i);
        let wz = metric.weight(&z.0);
        for q in 0..z.0.len() {
            let u = z.omit(q);
            if let Some(j) = from.index_of(&u.0) {
                triplets.push((i, j, parity(q) as f64 * metric.weight(&u.0) / wz));
            }
        }
    }
    SparseMatrix::from_triplets(to.len(), from.len(), triplets)
}

/// `d_ω` producing `k`-forms, on the full `Λ` bases.
pub fn weighted_d(g: &Digraph, table: &SignedNeighborTable, k: usize) -> Result<SparseMatrix<f64>> {
    if k == 0 {
        return Err(Error::InvalidArgument("weighted d produces k-forms with k ≥ 1".into()));
    }
    let n = g.n_vertices();
    Ok(weighted_d_between(&table.metric(), &PathBasis::full(n, k - 1), &PathBasis::full(n, k)))
}

/// Largest entry of `W_k D - ∂ᵀ W_{k-1}`, i.e. the failure of
/// `⟨d_ω f, g⟩_ω = ⟨f, ∂g⟩_ω` on `Λ`.
pub fn adjointness_residual(g: &Digraph, table: &SignedNeighborTable, k: usize) -> Result<f64> {
    let n = g.n_vertices();
    let metric = table.metric();
    let dw = weighted_d(g, table, k)?;
    let boundary = crate::complex::build_boundary_n(n, k).matrix;
    let wk = |i: usize| metric.weight(&PathBasis::full(n, k).path(i).0);
    let wk1 = |j: usize| metric.weight(&PathBasis::full(n, k - 1).path(j).0);
    let mut worst = 0.0f64;
    // Both sides are sparse with the same pattern, so compare entry by entry.
    for &(i, j, v) in dw.entries() {
        worst = worst.max((wk(i) * v - boundary.get(j, i) as f64 * wk1(j)).abs());
    }
    for &(j, i, b) in boundary.entries() {
        worst = worst.max((wk(i) * dw.get(i, j) - b as f64 * wk1(j)).abs());
    }
    Ok(worst)
}

/// `Δ⁺f(v) = f(v) - Σ_{σw ∈ N(v)} σ f(w)/m(w)`, on allowed `d`-path coordinates.
pub fn upper_laplacian(table: &SignedNeighborTable) -> DMatrix<f64> {
    let n = table.len();
    let mut l = DMatrix::identity(n, n);
    for (v, es) in table.entries.iter().enumerate() {
        for e in es {
            l[(v, e.target)] -= e.sign as f64 / table.valence(e.target).max(1) as f64;
        }
    }
    l
}

/// `∂ ∘ d_ω` with all paths restricted to allowed ones.
pub fn upper_laplacian_composed(table: &SignedNeighborTable) -> DMatrix<f64> {
    let dw = weighted_d_between(&table.metric(), &table.basis, &table.coface_basis).to_dense();
    let boundary = d_allowed(&table.basis, &table.coface_basis).to_dense().transpose();
    boundary * dw
}

/// `d_ω ∘ ∂` with all paths restricted to allowed ones.
pub fn lower_laplacian_composed(g: &Digraph, table: &SignedNeighborTable) -> DMatrix<f64> {
    let faces = PathBasis::allowed(g, table.d - 1);
    let boundary = d_allowed(&faces, &table.basis).to_dense().transpose();
    let dw = weighted_d_between(&table.metric(), &faces, &table.basis).to_dense();
    dw * boundary
}

/// `Δ⁻f(v) = m(v) Σ_q (-1)^q Σ_{k,r} (-1)^r f(insert_r(omit_q v, k))`, allowed terms only.
pub fn lower_laplacian(g: &Digraph, table: &SignedNeighborTable) -> DMatrix<f64> {
    let n = table.len();
    let mut l = DMatrix::zeros(n, n);
    for v in 0..n {
        let path = table.path(v);
        let m = table.valence(v) as f64;
        for q in 0..=table.d {
            let u = path.omit(q);
            if !allowed_slice(g, &u.0) {
                continue;
            }
            for k in 0..g.n_vertices() {
                for r in 0..=u.0.len() {
                    if let Some(w) = table.index_of(&u.insert(r, k)) {
                        l[(v, w)] += m * (parity(q) * parity(r)) as f64;
                    }
                }
            }
        }
    }
    l
}

/// `W^{1/2} L W^{-1/2}`: symmetric whenever `L` is `ω`-self-adjoint.
fn symmetric_form(table: &SignedNeighborTable, l: &DMatrix<f64>) -> DMatrix<f64> {
    let w = table.metric().weights();
    let n = table.len();
    DMatrix::from_fn(n, n, |i, j| w[i].sqrt() * l[(i, j)] / w[j].sqrt())
}

/// `max |⟨Lf, g⟩_ω - ⟨f, Lg⟩_ω|` over basis pairs.
pub fn self_adjointness_residual(table: &SignedNeighborTable, l: &DMatrix<f64>) -> f64 {
    let s = symmetric_form(table, l);
    linalg::max_abs(&(&s - s.transpose()))
}

/// Ascending spectrum of the explicit `Δ⁺`.
pub fn upper_spectrum(table: &SignedNeighborTable) -> DVector<f64> {
    linalg::sym_eigen(&symmetric_form(table, &upper_laplacian(table))).values
}

#[derive(Debug, Clone)]
pub struct TransitionOperator {
    pub laziness: f64,
    /// `I - (1-p)Δ⁺` on allowed `d`-path coordinates.
    pub matrix: DMatrix<f64>,
    /// Markov kernel on the `2N` oriented states; state `2i` is `+e_i`, `2i+1` is `-e_i`.
    pub kernel: SparseMatrix<f64>,
}

pub fn state_index(i: usize, sign: i8) -> usize {
    2 * i + usize::from(sign < 0)
}

pub fn transition_matrix(table: &SignedNeighborTable, laziness: f64) -> Result<TransitionOperator> {
    if !(0.0..=1.0).contains(&laziness) {
        return Err(Error::InvalidLaziness(laziness));
    }
    table.validate()?;
    let n = table.len();
    let matrix = DMatrix::identity(n, n) - upper_laplacian(table) * (1.0 - laziness);
    let mut triplets = Vec::new();
    for (v, es) in table.entries.iter().enumerate() {
        let step = (1.0 - laziness) / es.len() as f64;
        for s in [1i8, -1] {
            let from = state_index(v, s);
            triplets.push((from, from, laziness));
            for e in es {
                triplets.push((from, state_index(e.target, s * e.sign), step));
            }
        }
    }
    Ok(TransitionOperator { laziness, matrix, kernel: SparseMatrix::from_triplets(2 * n, 2 * n, triplets) })
}

impl TransitionOperator {
    pub fn n_paths(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max_s |Σ_t K(s,t) - 1|`.
    pub fn row_sum_deviation(&self) -> f64 {
        let mut sums = vec![0.0; self.kernel.rows()];
        for &(r, _, v) in self.kernel.entries() {
            sums[r] += v;
        }
        sums.iter().fold(0.0, |a, s| a.max((s - 1.0).abs()))
    }

    /// One step of the state distribution, `p ↦ Kᵀ p`.
    pub fn step(&self, probs: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(probs.len());
        for &(r, c, v) in self.kernel.entries() {
            out[c] += v * probs[r];
        }
        out
    }

    /// Largest entry of `A` minus the operator induced on `E(w) = p(+w) - p(-w)`.
    pub fn induced_residual(&self) -> f64 {
        let n = self.n_paths();
        let mut worst = 0.0f64;
        for u in 0..n {
            let mut start = DVector::zeros(2 * n);
            start[state_index(u, 1)] = 1.0;
            let next = forms_of(&self.step(&start));
            for w in 0..n {
                worst = worst.max((next[w] - self.matrix[(w, u)]).abs());
            }
        }
        worst
    }
}

/// `E(w) = p(+w) - p(-w)`.
pub fn forms_of(probs: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(probs.len() / 2, |w, _| probs[2 * w] - probs[2 * w + 1])
}

#[derive(Debug, Clone)]
pub struct ExpectationProcess {
    pub start: OrientedState,
    /// `E_n` for `n = 0..=steps`.
    pub forms: Vec<DVector<f64>>,
    /// `p_n` over the `2N` oriented states.
    pub probabilities: Vec<DVector<f64>>,
}

fn start_state(table: &SignedNeighborTable, start: &OrientedState) -> Result<usize> {
    if start.sign != 1 && start.sign != -1 {
        return Err(Error::InvalidArgument(format!("orientation must be ±1, got {}", start.sign)));
    }
    table.index_of(&start.path).ok_or_else(|| Error::NotAllowed { path: start.path.0.clone(), dim: table.d })
}

/// Exact kernel iteration for `p_n`, with `E_n` taken from the probabilities.
pub fn expectation_exact(
    table: &SignedNeighborTable,
    start: &OrientedState,
    steps: usize,
    laziness: f64,
) -> Result<ExpectationProcess> {
    let v = start_state(table, start)?;
    let op = transition_matrix(table, laziness)?;
    let mut p = DVector::zeros(2 * table.len());
    p[state_index(v, start.sign)] = 1.0;
    let mut probabilities = vec![p];
    for _ in 0..steps {
        let next = op.step(probabilities.last().unwrap());
        probabilities.push(next);
    }
    let forms = probabilities.iter().map(forms_of).collect();
    Ok(ExpectationProcess { start: start.clone(), forms, probabilities })
}

/// `A^n 𝟙_v` for `n = 0..=steps`.
pub fn expectation_by_powers(
    table: &SignedNeighborTable,
    start: &OrientedState,
    steps: usize,
    laziness: f64,
) -> Result<Vec<DVector<f64>>> {
    let v = start_state(table, start)?;
    let op = transition_matrix(table, laziness)?;
    let mut e = DVector::zeros(table.len());
    e[v] = start.sign as f64;
    let mut out = vec![e];
    for _ in 0..steps {
        let next = &op.matrix * out.last().unwrap();
        out.push(next);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct MonteCarloEstimate {
    pub samples: usize,
    pub seed: u64,
    pub probabilities: Vec<DVector<f64>>,
    /// `√(q(1-q)/samples)` per state.
    pub stderr: Vec<DVector<f64>>,
    pub forms: Vec<DVector<f64>>,
}

/// Empirical state frequencies from `samples` independent walks. Walk `i`
/// draws from stream `i` of a ChaCha8 generator seeded with `seed`, so the
/// result does not depend on `threads`.
pub fn expectation_mc(
    table: &SignedNeighborTable,
    start: &OrientedState,
    steps: usize,
    laziness: f64,
    samples: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<MonteCarloEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let v = start_state(table, start)?;
    transition_matrix(table, laziness)?;
    let states = 2 * table.len();
    let walk = |i: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mut visits = Vec::with_capacity(steps + 1);
        let (mut path, mut sign) = (v, start.sign);
        visits.push(state_index(path, sign));
        for _ in 0..steps {
            if !rng.gen_bool(laziness) {
                let es = &table.entries[path];
                let e = es[rng.gen_range(0..es.len())];
                path = e.target;
                sign *= e.sign;
            }
            visits.push(state_index(path, sign));
        }
        visits
    };
    let count = || {
        (0..samples)
            .into_par_iter()
            .fold(
                || vec![0u64; (steps + 1) * states],
                |mut acc, i| {
                    for (n, s) in walk(i).into_iter().enumerate() {
                        acc[n * states + s] += 1;
                    }
                    acc
                },
            )
            .reduce(
                || vec![0u64; (steps + 1) * states],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            )
    };
    let counts = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(count),
        None => count(),
    };
    let s = samples as f64;
    let probabilities: Vec<DVector<f64>> =
        (0..=steps).map(|n| DVector::from_fn(states, |j, _| counts[n * states + j] as f64 / s)).collect();
    let stderr = probabilities.iter().map(|p| p.map(|q| (q * (1.0 - q) / s).sqrt())).collect();
    let forms = probabilities.iter().map(forms_of).collect();
    Ok(MonteCarloEstimate { samples, seed, probabilities, stderr, forms })
}

/// `ω`-orthogonal projector onto `ker Δ⁺` and the spectrum of `A` off the kernel.
fn kernel_split(table: &SignedNeighborTable, tol: &Tolerances) -> (DMatrix<f64>, DVector<f64>, DMatrix<f64>) {
    let s = symmetric_form(table, &upper_laplacian(table));
    let eig = linalg::sym_eigen(&s);
    let thr = tol.zero_eig_rel * eig.values.iter().copied().fold(1.0, f64::max);
    let k = eig.values.iter().filter(|&&l| l <= thr).count();
    let kernel = eig.vectors.columns(0, k).into_owned();
    (
        kernel,
        eig.values.rows(k, eig.values.len() - k).into_owned(),
        eig.vectors.columns(k, eig.values.len() - k).into_owned(),
    )
}

#[derive(Debug, Clone)]
pub struct ExpectationLimit {
    /// `proj_{ker Δ⁺} 𝟙_v` in the `ω` metric.
    pub limit: DVector<f64>,
    /// Largest `|1 - (1-p)λ|` over non-zero eigenvalues `λ` of `Δ⁺`.
    pub rate: f64,
}

pub fn expectation_limit(
    table: &SignedNeighborTable,
    start: &OrientedState,
    laziness: f64,
) -> Result<ExpectationLimit> {
    let v = start_state(table, start)?;
    transition_matrix(table, laziness)?;
    let (kernel, nonzero, _) = kernel_split(table, &Tolerances::default());
    let mut rate = 0.0f64;
    for &l in nonzero.iter() {
        let mu = 1.0 - (1.0 - laziness) * l;
        if mu.abs() >= 1.0 - 1e-12 {
            return Err(Error::NonConvergent(mu));
        }
        rate = rate.max(mu.abs());
    }
    let w = table.metric().weights();
    let mut e = DVector::zeros(table.len());
    e[v] = start.sign as f64;
    let scaled = DVector::from_fn(e.len(), |i, _| e[i] * w[i].sqrt());
    let proj = linalg::project(&kernel, &scaled);
    let limit = DVector::from_fn(e.len(), |i, _| proj[i] / w[i].sqrt());
    Ok(ExpectationLimit { limit, rate })
}

/// Off-diagonal blocks of `A` with respect to `ker Δ⁺ ⊕ im Δ⁺`.
pub fn block_residual(table: &SignedNeighborTable, laziness: f64) -> Result<f64> {
    let op = transition_matrix(table, laziness)?;
    let (kernel, _, range) = kernel_split(table, &Tolerances::default());
    let a = symmetric_form(table, &op.matrix);
    if kernel.ncols() == 0 || range.ncols() == 0 {
        return Ok(0.0);
    }
    Ok(linalg::op_norm(&(kernel.transpose() * a * range)))
}

/// `max(|p - M(1-p)|^n, 1)`.
pub fn norm_upper_bound(max_valence: usize, laziness: f64, n: usize) -> f64 {
    (laziness - max_valence as f64 * (1.0 - laziness)).abs().powi(n as i32).max(1.0)
}

/// `M/(M+1) + 0.01`, capped at 1: keeps `p - M(1-p)` positive so `A^n` converges.
pub fn default_laziness(max_valence: usize) -> f64 {
    let m = max_valence as f64;
    (m / (m + 1.0) + 0.01).min(1.0)
}

/// The lower-bound construction `f = d_ω 𝟙_u` for a face `u` of `v`.
#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundWitness {
    pub face: ElementaryPath,
    /// `|⟨f/‖f‖, 𝟙_v⟩_ω|`, a lower bound for every `‖E_n^v‖_ω`.
    pub bound: f64,
    /// `⌈‖f‖²_ω⌉`.
    pub k: u64,
}

/// Tries every face of the start path and keeps the best witness for which
/// `f` is a non-zero element of `ker Δ⁺`. `None` when no face qualifies.
pub fn lower_bound_witness(
    g: &Digraph,
    table: &SignedNeighborTable,
    start: &OrientedState,
) -> Result<Option<LowerBoundWitness>> {
    let v = start_state(table, start)?;
    let metric = table.metric();
    let faces = PathBasis::allowed(g, table.d - 1);
    let dw = weighted_d_between(&metric, &faces, &table.basis);
    let lap = upper_laplacian(table);
    let path = table.path(v);
    let mut best: Option<LowerBoundWitness> = None;
    for q in 0..=table.d {
        let u = path.omit(q);
        let Some(ui) = faces.index_of(&u.0) else { continue };
        let mut ind = vec![0.0; faces.len()];
        ind[ui] = 1.0;
        let f = DVector::from_vec(dw.mul_vec(&ind));
        let norm = metric.norm(&f);
        if norm == 0.0 || metric.norm(&(&lap * &f)) > 1e-9 * norm {
            continue;
        }
        let bound = (f[v] * metric.weights()[v]).abs() / norm;
        if best.as_ref().is_none_or(|b| bound > b.bound) {
            best = Some(LowerBoundWitness { face: u, bound, k: (norm * norm).ceil() as u64 });
        }
    }
    Ok(best)
}

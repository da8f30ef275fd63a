//! Exact rational recomputation of the dimensions reported by the float
//! pipeline. Paths are enumerated by brute force over every vertex tuple and
//! every subspace is cut out by exact row reduction, so nothing here shares
//! code with the SVD-based path.

use std::collections::{BTreeMap, HashMap};

use num::{BigRational, One, Zero};
use serde::Serialize;

use crate::complex::PathComplex;
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::hodge::LaplacianBundle;

type Q = BigRational;
type Row = BTreeMap<usize, Q>;

/// Largest instance the oracle accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleCap {
    pub max_vertices: usize,
    pub max_dim: usize,
}

impl Default for OracleCap {
    fn default() -> Self {
        OracleCap { max_vertices: 6, max_dim: 3 }
    }
}

/// Reduced row echelon form, grown one row at a time.
#[derive(Debug, Default)]
struct Echelon {
    /// Pivot column → row with a unit pivot and zeros in every other pivot column.
    pivots: BTreeMap<usize, Row>,
}

fn axpy(row: &mut Row, scale: &Q, other: &Row) {
    for (&c, v) in other {
        let e = row.entry(c).or_insert_with(Q::zero);
        *e -= scale * v;
        if e.is_zero() {
            row.remove(&c);
        }
    }
}

impl Echelon {
    fn insert(&mut self, mut row: Row) {
        row.retain(|_, v| !v.is_zero());
        let hits: Vec<usize> = row.keys().copied().filter(|c| self.pivots.contains_key(c)).collect();
        for c in hits {
            if let Some(v) = row.get(&c).cloned() {
                axpy(&mut row, &v, &self.pivots[&c]);
            }
        }
        let Some((&pc, pv)) = row.iter().next() else { return };
        let inv = pv.recip();
        for v in row.values_mut() {
            *v *= &inv;
        }
        for other in self.pivots.values_mut() {
            if let Some(v) = other.get(&pc).cloned() {
                axpy(other, &v, &row);
            }
        }
        self.pivots.insert(pc, row);
    }

    fn extend(&mut self, rows: impl IntoIterator<Item = Row>) {
        for r in rows {
            self.insert(r);
        }
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Dense basis of the right kernel in `cols` unknowns.
    fn kernel(&self, cols: usize) -> Vec<Vec<Q>> {
        (0..cols)
            .filter(|c| !self.pivots.contains_key(c))
            .map(|free| {
                let mut x = vec![Q::zero(); cols];
                x[free] = Q::one();
                for (&pc, row) in &self.pivots {
                    if let Some(v) = row.get(&free) {
                        x[pc] = -v.clone();
                    }
                }
                x
            })
            .collect()
    }
}

fn alt(q: usize) -> Q {
    if q.is_multiple_of(2) {
        Q::one()
    } else {
        -Q::one()
    }
}

fn tuples(n: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(len as u32);
    (0..total).map(move |mut code| {
        let mut t = vec![0; len];
        for slot in t.iter_mut().rev() {
            *slot = code % n;
            code /= n;
        }
        t
    })
}

fn omit(t: &[usize], q: usize) -> Vec<usize> {
    let mut v = t.to_vec();
    v.remove(q);
    v
}

fn insert(t: &[usize], q: usize, k: usize) -> Vec<usize> {
    let mut v = t.to_vec();
    v.insert(q, k);
    v
}

struct Level {
    paths: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

struct Oracle<'g> {
    g: &'g Digraph,
    n: usize,
    /// `levels[p]` holds the allowed `p`-paths.
    levels: Vec<Level>,
}

impl<'g> Oracle<'g> {
    fn new(g: &'g Digraph, top: usize) -> Self {
        let n = g.n_vertices();
        let levels = (0..=top)
            .map(|p| {
                let paths: Vec<Vec<usize>> = tuples(n, p + 1).filter(|t| Self::allowed(g, t)).collect();
                let index = paths.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
                Level { paths, index }
            })
            .collect();
        Oracle { g, n, levels }
    }

    fn allowed(g: &Digraph, t: &[usize]) -> bool {
        t.windows(2).all(|w| g.has_edge(w[0], w[1]))
    }

    /// `(d f)(z)` for a `(p+1)`-tuple `z`, as a row over allowed `p`-paths.
    fn d_row(&self, p: usize, z: &[usize]) -> Row {
        let mut row = Row::new();
        for r in 0..z.len() {
            if let Some(&j) = self.levels[p].index.get(&omit(z, r)) {
                *row.entry(j).or_insert_with(Q::zero) += alt(r);
            }
        }
        row
    }

    /// `(∂ f)(u)` for a `(p-1)`-tuple `u`, insertion form, over allowed `p`-paths.
    fn insertion_row(&self, p: usize, u: &[usize]) -> Row {
        let mut row = Row::new();
        for k in 0..self.n {
            for q in 0..=u.len() {
                if let Some(&j) = self.levels[p].index.get(&insert(u, q, k)) {
                    *row.entry(j).or_insert_with(Q::zero) += alt(q);
                }
            }
        }
        row
    }

    fn omega_rows(&self, p: usize) -> Vec<Row> {
        let mut rows: Vec<Row> =
            tuples(self.n, p + 2).filter(|z| !Self::allowed(self.g, z)).map(|z| self.d_row(p, &z)).collect();
        if p >= 1 {
            rows.extend(tuples(self.n, p).filter(|u| !Self::allowed(self.g, u)).map(|u| self.insertion_row(p, &u)));
        }
        rows
    }

    /// `(∂ d f)(u)` at every non-allowed `p`-tuple `u`.
    fn closure_rows(&self, p: usize) -> Vec<Row> {
        tuples(self.n, p + 1)
            .filter(|u| !Self::allowed(self.g, u))
            .map(|u| {
                let mut row = Row::new();
                for k in 0..self.n {
                    for q in 0..=u.len() {
                        let z = insert(&u, q, k);
                        for (j, v) in self.d_row(p, &z) {
                            *row.entry(j).or_insert_with(Q::zero) += alt(q) * v;
                        }
                    }
                }
                row
            })
            .collect()
    }

    fn d_rows(&self, p: usize) -> Vec<Row> {
        tuples(self.n, p + 2).map(|z| self.d_row(p, &z)).collect()
    }

    /// `d g` restricted to allowed `p`-paths, for `g` over allowed `(p-1)`-paths.
    fn apply_d(&self, p: usize, g: &[Q]) -> Row {
        let mut out = Row::new();
        for (i, x) in self.levels[p].paths.iter().enumerate() {
            let mut acc = Q::zero();
            for r in 0..x.len() {
                if let Some(&j) = self.levels[p - 1].index.get(&omit(x, r)) {
                    acc += alt(r) * &g[j];
                }
            }
            if !acc.is_zero() {
                out.insert(i, acc);
            }
        }
        out
    }

    /// Omission boundary of a chain on allowed `p`-paths, over all `(p-1)`-tuples.
    fn omission_boundary(&self, p: usize, v: &[Q]) -> Row {
        let mut out = Row::new();
        for (i, z) in self.levels[p].paths.iter().enumerate() {
            if v[i].is_zero() {
                continue;
            }
            for q in 0..z.len() {
                let u = omit(z, q);
                let code = u.iter().fold(0, |a, &x| a * self.n + x);
                let e = out.entry(code).or_insert_with(Q::zero);
                *e += alt(q) * &v[i];
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Chains on allowed `p`-paths whose boundary stays allowed.
    fn chain_omega(&self, p: usize) -> Vec<Vec<Q>> {
        let mut rows: BTreeMap<Vec<usize>, Row> = BTreeMap::new();
        if p >= 1 {
            for (i, z) in self.levels[p].paths.iter().enumerate() {
                for q in 0..z.len() {
                    let u = omit(z, q);
                    if !Self::allowed(self.g, &u) {
                        *rows.entry(u).or_default().entry(i).or_insert_with(Q::zero) += alt(q);
                    }
                }
            }
        }
        let mut e = Echelon::default();
        e.extend(rows.into_values());
        e.kernel(self.levels[p].paths.len())
    }
}

/// Dimensions recomputed in exact arithmetic for `p ≤ top`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactDims {
    pub allowed: Vec<usize>,
    pub omega: Vec<usize>,
    /// `dim D^p`, the forms whose differential stays in `Ω^{p+1}`.
    pub closed_domain: Vec<usize>,
    pub cohomology: Vec<usize>,
    pub harmonic: Vec<usize>,
    pub chain_omega: Vec<usize>,
    pub betti: Vec<usize>,
}

pub fn check_cap(g: &Digraph, top: usize, cap: OracleCap) -> Result<()> {
    if g.n_vertices() > cap.max_vertices || top > cap.max_dim {
        return Err(Error::OracleCap(format!(
            "n = {}, p = {} exceeds n ≤ {}, p ≤ {}",
            g.n_vertices(),
            top,
            cap.max_vertices,
            cap.max_dim
        )));
    }
    Ok(())
}

pub fn exact_dims(g: &Digraph, top: usize) -> Result<ExactDims> {
    exact_dims_capped(g, top, OracleCap::default())
}

pub fn exact_dims_capped(g: &Digraph, top: usize, cap: OracleCap) -> Result<ExactDims> {
    check_cap(g, top, cap)?;
    let o = Oracle::new(g, top + 1);
    let len = |p: usize| o.levels[p].paths.len();
    let mut out = ExactDims {
        allowed: vec![],
        omega: vec![],
        closed_domain: vec![],
        cohomology: vec![],
        harmonic: vec![],
        chain_omega: vec![],
        betti: vec![],
    };
    // D^{p-1} basis and rank of d on it, carried between degrees.
    let mut prev_domain: Vec<Vec<Q>> = Vec::new();
    let mut prev_rank = 0usize;
    for p in 0..=top {
        let mut omega = Echelon::default();
        omega.extend(o.omega_rows(p));
        let mut domain = Echelon { pivots: omega.pivots.clone() };
        domain.extend(o.closure_rows(p));
        let mut cycles = Echelon { pivots: domain.pivots.clone() };
        cycles.extend(o.d_rows(p));
        let dim_domain = len(p) - domain.rank();
        let nullity = len(p) - cycles.rank();
        let mut harmonic = Echelon { pivots: omega.pivots.clone() };
        harmonic.extend(o.d_rows(p));
        if p >= 1 {
            harmonic.extend(prev_domain.iter().map(|g| o.apply_d(p, g)));
        }
        out.allowed.push(len(p));
        out.omega.push(len(p) - omega.rank());
        out.closed_domain.push(dim_domain);
        out.cohomology.push(nullity - prev_rank);
        out.harmonic.push(len(p) - harmonic.rank());
        prev_rank = dim_domain - nullity;
        prev_domain = domain.kernel(len(p));
    }
    let chains: Vec<Vec<Vec<Q>>> = (0..=top + 1).map(|p| o.chain_omega(p)).collect();
    let boundary_rank = |p: usize| {
        if p == 0 {
            return 0;
        }
        let mut e = Echelon::default();
        e.extend(chains[p].iter().map(|v| o.omission_boundary(p, v)));
        e.rank()
    };
    let ranks: Vec<usize> = (0..=top + 1).map(boundary_rank).collect();
    for p in 0..=top {
        out.chain_omega.push(chains[p].len());
        out.betti.push(chains[p].len() - ranks[p] - ranks[p + 1]);
    }
    Ok(out)
}

/// One exact-versus-float comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimCheck {
    pub quantity: &'static str,
    pub p: usize,
    pub exact: usize,
    pub float: usize,
}

impl DimCheck {
    pub fn matches(&self) -> bool {
        self.exact == self.float
    }
}

/// Float dimensions for the same quantities as [`ExactDims`].
pub fn float_dims(g: &Digraph, top: usize) -> ExactDims {
    let cx = PathComplex::new(g, top);
    let chain = crate::complex::chain_homology(g, top);
    ExactDims {
        allowed: (0..=top).map(|p| cx.allowed_basis(p).len()).collect(),
        omega: (0..=top).map(|p| cx.omega(p).dim()).collect(),
        closed_domain: (0..=top).map(|p| cx.restricted_d(p).domain.dim()).collect(),
        cohomology: cx.cohomology_dims(),
        harmonic: (0..=top).map(|p| LaplacianBundle::new(&cx, p).spectral.kernel_dim()).collect(),
        chain_omega: chain.omega_dims[..=top].to_vec(),
        betti: chain.betti,
    }
}

pub fn compare(exact: &ExactDims, float: &ExactDims) -> Vec<DimCheck> {
    let fields: [(&'static str, &Vec<usize>, &Vec<usize>); 7] = [
        ("allowed", &exact.allowed, &float.allowed),
        ("omega", &exact.omega, &float.omega),
        ("closed_domain", &exact.closed_domain, &float.closed_domain),
        ("cohomology", &exact.cohomology, &float.cohomology),
        ("harmonic", &exact.harmonic, &float.harmonic),
        ("chain_omega", &exact.chain_omega, &float.chain_omega),
        ("betti", &exact.betti, &float.betti),
    ];
    let mut out = Vec::new();
    for (quantity, e, f) in fields {
        for (p, (&a, &b)) in e.iter().zip(f.iter()).enumerate() {
            out.push(DimCheck { quantity, p, exact: a, float: b });
        }
    }
    out
}

/// Exact rank of an integer matrix given as dense rows.
pub fn exact_rank(rows: &[Vec<i64>]) -> usize {
    let mut e = Echelon::default();
    for r in rows {
        e.insert(
            r.iter().enumerate().filter(|(_, v)| **v != 0).map(|(c, &v)| (c, Q::from_integer(v.into()))).collect(),
        );
    }
    e.rank()
}

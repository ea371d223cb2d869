//! Reference implementations used only by tests. Each one is written
//! independently of the library code it checks.
#![allow(dead_code)]

use std::collections::HashMap;

use newstrust::graph::{EdgeSpec, NodeAttrs, TrustGraph};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;

// ---------------------------------------------------------------- graphs

pub fn node_name(i: usize) -> String {
    format!("n{i:04}")
}

/// Erdős–Rényi digraph on `n` nodes, no self-loops, unit weights.
pub fn er_digraph(n: usize, p: f64, seed: u64) -> Vec<EdgeSpec> {
    let mut rng = Pcg64::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(p) {
                edges.push(EdgeSpec::new(node_name(i), node_name(j)));
            }
        }
    }
    edges
}

/// Random digraph with random positive weights; guarantees at least one edge.
pub fn weighted_digraph(n: usize, p: f64, seed: u64) -> Vec<EdgeSpec> {
    let mut rng = Pcg64::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(p) {
                let w = rng.random_range(0.1..3.0);
                edges.push(EdgeSpec::weighted(node_name(i), node_name(j), w));
            }
        }
    }
    if edges.is_empty() {
        edges.push(EdgeSpec::new(node_name(0), node_name(n - 1)));
    }
    edges
}

/// Strongly connected: a Hamiltonian cycle through a random permutation
/// plus Erdős–Rényi chords.
pub fn strongly_connected(n: usize, p: f64, seed: u64) -> Vec<EdgeSpec> {
    let mut rng = Pcg64::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    let mut seen = std::collections::HashSet::new();
    let mut edges = Vec::new();
    for k in 0..n {
        let (a, b) = (perm[k], perm[(k + 1) % n]);
        seen.insert((a, b));
        edges.push(EdgeSpec::new(node_name(a), node_name(b)));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(p) && seen.insert((i, j)) {
                edges.push(EdgeSpec::new(node_name(i), node_name(j)));
            }
        }
    }
    edges
}

pub fn build(edges: &[EdgeSpec]) -> TrustGraph {
    TrustGraph::build(edges, &[]).expect("valid test graph")
}

/// B→A, C→A, D→A, E→B, E→C, E→D.
pub fn four_node_edges() -> Vec<EdgeSpec> {
    [
        ("B", "A"),
        ("C", "A"),
        ("D", "A"),
        ("E", "B"),
        ("E", "C"),
        ("E", "D"),
    ]
    .into_iter()
    .map(|(s, d)| EdgeSpec::new(s, d))
    .collect()
}

pub fn news_nodes(ids: &[(&str, u64)]) -> Vec<NodeAttrs> {
    ids.iter()
        .map(|(id, f)| NodeAttrs::news_org(*id, *f))
        .collect()
}

// ---------------------------------------------------------------- TSM

/// Literal double-loop transcription of the score update: for every node,
/// scan the full edge list for its out-edges (trustingness) and in-edges
/// (trustworthiness), using only the previous iteration's values, then
/// divide each vector by its sum.
pub struct NaiveTsm {
    pub ids: Vec<String>,
    pub ti: HashMap<String, f64>,
    pub tw: HashMap<String, f64>,
    edges: Vec<(String, String, f64)>,
    s: f64,
}

impl NaiveTsm {
    pub fn new(edges: &[EdgeSpec], s: f64) -> Self {
        let mut ids: Vec<String> = edges
            .iter()
            .flat_map(|e| [e.src.clone(), e.dst.clone()])
            .collect();
        ids.sort();
        ids.dedup();
        let ti = ids.iter().map(|v| (v.clone(), 1.0)).collect();
        let tw = ids.iter().map(|v| (v.clone(), 1.0)).collect();
        Self {
            ids,
            ti,
            tw,
            edges: edges
                .iter()
                .map(|e| (e.src.clone(), e.dst.clone(), e.weight.unwrap_or(1.0)))
                .collect(),
            s,
        }
    }

    pub fn set_initial_trustingness(&mut self, id: &str, value: f64) {
        self.ti.insert(id.to_owned(), value);
    }

    fn pow(&self, x: f64) -> f64 {
        if x == 0.0 {
            0.0
        } else {
            x.powf(self.s)
        }
    }

    /// One update; returns the max absolute change.
    pub fn step(&mut self) -> f64 {
        let mut new_ti = HashMap::new();
        let mut new_tw = HashMap::new();
        for v in &self.ids {
            let mut ti = 0.0;
            let mut tw = 0.0;
            for (src, dst, w) in &self.edges {
                if src == v {
                    ti += w / (1.0 + self.pow(self.tw[dst]));
                }
                if dst == v {
                    tw += w / (1.0 + self.pow(self.ti[src]));
                }
            }
            new_ti.insert(v.clone(), ti);
            new_tw.insert(v.clone(), tw);
        }
        let sum_ti: f64 = self.ids.iter().map(|v| new_ti[v]).sum();
        let sum_tw: f64 = self.ids.iter().map(|v| new_tw[v]).sum();
        let mut change: f64 = 0.0;
        for v in &self.ids {
            let a = new_ti[v] / sum_ti;
            let b = new_tw[v] / sum_tw;
            change = change
                .max((a - self.ti[v]).abs())
                .max((b - self.tw[v]).abs());
            self.ti.insert(v.clone(), a);
            self.tw.insert(v.clone(), b);
        }
        change
    }

    pub fn argmax_tw(&self) -> &str {
        let mut best = &self.ids[0];
        for v in &self.ids {
            if self.tw[v] > self.tw[best] {
                best = v;
            }
        }
        best
    }
}

// ---------------------------------------------------------------- OLS

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().expect("representable")
}

/// Solves `a x = b` exactly by Gauss–Jordan elimination.
fn solve_exact(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Vec<BigRational> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("nonsingular system");
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = BigRational::one() / a[col][col].clone();
        for x in &mut a[col][col..] {
            *x = &*x * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, p) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= &f * p;
                }
                let t = &f * &b[col];
                b[r] -= t;
            }
        }
    }
    b
}

/// Least-squares fit computed from the normal equations in exact rational
/// arithmetic; only the final statistics are rounded to `f64`.
#[derive(Debug, Clone)]
pub struct OracleFit {
    pub intercept: f64,
    pub b: Vec<f64>,
    pub std_error: Vec<f64>,
    pub t: Vec<f64>,
    pub beta: Vec<f64>,
    pub r_squared: f64,
    pub adjusted_r_squared: f64,
    pub f_stat: f64,
    pub df_model: usize,
    pub df_resid: usize,
    pub rss: f64,
}

pub fn oracle_ols(xs: &[Vec<f64>], y: &[f64]) -> OracleFit {
    let n = y.len();
    let p = xs.len();
    let k = p + 1;
    // design row: [1, x1, ..., xp]
    let rows: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            std::iter::once(BigRational::one())
                .chain(xs.iter().map(|c| rat(c[i])))
                .collect()
        })
        .collect();
    let yr: Vec<BigRational> = y.iter().map(|v| rat(*v)).collect();
    let mut xtx = vec![vec![BigRational::zero(); k]; k];
    let mut xty = vec![BigRational::zero(); k];
    for (row, yi) in rows.iter().zip(&yr) {
        for a in 0..k {
            xty[a] += &row[a] * yi;
            for b in 0..k {
                xtx[a][b] += &row[a] * &row[b];
            }
        }
    }
    let coef = solve_exact(xtx.clone(), xty);

    let nr = BigRational::from_integer(BigInt::from(n));
    let ybar = yr.iter().fold(BigRational::zero(), |s, v| s + v) / &nr;
    let mut rss = BigRational::zero();
    let mut tss = BigRational::zero();
    for (row, yi) in rows.iter().zip(&yr) {
        let fit = row
            .iter()
            .zip(&coef)
            .fold(BigRational::zero(), |s, (x, c)| s + x * c);
        let e = yi - fit;
        rss += &e * &e;
        let d = yi - &ybar;
        tss += &d * &d;
    }
    let df_resid = n - k;
    let sigma2 = &rss / BigRational::from_integer(BigInt::from(df_resid));
    let mut se = Vec::with_capacity(p);
    for j in 1..k {
        let mut unit = vec![BigRational::zero(); k];
        unit[j] = BigRational::one();
        let col = solve_exact(xtx.clone(), unit);
        se.push(to_f64(&(&sigma2 * &col[j])).sqrt());
    }
    let r2 = BigRational::one() - &rss / &tss;
    let adj = BigRational::one()
        - (BigRational::one() - &r2) * BigRational::from_integer(BigInt::from(n - 1))
            / BigRational::from_integer(BigInt::from(df_resid));
    let f = ((&tss - &rss) / BigRational::from_integer(BigInt::from(p))) / &sigma2;

    let sd = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    };
    let b: Vec<f64> = coef[1..].iter().map(to_f64).collect();
    let sy = sd(y);
    let beta = b.iter().zip(xs).map(|(bj, x)| bj * sd(x) / sy).collect();
    let t = b.iter().zip(&se).map(|(bj, s)| bj / s).collect();
    OracleFit {
        intercept: to_f64(&coef[0]),
        b,
        std_error: se,
        t,
        beta,
        r_squared: to_f64(&r2),
        adjusted_r_squared: to_f64(&adj),
        f_stat: to_f64(&f),
        df_model: p,
        df_resid,
        rss: to_f64(&rss.abs()),
    }
}

// ---------------------------------------------------------------- p-values

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    ((b - a) / 6.0 * (f(a) + 4.0 * fm + f(b)), fm)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    let (whole, fm) = simpson(f, a, b);
    adaptive(f, a, b, f(a), fm, f(b), whole, tol, 48)
}

const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;

/// Two-sided Student-t tail by quadrature. With `x = tan θ` the density
/// kernel becomes bounded on `[0, π/2]`; the normalizing constant is the
/// same integral over the full range.
pub fn t_p_quadrature(t: f64, df: f64) -> f64 {
    let g = move |th: f64| {
        let c = th.cos();
        if c <= 0.0 {
            return 0.0;
        }
        let x = th.tan();
        (1.0 + x * x / df).powf(-(df + 1.0) / 2.0) / (c * c)
    };
    let total = integrate(&g, 0.0, HALF_PI, 1e-15);
    let tail = integrate(&g, t.abs().atan(), HALF_PI, 1e-15);
    (tail / total).min(1.0)
}

/// Upper F tail by quadrature, after `x = y²` (removes the singularity at
/// zero when `d1 = 1`) and then `y = tan θ`.
pub fn f_p_quadrature(f: f64, d1: f64, d2: f64) -> f64 {
    let g = move |th: f64| {
        let c = th.cos();
        if c <= 0.0 {
            return 0.0;
        }
        let y = th.tan();
        2.0 * y.powf(d1 - 1.0) * (1.0 + d1 / d2 * y * y).powf(-(d1 + d2) / 2.0) / (c * c)
    };
    let total = integrate(&g, 0.0, HALF_PI, 1e-15);
    let tail = integrate(&g, f.max(0.0).sqrt().atan(), HALF_PI, 1e-15);
    (tail / total).min(1.0)
}

// ---------------------------------------------------------------- data

pub fn normal(rng: &mut Pcg64) -> f64 {
    // Box–Muller
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// `p` standard-normal predictors and `y = 1 + Σ c_j x_j + noise`.
pub fn random_dataset(n: usize, p: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let mut rng = Pcg64::seed_from_u64(seed);
    let xs: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..n).map(|_| normal(&mut rng)).collect())
        .collect();
    let coefs: Vec<f64> = (0..p).map(|_| rng.random_range(-2.0..2.0)).collect();
    let y = (0..n)
        .map(|i| 1.0 + (0..p).map(|j| coefs[j] * xs[j][i]).sum::<f64>() + normal(&mut rng))
        .collect();
    (xs, y, coefs)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

//! Independent reference computations used by the integration and
//! acceptance tests. None of them calls the library's simplex solver.
#![allow(dead_code)]

use drocc::geometry::SampleSet;
use drocc::metrics::DiscreteDistribution;

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..n {
                        a[r][c] -= f * a[col][c];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Maximum of `c . x` over `{x >= 0, a_eq x = b_eq, a_ub x <= b_ub}` by
/// enumerating basic solutions. Returns `None` when no vertex is feasible.
/// Only meant for a handful of variables; the polytope must be bounded.
pub fn vertex_enum_max(
    c: &[f64],
    a_eq: &[Vec<f64>],
    b_eq: &[f64],
    a_ub: &[Vec<f64>],
    b_ub: &[f64],
) -> Option<(f64, Vec<f64>)> {
    let n = c.len();
    // Candidate active constraints: inequality rows then x_i >= 0.
    let mut rows: Vec<(Vec<f64>, f64)> = a_ub.iter().cloned().zip(b_ub.iter().copied()).collect();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        rows.push((e, 0.0));
    }
    let tol = 1e-9;
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |x: Vec<f64>| {
        if x.iter().any(|&v| v < -tol) {
            return;
        }
        for (r, &rhs) in a_eq.iter().zip(b_eq) {
            let lhs: f64 = r.iter().zip(&x).map(|(a, b)| a * b).sum();
            if (lhs - rhs).abs() > 1e-8 {
                return;
            }
        }
        for (r, &rhs) in a_ub.iter().zip(b_ub) {
            let lhs: f64 = r.iter().zip(&x).map(|(a, b)| a * b).sum();
            if lhs > rhs + 1e-8 {
                return;
            }
        }
        let v: f64 = c.iter().zip(&x).map(|(a, b)| a * b).sum();
        if best.as_ref().map_or(true, |(bv, _)| v > *bv) {
            best = Some((v, x));
        }
    };
    // Equality rows must be linearly independent.
    let k = n.saturating_sub(a_eq.len());
    for act in combinations(rows.len(), k) {
        let mut a: Vec<Vec<f64>> = a_eq.to_vec();
        let mut b: Vec<f64> = b_eq.to_vec();
        for &r in &act {
            a.push(rows[r].0.clone());
            b.push(rows[r].1);
        }
        if let Some(x) = solve_linear(a, b) {
            consider(x);
        }
    }
    best
}

/// Order-1 Wasserstein distance on the real line: the area between CDFs.
pub fn w1_line(p: &DiscreteDistribution<f64>, q: &DiscreteDistribution<f64>) -> f64 {
    let mut events: Vec<(f64, f64)> = p
        .atoms
        .iter()
        .zip(&p.weights)
        .map(|(a, &w)| (a[0], w))
        .chain(q.atoms.iter().zip(&q.weights).map(|(a, &w)| (a[0], -w)))
        .collect();
    events.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut diff = 0.0;
    let mut total = 0.0;
    for w in events.windows(2) {
        diff += w[0].1;
        total += diff.abs() * (w[1].0 - w[0].0);
    }
    total
}

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Minimal transport cost between two 3-atom distributions: a grid over the
/// four free plan entries (step `step`), then the exact minimum over the
/// vertices of the transport polytope reached from the grid optimum.
pub fn transport_3x3_bruteforce(p: &DiscreteDistribution<f64>, q: &DiscreteDistribution<f64>, step: f64) -> f64 {
    let a = &p.weights;
    let b = &q.weights;
    let c: Vec<Vec<f64>> = p
        .atoms
        .iter()
        .map(|x| q.atoms.iter().map(|y| euclid(x, y)).collect())
        .collect();
    let cost = |pi: &[[f64; 3]; 3]| -> f64 { (0..3).map(|i| (0..3).map(|j| pi[i][j] * c[i][j]).sum::<f64>()).sum() };
    let complete = |p11: f64, p12: f64, p21: f64, p22: f64| -> Option<[[f64; 3]; 3]> {
        let p13 = a[0] - p11 - p12;
        let p23 = a[1] - p21 - p22;
        let p31 = b[0] - p11 - p21;
        let p32 = b[1] - p12 - p22;
        let p33 = b[2] - p13 - p23;
        let pi = [[p11, p12, p13], [p21, p22, p23], [p31, p32, p33]];
        let ok = pi.iter().flatten().all(|&v| v >= -1e-12);
        ok.then_some(pi)
    };
    let steps = |hi: f64| (0..=((hi / step).floor() as usize)).map(move |k| k as f64 * step);
    let mut best = f64::INFINITY;
    for p11 in steps(a[0].min(b[0])) {
        for p12 in steps((a[0] - p11).min(b[1])) {
            for p21 in steps(a[1].min(b[0] - p11)) {
                for p22 in steps((a[1] - p21).min(b[1] - p12)) {
                    if let Some(pi) = complete(p11, p12, p21, p22) {
                        let v = cost(&pi);
                        if v < best {
                            best = v;
                        }
                    }
                }
            }
        }
    }
    // Polish: vertices of the transport polytope by zero patterns of the four
    // free entries' complements (each vertex has at least four zeros).
    let mut polished = best;
    for zeros in combinations(9, 4) {
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for i in 0..3 {
            let mut r = vec![0.0; 9];
            (0..3).for_each(|j| r[i * 3 + j] = 1.0);
            rows.push(r);
            rhs.push(a[i]);
        }
        for j in 0..2 {
            let mut r = vec![0.0; 9];
            (0..3).for_each(|i| r[i * 3 + j] = 1.0);
            rows.push(r);
            rhs.push(b[j]);
        }
        for &z in &zeros {
            let mut r = vec![0.0; 9];
            r[z] = 1.0;
            rows.push(r);
            rhs.push(0.0);
        }
        if let Some(x) = solve_linear(rows, rhs) {
            if x.iter().all(|&v| v >= -1e-12) {
                let col3: f64 = (0..3).map(|i| x[i * 3 + 2]).sum();
                if (col3 - b[2]).abs() < 1e-9 {
                    let v: f64 = (0..9).map(|k| x[k] * c[k / 3][k % 3]).sum();
                    polished = polished.min(v);
                }
            }
        }
    }
    assert!(best - polished <= 6.0 * step * c.iter().flatten().fold(0.0f64, |m, &v| m.max(v)) + 1e-12);
    polished
}

/// Every probability vector of length `n` on the lattice of spacing `1/steps`.
pub fn for_each_simplex_point(n: usize, steps: usize, mut f: impl FnMut(&[f64])) {
    fn rec(n: usize, left: usize, steps: usize, cur: &mut Vec<f64>, f: &mut dyn FnMut(&[f64])) {
        if cur.len() + 1 == n {
            cur.push(left as f64 / steps as f64);
            f(cur);
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k as f64 / steps as f64);
            rec(n, left - k, steps, cur, f);
            cur.pop();
        }
    }
    rec(n, steps, steps, &mut Vec::new(), &mut f);
}

/// Feasibility test and objective for grid searches over `p`.
pub struct GridProblem<'a> {
    pub values: &'a [f64],
    pub feasible: &'a dyn Fn(&[f64]) -> bool,
}

/// Grid maximum over the simplex at spacing `1/steps`, refined by repeated
/// finer lattices in a window around the best points found so far.
pub fn simplex_grid_max(n: usize, steps: usize, problem: &GridProblem<'_>, refine: bool) -> Option<f64> {
    let value = |p: &[f64]| -> f64 { p.iter().zip(problem.values).map(|(a, b)| a * b).sum() };
    let mut top: Vec<(f64, Vec<f64>)> = Vec::new();
    let keep = 8;
    let push = |v: f64, p: &[f64], top: &mut Vec<(f64, Vec<f64>)>| {
        if top.len() < keep || v > top.last().unwrap().0 {
            top.push((v, p.to_vec()));
            top.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
            top.truncate(keep);
        }
    };
    for_each_simplex_point(n, steps, |p| {
        if (problem.feasible)(p) {
            push(value(p), p, &mut top);
        }
    });
    if top.is_empty() {
        return None;
    }
    if !refine {
        return Some(top[0].0);
    }
    let mut h = 1.0 / steps as f64;
    for _ in 0..4 {
        let width = h;
        h /= 10.0;
        let centers: Vec<Vec<f64>> = top.iter().map(|t| t.1.clone()).collect();
        for center in centers {
            let radius = (2.0 * width / h).round() as i64;
            let mut offsets = vec![-radius; n - 1];
            loop {
                let mut p: Vec<f64> = center[..n - 1]
                    .iter()
                    .zip(&offsets)
                    .map(|(&c, &o)| c + o as f64 * h)
                    .collect();
                let last = 1.0 - p.iter().sum::<f64>();
                if p.iter().all(|&v| v >= -1e-15) && last >= -1e-15 {
                    p.iter_mut().for_each(|v| *v = v.max(0.0));
                    p.push(last.max(0.0));
                    if (problem.feasible)(&p) {
                        push(value(&p), &p, &mut top);
                    }
                }
                let mut k = 0;
                while k < n - 1 {
                    offsets[k] += 1;
                    if offsets[k] <= radius {
                        break;
                    }
                    offsets[k] = -radius;
                    k += 1;
                }
                if k == n - 1 {
                    break;
                }
            }
        }
    }
    Some(top[0].0)
}

/// Worst-case expectation over a Wasserstein-1 ball restricted to the
/// samples, with the discrete chance constraint, by minimizing the convex
/// Lagrangian dual over the budget and chance multipliers with nested golden
/// section searches. Returns `None` when the primal is infeasible, decided by
/// a fractional-knapsack minimum transport cost.
pub fn wasserstein_inner_dual(
    samples: &SampleSet<f64>,
    f: &[f64],
    mask: &[bool],
    nominal: &DiscreteDistribution<f64>,
    radius: f64,
    theta: f64,
) -> Option<f64> {
    let n = samples.len();
    let cost: Vec<Vec<f64>> = samples
        .points
        .iter()
        .map(|x| nominal.atoms.iter().map(|y| euclid(x, y)).collect())
        .collect();
    let need = (1.0 - theta).max(0.0);
    // Minimal budget needed to route `need` mass to feasible samples.
    let mut base = 0.0;
    let mut extras: Vec<(f64, f64)> = Vec::new();
    let mut free_mask = 0.0;
    for (j, &q) in nominal.weights.iter().enumerate() {
        let any = (0..n).map(|i| cost[i][j]).fold(f64::INFINITY, f64::min);
        let to_mask = (0..n)
            .filter(|&i| mask[i])
            .map(|i| cost[i][j])
            .fold(f64::INFINITY, f64::min);
        base += q * any;
        if to_mask <= any {
            free_mask += q;
        } else if to_mask.is_finite() {
            extras.push((to_mask - any, q));
        }
    }
    extras.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut have = free_mask;
    let mut spend = base;
    for (extra, q) in extras {
        if have >= need {
            break;
        }
        let take = q.min(need - have);
        have += take;
        spend += take * extra;
    }
    if have < need - 1e-12 || spend > radius + 1e-12 {
        return None;
    }
    let g = |lambda: f64, eta: f64| -> f64 {
        let mut total = lambda * radius - eta * need;
        for (j, &q) in nominal.weights.iter().enumerate() {
            let best = (0..n)
                .map(|i| f[i] - lambda * cost[i][j] + if mask[i] { eta } else { 0.0 })
                .fold(f64::NEG_INFINITY, f64::max);
            total += q * best;
        }
        total
    };
    let golden = |h: &dyn Fn(f64) -> f64, lo: f64, hi: f64| -> f64 {
        let r = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (lo, hi);
        let mut c = b - r * (b - a);
        let mut d = a + r * (b - a);
        let (mut fc, mut fd) = (h(c), h(d));
        for _ in 0..120 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - r * (b - a);
                fc = h(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + r * (b - a);
                fd = h(d);
            }
        }
        h(0.5 * (a + b)).min(fc).min(fd).min(h(lo))
    };
    let spread = f.iter().fold(0.0f64, |m, &v| m.max(v.abs())) + 1.0;
    let diameter = cost.iter().flatten().fold(0.0f64, |m, &v| m.max(v));
    let lambda_hi = 100.0 * spread / radius.max(1e-6);
    let eta_hi = 100.0 * spread * (1.0 + diameter / radius.max(1e-6));
    let outer = |lambda: f64| golden(&|eta| g(lambda, eta), 0.0, eta_hi);
    Some(golden(&outer, 0.0, lambda_hi))
}

//! Small dense least-squares solvers: minimum-norm, non-negative
//! (Lawson-Hanson active set) and Euclidean projection onto the simplex.

use nalgebra::{DMatrix, DVector};

#[derive(Clone, Debug, PartialEq)]
pub struct MinNormSolution {
    pub x: DVector<f64>,
    pub rank: usize,
    /// True when `rank < ncols`.
    pub rank_deficient: bool,
}

/// Minimum-norm minimizer of `||A x - b||` via the SVD.
pub fn min_norm_lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> MinNormSolution {
    let (m, n) = a.shape();
    if n == 0 {
        return MinNormSolution { x: DVector::zeros(0), rank: 0, rank_deficient: false };
    }
    if m == 0 {
        return MinNormSolution { x: DVector::zeros(n), rank: 0, rank_deficient: true };
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = (m.max(n) as f64) * f64::EPSILON * smax;
    let rank = svd.singular_values.iter().filter(|s| **s > tol).count();
    let x = svd.solve(b, tol).expect("u and v were computed");
    MinNormSolution { x, rank, rank_deficient: rank < n }
}

/// `argmin_{x >= 0} ||A x - b||`.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let scale = a.norm().max(1.0) * b.norm().max(1.0);
    let tol = 10.0 * f64::EPSILON * scale * (n.max(a.nrows()) as f64);
    let max_outer = 3 * n + 10;

    let solve_passive = |passive: &[bool]| -> DVector<f64> {
        let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
        let sub = a.select_columns(&idx);
        let z = min_norm_lstsq(&sub, b).x;
        let mut s = DVector::zeros(n);
        for (k, &j) in idx.iter().enumerate() {
            s[j] = z[k];
        }
        s
    };

    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n).filter(|&j| !passive[j]).max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else { break };
        if w[j] <= tol {
            break;
        }
        passive[j] = true;
        let mut s = solve_passive(&passive);
        let mut inner = 0;
        while (0..n).any(|i| passive[i] && s[i] <= 0.0) && inner < 3 * n {
            inner += 1;
            let alpha = (0..n)
                .filter(|&i| passive[i] && s[i] <= 0.0)
                .map(|i| x[i] / (x[i] - s[i]))
                .fold(f64::INFINITY, f64::min);
            x += (&s - &x) * alpha;
            for i in 0..n {
                if passive[i] && x[i] <= tol {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
            s = solve_passive(&passive);
        }
        x = s;
        for i in 0..n {
            if !passive[i] || x[i] < 0.0 {
                x[i] = x[i].max(0.0);
            }
        }
    }
    x
}

/// Euclidean projection of `v` onto `{p >= 0, sum p = 1}`.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cumsum += uk;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

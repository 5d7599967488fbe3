//! Reference computations that share no code with the library's
//! evaluation paths.
#![allow(dead_code)]

/// Hitting probability of `n` from 1 by solving the first-step equations
/// `h_0 = 0`, `h_n = 1`, `h_k = p_k h_{k+1} + q_k h_{k-1}` with dense
/// Gaussian elimination and partial pivoting.
pub fn first_step_reach(up: &[f64], n: usize) -> f64 {
    assert!(n >= 1 && up.len() + 1 >= n);
    if n == 1 {
        return 1.0;
    }
    // Unknowns h_1..h_{n-1}.
    let m = n - 1;
    let mut a = vec![vec![0.0f64; m + 1]; m];
    for k in 1..=m {
        let row = &mut a[k - 1];
        let p = up[k - 1];
        let q = 1.0 - p;
        row[k - 1] = 1.0;
        if k < m {
            row[k] = -p;
        } else {
            row[m] += p; // h_n = 1 moves to the right-hand side
        }
        if k >= 2 {
            row[k - 2] = -q;
        }
    }
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        for r in 0..m {
            if r != col {
                let factor = a[r][col] / a[col][col];
                if factor != 0.0 {
                    let pivot_row = a[col].clone();
                    for (x, y) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                        *x -= factor * y;
                    }
                }
            }
        }
    }
    a[0][m] / a[0][0]
}

/// `(1 - (1 - rho)^n) / H_n` by plain loops.
pub fn harmonic_f(rho: f64, n: usize) -> f64 {
    let mut miss = 1.0;
    let mut h = 0.0;
    for i in 1..=n {
        miss *= 1.0 - rho;
        h += 1.0 / i as f64;
    }
    (1.0 - miss) / h
}

/// Constant-rate `f` from the raw product form `1 / sum r^i` times the
/// success factor, in plain floating point (fine for moderate `n`).
pub fn constant_f_naive(p: f64, rho: f64, n: usize) -> f64 {
    let r = (1.0 - p) / p;
    let denom: f64 = (0..n).map(|i| r.powi(i as i32)).sum();
    (1.0 - (1.0 - rho).powi(n as i32)) / denom
}

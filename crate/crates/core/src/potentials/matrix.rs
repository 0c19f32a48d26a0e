//! Small dense square matrices stored row-major in slices.

const POWER_ITERATIONS: usize = 100;
const POWER_TOL: f64 = 1e-12;

/// `out = a * b` for `d × d` matrices.
#[inline]
pub(crate) fn matmul_into(a: &[f64], b: &[f64], d: usize, out: &mut [f64]) {
    for i in 0..d {
        for j in 0..d {
            let mut acc = 0.0;
            for k in 0..d {
                acc += a[i * d + k] * b[k * d + j];
            }
            out[i * d + j] = acc;
        }
    }
}

/// Operator 2-norm (largest singular value) of a `d × d` matrix.
///
/// Closed form for `d ≤ 2`, Jacobi eigenvalues of `MᵀM` for `d = 3`, and
/// power iteration on `MᵀM` for larger `d`.
pub fn operator_norm(m: &[f64], d: usize) -> f64 {
    assert_eq!(m.len(), d * d, "expected a {d}x{d} matrix");
    match d {
        0 => 0.0,
        1 => m[0].abs(),
        2 => {
            let (a, b, c, e) = (m[0], m[1], m[2], m[3]);
            // σ_max = (|z₁| + |z₂|)/2 with z₁ = (a+e, c−b), z₂ = (a−e, b+c);
            // avoids the cancellation in the eigenvalue formula for MᵀM
            0.5 * ((a + e).hypot(c - b) + (a - e).hypot(b + c))
        }
        3 => {
            let g = gram(m, d);
            jacobi_eigenvalues_3(g)
                .into_iter()
                .fold(0.0f64, f64::max)
                .max(0.0)
                .sqrt()
        }
        _ => power_iteration(&gram(m, d), d).max(0.0).sqrt(),
    }
}

fn gram(m: &[f64], d: usize) -> Vec<f64> {
    let mut g = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            g[i * d + j] = (0..d).map(|k| m[k * d + i] * m[k * d + j]).sum();
        }
    }
    g
}

fn jacobi_eigenvalues_3(g: Vec<f64>) -> [f64; 3] {
    let mut a = [[g[0], g[1], g[2]], [g[3], g[4], g[5]], [g[6], g[7], g[8]]];
    for _sweep in 0..50 {
        let off = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
        let diag = a[0][0].powi(2) + a[1][1].powi(2) + a[2][2].powi(2);
        if off <= 1e-32 * diag || off == 0.0 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            // A ← JᵀAJ with the (p, q) rotation
            for k in 0..3 {
                let (akp, akq) = (a[k][p], a[k][q]);
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let (apk, aqk) = (a[p][k], a[q][k]);
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
        }
    }
    [a[0][0], a[1][1], a[2][2]]
}

fn power_iteration(g: &[f64], d: usize) -> f64 {
    let mut v: Vec<f64> = (0..d).map(|k| 1.0 + 0.1 * k as f64).collect();
    let mut w = vec![0.0; d];
    let mut lambda = 0.0;
    for _ in 0..POWER_ITERATIONS {
        for i in 0..d {
            w[i] = (0..d).map(|j| g[i * d + j] * v[j]).sum();
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let vnorm2 = v.iter().map(|x| x * x).sum::<f64>();
        let next = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / vnorm2;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
        if (next - lambda).abs() <= POWER_TOL * next.abs() {
            return next;
        }
        lambda = next;
    }
    lambda
}

#[cfg(test)]
mod tests {
    use super::*;

    // Brute-force oracle: max |Mv| over a fine sampling of the unit sphere.
    fn sampled_norm(m: &[f64], d: usize) -> f64 {
        let mut best = 0.0f64;
        let steps = 400;
        let mut v = vec![0.0; d];
        let mut apply = |v: &[f64]| {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let mv: f64 = (0..d)
                .map(|i| (0..d).map(|j| m[i * d + j] * v[j] / n).sum::<f64>().powi(2))
                .sum();
            best = best.max(mv.sqrt());
        };
        if d == 2 {
            for i in 0..steps {
                let t = std::f64::consts::PI * i as f64 / steps as f64;
                v[0] = t.cos();
                v[1] = t.sin();
                apply(&v);
            }
        } else {
            for i in 0..steps {
                for j in 0..steps {
                    let th = std::f64::consts::PI * i as f64 / steps as f64;
                    let ph = std::f64::consts::TAU * j as f64 / steps as f64;
                    v[0] = th.sin() * ph.cos();
                    v[1] = th.sin() * ph.sin();
                    v[2] = th.cos();
                    apply(&v);
                }
            }
        }
        best
    }

    #[test]
    fn diagonal_and_rotation() {
        assert_eq!(operator_norm(&[0.5, 0.0, 0.0, 0.25], 2), 0.5);
        let (s, c) = 1.234f64.sin_cos();
        let r = [c, -s, s, c];
        assert!((operator_norm(&r, 2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn matches_sampling_oracle() {
        let m2 = [1.0, 2.0, -0.5, 0.3];
        let exact = operator_norm(&m2, 2);
        assert!(exact >= sampled_norm(&m2, 2) - 1e-12);
        assert!((exact - sampled_norm(&m2, 2)).abs() < 1e-4);
        let m3 = [1.0, 2.0, 0.0, -0.5, 0.3, 1.1, 0.2, 0.0, -0.7];
        let exact = operator_norm(&m3, 3);
        assert!(exact >= sampled_norm(&m3, 3) - 1e-12);
        assert!((exact - sampled_norm(&m3, 3)).abs() < 1e-3);
    }

    #[test]
    fn power_iteration_agrees_with_block_structure() {
        // block diagonal: norm is the max of the block norms
        let mut m = vec![0.0; 16];
        let b1 = [1.0, 2.0, -0.5, 0.3];
        let b2 = [0.4, 0.0, 0.9, -0.2];
        for i in 0..2 {
            for j in 0..2 {
                m[i * 4 + j] = b1[i * 2 + j];
                m[(i + 2) * 4 + j + 2] = b2[i * 2 + j];
            }
        }
        let expected = operator_norm(&b1, 2).max(operator_norm(&b2, 2));
        assert!((operator_norm(&m, 4) - expected).abs() < 1e-9);
    }

    #[test]
    fn matmul() {
        let mut out = [0.0; 4];
        matmul_into(&[1.0, 2.0, 3.0, 4.0], &[0.0, 1.0, 1.0, 0.0], 2, &mut out);
        assert_eq!(out, [2.0, 1.0, 4.0, 3.0]);
    }
}

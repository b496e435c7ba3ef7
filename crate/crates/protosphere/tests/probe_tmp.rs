use protosphere::prototypes::{init_prototypes, separation_loss_raw};

fn run_adam(
    count: usize,
    dim: usize,
    seed: u64,
    lr: f64,
    beta1: f64,
    iterations: usize,
) -> f64 {
    let beta2 = 0.999f64;
    let eps = 1e-8f64;
    let init = init_prototypes(count, dim, seed).unwrap();
    let mut rows: Vec<Vec<f64>> = init
        .prototypes()
        .iter()
        .map(|p| p.coords().to_vec())
        .collect();
    let mut m = vec![vec![0.0; dim]; count];
    let mut v = vec![vec![0.0; dim]; count];
    let mut best = 1.0f64;
    for step in 0..iterations {
        let annealed = lr * (1.0 - step as f64 / iterations as f64);
        let (_, gradient) = separation_loss_raw(&rows).unwrap();
        let t = (step + 1) as i32;
        let bc1 = 1.0 - beta1.powi(t);
        let bc2 = 1.0 - beta2.powi(t);
        for i in 0..count {
            for k in 0..dim {
                let g = gradient[i][k];
                m[i][k] = beta1 * m[i][k] + (1.0 - beta1) * g;
                v[i][k] = beta2 * v[i][k] + (1.0 - beta2) * g * g;
                let m_hat = m[i][k] / bc1;
                let v_hat = v[i][k] / bc2;
                rows[i][k] -= annealed * m_hat / (v_hat.sqrt() + eps);
            }
            let norm = rows[i].iter().map(|x| x * x).sum::<f64>().sqrt();
            for k in 0..dim {
                rows[i][k] /= norm;
            }
        }
        let mut max = -1.0f64;
        for i in 0..count {
            for j in (i + 1)..count {
                let c: f64 = (0..dim).map(|k| rows[i][k] * rows[j][k]).sum();
                if c > max {
                    max = c;
                }
            }
        }
        if max < best {
            best = max;
        }
    }
    best
}

#[test]
fn probe_adam() {
    let circle_target = (36f64).to_radians().cos();
    for (lr, beta1, iters) in [
        (0.05f64, 0.9f64, 1000usize),
        (0.02, 0.9, 1000),
        (0.01, 0.9, 1000),
        (0.05, 0.9, 2000),
        (0.02, 0.9, 2000),
        (0.1, 0.9, 1000),
    ] {
        let mut circle_worst: f64 = 0.0;
        for seed in 0..8u64 {
            let err = (run_adam(10, 2, seed, lr, beta1, iters) - circle_target).abs();
            if err > circle_worst {
                circle_worst = err;
            }
        }
        let mut simplex_worst: f64 = 0.0;
        for &(mm, aa) in &[(2usize, 3usize), (3, 3), (4, 3), (5, 8)] {
            for seed in 0..3u64 {
                let expected = -1.0 / (mm as f64 - 1.0);
                let err = (run_adam(mm, aa, seed, lr, beta1, iters) - expected).abs();
                if err > simplex_worst {
                    simplex_worst = err;
                }
            }
        }
        // Desk-scale sanity: spread quality for the acceptance-7/8 shapes.
        let spread_16 = run_adam(20, 16, 0, lr, beta1, iters);
        let spread_64 = run_adam(20, 64, 0, lr, beta1, iters);
        println!(
            "lr={lr} b1={beta1} iters={iters}: circle worst {circle_worst:.2e}, simplex worst {simplex_worst:.2e}, spread(20,16)={spread_16:.4}, spread(20,64)={spread_64:.4}{}",
            if circle_worst < 5e-3 && simplex_worst < 5e-3 { "  <== FULL PASS" } else { "" }
        );
    }
}

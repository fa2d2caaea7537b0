//! Regenerates `data/thomson_reference.csv`.
//!
//! Minimizes the normalized Thomson energy `(1/k) sum_{i<j} 1/|x_i - x_j|`
//! over unit vectors by projected gradient descent (tangent-space gradient,
//! renormalization, adaptive step) from many random starts, and prints the
//! best energy found for each `k`. Deliberately shares no code with the
//! particle solver.
//!
//! ```text
//! cargo run --release --example thomson_reference > crates/core/data/thomson_reference.csv
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn energy(x: &[[f64; 3]]) -> f64 {
    let mut e = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let d: f64 = (0..3).map(|c| (x[i][c] - x[j][c]).powi(2)).sum();
            e += 1.0 / d.sqrt();
        }
    }
    e / x.len() as f64
}

fn tangent_gradient(x: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let k = x.len();
    let mut g = vec![[0.0; 3]; k];
    for i in 0..k {
        for j in i + 1..k {
            let diff = [x[i][0] - x[j][0], x[i][1] - x[j][1], x[i][2] - x[j][2]];
            let d2 = diff.iter().map(|v| v * v).sum::<f64>();
            let f = -1.0 / (d2 * d2.sqrt() * k as f64);
            for c in 0..3 {
                g[i][c] += f * diff[c];
                g[j][c] -= f * diff[c];
            }
        }
    }
    for (gi, xi) in g.iter_mut().zip(x) {
        let radial: f64 = (0..3).map(|c| gi[c] * xi[c]).sum();
        for c in 0..3 {
            gi[c] -= radial * xi[c];
        }
    }
    g
}

fn normalize(p: &mut [f64; 3]) {
    let n = p.iter().map(|v| v * v).sum::<f64>().sqrt();
    p.iter_mut().for_each(|v| *v /= n);
}

fn local_minimum(k: usize, rng: &mut ChaCha8Rng, max_iter: usize) -> f64 {
    let mut x: Vec<[f64; 3]> = (0..k)
        .map(|_| {
            let mut p = [0.0; 3];
            p.iter_mut().for_each(|v| *v = StandardNormal.sample(rng));
            normalize(&mut p);
            p
        })
        .collect();
    let mut e = energy(&x);
    let mut step = 0.1;
    for _ in 0..max_iter {
        let g = tangent_gradient(&x);
        let gmax = g.iter().flat_map(|v| v.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
        if gmax < 1e-12 {
            break;
        }
        loop {
            let trial: Vec<[f64; 3]> = x
                .iter()
                .zip(&g)
                .map(|(xi, gi)| {
                    let mut p = [xi[0] - step * gi[0], xi[1] - step * gi[1], xi[2] - step * gi[2]];
                    normalize(&mut p);
                    p
                })
                .collect();
            let et = energy(&trial);
            if et <= e {
                x = trial;
                e = et;
                step *= 1.5;
                break;
            }
            step *= 0.5;
            if step < 1e-16 {
                return e;
            }
        }
    }
    e
}

fn main() {
    let plan: &[(usize, usize, usize)] = &[
        (4, 50, 20_000),
        (5, 50, 20_000),
        (6, 50, 20_000),
        (8, 100, 20_000),
        (12, 100, 20_000),
        (15, 100, 20_000),
        (56, 20, 20_000),
        (470, 3, 4_000),
    ];
    println!("# k, energy, provenance");
    println!("# energy = (1/k) * sum_{{i<j}} 1/|x_i - x_j| over unit vectors x_1..x_k");
    for &(k, restarts, max_iter) in plan {
        let seed = 0x7407_0000 + k as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let best = (0..restarts)
            .map(|_| local_minimum(k, &mut rng, max_iter))
            .fold(f64::INFINITY, f64::min);
        println!(
            "{k}, {best:.15}, projected gradient descent on the sphere; best of {restarts} random starts; {max_iter} iterations max; seed {seed:#x}"
        );
    }
}

//! Random bounded LPs checked against brute-force vertex enumeration.

use netpart_milp::{solve_lp, LpStatus, MipModel, Sense, VarId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Halfspace {
    a: Vec<f64>,
    b: f64,
}

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-9 {
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

fn combinations(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        cur.push(i);
        combinations(n, k, i + 1, cur, out);
        cur.pop();
    }
}

/// Minimum of `cost·x` over `{x : a·x <= b}` by trying every vertex.
fn vertex_oracle(cost: &[f64], hs: &[Halfspace]) -> Option<f64> {
    let n = cost.len();
    let mut sets = Vec::new();
    combinations(hs.len(), n, 0, &mut Vec::new(), &mut sets);
    let mut best: Option<f64> = None;
    for set in sets {
        let a = set.iter().map(|&i| hs[i].a.clone()).collect();
        let b = set.iter().map(|&i| hs[i].b).collect();
        if let Some(x) = solve_square(a, b) {
            let feasible = hs.iter().all(|h| h.a.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= h.b + 1e-7);
            if feasible {
                let v: f64 = cost.iter().zip(&x).map(|(c, xi)| c * xi).sum();
                best = Some(best.map_or(v, |bv: f64| bv.min(v)));
            }
        }
    }
    best
}

#[test]
fn random_lps_match_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut infeasible = 0;
    for _ in 0..60 {
        let n = rng.gen_range(2..=5);
        let m = rng.gen_range(2..=6);
        let mut model = MipModel::new();
        let mut hs = Vec::new();
        let mut cost = Vec::new();
        for j in 0..n {
            let lo = rng.gen_range(-4..=0) as f64;
            let hi = lo + rng.gen_range(1..=6) as f64;
            let c = rng.gen_range(-5..=5) as f64;
            model.add_continuous(format!("x{}", j), lo, hi, c);
            cost.push(c);
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            hs.push(Halfspace { a: e.clone(), b: hi });
            e[j] = -1.0;
            hs.push(Halfspace { a: e, b: -lo });
        }
        for i in 0..m {
            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-3..=3) as f64).collect();
            let rhs = rng.gen_range(-4..=6) as f64;
            let sense = match rng.gen_range(0..3) {
                0 => Sense::Le,
                1 => Sense::Ge,
                _ => Sense::Eq,
            };
            let terms = a.iter().enumerate().map(|(j, &c)| (VarId(j), c)).collect();
            model.add_row(format!("r{}", i), terms, sense, rhs);
            if sense != Sense::Ge {
                hs.push(Halfspace { a: a.clone(), b: rhs });
            }
            if sense != Sense::Le {
                hs.push(Halfspace { a: a.iter().map(|v| -v).collect(), b: -rhs });
            }
        }
        let sol = solve_lp(&model).unwrap();
        match vertex_oracle(&cost, &hs) {
            Some(best) => {
                assert_eq!(sol.status, LpStatus::Optimal, "oracle found {}", best);
                assert!((sol.objective - best).abs() < 1e-6, "{} vs {}", sol.objective, best);
                assert!(model.max_violation(&sol.values) < 1e-6);
            }
            None => {
                infeasible += 1;
                assert_eq!(sol.status, LpStatus::Infeasible);
            }
        }
    }
    assert!(infeasible < 60);
}

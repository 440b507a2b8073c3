//! Solver against the brute-force oracle on sparse matrices, where optimal
//! supports have more than one state and uncontrollable inputs are easy to
//! construct. Dense random matrices almost always need a single state.

use mincontrol::mcp::{solve_mcp, McpInput, Mode, SolveOptions};
use mincontrol::numerics::{left_eigenbasis, ComplexDenseMatrix};
use mincontrol::oracle::brute_force_mcp;
use mincontrol::structural::{solve_mscp, solve_mscp_within};
use mincontrol::structure::{matrix_pattern, structural_geq, structural_pattern};
use mincontrol::verify::verify;
use mincontrol::{Complex64, Tolerances};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `P T P^T` for a random upper-triangular `T` with well-separated diagonal
/// and off-diagonal density `density`.
fn sparse_simple(rng: &mut ChaCha8Rng, n: usize, density: f64) -> ComplexDenseMatrix {
    let diag: Vec<f64> = loop {
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..=2.0)).collect();
        let separated = (0..n).all(|i| (0..i).all(|j| (d[i] - d[j]).abs() > 0.1));
        if separated {
            break d;
        }
    };
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        rows[perm[i]][perm[i]] = diag[i];
        for j in i + 1..n {
            if rng.random_bool(density) {
                let x: f64 = rng.random_range(0.2..=1.0);
                rows[perm[i]][perm[j]] = if rng.random_bool(0.5) { x } else { -x };
            }
        }
    }
    ComplexDenseMatrix::from_real_rows(&rows).unwrap()
}

fn instances(seed: u64, count: usize) -> Vec<ComplexDenseMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.random_range(3..=8);
            let density = rng.random_range(0.1..=0.6);
            sparse_simple(&mut rng, n, density)
        })
        .collect()
}

#[test]
fn exact_matches_oracle_and_greedy_is_bounded() {
    let tol = Tolerances::default();
    let mut sizes = std::collections::BTreeMap::new();
    for (k, a) in instances(41, 150).iter().enumerate() {
        let exact = solve_mcp(McpInput::Matrix(a), Mode::Exact, &SolveOptions::default())
            .unwrap_or_else(|e| panic!("instance {k}: {e}"));
        let oracle = brute_force_mcp(a, 12, &tol).unwrap();
        assert_eq!(exact.support().len(), oracle.min_support_size, "instance {k}");
        assert!(oracle.optimal_supports.contains(&exact.support().to_vec()), "instance {k}");
        assert!(oracle.all_verified(), "instance {k}");
        // Lexicographically first optimum.
        assert_eq!(exact.support(), oracle.optimal_supports[0].as_slice(), "instance {k}");

        let greedy = solve_mcp(McpInput::Matrix(a), Mode::Greedy, &SolveOptions::default()).unwrap();
        let bound = (1.0 + (a.rows() as f64).ln()) * oracle.min_support_size as f64;
        assert!(greedy.support().len() as f64 <= bound, "instance {k}");

        let pattern = matrix_pattern(a, tol.zero_tol);
        let mscp = solve_mscp_within(&pattern, &exact.pattern).unwrap();
        assert!(structural_geq(&exact.pattern, &mscp).unwrap(), "instance {k}");
        assert!(exact.pattern.zero_norm() >= solve_mscp(&pattern).unwrap().zero_norm());
        *sizes.entry(oracle.min_support_size).or_insert(0) += 1;
    }
    // The family is only useful if it exercises several optimum sizes.
    assert!(sizes.len() >= 3, "{sizes:?}");
}

#[test]
fn verdicts_agree_on_controllable_and_uncontrollable_inputs() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let (mut yes, mut no) = (0, 0);
    for (k, a) in instances(42, 120).iter().enumerate() {
        let n = a.rows();
        let basis = left_eigenbasis(a, tol.residual_tol, tol.gap_tol).unwrap();
        let patterns: Vec<_> = basis.pairs().iter().map(|p| structural_pattern(&p.vector, tol.zero_tol)).collect();
        let support: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
        let hits_all = patterns.iter().all(|p| support.iter().any(|&i| p.is_star(i)));
        let b: Vec<Complex64> = (0..n)
            .map(|i| {
                let x = if support.contains(&i) { rng.random_range(0.1..=1.0) } else { 0.0 };
                Complex64::new(x, 0.0)
            })
            .collect();
        if support.is_empty() {
            continue;
        }
        let r = verify(Some(a), Some(&basis), &b, &tol).unwrap();
        assert!(r.consistent, "instance {k}: {r:?}");
        // Missing an eigenvector structurally forces an uncontrollable input;
        // hitting all of them is generic but not guaranteed for fixed values.
        if !hits_all {
            assert!(!r.controllable(), "instance {k}");
        }
        if r.controllable() {
            yes += 1;
        } else {
            no += 1;
        }
    }
    assert!(yes > 10 && no > 10, "controllable {yes}, uncontrollable {no}");
}

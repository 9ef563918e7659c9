//! Least squares and inference checked against an independent
//! normal-equations oracle and the statrs Student t distribution.

use artmetrics::hedonic::{build_design, fit_ols, DummyGroup, ModelSpec, Term};
use artmetrics::hedonic::{CategoricalField, ContinuousField, FeatureRow};
use artmetrics::catalog::TopicLabel;
use artmetrics::linalg::Mat;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Independent oracle: solve the normal equations X^T X b = X^T y by
/// Gauss-Jordan elimination with partial pivoting, and invert X^T X the
/// same way for standard errors. No shared code with the QR path.
mod oracle {
    pub struct Fit {
        pub coef: Vec<f64>,
        pub se: Vec<f64>,
        pub r_squared: f64,
        pub adj_r_squared: f64,
    }

    pub fn ols(x: &[Vec<f64>], y: &[f64]) -> Fit {
        let n = x.len();
        let k = x[0].len();
        let mut xtx = vec![vec![0.0; k]; k];
        let mut xty = vec![0.0; k];
        for (row, &yi) in x.iter().zip(y) {
            for i in 0..k {
                xty[i] += row[i] * yi;
                for j in 0..k {
                    xtx[i][j] += row[i] * row[j];
                }
            }
        }
        let inv = invert(&xtx);
        let coef: Vec<f64> = (0..k)
            .map(|i| (0..k).map(|j| inv[i][j] * xty[j]).sum())
            .collect();
        let mut rss = 0.0;
        for (row, &yi) in x.iter().zip(y) {
            let fit: f64 = row.iter().zip(&coef).map(|(a, b)| a * b).sum();
            rss += (yi - fit) * (yi - fit);
        }
        let s2 = rss / (n - k) as f64;
        let se: Vec<f64> = (0..k).map(|i| (s2 * inv[i][i]).sqrt()).collect();
        let mean = y.iter().sum::<f64>() / n as f64;
        let tss: f64 = y.iter().map(|&v| (v - mean) * (v - mean)).sum();
        let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 0.0 };
        let adj_r_squared =
            1.0 - (1.0 - r_squared) * (n - 1) as f64 / (n - k) as f64;
        Fit { coef, se, r_squared, adj_r_squared }
    }

    fn invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let k = a.len();
        let mut aug: Vec<Vec<f64>> = a
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend((0..k).map(|j| if i == j { 1.0 } else { 0.0 }));
                r
            })
            .collect();
        for col in 0..k {
            let pivot = (col..k)
                .max_by(|&i, &j| aug[i][col].abs().partial_cmp(&aug[j][col].abs()).unwrap())
                .unwrap();
            aug.swap(col, pivot);
            let d = aug[col][col];
            assert!(d.abs() > 1e-12, "oracle given a singular system");
            for v in aug[col].iter_mut() {
                *v /= d;
            }
            for row in 0..k {
                if row == col {
                    continue;
                }
                let f = aug[row][col];
                if f == 0.0 {
                    continue;
                }
                for j in 0..2 * k {
                    aug[row][j] -= f * aug[col][j];
                }
            }
        }
        aug.into_iter().map(|r| r[k..].to_vec()).collect()
    }
}

/// Random well-conditioned design: intercept plus independent columns.
fn random_system(rng: &mut ChaCha8Rng, n: usize, k: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let x: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut row = vec![1.0];
            row.extend((1..k).map(|_| rng.gen_range(-3.0..3.0)));
            row
        })
        .collect();
    let betas: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|row| {
            let signal: f64 = row.iter().zip(&betas).map(|(a, b)| a * b).sum();
            signal + rng.gen_range(-0.5..0.5)
        })
        .collect();
    (x, y)
}

fn to_mat(rows: &[Vec<f64>]) -> Mat<f64> {
    Mat::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

fn names(k: usize) -> Vec<String> {
    (0..k)
        .map(|j| if j == 0 { "const".to_string() } else { format!("x{j}") })
        .collect()
}

#[test]
fn fifty_random_systems_match_normal_equations_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..50 {
        let n = rng.gen_range(12..60);
        let k = rng.gen_range(2..7);
        let (x, y) = random_system(&mut rng, n, k);
        let fit = fit_ols(&to_mat(&x), &y, &names(k)).unwrap();
        let want = oracle::ols(&x, &y);
        assert!(fit.dropped.is_empty(), "trial {trial}: unexpected drop");
        for j in 0..k {
            assert!(
                (fit.terms[j].coef - want.coef[j]).abs() <= 1e-8,
                "trial {trial} coef {j}: {} vs {}",
                fit.terms[j].coef,
                want.coef[j]
            );
            assert!(
                (fit.terms[j].se - want.se[j]).abs() <= 1e-8,
                "trial {trial} se {j}: {} vs {}",
                fit.terms[j].se,
                want.se[j]
            );
        }
        assert!((fit.r_squared - want.r_squared).abs() <= 1e-10, "trial {trial} r2");
        assert!(
            (fit.adj_r_squared - want.adj_r_squared).abs() <= 1e-10,
            "trial {trial} adj r2"
        );
    }
}

#[test]
fn residuals_are_orthogonal_to_retained_columns() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let n = rng.gen_range(15..50);
        let k = rng.gen_range(2..6);
        let (x, y) = random_system(&mut rng, n, k);
        let xm = to_mat(&x);
        let fit = fit_ols(&xm, &y, &names(k)).unwrap();
        let coef: Vec<f64> = fit.terms.iter().map(|t| t.coef).collect();
        let fitted = xm.matvec(&coef);
        let resid: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
        let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for j in 0..k {
            let dot: f64 = (0..n).map(|i| x[i][j] * resid[i]).sum();
            assert!(
                dot.abs() <= 1e-6 * ynorm,
                "column {j}: X^T r = {dot} vs bound {}",
                1e-6 * ynorm
            );
        }
    }
}

#[test]
fn p_values_match_statrs_student_t() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..25 {
        let n = rng.gen_range(12..40);
        let k = rng.gen_range(2..5);
        let (x, y) = random_system(&mut rng, n, k);
        let fit = fit_ols(&to_mat(&x), &y, &names(k)).unwrap();
        let dist = StudentsT::new(0.0, 1.0, (n - k) as f64).unwrap();
        for term in &fit.terms {
            let want = 2.0 * (1.0 - dist.cdf(term.t.abs()));
            assert!(
                (term.p - want).abs() <= 1e-10,
                "p for |t|={}: {} vs statrs {}",
                term.t.abs(),
                term.p,
                want
            );
        }
    }
}

#[test]
fn dummy_trap_drops_exactly_one_column_per_complete_group() {
    // Full dummy encoding (no reference level omitted) plus an intercept:
    // each complete group sums to the intercept column, so exactly one
    // column per group must fall out.
    let n = 40;
    let g1_levels = 3usize;
    let g2_levels = 4usize;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for i in 0..n {
        let mut row = vec![1.0];
        let l1 = i % g1_levels;
        let l2 = (i / 2) % g2_levels;
        for l in 0..g1_levels {
            row.push(if l == l1 { 1.0 } else { 0.0 });
        }
        for l in 0..g2_levels {
            row.push(if l == l2 { 1.0 } else { 0.0 });
        }
        row.push(rng.gen_range(-1.0..1.0));
        rows.push(row);
    }
    let y: Vec<f64> = rows.iter().map(|r| 2.0 + r[1] - r[4] + 0.5 * r[8]).collect();
    let k = rows[0].len();
    let fit = fit_ols(&to_mat(&rows), &y, &names(k)).unwrap();
    assert_eq!(fit.dropped.len(), 2, "one drop per complete group: {:?}", fit.dropped);
    assert_eq!(fit.terms.len(), k - 2);
}

#[test]
fn design_from_feature_rows_matches_oracle_fit() {
    // End-to-end: FeatureRow -> build_design -> fit_ols against the oracle
    // on the same materialized matrix.
    let mut rng = ChaCha8Rng::seed_from_u64(57);
    let cities = ["antwerp", "basel", "cologne"];
    let rows: Vec<FeatureRow<f64>> = (0..60)
        .map(|i| {
            let e_g = rng.gen_range(0.5..6.0);
            let height = rng.gen_range(8.0..40.0);
            let city = cities[i % 3];
            let noise: f64 = rng.gen_range(-0.1..0.1);
            FeatureRow {
                log_price: 1.5 + 0.3 * e_g + 0.01 * height
                    + if city == "basel" { 0.2 } else { 0.0 }
                    + noise,
                e_g,
                redpct: rng.gen_range(0.0..1.0),
                bluepct: rng.gen_range(0.0..1.0),
                height,
                width: rng.gen_range(8.0..40.0),
                signed: i % 2 == 0,
                dated: i % 5 == 0,
                artist: format!("artist-{}", i % 4),
                medium: "oil".to_string(),
                house: "house".to_string(),
                city: city.to_string(),
                year: 2004 + (i % 3) as i32,
                month: 1 + (i % 12) as u8,
                topic: TopicLabel::Landscape,
                style: None,
            }
        })
        .collect();
    let spec = ModelSpec {
        terms: vec![
            Term::identity(ContinuousField::EG),
            Term::identity(ContinuousField::Height),
            Term::identity(ContinuousField::Signed),
        ],
        dummy_groups: vec![DummyGroup::new(CategoricalField::City)],
        include_topic: false,
        include_style: false,
    };
    let (x, y, col_names) = build_design(&rows, &spec).unwrap();
    assert_eq!(
        col_names,
        vec!["const", "e_g", "height", "signed", "city=basel", "city=cologne"]
    );
    let fit = fit_ols(&x, &y, &col_names).unwrap();

    let raw: Vec<Vec<f64>> = (0..x.rows())
        .map(|i| (0..x.cols()).map(|j| x[(i, j)]).collect())
        .collect();
    let want = oracle::ols(&raw, &y);
    for j in 0..col_names.len() {
        assert!((fit.terms[j].coef - want.coef[j]).abs() < 1e-8, "coef {j}");
        assert!((fit.terms[j].se - want.se[j]).abs() < 1e-8, "se {j}");
    }
    // Sanity on recovered effects.
    assert!((fit.terms[1].coef - 0.3).abs() < 0.05, "e_g effect");
    assert!((fit.terms[4].coef - 0.2).abs() < 0.1, "basel effect");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn coefficients_invariant_under_row_permutation(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(10..30);
        let k = rng.gen_range(2..5);
        let (x, y) = random_system(&mut rng, n, k);
        let fit = fit_ols(&to_mat(&x), &y, &names(k)).unwrap();

        // Deterministic shuffle: reverse plus a rotation.
        let shift = seed as usize % n;
        let order: Vec<usize> = (0..n).map(|i| (n - 1 - i + shift) % n).collect();
        let xp: Vec<Vec<f64>> = order.iter().map(|&i| x[i].clone()).collect();
        let yp: Vec<f64> = order.iter().map(|&i| y[i]).collect();
        let fitp = fit_ols(&to_mat(&xp), &yp, &names(k)).unwrap();

        for j in 0..k {
            prop_assert!((fit.terms[j].coef - fitp.terms[j].coef).abs() < 1e-9);
            prop_assert!((fit.terms[j].se - fitp.terms[j].se).abs() < 1e-9);
        }
    }

    #[test]
    fn response_scaling_scales_coefficients(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(9000));
        let n = rng.gen_range(10..30);
        let k = rng.gen_range(2..5);
        let (x, y) = random_system(&mut rng, n, k);
        let fit = fit_ols(&to_mat(&x), &y, &names(k)).unwrap();
        let y2: Vec<f64> = y.iter().map(|v| 2.0 * v).collect();
        let fit2 = fit_ols(&to_mat(&x), &y2, &names(k)).unwrap();
        for j in 0..k {
            prop_assert!((2.0 * fit.terms[j].coef - fit2.terms[j].coef).abs() < 1e-8);
            // t statistics and p-values are scale-free.
            prop_assert!((fit.terms[j].t - fit2.terms[j].t).abs() < 1e-8);
            prop_assert!((fit.terms[j].p - fit2.terms[j].p).abs() < 1e-10);
        }
        prop_assert!((fit.r_squared - fit2.r_squared).abs() < 1e-10);
    }

    #[test]
    fn adjusted_r_squared_never_exceeds_r_squared(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(50_000));
        let n = rng.gen_range(10..30);
        let k = rng.gen_range(2..5);
        let (x, y) = random_system(&mut rng, n, k);
        let fit = fit_ols(&to_mat(&x), &y, &names(k)).unwrap();
        prop_assert!(fit.adj_r_squared <= fit.r_squared + 1e-12);
        prop_assert!(fit.r_squared <= 1.0 + 1e-12);
    }
}

//! Principal component analysis on the correlation matrix, plus varimax
//! rotation of the retained loadings.

use nalgebra::{DMatrix, SymmetricEigen};

use super::StatsError;

/// Loadings, scores, and explained variance of a correlation-based PCA.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaResult {
    pub variables: Vec<String>,
    /// All eigenvalues of the correlation matrix, descending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvalues of the retained components.
    pub explained_variance: Vec<f64>,
    /// Retained eigenvalues as a share of total variance (= variable count).
    pub explained_share: Vec<f64>,
    /// Variables x components, before rotation.
    pub loadings: DMatrix<f64>,
    /// Variables x components, after varimax rotation.
    pub rotated_loadings: DMatrix<f64>,
    /// Observations x components; centered by construction.
    pub scores: DMatrix<f64>,
}

/// Runs a correlation-based PCA over complete columns of equal length.
///
/// Variables are standardized internally, so the decomposition is of the
/// Pearson correlation matrix. Components are ordered by eigenvalue and
/// sign-fixed so the largest-magnitude loading in each is positive.
pub fn pca(columns: &[(String, Vec<f64>)], n_components: usize) -> Result<PcaResult, StatsError> {
    if columns.is_empty() {
        return Err(StatsError::Empty);
    }
    let p = columns.len();
    let n = columns[0].1.len();
    for (_, col) in columns {
        if col.len() != n {
            return Err(StatsError::LengthMismatch(n, col.len()));
        }
        if col.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
    }
    if n <= p {
        return Err(StatsError::TooFewObservations { got: n, vars: p });
    }
    if n_components == 0 || n_components > p {
        return Err(StatsError::BadComponents(n_components, p));
    }

    let mut degenerate = Vec::new();
    let mut z = DMatrix::zeros(n, p);
    for (j, (name, col)) in columns.iter().enumerate() {
        let mean = col.iter().sum::<f64>() / n as f64;
        let ss = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
        let std = (ss / (n as f64 - 1.0)).sqrt();
        if std == 0.0 {
            degenerate.push(name.clone());
            continue;
        }
        for i in 0..n {
            z[(i, j)] = (col[i] - mean) / std;
        }
    }
    if !degenerate.is_empty() {
        return Err(StatsError::Degenerate(degenerate.join(", ")));
    }

    let corr = z.transpose() * &z / (n as f64 - 1.0);
    let eigen = SymmetricEigen::new(corr);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[b]
            .partial_cmp(&eigen.eigenvalues[a])
            .unwrap()
    });

    let eigenvalues: Vec<f64> = order
        .iter()
        .map(|&i| eigen.eigenvalues[i].max(0.0))
        .collect();
    let mut vectors = DMatrix::zeros(p, n_components);
    for (c, &i) in order.iter().take(n_components).enumerate() {
        let mut col = eigen.eigenvectors.column(i).clone_owned();
        let pivot = col
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
            .map(|(idx, _)| idx)
            .unwrap_or(0);
        if col[pivot] < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(c, &col);
    }

    let mut loadings = vectors.clone();
    for c in 0..n_components {
        let scale = eigenvalues[c].sqrt();
        for r in 0..p {
            loadings[(r, c)] *= scale;
        }
    }
    let scores = &z * &vectors;
    let rotated_loadings = varimax(&loadings);

    Ok(PcaResult {
        variables: columns.iter().map(|(n, _)| n.clone()).collect(),
        explained_variance: eigenvalues[..n_components].to_vec(),
        explained_share: eigenvalues[..n_components]
            .iter()
            .map(|v| v / p as f64)
            .collect(),
        eigenvalues,
        loadings,
        rotated_loadings,
        scores,
    })
}

/// Row communalities: sums of squared loadings.
pub fn communalities(loadings: &DMatrix<f64>) -> Vec<f64> {
    (0..loadings.nrows())
        .map(|r| loadings.row(r).iter().map(|v| v * v).sum())
        .collect()
}

/// The varimax criterion: summed column variance of squared loadings.
pub fn varimax_criterion(loadings: &DMatrix<f64>) -> f64 {
    let p = loadings.nrows() as f64;
    (0..loadings.ncols())
        .map(|c| {
            let col = loadings.column(c);
            let m2 = col.iter().map(|v| v * v).sum::<f64>() / p;
            let m4 = col.iter().map(|v| v.powi(4)).sum::<f64>() / p;
            m4 - m2 * m2
        })
        .sum()
}

/// Orthogonal varimax rotation with Kaiser row normalization.
///
/// Sweeps planar rotations over all component pairs until the criterion
/// gain drops below 1e-10 or 100 sweeps have run. A single component is
/// returned unchanged.
pub fn varimax(loadings: &DMatrix<f64>) -> DMatrix<f64> {
    let (p, k) = loadings.shape();
    if k < 2 || p == 0 {
        return loadings.clone();
    }

    let h: Vec<f64> = communalities(loadings)
        .iter()
        .map(|c| if *c > 0.0 { c.sqrt() } else { 1.0 })
        .collect();
    let mut a = loadings.clone();
    for r in 0..p {
        for c in 0..k {
            a[(r, c)] /= h[r];
        }
    }

    let pf = p as f64;
    for _sweep in 0..100 {
        let before = varimax_criterion(&a);
        for i in 0..k - 1 {
            for j in i + 1..k {
                let mut sum_u = 0.0;
                let mut sum_v = 0.0;
                let mut sum_c = 0.0;
                let mut sum_d = 0.0;
                for r in 0..p {
                    let x = a[(r, i)];
                    let y = a[(r, j)];
                    let u = x * x - y * y;
                    let v = 2.0 * x * y;
                    sum_u += u;
                    sum_v += v;
                    sum_c += u * u - v * v;
                    sum_d += 2.0 * u * v;
                }
                let num = sum_d - 2.0 * sum_u * sum_v / pf;
                let den = sum_c - (sum_u * sum_u - sum_v * sum_v) / pf;
                let phi = 0.25 * num.atan2(den);
                if phi.abs() < 1e-12 {
                    continue;
                }
                let (sin, cos) = phi.sin_cos();
                for r in 0..p {
                    let x = a[(r, i)];
                    let y = a[(r, j)];
                    a[(r, i)] = cos * x + sin * y;
                    a[(r, j)] = -sin * x + cos * y;
                }
            }
        }
        if varimax_criterion(&a) - before < 1e-10 {
            break;
        }
    }

    for r in 0..p {
        for c in 0..k {
            a[(r, c)] *= h[r];
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn columns(cols: &[(&str, Vec<f64>)]) -> Vec<(String, Vec<f64>)> {
        cols.iter()
            .map(|(n, v)| (n.to_string(), v.clone()))
            .collect()
    }

    #[test]
    fn perfectly_correlated_pair_loads_on_one_component() {
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v + 1.0).collect();
        let r = pca(&columns(&[("a", x), ("b", y)]), 2).unwrap();
        assert_abs_diff_eq!(r.eigenvalues[0], 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.eigenvalues[1], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.explained_share[0], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn uncorrelated_variables_give_unit_eigenvalues() {
        // Orthogonal contrast patterns have exactly zero correlation.
        let x = vec![1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0];
        let y = vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        let r = pca(&columns(&[("a", x), ("b", y)]), 2).unwrap();
        assert_abs_diff_eq!(r.eigenvalues[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.eigenvalues[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn constant_variable_is_degenerate() {
        let r = pca(
            &columns(&[("a", vec![1.0, 2.0, 3.0, 4.0]), ("flat", vec![7.0; 4])]),
            2,
        );
        assert_eq!(r, Err(StatsError::Degenerate("flat".into())));
    }

    #[test]
    fn requires_more_observations_than_variables() {
        let r = pca(&columns(&[("a", vec![1.0, 2.0]), ("b", vec![2.0, 1.0])]), 2);
        assert_eq!(r, Err(StatsError::TooFewObservations { got: 2, vars: 2 }));
    }

    #[test]
    fn component_count_is_bounded() {
        let cols = columns(&[("a", vec![1.0, 2.0, 3.0]), ("b", vec![3.0, 1.0, 2.0])]);
        assert_eq!(pca(&cols, 0), Err(StatsError::BadComponents(0, 2)));
        assert_eq!(pca(&cols, 3), Err(StatsError::BadComponents(3, 2)));
    }

    fn sample_table() -> Vec<(String, Vec<f64>)> {
        // Two latent dimensions plus deterministic perturbations.
        let n = 12;
        let f1: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin() * 2.0).collect();
        let f2: Vec<f64> = (0..n).map(|i| (i as f64 * 1.3).cos() * 1.5).collect();
        let mk = |w1: f64, w2: f64, bump: f64| -> Vec<f64> {
            (0..n)
                .map(|i| w1 * f1[i] + w2 * f2[i] + bump * ((i * i) % 7) as f64 * 0.05)
                .collect()
        };
        columns(&[
            ("v1", mk(1.0, 0.1, 1.0)),
            ("v2", mk(0.9, 0.0, -1.0)),
            ("v3", mk(0.2, 1.0, 0.5)),
            ("v4", mk(0.0, 0.8, 1.5)),
        ])
    }

    #[test]
    fn scores_are_centered_and_components_orthogonal() {
        let r = pca(&sample_table(), 2).unwrap();
        for c in 0..2 {
            let mean: f64 = r.scores.column(c).iter().sum::<f64>() / r.scores.nrows() as f64;
            assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-9);
        }
        let gram = r.loadings.transpose() * &r.loadings;
        assert_abs_diff_eq!(gram[(0, 1)], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(gram[(1, 0)], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn explained_variance_sums_to_retained_eigenvalues() {
        let r = pca(&sample_table(), 2).unwrap();
        let total: f64 = r.explained_variance.iter().sum();
        let expected: f64 = r.eigenvalues[..2].iter().sum();
        assert_abs_diff_eq!(total, expected, epsilon = 1e-12);
        let all: f64 = r.eigenvalues.iter().sum();
        assert_abs_diff_eq!(all, 4.0, epsilon = 1e-9);
    }

    #[test]
    fn varimax_is_identity_for_single_component() {
        let m = DMatrix::from_column_slice(3, 1, &[0.9, 0.5, 0.2]);
        assert_eq!(varimax(&m), m);
    }

    #[test]
    fn varimax_preserves_communalities() {
        let r = pca(&sample_table(), 2).unwrap();
        let before = communalities(&r.loadings);
        let after = communalities(&r.rotated_loadings);
        for (b, a) in before.iter().zip(&after) {
            assert_abs_diff_eq!(b, a, epsilon = 1e-9);
        }
    }

    #[test]
    fn varimax_does_not_decrease_the_criterion() {
        let r = pca(&sample_table(), 2).unwrap();
        assert!(varimax_criterion(&r.rotated_loadings) >= varimax_criterion(&r.loadings) - 1e-12);
    }

    #[test]
    fn simple_structure_is_a_fixed_point_up_to_sign() {
        let m = DMatrix::from_row_slice(4, 2, &[0.9, 0.0, 0.8, 0.0, 0.0, 0.7, 0.0, 0.6]);
        let rotated = varimax(&m);
        for r in 0..4 {
            for c in 0..2 {
                assert_abs_diff_eq!(rotated[(r, c)].abs(), m[(r, c)].abs(), epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn varimax_handles_zero_rows() {
        let m = DMatrix::from_row_slice(3, 2, &[0.9, 0.1, 0.0, 0.0, 0.2, 0.8]);
        let rotated = varimax(&m);
        assert_abs_diff_eq!(rotated[(1, 0)], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rotated[(1, 1)], 0.0, epsilon = 1e-12);
    }
}

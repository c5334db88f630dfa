//! The statistical battery: descriptives, log transform, Spearman rank
//! correlation with significance, and PCA with varimax rotation.

pub mod pca;

use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("empty input")]
    Empty,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {need} observations, got {got}")]
    TooFew { need: usize, got: usize },
    #[error("non-finite value in input")]
    NonFinite,
    #[error("negative value {0} cannot be log-transformed")]
    NegativeValue(f64),
    #[error("undefined correlation: {0} is constant")]
    ConstantInput(String),
    #[error("variable {0} has no observations")]
    MissingVariable(String),
    #[error("variables {0} and {1} share fewer than 3 complete observations")]
    InsufficientOverlap(String, String),
    #[error("degenerate variables: {0}")]
    Degenerate(String),
    #[error("component count {0} out of range 1..={1}")]
    BadComponents(usize, usize),
    #[error("need more observations ({got}) than variables ({vars})")]
    TooFewObservations { got: usize, vars: usize },
}

/// Summary statistics of one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Descriptives {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation (n-1 denominator); 0 for a single value.
    pub std_dev: f64,
    /// Bias-corrected moment coefficient; absent for n < 3 or zero spread.
    pub skewness: Option<f64>,
    /// Bias-corrected excess kurtosis; absent for n < 4 or zero spread.
    pub kurtosis: Option<f64>,
}

fn check_finite(values: &[f64]) -> Result<(), StatsError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

pub fn describe(values: &[f64]) -> Result<Descriptives, StatsError> {
    if values.is_empty() {
        return Err(StatsError::Empty);
    }
    check_finite(values)?;
    let n = values.len();
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;

    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };

    let std_dev = if n > 1 {
        let ss = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
        (ss / (nf - 1.0)).sqrt()
    } else {
        0.0
    };

    let skewness = if n >= 3 && std_dev > 0.0 {
        let z3 = values
            .iter()
            .map(|v| ((v - mean) / std_dev).powi(3))
            .sum::<f64>();
        Some(nf / ((nf - 1.0) * (nf - 2.0)) * z3)
    } else {
        None
    };
    let kurtosis = if n >= 4 && std_dev > 0.0 {
        let z4 = values
            .iter()
            .map(|v| ((v - mean) / std_dev).powi(4))
            .sum::<f64>();
        let lead = nf * (nf + 1.0) / ((nf - 1.0) * (nf - 2.0) * (nf - 3.0));
        let correction = 3.0 * (nf - 1.0).powi(2) / ((nf - 2.0) * (nf - 3.0));
        Some(lead * z4 - correction)
    } else {
        None
    };

    Ok(Descriptives {
        n,
        mean,
        median,
        std_dev,
        skewness,
        kurtosis,
    })
}

/// Elementwise x -> log10(1 + x). The +1 shift keeps zero counts at zero.
pub fn log_transform(values: &[f64]) -> Result<Vec<f64>, StatsError> {
    check_finite(values)?;
    if let Some(v) = values.iter().find(|v| **v < 0.0) {
        return Err(StatsError::NegativeValue(*v));
    }
    Ok(values.iter().map(|v| (1.0 + v).log10()).collect())
}

/// 1-based ranks with ties assigned the average of the tied positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatsError::TooFew {
            need: 3,
            got: x.len(),
        });
    }
    check_finite(x)?;
    check_finite(y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 {
        return Err(StatsError::ConstantInput("x".into()));
    }
    if syy == 0.0 {
        return Err(StatsError::ConstantInput("y".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Two-tailed p-value for a Spearman coefficient via the t approximation
/// with n-2 degrees of freedom. rho = +-1 maps to p = 0.
pub fn spearman_p(rho: f64, n: usize) -> f64 {
    if 1.0 - rho.abs() < 1e-12 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = rho.abs() * (df / (1.0 - rho * rho)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("valid degrees of freedom");
    (2.0 * (1.0 - dist.cdf(t))).clamp(0.0, 1.0)
}

/// Spearman rank correlation with mid-rank tie handling.
///
/// Returns (rho, two-tailed p). rho is the Pearson correlation of the
/// average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<(f64, f64), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatsError::TooFew {
            need: 3,
            got: x.len(),
        });
    }
    let rho = pearson(&average_ranks(x), &average_ranks(y))?;
    Ok((rho, spearman_p(rho, x.len())))
}

/// Pairwise-complete Spearman correlations with significance flags.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub variables: Vec<String>,
    pub rho: Vec<Vec<f64>>,
    pub p_values: Vec<Vec<f64>>,
    pub significant_01: Vec<Vec<bool>>,
    pub significant_05: Vec<Vec<bool>>,
    /// Number of complete observation pairs behind each cell.
    pub n_pairs: Vec<Vec<usize>>,
}

/// Correlates every pair of variables over the observations where both are
/// present. Diagonal cells are 1 and never flagged significant.
pub fn correlation_matrix(
    columns: &[(String, Vec<Option<f64>>)],
) -> Result<CorrelationMatrix, StatsError> {
    if columns.is_empty() {
        return Err(StatsError::Empty);
    }
    let rows = columns[0].1.len();
    for (name, col) in columns {
        if col.len() != rows {
            return Err(StatsError::LengthMismatch(rows, col.len()));
        }
        if col.iter().all(|v| v.is_none()) {
            return Err(StatsError::MissingVariable(name.clone()));
        }
    }
    let p = columns.len();
    let mut rho = vec![vec![0.0; p]; p];
    let mut pv = vec![vec![0.0; p]; p];
    let mut s01 = vec![vec![false; p]; p];
    let mut s05 = vec![vec![false; p]; p];
    let mut n_pairs = vec![vec![0usize; p]; p];
    for i in 0..p {
        rho[i][i] = 1.0;
        n_pairs[i][i] = columns[i].1.iter().filter(|v| v.is_some()).count();
        for j in (i + 1)..p {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for r in 0..rows {
                if let (Some(a), Some(b)) = (columns[i].1[r], columns[j].1[r]) {
                    xs.push(a);
                    ys.push(b);
                }
            }
            if xs.len() < 3 {
                return Err(StatsError::InsufficientOverlap(
                    columns[i].0.clone(),
                    columns[j].0.clone(),
                ));
            }
            let (r, pval) = spearman(&xs, &ys).map_err(|e| match e {
                StatsError::ConstantInput(which) => {
                    let name = if which == "x" {
                        &columns[i].0
                    } else {
                        &columns[j].0
                    };
                    StatsError::ConstantInput(name.clone())
                }
                other => other,
            })?;
            rho[i][j] = r;
            rho[j][i] = r;
            pv[i][j] = pval;
            pv[j][i] = pval;
            s01[i][j] = pval < 0.01;
            s01[j][i] = s01[i][j];
            s05[i][j] = pval < 0.05;
            s05[j][i] = s05[i][j];
            n_pairs[i][j] = xs.len();
            n_pairs[j][i] = xs.len();
        }
    }
    Ok(CorrelationMatrix {
        variables: columns.iter().map(|(n, _)| n.clone()).collect(),
        rho,
        p_values: pv,
        significant_01: s01,
        significant_05: s05,
        n_pairs,
    })
}

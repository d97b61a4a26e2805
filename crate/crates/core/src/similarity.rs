//! Cosine similarity between nonnegative profile vectors.

/// Cosine of the angle between `a` and `b`, or `None` when either is a zero
/// vector. For nonnegative inputs the result lies in [0, 1]; it is clamped
/// there to absorb rounding.
pub fn cosine(a: &[f64], b: &[f64]) -> Option<f64> {
    debug_assert_eq!(a.len(), b.len());
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return None;
    }
    Some((dot / (na * nb)).clamp(0.0, 1.0))
}

/// Pairwise cosine over the rows of a matrix.
pub fn cosine_matrix(rows: &[Vec<f64>]) -> Vec<Vec<Option<f64>>> {
    rows.iter()
        .map(|a| rows.iter().map(|b| cosine(a, b)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_cases() {
        assert_eq!(cosine(&[2.0, 3.0], &[2.0, 3.0]), Some(1.0));
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]), Some(0.0));
        assert!((cosine(&[1.0, 0.0], &[1.0, 1.0]).unwrap() - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 1.0]), None);
    }

    #[test]
    fn scale_invariant() {
        let a = [1.0, 4.0, 2.0];
        let b = [3.0, 0.5, 7.0];
        let scaled: Vec<f64> = a.iter().map(|x| x * 12.5).collect();
        assert!((cosine(&a, &b).unwrap() - cosine(&scaled, &b).unwrap()).abs() < 1e-12);
    }
}

/// Pairwise (tree) summation.
///
/// The association order depends only on the slice length, so a parallel map
/// followed by this sum gives bit-identical results for any thread count.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_exact_integer_sum() {
        let v: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn less_cancellation_than_naive() {
        let mut v = vec![1.0];
        v.extend(std::iter::repeat_n(1e-16, 1 << 16));
        let s = pairwise_sum(&v);
        assert!((s - (1.0 + 6.5536e-12)).abs() < 1e-14);
    }
}

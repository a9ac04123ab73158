//! Stochastic universal sampling.

use rand::Rng;

use crate::error::{Error, Result};

/// Selects `k` indices proportionally to `fitness` with one random offset
/// and `k` evenly spaced pointers.
///
/// Each index is selected either `⌊e⌋` or `⌈e⌉` times, where
/// `e = k · fitness[i] / Σ fitness`. The result is ordered by index.
pub fn sus_select<R: Rng + ?Sized>(fitness: &[f64], k: usize, rng: &mut R) -> Result<Vec<usize>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    if fitness.iter().any(|f| !f.is_finite() || *f < 0.0) {
        return Err(Error::Config(
            "fitness values must be finite and non-negative".into(),
        ));
    }
    let total: f64 = fitness.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroFitness);
    }
    let spacing = total / k as f64;
    let offset = rng.random::<f64>() * spacing;
    let last_positive = fitness.iter().rposition(|f| *f > 0.0).unwrap_or(0);

    let mut selected = Vec::with_capacity(k);
    let mut index = 0;
    let mut cumulative = fitness[0];
    for i in 0..k {
        let pointer = offset + i as f64 * spacing;
        while pointer >= cumulative && index < last_positive {
            index += 1;
            cumulative += fitness[index];
        }
        selected.push(index);
    }
    Ok(selected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn counts(selected: &[usize], n: usize) -> Vec<usize> {
        let mut c = vec![0; n];
        for &i in selected {
            c[i] += 1;
        }
        c
    }

    #[test]
    fn uniform_pair_each_once() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let s = sus_select(&[1.0, 1.0], 2, &mut rng).unwrap();
            assert_eq!(counts(&s, 2), vec![1, 1]);
        }
    }

    #[test]
    fn three_to_one_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let s = sus_select(&[3.0, 1.0], 4, &mut rng).unwrap();
            assert_eq!(counts(&s, 2), vec![3, 1]);
        }
    }

    #[test]
    fn single_individual_repeats() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(sus_select(&[1.0], 5, &mut rng).unwrap(), vec![0; 5]);
    }

    #[test]
    fn zero_fitness_never_selected() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let s = sus_select(&[0.0, 2.0, 0.0, 1.0, 0.0], 7, &mut rng).unwrap();
            assert!(s.iter().all(|&i| i == 1 || i == 3));
        }
    }

    #[test]
    fn all_zero_is_an_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(matches!(
            sus_select(&[0.0, 0.0], 3, &mut rng),
            Err(Error::ZeroFitness)
        ));
    }
}

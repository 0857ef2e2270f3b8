use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdReport {
    pub max_rel_error: f64,
    /// Coordinate with the largest error.
    pub worst: Option<usize>,
    pub checked: usize,
}

/// `count` distinct coordinates in `0..len`, ascending, from a seeded
/// generator. Every coordinate is returned when `count >= len`.
pub fn fd_coordinates(len: usize, count: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = sample(&mut rng, len, count.min(len)).into_vec();
    idx.sort_unstable();
    idx
}

/// Compares `analytic` to central differences `(f(x + h e) - f(x - h e)) / 2h`
/// at `coords`. Relative error uses `max(|analytic|, 1e-8)` as denominator.
pub fn finite_difference_check(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    analytic: &[f64],
    coords: &[usize],
    h: f64,
) -> FdReport {
    let mut x = x0.to_vec();
    let mut report = FdReport {
        max_rel_error: 0.0,
        worst: None,
        checked: 0,
    };
    for &i in coords {
        let orig = x[i];
        x[i] = orig + h;
        let up = f(&x);
        x[i] = orig - h;
        let down = f(&x);
        x[i] = orig;
        let numeric = (up - down) / (2.0 * h);
        let err = (numeric - analytic[i]).abs() / analytic[i].abs().max(1e-8);
        if report.worst.is_none() || err > report.max_rel_error {
            report.max_rel_error = err;
            report.worst = Some(i);
        }
        report.checked += 1;
    }
    report
}

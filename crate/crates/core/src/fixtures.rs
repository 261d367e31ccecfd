//! Small named instances used throughout the tests and the CLI examples.

use crate::model::{Instance, Job};
use crate::num::{Rational, Scalar};

/// Integer as an exact rational.
pub fn q(v: i64) -> Rational {
    Rational::from_int(v)
}

/// `a/b` as an exact rational.
pub fn qr(a: i64, b: i64) -> Rational {
    Rational::from_ratio(a, b)
}

/// One job with integer data on machines with the given costs.
pub fn single_job(p: i64, w: i64, costs: &[i64]) -> Instance {
    Instance::new(vec![Job::new("j1", q(p), q(w))], costs.iter().map(|&c| q(c)).collect())
        .expect("valid fixture")
}

/// Jobs `(p, w)` on machines with the given costs; ids `j1, j2, …`.
pub fn instance(jobs: &[(i64, i64)], costs: &[i64]) -> Instance {
    Instance::new(
        jobs.iter()
            .enumerate()
            .map(|(i, &(p, w))| Job::new(format!("j{}", i + 1), q(p), q(w)))
            .collect(),
        costs.iter().map(|&c| q(c)).collect(),
    )
    .expect("valid fixture")
}

/// Jobs `(4, 3)` and `(8, 2)` on one machine of cost 1; optimum 7.
pub fn one_machine_pair() -> Instance {
    instance(&[(4, 3), (8, 2)], &[1])
}

/// Two machines with costs 4 and 5; jobs `(9, 9)`, `(9, 7)`, `(5, 5)`; optimum 37.
pub fn two_machine_trio() -> Instance {
    instance(&[(9, 9), (9, 7), (5, 5)], &[4, 5])
}

/// Generic version of [`instance`] for any scalar.
pub fn instance_of<T: Scalar>(jobs: &[(i64, i64)], costs: &[i64]) -> Instance<T> {
    Instance::new(
        jobs.iter()
            .enumerate()
            .map(|(i, &(p, w))| Job::new(format!("j{}", i + 1), T::from_int(p), T::from_int(w)))
            .collect(),
        costs.iter().map(|&c| T::from_int(c)).collect(),
    )
    .expect("valid fixture")
}

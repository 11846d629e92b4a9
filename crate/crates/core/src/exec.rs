//! Execution policy for the data-parallel loops in this crate.
//!
//! Every batch entry point takes an [`Exec`]. With the `parallel` feature
//! (default) [`Exec::Parallel`] dispatches to rayon; without it the same
//! call silently runs sequentially. Results are always returned in input
//! order, so output is identical under either policy.

/// How a batch of independent evaluations is scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// True when this policy will actually fan out across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

/// Order-preserving map over a slice.
pub fn map<T, U, F>(exec: Exec, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Order-preserving map over `0..len`.
pub fn map_range<U, F>(exec: Exec, len: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}

/// Fills `out` in chunks of `chunk` elements; `f(chunk_index, chunk)`.
pub fn for_each_chunk<U, F>(exec: Exec, out: &mut [U], chunk: usize, f: F)
where
    U: Send,
    F: Fn(usize, &mut [U]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        out.par_chunks_mut(chunk)
            .enumerate()
            .for_each(|(k, c)| f(k, c));
        return;
    }
    let _ = exec;
    out.chunks_mut(chunk).enumerate().for_each(|(k, c)| f(k, c));
}

/// Runs two closures, concurrently when the policy allows.
pub fn join<A, B, RA, RB>(exec: Exec, a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return rayon::join(a, b);
    }
    let _ = exec;
    (a(), b())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree() {
        let xs: Vec<f64> = (0..1000).map(|k| k as f64 * 0.37).collect();
        let a = map(Exec::Sequential, &xs, |x| x.sin());
        let b = map(Exec::Parallel, &xs, |x| x.sin());
        assert_eq!(a, b);
        let c = map_range(Exec::Parallel, 17, |k| k * k);
        assert_eq!(c[16], 256);
    }

    #[test]
    fn chunked_fill_matches() {
        let mut a = vec![0usize; 103];
        let mut b = vec![0usize; 103];
        for_each_chunk(Exec::Sequential, &mut a, 10, |k, c| {
            for (i, v) in c.iter_mut().enumerate() {
                *v = k * 10 + i;
            }
        });
        for_each_chunk(Exec::Parallel, &mut b, 10, |k, c| {
            for (i, v) in c.iter_mut().enumerate() {
                *v = k * 10 + i;
            }
        });
        assert_eq!(a, b);
        assert_eq!(a[102], 102);
    }
}

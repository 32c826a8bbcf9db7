//! Sweep-level parallelism. With the `parallel` feature the map runs on a
//! rayon pool; without it, or with [`Execution::Sequential`], it is a plain
//! iterator. Output order always follows input order.

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

/// Maps `f` over `items`, preserving order.
pub fn map_collect<T, R, F>(
    items: &[T],
    execution: Execution,
    workers: Option<usize>,
    f: F,
) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match execution {
        Execution::Sequential => items.iter().map(f).collect(),
        Execution::Parallel => parallel_map(items, workers, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, R, F>(items: &[T], workers: Option<usize>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    match workers {
        Some(n) => match rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
        {
            Ok(pool) => pool.install(|| items.par_iter().map(&f).collect()),
            Err(_) => items.iter().map(f).collect(),
        },
        None => items.par_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, R, F>(items: &[T], _workers: Option<usize>, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

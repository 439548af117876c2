//! Data-parallel helpers with a sequential fallback when the `parallel`
//! feature is disabled. Both variants expose the same signatures and must
//! return results in input order so reports stay deterministic.

pub(crate) use self::actual::map_indexed;

#[cfg(feature = "parallel")]
mod actual {
    use rayon::prelude::*;

    pub(crate) fn map_indexed<T, R, F>(items: &[T], map: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(usize, &T) -> R + Sync + Send,
    {
        items
            .par_iter()
            .enumerate()
            .map(|(i, item)| map(i, item))
            .collect()
    }
}

#[cfg(not(feature = "parallel"))]
mod actual {
    pub(crate) fn map_indexed<T, R, F>(items: &[T], map: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(usize, &T) -> R + Sync + Send,
    {
        items
            .iter()
            .enumerate()
            .map(|(i, item)| map(i, item))
            .collect()
    }
}

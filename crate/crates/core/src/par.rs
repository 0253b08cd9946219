//! Order-preserving parallel map on scoped threads.

/// Applies `f` to every item on at most `jobs` threads. The output order is the
/// input order, so results do not depend on `jobs`.
pub fn map<T: Sync, R: Send>(jobs: usize, items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let jobs = jobs.max(1).min(items.len().max(1));
    if jobs == 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(jobs);
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> =
            items.chunks(chunk).map(|c| scope.spawn(move || c.iter().map(f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

#[cfg(test)]
mod tests {
    #[test]
    fn order_is_independent_of_jobs() {
        let items: Vec<u64> = (0..37).collect();
        let one = super::map(1, &items, |x| x * x);
        for jobs in [2, 3, 8, 64] {
            assert_eq!(super::map(jobs, &items, |x| x * x), one);
        }
        assert!(super::map(4, &[] as &[u8], |x| *x).is_empty());
    }
}

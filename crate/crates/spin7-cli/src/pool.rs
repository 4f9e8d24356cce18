//! Deterministic fan-out: inputs are chunked in order across a scoped
//! thread pool and results are collected back in input order, so the
//! output never depends on the worker count.

pub fn map_ordered<T, R, F>(jobs: usize, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let jobs = jobs.max(1).min(items.len().max(1));
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(jobs);
    let mut out: Vec<Option<R>> = Vec::with_capacity(items.len());
    out.resize_with(items.len(), || None);
    let slots: Vec<(usize, &[T])> = items.chunks(chunk).enumerate().collect();
    let mut results: Vec<(usize, Vec<R>)> = Vec::new();
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = slots
            .into_iter()
            .map(|(idx, part)| scope.spawn(move || (idx, part.iter().map(f).collect::<Vec<R>>())))
            .collect();
        for h in handles {
            results.push(h.join().expect("worker panicked"));
        }
    });
    results.sort_by_key(|(idx, _)| *idx);
    let mut flat = Vec::with_capacity(items.len());
    for (_, mut part) in results {
        flat.append(&mut part);
    }
    flat
}

pub fn default_jobs() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_input_order_for_any_job_count() {
        let items: Vec<u64> = (0..37).collect();
        let expect: Vec<u64> = items.iter().map(|x| x * x).collect();
        for jobs in [1, 2, 3, 8, 64] {
            assert_eq!(map_ordered(jobs, &items, |x| x * x), expect);
        }
    }
}

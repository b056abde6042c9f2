use std::sync::atomic::{AtomicU64, Ordering};

/// Splits `0..count` into at most `jobs` contiguous ranges of near-equal size.
pub(crate) fn ranges(count: u64, jobs: usize) -> Vec<(u64, u64)> {
    let parts = (jobs.max(1) as u64).min(count.max(1));
    let base = count / parts;
    let extra = count % parts;
    let mut out = Vec::with_capacity(parts as usize);
    let mut start = 0;
    for i in 0..parts {
        let len = base + u64::from(i < extra);
        out.push((start, start + len));
        start += len;
    }
    out
}

/// Runs `work` on each range, on scoped threads when `jobs > 1`. Results come
/// back in range order.
pub(crate) fn run<T: Send>(count: u64, jobs: usize, work: impl Fn(u64, u64) -> T + Sync) -> Vec<T> {
    let parts = ranges(count, jobs);
    if parts.len() == 1 {
        return vec![work(parts[0].0, parts[0].1)];
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = parts
            .iter()
            .map(|&(a, b)| {
                let work = &work;
                s.spawn(move || work(a, b))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("oracle worker panicked"))
            .collect()
    })
}

/// Best `(value, index)` of a range: highest value, then lowest index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Best {
    pub value: u64,
    pub index: u64,
}

impl Best {
    pub(crate) fn offer(slot: &mut Option<Best>, value: u64, index: u64) {
        match slot {
            Some(b) if b.value > value || (b.value == value && b.index <= index) => {}
            _ => *slot = Some(Best { value, index }),
        }
    }

    pub(crate) fn merge(parts: impl IntoIterator<Item = Option<Best>>) -> Option<Best> {
        let mut best = None;
        for b in parts.into_iter().flatten() {
            Best::offer(&mut best, b.value, b.index);
        }
        best
    }
}

/// Lowest index found so far by any worker, shared for early exit.
pub(crate) struct FirstHit(AtomicU64);

impl FirstHit {
    pub(crate) fn new() -> Self {
        FirstHit(AtomicU64::new(u64::MAX))
    }

    pub(crate) fn record(&self, index: u64) {
        self.0.fetch_min(index, Ordering::Relaxed);
    }

    /// True once some worker has a hit at an index below `index`.
    pub(crate) fn beaten(&self, index: u64) -> bool {
        self.0.load(Ordering::Relaxed) < index
    }

    pub(crate) fn get(&self) -> Option<u64> {
        match self.0.load(Ordering::Relaxed) {
            u64::MAX => None,
            i => Some(i),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_cover_everything() {
        assert_eq!(ranges(10, 3), [(0, 4), (4, 7), (7, 10)]);
        assert_eq!(ranges(2, 8), [(0, 1), (1, 2)]);
        assert_eq!(ranges(0, 4), [(0, 0)]);
        assert_eq!(ranges(5, 0), [(0, 5)]);
    }

    #[test]
    fn best_prefers_low_index_on_ties() {
        let m = Best::merge([
            Some(Best { value: 3, index: 7 }),
            Some(Best { value: 3, index: 2 }),
            None,
        ]);
        assert_eq!(m, Some(Best { value: 3, index: 2 }));
    }
}

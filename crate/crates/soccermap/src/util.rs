//! Small shared helpers: field constants, seeded RNG, worker control.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Pitch length in meters (x axis, attack runs towards +x after normalization).
pub const FIELD_LENGTH: f64 = 104.0;
/// Pitch width in meters (y axis).
pub const FIELD_WIDTH: f64 = 68.0;
/// Center of the goal the attacking team shoots at, in meters.
pub const GOAL: (f64, f64) = (FIELD_LENGTH, FIELD_WIDTH / 2.0);
/// Grid cells along the pitch length (1 m per cell).
pub const GRID_NX: usize = FIELD_LENGTH as usize;
/// Grid cells along the pitch width (1 m per cell).
pub const GRID_NY: usize = FIELD_WIDTH as usize;

/// Deterministic RNG used everywhere a seed is accepted.
///
/// ChaCha keeps streams stable across platforms and `rand` releases.
pub type Rng = ChaCha12Rng;

/// Build the crate-wide RNG from a user seed and a stream label, so
/// independent consumers of one seed do not share a stream.
pub fn seeded_rng(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Worker cap: `SMAP_THREADS` when set, otherwise the machine's parallelism.
pub fn worker_count() -> usize {
    if let Ok(v) = std::env::var("SMAP_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Apply `f` to every index in `0..n`, in parallel across at most
/// [`worker_count`] threads, collecting results in index order so the
/// output is independent of scheduling.
pub fn parallel_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = worker_count().min(n.max(1));
    if workers <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let mut out: Vec<Option<T>> = (0..n).map(|_| None).collect();
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots = std::sync::Mutex::new(&mut out);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let v = f(i);
                let mut guard = slots.lock().unwrap();
                guard[i] = Some(v);
            });
        }
    });
    out.into_iter().map(|v| v.unwrap()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_map_preserves_order() {
        let v = parallel_map(100, |i| i * i);
        assert_eq!(v, (0..100).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn seeded_rng_streams_differ() {
        use rand::RngCore;
        let mut a = seeded_rng(7, 0);
        let mut b = seeded_rng(7, 1);
        let mut c = seeded_rng(7, 0);
        assert_ne!(a.next_u64(), b.next_u64());
        let mut a2 = seeded_rng(7, 0);
        assert_eq!(a2.next_u64(), c.next_u64());
    }
}

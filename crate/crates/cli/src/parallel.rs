//! Independent simulation replications spread over threads. Every
//! replication owns its random substreams, so the results do not depend on
//! scheduling; they are returned in replication order.

use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Mutex;
use std::thread;

pub fn available_threads() -> usize {
    thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Runs `f(0..n)` on up to `threads` workers. Returns the first error in
/// replication order, if any.
pub fn run_replications<T, E, F>(n: u32, threads: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(u32) -> Result<T, E> + Sync,
{
    let workers = threads.clamp(1, n.max(1) as usize);
    let next = AtomicU32::new(0);
    let slots: Mutex<Vec<Option<Result<T, E>>>> = Mutex::new((0..n).map(|_| None).collect());
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let r = next.fetch_add(1, Ordering::Relaxed);
                if r >= n {
                    break;
                }
                let out = f(r);
                slots.lock().expect("no poisoned lock")[r as usize] = Some(out);
            });
        }
    });
    slots.into_inner().expect("no poisoned lock").into_iter().map(|s| s.expect("every replication ran")).collect()
}

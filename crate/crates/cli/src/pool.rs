//! Bounded worker pool that preserves input order in its output.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Apply `work` to every item with up to `jobs` worker threads. Results come
/// back in input order regardless of completion order.
pub fn run_ordered<I, O, F>(items: &[I], jobs: usize, work: F) -> Vec<O>
where
    I: Sync,
    O: Send,
    F: Fn(&I) -> O + Sync,
{
    if jobs <= 1 || items.len() <= 1 {
        return items.iter().map(&work).collect();
    }
    let slots: Mutex<Vec<Option<O>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(items.len()) {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= items.len() {
                    break;
                }
                let result = work(&items[idx]);
                slots.lock().unwrap()[idx] = Some(result);
            });
        }
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|o| o.expect("every slot filled"))
        .collect()
}

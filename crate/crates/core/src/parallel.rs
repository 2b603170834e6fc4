use std::sync::OnceLock;

/// Caps internal parallelism when set to a positive integer.
pub const THREADS_ENV: &str = "SCATTERPTYCH_THREADS";

fn capped_pool() -> Option<&'static rayon::ThreadPool> {
    static POOL: OnceLock<Option<rayon::ThreadPool>> = OnceLock::new();
    POOL.get_or_init(|| {
        let n = std::env::var(THREADS_ENV)
            .ok()?
            .trim()
            .parse::<usize>()
            .ok()?;
        if n == 0 {
            return None;
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()
    })
    .as_ref()
}

/// Runs `f` on a pool limited by `SCATTERPTYCH_THREADS`, or on the global
/// pool when the variable is unset.
pub fn with_thread_cap<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    match capped_pool() {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

//! Subcommand implementations.

pub mod fit;
pub mod oracle_check;
pub mod range;
pub mod sweep;

use crate::CliError;

/// Runs `work` on a dedicated rayon pool when a worker count was requested,
/// on the default global pool otherwise. Outputs are sorted after the
/// parallel phase, so the pool size never changes the bytes produced.
pub fn with_threads<T: Send>(
    threads: Option<usize>,
    work: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match threads {
        None => Ok(work()),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::Failure(format!("cannot build thread pool: {e}")))
            .map(|pool| pool.install(work)),
    }
}

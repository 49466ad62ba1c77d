//! Parallel dephasing ensembles.
//!
//! Realizations run on the rayon pool in batches; each batch is summed into
//! the accumulator in realization order, so the average does not depend on
//! the number of threads.

use fslwalk_core::walk::{run_realization, NoiseAccumulator, NoiseSpec, NoisyOutcome, WalkError, Walker, WalkerState};
use rayon::prelude::*;

/// Realizations computed per thread before a reduction.
const BATCH_PER_THREAD: usize = 4;

/// Ensemble average over `noise.realizations` trajectories.
///
/// At `epsilon = 0` every realization is the clean walk, so one trajectory is
/// computed and reported as the average.
pub fn evolve_noisy_parallel(
    walker: &Walker<'_>,
    initial: &WalkerState,
    steps: usize,
    noise: &NoiseSpec,
    record_every: usize,
) -> Result<NoisyOutcome, WalkError> {
    noise.validate()?;
    if noise.epsilon == 0.0 {
        let trace = run_realization(walker, initial, steps, noise, 0, record_every)?;
        return Ok(NoisyOutcome {
            steps: trace.steps,
            averages: trace.marginals,
            realizations: noise.realizations,
            leakage: trace.leakage,
        });
    }
    let batch = (rayon::current_num_threads() * BATCH_PER_THREAD).max(1);
    let mut acc = NoiseAccumulator::new();
    let mut start = 0;
    while start < noise.realizations {
        let end = (start + batch).min(noise.realizations);
        let traces = (start..end)
            .into_par_iter()
            .map(|r| run_realization(walker, initial, steps, noise, r, record_every))
            .collect::<Result<Vec<_>, _>>()?;
        traces.iter().for_each(|t| acc.add(t));
        start = end;
    }
    Ok(acc.finish())
}

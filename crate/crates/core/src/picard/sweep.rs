use serde::{Deserialize, Serialize};

use super::{run, Family, InitialData, SolverConfig, Verdict};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub amplitude: f64,
    pub verdict: Verdict,
    pub iterations: usize,
    pub rho_bar: Option<f64>,
    pub final_triple: f64,
    /// Added by bracket refinement.
    pub refined: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub entries: Vec<SweepEntry>,
    /// Largest convergent amplitude.
    pub a_star: Option<f64>,
    /// `(largest converged below the boundary, smallest non-converged)`.
    pub bracket: Option<(f64, f64)>,
    /// Converged amplitudes above a non-converged one.
    pub exceptions: Vec<f64>,
    /// At most one boundary exception.
    pub monotone: bool,
    pub rounds: usize,
    /// Bracket before the first round and after each round.
    pub brackets: Vec<(f64, f64)>,
}

fn evaluate(cfg: &SolverConfig, family: Family, seed: u64, a: f64, refined: bool) -> Result<SweepEntry> {
    let data = InitialData::generate(&cfg.grid()?, family, a, seed)?;
    let r = run(cfg, &data)?;
    Ok(SweepEntry {
        amplitude: a,
        verdict: r.verdict,
        iterations: r.iterations(),
        rho_bar: r.trace.rho_bar(),
        final_triple: r.trace.rows.last().map_or(f64::NAN, |x| x.triple),
        refined,
    })
}

fn summarize(entries: &mut [SweepEntry]) -> (Option<f64>, Option<(f64, f64)>, Vec<f64>) {
    entries.sort_by(|a, b| a.amplitude.total_cmp(&b.amplitude));
    let ok = |e: &SweepEntry| e.verdict == Verdict::Converged;
    let a_star = entries.iter().filter(|e| ok(e)).map(|e| e.amplitude).last();
    let first_bad = entries.iter().position(|e| !ok(e));
    let (bracket, exceptions) = match first_bad {
        None => (None, Vec::new()),
        Some(i) => {
            let exc = entries[i..].iter().filter(|e| ok(e)).map(|e| e.amplitude).collect();
            let br = if i > 0 { Some((entries[i - 1].amplitude, entries[i].amplitude)) } else { None };
            (br, exc)
        }
    };
    (a_star, bracket, exceptions)
}

/// Runs every amplitude, then refines the convergence bracket with three
/// equally spaced interior points per round, so its width drops 4x a round.
pub fn amplitude_sweep(
    cfg: &SolverConfig,
    family: Family,
    seed: u64,
    amplitudes: &[f64],
    refine_rounds: usize,
) -> Result<SweepReport> {
    if amplitudes.len() < 3 {
        return Err(Error::InvalidParameter(format!("a sweep needs at least 3 amplitudes, got {}", amplitudes.len())));
    }
    let mut entries = amplitudes.iter().map(|&a| evaluate(cfg, family, seed, a, false)).collect::<Result<Vec<_>>>()?;
    let (mut a_star, mut bracket, mut exceptions) = summarize(&mut entries);
    let mut rounds = 0;
    let mut brackets: Vec<(f64, f64)> = bracket.into_iter().collect();
    for _ in 0..refine_rounds {
        let Some((lo, hi)) = bracket else { break };
        for i in 1..=3 {
            entries.push(evaluate(cfg, family, seed, lo + (hi - lo) * i as f64 / 4.0, true)?);
        }
        rounds += 1;
        (a_star, bracket, exceptions) = summarize(&mut entries);
        brackets.extend(bracket);
    }
    let monotone = exceptions.len() <= 1;
    Ok(SweepReport { entries, a_star, bracket, exceptions, monotone, rounds, brackets })
}

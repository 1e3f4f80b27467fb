//! Sample-and-evaluate access to a prompt's base policy and reward model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::instances::{ProblemInstance, Prompt};

/// One oracle response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Draw {
    pub response_index: usize,
    pub base_likelihood: f64,
    pub modeled_reward: f64,
}

/// Seeded oracle over a single prompt. Every draw from the base policy is a
/// query; auxiliary coins are free.
#[derive(Debug, Clone)]
pub struct OracleSession<'a> {
    prompt: &'a Prompt,
    prompt_index: usize,
    reward_cap: f64,
    seed: u64,
    queries_used: u64,
    rng: ChaCha8Rng,
}

/// Opens a session on the prompt named `prompt_id`.
pub fn open_session<'a>(
    instance: &'a ProblemInstance,
    prompt_id: &str,
    seed: u64,
) -> Result<OracleSession<'a>> {
    let index = instance.prompt_index(prompt_id)?;
    Ok(OracleSession::new(instance, index, seed))
}

impl<'a> OracleSession<'a> {
    /// Opens a session by prompt position. Panics if out of range.
    pub fn new(instance: &'a ProblemInstance, prompt_index: usize, seed: u64) -> Self {
        let prompt = instance.prompt(prompt_index);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id(prompt.id()));
        Self {
            prompt,
            prompt_index,
            reward_cap: instance.reward_cap(),
            seed,
            queries_used: 0,
            rng,
        }
    }

    pub fn prompt(&self) -> &'a Prompt {
        self.prompt
    }

    pub fn prompt_index(&self) -> usize {
        self.prompt_index
    }

    pub fn reward_cap(&self) -> f64 {
        self.reward_cap
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn queries_used(&self) -> u64 {
        self.queries_used
    }

    /// One query.
    pub fn draw(&mut self) -> Draw {
        self.queries_used = self.queries_used.saturating_add(1);
        let u = 1.0 - self.rng.random::<f64>();
        let cdf = &self.prompt.cdf;
        let target = u * cdf[cdf.len() - 1];
        let index = cdf.partition_point(|&c| c < target).min(cdf.len() - 1);
        Draw {
            response_index: index,
            base_likelihood: self.prompt.base_policy.get(index),
            modeled_reward: self.prompt.reward_model[index],
        }
    }

    /// `n` i.i.d. queries.
    pub fn draw_batch(&mut self, n: usize) -> Vec<Draw> {
        (0..n).map(|_| self.draw()).collect()
    }

    /// Uniform coin in `[0, 1)` that does not count as a query.
    pub fn coin(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

fn stream_id(id: &str) -> u64 {
    // FNV-1a, fixed so streams do not depend on the platform hasher.
    id.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Mixes a base seed with a list of tags into an independent child seed.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    let mut state = splitmix(base);
    for &t in tags {
        state = splitmix(state ^ splitmix(t.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    state
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

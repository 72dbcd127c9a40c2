//! Uniform random chord diagrams with a prescribed number of crossings.
//!
//! Three samplers share one RNG contract: a ChaCha8 generator seeded from the
//! 64-bit seed, with stream `i` reserved for replicate (or chain) `i`. Each
//! replicate depends only on its own stream, so output is identical for any
//! thread count.

use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagram::{decode, ChordDiagram};
use crate::error::{Error, Result};
use crate::exact::{max_crossings, total_diagrams, touchard_riordan, ln_ratio};
use crate::table::{CountTable, DpMode, DEFAULT_CHECKPOINT_INTERVAL, DEFAULT_MEMORY_BUDGET};

/// Rejection sampling is refused below this acceptance probability.
pub const REJECTION_FLOOR: f64 = 1e-6;
pub const DEFAULT_MCMC_CHAINS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Rejection,
    Mcmc,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Rejection => "rejection",
            Method::Mcmc => "mcmc",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "rejection" => Ok(Method::Rejection),
            "mcmc" => Ok(Method::Mcmc),
            _ => Err(Error::Config(format!("unknown sampler method {s:?}"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Crossing weight of the MCMC target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Tilt {
    /// Tuned during burn-in so that the mean crossing count tracks `m`.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub method: Method,
    /// Burn-in steps per chain; `None` picks `20 n^2`.
    pub mcmc_burn_in: Option<u64>,
    /// Minimum steps between retained states; `None` picks `4 n^2`.
    pub mcmc_thin: Option<u64>,
    pub tilt: Tilt,
    pub mcmc_chains: usize,
    pub checkpoint_interval: usize,
    /// `None` chooses by size.
    pub dp_mode: Option<DpMode>,
    pub memory_budget: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: 0,
            method: Method::Exact,
            mcmc_burn_in: None,
            mcmc_thin: None,
            tilt: Tilt::Auto,
            mcmc_chains: DEFAULT_MCMC_CHAINS,
            checkpoint_interval: DEFAULT_CHECKPOINT_INTERVAL,
            dp_mode: None,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }
}

impl SamplerConfig {
    pub fn with_seed(seed: u64, method: Method) -> Self {
        SamplerConfig { seed, method, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mcmc_burn_in == Some(0) || self.mcmc_thin == Some(0) {
            return Err(Error::Config("burn-in and thin must be at least 1".into()));
        }
        if let Tilt::Fixed(t) = self.tilt {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("tilt must be positive, got {t}")));
            }
        }
        if self.mcmc_chains == 0 || self.checkpoint_interval == 0 {
            return Err(Error::Config("chains and checkpoint interval must be positive".into()));
        }
        Ok(())
    }

    fn burn_in(&self, n: usize) -> u64 {
        self.mcmc_burn_in.unwrap_or(20 * (n * n) as u64).max(1)
    }

    fn thin(&self, n: usize) -> u64 {
        self.mcmc_thin.unwrap_or(4 * (n * n) as u64).max(1)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Accepted fraction of proposals (rejection: of random matchings).
    pub acceptance_rate: Option<f64>,
    /// Total steps or draws consumed.
    pub chain_length: u64,
    /// MCMC: fraction of post-burn-in states with exactly `m` crossings.
    pub hit_rate: Option<f64>,
    /// MCMC: tilt used after burn-in, per chain.
    pub tilts: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub n: usize,
    pub m: usize,
    pub method: Method,
    pub seed: u64,
    pub diagrams: Vec<ChordDiagram>,
    pub diagnostics: Diagnostics,
}

#[derive(Serialize)]
struct SampleLine<'a> {
    n: usize,
    m: usize,
    method: Method,
    seed: u64,
    index: usize,
    pairs: &'a ChordDiagram,
}

impl SampleBatch {
    /// One JSON object per diagram and line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for (index, d) in self.diagrams.iter().enumerate() {
            let line = SampleLine {
                n: self.n,
                m: self.m,
                method: self.method,
                seed: self.seed,
                index,
                pairs: d,
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Generator for replicate `index` under `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform perfect matching of `0..2n`: the smallest free point is paired
/// with a uniformly chosen free point, repeatedly.
pub fn random_matching<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ChordDiagram {
    let size = 2 * n;
    let mut pool: Vec<usize> = (0..size).collect();
    let mut pos: Vec<usize> = (0..size).collect();
    let mut partner = vec![usize::MAX; size];
    let remove = |pool: &mut Vec<usize>, pos: &mut Vec<usize>, v: usize| {
        let i = pos[v];
        let last = *pool.last().expect("nonempty pool");
        pool[i] = last;
        pos[last] = i;
        pool.pop();
    };
    for p in 0..size {
        if partner[p] != usize::MAX {
            continue;
        }
        remove(&mut pool, &mut pos, p);
        let q = pool[rng.gen_range(0..pool.len())];
        remove(&mut pool, &mut pos, q);
        partner[p] = q;
        partner[q] = p;
    }
    ChordDiagram::from_partner_unchecked(partner)
}

fn check_m(n: usize, m: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    if m > max_crossings(n) {
        return Err(Error::EmptySupport { n, m });
    }
    Ok(())
}

fn verify(diagrams: &[ChordDiagram], n: usize, m: usize) -> Result<()> {
    for d in diagrams {
        if d.n() != n || d.crossing_count() != m as u64 {
            return Err(Error::InvalidDiagram(format!(
                "sampler emitted a diagram with {} chords and {} crossings, expected ({n}, {m})",
                d.n(),
                d.crossing_count()
            )));
        }
    }
    Ok(())
}

/// Backward sampling through the count table, then decoding.
pub fn sample_exact(n: usize, m: usize, count: usize, config: &SamplerConfig) -> Result<SampleBatch> {
    config.validate()?;
    check_m(n, m)?;
    let mode = config.dp_mode.unwrap_or_else(|| DpMode::auto(n));
    let table =
        CountTable::build_with_budget(n, m, mode, config.checkpoint_interval, config.memory_budget)?;
    sample_from_table(&table, count, config)
}

/// Draws from a prebuilt table; replicate `i` uses stream `i`.
pub fn sample_from_table(
    table: &CountTable,
    count: usize,
    config: &SamplerConfig,
) -> Result<SampleBatch> {
    let (n, m) = (table.n(), table.m());
    if table.is_empty() {
        return Err(Error::EmptySupport { n, m });
    }
    let mut rngs: Vec<ChaCha8Rng> = (0..count as u64).map(|i| stream_rng(config.seed, i)).collect();
    let pairs = table.sample_pairs(&mut rngs)?;
    let diagrams = pairs
        .par_iter()
        .map(decode)
        .collect::<Result<Vec<ChordDiagram>>>()?;
    verify(&diagrams, n, m)?;
    Ok(SampleBatch {
        n,
        m,
        method: Method::Exact,
        seed: config.seed,
        diagrams,
        diagnostics: Diagnostics { chain_length: count as u64, ..Diagnostics::default() },
    })
}

/// Exact acceptance probability `T(n, m) / (2n-1)!!` of rejection sampling.
pub fn rejection_acceptance(n: usize, m: usize) -> f64 {
    ln_ratio(&touchard_riordan(n, m), &total_diagrams(n)).exp()
}

/// Uniform random matchings filtered on the crossing count.
pub fn sample_rejection(
    n: usize,
    m: usize,
    count: usize,
    config: &SamplerConfig,
) -> Result<SampleBatch> {
    config.validate()?;
    check_m(n, m)?;
    let rate = rejection_acceptance(n, m);
    if rate < REJECTION_FLOOR {
        return Err(Error::LowAcceptance { rate, floor: REJECTION_FLOOR });
    }
    let draws: Vec<(ChordDiagram, u64)> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(config.seed, i);
            let mut tries = 0u64;
            loop {
                tries += 1;
                let d = random_matching(n, &mut rng);
                if d.crossing_count() == m as u64 {
                    return (d, tries);
                }
            }
        })
        .collect();
    let tries: u64 = draws.iter().map(|(_, t)| t).sum();
    let diagrams: Vec<ChordDiagram> = draws.into_iter().map(|(d, _)| d).collect();
    verify(&diagrams, n, m)?;
    Ok(SampleBatch {
        n,
        m,
        method: Method::Rejection,
        seed: config.seed,
        diagrams,
        diagnostics: Diagnostics {
            acceptance_rate: Some(count as f64 / tries.max(1) as f64),
            chain_length: tries,
            ..Diagnostics::default()
        },
    })
}

/// Metropolis chain on all matchings of `0..2n` with stationary law
/// proportional to `tilt^crossings`. The proposal picks an ordered pair of
/// distinct points uniformly and swaps their partners, which is symmetric.
#[derive(Debug, Clone)]
pub struct TiltedChain {
    partner: Vec<usize>,
    crossings: u64,
    log_tilt: f64,
    proposals: u64,
    accepted: u64,
}

fn crosses(a: usize, b: usize, c: usize, d: usize) -> bool {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    (a < c && c < b) != (a < d && d < b)
}

impl TiltedChain {
    pub fn new(start: &ChordDiagram, tilt: f64) -> Self {
        TiltedChain {
            partner: start.partners().to_vec(),
            crossings: start.crossing_count(),
            log_tilt: tilt.ln(),
            proposals: 0,
            accepted: 0,
        }
    }

    pub fn crossings(&self) -> u64 {
        self.crossings
    }

    pub fn tilt(&self) -> f64 {
        self.log_tilt.exp()
    }

    pub fn log_tilt(&self) -> f64 {
        self.log_tilt
    }

    pub fn set_log_tilt(&mut self, v: f64) {
        self.log_tilt = v;
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.proposals.max(1) as f64
    }

    pub fn diagram(&self) -> ChordDiagram {
        ChordDiagram::from_partner_unchecked(self.partner.clone())
    }

    /// Crossing change when `p` and `q` exchange partners: O(n) scan of the
    /// other chords against the two old and the two new chords.
    pub fn delta(&self, p: usize, q: usize) -> i64 {
        let a = self.partner[p];
        let b = self.partner[q];
        if a == q {
            return 0;
        }
        let mut delta = 0i64;
        for r in 0..self.partner.len() {
            let s = self.partner[r];
            if s < r || r == p || r == q || r == a || r == b {
                continue;
            }
            delta += crosses(p, b, r, s) as i64 + crosses(q, a, r, s) as i64;
            delta -= crosses(p, a, r, s) as i64 + crosses(q, b, r, s) as i64;
        }
        delta += crosses(p, b, q, a) as i64;
        delta -= crosses(p, a, q, b) as i64;
        delta
    }

    fn swap(&mut self, p: usize, q: usize) {
        let a = self.partner[p];
        let b = self.partner[q];
        self.partner[p] = b;
        self.partner[b] = p;
        self.partner[q] = a;
        self.partner[a] = q;
    }

    /// One Metropolis step; returns whether the state changed.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        let size = self.partner.len();
        if size < 4 {
            return false;
        }
        self.proposals += 1;
        let p = rng.gen_range(0..size);
        let mut q = rng.gen_range(0..size - 1);
        if q >= p {
            q += 1;
        }
        if self.partner[p] == q {
            return false;
        }
        let delta = self.delta(p, q);
        let log_accept = delta as f64 * self.log_tilt;
        if log_accept < 0.0 && rng.gen::<f64>().ln() >= log_accept {
            return false;
        }
        self.swap(p, q);
        self.crossings = (self.crossings as i64 + delta) as u64;
        self.accepted += 1;
        true
    }
}

struct ChainOutput {
    diagrams: Vec<ChordDiagram>,
    steps: u64,
    hits: u64,
    post_burn_steps: u64,
    tilt: f64,
    accepted: u64,
    proposals: u64,
}

fn run_chain(
    n: usize,
    m: usize,
    want: usize,
    config: &SamplerConfig,
    stream: u64,
) -> Result<ChainOutput> {
    let mut rng = stream_rng(config.seed, stream);
    let start = random_matching(n, &mut rng);
    let initial_tilt = match config.tilt {
        Tilt::Fixed(t) => t,
        Tilt::Auto => 1.0,
    };
    let mut chain = TiltedChain::new(&start, initial_tilt);
    let burn_in = config.burn_in(n);
    let thin = config.thin(n);
    let target = m as f64;
    let scale = target.max(1.0);
    let mut mean = 0.0;
    let mut tail_sum = 0.0;
    let mut tail_len = 0u64;
    for t in 0..burn_in {
        chain.step(&mut rng);
        let cur = chain.crossings() as f64;
        mean += (cur - mean) / (t + 1) as f64;
        if config.tilt == Tilt::Auto {
            let gain = 1.0 / ((n as f64) * (1.0 + t as f64 / (n * n) as f64).powf(0.6));
            let next = chain.log_tilt() + gain * (target - cur) / scale;
            chain.set_log_tilt(next.clamp(-50.0, 50.0));
            if 2 * t >= burn_in {
                tail_sum += chain.log_tilt();
                tail_len += 1;
            }
        }
    }
    if tail_len > 0 {
        chain.set_log_tilt(tail_sum / tail_len as f64);
    }
    // Hits are rare only when the tilt is badly tuned; give up long before
    // the chain would run forever.
    let patience = thin.saturating_mul(1000).max(10_000_000);
    let mut diagrams = Vec::with_capacity(want);
    let mut since_hit = 0u64;
    let mut since_kept = thin;
    let mut steps = 0u64;
    let mut hits = 0u64;
    while diagrams.len() < want {
        chain.step(&mut rng);
        steps += 1;
        since_kept = since_kept.saturating_add(1);
        since_hit += 1;
        if chain.crossings() == m as u64 {
            hits += 1;
            since_hit = 0;
            if since_kept >= thin {
                diagrams.push(chain.diagram());
                since_kept = 0;
            }
        } else if since_hit > patience {
            return Err(Error::Timeout {
                steps: burn_in + steps,
                tilt: chain.tilt(),
                mean_crossings: mean,
            });
        }
    }
    Ok(ChainOutput {
        diagrams,
        steps: burn_in + steps,
        hits,
        post_burn_steps: steps,
        tilt: chain.tilt(),
        accepted: chain.accepted,
        proposals: chain.proposals,
    })
}

/// Draws from `config.mcmc_chains` independent tilted chains, split as
/// evenly as possible; chain `i` uses stream `i`.
pub fn sample_mcmc(n: usize, m: usize, count: usize, config: &SamplerConfig) -> Result<SampleBatch> {
    config.validate()?;
    check_m(n, m)?;
    if n < 2 {
        return Err(Error::Domain("mcmc sampler needs n >= 2".into()));
    }
    let chains = config.mcmc_chains.min(count.max(1));
    let share = |i: usize| count / chains + usize::from(i < count % chains);
    let outputs = (0..chains)
        .into_par_iter()
        .map(|i| run_chain(n, m, share(i), config, i as u64))
        .collect::<Result<Vec<ChainOutput>>>()?;
    let mut diagnostics = Diagnostics::default();
    let (mut hits, mut post, mut acc, mut prop) = (0, 0, 0, 0);
    let mut diagrams = Vec::with_capacity(count);
    for out in outputs {
        diagnostics.chain_length += out.steps;
        diagnostics.tilts.push(out.tilt);
        hits += out.hits;
        post += out.post_burn_steps;
        acc += out.accepted;
        prop += out.proposals;
        diagrams.extend(out.diagrams);
    }
    diagnostics.hit_rate = Some(hits as f64 / post.max(1) as f64);
    diagnostics.acceptance_rate = Some(acc as f64 / prop.max(1) as f64);
    verify(&diagrams, n, m)?;
    Ok(SampleBatch { n, m, method: Method::Mcmc, seed: config.seed, diagrams, diagnostics })
}

/// Dispatches on `config.method`.
pub fn sample(n: usize, m: usize, count: usize, config: &SamplerConfig) -> Result<SampleBatch> {
    match config.method {
        Method::Exact => sample_exact(n, m, count, config),
        Method::Rejection => sample_rejection(n, m, count, config),
        Method::Mcmc => sample_mcmc(n, m, count, config),
    }
}

//! Seeded slot-level simulators for the three access schemes.
//!
//! Each simulator walks slots (TDMA) or rounds (FDMA) and records one
//! [`CollectionEvent`] per complete collection. Every packet transmission
//! attempt consumes exactly one uniform draw from a ChaCha8 stream, in slot
//! order and, within an FDMA round, in device order. The resulting trace is
//! integrated exactly; feedback is instantaneous and error-free.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{
    integrate_trace, AocTrace, CollectionEvent, PerVector, SchemeKind, TimeUnit, TimingModel,
    TransmissionOrder,
};
use crate::error::{AocError, Result};
use crate::stats::batch_means;

/// Generator used by every simulation run.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.9, SeedableRng::seed_from_u64)";

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    scheme: SchemeKind,
    p: PerVector,
    horizon: u64,
    seed: u64,
    order: TransmissionOrder,
}

impl SimConfig {
    /// `horizon` counts slots for the TDMA schemes and rounds for FDMA.
    pub fn new(scheme: SchemeKind, p: PerVector, horizon: u64, seed: u64) -> Result<Self> {
        if horizon == 0 {
            return Err(AocError::InvalidConfig("horizon must be at least 1".into()));
        }
        let order = TransmissionOrder::identity(p.len());
        Ok(Self {
            scheme,
            p,
            horizon,
            seed,
            order,
        })
    }

    /// Device transmission order within a TDMA round. FDMA ignores it.
    pub fn with_order(mut self, order: TransmissionOrder) -> Result<Self> {
        if order.len() != self.p.len() {
            return Err(AocError::InvalidOrder(format!(
                "order has {} entries but there are {} devices",
                order.len(),
                self.p.len()
            )));
        }
        self.order = order;
        Ok(self)
    }

    pub fn scheme(&self) -> SchemeKind {
        self.scheme
    }

    pub fn per(&self) -> &PerVector {
        &self.p
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn order(&self) -> &TransmissionOrder {
        &self.order
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub trace: AocTrace,
    pub avg_aoc: f64,
    pub collections: usize,
    /// 95% batch-means half-width on `avg_aoc`, in the same unit.
    pub ci_halfwidth: f64,
    pub seed: u64,
    pub rng_algorithm: &'static str,
}

pub fn simulate(config: &SimConfig) -> Result<SimResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    // error probability of the device in each slot position of a round
    let slot_probs: Vec<f64> = config
        .order
        .indices()
        .iter()
        .map(|&d| config.p.as_slice()[d])
        .collect();

    let events = match config.scheme {
        SchemeKind::TdmaNr => run_tdma_nr(&slot_probs, config.horizon, &mut rng),
        SchemeKind::TdmaR => run_tdma_r(&slot_probs, config.horizon, &mut rng),
        SchemeKind::Fdma => run_fdma(config.p.as_slice(), config.horizon, &mut rng),
    };
    if events.len() < 2 {
        return Err(AocError::InsufficientCollections {
            collections: events.len(),
            horizon: config.horizon,
            unit: config.scheme.native_unit().label(),
        });
    }

    let trace = AocTrace::from_events_unchecked(events, config.scheme.native_unit());
    let avg_aoc = integrate_trace(&trace)?;
    let ci_halfwidth = batch_means(&trace).halfwidth;
    Ok(SimResult {
        collections: trace.len(),
        trace,
        avg_aoc,
        ci_halfwidth,
        seed: config.seed,
        rng_algorithm: RNG_ALGORITHM,
    })
}

/// Runs [`simulate`] and expresses the trace and the estimates in milliseconds.
pub fn simulate_ms(config: &SimConfig, timing: &TimingModel) -> Result<SimResult> {
    let unit_ms = timing.unit_ms(config.scheme);
    let native = simulate(config)?;
    Ok(SimResult {
        trace: native.trace.scaled(unit_ms, TimeUnit::Ms)?,
        // integration is linear in the time scale
        avg_aoc: native.avg_aoc * unit_ms,
        collections: native.collections,
        ci_halfwidth: native.ci_halfwidth * unit_ms,
        seed: native.seed,
        rng_algorithm: native.rng_algorithm,
    })
}

fn fails<R: Rng>(rng: &mut R, p: f64) -> bool {
    rng.random::<f64>() < p
}

// Any loss aborts the round; the next slot starts a fresh round with newly
// generated packets, so every completed round resets the age to N slots.
fn run_tdma_nr<R: Rng>(probs: &[f64], horizon: u64, rng: &mut R) -> Vec<CollectionEvent> {
    let n = probs.len();
    let mut events = Vec::new();
    let mut pos = 0;
    for slot in 0..horizon {
        if fails(rng, probs[pos]) {
            pos = 0;
            continue;
        }
        pos += 1;
        if pos == n {
            events.push(CollectionEvent::new((slot + 1) as f64, n as f64));
            pos = 0;
        }
    }
    events
}

// A loss at the first position regenerates the whole batch, which is stamped
// at the start of the next first-position attempt. Later losses retransmit the
// same packet, so the age at completion is 1 + (slots after the first success).
fn run_tdma_r<R: Rng>(probs: &[f64], horizon: u64, rng: &mut R) -> Vec<CollectionEvent> {
    let n = probs.len();
    let mut events = Vec::new();
    let mut pos = 0;
    let mut generated_at = 0;
    for slot in 0..horizon {
        if pos == 0 {
            generated_at = slot;
        }
        if fails(rng, probs[pos]) {
            continue;
        }
        pos += 1;
        if pos == n {
            let done = slot + 1;
            events.push(CollectionEvent::new(done as f64, (done - generated_at) as f64));
            pos = 0;
        }
    }
    events
}

fn run_fdma<R: Rng>(probs: &[f64], horizon: u64, rng: &mut R) -> Vec<CollectionEvent> {
    let mut events = Vec::new();
    for round in 0..horizon {
        // every device transmits, so every device draws
        let mut all_ok = true;
        for &p in probs {
            all_ok &= !fails(rng, p);
        }
        if all_ok {
            events.push(CollectionEvent::new((round + 1) as f64, 1.0));
        }
    }
    events
}

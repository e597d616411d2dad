//! Domain types shared by the analysis, simulation and sweep layers, plus the
//! exact integral of a unit-slope age sawtooth.

use std::fmt;
use std::str::FromStr;

use crate::error::{AocError, Result};

/// Per-device packet error probabilities, in transmission-slot order.
#[derive(Debug, Clone, PartialEq)]
pub struct PerVector {
    probs: Vec<f64>,
}

impl PerVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(AocError::EmptyPerVector);
        }
        for (i, &p) in probs.iter().enumerate() {
            if p == 1.0 {
                return Err(AocError::UnreachableSuccess { device: i + 1 });
            }
            if !(0.0..1.0).contains(&p) {
                return Err(AocError::InvalidProbability {
                    device: i + 1,
                    value: p,
                });
            }
        }
        Ok(Self { probs })
    }

    /// `n` devices sharing the same error probability.
    pub fn uniform(n: usize, p: f64) -> Result<Self> {
        Self::new(vec![p; n])
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.probs.iter().copied()
    }

    /// Success probability `1 - p_i` of each device.
    pub fn success_probs(&self) -> impl Iterator<Item = f64> + '_ {
        self.probs.iter().map(|p| 1.0 - p)
    }

    /// Reorders the devices so that slot `k` carries the device named by `order[k]`.
    pub fn permuted(&self, order: &TransmissionOrder) -> Result<Self> {
        if order.len() != self.len() {
            return Err(AocError::InvalidOrder(format!(
                "order has {} entries but there are {} devices",
                order.len(),
                self.len()
            )));
        }
        Ok(Self {
            probs: order.indices().iter().map(|&d| self.probs[d]).collect(),
        })
    }
}

/// Multiple-access scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemeKind {
    TdmaNr,
    TdmaR,
    Fdma,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [SchemeKind::TdmaNr, SchemeKind::TdmaR, SchemeKind::Fdma];

    pub fn token(self) -> &'static str {
        match self {
            SchemeKind::TdmaNr => "tdma-nr",
            SchemeKind::TdmaR => "tdma-r",
            SchemeKind::Fdma => "fdma",
        }
    }

    pub fn is_tdma(self) -> bool {
        !matches!(self, SchemeKind::Fdma)
    }

    /// Native time unit of the scheme's averages.
    pub fn native_unit(self) -> TimeUnit {
        if self.is_tdma() {
            TimeUnit::Slots
        } else {
            TimeUnit::Rounds
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tdma-nr" => Ok(SchemeKind::TdmaNr),
            "tdma-r" => Ok(SchemeKind::TdmaR),
            "fdma" => Ok(SchemeKind::Fdma),
            other => Err(format!("unknown scheme '{other}'")),
        }
    }
}

/// Slot and round durations in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingModel {
    tdma_slot_ms: f64,
    fdma_round_ms: f64,
}

impl TimingModel {
    pub fn new(tdma_slot_ms: f64, fdma_round_ms: f64) -> Result<Self> {
        for (name, v) in [("tdma_slot_ms", tdma_slot_ms), ("fdma_round_ms", fdma_round_ms)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(AocError::InvalidTiming(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self {
            tdma_slot_ms,
            fdma_round_ms,
        })
    }

    pub fn tdma_slot_ms(&self) -> f64 {
        self.tdma_slot_ms
    }

    pub fn fdma_round_ms(&self) -> f64 {
        self.fdma_round_ms
    }

    /// Duration of one native time unit of `scheme`.
    pub fn unit_ms(&self, scheme: SchemeKind) -> f64 {
        if scheme.is_tdma() {
            self.tdma_slot_ms
        } else {
            self.fdma_round_ms
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeUnit {
    Slots,
    Rounds,
    Ms,
}

impl TimeUnit {
    pub fn label(self) -> &'static str {
        match self {
            TimeUnit::Slots => "slots",
            TimeUnit::Rounds => "rounds",
            TimeUnit::Ms => "ms",
        }
    }
}

impl fmt::Display for TimeUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One successful collection: the age drops to `reset_age` at `completion_time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectionEvent {
    pub completion_time: f64,
    pub reset_age: f64,
}

impl CollectionEvent {
    pub fn new(completion_time: f64, reset_age: f64) -> Self {
        Self {
            completion_time,
            reset_age,
        }
    }
}

/// Sequence of successful collections describing an age sawtooth.
#[derive(Debug, Clone, PartialEq)]
pub struct AocTrace {
    events: Vec<CollectionEvent>,
    unit: TimeUnit,
}

// Slack for the "never resets above the grown age" check, so that traces
// rescaled into milliseconds are not rejected over rounding.
const RESET_SLACK: f64 = 1e-9;

impl AocTrace {
    pub fn new(events: Vec<CollectionEvent>, unit: TimeUnit) -> Result<Self> {
        for (k, e) in events.iter().enumerate() {
            if !(e.completion_time.is_finite() && e.reset_age.is_finite()) {
                return Err(AocError::InvalidTrace(format!("event {k} is not finite")));
            }
            if e.reset_age <= 0.0 {
                return Err(AocError::InvalidTrace(format!(
                    "event {k} has non-positive reset age {}",
                    e.reset_age
                )));
            }
            if k == 0 {
                continue;
            }
            let prev = &events[k - 1];
            let gap = e.completion_time - prev.completion_time;
            if gap <= 0.0 {
                return Err(AocError::InvalidTrace(format!(
                    "completion times not strictly increasing at event {k}"
                )));
            }
            let grown = gap + prev.reset_age;
            if e.reset_age > grown + RESET_SLACK * grown.abs().max(1.0) {
                return Err(AocError::InvalidTrace(format!(
                    "event {k} resets to {} above the grown age {grown}",
                    e.reset_age
                )));
            }
        }
        Ok(Self { events, unit })
    }

    /// Builds a trace the simulator has produced by construction.
    pub(crate) fn from_events_unchecked(events: Vec<CollectionEvent>, unit: TimeUnit) -> Self {
        debug_assert!(events
            .windows(2)
            .all(|w| w[1].completion_time > w[0].completion_time));
        Self { events, unit }
    }

    pub fn events(&self) -> &[CollectionEvent] {
        &self.events
    }

    pub fn unit(&self) -> TimeUnit {
        self.unit
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Multiplies every time and age by `factor`, relabelling the unit.
    pub fn scaled(&self, factor: f64, unit: TimeUnit) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(AocError::InvalidTiming(format!(
                "scale factor must be positive and finite, got {factor}"
            )));
        }
        Ok(Self {
            events: self
                .events
                .iter()
                .map(|e| CollectionEvent::new(e.completion_time * factor, e.reset_age * factor))
                .collect(),
            unit,
        })
    }

    /// Area under the sawtooth between consecutive events `k` and `k + 1`.
    pub fn interval_area(&self, k: usize) -> f64 {
        let gap = self.events[k + 1].completion_time - self.events[k].completion_time;
        self.events[k].reset_age * gap + 0.5 * gap * gap
    }
}

/// Time-average age between the first and the last collection of `trace`.
///
/// Between two collections the age grows with unit slope from the reset value,
/// so each interval contributes `reset * gap + gap^2 / 2` to the area.
pub fn integrate_trace(trace: &AocTrace) -> Result<f64> {
    let events = trace.events();
    if events.len() < 2 {
        return Err(AocError::InsufficientRenewals(events.len()));
    }
    let area: f64 = (0..events.len() - 1).map(|k| trace.interval_area(k)).sum();
    let span = events[events.len() - 1].completion_time - events[0].completion_time;
    Ok(area / span)
}

/// Device transmission order within a TDMA round, stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransmissionOrder {
    indices: Vec<usize>,
}

impl TransmissionOrder {
    pub fn identity(n: usize) -> Self {
        Self {
            indices: (0..n).collect(),
        }
    }

    /// Accepts device ids `1..=N`, as they appear on the command line.
    pub fn from_one_based(devices: &[usize]) -> Result<Self> {
        if devices.is_empty() {
            return Err(AocError::InvalidOrder("empty order".into()));
        }
        let n = devices.len();
        let mut seen = vec![false; n];
        for &d in devices {
            if d == 0 || d > n {
                return Err(AocError::InvalidOrder(format!(
                    "device {d} outside 1..={n}"
                )));
            }
            if std::mem::replace(&mut seen[d - 1], true) {
                return Err(AocError::InvalidOrder(format!("device {d} repeated")));
            }
        }
        Ok(Self {
            indices: devices.iter().map(|d| d - 1).collect(),
        })
    }

    /// The three six-device orders compared in the transmission-order study:
    /// weakest device last, first, and in the middle.
    pub fn study_orders() -> [TransmissionOrder; 3] {
        [
            Self::from_one_based(&[1, 2, 3, 4, 5, 6]).expect("valid"),
            Self::from_one_based(&[6, 1, 2, 3, 4, 5]).expect("valid"),
            Self::from_one_based(&[1, 2, 3, 6, 4, 5]).expect("valid"),
        ]
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// 0-based device index transmitting in each slot of a round.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.indices.iter().map(|i| i + 1).collect()
    }
}

impl fmt::Display for TransmissionOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.one_based().iter().map(|d| d.to_string()).collect();
        f.write_str(&ids.join(","))
    }
}

/// First and second moments of the hitting time of the all-delivered state.
///
/// `first[i]` is the mean number of slots to finish the round starting at slot
/// position `i` (0-based), `second[i]` the matching mean squared hitting time.
#[derive(Debug, Clone, PartialEq)]
pub struct HittingMoments {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    /// Mean hitting time from the second slot position (0 for a single device).
    pub t2s: f64,
}

impl HittingMoments {
    pub fn t1s(&self) -> f64 {
        self.first[0]
    }

    pub fn second_t1(&self) -> f64 {
        self.second[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(events: &[(f64, f64)]) -> AocTrace {
        AocTrace::new(
            events.iter().map(|&(t, r)| CollectionEvent::new(t, r)).collect(),
            TimeUnit::Slots,
        )
        .unwrap()
    }

    #[test]
    fn per_vector_accepts_valid_inputs() {
        assert_eq!(PerVector::new(vec![0.0, 0.0]).unwrap().len(), 2);
        assert_eq!(PerVector::new(vec![0.5, 0.5]).unwrap().len(), 2);
    }

    #[test]
    fn per_vector_rejects_certain_loss() {
        let err = PerVector::new(vec![0.3, 1.0]).unwrap_err();
        assert_eq!(err, AocError::UnreachableSuccess { device: 2 });
        assert!(err.to_string().contains("unreachable success state"));
    }

    #[test]
    fn per_vector_rejects_out_of_range_and_empty() {
        assert!(matches!(
            PerVector::new(vec![-0.1]),
            Err(AocError::InvalidProbability { device: 1, .. })
        ));
        assert!(PerVector::new(vec![1.5]).is_err());
        assert!(PerVector::new(vec![f64::NAN]).is_err());
        assert_eq!(PerVector::new(vec![]), Err(AocError::EmptyPerVector));
    }

    #[test]
    fn timing_model_requires_positive_finite() {
        assert!(TimingModel::new(0.104, 0.224).is_ok());
        assert!(TimingModel::new(0.0, 1.0).is_err());
        assert!(TimingModel::new(1.0, f64::INFINITY).is_err());
        assert!(TimingModel::new(-1.0, 1.0).is_err());
    }

    #[test]
    fn integrate_single_interval() {
        assert_eq!(integrate_trace(&trace(&[(2.0, 2.0), (4.0, 2.0)])).unwrap(), 3.0);
    }

    #[test]
    fn integrate_identical_intervals() {
        let t = trace(&[(2.0, 2.0), (4.0, 2.0), (6.0, 2.0)]);
        assert_eq!(integrate_trace(&t).unwrap(), 3.0);
    }

    #[test]
    fn integrate_uneven_interval() {
        // area = 2*3 + 3^2/2 = 10.5 over a span of 3
        assert_eq!(integrate_trace(&trace(&[(2.0, 2.0), (5.0, 2.0)])).unwrap(), 3.5);
    }

    #[test]
    fn integrate_needs_two_events() {
        let t = trace(&[(2.0, 2.0)]);
        let err = integrate_trace(&t).unwrap_err();
        assert_eq!(err, AocError::InsufficientRenewals(1));
        assert!(err.to_string().contains("insufficient renewal intervals"));
    }

    #[test]
    fn trace_invariants_enforced() {
        let mk = |ev: &[(f64, f64)]| {
            AocTrace::new(
                ev.iter().map(|&(t, r)| CollectionEvent::new(t, r)).collect(),
                TimeUnit::Slots,
            )
        };
        assert!(mk(&[(2.0, 2.0), (2.0, 2.0)]).is_err());
        assert!(mk(&[(2.0, 0.0)]).is_err());
        // age at t = 4 is at most 2 + 2 = 4
        assert!(mk(&[(2.0, 2.0), (4.0, 4.0)]).is_ok());
        assert!(mk(&[(2.0, 2.0), (4.0, 4.5)]).is_err());
    }

    #[test]
    fn orders_validate_permutations() {
        assert!(TransmissionOrder::from_one_based(&[2, 1, 3]).is_ok());
        assert!(TransmissionOrder::from_one_based(&[1, 1, 3]).is_err());
        assert!(TransmissionOrder::from_one_based(&[0, 1]).is_err());
        assert!(TransmissionOrder::from_one_based(&[1, 4, 2]).is_err());
        let o = TransmissionOrder::from_one_based(&[3, 1, 2]).unwrap();
        let p = PerVector::new(vec![0.1, 0.2, 0.3]).unwrap();
        assert_eq!(p.permuted(&o).unwrap().as_slice(), &[0.3, 0.1, 0.2]);
        assert_eq!(o.to_string(), "3,1,2");
    }

    #[test]
    fn scheme_tokens_round_trip() {
        for s in SchemeKind::ALL {
            assert_eq!(s.token().parse::<SchemeKind>().unwrap(), s);
        }
        assert!("tdma".parse::<SchemeKind>().is_err());
    }
}

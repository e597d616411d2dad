//! Frame durations of the OFDM status-update MAC protocols.
//!
//! A packet is a reduced preamble followed by `ceil(coded_bits / data_subcarriers)`
//! OFDM symbols of `fft_size + cp_samples` samples each. A TDMA slot carries one
//! status packet, one ACK and two guard intervals; an FDMA round carries one
//! status packet on a narrow sub-channel and a single guard interval.

use crate::domain::TimingModel;
use crate::error::{AocError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PhyProfile {
    /// Sample rate, in samples per second.
    pub bandwidth_hz: f64,
    /// Length of the reduced preamble (long training sequence only).
    pub preamble_samples: u32,
    /// Device ID plus status data, before channel coding.
    pub payload_bits: u32,
    /// Coded bits per payload bit.
    pub code_rate_inv: u32,
    /// Data subcarriers per OFDM symbol available to one device.
    pub data_subcarriers: u32,
    pub fft_size: u32,
    pub cp_samples: u32,
    pub gi_ms: f64,
    /// Device ID plus ACK field, before channel coding.
    pub ack_payload_bits: u32,
    pub num_devices: u32,
}

impl PhyProfile {
    /// 10 MHz, 96-bit packets, rate-1/2 code, 64-point FFT with 16-sample CP,
    /// 16 us guard interval, all 48 data subcarriers, six devices.
    pub fn tdma_default() -> Self {
        Self {
            bandwidth_hz: 10e6,
            preamble_samples: 160,
            payload_bits: 96,
            code_rate_inv: 2,
            data_subcarriers: 48,
            fft_size: 64,
            cp_samples: 16,
            gi_ms: 0.016,
            ack_payload_bits: 24,
            num_devices: 6,
        }
    }

    /// As [`PhyProfile::tdma_default`] with each device on 48 / 6 = 8 subcarriers.
    pub fn fdma_default() -> Self {
        Self {
            data_subcarriers: 8,
            ..Self::tdma_default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(AocError::InvalidPhy(msg));
        if !(self.bandwidth_hz.is_finite() && self.bandwidth_hz > 0.0) {
            return bad(format!("bandwidth must be positive, got {}", self.bandwidth_hz));
        }
        if !(self.gi_ms.is_finite() && self.gi_ms >= 0.0) {
            return bad(format!("guard interval must be non-negative, got {}", self.gi_ms));
        }
        for (name, v) in [
            ("preamble_samples", self.preamble_samples),
            ("payload_bits", self.payload_bits),
            ("code_rate_inv", self.code_rate_inv),
            ("data_subcarriers", self.data_subcarriers),
            ("fft_size", self.fft_size),
            ("num_devices", self.num_devices),
        ] {
            if v == 0 {
                return bad(format!("{name} must be positive"));
            }
        }
        if self.data_subcarriers > self.fft_size {
            return bad(format!(
                "{} data subcarriers exceed FFT size {}",
                self.data_subcarriers, self.fft_size
            ));
        }
        Ok(())
    }

    fn samples_to_ms(&self, samples: u64) -> f64 {
        samples as f64 * 1e3 / self.bandwidth_hz
    }

    /// Airtime of a packet carrying `payload_bits` uncoded bits.
    pub fn packet_ms(&self, payload_bits: u32) -> f64 {
        let coded = u64::from(payload_bits) * u64::from(self.code_rate_inv);
        let symbols = coded.div_ceil(u64::from(self.data_subcarriers));
        let symbol_samples = u64::from(self.fft_size) + u64::from(self.cp_samples);
        self.samples_to_ms(u64::from(self.preamble_samples) + symbols * symbol_samples)
    }
}

pub fn status_duration_ms(phy: &PhyProfile) -> f64 {
    phy.packet_ms(phy.payload_bits)
}

pub fn ack_duration_ms(phy: &PhyProfile) -> f64 {
    phy.packet_ms(phy.ack_payload_bits)
}

/// Status packet, ACK, and a guard interval after each.
pub fn tdma_slot_ms(phy: &PhyProfile) -> f64 {
    status_duration_ms(phy) + ack_duration_ms(phy) + 2.0 * phy.gi_ms
}

/// One narrow-band status packet and a guard interval; FDMA sends no ACK.
pub fn fdma_round_ms(phy: &PhyProfile) -> f64 {
    status_duration_ms(phy) + phy.gi_ms
}

/// Slot and round durations including MAC overhead.
pub fn practical_timing(tdma: &PhyProfile, fdma: &PhyProfile) -> Result<TimingModel> {
    tdma.validate()?;
    fdma.validate()?;
    TimingModel::new(tdma_slot_ms(tdma), fdma_round_ms(fdma))
}

/// Overhead-free timing where one FDMA round lasts as long as `n` TDMA slots.
pub fn idealized_timing(n: usize, t_td: f64) -> Result<TimingModel> {
    if n == 0 {
        return Err(AocError::InvalidTiming("device count must be at least 1".into()));
    }
    TimingModel::new(t_td, n as f64 * t_td)
}

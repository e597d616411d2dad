//! Average Age of Collection of TDMA-NR, TDMA-R and FDMA.
//!
//! Each average is a renewal-reward ratio. Between successive collections the
//! age grows linearly from its reset value, so the long-run mean is
//! `reset + E[G^2] / (2 E[G])` with `G` the inter-collection time. The schemes
//! differ in how the reset value and the moments of `G` are obtained:
//!
//! * TDMA-NR: the reset is always `N` slots and `G` is the hitting time of the
//!   all-delivered state from slot position 1 of a chain that restarts on any
//!   loss. Both moments come from the same linear system matrix.
//! * TDMA-R: the reset is `1 + tau` where `tau` is the hitting time from slot
//!   position 2. Hitting times are sums of independent geometric variables, so
//!   both moments have closed forms.
//! * FDMA: the reset is one round and `G` is geometric with success
//!   probability `gamma = prod(1 - p_i)`.

use crate::domain::{HittingMoments, PerVector, SchemeKind, TimingModel};
use crate::error::Result;
use crate::linalg::LuFactors;

/// Row-major hitting-time matrix shared by the first- and second-moment
/// systems of TDMA-NR.
///
/// Row `i` reads `-p_i T_1 + T_i - (1 - p_i) T_{i+1}`, the last row omitting the
/// successor term since the all-delivered state has zero hitting time.
pub fn tdma_nr_matrix(p: &PerVector) -> Vec<f64> {
    let n = p.len();
    let mut m = vec![0.0; n * n];
    for (i, pi) in p.iter().enumerate() {
        m[i * n] -= pi;
        m[i * n + i] += 1.0;
        if i + 1 < n {
            m[i * n + i + 1] = -(1.0 - pi);
        }
    }
    m
}

pub fn tdma_nr_moments(p: &PerVector) -> Result<HittingMoments> {
    let n = p.len();
    let lu = LuFactors::factor(n, &tdma_nr_matrix(p))?;
    let first = lu.solve(&vec![1.0; n])?;

    let t1 = first[0];
    let rhs: Vec<f64> = p
        .iter()
        .enumerate()
        .map(|(i, pi)| {
            let next = first.get(i + 1).copied().unwrap_or(0.0);
            1.0 + 2.0 * pi * t1 + 2.0 * (1.0 - pi) * next
        })
        .collect();
    let second = lu.solve(&rhs)?;

    Ok(HittingMoments {
        t2s: first.get(1).copied().unwrap_or(0.0),
        first,
        second,
    })
}

pub fn tdma_nr_avg_aoc_slots(p: &PerVector) -> Result<f64> {
    let m = tdma_nr_moments(p)?;
    Ok(p.len() as f64 + m.second_t1() / (2.0 * m.t1s()))
}

// Sum after sorting, so that the result depends only on the multiset of terms.
fn sorted_sum(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum()
}

/// TDMA-R hitting-time moments.
///
/// `T_i` is the sum of the geometric means `1 / (1 - p_k)` for `k >= i`. The
/// second moment telescopes to
/// `T2_i = (1 + p_i)/(1 - p_i) * T_i + sum_{k>i} 2/(1 - p_k) * T_k`, and the tail
/// sum equals `sum a_k^2 + (sum a_k)^2` over `k > i`. Evaluating that symmetric
/// form over sorted terms makes the result exactly invariant under reordering
/// devices after position `i`.
pub fn tdma_r_moments(p: &PerVector) -> HittingMoments {
    let n = p.len();
    let means: Vec<f64> = p.success_probs().map(|q| 1.0 / q).collect();

    let mut first = Vec::with_capacity(n);
    let mut tail_sq = Vec::with_capacity(n);
    for i in 0..n {
        first.push(sorted_sum(&mut means[i..].to_vec()));
        tail_sq.push(sorted_sum(&mut means[i..].iter().map(|a| a * a).collect::<Vec<_>>()));
    }

    let second: Vec<f64> = p
        .iter()
        .enumerate()
        .map(|(i, pi)| {
            let (rest_sum, rest_sq) = if i + 1 < n {
                (first[i + 1], tail_sq[i + 1])
            } else {
                (0.0, 0.0)
            };
            (1.0 + pi) * means[i] * first[i] + rest_sq + rest_sum * rest_sum
        })
        .collect();

    let moments = HittingMoments {
        t2s: first.get(1).copied().unwrap_or(0.0),
        first,
        second,
    };

    #[cfg(debug_assertions)]
    if let Ok(reference) = chain::TransientChain::tdma_r(p).hitting_moments() {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-8 * b.abs().max(1.0);
        debug_assert!(
            close(moments.t1s(), reference.t1s())
                && close(moments.second_t1(), reference.second_t1()),
            "TDMA-R closed form disagrees with the chain solve for {p:?}"
        );
    }

    moments
}

pub fn tdma_r_avg_aoc_slots(p: &PerVector) -> f64 {
    let m = tdma_r_moments(p);
    1.0 + m.t2s + m.second_t1() / (2.0 * m.t1s())
}

/// Probability that one FDMA round delivers every packet.
pub fn fdma_gamma(p: &PerVector) -> f64 {
    p.success_probs().product()
}

pub fn fdma_avg_aoc_rounds(p: &PerVector) -> f64 {
    let gamma = fdma_gamma(p);
    1.0 + (2.0 - gamma) / (2.0 * gamma)
}

/// Average AoC in the scheme's native unit: TDMA slots or FDMA rounds.
pub fn avg_aoc_units(scheme: SchemeKind, p: &PerVector) -> Result<f64> {
    match scheme {
        SchemeKind::TdmaNr => tdma_nr_avg_aoc_slots(p),
        SchemeKind::TdmaR => Ok(tdma_r_avg_aoc_slots(p)),
        SchemeKind::Fdma => Ok(fdma_avg_aoc_rounds(p)),
    }
}

pub fn avg_aoc_ms(scheme: SchemeKind, p: &PerVector, timing: &TimingModel) -> Result<f64> {
    Ok(avg_aoc_units(scheme, p)? * timing.unit_ms(scheme))
}

pub mod chain {
    //! Transient part of the two TDMA round chains, solved as a generic
    //! absorbing chain. Used to cross-check the closed forms.

    use crate::domain::{HittingMoments, PerVector};
    use crate::error::Result;
    use crate::linalg::LuFactors;

    /// Substochastic transition matrix among slot positions `0..N`; the missing
    /// mass in each row leads to the absorbing all-delivered state.
    #[derive(Debug, Clone)]
    pub struct TransientChain {
        n: usize,
        q: Vec<f64>,
    }

    impl TransientChain {
        /// Any loss restarts the round at position 0.
        pub fn tdma_nr(p: &PerVector) -> Self {
            let n = p.len();
            let mut q = vec![0.0; n * n];
            for (i, pi) in p.iter().enumerate() {
                q[i * n] += pi;
                if i + 1 < n {
                    q[i * n + i + 1] += 1.0 - pi;
                }
            }
            Self { n, q }
        }

        /// A loss at position 0 regenerates (stays at 0); later losses retry
        /// the same position.
        pub fn tdma_r(p: &PerVector) -> Self {
            let n = p.len();
            let mut q = vec![0.0; n * n];
            for (i, pi) in p.iter().enumerate() {
                q[i * n + i] += pi;
                if i + 1 < n {
                    q[i * n + i + 1] += 1.0 - pi;
                }
            }
            Self { n, q }
        }

        pub fn transitions(&self) -> &[f64] {
            &self.q
        }

        /// Solves `(I - Q) t = 1` and `(I - Q) t2 = 1 + 2 Q t`.
        pub fn hitting_moments(&self) -> Result<HittingMoments> {
            let n = self.n;
            let mut a: Vec<f64> = self.q.iter().map(|v| -v).collect();
            for i in 0..n {
                a[i * n + i] += 1.0;
            }
            let lu = LuFactors::factor(n, &a)?;
            let first = lu.solve(&vec![1.0; n])?;
            let rhs: Vec<f64> = (0..n)
                .map(|i| {
                    let qt: f64 = (0..n).map(|j| self.q[i * n + j] * first[j]).sum();
                    1.0 + 2.0 * qt
                })
                .collect();
            let second = lu.solve(&rhs)?;
            Ok(HittingMoments {
                t2s: first.get(1).copied().unwrap_or(0.0),
                first,
                second,
            })
        }
    }
}

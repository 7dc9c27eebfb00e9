//! Single-path simulation of `M_n = max_{k≤n} |S_k|`.
//!
//! Rademacher steps are consumed 64 at a time from the raw generator output
//! (least significant bit first, a set bit meaning +1). Gaussian walks tested
//! against a barrier are refined by exact Brownian-bridge bisection, skipping
//! segments whose crossing probability is below 1e-15.

use crate::error::Result;
use crate::rngcore::Stream;

use super::distribution::{DistributionSpec, Sampler};

#[derive(Clone, Copy)]
struct ByteStep {
    net: i8,
    hi: i8,
    lo: i8,
}

const fn byte_table() -> [ByteStep; 256] {
    let mut table = [ByteStep { net: 0, hi: 0, lo: 0 }; 256];
    let mut b = 0;
    while b < 256 {
        let (mut s, mut hi, mut lo) = (0i8, i8::MIN, i8::MAX);
        let mut j = 0;
        while j < 8 {
            s += if (b >> j) & 1 == 1 { 1 } else { -1 };
            if s > hi {
                hi = s;
            }
            if s < lo {
                lo = s;
            }
            j += 1;
        }
        table[b] = ByteStep { net: s, hi, lo };
        b += 1;
    }
    table
}

static BYTES: [ByteStep; 256] = byte_table();

#[inline]
fn rademacher_bit(word: u64, j: u32) -> i64 {
    if (word >> j) & 1 == 1 {
        1
    } else {
        -1
    }
}

/// Exact `M_n` of a simple random walk.
fn rademacher_max_abs(n: u64, stream: &mut Stream) -> f64 {
    let (mut s, mut hi, mut lo) = (0i64, 0i64, 0i64);
    let mut left = n;
    while left > 0 {
        let word = stream.next_u64();
        let m = left.min(64) as u32;
        let full_bytes = m / 8;
        for k in 0..full_bytes {
            let e = BYTES[((word >> (8 * k)) & 0xff) as usize];
            hi = hi.max(s + i64::from(e.hi));
            lo = lo.min(s + i64::from(e.lo));
            s += i64::from(e.net);
        }
        for j in 8 * full_bytes..m {
            s += rademacher_bit(word, j);
            hi = hi.max(s);
            lo = lo.min(s);
        }
        left -= u64::from(m);
    }
    hi.max(-lo) as f64
}

/// `M_n ≤ h` for a simple random walk, with early exit.
fn rademacher_within(n: u64, h: f64, stream: &mut Stream) -> bool {
    if h >= n as f64 {
        return true;
    }
    if h < 1.0 {
        return false;
    }
    let cap = h.floor() as i64;
    let mut s = 0i64;
    let mut left = n;
    while left > 0 {
        let word = stream.next_u64();
        let m = left.min(64) as u32;
        left -= u64::from(m);
        if s.abs() + i64::from(m) <= cap {
            let mask = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
            s += 2 * i64::from((word & mask).count_ones()) - i64::from(m);
            continue;
        }
        let full_bytes = m / 8;
        for k in 0..full_bytes {
            let e = BYTES[((word >> (8 * k)) & 0xff) as usize];
            if s + i64::from(e.hi) > cap || s + i64::from(e.lo) < -cap {
                return false;
            }
            s += i64::from(e.net);
        }
        for j in 8 * full_bytes..m {
            s += rademacher_bit(word, j);
            if s.abs() > cap {
                return false;
            }
        }
    }
    true
}

/// Crossing exponent below which a bridge segment is refined: the skipped
/// probability `e^{-2d₊/L} + e^{-2d₋/L}` is then below 1e-15.
const BRIDGE_SKIP_EXPONENT: f64 = 35.3;

/// Does the Gaussian bridge from `a` to `b` over `len` steps stay in `(−h, h)`
/// at every interior integer time? Endpoints are already known to be inside.
fn bridge_within(a: f64, b: f64, len: u64, h: f64, stream: &mut Stream) -> bool {
    if len <= 1 {
        return true;
    }
    let d = ((h - a) * (h - b)).min((h + a) * (h + b));
    if 2.0 * d > BRIDGE_SKIP_EXPONENT * len as f64 {
        return true;
    }
    let m = len / 2;
    let (mf, lf) = (m as f64, len as f64);
    let mean = a + (b - a) * mf / lf;
    let sd = (mf * (lf - mf) / lf).sqrt();
    let mid = mean + sd * stream.gaussian();
    if mid.abs() > h {
        return false;
    }
    bridge_within(a, mid, m, h, stream) && bridge_within(mid, b, len - m, h, stream)
}

fn normal_within(n: u64, h: f64, stream: &mut Stream) -> bool {
    if !(h > 0.0) {
        return false;
    }
    let block = ((h * h / 16.0).floor() as u64).clamp(1, n);
    let mut s = 0.0;
    let mut done = 0u64;
    while done < n {
        let len = block.min(n - done);
        let next = s + (len as f64).sqrt() * stream.gaussian();
        if next.abs() > h || !bridge_within(s, next, len, h, stream) {
            return false;
        }
        s = next;
        done += len;
    }
    true
}

/// Plain step-by-step `M_n ≤ h` with early exit.
pub fn stays_within_stepwise(sampler: &Sampler, n: u64, h: f64, stream: &mut Stream) -> bool {
    let mut s = 0.0f64;
    for _ in 0..n {
        s += sampler.draw(stream);
        if s.abs() > h {
            return false;
        }
    }
    true
}

/// Plain step-by-step `M_n`.
pub fn max_abs_stepwise(sampler: &Sampler, n: u64, stream: &mut Stream) -> f64 {
    let mut s = 0.0f64;
    let mut m = 0.0f64;
    for _ in 0..n {
        s += sampler.draw(stream);
        m = m.max(s.abs());
    }
    m
}

/// Path simulator for one law, choosing the fastest exact method per law.
#[derive(Debug, Clone)]
pub struct Walker {
    sampler: Sampler,
}

impl Walker {
    pub fn new(dist: &DistributionSpec) -> Result<Self> {
        Ok(Walker {
            sampler: dist.sampler()?,
        })
    }

    pub fn sampler(&self) -> &Sampler {
        &self.sampler
    }

    /// `M_n` of one path.
    pub fn max_abs(&self, n: u64, stream: &mut Stream) -> f64 {
        match self.sampler {
            Sampler::Rademacher => rademacher_max_abs(n, stream),
            _ => max_abs_stepwise(&self.sampler, n, stream),
        }
    }

    /// Indicator of `M_n ≤ h` for one path. Stops as soon as the outcome is
    /// decided, so the generator is generally left at a path-dependent
    /// position.
    pub fn stays_within(&self, n: u64, h: f64, stream: &mut Stream) -> bool {
        match self.sampler {
            Sampler::Rademacher => rademacher_within(n, h, stream),
            Sampler::StdNormal => normal_within(n, h, stream),
            _ => stays_within_stepwise(&self.sampler, n, h, stream),
        }
    }
}

/// `M_n` for one simulated path of `dist`.
pub fn walk_max_abs(dist: &DistributionSpec, n: u64, stream: &mut Stream) -> Result<f64> {
    Ok(Walker::new(dist)?.max_abs(n, stream))
}

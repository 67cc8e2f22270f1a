//! Per-host request pacing.
//!
//! Each host gets a generic cell rate limiter: requests are granted slots at
//! least `1/rate` apart, with an optional burst allowance. Slots are reserved
//! under the lock and waited for outside it, so concurrent callers queue in
//! reservation order.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

/// Monotonic time source.
pub trait Clock: Send + Sync {
    /// Time elapsed since the clock's origin.
    fn now(&self) -> Duration;
    /// Blocks until `now() >= t`.
    fn sleep_until(&self, t: Duration);

    fn sleep(&self, d: Duration) {
        self.sleep_until(self.now() + d);
    }
}

#[derive(Debug)]
pub struct SystemClock {
    origin: Instant,
}

impl Default for SystemClock {
    fn default() -> Self {
        SystemClock { origin: Instant::now() }
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }

    fn sleep_until(&self, t: Duration) {
        let now = self.now();
        if t > now {
            std::thread::sleep(t - now);
        }
    }
}

/// Clock that advances only when slept on; for tests.
#[derive(Debug, Default)]
pub struct VirtualClock {
    now: Mutex<Duration>,
}

impl Clock for VirtualClock {
    fn now(&self) -> Duration {
        *self.now.lock().unwrap()
    }

    fn sleep_until(&self, t: Duration) {
        let mut now = self.now.lock().unwrap();
        if t > *now {
            *now = t;
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Bucket {
    interval: Duration,
    /// Extra slots a caller may use back to back.
    burst_tolerance: Duration,
    /// Theoretical arrival time of the next conforming request.
    tat: Duration,
}

pub struct RateLimiter {
    clock: Arc<dyn Clock>,
    default_rate: f64,
    buckets: Mutex<HashMap<String, Bucket>>,
}

impl std::fmt::Debug for RateLimiter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RateLimiter").field("default_rate", &self.default_rate).finish()
    }
}

fn interval_for(rate: f64) -> Duration {
    assert!(rate > 0.0 && rate.is_finite(), "rate limit must be positive");
    Duration::from_nanos((1e9 / rate).ceil() as u64)
}

impl RateLimiter {
    pub fn new(clock: Arc<dyn Clock>, default_rate: f64) -> Self {
        interval_for(default_rate);
        RateLimiter { clock, default_rate, buckets: Mutex::new(HashMap::new()) }
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.clock
    }

    /// Sets the ceiling for one host. A burst of 1 means strictly spaced
    /// requests.
    pub fn configure(&self, host: &str, rate: f64, burst: u32) {
        let interval = interval_for(rate);
        let burst_tolerance = interval * burst.max(1).saturating_sub(1);
        let mut buckets = self.buckets.lock().unwrap();
        let tat = buckets.get(host).map(|b| b.tat).unwrap_or_default();
        buckets.insert(host.to_string(), Bucket { interval, burst_tolerance, tat });
    }

    /// Reserves the next slot for `host` without waiting; returns its time.
    pub fn reserve(&self, host: &str) -> Duration {
        let now = self.clock.now();
        let mut buckets = self.buckets.lock().unwrap();
        let default_interval = interval_for(self.default_rate);
        let b = buckets.entry(host.to_string()).or_insert(Bucket {
            interval: default_interval,
            burst_tolerance: Duration::ZERO,
            tat: Duration::ZERO,
        });
        let earliest = b.tat.saturating_sub(b.burst_tolerance);
        let slot = now.max(earliest);
        b.tat = slot.max(b.tat) + b.interval;
        slot
    }

    /// Waits for the next slot for `host`; returns the granted time.
    pub fn acquire(&self, host: &str) -> Duration {
        let slot = self.reserve(host);
        self.clock.sleep_until(slot);
        slot
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn max_in_window(times: &[Duration], window: Duration, closed: bool) -> usize {
        let mut best = 0;
        for (i, &t) in times.iter().enumerate() {
            let n = times[i..]
                .iter()
                .take_while(|&&u| if closed { u <= t + window } else { u < t + window })
                .count();
            best = best.max(n);
        }
        best
    }

    #[test]
    fn spacing_at_ten_per_second() {
        let clock = Arc::new(VirtualClock::default());
        let rl = RateLimiter::new(clock, 10.0);
        let times: Vec<_> = (0..50).map(|_| rl.acquire("api.example.org")).collect();
        assert_eq!(max_in_window(&times, Duration::from_secs(1), false), 10);
        assert!(max_in_window(&times, Duration::from_secs(1), true) <= 11);
    }

    #[test]
    fn hosts_are_independent() {
        let clock = Arc::new(VirtualClock::default());
        let rl = RateLimiter::new(clock, 1.0);
        assert_eq!(rl.acquire("a"), Duration::ZERO);
        assert_eq!(rl.acquire("b"), Duration::ZERO);
        assert_eq!(rl.acquire("a"), Duration::from_secs(1));
    }

    #[test]
    fn burst_allows_back_to_back() {
        let clock = Arc::new(VirtualClock::default());
        let rl = RateLimiter::new(clock, 1.0);
        rl.configure("h", 2.0, 3);
        let times: Vec<_> = (0..3).map(|_| rl.reserve("h")).collect();
        assert!(times.iter().all(|t| *t == Duration::ZERO));
        assert_eq!(rl.reserve("h"), Duration::from_millis(500));
    }

    #[test]
    fn real_clock_paces_threads() {
        let rl = Arc::new(RateLimiter::new(Arc::new(SystemClock::default()), 200.0));
        let mut times: Vec<Duration> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..4)
                .map(|_| {
                    let rl = rl.clone();
                    s.spawn(move || (0..5).map(|_| rl.acquire("h")).collect::<Vec<_>>())
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
        });
        times.sort();
        for w in times.windows(2) {
            assert!(w[1] - w[0] >= Duration::from_millis(5));
        }
    }

    proptest! {
        #[test]
        fn window_ceiling_holds(rate in 1u32..50, n in 1usize..300, gaps in prop::collection::vec(0u64..400, 0..300)) {
            let clock = Arc::new(VirtualClock::default());
            let rl = RateLimiter::new(clock.clone(), rate as f64);
            let mut times = Vec::new();
            for i in 0..n {
                if let Some(g) = gaps.get(i) {
                    clock.sleep(Duration::from_millis(*g % 50));
                }
                times.push(rl.acquire("h"));
            }
            let ceiling = (rate as usize) * 10;
            prop_assert!(max_in_window(&times, Duration::from_secs(10), false) <= ceiling);
        }
    }
}

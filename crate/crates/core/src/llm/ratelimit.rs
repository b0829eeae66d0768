use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

/// Token bucket. `acquire` blocks until a token is available; acquisition is
/// serialized across threads.
#[derive(Debug)]
pub struct RateLimiter {
    capacity: f64,
    per_second: f64,
    state: Mutex<(f64, Instant)>,
}

impl RateLimiter {
    pub fn new(per_second: f64, burst: u32) -> Self {
        let capacity = f64::from(burst.max(1));
        RateLimiter { capacity, per_second: per_second.max(1e-9), state: Mutex::new((capacity, Instant::now())) }
    }

    pub fn acquire(&self) {
        let mut st = self.state.lock().unwrap_or_else(|e| e.into_inner());
        loop {
            let now = Instant::now();
            let refill = now.duration_since(st.1).as_secs_f64() * self.per_second;
            st.0 = (st.0 + refill).min(self.capacity);
            st.1 = now;
            if st.0 >= 1.0 {
                st.0 -= 1.0;
                return;
            }
            let wait = (1.0 - st.0) / self.per_second;
            thread::sleep(Duration::from_secs_f64(wait));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn burst_then_throttle() {
        let rl = RateLimiter::new(50.0, 2);
        let t0 = Instant::now();
        rl.acquire();
        rl.acquire();
        assert!(t0.elapsed() < Duration::from_millis(15));
        rl.acquire();
        assert!(t0.elapsed() >= Duration::from_millis(15));
    }
}

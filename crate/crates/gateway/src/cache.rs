//! Plan cache with a fixed time to live.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use orbitplan::scheduler::ExecutionPlan;
use parking_lot::Mutex;

pub const DEFAULT_TTL: Duration = Duration::from_secs(3600);
pub const TTL_ENV: &str = "ORBITPLAN_CACHE_TTL";

struct Entry {
    plan: Arc<ExecutionPlan>,
    expires_at: Instant,
}

pub struct PlanCache {
    ttl: Duration,
    entries: Mutex<HashMap<String, Entry>>,
}

impl Default for PlanCache {
    fn default() -> Self {
        Self::new(DEFAULT_TTL)
    }
}

impl PlanCache {
    pub fn new(ttl: Duration) -> Self {
        Self {
            ttl,
            entries: Mutex::new(HashMap::new()),
        }
    }

    /// TTL in seconds from the environment, else the default.
    pub fn from_env() -> Self {
        let ttl = std::env::var(TTL_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
            .map_or(DEFAULT_TTL, Duration::from_secs);
        Self::new(ttl)
    }

    pub fn ttl(&self) -> Duration {
        self.ttl
    }

    pub fn get(&self, key: &str) -> Option<Arc<ExecutionPlan>> {
        self.get_at(key, Instant::now())
    }

    /// Expired entries are evicted, never returned.
    pub fn get_at(&self, key: &str, now: Instant) -> Option<Arc<ExecutionPlan>> {
        let mut entries = self.entries.lock();
        match entries.get(key) {
            Some(e) if now < e.expires_at => Some(Arc::clone(&e.plan)),
            Some(_) => {
                entries.remove(key);
                None
            }
            None => None,
        }
    }

    pub fn insert(&self, key: String, plan: Arc<ExecutionPlan>) {
        self.insert_at(key, plan, Instant::now());
    }

    pub fn insert_at(&self, key: String, plan: Arc<ExecutionPlan>, now: Instant) {
        let expires_at = now + self.ttl;
        self.entries.lock().insert(key, Entry { plan, expires_at });
    }

    pub fn len(&self) -> usize {
        self.entries.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

use std::collections::HashMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use coomforge_core::interactive::SessionState;
use parking_lot::Mutex;
use uuid::Uuid;

pub struct SessionRecord {
    pub id: String,
    /// Held for the whole of one request, so requests on one session are
    /// applied in a single total order.
    pub state: Mutex<SessionState>,
    pub created_at: Instant,
    last_touched: Mutex<Instant>,
}

impl SessionRecord {
    pub fn last_touched(&self) -> Instant {
        *self.last_touched.lock()
    }
}

/// In-memory sessions with idle expiry.
pub struct SessionStore {
    sessions: Mutex<HashMap<String, Arc<SessionRecord>>>,
    idle_timeout: Duration,
}

impl SessionStore {
    pub fn new(idle_timeout: Duration) -> Self {
        SessionStore {
            sessions: Mutex::new(HashMap::new()),
            idle_timeout,
        }
    }

    pub fn insert(&self, state: SessionState) -> Arc<SessionRecord> {
        let now = Instant::now();
        let rec = Arc::new(SessionRecord {
            id: Uuid::new_v4().simple().to_string(),
            state: Mutex::new(state),
            created_at: now,
            last_touched: Mutex::new(now),
        });
        self.sessions.lock().insert(rec.id.clone(), rec.clone());
        rec
    }

    /// The live session with this id, marked as used. An expired session is
    /// dropped here even if the sweeper has not run yet.
    pub fn touch(&self, id: &str) -> Option<Arc<SessionRecord>> {
        let mut sessions = self.sessions.lock();
        let rec = sessions.get(id)?.clone();
        let now = Instant::now();
        let mut last = rec.last_touched.lock();
        if now.duration_since(*last) > self.idle_timeout {
            drop(last);
            sessions.remove(id);
            return None;
        }
        *last = now;
        drop(last);
        Some(rec)
    }

    pub fn remove(&self, id: &str) -> bool {
        self.sessions.lock().remove(id).is_some()
    }

    /// Drops idle sessions; returns how many.
    pub fn evict_idle(&self) -> usize {
        let now = Instant::now();
        let mut sessions = self.sessions.lock();
        let before = sessions.len();
        sessions.retain(|_, r| now.duration_since(r.last_touched()) <= self.idle_timeout);
        before - sessions.len()
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn idle_timeout(&self) -> Duration {
        self.idle_timeout
    }
}

//! Wall-clock deadlines for solver probes.

use std::time::{Duration, Instant};

use sortref_core::refine::ProbeTimer;
use sortref_core::Deadline;

#[derive(Debug, Clone, Copy)]
pub struct WallDeadline {
    start: Instant,
    limit: Option<Duration>,
}

impl WallDeadline {
    pub fn new(limit: Option<Duration>) -> Self {
        WallDeadline { start: Instant::now(), limit }
    }
}

impl Deadline for WallDeadline {
    fn expired(&self) -> bool {
        self.limit.is_some_and(|l| self.start.elapsed() >= l)
    }
}

/// Gives every probe its own time limit.
#[derive(Debug, Clone, Copy, Default)]
pub struct WallTimer {
    pub limit: Option<Duration>,
}

impl ProbeTimer for WallTimer {
    type Deadline = WallDeadline;

    fn start(&self) -> WallDeadline {
        WallDeadline::new(self.limit)
    }

    fn elapsed(&self, d: &WallDeadline) -> Option<Duration> {
        Some(d.start.elapsed())
    }
}

//! Abstract Execution Model lifecycle.
//!
//! The manager owns the execution flow of the application through five
//! states. A batch runs in `Running`; `Monitoring` decides whether the
//! achieved quality is acceptable and whether the working mode must
//! change before the next batch.
//!
//! ```text
//! Setup --scheduled--> Configured --start--> Running --run_done--> Monitoring
//!                          ^                    ^                      |
//!                          |                    +----- qos_ok ---------+
//!                          +------- qos_fail ---------------------------+
//!                                              Monitoring --terminated--> Released
//! ```

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExcState {
    Setup,
    Configured,
    Running,
    Monitoring,
    Released,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LifecycleEvent {
    /// The manager scheduled the execution context for the first time.
    Scheduled,
    Start,
    RunDone,
    /// Quality acceptable and the workload is not terminated.
    QosOk,
    /// Quality unacceptable (or the working mode must change); not terminated.
    QosFail,
    Terminated,
}

/// Advance the lifecycle by one event. Any pair outside the transition
/// table is rejected with the offending state and event.
pub fn step_lifecycle(state: ExcState, event: LifecycleEvent) -> Result<ExcState> {
    use ExcState::*;
    use LifecycleEvent::*;
    match (state, event) {
        (Setup, Scheduled) => Ok(Configured),
        (Configured, Start) => Ok(Running),
        (Running, RunDone) => Ok(Monitoring),
        (Monitoring, QosOk) => Ok(Running),
        (Monitoring, QosFail) => Ok(Configured),
        (Monitoring, Terminated) => Ok(Released),
        _ => Err(Error::InvalidTransition { state, event }),
    }
}

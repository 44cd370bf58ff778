use std::collections::VecDeque;
use std::sync::{Arc, Condvar, Mutex, MutexGuard};

use super::aer::AerPacket;

pub const DEFAULT_FIFO_CAPACITY: usize = 4096;

/// Bounded first-in first-out packet buffer.
#[derive(Clone, Debug)]
pub struct EventFifo {
    capacity: usize,
    queue: VecDeque<AerPacket>,
}

impl EventFifo {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "FIFO capacity must be positive");
        EventFifo {
            capacity,
            queue: VecDeque::with_capacity(capacity.min(1 << 16)),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.queue.len() >= self.capacity
    }

    /// Enqueues a packet, handing it back if the buffer is full.
    pub fn push(&mut self, p: AerPacket) -> Result<(), AerPacket> {
        if self.is_full() {
            return Err(p);
        }
        self.queue.push_back(p);
        Ok(())
    }

    pub fn pop(&mut self) -> Option<AerPacket> {
        self.queue.pop_front()
    }

    pub fn drain(&mut self) -> impl Iterator<Item = AerPacket> + '_ {
        self.queue.drain(..)
    }

    pub fn clear(&mut self) {
        self.queue.clear();
    }
}

impl Default for EventFifo {
    fn default() -> Self {
        EventFifo::new(DEFAULT_FIFO_CAPACITY)
    }
}

/// Bounded FIFO shared between threads. `push` blocks while the buffer is
/// full, `pop` blocks while it is empty; `close` releases both sides.
#[derive(Clone, Debug)]
pub struct SharedFifo {
    inner: Arc<Shared>,
}

#[derive(Debug)]
struct Shared {
    capacity: usize,
    state: Mutex<SharedState>,
    not_empty: Condvar,
    not_full: Condvar,
}

#[derive(Debug)]
struct SharedState {
    queue: VecDeque<AerPacket>,
    closed: bool,
}

impl SharedFifo {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "FIFO capacity must be positive");
        SharedFifo {
            inner: Arc::new(Shared {
                capacity,
                state: Mutex::new(SharedState {
                    queue: VecDeque::with_capacity(capacity.min(1 << 16)),
                    closed: false,
                }),
                not_empty: Condvar::new(),
                not_full: Condvar::new(),
            }),
        }
    }

    fn lock(&self) -> MutexGuard<'_, SharedState> {
        self.inner.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn capacity(&self) -> usize {
        self.inner.capacity
    }

    pub fn len(&self) -> usize {
        self.lock().queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Waits for room, then enqueues. Hands the packet back once closed.
    pub fn push(&self, p: AerPacket) -> Result<(), AerPacket> {
        let mut st = self.lock();
        while st.queue.len() >= self.inner.capacity && !st.closed {
            st = self
                .inner
                .not_full
                .wait(st)
                .unwrap_or_else(|e| e.into_inner());
        }
        if st.closed {
            return Err(p);
        }
        st.queue.push_back(p);
        self.inner.not_empty.notify_one();
        Ok(())
    }

    /// Enqueues without waiting; hands the packet back if full or closed.
    pub fn try_push(&self, p: AerPacket) -> Result<(), AerPacket> {
        let mut st = self.lock();
        if st.closed || st.queue.len() >= self.inner.capacity {
            return Err(p);
        }
        st.queue.push_back(p);
        self.inner.not_empty.notify_one();
        Ok(())
    }

    /// Waits for a packet. `None` once the FIFO is closed and drained.
    pub fn pop(&self) -> Option<AerPacket> {
        let mut st = self.lock();
        loop {
            if let Some(p) = st.queue.pop_front() {
                self.inner.not_full.notify_one();
                return Some(p);
            }
            if st.closed {
                return None;
            }
            st = self
                .inner
                .not_empty
                .wait(st)
                .unwrap_or_else(|e| e.into_inner());
        }
    }

    /// No further pushes succeed; queued packets can still be popped.
    pub fn close(&self) {
        self.lock().closed = true;
        self.inner.not_empty.notify_all();
        self.inner.not_full.notify_all();
    }

    pub fn is_closed(&self) -> bool {
        self.lock().closed
    }
}

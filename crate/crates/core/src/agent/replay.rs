//! Fixed-capacity experience store with FIFO overwrite.

use rand::Rng;

/// One interaction: state, executed raw action, reward, successor state.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: Vec<f64>,
    pub reward: f64,
    pub next_state: Vec<f64>,
}

/// Ring buffer of transitions. Once full, each push overwrites the oldest
/// stored entry.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    entries: Vec<Transition>,
    cursor: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay buffer needs positive capacity");
        Self {
            capacity,
            entries: Vec::with_capacity(capacity),
            cursor: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() == self.capacity
    }

    pub fn push(&mut self, transition: Transition) {
        if self.entries.len() < self.capacity {
            self.entries.push(transition);
        } else {
            self.entries[self.cursor] = transition;
            self.cursor = (self.cursor + 1) % self.capacity;
        }
    }

    /// Uniformly samples `batch` transitions (with replacement).
    pub fn sample<R: Rng>(&self, rng: &mut R, batch: usize) -> Vec<Transition> {
        assert!(!self.is_empty(), "cannot sample from an empty buffer");
        (0..batch)
            .map(|_| self.entries[rng.random_range(0..self.entries.len())].clone())
            .collect()
    }

    /// Stored transitions from oldest to newest.
    pub fn iter_oldest_first(&self) -> impl Iterator<Item = &Transition> {
        let (tail, head) = self.entries.split_at(self.cursor.min(self.entries.len()));
        head.iter().chain(tail.iter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn marker(k: usize) -> Transition {
        Transition {
            state: vec![k as f64],
            action: vec![],
            reward: k as f64,
            next_state: vec![],
        }
    }

    #[test]
    fn fills_then_overwrites_oldest() {
        let mut buf = ReplayBuffer::new(3);
        for k in 0..3 {
            buf.push(marker(k));
        }
        assert!(buf.is_full());
        buf.push(marker(3));
        let order: Vec<f64> = buf.iter_oldest_first().map(|t| t.reward).collect();
        assert_eq!(order, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn sampling_draws_stored_entries() {
        let mut buf = ReplayBuffer::new(8);
        for k in 0..5 {
            buf.push(marker(k));
        }
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for t in buf.sample(&mut rng, 32) {
            assert!(t.reward >= 0.0 && t.reward < 5.0);
        }
    }

    proptest! {
        #[test]
        fn overwrite_is_fifo(capacity in 1usize..20, extra in 0usize..40) {
            let mut buf = ReplayBuffer::new(capacity);
            for k in 0..capacity + extra {
                buf.push(marker(k));
            }
            prop_assert_eq!(buf.len(), capacity.min(capacity + extra));
            let order: Vec<usize> = buf.iter_oldest_first().map(|t| t.reward as usize).collect();
            let expected: Vec<usize> = (extra..capacity + extra).collect();
            prop_assert_eq!(order, expected);
        }
    }
}

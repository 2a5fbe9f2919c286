use std::sync::atomic::{AtomicU64, Ordering};

/// Resource limits shared by the generation and checking routines.
///
/// `used` accumulates the number of elements produced by closure
/// computations; `peak` is the largest single closure, the figure compared
/// with `max_closure`.
#[derive(Debug)]
pub struct Budget {
    /// Largest carrier of a materialized product or quotient.
    pub max_carrier: usize,
    /// Largest subuniverse produced by product-tracking generation.
    pub max_closure: usize,
    /// Largest number of valuations an equation check may visit.
    pub max_valuations: u64,
    /// Largest number of tuple evaluations in an exhaustive homomorphism check.
    pub max_hom_checks: u64,
    /// Largest carrier for which the full congruence lattice is computed
    /// (general algebras / algebras with group structure).
    pub max_lattice_carrier: usize,
    pub max_lattice_carrier_group: usize,
    /// Largest number of congruences the lattice enumeration may hold.
    pub max_lattice_size: usize,
    used: AtomicU64,
    peak: AtomicU64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_carrier: 4096,
            max_closure: 1 << 22,
            max_valuations: 10_000_000,
            max_hom_checks: 400_000_000,
            max_lattice_carrier: 16,
            max_lattice_carrier_group: 128,
            max_lattice_size: 20_000,
            used: AtomicU64::new(0),
            peak: AtomicU64::new(0),
        }
    }
}

impl Clone for Budget {
    fn clone(&self) -> Self {
        Budget {
            max_carrier: self.max_carrier,
            max_closure: self.max_closure,
            max_valuations: self.max_valuations,
            max_hom_checks: self.max_hom_checks,
            max_lattice_carrier: self.max_lattice_carrier,
            max_lattice_carrier_group: self.max_lattice_carrier_group,
            max_lattice_size: self.max_lattice_size,
            used: AtomicU64::new(self.used()),
            peak: AtomicU64::new(self.peak()),
        }
    }
}

impl Budget {
    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    pub fn peak(&self) -> u64 {
        self.peak.load(Ordering::Relaxed)
    }

    pub(crate) fn charge(&self, amount: u64) {
        self.used.fetch_add(amount, Ordering::Relaxed);
        self.peak.fetch_max(amount, Ordering::Relaxed);
    }

    pub fn reset_usage(&self) {
        self.used.store(0, Ordering::Relaxed);
        self.peak.store(0, Ordering::Relaxed);
    }
}

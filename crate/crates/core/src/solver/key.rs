use std::cmp::Ordering;
use std::ops::Add;

/// Lexicographic objective value. For the energy objective `secondary` is
/// always zero; for the distance objective `primary` counts whole 1e-9 km
/// units (rounded per leg), so equal-length routes compare equal exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Key {
    pub primary: f64,
    pub secondary: f64,
}

impl Key {
    pub const ZERO: Key = Key { primary: 0.0, secondary: 0.0 };
    pub const INFINITE: Key = Key { primary: f64::INFINITY, secondary: f64::INFINITY };

    pub fn new(primary: f64, secondary: f64) -> Self {
        Self { primary, secondary }
    }

    pub fn cmp(&self, other: &Key) -> Ordering {
        self.primary.total_cmp(&other.primary).then(self.secondary.total_cmp(&other.secondary))
    }

    pub fn lt(&self, other: &Key) -> bool {
        self.cmp(other) == Ordering::Less
    }
}

impl Add for Key {
    type Output = Key;

    fn add(self, rhs: Key) -> Key {
        Key { primary: self.primary + rhs.primary, secondary: self.secondary + rhs.secondary }
    }
}

/// Integer-valued distance unit used for exact tie detection.
pub(crate) const DISTANCE_SCALE: f64 = 1e9;

pub(crate) fn scaled_distance(d: f64) -> f64 {
    (d * DISTANCE_SCALE).round()
}

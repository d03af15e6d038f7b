//! Deterministic skip-list arithmetic: level membership, hop selection and
//! traversal paths.
//!
//! Element `i` participates in the level-`l` linked list if and only if
//! `2^l` divides `i`. A traversal from `i` towards `n` repeatedly follows
//! the longest link available at the current element that does not overtake
//! `n`, which keeps path lengths logarithmic in `n`.

use thiserror::Error;

/// Position of an element in the log. Real elements are numbered from 1;
/// index 0 is reserved for the genesis sentinel.
pub type ElementIndex = u64;

/// Linked-list level.
pub type Level = u8;

/// Largest usable element index. Capping at `2^63` leaves headroom so that
/// `1 << level` arithmetic never overflows for any reachable level.
pub const MAX_INDEX: ElementIndex = 1 << 63;

/// Highest linked-list level compatible with [`MAX_INDEX`].
pub const MAX_LEVEL: Level = 63;

/// Rejected inputs for the traversal arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum TraversalError {
    /// Element 0 is the genesis sentinel; it carries no levels of its own.
    #[error("element 0 carries no linked-list levels")]
    GenesisSentinel,
    /// Hop selection needs the source strictly before the destination.
    #[error("source {from} does not lie before destination {to}")]
    NotBefore {
        from: ElementIndex,
        to: ElementIndex,
    },
    #[error("index {0} exceeds the 2^63 index ceiling")]
    IndexTooLarge(ElementIndex),
}

/// Does `2^level` divide `index`? Zero is divisible by every power of two.
#[inline]
fn level_divides(level: Level, index: ElementIndex) -> bool {
    index & ((1u64 << level) - 1) == 0
}

/// Exponent of the largest power of two dividing `i`: the highest linked
/// list in which element `i` participates.
pub fn max_level(i: ElementIndex) -> Result<Level, TraversalError> {
    if i == 0 {
        return Err(TraversalError::GenesisSentinel);
    }
    if i > MAX_INDEX {
        return Err(TraversalError::IndexTooLarge(i));
    }
    Ok(i.trailing_zeros() as Level)
}

/// Highest level to follow when travelling from `i` towards `n`: the
/// largest `l` such that `2^l` divides `i` (always true for `i = 0`) and
/// the hop `i + 2^l` does not overtake `n`.
pub fn hop_level(i: ElementIndex, n: ElementIndex) -> Result<Level, TraversalError> {
    if n > MAX_INDEX {
        return Err(TraversalError::IndexTooLarge(n));
    }
    if i >= n {
        return Err(TraversalError::NotBefore { from: i, to: n });
    }
    // The level-0 hop i -> i+1 never overtakes n, so there is always at
    // least one candidate.
    let mut best = 0;
    let mut level = 0;
    while level <= MAX_LEVEL && level_divides(level, i) {
        match i.checked_add(1u64 << level) {
            Some(next) if next <= n => best = level,
            _ => break,
        }
        level += 1;
    }
    Ok(best)
}

/// One hop of a traversal; `destination = source + 2^level` always holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hop {
    pub source: ElementIndex,
    pub level: Level,
    pub destination: ElementIndex,
}

/// The sequence of hops chosen by [`hop_level`] from a source element to a
/// destination element. Empty when source and destination coincide.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TraversalPath {
    hops: Vec<Hop>,
}

impl TraversalPath {
    pub fn hops(&self) -> &[Hop] {
        &self.hops
    }

    pub fn hop_count(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    /// Every element the hops touch, in order: the source of the first hop
    /// followed by each destination. Empty for an empty path.
    pub fn elements(&self) -> Vec<ElementIndex> {
        match self.hops.first() {
            None => Vec::new(),
            Some(first) => {
                let mut out = Vec::with_capacity(self.hops.len() + 1);
                out.push(first.source);
                out.extend(self.hops.iter().map(|h| h.destination));
                out
            }
        }
    }
}

/// Full traversal from `i` to `n`, applying [`hop_level`] until `n` is
/// reached exactly. `i = n` yields the empty path.
pub fn traversal_path(i: ElementIndex, n: ElementIndex) -> Result<TraversalPath, TraversalError> {
    if n > MAX_INDEX {
        return Err(TraversalError::IndexTooLarge(n));
    }
    if i > n {
        return Err(TraversalError::NotBefore { from: i, to: n });
    }
    let mut hops = Vec::new();
    let mut current = i;
    while current < n {
        let level = hop_level(current, n)?;
        let destination = current + (1u64 << level);
        hops.push(Hop {
            source: current,
            level,
            destination,
        });
        current = destination;
    }
    Ok(TraversalPath { hops })
}

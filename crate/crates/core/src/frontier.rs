//! Frontier tracking: packed bitmaps and sorted active lists.
//!
//! A [`Bitmap`] marks which vertices (or edge blocks) are valid for the next
//! iteration. Single-threaded mutations keep a popcount cache current; engine
//! phases use [`Bitmap::shared_set`] concurrently (word-atomic, idempotent)
//! and the owner calls [`Bitmap::reconcile`] at the iteration barrier, so the
//! cached count is exact at barriers — the only points where it is read.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::VertexId;

/// Packed bit set over `len` slots backed by 64-bit words.
#[derive(Debug)]
pub struct Bitmap {
    words: Vec<AtomicU64>,
    len: usize,
    popcount: usize,
}

impl Clone for Bitmap {
    fn clone(&self) -> Self {
        Bitmap {
            words: self
                .words
                .iter()
                .map(|w| AtomicU64::new(w.load(Ordering::Relaxed)))
                .collect(),
            len: self.len,
            popcount: self.popcount,
        }
    }
}

impl Bitmap {
    pub fn new(len: usize) -> Self {
        Bitmap {
            words: (0..len.div_ceil(64)).map(|_| AtomicU64::new(0)).collect(),
            len,
            popcount: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.popcount == 0
    }

    /// Set bit `i`; returns true when the bit was newly set. Keeps the
    /// popcount cache exact.
    pub fn set(&mut self, i: u32) -> bool {
        let word = self.words[i as usize / 64].get_mut();
        let mask = 1u64 << (i % 64);
        let newly = *word & mask == 0;
        *word |= mask;
        if newly {
            self.popcount += 1;
        }
        newly
    }

    /// Clear bit `i`; returns true when the bit was previously set.
    pub fn clear(&mut self, i: u32) -> bool {
        let word = self.words[i as usize / 64].get_mut();
        let mask = 1u64 << (i % 64);
        let was = *word & mask != 0;
        *word &= !mask;
        if was {
            self.popcount -= 1;
        }
        was
    }

    pub fn test(&self, i: u32) -> bool {
        self.words[i as usize / 64].load(Ordering::Relaxed) & (1u64 << (i % 64)) != 0
    }

    /// Concurrent set used inside engine phases. Setting the same bit twice
    /// is idempotent; the popcount cache is *not* maintained here and must be
    /// restored with [`Bitmap::reconcile`] at the barrier.
    pub fn shared_set(&self, i: u32) -> bool {
        let mask = 1u64 << (i % 64);
        let prev = self.words[i as usize / 64].fetch_or(mask, Ordering::Relaxed);
        prev & mask == 0
    }

    /// Concurrent clear, the counterpart of [`Bitmap::shared_set`]: word-atomic,
    /// idempotent, popcount cache not maintained until [`Bitmap::reconcile`].
    pub fn shared_clear(&self, i: u32) -> bool {
        let mask = 1u64 << (i % 64);
        let prev = self.words[i as usize / 64].fetch_and(!mask, Ordering::Relaxed);
        prev & mask != 0
    }

    /// Recount the set bits into the popcount cache and return the count.
    pub fn reconcile(&mut self) -> usize {
        self.popcount = self
            .words
            .iter_mut()
            .map(|w| w.get_mut().count_ones() as usize)
            .sum();
        self.popcount
    }

    /// Cached population count; exact at iteration barriers and after any
    /// sequence of single-threaded mutations.
    pub fn popcount(&self) -> usize {
        self.popcount
    }

    pub fn set_all(&mut self) {
        for (idx, w) in self.words.iter_mut().enumerate() {
            let hi = (self.len - idx * 64).min(64);
            *w.get_mut() = if hi == 64 { u64::MAX } else { (1u64 << hi) - 1 };
        }
        self.popcount = self.len;
    }

    pub fn clear_all(&mut self) {
        for w in self.words.iter_mut() {
            *w.get_mut() = 0;
        }
        self.popcount = 0;
    }

    /// Ascending iterator over set bit indices.
    pub fn iter_ones(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(idx, word)| {
            let mut bits = word.load(Ordering::Relaxed);
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let tz = bits.trailing_zeros();
                    bits &= bits - 1;
                    Some(idx as u32 * 64 + tz)
                }
            })
        })
    }

    /// Extract the ascending active list consumed by the push engine.
    pub fn to_active_list(&self) -> ActiveList {
        ActiveList {
            ids: self.iter_ones().collect(),
        }
    }
}

/// Sorted (ascending) list of active vertex ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActiveList {
    pub ids: Vec<VertexId>,
}

impl ActiveList {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.ids
    }
}

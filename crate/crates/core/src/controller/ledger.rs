use std::ops::AddAssign;

/// Memory traffic by category. One unit is one 64-byte transfer, except
/// `rekey_events`, which counts occurrences.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BandwidthLedger {
    pub demand_data: u64,
    /// Re-issued reads after a location misprediction.
    pub second_access: u64,
    /// Compressed images of lines that were all clean, and relocations of
    /// clean lines.
    pub clean_writebacks: u64,
    /// Invalid-line images written to vacated slots.
    pub invalidates: u64,
    pub dirty_writebacks: u64,
    pub metadata_reads: u64,
    pub metadata_writes: u64,
    pub lit_bitmap_accesses: u64,
    pub rekey_events: u64,
}

impl BandwidthLedger {
    pub const NAMES: [&'static str; 9] = [
        "demand_data",
        "second_access",
        "clean_writebacks",
        "invalidates",
        "dirty_writebacks",
        "metadata_reads",
        "metadata_writes",
        "lit_bitmap_accesses",
        "rekey_events",
    ];

    pub fn values(&self) -> [u64; 9] {
        [
            self.demand_data,
            self.second_access,
            self.clean_writebacks,
            self.invalidates,
            self.dirty_writebacks,
            self.metadata_reads,
            self.metadata_writes,
            self.lit_bitmap_accesses,
            self.rekey_events,
        ]
    }

    pub fn entries(&self) -> impl Iterator<Item = (&'static str, u64)> {
        Self::NAMES.into_iter().zip(self.values())
    }

    /// All memory transfers; rekey events are not transfers.
    pub fn total_accesses(&self) -> u64 {
        self.values()[..8].iter().sum()
    }

    pub fn reads(&self) -> u64 {
        self.demand_data + self.second_access + self.metadata_reads
    }
}

impl AddAssign for BandwidthLedger {
    fn add_assign(&mut self, o: Self) {
        self.demand_data += o.demand_data;
        self.second_access += o.second_access;
        self.clean_writebacks += o.clean_writebacks;
        self.invalidates += o.invalidates;
        self.dirty_writebacks += o.dirty_writebacks;
        self.metadata_reads += o.metadata_reads;
        self.metadata_writes += o.metadata_writes;
        self.lit_bitmap_accesses += o.lit_bitmap_accesses;
        self.rekey_events += o.rekey_events;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_excludes_rekeys() {
        let l = BandwidthLedger {
            demand_data: 3,
            invalidates: 2,
            rekey_events: 7,
            ..Default::default()
        };
        assert_eq!(l.total_accesses(), 5);
        assert_eq!(l.entries().count(), 9);
    }
}

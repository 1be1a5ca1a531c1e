//! Pairwise co-occurrence counting over binary attribute flags.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{AttributeProfile, BinaryAttribute, BINARY_ATTRIBUTES};

/// Symmetric 13x13 matrix of instance counts sharing attribute pairs. The
/// diagonal holds per-attribute instance counts. Unset flags never count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CooccurrenceMatrix {
    counts: [[u64; 13]; 13],
}

impl CooccurrenceMatrix {
    pub fn get(&self, a: BinaryAttribute, b: BinaryAttribute) -> u64 {
        self.counts[a.index()][b.index()]
    }

    /// Instances carrying the attribute (the diagonal entry).
    pub fn marginal(&self, a: BinaryAttribute) -> u64 {
        self.get(a, a)
    }

    pub fn rows(&self) -> &[[u64; 13]; 13] {
        &self.counts
    }
}

impl Serialize for CooccurrenceMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let codes: Vec<&str> = BINARY_ATTRIBUTES.iter().map(|a| a.code()).collect();
        let mut s = serializer.serialize_struct("CooccurrenceMatrix", 2)?;
        s.serialize_field("attributes", &codes)?;
        s.serialize_field("matrix", &self.counts)?;
        s.end()
    }
}

/// Count, for every attribute pair, the instances with both flags set true.
pub fn cooccurrence<'a>(
    profiles: impl IntoIterator<Item = &'a AttributeProfile>,
) -> CooccurrenceMatrix {
    let mut counts = [[0u64; 13]; 13];
    for profile in profiles {
        let active: Vec<usize> = BINARY_ATTRIBUTES
            .iter()
            .filter(|&&a| profile.is_true(a))
            .map(|a| a.index())
            .collect();
        for &a in &active {
            for &b in &active {
                counts[a][b] += 1;
            }
        }
    }
    CooccurrenceMatrix { counts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attributes::Provenance;

    fn profile(id: u8, flags: &[(BinaryAttribute, bool)]) -> AttributeProfile {
        let mut p = AttributeProfile::new("v", id);
        for &(attribute, value) in flags {
            p.set_flag(attribute, value, Provenance::Sidecar);
        }
        p
    }

    #[test]
    fn no_instances_gives_the_zero_matrix() {
        let m = cooccurrence([]);
        assert!(m.rows().iter().flatten().all(|&c| c == 0));
    }

    #[test]
    fn single_instance_pair() {
        let p = profile(1, &[(BinaryAttribute::Sv, true), (BinaryAttribute::Ac, true)]);
        let m = cooccurrence([&p]);
        assert_eq!(m.get(BinaryAttribute::Sv, BinaryAttribute::Ac), 1);
        assert_eq!(m.get(BinaryAttribute::Ac, BinaryAttribute::Sv), 1);
        assert_eq!(m.marginal(BinaryAttribute::Sv), 1);
        assert_eq!(m.marginal(BinaryAttribute::Ac), 1);
        assert_eq!(m.get(BinaryAttribute::Sv, BinaryAttribute::St), 0);
    }

    #[test]
    fn false_and_unset_flags_never_count() {
        let p = profile(
            1,
            &[(BinaryAttribute::St, false), (BinaryAttribute::Cam, true)],
        );
        let m = cooccurrence([&p]);
        assert_eq!(m.marginal(BinaryAttribute::St), 0);
        assert_eq!(m.marginal(BinaryAttribute::Cam), 1);
        assert_eq!(m.marginal(BinaryAttribute::Mb), 0, "unset stays unset");
    }

    #[test]
    fn three_profiles_match_exhaustive_pair_counting() {
        use BinaryAttribute::{Ac, Cam, Sv};
        let profiles = [
            profile(1, &[(Sv, true), (Ac, true)]),
            profile(2, &[(Sv, true), (Cam, true)]),
            profile(3, &[(Sv, true), (Ac, true), (Cam, true)]),
        ];
        let m = cooccurrence(profiles.iter());
        assert_eq!(m.marginal(Sv), 3);
        assert_eq!(m.marginal(Ac), 2);
        assert_eq!(m.marginal(Cam), 2);
        assert_eq!(m.get(Sv, Ac), 2);
        assert_eq!(m.get(Sv, Cam), 2);
        assert_eq!(m.get(Ac, Cam), 1);
    }

    proptest::proptest! {
        /// Symmetric with diagonal dominating every row entry.
        #[test]
        fn symmetric_with_marginal_diagonal(seed in proptest::prelude::any::<u64>()) {
            let mut state = seed | 1;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                state >> 40
            };
            let profiles: Vec<AttributeProfile> = (0..20)
                .map(|i| {
                    let mut p = AttributeProfile::new("v", (i + 1) as u8);
                    for attribute in BINARY_ATTRIBUTES {
                        match next() % 3 {
                            0 => p.set_flag(attribute, true, Provenance::Sidecar),
                            1 => p.set_flag(attribute, false, Provenance::Sidecar),
                            _ => {}
                        }
                    }
                    p
                })
                .collect();
            let m = cooccurrence(profiles.iter());
            for a in BINARY_ATTRIBUTES {
                for b in BINARY_ATTRIBUTES {
                    proptest::prop_assert_eq!(m.get(a, b), m.get(b, a));
                    proptest::prop_assert!(m.get(a, b) <= m.marginal(a).min(m.marginal(b)));
                }
                let by_hand = profiles.iter().filter(|p| p.is_true(a)).count() as u64;
                proptest::prop_assert_eq!(m.marginal(a), by_hand);
            }
        }
    }
}

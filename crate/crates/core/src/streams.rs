//! Alignment of communities across adjacent periods into evolution streams.

use serde::Serialize;

use crate::cooccurrence::{Community, CommunityLabel};
use crate::corpus::Period;

pub const DEFAULT_OVERLAP_THRESHOLD: f64 = 0.5;

/// Communities of one period, in id order.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodSlice {
    pub period: Period,
    pub communities: Vec<Community>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreamNode {
    pub period: Period,
    pub community: usize,
    pub label: CommunityLabel,
    pub size: u64,
}

/// Continuity link between communities of adjacent periods. `source` and
/// `target` index [`StreamGraph::nodes`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemporalEdge {
    pub source: usize,
    pub target: usize,
    /// Shared members, each contributing the smaller of its two counts.
    pub weight: u64,
    /// `weight` over the smaller community size.
    pub normalized: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Split,
    Merge,
    Birth,
    Death,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreamEvent {
    pub kind: EventKind,
    pub node: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StreamGraph {
    pub nodes: Vec<StreamNode>,
    pub links: Vec<TemporalEdge>,
    pub events: Vec<StreamEvent>,
}

impl StreamGraph {
    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }
}

/// `sum_{shared d} min(count_a(d), count_b(d))`.
pub fn overlap(a: &Community, b: &Community) -> u64 {
    a.members
        .iter()
        .filter_map(|(d, ca)| b.members.get(d).map(|cb| (*ca).min(*cb)))
        .sum()
}

/// Links every pair of communities in consecutive slices whose overlap,
/// normalized by the smaller size, reaches `threshold`. A community with two
/// or more outgoing links is a split, one with two or more incoming links a
/// merge; a community after the first slice with no incoming link is a
/// birth, and one before the last slice with no outgoing link a death.
pub fn align_streams(slices: &[PeriodSlice], threshold: f64) -> StreamGraph {
    let mut out = StreamGraph::default();
    let mut offsets = Vec::with_capacity(slices.len());
    for s in slices {
        offsets.push(out.nodes.len());
        for c in &s.communities {
            out.nodes.push(StreamNode {
                period: s.period,
                community: c.id,
                label: c.label.clone(),
                size: c.size(),
            });
        }
    }

    let mut in_deg = vec![0usize; out.nodes.len()];
    let mut out_deg = vec![0usize; out.nodes.len()];
    for t in 1..slices.len() {
        for (i, a) in slices[t - 1].communities.iter().enumerate() {
            for (j, b) in slices[t].communities.iter().enumerate() {
                let w = overlap(a, b);
                let smaller = a.size().min(b.size());
                if w == 0 || smaller == 0 {
                    continue;
                }
                let normalized = w as f64 / smaller as f64;
                if normalized >= threshold {
                    let (src, dst) = (offsets[t - 1] + i, offsets[t] + j);
                    out_deg[src] += 1;
                    in_deg[dst] += 1;
                    out.links.push(TemporalEdge {
                        source: src,
                        target: dst,
                        weight: w,
                        normalized,
                    });
                }
            }
        }
    }

    for (t, s) in slices.iter().enumerate() {
        for i in 0..s.communities.len() {
            let node = offsets[t] + i;
            if out_deg[node] >= 2 {
                out.events.push(StreamEvent { kind: EventKind::Split, node });
            }
            if in_deg[node] >= 2 {
                out.events.push(StreamEvent { kind: EventKind::Merge, node });
            }
            if t > 0 && in_deg[node] == 0 {
                out.events.push(StreamEvent { kind: EventKind::Birth, node });
            }
            if t + 1 < slices.len() && out_deg[node] == 0 {
                out.events.push(StreamEvent { kind: EventKind::Death, node });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discipline::Discipline::{self, *};

    fn community(id: usize, members: &[(Discipline, u64)]) -> Community {
        Community {
            id,
            members: members.iter().copied().collect(),
            label: CommunityLabel(members[0].0.abbrev().to_string()),
        }
    }

    fn slice(year: i32, cs: Vec<Community>) -> PeriodSlice {
        PeriodSlice {
            period: Period::Year(year),
            communities: cs,
        }
    }

    #[test]
    fn identical_partitions_run_straight() {
        let cs = vec![community(0, &[(Medi, 3), (Immu, 2)]), community(1, &[(Soci, 1), (Psyc, 1)])];
        let s = align_streams(&[slice(2000, cs.clone()), slice(2001, cs)], 0.5);
        assert_eq!(s.nodes.len(), 4);
        assert_eq!(s.links.len(), 2);
        assert_eq!(s.count(EventKind::Split) + s.count(EventKind::Merge), 0);
        assert!(s.events.is_empty());
    }

    #[test]
    fn clean_split() {
        let s = align_streams(
            &[
                slice(2000, vec![community(0, &[(Medi, 1), (Immu, 1), (Bioc, 1), (Cs, 1)])]),
                slice(2001, vec![community(0, &[(Medi, 1), (Immu, 1)]), community(1, &[(Bioc, 1), (Cs, 1)])]),
            ],
            0.5,
        );
        assert_eq!(s.links.len(), 2);
        assert_eq!(s.count(EventKind::Split), 1);
        assert_eq!(s.count(EventKind::Merge), 0);
        assert!(s.links.iter().all(|l| l.weight == 2 && l.normalized == 1.0));
    }

    #[test]
    fn merge_and_birth() {
        let s = align_streams(
            &[
                slice(2000, vec![community(0, &[(Medi, 2)]), community(1, &[(Immu, 2)])]),
                slice(2001, vec![community(0, &[(Medi, 2), (Immu, 2)]), community(1, &[(Soci, 1)])]),
            ],
            0.5,
        );
        assert_eq!(s.count(EventKind::Merge), 1);
        assert_eq!(s.count(EventKind::Birth), 1);
    }

    #[test]
    fn unmatched_community_dies() {
        let s = align_streams(
            &[
                slice(2000, vec![community(0, &[(Medi, 5)]), community(1, &[(Arts, 1)])]),
                slice(2001, vec![community(0, &[(Medi, 5)])]),
            ],
            0.5,
        );
        let deaths: Vec<_> = s.events.iter().filter(|e| e.kind == EventKind::Death).collect();
        assert_eq!(deaths.len(), 1);
        assert_eq!(s.nodes[deaths[0].node].label.0, "ARTS");
    }

    #[test]
    fn weak_overlap_is_below_threshold() {
        let a = community(0, &[(Medi, 10), (Immu, 10)]);
        let b = community(0, &[(Medi, 1), (Soci, 9)]);
        assert_eq!(overlap(&a, &b), 1);
        let s = align_streams(&[slice(2000, vec![a]), slice(2001, vec![b])], 0.5);
        assert!(s.links.is_empty());
        assert_eq!(s.count(EventKind::Birth), 1);
        assert_eq!(s.count(EventKind::Death), 1);
    }

    #[test]
    fn single_slice_has_no_links() {
        let s = align_streams(&[slice(2000, vec![community(0, &[(Medi, 1)])])], 0.5);
        assert_eq!(s.nodes.len(), 1);
        assert!(s.links.is_empty() && s.events.is_empty());
    }
}

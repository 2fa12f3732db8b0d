use std::cmp::{Ordering, Reverse};

use serde::{Deserialize, Serialize};

/// The `j`-th slot of node `v`, landing on the earlier node `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrientedTriple {
    pub u: usize,
    pub v: usize,
    pub j: usize,
}

impl OrientedTriple {
    pub fn new(u: usize, v: usize, j: usize) -> Self {
        OrientedTriple { u, v, j }
    }

    pub fn is_oriented(&self) -> bool {
        self.u < self.v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TripleOrder {
    /// `v` ascending, then `j` ascending, then `u` descending.
    ArrivalTime,
    /// `u` descending, then `v` ascending, then `j` ascending.
    BackwardForward,
}

impl TripleOrder {
    pub fn compare(self, a: &OrientedTriple, b: &OrientedTriple) -> Ordering {
        match self {
            TripleOrder::ArrivalTime => {
                (a.v, a.j, Reverse(a.u)).cmp(&(b.v, b.j, Reverse(b.u)))
            }
            TripleOrder::BackwardForward => {
                (Reverse(a.u), a.v, a.j).cmp(&(Reverse(b.u), b.v, b.j))
            }
        }
    }
}

pub fn sort_triples(triples: &[OrientedTriple], order: TripleOrder) -> Vec<OrientedTriple> {
    let mut out = triples.to_vec();
    out.sort_by(|a, b| order.compare(a, b));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(u: usize, v: usize, j: usize) -> OrientedTriple {
        OrientedTriple::new(u, v, j)
    }

    #[test]
    fn same_slot_larger_target_first() {
        let set = [t(1, 3, 1), t(2, 3, 1)];
        assert_eq!(sort_triples(&set, TripleOrder::ArrivalTime), vec![t(2, 3, 1), t(1, 3, 1)]);
        assert_eq!(sort_triples(&set, TripleOrder::BackwardForward), vec![t(2, 3, 1), t(1, 3, 1)]);
    }

    #[test]
    fn singleton() {
        for order in [TripleOrder::ArrivalTime, TripleOrder::BackwardForward] {
            assert_eq!(sort_triples(&[t(4, 9, 2)], order), vec![t(4, 9, 2)]);
        }
    }

    #[test]
    fn orders_differ_on_mixed_sets() {
        let set = [t(1, 5, 1), t(3, 4, 1), t(2, 5, 2)];
        assert_eq!(
            sort_triples(&set, TripleOrder::ArrivalTime),
            vec![t(3, 4, 1), t(1, 5, 1), t(2, 5, 2)]
        );
        assert_eq!(
            sort_triples(&set, TripleOrder::BackwardForward),
            vec![t(3, 4, 1), t(2, 5, 2), t(1, 5, 1)]
        );
    }

    fn triple() -> impl Strategy<Value = OrientedTriple> {
        (1usize..8, 1usize..8, 1usize..4).prop_map(|(u, dv, j)| t(u, u + dv, j))
    }

    proptest! {
        #[test]
        fn orders_are_total(a in triple(), b in triple(), c in triple()) {
            for order in [TripleOrder::ArrivalTime, TripleOrder::BackwardForward] {
                let ab = order.compare(&a, &b);
                prop_assert_eq!(ab, order.compare(&b, &a).reverse());
                prop_assert_eq!(ab == Ordering::Equal, a == b);
                if ab != Ordering::Greater && order.compare(&b, &c) != Ordering::Greater {
                    prop_assert_ne!(order.compare(&a, &c), Ordering::Greater);
                }
            }
        }

        #[test]
        fn sort_is_a_sorted_permutation(set in proptest::collection::vec(triple(), 0..40)) {
            for order in [TripleOrder::ArrivalTime, TripleOrder::BackwardForward] {
                let sorted = sort_triples(&set, order);
                let mut a = sorted.clone();
                let mut b = set.clone();
                a.sort_by_key(|x| (x.u, x.v, x.j));
                b.sort_by_key(|x| (x.u, x.v, x.j));
                prop_assert_eq!(a, b);
                for w in sorted.windows(2) {
                    prop_assert_ne!(order.compare(&w[0], &w[1]), Ordering::Greater);
                }
            }
        }
    }
}

//! Interesting itemset mining over complex-relationship transactions.
//!
//! Support and minPI are both anti-monotone, so a depth-first search over a
//! fixed item order can cut a branch as soon as either falls below its
//! threshold without losing any qualifying itemset.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};
use crate::relation::{ComplexRelationship, Item};

/// Item limit for [`brute_force_itemsets`].
pub const POWERSET_LIMIT: usize = 20;

/// Transactions plus the inverted index item → sorted transaction ids.
#[derive(Debug, Clone, Default)]
pub struct TransactionDb {
    items: Vec<Item>,
    lookup: HashMap<Item, u32>,
    transactions: Vec<Vec<u32>>,
    tidlists: Vec<Vec<u32>>,
}

impl TransactionDb {
    pub fn new<I, T>(transactions: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: IntoIterator<Item = Item>,
    {
        let raw: Vec<Vec<Item>> = transactions.into_iter().map(|t| t.into_iter().collect()).collect();
        let mut items: Vec<Item> = raw.iter().flatten().cloned().collect();
        items.sort();
        items.dedup();
        let lookup: HashMap<Item, u32> = items.iter().cloned().enumerate().map(|(i, it)| (it, i as u32)).collect();
        let mut tidlists = vec![Vec::new(); items.len()];
        let mut transactions = Vec::with_capacity(raw.len());
        for (tid, t) in raw.into_iter().enumerate() {
            let mut ids: Vec<u32> = t.iter().map(|it| lookup[it]).collect();
            ids.sort_unstable();
            ids.dedup();
            for &i in &ids {
                tidlists[i as usize].push(tid as u32);
            }
            transactions.push(ids);
        }
        TransactionDb {
            items,
            lookup,
            transactions,
            tidlists,
        }
    }

    pub fn from_relationships(relationships: &[ComplexRelationship], include_negatives: bool) -> Self {
        TransactionDb::new(relationships.iter().map(|r| {
            r.items
                .iter()
                .filter(|i| include_negatives || !i.is_negative())
                .cloned()
                .collect::<Vec<_>>()
        }))
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    /// Distinct items in canonical order.
    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn transaction(&self, tid: usize) -> Vec<&Item> {
        self.transactions[tid].iter().map(|&i| &self.items[i as usize]).collect()
    }

    /// Transaction ids containing `item`.
    pub fn tidlist(&self, item: &Item) -> &[u32] {
        self.lookup
            .get(item)
            .map_or(&[], |&i| self.tidlists[i as usize].as_slice())
    }

    /// Number of transactions containing every item of `itemset`. Unknown
    /// items give 0; the empty itemset is contained in every transaction.
    pub fn support(&self, itemset: &[Item]) -> usize {
        let mut lists: Vec<&[u32]> = Vec::with_capacity(itemset.len());
        for item in itemset {
            match self.lookup.get(item) {
                Some(&i) => lists.push(&self.tidlists[i as usize]),
                None => return 0,
            }
        }
        let Some(shortest) = lists.iter().min_by_key(|l| l.len()).copied() else {
            return self.len();
        };
        shortest
            .iter()
            .filter(|tid| lists.iter().all(|l| l.binary_search(tid).is_ok()))
            .count()
    }

    /// min over items i of support(itemset) / support({i}).
    pub fn min_pi(&self, itemset: &[Item]) -> Result<f64> {
        if itemset.is_empty() {
            return Err(Error::input("minPI of the empty itemset is undefined"));
        }
        let mut largest = 0;
        for item in itemset {
            let s = self.support(std::slice::from_ref(item));
            if s == 0 {
                return Err(Error::UndefinedRatio(item.to_string()));
            }
            largest = largest.max(s);
        }
        // s/x is monotone in x, so dividing by the largest singleton support
        // gives the minimum ratio exactly.
        Ok(self.support(itemset) as f64 / largest as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterestingPattern {
    pub items: Vec<Item>,
    pub support: usize,
    pub minpi: f64,
}

impl InterestingPattern {
    pub fn render_items(&self) -> String {
        self.items.iter().map(Item::to_string).collect::<Vec<_>>().join(";")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub min_support: usize,
    pub min_minpi: f64,
}

impl Thresholds {
    pub fn new(min_support: usize, min_minpi: f64) -> Result<Self> {
        if min_support < 1 {
            return Err(Error::input("min_support must be at least 1"));
        }
        if !(0.0..=1.0).contains(&min_minpi) {
            return Err(Error::input(format!("min_minpi must lie in [0, 1], got {min_minpi}")));
        }
        Ok(Thresholds { min_support, min_minpi })
    }

    fn accepts(&self, support: usize, minpi: f64) -> bool {
        support >= self.min_support && minpi >= self.min_minpi
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            min_support: 1,
            min_minpi: 0.0,
        }
    }
}

/// Every itemset meeting both thresholds, ordered by size then by item order.
pub fn mine_interesting(db: &TransactionDb, thresholds: Thresholds, exec: Execution) -> Vec<InterestingPattern> {
    let subtrees = map_range(exec, db.items.len(), |first| {
        let tids = &db.tidlists[first];
        let mut out = Vec::new();
        if !thresholds.accepts(tids.len(), 1.0) {
            return out;
        }
        let mut prefix = vec![first as u32];
        out.push(RawPattern {
            items: prefix.clone(),
            support: tids.len(),
            minpi: 1.0,
        });
        descend(db, thresholds, &mut prefix, tids, tids.len(), &mut out);
        out
    });
    let mut raw: Vec<RawPattern> = subtrees.into_iter().flatten().collect();
    raw.sort_by(|a, b| a.items.len().cmp(&b.items.len()).then_with(|| a.items.cmp(&b.items)));
    raw.into_iter()
        .map(|p| InterestingPattern {
            items: p.items.iter().map(|&i| db.items[i as usize].clone()).collect(),
            support: p.support,
            minpi: p.minpi,
        })
        .collect()
}

struct RawPattern {
    items: Vec<u32>,
    support: usize,
    minpi: f64,
}

fn descend(
    db: &TransactionDb,
    thresholds: Thresholds,
    prefix: &mut Vec<u32>,
    tids: &[u32],
    largest_single: usize,
    out: &mut Vec<RawPattern>,
) {
    let last = *prefix.last().expect("prefix is non-empty") as usize;
    for next in (last + 1)..db.items.len() {
        let next_tids = intersect(tids, &db.tidlists[next]);
        let support = next_tids.len();
        if support == 0 {
            continue;
        }
        let largest = largest_single.max(db.tidlists[next].len());
        let minpi = support as f64 / largest as f64;
        if !thresholds.accepts(support, minpi) {
            continue;
        }
        prefix.push(next as u32);
        out.push(RawPattern {
            items: prefix.clone(),
            support,
            minpi,
        });
        descend(db, thresholds, prefix, &next_tids, largest, out);
        prefix.pop();
    }
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Enumerates all 2^|items| − 1 itemsets, scanning the transactions for each.
pub fn brute_force_itemsets(db: &TransactionDb, thresholds: Thresholds) -> Result<Vec<InterestingPattern>> {
    let n = db.items.len();
    if n > POWERSET_LIMIT {
        return Err(Error::TooLarge {
            what: "powerset itemset enumeration",
            size: n,
            limit: POWERSET_LIMIT,
        });
    }
    let masks: Vec<u32> = db
        .transactions
        .iter()
        .map(|t| t.iter().fold(0u32, |m, &i| m | (1 << i)))
        .collect();
    let count = |set: u32| masks.iter().filter(|&&m| m & set == set).count();
    let singles: Vec<usize> = (0..n).map(|i| count(1 << i)).collect();

    let mut out = Vec::new();
    for set in 1u32..(1u32 << n) {
        let support = count(set);
        if support == 0 {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|i| set & (1 << i) != 0).collect();
        let minpi = members
            .iter()
            .map(|&i| support as f64 / singles[i] as f64)
            .fold(f64::INFINITY, f64::min);
        if thresholds.accepts(support, minpi) {
            out.push(InterestingPattern {
                items: members.iter().map(|&i| db.items[i].clone()).collect(),
                support,
                minpi,
            });
        }
    }
    out.sort_by(|a, b| a.items.len().cmp(&b.items.len()).then_with(|| a.items.cmp(&b.items)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn items(s: &str) -> Vec<Item> {
        s.split_whitespace().map(|x| x.parse().unwrap()).collect()
    }

    fn relationship_db() -> TransactionDb {
        TransactionDb::new(["A B B+ -C", "-A B C", "A A+ B -C"].iter().map(|t| items(t)))
    }

    #[test]
    fn support_examples() {
        let db = relationship_db();
        assert_eq!(db.support(&items("B")), 3);
        assert_eq!(db.support(&items("A -C")), 2);
        assert_eq!(db.support(&items("D")), 0);
        assert_eq!(TransactionDb::default().support(&items("A")), 0);
    }

    #[test]
    fn min_pi_examples() {
        let db = relationship_db();
        assert_eq!(db.min_pi(&items("B")).unwrap(), 1.0);
        assert_eq!(db.min_pi(&items("A -C")).unwrap(), 1.0);
        assert_eq!(db.min_pi(&items("B C")).unwrap(), 1.0 / 3.0);
        assert!(matches!(db.min_pi(&items("B D")), Err(Error::UndefinedRatio(_))));
        assert!(db.min_pi(&[]).is_err());
    }

    #[test]
    fn mining_relationship_db() {
        let db = relationship_db();
        let got = mine_interesting(&db, Thresholds::new(2, 0.0).unwrap(), Execution::Sequential);
        let rendered: Vec<String> = got.iter().map(InterestingPattern::render_items).collect();
        assert_eq!(rendered, vec!["A", "B", "-C", "A;B", "A;-C", "B;-C", "A;B;-C"]);
        assert_eq!(got[0].support, 2);
        assert_eq!(got[3].minpi, 2.0 / 3.0);

        let none = mine_interesting(&db, Thresholds::new(db.len() + 1, 0.0).unwrap(), Execution::Sequential);
        assert!(none.is_empty());
    }

    #[test]
    fn single_transaction() {
        let db = TransactionDb::new([items("A B")]);
        let got = mine_interesting(&db, Thresholds::default(), Execution::Sequential);
        assert_eq!(got.len(), 3);
        assert!(got.iter().all(|p| p.support == 1 && p.minpi == 1.0));
        assert_eq!(brute_force_itemsets(&db, Thresholds::default()).unwrap(), got);
    }

    #[test]
    fn thresholds_validate() {
        assert!(Thresholds::new(0, 0.5).is_err());
        assert!(Thresholds::new(1, 1.5).is_err());
        assert!(Thresholds::new(1, -0.1).is_err());
        assert!(Thresholds::new(1, 1.0).is_ok());
    }

    #[test]
    fn brute_force_refuses_wide_dbs() {
        let labels: Vec<String> = (0..21).map(|i| format!("T{i}")).collect();
        let db = TransactionDb::new([labels.iter().map(|l| l.parse::<Item>().unwrap()).collect::<Vec<_>>()]);
        assert!(matches!(brute_force_itemsets(&db, Thresholds::default()), Err(Error::TooLarge { .. })));
        assert!(brute_force_itemsets(&TransactionDb::default(), Thresholds::default()).unwrap().is_empty());
    }

    #[test]
    fn threshold_grid_matches_oracle() {
        let db = relationship_db();
        for s in 1..=3 {
            for p in [0.0, 0.25, 0.5, 1.0] {
                let th = Thresholds::new(s, p).unwrap();
                assert_eq!(mine_interesting(&db, th, Execution::Parallel), brute_force_itemsets(&db, th).unwrap());
            }
        }
    }

    fn arb_db() -> impl Strategy<Value = TransactionDb> {
        prop::collection::vec(prop::collection::btree_set(0usize..10, 0..8), 0..25).prop_map(|ts| {
            TransactionDb::new(ts.into_iter().map(|t| t.into_iter().map(|i| format!("I{i}").parse::<Item>().unwrap())))
        })
    }

    proptest! {
        #[test]
        fn anti_monotone(db in arb_db(), small in prop::collection::btree_set(0usize..10, 1..4), extra in prop::collection::btree_set(0usize..10, 0..4)) {
            let present: Vec<&Item> = db.items().iter().collect();
            prop_assume!(!present.is_empty());
            let pick = |ix: &std::collections::BTreeSet<usize>| -> Vec<Item> {
                let mut v: Vec<Item> = ix.iter().map(|&i| present[i % present.len()].clone()).collect();
                v.sort();
                v.dedup();
                v
            };
            let i_set = pick(&small);
            let mut j_set = i_set.clone();
            j_set.extend(pick(&extra));
            j_set.sort();
            j_set.dedup();
            prop_assert!(db.support(&j_set) <= db.support(&i_set));
            prop_assert!(db.min_pi(&j_set).unwrap() <= db.min_pi(&i_set).unwrap());
        }

        #[test]
        fn matches_powerset(db in arb_db(), s in 1usize..4, p in prop::sample::select(vec![0.0, 0.2, 0.5, 0.75, 1.0])) {
            let th = Thresholds::new(s, p).unwrap();
            let mined = mine_interesting(&db, th, Execution::Parallel);
            prop_assert_eq!(&mined, &brute_force_itemsets(&db, th).unwrap());
            for pat in &mined {
                prop_assert_eq!(pat.support, db.support(&pat.items));
                prop_assert_eq!(pat.minpi, db.min_pi(&pat.items).unwrap());
                if pat.items.len() == 1 {
                    prop_assert_eq!(pat.minpi, 1.0);
                }
            }
        }
    }
}

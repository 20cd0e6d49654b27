use std::collections::HashMap;
use std::sync::Arc;

use super::Ranking;
use crate::error::{Error, Result};

/// Fuses rankings of the same question by mean 1-based rank, lowest first,
/// ties by ascending uid.
///
/// Rank sums are integers and every fact gets the same number of terms, so
/// ordering by the sum is ordering by the mean with no rounding involved.
///
/// ```
/// use exregen::rankers::{ensemble_ranks, Ranking};
///
/// let a = Ranking::from_strs("q1", ["x", "y", "z"]);
/// let b = Ranking::from_strs("q1", ["z", "y", "x"]);
/// let fused = ensemble_ranks(&[a, b]).unwrap();
/// // every fact averages rank 2, so uid order decides
/// assert_eq!(fused.uids().iter().map(|u| &**u).collect::<Vec<_>>(), ["x", "y", "z"]);
/// ```
pub fn ensemble_ranks(rankings: &[Ranking]) -> Result<Ranking> {
    let Some(first) = rankings.first() else {
        return Err(Error::InvalidConfig("nothing to ensemble".into()));
    };
    let qid = &first.qid;
    let mut sums: HashMap<&str, (Arc<str>, u64, usize)> = HashMap::with_capacity(first.len());
    for (i, r) in rankings.iter().enumerate() {
        if &r.qid != qid {
            return Err(Error::MismatchedRankings {
                qid: qid.clone(),
                detail: format!("input {} is for question {}", i + 1, r.qid),
            });
        }
        if r.len() != first.len() {
            return Err(Error::MismatchedRankings {
                qid: qid.clone(),
                detail: format!("input {} has {} facts, input 1 has {}", i + 1, r.len(), first.len()),
            });
        }
        for (pos, uid) in r.uids().iter().enumerate() {
            match sums.get_mut(&**uid) {
                Some(entry) if entry.2 == i => {
                    return Err(Error::MismatchedRankings {
                        qid: qid.clone(),
                        detail: format!("input {} lists {uid} twice", i + 1),
                    })
                }
                Some(entry) if entry.2 + 1 == i => {
                    entry.1 += pos as u64 + 1;
                    entry.2 = i;
                }
                Some(_) => unreachable!("every uid is seen once per input"),
                None if i == 0 => {
                    sums.insert(uid, (uid.clone(), pos as u64 + 1, 0));
                }
                None => {
                    return Err(Error::MismatchedRankings {
                        qid: qid.clone(),
                        detail: format!("{uid} is in input {} but not input 1", i + 1),
                    })
                }
            }
        }
    }
    let mut fused: Vec<(Arc<str>, u64)> = sums.into_values().map(|(u, s, _)| (u, s)).collect();
    fused.sort_unstable_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    Ok(Ranking::new(qid.clone(), fused.into_iter().map(|(u, _)| u).collect()))
}

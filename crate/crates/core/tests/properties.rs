use std::collections::{BTreeSet, HashMap};

use exregen::corpus::{Fact, FactStore, GoldRef, LemmaMap, Role, StopwordSet};
use exregen::diag::Diagnostics;
use exregen::eval::{average_precision, mean_ap, GoldSet, MissingRank, MISSING_RANK};
use exregen::rankers::{apply_external_scores, ensemble_ranks, IterConfig, Ranking, Retriever, ScoreFile};
use exregen::textproc::{build_vocabulary, tokenize, Preprocessor, TermSeq};
use exregen::tfidf::{cosine, SparseVector, TfidfConfig, TfidfModel};
use proptest::prelude::*;

// ---------- oracles ----------

/// Average precision straight from the definition, quadratic and unoptimised.
fn ap_oracle(pred: &[String], gold: &[String]) -> f64 {
    let gold: BTreeSet<&String> = gold.iter().collect();
    let rank = |g: &String| {
        pred.iter()
            .position(|p| p == g)
            .map_or(MISSING_RANK, |i| i + 1)
    };
    let mut total = 0.0;
    for g in &gold {
        let r = rank(g);
        let at_or_above = gold.iter().filter(|h| rank(h) <= r).count();
        total += at_or_above as f64 / r as f64;
    }
    total / gold.len() as f64
}

/// Dense TF-IDF document vectors computed directly from counts.
fn dense_tfidf(docs: &[Vec<String>], cfg: TfidfConfig) -> (Vec<String>, Vec<Vec<f64>>) {
    let terms: Vec<String> = docs.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let n = docs.len() as f64;
    let idf: Vec<f64> = terms
        .iter()
        .map(|t| {
            let df = docs.iter().filter(|d| d.contains(t)).count() as f64;
            if cfg.smooth_idf {
                ((1.0 + n) / (1.0 + df)).ln() + 1.0
            } else {
                (n / df).ln() + 1.0
            }
        })
        .collect();
    let vecs = docs
        .iter()
        .map(|d| {
            let mut v: Vec<f64> = terms
                .iter()
                .zip(&idf)
                .map(|(t, w)| {
                    let tf = d.iter().filter(|x| *x == t).count() as f64;
                    let tf = if cfg.sublinear_tf && tf > 0.0 { 1.0 + tf.ln() } else { tf };
                    tf * w
                })
                .collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                v.iter_mut().for_each(|x| *x /= norm);
            }
            v
        })
        .collect();
    (terms, vecs)
}

fn dense_cos(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

// ---------- strategies ----------

fn sparse() -> impl Strategy<Value = SparseVector> {
    prop::collection::vec((0u32..50, 0.0f64..10.0), 0..20).prop_map(|p| SparseVector::from_pairs(p).unwrap())
}

fn corpus() -> impl Strategy<Value = Vec<Vec<String>>> {
    (1usize..=50).prop_flat_map(|v| {
        prop::collection::vec(prop::collection::vec((0..v).prop_map(|t| format!("t{t}")), 0..12), 1..=20)
    })
}

fn tfidf_config() -> impl Strategy<Value = TfidfConfig> {
    (any::<bool>(), any::<bool>()).prop_map(|(sublinear_tf, smooth_idf)| TfidfConfig {
        sublinear_tf,
        smooth_idf,
    })
}

/// (prediction, gold): a possibly truncated permutation of up to 30 facts and
/// a non-empty gold subset that may include facts the prediction leaves out.
fn ap_instance() -> impl Strategy<Value = (Vec<String>, Vec<String>)> {
    (1usize..=30)
        .prop_flat_map(|n| {
            (
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                0..=n,
                prop::collection::vec(any::<bool>(), n),
            )
        })
        .prop_map(|(perm, keep, mask)| {
            let pred: Vec<String> = perm[..keep].iter().map(|i| format!("f{i}")).collect();
            let mut gold: Vec<String> = (0..mask.len()).filter(|&i| mask[i]).map(|i| format!("f{i}")).collect();
            if gold.is_empty() {
                gold.push("f0".into());
            }
            (pred, gold)
        })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<String>> {
    Just((0..n).map(|i| format!("u{i:02}")).collect::<Vec<_>>()).prop_shuffle()
}

fn store_of(docs: &[Vec<String>]) -> FactStore {
    FactStore::from_facts(docs.iter().enumerate().map(|(i, d)| Fact {
        uid: format!("d{i:02}").into(),
        table: "T".into(),
        text: format!("doc {i} {}", d.join(" ")),
    }))
    .unwrap()
}

fn fit(docs: &[Vec<String>], cfg: TfidfConfig) -> Option<(TfidfModel, Vec<SparseVector>)> {
    let seqs: Vec<TermSeq> = docs.iter().cloned().map(TermSeq::new).collect();
    let model = TfidfModel::fit(&seqs, cfg).ok()?;
    let vecs = model.transform_all(&seqs);
    Some((model, vecs))
}

const WORDS: &[&str] = &[
    "Mice", "mice", "live", "in", "the", "holes", "Grass", "snakes", "eat", "of", "a", "predator", "prey", "is",
    "forests", "100", "C", "THE", "An", "and",
];
const PUNCT: &[&str] = &[".", ",", "?", "!", ";", ":", "(", ")", "--", "'s"];

fn text() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            3 => prop::sample::select(WORDS).prop_map(str::to_owned),
            1 => prop::sample::select(PUNCT).prop_map(str::to_owned),
            1 => "[A-Za-z]{1,7}",
        ],
        0..25,
    )
    .prop_map(|w| w.join(" "))
}

fn preprocessor() -> Preprocessor {
    Preprocessor::new(
        LemmaMap::from_pairs([("mice", "mouse"), ("holes", "hole"), ("snakes", "snake"), ("forests", "forest")]),
        StopwordSet::from_words(["the", "in", "of", "a", "an", "is", "and"]),
    )
}

fn plain_words() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(
        prop_oneof![
            4 => "[A-Za-z0-9]{1,8}",
            1 => prop::sample::select(&[",", "?", "!", ";"][..]).prop_map(str::to_owned),
        ],
        0..12,
    )
}

// ---------- textproc ----------

proptest! {
    #[test]
    fn preprocess_output_is_clean(t in text()) {
        let pre = preprocessor();
        for term in pre.preprocess(&t).iter() {
            prop_assert!(!term.is_empty());
            prop_assert!(!pre.stopwords().contains(term), "{term}");
            prop_assert_eq!(term, &term.to_lowercase());
        }
    }

    #[test]
    fn preprocess_is_idempotent_on_lemma_fixed_points(t in text()) {
        let pre = preprocessor();
        let terms = pre.preprocess(&t);
        if terms.iter().all(|x| pre.lemmas().lookup(x) == *x) {
            prop_assert_eq!(pre.preprocess(&terms.joined()), terms);
        }
    }

    #[test]
    fn tokenize_splits_at_spaces_between_safe_chunks(a in plain_words(), b in plain_words()) {
        let (a, b) = (a.join(" "), b.join(" "));
        let mut expected = tokenize(&a);
        expected.extend(tokenize(&b));
        prop_assert_eq!(tokenize(&format!("{a} {b}")), expected);
        prop_assert_eq!(tokenize(&a), tokenize(&a));
    }

    #[test]
    fn vocabulary_df_bounds(docs in corpus()) {
        let seqs: Vec<TermSeq> = docs.iter().cloned().map(TermSeq::new).collect();
        if let Ok(v) = build_vocabulary(&seqs) {
            let distinct: BTreeSet<&String> = docs.iter().flatten().collect();
            prop_assert_eq!(v.len(), distinct.len());
            for id in 0..v.len() as u32 {
                prop_assert!(v.df(id) >= 1 && v.df(id) as usize <= docs.len());
                prop_assert_eq!(v.id(v.term(id)), Some(id));
            }
        } else {
            prop_assert!(docs.iter().all(Vec::is_empty));
        }
    }
}

// ---------- tfidf ----------

proptest! {
    #[test]
    fn cosine_is_symmetric_bounded_and_scale_free(a in sparse(), b in sparse(), k in 0.01f64..100.0) {
        let ab = cosine(&a, &b);
        prop_assert_eq!(ab, cosine(&b, &a));
        prop_assert!((0.0..=1.0).contains(&ab));
        let scaled = a.scale(k).unwrap();
        prop_assert!((cosine(&scaled, &b) - ab).abs() < 1e-12);
    }

    #[test]
    fn max_aggregate_is_a_semilattice(a in sparse(), b in sparse(), c in sparse()) {
        prop_assert_eq!(a.max_aggregate(&b), b.max_aggregate(&a));
        prop_assert_eq!(a.max_aggregate(&b).max_aggregate(&c), a.max_aggregate(&b.max_aggregate(&c)));
        prop_assert_eq!(a.max_aggregate(&a), a.clone());
        let ids: BTreeSet<u32> = a.ids().iter().chain(b.ids()).copied().collect();
        let m = a.max_aggregate(&b);
        prop_assert_eq!(m.ids().iter().copied().collect::<BTreeSet<_>>(), ids);
        for (id, w) in m.iter() {
            prop_assert_eq!(w, a.get(id).max(b.get(id)));
        }
    }

    #[test]
    fn idf_is_positive_and_non_increasing_in_df(docs in corpus(), cfg in tfidf_config()) {
        let Some((model, _)) = fit(&docs, cfg) else { return Ok(()) };
        let v = model.vocabulary();
        for a in 0..v.len() as u32 {
            prop_assert!(model.idf(a) > 0.0);
            for b in 0..v.len() as u32 {
                if v.df(a) >= v.df(b) {
                    prop_assert!(model.idf(a) <= model.idf(b));
                }
            }
        }
    }

    #[test]
    fn sparse_cosines_match_dense_recomputation(docs in corpus(), cfg in tfidf_config()) {
        let Some((_, vecs)) = fit(&docs, cfg) else { return Ok(()) };
        let (_, dense) = dense_tfidf(&docs, cfg);
        let store = store_of(&docs);
        let retriever = Retriever::new(&store, vecs.clone()).unwrap();
        for i in 0..docs.len() {
            let scores = retriever.scores(&vecs[i]);
            for j in 0..docs.len() {
                let want = dense_cos(&dense[i], &dense[j]);
                prop_assert!((cosine(&vecs[i], &vecs[j]) - want).abs() < 1e-12);
                prop_assert!((scores[j] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn transform_is_homogeneous(docs in corpus()) {
        let Some((model, _)) = fit(&docs, TfidfConfig::default()) else { return Ok(()) };
        for d in &docs {
            let twice: Vec<String> = d.iter().chain(d).cloned().collect();
            let (a, b) = (model.transform(d), model.transform(&twice));
            prop_assert_eq!(a.ids(), b.ids());
            for (x, y) in a.weights().iter().zip(b.weights()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}

// ---------- rankers ----------

proptest! {
    #[test]
    fn rankings_are_permutations_and_one_step_agrees(docs in corpus(), q in 0usize..20, decay in 0.1f64..=1.0) {
        let Some((_, vecs)) = fit(&docs, TfidfConfig::default()) else { return Ok(()) };
        let store = store_of(&docs);
        let retriever = Retriever::new(&store, vecs.clone()).unwrap();
        let query = &vecs[q % vecs.len()];
        let opt = retriever.rank_optimized("q", query);
        let it = retriever.rank_iterated("q", query, &IterConfig::new(128, decay, 1.0).unwrap());
        prop_assert!(opt.is_permutation_of(&store));
        prop_assert!(it.is_permutation_of(&store));
        let one = retriever.rank_iterated("q", query, &IterConfig::new(1, 1.0, 1.0).unwrap());
        prop_assert_eq!(&one.uids()[0], &opt.uids()[0]);
        let one_decayed = retriever.rank_iterated("q", query, &IterConfig::new(1, decay, 1.0).unwrap());
        prop_assert_eq!(&one_decayed.uids()[0], &opt.uids()[0]);
    }

    #[test]
    fn ensemble_ignores_input_order(
        rs in (1usize..15).prop_flat_map(|n| prop::collection::vec(permutation(n), 1..5)),
        rot in 0usize..5,
    ) {
        let rankings: Vec<Ranking> = rs.iter().map(|r| Ranking::from_strs("q", r)).collect();
        let mut rotated = rankings.clone();
        rotated.rotate_left(rot % rankings.len());
        rotated.reverse();
        prop_assert_eq!(ensemble_ranks(&rankings).unwrap(), ensemble_ranks(&rotated).unwrap());
        prop_assert_eq!(ensemble_ranks(&vec![rankings[0].clone(); rankings.len()]).unwrap(), rankings[0].clone());
    }

    #[test]
    fn external_scores_only_reorder_the_head(
        (perm, scores) in (1usize..80).prop_flat_map(|n| (permutation(n), prop::collection::vec(-5.0f64..5.0, n))),
        top_n in 1usize..100,
    ) {
        let base = Ranking::from_strs("q", &perm);
        let rows: Vec<(&str, &str, f64)> = perm.iter().zip(&scores).map(|(u, s)| ("q", u.as_str(), *s)).collect();
        let sf = ScoreFile::from_rows(rows).unwrap();
        let out = apply_external_scores(&base, &sf, top_n, &mut Diagnostics::new()).unwrap();
        let n = top_n.min(perm.len());
        let head = |r: &Ranking| r.top(n).iter().cloned().collect::<BTreeSet<_>>();
        prop_assert_eq!(head(&out), head(&base));
        prop_assert_eq!(&out.uids()[n..], &base.uids()[n..]);
        let by_uid: HashMap<&str, f64> = perm.iter().map(String::as_str).zip(scores.iter().copied()).collect();
        for w in out.top(n).windows(2) {
            prop_assert!(by_uid[&*w[0]] >= by_uid[&*w[1]]);
        }
    }
}

// ---------- eval ----------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn average_precision_matches_definition((pred, gold) in ap_instance()) {
        let ap = average_precision(&pred, &gold, MissingRank::Billion).unwrap();
        prop_assert!((ap - ap_oracle(&pred, &gold)).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&ap));
    }
}

proptest! {
    #[test]
    fn moving_a_gold_fact_up_never_hurts(perm in (2usize..30).prop_flat_map(permutation), mask in prop::collection::vec(any::<bool>(), 30), from in 0usize..30, to in 0usize..30) {
        let gold: Vec<String> = perm.iter().enumerate().filter(|(i, _)| mask[*i]).map(|(_, u)| u.clone()).collect();
        prop_assume!(!gold.is_empty());
        let from = from % perm.len();
        let to = to % (from + 1);
        prop_assume!(gold.contains(&perm[from]));
        let mut moved = perm.clone();
        let g = moved.remove(from);
        moved.insert(to, g);
        let before = average_precision(&perm, &gold, MissingRank::Billion).unwrap();
        let after = average_precision(&moved, &gold, MissingRank::Billion).unwrap();
        prop_assert!(after >= before - 1e-15, "{before} -> {after}");
    }

    #[test]
    fn order_below_the_last_gold_fact_is_irrelevant(perm in (1usize..30).prop_flat_map(permutation), mask in prop::collection::vec(any::<bool>(), 30), seed in any::<u64>()) {
        let gold: Vec<String> = perm.iter().enumerate().filter(|(i, _)| mask[*i]).map(|(_, u)| u.clone()).collect();
        prop_assume!(!gold.is_empty());
        let last = perm.iter().rposition(|u| gold.contains(u)).unwrap();
        let mut shuffled = perm.clone();
        let tail = &mut shuffled[last + 1..];
        tail.sort_by_key(|u| (seed ^ u.len() as u64).wrapping_mul(u.as_bytes().iter().map(|&b| b as u64).sum::<u64>() + 1));
        prop_assert_eq!(
            average_precision(&perm, &gold, MissingRank::Billion),
            average_precision(&shuffled, &gold, MissingRank::Billion)
        );
    }

    #[test]
    fn absent_gold_is_tiny_but_positive(pred in (0usize..30).prop_flat_map(permutation), g in 1usize..16) {
        let gold: Vec<String> = (0..g).map(|i| format!("gold{i}")).collect();
        let ap = average_precision(&pred, &gold, MissingRank::Billion).unwrap();
        prop_assert!(ap > 0.0);
        prop_assert!(ap <= g as f64 * g as f64 / 1e9);
        prop_assert_eq!(average_precision(&pred, &gold, MissingRank::ZeroQuestion), Some(0.0));
    }

    #[test]
    fn report_means_recombine(
        qs in prop::collection::vec(((1usize..20).prop_flat_map(permutation), prop::collection::vec(any::<bool>(), 20)), 1..12)
    ) {
        let mut golds = GoldSet::default();
        let mut rankings = Vec::new();
        for (i, (perm, mask)) in qs.iter().enumerate() {
            let qid = format!("q{i}");
            let mut gold: Vec<GoldRef> = perm
                .iter()
                .enumerate()
                .filter(|(j, _)| mask[*j])
                .map(|(j, u)| GoldRef { uid: u.clone(), role: if j % 2 == 0 { Role::Central } else { Role::Grounding } })
                .collect();
            if gold.is_empty() {
                gold.push(GoldRef { uid: perm[0].clone(), role: Role::Central });
            }
            golds.insert(qid.clone(), gold);
            rankings.push(Ranking::from_strs(qid, perm));
        }
        let rep = mean_ap(&rankings, &golds, MissingRank::Billion, &mut Diagnostics::new());
        let mean = rep.per_question.iter().map(|q| q.ap).sum::<f64>() / rep.per_question.len() as f64;
        prop_assert!((rep.map - mean).abs() < 1e-12);
        let weighted: f64 = rep.length_map.values().map(|b| b.map * b.n_questions as f64).sum::<f64>() / rep.n_questions as f64;
        prop_assert!((weighted - rep.map).abs() < 1e-12);
        prop_assert_eq!(rep.length_map.values().map(|b| b.n_questions).sum::<usize>(), rep.n_questions);
    }
}

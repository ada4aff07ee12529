mod support;

use proptest::prelude::*;
use puncteval::align::{global_align, levenshtein, similarity_ratio, transfer_punctuation, ScoreScheme};
use puncteval::corpus::{filter_wiki, parse_stm, write_stm, StmSegment, WikiDocument};
use puncteval::decoder::{
    beam_decode, collapse_ctc, collapsed_distribution, decode_batch, decode_batch_sequential, exhaustive_decode,
    greedy_decode, DecodeConfig, Posteriorgram, UniformLm, DEFAULT_SEARCH_CAP, NUM_SYMBOLS,
};
use puncteval::metrics::dlev::{edit_path, CostModel, SlotClass, SLOT_EDIT, WORD_EDIT};
use puncteval::metrics::{dlev_ser, score_corpus, score_corpus_sequential, ScoringOptions};
use puncteval::normalize::{normalize, strip_punctuation};
use puncteval::token::{tokenize, NormalizedTranscript, Punct, Token};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::{ctc_oracle, dlev_oracle, random_posteriorgram};

fn token() -> impl Strategy<Value = Token> {
    prop_oneof![
        3 => prop::sample::select(vec!["a", "b", "c", "d"]).prop_map(Token::word),
        2 => prop::sample::select(Punct::ALL.to_vec()).prop_map(Token::Punct),
    ]
}

fn tokens(max: usize) -> impl Strategy<Value = Vec<Token>> {
    prop::collection::vec(token(), 0..=max)
}

fn transcript(max: usize) -> impl Strategy<Value = NormalizedTranscript> {
    tokens(max).prop_map(NormalizedTranscript::from_tokens)
}

fn dp_levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut cur = vec![i + 1; b.len() + 1];
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = (prev[j] + usize::from(x != y)).min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        prev = cur;
    }
    prev[b.len()]
}

proptest! {
    #[test]
    fn edit_path_replays_both_sides(r in tokens(12), h in tokens(12)) {
        let path = edit_path(&r, &h, &CostModel::dlev());
        let surfaces = |v: &[Token]| v.iter().map(|t| t.surface().to_string()).collect::<Vec<_>>();
        prop_assert_eq!(path.reference_surfaces(), surfaces(&r));
        prop_assert_eq!(path.hypothesis_surfaces(), surfaces(&h));
        prop_assert_eq!(path.cost_units, SLOT_EDIT * path.slot_edits() as u32 + WORD_EDIT * path.other_edits as u32);
        let c = path.counts;
        // a swap covers one or two reference marks
        let base = c.correct + c.deletions + c.substitutions;
        prop_assert!(base + c.swaps <= c.ref_total && c.ref_total <= base + 2 * c.swaps);
    }

    #[test]
    fn identical_sequences_cost_nothing(r in tokens(12)) {
        let path = edit_path(&r, &r, &CostModel::dlev());
        prop_assert_eq!(path.cost_units, 0);
        prop_assert_eq!(path.counts.correct, r.iter().filter(|t| t.is_punct()).count());
    }

    #[test]
    fn cost_is_symmetric(r in tokens(10), h in tokens(10)) {
        let fwd = edit_path(&r, &h, &CostModel::dlev());
        let back = edit_path(&h, &r, &CostModel::dlev());
        prop_assert_eq!(fwd.cost_units, back.cost_units);
        prop_assert_eq!(fwd.slot_edits(), back.slot_edits());
    }

    #[test]
    fn swapping_sides_exchanges_insertions_and_deletions(r in tokens(5), h in tokens(5)) {
        // the cheapest paths in one direction mirror those in the other
        let fwd = dlev_oracle(&r, &h, Token::is_punct, false, true);
        let back = dlev_oracle(&h, &r, Token::is_punct, false, true);
        prop_assert_eq!(fwd.cost, back.cost);
        let mirrored: std::collections::BTreeSet<_> = back.indels.iter().map(|&(i, d)| (d, i)).collect();
        prop_assert_eq!(&fwd.indels, &mirrored);
        // and the library's path is one of them
        let path = edit_path(&r, &h, &CostModel::dlev());
        prop_assert!(fwd.indels.contains(&(path.counts.insertions, path.counts.deletions)));
    }

    #[test]
    fn without_swaps_matches_constrained_levenshtein(r in tokens(6), h in tokens(6)) {
        let model = CostModel { slot: SlotClass::AllPunct, cross_class_substitution: false, transpositions: false };
        let path = edit_path(&r, &h, &model);
        let oracle = dlev_oracle(&r, &h, Token::is_punct, false, false);
        prop_assert_eq!(path.cost_units, oracle.cost);
        prop_assert_eq!(path.counts.swaps, 0);
    }

    #[test]
    fn swaps_never_cost_more(r in tokens(8), h in tokens(8)) {
        let plain = CostModel { transpositions: false, ..CostModel::dlev() };
        prop_assert!(edit_path(&r, &h, &CostModel::dlev()).cost_units <= edit_path(&r, &h, &plain).cost_units);
    }

    #[test]
    fn ser_is_nonnegative_and_zero_on_identity(r in transcript(12), h in transcript(12)) {
        prop_assert!(dlev_ser(&r, &h) >= 0.0);
        prop_assert_eq!(dlev_ser(&r, &r), 0.0);
    }

    #[test]
    fn levenshtein_matches_dp(a in prop::collection::vec(0u8..4, 0..150), b in prop::collection::vec(0u8..4, 0..150)) {
        prop_assert_eq!(levenshtein(&a, &b), dp_levenshtein(&a, &b));
        prop_assert_eq!(levenshtein(&a, &b), levenshtein(&b, &a));
    }

    #[test]
    fn similarity_ratio_bounds(a in transcript(10), b in transcript(10)) {
        prop_assume!(b.word_count() > 0);
        let r = similarity_ratio(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&r));
        prop_assert_eq!(similarity_ratio(&b, &b).unwrap(), 1.0);
    }

    #[test]
    fn alignment_is_consistent(a in prop::collection::vec(0u8..4, 0..12), b in prop::collection::vec(0u8..4, 0..12)) {
        let s = ScoreScheme::default();
        let al = global_align(&a, &b, &s);
        let lefts: Vec<usize> = al.columns.iter().filter_map(|c| c.left).collect();
        let rights: Vec<usize> = al.columns.iter().filter_map(|c| c.right).collect();
        prop_assert_eq!(lefts, (0..a.len()).collect::<Vec<_>>());
        prop_assert_eq!(rights, (0..b.len()).collect::<Vec<_>>());
        prop_assert!(al.columns.iter().all(|c| c.left.is_some() || c.right.is_some()));
        if a.len() <= 6 && b.len() <= 6 {
            prop_assert!((al.score - support::affine_oracle(&a, &b, &s)).abs() < 1e-9);
        }
    }

    #[test]
    fn transfer_keeps_stm_words(online in transcript(12), stm in transcript(12)) {
        let stm = strip_punctuation(&stm);
        prop_assume!(!stm.is_empty());
        if let Ok(out) = transfer_punctuation(&online, &stm, &ScoreScheme::default()) {
            prop_assert_eq!(strip_punctuation(&out), stm);
        }
    }

    #[test]
    fn normalize_is_idempotent(text in "[a-zA-Z0-9 ,.?!':;()\\-]{0,40}") {
        let once = normalize(&text).unwrap();
        prop_assert_eq!(normalize(&once.to_string()).unwrap(), once.clone());
        let allowed = |c: char| c.is_ascii_lowercase() || matches!(c, '\'' | ',' | '.' | '?' | '!' | ' ');
        prop_assert!(once.to_string().chars().all(allowed), "{}", once);
    }

    #[test]
    fn stm_round_trip(segs in prop::collection::vec((0u32..100_000, 1u32..5_000, "[a-z ,.?!']{0,30}"), 0..8)) {
        let segs: Vec<StmSegment> = segs
            .into_iter()
            .map(|(start, len, text)| StmSegment {
                start: start as f64 / 100.0,
                end: (start + len) as f64 / 100.0,
                text: text.split_whitespace().collect::<Vec<_>>().join(" "),
            })
            .collect();
        prop_assert_eq!(parse_stm(&write_stm(&segs)).unwrap(), segs);
    }

    #[test]
    fn wiki_filter_is_idempotent(paras in prop::collection::vec(prop::collection::vec("[A-Za-z]{1,8}( [a-z]{1,8}){2,9}[.!?(]", 0..8), 0..5)) {
        let doc = WikiDocument { paragraphs: paras.iter().map(|p| p.join(" ")).collect() };
        let once = filter_wiki(&doc);
        prop_assert_eq!(filter_wiki(&once), once);
    }

    #[test]
    fn parallel_scoring_matches_sequential(pairs in prop::collection::vec((transcript(10), transcript(10)), 1..12)) {
        let opts = ScoringOptions::default();
        prop_assert_eq!(score_corpus(&pairs, &opts).unwrap(), score_corpus_sequential(&pairs, &opts).unwrap());
    }

    #[test]
    fn collapse_ignores_blank_padding(labels in prop::collection::vec(0usize..NUM_SYMBOLS, 0..20)) {
        let padded: Vec<usize> = labels.iter().flat_map(|&l| [l, l, 0]).collect();
        let with_blanks: Vec<usize> = labels.iter().flat_map(|&l| [0, l]).collect();
        prop_assert_eq!(collapse_ctc(&padded).unwrap(), collapse_ctc(&with_blanks).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decoder_agrees_with_oracles(seed in any::<u64>(), frames in 0usize..5, gamma in prop::sample::select(vec![0.0, 0.5, 2.0])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let post = random_posteriorgram(&mut rng, frames, &[0, 1, 3, 4, 30]);
        let dist = collapsed_distribution(&post, DEFAULT_SEARCH_CAP).unwrap();
        let independent = ctc_oracle(&post);
        prop_assert_eq!(dist.len(), independent.len());
        for (k, v) in &dist {
            prop_assert!((v - independent[k]).abs() < 1e-12);
        }
        prop_assert!((dist.values().sum::<f64>() - 1.0).abs() < 1e-9);

        let lm = UniformLm::new(7);
        let exact = exhaustive_decode(&post, &lm, gamma, 1e-12, DEFAULT_SEARCH_CAP).unwrap();
        let full = beam_decode(&post, &lm, &DecodeConfig { gamma, beam_width: 1 << 12, ..DecodeConfig::default() }).unwrap();
        prop_assert_eq!(&full.text, &exact.text);
        prop_assert!((full.score - exact.score).abs() < 1e-9);
        // a pruned beam can only lose probability mass
        let narrow = beam_decode(&post, &lm, &DecodeConfig { gamma, beam_width: 2, ..DecodeConfig::default() }).unwrap();
        prop_assert!(narrow.score <= exact.score + 1e-9);
    }

    #[test]
    fn greedy_is_argmax_path(seed in any::<u64>(), frames in 0usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let post = random_posteriorgram(&mut rng, frames, &[0, 1, 5, 6, 31]);
        let labels: Vec<usize> = (0..frames)
            .map(|t| (0..NUM_SYMBOLS).max_by(|&a, &b| post.prob(t, a).total_cmp(&post.prob(t, b)).then(b.cmp(&a))).unwrap())
            .collect();
        prop_assert_eq!(greedy_decode(&post).to_attached_string(), tokenize(&collapse_ctc(&labels).unwrap()).to_attached_string());
    }

    #[test]
    fn batch_decoding_keeps_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let posts: Vec<Posteriorgram> = (0..6).map(|i| random_posteriorgram(&mut rng, i, &[0, 3, 4, 1])).collect();
        let cfg = DecodeConfig::default();
        prop_assert_eq!(decode_batch(&posts, &UniformLm::new(3), &cfg), decode_batch_sequential(&posts, &UniformLm::new(3), &cfg));
    }
}

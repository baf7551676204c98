use std::collections::HashSet;

use permpat::matcher::{find_pattern_with, Distribution, PatternDp};
use permpat::monotone::{build_csp, mid};
use permpat::oracle::brute_force_match;
use permpat::*;
use proptest::prelude::*;

fn permutation(max_len: usize) -> impl Strategy<Value = Permutation> {
    (1..=max_len)
        .prop_flat_map(|n| Just((1..=n).collect::<Vec<usize>>()).prop_shuffle())
        .prop_map(|v| Permutation::from_one_line(&v).unwrap())
}

// A complete merge sequence for `n` points driven by arbitrary choices.
fn merge_sequence(n: usize, choices: &[(usize, usize)]) -> MergeSequence {
    let mut live: Vec<usize> = (1..=n).collect();
    let mut seq = MergeSequence::default();
    let mut c = choices.iter().cycle();
    while live.len() > 1 {
        let &(a, b) = c.next().unwrap_or(&(0, 1));
        let i = live.remove(a % live.len());
        let j = live.remove(b % live.len());
        let k = n + seq.len() + 1;
        seq.push(MergeStep::new(i, j, k));
        live.push(k);
    }
    seq
}

fn text_and_sequence(max_len: usize) -> impl Strategy<Value = (Permutation, MergeSequence)> {
    (permutation(max_len), prop::collection::vec((0usize..64, 0usize..64), 1..16))
        .prop_map(|(pi, choices)| {
            let seq = merge_sequence(pi.len(), &choices);
            (pi, seq)
        })
}

fn family_views(pi: &Permutation, seq: &MergeSequence) -> (usize, bool) {
    let mut family = RectangleFamily::from_permutation(pi);
    let mut width = 1;
    let mut all_within = true;
    for st in seq.steps() {
        family.merge_in_place(st.i, st.j, st.k).unwrap();
        width = width.max(1 + family.view(st.k).unwrap());
    }
    let mut family = RectangleFamily::from_permutation(pi);
    for st in seq.steps() {
        family.merge_in_place(st.i, st.j, st.k).unwrap();
        all_within &= family.is_wide(width);
    }
    (width, all_within)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matchers_agree_with_brute_force(sigma in permutation(4), (pi, seq) in text_and_sequence(10)) {
        let expected = brute_force_match(&sigma, &pi).is_some();
        let (dp, _) = find_pattern_with(&sigma, &pi, &seq, Execution::Sequential).unwrap();
        let auto = match_auto(&sigma, &pi).unwrap();
        let poly = poly_space_match(&sigma, &pi).unwrap();
        for found in [&dp, &auto, &poly] {
            prop_assert_eq!(found.is_some(), expected);
            if let Some(phi) = found {
                prop_assert!(verify_embedding(&sigma, &pi, phi).unwrap());
            }
        }
    }

    #[test]
    fn width_evaluators_agree((pi, seq) in text_and_sequence(12)) {
        let w = width_of_decomposition(&pi, &seq).unwrap();
        let (family_width, family_wide) = family_views(&pi, &seq);
        prop_assert_eq!(w, family_width);
        // Only new rectangles need checking: older ones never view more than the newest.
        prop_assert!(family_wide);
        prop_assert!(verify_wide(&pi, &seq, w).unwrap());
        if w > 1 {
            prop_assert!(!verify_wide(&pi, &seq, w - 1).unwrap());
            prop_assert!(first_violation(&pi, &seq, w - 1).unwrap().is_some());
        }
        prop_assert_eq!(first_violation(&pi, &seq, w).unwrap(), None);
    }

    #[test]
    fn budgeted_builder_output_is_sound(pi in permutation(60), d in 1usize..8) {
        match build_decomposition_budget(&pi, d).unwrap() {
            BudgetOutcome::Sequence(seq) => {
                seq.validate(pi.len()).unwrap();
                prop_assert!(verify_wide(&pi, &seq, d).unwrap());
            }
            BudgetOutcome::Dense(cells) => {
                prop_assert!(cells.cells.len() >= 2);
                prop_assert_eq!(cells.cells.len(), cells.representatives.len());
            }
        }
    }

    #[test]
    fn coarsenings_bounded_by_initial_lines(pi in permutation(200), d in 1usize..12) {
        let mut g = decompose::Gridding::new(&pi, d);
        while let decompose::StepOutcome::Merged(_) = g.step() {}
        prop_assert!(g.coarsenings() <= g.initial_line_count());
    }

    #[test]
    fn settled_entries_carry_over(sigma in permutation(4), (pi, seq) in text_and_sequence(9)) {
        let (sigma, _) = sigma.standardize();
        let mut dp = PatternDp::new(&sigma, &pi, &seq, Execution::Sequential).unwrap();
        for st in seq.steps() {
            let before: Vec<(Vec<usize>, Vec<u64>)> =
                dp.table().entries().into_iter().map(|(k, v)| (k.clone(), v.clone())).collect();
            dp.advance();
            let after: HashSet<(Vec<usize>, Vec<u64>)> =
                dp.table().entries().into_iter().map(|(k, v)| (k.clone(), v.clone())).collect();
            for entry in before {
                if !entry.0.iter().any(|&r| r == st.i || r == st.j || r == st.k) {
                    prop_assert!(after.contains(&entry));
                }
            }
        }
    }

    #[test]
    fn visibility_degree_within_twice_width((pi, seq) in text_and_sequence(14)) {
        let w = width_of_decomposition(&pi, &seq).unwrap();
        let sigma = parse_permutation("1 2").unwrap();
        let mut dp = PatternDp::new(&sigma, &pi, &seq, Execution::Sequential).unwrap();
        prop_assert_eq!(dp.graph().max_degree(), 0);
        while dp.advance() {
            prop_assert!(dp.graph().max_degree() <= 2 * w);
        }
    }

    #[test]
    fn answers_survive_coordinate_stretching(sigma in permutation(4), pi in permutation(10), a in 1usize..5, b in 0usize..7) {
        let stretched = Permutation::new(
            pi.iter().map(|(l, p)| (l, Point::new(a * p.x + b, p.y * p.y + b))).collect(),
        ).unwrap();
        let plain = match_auto(&sigma, &pi).unwrap();
        let moved = match_auto(&sigma, &stretched).unwrap();
        prop_assert_eq!(plain.is_some(), moved.is_some());
        if let Some(phi) = moved {
            prop_assert!(verify_embedding(&sigma, &stretched, &phi).unwrap());
        }
    }

    #[test]
    fn medians_coincide_within_a_class(pi in permutation(14), picks in prop::collection::vec(0usize..1000, 3)) {
        let part = greedy_monotone_partition(&pi);
        for class in part.classes.iter().filter(|c| c.labels.len() >= 3) {
            let l = |i: usize| class.labels[picks[i] % class.labels.len()];
            let (a, b, c) = (l(0), l(1), l(2));
            prop_assert_eq!(mid(&pi, a, b, c, Axis::X), mid(&pi, a, b, c, Axis::Y));
        }
    }

    #[test]
    fn assignment_embeddings_respect_classes(sigma in permutation(3), pi in permutation(10), index in 0u64..1000) {
        let part = greedy_monotone_partition(&pi);
        let t = part.len();
        let a = PatternAssignment::from_index(index % (t as u64).pow(sigma.len() as u32), sigma.len(), t);
        if let Some(phi) = sigma_pi_embedding(&sigma, &a, &pi, &part).unwrap() {
            prop_assert!(verify_embedding(&sigma, &pi, &phi).unwrap());
            for (pos, (s, _)) in sigma.iter().enumerate() {
                let image = phi.get(s).unwrap();
                prop_assert!(part.classes[a.classes[pos]].labels.contains(&image));
            }
        }
    }

    #[test]
    fn monotone_decomposition_is_wide(pi in permutation(40)) {
        let part = greedy_monotone_partition(&pi);
        let seq = monotone_decomposition(&pi, &part).unwrap();
        seq.validate(pi.len()).unwrap();
        prop_assert!(verify_wide(&pi, &seq, 6 * part.len() - 5).unwrap());
    }

    #[test]
    fn median_closure(sigma in permutation(3), pi in permutation(8)) {
        let part = greedy_monotone_partition(&pi).normalized(&pi).unwrap();
        let t = part.len() as u64;
        for index in 0..t.pow(sigma.len() as u32) {
            let a = PatternAssignment::from_index(index, sigma.len(), part.len());
            for c in build_csp(&sigma, &a, &pi, &part).unwrap() {
                for &(x1, y1) in &c.allowed {
                    for &(x2, y2) in &c.allowed {
                        for &(x3, y3) in &c.allowed {
                            let m = (mid(&pi, x1, x2, x3, c.axis), mid(&pi, y1, y2, y3, c.axis));
                            prop_assert!(c.allowed.contains(&m));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn restriction_keeps_relations(pi in permutation(12), keep in prop::collection::vec(any::<bool>(), 12)) {
        let subset: Vec<Label> = pi.labels().iter().copied().filter(|&l| keep[l - 1]).collect();
        let sub = restrict(&pi, &subset).unwrap();
        prop_assert_eq!(sub.len(), subset.len());
        for (a, pa) in sub.iter() {
            for (b, pb) in sub.iter() {
                let (qa, qb) = (pi.point(a).unwrap(), pi.point(b).unwrap());
                prop_assert_eq!(pa.x < pb.x, qa.x < qb.x);
                prop_assert_eq!(pa.y < pb.y, qa.y < qb.y);
            }
        }
    }

    #[test]
    fn formats_round_trip((pi, seq) in text_and_sequence(12)) {
        prop_assert_eq!(parse_permutation(&pi.to_string()).unwrap(), pi.clone());
        prop_assert_eq!(MergeSequence::parse(&seq.to_string()).unwrap(), seq);
        let part = greedy_monotone_partition(&pi);
        prop_assert_eq!(MonotonePartition::parse(&part.to_string()).unwrap(), part);
    }
}

#[test]
fn step_zero_table_is_the_implicit_rule() {
    let pi = parse_permutation("2 4 1 3").unwrap();
    let sigma = parse_permutation("1 2").unwrap();
    let seq = canonical_grid_decomposition(2).unwrap();
    let dp = PatternDp::new(&sigma, &pi, &seq, Execution::Sequential).unwrap();
    assert!(dp.table().entries().is_empty());
    for k in 1..=4 {
        let one = Distribution { key: vec![k], masks: vec![0b01] };
        let two = Distribution { key: vec![k], masks: vec![0b11] };
        assert!(dp.is_satisfiable(&one));
        assert!(!dp.is_satisfiable(&two));
    }
}

#[test]
fn recurrence_can_split_into_four_components() {
    let pi = parse_permutation("7 5 2 6 1 3 4").unwrap();
    let sigma = parse_permutation("2 1 4 3").unwrap();
    let seq = MergeSequence::from_triples(&[(1, 2, 8), (8, 3, 9), (9, 4, 10), (10, 5, 11), (11, 6, 12), (12, 7, 13)]);
    let (found, stats) = find_pattern_with(&sigma, &pi, &seq, Execution::Sequential).unwrap();
    assert!(stats.max_components >= 3, "{stats:?}");
    assert_eq!(found.is_some(), brute_force_match(&sigma, &pi).is_some());
}

#[test]
fn grid_branch_embeds_a_short_pattern() {
    // Large random texts end in the dense branch of the builder for r = 2.
    let pi = random_permutation(200_000, 1);
    assert!(matches!(build_decomposition(&pi, 2).unwrap(), DecompositionResult::Grid(_)));
    let sigma = parse_permutation("2 1").unwrap();
    let phi = match_auto(&sigma, &pi).unwrap().unwrap();
    assert!(verify_embedding(&sigma, &pi, &phi).unwrap());
}

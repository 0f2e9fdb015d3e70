use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use ciequil_core::equations::equation_system;
use ciequil_core::equilibria::{
    fixture, solve_one_edge_exact, verify_ci_equilibrium, verify_nash, SolveStatus, DEFAULT_TOL, FIXTURE_IDS,
};
use ciequil_core::game::{conditional_payoffs, expected_payoff, marginal, random_game, spohn_matrix};
use ciequil_core::invariants::chow_class;
use ciequil_core::model_degree::{decompose, model_degree, model_dim, star_degree};
use ciequil_core::polyring::multinomial;
use ciequil_core::scalar::{int, ratio};
use ciequil_core::{Game, GameFormat, Graph, MixedProfile, Rational, RingPoly};

fn arb_format(max_players: usize, max_d: usize) -> impl Strategy<Value = GameFormat> {
    prop::collection::vec(1..=max_d, 1..=max_players).prop_map(|d| GameFormat::new(d).unwrap())
}

/// A totally mixed rational profile with small positive weights.
fn arb_profile(format: GameFormat) -> impl Strategy<Value = MixedProfile<Rational>> {
    let n = format.num_states();
    prop::collection::vec(1i64..=9, n).prop_map(move |w| {
        let total: i64 = w.iter().sum();
        MixedProfile::new(format.clone(), w.iter().map(|&x| ratio(x, total)).collect()).unwrap()
    })
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        prop::collection::vec(any::<bool>(), pairs.len()).prop_map(move |keep| {
            let edges: Vec<(usize, usize)> = pairs.iter().zip(keep).filter(|(_, k)| *k).map(|(e, _)| *e).collect();
            Graph::with_edges(n, &edges).unwrap()
        })
    })
}

fn edge_subset(small: &Graph, big: &Graph) -> bool {
    small.edges().iter().all(|&(a, b)| big.has_edge(a, b))
}

/// Sum of `c * prod x_i^{e_i}` rebuilt in a possibly capped ring, which drops
/// every exponent at or above its cap.
fn rebuild(terms: &[(Vec<u32>, BigInt)], caps: Option<Vec<u32>>) -> RingPoly {
    let nvars = 3;
    let mut out = RingPoly::zero(nvars, caps.clone());
    for (e, c) in terms {
        let mut m = RingPoly::constant(nvars, caps.clone(), c.clone());
        for (i, &k) in e.iter().enumerate() {
            m = m.mul(&RingPoly::var(nvars, caps.clone(), i).pow(k as u64));
        }
        out = out.add(&m);
    }
    out
}

fn arb_ring_terms() -> impl Strategy<Value = Vec<(Vec<u32>, BigInt)>> {
    prop::collection::vec((prop::collection::vec(0u32..4, 3), (-5i64..=5).prop_map(BigInt::from)), 0..5)
}

fn brute_force_cliques(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let cliques: Vec<Vec<usize>> = (1u32..1 << n)
        .map(|m| (0..n).filter(|v| m >> v & 1 == 1).collect::<Vec<_>>())
        .filter(|c| g.is_clique(c))
        .collect();
    let mut maximal: Vec<Vec<usize>> = cliques
        .iter()
        .filter(|c| !cliques.iter().any(|o| o.len() > c.len() && c.iter().all(|v| o.contains(v))))
        .cloned()
        .collect();
    maximal.sort();
    maximal
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn marginals_compose(p in arb_format(4, 3).prop_flat_map(arb_profile), mask_t in 1u32..16, mask_s in 0u32..16) {
        let n = p.format.players();
        let t: Vec<usize> = (0..n).filter(|k| mask_t >> k & 1 == 1).collect();
        prop_assume!(!t.is_empty());
        let s: Vec<usize> = t.iter().copied().filter(|k| mask_s >> k & 1 == 1).collect();
        let outer = marginal(&p, &t).unwrap();
        let outer = MixedProfile::new(GameFormat::new(outer.dims).unwrap(), outer.values).unwrap();
        let positions: Vec<usize> = s.iter().map(|k| t.iter().position(|x| x == k).unwrap()).collect();
        prop_assert_eq!(marginal(&outer, &positions).unwrap().values, marginal(&p, &s).unwrap().values);
    }

    #[test]
    fn flat_index_round_trip(format in arb_format(5, 4)) {
        for (flat, s) in format.states().enumerate() {
            prop_assert_eq!(format.flatten(&s), flat);
            prop_assert_eq!(format.unflatten(flat), s);
        }
    }

    #[test]
    fn minors_vanish_iff_conditional_payoffs_constant(
        (p, seed, flat) in arb_format(3, 3).prop_flat_map(|f| (arb_profile(f), any::<u64>(), any::<bool>()))
    ) {
        let mut game = random_game(&p.format, seed, -4..=4);
        if flat {
            // A constant payoff for player 0 makes every conditional payoff equal.
            let base = game.clone();
            let fmt = p.format.clone();
            game = Game::from_fn(fmt.clone(), |k, s| if k == 0 { int(3) } else { base.payoff(k)[fmt.flatten(s)].clone() });
        }
        for k in 0..p.format.players() {
            let m = spohn_matrix(&game, &p, k).unwrap();
            let vanish = m.minors().iter().all(|(_, v)| v.is_zero());
            let cond = conditional_payoffs(&game, &p, k).unwrap();
            let constant = cond.iter().all(|c| *c == cond[0]);
            let expected = expected_payoff(&game, &p, k).unwrap();
            prop_assert_eq!(vanish, constant);
            prop_assert_eq!(constant, cond.iter().all(|c| *c == expected));
            if flat && k == 0 {
                prop_assert!(vanish);
            }
        }
    }

    #[test]
    fn scaling_a_payoff_scales_the_second_column(
        (p, seed, lambda) in arb_format(3, 3).prop_flat_map(|f| (arb_profile(f), any::<u64>(), 1i64..=7))
    ) {
        let game = random_game(&p.format, seed, -4..=4);
        let lam = int(lambda);
        let scaled = Game::from_fn(p.format.clone(), |k, s| {
            let v = game.payoff(k)[p.format.flatten(s)].clone();
            if k == 0 { v * lam.clone() } else { v }
        });
        let a = spohn_matrix(&game, &p, 0).unwrap();
        let b = spohn_matrix(&scaled, &p, 0).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            prop_assert_eq!(&ra[0], &rb[0]);
            prop_assert_eq!(ra[1].clone() * lam.clone(), rb[1].clone());
        }
        for ((_, ma), (_, mb)) in a.minors().iter().zip(b.minors()) {
            prop_assert_eq!(ma.is_zero(), mb.is_zero());
        }
    }

    #[test]
    fn cluster_approximations_sandwich_the_graph(g in arb_graph(6), d in prop::collection::vec(1usize..=3, 6)) {
        let format = GameFormat::new(d[..g.n()].to_vec()).unwrap();
        let sub = g.cluster_subgraph(&format).unwrap();
        let sup = g.cluster_supergraph();
        prop_assert!(edge_subset(&sub, &g) && edge_subset(&g, &sup));
        prop_assert!(sub.is_cluster() && sup.is_cluster());
    }

    #[test]
    fn non_adjacent_pairs_are_separated(g in arb_graph(6)) {
        let n = g.n();
        for a in 0..n {
            for b in a + 1..n {
                if !g.has_edge(a, b) {
                    let rest: Vec<usize> = (0..n).filter(|&v| v != a && v != b).collect();
                    prop_assert!(g.separates(&[a], &[b], &rest).unwrap());
                }
            }
        }
    }

    #[test]
    fn maximal_cliques_match_brute_force(g in arb_graph(6)) {
        let mut got = g.maximal_cliques().unwrap();
        got.sort();
        prop_assert_eq!(got, brute_force_cliques(&g));
    }

    #[test]
    fn parametrization_columns_count_cliques(g in arb_graph(4), d in prop::collection::vec(1usize..=3, 4)) {
        let format = GameFormat::new(d[..g.n()].to_vec()).unwrap();
        let a = g.parametrization_matrix(&format).unwrap();
        let k = g.maximal_cliques().unwrap().len();
        for col in 0..a.cols.len() {
            prop_assert_eq!(a.entries.iter().map(|row| row[col] as usize).sum::<usize>(), k);
        }
        if g.is_cluster() {
            let want: usize = g.components().iter().map(|c| c.iter().map(|&v| d[v]).product::<usize>() - 1).sum();
            prop_assert_eq!(model_dim(&g, &format).unwrap(), want);
        }
    }

    #[test]
    fn truncation_commutes_with_products(a in arb_ring_terms(), b in arb_ring_terms(), caps in prop::collection::vec(1u32..5, 3)) {
        let full = rebuild(&a, None).mul(&rebuild(&b, None));
        let truncated_after = rebuild(&full.terms(), Some(caps.clone()));
        let truncated_before = rebuild(&a, Some(caps.clone())).mul(&rebuild(&b, Some(caps)));
        prop_assert_eq!(truncated_after.terms(), truncated_before.terms());
    }

    #[test]
    fn ring_laws(a in arb_ring_terms(), b in arb_ring_terms(), c in arb_ring_terms()) {
        let (a, b, c) = (rebuild(&a, None), rebuild(&b, None), rebuild(&c, None));
        prop_assert_eq!(a.mul(&b).terms(), b.mul(&a).terms());
        prop_assert_eq!(a.mul(&b).mul(&c).terms(), a.mul(&b.mul(&c)).terms());
        prop_assert_eq!(a.mul(&b.add(&c)).terms(), a.mul(&b).add(&a.mul(&c)).terms());
    }

    #[test]
    fn nash_implies_no_edge_ci(
        (p_factors, seed, indifferent) in arb_format(3, 3).prop_flat_map(|f| {
            let factors: Vec<BoxedStrategy<Vec<i64>>> =
                f.dims().iter().map(|&d| prop::collection::vec(1i64..=5, d).boxed()).collect();
            (Just(f), factors, any::<u64>(), any::<bool>())
        }).prop_map(|(f, factors, seed, ind)| ((f, factors), seed, ind))
    ) {
        let (format, factors) = p_factors;
        let factors: Vec<Vec<Rational>> = factors
            .iter()
            .map(|w| {
                let t: i64 = w.iter().sum();
                w.iter().map(|&x| ratio(x, t)).collect()
            })
            .collect();
        let p = MixedProfile::product(format.clone(), &factors).unwrap();
        let base = random_game(&format, seed, -4..=4);
        let game = if indifferent {
            // Payoffs that ignore the player's own strategy make every product profile Nash.
            Game::from_fn(format.clone(), |k, s| {
                let mut s0 = s.to_vec();
                s0[k] = 0;
                base.payoff(k)[format.flatten(&s0)].clone()
            })
        } else {
            base
        };
        let nash = verify_nash(&game, &p, DEFAULT_TOL).unwrap();
        let ci = verify_ci_equilibrium(&game, &Graph::empty(format.players()).unwrap(), &p, DEFAULT_TOL).unwrap();
        if nash.nash {
            prop_assert_eq!(ci.ci, Some(true));
        }
        if indifferent {
            prop_assert!(nash.nash);
        }
    }
}

#[test]
fn chow_classes_are_homogeneous() {
    for n in 1..=5usize {
        let mut formats = vec![vec![]];
        for _ in 0..n {
            formats = formats
                .into_iter()
                .flat_map(|v: Vec<usize>| (1..=4).map(move |d| [v.clone(), vec![d]].concat()))
                .collect();
        }
        // A few representative cluster graphs per size keep this quick.
        let graphs = [
            Graph::empty(n).unwrap(),
            Graph::complete(n).unwrap(),
            Graph::with_edges(n, if n >= 2 { &[(0, 1)] } else { &[] }).unwrap(),
            Graph::with_edges(n, if n >= 4 { &[(0, 1), (2, 3)] } else { &[] }).unwrap(),
        ];
        for d in &formats {
            let f = GameFormat::new(d.clone()).unwrap();
            for g in &graphs {
                let class = chow_class(&f, g).unwrap();
                if class.is_zero() {
                    continue;
                }
                let want: u32 =
                    g.components().iter().map(|c| c.iter().map(|&v| d[v] as u32).sum::<u32>()).sum::<u32>() - n as u32;
                assert_eq!(class.homogeneous_degree(), Some(want), "{d:?} {g:?}");
            }
        }
    }
}

#[test]
fn generator_count_on_cluster_graphs() {
    for (seed, d) in [(1u64, vec![2, 2, 2]), (2, vec![3, 2, 2]), (3, vec![4, 3, 2]), (4, vec![2, 2, 2, 3])] {
        let f = GameFormat::new(d.clone()).unwrap();
        let game = random_game(&f, seed, -9..=9);
        let n = d.len();
        for g in [Graph::empty(n).unwrap(), Graph::complete(n).unwrap(), Graph::with_edges(n, &[(1, 2)]).unwrap()] {
            let sys = equation_system(&game, &g).unwrap();
            // Isolated players contribute the d - 1 minors against their first row.
            let want: usize =
                d.iter().enumerate().map(|(v, &k)| if g.is_isolated(v) { k - 1 } else { k * (k - 1) / 2 }).sum();
            assert_eq!(sys.generators.len(), want, "{d:?} {g:?}");
        }
    }
}

/// Clique coordinates of a profile on a cluster graph: the clique marginals.
fn sigma_of(space: &ciequil_core::SigmaSpace, p: &MixedProfile<Rational>) -> Vec<Rational> {
    space.cliques.iter().flat_map(|c| marginal(p, c).unwrap().values).collect()
}

#[test]
fn fixture_points_solve_their_systems() {
    for id in FIXTURE_IDS {
        let fx = fixture(id).unwrap();
        for fam in fx.families.iter().filter(|f| f.is_exact()) {
            let sys = equation_system(&fx.game, &fam.graph).unwrap();
            for x in fam.samples(5) {
                let p = fam.eval_exact(&fx.game.format, &x).unwrap();
                let sigma = sigma_of(&sys.space, &p);
                for poly in sys.polys() {
                    assert!(poly.eval(&sigma).is_zero(), "{id} {} at {x:?}", fam.label);
                }
            }
        }
    }
}

#[test]
fn solver_output_solves_the_system_exactly() {
    let mut solved = 0;
    for (d, seeds) in [(vec![4usize, 2, 2], 0..15u64), (vec![6, 2, 3], 0..4), (vec![6, 3, 2], 0..4)] {
        let f = GameFormat::new(d.clone()).unwrap();
        for seed in seeds {
            let game = random_game(&f, seed, -9..=9);
            let r = solve_one_edge_exact(&game, (1, 2), DEFAULT_TOL).unwrap();
            let sys = equation_system(&game, &Graph::with_edges(3, &[(1, 2)]).unwrap()).unwrap();
            let mut points = r.points.clone();
            if let Some(fam) = &r.family {
                points.push(fam.base.clone());
                let t: Vec<Rational> = fam.directions.iter().map(|_| ratio(1, 3)).collect();
                points.push(fam.at(&t));
            }
            for pt in &points {
                for poly in sys.polys() {
                    assert!(poly.eval(pt).is_zero(), "{d:?} seed {seed}");
                }
            }
            if r.status != SolveStatus::NoSolution {
                solved += 1;
            }
        }
    }
    assert!(solved > 0);
}

#[test]
fn coordination_families_nest() {
    let fx = fixture("coordination-2-2-2").unwrap();
    let bigger = ["G1", "G2", "G3"];
    for (i, label) in ["G0", "G1"].iter().enumerate() {
        let fam = fx.family(label).unwrap();
        for x in fam.samples(5) {
            let p = fam.eval_exact(&fx.game.format, &x).unwrap();
            for other in &bigger[i..] {
                let g = &fx.family(other).unwrap().graph;
                let r = verify_ci_equilibrium(&fx.game, g, &p, DEFAULT_TOL).unwrap();
                assert_eq!(r.ci, Some(true), "{label} point on {other}");
            }
        }
    }
}

#[test]
fn decomposition_dims_match_rank() {
    let mut graphs = Vec::new();
    for n in 1..=5usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        for m in 0u32..1 << pairs.len() {
            let edges: Vec<(usize, usize)> = (0..pairs.len()).filter(|i| m >> i & 1 == 1).map(|i| pairs[i]).collect();
            graphs.push(Graph::with_edges(n, &edges).unwrap());
        }
    }
    let mut checked = 0;
    for g in &graphs {
        let tree = decompose(g);
        if !tree.is_decomposable() {
            continue;
        }
        for d in [vec![2; 5], vec![3, 2, 2, 3, 2], vec![1, 3, 2, 2, 3]] {
            let f = GameFormat::new(d[..g.n()].to_vec()).unwrap();
            assert_eq!(tree.dim(&f), Some(model_dim(g, &f).unwrap() as u64), "{g:?} {d:?}");
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn stars_match_the_recursion() {
    for n in 2..=6usize {
        let edges: Vec<(usize, usize)> = (1..n).map(|v| (0, v)).collect();
        let g = Graph::with_edges(n, &edges).unwrap();
        for d in [vec![2; 6], vec![3, 2, 3, 2, 3, 2], vec![2, 3, 1, 3, 2, 3]] {
            let f = GameFormat::new(d[..n].to_vec()).unwrap();
            assert_eq!(star_degree(&f, 0), model_degree(&g, &f).unwrap(), "n={n} {d:?}");
        }
    }
}

#[test]
fn three_vertex_closed_forms_up_to_four() {
    let g = |e: &[(usize, usize)]| Graph::from_edges_1based(3, e).unwrap();
    for d1 in 1..=4u64 {
        for d2 in 1..=4u64 {
            for d3 in 1..=4u64 {
                let f = GameFormat::new(vec![d1 as usize, d2 as usize, d3 as usize]).unwrap();
                let cases = [
                    (g(&[]), multinomial(&[d1 - 1, d2 - 1, d3 - 1])),
                    (g(&[(2, 3)]), multinomial(&[d1 - 1, d2 * d3 - 1])),
                    (g(&[(1, 2), (2, 3)]), multinomial(&[d1 - 1, d3 - 1]).pow(d2 as u32)),
                    (g(&[(1, 2), (1, 3), (2, 3)]), BigInt::one()),
                ];
                for (graph, want) in cases {
                    assert_eq!(model_degree(&graph, &f).unwrap(), want, "{d1},{d2},{d3} {graph:?}");
                }
            }
        }
    }
}

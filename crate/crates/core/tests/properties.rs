mod common;

use std::collections::BTreeSet;

use common::*;
use dyngraph::mapfamily::{preset, random_permutation, MapExpr, PresetParams, PRESET_NAMES};
use dyngraph::metrics::{clustering, components, k4_free, path_stats, triangle_count};
use dyngraph::numtheory::*;
use dyngraph::survey::permutation_lambda;
use dyngraph::{build_graph, parse_map, GraphSpec, MapFamily, NuEstimator, SpaceKind, StateSpace};
use proptest::prelude::*;

fn graph_of(family: MapFamily) -> dyngraph::SimpleGraph {
    build_graph(&GraphSpec::new(family)).unwrap()
}

fn zn_family(n: u64, maps: Vec<MapExpr>) -> MapFamily {
    MapFamily::new(maps, StateSpace::new(SpaceKind::Zn(n)).unwrap()).unwrap()
}

fn residue_map() -> impl Strategy<Value = MapExpr> {
    prop_oneof![
        (-20i64..20, -20i64..20).prop_map(|(a, b)| MapExpr::Affine { a, b }),
        (0u32..9, -10i64..10).prop_map(|(exp, c)| MapExpr::PowerPlus { exp, c }),
        (0u64..12).prop_map(|base| MapExpr::Exp { base }),
        Just(MapExpr::Dickson),
        any::<u64>().prop_map(MapExpr::Perm),
        ((0u32..40).prop_map(|k| k as f64 / 16.0), -5i64..5)
            .prop_map(|(epsilon, shift)| MapExpr::WsMap { epsilon, shift }),
    ]
}

fn any_map() -> impl Strategy<Value = MapExpr> {
    prop_oneof![
        residue_map(),
        prop::array::uniform4(-9i64..9).prop_map(MapExpr::MatQuad),
        Just(MapExpr::PolyDeriv),
        Just(MapExpr::PolySquare),
        prop::collection::vec(-9i64..9, 1..7).prop_map(MapExpr::PolyAddConst),
        any::<u8>().prop_map(MapExpr::CaRule),
    ]
}

fn space_kind() -> impl Strategy<Value = SpaceKind> {
    prop_oneof![
        (1u64..300).prop_map(SpaceKind::Zn),
        (2u64..300).prop_map(SpaceKind::ZnNonzero),
        (1u64..300).prop_map(SpaceKind::ZnUnits),
        (3u64..300).prop_map(SpaceKind::ZnFromTwo),
        (1u64..6).prop_map(SpaceKind::Mat2),
        (1u64..8).prop_map(SpaceKind::UpperTri2),
        (1u64..6, 1u32..5).prop_map(|(n, k)| SpaceKind::PolyQuot(n, k)),
        (1u32..11).prop_map(SpaceKind::BitVec),
    ]
}

// ---- number theory ----

#[test]
fn primality_matches_sieve_to_a_million() {
    let s = sieve(1_000_000);
    for (n, &p) in s.iter().enumerate() {
        assert_eq!(is_prime(n as u64), p, "n={n}");
    }
}

#[test]
fn primitive_root_count_is_phi_of_p_minus_one() {
    for p in primes_up_to(10_000) {
        let count = (1..p).filter(|&a| is_primitive_root(a, p).unwrap()).count() as u64;
        assert_eq!(count, euler_phi(p - 1), "p={p}");
    }
}

#[test]
fn primitive_roots_agree_with_naive_order() {
    for p in primes_up_to(400) {
        for a in 1..p {
            assert_eq!(is_primitive_root(a, p).unwrap(), naive_order(a, p) == p - 1);
        }
    }
}

#[test]
fn fermat_primes_are_one_plus_powers_of_two() {
    for n in 2..70_000u64 {
        if is_fermat_prime(n) {
            assert!(is_one_plus_smooth_prime(n, &[2]), "n={n}");
        }
    }
}

proptest! {
    #[test]
    fn factorization_round_trips(n in 1u64..u64::MAX) {
        let f = factorize(n);
        prop_assert_eq!(f.product(), n);
        for p in f.primes() {
            prop_assert!(is_prime(p));
        }
    }

    #[test]
    fn factorization_matches_trial_division(n in 1u64..1_000_000_000) {
        let mut ours: Vec<u64> = Vec::new();
        for &(p, e) in &factorize(n).factors {
            ours.extend(std::iter::repeat_n(p, e as usize));
        }
        prop_assert_eq!(ours, trial_division_factors(n));
    }

    #[test]
    fn semiprimes_factor(i in 0usize..2000, j in 0usize..2000) {
        // products of two primes near 2^31 exercise the rho fallback
        let p = primes_near(i);
        let q = primes_near(j);
        let f = factorize(p * q);
        let mut expect = vec![(p.min(q), 1 + u32::from(p == q))];
        if p != q {
            expect.push((p.max(q), 1));
        }
        prop_assert_eq!(f.factors, expect);
    }

    #[test]
    fn smooth_sets_nest(mask in 1u8..16, limit in 1u64..5000) {
        let base: Vec<u64> = [2u64, 3, 5, 7]
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p)
            .collect();
        let single = smooth_set(&base, limit).unwrap();
        let double = double_smooth_set(&base, limit).unwrap();
        for &m in &single.members {
            prop_assert!(double.contains(m));
            prop_assert!(smooth_by_division(m, &base));
        }
        for &m in &double.members {
            prop_assert!(smooth_by_division(m, &base) || (m % 2 == 0 && smooth_by_division(m / 2, &base)));
        }
        let brute: Vec<u64> = (1..=limit).filter(|&m| smooth_by_division(m, &base)).collect();
        prop_assert_eq!(single.members, brute);
    }
}

fn primes_near(i: usize) -> u64 {
    use std::sync::OnceLock;
    static P: OnceLock<Vec<u64>> = OnceLock::new();
    P.get_or_init(|| {
        let mut v = Vec::new();
        let mut n = (1u64 << 31) - 1;
        while v.len() < 2000 {
            if is_prime(n) {
                v.push(n);
            }
            n += 2;
        }
        v
    })[i]
}

// ---- spaces and maps ----

proptest! {
    #[test]
    fn state_index_round_trip(kind in space_kind(), pick in any::<u64>()) {
        let space = StateSpace::new(kind).unwrap();
        let i = pick % space.size();
        let state = space.state_at(i).unwrap();
        prop_assert_eq!(space.index_of(&state).unwrap(), i);
    }

    #[test]
    fn map_text_round_trip(m in any_map()) {
        prop_assert_eq!(parse_map(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn compiled_maps_agree_with_state_level_application(
        kind in space_kind(),
        maps in prop::collection::vec(any_map(), 1..4),
    ) {
        let Ok(space) = StateSpace::new(kind) else { return Ok(()) };
        let Ok(family) = MapFamily::new(maps, space) else { return Ok(()) };
        prop_assert_eq!(edge_set(&graph_of(family.clone())), slow_edges(&family));
    }

    #[test]
    fn permutations_are_bijections(n in 1u64..2000, seed in any::<u64>()) {
        let p = random_permutation(n, seed);
        prop_assert_eq!(&p, &random_permutation(n, seed));
        let mut sorted = p.clone();
        sorted.sort_unstable();
        prop_assert!(sorted.iter().enumerate().all(|(i, &v)| v as usize == i));
    }
}

// ---- graphs ----

#[test]
fn presets_are_symmetric_and_loop_free() {
    for &name in PRESET_NAMES {
        let (ns, k) = match name {
            "polyring" => (1..=7u64, 4),
            "artin" | "fermat" | "pierpont" => (2..=500u64, 6),
            _ => (1..=500u64, 6),
        };
        for n in ns {
            let g = graph_of(preset(name, PresetParams { n, k }).unwrap());
            for v in 0..g.vertex_count() {
                let nb = g.neighbors(v).unwrap();
                assert!(nb.windows(2).all(|w| w[0] < w[1]), "{name} n={n}");
                for &w in nb {
                    assert_ne!(w as usize, v, "loop in {name} n={n}");
                    assert!(g.neighbors(w as usize).unwrap().contains(&(v as u32)));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn edge_count_bounded_by_maps_times_vertices(
        n in 1u64..400,
        maps in prop::collection::vec(residue_map(), 1..5),
    ) {
        let k = maps.len();
        let g = graph_of(zn_family(n, maps));
        prop_assert!(g.edge_count() <= k * n as usize);
    }

    #[test]
    fn map_order_does_not_matter(
        n in 1u64..400,
        mut maps in prop::collection::vec(residue_map(), 1..5),
        rot in 0usize..5,
    ) {
        let a = graph_of(zn_family(n, maps.clone()));
        let r = rot % maps.len();
        maps.rotate_left(r);
        maps.reverse();
        prop_assert_eq!(a, graph_of(zn_family(n, maps)));
    }

    #[test]
    fn single_map_graphs_have_no_k4(n in 1u64..1000, m in residue_map()) {
        prop_assert!(k4_free(&graph_of(zn_family(n, vec![m]))));
    }

    #[test]
    fn metrics_match_oracles(
        kind in prop_oneof![
            (1u64..200).prop_map(SpaceKind::Zn),
            (2u64..200).prop_map(SpaceKind::ZnNonzero),
            (1u64..4).prop_map(SpaceKind::Mat2),
            (1u32..8).prop_map(SpaceKind::BitVec),
        ],
        maps in prop::collection::vec(any_map(), 1..4),
    ) {
        let space = StateSpace::new(kind).unwrap();
        let Ok(family) = MapFamily::new(maps, space) else { return Ok(()) };
        let g = graph_of(family);
        let n = g.vertex_count();
        let edges = edge_set(&g);

        let c = components(&g);
        let (uf, uf_count) = union_find(n, edges.iter().copied());
        prop_assert_eq!(c.count, uf_count);
        prop_assert!(same_partition(&c.labels, &uf));

        prop_assert_eq!(triangle_count(&g), brute_triangles(n, &edges));

        let cl = clustering(&g);
        prop_assert!((0.0..=1.0).contains(&cl.transitivity));
        prop_assert!((0.0..=1.0).contains(&cl.local));

        let ps = path_stats(&g);
        let d = all_distances(n, &edges);
        let big = largest_class(&uf);
        let members: Vec<usize> = (0..n).filter(|&v| uf[v] == big).collect();
        let diam = members.iter().flat_map(|&u| members.iter().map(move |&v| (u, v))).map(|(u, v)| d[u][v]).max().unwrap_or(0);
        prop_assert_eq!(ps.diameter, diam);
        if let Some(mu) = ps.mu {
            let total: u64 = members.iter().flat_map(|&u| members.iter().map(move |&v| (u, v))).map(|(u, v)| d[u][v] as u64).sum();
            let pairs = (members.len() * (members.len() - 1)) as f64;
            prop_assert!((mu - total as f64 / pairs).abs() < 1e-9);
            prop_assert!(mu <= ps.diameter as f64 + 1e-12);
        }
    }

    #[test]
    fn affine_connectivity_stays_in_smooth_locus(a in 2i64..=8, b in 0i64..8, n in 1u64..=500) {
        let b = b % a;
        let g = graph_of(zn_family(n, vec![MapExpr::Affine { a, b }]));
        if components(&g).is_connected() {
            let allowed: BTreeSet<u64> = trial_division_factors(a as u64)
                .into_iter()
                .chain(trial_division_factors(a as u64 - 1))
                .collect();
            let allowed: Vec<u64> = allowed.into_iter().collect();
            prop_assert!(smooth_by_division(n, &allowed), "a={} b={} n={}", a, b, n);
        }
    }
}

fn largest_class(labels: &[usize]) -> usize {
    let mut size = vec![0usize; labels.len()];
    for &l in labels {
        size[l] += 1;
    }
    // ties go to the class with the smallest member, matching the library
    (0..labels.len())
        .max_by(|&x, &y| size[x].cmp(&size[y]).then(y.cmp(&x)))
        .unwrap_or(0)
}

// ---- reproducibility ----

#[test]
fn seeded_census_reproduces() {
    let a = permutation_lambda(300, 8, 1234, NuEstimator::Transitivity).unwrap();
    let b = permutation_lambda(300, 8, 1234, NuEstimator::Transitivity).unwrap();
    assert_eq!(a.to_csv(&[]), b.to_csv(&[]));
    let c = permutation_lambda(300, 8, 1235, NuEstimator::Transitivity).unwrap();
    assert_ne!(a.lambdas, c.lambdas);
}

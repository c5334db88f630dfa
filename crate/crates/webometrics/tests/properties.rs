//! Property-based checks of the parsing, planning, and statistics surfaces.

mod support;

use proptest::prelude::*;

use webometrics::collector::parse_hce;
use webometrics::io::config::parse_config;
use webometrics::io::pajek::{read_pajek, write_pajek};
use webometrics::model::{InstitutionKind, Region, SummaryMode};
use webometrics::network::network_summary;
use webometrics::queryplan::{
    build_query, canonicalize, enumerate_pairwise_plan, MetricKind, PairScope, QuerySpec,
    ResolvedNode,
};
use webometrics::stats::{average_ranks, describe, log_transform, spearman};

fn domain() -> impl Strategy<Value = String> {
    proptest::string::string_regex("[a-z0-9]([a-z0-9]{0,6})(\\.[a-z]{2,4}){1,2}").unwrap()
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent(raw in "\\PC{0,40}") {
        if let Ok(canon) = canonicalize(&raw) {
            prop_assert_eq!(canonicalize(&canon).unwrap(), canon);
        }
    }

    #[test]
    fn canonicalize_ignores_url_decorations(
        host in domain(),
        scheme in prop_oneof![Just(""), Just("http://"), Just("https://")],
        user in prop_oneof![Just(""), Just("user@"), Just("a:b@")],
        port in prop_oneof![Just(""), Just(":80"), Just(":8443")],
        path in prop_oneof![Just(""), Just("/"), Just("/x/y?q=1#frag")],
    ) {
        let decorated = format!("{scheme}{user}{host}{port}{path}");
        prop_assert_eq!(canonicalize(&decorated).unwrap(), canonicalize(&host).unwrap());
    }

    #[test]
    fn query_strings_follow_the_grammar(target in domain(), host in domain()) {
        prop_assume!(target != host);
        let tpc = build_query(&QuerySpec::tpc(&target)).unwrap();
        prop_assert_eq!(&tpc, &format!("site:{target}"));
        let apc = build_query(&QuerySpec::apc(&target)).unwrap();
        prop_assert_eq!(&apc, &tpc);
        let gum = build_query(&QuerySpec::gum(&target)).unwrap();
        prop_assert_eq!(&gum, &format!("\"{target}\" -site:{target}"));
        let lum_spec = QuerySpec::lum(&target);
        prop_assert_eq!(lum_spec.region, Region::Turkey);
        prop_assert_eq!(build_query(&lum_spec).unwrap(), gum);
        let pair = build_query(&QuerySpec::pairwise(&target, &host)).unwrap();
        prop_assert_eq!(pair, format!("\"{target}\" site:{host}"));
    }

    #[test]
    fn pairwise_plan_counts_and_order(n in 0usize..12) {
        let nodes: Vec<ResolvedNode> = (0..n)
            .map(|i| ResolvedNode {
                id: format!("node{i}"),
                domain: format!("host{i}.example"),
                kind: if i % 2 == 0 {
                    InstitutionKind::University
                } else {
                    InstitutionKind::Company
                },
            })
            .collect();
        let plan = enumerate_pairwise_plan(&nodes, PairScope::All, Region::All).unwrap();
        prop_assert_eq!(plan.len(), n.saturating_sub(1) * n);
        let mut expected = Vec::new();
        for host in &nodes {
            for target in &nodes {
                if host.id != target.id {
                    expected.push((host.domain.clone(), target.domain.clone()));
                }
            }
        }
        let got: Vec<(String, String)> = plan
            .iter()
            .map(|s| (s.host_domain.clone().unwrap(), s.target_domain.clone()))
            .collect();
        prop_assert_eq!(got, expected);
        for spec in &plan {
            prop_assert_eq!(spec.metric, MetricKind::PairwiseMention);
            prop_assert_ne!(spec.host_domain.as_deref().unwrap(), spec.target_domain.as_str());
        }
    }

    #[test]
    fn spearman_of_a_vector_with_itself_is_one(
        mut xs in proptest::collection::vec(-1000.0f64..1000.0, 3..40)
    ) {
        xs[0] = -2000.0; // guarantees a non-constant vector
        let (rho, p) = spearman(&xs, &xs).unwrap();
        prop_assert!((rho - 1.0).abs() < 1e-12);
        prop_assert_eq!(p, 0.0);
    }

    #[test]
    fn average_ranks_always_sum_to_the_triangular_number(
        xs in proptest::collection::vec(-100.0f64..100.0, 1..50)
    ) {
        let n = xs.len() as f64;
        let total: f64 = average_ranks(&xs).iter().sum();
        prop_assert!((total - n * (n + 1.0) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn descriptives_are_ordered(xs in proptest::collection::vec(-1e6f64..1e6, 1..60)) {
        let d = describe(&xs).unwrap();
        let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(min <= d.mean && d.mean <= max);
        prop_assert!(min <= d.median && d.median <= max);
        prop_assert!(d.std_dev >= 0.0);
        prop_assert_eq!(d.n, xs.len());
    }

    #[test]
    fn log_transform_is_monotone(a in 0.0f64..1e9, b in 0.0f64..1e9) {
        let t = log_transform(&[a, b]).unwrap();
        prop_assert_eq!(a < b, t[0] < t[1]);
        prop_assert!(t[0] >= 0.0);
    }

    #[test]
    fn log_transform_rejects_negatives(a in -1e9f64..-1e-9) {
        prop_assert!(log_transform(&[a]).is_err());
    }

    #[test]
    fn pajek_round_trips_arbitrary_networks(
        n in 1usize..15,
        edges in proptest::collection::btree_set((0usize..15, 0usize..15, 1u64..1000), 0..40)
    ) {
        let net = build_test_network(n, &edges);
        let text = write_pajek(&net).unwrap();
        let back = read_pajek(&text).unwrap();
        prop_assert_eq!(back.nodes(), net.nodes());
        prop_assert_eq!(back.arcs(), net.arcs());
    }

    #[test]
    fn density_identity_holds_for_arbitrary_networks(
        n in 2usize..15,
        edges in proptest::collection::btree_set((0usize..15, 0usize..15, 1u64..10), 0..40)
    ) {
        let net = build_test_network(n, &edges);
        for mode in [SummaryMode::Directed, SummaryMode::UndirectedView] {
            let s = network_summary(&net, mode);
            prop_assert!((s.density - s.avg_degree / (n - 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn pajek_reader_never_panics(text in "\\PC{0,300}") {
        let _ = read_pajek(&text);
    }

    #[test]
    fn hce_parser_never_panics(text in "\\PC{0,200}") {
        let _ = parse_hce(&text);
    }

    #[test]
    fn hce_parser_reads_plain_counts(n in 0u64..1_000_000_000) {
        let text = format!("About {n} results (0.42 seconds)");
        prop_assert_eq!(parse_hce(&text).unwrap(), n);
    }

    #[test]
    fn config_parser_never_panics(text in "\\PC{0,300}") {
        let _ = parse_config(&text, std::path::Path::new("/tmp"));
    }
}

fn build_test_network(
    n: usize,
    edges: &std::collections::BTreeSet<(usize, usize, u64)>,
) -> webometrics::model::MentionNetwork {
    use webometrics::model::{MentionEdge, MentionNetwork, NetworkNode};
    let nodes: Vec<NetworkNode> = (0..n).map(|i| NetworkNode::bare(format!("n{i}"))).collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut arcs = Vec::new();
    for &(h, t, w) in edges {
        let (h, t) = (h % n, t % n);
        if h != t && seen.insert((h, t)) {
            arcs.push(MentionEdge {
                host_id: format!("n{h}"),
                target_id: format!("n{t}"),
                hits: w,
                edge_type: None,
            });
        }
    }
    MentionNetwork::new(nodes, arcs).expect("valid generated network")
}

use std::collections::HashMap;

use natroute::edgelist::{parse_edge_list, write_edge_list};
use natroute::engine::Engine;
use natroute::geojson::{features_to_geojson, parse_geojson, route_geojson};
use natroute::snapshot::{BuildParams, EngineSnapshot};
use natroute_core::instructions::route_instructions;
use natroute_core::{fixtures, Anchor, Mode, SegmentId};
use proptest::prelude::*;

const XSD: &str = include_str!("../../../docs/route-instructions.xsd");

/// The slice of XML Schema the shipped schema uses: nested named elements,
/// attributes with `use`, enumerations, doubles with a lower bound and
/// non-negative integers.
struct ElementRule {
    attrs: Vec<(String, String, bool)>,
    children: Vec<(String, usize)>,
}

fn xs<'a>(n: &roxmltree::Node<'a, 'a>, name: &str) -> bool {
    n.is_element() && n.tag_name().name() == name
}

fn collect(node: roxmltree::Node, rules: &mut HashMap<String, ElementRule>) {
    let name = node.attribute("name").unwrap().to_string();
    let ct = node.children().find(|c| xs(c, "complexType")).unwrap();
    let mut rule = ElementRule { attrs: Vec::new(), children: Vec::new() };
    for c in ct.children() {
        if xs(&c, "attribute") {
            rule.attrs.push((
                c.attribute("name").unwrap().into(),
                c.attribute("type").unwrap().into(),
                c.attribute("use") == Some("required"),
            ));
        }
        if xs(&c, "sequence") {
            for e in c.children().filter(|e| xs(e, "element")) {
                let min = e.attribute("minOccurs").unwrap_or("1").parse().unwrap();
                rule.children.push((e.attribute("name").unwrap().into(), min));
                collect(e, rules);
            }
        }
    }
    rules.insert(name, rule);
}

struct Schema {
    root: String,
    elements: HashMap<String, ElementRule>,
    enums: HashMap<String, Vec<String>>,
}

fn schema() -> Schema {
    let doc = roxmltree::Document::parse(XSD).unwrap();
    let top = doc.root_element();
    let mut enums = HashMap::new();
    for st in top.children().filter(|c| xs(c, "simpleType")) {
        let vals: Vec<String> =
            st.descendants().filter(|d| xs(d, "enumeration")).map(|d| d.attribute("value").unwrap().into()).collect();
        if !vals.is_empty() {
            enums.insert(st.attribute("name").unwrap().to_string(), vals);
        }
    }
    let root_el = top.children().find(|c| xs(c, "element")).unwrap();
    let mut elements = HashMap::new();
    collect(root_el, &mut elements);
    Schema { root: root_el.attribute("name").unwrap().into(), elements, enums }
}

fn check_value(schema: &Schema, ty: &str, v: &str) -> Result<(), String> {
    let ok = match ty {
        "xs:string" => true,
        "xs:nonNegativeInteger" => v.parse::<u64>().is_ok(),
        "length" => v.parse::<f64>().is_ok_and(|x| x >= 0.0 && x.is_finite()),
        other => schema.enums.get(other).is_some_and(|vals| vals.iter().any(|x| x == v)),
    };
    if ok {
        Ok(())
    } else {
        Err(format!("value {v:?} is not a {ty}"))
    }
}

fn validate_node(schema: &Schema, node: roxmltree::Node) -> Result<(), String> {
    let name = node.tag_name().name();
    let rule = schema.elements.get(name).ok_or_else(|| format!("unexpected element {name}"))?;
    for a in node.attributes() {
        let (_, ty, _) =
            rule.attrs.iter().find(|(n, _, _)| n == a.name()).ok_or_else(|| format!("{name}: unexpected @{}", a.name()))?;
        check_value(schema, ty, a.value())?;
    }
    for (n, _, required) in &rule.attrs {
        if *required && node.attribute(n.as_str()).is_none() {
            return Err(format!("{name}: missing @{n}"));
        }
    }
    let kids: Vec<_> = node.children().filter(|c| c.is_element()).collect();
    for k in &kids {
        if !rule.children.iter().any(|(n, _)| n == k.tag_name().name()) {
            return Err(format!("{name}: unexpected child {}", k.tag_name().name()));
        }
        validate_node(schema, *k)?;
    }
    for (n, min) in &rule.children {
        if kids.iter().filter(|k| k.tag_name().name() == n).count() < *min {
            return Err(format!("{name}: fewer than {min} {n}"));
        }
    }
    if node.children().any(|c| c.is_text() && !c.text().unwrap().trim().is_empty()) {
        return Err(format!("{name}: unexpected text"));
    }
    Ok(())
}

fn validate(xml: &str) -> Result<(), String> {
    let s = schema();
    let doc = roxmltree::Document::parse(xml).map_err(|e| e.to_string())?;
    if doc.root_element().tag_name().name() != s.root {
        return Err("wrong root".into());
    }
    validate_node(&s, doc.root_element())
}

#[test]
fn checker_rejects_invalid_documents() {
    assert!(validate(r#"<route mode="FT" length="1" turns="0"><naturalRoad id="0" length="1"><namedRoad length="1"><segment id="3" length="1"/></namedRoad></naturalRoad></route>"#).is_ok());
    for bad in [
        r#"<route mode="XX" length="1" turns="0"><naturalRoad id="0" length="1"><namedRoad length="1"><segment id="3" length="1"/></namedRoad></naturalRoad></route>"#,
        r#"<route mode="FT" length="1" turns="0"><naturalRoad id="0" length="1"><namedRoad length="1"/></naturalRoad></route>"#,
        r#"<route mode="FT" length="1" turns="0"><naturalRoad id="0" length="1" turn="up"><namedRoad length="1"><segment id="3" length="1"/></namedRoad></naturalRoad></route>"#,
        r#"<route mode="FT" length="-1" turns="0"><naturalRoad id="0" length="1"><namedRoad length="1"><segment id="3" length="1"/></namedRoad></naturalRoad></route>"#,
        r#"<route mode="FT" turns="0"><naturalRoad id="0" length="1"><namedRoad length="1"><segment id="3" length="1"/></namedRoad></naturalRoad></route>"#,
        r#"<route mode="FT" length="1" turns="0"><segment id="3" length="1"/></route>"#,
    ] {
        assert!(validate(bad).is_err(), "{bad}");
    }
}

#[test]
fn emitted_instructions_validate_and_are_deterministic() {
    for seed in 0..15 {
        let mut features = fixtures::random_network_features(seed, 30);
        // names with markup characters exercise escaping
        for (i, f) in features.iter_mut().enumerate() {
            f.name = match i % 3 {
                0 => Some(format!("St <{}> & \"co\"", i / 6)),
                1 => None,
                _ => Some("Main".into()),
            };
        }
        let net = natroute_core::network::load_network(&features, &Default::default()).unwrap().network;
        let params = BuildParams { angle_deg: 45.0, split_distance: 2.0, split_ratio: 0.2 };
        let snap = EngineSnapshot::build(net, params).unwrap();
        let router = snap.router();
        let net = router.network();
        let last = SegmentId(net.segments().len() as u32 - 1);
        let (a, b) = (Anchor::new(net, SegmentId(0), 0.4).unwrap(), Anchor::new(net, last, 0.7).unwrap());
        for mode in Mode::ALL {
            let route = router.route(mode, a, b).unwrap();
            let doc = route_instructions(&route, router.roads_for(mode), net).unwrap();
            let xml = doc.to_xml();
            validate(&xml).unwrap_or_else(|e| panic!("seed {seed} {mode}: {e}\n{xml}"));
            assert_eq!(xml, route_instructions(&route, router.roads_for(mode), net).unwrap().to_xml());
            let parsed = roxmltree::Document::parse(&xml).unwrap();
            let ids: Vec<u32> = parsed
                .descendants()
                .filter(|n| n.has_tag_name("segment"))
                .map(|n| n.attribute("id").unwrap().parse().unwrap())
                .collect();
            assert_eq!(ids, route.path.iter().map(|s| s.segment.0).collect::<Vec<_>>());
            for n in parsed.descendants().filter(|n| n.has_tag_name("namedRoad")) {
                let seg = net.segment(SegmentId(n.first_element_child().unwrap().attribute("id").unwrap().parse().unwrap()));
                assert_eq!(n.attribute("name"), seg.name.as_deref());
            }
        }
    }
}

#[test]
fn route_geojson_properties_survive_a_round_trip() {
    let params = BuildParams { angle_deg: 45.0, split_distance: 1.0, split_ratio: 0.2 };
    let engine = Engine::new(EngineSnapshot::build(fixtures::grid(4, 4, 1.0), params).unwrap());
    let net = engine.router().network();
    let answer = engine.route("0,0", "3,3", "ft").unwrap();
    let text = answer.geojson.to_string();
    let back: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(back, route_geojson(&answer.route, net));
    let props = &back["properties"];
    assert_eq!(props["mode"], "ft");
    assert_eq!(props["distance"].as_f64(), Some(answer.route.distance));
    assert_eq!(props["turns_topological"], answer.route.turns_topological);
    assert_eq!(props["turns_perceptual"], answer.route.turns_perceptual);
    let seq: Vec<u32> = answer.route.road_sequence.iter().map(|r| r.0).collect();
    assert_eq!(props["road_sequence"], serde_json::json!(seq));
    assert_eq!(seq.len(), 2);
    // the feature reads back as one line of the same shape
    let input = parse_geojson(&text).unwrap();
    assert_eq!(input.features.len(), 1);
    assert_eq!(input.features[0].coords, answer.route.points(net));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn formats_round_trip(seed in 0u64..10_000, n in 8usize..30) {
        let features = fixtures::random_network_features(seed, n);
        let gj = parse_geojson(&features_to_geojson(&features).to_string()).unwrap();
        prop_assert_eq!(&gj.features, &features);
        let el = parse_edge_list(&write_edge_list(&features)).unwrap();
        prop_assert_eq!(el.len(), features.len());
        for (a, b) in el.iter().zip(&features) {
            prop_assert_eq!(&a.coords, &b.coords);
        }
    }
}

use proptest::prelude::*;
use textkernel_core::eval::Detection;
use textkernel_core::geometry::Polygon;
use textkernel_core::io::*;
use textkernel_core::loss::{MapKind, ProbMap};
use textkernel_core::raster::Grid;

proptest! {
    #[test]
    fn pmap_round_trip_is_exact_in_f32((w, h, c, data) in (1usize..9, 1usize..9, 1usize..4)
        .prop_flat_map(|(w, h, c)| (Just(w), Just(h), Just(c), prop::collection::vec(-50.0f32..50.0, w * h * c))))
    {
        let map = ProbMap::new(w, h, c, MapKind::Logits, data.iter().map(|&v| f64::from(v)).collect()).unwrap();
        let mut buf = Vec::new();
        write_pmap(&mut buf, &map).unwrap();
        prop_assert_eq!(buf.len(), PMAP_HEADER_LEN + 4 * w * h * c);
        prop_assert_eq!(read_pmap(&buf[..], MapKind::Logits).unwrap(), map);
    }

    #[test]
    fn truncated_pmap_is_rejected(cut in 1usize..40) {
        let map = ProbMap::new(3, 2, 1, MapKind::Probabilities, vec![0.5; 6]).unwrap();
        let mut buf = Vec::new();
        write_pmap(&mut buf, &map).unwrap();
        let keep = buf.len().saturating_sub(cut);
        let err = parse_pmap(&buf[..keep], MapKind::Probabilities).unwrap_err();
        prop_assert!(err.to_string().contains("offset"));
    }

    #[test]
    fn pgm_round_trip(w in 1usize..20, h in 1usize..20, seed in any::<u8>()) {
        let g = Grid::from_fn(w, h, |r, c| (r * 31 + c * 7) as u8 ^ seed);
        let mut buf = Vec::new();
        write_pgm(&mut buf, &g).unwrap();
        prop_assert_eq!(parse_pgm(&buf).unwrap(), g);
    }

    #[test]
    fn ndjson_round_trip(items in prop::collection::vec((0.0..100.0f64, 0.0..100.0f64, 1.0..10.0f64, 0.0..1.0f64), 0..6)) {
        let dets: Vec<Detection> = items
            .iter()
            .map(|&(x, y, s, score)| Detection { polygon: Polygon::rect(x, y, x + s, y + s).unwrap(), score })
            .collect();
        let mut buf = Vec::new();
        write_ndjson(&mut buf, &dets).unwrap();
        prop_assert_eq!(read_ndjson::<_, Detection>(&buf[..]).unwrap(), dets);
    }
}

#[test]
fn probability_maps_are_validated_on_read() {
    let map = ProbMap::new(2, 1, 1, MapKind::Logits, vec![3.0, -1.0]).unwrap();
    let mut buf = Vec::new();
    write_pmap(&mut buf, &map).unwrap();
    assert!(parse_pmap(&buf, MapKind::Logits).is_ok());
    assert!(parse_pmap(&buf, MapKind::Probabilities).is_err());
}

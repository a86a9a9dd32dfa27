//! Property tests over random configurations for the barrier, coalition,
//! simulator and export layers.

use proptest::prelude::*;

use reachgame::barrier::same_piece_set;
use reachgame::io::mesh::{export_mesh, MeshFrame};
use reachgame::pair::{classify_pair, pair_barrier, pair_pursuer_region_contains, PairClass};
use reachgame::sim::{run_straight_line_escape, validate_verdict, SimStatus};
use reachgame::triple::{
    classify_triple, equidistant_point, single_barrier, single_pursuer_region_contains, triple_barrier_noncollinear,
    triple_pursuer_region_contains, TripleClass,
};
use reachgame::{
    canonical_frame, escape_margin_supremum, multi_barrier, step, Analysis, BarrierPiece, GameConfig, OracleParams,
    Point3, SimState, TargetPlaneSpec, ValidationOutcome, VerdictKind, DEFAULT_BAND,
};

fn coord() -> impl Strategy<Value = f64> {
    -5.0..5.0f64
}

fn point() -> impl Strategy<Value = Point3> {
    (coord(), coord(), coord()).prop_map(|(x, y, z)| Point3::new(x, y, z))
}

fn evader() -> impl Strategy<Value = Point3> {
    (coord(), coord(), 0.05..5.0f64).prop_map(|(x, y, z)| Point3::new(x, y, z))
}

fn mirror(p: Point3) -> Point3 {
    Point3::new(p.x, p.y, p.z.abs())
}

fn cheap_oracle() -> OracleParams {
    OracleParams {
        grid: 101,
        starts: 2,
        ..OracleParams::default()
    }
}

fn verdict(ps: &[Point3], e: Point3) -> Option<VerdictKind> {
    Analysis::new(ps).ok()?.verdict(e, DEFAULT_BAND).ok().map(|v| v.kind)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn arc_points_have_zero_margin(a in point(), b in point()) {
        prop_assume!(classify_pair(a, b) == Ok(PairClass::BothActive));
        for piece in pair_barrier(a, b).unwrap() {
            for q in piece.sample(50) {
                let sup = escape_margin_supremum(q, &[a, b], &cheap_oracle()).unwrap().supremum;
                prop_assert!(sup.abs() < 1e-4, "{q:?} {sup}");
            }
        }
    }

    #[test]
    fn pair_region_matches_oracle_sign(a in point(), b in point(), q in evader()) {
        prop_assume!(a.distance(b) > 1e-3);
        let rep = escape_margin_supremum(q, &[a, b], &OracleParams::default()).unwrap();
        prop_assume!(rep.supremum.abs() > 1e-3 && (rep.resolved || rep.supremum > 0.0));
        prop_assert_eq!(pair_pursuer_region_contains(a, b, q).unwrap(), rep.supremum < 0.0);
    }

    #[test]
    fn cap_is_equidistant_through_mirror_heights(a in point(), b in point(), c in point()) {
        let Ok(center) = equidistant_point(a, b, c) else { return Ok(()) };
        let r = mirror(a).distance(center);
        for p in [b, c] {
            prop_assert!((mirror(p).distance(center) - r).abs() < 1e-9);
        }
        for (p, q) in [(a, b), (b, c), (a, c)] {
            prop_assert!((center.distance(p) - center.distance(q)).abs() < 1e-9);
        }
    }

    #[test]
    fn cap_points_have_zero_margin(a in point(), b in point(), c in point()) {
        prop_assume!(classify_triple(a, b, c) == Ok(TripleClass::Three));
        let cap = triple_barrier_noncollinear(a, b, c).unwrap();
        for q in cap.sample(50) {
            let sup = escape_margin_supremum(q, &[a, b, c], &cheap_oracle()).unwrap().supremum;
            prop_assert!(sup.abs() < 1e-4, "{q:?} {sup}");
        }
    }

    #[test]
    fn reduced_triple_regions_match_smaller_games(a in point(), b in point(), c in point(), qs in prop::collection::vec(evader(), 200)) {
        let ps = [a, b, c];
        let Ok(class) = classify_triple(a, b, c) else { return Ok(()) };
        for q in qs {
            let Ok(inside) = triple_pursuer_region_contains(a, b, c, q) else { continue };
            match class {
                TripleClass::One(i) => prop_assert_eq!(inside, single_pursuer_region_contains(ps[i], q).unwrap()),
                TripleClass::Two(i, j) => prop_assert_eq!(inside, pair_pursuer_region_contains(ps[i], ps[j], q).unwrap()),
                _ => {}
            }
        }
    }

    #[test]
    fn triple_region_matches_oracle_sign(a in point(), b in point(), c in point(), q in evader()) {
        let rep = escape_margin_supremum(q, &[a, b, c], &OracleParams::default()).unwrap();
        prop_assume!(rep.supremum.abs() > 1e-3 && (rep.resolved || rep.supremum > 0.0));
        let Ok(inside) = triple_pursuer_region_contains(a, b, c, q) else { return Ok(()) };
        prop_assert_eq!(inside, rep.supremum < 0.0);
    }

    #[test]
    fn small_games_match_direct_barriers(a in point(), b in point(), c in point()) {
        let Ok(class) = classify_triple(a, b, c) else { return Ok(()) };
        let ps = [a, b, c];
        let direct = match class {
            TripleClass::One(i) => vec![single_barrier(ps[i])],
            TripleClass::Two(i, j) => pair_barrier(ps[i], ps[j]).unwrap(),
            _ => return Ok(()),
        };
        let Ok(net) = multi_barrier(&GameConfig::new(ps.to_vec(), None).unwrap()) else { return Ok(()) };
        let drop_empty = |v: Vec<BarrierPiece>| v.into_iter().filter(|p| !p.is_empty()).collect::<Vec<_>>();
        prop_assert!(same_piece_set(&drop_empty(net.clone()), &drop_empty(direct.clone()), 1e-9), "{net:?} vs {direct:?}");
    }

    #[test]
    fn verdict_matches_oracle_sign(ps in prop::collection::vec(point(), 1..=8), e in evader()) {
        let Some(kind) = verdict(&ps, e) else { return Ok(()) };
        let rep = escape_margin_supremum(e, &ps, &OracleParams::default()).unwrap();
        prop_assume!(rep.supremum.abs() > 1e-3 && rep.resolved);
        prop_assert_eq!(kind == VerdictKind::PursuerWin, rep.supremum < 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn inactive_pursuers_do_not_matter(ps in prop::collection::vec(point(), 4..=8), qs in prop::collection::vec(evader(), 20)) {
        let Ok(full) = Analysis::new(&ps) else { return Ok(()) };
        let pieces = full.pieces().unwrap();
        for k in (0..ps.len()).filter(|k| !full.coalitions().active.contains(k)) {
            let mut fewer = ps.clone();
            fewer.remove(k);
            let reduced = Analysis::new(&fewer).unwrap();
            prop_assert!(same_piece_set(&pieces, &reduced.pieces().unwrap(), 1e-9));
            for q in &qs {
                prop_assert_eq!(full.verdict(*q, DEFAULT_BAND).unwrap().kind, reduced.verdict(*q, DEFAULT_BAND).unwrap().kind);
            }
        }
    }

    #[test]
    fn more_pursuers_keep_a_pursuer_win(
        mut ps in prop::collection::vec(point(), 0..=5),
        extra in point(),
        e in evader(),
        depth in -0.95..0.95f64,
    ) {
        // a guard on the evader's column, closer to the plane, makes pursuer wins common
        ps.push(Point3::new(e.x, e.y, depth * e.z));
        prop_assume!(verdict(&ps, e) == Some(VerdictKind::PursuerWin));
        let mut more = ps;
        more.push(extra);
        if let Some(kind) = verdict(&more, e) {
            prop_assert_eq!(kind, VerdictKind::PursuerWin);
        }
    }

    #[test]
    fn verdict_tag_survives_similarities(
        ps in prop::collection::vec(point(), 1..=6),
        e in evader(),
        angle in 0.0..std::f64::consts::TAU,
        shift in (-10.0..10.0f64, -10.0..10.0f64),
        scale in 0.2..5.0f64,
    ) {
        let Some(base) = verdict(&ps, e) else { return Ok(()) };
        let (s, c) = angle.sin_cos();
        let moves: [&dyn Fn(Point3) -> Point3; 3] = [
            &|p| Point3::new(c * p.x - s * p.y, s * p.x + c * p.y, p.z),
            &|p| Point3::new(p.x + shift.0, p.y + shift.1, p.z),
            &|p| p * scale,
        ];
        for f in moves {
            let moved: Vec<Point3> = ps.iter().map(|p| f(*p)).collect();
            prop_assert_eq!(verdict(&moved, f(e)), Some(base));
        }
    }

    #[test]
    fn every_player_moves_dt(ps in prop::collection::vec(point(), 1..=5), e in evader(), dirs in prop::collection::vec(point(), 6), dt in 1e-4..0.1f64) {
        let cfg = GameConfig::new(ps.clone(), Some(e)).unwrap();
        let state = SimState::new(&cfg).unwrap();
        let unit = |p: Point3| p.normalized().unwrap_or(Point3::new(1.0, 0.0, 0.0));
        let heads: Vec<Point3> = dirs[1..=ps.len()].iter().map(|d| unit(*d)).collect();
        let next = step(&state, unit(dirs[0]), &heads, dt).unwrap();
        // a step that ends in capture or escape stops at the event
        prop_assume!(next.is_running());
        prop_assert!((next.evader.distance(state.evader) - dt).abs() < 1e-12);
        for (a, b) in next.pursuers.iter().zip(&state.pursuers) {
            prop_assert!((a.distance(*b) - dt).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn validation_never_fails(ps in prop::collection::vec(point(), 1..=5), e in evader(), seed in any::<u64>()) {
        let Ok(cfg) = GameConfig::new(ps, Some(e)) else { return Ok(()) };
        let Ok(rep) = validate_verdict(&cfg, 20, 1e-2, seed, &OracleParams::default()) else { return Ok(()) };
        prop_assert!(!matches!(rep.outcome, ValidationOutcome::Fail { .. }), "{rep:?}");
        if rep.verdict.kind == VerdictKind::EvaderWin && rep.oracle.supremum > 0.1 {
            prop_assert_eq!(rep.outcome, ValidationOutcome::Pass);
        }
    }

    #[test]
    fn escapes_are_deterministic(ps in prop::collection::vec(point(), 1..=4), e in evader(), tx in coord(), ty in coord()) {
        let cfg = GameConfig::new(ps, Some(e)).unwrap();
        let target = Point3::new(tx, ty, 0.0);
        let a = run_straight_line_escape(&cfg, target, 1e-2).unwrap();
        let b = run_straight_line_escape(&cfg, target, 1e-2).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(!matches!(a.status, SimStatus::Running));
    }

    #[test]
    fn mesh_vertices_lie_on_their_pieces(ps in prop::collection::vec(point(), 2..=6), k in point(), off in coord()) {
        prop_assume!(k.norm() > 0.1);
        let Ok(pieces) = multi_barrier(&GameConfig::new(ps, None).unwrap()) else { return Ok(()) };
        let frame = canonical_frame(TargetPlaneSpec { normal: k, offset: off }).unwrap();
        let canon = export_mesh(&pieces, 12, MeshFrame::Canonical, &frame).unwrap();
        let raw = export_mesh(&pieces, 12, MeshFrame::Raw, &frame).unwrap();
        prop_assert_eq!(canon.faces.len(), raw.faces.len());
        for (c, r) in canon.vertices.iter().zip(&raw.vertices) {
            let back = frame.to_canonical(Point3::new(r[0], r[1], r[2]));
            prop_assert!(back.distance(Point3::new(c[0], c[1], c[2])) < 1e-9);
        }
        for (face, tag) in canon.faces.iter().zip(&canon.piece_tags) {
            let BarrierPiece::Cap(cap) = &pieces[*tag] else { panic!("face on a non-cap piece") };
            for &v in face {
                let p = Point3::new(canon.vertices[v][0], canon.vertices[v][1], canon.vertices[v][2]);
                prop_assert!((p.distance(cap.center) - cap.radius).abs() < 1e-6);
            }
        }
        for (line, tag) in canon.lines.iter().zip(&canon.line_tags) {
            let BarrierPiece::Arc(arc) = &pieces[*tag] else { panic!("line on a non-arc piece") };
            for &v in line {
                let p = Point3::new(canon.vertices[v][0], canon.vertices[v][1], canon.vertices[v][2]);
                prop_assert!((p.distance(arc.center) - arc.radius).abs() < 1e-6);
            }
        }
    }
}

use voronoi_graph::analysis::{complexity_constant, empirical_scaling, expected_vertices_lower_bound};
use voronoi_graph::rng::uniform_points;
use voronoi_graph::{voronoi_graph, NodeSet};

#[test]
fn bound_reproduces_reference_values() {
    let printed = [6.76, 31.8, 187.0, 1296.0, 1.03e4, 9.04e4, 8.72e5, 9.09e6, 1.02e8];
    for (d, want) in (2..=10).zip(printed) {
        let got = expected_vertices_lower_bound(d).unwrap();
        assert!((got - want).abs() <= 0.01 * want, "d={d}: {got}");
    }
    assert_eq!(expected_vertices_lower_bound(4).unwrap().round(), 187.0);
    assert!((expected_vertices_lower_bound(5).unwrap() - 1296.0).abs() <= 2.0);
}

#[test]
fn bound_range_and_growth() {
    assert!(expected_vertices_lower_bound(1).is_err());
    assert!(expected_vertices_lower_bound(31).is_err());
    // 30-digit evaluation of the same expression
    for (d, want) in [(10, 101_518_081.023_239_4), (19, 2.393_571_988_260_43e18), (30, 3.175_151_392_382_16e32)] {
        let got = expected_vertices_lower_bound(d).unwrap();
        assert!((got - want).abs() <= 1e-9 * want, "d={d}: {got}");
    }
    for d in 2..10 {
        let ratio = expected_vertices_lower_bound(d + 1).unwrap() / expected_vertices_lower_bound(d).unwrap();
        assert!(ratio > (d + 2) as f64 && ratio < (d + 4) as f64, "d={d}: {ratio}");
    }
    assert!((complexity_constant(2) - 2.0).abs() < 1e-12);
}

#[test]
fn simplex_statistics() {
    for d in 2..=5 {
        let mut pts = vec![vec![0.0; d]];
        for k in 0..d {
            let mut e = vec![0.0; d];
            e[k] = 1.0 + 0.1 * k as f64;
            pts.push(e);
        }
        let mesh = voronoi_graph(&NodeSet::new(&pts).unwrap(), 0).unwrap();
        let s = empirical_scaling(&mesh);
        assert_eq!(s.n_vertices, 1);
        assert_eq!(s.vertices_per_cell, 1.0);
        assert_eq!(s.neighbors_per_cell, d as f64);
        assert_eq!(s.bounded_cells, 0);
    }
}

#[test]
fn vertices_per_cell_grow_by_about_d_plus_two() {
    let per_cell: Vec<f64> = (2..=5)
        .map(|d| {
            let n = if d == 5 { 500 } else { 1000 };
            let mesh = voronoi_graph(&NodeSet::new(&uniform_points(n, d, 7)).unwrap(), 1).unwrap();
            empirical_scaling(&mesh).vertices_per_cell
        })
        .collect();
    for (k, w) in per_cell.windows(2).enumerate() {
        let d = (k + 2) as f64;
        let factor = w[1] / w[0];
        assert!(factor >= d && factor <= d + 4.0, "d={d}: {factor}");
    }
}

#[test]
fn neighbors_per_cell_in_space() {
    let mesh = voronoi_graph(&NodeSet::new(&uniform_points(1000, 3, 7)).unwrap(), 1).unwrap();
    let s = empirical_scaling(&mesh);
    assert!((s.neighbors_per_cell - 16.6).abs() <= 0.15 * 16.6, "{}", s.neighbors_per_cell);
    assert!((s.vertices_per_cell - 29.2).abs() <= 0.15 * 29.2, "{}", s.vertices_per_cell);
}

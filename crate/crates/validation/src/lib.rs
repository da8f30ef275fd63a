//! Named digraphs and seeded random instances shared by the acceptance suite.

use pathhodge::digraph::Digraph;
use rand::Rng;

pub fn t3() -> Digraph {
    Digraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
}

pub fn k2sym() -> Digraph {
    Digraph::new(2, [(0, 1), (1, 0)]).unwrap()
}

pub fn g1() -> Digraph {
    Digraph::new(2, [(0, 1)]).unwrap()
}

pub fn transitive_triangle() -> Digraph {
    Digraph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
}

pub fn bi_route_square() -> Digraph {
    Digraph::new(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap()
}

pub fn complete_symmetric(n: usize) -> Digraph {
    Digraph::new(n, (0..n).flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))).unwrap()
}

pub fn cycle_symmetric(n: usize) -> Digraph {
    Digraph::new(n, (0..n).flat_map(|a| [(a, (a + 1) % n), ((a + 1) % n, a)])).unwrap()
}

pub fn random_digraph(rng: &mut impl Rng, n: usize, density: f64) -> Digraph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b && rng.gen_bool(density) {
                edges.push((a, b));
            }
        }
    }
    Digraph::new(n, edges).unwrap()
}

/// Named instances plus a few fixed random ones.
pub fn instances() -> Vec<(String, Digraph)> {
    use rand::SeedableRng;
    let mut out = vec![
        ("K2sym".to_string(), k2sym()),
        ("T3".to_string(), t3()),
        ("G1".to_string(), g1()),
        ("transitive triangle".to_string(), transitive_triangle()),
        ("bi-route square".to_string(), bi_route_square()),
        ("K3sym".to_string(), complete_symmetric(3)),
        ("C4sym".to_string(), cycle_symmetric(4)),
        ("C5sym".to_string(), cycle_symmetric(5)),
    ];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for i in 0..8 {
        let n = rng.gen_range(3..=5);
        out.push((format!("random #{i}"), random_digraph(&mut rng, n, 0.45)));
    }
    out
}

pub fn random_vector(rng: &mut impl Rng, len: usize) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_fn(len, |_, _| rng.gen_range(-1.0..1.0))
}

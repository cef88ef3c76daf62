//! Random layered networks.

use rand::Rng;

use crate::f2field::BitVec;

use super::network::{Network, NetworkBuilder, VertexKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayeredConfig {
    /// Number of inputs and of outputs.
    pub n: usize,
    /// Number of inner layers.
    pub depth: usize,
    /// Vertices per inner layer.
    pub width: usize,
    /// Probability of an edge between two vertices of consecutive layers.
    pub density: f64,
}

impl LayeredConfig {
    pub fn vertex_count(&self) -> usize {
        2 * self.n + self.depth * self.width
    }
}

fn random_nonzero(rng: &mut impl Rng, len: usize) -> BitVec {
    loop {
        let v = BitVec::from_bools(&(0..len).map(|_| rng.gen()).collect::<Vec<_>>());
        if !v.is_zero() {
            return v;
        }
    }
}

/// Layered DAG: inputs, `depth` inner layers of `width` vertices, outputs.
/// Edges only join consecutive layers; every non-input vertex has an
/// incoming edge and every non-output vertex an outgoing one. Linear forms
/// and output maps are uniform among nonzero vectors.
pub fn random_layered(rng: &mut impl Rng, cfg: &LayeredConfig) -> Network {
    assert!(cfg.n > 0, "network needs at least one input");
    assert!(
        cfg.depth == 0 || cfg.width > 0,
        "inner layers need at least one vertex"
    );
    let mut b = NetworkBuilder::new();
    let mut layers: Vec<Vec<usize>> = Vec::new();
    layers.push(
        (0..cfg.n)
            .map(|i| b.vertex(format!("in{i}"), VertexKind::Input))
            .collect(),
    );
    for d in 0..cfg.depth {
        layers.push(
            (0..cfg.width)
                .map(|i| b.vertex(format!("v{d}_{i}"), VertexKind::Inner))
                .collect(),
        );
    }
    layers.push(
        (0..cfg.n)
            .map(|i| b.vertex(format!("out{i}"), VertexKind::Output))
            .collect(),
    );

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for w in layers.windows(2) {
        let (prev, next) = (&w[0], &w[1]);
        let mut has_out = vec![false; prev.len()];
        for &dst in next {
            let mut any = false;
            for (pi, &src) in prev.iter().enumerate() {
                if rng.gen_bool(cfg.density) {
                    pairs.push((src, dst));
                    has_out[pi] = true;
                    any = true;
                }
            }
            if !any {
                let pi = rng.gen_range(0..prev.len());
                pairs.push((prev[pi], dst));
                has_out[pi] = true;
            }
        }
        for (pi, &src) in prev.iter().enumerate() {
            if !has_out[pi] {
                pairs.push((src, next[rng.gen_range(0..next.len())]));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    for (i, &(s, d)) in pairs.iter().enumerate() {
        // forms are filled in once all in-degrees are known
        b.edge(format!("e{i}"), s, d, BitVec::zeros(0));
    }
    let delta: Vec<usize> = (0..b.vertex_count())
        .map(|v| b.in_degree(v).max(1))
        .collect();
    for e in b.edges_mut() {
        e.form = random_nonzero(rng, delta[e.src]);
    }
    for &o in layers.last().expect("output layer") {
        let d = b.in_degree(o);
        b.outmap(o, random_nonzero(rng, d));
    }
    b.build().expect("generated networks are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_networks_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        for density in [0.0, 0.3, 1.0] {
            for _ in 0..20 {
                let cfg = LayeredConfig {
                    n: 5,
                    depth: 2,
                    width: 3,
                    density,
                };
                let net = random_layered(&mut rng, &cfg);
                assert_eq!(net.vertices().len(), 16);
                assert_eq!(net.n(), 5);
                assert_eq!(net.topological_order().len(), 16);
            }
        }
    }
}

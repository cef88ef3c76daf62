use crate::f2field::{BinMatrix, BitVec};

use super::NetError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    Input,
    Inner,
    Output,
}

impl VertexKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VertexKind::Input => "input",
            VertexKind::Inner => "inner",
            VertexKind::Output => "output",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub name: String,
    pub kind: VertexKind,
}

/// Directed edge `src → dst` carrying `form · (incoming bits of src)`.
#[derive(Debug, Clone)]
pub struct Edge {
    pub name: String,
    pub src: usize,
    pub dst: usize,
    pub form: BitVec,
}

/// A validated acyclic network computing `x ↦ Ax`.
///
/// Inputs and outputs are ordered by vertex declaration order. The incoming
/// bits of a vertex are ordered by edge declaration order.
#[derive(Debug, Clone)]
pub struct Network {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
    outmaps: Vec<Option<BitVec>>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    order: Vec<usize>,
}

/// Accumulates vertices and edges before validation.
#[derive(Debug, Clone, Default)]
pub struct NetworkBuilder {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    outmaps: Vec<(usize, BitVec)>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, name: impl Into<String>, kind: VertexKind) -> usize {
        self.vertices.push(Vertex {
            name: name.into(),
            kind,
        });
        self.vertices.len() - 1
    }

    pub fn edge(&mut self, name: impl Into<String>, src: usize, dst: usize, form: BitVec) -> usize {
        self.edges.push(Edge {
            name: name.into(),
            src,
            dst,
            form,
        });
        self.edges.len() - 1
    }

    pub fn outmap(&mut self, vertex: usize, bits: BitVec) {
        self.outmaps.push((vertex, bits));
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.dst == v).count()
    }

    pub(crate) fn edges_mut(&mut self) -> &mut [Edge] {
        &mut self.edges
    }

    pub fn build(self) -> Result<Network, NetError> {
        let nv = self.vertices.len();
        let mut in_edges = vec![Vec::new(); nv];
        let mut out_edges = vec![Vec::new(); nv];
        for (i, e) in self.edges.iter().enumerate() {
            if e.src >= nv || e.dst >= nv {
                return Err(NetError::Structure(format!(
                    "edge {} references an unknown vertex",
                    e.name
                )));
            }
            out_edges[e.src].push(i);
            in_edges[e.dst].push(i);
        }
        for (v, vert) in self.vertices.iter().enumerate() {
            let (din, dout) = (in_edges[v].len(), out_edges[v].len());
            let ok = match vert.kind {
                VertexKind::Input => din == 0 && dout > 0,
                VertexKind::Output => dout == 0 && din > 0,
                VertexKind::Inner => din > 0 && dout > 0,
            };
            if !ok {
                return Err(NetError::Structure(format!(
                    "{} vertex {} has in-degree {din} and out-degree {dout}",
                    vert.kind.as_str(),
                    vert.name
                )));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            let expected = match self.vertices[e.src].kind {
                VertexKind::Input => 1,
                _ => in_edges[e.src].len(),
            };
            if e.form.len() != expected {
                return Err(NetError::FormLength {
                    edge: i,
                    expected,
                    got: e.form.len(),
                });
            }
        }
        let mut outmaps: Vec<Option<BitVec>> = vec![None; nv];
        for (v, bits) in self.outmaps {
            if v >= nv || self.vertices[v].kind != VertexKind::Output {
                return Err(NetError::Structure(format!(
                    "outmap attached to non-output vertex #{v}"
                )));
            }
            if bits.len() != in_edges[v].len() {
                return Err(NetError::OutmapLength {
                    vertex: v,
                    expected: in_edges[v].len(),
                    got: bits.len(),
                });
            }
            if outmaps[v].replace(bits).is_some() {
                return Err(NetError::Structure(format!(
                    "duplicate outmap for {}",
                    self.vertices[v].name
                )));
            }
        }
        let inputs: Vec<usize> = (0..nv)
            .filter(|&v| self.vertices[v].kind == VertexKind::Input)
            .collect();
        let outputs: Vec<usize> = (0..nv)
            .filter(|&v| self.vertices[v].kind == VertexKind::Output)
            .collect();
        for &o in &outputs {
            if outmaps[o].is_none() {
                return Err(NetError::MissingOutmap { vertex: o });
            }
        }
        if inputs.len() != outputs.len() || inputs.is_empty() {
            return Err(NetError::CountMismatch {
                inputs: inputs.len(),
                outputs: outputs.len(),
            });
        }
        let order = topological_order(nv, &self.edges, &in_edges).ok_or(NetError::Cycle)?;
        Ok(Network {
            vertices: self.vertices,
            edges: self.edges,
            in_edges,
            out_edges,
            outmaps,
            inputs,
            outputs,
            order,
        })
    }
}

/// Kahn's algorithm, always taking the smallest ready vertex.
fn topological_order(nv: usize, edges: &[Edge], in_edges: &[Vec<usize>]) -> Option<Vec<usize>> {
    let mut indeg: Vec<usize> = in_edges.iter().map(Vec::len).collect();
    let mut ready: std::collections::BTreeSet<usize> = (0..nv).filter(|&v| indeg[v] == 0).collect();
    let mut succ = vec![Vec::new(); nv];
    for e in edges {
        succ[e.src].push(e.dst);
    }
    let mut order = Vec::with_capacity(nv);
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.insert(w);
            }
        }
    }
    (order.len() == nv).then_some(order)
}

impl Network {
    /// Number of inputs (= number of outputs).
    pub fn n(&self) -> usize {
        self.inputs.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub fn outmap(&self, v: usize) -> Option<&BitVec> {
        self.outmaps[v].as_ref()
    }

    /// Processes every vertex in topological order on the rows of `x`
    /// (`n × m`, one column per transmitted vector). `flips[e]`, when
    /// present, is xored onto the value carried by edge `e`.
    pub(crate) fn propagate(&self, x: &BinMatrix, flips: &[Option<BitVec>]) -> BinMatrix {
        let m = x.cols();
        let mut edge_val: Vec<BitVec> = vec![BitVec::zeros(m); self.edges.len()];
        let mut input_pos = vec![usize::MAX; self.vertices.len()];
        for (i, &v) in self.inputs.iter().enumerate() {
            input_pos[v] = i;
        }
        let mut out = BinMatrix::zeros(self.n(), m);
        let mut output_pos = vec![usize::MAX; self.vertices.len()];
        for (i, &v) in self.outputs.iter().enumerate() {
            output_pos[v] = i;
        }
        for &v in &self.order {
            let incoming: Vec<BitVec> = match self.vertices[v].kind {
                VertexKind::Input => vec![x.row(input_pos[v])],
                _ => self.in_edges[v]
                    .iter()
                    .map(|&e| edge_val[e].clone())
                    .collect(),
            };
            let combine = |form: &BitVec| {
                let mut acc = BitVec::zeros(m);
                for k in form.iter_ones() {
                    acc.xor_assign(&incoming[k]);
                }
                acc
            };
            if self.vertices[v].kind == VertexKind::Output {
                let y = combine(self.outmaps[v].as_ref().expect("validated"));
                for c in y.iter_ones() {
                    out.set(output_pos[v], c, true);
                }
                continue;
            }
            for &e in &self.out_edges[v] {
                let mut val = combine(&self.edges[e].form);
                if let Some(Some(flip)) = flips.get(e) {
                    val.xor_assign(flip);
                }
                edge_val[e] = val;
            }
        }
        out
    }

    /// Fault-free output for the columns of `x`.
    pub fn apply(&self, x: &BinMatrix) -> BinMatrix {
        self.propagate(x, &[])
    }

    /// The matrix `A` with `apply(x) = A·x`, from the unit inputs.
    pub fn transfer_matrix(&self) -> BinMatrix {
        self.apply(&BinMatrix::identity(self.n()))
    }

    /// Output error caused by flipping the bit on edge `e` once.
    pub fn edge_effect(&self, e: usize) -> BitVec {
        let mut flips = vec![None; self.edges.len()];
        flips[e] = Some(BitVec::unit(1, 0));
        self.propagate(&BinMatrix::zeros(self.n(), 1), &flips)
            .column(0)
    }

    /// Size of the global state used by [`processing_matrices`](Self::processing_matrices):
    /// `n` input slots, one slot per edge, `n` output slots.
    pub fn state_dim(&self) -> usize {
        2 * self.n() + self.edges.len()
    }

    /// Per-vertex processing matrices in topological order, acting on the
    /// global state: each overwrites the slots it writes and keeps the rest.
    pub fn processing_matrices(&self) -> Vec<BinMatrix> {
        let n = self.n();
        let ne = self.edges.len();
        let dim = self.state_dim();
        let slot_of_input = |v: usize| {
            self.inputs
                .iter()
                .position(|&u| u == v)
                .expect("input vertex")
        };
        let slot_of_output = |v: usize| {
            n + ne
                + self
                    .outputs
                    .iter()
                    .position(|&u| u == v)
                    .expect("output vertex")
        };
        self.order
            .iter()
            .map(|&v| {
                let mut a = BinMatrix::identity(dim);
                let sources: Vec<usize> = match self.vertices[v].kind {
                    VertexKind::Input => vec![slot_of_input(v)],
                    _ => self.in_edges[v].iter().map(|&e| n + e).collect(),
                };
                let mut write = |slot: usize, form: &BitVec| {
                    for c in 0..dim {
                        a.set(slot, c, false);
                    }
                    for k in form.iter_ones() {
                        let src = sources[k];
                        let cur = a.get(slot, src);
                        a.set(slot, src, !cur);
                    }
                };
                if self.vertices[v].kind == VertexKind::Output {
                    write(
                        slot_of_output(v),
                        self.outmaps[v].as_ref().expect("validated"),
                    );
                } else {
                    for &e in &self.out_edges[v] {
                        write(n + e, &self.edges[e].form);
                    }
                }
                a
            })
            .collect()
    }
}

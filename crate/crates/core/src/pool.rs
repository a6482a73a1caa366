//! Shared vertex storage for every mesh produced by the pipeline.

use crate::grid::GridSpec;
use nalgebra::Point3;

/// Inside/outside tag carried by every pool vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Unset,
    Negative,
    Positive,
}

/// The growing vertex array shared by all meshes.
///
/// Every vertex records only the grid node it is geometrically coincident
/// with; positions are always derived from the grid. Two vertices are
/// coincident exactly when their node indices are equal, so coincidence is
/// an integer comparison and never a floating-point one.
#[derive(Clone, Debug, Default)]
pub struct VertexPool {
    nodes: Vec<[i32; 3]>,
    signs: Vec<Sign>,
}

impl VertexPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn push(&mut self, node: [i32; 3], sign: Sign) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(node);
        self.signs.push(sign);
        id
    }

    pub fn node(&self, id: u32) -> [i32; 3] {
        self.nodes[id as usize]
    }

    pub fn sign(&self, id: u32) -> Sign {
        self.signs[id as usize]
    }

    pub fn set_sign(&mut self, id: u32, sign: Sign) {
        self.signs[id as usize] = sign;
    }

    pub fn coincident(&self, a: u32, b: u32) -> bool {
        self.node(a) == self.node(b)
    }

    pub fn position(&self, id: u32, grid: &GridSpec) -> Point3<f64> {
        grid.node_pos(self.node(id))
    }

    pub fn iter_ids(&self) -> impl Iterator<Item = u32> {
        0..self.nodes.len() as u32
    }

    /// Retain only the entries marked `true`, renumbering densely.
    /// Returns the old-id -> new-id map with `u32::MAX` for dropped entries.
    pub(crate) fn compact(&mut self, keep: &[bool]) -> Vec<u32> {
        assert_eq!(keep.len(), self.nodes.len());
        let mut remap = vec![u32::MAX; keep.len()];
        let mut next = 0u32;
        for (i, &k) in keep.iter().enumerate() {
            if k {
                remap[i] = next;
                self.nodes[next as usize] = self.nodes[i];
                self.signs[next as usize] = self.signs[i];
                next += 1;
            }
        }
        self.nodes.truncate(next as usize);
        self.signs.truncate(next as usize);
        remap
    }
}

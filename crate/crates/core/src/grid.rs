//! Uniform background grid: node/cell multi-index arithmetic and positions.

use nalgebra::Point3;

/// Spatial dimension of the meshing problem.
///
/// In the planar case the input is a segment loop, output elements are
/// quadrilaterals, and every z coordinate is exactly zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dim {
    Two,
    Three,
}

/// Corner offsets of a cell in the fixed corner order: offset k has bits
/// (k & 1, (k >> 1) & 1, (k >> 2) & 1).
const CORNER_OFFSETS_3D: [[i32; 3]; 8] = [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [1, 1, 0],
    [0, 0, 1],
    [1, 0, 1],
    [0, 1, 1],
    [1, 1, 1],
];

const NODE_CELL_OFFSETS_3D: [[i32; 3]; 8] = [
    [-1, -1, -1],
    [0, -1, -1],
    [-1, 0, -1],
    [0, 0, -1],
    [-1, -1, 0],
    [0, -1, 0],
    [-1, 0, 0],
    [0, 0, 0],
];

const NODE_CELL_OFFSETS_2D: [[i32; 3]; 4] = [[-1, -1, 0], [0, -1, 0], [-1, 0, 0], [0, 0, 0]];

const fn make_neighbor_offsets_3d() -> [[i32; 3]; 26] {
    let mut out = [[0i32; 3]; 26];
    let mut n = 0;
    let mut z = -1i32;
    while z <= 1 {
        let mut y = -1i32;
        while y <= 1 {
            let mut x = -1i32;
            while x <= 1 {
                if !(x == 0 && y == 0 && z == 0) {
                    out[n] = [x, y, z];
                    n += 1;
                }
                x += 1;
            }
            y += 1;
        }
        z += 1;
    }
    out
}

const fn make_neighbor_offsets_2d() -> [[i32; 3]; 8] {
    let mut out = [[0i32; 3]; 8];
    let mut n = 0;
    let mut y = -1i32;
    while y <= 1 {
        let mut x = -1i32;
        while x <= 1 {
            if !(x == 0 && y == 0) {
                out[n] = [x, y, 0];
                n += 1;
            }
            x += 1;
        }
        y += 1;
    }
    out
}

const NODE_NEIGHBOR_OFFSETS_3D: [[i32; 3]; 26] = make_neighbor_offsets_3d();
const NODE_NEIGHBOR_OFFSETS_2D: [[i32; 3]; 8] = make_neighbor_offsets_2d();

impl Dim {
    /// Number of active coordinate axes.
    pub fn axes(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    /// Vertices per grid cell: 4 quad corners or 8 hexahedron corners.
    pub fn corners_per_cell(self) -> usize {
        1 << self.axes()
    }

    /// Vertices per surface element: 2 for segments, 3 for triangles.
    pub fn verts_per_elem(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    /// Cell corner offsets in the fixed corner order.
    pub fn corner_offsets(self) -> &'static [[i32; 3]] {
        match self {
            Dim::Two => &CORNER_OFFSETS_3D[..4],
            Dim::Three => &CORNER_OFFSETS_3D,
        }
    }

    /// Offsets from a node to the surrounding nodes (8 in 2D, 26 in 3D).
    pub fn node_neighbor_offsets(self) -> &'static [[i32; 3]] {
        match self {
            Dim::Two => &NODE_NEIGHBOR_OFFSETS_2D,
            Dim::Three => &NODE_NEIGHBOR_OFFSETS_3D,
        }
    }

    /// Offsets from a node to the cells incident to it (4 in 2D, 8 in 3D).
    pub fn node_cell_offsets(self) -> &'static [[i32; 3]] {
        match self {
            Dim::Two => &NODE_CELL_OFFSETS_2D,
            Dim::Three => &NODE_CELL_OFFSETS_3D,
        }
    }

    /// Faces per cell: 4 quad sides or 6 hexahedron faces. Side 2a is the
    /// negative face along axis a, side 2a+1 the positive one.
    pub fn faces_per_cell(self) -> usize {
        2 * self.axes()
    }

    /// Corner slots (indices into the fixed corner order) of one cell face.
    pub fn face_slots(self, side: usize) -> &'static [usize] {
        const SLOTS_3D: [[usize; 4]; 6] = [
            [0, 2, 4, 6],
            [1, 3, 5, 7],
            [0, 1, 4, 5],
            [2, 3, 6, 7],
            [0, 1, 2, 3],
            [4, 5, 6, 7],
        ];
        const SLOTS_2D: [[usize; 2]; 4] = [[0, 2], [1, 3], [0, 1], [2, 3]];
        match self {
            Dim::Three => &SLOTS_3D[side],
            Dim::Two => &SLOTS_2D[side],
        }
    }
}

pub fn idx_add(a: [i32; 3], b: [i32; 3]) -> [i32; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// A uniform background grid. Cells are axis-aligned cubes (squares in 2D)
/// of spacing `dx`; node `i` sits at `origin + i * dx` component-wise.
#[derive(Clone, Debug)]
pub struct GridSpec {
    origin: Point3<f64>,
    dx: f64,
    dims: [i32; 3],
    dim: Dim,
}

impl GridSpec {
    pub fn new_3d(origin: Point3<f64>, dx: f64, dims: [i32; 3]) -> Self {
        assert!(dx > 0.0, "grid spacing must be positive");
        assert!(dims.iter().all(|&d| d >= 1), "grid must have at least one cell per axis");
        GridSpec { origin, dx, dims, dim: Dim::Three }
    }

    /// A planar grid; the third axis carries no cells and a single node layer
    /// at z = origin.z (which should be 0 for planar inputs).
    pub fn new_2d(origin: Point3<f64>, dx: f64, dims: [i32; 2]) -> Self {
        assert!(dx > 0.0, "grid spacing must be positive");
        assert!(dims.iter().all(|&d| d >= 1), "grid must have at least one cell per axis");
        GridSpec { origin, dx, dims: [dims[0], dims[1], 0], dim: Dim::Two }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn origin(&self) -> Point3<f64> {
        self.origin
    }

    /// Cell counts per axis (the third entry is 0 for planar grids).
    pub fn dims(&self) -> [i32; 3] {
        self.dims
    }

    /// Node counts per axis.
    pub fn node_counts(&self) -> [i32; 3] {
        [self.dims[0] + 1, self.dims[1] + 1, self.dims[2] + 1]
    }

    pub fn total_nodes(&self) -> usize {
        let n = self.node_counts();
        n[0] as usize * n[1] as usize * n[2] as usize
    }

    pub fn total_cells(&self) -> usize {
        let d = self.dims;
        d[0] as usize * d[1] as usize * d[2].max(1) as usize
    }

    pub fn node_in_bounds(&self, n: [i32; 3]) -> bool {
        let c = self.node_counts();
        (0..3).all(|a| n[a] >= 0 && n[a] < c[a])
    }

    pub fn cell_in_bounds(&self, c: [i32; 3]) -> bool {
        match self.dim {
            Dim::Three => (0..3).all(|a| c[a] >= 0 && c[a] < self.dims[a]),
            Dim::Two => {
                c[2] == 0 && (0..2).all(|a| c[a] >= 0 && c[a] < self.dims[a])
            }
        }
    }

    /// Position of grid node `n`. Derived, never stored.
    pub fn node_pos(&self, n: [i32; 3]) -> Point3<f64> {
        Point3::new(
            self.origin.x + n[0] as f64 * self.dx,
            self.origin.y + n[1] as f64 * self.dx,
            self.origin.z + n[2] as f64 * self.dx,
        )
    }

    /// Center of cell `c`.
    pub fn cell_center(&self, c: [i32; 3]) -> Point3<f64> {
        let h = self.dx * 0.5;
        let base = self.node_pos(c);
        match self.dim {
            Dim::Three => Point3::new(base.x + h, base.y + h, base.z + h),
            Dim::Two => Point3::new(base.x + h, base.y + h, 0.0),
        }
    }

    pub fn node_linear(&self, n: [i32; 3]) -> usize {
        debug_assert!(self.node_in_bounds(n));
        let c = self.node_counts();
        (n[2] as usize * c[1] as usize + n[1] as usize) * c[0] as usize + n[0] as usize
    }

    pub fn node_from_linear(&self, mut i: usize) -> [i32; 3] {
        let c = self.node_counts();
        let x = (i % c[0] as usize) as i32;
        i /= c[0] as usize;
        let y = (i % c[1] as usize) as i32;
        i /= c[1] as usize;
        [x, y, i as i32]
    }

    pub fn cell_linear(&self, c: [i32; 3]) -> usize {
        debug_assert!(self.cell_in_bounds(c));
        let d = [self.dims[0] as usize, self.dims[1] as usize];
        (c[2] as usize * d[1] + c[1] as usize) * d[0] + c[0] as usize
    }

    /// Corner node of cell `c` in the fixed corner order.
    pub fn cell_corner_node(&self, c: [i32; 3], corner: usize) -> [i32; 3] {
        idx_add(c, self.dim.corner_offsets()[corner])
    }

    /// The cells incident to node `n` that lie inside the grid.
    pub fn cells_of_node<'a>(&'a self, n: [i32; 3]) -> impl Iterator<Item = [i32; 3]> + 'a {
        self.dim
            .node_cell_offsets()
            .iter()
            .map(move |o| idx_add(n, *o))
            .filter(move |c| self.cell_in_bounds(*c))
    }

    /// Iterate all in-bounds cells in lexicographic (x fastest) order.
    pub fn iter_cells<'a>(&'a self) -> impl Iterator<Item = [i32; 3]> + 'a {
        let d = self.dims;
        let nz = d[2].max(1);
        (0..nz).flat_map(move |z| {
            (0..d[1]).flat_map(move |y| (0..d[0]).map(move |x| [x, y, z]))
        })
    }

    /// Grid edges leaving node `n` in the positive axis directions.
    pub fn edges_of_node<'a>(&'a self, n: [i32; 3]) -> impl Iterator<Item = usize> + 'a {
        (0..self.dim.axes()).filter(move |&a| {
            let mut m = n;
            m[a] += 1;
            self.node_in_bounds(m)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_order_is_lexicographic_in_bits() {
        for (k, o) in Dim::Three.corner_offsets().iter().enumerate() {
            assert_eq!(o[0], (k & 1) as i32);
            assert_eq!(o[1], ((k >> 1) & 1) as i32);
            assert_eq!(o[2], ((k >> 2) & 1) as i32);
        }
        assert_eq!(Dim::Two.corner_offsets().len(), 4);
        assert_eq!(Dim::Three.node_neighbor_offsets().len(), 26);
        assert_eq!(Dim::Two.node_neighbor_offsets().len(), 8);
    }

    #[test]
    fn linear_indexing_round_trips() {
        let g = GridSpec::new_3d(Point3::origin(), 0.5, [3, 4, 5]);
        for z in 0..6 {
            for y in 0..5 {
                for x in 0..4 {
                    let n = [x, y, z];
                    assert_eq!(g.node_from_linear(g.node_linear(n)), n);
                }
            }
        }
        let g2 = GridSpec::new_2d(Point3::origin(), 1.0, [4, 3]);
        assert_eq!(g2.total_nodes(), 20);
        assert_eq!(g2.total_cells(), 12);
        assert!(g2.cell_in_bounds([3, 2, 0]));
        assert!(!g2.cell_in_bounds([0, 0, 1]));
    }

    #[test]
    fn node_positions_scale_with_dx() {
        let g = GridSpec::new_3d(Point3::new(-1.0, 0.0, 2.0), 0.25, [4, 4, 4]);
        let p = g.node_pos([2, 0, 4]);
        assert_eq!(p, Point3::new(-0.5, 0.0, 3.0));
    }
}

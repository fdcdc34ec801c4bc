//! Exact KD-tree over 3-D points.
//!
//! Splits on the axis of largest spread at the median. Queries return the
//! true nearest point; ties on distance go to the smallest original index.

use rayon::prelude::*;

use crate::cloud::Vec3;

use super::SpatialError;

pub const DEFAULT_LEAF_SIZE: usize = 8;

#[derive(Clone, Debug)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug)]
pub struct KdTree {
    /// Coordinates in tree order.
    points: Vec<[f64; 3]>,
    /// Original index of each entry of `points`.
    indices: Vec<usize>,
    nodes: Vec<Node>,
    leaf_size: usize,
}

/// A match: original point index and Euclidean distance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

#[inline]
fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

#[inline]
fn better(d: f64, i: usize, best_d: f64, best_i: usize) -> bool {
    d < best_d || (d == best_d && i < best_i)
}

impl KdTree {
    pub fn build(points: &[Vec3]) -> Result<Self, SpatialError> {
        Self::with_leaf_size(points, DEFAULT_LEAF_SIZE)
    }

    pub fn with_leaf_size(points: &[Vec3], leaf_size: usize) -> Result<Self, SpatialError> {
        if points.is_empty() {
            return Err(SpatialError::EmptyCloud);
        }
        if let Some(i) = points.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(SpatialError::NonFinite(i));
        }
        let leaf_size = leaf_size.max(1);
        let mut tree = KdTree {
            points: points.iter().map(|p| [p.x, p.y, p.z]).collect(),
            indices: (0..points.len()).collect(),
            nodes: Vec::with_capacity(2 * points.len() / leaf_size + 1),
            leaf_size,
        };
        tree.build_node(0, points.len());
        let reordered = tree
            .indices
            .iter()
            .map(|&i| [points[i].x, points[i].y, points[i].z])
            .collect();
        tree.points = reordered;
        Ok(tree)
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= self.leaf_size {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for &i in &self.indices[start..end] {
            let p = &self.points[i];
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        let axis = (0..3)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
            .expect("three axes");
        if hi[axis] - lo[axis] == 0.0 {
            // All points coincide.
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let mid = start + (end - start) / 2;
        let pts = &self.points;
        self.indices[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            pts[a][axis].total_cmp(&pts[b][axis]).then(a.cmp(&b))
        });
        let value = self.points[self.indices[mid]][axis];
        self.nodes.push(Node::Leaf { start: 0, end: 0 });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn leaf_size(&self) -> usize {
        self.leaf_size
    }

    pub fn nearest(&self, query: &Vec3) -> Neighbor {
        let q = [query.x, query.y, query.z];
        let mut best = (f64::INFINITY, usize::MAX);
        self.nearest_in(0, &q, &mut best);
        Neighbor {
            index: best.1,
            distance: best.0.sqrt(),
        }
    }

    fn nearest_in(&self, node: usize, q: &[f64; 3], best: &mut (f64, usize)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for k in start..end {
                    let d = dist2(&self.points[k], q);
                    let i = self.indices[k];
                    if better(d, i, best.0, best.1) {
                        *best = (d, i);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.nearest_in(near, q, best);
                // Equality must still be explored for the index tie-break.
                if diff * diff <= best.0 {
                    self.nearest_in(far, q, best);
                }
            }
        }
    }

    /// The `k` nearest points ordered by (distance, index).
    pub fn knn(&self, query: &Vec3, k: usize) -> Vec<Neighbor> {
        let k = k.min(self.len());
        if k == 0 {
            return Vec::new();
        }
        let q = [query.x, query.y, query.z];
        // Sorted ascending; `heap.last()` is the current k-th best.
        let mut heap: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        self.knn_in(0, &q, k, &mut heap);
        heap.into_iter()
            .map(|(d, index)| Neighbor {
                index,
                distance: d.sqrt(),
            })
            .collect()
    }

    fn knn_in(&self, node: usize, q: &[f64; 3], k: usize, heap: &mut Vec<(f64, usize)>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for s in start..end {
                    let d = dist2(&self.points[s], q);
                    let i = self.indices[s];
                    if heap.len() == k {
                        let (wd, wi) = heap[k - 1];
                        if !better(d, i, wd, wi) {
                            continue;
                        }
                        heap.pop();
                    }
                    let at = heap.partition_point(|&(hd, hi)| better(hd, hi, d, i));
                    heap.insert(at, (d, i));
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.knn_in(near, q, k, heap);
                if heap.len() < k || diff * diff <= heap[k - 1].0 {
                    self.knn_in(far, q, k, heap);
                }
            }
        }
    }

    /// Nearest neighbour for every query, in query order.
    pub fn nearest_batch(&self, queries: &[Vec3]) -> Vec<Neighbor> {
        queries.par_iter().map(|q| self.nearest(q)).collect()
    }
}

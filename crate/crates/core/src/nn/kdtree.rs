use super::{squared_distance, PointSample};

const LEAF_SIZE: usize = 12;

#[derive(Debug, Clone)]
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

/// Exact kd-tree over the points of a [`PointSample`].
///
/// Nodes split at the median of the axis with the largest spread. Search
/// descends towards the query first and visits the far side only when the
/// splitting plane is no farther than the best candidate so far.
#[derive(Debug, Clone)]
pub struct KdTree<'a> {
    sample: &'a PointSample,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl<'a> KdTree<'a> {
    pub fn build(sample: &'a PointSample) -> Self {
        let mut tree = KdTree {
            sample,
            order: (0..sample.len()).collect(),
            nodes: Vec::new(),
        };
        if !sample.is_empty() {
            tree.build_node(0, sample.len());
        }
        tree
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let axis = self.widest_axis(start, end);
        let sample = self.sample;
        let mid = start + (end - start) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            sample.point(a)[axis].total_cmp(&sample.point(b)[axis])
        });
        let value = sample.point(self.order[mid])[axis];
        // placeholder, patched once children exist
        self.nodes.push(Node::Leaf { start, end });
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

    fn widest_axis(&self, start: usize, end: usize) -> usize {
        let dim = self.sample.dim();
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for &i in &self.order[start..end] {
            for (k, &c) in self.sample.point(i).iter().enumerate() {
                lo[k] = lo[k].min(c);
                hi[k] = hi[k].max(c);
            }
        }
        (0..dim)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])).then(b.cmp(&a)))
            .unwrap_or(0)
    }

    /// Nearest point to `query` other than `skip`, as (squared distance, index).
    /// Equal distances resolve to the smaller index.
    pub fn nearest_excluding(&self, query: &[f64], skip: usize) -> (f64, usize) {
        let mut best = (f64::INFINITY, usize::MAX);
        if !self.nodes.is_empty() {
            self.search(0, query, skip, &mut best);
        }
        best
    }

    fn search(&self, node: usize, query: &[f64], skip: usize, best: &mut (f64, usize)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &j in &self.order[start..end] {
                    if j == skip {
                        continue;
                    }
                    let d2 = squared_distance(query, self.sample.point(j));
                    if d2 < best.0 || (d2 == best.0 && j < best.1) {
                        *best = (d2, j);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = query[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, query, skip, best);
                // Every point across the plane has squared distance ≥ diff²
                // (subtraction and squaring are monotone in floating point),
                // so equality must still be visited for index tie-breaks.
                if diff * diff <= best.0 {
                    self.search(far, query, skip, best);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Backend;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn agrees_with_brute(dim in 1usize..5, coords in prop::collection::vec(-50i32..50, 2..400)) {
            // small integer grid forces many exact ties
            let n = coords.len() / dim;
            prop_assume!(n >= 2);
            let coords: Vec<f64> = coords[..n * dim].iter().map(|&c| c as f64 * 0.5).collect();
            let s = PointSample::new(dim, coords).unwrap();
            let brute = crate::nn::nn_distances(&s, Backend::Brute);
            let index = crate::nn::nn_distances(&s, Backend::Index);
            prop_assert_eq!(brute, index);
        }
    }
}

use super::{squared_distance, PointCloud};
use crate::error::{Error, Result};

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

/// Exact nearest-neighbor index over a borrowed [`PointCloud`].
///
/// A median-split k-d tree. Queries return the same `(index, distance)` a
/// brute-force scan would, with ties resolved towards the lowest point index.
/// The index is immutable and `Sync`, so it can be queried from many threads.
#[derive(Debug, Clone)]
pub struct NnIndex<'a> {
    cloud: &'a PointCloud,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl<'a> NnIndex<'a> {
    pub fn build(cloud: &'a PointCloud) -> Result<Self> {
        cloud.ensure_non_empty("indexed")?;
        let mut order: Vec<usize> = (0..cloud.len()).collect();
        let mut nodes = Vec::with_capacity(2 * cloud.len() / LEAF_SIZE + 1);
        build_node(cloud, &mut order, 0, &mut nodes);
        Ok(Self { cloud, order, nodes })
    }

    pub fn cloud(&self) -> &'a PointCloud {
        self.cloud
    }

    /// Nearest indexed point to `query` and its Euclidean distance.
    pub fn nearest(&self, query: &[f64]) -> Result<(usize, f64)> {
        if query.len() != self.cloud.dim() {
            return Err(Error::DimensionMismatch { expected: self.cloud.dim(), got: query.len() });
        }
        let (idx, sq) = self.nearest_sq(query);
        Ok((idx, sq.sqrt()))
    }

    /// Nearest neighbor with squared distance; `query` must have the index dimension.
    pub(crate) fn nearest_sq(&self, query: &[f64]) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        self.search(0, query, &mut best);
        best
    }

    fn search(&self, node: usize, q: &[f64], best: &mut (usize, f64)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let d = squared_distance(q, self.cloud.point(i));
                    if d < best.1 || (d == best.1 && i < best.0) {
                        *best = (i, d);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = q[axis] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, best);
                // Equal plane distance must still be visited: a lower index may sit there.
                if diff * diff <= best.1 {
                    self.search(far, q, best);
                }
            }
        }
    }

    /// For each indexed point, how many `queries` have it as their nearest neighbor.
    pub fn hit_counts(&self, queries: &PointCloud) -> Result<Vec<usize>> {
        self.cloud.ensure_same_dim(queries)?;
        let mut counts = vec![0usize; self.cloud.len()];
        for q in queries.iter() {
            counts[self.nearest_sq(q).0] += 1;
        }
        Ok(counts)
    }
}

fn build_node(cloud: &PointCloud, order: &mut [usize], offset: usize, nodes: &mut Vec<Node>) -> usize {
    let id = nodes.len();
    if order.len() <= LEAF_SIZE {
        nodes.push(Node::Leaf { start: offset, end: offset + order.len() });
        return id;
    }
    let dim = cloud.dim();
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for &i in order.iter() {
        for (k, &c) in cloud.point(i).iter().enumerate() {
            lo[k] = lo[k].min(c);
            hi[k] = hi[k].max(c);
        }
    }
    let axis = (0..dim)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
        .unwrap_or(0);
    if hi[axis] - lo[axis] == 0.0 {
        // All points coincide.
        nodes.push(Node::Leaf { start: offset, end: offset + order.len() });
        return id;
    }
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        cloud.point(a)[axis].total_cmp(&cloud.point(b)[axis])
    });
    let value = cloud.point(order[mid])[axis];
    nodes.push(Node::Leaf { start: 0, end: 0 });
    let (left_part, right_part) = order.split_at_mut(mid);
    let left = build_node(cloud, left_part, offset, nodes);
    let right = build_node(cloud, right_part, offset + mid, nodes);
    nodes[id] = Node::Split { axis, value, left, right };
    id
}

#[cfg(test)]
fn brute_force_nearest(cloud: &PointCloud, query: &[f64]) -> (usize, f64) {
    let mut best = (usize::MAX, f64::INFINITY);
    for (i, p) in cloud.iter().enumerate() {
        let d = squared_distance(query, p);
        if d < best.1 {
            best = (i, d);
        }
    }
    (best.0, best.1.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud3(points: &[[f64; 3]]) -> PointCloud {
        PointCloud::from_points(points).unwrap()
    }

    #[test]
    fn single_candidate() {
        let c = cloud3(&[[0.0, 0.0, 0.0]]);
        let idx = NnIndex::build(&c).unwrap();
        let (i, d) = idx.nearest(&[5.0, 5.0, 5.0]).unwrap();
        assert_eq!(i, 0);
        assert_eq!(d, 75f64.sqrt());
    }

    #[test]
    fn strict_nearest_and_tie() {
        let c = cloud3(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        let idx = NnIndex::build(&c).unwrap();
        let (i, d) = idx.nearest(&[0.4, 0.0, 0.0]).unwrap();
        assert_eq!(i, 0);
        assert!((d - 0.4).abs() < 1e-15);

        let c = cloud3(&[[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]]);
        let idx = NnIndex::build(&c).unwrap();
        assert_eq!(idx.nearest(&[1.0, 0.0, 0.0]).unwrap(), (0, 1.0));
        assert_eq!(brute_force_nearest(&c, &[1.0, 0.0, 0.0]), (0, 1.0));
    }

    #[test]
    fn ties_inside_tree_pick_lowest_index() {
        // Many duplicates and equidistant points spread over several leaves.
        let mut pts = Vec::new();
        for i in 0..40 {
            let x = (i % 5) as f64;
            pts.push([x, 0.0, 0.0]);
        }
        let c = cloud3(&pts);
        let idx = NnIndex::build(&c).unwrap();
        for q in [0.5, 1.5, 2.0, 3.5, -1.0, 9.0] {
            let got = idx.nearest(&[q, 0.0, 0.0]).unwrap();
            assert_eq!(got, brute_force_nearest(&c, &[q, 0.0, 0.0]), "query {q}");
        }
    }

    #[test]
    fn query_equal_to_source_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<[f64; 3]> = (0..50).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
        let c = cloud3(&pts);
        let idx = NnIndex::build(&c).unwrap();
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(idx.nearest(p).unwrap(), (i, 0.0));
        }
    }

    #[test]
    fn random_queries_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<[f64; 3]> = (0..200).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
        let c = cloud3(&pts);
        let idx = NnIndex::build(&c).unwrap();
        for _ in 0..50 {
            let q = [rng.random::<f64>() * 1.2 - 0.1, rng.random(), rng.random()];
            assert_eq!(idx.nearest(&q).unwrap(), brute_force_nearest(&c, &q));
        }
    }

    #[test]
    fn errors() {
        let empty = PointCloud::from_flat(3, vec![]).unwrap();
        assert!(NnIndex::build(&empty).is_err());
        let c = cloud3(&[[0.0, 0.0, 0.0]]);
        let idx = NnIndex::build(&c).unwrap();
        assert!(matches!(idx.nearest(&[0.0, 0.0]), Err(Error::DimensionMismatch { .. })));
        let q2 = PointCloud::from_points(&[[0.0, 0.0]]).unwrap();
        assert!(idx.hit_counts(&q2).is_err());
    }

    #[test]
    fn hit_counts_examples() {
        let c = cloud3(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 2.0, 0.0]]);
        let idx = NnIndex::build(&c).unwrap();
        assert_eq!(idx.hit_counts(&c).unwrap(), vec![1, 1, 1]);

        let g = cloud3(&[[0.0, 0.0, 0.0], [9.0, 9.0, 9.0]]);
        let q = cloud3(&[[0.0, 0.0, 0.0], [0.1, 0.0, 0.0]]);
        assert_eq!(NnIndex::build(&g).unwrap().hit_counts(&q).unwrap(), vec![2, 0]);

        let one = cloud3(&[[0.3, 0.0, 0.0]]);
        let counts = idx.hit_counts(&one).unwrap();
        assert_eq!(counts.iter().sum::<usize>(), 1);
    }
}

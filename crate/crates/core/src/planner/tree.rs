use crate::geometry::Point;
use crate::kdtree::IncrementalIndex;

/// Rooted search tree. Node 0 is the root; every other node stores the index
/// of its parent.
#[derive(Clone, Debug, Default)]
pub struct Tree {
    nodes: Vec<Point>,
    parent: Vec<Option<usize>>,
    newest: usize,
    index: IncrementalIndex,
}

impl Tree {
    pub fn new(root: Point) -> Self {
        let mut index = IncrementalIndex::new();
        index.push(root);
        Tree {
            nodes: vec![root],
            parent: vec![None],
            newest: 0,
            index,
        }
    }

    pub fn empty() -> Self {
        Tree::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &Point {
        &self.nodes[i]
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.parent[i]
    }

    pub fn root(&self) -> Option<&Point> {
        self.nodes.first()
    }

    /// Index of the most recently added node.
    pub fn newest(&self) -> usize {
        self.newest
    }

    pub fn newest_point(&self) -> &Point {
        &self.nodes[self.newest]
    }

    pub fn push(&mut self, p: Point, parent: usize) -> usize {
        debug_assert!(parent < self.nodes.len());
        self.nodes.push(p);
        self.parent.push(Some(parent));
        self.index.push(p);
        self.newest = self.nodes.len() - 1;
        self.newest
    }

    pub(crate) fn set_parent(&mut self, i: usize, parent: usize) {
        self.parent[i] = Some(parent);
    }

    /// `(index, distance)` of the node closest to `q`, lowest index on ties.
    pub fn nearest(&self, q: &Point) -> (usize, f64) {
        let (i, d2) = self.index.nearest(q).expect("tree has a root");
        (i, d2.sqrt())
    }

    pub fn within_radius(&self, q: &Point, r: f64) -> Vec<usize> {
        self.index.within_radius(q, r)
    }

    /// Positions from node `i` back to the root, inclusive.
    pub fn backtrack(&self, mut i: usize) -> Vec<Point> {
        let mut out = vec![self.nodes[i]];
        while let Some(p) = self.parent[i] {
            out.push(self.nodes[p]);
            i = p;
        }
        out
    }

    /// `(child, parent)` position pairs for every non-root node.
    pub fn edges(&self) -> impl Iterator<Item = (&Point, &Point)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(move |(i, p)| p.map(|p| (&self.nodes[i], &self.nodes[p])))
    }

    /// True if following parents from every node reaches node 0 without
    /// revisiting a node.
    pub fn is_well_formed(&self) -> bool {
        if self.nodes.is_empty() {
            return true;
        }
        if self.parent[0].is_some() || self.parent[1..].iter().any(Option::is_none) {
            return false;
        }
        (0..self.nodes.len()).all(|start| {
            let mut i = start;
            let mut steps = 0;
            while let Some(p) = self.parent[i] {
                i = p;
                steps += 1;
                if steps > self.nodes.len() {
                    return false;
                }
            }
            i == 0
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backtrack_and_edges() {
        let mut t = Tree::new(Point::new2(0.0, 0.0));
        let a = t.push(Point::new2(1.0, 0.0), 0);
        let b = t.push(Point::new2(2.0, 0.0), a);
        t.push(Point::new2(1.0, 1.0), a);
        assert_eq!(t.newest(), 3);
        assert_eq!(
            t.backtrack(b),
            vec![Point::new2(2.0, 0.0), Point::new2(1.0, 0.0), Point::new2(0.0, 0.0)]
        );
        assert_eq!(t.edges().count(), 3);
        assert!(t.is_well_formed());
        assert_eq!(t.nearest(&Point::new2(1.9, 0.1)).0, b);
    }

    #[test]
    fn cycle_detected() {
        let mut t = Tree::new(Point::new2(0.0, 0.0));
        let a = t.push(Point::new2(1.0, 0.0), 0);
        let b = t.push(Point::new2(2.0, 0.0), a);
        t.set_parent(a, b);
        assert!(!t.is_well_formed());
    }
}

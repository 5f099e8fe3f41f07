use std::collections::HashMap;

use nalgebra::Vector3;
use thiserror::Error;

pub type Vec3 = Vector3<f64>;

/// A triangle mesh. Counterclockwise winding faces outward.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("face {face} references vertex {index}, but the mesh has {count} vertices")]
    IndexOutOfRange { face: usize, index: usize, count: usize },
    #[error("face {face} repeats a vertex index")]
    DegenerateFace { face: usize },
    #[error("vertex {vertex} has a non-finite coordinate")]
    NonFiniteVertex { vertex: usize },
    #[error("edge ({a}, {b}) is shared by more than two faces")]
    NonManifoldEdge { a: usize, b: usize },
    #[error("edge ({a}, {b}) is traversed twice in the same direction (inconsistent orientation)")]
    InconsistentOrientation { a: usize, b: usize },
    #[error("vertex {vertex} is non-manifold: its incident faces do not form a single fan")]
    NonManifoldVertex { vertex: usize },
}

/// Undirected edge key with the lower index first.
pub fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Faces incident to each undirected edge.
#[derive(Clone, Debug, Default)]
pub struct EdgeFaces {
    map: HashMap<(usize, usize), Vec<usize>>,
}

impl EdgeFaces {
    pub fn build(faces: &[[usize; 3]]) -> Self {
        let mut map: HashMap<(usize, usize), Vec<usize>> = HashMap::with_capacity(faces.len() * 3 / 2 + 1);
        for (f, tri) in faces.iter().enumerate() {
            for k in 0..3 {
                map.entry(edge_key(tri[k], tri[(k + 1) % 3])).or_default().push(f);
            }
        }
        Self { map }
    }

    pub fn faces(&self, a: usize, b: usize) -> &[usize] {
        self.map.get(&edge_key(a, b)).map_or(&[], |v| v.as_slice())
    }

    /// The face across edge `(a, b)` from `face`, if there is exactly one.
    pub fn neighbor(&self, face: usize, a: usize, b: usize) -> Option<usize> {
        match self.faces(a, b) {
            [f0, f1] if *f0 == face => Some(*f1),
            [f0, f1] if *f1 == face => Some(*f0),
            _ => None,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.map.len()
    }

    pub fn boundary_edge_count(&self) -> usize {
        self.map.values().filter(|f| f.len() == 1).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &Vec<usize>)> {
        self.map.iter()
    }
}

impl Mesh {
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Self {
        Self { vertices, faces }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn triangle(&self, f: usize) -> [Vec3; 3] {
        let [a, b, c] = self.faces[f];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.triangle(f);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    /// Axis-aligned bounds of all vertices; `None` for an empty mesh.
    pub fn bounds(&self) -> Option<(Vec3, Vec3)> {
        let first = *self.vertices.first()?;
        Some(self.vertices.iter().fold((first, first), |(lo, hi), v| {
            (lo.inf(v), hi.sup(v))
        }))
    }

    pub fn bbox_diagonal(&self) -> f64 {
        self.bounds().map_or(0.0, |(lo, hi)| (hi - lo).norm())
    }

    pub fn edge_faces(&self) -> EdgeFaces {
        EdgeFaces::build(&self.faces)
    }

    /// Checks index ranges, degenerate faces, finiteness and that the mesh is
    /// an orientable manifold with boundary. Unreferenced vertices are allowed.
    pub fn validate(&self) -> Result<(), MeshError> {
        let n = self.vertices.len();
        for (v, p) in self.vertices.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
                return Err(MeshError::NonFiniteVertex { vertex: v });
            }
        }
        for (f, tri) in self.faces.iter().enumerate() {
            for &i in tri {
                if i >= n {
                    return Err(MeshError::IndexOutOfRange { face: f, index: i, count: n });
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::DegenerateFace { face: f });
            }
        }

        let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(self.faces.len() * 3);
        for (f, tri) in self.faces.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                if directed.insert((a, b), f).is_some() {
                    return Err(MeshError::InconsistentOrientation { a, b });
                }
            }
        }
        let edges = self.edge_faces();
        let mut sorted: Vec<_> = edges.iter().filter(|(_, f)| f.len() > 2).map(|(e, _)| *e).collect();
        sorted.sort_unstable();
        if let Some(&(a, b)) = sorted.first() {
            return Err(MeshError::NonManifoldEdge { a, b });
        }

        // vertex links: each face (v, a, b) contributes the link edge a -> b;
        // a manifold vertex has a link that is a single path or cycle
        let mut link: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for tri in &self.faces {
            for k in 0..3 {
                link[tri[k]].push((tri[(k + 1) % 3], tri[(k + 2) % 3]));
            }
        }
        for (v, edges) in link.iter().enumerate() {
            if edges.len() > 1 && !is_single_chain(edges) {
                return Err(MeshError::NonManifoldVertex { vertex: v });
            }
        }
        Ok(())
    }

    /// Connected components over shared edges, as per-face labels plus count.
    pub fn face_components(&self) -> (Vec<usize>, usize) {
        let edges = self.edge_faces();
        let mut label = vec![usize::MAX; self.faces.len()];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.faces.len() {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            stack.push(start);
            while let Some(f) = stack.pop() {
                let tri = self.faces[f];
                for k in 0..3 {
                    for &g in edges.faces(tri[k], tri[(k + 1) % 3]) {
                        if label[g] == usize::MAX {
                            label[g] = count;
                            stack.push(g);
                        }
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Per-component `(vertices, edges, faces, boundary loops)`.
    pub fn component_topology(&self) -> Vec<ComponentTopology> {
        let (label, count) = self.face_components();
        let edges = self.edge_faces();
        let mut out = vec![ComponentTopology::default(); count];
        let mut seen_vertex = vec![usize::MAX; self.vertices.len()];
        for (f, tri) in self.faces.iter().enumerate() {
            let c = label[f];
            out[c].faces += 1;
            for &v in tri {
                if seen_vertex[v] != c {
                    // a manifold vertex belongs to one component only
                    seen_vertex[v] = c;
                    out[c].vertices += 1;
                }
            }
        }
        // boundary loops: boundary half-edges chained by their start vertex
        let mut next: HashMap<usize, usize> = HashMap::new();
        for (&(a, b), faces) in edges.iter() {
            let c = label[faces[0]];
            out[c].edges += 1;
            if faces.len() == 1 {
                let tri = self.faces[faces[0]];
                let forward = (0..3).any(|k| tri[k] == a && tri[(k + 1) % 3] == b);
                let (s, t) = if forward { (b, a) } else { (a, b) };
                next.insert(s, t);
            }
        }
        let mut visited: HashMap<usize, bool> = HashMap::new();
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        for s in starts {
            if visited.contains_key(&s) {
                continue;
            }
            let mut v = s;
            while !visited.contains_key(&v) {
                visited.insert(v, true);
                match next.get(&v) {
                    Some(&w) => v = w,
                    None => break,
                }
            }
            // component of the loop's first vertex
            let c = self
                .faces
                .iter()
                .position(|t| t.contains(&s))
                .map(|f| label[f])
                .unwrap_or(0);
            out[c].boundary_loops += 1;
        }
        out
    }
}

/// Euler data of one connected component.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ComponentTopology {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub boundary_loops: usize,
}

impl ComponentTopology {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.faces as i64
    }

    /// `g` from `χ = 2 − 2g − b`.
    pub fn genus(&self) -> i64 {
        (2 - self.boundary_loops as i64 - self.euler_characteristic()) / 2
    }
}

fn is_single_chain(edges: &[(usize, usize)]) -> bool {
    let mut out: HashMap<usize, usize> = HashMap::with_capacity(edges.len());
    let mut indeg: HashMap<usize, usize> = HashMap::with_capacity(edges.len());
    for &(a, b) in edges {
        if out.insert(a, b).is_some() {
            return false;
        }
        *indeg.entry(b).or_default() += 1;
        indeg.entry(a).or_default();
    }
    if indeg.values().any(|&d| d > 1) {
        return false;
    }
    // start from the unique source of an open fan, or anywhere on a cycle
    let sources: Vec<usize> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&v, _)| v).collect();
    let start = match sources.len() {
        0 => edges[0].0,
        1 => sources[0],
        _ => return false,
    };
    let mut v = start;
    let mut steps = 0;
    while let Some(&w) = out.get(&v) {
        steps += 1;
        v = w;
        if v == start || steps > edges.len() {
            break;
        }
    }
    steps == edges.len()
}

use std::collections::HashSet;

use super::SpatialGraph;

/// One-to-one matching of the vertices of `a` onto vertices of `b` within
/// `tol` meters, nearest pairs first. `None` if vertex counts differ or some
/// vertex stays unmatched.
pub fn vertex_matching(a: &SpatialGraph, b: &SpatialGraph, tol: f64) -> Option<Vec<usize>> {
    if a.vertex_count() != b.vertex_count() {
        return None;
    }
    let cell = tol.max(1e-6);
    let mut buckets: std::collections::HashMap<(i64, i64), Vec<usize>> = std::collections::HashMap::new();
    let key = |x: f64, y: f64| ((x / cell).floor() as i64, (y / cell).floor() as i64);
    for (j, v) in b.vertices().iter().enumerate() {
        buckets.entry(key(v.pos.x, v.pos.y)).or_default().push(j);
    }
    let mut pairs = Vec::new();
    for (i, v) in a.vertices().iter().enumerate() {
        let (kx, ky) = key(v.pos.x, v.pos.y);
        for dy in -1..=1 {
            for dx in -1..=1 {
                if let Some(list) = buckets.get(&(kx + dx, ky + dy)) {
                    for &j in list {
                        let d = v.pos.dist(b.pos(j));
                        if d <= tol {
                            pairs.push((d, i, j));
                        }
                    }
                }
            }
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
    let mut map = vec![usize::MAX; a.vertex_count()];
    let mut used = vec![false; b.vertex_count()];
    for (_, i, j) in pairs {
        if map[i] == usize::MAX && !used[j] {
            map[i] = j;
            used[j] = true;
        }
    }
    map.iter().all(|&j| j != usize::MAX).then_some(map)
}

/// Graphs are equal up to vertex relabeling when their vertices match
/// one-to-one within `tol` meters and the matched edge sets coincide.
pub fn structurally_equal(a: &SpatialGraph, b: &SpatialGraph, tol: f64) -> bool {
    if a.edge_count() != b.edge_count() {
        return false;
    }
    let Some(map) = vertex_matching(a, b, tol) else {
        return false;
    };
    let theirs: HashSet<(usize, usize)> = b.edges().iter().copied().collect();
    a.edges().iter().all(|&(x, y)| {
        let (p, q) = (map[x], map[y]);
        theirs.contains(&(p.min(q), p.max(q)))
    })
}

//! Edit lattice over all minimum-cost word alignments of a source and a hypothesis.
//!
//! Vertices are alignment points `(i, j)` that lie on at least one optimal path.
//! Besides the single-token match arcs, every pair of vertices `u -> v` connected by
//! an optimal sub-path with at most `max_unchanged_words` matched tokens becomes an
//! edit arc replacing `source[u.i..v.i]` with `hypothesis[u.j..v.j]`. Single-token
//! substitutions, insertions and deletions are the zero-match case of that rule.

use crate::token::Token;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct ArcEdit {
    pub start: usize,
    pub end: usize,
    pub hyp_start: usize,
    pub hyp_end: usize,
}

impl ArcEdit {
    pub fn is_insertion(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum ArcKind {
    Match,
    Edit(ArcEdit),
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LatticeArc {
    pub to: usize,
    pub kind: ArcKind,
}

pub struct EditLattice {
    target: usize,
    on_path: Vec<bool>,
    arcs: Vec<Vec<LatticeArc>>,
}

const UNREACHED: u32 = u32::MAX;

impl EditLattice {
    pub fn build(source: &[Token], hypothesis: &[Token], max_unchanged_words: usize) -> Self {
        let (n, m) = (source.len(), hypothesis.len());
        let cols = m + 1;
        let idx = |i: usize, j: usize| i * cols + j;

        let mut fwd = vec![0u32; (n + 1) * cols];
        for i in 0..=n {
            for j in 0..=m {
                fwd[idx(i, j)] = if i == 0 {
                    j as u32
                } else if j == 0 {
                    i as u32
                } else {
                    let diag = fwd[idx(i - 1, j - 1)] + u32::from(source[i - 1] != hypothesis[j - 1]);
                    diag.min(fwd[idx(i - 1, j)] + 1).min(fwd[idx(i, j - 1)] + 1)
                };
            }
        }
        let mut bwd = vec![0u32; (n + 1) * cols];
        for i in (0..=n).rev() {
            for j in (0..=m).rev() {
                bwd[idx(i, j)] = if i == n {
                    (m - j) as u32
                } else if j == m {
                    (n - i) as u32
                } else {
                    let diag = bwd[idx(i + 1, j + 1)] + u32::from(source[i] != hypothesis[j]);
                    diag.min(bwd[idx(i + 1, j)] + 1).min(bwd[idx(i, j + 1)] + 1)
                };
            }
        }
        let total = fwd[idx(n, m)];
        let on_path: Vec<bool> = fwd.iter().zip(&bwd).map(|(f, b)| f + b == total).collect();

        // Optimal single steps out of each on-path vertex, tagged with whether they are matches.
        let mut steps: Vec<Vec<(usize, bool)>> = vec![Vec::new(); on_path.len()];
        for i in 0..=n {
            for j in 0..=m {
                let u = idx(i, j);
                if !on_path[u] {
                    continue;
                }
                let here = fwd[u];
                if i < n && j < m {
                    let same = source[i] == hypothesis[j];
                    let v = idx(i + 1, j + 1);
                    if here + u32::from(!same) + bwd[v] == total {
                        steps[u].push((v, same));
                    }
                }
                if i < n && here + 1 + bwd[idx(i + 1, j)] == total {
                    steps[u].push((idx(i + 1, j), false));
                }
                if j < m && here + 1 + bwd[idx(i, j + 1)] == total {
                    steps[u].push((idx(i, j + 1), false));
                }
            }
        }

        let limit = max_unchanged_words as u32;
        let mut arcs: Vec<Vec<LatticeArc>> = vec![Vec::new(); on_path.len()];
        let mut min_matches = vec![UNREACHED; on_path.len()];
        let mut touched: Vec<usize> = Vec::new();
        // Buckets keyed by anti-diagonal offset from the arc's origin. Every step raises
        // i + j, so sweeping buckets in order visits a vertex after all its predecessors.
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); n + m + 1];
        for u in 0..on_path.len() {
            if !on_path[u] {
                continue;
            }
            let (ui, uj) = (u / cols, u % cols);
            for &(v, is_match) in &steps[u] {
                if is_match {
                    arcs[u].push(LatticeArc { to: v, kind: ArcKind::Match });
                }
            }
            min_matches[u] = 0;
            touched.push(u);
            buckets[0].push(u);
            let mut last = 0;
            let mut d = 0;
            while d <= last {
                let layer = std::mem::take(&mut buckets[d]);
                for &w in &layer {
                    let (wi, wj) = (w / cols, w % cols);
                    if w != u && source[ui..wi] != hypothesis[uj..wj] {
                        let edit = ArcEdit { start: ui, end: wi, hyp_start: uj, hyp_end: wj };
                        arcs[u].push(LatticeArc { to: w, kind: ArcKind::Edit(edit) });
                    }
                    let base = min_matches[w];
                    for &(v, is_match) in &steps[w] {
                        let count = base + u32::from(is_match);
                        if count > limit {
                            continue;
                        }
                        if min_matches[v] == UNREACHED {
                            let offset = (v / cols + v % cols) - (ui + uj);
                            buckets[offset].push(v);
                            last = last.max(offset);
                            touched.push(v);
                            min_matches[v] = count;
                        } else if count < min_matches[v] {
                            min_matches[v] = count;
                        }
                    }
                }
                let mut layer = layer;
                layer.clear();
                buckets[d] = layer;
                d += 1;
            }
            for &t in &touched {
                min_matches[t] = UNREACHED;
            }
            touched.clear();
        }

        EditLattice { target: idx(n, m), on_path, arcs }
    }

    pub(crate) fn vertex_count(&self) -> usize {
        self.on_path.len()
    }

    pub(crate) fn target(&self) -> usize {
        self.target
    }

    pub(crate) fn arcs(&self, vertex: usize) -> &[LatticeArc] {
        &self.arcs[vertex]
    }

    pub(crate) fn is_on_path(&self, vertex: usize) -> bool {
        self.on_path[vertex]
    }

    /// Number of edit arcs, single-token and merged.
    pub fn edit_arc_count(&self) -> usize {
        self.arcs.iter().flatten().filter(|a| matches!(a.kind, ArcKind::Edit(_))).count()
    }

    #[cfg(test)]
    pub(crate) fn edit_arcs(&self) -> Vec<ArcEdit> {
        let mut out: Vec<ArcEdit> = self
            .arcs
            .iter()
            .flatten()
            .filter_map(|a| match a.kind {
                ArcKind::Edit(e) => Some(e),
                ArcKind::Match => None,
            })
            .collect();
        out.sort();
        out
    }
}

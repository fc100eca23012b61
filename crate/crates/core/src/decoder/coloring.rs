//! Coloring of the generators so that same-color generators have disjoint
//! check neighborhoods `Γ_X(Γ_Z(g))`.

use super::flips::FlipTable;
use crate::error::{param, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl Coloring {
    /// Wraps an explicit assignment; colors must be `0..k` with none empty.
    pub fn from_assignment(colors: Vec<usize>) -> Result<Self> {
        let k = colors.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut classes = vec![Vec::new(); k];
        for (g, &c) in colors.iter().enumerate() {
            classes[c].push(g);
        }
        if classes.iter().any(Vec::is_empty) {
            return Err(param("color indices must be contiguous"));
        }
        Ok(Coloring { colors, classes })
    }

    /// Copy with `g2` moved into the color class of `g1`; colors are
    /// renumbered if a class empties.
    pub fn with_merged(&self, g1: usize, g2: usize) -> Coloring {
        let mut colors = self.colors.clone();
        colors[g2] = colors[g1];
        let mut remap = vec![usize::MAX; self.classes.len()];
        let mut next = 0;
        for c in colors.iter_mut() {
            if remap[*c] == usize::MAX {
                remap[*c] = next;
                next += 1;
            }
            *c = remap[*c];
        }
        Coloring::from_assignment(colors).expect("renumbered colors are contiguous")
    }

    pub fn color(&self, g: usize) -> usize {
        self.colors[g]
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn num_colors(&self) -> usize {
        self.classes.len()
    }

    /// Generators of color `k`, in increasing index order.
    pub fn class(&self, k: usize) -> &[usize] {
        &self.classes[k]
    }

    /// First pair of distinct same-color generators whose check
    /// neighborhoods intersect.
    pub fn conflict(&self, table: &FlipTable) -> Option<(usize, usize)> {
        let mut owner: Vec<Option<usize>> = Vec::new();
        for class in &self.classes {
            owner.clear();
            for &g in class {
                for &c in &table.frame(g).checks {
                    if c >= owner.len() {
                        owner.resize(c + 1, None);
                    }
                    if let Some(h) = owner[c] {
                        return Some((h, g));
                    }
                    owner[c] = Some(g);
                }
            }
        }
        None
    }
}

/// Greedy coloring of the conflict graph in generator index order: each
/// generator takes the smallest color unused by an earlier conflicting one.
pub fn color_generators(table: &FlipTable) -> Coloring {
    let n = table.num_generators();
    let mut colors = vec![usize::MAX; n];
    let mut used: Vec<usize> = Vec::new();
    let mut stamp = vec![usize::MAX; n];
    for g in 0..n {
        used.clear();
        for &c in &table.frame(g).checks {
            for &h in table.generators_touching(c) {
                if h < g && stamp[h] != g {
                    stamp[h] = g;
                    used.push(colors[h]);
                }
            }
        }
        used.sort_unstable();
        used.dedup();
        let mut color = 0;
        for &u in &used {
            if u == color {
                color += 1;
            } else if u > color {
                break;
            }
        }
        colors[g] = color;
    }
    Coloring::from_assignment(colors).expect("greedy colors are contiguous")
}

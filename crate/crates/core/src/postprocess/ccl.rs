use serde::{Deserialize, Serialize};

use crate::raster::{BinaryMask, Grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            4 => Some(Self::Four),
            8 => Some(Self::Eight),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Self::Four => 4,
            Self::Eight => 8,
        }
    }
}

/// Component labels, `0` for background and `1..=count` in order of each
/// component's first pixel in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Labeling {
    pub labels: Grid<u32>,
    pub count: u32,
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

fn union(parent: &mut [u32], a: u32, b: u32) -> u32 {
    let (ra, rb) = (find(parent, a), find(parent, b));
    let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
    parent[hi as usize] = lo;
    lo
}

/// Two-pass union-find labeling.
pub fn connected_components(bin: &BinaryMask, conn: Connectivity) -> Labeling {
    let (w, h) = (bin.width(), bin.height());
    let src = bin.as_slice();
    let mut prov = vec![0u32; w * h];
    // parent[0] is the unused background slot.
    let mut parent: Vec<u32> = vec![0];
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            if !src[i] {
                continue;
            }
            let mut label = 0u32;
            let neighbour = |j: usize, label: &mut u32, parent: &mut Vec<u32>| {
                let l = prov[j];
                if l != 0 {
                    *label = if *label == 0 { find(parent, l) } else { union(parent, *label, l) };
                }
            };
            if c > 0 {
                neighbour(i - 1, &mut label, &mut parent);
            }
            if r > 0 {
                neighbour(i - w, &mut label, &mut parent);
                if conn == Connectivity::Eight {
                    if c > 0 {
                        neighbour(i - w - 1, &mut label, &mut parent);
                    }
                    if c + 1 < w {
                        neighbour(i - w + 1, &mut label, &mut parent);
                    }
                }
            }
            if label == 0 {
                label = parent.len() as u32;
                parent.push(label);
            }
            prov[i] = label;
        }
    }

    let mut remap = vec![0u32; parent.len()];
    let mut count = 0u32;
    for l in prov.iter_mut() {
        if *l == 0 {
            continue;
        }
        let root = find(&mut parent, *l) as usize;
        if remap[root] == 0 {
            count += 1;
            remap[root] = count;
        }
        *l = remap[root];
    }
    Labeling {
        labels: Grid::from_vec(w, h, prov).expect("label buffer matches mask shape"),
        count,
    }
}

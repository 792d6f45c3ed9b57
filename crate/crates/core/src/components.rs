//! 4-connected component labelling.

use crate::raster::BinaryMask;

/// Inclusive pixel bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BBox {
    pub x_min: u32,
    pub y_min: u32,
    pub x_max: u32,
    pub y_max: u32,
}

impl BBox {
    pub fn contains(&self, x: u32, y: u32) -> bool {
        (self.x_min..=self.x_max).contains(&x) && (self.y_min..=self.y_max).contains(&y)
    }
}

/// One maximal 4-connected set of foreground pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub id: usize,
    /// `(x, y)` coordinates in raster order.
    pub pixels: Vec<(u32, u32)>,
    pub bbox: BBox,
}

impl Region {
    pub fn area(&self) -> usize {
        self.pixels.len()
    }
}

struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    fn new() -> Self {
        Self { parent: Vec::new() }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        lo
    }
}

const UNLABELLED: u32 = u32::MAX;

/// Labels the mask's foreground into regions ordered by `(y_min, x_min)` of
/// their bounding boxes, with ids `0..n` in that order. Ties keep raster
/// order of each region's first pixel.
pub fn connected_components(mask: &BinaryMask) -> Vec<Region> {
    let (w, h) = mask.dims();
    let data = mask.data();
    let mut labels = vec![UNLABELLED; data.len()];
    let mut sets = DisjointSet::new();

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if !data[i] {
                continue;
            }
            let left = if x > 0 { labels[i - 1] } else { UNLABELLED };
            let up = if y > 0 { labels[i - w] } else { UNLABELLED };
            labels[i] = match (left != UNLABELLED, up != UNLABELLED) {
                (false, false) => sets.make(),
                (true, false) => left,
                (false, true) => up,
                (true, true) if left == up => left,
                (true, true) => sets.union(left, up),
            };
        }
    }

    // Compact roots into first-seen order, which is raster order of the
    // topmost-leftmost pixel of every component.
    let mut compact = vec![UNLABELLED; sets.parent.len()];
    let mut groups: Vec<Vec<(u32, u32)>> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let label = labels[y * w + x];
            if label == UNLABELLED {
                continue;
            }
            let root = sets.find(label) as usize;
            if compact[root] == UNLABELLED {
                compact[root] = groups.len() as u32;
                groups.push(Vec::new());
            }
            groups[compact[root] as usize].push((x as u32, y as u32));
        }
    }

    let mut regions: Vec<Region> = groups
        .into_iter()
        .map(|pixels| {
            let mut bbox = BBox {
                x_min: u32::MAX,
                y_min: u32::MAX,
                x_max: 0,
                y_max: 0,
            };
            for &(x, y) in &pixels {
                bbox.x_min = bbox.x_min.min(x);
                bbox.y_min = bbox.y_min.min(y);
                bbox.x_max = bbox.x_max.max(x);
                bbox.y_max = bbox.y_max.max(y);
            }
            Region { id: 0, pixels, bbox }
        })
        .collect();
    regions.sort_by_key(|r| (r.bbox.y_min, r.bbox.x_min));
    for (id, r) in regions.iter_mut().enumerate() {
        r.id = id;
    }
    regions
}

/// Paints the union of `regions` into a `width x height` mask.
pub fn regions_to_mask(regions: &[Region], width: usize, height: usize) -> BinaryMask {
    let mut data = vec![false; width * height];
    for r in regions {
        for &(x, y) in &r.pixels {
            data[y as usize * width + x as usize] = true;
        }
    }
    BinaryMask::from_parts_unchecked(width, height, data)
}

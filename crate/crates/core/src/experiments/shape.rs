//! Raster pictures of the front set `S(t)` in two dimensions.

use std::io::Write;

use crate::dynamics::{front_set, InfectionRecord};
use crate::error::{invalid, Result};
use crate::lattice::{BoxShape, Point};

pub const WHITE: [u8; 3] = [255, 255, 255];
pub const GREY: [u8; 3] = [160, 160, 160];
pub const BLACK: [u8; 3] = [0, 0, 0];

/// Row-major RGB pixels, top row first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[u8; 3]>,
}

impl Raster {
    /// Pixel of lattice site `(i, j)` with the origin at the lower left.
    pub fn at(&self, i: usize, j: usize) -> [u8; 3] {
        self.pixels[(self.height - 1 - j) * self.width + i]
    }

    pub fn write_ppm<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "P6\n{} {}\n255\n", self.width, self.height)?;
        let bytes: Vec<u8> = self.pixels.iter().flatten().copied().collect();
        w.write_all(&bytes)?;
        Ok(())
    }
}

/// One pixel per site of `window`: black if infected by time `t`, grey if
/// updated at least once, white otherwise. Sites absent from the record are
/// white.
pub fn shape_raster(record: &InfectionRecord, t: f64, window: &BoxShape) -> Result<Raster> {
    if window.dim() != 2 || record.dim() != 2 {
        return Err(invalid("shape rendering needs a two-dimensional record and window"));
    }
    let front = front_set(record, t)?;
    let width = window.lengths[0] as usize + 1;
    let height = window.lengths[1] as usize + 1;
    let mut pixels = vec![WHITE; width * height];
    let o = window.origin.coords();
    for j in 0..height {
        for i in 0..width {
            let x = Point::new(vec![o[0] + i as i64, o[1] + j as i64]);
            let colour = if front.is_infected(&x) {
                BLACK
            } else if front.is_updated(&x) {
                GREY
            } else {
                WHITE
            };
            pixels[(height - 1 - j) * width + i] = colour;
        }
    }
    Ok(Raster { width, height, pixels })
}

pub fn shape_render<W: Write>(record: &InfectionRecord, t: f64, window: &BoxShape, out: W) -> Result<()> {
    shape_raster(record, t, window)?.write_ppm(out)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::dynamics::{run_trajectory, Domain, RunOptions, SiteTimes, Window};

    #[test]
    fn empty_record_is_white() {
        let rec = InfectionRecord::new(2, 5.0, true, BTreeMap::new());
        let r = shape_raster(&rec, 1.0, &BoxShape::cube(2, 3)).unwrap();
        assert!(r.pixels.iter().all(|p| *p == WHITE));
        let mut buf = Vec::new();
        r.write_ppm(&mut buf).unwrap();
        assert!(buf.starts_with(b"P6\n4 4\n255\n"));
        assert_eq!(buf.len(), 11 + 3 * 16);
    }

    #[test]
    fn origin_lower_left() {
        let mut m = BTreeMap::new();
        m.insert(Point::from([0, 0]), SiteTimes { tau: 1.0, first_update: 0.5 });
        m.insert(Point::from([1, 0]), SiteTimes { tau: f64::INFINITY, first_update: 2.0 });
        let rec = InfectionRecord::new(2, 5.0, true, m);
        let r = shape_raster(&rec, 3.0, &BoxShape::at_origin(vec![1, 1])).unwrap();
        assert_eq!(r.at(0, 0), BLACK);
        assert_eq!(r.at(1, 0), GREY);
        assert_eq!(r.pixels[2], BLACK);
        assert_eq!(r.pixels[0], WHITE);
    }

    #[test]
    fn simulated_origin_is_marked() {
        let window = BoxShape::cube(2, 5);
        let opts = RunOptions::new(0.3, 20.0, 4)
            .window(Window::Box { shape: window.clone() })
            .track_first_update(true);
        let (_, rec) = run_trajectory(&Domain::Quadrant { d: 2 }, &opts).unwrap();
        let tau = rec.tau(&Point::origin(2)).unwrap();
        assert!(tau < 20.0);
        let r = shape_raster(&rec, (tau + 20.0) / 2.0, &window).unwrap();
        assert_ne!(r.at(0, 0), WHITE);
    }

    #[test]
    fn rejects_wrong_dimension() {
        let rec = InfectionRecord::new(1, 5.0, true, BTreeMap::new());
        assert!(shape_raster(&rec, 1.0, &BoxShape::cube(2, 1)).is_err());
    }
}

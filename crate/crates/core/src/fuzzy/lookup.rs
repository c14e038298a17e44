use super::controller::MamdaniController;
use super::FuzzyError;

pub const DEFAULT_LOOKUP_SIZE: usize = 101;

/// Controller output precomputed on a uniform `size x size` grid spanning the
/// `e` and `de` universes, queried by bilinear interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct LookupTable {
    size: usize,
    e_max: f64,
    de_max: f64,
    u_max: f64,
    /// Row-major, `values[i * size + j]` at (e node i, de node j).
    values: Vec<f64>,
}

impl LookupTable {
    pub fn build(c: &MamdaniController, size: usize) -> Result<Self, FuzzyError> {
        if size < 2 {
            return Err(FuzzyError::InvalidController(format!(
                "lookup size must be at least 2, got {size}"
            )));
        }
        let (e_max, de_max) = (c.e_var().gain, c.de_var().gain);
        let mut values = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                values.push(c.eval(node(i, size) * e_max, node(j, size) * de_max));
            }
        }
        Ok(LookupTable {
            size,
            e_max,
            de_max,
            u_max: c.u_max(),
            values,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    /// Physical `(e, de)` coordinates of grid node `(i, j)`.
    pub fn node_coords(&self, i: usize, j: usize) -> (f64, f64) {
        (
            node(i, self.size) * self.e_max,
            node(j, self.size) * self.de_max,
        )
    }

    pub fn node_value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Bilinear interpolation; inputs are clamped to the universes.
    pub fn eval(&self, e: f64, de: f64) -> f64 {
        let (i, fi) = self.cell(e / self.e_max);
        let (j, fj) = self.cell(de / self.de_max);
        let v00 = self.node_value(i, j);
        let v01 = self.node_value(i, j + 1);
        let v10 = self.node_value(i + 1, j);
        let v11 = self.node_value(i + 1, j + 1);
        let a = v00 + (v01 - v00) * fj;
        let b = v10 + (v11 - v10) * fj;
        a + (b - a) * fi
    }

    /// Lower node index and fractional offset for a normalized coordinate.
    fn cell(&self, x: f64) -> (usize, f64) {
        let span = (self.size - 1) as f64;
        let p = (x.clamp(-1.0, 1.0) + 1.0) * 0.5 * span;
        let i = (p.floor() as usize).min(self.size - 2);
        (i, p - i as f64)
    }
}

fn node(i: usize, size: usize) -> f64 {
    -1.0 + 2.0 * i as f64 / (size - 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (MamdaniController, LookupTable) {
        let c = MamdaniController::with_gains(0.2, 0.5, 180.0).unwrap();
        let t = LookupTable::build(&c, DEFAULT_LOOKUP_SIZE).unwrap();
        (c, t)
    }

    #[test]
    fn corner_and_center_nodes() {
        let (c, t) = setup();
        assert_eq!(t.node_value(100, 100), c.eval(0.2, 0.5));
        assert_eq!(t.node_value(50, 50), 0.0);
        assert!((t.eval(0.2, 0.5) - c.eval(0.2, 0.5)).abs() < 1e-12);
        assert!(t.values().iter().all(|v| v.abs() <= 180.0));
    }

    #[test]
    fn node_query_returns_stored_value() {
        let (_, t) = setup();
        for (i, j) in [(0, 0), (3, 97), (50, 12), (100, 0)] {
            let (e, de) = t.node_coords(i, j);
            assert!((t.eval(e, de) - t.node_value(i, j)).abs() < 1e-9);
        }
    }

    #[test]
    fn cell_center_is_corner_mean() {
        let (_, t) = setup();
        let (e0, de0) = t.node_coords(20, 70);
        let (e1, de1) = t.node_coords(21, 71);
        let mean = (t.node_value(20, 70)
            + t.node_value(21, 70)
            + t.node_value(20, 71)
            + t.node_value(21, 71))
            / 4.0;
        assert!((t.eval(0.5 * (e0 + e1), 0.5 * (de0 + de1)) - mean).abs() < 1e-9);
    }

    #[test]
    fn close_to_direct_evaluation() {
        let (c, t) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (mut worst, mut within) = (0.0f64, 0);
        for _ in 0..1000 {
            let e = rng.gen_range(-0.2..=0.2);
            let de = rng.gen_range(-0.5..=0.5);
            let d = (t.eval(e, de) - c.eval(e, de)).abs();
            worst = worst.max(d);
            within += usize::from(d <= 1.0);
        }
        // Kinks of the max-min surface between nodes bound the worst case
        // well above the typical error.
        assert!(worst <= 3.0, "worst {worst}");
        assert!(within >= 980, "{within} of 1000 within one degree");
    }

    #[test]
    fn clamps_outside_universe() {
        let (_, t) = setup();
        assert_eq!(t.eval(9.0, 9.0), t.eval(0.2, 0.5));
        assert!(LookupTable::build(&setup().0, 1).is_err());
    }
}

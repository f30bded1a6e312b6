use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Chordal radius under which two points are considered equal.
pub const POINT_TOL: f64 = 1e-9;

/// Chordal radius used to merge numerically split roots into one cluster.
pub const CLUSTER_TOL: f64 = 1e-6;

/// Local coordinate chart on the sphere.
///
/// `Z` is the identity chart on the finite plane, `W` is `w = 1/z` and
/// covers the point at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Z,
    W,
}

/// A point of the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub const ZERO: SpherePoint = SpherePoint::Finite(Complex64 { re: 0.0, im: 0.0 });

    pub fn new(re: f64, im: f64) -> Self {
        SpherePoint::Finite(Complex64::new(re, im))
    }

    pub fn real(re: f64) -> Self {
        SpherePoint::new(re, 0.0)
    }

    /// Builds the point `num / den`, mapping a vanishing denominator (or an
    /// overflowing quotient) to infinity.
    pub fn from_ratio(num: Complex64, den: Complex64) -> Self {
        if den.re == 0.0 && den.im == 0.0 {
            return SpherePoint::Infinity;
        }
        let q = num / den;
        if q.re.is_finite() && q.im.is_finite() {
            SpherePoint::Finite(q)
        } else {
            SpherePoint::Infinity
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn is_finite_value(&self) -> bool {
        match self {
            SpherePoint::Finite(z) => z.re.is_finite() && z.im.is_finite(),
            SpherePoint::Infinity => true,
        }
    }

    /// The chart in which computations at this point are carried out:
    /// `Z` inside the closed unit disk, `W` outside.
    pub fn canonical_chart(&self) -> Chart {
        match self {
            SpherePoint::Finite(z) if z.norm_sqr() <= 1.0 => Chart::Z,
            _ => Chart::W,
        }
    }

    /// Coordinate of the point in `chart`, or `None` when the chart does not
    /// contain it (infinity in `Z`, zero in `W`).
    pub fn coordinate(&self, chart: Chart) -> Option<Complex64> {
        match (chart, *self) {
            (Chart::Z, SpherePoint::Finite(z)) => Some(z),
            (Chart::Z, SpherePoint::Infinity) => None,
            (Chart::W, SpherePoint::Infinity) => Some(Complex64::new(0.0, 0.0)),
            (Chart::W, SpherePoint::Finite(z)) => {
                if z.re == 0.0 && z.im == 0.0 {
                    None
                } else {
                    Some(z.inv())
                }
            }
        }
    }

    pub fn from_coordinate(chart: Chart, t: Complex64) -> Self {
        match chart {
            Chart::Z => SpherePoint::Finite(t),
            Chart::W => SpherePoint::from_ratio(Complex64::new(1.0, 0.0), t),
        }
    }

    /// Unit-norm homogeneous coordinates `(a, b)` with `z = a / b`.
    pub fn homogeneous(&self) -> (Complex64, Complex64) {
        match *self {
            SpherePoint::Infinity => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            SpherePoint::Finite(z) => {
                if z.norm_sqr() <= 1.0 {
                    let n = (1.0 + z.norm_sqr()).sqrt();
                    (z / n, Complex64::new(1.0 / n, 0.0))
                } else {
                    let w = z.inv();
                    let n = (1.0 + w.norm_sqr()).sqrt();
                    (Complex64::new(1.0 / n, 0.0), w / n)
                }
            }
        }
    }

    /// Chordal distance `|z - w| / sqrt((1 + |z|^2)(1 + |w|^2))`, in `[0, 1]`.
    pub fn chordal_distance(&self, other: &SpherePoint) -> f64 {
        let (a1, b1) = self.homogeneous();
        let (a2, b2) = other.homogeneous();
        (a1 * b2 - a2 * b1).norm()
    }

    pub fn approx_eq(&self, other: &SpherePoint, tol: f64) -> bool {
        self.chordal_distance(other) <= tol
    }

    /// Modulus, with infinity mapped to `f64::INFINITY`.
    pub fn modulus(&self) -> f64 {
        match self {
            SpherePoint::Finite(z) => z.norm(),
            SpherePoint::Infinity => f64::INFINITY,
        }
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::Finite(z)
    }
}

impl From<f64> for SpherePoint {
    fn from(x: f64) -> Self {
        SpherePoint::real(x)
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Infinity => write!(f, "inf"),
            SpherePoint::Finite(z) => fmt_complex(f, *z),
        }
    }
}

/// Writes a complex number as a literal the map-spec parser accepts.
pub(crate) fn fmt_complex(f: &mut impl fmt::Write, z: Complex64) -> fmt::Result {
    if z.im == 0.0 {
        write!(f, "{:?}", z.re)
    } else if z.re == 0.0 {
        write!(f, "{:?}i", z.im)
    } else if z.im < 0.0 {
        write!(f, "({:?}-{:?}i)", z.re, -z.im)
    } else {
        write!(f, "({:?}+{:?}i)", z.re, z.im)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointRepr {
    Finite([f64; 2]),
    Marker(String),
}

impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            SpherePoint::Finite(z) => PointRepr::Finite([z.re, z.im]).serialize(s),
            SpherePoint::Infinity => PointRepr::Marker("inf".into()).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for SpherePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match PointRepr::deserialize(d)? {
            PointRepr::Finite([re, im]) => Ok(SpherePoint::new(re, im)),
            PointRepr::Marker(m) if m == "inf" => Ok(SpherePoint::Infinity),
            PointRepr::Marker(m) => Err(serde::de::Error::custom(format!(
                "expected [re, im] or \"inf\", got {m:?}"
            ))),
        }
    }
}

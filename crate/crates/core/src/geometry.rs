//! Two-body circular-orbit kinematics, ground-site kinematics, Earth-occlusion
//! line of sight, visibility windows, and propagation latency.
//!
//! All positions are expressed in an Earth-centered inertial frame with the
//! x-axis through latitude 0 / longitude 0 at epoch and the z-axis through the
//! north pole. Earth is modeled as a sphere rotating at the sidereal rate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Signal propagation speed in vacuum, km/s.
pub const SPEED_OF_LIGHT_KM_S: f64 = 299_792.0;
/// Spherical Earth radius, km.
pub const EARTH_RADIUS_KM: f64 = 6_371.0;
/// Geocentric gravitational parameter, km^3/s^2.
pub const MU_KM3_S2: f64 = 398_600.4418;
/// Duration of one sidereal day, s.
pub const SIDEREAL_DAY_S: f64 = 86_164.1;

/// Altitude of the geostationary belt used throughout, km.
pub const GEO_ALTITUDE_KM: f64 = 35_780.0;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("altitude must be positive, got {0} km")]
    NonPositiveAltitude(f64),
    #[error("inclination must be in [0, 180] degrees, got {0}")]
    BadInclination(f64),
    #[error("latitude must be in [-90, 90] degrees, got {0}")]
    BadLatitude(f64),
    #[error("distance must be non-negative, got {0} km")]
    NegativeDistance(f64),
    #[error("endpoint lies inside the Earth (radius {0} km)")]
    EndpointInsideEarth(f64),
}

/// Position in the Earth-centered inertial frame, km.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EciPosition {
    pub x_km: f64,
    pub y_km: f64,
    pub z_km: f64,
}

impl EciPosition {
    pub fn new(x_km: f64, y_km: f64, z_km: f64) -> Self {
        Self { x_km, y_km, z_km }
    }

    pub fn norm_km(&self) -> f64 {
        (self.x_km * self.x_km + self.y_km * self.y_km + self.z_km * self.z_km).sqrt()
    }

    fn sub(&self, other: &EciPosition) -> EciPosition {
        EciPosition::new(
            self.x_km - other.x_km,
            self.y_km - other.y_km,
            self.z_km - other.z_km,
        )
    }

    fn dot(&self, other: &EciPosition) -> f64 {
        self.x_km * other.x_km + self.y_km * other.y_km + self.z_km * other.z_km
    }
}

/// Circular (zero-eccentricity) orbit around the spherical Earth.
///
/// `phase_deg` is the angular position along the orbit at `epoch_s`, measured
/// from the ascending node. `period_override_s` decouples the angular rate
/// from the Keplerian period; it exists so the geostationary belt can be
/// pinned to exactly one sidereal day at the conventional 35,780 km altitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularOrbit {
    pub altitude_km: f64,
    pub inclination_deg: f64,
    #[serde(default)]
    pub raan_deg: f64,
    #[serde(default)]
    pub phase_deg: f64,
    #[serde(default)]
    pub epoch_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period_override_s: Option<f64>,
}

impl CircularOrbit {
    pub fn new(
        altitude_km: f64,
        inclination_deg: f64,
        raan_deg: f64,
        phase_deg: f64,
        epoch_s: f64,
    ) -> Result<Self, GeometryError> {
        if !(altitude_km > 0.0) {
            return Err(GeometryError::NonPositiveAltitude(altitude_km));
        }
        if !(0.0..=180.0).contains(&inclination_deg) {
            return Err(GeometryError::BadInclination(inclination_deg));
        }
        Ok(Self {
            altitude_km,
            inclination_deg,
            raan_deg: raan_deg.rem_euclid(360.0),
            phase_deg: phase_deg.rem_euclid(360.0),
            epoch_s,
            period_override_s: None,
        })
    }

    /// Equatorial orbit at the geostationary altitude, locked to the sidereal
    /// day so the satellite stays fixed over `longitude_deg`.
    pub fn geostationary(longitude_deg: f64) -> Self {
        Self {
            altitude_km: GEO_ALTITUDE_KM,
            inclination_deg: 0.0,
            raan_deg: 0.0,
            phase_deg: longitude_deg.rem_euclid(360.0),
            epoch_s: 0.0,
            period_override_s: Some(SIDEREAL_DAY_S),
        }
    }

    pub fn radius_km(&self) -> f64 {
        EARTH_RADIUS_KM + self.altitude_km
    }

    /// Effective period: the Keplerian period unless overridden.
    pub fn period_s(&self) -> f64 {
        match self.period_override_s {
            Some(p) => p,
            None => orbital_period(self.altitude_km).expect("validated altitude"),
        }
    }

    /// Inertial position at time `t_s`.
    pub fn position_at(&self, t_s: f64) -> EciPosition {
        satellite_position(self, t_s)
    }
}

/// Fixed point on the rotating Earth surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundSite {
    pub latitude_deg: f64,
    pub longitude_deg: f64,
}

impl GroundSite {
    pub fn new(latitude_deg: f64, longitude_deg: f64) -> Result<Self, GeometryError> {
        if !(-90.0..=90.0).contains(&latitude_deg) {
            return Err(GeometryError::BadLatitude(latitude_deg));
        }
        Ok(Self {
            latitude_deg,
            longitude_deg: wrap_longitude(longitude_deg),
        })
    }

    pub fn position_at(&self, t_s: f64) -> EciPosition {
        ground_position(self, t_s)
    }
}

fn wrap_longitude(lon: f64) -> f64 {
    let w = (lon + 180.0).rem_euclid(360.0) - 180.0;
    if w == 180.0 {
        -180.0
    } else {
        w
    }
}

/// Either kind of network node geometry: a satellite on a circular orbit or a
/// site on the rotating surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeGeometry {
    Orbit(CircularOrbit),
    Ground(GroundSite),
}

impl NodeGeometry {
    pub fn position_at(&self, t_s: f64) -> EciPosition {
        match self {
            NodeGeometry::Orbit(o) => o.position_at(t_s),
            NodeGeometry::Ground(g) => g.position_at(t_s),
        }
    }
}

/// Line-of-sight tuning knobs.
///
/// Links that would graze the atmosphere below `grazing_margin_km` above the
/// surface are rejected for space-space paths; ground endpoints instead
/// require the peer at least `min_elevation_deg` above the local horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LosConfig {
    pub grazing_margin_km: f64,
    pub min_elevation_deg: f64,
}

impl Default for LosConfig {
    fn default() -> Self {
        Self {
            grazing_margin_km: 100.0,
            min_elevation_deg: 5.0,
        }
    }
}

/// Maximal interval of continuous visibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisibilityWindow {
    pub start_s: f64,
    pub end_s: f64,
}

impl VisibilityWindow {
    pub fn duration_s(&self) -> f64 {
        self.end_s - self.start_s
    }
}

/// Keplerian period of a circular orbit: 2*pi*sqrt(a^3/mu).
pub fn orbital_period(altitude_km: f64) -> Result<f64, GeometryError> {
    if !(altitude_km > 0.0) {
        return Err(GeometryError::NonPositiveAltitude(altitude_km));
    }
    let a = EARTH_RADIUS_KM + altitude_km;
    Ok(2.0 * std::f64::consts::PI * (a.powi(3) / MU_KM3_S2).sqrt())
}

/// Inertial position of a satellite at time `t_s`.
pub fn satellite_position(orbit: &CircularOrbit, t_s: f64) -> EciPosition {
    let r = orbit.radius_km();
    let n = 360.0 / orbit.period_s();
    let u = (orbit.phase_deg + n * (t_s - orbit.epoch_s)).to_radians();
    let raan = orbit.raan_deg.to_radians();
    let inc = orbit.inclination_deg.to_radians();
    let (sin_u, cos_u) = u.sin_cos();
    let (sin_raan, cos_raan) = raan.sin_cos();
    let (sin_inc, cos_inc) = inc.sin_cos();
    EciPosition::new(
        r * (cos_raan * cos_u - sin_raan * sin_u * cos_inc),
        r * (sin_raan * cos_u + cos_raan * sin_u * cos_inc),
        r * (sin_u * sin_inc),
    )
}

/// Inertial position of a ground site at time `t_s`; longitude advances 360
/// degrees per sidereal day.
pub fn ground_position(site: &GroundSite, t_s: f64) -> EciPosition {
    let lat = site.latitude_deg.to_radians();
    let lon = (site.longitude_deg + 360.0 * t_s / SIDEREAL_DAY_S).to_radians();
    let (sin_lat, cos_lat) = lat.sin_cos();
    let (sin_lon, cos_lon) = lon.sin_cos();
    EciPosition::new(
        EARTH_RADIUS_KM * cos_lat * cos_lon,
        EARTH_RADIUS_KM * cos_lat * sin_lon,
        EARTH_RADIUS_KM * sin_lat,
    )
}

/// Euclidean separation between two points, km.
pub fn distance_km(a: &EciPosition, b: &EciPosition) -> f64 {
    a.sub(b).norm_km()
}

/// Signal travel time over `distance_km`.
pub fn one_way_latency_s(distance_km: f64) -> Result<f64, GeometryError> {
    if distance_km < 0.0 {
        return Err(GeometryError::NegativeDistance(distance_km));
    }
    Ok(distance_km / SPEED_OF_LIGHT_KM_S)
}

// Endpoints within this band above the surface are treated as surface nodes
// and judged by elevation angle rather than the grazing-sphere test.
const SURFACE_BAND_KM: f64 = 0.5;
const INSIDE_EARTH_TOL_KM: f64 = 1e-6;

/// Elevation of `target` above the local horizon of `ground`, degrees.
pub fn elevation_deg(ground: &EciPosition, target: &EciPosition) -> f64 {
    let dir = target.sub(ground);
    let dist = dir.norm_km();
    let g_norm = ground.norm_km();
    if dist == 0.0 || g_norm == 0.0 {
        return 90.0;
    }
    (ground.dot(&dir) / (g_norm * dist))
        .clamp(-1.0, 1.0)
        .asin()
        .to_degrees()
}

/// Minimum distance from the Earth's center to the segment a-b.
fn segment_min_radius_km(a: &EciPosition, b: &EciPosition) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(&ab);
    if len2 == 0.0 {
        return a.norm_km();
    }
    // Closest approach of the segment to the origin.
    let t = (-a.dot(&ab) / len2).clamp(0.0, 1.0);
    EciPosition::new(
        a.x_km + t * ab.x_km,
        a.y_km + t * ab.y_km,
        a.z_km + t * ab.z_km,
    )
    .norm_km()
}

/// Whether the straight path a-b is clear of the (margin-inflated) Earth.
///
/// Space-space links must clear the sphere of radius `EARTH_RADIUS_KM +
/// grazing_margin_km`. Links with a surface endpoint are judged by the
/// elevation of the peer at that endpoint instead, since any uplink has to
/// cross the atmosphere. Identical endpoints are trivially visible.
pub fn has_line_of_sight(
    a: &EciPosition,
    b: &EciPosition,
    cfg: &LosConfig,
) -> Result<bool, GeometryError> {
    for p in [a, b] {
        let r = p.norm_km();
        if r < EARTH_RADIUS_KM - INSIDE_EARTH_TOL_KM {
            return Err(GeometryError::EndpointInsideEarth(r));
        }
    }
    if distance_km(a, b) < 1e-9 {
        return Ok(true);
    }
    let a_surface = a.norm_km() <= EARTH_RADIUS_KM + SURFACE_BAND_KM;
    let b_surface = b.norm_km() <= EARTH_RADIUS_KM + SURFACE_BAND_KM;
    let mut visible = true;
    if a_surface {
        visible &= elevation_deg(a, b) >= cfg.min_elevation_deg;
    }
    if b_surface {
        visible &= elevation_deg(b, a) >= cfg.min_elevation_deg;
    }
    if !a_surface && !b_surface {
        visible = segment_min_radius_km(a, b) >= EARTH_RADIUS_KM + cfg.grazing_margin_km;
    }
    Ok(visible)
}

/// Coarse sampling step for the window search, s.
pub const WINDOW_SAMPLE_STEP_S: f64 = 10.0;
/// Bisection resolution for window boundaries, s.
pub const WINDOW_REFINE_S: f64 = 0.1;

/// Earliest maximal visibility interval between `a` and `b` inside
/// `[from_s, from_s + horizon_s]`, or `None` when the pair never sees each
/// other in that span. Boundaries are located by coarse sampling followed by
/// bisection; windows are clamped to the search horizon.
pub fn next_visibility_window(
    a: &NodeGeometry,
    b: &NodeGeometry,
    from_s: f64,
    horizon_s: f64,
    cfg: &LosConfig,
) -> Option<VisibilityWindow> {
    assert!(horizon_s > 0.0, "horizon must be positive");
    let end = from_s + horizon_s;
    let los_at = |t: f64| -> bool {
        has_line_of_sight(&a.position_at(t), &b.position_at(t), cfg).unwrap_or(false)
    };

    // Locate the first visible sample, refining the rising edge.
    let mut prev = from_s;
    let mut prev_vis = los_at(prev);
    let start;
    if prev_vis {
        start = from_s;
    } else {
        loop {
            let t = (prev + WINDOW_SAMPLE_STEP_S).min(end);
            if t <= prev {
                return None;
            }
            if los_at(t) {
                start = refine_boundary(prev, t, &los_at, true);
                prev = t;
                prev_vis = true;
                break;
            }
            if t >= end {
                return None;
            }
            prev = t;
        }
    }
    debug_assert!(prev_vis);

    // Walk forward to the falling edge or the horizon.
    let mut t_in = prev.max(start);
    loop {
        let t_next = (t_in + WINDOW_SAMPLE_STEP_S).min(end);
        if t_next <= t_in {
            return Some(VisibilityWindow {
                start_s: start,
                end_s: end,
            });
        }
        if los_at(t_next) {
            t_in = t_next;
            continue;
        }
        let end_s = refine_boundary(t_in, t_next, &los_at, false);
        return Some(VisibilityWindow {
            start_s: start,
            end_s,
        });
    }
}

/// All visibility windows between `a` and `b` inside the horizon, in order.
pub fn visibility_windows(
    a: &NodeGeometry,
    b: &NodeGeometry,
    from_s: f64,
    horizon_s: f64,
    cfg: &LosConfig,
) -> Vec<VisibilityWindow> {
    let end = from_s + horizon_s;
    let mut windows = Vec::new();
    let mut cursor = from_s;
    while cursor < end {
        match next_visibility_window(a, b, cursor, end - cursor, cfg) {
            Some(w) => {
                cursor = w.end_s + WINDOW_REFINE_S;
                windows.push(w);
            }
            None => break,
        }
    }
    windows
}

// Bisect between a sample where visibility is `!rising` and one where it is
// `rising`, returning a time on the visible side of the transition.
fn refine_boundary(lo: f64, hi: f64, los_at: &dyn Fn(f64) -> bool, rising: bool) -> f64 {
    let mut lo = lo;
    let mut hi = hi;
    while hi - lo > WINDOW_REFINE_S {
        let mid = 0.5 * (lo + hi);
        if los_at(mid) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if rising {
        hi
    } else {
        lo
    }
}

//! The bundled example fields, compiled in so tests and tooling share one
//! copy with the files under `fields/`.

pub const SIN2PI: &str = include_str!("../fields/sin2pi.vf");
pub const SHIFTED_SIN4PI: &str = include_str!("../fields/shifted_sin4pi.vf");
pub const SIN4PI_COS2PI: &str = include_str!("../fields/sin4pi_cos2pi.vf");
pub const ONE_MINUS_COS: &str = include_str!("../fields/one_minus_cos.vf");
pub const SIN_CUBED: &str = include_str!("../fields/sin_cubed.vf");
pub const ZERO: &str = include_str!("../fields/zero.vf");
pub const COMBINATION: &str = include_str!("../fields/combination.vf");

/// All bundled fields as (name, source) pairs.
pub fn all() -> Vec<(&'static str, &'static str)> {
    vec![
        ("sin2pi", SIN2PI),
        ("shifted_sin4pi", SHIFTED_SIN4PI),
        ("sin4pi_cos2pi", SIN4PI_COS2PI),
        ("one_minus_cos", ONE_MINUS_COS),
        ("sin_cubed", SIN_CUBED),
        ("zero", ZERO),
        ("combination", COMBINATION),
    ]
}

/// The fields that are structurally stable.
pub fn stable() -> Vec<(&'static str, &'static str)> {
    vec![
        ("sin2pi", SIN2PI),
        ("shifted_sin4pi", SHIFTED_SIN4PI),
        ("sin4pi_cos2pi", SIN4PI_COS2PI),
    ]
}

/// The fields that are not structurally stable.
pub fn unstable() -> Vec<(&'static str, &'static str)> {
    vec![
        ("one_minus_cos", ONE_MINUS_COS),
        ("sin_cubed", SIN_CUBED),
        ("zero", ZERO),
        ("combination", COMBINATION),
    ]
}

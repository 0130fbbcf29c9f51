//! Theory predictions, cutoff curves, shape rendering and the experiment
//! runner behind the `eastlab` command line.

mod cli;
mod cutoff;
mod params;
mod run;
mod shape;
mod theory;
mod verify;

pub use cli::{cli_run, exit_code};
pub use cutoff::{
    cutoff_curve, cutoff_curve_mc, CutoffCurve, CutoffMode, CutoffPoint, EXACT_ALL_STARTS_SITES,
    EXACT_SINGLE_START_SITES,
};
pub use params::{parse_direction, parse_region, CommandKind, ExperimentConfig, NGrid};
pub use run::{run_config, write_outputs, RunOutput, VERSION};
pub use shape::{shape_raster, shape_render, Raster, BLACK, GREY, WHITE};
pub use theory::{
    f_fixed_point, f_map, f_orbit, in_equilibrium_region, part_c, phi2_bound, theory_exponents, FixedPoint,
    TheoryPrediction, FIXED_POINT_TOL, F_MAX_ITER,
};
pub use verify::{run_suite, Check};

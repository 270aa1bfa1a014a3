//! Parameter-space atlas: region classification, predictions, application
//! tables and grid sweeps.

mod applications;
mod regions;
mod sweep;

pub use applications::{
    kuttner_predict, lommel_function, lommel_predict, steinerberger_predict, steinerberger_signs, steinerberger_value,
    williamson_predict, williamson_psi, SignVerdict, SteinerbergerTerm,
};
pub use regions::{
    classify_beta_params, in_c, in_c_star, in_concave_strip, in_d, in_d_star, in_pc, in_pc_star, in_ps, in_ps_star,
    predict, predict_derivatives_from_shape, predict_from_shape, predict_tag, RegionLabel, RegionTag,
};
pub use sweep::{
    beta_transform, parse_grid, sweep, verify_cell, write_csv, write_jsonl, AtlasRecord, CellViolation,
    ATLAS_CSV_HEADER,
};

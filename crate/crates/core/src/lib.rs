pub mod analysis;
pub mod cache;
pub mod exact;
pub mod hp;
pub mod numeric;
pub mod reducer;
pub mod series;
pub mod zeta_form;

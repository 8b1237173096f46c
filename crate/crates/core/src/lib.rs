pub mod coeff;
pub mod emap;
pub mod filt;
pub mod magnus;
pub mod massey;
pub mod words;

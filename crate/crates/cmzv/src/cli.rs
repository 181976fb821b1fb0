//! placeholder
pub fn main_entry() {}

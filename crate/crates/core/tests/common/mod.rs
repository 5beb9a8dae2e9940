#![allow(dead_code)]

pub mod deg_oracle;
pub mod gen;
pub mod rank_oracle;
pub mod rect_oracle;
pub mod search_oracle;
pub mod transfer;

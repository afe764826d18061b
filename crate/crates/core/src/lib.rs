pub mod error;
pub mod exec;
pub mod laurent;
pub mod linalg;
pub mod poly;
pub mod rational;
pub mod scalar;
pub mod sparse;
pub mod algebra;
pub mod module;
pub mod pbw;
pub mod oracle;
pub mod quotient;
pub mod field;
pub mod verify;
pub mod contragredient;
pub mod coords;
pub mod correlation;
pub mod blocks;

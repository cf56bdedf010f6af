pub mod engine;
pub mod lang;
pub mod learner;
pub mod model;
pub mod monitor;
pub mod sim;
pub mod ratfunc;

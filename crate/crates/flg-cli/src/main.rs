//! Command line driver.

fn main() {}

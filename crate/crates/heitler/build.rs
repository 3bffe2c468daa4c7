// No build steps of our own. This script only exists so that the
// openblas-build build-dependency (see Cargo.toml) participates in feature
// unification, which fixes its compilation on this toolchain.
fn main() {}

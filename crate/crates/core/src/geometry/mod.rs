//! Wall shapes and the sheared body-fitted mesh.

mod mesh;
mod wall;

pub use mesh::{Element, Mesh};
pub use wall::{BumpSpec, WallKind, WallShape, CORNER_APEX_HALFWIDTH};

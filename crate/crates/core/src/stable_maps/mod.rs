//! Genus-0 stable maps with Ginzburg-Landau vortex components and their
//! reparametrization group.

mod mobius;
pub mod random;
mod reparam;
mod tree;

pub use mobius::Mobius;
pub use reparam::{act, automorphisms, ActionError, ReparamElement};
pub use tree::{
    BubbleTree, Condition, MarkedPoint, NodalPoint, Vertex, VertexType, Violation, POINT_TOLERANCE,
};
